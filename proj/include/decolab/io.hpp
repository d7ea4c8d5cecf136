// io.hpp — Deterministic CSV emission, shortest-roundtrip floats, content hashing
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace decolab {

// Round-trippable decimal form of a double ("%.17g"): every emitted value can
// be parsed back to the identical bit pattern, and reruns are byte-identical.
inline std::string format_double(double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

// FNV-1a 64-bit hash, used to fingerprint emitted files in run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

// Accumulates a CSV table in memory, then writes it in one shot so the file
// contents (and their hash) are a pure function of the rows provided.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
        if (columns_.empty()) throw std::invalid_argument("CSV needs at least one column");
        append_row(columns_);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size()) {
            throw std::invalid_argument("CSV row width does not match header");
        }
        append_row(cells);
    }

    const std::string& contents() const { return buffer_; }
    std::uint64_t hash() const { return fnv1a64(buffer_); }

    // Writes the accumulated table; returns the FNV-1a hash of the bytes written.
    std::uint64_t write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
        out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        if (!out) throw std::runtime_error("write failed: " + path.string());
        return hash();
    }

private:
    void append_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) buffer_ += ',';
            buffer_ += cells[i];
        }
        buffer_ += '\n';
    }

    std::vector<std::string> columns_;
    std::string buffer_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace decolab
