// parallel.hpp — Bounded worker pool with per-index results and error capture
#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace decolab {

// Runs fn(0..count-1) on up to `workers` threads. Each task owns slot i of the
// caller's output, so the aggregated result is independent of scheduling; a
// throwing task is recorded (message per index) without aborting siblings.
inline std::vector<std::optional<std::string>> run_indexed(
    std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    std::vector<std::optional<std::string>> errors(count);
    if (count == 0) return errors;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));

    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                fn(i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            } catch (...) {
                errors[i] = "unknown error";
            }
        }
        return errors;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            } catch (...) {
                errors[i] = "unknown error";
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return errors;
}

}  // namespace decolab
