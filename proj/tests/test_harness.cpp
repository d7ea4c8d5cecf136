// Tests for the recipe harness: configuration validation (defaults, aggregated
// errors, canonical round-trip), output-dir resolution, the resource pre-check,
// and an end-to-end small-bath recipe run with byte-identical reruns.
#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "decolab/harness.hpp"
#include "decolab/io.hpp"

namespace harness = decolab::harness;
namespace fs = std::filesystem;

namespace {

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
    for (const auto& e : errors) {
        if (e.find(needle) != std::string::npos) return true;
    }
    return false;
}

// Fresh directory under the system temp root; unique per call within the run.
fs::path scratch_dir(const std::string& label) {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("decolab_test_" + label + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("minimal config expands to full recipe defaults", "[harness]") {
    const auto result = harness::validate_config(R"({"recipe": "fig3_qbm"})");
    REQUIRE(result.ok());
    const auto& c = result.config;
    CHECK(c.recipe == "fig3_qbm");
    CHECK(c.seed == 1);
    CHECK(c.jobs == 0);
    CHECK(c.qbm.cutoff == 500.0);
    CHECK(c.qbm.temperature == 2.5e4);
    CHECK(c.qbm.omega0 == 1.0);
    CHECK(c.qbm.x0 == 4.0);
    CHECK(c.qbm.delta == 1.0);
    CHECK_FALSE(c.qbm.frequency_counterterm);
    CHECK(c.sweep.parameter == "gamma0");
    REQUIRE(c.sweep.values.size() == 10);
    CHECK(c.sweep.values.front() == Approx(1e-6));
    CHECK(c.sweep.values.back() == Approx(1e-2).epsilon(1e-12));

    const auto zero_t = harness::validate_config(R"({"recipe": "figA1_zeroT"})");
    REQUIRE(zero_t.ok());
    CHECK(zero_t.config.qbm.temperature == 0.0);
    CHECK(zero_t.config.qbm.gamma0 == Approx(0.01));
    CHECK(zero_t.config.qbm.x0 == 2.0);

    const auto spin = harness::validate_config(R"({"recipe": "fig2_crossover"})");
    REQUIRE(spin.ok());
    CHECK(spin.config.spin.n_spins == 12);
    CHECK(spin.config.sweep.parameter == "lambda");
    CHECK(spin.config.sweep.values.size() == 8);
}

TEST_CASE("validation reports every problem and names the offending key", "[harness]") {
    SECTION("aggregated field errors") {
        const auto result = harness::validate_config(
            R"({"recipe": "figA1_zeroT", "qbm": {"delta": -1, "x0": 0}, "bogus": 5})");
        REQUIRE_FALSE(result.ok());
        CHECK(mentions(result.errors, "qbm.delta"));
        CHECK(mentions(result.errors, "qbm.x0"));
        CHECK(mentions(result.errors, "unknown key: bogus"));
        CHECK(result.errors.size() >= 3);
    }
    SECTION("invalid JSON") {
        const auto result = harness::validate_config("{recipe:");
        REQUIRE_FALSE(result.ok());
        CHECK(mentions(result.errors, "not valid JSON"));
    }
    SECTION("unknown recipe") {
        const auto result = harness::validate_config(R"({"recipe": "fig9"})");
        REQUIRE_FALSE(result.ok());
        CHECK(mentions(result.errors, "unknown recipe"));
    }
    SECTION("pinned coupling cannot be overridden in the trace recipe") {
        const auto result =
            harness::validate_config(R"({"recipe": "fig3_qbm", "qbm": {"gamma0": 1.0}})");
        REQUIRE_FALSE(result.ok());
        CHECK(mentions(result.errors, "gamma0"));
    }
    SECTION("sections are recipe-specific") {
        CHECK(mentions(
            harness::validate_config(R"({"recipe": "fig3_qbm", "spin": {"n_spins": 8}})").errors,
            "does not take a spin section"));
        CHECK(mentions(
            harness::validate_config(R"({"recipe": "fig1_overlap", "qbm": {"cutoff": 1}})").errors,
            "does not take a qbm section"));
        CHECK(mentions(
            harness::validate_config(R"({"recipe": "figA1_zeroT", "sweep": {"values": [1]}})")
                .errors,
            "does not take a sweep section"));
    }
    SECTION("sweep parameter is fixed per recipe") {
        const auto result = harness::validate_config(
            R"({"recipe": "fig2_crossover", "sweep": {"parameter": "gamma0", "values": [1]}})");
        REQUIRE_FALSE(result.ok());
        CHECK(mentions(result.errors, "sweep.parameter"));
    }
    SECTION("zero-temperature recipe rejects a hot bath") {
        const auto result = harness::validate_config(
            R"({"recipe": "figA1_zeroT", "qbm": {"temperature": 10.0}})");
        REQUIRE_FALSE(result.ok());
        CHECK(mentions(result.errors, "temperature"));
    }
    SECTION("unknown nested keys") {
        const auto result = harness::validate_config(
            R"({"recipe": "fig2_crossover", "spin": {"n": 8}, "sweep": {"points": 3}})");
        REQUIRE_FALSE(result.ok());
        CHECK(mentions(result.errors, "spin.n"));
        CHECK(mentions(result.errors, "sweep.points"));
    }
}

TEST_CASE("canonical config round-trips to identical text and value", "[harness]") {
    for (const auto& info : harness::recipes()) {
        const auto first = harness::validate_config(R"({"recipe": ")" + info.name + R"("})");
        REQUIRE(first.ok());
        const std::string text = harness::canonical_config(first.config).dump(2);
        const auto second = harness::validate_config(text);
        REQUIRE(second.ok());
        CHECK(harness::canonical_config(second.config).dump(2) == text);
    }
    // overrides survive the round trip
    const auto custom = harness::validate_config(
        R"({"recipe": "fig2_crossover", "seed": 7, "jobs": 2,
            "spin": {"n_spins": 6}, "sweep": {"values": [0.5, 4.0]}})");
    REQUIRE(custom.ok());
    const std::string text = harness::canonical_config(custom.config).dump(2);
    const auto back = harness::validate_config(text);
    REQUIRE(back.ok());
    CHECK(back.config.seed == 7);
    CHECK(back.config.jobs == 2);
    CHECK(back.config.spin.n_spins == 6);
    CHECK(back.config.sweep.values == std::vector<double>{0.5, 4.0});
    CHECK(harness::canonical_config(back.config).dump(2) == text);
}

TEST_CASE("output directory resolution prefers CLI, then config, then env", "[harness]") {
    harness::ExperimentConfig cfg;
    cfg.recipe = "fig3_qbm";
    CHECK(harness::resolve_output_dir(cfg, "explicit") == fs::path("explicit"));
    cfg.output_dir = "from_config";
    CHECK(harness::resolve_output_dir(cfg) == fs::path("from_config"));
    cfg.output_dir.clear();
    ::setenv(harness::kOutDirEnvVar, "/tmp/decolab_env_test", 1);
    CHECK(harness::resolve_output_dir(cfg) == fs::path("/tmp/decolab_env_test") / "fig3_qbm");
    ::unsetenv(harness::kOutDirEnvVar);
    CHECK(harness::resolve_output_dir(cfg) == fs::path("decolab_runs") / "fig3_qbm");
}

TEST_CASE("resource pre-check refuses a bath that cannot fit in memory", "[harness]") {
    // 2^24-dimensional dense work would need petabytes; must refuse up front.
    CHECK_THROWS_AS(harness::make_spin_context(24, 1), harness::RecipeConfigError);
}

TEST_CASE("small-bath crossover recipe runs end to end and reruns identically", "[harness]") {
    const auto result = harness::validate_config(
        R"({"recipe": "fig2_crossover", "jobs": 1,
            "spin": {"n_spins": 6}, "sweep": {"values": [0.5, 8.0]}})");
    REQUIRE(result.ok());

    auto cfg = result.config;
    const fs::path dir_a = scratch_dir("fig2a");
    cfg.output_dir = dir_a.string();
    const auto manifest = harness::run_recipe(cfg);

    CHECK(manifest.recipe == "fig2_crossover");
    CHECK(manifest.failures.empty());
    REQUIRE_FALSE(manifest.artifacts.empty());
    for (const auto& a : manifest.artifacts) {
        const fs::path path = dir_a / a.name;
        REQUIRE(fs::exists(path));
        // manifest hash matches a fresh hash of the bytes on disk
        CHECK(decolab::to_hex(decolab::fnv1a64(decolab::read_file(path))) == a.fnv1a64);
    }
    REQUIRE(fs::exists(dir_a / "manifest.json"));
    const auto parsed = nlohmann::json::parse(decolab::read_file(dir_a / "manifest.json"));
    CHECK(parsed.at("recipe") == "fig2_crossover");
    CHECK(parsed.at("config").at("spin").at("n_spins") == 6);

    // the per-coupling trace CSV has the documented header
    const std::string trace = decolab::read_file(dir_a / "trace_lambda0p5.csv");
    CHECK(trace.rfind("time,r_abs,r_real,r_imag\n", 0) == 0);

    // rerun with the identical config: every artifact hash must match
    auto cfg_b = cfg;
    const fs::path dir_b = scratch_dir("fig2b");
    cfg_b.output_dir = dir_b.string();
    const auto manifest_b = harness::run_recipe(cfg_b);
    REQUIRE(manifest_b.artifacts.size() == manifest.artifacts.size());
    for (std::size_t i = 0; i < manifest.artifacts.size(); ++i) {
        CHECK(manifest_b.artifacts[i].name == manifest.artifacts[i].name);
        CHECK(manifest_b.artifacts[i].fnv1a64 == manifest.artifacts[i].fnv1a64);
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}
