// decolab — experiment recipe runner. Numeric results live in the emitted
// artifacts; stdout carries only recipe names, paths, and status.
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "decolab/harness.hpp"
#include "decolab/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

int cmd_list_recipes() {
    for (const auto& r : decolab::harness::recipes()) {
        std::printf("%-16s %s\n", r.name.c_str(), r.summary.c_str());
    }
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    std::string raw;
    try {
        raw = decolab::read_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    const auto result = decolab::harness::validate_config(raw);
    if (!result.ok()) {
        for (const auto& err : result.errors) std::fprintf(stderr, "error: %s\n", err.c_str());
        return kExitConfig;
    }
    std::printf("%s\n", decolab::harness::canonical_config(result.config).dump(2).c_str());
    return kExitOk;
}

int cmd_run(const std::string& recipe, const std::string& config_path, const std::string& out_dir,
            bool seed_set, std::uint64_t seed, bool jobs_set, unsigned jobs) {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
        std::string raw;
        try {
            raw = decolab::read_file(config_path);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitConfig;
        }
        j = nlohmann::json::parse(raw, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object()) {
            // keep the raw text so validate_config reports the JSON problem itself
            const auto result = decolab::harness::validate_config(raw);
            for (const auto& err : result.errors) {
                std::fprintf(stderr, "error: %s\n", err.c_str());
            }
            return kExitConfig;
        }
    }
    if (j.contains("recipe") && j.at("recipe").is_string() &&
        j.at("recipe").get<std::string>() != recipe) {
        std::fprintf(stderr, "error: config file is for recipe %s but %s was requested\n",
                     j.at("recipe").get<std::string>().c_str(), recipe.c_str());
        return kExitConfig;
    }
    j["recipe"] = recipe;
    if (seed_set) j["seed"] = seed;
    if (jobs_set) j["jobs"] = jobs;

    auto result = decolab::harness::validate_config(j.dump());
    if (!result.ok()) {
        for (const auto& err : result.errors) std::fprintf(stderr, "error: %s\n", err.c_str());
        return kExitConfig;
    }
    result.config.output_dir =
        decolab::harness::resolve_output_dir(result.config, out_dir).string();

    try {
        const auto manifest = decolab::harness::run_recipe(result.config);
        std::printf("recipe %s -> %s\n", recipe.c_str(), result.config.output_dir.c_str());
        for (const auto& a : manifest.artifacts) {
            std::printf("  %s  fnv1a64:%s\n", a.name.c_str(), a.fnv1a64.c_str());
        }
        if (!manifest.failures.empty()) {
            std::fprintf(stderr, "completed with %zu failed points (see manifest.json):\n",
                         manifest.failures.size());
            for (const auto& f : manifest.failures) std::fprintf(stderr, "  %s\n", f.c_str());
            return kExitNumerical;
        }
        return kExitOk;
    } catch (const decolab::harness::RecipeConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decolab — decoherence model laboratory"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a recipe and write its artifacts + manifest");
    std::string recipe, config_path, out_dir;
    std::uint64_t seed = 1;
    unsigned jobs = 0;
    run->add_option("recipe", recipe, "recipe name (see list-recipes)")->required();
    run->add_option("--config", config_path, "JSON config file (defaults are recipe-specific)");
    run->add_option("--out", out_dir, "output directory (overrides config and $" +
                                          std::string(decolab::harness::kOutDirEnvVar) + ")");
    auto* seed_opt = run->add_option("--seed", seed, "coupling-sample seed override");
    auto* jobs_opt = run->add_option("--jobs", jobs, "worker threads (0 = hardware)");

    auto* validate = app.add_subcommand("validate", "validate a config and print canonical form");
    std::string validate_path;
    validate->add_option("--config", validate_path, "JSON config file")->required();

    app.add_subcommand("list-recipes", "list registered recipes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (app.got_subcommand("list-recipes")) return cmd_list_recipes();
    if (app.got_subcommand("validate")) return cmd_validate(validate_path);
    return cmd_run(recipe, config_path, out_dir, seed_opt->count() > 0, seed,
                   jobs_opt->count() > 0, jobs);
}
