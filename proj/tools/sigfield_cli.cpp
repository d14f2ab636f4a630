#include "sigfield/builtins.hpp"
#include "sigfield/error.hpp"
#include "sigfield/runner.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Simulate and verify sigma-algebra indexed Gaussian fields"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<unsigned> workers;
    std::optional<std::string> out;
    auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
    run->add_option("config", config_path, "config file (.json)")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--replicas", replicas, "override the replica count");
    run->add_option("--workers", workers, "worker threads (overrides SIGFIELD_WORKERS and the config)");
    run->add_option("--out", out, "output directory");

    app.add_subcommand("list-builtins", "print builtin measures, psi presets and cylinder suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sigfield::kExitConfig;
    }

    if (app.got_subcommand("list-builtins")) {
        std::cout << sigfield::builtins_catalog();
        return 0;
    }

    sigfield::ExperimentConfig cfg;
    try {
        cfg = sigfield::load_config(config_path);
        // Precedence: flag > environment > config file.
        if (const char* env = std::getenv("SIGFIELD_WORKERS"); !workers && env && *env) {
            try {
                cfg.workers = static_cast<unsigned>(std::stoul(env));
            } catch (const std::exception&) {
                throw sigfield::ConfigError("SIGFIELD_WORKERS must be a non-negative integer");
            }
        }
        if (workers) cfg.workers = *workers;
        if (seed) cfg.seed = *seed;
        if (replicas) {
            if (*replicas < 2) throw sigfield::ConfigError("--replicas must be at least 2");
            cfg.replicas = *replicas;
        }
        if (out) cfg.output = *out;
    } catch (const sigfield::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return sigfield::kExitConfig;
    }
    return sigfield::run(cfg, std::cout);
}
