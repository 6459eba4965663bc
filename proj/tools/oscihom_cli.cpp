#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oscihom/errors.hpp"
#include "oscihom/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"oscihom: oscillating boundary data homogenization toolkit"};
    oscihom::RunConfig cfg;

    app.add_option("command", cfg.command,
                   "one of classify|average|triple|sweep|bounds|sandwich|"
                   "dirichlet|neumann|examples")
        ->required();
    app.add_option("--config", cfg.config_path, "path to the JSON problem spec");
    app.add_option("--out", cfg.out_dir, "output directory (default .)");
    app.add_option("--seed", cfg.seed, "seed for randomized sub-lattice sampling");
    app.add_option("--threads", cfg.threads, "worker count (accepted; runs serially)");
    app.add_flag("--strict", cfg.strict,
                 "treat Undetermined direction classifications as hard errors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (const char* cap = std::getenv("OSCIHOM_NODE_CAP")) {
        try {
            cfg.node_cap = std::stoll(cap);
        } catch (...) {
            std::cerr << "error: OSCIHOM_NODE_CAP is not an integer\n";
            return 1;
        }
    }

    try {
        return oscihom::run(cfg);
    } catch (const oscihom::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
