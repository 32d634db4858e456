#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "corrdyn/errors.hpp"
#include "corrdyn/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"corrdyn: dynamics of finitely generated rational semigroups via the "
                 "associated holomorphic correspondence"};
    app.set_version_flag("--version", "corrdyn 0.1.0");

    std::string config_path;
    app.add_option("config", config_path, "JSON run configuration")->required();
    std::string command_override, out_override;
    int n_override = -1;
    long long seed_override = -1;
    unsigned workers_override = 0;
    app.add_option("--command", command_override, "override the config's command");
    app.add_option("--n", n_override, "override depth / word length");
    app.add_option("--seed", seed_override, "override the master seed");
    app.add_option("--out", out_override, "override the output directory");
    app.add_option("--workers", workers_override, "override the worker count");

    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream f(config_path);
        if (!f) throw corrdyn::ConfigError("cannot read config file: " + config_path);
        std::ostringstream buf;
        buf << f.rdbuf();
        corrdyn::RunConfig cfg = corrdyn::parse_config(buf.str());
        if (!command_override.empty()) cfg.command = command_override;
        if (n_override >= 0) cfg.n = n_override;
        if (seed_override >= 0) {
            cfg.seed = static_cast<std::uint64_t>(seed_override);
            cfg.seed_set = true;
        }
        if (!out_override.empty()) cfg.out = out_override;
        if (workers_override > 0) cfg.workers = workers_override;
        corrdyn::run_command(cfg);
        return 0;
    } catch (const corrdyn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const corrdyn::CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const corrdyn::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
