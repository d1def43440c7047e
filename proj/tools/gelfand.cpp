#include "gelfand/errors.hpp"
#include "gelfand/experiment.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

namespace {

struct Flags {
    std::string alphas;
    std::string config;
    std::string tasks;
    std::vector<std::string> profiles;
    std::vector<int> dimensions;
    double r_max = 0.0;
    double alpha_lo = 0.0;
};

void add_common(CLI::App* cmd, gelfand::ExperimentConfig& cfg, Flags& flags)
{
    cmd->add_option("--profile", cfg.profile, "euclidean | hyperbolic | polyexp:<g> | spliced:<a>:<r0>");
    cmd->add_option("-N,--dimension", cfg.dimension, "dimension N");
    cmd->add_option("--alphas", flags.alphas, "comma list or lo:hi:step");
    cmd->add_option("--r-max", flags.r_max, "integration range (default 1e6 euclidean, 50 otherwise)");
    cmd->add_option("--tol", cfg.tol, "integration tolerance");
    cmd->add_option("--output-dir", cfg.output_dir, "output directory (default $GELFAND_OUTPUT_DIR or .)");
    cmd->add_option("--workers", cfg.workers, "worker threads");
    cmd->add_option("--alpha-lo", flags.alpha_lo, "eta bracket low end (default log(lambda_1) - 2)");
    cmd->add_option("--alpha-hi", cfg.alpha_hi, "eta bracket high end");
    cmd->add_option("--tol-alpha", cfg.tol_alpha, "eta bisection width");
    cmd->add_option("--phase-radius", cfg.phase_radius, "radius where the phase trajectory starts");
    cmd->add_option("--t-end", cfg.t_end, "phase trajectory end time");
    cmd->add_option("--config", flags.config, "config file; its values override flags");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Radial solutions of -Delta u = e^u on Riemannian models"};
    app.require_subcommand(1);

    gelfand::ExperimentConfig cfg;
    if (const char* dir = std::getenv("GELFAND_OUTPUT_DIR")) {
        cfg.output_dir = dir;
    }
    Flags flags;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"solve", "integrate u and v, write trajectories"},
        {"asymptotics", "classify the limit of u and tail rates"},
        {"stability", "stability verdict per alpha"},
        {"eta", "stability threshold by bisection"},
        {"intersect", "crossings between every pair of alphas"},
        {"emden", "Emden transform, barrier and phase plane"},
        {"check-profile", "numerical checks of the profile assumptions"},
        {"sweep", "profile x dimension x alpha grid"},
        {"run", "tasks taken from the config file"},
    };
    for (const auto& [name, help] : commands) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, cfg, flags);
        if (name == "sweep") {
            cmd->add_option("--profiles", flags.profiles, "profile grid")->delimiter(',');
            cmd->add_option("--dimensions", flags.dimensions, "dimension grid")->delimiter(',');
            cmd->add_option("--tasks", flags.tasks, "comma list of tasks")->default_val("stability");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        auto* cmd = app.get_subcommands().front();
        if (!flags.alphas.empty()) {
            cfg.alphas = gelfand::parse_alphas(flags.alphas);
        }
        if (cmd->count("--r-max") > 0) {
            cfg.r_max = flags.r_max;
        }
        if (cmd->count("--alpha-lo") > 0) {
            cfg.alpha_lo = flags.alpha_lo;
        }
        if (name == "sweep") {
            cfg.profiles = flags.profiles;
            cfg.dimensions = flags.dimensions;
            std::string_view rest = flags.tasks;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                cfg.tasks.push_back(gelfand::parse_task(rest.substr(0, comma)));
                rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            }
        } else if (name != "run") {
            cfg.tasks = {gelfand::parse_task(name)};
        }
        if (!flags.config.empty()) {
            cfg = gelfand::load_config_file(flags.config, cfg);
        }

        const auto manifest = name == "sweep" ? gelfand::sweep(cfg) : gelfand::run_experiment(cfg);
        std::cout << "wrote " << manifest.outputs.size() << " files to " << cfg.output_dir.string() << '\n';
        if (manifest.eta_hat) {
            std::cout << "eta_hat = " << *manifest.eta_hat << '\n';
        }
        for (const auto& f : manifest.failures) {
            std::cerr << "failed " << f.task;
            if (f.alpha) {
                std::cerr << " alpha=" << *f.alpha;
            }
            std::cerr << ": " << f.message << '\n';
        }
        return manifest.exit_code();
    } catch (const gelfand::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
