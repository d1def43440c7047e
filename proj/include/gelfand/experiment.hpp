#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gelfand {

enum class Task { Solve, Asymptotics, Stability, Eta, Intersect, Emden, CheckProfile };

Task parse_task(std::string_view name);
std::string to_string(Task task);

struct ExperimentConfig {
    std::string profile = "hyperbolic";
    int dimension = 3;
    std::vector<double> alphas;
    /// Defaults to 1e6 for euclidean and 50 otherwise.
    std::optional<double> r_max;
    double tol = 1e-10;
    std::vector<Task> tasks;
    std::filesystem::path output_dir = ".";
    int workers = 1;

    std::optional<double> alpha_lo;  // default log(lambda_1 estimate) - 2
    double alpha_hi = 10.0;
    double tol_alpha = 1e-3;

    double phase_radius = 1.0;
    double t_end = 40.0;

    /// Sweep grids; empty means the single profile / dimension above.
    std::vector<std::string> profiles;
    std::vector<int> dimensions;

    double resolved_r_max() const;
    bool has_task(Task task) const;
};

/// "a, b, c" or "lo:hi:step" (inclusive of hi up to rounding).
std::vector<double> parse_alphas(std::string_view text);

/// Reads sections [model], [run], [eta], [emden], [sweep] over base.
ExperimentConfig load_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

/// Throws ConfigError on an inconsistent configuration.
void validate(const ExperimentConfig& config, bool sweep = false);

struct CellFailure {
    std::string task;
    std::optional<double> alpha;
    std::string message;
};

struct RunManifest {
    std::vector<std::string> outputs;
    std::vector<CellFailure> failures;
    int succeeded = 0;
    std::map<std::string, double> wall_seconds;
    std::optional<double> eta_hat;
    /// Threshold recomputed with r_max / 2.
    std::optional<double> eta_hat_half;
    std::optional<double> log_lambda1_hat;

    /// 0 on success, 3 when every cell failed, 4 on partial failure.
    int exit_code() const;
};

/// Runs every configured task and writes CSV files plus manifest.json to output_dir.
RunManifest run_experiment(const ExperimentConfig& config);

/// Runs the profile x dimension grid, one run_experiment layout per cell under
/// cell_<k>/, plus sweep.csv aggregating the per-alpha rows in grid order.
RunManifest sweep(const ExperimentConfig& config);

}  // namespace gelfand
