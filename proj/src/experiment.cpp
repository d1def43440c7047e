#include "gelfand/experiment.hpp"

#include "gelfand/asymptotics.hpp"
#include "gelfand/csv.hpp"
#include "gelfand/emden.hpp"
#include "gelfand/errors.hpp"
#include "gelfand/intersections.hpp"
#include "gelfand/profile.hpp"
#include "gelfand/solver.hpp"
#include "gelfand/stability.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

namespace gelfand {

namespace {

constexpr const char* program_version = "1.0.0";
constexpr std::size_t max_cells = 10000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double to_double(std::string_view text, std::string_view key)
{
    const auto first = text.find_first_not_of(" \t");
    const auto last = text.find_last_not_of(" \t");
    if (first == std::string_view::npos) {
        throw ConfigError("empty value for " + std::string(key));
    }
    text = text.substr(first, last - first + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ConfigError("bad number '" + std::string(text) + "' for " + std::string(key));
    }
    return value;
}

int to_int(std::string_view text, std::string_view key)
{
    const double value = to_double(text, key);
    if (value != std::floor(value) || std::abs(value) > 1e9) {
        throw ConfigError("expected an integer for " + std::string(key));
    }
    return static_cast<int>(value);
}

std::string join(const std::vector<std::string>& parts, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

std::string single(const CLI::ConfigItem& item)
{
    if (item.inputs.size() != 1) {
        throw ConfigError("expected one value for " + item.name);
    }
    return item.inputs.front();
}

/// Runs f(i) for i in [0, n) on up to `workers` threads; f must not throw.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f)
{
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            f(i);
        }
    };
    const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), n);
    if (threads <= 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back(work);
    }
}

std::string opt17(const std::optional<double>& x)
{
    return x ? fmt17(*x) : std::string();
}

std::string verdict_row(const StabilityVerdict& v)
{
    std::string row = fmt17(v.alpha) + ',' + to_string(v.decision) + ',' + fmt17(v.radius) + ',';
    if (v.weighted_eig) {
        row += fmt17(v.weighted_eig->value);
    }
    row += ',' + opt17(v.certificate) + '\n';
    return row;
}

constexpr const char* verdict_header = "alpha,decision,r_star_or_rmax,Lambda_R,certificate\n";

/// Everything computed for one initial height, rendered before writing.
struct AlphaResult {
    double alpha = 0.0;
    std::optional<RadialSolution> base;
    std::optional<std::string> trajectory_csv;
    std::optional<std::string> solve_row;
    std::optional<std::string> asymptotics_csv;
    std::optional<std::string> asymptotics_row;
    std::optional<StabilityVerdict> verdict;
    std::optional<std::string> emden_row;
    std::optional<std::string> phase_csv;
    std::vector<CellFailure> failures;
    int succeeded = 0;

    std::optional<double> u_end;
    std::optional<std::string> limit_kind;
    std::optional<double> limit_value;
};

struct RunData {
    RunManifest manifest;
    std::vector<AlphaResult> alphas;
    std::optional<ThresholdResult> eta;
};

class OutputDir {
public:
    OutputDir(std::filesystem::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest)
    {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content)
    {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        }
        out << content;
        manifest_.outputs.push_back(name);
    }

    const std::filesystem::path& path() const { return dir_; }

private:
    std::filesystem::path dir_;
    RunManifest& manifest_;
};

std::string index_name(const std::string& stem, std::size_t i)
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_%03zu.csv", i);
    return stem + buf;
}

void run_alpha(const ExperimentConfig& cfg, const WarpProfile& profile, AlphaResult& res)
{
    const double r_max = cfg.resolved_r_max();
    const int N = cfg.dimension;
    auto fail = [&](Task task, const std::exception& e) {
        res.failures.push_back({to_string(task), res.alpha, e.what()});
    };

    const bool needs_base = cfg.has_task(Task::Solve) || cfg.has_task(Task::Asymptotics) ||
                            cfg.has_task(Task::Emden) || cfg.has_task(Task::Intersect);
    if (needs_base) {
        try {
            res.base.emplace(integrate_ivp(profile, N, res.alpha, r_max, cfg.tol));
        } catch (const std::exception& e) {
            for (Task t : {Task::Solve, Task::Asymptotics, Task::Emden}) {
                if (cfg.has_task(t)) {
                    fail(t, e);
                }
            }
        }
    }

    if (res.base && cfg.has_task(Task::Solve)) {
        try {
            const auto lin = integrate_linearized(*res.base, cfg.tol);
            std::ostringstream traj;
            write_trajectory_csv(traj, *res.base, &lin);
            res.trajectory_csv = traj.str();
            const double r_end = res.base->r_max();
            res.u_end = res.base->u(r_end);
            res.solve_row = fmt17(res.alpha) + ',' + fmt17(r_end) + ',' + fmt17(*res.u_end) + ',' +
                            fmt17(res.base->u1(r_end)) + ',' + fmt17(res.base->lyapunov(r_end)) + ',' +
                            std::to_string(res.base->trajectory().nodes().size()) + ',' +
                            std::to_string(res.base->monotonicity_violations()) + '\n';
            ++res.succeeded;
        } catch (const std::exception& e) {
            fail(Task::Solve, e);
        }
    }

    if (res.base && cfg.has_task(Task::Asymptotics)) {
        try {
            const auto rep = classify_limit(*res.base, profile);
            std::string csv = "r,ratio,rate,rate_logr\n";
            for (const auto& p : rep.tail) {
                csv += fmt17(p.r) + ',' + fmt17(p.ratio) + ',' + fmt17(p.rate) + ',' + opt17(p.rate_logr) + '\n';
            }
            res.asymptotics_csv = csv;
            res.limit_kind = to_string(rep.limit_kind);
            res.limit_value = rep.limit_value;
            res.asymptotics_row = fmt17(res.alpha) + ',' + *res.limit_kind + ',' + opt17(rep.limit_value) + ',' +
                                  (rep.limit_value ? fmt17(rep.tail_bound) : std::string()) + ',' +
                                  opt17(rep.extrapolated_rate) + '\n';
            ++res.succeeded;
        } catch (const std::exception& e) {
            fail(Task::Asymptotics, e);
        }
    }

    if (cfg.has_task(Task::Stability)) {
        try {
            res.verdict = stability_test(profile, N, res.alpha, r_max, cfg.tol);
            ++res.succeeded;
        } catch (const std::exception& e) {
            fail(Task::Stability, e);
        }
    }

    if (res.base && cfg.has_task(Task::Emden)) {
        try {
            const auto tr = emden_transform(*res.base);
            std::string turns;
            if (profile.kind() == ProfileKind::Euclidean) {
                const auto phase =
                    integrate_autonomous(N, phase_state(*res.base, cfg.phase_radius), cfg.t_end, cfg.tol);
                std::ostringstream out;
                write_phase_csv(out, phase);
                res.phase_csv = out.str();
                turns = std::to_string(phase.turns());
            }
            res.emden_row = fmt17(res.alpha) + ',' + fmt17(tr.max_barrier_gap()) + ',' +
                            fmt17(tr.max_relative_residual) + ',' + (tr.residual_ok ? "1" : "0") + ',' + turns +
                            '\n';
            ++res.succeeded;
        } catch (const std::exception& e) {
            fail(Task::Emden, e);
        }
    }
}

RunData execute(const ExperimentConfig& cfg)
{
    validate(cfg);
    const auto t_run = Clock::now();
    const WarpProfile profile = parse_profile(cfg.profile);
    const double r_max = cfg.resolved_r_max();
    RunData data;
    RunManifest& m = data.manifest;
    OutputDir out(cfg.output_dir, m);

    if (cfg.has_task(Task::CheckProfile)) {
        const auto t0 = Clock::now();
        try {
            std::vector<double> grid(400);
            const double lo = std::min(1e-3, 0.5 * r_max);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                grid[i] = lo * std::pow(r_max / lo, i / (grid.size() - 1.0));
            }
            const auto rep = check_assumptions(profile, grid);
            std::string csv = "check,passed,first_violation,note\n";
            for (std::size_t i = 0; i < rep.checks.size(); ++i) {
                const auto& c = rep.checks[i];
                csv += "A" + std::to_string(i + 1) + ',' + (c.passed ? "1" : "0") + ',' + opt17(c.first_violation) +
                       ',' + c.note + '\n';
            }
            csv += "tail,,," + to_string(classify_tail(profile)) + '\n';
            out.write("check_profile.csv", csv);
            ++m.succeeded;
        } catch (const std::exception& e) {
            m.failures.push_back({to_string(Task::CheckProfile), std::nullopt, e.what()});
        }
        m.wall_seconds["check-profile"] = seconds_since(t0);
    }

    const bool per_alpha = cfg.has_task(Task::Solve) || cfg.has_task(Task::Asymptotics) ||
                           cfg.has_task(Task::Stability) || cfg.has_task(Task::Emden) ||
                           cfg.has_task(Task::Intersect);
    if (per_alpha) {
        const auto t0 = Clock::now();
        data.alphas.resize(cfg.alphas.size());
        for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
            data.alphas[i].alpha = cfg.alphas[i];
        }
        parallel_for(data.alphas.size(), cfg.workers,
                     [&](std::size_t i) { run_alpha(cfg, profile, data.alphas[i]); });
        m.wall_seconds["alpha-cells"] = seconds_since(t0);

        std::string solve = "alpha,r_max,u_end,u1_end,F_end,nodes,monotonicity_violations\n";
        std::string asym = "alpha,limit_kind,limit_value,tail_bound,extrapolated_rate_heuristic\n";
        std::string stab = verdict_header;
        std::string emden = "alpha,max_barrier_gap,max_relative_residual,residual_ok,turns\n";
        for (std::size_t i = 0; i < data.alphas.size(); ++i) {
            auto& a = data.alphas[i];
            if (a.trajectory_csv) {
                out.write(index_name("solve", i), *a.trajectory_csv);
                solve += *a.solve_row;
            }
            if (a.asymptotics_csv) {
                out.write(index_name("asymptotics", i), *a.asymptotics_csv);
                asym += *a.asymptotics_row;
            }
            if (a.verdict) {
                stab += verdict_row(*a.verdict);
            }
            if (a.emden_row) {
                emden += *a.emden_row;
            }
            if (a.phase_csv) {
                out.write(index_name("phase", i), *a.phase_csv);
            }
            m.succeeded += a.succeeded;
            m.failures.insert(m.failures.end(), a.failures.begin(), a.failures.end());
        }
        if (cfg.has_task(Task::Solve)) {
            out.write("solve.csv", solve);
        }
        if (cfg.has_task(Task::Asymptotics)) {
            out.write("asymptotics.csv", asym);
        }
        if (cfg.has_task(Task::Stability)) {
            out.write("stability.csv", stab);
        }
        if (cfg.has_task(Task::Emden)) {
            out.write("emden.csv", emden);
        }
    }

    if (cfg.has_task(Task::Intersect)) {
        const auto t0 = Clock::now();
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < data.alphas.size(); ++i) {
            for (std::size_t j = i + 1; j < data.alphas.size(); ++j) {
                if (data.alphas[i].alpha != data.alphas[j].alpha) {
                    pairs.emplace_back(i, j);
                }
            }
        }
        std::vector<std::optional<IntersectionReport>> reports(pairs.size());
        std::vector<std::optional<CellFailure>> errors(pairs.size());
        parallel_for(pairs.size(), cfg.workers, [&](std::size_t k) {
            const auto& a = data.alphas[pairs[k].first];
            const auto& b = data.alphas[pairs[k].second];
            try {
                if (!a.base || !b.base) {
                    throw std::runtime_error("base solution unavailable");
                }
                reports[k] = find_intersections(*a.base, *b.base, r_max);
            } catch (const std::exception& e) {
                errors[k] = CellFailure{to_string(Task::Intersect), std::max(a.alpha, b.alpha),
                                        "pair (" + fmt17(a.alpha) + ", " + fmt17(b.alpha) + "): " + e.what()};
            }
        });
        std::vector<IntersectionReport> ok;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (reports[k]) {
                ok.push_back(*reports[k]);
                ++m.succeeded;
            } else {
                m.failures.push_back(*errors[k]);
            }
        }
        std::ostringstream crossings;
        write_crossings_csv(crossings, ok);
        out.write("intersections.csv", crossings.str());
        std::ostringstream summary;
        write_intersection_summary_csv(summary, ok);
        out.write("intersections_summary.csv", summary.str());
        m.wall_seconds["intersect"] = seconds_since(t0);
    }

    if (cfg.has_task(Task::Eta)) {
        const auto t0 = Clock::now();
        try {
            const auto spectrum = estimate_bottom_spectrum(profile, cfg.dimension, {10.0, 20.0, 40.0}, cfg.tol);
            if (!(spectrum.value > 0.0)) {
                throw BracketError("bottom of the spectrum estimate is not positive");
            }
            const double log_lambda = std::log(spectrum.value);
            m.log_lambda1_hat = log_lambda;
            const double lo = cfg.alpha_lo.value_or(log_lambda - 2.0);
            ThresholdOptions topts;
            topts.tol = cfg.tol;
            data.eta = threshold_eta(profile, cfg.dimension, lo, cfg.alpha_hi, r_max, cfg.tol_alpha, topts);
            m.eta_hat = data.eta->eta_hat;
            const auto half = threshold_eta(profile, cfg.dimension, lo, cfg.alpha_hi, 0.5 * r_max, cfg.tol_alpha, topts);
            m.eta_hat_half = half.eta_hat;
            out.write("eta.csv", "eta_hat,tol,alpha_lo,alpha_hi,log_lambda1_hat,r_max,eta_hat_half_rmax,rmax_gap\n" +
                                     fmt17(data.eta->eta_hat) + ',' + fmt17(cfg.tol_alpha) + ',' +
                                     fmt17(data.eta->stable_witness.alpha) + ',' +
                                     fmt17(data.eta->unstable_witness.alpha) + ',' + fmt17(log_lambda) + ',' +
                                     fmt17(r_max) + ',' + fmt17(half.eta_hat) + ',' +
                                     fmt17(data.eta->eta_hat - half.eta_hat) + '\n');
            std::string probes = verdict_header;
            for (const auto& v : data.eta->probes) {
                probes += verdict_row(v);
            }
            out.write("eta_probes.csv", probes);
            ++m.succeeded;
        } catch (const std::exception& e) {
            m.failures.push_back({to_string(Task::Eta), std::nullopt, e.what()});
        }
        m.wall_seconds["eta"] = seconds_since(t0);
    }
    m.wall_seconds["total"] = seconds_since(t_run);
    return data;
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg)
{
    nlohmann::ordered_json j;
    j["profile"] = cfg.profile;
    j["dimension"] = cfg.dimension;
    j["alphas"] = cfg.alphas;
    j["r_max"] = cfg.resolved_r_max();
    j["tol"] = cfg.tol;
    std::vector<std::string> tasks;
    for (Task t : cfg.tasks) {
        tasks.push_back(to_string(t));
    }
    j["tasks"] = tasks;
    j["workers"] = cfg.workers;
    j["alpha_lo"] = cfg.alpha_lo ? nlohmann::ordered_json(*cfg.alpha_lo) : nlohmann::ordered_json();
    j["alpha_hi"] = cfg.alpha_hi;
    j["tol_alpha"] = cfg.tol_alpha;
    j["phase_radius"] = cfg.phase_radius;
    j["t_end"] = cfg.t_end;
    if (!cfg.profiles.empty()) {
        j["profiles"] = cfg.profiles;
    }
    if (!cfg.dimensions.empty()) {
        j["dimensions"] = cfg.dimensions;
    }
    return j;
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg, const RunManifest& m,
                    const std::string& kind)
{
    nlohmann::ordered_json j;
    j["program"] = "gelfand-run";
    j["version"] = program_version;
    j["kind"] = kind;
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["finished_utc"] = stamp;
    j["config"] = config_json(cfg);
    j["tolerances"] = {{"tol", cfg.tol}, {"tol_alpha", cfg.tol_alpha}, {"r_max", cfg.resolved_r_max()}};
    j["wall_seconds"] = m.wall_seconds;
    j["outputs"] = m.outputs;
    if (m.eta_hat) {
        j["eta_hat"] = *m.eta_hat;
    }
    if (m.eta_hat_half) {
        j["eta_hat_half_rmax"] = *m.eta_hat_half;
    }
    if (m.log_lambda1_hat) {
        j["log_lambda1_hat"] = *m.log_lambda1_hat;
    }
    j["succeeded_cells"] = m.succeeded;
    auto failed = nlohmann::ordered_json::array();
    for (const auto& f : m.failures) {
        nlohmann::ordered_json e;
        e["task"] = f.task;
        e["alpha"] = f.alpha ? nlohmann::ordered_json(*f.alpha) : nlohmann::ordered_json();
        e["error"] = f.message;
        failed.push_back(e);
    }
    j["failed_cells"] = failed;
    j["exit_code"] = m.exit_code();
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
}

}  // namespace

Task parse_task(std::string_view name)
{
    static const std::pair<std::string_view, Task> names[] = {
        {"solve", Task::Solve},         {"asymptotics", Task::Asymptotics}, {"stability", Task::Stability},
        {"eta", Task::Eta},             {"intersect", Task::Intersect},     {"emden", Task::Emden},
        {"check-profile", Task::CheckProfile},
    };
    for (const auto& [n, t] : names) {
        if (n == name) {
            return t;
        }
    }
    throw ConfigError("unknown task '" + std::string(name) + "'");
}

std::string to_string(Task task)
{
    switch (task) {
    case Task::Solve:
        return "solve";
    case Task::Asymptotics:
        return "asymptotics";
    case Task::Stability:
        return "stability";
    case Task::Eta:
        return "eta";
    case Task::Intersect:
        return "intersect";
    case Task::Emden:
        return "emden";
    case Task::CheckProfile:
        return "check-profile";
    }
    return "";
}

double ExperimentConfig::resolved_r_max() const
{
    if (r_max) {
        return *r_max;
    }
    return profile == "euclidean" ? 1e6 : 50.0;
}

bool ExperimentConfig::has_task(Task task) const
{
    return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
}

int RunManifest::exit_code() const
{
    if (failures.empty()) {
        return 0;
    }
    return succeeded == 0 ? 3 : 4;
}

std::vector<double> parse_alphas(std::string_view text)
{
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t pos = 0;
        while (true) {
            const auto next = text.find(':', pos);
            parts.push_back(to_double(text.substr(pos, next - pos), "alphas"));
            if (next == std::string_view::npos) {
                break;
            }
            pos = next + 1;
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
            throw ConfigError("alpha range must be lo:hi:step with lo <= hi and step > 0");
        }
        const double count = std::floor((parts[1] - parts[0]) / parts[2] + 1e-9) + 1.0;
        if (count > static_cast<double>(max_cells)) {
            throw ConfigError("alpha range has too many points");
        }
        for (int i = 0; i < static_cast<int>(count); ++i) {
            out.push_back(parts[0] + i * parts[2]);
        }
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find(',', pos);
        if (next == std::string_view::npos) {
            next = text.size();
        }
        const auto piece = text.substr(pos, next - pos);
        if (piece.find_first_not_of(" \t") != std::string_view::npos) {
            out.push_back(to_double(piece, "alphas"));
        }
        pos = next + 1;
    }
    if (out.empty()) {
        throw ConfigError("empty alpha list");
    }
    return out;
}

ExperimentConfig load_config(std::istream& in, ExperimentConfig cfg)
{
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") {
            continue;
        }
        if (item.parents.size() != 1) {
            throw ConfigError("key '" + item.name + "' must sit inside one [section]");
        }
        const std::string key = item.parents.front() + "." + item.name;
        if (key == "model.profile") {
            cfg.profile = single(item);
        } else if (key == "model.dimension") {
            cfg.dimension = to_int(single(item), key);
        } else if (key == "run.alphas") {
            cfg.alphas = parse_alphas(join(item.inputs, ','));
        } else if (key == "run.r_max") {
            cfg.r_max = to_double(single(item), key);
        } else if (key == "run.tol") {
            cfg.tol = to_double(single(item), key);
        } else if (key == "run.tasks") {
            cfg.tasks.clear();
            for (const auto& t : item.inputs) {
                cfg.tasks.push_back(parse_task(t));
            }
        } else if (key == "run.output_dir") {
            cfg.output_dir = single(item);
        } else if (key == "run.workers") {
            cfg.workers = to_int(single(item), key);
        } else if (key == "eta.alpha_lo") {
            cfg.alpha_lo = to_double(single(item), key);
        } else if (key == "eta.alpha_hi") {
            cfg.alpha_hi = to_double(single(item), key);
        } else if (key == "eta.tol_alpha") {
            cfg.tol_alpha = to_double(single(item), key);
        } else if (key == "emden.phase_radius") {
            cfg.phase_radius = to_double(single(item), key);
        } else if (key == "emden.t_end") {
            cfg.t_end = to_double(single(item), key);
        } else if (key == "sweep.profiles") {
            cfg.profiles = item.inputs;
        } else if (key == "sweep.dimensions") {
            cfg.dimensions.clear();
            for (const auto& d : item.inputs) {
                cfg.dimensions.push_back(to_int(d, key));
            }
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    return load_config(in, std::move(base));
}

void validate(const ExperimentConfig& cfg, bool sweep)
{
    if (cfg.tasks.empty()) {
        throw ConfigError("no tasks configured");
    }
    const std::vector<std::string> profiles = sweep && !cfg.profiles.empty() ? cfg.profiles
                                                                             : std::vector<std::string>{cfg.profile};
    const std::vector<int> dims = sweep && !cfg.dimensions.empty() ? cfg.dimensions
                                                                   : std::vector<int>{cfg.dimension};
    for (const auto& p : profiles) {
        try {
            parse_profile(p);
        } catch (const std::exception& e) {
            throw ConfigError("bad profile '" + p + "': " + e.what());
        }
    }
    for (int n : dims) {
        if (n < 2) {
            throw ConfigError("dimension must be at least 2");
        }
        if (cfg.has_task(Task::Eta) && n > 9) {
            throw ConfigError("the eta task needs 2 <= N <= 9");
        }
        if (cfg.has_task(Task::Emden) && n < 3) {
            throw ConfigError("the emden task needs N >= 3");
        }
    }
    const bool per_alpha = cfg.has_task(Task::Solve) || cfg.has_task(Task::Asymptotics) ||
                           cfg.has_task(Task::Stability) || cfg.has_task(Task::Emden) ||
                           cfg.has_task(Task::Intersect);
    if (per_alpha && cfg.alphas.empty()) {
        throw ConfigError("solution-level tasks need a nonempty alpha list");
    }
    if (cfg.has_task(Task::Intersect)) {
        auto sorted = cfg.alphas;
        std::sort(sorted.begin(), sorted.end());
        if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 2) {
            throw ConfigError("the intersect task needs two distinct alphas");
        }
    }
    if (!(cfg.tol >= 1e-13 && cfg.tol <= 1e-6)) {
        throw ConfigError("tol must lie in [1e-13, 1e-6]");
    }
    if (cfg.r_max && !(*cfg.r_max > 1e-3)) {
        throw ConfigError("r_max must exceed 1e-3");
    }
    if (cfg.workers < 1 || cfg.workers > 256) {
        throw ConfigError("workers must lie in [1, 256]");
    }
    if (!(cfg.tol_alpha > 0.0)) {
        throw ConfigError("tol_alpha must be positive");
    }
    if (cfg.alpha_lo && !(*cfg.alpha_lo < cfg.alpha_hi)) {
        throw ConfigError("alpha_lo must be below alpha_hi");
    }
    if (!(cfg.phase_radius > 0.0) || !(cfg.t_end > std::log(cfg.phase_radius))) {
        throw ConfigError("phase radius must be positive and below exp(t_end)");
    }
    if (profiles.size() * dims.size() * std::max<std::size_t>(cfg.alphas.size(), 1) > max_cells) {
        throw ConfigError("grid exceeds 10000 cells");
    }
}

RunManifest run_experiment(const ExperimentConfig& config)
{
    auto data = execute(config);
    write_manifest(config.output_dir, config, data.manifest, "run");
    return data.manifest;
}

RunManifest sweep(const ExperimentConfig& config)
{
    validate(config, true);
    const auto t0 = Clock::now();
    const auto profiles = config.profiles.empty() ? std::vector<std::string>{config.profile} : config.profiles;
    const auto dims = config.dimensions.empty() ? std::vector<int>{config.dimension} : config.dimensions;

    RunManifest total;
    OutputDir out(config.output_dir, total);
    std::string rows = "cell,profile,N,alpha,status,u_end,decision,r_star_or_rmax,Lambda_R,certificate,"
                       "limit_kind,limit_value\n";
    std::string eta_rows = "cell,profile,N,eta_hat,log_lambda1_hat\n";
    int cell = 0;
    for (const auto& p : profiles) {
        for (int n : dims) {
            ExperimentConfig sub = config;
            sub.profile = p;
            sub.dimension = n;
            sub.profiles.clear();
            sub.dimensions.clear();
            sub.r_max = config.r_max;
            const std::string name = "cell_" + std::to_string(cell);
            sub.output_dir = config.output_dir / name;
            auto data = execute(sub);
            write_manifest(sub.output_dir, sub, data.manifest, "run");
            for (const auto& f : data.manifest.outputs) {
                total.outputs.push_back(name + "/" + f);
            }
            total.succeeded += data.manifest.succeeded;
            total.failures.insert(total.failures.end(), data.manifest.failures.begin(),
                                  data.manifest.failures.end());
            for (const auto& a : data.alphas) {
                std::string row = std::to_string(cell) + ',' + p + ',' + std::to_string(n) + ',' + fmt17(a.alpha) +
                                  ',' + (a.failures.empty() ? "ok" : "failed") + ',' + opt17(a.u_end) + ',';
                if (a.verdict) {
                    row += to_string(a.verdict->decision) + ',' + fmt17(a.verdict->radius) + ',' +
                           (a.verdict->weighted_eig ? fmt17(a.verdict->weighted_eig->value) : std::string()) +
                           ',' + opt17(a.verdict->certificate);
                } else {
                    row += ",,,";
                }
                row += ',' + a.limit_kind.value_or("") + ',' + opt17(a.limit_value) + '\n';
                rows += row;
            }
            if (sub.has_task(Task::Eta)) {
                eta_rows += std::to_string(cell) + ',' + p + ',' + std::to_string(n) + ',' +
                            opt17(data.manifest.eta_hat) + ',' + opt17(data.manifest.log_lambda1_hat) + '\n';
            }
            ++cell;
        }
    }
    out.write("sweep.csv", rows);
    if (config.has_task(Task::Eta)) {
        out.write("sweep_eta.csv", eta_rows);
    }
    total.wall_seconds["total"] = seconds_since(t0);
    write_manifest(config.output_dir, config, total, "sweep");
    return total;
}

}  // namespace gelfand
