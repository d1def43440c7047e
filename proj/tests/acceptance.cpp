#include "gelfand/asymptotics.hpp"
#include "gelfand/emden.hpp"
#include "gelfand/experiment.hpp"
#include "gelfand/intersections.hpp"
#include "gelfand/stability.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gelfand;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += (ok ? "" : "FAILED ") + what;
        pass = pass && ok;
    }
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, x);
    return buf;
}

Outcome lyapunov()
{
    Outcome o;
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<int> dim(2, 11);
    std::uniform_real_distribution<double> alpha(-3.0, 3.0);
    std::uniform_real_distribution<double> gamma(0.55, 0.75);
    std::uniform_real_distribution<double> expo(1.2, 1.5);
    std::uniform_real_distribution<double> r0(1.0, 3.0);
    double worst = 0.0;
    long nodes = 0;
    for (int k = 0; k < 20; ++k) {
        const int kind = pick(rng);
        const WarpProfile p = kind == 0   ? WarpProfile::hyperbolic()
                              : kind == 1 ? WarpProfile::polyexp(gamma(rng))
                                          : make_spliced_profile(expo(rng), r0(rng));
        const int N = dim(rng);
        const auto sol = integrate_ivp(p, N, alpha(rng), 50.0, 1e-10);
        const auto ns = sol.nodes();
        for (std::size_t i = 1; i < ns.size(); ++i) {
            worst = std::max(worst, (ns[i].F - ns[i - 1].F) / ns[i - 1].F);
        }
        nodes += static_cast<long>(ns.size());
    }
    o.require(worst <= 1e-9, "max relative F increase " + fmt("%.2e", worst) + " over " +
                                 std::to_string(nodes) + " nodes");
    return o;
}

Outcome scaling()
{
    Outcome o;
    const auto e = WarpProfile::euclidean();
    const auto u0 = integrate_ivp(e, 3, 0.0, 300.0, 1e-12);
    for (double a : {1.0, 2.0}) {
        const auto ua = integrate_ivp(e, 3, a, 100.0, 1e-12);
        double sup = 0.0;
        for (int i = 0; i <= 20000; ++i) {
            const double r = 100.0 * i / 20000;
            sup = std::max(sup, std::abs(ua.u(r) - u0.u(std::exp(a / 2) * r) - a));
        }
        for (const auto& n : ua.nodes()) {
            sup = std::max(sup, std::abs(n.u - u0.u(std::exp(a / 2) * n.r) - a));
        }
        o.require(sup < 1e-6, "alpha=" + fmt("%g", a) + " sup " + fmt("%.2e", sup));
    }
    return o;
}

Outcome dichotomy()
{
    Outcome o;
    const auto pe2 = WarpProfile::polyexp(2.0);
    for (int N : {2, 3}) {
        for (double a : {0.0, 1.0}) {
            const auto rep = classify_limit(integrate_ivp(pe2, N, a, 15.0, 1e-10), pe2);
            const bool ok = rep.limit_kind == LimitKind::FiniteLimit && rep.limit_value &&
                            std::isfinite(*rep.limit_value) && *rep.limit_value < a;
            o.require(ok, "polyexp:2 N=" + std::to_string(N) + " alpha=" + fmt("%g", a) + " finite limit " +
                              fmt("%.5f", rep.limit_value.value_or(NAN)));
        }
    }
    const auto h = WarpProfile::hyperbolic();
    const auto pe = WarpProfile::polyexp(0.75);
    for (int N : {2, 3}) {
        const auto rh = classify_limit(integrate_ivp(h, N, 0.0, 1e5, 1e-10), h);
        o.require(rh.limit_kind == LimitKind::LogDivergence, "hyperbolic N=" + std::to_string(N) + " diverges");
        const auto rp = classify_limit(integrate_ivp(pe, N, 0.0, 1e4, 1e-10), pe);
        o.require(rp.limit_kind == LimitKind::LogDivergence, "polyexp:0.75 N=" + std::to_string(N) + " diverges");
    }
    for (int N : {2, 3}) {
        const auto s40 = integrate_ivp(h, N, 0.0, 40.0, 1e-10);
        const double ratio = decay_ratio(s40, h, 40.0);
        const double target = 1.0 / (N - 1);
        o.require(std::abs(ratio / target - 1.0) <= 0.10,
                  "N=" + std::to_string(N) + " decay ratio at 40 " + fmt("%.5f", ratio) + " vs " + fmt("%g", target));
        const double rate40 = log_rate(s40, h, 40.0).rate;

        const auto sol = integrate_ivp(h, N, 0.0, 1e5, 1e-10);
        double prev_err = INFINITY;
        bool improving = true;
        double rate = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double r = 1e4 * std::pow(10.0, i / 10.0);
            rate = log_rate(sol, h, r).rate;
            const double err = std::abs(rate + 1.0);
            improving = improving && err < prev_err;
            prev_err = err;
        }
        o.require(std::abs(rate + 1.0) <= 0.15 && improving,
                  "N=" + std::to_string(N) + " log-rate " + fmt("%.4f", rate) + " at 1e5, improving over [1e4, 1e5]" +
                      " (raw at 40: " + fmt("%.4f", rate40) + ")");
    }
    const auto e3 = integrate_ivp(WarpProfile::euclidean(), 3, 0.0, 1e4, 1e-10);
    const double er = e3.u(1e4) / std::log(1e4);
    o.require(std::abs(er / -2.0 - 1.0) <= 0.10, "euclidean N=3 u/log r at 1e4 " + fmt("%.4f", er));
    return o;
}

Outcome critical_dimension()
{
    Outcome o;
    const auto s10 = char_roots(10);
    o.require(s10.roots[0] == std::complex<double>(-4.0, 0.0) && s10.roots[1] == std::complex<double>(-4.0, 0.0) &&
                  s10.classification == RootClass::RealDegenerate,
              "N=10 double root -4");
    o.require(char_roots(9).discriminant < 0.0 && s10.discriminant == 0.0 && char_roots(11).discriminant > 0.0,
              "discriminant sign flip at 10");
    const auto s11 = char_roots(11);
    const double a = std::min(s11.roots[0].real(), s11.roots[1].real());
    const double b = std::max(s11.roots[0].real(), s11.roots[1].real());
    o.require(a == -6.0 && b == -3.0, "N=11 roots " + fmt("%g", a) + ", " + fmt("%g", b));
    return o;
}

Outcome trichotomy()
{
    Outcome o;
    const auto e = WarpProfile::euclidean();
    int unstable = 0;
    double largest = 0.0;
    for (int N = 3; N <= 9; ++N) {
        for (double a : {-2.0, 0.0, 2.0}) {
            const auto v = stability_test(e, N, a, 1e6, 1e-10);
            if (v.decision == Decision::UnstableAt) {
                ++unstable;
                largest = std::max(largest, v.radius);
            }
        }
    }
    o.require(unstable == 21, "euclidean N=3..9 unstable " + std::to_string(unstable) + "/21, largest r* " +
                                  fmt("%.4g", largest));
    const auto h = WarpProfile::hyperbolic();
    int stable = 0;
    int barrier = 0;
    double worst_gap = -INFINITY;
    for (int N : {10, 11}) {
        for (double a : {-2.0, 0.0, 2.0, 5.0}) {
            const auto v = stability_test(h, N, a, 50.0, 1e-10);
            stable += v.decision == Decision::StableUpTo && v.radius == 50.0;
            const auto t = emden_transform(integrate_ivp(h, N, a, 50.0, 1e-10));
            barrier += t.max_barrier_gap() < 0.0;
            worst_gap = std::max(worst_gap, t.max_barrier_gap());
        }
    }
    o.require(stable == 8, "hyperbolic N=10,11 stable " + std::to_string(stable) + "/8");
    o.require(barrier == 8, "barrier holds " + std::to_string(barrier) + "/8, max v - V " + fmt("%.4f", worst_gap));
    return o;
}

bool monotone(const std::vector<StabilityVerdict>& probes)
{
    bool unstable = false;
    for (const auto& v : probes) {
        if (!v.stable()) {
            unstable = true;
        } else if (unstable) {
            return false;
        }
    }
    return true;
}

Outcome threshold()
{
    Outcome o;
    const auto h = WarpProfile::hyperbolic();
    for (auto [N, expected, band] : {std::tuple{3, 1.0, 0.02}, std::tuple{2, 0.25, 0.05}}) {
        const auto l = estimate_bottom_spectrum(h, N);
        const double log_l = std::log(l.value);
        const auto t = threshold_eta(h, N, log_l - 2.0, 10.0, 50.0, 1e-3);
        const bool converged = t.unstable_witness.alpha - t.stable_witness.alpha <= 1e-3 &&
                               t.stable_witness.stable() && !t.unstable_witness.stable();
        o.require(converged, "N=" + std::to_string(N) + " bracket " +
                                 fmt("%.2e", t.unstable_witness.alpha - t.stable_witness.alpha));
        o.require(std::abs(l.value / expected - 1.0) <= band,
                  "N=" + std::to_string(N) + " lambda1 " + fmt("%.5f", l.value));
        o.require(t.eta_hat > log_l, "N=" + std::to_string(N) + " eta " + fmt("%.4f", t.eta_hat) + " > log lambda1 " +
                                         fmt("%.4f", log_l));
        if (N == 3) {
            o.require(t.eta_hat > 0.0, "N=3 eta > 0");
        }
        o.require(monotone(t.probes), "N=" + std::to_string(N) + " verdicts monotone over " +
                                          std::to_string(t.probes.size()) + " probes");
    }
    return o;
}

Outcome sturm()
{
    Outcome o;
    const auto h = WarpProfile::hyperbolic();
    int agree = 0;
    int zeros = 0;
    for (double a : {-1.0, 0.5, 1.5, 2.5, 4.0}) {
        const auto base = integrate_ivp(h, 3, a, 50.0, 1e-10);
        const auto z = first_zero(integrate_linearized(base, 1e-10));
        for (double R : {1.0, 3.0, 10.0, 25.0, 50.0}) {
            const bool inside = z && *z < R;
            zeros += inside;
            agree += inside == (weighted_ball_eigenvalue(base, R, 1e-10) < 1.0);
        }
    }
    o.require(agree == 25, "agreement " + std::to_string(agree) + "/25 (" + std::to_string(zeros) + " with a zero)");
    return o;
}

Outcome intersections()
{
    Outcome o;
    const auto e = WarpProfile::euclidean();
    auto pair = [](const WarpProfile& p, int N, double a, double b, double r_max) {
        return find_intersections(integrate_ivp(p, N, a, r_max, 1e-10), integrate_ivp(p, N, b, r_max, 1e-10), r_max);
    };
    const auto r3 = pair(e, 3, 1.0, 0.0, 1e6);
    o.require(r3.crossings.size() >= 3, "euclidean N=3 crossings " + std::to_string(r3.crossings.size()));
    const auto r10 = pair(e, 10, 1.0, 0.0, 1e6);
    o.require(r10.crossings.empty() && r10.min_difference > 0.0,
              "euclidean N=10 crossings " + std::to_string(r10.crossings.size()) + ", min gap " +
                  fmt("%.2e", r10.min_difference));

    const auto h = WarpProfile::hyperbolic();
    const double l = estimate_bottom_spectrum(h, 3).value;
    const double eta = threshold_eta(h, 3, std::log(l) - 2.0, 10.0, 50.0, 1e-3).eta_hat;
    std::size_t below = 0;
    for (auto [a, b] : {std::pair{eta - 0.25, eta - 1.0}, std::pair{eta - 0.5, eta - 3.0}}) {
        below += pair(h, 3, a, b, 50.0).crossings.size();
    }
    o.require(below == 0, "hyperbolic below eta crossings " + std::to_string(below));
    std::size_t above = 100;
    for (auto [a, b] : {std::pair{eta + 1.0, eta + 0.25}, std::pair{eta + 4.0, eta + 0.5}}) {
        above = std::min(above, pair(h, 3, a, b, 50.0).crossings.size());
    }
    o.require(above >= 1, "hyperbolic above eta min crossings " + std::to_string(above));

    std::vector<RadialSolution> s;
    for (double a : {3.0, 2.0, 1.0, 0.0}) {
        s.push_back(integrate_ivp(e, 3, a, 1e4, 1e-10));
    }
    const auto z12 = find_intersections(s[0], s[1], 1e4).crossings;
    const auto z34 = find_intersections(s[2], s[3], 1e4).crossings;
    o.require(!z12.empty() && !z34.empty() && z12[0] <= z34[0] * (1 + 1e-9),
              "quadruple (3,2,1,0) first crossings " + fmt("%.5f", z12.empty() ? NAN : z12[0]) + " <= " +
                  fmt("%.5f", z34.empty() ? NAN : z34[0]));
    return o;
}

Outcome blowup()
{
    Outcome o;
    const auto h = WarpProfile::hyperbolic();
    const auto ref = integrate_ivp(WarpProfile::euclidean(), 3, 1.0, 5.0, 1e-12);
    double prev = INFINITY;
    bool decreasing = true;
    double last = 0.0;
    double grad_excess = -INFINITY;
    for (double lambda : {1e-1, 1e-2, 1e-3}) {
        const auto b = blowup_rescale(h, 3, lambda, 5.0, 1e-12);
        double sup = 0.0;
        for (int i = 0; i <= 5000; ++i) {
            const double s = 5.0 * i / 5000;
            sup = std::max(sup, std::abs(b.at(s).v - ref.u(s)));
        }
        for (const auto& p : b.samples) {
            if (p.s <= 5.0) {
                sup = std::max(sup, std::abs(p.v - ref.u(p.s)));
                grad_excess = std::max(grad_excess, std::abs(p.v1) - std::numbers::e * p.s);
            }
        }
        decreasing = decreasing && sup < prev;
        prev = sup;
        last = sup;
        o.detail += (o.detail.empty() ? "" : ", ") + std::string("sup ") + fmt("%.2e", sup);
    }
    o.require(decreasing, "decreasing in lambda");
    o.require(last < 0.05, "sup at 1e-3 " + fmt("%.2e", last));
    o.require(grad_excess <= 1e-6, "max |v'| - e s " + fmt("%.2e", grad_excess));
    return o;
}

Outcome eigenvalues()
{
    Outcome o;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double e1 = ball_eigenvalue(WarpProfile::euclidean(), 3, 1.0, 1e-10);
    o.require(std::abs(e1 - pi2) < 1e-6, "euclidean lambda1(B_1) - pi^2 " + fmt("%.2e", e1 - pi2));
    const auto h = WarpProfile::hyperbolic();
    bool decreasing = true;
    double prev = INFINITY;
    for (double R : {0.1, 1.0, 5.0, 10.0, 20.0, 40.0}) {
        const double l = ball_eigenvalue(h, 3, R, 1e-10);
        decreasing = decreasing && l < prev;
        prev = l;
    }
    o.require(decreasing, "hyperbolic lambda1(B_R) decreasing");
    const auto est = estimate_bottom_spectrum(h, 3);
    o.require(std::abs(est.value - 1.0) <= 0.02, "extrapolated limit " + fmt("%.5f", est.value));
    const double small = ball_eigenvalue(h, 3, 0.1, 1e-10);
    const double large = ball_eigenvalue(h, 3, 10.0, 1e-10);
    o.require(small > 100.0 * large, "lambda1(B_0.1)/lambda1(B_10) " + fmt("%.1f", small / large));
    return o;
}

Outcome winding()
{
    Outcome o;
    const auto e = WarpProfile::euclidean();
    for (auto [N, want_min, want_max] : {std::tuple{3, 2, 1 << 20}, std::tuple{11, 0, 0}}) {
        const auto sol = integrate_ivp(e, N, 0.0, 10.0, 1e-10);
        const auto tr = integrate_autonomous(N, phase_state(sol, 1.0), 40.0, 1e-10);
        const int turns = tr.turns();
        o.require(turns >= want_min && turns <= want_max, "N=" + std::to_string(N) + " turns " + std::to_string(turns));
    }
    double drift = 0.0;
    for (int N : {3, 10, 11}) {
        for (const auto& p : integrate_autonomous(N, {0.0, 0.0, 0.0}, 40.0, 1e-10).points) {
            drift = std::max({drift, std::abs(p.y), std::abs(p.z)});
        }
    }
    o.require(drift <= 1e-10, "fixed point drift " + fmt("%.1e", drift));
    return o;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    Outcome o;
    const auto base = fs::temp_directory_path() / ("gelfand_acceptance_" + std::to_string(std::random_device{}()));
    ExperimentConfig c;
    c.profiles = {"hyperbolic", "euclidean"};
    c.dimensions = {2, 3};
    c.alphas = parse_alphas("-2:2:1");
    c.r_max = 50.0;
    c.tasks = {Task::Solve, Task::Stability, Task::Intersect};
    std::vector<fs::path> dirs;
    for (int w : {1, 8, 1, 8}) {
        c.workers = w;
        c.output_dir = base / ("run" + std::to_string(dirs.size()));
        fs::create_directories(c.output_dir);
        sweep(c);
        dirs.push_back(c.output_dir);
    }
    int files = 0;
    int same = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
        if (entry.path().extension() != ".csv") {
            continue;
        }
        const auto rel = fs::relative(entry.path(), dirs[0]);
        const auto ref = slurp(entry.path());
        ++files;
        bool all = true;
        for (std::size_t k = 1; k < dirs.size(); ++k) {
            all = all && fs::exists(dirs[k] / rel) && slurp(dirs[k] / rel) == ref;
        }
        same += all;
    }
    fs::remove_all(base);
    o.require(files > 0 && same == files, std::to_string(same) + "/" + std::to_string(files) +
                                              " CSVs identical over 4 sweeps (workers 1, 8)");
    return o;
}

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {"lyapunov-monotonicity", 5.0, lyapunov},
        {"euclidean-scaling", 1.0, scaling},
        {"asymptotic-dichotomy", 10.0, dichotomy},
        {"critical-dimension-roots", 1.0, critical_dimension},
        {"stability-trichotomy", 30.0, trichotomy},
        {"threshold-eta", 60.0, threshold},
        {"sturm-cross-validation", 30.0, sturm},
        {"intersection-trichotomy", 60.0, intersections},
        {"blowup-convergence", 10.0, blowup},
        {"eigenvalue-oracles", 10.0, eigenvalues},
        {"phase-plane-winding", 5.0, winding},
        {"determinism", 10.0, determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.require(secs <= c.budget_seconds, "runtime " + fmt("%.2f", secs) + " s <= " + fmt("%g", c.budget_seconds));
        failed += !out.pass;
        std::printf("%s %2zu %-26s %s\n", out.pass ? "PASS" : "FAIL", i + 1, c.name, out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
