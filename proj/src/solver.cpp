#include "gelfand/solver.hpp"

#include "gelfand/csv.hpp"
#include "gelfand/errors.hpp"
#include "gelfand/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gelfand {

namespace detail {

double LinearSeries::value(double r) const
{
    const double r2 = r * r;
    return 1.0 + b2 * r2 + b4 * r2 * r2 + bk * std::pow(r, k);
}

double LinearSeries::slope(double r) const
{
    return 2.0 * b2 * r + 4.0 * b4 * r * r * r + k * bk * std::pow(r, k - 1.0);
}

LinearSeries linear_series(const WarpProfile& profile, int dimension, double m0, double kappa)
{
    const double n = dimension;
    const auto origin = profile.origin_series();
    const double k = origin.power + 3.0;
    LinearSeries s{};
    s.b2 = -m0 / (2.0 * n);
    s.b4 = -m0 * (s.b2 + kappa) / (4.0 * (n + 2.0));
    s.k = k;
    s.bk = -2.0 * (n - 1.0) * origin.coefficient * s.b2 / (k * (k + n - 2.0));
    return s;
}

}  // namespace detail

namespace {

void check_dimension(int dimension)
{
    if (dimension < 2) {
        throw std::invalid_argument("dimension must be at least 2");
    }
}

}  // namespace

RadialSolution::RadialSolution(double alpha, int dimension, WarpProfile profile, RadialTrajectory trajectory,
                               double tol)
    : alpha_(alpha), dimension_(dimension), profile_(std::move(profile)), trajectory_(std::move(trajectory)),
      tol_(tol)
{
    for (const auto& n : trajectory_.nodes()) {
        if (n.r > 0.0 && !(n.y1 < 0.0)) {
            ++monotonicity_violations_;
        }
    }
}

double RadialSolution::lyapunov(double r) const
{
    const auto s = trajectory_.eval(r);
    return 0.5 * s.y1 * s.y1 + std::exp(s.y);
}

std::vector<SolutionNode> RadialSolution::nodes() const
{
    std::vector<SolutionNode> out;
    out.reserve(trajectory_.nodes().size());
    for (const auto& n : trajectory_.nodes()) {
        out.push_back({n.r, n.y, n.y1, 0.5 * n.y1 * n.y1 + std::exp(n.y)});
    }
    return out;
}

LinearizedSolution::LinearizedSolution(double alpha, int dimension, WarpProfile profile,
                                       RadialTrajectory trajectory)
    : alpha_(alpha), dimension_(dimension), profile_(std::move(profile)), trajectory_(std::move(trajectory))
{
}

TaylorState taylor_init(const WarpProfile& profile, int dimension, double alpha, double eps)
{
    check_dimension(dimension);
    if (!(eps >= 0.0) || eps > 1e-3) {
        throw std::invalid_argument("Taylor handoff radius must lie in [0, 1e-3]");
    }
    if (eps == 0.0) {
        return {alpha, 0.0, 1.0, 0.0};
    }
    const double n = dimension;
    const double ea = std::exp(alpha);
    const auto origin = profile.origin_series();
    const double k = origin.power + 3.0;

    const double a2 = -ea / (2.0 * n);
    const double a4 = -a2 * ea / (4.0 * (n + 2.0));
    const double b = -2.0 * (n - 1.0) * origin.coefficient * a2 / (k * (k + n - 2.0));

    const double e2 = eps * eps;
    TaylorState s{};
    s.u = alpha + a2 * e2 + a4 * e2 * e2 + b * std::pow(eps, k);
    s.u1 = 2.0 * a2 * eps + 4.0 * a4 * e2 * eps + k * b * std::pow(eps, k - 1.0);

    const auto lin = detail::linear_series(profile, dimension, ea, a2);
    s.v = lin.value(eps);
    s.v1 = lin.slope(eps);
    return s;
}

RadialSolution integrate_ivp(const WarpProfile& profile, int dimension, double alpha, double r_max,
                             double tol, const SolverOptions& opts)
{
    check_dimension(dimension);
    if (!(tol >= 1e-13 && tol <= 1e-6)) {
        throw std::invalid_argument("tolerance must lie in [1e-13, 1e-6]");
    }
    if (!(r_max > opts.eps)) {
        throw std::invalid_argument("r_max must exceed the handoff radius");
    }
    const auto start = taylor_init(profile, dimension, alpha, opts.eps);

    RadialOptions ro;
    ro.rtol = tol;
    ro.atol = tol;
    ro.log_switch = opts.log_switch;

    auto forcing = [](double, double u) { return std::exp(u); };
    auto lyapunov_ok = [](const RadialNode& a, const RadialNode& b) {
        const double fa = 0.5 * a.y1 * a.y1 + std::exp(a.y);
        const double fb = 0.5 * b.y1 * b.y1 + std::exp(b.y);
        return fb <= fa * (1.0 + 1e-9);
    };
    auto nodes = integrate_radial(profile, dimension, forcing, RadialStart{opts.eps, start.u, start.u1}, r_max,
                                  ro, lyapunov_ok, [](const RadialNode&, const RadialNode&) { return false; });

    const RadialNode origin{0.0, alpha, 0.0, -std::exp(alpha) / dimension};
    return RadialSolution(alpha, dimension, profile, RadialTrajectory(origin, std::move(nodes), opts.log_switch),
                          tol);
}

LinearizedSolution integrate_linearized(const RadialSolution& base, double tol)
{
    const auto& traj = base.trajectory();
    const int dimension = base.dimension();
    const double ea = std::exp(base.alpha());
    const double r0 = traj.r_begin();
    const auto series = detail::linear_series(base.profile(), dimension, ea, -ea / (2.0 * dimension));

    RadialOptions ro;
    ro.rtol = tol;
    ro.atol = tol;
    ro.log_switch = traj.log_switch();

    auto forcing = [&traj](double r, double v) { return std::exp(traj.value(r)) * v; };
    auto nodes = integrate_radial(base.profile(), dimension, forcing,
                                  RadialStart{r0, series.value(r0), series.slope(r0)}, traj.r_end(), ro);

    const RadialNode origin{0.0, 1.0, 0.0, -ea / dimension};
    return LinearizedSolution(base.alpha(), dimension, base.profile(),
                              RadialTrajectory(origin, std::move(nodes), traj.log_switch()));
}

BlowupSample BlowupTrajectory::at(double s) const
{
    const auto e = solution.trajectory().eval(lambda * s);
    return {s, (e.y - alpha) + 1.0, lambda * e.y1};
}

BlowupTrajectory blowup_rescale(const WarpProfile& profile, int dimension, double lambda, double S, double tol,
                                const SolverOptions& opts)
{
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("blow-up scale must lie in (0, 1]");
    }
    if (!(S > 0.0)) {
        throw std::invalid_argument("blow-up window must be positive");
    }
    const double alpha = 1.0 - 2.0 * std::log(lambda);
    SolverOptions scaled = opts;
    scaled.eps = opts.eps * lambda;
    auto sol = integrate_ivp(profile, dimension, alpha, lambda * S, tol, scaled);

    std::vector<BlowupSample> samples;
    samples.reserve(sol.trajectory().nodes().size() + 1);
    samples.push_back({0.0, 1.0, 0.0});
    for (const auto& n : sol.trajectory().nodes()) {
        samples.push_back({n.r / lambda, (n.y - alpha) + 1.0, lambda * n.y1});
    }
    return {lambda, alpha, std::move(sol), std::move(samples)};
}

void write_trajectory_csv(std::ostream& out, const RadialSolution& sol, const LinearizedSolution* lin)
{
    out << (lin ? "r,u,u1,F,v,v1\n" : "r,u,u1,F\n");
    for (const auto& n : sol.nodes()) {
        out << fmt17(n.r) << ',' << fmt17(n.u) << ',' << fmt17(n.u1) << ',' << fmt17(n.F);
        if (lin) {
            const auto s = lin->trajectory().eval(std::min(n.r, lin->r_max()));
            out << ',' << fmt17(s.y) << ',' << fmt17(s.y1);
        }
        out << '\n';
    }
}

}  // namespace gelfand
