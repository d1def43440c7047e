#include "gelfand/emden.hpp"

#include "gelfand/csv.hpp"
#include "gelfand/dopri.hpp"
#include "gelfand/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace gelfand {

namespace {

constexpr double exclusion_radius = 1e-8;
constexpr double divergence_level = 50.0;

void require_dimension(int N)
{
    if (N < 3) {
        throw DimensionError("the Emden transform needs N >= 3");
    }
}

}  // namespace

std::string to_string(RootClass c)
{
    switch (c) {
    case RootClass::ComplexFocus:
        return "ComplexFocus";
    case RootClass::RealDegenerate:
        return "RealDegenerate";
    case RootClass::RealNode:
        return "RealNode";
    }
    return "";
}

double EmdenTransform::max_barrier_gap() const
{
    double gap = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        gap = std::max(gap, s.v - s.V);
    }
    return gap;
}

EmdenTransform emden_transform(const RadialSolution& sol)
{
    const int N = sol.dimension();
    require_dimension(N);
    const auto& profile = sol.profile();
    const double log_c = std::log(2.0 * (N - 2.0));
    const double tol = sol.tol();

    EmdenTransform out;
    for (const auto& n : sol.trajectory().nodes()) {
        if (!(n.r > 0.0)) {
            continue;
        }
        const double lp = profile.log_psi(n.r);
        const double q1 = profile.log_derivative(n.r);
        const double q2 = profile.second_ratio(n.r);
        const double v = n.y + 2.0 * lp - log_c;
        out.samples.push_back({n.r, v, 2.0 * profile.log_psi1(n.r)});

        const double v1 = n.y1 + 2.0 * q1;
        const double v2 = n.y2 + 2.0 * (q2 - q1 * q1);
        const double terms[] = {v2, (N - 1.0) * q1 * v1, 2.0 * (N - 2.0) * std::exp(v - 2.0 * lp),
                                2.0 * (N - 2.0) * q1 * q1, 2.0 * q2};
        const double residual = terms[0] + terms[1] + terms[2] - terms[3] - terms[4];
        double scale = 0.0;
        for (double t : terms) {
            scale += std::abs(t);
        }
        if (scale > 0.0) {
            out.max_relative_residual = std::max(out.max_relative_residual, std::abs(residual) / scale);
        }
    }
    out.residual_ok = out.max_relative_residual <= 10.0 * tol;
    return out;
}

SpectralSummary char_roots(int N)
{
    require_dimension(N);
    const double b = N - 2.0;
    SpectralSummary s{};
    s.N = N;
    s.discriminant = b * (N - 10.0);
    if (s.discriminant < 0.0) {
        const double im = 0.5 * std::sqrt(-s.discriminant);
        s.roots[0] = {-0.5 * b, -im};
        s.roots[1] = {-0.5 * b, im};
        s.classification = RootClass::ComplexFocus;
    } else {
        const double root = std::sqrt(s.discriminant);
        s.roots[0] = {0.5 * (-b - root), 0.0};
        s.roots[1] = {0.5 * (-b + root), 0.0};
        s.classification = s.discriminant == 0.0 ? RootClass::RealDegenerate : RootClass::RealNode;
    }
    return s;
}

int PhaseTrajectory::turns() const
{
    if (points.empty()) {
        return 0;
    }
    return static_cast<int>(std::floor(std::abs(points.back().angle_cum) / (2.0 * std::numbers::pi)));
}

double PhaseTrajectory::decay_rate(double t_from, double t_to) const
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& p : points) {
        if (p.t < t_from || p.t > t_to || p.z == 0.0) {
            continue;
        }
        const double ly = std::log(std::abs(p.z));
        sx += p.t;
        sy += ly;
        sxx += p.t * p.t;
        sxy += p.t * ly;
        ++n;
    }
    const double det = n * sxx - sx * sx;
    if (n < 2 || det == 0.0) {
        throw InsufficientRange("decay rate needs two distinct samples");
    }
    return (n * sxy - sx * sy) / det;
}

double PhaseTrajectory::z_at(double t) const
{
    if (points.empty() || t < points.front().t || t > points.back().t) {
        throw std::out_of_range("phase time outside the trajectory");
    }
    auto it = std::lower_bound(points.begin(), points.end(), t,
                               [](const PhasePoint& p, double x) { return p.t < x; });
    if (it == points.begin()) {
        return it->z;
    }
    const auto& a = *(it - 1);
    const auto& b = *it;
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * a.z + (s3 - 2 * s2 + s) * h * a.y + (-2 * s3 + 3 * s2) * b.z +
           (s3 - s2) * h * b.y;
}

PhaseTrajectory integrate_autonomous(int N, PhaseState start, double t_end, double tol)
{
    require_dimension(N);
    if (!(tol > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    const double c = N - 2.0;
    using S = ode::State<2>;
    auto rhs = [c](double, const S& s) -> S { return {-c * s[0] - 2.0 * c * std::expm1(s[1]), s[0]}; };

    PhaseTrajectory out{N, {}};
    out.points.push_back({start.t, start.y, start.z, 0.0});
    if (!(t_end > start.t)) {
        return out;
    }
    constexpr double max_step = 0.1;
    double t = start.t;
    S s{start.y, start.z};
    S k1 = rhs(t, s);
    double h = std::min(0.01, t_end - t);
    double angle = 0.0;
    while (t < t_end) {
        const double h_try = std::min({h, max_step, t_end - t});
        if (h_try < 1e-14 * std::max(1.0, std::abs(t))) {
            throw StepUnderflow("phase step underflow at t = " + std::to_string(t));
        }
        const auto step = ode::dopri_step<2>(rhs, t, s, k1, h_try, tol, tol * 1e-20);
        if (step.error > 1.0) {
            h = h_try * ode::step_factor(step.error);
            continue;
        }
        if (std::abs(step.y[1]) > divergence_level) {
            throw Divergence("phase trajectory left |z| <= 50 at t = " + std::to_string(t + h_try));
        }
        const double r_prev = std::hypot(s[0], s[1]);
        const double r_next = std::hypot(step.y[0], step.y[1]);
        if (r_prev > exclusion_radius && r_next > exclusion_radius) {
            double d = std::atan2(step.y[1], step.y[0]) - std::atan2(s[1], s[0]);
            d = std::remainder(d, 2.0 * std::numbers::pi);
            angle += d;
        }
        t = t_end - t <= h_try ? t_end : t + h_try;
        s = step.y;
        k1 = step.dy;
        out.points.push_back({t, s[0], s[1], angle});
        h = h_try * ode::step_factor(step.error);
    }
    return out;
}

PhaseState phase_state(const RadialSolution& sol, double r)
{
    require_dimension(sol.dimension());
    if (sol.profile().kind() != ProfileKind::Euclidean) {
        throw std::invalid_argument("the autonomous phase plane exists only on Euclidean space");
    }
    if (!(r > 0.0)) {
        throw std::invalid_argument("phase state needs r > 0");
    }
    const auto s = sol.trajectory().eval(r);
    return {std::log(r), r * s.y1 + 2.0, s.y + 2.0 * std::log(r) - std::log(2.0 * (sol.dimension() - 2.0))};
}

BarrierOperator barrier_operator(const WarpProfile& profile, int N, double r)
{
    if (N < 10) {
        throw DimensionError("the barrier exponent is real only for N >= 10");
    }
    const double lambda = char_roots(N).roots[0].real();
    const double q1 = profile.log_derivative(r);
    const double q2 = profile.second_ratio(r);
    // Z'/Z = lambda q1, Z''/Z = lambda (lambda - 1) q1^2 + lambda q2
    const double direct = lambda * (lambda - 1.0) * q1 * q1 + lambda * q2 + (N - 1.0) * q1 * lambda * q1 +
                          2.0 * (N - 2.0) * q1 * q1;
    return {r, direct, lambda * q2};
}

void write_phase_csv(std::ostream& out, const PhaseTrajectory& traj)
{
    out << "t,y,z,angle_cum\n";
    for (const auto& p : traj.points) {
        out << fmt17(p.t) << ',' << fmt17(p.y) << ',' << fmt17(p.z) << ',' << fmt17(p.angle_cum) << '\n';
    }
}

}  // namespace gelfand
