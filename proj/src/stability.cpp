#include "gelfand/stability.hpp"

#include "gelfand/errors.hpp"
#include "gelfand/radial_ode.hpp"
#include "gelfand/roots.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gelfand {

namespace {

constexpr double tangency_level = 1e-10;
constexpr double shoot_eps = 1e-6;
constexpr double mu_min = 1e-8;
constexpr double mu_max = 1e8;

/// Dirichlet shooting for phi'' + (N-1)(psi'/psi)phi' + mu w(r) phi = 0 on B_R,
/// where w(r) ~ m0 (1 + kappa r^2) near the origin.
class Shooter {
public:
    Shooter(const WarpProfile& profile, int dimension, double R, double tol, std::function<double(double)> weight,
            double m0, double kappa)
        : profile_(profile), dimension_(dimension), R_(R), weight_(std::move(weight)), m0_(m0), kappa_(kappa)
    {
        opts_.rtol = tol;
        opts_.atol = tol * 1e-30;
    }

    /// Nodes up to R, or up to the first node where phi <= 0 when stop_at_zero.
    std::vector<RadialNode> shoot(double mu, bool stop_at_zero) const
    {
        const auto series = detail::linear_series(profile_, dimension_, mu * m0_, kappa_);
        const double eps = std::min(shoot_eps, 0.5 * R_);
        auto forcing = [&](double r, double y) { return mu * weight_(r) * y; };
        auto accept = [](const RadialNode&, const RadialNode&) { return true; };
        auto stop = [stop_at_zero](const RadialNode&, const RadialNode& b) { return stop_at_zero && b.y <= 0.0; };
        return integrate_radial(profile_, dimension_, forcing, RadialStart{eps, series.value(eps), series.slope(eps)},
                                R_, opts_, accept, stop);
    }

    bool vanishes_before_end(double mu) const { return shoot(mu, true).back().y <= 0.0; }

    double end_value(double mu) const { return shoot(mu, false).back().y; }

    double eigenvalue() const
    {
        double lo = mu_min;
        double hi = mu_max;
        if (vanishes_before_end(lo) || !vanishes_before_end(hi)) {
            throw BracketFailure("eigenvalue bracket (1e-8, 1e8) does not straddle for R = " + std::to_string(R_));
        }
        while (hi / lo > 1.0 + 1e-4) {
            const double mid = std::sqrt(lo * hi);
            (vanishes_before_end(mid) ? hi : lo) = mid;
        }
        double f_lo = end_value(lo);
        double f_hi = end_value(hi);
        // a single sign change of phi(R) separates lo from hi unless the bracket
        // still holds a second zero; keep bisecting in that case
        while (!(f_lo > 0.0 && f_hi <= 0.0) && hi / lo > 1.0 + 1e-15) {
            const double mid = 0.5 * (lo + hi);
            if (vanishes_before_end(mid)) {
                hi = mid;
                f_hi = end_value(hi);
            } else {
                lo = mid;
                f_lo = end_value(lo);
            }
        }
        if (!(f_lo > 0.0 && f_hi <= 0.0)) {
            return 0.5 * (lo + hi);
        }
        return refine_root([this](double mu) { return end_value(mu); }, lo, hi, f_lo, f_hi, 1e-14 * hi, 60);
    }

private:
    const WarpProfile& profile_;
    int dimension_;
    double R_;
    std::function<double(double)> weight_;
    double m0_;
    double kappa_;
    RadialOptions opts_;
};

void require_radius(double R)
{
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw std::invalid_argument("ball radius must be positive and finite");
    }
}

TestFunction extended_eigenfunction(const LinearizedSolution& lin, double r_star)
{
    TestFunction chi;
    const auto& traj = lin.trajectory();
    auto push = [&chi](double r, double y, double y1, double y2) {
        chi.r.push_back(r);
        chi.value.push_back(y);
        chi.slope.push_back(y1);
        chi.second.push_back(y2);
    };
    push(0.0, 1.0, 0.0, traj.origin().y2);
    for (const auto& n : traj.nodes()) {
        if (n.r > 0.0 && n.r < r_star) {
            push(n.r, n.y, n.y1, n.y2);
        }
    }
    const double slope = lin.v1(r_star);
    push(r_star, 0.0, slope, -(lin.dimension() - 1.0) * lin.profile().log_derivative(r_star) * slope);
    return chi;
}

}  // namespace

std::string to_string(Decision decision)
{
    return decision == Decision::UnstableAt ? "UnstableAt" : "StableUpTo";
}

ZeroSearch find_first_zero(const LinearizedSolution& lin)
{
    ZeroSearch out;
    const auto& traj = lin.trajectory();
    auto v = [&traj](double r) { return traj.value(r); };
    const auto& nodes = traj.nodes();
    const RadialNode* prev = &traj.origin();
    for (std::size_t i = 0; i <= nodes.size(); ++i) {
        const RadialNode* next = i < nodes.size() ? &nodes[i] : nullptr;
        if (!next) {
            break;
        }
        if (next->r <= prev->r) {
            prev = next;
            continue;
        }
        const double tol = 1e-12 * std::max(1.0, next->r);
        if (prev->y > 0.0 && next->y <= 0.0) {
            out.radius = refine_root(v, prev->r, next->r, prev->y, next->y, tol);
            return out;
        }
        // a dip between nodes: locate the interior minimum of the interpolant
        if (prev->y > 0.0 && next->y > 0.0 && prev->y1 < 0.0 && next->y1 > 0.0) {
            const double r_min = boost::math::tools::brent_find_minima(v, prev->r, next->r, 40).first;
            const double v_min = v(r_min);
            if (v_min <= 0.0) {
                out.radius = refine_root(v, prev->r, r_min, prev->y, v_min, tol);
                return out;
            }
            if (v_min < tangency_level) {
                out.tangencies.push_back(r_min);
            }
        }
        if (next->y > 0.0 && next->y < tangency_level && i + 1 < nodes.size() && prev->y >= next->y &&
            nodes[i + 1].y >= next->y) {
            out.tangencies.push_back(next->r);
        }
        prev = next;
    }
    return out;
}

std::optional<double> first_zero(const LinearizedSolution& lin)
{
    return find_first_zero(lin).radius;
}

double ball_eigenvalue(const WarpProfile& profile, int dimension, double R, double tol)
{
    require_radius(R);
    Shooter shooter(profile, dimension, R, tol, [](double) { return 1.0; }, 1.0, 0.0);
    return shooter.eigenvalue();
}

double weighted_ball_eigenvalue(const RadialSolution& base, double R, double tol, WeightMode mode)
{
    require_radius(R);
    if (R > base.r_max() * (1.0 + 1e-12)) {
        throw InsufficientRange("base solution ends before R");
    }
    const double ea = std::exp(base.alpha());
    if (mode == WeightMode::Frozen) {
        Shooter shooter(base.profile(), base.dimension(), R, tol, [ea](double) { return ea; }, ea, 0.0);
        return shooter.eigenvalue();
    }
    const auto& traj = base.trajectory();
    Shooter shooter(base.profile(), base.dimension(), R, tol,
                    [&traj](double r) { return std::exp(traj.value(r)); }, ea, -ea / (2.0 * base.dimension()));
    return shooter.eigenvalue();
}

double weighted_ball_eigenvalue(const WarpProfile& profile, int dimension, double alpha, double R, double tol)
{
    const auto base = integrate_ivp(profile, dimension, alpha, R, tol);
    return weighted_ball_eigenvalue(base, R, tol);
}

SpectrumEstimate estimate_bottom_spectrum(const WarpProfile& profile, int dimension, std::vector<double> radii,
                                          double tol)
{
    if (radii.size() < 2) {
        throw std::invalid_argument("spectrum estimate needs at least two radii");
    }
    std::sort(radii.begin(), radii.end());
    SpectrumEstimate out{};
    out.radii = radii;
    for (double R : radii) {
        out.ball_values.push_back(ball_eigenvalue(profile, dimension, R, tol));
    }
    const std::size_t n = radii.size();
    const double r1 = radii[n - 2];
    const double r2 = radii[n - 1];
    const double l1 = out.ball_values[n - 2];
    const double l2 = out.ball_values[n - 1];
    out.value = (r2 * l2 - r1 * l1) / (r2 - r1);
    out.uncertainty = std::abs(l2 - out.value);
    return out;
}

StabilityVerdict stability_test(const WarpProfile& profile, int dimension, double alpha, double r_max, double tol,
                                const StabilityOptions& opts)
{
    const auto base = integrate_ivp(profile, dimension, alpha, r_max, tol, opts.solver);
    const auto lin = integrate_linearized(base, tol);
    const auto zeros = find_first_zero(lin);

    StabilityVerdict verdict;
    verdict.alpha = alpha;
    verdict.tangencies = zeros.tangencies;
    if (zeros.radius) {
        verdict.decision = Decision::UnstableAt;
        verdict.radius = *zeros.radius;
        verdict.certificate = quadratic_form_parts(profile, base, extended_eigenfunction(lin, *zeros.radius)).normalized();
    } else {
        verdict.decision = Decision::StableUpTo;
        verdict.radius = base.r_max();
    }
    if (opts.cross_check) {
        const double R = verdict.stable() ? base.r_max() : std::min(1.5 * verdict.radius, base.r_max());
        const double value = weighted_ball_eigenvalue(base, R, tol);
        verdict.weighted_eig = WeightedEigenvalue{R, value};
        const bool zero_inside = !verdict.stable() && verdict.radius < R;
        verdict.method_agreement = zero_inside == (value < 1.0);
    }
    return verdict;
}

ThresholdResult threshold_eta(const WarpProfile& profile, int dimension, double alpha_lo, double alpha_hi,
                              double r_max, double tol_alpha, const ThresholdOptions& opts)
{
    if (dimension < 2 || dimension > 9) {
        throw DimensionError("the stability threshold is finite only for 2 <= N <= 9");
    }
    if (!(alpha_lo < alpha_hi) || !(tol_alpha > 0.0) || opts.grid_points < 2) {
        throw std::invalid_argument("threshold search needs alpha_lo < alpha_hi and tol_alpha > 0");
    }
    StabilityOptions so;
    so.cross_check = false;
    auto verdict = [&](double a) { return stability_test(profile, dimension, a, r_max, opts.tol, so); };

    std::vector<StabilityVerdict> probes;
    for (int i = 0; i < opts.grid_points; ++i) {
        const double a = i + 1 == opts.grid_points
                             ? alpha_hi
                             : alpha_lo + (alpha_hi - alpha_lo) * i / (opts.grid_points - 1.0);
        probes.push_back(verdict(a));
    }
    if (!probes.front().stable()) {
        throw BracketError("alpha_lo = " + std::to_string(alpha_lo) + " is not stable");
    }
    if (probes.back().stable()) {
        throw BracketError("alpha_hi = " + std::to_string(alpha_hi) + " is not unstable");
    }
    auto check_monotone = [](const std::vector<StabilityVerdict>& sorted) {
        bool seen_unstable = false;
        for (const auto& v : sorted) {
            if (!v.stable()) {
                seen_unstable = true;
            } else if (seen_unstable) {
                throw NonMonotoneWitness("stable verdict at alpha = " + std::to_string(v.alpha) +
                                         " above an unstable one");
            }
        }
    };
    check_monotone(probes);

    std::size_t first_unstable = 0;
    while (probes[first_unstable].stable()) {
        ++first_unstable;
    }
    StabilityVerdict stable = probes[first_unstable - 1];
    StabilityVerdict unstable = probes[first_unstable];
    while (unstable.alpha - stable.alpha > tol_alpha) {
        auto v = verdict(0.5 * (stable.alpha + unstable.alpha));
        probes.push_back(v);
        (v.stable() ? stable : unstable) = v;
    }
    std::sort(probes.begin(), probes.end(),
              [](const StabilityVerdict& a, const StabilityVerdict& b) { return a.alpha < b.alpha; });
    check_monotone(probes);

    ThresholdResult out{0.5 * (stable.alpha + unstable.alpha), tol_alpha, alpha_lo, alpha_hi, stable, unstable,
                        std::move(probes)};
    return out;
}

double QuadraticForm::value() const
{
    const double diff = gradient - potential;
    return diff == 0.0 ? 0.0 : diff * std::exp(log_scale);
}

double QuadraticForm::normalized() const
{
    if (potential == 0.0) {
        return gradient == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return (gradient - potential) / potential;
}

QuadraticForm quadratic_form_parts(const WarpProfile& profile, const RadialSolution& base, const TestFunction& chi)
{
    const std::size_t n = chi.r.size();
    const bool hermite = !chi.slope.empty();
    const bool quintic = !chi.second.empty();
    if (n < 2 || chi.value.size() != n || (hermite && chi.slope.size() != n) ||
        (quintic && (!hermite || chi.second.size() != n))) {
        throw std::invalid_argument("test function samples are inconsistent");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(chi.r[i] > chi.r[i - 1])) {
            throw std::invalid_argument("test function radii must increase");
        }
    }
    if (chi.r.front() < 0.0) {
        throw std::invalid_argument("test function radii must be nonnegative");
    }
    if (!profile.same_model(base.profile())) {
        throw std::invalid_argument("test function profile differs from the base solution");
    }
    if (chi.r.back() > base.r_max() * (1.0 + 1e-12)) {
        throw SupportError("test function extends past the integrated range");
    }
    if (chi.value.back() != 0.0 || (chi.r.front() > 0.0 && chi.value.front() != 0.0)) {
        throw SupportError("test function must vanish at the ends of its support");
    }

    const double nm1 = base.dimension() - 1.0;
    const double log_scale = nm1 * profile.log_psi(chi.r.back());
    double gradient = 0.0;
    double potential = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = chi.r[i];
        const double b = chi.r[i + 1];
        const double h = b - a;
        const double ya = chi.value[i];
        const double yb = chi.value[i + 1];
        if (ya == 0.0 && yb == 0.0 && (!hermite || (chi.slope[i] == 0.0 && chi.slope[i + 1] == 0.0)) &&
            (!quintic || (chi.second[i] == 0.0 && chi.second[i + 1] == 0.0))) {
            continue;
        }
        auto sample = [&](double r) -> std::pair<double, double> {
            if (!hermite) {
                return {ya + (yb - ya) * (r - a) / h, (yb - ya) / h};
            }
            const double s = (r - a) / h;
            const double s2 = s * s;
            const double s3 = s2 * s;
            const double ma = chi.slope[i] * h;
            const double mb = chi.slope[i + 1] * h;
            if (quintic) {
                const double s4 = s3 * s;
                const double s5 = s4 * s;
                const double ca = chi.second[i] * h * h;
                const double cb = chi.second[i + 1] * h * h;
                const double val = ya * (1 - 10 * s3 + 15 * s4 - 6 * s5) + ma * (s - 6 * s3 + 8 * s4 - 3 * s5) +
                                   ca * 0.5 * (s2 - 3 * s3 + 3 * s4 - s5) + cb * 0.5 * (s3 - 2 * s4 + s5) +
                                   mb * (-4 * s3 + 7 * s4 - 3 * s5) + yb * (10 * s3 - 15 * s4 + 6 * s5);
                const double der = (ya * (-30 * s2 + 60 * s3 - 30 * s4) + ma * (1 - 18 * s2 + 32 * s3 - 15 * s4) +
                                    ca * 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4) +
                                    cb * 0.5 * (3 * s2 - 8 * s3 + 5 * s4) + mb * (-12 * s2 + 28 * s3 - 15 * s4) +
                                    yb * (30 * s2 - 60 * s3 + 30 * s4)) /
                                   h;
                return {val, der};
            }
            const double val = (2 * s3 - 3 * s2 + 1) * ya + (s3 - 2 * s2 + s) * ma + (-2 * s3 + 3 * s2) * yb +
                               (s3 - s2) * mb;
            const double der = ((6 * s2 - 6 * s) * ya + (3 * s2 - 4 * s + 1) * ma + (-6 * s2 + 6 * s) * yb +
                                (3 * s2 - 2 * s) * mb) /
                               h;
            return {val, der};
        };
        auto weight = [&](double r) { return r > 0.0 ? std::exp(nm1 * profile.log_psi(r) - log_scale) : 0.0; };
        gradient += boost::math::quadrature::gauss<double, 10>::integrate(
            [&](double r) {
                const double d = sample(r).second;
                return d * d * weight(r);
            },
            a, b);
        potential += boost::math::quadrature::gauss<double, 10>::integrate(
            [&](double r) {
                const double c = sample(r).first;
                return std::exp(base.u(r)) * c * c * weight(r);
            },
            a, b);
    }
    return {gradient, potential, log_scale};
}

double quadratic_form(const WarpProfile& profile, const RadialSolution& base, const TestFunction& chi)
{
    return quadratic_form_parts(profile, base, chi).value();
}

}  // namespace gelfand
