#include "gelfand/asymptotics.hpp"

#include "gelfand/errors.hpp"

#include <cmath>
#include <limits>

namespace gelfand {

namespace {

void require_divergent(const WarpProfile& profile)
{
    if (classify_tail(profile) == TailClass::Integrable) {
        throw DomainError("rates are defined only when psi/psi' is not integrable");
    }
}

void require_in_range(const RadialSolution& sol, double r)
{
    if (!(r > 0.0) || r > sol.r_max() * (1.0 + 1e-12)) {
        throw std::out_of_range("radius outside the integrated range");
    }
}

RateProbe probe_at(const RadialSolution& sol, const WarpProfile& profile, double r, double integral)
{
    const double u = sol.u(r);
    RateProbe p{r, std::exp(-u - std::log(integral)), u / std::log(integral), std::nullopt};
    if (std::isfinite(profile.lambda_limit())) {
        p.rate_logr = u / std::log(r);
    }
    return p;
}

/// Cauchy-tail estimate of the remaining drop of u past r_max, from a power
/// law fitted to |u'| over the last decade.
double tail_bound(const RadialSolution& sol)
{
    const double r_max = sol.r_max();
    const double d_end = std::abs(sol.u1(r_max));
    if (d_end == 0.0) {
        return 0.0;
    }
    const double d_start = std::abs(sol.u1(r_max / 10.0));
    const double k = std::log(d_start / d_end) / std::log(10.0);
    if (!(k > 1.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return d_end * r_max / (k - 1.0);
}

}  // namespace

std::string to_string(LimitKind kind)
{
    return kind == LimitKind::FiniteLimit ? "FiniteLimit" : "LogDivergence";
}

double decay_ratio(const RadialSolution& sol, const WarpProfile& profile, double r)
{
    require_divergent(profile);
    require_in_range(sol, r);
    return std::exp(-sol.u(r) - std::log(psi_ratio_integral(profile, r)));
}

LogRate log_rate(const RadialSolution& sol, const WarpProfile& profile, double r)
{
    require_divergent(profile);
    require_in_range(sol, r);
    const double integral = psi_ratio_integral(profile, r);
    if (!(integral > std::exp(1.0))) {
        throw DomainError("log rate needs int_0^r psi/psi' > e");
    }
    const auto p = probe_at(sol, profile, r, integral);
    return {p.rate, p.rate_logr};
}

std::vector<RateProbe> tail_probes(const RadialSolution& sol, const WarpProfile& profile)
{
    require_divergent(profile);
    constexpr int count = 32;
    const double r_max = sol.r_max();
    double r_lo = r_max > 1.0 ? std::pow(r_max, 0.75) : 0.5 * r_max;
    // the rate needs log(int psi/psi') > 1
    while (r_lo < r_max && psi_ratio_integral(profile, r_lo) <= std::exp(1.0)) {
        r_lo = std::sqrt(r_lo * r_max) * 1.0001;
    }
    std::vector<double> radii(count);
    for (int i = 0; i < count; ++i) {
        radii[i] = r_lo * std::pow(r_max / r_lo, i / (count - 1.0));
    }
    radii.back() = r_max;
    const auto integrals = psi_ratio_cumulative(profile, radii);
    std::vector<RateProbe> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        if (integrals[i] > std::exp(1.0)) {
            out.push_back(probe_at(sol, profile, radii[i], integrals[i]));
        }
    }
    return out;
}

double extrapolate_rate(const RadialSolution& sol, const std::vector<RateProbe>& probes)
{
    if (probes.size() < 2) {
        throw InsufficientRange("extrapolation needs at least two probes");
    }
    // rate is fitted as a + b x with x = 1 / log(int psi/psi') = rate / u
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : probes) {
        const double x = p.rate / sol.u(p.r);
        sx += x;
        sy += p.rate;
        sxx += x * x;
        sxy += x * p.rate;
    }
    const double n = static_cast<double>(probes.size());
    const double det = n * sxx - sx * sx;
    if (det == 0.0) {
        return sy / n;
    }
    return (sxx * sy - sx * sxy) / det;
}

AsymptoticReport classify_limit(const RadialSolution& sol, const WarpProfile& profile)
{
    const double r_max = sol.r_max();
    const double slope = std::abs(sol.u1(r_max));
    if (!(slope < 1e-4)) {
        throw InsufficientRange("|u'(r_max)| = " + std::to_string(slope) + " is not below 1e-4");
    }
    AsymptoticReport report{};
    if (classify_tail(profile) == TailClass::Integrable) {
        report.limit_kind = LimitKind::FiniteLimit;
        report.limit_value = sol.u(r_max);
        report.tail_bound = tail_bound(sol);
        return report;
    }
    report.limit_kind = LimitKind::LogDivergence;
    report.tail = tail_probes(sol, profile);
    if (report.tail.size() >= 2) {
        report.extrapolated_rate = extrapolate_rate(sol, report.tail);
    }
    return report;
}

}  // namespace gelfand
