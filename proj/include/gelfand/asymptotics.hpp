#pragma once

#include "gelfand/profile.hpp"
#include "gelfand/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gelfand {

enum class LimitKind { FiniteLimit, LogDivergence };

/// Rates at one tail radius. rate_logr is present when psi'/psi has a finite limit.
struct RateProbe {
    double r;
    double ratio;  // e^{-u} / int_0^r psi/psi'
    double rate;   // u / log(int_0^r psi/psi')
    std::optional<double> rate_logr;
};

struct AsymptoticReport {
    LimitKind limit_kind;
    std::optional<double> limit_value;
    /// Estimated remaining drop of u beyond r_max (FiniteLimit only).
    double tail_bound = 0.0;
    std::vector<RateProbe> tail;
    /// Heuristic: rate extrapolated linearly in 1 / log(int psi/psi').
    std::optional<double> extrapolated_rate;
};

AsymptoticReport classify_limit(const RadialSolution& sol, const WarpProfile& profile);

double decay_ratio(const RadialSolution& sol, const WarpProfile& profile, double r);

struct LogRate {
    double rate;
    std::optional<double> rate_logr;
};

LogRate log_rate(const RadialSolution& sol, const WarpProfile& profile, double r);

/// 32 geometric probes over the last quarter of the log-radius range.
std::vector<RateProbe> tail_probes(const RadialSolution& sol, const WarpProfile& profile);

/// Least-squares intercept of rate against 1 / log(int psi/psi') over the probes.
double extrapolate_rate(const RadialSolution& sol, const std::vector<RateProbe>& probes);

std::string to_string(LimitKind kind);

}  // namespace gelfand
