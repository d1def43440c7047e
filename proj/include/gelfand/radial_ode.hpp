#pragma once

#include "gelfand/dopri.hpp"
#include "gelfand/errors.hpp"
#include "gelfand/profile.hpp"
#include "gelfand/trajectory.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace gelfand {

struct RadialOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    /// Radius beyond which steps are taken in t = log r.
    double log_switch = 1e3;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 20'000'000;
};

struct RadialStart {
    double r;
    double y;
    double y1;
};

/// Integrates y'' + (N-1)(psi'/psi) y' + g(r, y) = 0 from start.r to r_end.
///
/// accept(prev, next) may veto an accepted step (the step is retried with
/// half the size); stop(prev, next) ends the integration after next is
/// stored. Returns every accepted node, the start node first.
template <class Forcing, class Accept, class Stop>
std::vector<RadialNode> integrate_radial(const WarpProfile& profile, int dimension, Forcing&& g,
                                         RadialStart start, double r_end, const RadialOptions& opts,
                                         Accept&& accept, Stop&& stop)
{
    using S = ode::State<2>;
    const double nm1 = dimension - 1.0;

    auto second = [&](double r, double y, double y1) { return -nm1 * profile.log_derivative(r) * y1 - g(r, y); };
    auto rhs_r = [&](double r, const S& s) -> S { return {s[1], second(r, s[0], s[1])}; };
    auto rhs_t = [&](double t, const S& s) -> S {
        const double r = std::exp(t);
        const double damping = nm1 * r * profile.log_derivative(r);
        return {s[1], s[1] - damping * s[1] - r * r * g(r, s[0])};
    };

    std::vector<RadialNode> nodes;
    double r = start.r;
    nodes.push_back({r, start.y, start.y1, second(r, start.y, start.y1)});
    if (!(r_end > r)) {
        return nodes;
    }

    bool log_mode = r >= opts.log_switch;
    double h = log_mode ? 0.01 : std::min(0.1 * std::max(r, 1e-8), r_end - r);
    bool have_k1 = false;
    S k1{};
    long steps = 0;

    while (r < r_end) {
        if (++steps > opts.max_steps) {
            throw StepUnderflow("step budget exhausted at r = " + std::to_string(r));
        }
        const RadialNode& prev = nodes.back();

        if (!log_mode) {
            bool to_switch = false;
            bool to_end = false;
            double h_try = std::min(h, opts.max_step);
            if (r + h_try >= r_end) {
                h_try = r_end - r;
                to_end = true;
            }
            if (r < opts.log_switch && r + h_try >= opts.log_switch && opts.log_switch < r_end) {
                h_try = opts.log_switch - r;
                to_switch = true;
                to_end = false;
            }
            if (h_try < 1e-14 * std::max(r, 1e-300)) {
                throw StepUnderflow("step size underflow at r = " + std::to_string(r));
            }
            const S s{prev.y, prev.y1};
            if (!have_k1) {
                k1 = rhs_r(r, s);
                have_k1 = true;
            }
            const auto step = ode::dopri_step<2>(rhs_r, r, s, k1, h_try, opts.rtol, opts.atol);
            if (step.error > 1.0) {
                h = h_try * ode::step_factor(step.error);
                continue;
            }
            const double r_next = to_end ? r_end : (to_switch ? opts.log_switch : r + h_try);
            const RadialNode next{r_next, step.y[0], step.y[1], step.dy[1]};
            if (!accept(prev, next)) {
                h = 0.5 * h_try;
                continue;
            }
            nodes.push_back(next);
            k1 = step.dy;
            r = r_next;
            if (stop(nodes[nodes.size() - 2], nodes.back())) {
                break;
            }
            h = h_try * ode::step_factor(step.error);
            if (to_switch) {
                log_mode = true;
                h = h / r;
                have_k1 = false;
            }
        } else {
            const double t = std::log(r);
            const double t_end = std::log(r_end);
            bool to_end = false;
            double h_try = h;
            if (opts.max_step < std::numeric_limits<double>::infinity()) {
                h_try = std::min(h_try, std::log1p(opts.max_step / r));
            }
            if (t + h_try >= t_end) {
                h_try = t_end - t;
                to_end = true;
            }
            if (h_try < 1e-14) {
                throw StepUnderflow("step size underflow at r = " + std::to_string(r));
            }
            const S s{prev.y, prev.r * prev.y1};
            if (!have_k1) {
                k1 = rhs_t(t, s);
                have_k1 = true;
            }
            const auto step = ode::dopri_step<2>(rhs_t, t, s, k1, h_try, opts.rtol, opts.atol);
            if (step.error > 1.0) {
                h = h_try * ode::step_factor(step.error);
                continue;
            }
            const double r_next = to_end ? r_end : std::exp(t + h_try);
            const double y1 = step.y[1] / r_next;
            const RadialNode next{r_next, step.y[0], y1, second(r_next, step.y[0], y1)};
            if (!accept(prev, next)) {
                h = 0.5 * h_try;
                continue;
            }
            nodes.push_back(next);
            k1 = step.dy;
            r = r_next;
            if (stop(nodes[nodes.size() - 2], nodes.back())) {
                break;
            }
            h = h_try * ode::step_factor(step.error);
        }
    }
    return nodes;
}

template <class Forcing>
std::vector<RadialNode> integrate_radial(const WarpProfile& profile, int dimension, Forcing&& g,
                                         RadialStart start, double r_end, const RadialOptions& opts)
{
    return integrate_radial(
        profile, dimension, std::forward<Forcing>(g), start, r_end, opts,
        [](const RadialNode&, const RadialNode&) { return true; },
        [](const RadialNode&, const RadialNode&) { return false; });
}

}  // namespace gelfand
