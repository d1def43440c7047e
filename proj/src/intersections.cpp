#include "gelfand/intersections.hpp"

#include "gelfand/csv.hpp"
#include "gelfand/errors.hpp"
#include "gelfand/radial_ode.hpp"
#include "gelfand/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gelfand {

namespace {

constexpr double tangency_level = 1e-10;
constexpr double interpolant_noise = 1e-7;

void append_nodes(std::vector<double>& grid, const RadialTrajectory& traj, double r_lo, double r_max)
{
    for (const auto& n : traj.nodes()) {
        if (n.r >= r_lo && n.r <= r_max) {
            grid.push_back(n.r);
        }
    }
}

}  // namespace

IntersectionReport find_intersections(const RadialSolution& sol_a, const RadialSolution& sol_b, double r_max)
{
    if (sol_a.alpha() == sol_b.alpha()) {
        throw std::invalid_argument("intersections need distinct initial heights");
    }
    if (sol_a.dimension() != sol_b.dimension() || !sol_a.profile().same_model(sol_b.profile())) {
        throw std::invalid_argument("intersections need solutions on the same model and dimension");
    }
    const RadialSolution& hi = sol_a.alpha() > sol_b.alpha() ? sol_a : sol_b;
    const RadialSolution& lo = sol_a.alpha() > sol_b.alpha() ? sol_b : sol_a;
    if (!(r_max > 0.0) || r_max > std::min(hi.r_max(), lo.r_max()) * (1.0 + 1e-12)) {
        throw RangeMismatch("both solutions must be integrated past r_max");
    }
    r_max = std::min({r_max, hi.r_max(), lo.r_max()});

    const auto& base = lo.trajectory();
    const double r0 = std::max(hi.trajectory().r_begin(), base.r_begin());
    if (!(r_max > r0)) {
        throw RangeMismatch("r_max lies inside the series region");
    }

    // d = u_hi - u_lo solves d'' + (N-1)(psi'/psi) d' + e^{u_lo} (e^d - 1) = 0
    RadialOptions ro;
    ro.rtol = std::min(hi.tol(), lo.tol());
    ro.atol = ro.rtol * 1e-30;
    ro.log_switch = base.log_switch();
    auto forcing = [&base](double r, double d) { return std::exp(base.value(r)) * std::expm1(d); };
    const auto s_hi = hi.trajectory().eval(r0);
    const auto s_lo = base.eval(r0);
    auto nodes = integrate_radial(lo.profile(), lo.dimension(), forcing,
                                  RadialStart{r0, s_hi.y - s_lo.y, s_hi.y1 - s_lo.y1}, r_max, ro);
    const RadialNode origin{0.0, hi.alpha() - lo.alpha(), 0.0, -(std::exp(hi.alpha()) - std::exp(lo.alpha())) /
                                                                   lo.dimension()};
    const RadialTrajectory diff(origin, std::move(nodes), ro.log_switch);
    auto d = [&diff](double r) { return diff.value(r); };

    std::vector<double> grid;
    append_nodes(grid, diff, r0, r_max);
    append_nodes(grid, hi.trajectory(), r0, r_max);
    append_nodes(grid, base, r0, r_max);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> merged;
    merged.reserve(2 * grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0) {
            merged.push_back(0.5 * (grid[i - 1] + grid[i]));
        }
        merged.push_back(grid[i]);
    }

    IntersectionReport report{hi.alpha(), lo.alpha(), r_max, {}, {}, std::numeric_limits<double>::infinity(), true};
    std::vector<double> values(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        values[i] = d(merged[i]);
        report.min_difference = std::min(report.min_difference, values[i]);
        const double gap = hi.u(merged[i]) - lo.u(merged[i]);
        if (std::abs(gap) > interpolant_noise && (gap > 0.0) != (values[i] > 0.0)) {
            report.interpolant_agreement = false;
        }
    }
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const double a = merged[i];
        const double b = merged[i + 1];
        const double fa = values[i];
        const double fb = values[i + 1];
        if ((fa > 0.0 && fb <= 0.0) || (fa < 0.0 && fb >= 0.0)) {
            const double tol = std::max(tangency_level, 8.0 * std::numeric_limits<double>::epsilon() * b);
            const double root = refine_root(d, a, b, fa, fb, tol);
            if (report.crossings.empty() || root > report.crossings.back()) {
                report.crossings.push_back(root);
            }
            continue;
        }
        if (i > 0 && std::abs(fa) < tangency_level && std::abs(fa) <= std::abs(values[i - 1]) &&
            std::abs(fa) <= std::abs(fb) && (values[i - 1] > 0.0) == (fb > 0.0)) {
            report.tangencies.push_back(a);
        }
    }
    return report;
}

void write_crossings_csv(std::ostream& out, const std::vector<IntersectionReport>& reports)
{
    out << "alpha,beta,k,crossing_r\n";
    for (const auto& rep : reports) {
        for (std::size_t k = 0; k < rep.crossings.size(); ++k) {
            out << fmt17(rep.alpha) << ',' << fmt17(rep.beta) << ',' << k + 1 << ',' << fmt17(rep.crossings[k])
                << '\n';
        }
    }
}

void write_intersection_summary_csv(std::ostream& out, const std::vector<IntersectionReport>& reports)
{
    out << "alpha,beta,crossings,tangencies,min_difference\n";
    for (const auto& rep : reports) {
        out << fmt17(rep.alpha) << ',' << fmt17(rep.beta) << ',' << rep.crossings.size() << ','
            << rep.tangencies.size() << ',' << fmt17(rep.min_difference) << '\n';
    }
}

}  // namespace gelfand
