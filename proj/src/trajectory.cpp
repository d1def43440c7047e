#include "gelfand/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gelfand {

namespace {

struct Hermite {
    double value;
    double slope;
};

Hermite cubic_hermite(double x0, double x1, double y0, double m0, double y1, double m1, double x)
{
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double value = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * y1 +
                         (s3 - s2) * h * m1;
    const double slope = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * m0 + (-6 * s2 + 6 * s) * y1 +
                          (3 * s2 - 2 * s) * h * m1) /
                         h;
    return {value, slope};
}

}  // namespace

RadialTrajectory::RadialTrajectory(RadialNode origin, std::vector<RadialNode> nodes, double log_switch)
    : origin_(origin), nodes_(std::move(nodes)), log_switch_(log_switch)
{
    if (nodes_.empty()) {
        throw std::invalid_argument("trajectory needs at least one node");
    }
}

RadialTrajectory::Sample RadialTrajectory::eval_segment(const RadialNode& a, const RadialNode& b,
                                                        double r) const
{
    if (a.r >= log_switch_ && a.r > 0.0) {
        const double ta = std::log(a.r);
        const double tb = std::log(b.r);
        const double t = std::log(r);
        const double wa = a.r * a.y1;
        const double wb = b.r * b.y1;
        const auto y = cubic_hermite(ta, tb, a.y, wa, b.y, wb, t);
        const auto w = cubic_hermite(ta, tb, wa, wa + a.r * a.r * a.y2, wb, wb + b.r * b.r * b.y2, t);
        return {y.value, w.value / r};
    }
    const auto y = cubic_hermite(a.r, b.r, a.y, a.y1, b.y, b.y1, r);
    const auto y1 = cubic_hermite(a.r, b.r, a.y1, a.y2, b.y1, b.y2, r);
    return {y.value, y1.value};
}

RadialTrajectory::Sample RadialTrajectory::eval(double r) const
{
    const double end = nodes_.back().r;
    if (!(r >= 0.0) || r > end * (1.0 + 1e-12)) {
        throw std::out_of_range("trajectory evaluated outside [0, r_end]");
    }
    r = std::min(r, end);
    if (r < nodes_.front().r) {
        return eval_segment(origin_, nodes_.front(), r);
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r,
                               [](double x, const RadialNode& n) { return x < n.r; });
    if (it == nodes_.end()) {
        return {nodes_.back().y, nodes_.back().y1};
    }
    const auto& b = *it;
    const auto& a = *(it - 1);
    if (r == a.r) {
        return {a.y, a.y1};
    }
    return eval_segment(a, b, r);
}

}  // namespace gelfand
