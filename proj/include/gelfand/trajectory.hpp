#pragma once

#include <span>
#include <vector>

namespace gelfand {

/// Accepted integrator node of a radial second-order equation.
struct RadialNode {
    double r;
    double y;
    double y1;  // dy/dr
    double y2;  // d2y/dr2 from the equation
};

/// Dense output over accepted nodes.
///
/// Segments starting below the log-radius switch are cubic Hermite in r;
/// segments beyond it are cubic Hermite in t = log r for (y, r y'), which
/// keeps the interpolant accurate on the long geometric steps used there.
/// The interval between the pole and the first node is covered by an
/// origin node (r = 0, y0, y' = 0, y''(0)).
class RadialTrajectory {
public:
    struct Sample {
        double y;
        double y1;
    };

    RadialTrajectory() = default;
    RadialTrajectory(RadialNode origin, std::vector<RadialNode> nodes, double log_switch);

    Sample eval(double r) const;
    double value(double r) const { return eval(r).y; }

    std::span<const RadialNode> nodes() const { return nodes_; }
    const RadialNode& origin() const { return origin_; }
    double r_begin() const { return nodes_.front().r; }
    double r_end() const { return nodes_.back().r; }
    double log_switch() const { return log_switch_; }
    bool empty() const { return nodes_.empty(); }

private:
    Sample eval_segment(const RadialNode& a, const RadialNode& b, double r) const;

    RadialNode origin_{};
    std::vector<RadialNode> nodes_;
    double log_switch_ = 1e3;
};

}  // namespace gelfand
