#pragma once

#include "gelfand/profile.hpp"
#include "gelfand/trajectory.hpp"

#include <iosfwd>
#include <vector>

namespace gelfand {

struct SolverOptions {
    /// Taylor handoff radius.
    double eps = 1e-6;
    double tol = 1e-10;
    double log_switch = 1e3;
};

/// Regular-series state at the handoff radius for the IVP and its variation.
struct TaylorState {
    double u;
    double u1;
    double v;
    double v1;
};

/// Node record of a radial solution: radius, u, u', Lyapunov value.
struct SolutionNode {
    double r;
    double u;
    double u1;
    double F;
};

/// Radial solution of -Delta_g u = e^u with u(0) = alpha, u'(0) = 0.
class RadialSolution {
public:
    RadialSolution(double alpha, int dimension, WarpProfile profile, RadialTrajectory trajectory,
                   double tol);

    double alpha() const { return alpha_; }
    int dimension() const { return dimension_; }
    const WarpProfile& profile() const { return profile_; }
    const RadialTrajectory& trajectory() const { return trajectory_; }
    double r_max() const { return trajectory_.r_end(); }
    double tol() const { return tol_; }

    double u(double r) const { return trajectory_.value(r); }
    double u1(double r) const { return trajectory_.eval(r).y1; }
    /// F = (u')^2 / 2 + e^u.
    double lyapunov(double r) const;

    std::vector<SolutionNode> nodes() const;
    /// Nodes with r > 0 where u' >= 0 (expected zero).
    int monotonicity_violations() const { return monotonicity_violations_; }

private:
    double alpha_;
    int dimension_;
    WarpProfile profile_;
    RadialTrajectory trajectory_;
    double tol_;
    int monotonicity_violations_ = 0;
};

/// Variational solution v = du/dalpha along a base solution.
class LinearizedSolution {
public:
    LinearizedSolution(double alpha, int dimension, WarpProfile profile, RadialTrajectory trajectory);

    double alpha() const { return alpha_; }
    int dimension() const { return dimension_; }
    const WarpProfile& profile() const { return profile_; }
    const RadialTrajectory& trajectory() const { return trajectory_; }
    double r_max() const { return trajectory_.r_end(); }

    double v(double r) const { return trajectory_.value(r); }
    double v1(double r) const { return trajectory_.eval(r).y1; }

private:
    double alpha_;
    int dimension_;
    WarpProfile profile_;
    RadialTrajectory trajectory_;
};

TaylorState taylor_init(const WarpProfile& profile, int dimension, double alpha, double eps);

RadialSolution integrate_ivp(const WarpProfile& profile, int dimension, double alpha, double r_max,
                             double tol, const SolverOptions& opts = {});

LinearizedSolution integrate_linearized(const RadialSolution& base, double tol);

struct BlowupSample {
    double s;
    double v;
    double v1;
};

/// Rescaled solution v(s) = u(lambda s) + 2 log(lambda) with u(0) = log(e / lambda^2).
struct BlowupTrajectory {
    double lambda;
    double alpha;
    RadialSolution solution;
    std::vector<BlowupSample> samples;

    BlowupSample at(double s) const;
};

BlowupTrajectory blowup_rescale(const WarpProfile& profile, int dimension, double lambda, double S,
                                double tol, const SolverOptions& opts = {});

/// CSV with header r,u,u1,F (and v,v1 when lin is given), 17 significant digits.
void write_trajectory_csv(std::ostream& out, const RadialSolution& sol,
                          const LinearizedSolution* lin = nullptr);

namespace detail {

/// Coefficients of y = 1 + b2 r^2 + b4 r^4 + bk r^k for
/// y'' + (N-1)(psi'/psi) y' + m0 (1 + kappa r^2) y = 0, y(0) = 1.
struct LinearSeries {
    double b2;
    double b4;
    double bk;
    double k;

    double value(double r) const;
    double slope(double r) const;
};

LinearSeries linear_series(const WarpProfile& profile, int dimension, double m0, double kappa);

}  // namespace detail

}  // namespace gelfand
