#pragma once

#include "gelfand/profile.hpp"
#include "gelfand/solver.hpp"

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace gelfand {

struct EmdenSample {
    double r;
    double v;  // u + 2 log psi - log(2(N-2))
    double V;  // 2 log psi'
};

struct EmdenTransform {
    std::vector<EmdenSample> samples;
    /// Largest residual of the transformed equation relative to the size of its terms.
    double max_relative_residual = 0.0;
    bool residual_ok = true;

    /// max over samples of v - V; negative when the barrier holds everywhere.
    double max_barrier_gap() const;
};

/// Transform on the solution's nodes with r > 0.
EmdenTransform emden_transform(const RadialSolution& sol);

enum class RootClass { ComplexFocus, RealDegenerate, RealNode };

/// Roots of lambda^2 + (N-2) lambda + 2(N-2).
struct SpectralSummary {
    int N;
    std::complex<double> roots[2];
    /// (N-2)(N-10).
    double discriminant;
    RootClass classification;
};

SpectralSummary char_roots(int N);

struct PhaseState {
    double t;
    double y;  // dz/dt
    double z;
};

struct PhasePoint {
    double t;
    double y;
    double z;
    double angle_cum;
};

struct PhaseTrajectory {
    int N;
    std::vector<PhasePoint> points;

    /// Completed turns of (y, z) around the origin.
    int turns() const;
    /// Least-squares slope of log|z| against t over [t_from, t_to].
    double decay_rate(double t_from, double t_to) const;
    /// Cubic Hermite value of z at t.
    double z_at(double t) const;
};

/// y' = -(N-2) y - 2(N-2)(e^z - 1), z' = y from start.t to t_end.
PhaseTrajectory integrate_autonomous(int N, PhaseState start, double t_end, double tol);

/// Phase state at radius r of a Euclidean solution: z = u + 2 log r - log(2(N-2)), y = r u' + 2.
PhaseState phase_state(const RadialSolution& sol, double r);

/// L Z / Z for Z = psi^lambda with lambda the more negative root of the
/// characteristic polynomial (N >= 10), evaluated term by term and in
/// closed form lambda psi''/psi.
struct BarrierOperator {
    double r;
    double direct;
    double closed_form;
};

BarrierOperator barrier_operator(const WarpProfile& profile, int N, double r);

void write_phase_csv(std::ostream& out, const PhaseTrajectory& traj);

std::string to_string(RootClass c);

}  // namespace gelfand
