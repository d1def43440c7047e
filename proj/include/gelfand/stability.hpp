#pragma once

#include "gelfand/profile.hpp"
#include "gelfand/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gelfand {

/// Sign changes of the linearized solution. Near-zeros without a sign change
/// are listed in tangencies and otherwise ignored.
struct ZeroSearch {
    std::optional<double> radius;
    std::vector<double> tangencies;
};

ZeroSearch find_first_zero(const LinearizedSolution& lin);

std::optional<double> first_zero(const LinearizedSolution& lin);

enum class Decision { UnstableAt, StableUpTo };

struct WeightedEigenvalue {
    double R;
    double value;
};

struct StabilityVerdict {
    double alpha = 0.0;
    Decision decision = Decision::StableUpTo;
    /// r_star for UnstableAt, r_max for StableUpTo.
    double radius = 0.0;
    std::optional<WeightedEigenvalue> weighted_eig;
    bool method_agreement = true;
    /// Normalized quadratic form of the extended eigenfunction (UnstableAt only).
    std::optional<double> certificate;
    std::vector<double> tangencies;

    bool stable() const { return decision == Decision::StableUpTo; }
};

struct StabilityOptions {
    /// Also compute the weighted ball eigenvalue and compare with the verdict.
    bool cross_check = true;
    SolverOptions solver;
};

StabilityVerdict stability_test(const WarpProfile& profile, int dimension, double alpha, double r_max,
                                double tol, const StabilityOptions& opts = {});

/// Dirichlet eigenvalue of the radial Laplacian on B_R by shooting.
double ball_eigenvalue(const WarpProfile& profile, int dimension, double R, double tol);

enum class WeightMode {
    Solution,  // e^{u(r)}
    Frozen,    // e^{u(0)}
};

/// Smallest mu with a Dirichlet solution of phi'' + (N-1)(psi'/psi)phi' + mu w phi = 0 on B_R.
double weighted_ball_eigenvalue(const RadialSolution& base, double R, double tol,
                                WeightMode mode = WeightMode::Solution);

double weighted_ball_eigenvalue(const WarpProfile& profile, int dimension, double alpha, double R,
                                double tol);

/// lambda_1(M) from ball eigenvalues, extrapolated in 1/R through the two largest radii.
struct SpectrumEstimate {
    double value;
    double uncertainty;
    std::vector<double> radii;
    std::vector<double> ball_values;
};

SpectrumEstimate estimate_bottom_spectrum(const WarpProfile& profile, int dimension,
                                          std::vector<double> radii = {10.0, 20.0, 40.0},
                                          double tol = 1e-10);

struct ThresholdResult {
    double eta_hat;
    double tol_alpha;
    double alpha_lo;
    double alpha_hi;
    StabilityVerdict stable_witness;
    StabilityVerdict unstable_witness;
    /// Every verdict computed, sorted by alpha.
    std::vector<StabilityVerdict> probes;
};

struct ThresholdOptions {
    int grid_points = 9;
    double tol = 1e-10;
};

ThresholdResult threshold_eta(const WarpProfile& profile, int dimension, double alpha_lo, double alpha_hi,
                              double r_max, double tol_alpha, const ThresholdOptions& opts = {});

/// Radial test function sampled at increasing radii. With empty slopes the
/// function is piecewise linear, with slopes cubic Hermite, and with slopes
/// and second derivatives quintic Hermite.
struct TestFunction {
    std::vector<double> r;
    std::vector<double> value;
    std::vector<double> slope;
    std::vector<double> second;
};

struct QuadraticForm {
    /// int (chi')^2 psi^(N-1) and int e^u chi^2 psi^(N-1), both divided by exp(log_scale).
    double gradient;
    double potential;
    double log_scale;

    double value() const;
    /// (gradient - potential) / potential, scale free.
    double normalized() const;
};

QuadraticForm quadratic_form_parts(const WarpProfile& profile, const RadialSolution& base,
                                   const TestFunction& chi);

double quadratic_form(const WarpProfile& profile, const RadialSolution& base, const TestFunction& chi);

std::string to_string(Decision decision);

}  // namespace gelfand
