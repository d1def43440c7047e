#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gelfand {

enum class ProfileKind { Euclidean, Hyperbolic, PolyExp, Spliced };

/// psi and its first three derivatives at one radius.
struct ProfileValues {
    double psi = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    std::optional<double> psi3;  // absent where psi''' is singular
};

/// Leading behaviour psi'/psi - 1/r ~ coefficient * r^power as r -> 0+.
struct OriginSeries {
    double coefficient = 0.0;
    double power = 1.0;
};

/// Outcome of the numerical checks of (A1)..(A5); index 0 holds (A1).
struct AssumptionFlags {
    std::array<bool, 5> holds{};

    bool a1() const { return holds[0]; }
    bool a2() const { return holds[1]; }
    bool a3() const { return holds[2]; }
    bool a4() const { return holds[3]; }
    bool a5() const { return holds[4]; }
};

struct AssumptionCheck {
    bool passed = true;
    std::optional<double> first_violation;
    std::string note;
};

struct AssumptionReport {
    std::array<AssumptionCheck, 5> checks;

    AssumptionFlags flags() const;
    bool all_passed() const;
};

enum class TailClass { Integrable, NonIntegrable };

/// Warping function of a Riemannian model g = dr^2 + psi(r)^2 dw^2.
///
/// Values are immutable after construction. Internally every kind is
/// evaluated through log(psi) and the ratios psi^(k)/psi so that profiles
/// growing like exp(r^a) stay finite far beyond the overflow radius of psi.
class WarpProfile {
public:
    static WarpProfile euclidean();
    static WarpProfile hyperbolic();
    /// psi(r) = r exp(r^(2 gamma)), gamma > 1/2.
    static WarpProfile polyexp(double gamma);

    ProfileKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    double exponent() const { return a_; }
    double splice_radius() const { return r0_; }
    double blend_width() const { return r1_ - r0_; }
    double tail_constant() const { return tail_c_; }

    /// Limit of psi'/psi at infinity; +inf for the unbounded-curvature kinds.
    double lambda_limit() const;

    /// Canonical text form, parseable by parse_profile.
    std::string spec() const;

    ProfileValues eval(double r) const;
    double log_psi(double r) const;
    double log_psi1(double r) const;
    /// psi'/psi.
    double log_derivative(double r) const;
    /// psi''/psi.
    double second_ratio(double r) const;
    /// d/dr (psi'/psi).
    double log_derivative_slope(double r) const;
    /// psi'''/psi' - (psi''/psi')^2, i.e. [log psi']''.
    double a5_margin(double r) const;

    OriginSeries origin_series() const;
    /// Radii where the profile definition changes piece; quadrature splits there.
    std::vector<double> breakpoints() const;

    const std::optional<AssumptionFlags>& assumption_flags() const { return flags_; }
    /// Copy carrying the outcome of a check_assumptions run.
    WarpProfile with_flags(const AssumptionFlags& flags) const;

    bool same_model(const WarpProfile& other) const;

private:
    friend WarpProfile make_spliced_profile(double a, double r0);

    struct Ratios {
        double log_psi;
        double q1;  // psi'/psi
        double q2;  // psi''/psi
        double q3;  // psi'''/psi
    };

    Ratios ratios(double r) const;
    Ratios blend_ratios(double r) const;
    std::array<double, 4> blend_derivatives(double r) const;

    ProfileKind kind_ = ProfileKind::Euclidean;
    double gamma_ = 0.0;
    double a_ = 0.0;
    double r0_ = 0.0;
    double r1_ = 0.0;
    double tail_c_ = 0.0;
    double log_tail_c_ = 0.0;
    std::array<double, 6> blend_{};  // power-basis coefficients in t = (r - r0) / (r1 - r0)
    std::optional<AssumptionFlags> flags_;
};

ProfileValues eval_profile(const WarpProfile& profile, double r);

/// psi'/psi for r > 0, using the origin series below r = 1e-4.
double log_derivative(const WarpProfile& profile, double r);

/// Integral of psi/psi' over [0, r] by adaptive Gauss-Kronrod quadrature.
double psi_ratio_integral(const WarpProfile& profile, double r);

/// Cumulative psi_ratio_integral at each radius of a nondecreasing sequence.
std::vector<double> psi_ratio_cumulative(const WarpProfile& profile,
                                         std::span<const double> radii);

/// Integrability of psi/psi' at infinity, decided analytically per kind.
TailClass classify_tail(const WarpProfile& profile);

AssumptionReport check_assumptions(const WarpProfile& profile, std::span<const double> grid);

/// sinh r on [0, r0], c exp(r^a) beyond r0 + delta, quintic blend in between.
WarpProfile make_spliced_profile(double a, double r0);

/// Parses "euclidean", "hyperbolic", "polyexp:<gamma>" or "spliced:<a>:<r0>".
WarpProfile parse_profile(std::string_view text);

std::string to_string(ProfileKind kind);
std::string to_string(TailClass tail);

}  // namespace gelfand
