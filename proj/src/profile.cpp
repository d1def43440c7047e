#include "gelfand/profile.hpp"

#include "gelfand/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gelfand {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesCutoff = 1e-4;
constexpr double kBoundaryTol = 1e-8;

double log_sinh(double r)
{
    if (r > 20.0) {
        return r - std::log(2.0) + std::log1p(-std::exp(-2.0 * r));
    }
    return std::log(std::sinh(r));
}

double coth(double r)
{
    if (r < kSeriesCutoff) {
        return 1.0 / r + r / 3.0;
    }
    return 1.0 / std::tanh(r);
}

double sech2(double r)
{
    const double e = std::exp(-2.0 * r);
    return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

std::string format_number(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) {
        throw std::runtime_error("number formatting failed");
    }
    return std::string(buf, end);
}

double parse_number(std::string_view text, std::string_view what)
{
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw InvalidProfile("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

AssumptionFlags AssumptionReport::flags() const
{
    AssumptionFlags f;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        f.holds[i] = checks[i].passed;
    }
    return f;
}

bool AssumptionReport::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

WarpProfile WarpProfile::euclidean()
{
    WarpProfile p;
    p.kind_ = ProfileKind::Euclidean;
    return p;
}

WarpProfile WarpProfile::hyperbolic()
{
    WarpProfile p;
    p.kind_ = ProfileKind::Hyperbolic;
    return p;
}

WarpProfile WarpProfile::polyexp(double gamma)
{
    if (!(gamma > 0.5) || !std::isfinite(gamma)) {
        throw InvalidProfile("polyexp profile needs gamma > 1/2, got " + format_number(gamma));
    }
    WarpProfile p;
    p.kind_ = ProfileKind::PolyExp;
    p.gamma_ = gamma;
    return p;
}

double WarpProfile::lambda_limit() const
{
    switch (kind_) {
    case ProfileKind::Euclidean:
        return 0.0;
    case ProfileKind::Hyperbolic:
        return 1.0;
    case ProfileKind::PolyExp:
    case ProfileKind::Spliced:
        return kInf;
    }
    return 0.0;
}

std::string WarpProfile::spec() const
{
    switch (kind_) {
    case ProfileKind::Euclidean:
        return "euclidean";
    case ProfileKind::Hyperbolic:
        return "hyperbolic";
    case ProfileKind::PolyExp:
        return "polyexp:" + format_number(gamma_);
    case ProfileKind::Spliced:
        return "spliced:" + format_number(a_) + ":" + format_number(r0_);
    }
    return {};
}

std::array<double, 4> WarpProfile::blend_derivatives(double r) const
{
    const double h = r1_ - r0_;
    const double t = (r - r0_) / h;
    const auto& c = blend_;
    const double p = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
    const double p1 = c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
    const double p2 = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]));
    const double p3 = 6 * c[3] + t * (24 * c[4] + t * 60 * c[5]);
    return {p, p1 / h, p2 / (h * h), p3 / (h * h * h)};
}

WarpProfile::Ratios WarpProfile::blend_ratios(double r) const
{
    const auto d = blend_derivatives(r);
    return {std::log(d[0]), d[1] / d[0], d[2] / d[0], d[3] / d[0]};
}

WarpProfile::Ratios WarpProfile::ratios(double r) const
{
    switch (kind_) {
    case ProfileKind::Euclidean:
        return {std::log(r), 1.0 / r, 0.0, 0.0};
    case ProfileKind::Hyperbolic: {
        const double q1 = coth(r);
        return {log_sinh(r), q1, 1.0, q1};
    }
    case ProfileKind::PolyExp: {
        const double g = gamma_;
        const double s = std::pow(r, 2.0 * g);
        const double q1 = (1.0 + 2.0 * g * s) / r;
        const double h = 2.0 * g * s * (1.0 + 2.0 * g + 2.0 * g * s) / r;
        const double h1 =
            (2.0 * g * (1.0 + 2.0 * g) * (2.0 * g - 1.0) * s + 4.0 * g * g * (4.0 * g - 1.0) * s * s) / (r * r);
        const double g1 = 2.0 * g * s / r;
        return {std::log(r) + s, q1, h / r, (g1 * h + h1) / r};
    }
    case ProfileKind::Spliced: {
        if (r <= r0_) {
            const double q1 = coth(r);
            return {log_sinh(r), q1, 1.0, q1};
        }
        if (r < r1_) {
            return blend_ratios(r);
        }
        const double a = a_;
        const double f1 = a * std::pow(r, a - 1.0);
        const double f2 = a * (a - 1.0) * std::pow(r, a - 2.0);
        const double f3 = a * (a - 1.0) * (a - 2.0) * std::pow(r, a - 3.0);
        return {log_tail_c_ + std::pow(r, a), f1, f2 + f1 * f1, f3 + 3.0 * f1 * f2 + f1 * f1 * f1};
    }
    }
    return {};
}

ProfileValues WarpProfile::eval(double r) const
{
    if (!(r >= 0.0)) {
        throw std::invalid_argument("profile evaluated at negative radius");
    }
    switch (kind_) {
    case ProfileKind::Euclidean:
        return {r, 1.0, 0.0, 0.0};
    case ProfileKind::Hyperbolic:
        return {std::sinh(r), std::cosh(r), std::sinh(r), std::cosh(r)};
    case ProfileKind::PolyExp: {
        const double g = gamma_;
        const double s = std::pow(r, 2.0 * g);
        const double es = std::exp(s);
        const double rp = std::pow(r, 2.0 * g - 1.0);
        const double h = 2.0 * g * rp * (1.0 + 2.0 * g + 2.0 * g * s);
        ProfileValues v{r * es, es * (1.0 + 2.0 * g * s), es * h, std::nullopt};
        if (r > 0.0 || g >= 1.0) {
            const double h1 = 2.0 * g * (1.0 + 2.0 * g) * (2.0 * g - 1.0) * std::pow(r, 2.0 * g - 2.0) +
                              4.0 * g * g * (4.0 * g - 1.0) * std::pow(r, 4.0 * g - 2.0);
            v.psi3 = es * (2.0 * g * rp * h + h1);
        }
        return v;
    }
    case ProfileKind::Spliced: {
        if (r <= r0_) {
            return {std::sinh(r), std::cosh(r), std::sinh(r), std::cosh(r)};
        }
        if (r < r1_) {
            const auto d = blend_derivatives(r);
            return {d[0], d[1], d[2], d[3]};
        }
        const auto q = ratios(r);
        const double psi = std::exp(q.log_psi);
        return {psi, psi * q.q1, psi * q.q2, psi * q.q3};
    }
    }
    return {};
}

double WarpProfile::log_psi(double r) const { return ratios(r).log_psi; }

double WarpProfile::log_psi1(double r) const
{
    const auto q = ratios(r);
    return q.log_psi + std::log(q.q1);
}

double WarpProfile::log_derivative(double r) const
{
    if (!(r > 0.0)) {
        throw std::invalid_argument("log_derivative needs r > 0");
    }
    if (r < kSeriesCutoff && kind_ != ProfileKind::PolyExp) {
        const auto s = origin_series();
        return 1.0 / r + s.coefficient * std::pow(r, s.power);
    }
    return ratios(r).q1;
}

double WarpProfile::second_ratio(double r) const { return ratios(r).q2; }

double WarpProfile::log_derivative_slope(double r) const
{
    switch (kind_) {
    case ProfileKind::Euclidean:
        return -1.0 / (r * r);
    case ProfileKind::Hyperbolic: {
        const double s = std::sinh(r);
        return r < kSeriesCutoff ? -1.0 / (r * r) + 1.0 / 3.0 : -1.0 / (s * s);
    }
    case ProfileKind::PolyExp: {
        const double g = gamma_;
        const double s = std::pow(r, 2.0 * g);
        return (2.0 * g * (2.0 * g - 1.0) * s - 1.0) / (r * r);
    }
    case ProfileKind::Spliced: {
        if (r <= r0_) {
            const double s = std::sinh(r);
            return r < kSeriesCutoff ? -1.0 / (r * r) + 1.0 / 3.0 : -1.0 / (s * s);
        }
        if (r < r1_) {
            const auto q = blend_ratios(r);
            return q.q2 - q.q1 * q.q1;
        }
        return a_ * (a_ - 1.0) * std::pow(r, a_ - 2.0);
    }
    }
    return 0.0;
}

double WarpProfile::a5_margin(double r) const
{
    switch (kind_) {
    case ProfileKind::Euclidean:
        return 0.0;
    case ProfileKind::Hyperbolic:
        return sech2(r);
    case ProfileKind::PolyExp: {
        const double g = gamma_;
        const double s = std::pow(r, 2.0 * g);
        const double sigma = 2.0 * g * s;
        const double sigma1 = 4.0 * g * g * s / r;
        const double sigma2 = 4.0 * g * g * (2.0 * g - 1.0) * s / (r * r);
        return 2.0 * g * (2.0 * g - 1.0) * s / (r * r) + sigma2 / (1.0 + sigma) -
               sigma1 * sigma1 / ((1.0 + sigma) * (1.0 + sigma));
    }
    case ProfileKind::Spliced: {
        if (r <= r0_) {
            return sech2(r);
        }
        if (r < r1_) {
            const auto d = blend_derivatives(r);
            const double ratio = d[2] / d[1];
            return d[3] / d[1] - ratio * ratio;
        }
        return (a_ - 1.0) / (r * r) * (a_ * std::pow(r, a_) - 1.0);
    }
    }
    return 0.0;
}

OriginSeries WarpProfile::origin_series() const
{
    switch (kind_) {
    case ProfileKind::Euclidean:
        return {0.0, 1.0};
    case ProfileKind::Hyperbolic:
    case ProfileKind::Spliced:
        return {1.0 / 3.0, 1.0};
    case ProfileKind::PolyExp:
        return {2.0 * gamma_, 2.0 * gamma_ - 1.0};
    }
    return {};
}

std::vector<double> WarpProfile::breakpoints() const
{
    if (kind_ == ProfileKind::Spliced) {
        return {r0_, r1_};
    }
    return {};
}

WarpProfile WarpProfile::with_flags(const AssumptionFlags& flags) const
{
    WarpProfile copy = *this;
    copy.flags_ = flags;
    return copy;
}

bool WarpProfile::same_model(const WarpProfile& other) const
{
    return kind_ == other.kind_ && gamma_ == other.gamma_ && a_ == other.a_ && r0_ == other.r0_ &&
           r1_ == other.r1_;
}

ProfileValues eval_profile(const WarpProfile& profile, double r) { return profile.eval(r); }

double log_derivative(const WarpProfile& profile, double r) { return profile.log_derivative(r); }

namespace {

double ratio_integrand(const WarpProfile& profile, double s)
{
    if (s <= 0.0) {
        return 0.0;
    }
    return 1.0 / profile.log_derivative(s);
}

double integrate_piece(const WarpProfile& profile, double a, double b)
{
    if (b <= a) {
        return 0.0;
    }
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&profile](double s) { return ratio_integrand(profile, s); };
    // Split long ranges geometrically so each panel sees a bounded dynamic range.
    double total = 0.0;
    double lo = a;
    while (lo < b) {
        const double hi = std::min(b, std::max(lo + 1.0, 2.0 * lo));
        total += gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-13);
        lo = hi;
    }
    return total;
}

double integrate_span(const WarpProfile& profile, double a, double b)
{
    double total = 0.0;
    double lo = a;
    for (double bp : profile.breakpoints()) {
        if (bp > lo && bp < b) {
            total += integrate_piece(profile, lo, bp);
            lo = bp;
        }
    }
    return total + integrate_piece(profile, lo, b);
}

}  // namespace

double psi_ratio_integral(const WarpProfile& profile, double r)
{
    if (!(r >= 0.0)) {
        throw std::invalid_argument("psi_ratio_integral needs r >= 0");
    }
    return integrate_span(profile, 0.0, r);
}

std::vector<double> psi_ratio_cumulative(const WarpProfile& profile, std::span<const double> radii)
{
    std::vector<double> out;
    out.reserve(radii.size());
    double acc = 0.0;
    double prev = 0.0;
    for (double r : radii) {
        if (r < prev) {
            throw std::invalid_argument("psi_ratio_cumulative needs nondecreasing radii");
        }
        acc += integrate_span(profile, prev, r);
        out.push_back(acc);
        prev = r;
    }
    return out;
}

TailClass classify_tail(const WarpProfile& profile)
{
    switch (profile.kind()) {
    case ProfileKind::Euclidean:
    case ProfileKind::Hyperbolic:
        return TailClass::NonIntegrable;
    case ProfileKind::PolyExp:
        // psi/psi' ~ r^(1 - 2 gamma) / (2 gamma)
        return profile.gamma() > 1.0 ? TailClass::Integrable : TailClass::NonIntegrable;
    case ProfileKind::Spliced:
        // psi/psi' = r^(1 - a) / a on the tail
        return profile.exponent() > 2.0 ? TailClass::Integrable : TailClass::NonIntegrable;
    }
    return TailClass::NonIntegrable;
}

AssumptionReport check_assumptions(const WarpProfile& profile, std::span<const double> grid)
{
    if (grid.empty()) {
        throw std::invalid_argument("check_assumptions needs a nonempty grid");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && grid[i] <= grid[i - 1])) {
            throw std::invalid_argument("check_assumptions needs a strictly increasing positive grid");
        }
    }

    AssumptionReport report;
    auto fail = [&report](int index, double r, std::string note) {
        auto& c = report.checks[static_cast<std::size_t>(index)];
        if (c.passed) {
            c.passed = false;
            c.first_violation = r;
            c.note = std::move(note);
        }
    };

    // (A1): boundary values at the pole and positivity of psi.
    const auto at0 = profile.eval(0.0);
    if (std::abs(at0.psi) > kBoundaryTol || std::abs(at0.psi1 - 1.0) > kBoundaryTol ||
        std::abs(at0.psi2) > kBoundaryTol) {
        fail(0, 0.0, "boundary values psi(0)=0, psi'(0)=1, psi''(0)=0 violated");
    }
    for (double r : grid) {
        if (!std::isfinite(profile.log_psi(r))) {
            fail(0, r, "psi not positive");
        }
    }

    // (A2)
    for (double r : grid) {
        const double q1 = profile.log_derivative(r);
        if (!(q1 > 0.0) || !std::isfinite(q1)) {
            fail(1, r, "psi' not positive");
        }
    }

    // Tail = last quarter of the grid, at least two points.
    const std::size_t n = grid.size();
    const std::size_t tail_start = n >= 8 ? n - n / 4 : (n >= 2 ? n - 2 : 0);

    // (A3)
    const double lambda = profile.lambda_limit();
    if (!(lambda > 0.0)) {
        fail(2, grid.back(), "psi'/psi tends to 0");
    } else if (n >= 2) {
        if (std::isfinite(lambda)) {
            double prev_dev = kInf;
            for (std::size_t i = tail_start; i < n; ++i) {
                const double dev = std::abs(profile.log_derivative(grid[i]) - lambda);
                if (dev > prev_dev * (1.0 + 1e-8) + 1e-14) {
                    fail(2, grid[i], "psi'/psi not monotonically approaching its limit");
                }
                prev_dev = dev;
            }
            if (prev_dev > 0.05 * lambda) {
                fail(2, grid.back(), "psi'/psi still far from its limit at the end of the grid");
            }
        } else {
            double prev = -kInf;
            for (std::size_t i = tail_start; i < n; ++i) {
                const double q1 = profile.log_derivative(grid[i]);
                if (q1 < prev * (1.0 - 1e-12)) {
                    fail(2, grid[i], "psi'/psi not increasing in the tail");
                }
                prev = q1;
            }
        }
    }

    // (A4): [log(psi'/psi)]' bounded in the tail.
    if (n >= 2) {
        auto slope = [&profile](double r) {
            return std::abs(profile.log_derivative_slope(r) / profile.log_derivative(r));
        };
        const double bound = std::max(1.0, slope(grid[tail_start])) + 1e-12;
        for (std::size_t i = tail_start; i < n; ++i) {
            if (!(slope(grid[i]) <= bound)) {
                fail(3, grid[i], "[log(psi'/psi)]' grows in the tail");
            }
        }
    }

    // (A5)
    for (double r : grid) {
        if (!(profile.a5_margin(r) > 0.0)) {
            fail(4, r, "[log psi']'' not positive");
        }
    }

    return report;
}

WarpProfile make_spliced_profile(double a, double r0)
{
    if (!(a > 1.0) || !std::isfinite(a)) {
        throw InvalidProfile("spliced profile needs a > 1");
    }
    if (!(r0 >= 1.0) || !std::isfinite(r0)) {
        throw InvalidProfile("spliced profile needs r0 >= 1");
    }

    const double p0 = std::sinh(r0);
    const double d0 = std::cosh(r0);
    const double s0 = std::sinh(r0);

    double delta = r0 / 10.0;
    for (int attempt = 0; attempt < 40; ++attempt, delta *= 0.5) {
        const double r1 = r0 + delta;
        const double f1 = a * std::pow(r1, a - 1.0);
        const double f2 = a * (a - 1.0) * std::pow(r1, a - 2.0);
        // Tail level chosen so the blend secant is the mean of the end slopes.
        if (!(delta * f1 / 2.0 < 0.9)) {
            continue;
        }
        const double p1 = (p0 + delta * d0 / 2.0) / (1.0 - delta * f1 / 2.0);
        const double d1 = p1 * f1;
        const double s1 = p1 * (f2 + f1 * f1);

        WarpProfile p;
        p.kind_ = ProfileKind::Spliced;
        p.a_ = a;
        p.r0_ = r0;
        p.r1_ = r1;
        p.log_tail_c_ = std::log(p1) - std::pow(r1, a);
        p.tail_c_ = std::exp(p.log_tail_c_);

        const double h = delta;
        const double c0 = p0;
        const double c1 = h * d0;
        const double c2 = h * h * s0 / 2.0;
        const double e0 = p1 - (c0 + c1 + c2);
        const double e1 = h * d1 - (c1 + 2.0 * c2);
        const double e2 = h * h * s1 - 2.0 * c2;
        p.blend_ = {c0, c1, c2, 10.0 * e0 - 4.0 * e1 + e2 / 2.0, -15.0 * e0 + 7.0 * e1 - e2,
                    6.0 * e0 - 3.0 * e1 + e2 / 2.0};

        bool monotone = true;
        constexpr int samples = 512;
        for (int i = 0; i <= samples && monotone; ++i) {
            const auto d = p.blend_derivatives(r0 + delta * i / samples);
            monotone = d[0] > 0.0 && d[1] > 0.0;
        }
        if (monotone) {
            return p;
        }
    }
    throw InvalidProfile("no monotone blend found for spliced profile");
}

WarpProfile parse_profile(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
            s.remove_prefix(1);
        }
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
            s.remove_suffix(1);
        }
        return s;
    };
    text = trim(text);
    if (text == "euclidean") {
        return WarpProfile::euclidean();
    }
    if (text == "hyperbolic") {
        return WarpProfile::hyperbolic();
    }
    if (text.starts_with("polyexp:")) {
        return WarpProfile::polyexp(parse_number(text.substr(8), "gamma"));
    }
    if (text.starts_with("spliced:")) {
        const auto rest = text.substr(8);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) {
            throw InvalidProfile("spliced profile needs 'spliced:<a>:<r0>'");
        }
        return make_spliced_profile(parse_number(rest.substr(0, colon), "a"),
                                    parse_number(rest.substr(colon + 1), "r0"));
    }
    throw InvalidProfile("unknown profile '" + std::string(text) + "'");
}

std::string to_string(ProfileKind kind)
{
    switch (kind) {
    case ProfileKind::Euclidean:
        return "Euclidean";
    case ProfileKind::Hyperbolic:
        return "Hyperbolic";
    case ProfileKind::PolyExp:
        return "PolyExp";
    case ProfileKind::Spliced:
        return "Spliced";
    }
    return {};
}

std::string to_string(TailClass tail)
{
    return tail == TailClass::Integrable ? "Integrable" : "NonIntegrable";
}

}  // namespace gelfand
