#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace gelfand::ode {

template <std::size_t Dim>
using State = std::array<double, Dim>;

template <std::size_t Dim>
struct StepResult {
    State<Dim> y;
    State<Dim> dy;   // derivative at the end point (FSAL)
    double error;    // scaled error norm, accept when <= 1
};

/// One Dormand-Prince 5(4) step from (x, y) with derivative k1 = f(x, y).
template <std::size_t Dim, class Rhs>
StepResult<Dim> dopri_step(Rhs&& f, double x, const State<Dim>& y, const State<Dim>& k1, double h,
                           double rtol, double atol)
{
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    State<Dim> tmp{};
    auto stage = [&](auto&& combine) {
        for (std::size_t i = 0; i < Dim; ++i) {
            tmp[i] = y[i] + h * combine(i);
        }
        return tmp;
    };

    const State<Dim> k2 = f(x + h / 5.0, stage([&](std::size_t i) { return a21 * k1[i]; }));
    const State<Dim> k3 =
        f(x + 3.0 * h / 10.0, stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }));
    const State<Dim> k4 = f(x + 4.0 * h / 5.0, stage([&](std::size_t i) {
                                return a41 * k1[i] + a42 * k2[i] + a43 * k3[i];
                            }));
    const State<Dim> k5 = f(x + 8.0 * h / 9.0, stage([&](std::size_t i) {
                                return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
                            }));
    const State<Dim> k6 = f(x + h, stage([&](std::size_t i) {
                                return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                       a65 * k5[i];
                            }));
    StepResult<Dim> out;
    out.y = stage([&](std::size_t i) {
        return b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i];
    });
    out.dy = f(x + h, out.y);

    double err = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) {
        const double ei =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * out.dy[i]);
        const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(out.y[i]));
        err = std::max(err, std::abs(ei) / scale);
    }
    out.error = std::isfinite(err) ? err : 1e300;
    return out;
}

/// Step-size factor for the next attempt given a scaled error norm.
inline double step_factor(double error)
{
    if (error <= 0.0) {
        return 5.0;
    }
    return std::clamp(0.9 * std::pow(error, -0.2), 0.2, 5.0);
}

}  // namespace gelfand::ode
