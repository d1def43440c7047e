#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gelfand {

/// Refines a sign change of f inside [a, b]: a few bisections, then
/// Illinois-modified secant steps that keep the bracket. Stops once the
/// bracket is narrower than tol or after max_iter evaluations.
template <class F>
double refine_root(F&& f, double a, double b, double fa, double fb, double tol, int max_iter = 60)
{
    if (fa == 0.0) {
        return a;
    }
    if (fb == 0.0) {
        return b;
    }
    if ((fa > 0.0) == (fb > 0.0)) {
        throw std::invalid_argument("refine_root needs a sign change");
    }
    constexpr int bisections = 6;
    int side = 0;
    for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
        double c;
        if (it < bisections) {
            c = 0.5 * (a + b);
        } else {
            c = (a * fb - b * fa) / (fb - fa);
            if (!(c > std::min(a, b) && c < std::max(a, b))) {
                c = 0.5 * (a + b);
            }
        }
        const double fc = f(c);
        if (fc == 0.0) {
            return c;
        }
        if ((fc > 0.0) == (fb > 0.0)) {
            b = c;
            fb = fc;
            if (side == -1) {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

}  // namespace gelfand
