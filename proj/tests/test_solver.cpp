#include "doctest.h"
#include "oracles.hpp"

#include "gelfand/solver.hpp"

#include <cmath>
#include <sstream>
#include <string>

using namespace gelfand;

namespace {

double sup_difference(const RadialSolution& a, const std::function<double(double)>& ref, double r_lo, double r_hi)
{
    double sup = 0.0;
    for (const auto& n : a.nodes()) {
        if (n.r >= r_lo && n.r <= r_hi) {
            sup = std::max(sup, std::abs(n.u - ref(n.r)));
        }
    }
    return sup;
}

}  // namespace

TEST_SUITE("solver")
{
    TEST_CASE("taylor_init examples")
    {
        const auto s0 = taylor_init(WarpProfile::hyperbolic(), 3, 0.0, 0.0);
        CHECK(s0.u == 0.0);
        CHECK(s0.u1 == 0.0);
        CHECK(s0.v == 1.0);
        CHECK(s0.v1 == 0.0);

        // isothermal-sphere series u = -r^2/6 + r^4/120 - ...
        const double eps = 1e-3;
        const auto e = taylor_init(WarpProfile::euclidean(), 3, 0.0, eps);
        CHECK(e.u == doctest::Approx(-1.6667e-7).epsilon(1e-4));
        CHECK(std::abs(e.u - (-eps * eps / 6.0 + std::pow(eps, 4) / 120.0)) < 1e-18);
        CHECK(std::abs(e.u1 - (-eps / 3.0 + std::pow(eps, 3) / 30.0)) < 1e-14);

        const auto h = taylor_init(WarpProfile::hyperbolic(), 2, 1.0, eps);
        CHECK(h.u1 == doctest::Approx(-std::exp(1.0) * eps / 2.0).epsilon(1e-5));
        CHECK(h.u1 == doctest::Approx(-1.3591e-3).epsilon(1e-4));

        for (double alpha : {-2.0, 0.0, 3.0}) {
            const auto s = taylor_init(WarpProfile::polyexp(0.75), 4, alpha, eps);
            CHECK(s.v == doctest::Approx(1.0 - std::exp(alpha) * eps * eps / 8.0).epsilon(1e-9));
        }
        CHECK_THROWS_AS(taylor_init(WarpProfile::hyperbolic(), 3, 0.0, 2e-3), std::invalid_argument);
    }

    TEST_CASE("series start agrees with the exact N = 2 solution")
    {
        const double eps = 1e-3;
        for (double alpha : {-1.0, 0.0, 2.0}) {
            const auto s = taylor_init(WarpProfile::euclidean(), 2, alpha, eps);
            CHECK(std::abs(s.u - oracle::liouville_u(alpha, eps)) < 1e-15);
            CHECK(std::abs(s.v - oracle::liouville_v(alpha, eps)) < 1e-14);
        }
    }

    TEST_CASE("exact N = 2 Euclidean solution, including the log-radius range")
    {
        for (double alpha : {-2.0, 0.0, 3.0}) {
            const auto sol = integrate_ivp(WarpProfile::euclidean(), 2, alpha, 1e6, 1e-10);
            const auto ref = [alpha](double r) { return oracle::liouville_u(alpha, r); };
            CHECK(sup_difference(sol, ref, 0.0, 1e3) < 1e-8);
            CHECK(sup_difference(sol, ref, 1e3, 1e6) < 1e-7);
            for (double r : {0.37, 5.5, 123.4, 2.5e3, 7.7e5}) {
                CHECK(std::abs(sol.u(r) - ref(r)) < 1e-7);
            }
        }
    }

    TEST_CASE("agreement with a fixed-step RK4 reference")
    {
        struct Case {
            WarpProfile profile;
            std::function<double(double)> q1;
            int N;
            double alpha;
            double r_end;
        };
        const std::vector<Case> cases = {
            {WarpProfile::hyperbolic(), [](double r) { return 1.0 / std::tanh(r); }, 3, 0.5, 5.0},
            {WarpProfile::polyexp(1.0), [](double r) { return 1.0 / r + 2.0 * r; }, 4, -1.0, 3.0},
            {WarpProfile::euclidean(), [](double r) { return 1.0 / r; }, 7, 1.0, 6.0},
        };
        for (const auto& c : cases) {
            const auto sol = integrate_ivp(c.profile, c.N, c.alpha, c.r_end, 1e-11);
            const auto ref = oracle::rk4_ivp(c.q1, c.N, c.alpha, c.r_end, 5e-4);
            for (std::size_t i = 0; i < ref.size(); i += 500) {
                CHECK(std::abs(sol.u(ref[i].r) - ref[i].u) < 1e-9);
                CHECK(std::abs(sol.u1(ref[i].r) - ref[i].u1) < 1e-8);
            }
        }
    }

    TEST_CASE("Euclidean N = 3: z = u + 2 log r - log 2 oscillates around 0")
    {
        const auto sol = integrate_ivp(WarpProfile::euclidean(), 3, 0.0, 1e3, 1e-10);
        int sign_changes = 0;
        double prev = 0.0;
        double late_max = 0.0;
        for (const auto& n : sol.nodes()) {
            if (n.r < 10.0) {
                continue;
            }
            const double z = n.u + 2.0 * std::log(n.r) - std::log(2.0);
            if (prev != 0.0 && (z > 0.0) != (prev > 0.0)) {
                ++sign_changes;
            }
            prev = z;
            if (n.r > 100.0) {
                late_max = std::max(late_max, std::abs(z));
            }
        }
        CHECK(sign_changes >= 2);
        CHECK(late_max < 0.2);
    }

    TEST_CASE("Hyperbolic N = 3: u decreases")
    {
        const auto sol = integrate_ivp(WarpProfile::hyperbolic(), 3, 0.0, 50.0, 1e-10);
        CHECK(sol.u(50.0) < sol.u(10.0));
        CHECK(sol.u(10.0) < sol.u(1.0));
        CHECK(sol.u(1.0) < 0.0);
        CHECK(sol.monotonicity_violations() == 0);
        const auto nodes = sol.nodes();
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            CHECK(nodes[i].r > nodes[i - 1].r);
            CHECK(nodes[i].u <= nodes[i - 1].u);
            CHECK(nodes[i].F <= nodes[i - 1].F * (1.0 + 1e-9));
        }
        CHECK(nodes.front().r == doctest::Approx(1e-6));
        CHECK(std::abs(sol.u1(50.0)) < 0.03);
        const auto far = integrate_ivp(WarpProfile::hyperbolic(), 3, 0.0, 2e3, 1e-10);
        CHECK(std::abs(far.u1(2e3)) < 1e-3);
        CHECK(std::abs(far.u1(2e3)) < std::abs(far.u1(50.0)));
    }

    TEST_CASE("Euclidean scaling: u_alpha(r) = u_0(e^(alpha/2) r) + alpha")
    {
        const auto base = integrate_ivp(WarpProfile::euclidean(), 3, 0.0, 100.0 * std::exp(1.0), 1e-10);
        for (double alpha : {1.0, 2.0}) {
            const auto sol = integrate_ivp(WarpProfile::euclidean(), 3, alpha, 100.0, 1e-10);
            const double c = std::exp(0.5 * alpha);
            const double sup =
                sup_difference(sol, [&](double r) { return base.u(c * r) + alpha; }, 0.0, 100.0);
            CHECK(sup < 1e-6);
            CHECK(std::abs(sol.u(37.0) - base.u(c * 37.0) - alpha) < 1e-6);
        }
    }

    TEST_CASE("Lyapunov dissipation identity F' = -(N-1)(psi'/psi)(u')^2")
    {
        const auto h = WarpProfile::hyperbolic();
        const auto sol = integrate_ivp(h, 4, 1.0, 10.0, 1e-11);
        const double lhs = sol.lyapunov(6.0) - sol.lyapunov(0.5);
        const double rhs = -oracle::simpson(
            [&](double r) {
                const double d = sol.u1(r);
                return 3.0 * h.log_derivative(r) * d * d;
            },
            0.5, 6.0, 20000);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
    }

    TEST_CASE("tolerance convergence and handoff independence")
    {
        const auto h = WarpProfile::hyperbolic();
        for (double tol : {1e-8, 1e-10}) {
            const auto a = integrate_ivp(h, 3, 0.7, 50.0, tol);
            const auto b = integrate_ivp(h, 3, 0.7, 50.0, tol / 2.0);
            CHECK(std::abs(a.u(50.0) - b.u(50.0)) < 10.0 * tol);
        }
        SolverOptions o5;
        o5.eps = 1e-5;
        const auto a = integrate_ivp(h, 3, 0.7, 2.0, 1e-11);
        const auto b = integrate_ivp(h, 3, 0.7, 2.0, 1e-11, o5);
        CHECK(std::abs(a.u(1.0) - b.u(1.0)) < 1e-8);
    }

    TEST_CASE("integrate_ivp preconditions")
    {
        CHECK_THROWS_AS(integrate_ivp(WarpProfile::hyperbolic(), 1, 0.0, 10.0, 1e-10), std::invalid_argument);
        CHECK_THROWS_AS(integrate_ivp(WarpProfile::hyperbolic(), 3, 0.0, 10.0, 1e-14), std::invalid_argument);
        CHECK_THROWS_AS(integrate_ivp(WarpProfile::hyperbolic(), 3, 0.0, 10.0, 1e-5), std::invalid_argument);
        CHECK_THROWS_AS(integrate_ivp(WarpProfile::hyperbolic(), 3, 0.0, 1e-7, 1e-10), std::invalid_argument);
        const auto sol = integrate_ivp(WarpProfile::hyperbolic(), 3, 0.0, 10.0, 1e-10);
        CHECK_THROWS_AS(sol.u(11.0), std::out_of_range);
        CHECK(sol.u(0.0) == 0.0);
    }

    TEST_CASE("linearized solution")
    {
        const auto e = WarpProfile::euclidean();
        const auto base = integrate_ivp(e, 3, 0.0, 100.0, 1e-10);
        const auto lin = integrate_linearized(base, 1e-10);
        CHECK(lin.v(1e-6) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(lin.r_max() == doctest::Approx(base.r_max()));
        bool negative = false;
        for (const auto& n : lin.trajectory().nodes()) {
            negative = negative || n.y < 0.0;
        }
        CHECK(negative);

        for (const auto& [profile, N, alpha] :
             {std::tuple{WarpProfile::hyperbolic(), 3, 0.0}, std::tuple{WarpProfile::euclidean(), 5, 1.0},
              std::tuple{WarpProfile::polyexp(0.75), 2, -1.0}}) {
            const double hh = 1e-5;
            const auto up = integrate_ivp(profile, N, alpha + hh, 2.0, 1e-12);
            const auto dn = integrate_ivp(profile, N, alpha - hh, 2.0, 1e-12);
            const auto mid = integrate_linearized(integrate_ivp(profile, N, alpha, 2.0, 1e-12), 1e-12);
            CHECK(std::abs((up.u(1.0) - dn.u(1.0)) / (2.0 * hh) - mid.v(1.0)) < 1e-6);
        }
    }

    TEST_CASE("linearized solution matches the exact N = 2 variation")
    {
        for (double alpha : {-1.0, 0.0, 2.0}) {
            const auto base = integrate_ivp(WarpProfile::euclidean(), 2, alpha, 1e4, 1e-10);
            const auto lin = integrate_linearized(base, 1e-10);
            for (double r : {0.5, 2.0, 2.8, 10.0, 300.0, 5e3}) {
                CHECK(std::abs(lin.v(r) - oracle::liouville_v(alpha, r)) < 1e-7);
            }
        }
    }

    TEST_CASE("blow-up rescaling")
    {
        const auto h = WarpProfile::hyperbolic();
        const auto b1 = blowup_rescale(h, 3, 1.0, 5.0, 1e-10);
        CHECK(b1.alpha == 1.0);
        CHECK(b1.at(0.0).v == 1.0);

        const auto ref = integrate_ivp(WarpProfile::euclidean(), 3, 1.0, 5.0, 1e-10);
        double previous = std::numeric_limits<double>::infinity();
        for (double lambda : {1e-1, 1e-2, 1e-3}) {
            const auto b = blowup_rescale(h, 3, lambda, 5.0, 1e-10);
            CHECK(b.samples.front().v == 1.0);
            double sup = 0.0;
            for (const auto& s : b.samples) {
                sup = std::max(sup, std::abs(s.v - ref.u(std::min(s.s, 5.0))));
                CHECK(std::abs(s.v1) <= std::exp(1.0) * s.s + 1e-6);
            }
            CHECK(sup < previous);
            previous = sup;
            if (lambda == 1e-2) {
                CHECK(sup < 0.05);
            }
        }
        CHECK_THROWS_AS(blowup_rescale(h, 3, 2.0, 5.0, 1e-10), std::invalid_argument);
    }

    TEST_CASE("trajectory CSV")
    {
        const auto sol = integrate_ivp(WarpProfile::hyperbolic(), 3, 0.0, 5.0, 1e-10);
        const auto lin = integrate_linearized(sol, 1e-10);
        std::ostringstream a;
        write_trajectory_csv(a, sol);
        std::istringstream in(a.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "r,u,u1,F");
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            ++rows;
            std::istringstream fields(line);
            std::string f;
            std::vector<double> vals;
            while (std::getline(fields, f, ',')) {
                vals.push_back(std::stod(f));
            }
            REQUIRE(vals.size() == 4);
        }
        CHECK(rows == sol.nodes().size());
        CHECK(a.str().find('\r') == std::string::npos);

        std::ostringstream b;
        write_trajectory_csv(b, sol, &lin);
        CHECK(b.str().rfind("r,u,u1,F,v,v1\n", 0) == 0);

        // 17 significant digits survive a round trip exactly
        const auto last = sol.nodes().back();
        const auto pos = a.str().rfind('\n', a.str().size() - 2);
        std::istringstream tail(a.str().substr(pos + 1));
        std::string r_text;
        std::getline(tail, r_text, ',');
        std::string u_text;
        std::getline(tail, u_text, ',');
        CHECK(std::stod(u_text) == last.u);
    }
}
