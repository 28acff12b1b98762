#include <doctest.h>

#include <cmath>
#include <numbers>

#include "epbdf/stability.hpp"

using namespace epbdf;

TEST_CASE("chebyshev reduction of pure cos and sin modes") {
    const std::vector<double> a{0.0, 0.0, 1.0}; // cos(2 phi)
    const std::vector<double> b{0.0, 0.0, 1.0}; // sin(3 phi)
    const TrigForm f = trig_to_chebyshev(a, b);
    CHECK(f.cos_part.coeff(0) == doctest::Approx(-1.0));
    CHECK(f.cos_part.coeff(2) == doctest::Approx(2.0));
    // U_2(x) = 4x^2 - 1
    CHECK(f.sin_part.coeff(0) == doctest::Approx(-1.0));
    CHECK(f.sin_part.coeff(2) == doctest::Approx(4.0));
}

TEST_CASE("six-step boundary real part reduces to 4(1-x)(8+59x-157x^2)") {
    // real part of 60 alpha(e^{i phi}) e^{-3 i phi}: coefficients of cos(0..3 phi)
    const std::vector<double> a{-400.0, 675.0, -432.0, 157.0};
    const TrigForm f = trig_to_chebyshev(a, {});
    const Polynomial expect =
        4.0 * (Polynomial{{1.0, -1.0}} * Polynomial{{8.0, 59.0, -157.0}});
    for (int i = 0; i <= 3; ++i) CHECK(f.cos_part.coeff(i) == doctest::Approx(expect.coeff(i)));

    // companion imaginary part 137 sin3 - 288 sin2 + 225 sin1 = 4(137x^2-144x+22) sin phi
    const std::vector<double> b{225.0, -288.0, 137.0};
    const TrigForm g = trig_to_chebyshev({}, b);
    CHECK(g.sin_part.coeff(0) == doctest::Approx(88.0));
    CHECK(g.sin_part.coeff(1) == doctest::Approx(-576.0));
    CHECK(g.sin_part.coeff(2) == doctest::Approx(548.0));
}

TEST_CASE("trig form reconstruction matches direct complex evaluation") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(7), b(6); // a_0..a_6 and b_1..b_6
        for (double& x : a) x = rng.sym();
        for (double& x : b) x = rng.sym();
        const TrigForm f = trig_to_chebyshev(a, b);
        for (int k = 0; k <= 40; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / 41.0;
            std::complex<double> direct = 0.0;
            for (std::size_t l = 0; l < a.size(); ++l) direct += a[l] * std::cos(l * phi);
            for (std::size_t l = 0; l < b.size(); ++l)
                direct += std::complex<double>(0.0, b[l] * std::sin((l + 1) * phi));
            const std::complex<double> reduced(f.cos_part(std::cos(phi)),
                                               f.sin_part(std::cos(phi)) * std::sin(phi));
            CHECK(std::abs(direct - reduced) < 1e-12);
        }
    }
}

TEST_CASE("positivity property of the six-step multiplier with margin 9/100") {
    const PositivityResult r = check_positivity_property(Multiplier::published(6), 0.09);
    CHECK(r.pass);
    // minimum of the reduced polynomial sits at (3 - 2 sqrt(2))/6 with value
    // margin + (117 - 80 sqrt(2))/450
    const double xstar = (3.0 - 2.0 * std::sqrt(2.0)) / 6.0;
    CHECK(r.argmin_x == doctest::Approx(xstar).epsilon(1e-6));
    CHECK(r.min_value - 0.09 > 0.008584);
    CHECK(r.min_value - 0.09 ==
          doctest::Approx((117.0 - 80.0 * std::sqrt(2.0)) / 450.0).epsilon(1e-10));
}

TEST_CASE("positivity of the zero and four-step multipliers") {
    const PositivityResult zero = check_positivity_property(Multiplier::zero(6), 0.0);
    CHECK(zero.pass);
    CHECK(zero.min_value == doctest::Approx(1.0));

    // 1 - x/2 attains its minimum 1/2 at x = +1 (phi = 0)
    const PositivityResult four = check_positivity_property(Multiplier::published(4), 0.0);
    CHECK(four.pass);
    CHECK(four.min_value == doctest::Approx(0.5));
    CHECK(four.argmin_x == doctest::Approx(1.0));
    // Nevanlinna-Odeh condition |mu_1| < 1 holds as well
    double l1 = 0.0;
    for (double m : Multiplier::published(4).values()) l1 += std::abs(m);
    CHECK(l1 < 1.0);
}

TEST_CASE("root location checks") {
    const RootDiskResult inside = roots_in_unit_disk(Polynomial{{-0.3, 0.9, -1.0, 1.0}});
    CHECK(inside.pass);
    CHECK(inside.max_modulus < 1.0);

    const RootDiskResult boundary = roots_in_unit_disk(Polynomial{{-1.0, 1.0}});
    CHECK_FALSE(boundary.pass);
    CHECK(boundary.max_modulus == doctest::Approx(1.0));

    // five-step multiplier: reduced factor z^2 - z + 1/4 has the double root 1/2
    const Multiplier m5 = Multiplier::published(5);
    const Polynomial mu = m5.mu_poly();
    const Polynomial core = mu.shifted_down(mu.valuation(1e-14));
    const RootDiskResult five = roots_in_unit_disk(core);
    CHECK(five.pass);
    CHECK(five.max_modulus == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("A-condition at m=0 boundary polynomial at m=0 matches its known factorization") {
    const BdfScheme s = make_scheme(6);
    const AConditionResult r = check_A_condition(s, Rational(0), Multiplier::published(6), 20000);
    CHECK(r.pass);
    CHECK(r.mu_roots_inside);
    CHECK(r.leading_positive);
    CHECK(r.no_common_divisor);
    CHECK(r.boundary_min >= -1e-12);
    // 600 F(x) = 4(1-x) (-800x^5 + 2480x^4 - 2440x^3 + 829x^2 - 73x + 34)
    const Polynomial expect =
        4.0 * (Polynomial{{1.0, -1.0}} *
               Polynomial{{34.0, -73.0, 829.0, -2440.0, 2480.0, -800.0}});
    for (int i = 0; i <= 6; ++i)
        CHECK(600.0 * r.boundary_poly.coeff(i) == doctest::Approx(expect.coeff(i)).epsilon(1e-9));
}

TEST_CASE("A-condition at m=1/63 at m=1/63 matches the known degree-10 factor") {
    const BdfScheme s = make_scheme(6);
    const AConditionResult r = check_A_condition(s, Rational(1, 63), Multiplier::published(6), 20000);
    CHECK(r.pass);
    // 37800 F(x) = 32 (1-x^2) P(x)
    const Polynomial p10{{110.0, 787.0, 473.0, -16589.0, 66209.0, -159242.0, 245716.0, -237184.0,
                          138880.0, -45440.0, 6400.0}};
    const Polynomial expect = 32.0 * (Polynomial{{1.0, 0.0, -1.0}} * p10);
    for (int i = 0; i <= 12; ++i)
        CHECK(37800.0 * r.boundary_poly.coeff(i) ==
              doctest::Approx(expect.coeff(i)).epsilon(1e-9));
}

TEST_CASE("implicit six-step method alone fails the boundary check (not A-stable)") {
    const BdfScheme s = make_scheme(6);
    const AConditionResult r = check_A_condition(s, Rational(0), Multiplier::zero(6), 20000);
    CHECK(r.mu_roots_inside);
    CHECK(r.no_common_divisor);
    CHECK(r.boundary_min < -1e-6);
    CHECK_FALSE(r.pass);
}

TEST_CASE("A-condition passes across the m-range for the published multipliers") {
    for (int q : {4, 5, 6}) {
        const BdfScheme s = make_scheme(q);
        const Multiplier mult = Multiplier::published(q);
        const std::int64_t denom = (1ll << q) - 1;
        for (int k = 0; k <= 8; ++k) {
            const Rational m(k, denom * 8);
            const AConditionResult r = check_A_condition(s, m, mult, 20000);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("witness scan: none at the threshold, instability above it") {
    for (int q = 1; q <= 6; ++q) {
        const double threshold = 1.0 / ((1 << q) - 1);
        CHECK_FALSE(necessary_condition_witness(q, threshold).has_value());
        CHECK_FALSE(necessary_condition_witness(q, 0.5 * threshold).has_value());
        for (double factor : {1.05, 1.5, 2.0}) {
            const auto w = necessary_condition_witness(q, factor * threshold);
            REQUIRE(w.has_value());
            CHECK(w->zeta_star < -1.0);
            CHECK(w->x_star > 0.0);
            CHECK(w->residual <= 1e-10);
        }
    }
}

TEST_CASE("witness for q=1 at ell=1.5 sits in the predicted interval") {
    // kappa(-1, x) = 2 - 3 + x for q=1, so the unstable root interval is (-1.5, -1)
    const auto w = necessary_condition_witness(1, 1.5);
    REQUIRE(w.has_value());
    CHECK(w->zeta_star > -1.5);
    CHECK(w->zeta_star < -1.0);
    CHECK(w->zeta_onset == doctest::Approx(-1.5).epsilon(1e-6));
}

TEST_CASE("q=6: witness appears for ell=0.03 > 1/63") {
    CHECK(necessary_condition_witness(6, 1.0 / 63.0 + 1e-12).has_value() == false);
    const auto w = necessary_condition_witness(6, 0.03);
    REQUIRE(w.has_value());
    CHECK(w->x_star > 0.0);
}

TEST_CASE("scalar recursion: dissipative implicit mode stays bounded") {
    Rng rng(4242);
    for (int q = 1; q <= 6; ++q) {
        const Vector seeds = rng.vector(2 * q);
        for (double x : {0.01, 0.5, 5.0}) {
            const RecursionResult r = run_scalar_recursion(q, 0.0, x, 2000, seeds);
            CHECK_FALSE(r.diverged);
            CHECK(r.growth < 10.0);
        }
    }
}

TEST_CASE("scalar recursion diverges at the witness point and not at ell=0") {
    for (int q = 1; q <= 6; ++q) {
        for (double factor : {1.05, 1.5, 2.0}) {
            const double ell = factor / ((1 << q) - 1);
            const auto w = necessary_condition_witness(q, ell);
            REQUIRE(w.has_value());
            // near the threshold the unstable root sits close to the unit
            // circle, so the marginal case gets a longer run
            const int n_steps = factor < 1.2 ? 3000 : 500;
            const Vector seeds(2 * q, 1.0);
            const RecursionResult unstable =
                run_scalar_recursion(q, ell, w->x_star, n_steps, seeds);
            CHECK(unstable.growth > 1e3);
            const RecursionResult stable =
                run_scalar_recursion(q, 0.0, w->x_star, n_steps, seeds);
            CHECK(stable.growth < 10.0);
        }
    }
}

TEST_CASE("scalar recursion with zero seeds is identically zero") {
    const Vector seeds(12, 0.0);
    const RecursionResult r = run_scalar_recursion(6, 0.02, 0.3, 100, seeds);
    CHECK(r.growth == 0.0);
    CHECK_FALSE(r.diverged);
}

TEST_CASE("toeplitz check of the six-step stability function") {
    const ToeplitzResult r = toeplitz_positivity(Multiplier::published(6), Rational(-91, 100), 24);
    CHECK(r.pass);
    // g(s) = 91/100 - cos s + (9/10) cos 2s - (3/10) cos 3s
    REQUIRE(r.cos_coeffs.size() >= 4);
    CHECK(r.cos_coeffs[0] == doctest::Approx(0.91));
    CHECK(r.cos_coeffs[1] == doctest::Approx(-1.0));
    CHECK(r.cos_coeffs[2] == doctest::Approx(0.9));
    CHECK(r.cos_coeffs[3] == doctest::Approx(-0.3));
    CHECK(r.generating_min > 0.008584);
    CHECK(r.generating_min ==
          doctest::Approx((117.0 - 80.0 * std::sqrt(2.0)) / 450.0).epsilon(1e-10));
}

TEST_CASE("toeplitz identity band") {
    const ToeplitzResult r = toeplitz_positivity(Multiplier::zero(3), Rational(-1), 12);
    CHECK(r.pass);
    CHECK(r.generating_min == doctest::Approx(1.0));
    CHECK(r.symmetric_min_eig == doctest::Approx(1.0));
}

TEST_CASE("grenander-szego sandwich at several sizes") {
    for (int n : {12, 24, 48}) {
        const ToeplitzResult r = toeplitz_positivity(Multiplier::published(6), Rational(-91, 100), n);
        CHECK(r.generating_min <= r.symmetric_min_eig + 1e-12);
        CHECK(r.symmetric_min_eig <= r.symmetric_max_eig);
        CHECK(r.symmetric_max_eig <= r.generating_max + 1e-12);
    }
}

TEST_CASE("full stability report for the published six-step multiplier") {
    const StabilityReport rep = run_stability_report(6, Multiplier::published(6), 5, 20000);
    CHECK(rep.pass);
    CHECK(rep.positivity.pass);
    CHECK(rep.a_condition_all_pass);
    CHECK(rep.witness_none_at_threshold);
    CHECK(rep.witness_growth > 1e3);
}
