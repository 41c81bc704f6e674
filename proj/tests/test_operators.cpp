#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace smhd;
using namespace smhd::testing;

TEST_SUITE("operators") {

TEST_CASE("quadratic term matches the dense convolution oracle") {
    for (const double s : {1.0, 2.5}) {
        BasisPtr basis = make_basis(4, 1.7, 0.8, s);
        OperatorContext ctx(basis);
        for (int i = 0; i < 10; ++i) {
            const MhdState x1 =
                random_state(basis, 100 + std::uint64_t(i), 0, 1.0, 0.3);
            const MhdState x2 =
                random_state(basis, 100 + std::uint64_t(i), 1, 0.8, 0.0);
            const MhdState got = ctx.apply_b(x1, x2);
            const MhdState want = oracle_apply_b(x1, x2);
            const double scale = std::max(1.0, norm_h(got));
            CHECK(max_coeff_diff(got, want) < 1e-10 * scale);
        }
    }
}

TEST_CASE("trilinear form cancels on repeated arguments") {
    BasisPtr basis = make_basis(8, 1.0, 1.0, 2.0);
    OperatorContext ctx(basis);
    for (int i = 0; i < 25; ++i) {
        const MhdState x = random_state(basis, 7, std::uint32_t(3 * i), 1.5, 0.2);
        const MhdState y =
            random_state(basis, 7, std::uint32_t(3 * i + 1), 1.0, 0.0);
        const MhdState z =
            random_state(basis, 7, std::uint32_t(3 * i + 2), 0.7, 0.0);
        const double scale =
            std::max(1.0, norm_h(x) * norm_v(y) * norm_v(z));
        CHECK(std::abs(ctx.trilinear(x, y, y)) < 1e-10 * scale);
        CHECK(ctx.trilinear(x, y, z) ==
              doctest::Approx(-ctx.trilinear(x, z, y)).epsilon(1e-9));
    }
}

TEST_CASE("dissipation form is coercive with constant lambda1") {
    BasisPtr basis = make_basis(6, 2.0, 4.0, 1.5);
    OperatorContext ctx(basis);
    for (int i = 0; i < 10; ++i) {
        const MhdState x = random_state(basis, 31, std::uint32_t(i), 1.0, 0.0);
        const double a = ctx.bilinear_a(x, x);
        CHECK(a >= 0.25 * norm_v2(x) * (1.0 - 1e-12));
    }
    // Unit resistivities collapse the form onto the V-norm exactly.
    BasisPtr unit = make_basis(6, 1.0, 1.0, 1.5);
    OperatorContext uctx(unit);
    const MhdState x = random_state(unit, 31, 0, 1.0, 0.0);
    CHECK(uctx.bilinear_a(x, x) == doctest::Approx(norm_v2(x)).epsilon(1e-12));
}

TEST_CASE("linear operator acts diagonally") {
    BasisPtr basis = make_basis(5, 2.0, 0.5, 1.0);
    OperatorContext ctx(basis);
    MhdState x = zero_state(basis);
    const int w = basis->wave_index(2, -1);
    x.u.coeffs[std::size_t(w)] = {1.0, -2.0};
    x.b.coeffs[std::size_t(w)] = {0.5, 0.25};
    const MhdState ax = ctx.apply_a(x);
    CHECK(ax.u.coeffs[std::size_t(w)] ==
          x.u.coeffs[std::size_t(w)] * (5.0 / 2.0));
    CHECK(ax.b.coeffs[std::size_t(w)] ==
          x.b.coeffs[std::size_t(w)] * (5.0 / 0.5));
    // (A x, x) equals the dissipation form.
    const MhdState y = random_state(basis, 2, 0, 1.0, 0.0);
    CHECK(inner_h(ctx.apply_a(y), y) ==
          doctest::Approx(ctx.bilinear_a(y, y)).epsilon(1e-12));
}

TEST_CASE("drift pairs with the state through the dissipation form only") {
    BasisPtr basis = make_basis(6, 1.0, 2.0, 2.0);
    OperatorContext ctx(basis);
    for (int i = 0; i < 8; ++i) {
        const MhdState x = random_state(basis, 77, std::uint32_t(i), 1.2, 0.0);
        CHECK(inner_h(ctx.apply_f(x), x) ==
              doctest::Approx(-ctx.bilinear_a(x, x)).epsilon(1e-9));
    }
}

TEST_CASE("dual norm gives the sharp Cauchy-Schwarz pairing") {
    BasisPtr basis = make_basis(5, 1.0, 1.0, 2.0);
    OperatorContext ctx(basis);
    for (int i = 0; i < 10; ++i) {
        const MhdState x = random_state(basis, 55, std::uint32_t(2 * i));
        const MhdState y = random_state(basis, 55, std::uint32_t(2 * i + 1));
        CHECK(std::abs(inner_h(y, x)) <=
              ctx.dual_norm(y) * norm_v(x) * (1.0 + 1e-12));
    }
    // Equality on a single shared mode.
    MhdState e = zero_state(basis);
    e.u.coeffs[std::size_t(basis->wave_index(1, 2))] = 1.0;
    CHECK(ctx.dual_norm(e) == doctest::Approx(1.0 / std::sqrt(5.0)));
    CHECK(std::abs(inner_h(e, e)) ==
          doctest::Approx(ctx.dual_norm(e) * norm_v(e)).epsilon(1e-12));
}

TEST_CASE("quartic Young constant") {
    CHECK(young_quartic_constant(0.5) == doctest::Approx(27.0 / 32.0));
    CHECK(young_quartic_constant(1.0) == doctest::Approx(27.0 / 256.0));
    // sup_a (a b - eps a^{4/3}) = C(eps) b^4, probed on a grid.
    const double eps = 0.37, b = 1.9;
    const double c = young_quartic_constant(eps);
    double sup = 0.0;
    for (int i = 0; i <= 1000000; ++i) {
        const double a = i * 1e-4;
        sup = std::max(sup, a * b - eps * std::pow(a, 4.0 / 3.0));
    }
    CHECK(sup <= c * std::pow(b, 4) * (1.0 + 1e-9));
    CHECK(sup >= c * std::pow(b, 4) * (1.0 - 1e-6));
}

TEST_CASE("quartic interpolation calibration is reproducible and ordered") {
    BasisPtr basis = make_basis(6, 1.0, 1.0, 1.0);
    const double c1 = calibrate_ladyzhenskaya(basis, 100, 42, 1.0);
    const double c2 = calibrate_ladyzhenskaya(basis, 100, 42, 1.0);
    CHECK(c1 == c2);
    CHECK(c1 > 0.0);
    CHECK(calibrate_ladyzhenskaya(basis, 100, 42, 2.0) ==
          doctest::Approx(2.0 * c1));
    // More samples can only raise the observed maximum.
    CHECK(calibrate_ladyzhenskaya(basis, 400, 42, 1.0) >= c1);
}

TEST_CASE("local monotonicity holds on random pairs") {
    BasisPtr basis = make_basis(8, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    const double c_l = calibrate_ladyzhenskaya(basis, 300, 9);
    for (int i = 0; i < 40; ++i) {
        MhdState x = random_state(basis, 200, std::uint32_t(2 * i), 1.0, 0.5);
        MhdState y = random_state(basis, 200, std::uint32_t(2 * i + 1), 0.6, 0.5);
        const MonotonicityCheck c = check_local_monotonicity(ctx, x, y, 0.5, c_l);
        CHECK(c.ok);
        CHECK(c.holder_ok);
        CHECK(c.holder_ratio <= 1.0 + 1e-9);
    }
}

TEST_CASE("random states are reproducible and scale with amplitude") {
    BasisPtr basis = make_basis(5, 1.0, 1.0, 1.0);
    const MhdState a = random_state(basis, 3, 1, 1.0, 0.0);
    const MhdState b = random_state(basis, 3, 1, 1.0, 0.0);
    CHECK(max_coeff_diff(a, b) == 0.0);
    const MhdState c = random_state(basis, 3, 2, 1.0, 0.0);
    CHECK(max_coeff_diff(a, c) > 0.0);
    const MhdState d = random_state(basis, 3, 1, 2.0, 0.0);
    CHECK(norm_h2(d) == doctest::Approx(4.0 * norm_h2(a)).epsilon(1e-12));
    // Spectral decay damps the high modes.
    const MhdState e = random_state(basis, 3, 1, 1.0, 2.0);
    CHECK(norm_v2(e) / norm_h2(e) < norm_v2(a) / norm_h2(a));
}

}  // TEST_SUITE
