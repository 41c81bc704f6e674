#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "test_util.hpp"

#include "smhd/integrator.hpp"

using namespace smhd;
using namespace smhd::testing;

namespace {

NoiseModel quiet_noise(BasisPtr basis) {
    return NoiseModel(basis, make_wiener(*basis, 0.0, 0.0, 0, 0.0),
                      SigmaFamily{}, JumpSpec{});
}

NoiseModel driven_noise(BasisPtr basis, double trace, double nu, double rho) {
    WienerSpec w = make_wiener(*basis, trace > 0.0 ? 1.0 : 0.0, 1.0, 2, trace);
    SigmaFamily sf;
    sf.kind = SigmaKind::additive;
    sf.alpha = 1.0;
    JumpSpec js;
    js.intensity = nu;
    js.mark_amp = rho;
    js.mark_modes = 2;
    js.g_kind = GKind::additive;
    js.gamma0 = 1.0;
    return NoiseModel(std::move(basis), std::move(w), sf, js);
}

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("resolvent inverts I + dt A exactly") {
    BasisPtr basis = make_basis(5, 2.0, 0.7, 1.0);
    const MhdState x = random_state(basis, 1, 0);
    MhdState y = x;
    apply_resolvent(*basis, 0.3, y);
    for (int w = 0; w < basis->num_waves(); ++w) {
        const double lu = basis->eigenvalue(FieldKind::velocity, w);
        const double lb = basis->eigenvalue(FieldKind::magnetic, w);
        CHECK(std::abs(y.u.coeffs[std::size_t(w)] * (1.0 + 0.3 * lu) -
                       x.u.coeffs[std::size_t(w)]) <=
              4e-16 * std::abs(x.u.coeffs[std::size_t(w)]));
        CHECK(std::abs(y.b.coeffs[std::size_t(w)] * (1.0 + 0.3 * lb) -
                       x.b.coeffs[std::size_t(w)]) <=
              4e-16 * std::abs(x.b.coeffs[std::size_t(w)]));
    }
}

TEST_CASE("a single mode decays geometrically without noise") {
    // One Fourier mode self-advects to zero, so the nonlinear term vanishes
    // and each step divides the amplitude by 1 + dt |k|^2 / Re.
    BasisPtr basis = make_basis(4, 2.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    MhdState x = zero_state(basis);
    const int w = basis->wave_index(1, 1);
    x.u.coeffs[std::size_t(w)] = {0.7, -0.2};
    NoiseModel nm = quiet_noise(basis);
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    const PathRecord rec = simulate_path(ctx, nm, x, cfg, {1, 0});
    const double factor = std::pow(1.0 + 0.05 * 2.0 / 2.0, -20.0);
    CHECK(std::abs(rec.final_state.u.coeffs[std::size_t(w)] -
                   x.u.coeffs[std::size_t(w)] * factor) < 1e-13);
    CHECK(rec.jumps == 0);
    CHECK(rec.max_h2 == doctest::Approx(norm_h2(x)));
}

TEST_CASE("the origin is a fixed point") {
    BasisPtr basis = make_basis(4, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    NoiseModel nm = quiet_noise(basis);
    IntegratorConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 1.0;
    const PathRecord rec = simulate_path(ctx, nm, zero_state(basis), cfg, {1, 0});
    CHECK(norm_h2(rec.final_state) == 0.0);
}

TEST_CASE("identical stream ids give bit-identical paths") {
    BasisPtr basis = make_basis(6, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    NoiseModel nm = driven_noise(basis, 0.05, 1.0, 0.2);
    const MhdState x0 = random_state(basis, 2, 0, 1.0, 1.0);
    IntegratorConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 1.0;
    const PathRecord a = simulate_path(ctx, nm, x0, cfg, {9, 3});
    const PathRecord b = simulate_path(ctx, nm, x0, cfg, {9, 3});
    CHECK(a.h2 == b.h2);
    CHECK(a.final_state.u.coeffs == b.final_state.u.coeffs);
    CHECK(a.final_state.b.coeffs == b.final_state.b.coeffs);
    const PathRecord c = simulate_path(ctx, nm, x0, cfg, {9, 4});
    CHECK(a.final_state.u.coeffs != c.final_state.u.coeffs);
}

TEST_CASE("record bookkeeping: stride, final time, running integral") {
    BasisPtr basis = make_basis(4, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    NoiseModel nm = driven_noise(basis, 0.02, 0.0, 0.0);
    const MhdState x0 = random_state(basis, 3, 0);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.1;
    cfg.record_every = 1;
    const PathRecord rec = simulate_path(ctx, nm, x0, cfg, {4, 0});
    REQUIRE(rec.t.size() == 11);
    CHECK(rec.t.front() == 0.0);
    CHECK(rec.t.back() == doctest::Approx(0.1));
    for (std::size_t i = 1; i < rec.t.size(); ++i)
        CHECK(rec.int_v2[i] - rec.int_v2[i - 1] ==
              doctest::Approx(0.01 * rec.v2[i]).epsilon(1e-12));

    cfg.record_every = 3;  // records at steps 3, 6, 9 and the final step 10
    const PathRecord thin = simulate_path(ctx, nm, x0, cfg, {4, 0});
    REQUIRE(thin.t.size() == 5);
    CHECK(thin.t[1] == doctest::Approx(0.03));
    CHECK(thin.t.back() == doctest::Approx(0.1));
    CHECK(thin.h2.back() == doctest::Approx(rec.h2.back()).epsilon(1e-14));
}

TEST_CASE("jump counter matches the schedule") {
    BasisPtr basis = make_basis(4, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    NoiseModel nm = driven_noise(basis, 0.0, 4.0, 0.1);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 2.0;
    for (std::uint32_t p = 0; p < 5; ++p) {
        const StreamId id{31, p};
        const PathRecord rec =
            simulate_path(ctx, nm, zero_state(basis), cfg, id);
        CHECK(rec.jumps == int(nm.sample_jump_schedule(2.0, id).size()));
    }
}

TEST_CASE("a tiny blow-up threshold triggers the failure path") {
    BasisPtr basis = make_basis(4, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    NoiseModel nm = quiet_noise(basis);
    const MhdState x0 = random_state(basis, 5, 0, 1.0, 0.0);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    cfg.blow_up_h2 = 1e-6;
    try {
        simulate_path(ctx, nm, x0, cfg, {1, 7});
        FAIL("expected a blow-up");
    } catch (const BlowUpError& e) {
        CHECK(e.time() == doctest::Approx(0.01));
        CHECK(e.path_index() == 7);
    }
}

TEST_CASE("coupled runs with equal data stay exactly equal") {
    BasisPtr basis = make_basis(5, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    NoiseModel nm = driven_noise(basis, 0.05, 1.0, 0.2);
    const MhdState x0 = random_state(basis, 6, 0);
    IntegratorConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 0.5;
    const CoupledRecord rec =
        simulate_coupled(ctx, ctx, nm, nm, x0, x0, cfg, {8, 0});
    for (double d : rec.diff_h2) CHECK(d == 0.0);
}

TEST_CASE("cross-resolution coupling embeds the smaller state") {
    BasisPtr small = make_basis(4, 1.0, 1.0, 1.0);
    BasisPtr big = make_basis(8, 1.0, 1.0, 1.0);
    OperatorContext cs(small), cb(big);
    NoiseModel ns = driven_noise(small, 0.0, 0.0, 0.0);
    NoiseModel nb = driven_noise(big, 0.0, 0.0, 0.0);
    const MhdState xs = random_state(small, 7, 0, 0.5, 1.0);
    const MhdState xb = embed(xs, big);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.2;
    const CoupledRecord rec =
        simulate_coupled(cs, cb, ns, nb, xs, xb, cfg, {10, 0});
    CHECK(rec.diff_h2.front() == 0.0);
    // Truncation keeps the gap small but generally nonzero.
    CHECK(rec.diff_h2.back() < 1e-4);
}

TEST_CASE("difference of additively forced linear paths is deterministic") {
    BasisPtr basis = make_basis(4, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    NoiseModel nm = driven_noise(basis, 0.1, 2.0, 0.3);
    const MhdState x0 = random_state(basis, 11, 0);
    const MhdState y0 = random_state(basis, 11, 1);
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 0.5;
    cfg.disable_nonlinear = true;
    const CoupledRecord rec =
        simulate_coupled(ctx, ctx, nm, nm, x0, y0, cfg, {12, 0});
    MhdState w = x0 - y0;
    for (std::size_t i = 1; i < rec.diff_h2.size(); ++i) {
        apply_resolvent(*basis, cfg.dt, w);
        CHECK(rec.diff_h2[i] == doctest::Approx(norm_h2(w)).epsilon(1e-11));
    }
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    BasisPtr basis = make_basis(5, 1.5, 0.8, 2.0);
    const MhdState x = random_state(basis, 14, 0, 1.0, 0.5);
    const std::string path = "/tmp/smhd_test_state.txt";
    save_state(x, path);
    const MhdState y = load_state(path);
    std::remove(path.c_str());
    CHECK(y.basis->cutoff() == 5);
    CHECK(y.basis->re() == 1.5);
    CHECK(y.basis->rm() == 0.8);
    CHECK(y.basis->s() == 2.0);
    CHECK(y.u.coeffs == x.u.coeffs);
    CHECK(y.b.coeffs == x.b.coeffs);
}

TEST_CASE("step info supports reconstructing the energy balance terms") {
    BasisPtr basis = make_basis(4, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    NoiseModel nm = driven_noise(basis, 0.05, 2.0, 0.2);
    const MhdState x0 = random_state(basis, 15, 0);
    struct Acc : Observer {
        double hs2_first = -1.0, jump_sq = 0.0;
        int steps = 0;
        void on_step(const StepInfo& info) override {
            if (hs2_first < 0.0) hs2_first = info.sigma_hs2;
            jump_sq += info.jump_sq;
            ++steps;
            CHECK(info.comp_sq >= 0.0);
            CHECK(info.x_old != nullptr);
            CHECK(info.x_new != nullptr);
        }
    } acc;
    IntegratorConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 1.0;
    simulate_path(ctx, nm, x0, cfg, {16, 0}, &acc);
    CHECK(acc.steps == 50);
    CHECK(acc.hs2_first == doctest::Approx(0.05));  // alpha^2 trace q
    CHECK(acc.jump_sq >= 0.0);
}

TEST_CASE("t_end must be an integer multiple of dt") {
    IntegratorConfig cfg;
    cfg.dt = 0.3;
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(num_steps(cfg), InvalidParameterError);
    cfg.dt = 0.25;
    CHECK(num_steps(cfg) == 4);
}

}  // TEST_SUITE
