#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

#include "smhd/harness.hpp"

using namespace smhd;
using namespace smhd::testing;

namespace {

NoiseModel small_noise(BasisPtr basis, double trace, double nu, double rho) {
    WienerSpec w = make_wiener(*basis, trace > 0.0 ? 1.0 : 0.0, 1.0, 2, trace);
    SigmaFamily sf;
    sf.kind = SigmaKind::additive;
    sf.alpha = trace > 0.0 ? 1.0 : 0.0;
    JumpSpec js;
    js.intensity = nu;
    js.mark_amp = rho;
    js.mark_modes = 2;
    js.g_kind = GKind::additive;
    js.gamma0 = nu > 0.0 ? 1.0 : 0.0;
    return NoiseModel(std::move(basis), std::move(w), sf, js);
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("moment constant chain arithmetic") {
    CHECK(jump_maximal_constant(2.0, 1.0) == doctest::Approx(4.0));
    CHECK(jump_maximal_constant(2.0, 9.0) == doctest::Approx(4.0));
    CHECK(jump_maximal_constant(4.0, 1.0) ==
          doctest::Approx(64.0 * std::pow(4.0 / 3.0, 8)));
    CHECK(jump_maximal_constant(4.0, 4.0) ==
          doctest::Approx(4.0 * 64.0 * std::pow(4.0 / 3.0, 8)));
    CHECK_THROWS_AS(jump_maximal_constant(3.0, 1.0),
                    UnsupportedConfigurationError);

    const MomentConstants c = moment_constant_chain(4.0, 1.0, 0.1, 0.1, 1.0);
    CHECK(c.c1p == doctest::Approx(4.5));           // 3^2 (1/2)^1
    CHECK(c.c1pt == doctest::Approx(220.5));        // 6^3 + 4.5
    CHECK(c.c2 == doctest::Approx(639.27817).epsilon(1e-6));
    CHECK(c.c3 == doctest::Approx(c.c2 * (2.0 * 0.01 + 0.1)).epsilon(1e-12));
    CHECK(c.c4 == doctest::Approx(2.0 * (22.05 + c.c3)).epsilon(1e-12));
    CHECK(c.sup_bound ==
          doctest::Approx((2.0 + c.c4) * std::exp(c.c4)).epsilon(1e-9));

    const MomentConstants c2 = moment_constant_chain(2.0, 1.0, 0.1, 0.1, 1.0);
    CHECK(c2.c1p == doctest::Approx(1.0));
    CHECK(c2.c1pt == doctest::Approx(3.0));  // 2^1 + 1
    CHECK(c2.c2 == doctest::Approx(4.0));
}

TEST_CASE("terminal energy bound closed form") {
    // (1 + K T e^{KT}) (|x0|^2 + K T) at K = 0.1, T = 1, |x0|^2 = 1.
    const double k = 0.1, t = 1.0, h2 = 1.0;
    const double rhs = (1.0 + k * t * std::exp(k * t)) * (h2 + k * t);
    CHECK(rhs == doctest::Approx(1.2215688).epsilon(1e-6));
}

TEST_CASE("noise-free discrete energy identity closes to round-off") {
    BasisPtr basis = make_basis(8, 1.0, 1.0, 1.0);
    OperatorContext ctx(basis);
    const MhdState x0 = random_state(basis, 19, 0, 1.5, 0.5);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.5;
    const EnergyIdentity e = energy_identity_run(ctx, x0, cfg);
    CHECK(e.ok);
    CHECK(e.initial_h2 ==
          doctest::Approx(e.final_h2 + e.dissipation + e.defect).epsilon(1e-12));
    // First-order scheme: halving dt roughly halves the defect.
    cfg.dt = 0.005;
    const EnergyIdentity h = energy_identity_run(ctx, x0, cfg);
    CHECK(h.ok);
    const double ratio = e.defect / h.defect;
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.5);
}

TEST_CASE("energy bound verification on a small driven ensemble") {
    BasisPtr basis = make_basis(8, 1.0, 1.0, 1.0);
    NoiseModel nm = small_noise(basis, 0.05, 1.0, std::sqrt(0.05));
    Ensemble ens;
    ens.basis = basis;
    ens.noise = &nm;
    ens.integ.dt = 0.01;
    ens.integ.t_end = 0.5;
    MhdState x0 = random_state(basis, 23, 0, 1.0, 1.0);
    x0 *= 1.0 / norm_h(x0);
    ens.x0 = x0;
    ens.paths = 40;
    ens.seed = 5;
    const VerificationReport rep = verify_energy_bounds(ens, 0.0);
    CHECK(rep.pass());
    REQUIRE(rep.checks.size() >= 2);
    CHECK(rep.checks[0].name == "energy-terminal");
    CHECK(rep.checks[0].margin >= 0.0);
    // delta outside (0, K) is rejected; inside it adds weighted checks.
    CHECK_THROWS_AS(verify_energy_bounds(ens, 0.5), InvalidParameterError);
    const VerificationReport wrep = verify_energy_bounds(ens, 0.05);
    CHECK(wrep.pass());
    CHECK(wrep.checks.size() == 4);
}

TEST_CASE("p-th moment verification and the p = 2 energy reduction") {
    BasisPtr basis = make_basis(8, 1.0, 1.0, 1.0);
    NoiseModel nm = small_noise(basis, 0.05, 1.0, std::sqrt(0.05));
    Ensemble ens;
    ens.basis = basis;
    ens.noise = &nm;
    ens.integ.dt = 0.01;
    ens.integ.t_end = 0.5;
    MhdState x0 = random_state(basis, 23, 0, 1.0, 1.0);
    x0 *= 1.0 / norm_h(x0);
    ens.x0 = x0;
    ens.paths = 40;
    ens.seed = 5;

    const VerificationReport p4 = verify_pth_moments(ens, 4.0);
    CHECK(p4.pass());
    const VerificationReport p2 = verify_pth_moments(ens, 2.0);
    CHECK(p2.pass());
    const VerificationReport en = verify_energy_bounds(ens, 0.0);
    // Identical trajectories: E[max + 4 int] from the energy run equals
    // 2 * (p = 2 combined) - (p = 2 sup) exactly up to round-off.
    const double lhs_energy_sup = en.checks[1].lhs;
    const double reduced = 2.0 * p2.checks[1].lhs - p2.checks[0].lhs;
    CHECK(lhs_energy_sup == doctest::Approx(reduced).epsilon(1e-10));
}

TEST_CASE("monotonicity campaign accepts a calm configuration") {
    BasisPtr basis = make_basis(6, 1.0, 1.0, 1.0);
    NoiseModel nm = small_noise(basis, 0.05, 1.0, 0.2);
    const VerificationReport rep =
        monotonicity_campaign(basis, nm, 150, 1.0, 0.5, 77);
    CHECK(rep.pass());
    CHECK(rep.paths == 150);
    CHECK_THROWS_AS(monotonicity_campaign(basis, nm, 10, 1.0, 1.5, 77),
                    InvalidParameterError);
}

TEST_CASE("Galerkin refinement differences shrink") {
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.25;
    auto make_noise = [](BasisPtr b) {
        return small_noise(b, 0.05, 0.0, 0.0);
    };
    auto make_x0 = [](BasisPtr b) {
        MhdState x = random_state(b, 40, 0, 1.0, 2.0);
        return project(x, 20);  // same low-mode data at every cutoff
    };
    const VerificationReport rep = galerkin_convergence(
        {4, 8, 16}, 1.0, 1.0, 1.0, make_noise, make_x0, cfg, 13);
    CHECK(rep.pass());
}

TEST_CASE("replay and thread-count invariance") {
    BasisPtr basis = make_basis(6, 1.0, 1.0, 1.0);
    NoiseModel nm = small_noise(basis, 0.05, 1.0, 0.2);
    Ensemble ens;
    ens.basis = basis;
    ens.noise = &nm;
    ens.integ.dt = 0.02;
    ens.integ.t_end = 0.5;
    ens.x0 = random_state(basis, 51, 0);
    ens.paths = 4;
    ens.seed = 3;
    const VerificationReport rep = pathwise_uniqueness_check(ens);
    CHECK(rep.pass());
}

TEST_CASE("scalar surrogate closed forms") {
    OuParams p;
    p.lambda = 2.0;
    p.sigma0 = 1.0;
    p.q = 0.1;
    p.nu = 1.0;
    p.rho = 0.3;
    p.x0 = 1.5;
    CHECK(ou_exact_mean(p, 0.0) == doctest::Approx(1.5));
    CHECK(ou_exact_mean(p, 1.0) == doctest::Approx(1.5 * std::exp(-2.0)));
    CHECK(ou_exact_second_moment(p, 0.0) == doctest::Approx(2.25));
    // Stationary limit (sigma0^2 q + nu rho^2) / (2 lambda).
    CHECK(ou_exact_second_moment(p, 60.0) ==
          doctest::Approx(0.19 / 4.0).epsilon(1e-9));
}

TEST_CASE("scalar surrogate simulation tracks the closed forms") {
    OuParams p;
    p.lambda = 1.0;
    p.sigma0 = 1.0;
    p.q = 0.1;
    p.nu = 1.0;
    p.rho = 0.3;
    p.x0 = 1.0;
    const OuMoments m = ou_simulate(p, 1.0, 1.0 / 64.0, 20000, 1, 99);
    const double em = ou_exact_mean(p, 1.0);
    const double em2 = ou_exact_second_moment(p, 1.0);
    // 4 standard errors plus a discretization allowance at dt = 1/64.
    CHECK(std::abs(m.mean - em) < 4.0 * m.mean_ci / 1.96 + 0.02 * std::abs(em));
    CHECK(std::abs(m.m2 - em2) < 4.0 * m.m2_ci / 1.96 + 0.03 * em2);
}

TEST_CASE("per-thread context cache reuses contexts") {
    BasisPtr basis = make_basis(4, 1.0, 1.0, 1.0);
    OperatorContext& a = local_context(basis);
    OperatorContext& b = local_context(basis);
    CHECK(&a == &b);
    BasisPtr other = make_basis(5, 1.0, 1.0, 1.0);
    CHECK(&local_context(other) != &a);
}

}  // TEST_SUITE
