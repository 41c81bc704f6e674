#include "smhd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "smhd/parallel.hpp"

namespace smhd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ =
        std::chrono::steady_clock::now();
};

}  // namespace

OperatorContext& local_context(const BasisPtr& basis) {
    thread_local std::map<const BasisDescriptor*,
                          std::unique_ptr<OperatorContext>>
        cache;
    auto& slot = cache[basis.get()];
    if (!slot) slot = std::make_unique<OperatorContext>(basis);
    return *slot;
}

BoundCheck make_check(std::string name, double lhs, double ci95, double rhs,
                      std::string note) {
    BoundCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.ci95 = ci95;
    c.rhs = rhs;
    c.margin = rhs - (lhs + ci95);
    c.pass = c.margin >= 0.0;
    c.note = std::move(note);
    return c;
}

bool VerificationReport::pass() const {
    for (const auto& c : checks)
        if (c.applicable && !c.pass) return false;
    return true;
}

double jump_maximal_constant(double p, double t_end) {
    // Doob plus an even-power Ito recursion gives, for the compensated
    // compound-Poisson integral M with Q2 = int int |g|^2 lambda dz ds and
    // Qp = int int |g|^p lambda dz ds:
    //   p=2:  E sup M^2 <= 4 E Q2                       (Doob L2)
    //   p=4:  E sup M^4 <= 64 (4/3)^8 (E Q2^2 + E Q4)
    // The Holder step folding (int h ds)^{p/2} into int h^{p/2} ds costs a
    // further factor T^{(p-2)/2}.
    double base;
    if (p == 2.0)
        base = 4.0;
    else if (p == 4.0)
        base = 64.0 * std::pow(4.0 / 3.0, 8);
    else
        throw UnsupportedConfigurationError(
            "jump maximal-inequality constant implemented for p in {2, 4}");
    return base * std::max(1.0, std::pow(t_end, 0.5 * (p - 2.0)));
}

MomentConstants moment_constant_chain(double p, double t_end, double k,
                                      double k1, double x0_hp) {
    if (p < 2.0) throw InvalidParameterError("p must be >= 2");
    MomentConstants c;
    c.c1p = p == 2.0 ? 1.0
                     : std::pow(p - 1.0, 0.5 * p) *
                           std::pow((p - 2.0) / p, 0.5 * (p - 2.0));
    c.c1pt = std::pow(2.0 * (p - 1.0), p - 1.0) *
                 std::pow(t_end, 0.5 * (p - 2.0)) +
             c.c1p;
    c.c2 = jump_maximal_constant(p, t_end);
    c.c3 = c.c2 * (std::pow(2.0, 0.5 * p - 1.0) * std::pow(k, 0.5 * p) + k1);
    c.c4 = 2.0 * (c.c1pt * k1 + c.c3);
    c.sup_bound = (2.0 * x0_hp + c.c4 * t_end) * std::exp(c.c4 * t_end);
    return c;
}

namespace {

// Accumulates the exponentially weighted and p-weighted time integrals at
// full step resolution (no thinning bias).
struct MomentObserver : Observer {
    double dt, delta, p;
    double int_v2_exp = 0.0, int_h2_exp = 0.0, max_h2_exp = 0.0;
    double int_v2hp = 0.0;  // sum dt ||x||^2 |x|^{p-2}

    MomentObserver(double dt_, double delta_, double p_, double h2_initial)
        : dt(dt_), delta(delta_), p(p_), max_h2_exp(h2_initial) {}

    void on_step(const StepInfo& info) override {
        const double h2 = norm_h2(*info.x_new);
        const double v2 = norm_v2(*info.x_new);
        const double wt = delta > 0.0 ? std::exp(-delta * info.t_new) : 1.0;
        int_v2_exp += dt * wt * v2;
        int_h2_exp += dt * wt * h2;
        max_h2_exp = std::max(max_h2_exp, wt * h2);
        if (p > 2.0)
            int_v2hp += dt * v2 * std::pow(h2, 0.5 * (p - 2.0));
        else
            int_v2hp += dt * v2;
    }
};

struct EnergyPathStats {
    double h2_final = 0.0, int_v2 = 0.0, max_h2 = 0.0;
    double int_v2_exp = 0.0, max_h2_exp = 0.0;
    double sup_hp = 0.0, int_v2hp = 0.0;
};

EnergyPathStats run_energy_path(const Ensemble& ens, double delta, double p,
                                std::uint32_t path) {
    OperatorContext& ctx = local_context(ens.basis);
    MomentObserver obs(ens.integ.dt, delta, p, norm_h2(ens.x0));
    PathRecord rec = simulate_path(ctx, *ens.noise, ens.x0, ens.integ,
                                   {ens.seed, path}, &obs);
    EnergyPathStats s;
    s.h2_final = rec.h2.back();
    s.int_v2 = rec.int_v2.back();
    s.max_h2 = rec.max_h2;
    s.int_v2_exp = obs.int_v2_exp;
    s.max_h2_exp = obs.max_h2_exp;
    s.sup_hp = std::pow(rec.max_h2, 0.5 * p);
    s.int_v2hp = obs.int_v2hp;
    return s;
}

SummaryStat collect(const std::vector<EnergyPathStats>& paths,
                    double (*field)(const EnergyPathStats&)) {
    std::vector<double> xs;
    xs.reserve(paths.size());
    for (const auto& s : paths) xs.push_back(field(s));
    return summarize(xs);
}

BoundCheck finiteness_check(std::string name, const SummaryStat& s,
                            std::string note) {
    BoundCheck c = make_check(std::move(name), s.mean, s.ci95_half, kInf,
                              std::move(note));
    c.pass = std::isfinite(s.mean) && std::isfinite(s.ci95_half);
    c.margin = c.pass ? kInf : -kInf;
    return c;
}

}  // namespace

VerificationReport verify_energy_bounds(const Ensemble& ens, double delta) {
    Timer timer;
    const double k = ens.noise->constants().k;
    const double t = ens.integ.t_end;
    if (delta != 0.0 && !(delta > 0.0 && delta < k))
        throw InvalidParameterError("delta must lie in (0, K)");

    auto paths = map_paths<EnergyPathStats>(
        ens.paths, ens.threads,
        [&](int p) { return run_energy_path(ens, delta, 2.0, std::uint32_t(p)); });

    VerificationReport rep;
    rep.title = "energy-bounds";
    rep.paths = ens.paths;

    const double h2_0 = norm_h2(ens.x0);
    const double rhs1 = (1.0 + k * t * std::exp(k * t)) * (h2_0 + k * t);
    const auto lhs1 = collect(paths, +[](const EnergyPathStats& s) {
        return s.h2_final + 2.0 * s.int_v2;
    });
    rep.checks.push_back(make_check("energy-terminal", lhs1.mean,
                                    lhs1.ci95_half, rhs1,
                                    "(1 + K T e^{KT})(|x0|^2 + K T)"));

    const auto lhs2 = collect(paths, +[](const EnergyPathStats& s) {
        return s.max_h2 + 4.0 * s.int_v2;
    });
    rep.checks.push_back(
        finiteness_check("energy-sup-finite", lhs2, "finiteness only"));

    if (delta > 0.0) {
        const double wt = std::exp(-delta * t);
        std::vector<double> xs3, xs4;
        for (const auto& s : paths) {
            xs3.push_back(wt * s.h2_final + 2.0 * s.int_v2_exp);
            xs4.push_back(s.max_h2_exp + 4.0 * s.int_v2_exp);
        }
        rep.checks.push_back(finiteness_check("energy-weighted-terminal-finite",
                                              summarize(xs3),
                                              "finiteness only"));
        rep.checks.push_back(finiteness_check("energy-weighted-sup-finite",
                                              summarize(xs4),
                                              "finiteness only"));
    } else {
        BoundCheck skipped;
        skipped.name = "energy-weighted";
        skipped.applicable = false;
        skipped.note = "skipped: delta = 0";
        rep.checks.push_back(skipped);
    }

    rep.add_detail("K", k);
    rep.add_detail("T", t);
    rep.add_detail("x0_h2", h2_0);
    rep.add_detail("rhs_terminal", rhs1);
    rep.add_detail("lambda1", ens.basis->lambda1());
    rep.wall_seconds = timer.seconds();
    return rep;
}

VerificationReport verify_pth_moments(const Ensemble& ens, double p) {
    Timer timer;
    if (p < 2.0) throw InvalidParameterError("p must be >= 2");
    const double t = ens.integ.t_end;
    const double k = ens.noise->constants().k;
    const double k1 = ens.noise->constants_at(p).k1;
    const double x0_hp = std::pow(norm_h2(ens.x0), 0.5 * p);
    const MomentConstants mc = moment_constant_chain(p, t, k, k1, x0_hp);

    auto paths = map_paths<EnergyPathStats>(
        ens.paths, ens.threads,
        [&](int i) { return run_energy_path(ens, 0.0, p, std::uint32_t(i)); });

    std::vector<double> sup_p, combined;
    for (const auto& s : paths) {
        sup_p.push_back(s.sup_hp);
        combined.push_back(s.sup_hp + p * s.int_v2hp);
    }
    const auto sup_stat = summarize(sup_p);
    const auto comb_stat = summarize(combined);

    VerificationReport rep;
    rep.title = "pth-moments";
    rep.paths = ens.paths;
    rep.checks.push_back(make_check("pmoment-sup", sup_stat.mean,
                                    sup_stat.ci95_half, mc.sup_bound,
                                    "(2|x0|^p + C4 T) e^{C4 T}"));
    // Feeding the sup bound back into the pre-Gronwall inequality covers
    // the combined LHS with the p-weighted dissipation integral.
    const double rhs_comb =
        2.0 * x0_hp + mc.c4 * t + mc.c4 * t * mc.sup_bound;
    rep.checks.push_back(make_check("pmoment-combined", comb_stat.mean,
                                    comb_stat.ci95_half, rhs_comb,
                                    "sup + p int ||x||^2 |x|^{p-2}"));
    rep.add_detail("p", p);
    rep.add_detail("K", k);
    rep.add_detail("K1", k1);
    rep.add_detail("C1_p", mc.c1p);
    rep.add_detail("C1_pT", mc.c1pt);
    rep.add_detail("C2", mc.c2);
    rep.add_detail("C3", mc.c3);
    rep.add_detail("C4", mc.c4);
    rep.add_detail("sup_bound", mc.sup_bound);
    rep.wall_seconds = timer.seconds();
    return rep;
}

VerificationReport monotonicity_campaign(const BasisPtr& basis,
                                         const NoiseModel& noise, int samples,
                                         double r, double eps,
                                         std::uint64_t seed,
                                         double c_ladyzhenskaya) {
    Timer timer;
    const double l = noise.constants().l;
    if (!(eps > 0.0 && eps < 1.0 - l))
        throw InvalidParameterError("eps must lie in (0, 1 - L)");
    if (!(r > 0.0)) throw InvalidParameterError("r must be positive");
    double c_l = c_ladyzhenskaya;
    if (c_l <= 0.0) c_l = calibrate_ladyzhenskaya(basis, 200, seed ^ 0x9E37u);
    OperatorContext& ctx = local_context(basis);

    int drift_violations = 0, holder_violations = 0, noise_violations = 0;
    double worst_drift = kInf, worst_holder = kInf, worst_noise = kInf;
    for (int i = 0; i < samples; ++i) {
        const double amp_x = 0.25 + 0.25 * (i % 5);
        const double decay = 0.5 * (i % 3);
        MhdState x =
            random_state(basis, seed, std::uint32_t(2 * i), amp_x, decay);
        MhdState y = random_state(basis, seed, std::uint32_t(2 * i + 1),
                                  0.5 * amp_x, decay);
        const double l4 = norm_l4(y);
        if (l4 > r) y *= r / l4;

        const MonotonicityCheck c =
            check_local_monotonicity(ctx, x, y, eps, c_l);
        if (!c.ok) ++drift_violations;
        if (!c.holder_ok) ++holder_violations;
        worst_drift = std::min(worst_drift, c.margin);
        worst_holder = std::min(worst_holder, c.holder_rhs - c.holder_lhs);

        const double gap = noise.sigma_lipschitz_gap(x, y) +
                           noise.g_lipschitz_gap(x, y);
        const double w2 = norm_h2(x - y);
        const double noise_margin = l * w2 - gap;
        if (noise_margin < -1e-12 * std::max(1.0, l * w2)) ++noise_violations;
        worst_noise = std::min(worst_noise, noise_margin);
    }

    VerificationReport rep;
    rep.title = "monotonicity-campaign";
    rep.paths = samples;
    rep.checks.push_back(make_check("drift-monotonicity-violations",
                                    drift_violations, 0.0, 0.0,
                                    "count must be zero"));
    rep.checks.push_back(make_check("holder-step-violations",
                                    holder_violations, 0.0, 0.0,
                                    "count must be zero"));
    rep.checks.push_back(make_check("noise-lipschitz-violations",
                                    noise_violations, 0.0, 0.0,
                                    "count must be zero"));
    rep.add_detail("c_ladyzhenskaya", c_l);
    rep.add_detail("young_constant", young_quartic_constant(eps));
    rep.add_detail("L", l);
    rep.add_detail("worst_drift_margin", worst_drift);
    rep.add_detail("worst_holder_margin", worst_holder);
    rep.add_detail("worst_noise_margin", worst_noise);
    rep.wall_seconds = timer.seconds();
    return rep;
}

VerificationReport galerkin_convergence(
    const std::vector<int>& cutoffs, double re, double rm, double s,
    const std::function<NoiseModel(BasisPtr)>& make_noise,
    const std::function<MhdState(BasisPtr)>& make_x0,
    const IntegratorConfig& integ, std::uint64_t seed) {
    Timer timer;
    if (cutoffs.size() < 3)
        throw InvalidParameterError("need at least three cutoffs");
    for (std::size_t i = 1; i < cutoffs.size(); ++i)
        if (cutoffs[i] <= cutoffs[i - 1])
            throw InvalidParameterError("cutoffs must be increasing");

    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < cutoffs.size(); ++i) {
        BasisPtr ba = make_basis(cutoffs[i], re, rm, s);
        BasisPtr bb = make_basis(cutoffs[i + 1], re, rm, s);
        OperatorContext& ca = local_context(ba);
        OperatorContext& cb = local_context(bb);
        NoiseModel na = make_noise(ba);
        NoiseModel nb = make_noise(bb);
        CoupledRecord rec = simulate_coupled(ca, cb, na, nb, make_x0(ba),
                                             make_x0(bb), integ, {seed, 0});
        double worst = 0.0;
        for (double w2 : rec.diff_h2) worst = std::max(worst, w2);
        d.push_back(std::sqrt(worst));
    }

    VerificationReport rep;
    rep.title = "galerkin-convergence";
    rep.paths = 1;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        BoundCheck c = make_check(
            "refinement-decrease-" + std::to_string(cutoffs[i]) + "-" +
                std::to_string(cutoffs[i + 1]),
            d[i + 1], 0.0, d[i], "d must strictly decrease");
        c.pass = d[i + 1] < d[i];
        rep.checks.push_back(c);
    }
    for (std::size_t i = 0; i < d.size(); ++i)
        rep.add_detail("d_" + std::to_string(cutoffs[i]), d[i]);
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        rep.add_detail("ratio_" + std::to_string(cutoffs[i]),
                       d[i] > 0.0 ? d[i + 1] / d[i] : 0.0);
    rep.wall_seconds = timer.seconds();
    return rep;
}

namespace {

bool records_identical(const PathRecord& a, const PathRecord& b) {
    if (a.t != b.t || a.h2 != b.h2 || a.v2 != b.v2 || a.int_v2 != b.int_v2)
        return false;
    if (a.jumps != b.jumps || a.max_h2 != b.max_h2) return false;
    const auto eq = [](const SpectralField& x, const SpectralField& y) {
        return x.coeffs == y.coeffs;
    };
    return eq(a.final_state.u, b.final_state.u) &&
           eq(a.final_state.b, b.final_state.b);
}

}  // namespace

VerificationReport pathwise_uniqueness_check(const Ensemble& ens,
                                             double perturbation) {
    Timer timer;
    OperatorContext& ctx = local_context(ens.basis);
    const StreamId id{ens.seed, 0};

    PathRecord r1 = simulate_path(ctx, *ens.noise, ens.x0, ens.integ, id);
    PathRecord r2 = simulate_path(ctx, *ens.noise, ens.x0, ens.integ, id);
    const bool replay_ok = records_identical(r1, r2);

    // Same small ensemble through one worker and through four; the merged
    // per-path results must be bit-identical.
    const int probe = std::min(ens.paths, 4);
    auto run_h2 = [&](int p) {
        OperatorContext& c = local_context(ens.basis);
        return simulate_path(c, *ens.noise, ens.x0, ens.integ,
                             {ens.seed, std::uint32_t(p)})
            .h2.back();
    };
    const auto serial = map_paths<double>(probe, 1, run_h2);
    const auto pooled = map_paths<double>(probe, 4, run_h2);
    const bool threads_ok = serial == pooled;

    // Shared-noise perturbation growth (diagnostic only).
    MhdState y0 = ens.x0;
    axpy(perturbation, random_state(ens.basis, ens.seed, 0xFACEu), y0);
    CoupledRecord cp = simulate_coupled(ctx, ctx, *ens.noise, *ens.noise,
                                        ens.x0, y0, ens.integ, id);
    const double w0 = std::sqrt(cp.diff_h2.front());
    const double wt = std::sqrt(cp.diff_h2.back());

    VerificationReport rep;
    rep.title = "pathwise-uniqueness";
    rep.paths = probe;
    BoundCheck c1 = make_check("replay-bit-identical", replay_ok ? 0.0 : 1.0,
                               0.0, 0.0, "records must match exactly");
    c1.pass = replay_ok;
    rep.checks.push_back(c1);
    BoundCheck c2 = make_check("thread-count-invariant", threads_ok ? 0.0 : 1.0,
                               0.0, 0.0, "1 worker vs 4 workers");
    c2.pass = threads_ok;
    rep.checks.push_back(c2);
    rep.add_detail("perturbation", perturbation);
    rep.add_detail("growth_factor", w0 > 0.0 ? wt / w0 : 0.0);
    rep.wall_seconds = timer.seconds();
    return rep;
}

EnergyIdentity energy_identity_run(OperatorContext& ctx, const MhdState& x0,
                                   const IntegratorConfig& integ) {
    const int n = num_steps(integ);
    const double dt = integ.dt;
    EnergyIdentity out;
    out.initial_h2 = norm_h2(x0);
    MhdState x = x0;
    for (int j = 0; j < n; ++j) {
        MhdState bx = ctx.apply_b(x, x);
        MhdState xn = x;
        axpy(-dt, bx, xn);
        apply_resolvent(*ctx.basis(), dt, xn);
        const MhdState g = ctx.apply_a(xn) + bx;
        out.dissipation += 2.0 * dt * ctx.bilinear_a(xn, xn);
        out.defect += 2.0 * dt * inner_h(bx, xn) + dt * dt * norm_h2(g);
        x = std::move(xn);
    }
    out.final_h2 = norm_h2(x);
    out.residual = out.initial_h2 - out.final_h2 - out.dissipation;
    out.mismatch = out.residual - out.defect;
    out.ok = std::abs(out.mismatch) <= 1e-10 * std::max(1.0, out.initial_h2);
    return out;
}

double ou_exact_mean(const OuParams& p, double t) {
    return p.x0 * std::exp(-p.lambda * t);
}

double ou_exact_second_moment(const OuParams& p, double t) {
    const double s2 = p.sigma0 * p.sigma0 * p.q + p.nu * p.rho * p.rho;
    return p.x0 * p.x0 * std::exp(-2.0 * p.lambda * t) +
           s2 * (1.0 - std::exp(-2.0 * p.lambda * t)) / (2.0 * p.lambda);
}

namespace {

double ou_path_terminal(const OuParams& p, double t_end, double dt,
                        const StreamId& id) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    const int n = num_steps(cfg);
    // Jump times drawn once, dt-independent.
    std::vector<double> jt;
    std::vector<double> jz;
    if (p.nu > 0.0 && p.rho != 0.0) {
        double t = 0.0;
        for (std::uint32_t i = 0;; ++i) {
            t += -std::log(uniform(id, Substream::jump_times, 1, i)) / p.nu;
            if (t > t_end) break;
            jt.push_back(t);
            jz.push_back(gaussian_pair(id, Substream::jump_marks, 1, i).a);
        }
    }
    double x = p.x0;
    const double wamp = p.sigma0 * std::sqrt(p.q * dt);
    std::size_t next = 0;
    for (int j = 0; j < n; ++j) {
        const double t1 = (j + 1) * dt;
        double inc =
            wamp * gaussian_pair(id, Substream::scalar, 0, std::uint32_t(j)).a;
        while (next < jt.size() && jt[next] <= t1 + 1e-12 * dt)
            inc += p.rho * jz[next++];
        x = (x + inc) / (1.0 + p.lambda * dt);
    }
    return x;
}

}  // namespace

OuMoments ou_simulate(const OuParams& p, double t_end, double dt, int paths,
                      int threads, std::uint64_t seed) {
    struct Pair {
        double x = 0.0, x2 = 0.0;
    };
    auto vals = map_paths<Pair>(paths, threads, [&](int i) {
        const double x =
            ou_path_terminal(p, t_end, dt, {seed, std::uint32_t(i)});
        return Pair{x, x * x};
    });
    std::vector<double> xs, x2s;
    xs.reserve(vals.size());
    x2s.reserve(vals.size());
    for (const auto& v : vals) {
        xs.push_back(v.x);
        x2s.push_back(v.x2);
    }
    const auto sx = summarize(xs);
    const auto sx2 = summarize(x2s);
    return OuMoments{sx.mean, sx.ci95_half, sx2.mean, sx2.ci95_half};
}

VerificationReport ou_weak_order(const OuParams& p, double t_end,
                                 const std::vector<double>& dts,
                                 int match_paths, int slope_paths, int threads,
                                 std::uint64_t seed) {
    Timer timer;
    if (dts.size() < 2)
        throw InvalidParameterError("need at least two dt values");
    std::vector<double> sorted = dts;
    std::sort(sorted.begin(), sorted.end());

    VerificationReport rep;
    rep.title = "ou-weak-order";
    rep.paths = match_paths;

    const double fine = sorted.front();
    const OuMoments m = ou_simulate(p, t_end, fine, match_paths, threads, seed);
    const double em = ou_exact_mean(p, t_end);
    const double em2 = ou_exact_second_moment(p, t_end);
    const double se_m = m.mean_ci / 1.96;
    const double se_m2 = m.m2_ci / 1.96;
    rep.checks.push_back(make_check("ou-mean-3se", std::abs(m.mean - em), 0.0,
                                    3.0 * se_m, "closed-form mean"));
    rep.checks.push_back(make_check("ou-m2-3se", std::abs(m.m2 - em2), 0.0,
                                    3.0 * se_m2, "closed-form second moment"));

    // Weak-order slope on the second-moment bias; the slope ensemble is
    // larger so Monte Carlo error is small against the coarse-dt bias.
    std::vector<double> biases;
    for (double dt : sorted) {
        const OuMoments s =
            ou_simulate(p, t_end, dt, slope_paths, threads, seed ^ 0x51ABu);
        biases.push_back(std::abs(s.m2 - em2));
        rep.add_detail("bias_dt_" + std::to_string(dt), biases.back());
    }
    const SlopeFit fit = fit_loglog(sorted, biases);
    rep.checks.push_back(
        make_check("ou-weak-order-slope-low", 0.8, 0.0, fit.slope, ""));
    rep.checks.push_back(
        make_check("ou-weak-order-slope-high", fit.slope, 0.0, 1.2, ""));
    rep.add_detail("slope", fit.slope);
    rep.add_detail("exact_mean", em);
    rep.add_detail("exact_m2", em2);
    rep.add_detail("est_mean", m.mean);
    rep.add_detail("est_m2", m.m2);
    rep.wall_seconds = timer.seconds();
    return rep;
}

}  // namespace smhd
