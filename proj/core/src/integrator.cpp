#include "smhd/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace smhd {

int num_steps(const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0))
        throw InvalidParameterError("dt and t_end must be positive");
    const double n = cfg.t_end / cfg.dt;
    const int ni = int(std::llround(n));
    if (ni < 1 || std::abs(n - ni) > 1e-9 * n)
        throw InvalidParameterError("t_end must be an integer multiple of dt");
    return ni;
}

void apply_resolvent(const BasisDescriptor& basis, double dt, MhdState& x) {
    for (int w = 0; w < basis.num_waves(); ++w) {
        x.u.coeffs[w] /= 1.0 + dt * basis.eigenvalue(FieldKind::velocity, w);
        x.b.coeffs[w] /= 1.0 + dt * basis.eigenvalue(FieldKind::magnetic, w);
    }
}

MhdState semi_implicit_step(OperatorContext& ctx, const MhdState& x,
                            const MhdState& forcing, double dt,
                            bool disable_nonlinear) {
    MhdState next = x + forcing;
    if (!disable_nonlinear) axpy(-dt, ctx.apply_b(x, x), next);
    apply_resolvent(*ctx.basis(), dt, next);
    return next;
}

namespace {

struct PathRunner {
    OperatorContext& ctx;
    const NoiseModel& noise;
    const IntegratorConfig& cfg;
    const StreamId& id;
    Observer* obs;

    std::vector<NoiseModel::Mark> schedule;
    std::size_t next_mark = 0;

    MhdState x;
    PathRecord rec;
    int n_steps = 0;

    PathRunner(OperatorContext& c, const NoiseModel& nm, const MhdState& x0,
               const IntegratorConfig& cf, const StreamId& sid, Observer* o)
        : ctx(c), noise(nm), cfg(cf), id(sid), obs(o), x(x0) {
        n_steps = num_steps(cfg);
        schedule = noise.sample_jump_schedule(cfg.t_end, id);
        rec.max_h2 = norm_h2(x);
        record(0.0, 0.0);
    }

    void record(double t, double int_v2) {
        rec.t.push_back(t);
        rec.h2.push_back(norm_h2(x));
        rec.v2.push_back(norm_v2(x));
        rec.int_v2.push_back(int_v2);
    }

    // Advance one step; returns updated running integral of ||x||^2.
    double advance(std::uint32_t j, double int_v2) {
        const double dt = cfg.dt;
        const double t1 = (j + 1) * dt;

        MhdState forcing =
            noise.apply_sigma(x, noise.sample_wiener_increment(dt, id, j));
        StepInfo info;
        info.step = j;
        info.t_new = t1;
        info.wiener_dot = inner_h(x, forcing);
        info.sigma_hs2 = noise.sigma_hs_norm2(x);
        info.comp_sq = noise.g_growth2(x);

        const MhdState comp = noise.compensator_drift(x, id);
        info.comp_dot = inner_h(comp, x);
        axpy(-dt, comp, forcing);

        while (next_mark < schedule.size() &&
               schedule[next_mark].time <= t1 + 1e-12 * dt) {
            const auto& m = schedule[next_mark];
            MhdState g = noise.apply_g(x, m);
            info.jump_sq += norm_h2(g);
            info.jump_dot += inner_h(g, x);
            forcing += g;
            ++next_mark;
            ++rec.jumps;
        }

        MhdState x_new =
            semi_implicit_step(ctx, x, forcing, dt, cfg.disable_nonlinear);

        const double h2 = norm_h2(x_new);
        if (!std::isfinite(h2) || h2 > cfg.blow_up_h2)
            throw BlowUpError(t1, id.path,
                              "state norm blew up at t = " + std::to_string(t1));
        rec.max_h2 = std::max(rec.max_h2, h2);
        int_v2 += dt * norm_v2(x_new);

        if (obs) {
            info.x_old = &x;
            info.x_new = &x_new;
            obs->on_step(info);
        }
        x = std::move(x_new);

        if ((int(j) + 1) % cfg.record_every == 0 || int(j) + 1 == n_steps)
            record(t1, int_v2);
        return int_v2;
    }

    PathRecord finish() {
        rec.final_state = std::move(x);
        return std::move(rec);
    }
};

MhdState state_difference(const MhdState& a, const MhdState& b) {
    if (a.basis->cutoff() == b.basis->cutoff()) return a - b;
    if (a.basis->cutoff() > b.basis->cutoff())
        return a - embed(b, a.basis);
    return embed(a, b.basis) - b;
}

}  // namespace

PathRecord simulate_path(OperatorContext& ctx, const NoiseModel& noise,
                         const MhdState& x0, const IntegratorConfig& cfg,
                         const StreamId& id, Observer* obs) {
    PathRunner run(ctx, noise, x0, cfg, id, obs);
    double int_v2 = 0.0;
    for (int j = 0; j < run.n_steps; ++j)
        int_v2 = run.advance(std::uint32_t(j), int_v2);
    return run.finish();
}

CoupledRecord simulate_coupled(OperatorContext& ctx_a, OperatorContext& ctx_b,
                               const NoiseModel& noise_a,
                               const NoiseModel& noise_b, const MhdState& xa0,
                               const MhdState& xb0, const IntegratorConfig& cfg,
                               const StreamId& id, Observer* obs_a,
                               Observer* obs_b) {
    PathRunner ra(ctx_a, noise_a, xa0, cfg, id, obs_a);
    PathRunner rb(ctx_b, noise_b, xb0, cfg, id, obs_b);
    CoupledRecord out;
    out.diff_h2.push_back(norm_h2(state_difference(ra.x, rb.x)));
    double ia = 0.0, ib = 0.0;
    for (int j = 0; j < ra.n_steps; ++j) {
        const std::size_t n_rec = ra.rec.t.size();
        ia = ra.advance(std::uint32_t(j), ia);
        ib = rb.advance(std::uint32_t(j), ib);
        if (ra.rec.t.size() != n_rec)
            out.diff_h2.push_back(norm_h2(state_difference(ra.x, rb.x)));
    }
    out.a = ra.finish();
    out.b = rb.finish();
    return out;
}

void save_state(const MhdState& x, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw InvalidParameterError("cannot open checkpoint for writing: " + path);
    char buf[80];
    f << "smhd-state 1\n";
    std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g\n", x.basis->cutoff(),
                  x.basis->re(), x.basis->rm(), x.basis->s());
    f << buf;
    f << x.basis->num_waves() << "\n";
    for (const auto* field : {&x.u, &x.b})
        for (const auto& c : field->coeffs) {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", c.real(), c.imag());
            f << buf;
        }
    if (!f) throw InvalidParameterError("checkpoint write failed: " + path);
}

MhdState load_state(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidParameterError("cannot open checkpoint: " + path);
    std::string magic;
    int version = 0;
    f >> magic >> version;
    if (magic != "smhd-state" || version != 1)
        throw InvalidParameterError("unrecognized checkpoint format: " + path);
    int cutoff = 0, nw = 0;
    double re = 0, rm = 0, s = 0;
    f >> cutoff >> re >> rm >> s >> nw;
    MhdState x = zero_state(make_basis(cutoff, re, rm, s));
    if (nw != x.basis->num_waves())
        throw InvalidParameterError("checkpoint wave count mismatch");
    for (auto* field : {&x.u, &x.b})
        for (auto& c : field->coeffs) {
            double cr = 0, ci = 0;
            f >> cr >> ci;
            c = {cr, ci};
        }
    if (!f) throw InvalidParameterError("checkpoint truncated: " + path);
    return x;
}

}  // namespace smhd
