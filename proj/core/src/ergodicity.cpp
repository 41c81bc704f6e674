#include "smhd/ergodicity.hpp"

#include <algorithm>
#include <cmath>

#include "smhd/parallel.hpp"

namespace smhd {

namespace {

void require_additive(const NoiseModel& noise) {
    if (!noise.additive())
        throw UnsupportedConfigurationError(
            "this experiment requires state-independent (additive) noise");
}

// Least-squares slope of ln(y) against t, skipping non-positive y.
double log_slope(const std::vector<double>& t, const std::vector<double>& y,
                 std::size_t first) {
    double mx = 0.0, my = 0.0;
    int n = 0;
    for (std::size_t i = first; i < t.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        mx += t[i];
        my += std::log(y[i]);
        ++n;
    }
    if (n < 2) return 0.0;
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = first; i < t.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        sxx += (t[i] - mx) * (t[i] - mx);
        sxy += (t[i] - mx) * (std::log(y[i]) - my);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

StabilityReport stability_experiment(OperatorContext& ctx,
                                     const NoiseModel& noise,
                                     const MhdState& x0, const MhdState& y0,
                                     const IntegratorConfig& integ,
                                     const StreamId& id) {
    require_additive(noise);
    const auto& nc = noise.constants();
    StabilityReport rep;
    const double lambda1 = ctx.basis()->lambda1();
    rep.condition_value = 2.0 * (nc.m1 + nc.m3) / lambda1;
    rep.condition_met = rep.condition_value < 1.0;

    CoupledRecord rec = simulate_coupled(ctx, ctx, noise, noise, x0, y0, integ,
                                         id);
    rep.t = rec.b.t;
    rep.w2 = rec.diff_h2;
    const double w0 = rep.w2.front();
    rep.bound_rhs.resize(rep.t.size());
    rep.pathwise_bound_ok = true;
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        rep.bound_rhs[i] =
            w0 * std::exp(4.0 * rec.b.int_v2[i] - lambda1 * rep.t[i]);
        if (rep.w2[i] > rep.bound_rhs[i] * (1.0 + 1e-6))
            rep.pathwise_bound_ok = false;
    }
    rep.decay_slope = log_slope(rep.t, rep.w2, rep.t.size() / 2);
    rep.w_ratio = w0 > 0.0 ? std::sqrt(rep.w2.back() / w0) : 0.0;
    return rep;
}

StabilityEnsemble stability_ensemble(const BasisPtr& basis,
                                     const NoiseModel& noise,
                                     const MhdState& x0, const MhdState& y0,
                                     const IntegratorConfig& integ, int paths,
                                     int threads, std::uint64_t seed) {
    struct PathOut {
        bool bound_ok = false;
        bool neg_slope = false;
        double ratio = 0.0;
    };
    auto outs = map_paths<PathOut>(paths, threads, [&](int p) {
        OperatorContext& ctx = local_context(basis);
        StabilityReport r = stability_experiment(ctx, noise, x0, y0, integ,
                                                 {seed, std::uint32_t(p)});
        return PathOut{r.pathwise_bound_ok, r.decay_slope < 0.0, r.w_ratio};
    });
    StabilityEnsemble ens;
    const auto& nc = noise.constants();
    ens.condition_value = 2.0 * (nc.m1 + nc.m3) / basis->lambda1();
    ens.condition_met = ens.condition_value < 1.0;
    ens.paths = paths;
    for (const auto& o : outs) {
        if (!o.bound_ok) ++ens.bound_violations;
        if (o.neg_slope) ++ens.negative_slopes;
        ens.max_w_ratio = std::max(ens.max_w_ratio, o.ratio);
    }
    return ens;
}

namespace {

struct MartingaleObserver : Observer {
    double dt;
    int stride;
    int n_steps;
    double m = 0.0, m_star = 0.0;
    std::vector<double> t, ratio;

    MartingaleObserver(double dt_, int stride_, int n_steps_)
        : dt(dt_), stride(stride_), n_steps(n_steps_) {}

    void on_step(const StepInfo& info) override {
        m += 2.0 * info.wiener_dot + info.jump_sq + 2.0 * info.jump_dot -
             dt * (info.comp_sq + 2.0 * info.comp_dot);
        m_star = std::max(m_star, std::abs(m));
        const int j = int(info.step) + 1;
        if (j % stride == 0 || j == n_steps) {
            t.push_back(info.t_new);
            ratio.push_back(m_star / info.t_new);
        }
    }
};

}  // namespace

MartingaleTrace martingale_ratio(OperatorContext& ctx, const NoiseModel& noise,
                                 const MhdState& x0,
                                 const IntegratorConfig& integ,
                                 const StreamId& id) {
    require_additive(noise);
    MartingaleObserver obs(integ.dt, integ.record_every, num_steps(integ));
    simulate_path(ctx, noise, x0, integ, id, &obs);
    MartingaleTrace tr;
    tr.t = std::move(obs.t);
    tr.ratio = std::move(obs.ratio);
    tr.final_ratio = tr.ratio.empty() ? 0.0 : tr.ratio.back();
    for (double r : tr.ratio) tr.max_ratio = std::max(tr.max_ratio, r);
    tr.final_m = obs.m;
    return tr;
}

namespace {

struct MeasureObserver : Observer {
    double burn_in;
    int stride;
    std::array<std::vector<double>, kNumObservables> series;
    std::vector<double> h4_series;

    MeasureObserver(double burn, int stride_) : burn_in(burn), stride(stride_) {}

    void on_step(const StepInfo& info) override {
        if ((int(info.step) + 1) % stride != 0) return;
        if (info.t_new <= burn_in) return;
        const MhdState& x = *info.x_new;
        const double h2 = norm_h2(x);
        const double l4 = norm_l4(x);
        const double c0 = real_coordinate(x, 0);
        series[0].push_back(h2);
        series[1].push_back(norm_v2(x));
        series[2].push_back(l4 * l4 * l4 * l4);
        series[3].push_back(c0);
        series[4].push_back(c0 * c0);
        h4_series.push_back(h2 * h2);
    }
};

}  // namespace

EmpiricalMeasure time_average_measure(OperatorContext& ctx,
                                      const NoiseModel& noise,
                                      const MhdState& x0,
                                      const IntegratorConfig& integ,
                                      double burn_in, const StreamId& id) {
    if (!(burn_in >= 0.0 && burn_in < integ.t_end))
        throw InvalidParameterError("burn-in must lie in [0, t_end)");
    MeasureObserver obs(burn_in, integ.record_every);
    simulate_path(ctx, noise, x0, integ, id, &obs);
    EmpiricalMeasure m;
    m.t_end = integ.t_end;
    m.burn_in = burn_in;
    for (int i = 0; i < kNumObservables; ++i)
        m.obs[std::size_t(i)] = batch_means(obs.series[std::size_t(i)], 20);
    m.h4 = batch_means(obs.h4_series, 20);
    return m;
}

MeasureEnsemble measure_ensemble(const BasisPtr& basis, const NoiseModel& noise,
                                 const MhdState& x0,
                                 const IntegratorConfig& integ, double burn_in,
                                 int paths, int threads, std::uint64_t seed) {
    using Means = std::array<double, kNumObservables + 1>;
    auto means = map_paths<Means>(paths, threads, [&](int p) {
        OperatorContext& ctx = local_context(basis);
        EmpiricalMeasure m = time_average_measure(ctx, noise, x0, integ,
                                                 burn_in,
                                                 {seed, std::uint32_t(p)});
        Means out{};
        for (int i = 0; i < kNumObservables; ++i)
            out[std::size_t(i)] = m.obs[std::size_t(i)].mean;
        out[kNumObservables] = m.h4.mean;
        return out;
    });
    MeasureEnsemble ens;
    ens.paths = paths;
    ens.t_end = integ.t_end;
    ens.burn_in = burn_in;
    for (int i = 0; i <= kNumObservables; ++i) {
        std::vector<double> xs;
        xs.reserve(means.size());
        for (const auto& m : means) xs.push_back(m[std::size_t(i)]);
        if (i < kNumObservables)
            ens.obs[std::size_t(i)] = summarize(xs);
        else
            ens.h4 = summarize(xs);
    }
    return ens;
}

VerificationReport invariant_uniqueness_test(
    const BasisPtr& basis, const NoiseModel& noise, const MhdState& x0_a,
    const MhdState& x0_b, const IntegratorConfig& integ, double burn_in,
    int paths, int threads, std::uint64_t seed_a, std::uint64_t seed_b) {
    VerificationReport rep;
    rep.title = "invariant-measure-uniqueness";
    const auto& nc = noise.constants();
    const double condition = 2.0 * (nc.m1 + nc.m3) / basis->lambda1();
    rep.add_detail("condition_value", condition);
    if (condition >= 1.0) {
        BoundCheck c;
        c.name = "stability-condition";
        c.applicable = false;
        c.note = "not-applicable: 2(M1+M3)/lambda1 >= 1";
        rep.checks.push_back(c);
        return rep;
    }
    const MeasureEnsemble ea = measure_ensemble(basis, noise, x0_a, integ,
                                                burn_in, paths, threads,
                                                seed_a);
    const MeasureEnsemble eb = measure_ensemble(basis, noise, x0_b, integ,
                                                burn_in, paths, threads,
                                                seed_b);
    rep.paths = 2 * paths;
    for (int i = 0; i < kNumObservables; ++i) {
        const auto& a = ea.obs[std::size_t(i)];
        const auto& b = eb.obs[std::size_t(i)];
        rep.checks.push_back(make_check(
            std::string("band-overlap-") + kObservableNames[i],
            std::abs(a.mean - b.mean), 0.0, a.ci95_half + b.ci95_half,
            "ensemble averages within union of 95% bands"));
        rep.add_detail(std::string("mean_a_") + kObservableNames[i], a.mean);
        rep.add_detail(std::string("mean_b_") + kObservableNames[i], b.mean);
    }
    return rep;
}

VerificationReport measure_moment_audit(const MeasureEnsemble& at_t,
                                        const MeasureEnsemble& at_2t,
                                        const NoiseConstants& constants) {
    VerificationReport rep;
    rep.title = "measure-moment-audit";
    rep.paths = at_t.paths;
    const double k = constants.k;
    if (k >= 2.0) {
        BoundCheck c;
        c.name = "v-norm-bound";
        c.applicable = false;
        c.note = "skipped: K >= 2 makes the printed bound inapplicable";
        rep.checks.push_back(c);
    } else {
        const auto& v2 = at_t.obs[1];
        rep.checks.push_back(make_check("v-norm-bound", v2.mean, v2.ci95_half,
                                        k / (2.0 - k),
                                        "mu_T(||.||^2) <= K/(2-K) + band"));
        rep.add_detail("K", k);
        rep.add_detail("bound", k / (2.0 - k));
    }
    if (at_2t.paths > 0 && at_t.h4.mean > 0.0) {
        const double ratio = at_2t.h4.mean / at_t.h4.mean;
        rep.checks.push_back(make_check("h4-doubling-low", 0.5, 0.0, ratio,
                                        "mu_T(|.|^4) stable under T-doubling"));
        rep.checks.push_back(make_check("h4-doubling-high", ratio, 0.0, 2.0,
                                        "mu_T(|.|^4) stable under T-doubling"));
        rep.add_detail("h4_ratio", ratio);
    }
    return rep;
}

}  // namespace smhd
