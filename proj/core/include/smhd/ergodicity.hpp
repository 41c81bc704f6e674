#pragma once

// Long-run experiments: exponential stability of the shared-noise coupling,
// the martingale-ratio law, Krylov-Bogoliubov time averages, uniqueness of
// the time-averaged measure, and invariant-moment audits.

#include <array>
#include <cstdint>

#include "smhd/harness.hpp"

namespace smhd {

struct StabilityReport {
    double condition_value = 0.0;  // 2 (M1 + M3) / lambda1
    bool condition_met = false;
    std::vector<double> t;         // recorded times
    std::vector<double> w2;        // |w(t)|^2
    std::vector<double> bound_rhs; // |w(0)|^2 exp(4 int ||y||^2 - lambda1 t)
    bool pathwise_bound_ok = false;
    double decay_slope = 0.0;      // log |w|^2 slope over the second half
    double w_ratio = 0.0;          // |w(t_end)| / |w(0)|
};

// Shared-noise coupling of the two initial states; requires additive noise.
StabilityReport stability_experiment(OperatorContext& ctx,
                                     const NoiseModel& noise,
                                     const MhdState& x0, const MhdState& y0,
                                     const IntegratorConfig& integ,
                                     const StreamId& id);

struct StabilityEnsemble {
    double condition_value = 0.0;
    bool condition_met = false;
    int paths = 0;
    int bound_violations = 0;  // paths with any pathwise-bound failure
    int negative_slopes = 0;
    double max_w_ratio = 0.0;
};

StabilityEnsemble stability_ensemble(const BasisPtr& basis,
                                     const NoiseModel& noise,
                                     const MhdState& x0, const MhdState& y0,
                                     const IntegratorConfig& integ, int paths,
                                     int threads, std::uint64_t seed);

// Discrete accumulation of the energy martingale
//   M(t) = 2 sum_k int (sigma_k, x) dW_k + int int (|g|^2 + 2(g, x)) Ntilde
// on one path, with the running maximum ratio M*(t)/t.
struct MartingaleTrace {
    std::vector<double> t;
    std::vector<double> ratio;   // M*(t)/t at recorded times
    double final_ratio = 0.0;
    double max_ratio = 0.0;
    double final_m = 0.0;        // M(t_end), for the zero-mean check
};

MartingaleTrace martingale_ratio(OperatorContext& ctx, const NoiseModel& noise,
                                 const MhdState& x0,
                                 const IntegratorConfig& integ,
                                 const StreamId& id);

// Observable battery for the empirical measure.
inline constexpr int kNumObservables = 5;
inline constexpr const char* kObservableNames[kNumObservables] = {
    "h_norm2", "v_norm2", "l4_norm4", "mode0_coeff", "mode0_coeff_sq"};

struct EmpiricalMeasure {
    double t_end = 0.0;
    double burn_in = 0.0;
    // Batch-means statistics of the time series sampled at the record
    // stride; mean is the time average over [burn_in, t_end].
    std::array<SummaryStat, kNumObservables> obs;
    SummaryStat h4;  // time average of |x|^4, used by the moment audit
};

EmpiricalMeasure time_average_measure(OperatorContext& ctx,
                                      const NoiseModel& noise,
                                      const MhdState& x0,
                                      const IntegratorConfig& integ,
                                      double burn_in, const StreamId& id);

// Ensemble of per-path time averages; the summary statistics are across
// paths, so the confidence bands are honest under path independence.
struct MeasureEnsemble {
    int paths = 0;
    double t_end = 0.0;
    double burn_in = 0.0;
    std::array<SummaryStat, kNumObservables> obs;
    SummaryStat h4;
};

MeasureEnsemble measure_ensemble(const BasisPtr& basis, const NoiseModel& noise,
                                 const MhdState& x0,
                                 const IntegratorConfig& integ, double burn_in,
                                 int paths, int threads, std::uint64_t seed);

// Two well-separated initial states, independent seed ensembles; each
// observable must agree within the union of the 95% bands.  Reported as
// not-applicable when the stability condition fails.
VerificationReport invariant_uniqueness_test(
    const BasisPtr& basis, const NoiseModel& noise, const MhdState& x0_a,
    const MhdState& x0_b, const IntegratorConfig& integ, double burn_in,
    int paths, int threads, std::uint64_t seed_a, std::uint64_t seed_b);

// mu_T(||.||^2) against K/(2-K) plus band; mu_T(|.|^4) bounded across a
// T-doubling (the doubled ensemble may be empty-pathed to skip that part).
VerificationReport measure_moment_audit(const MeasureEnsemble& at_t,
                                        const MeasureEnsemble& at_2t,
                                        const NoiseConstants& constants);

}  // namespace smhd
