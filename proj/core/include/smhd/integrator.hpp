#pragma once

// Semi-implicit Euler-Maruyama stepping for the truncated system
//
//   x_{j+1} = (I + dt A)^{-1} [ x_j - dt B(x_j) + sigma(x_j) dW_j
//                               + sum_{jumps in window} g(x_j, z)
//                               - dt * int g(x_j, z) lambda(dz) ]
//
// The stiff linear part is exact on the diagonal basis; the nonlinear and
// noise parts are explicit.  Jump times are drawn once per path from the
// schedule substream, so refining dt re-buckets the same jumps instead of
// redrawing them.

#include <cstdint>
#include <string>
#include <vector>

#include "smhd/noise.hpp"
#include "smhd/operators.hpp"

namespace smhd {

struct IntegratorConfig {
    double dt = 1e-2;
    double t_end = 1.0;
    int record_every = 1;          // sample observables every this many steps
    bool disable_nonlinear = false;
    double blow_up_h2 = 1e12;      // |x|^2 above this throws BlowUpError
};

// Everything an observer needs to reconstruct the energy martingale
//   M(t) = 2 sum_k int (sigma_k, x) dW_k + int int (|g|^2 + 2(g, x)) Ntilde.
struct StepInfo {
    std::uint32_t step = 0;
    double t_new = 0.0;
    const MhdState* x_old = nullptr;
    const MhdState* x_new = nullptr;
    double wiener_dot = 0.0;     // (x_old, sigma(x_old) dW)
    double sigma_hs2 = 0.0;      // |sigma(x_old)|^2_{L_Q}
    double jump_sq = 0.0;        // sum over marks |g|^2
    double jump_dot = 0.0;       // sum over marks (g, x_old)
    double comp_sq = 0.0;        // int |g(x_old, z)|^2 lambda(dz)
    double comp_dot = 0.0;       // int (g(x_old, z), x_old) lambda(dz)
};

class Observer {
public:
    virtual ~Observer() = default;
    virtual void on_step(const StepInfo& info) = 0;
};

struct PathRecord {
    std::vector<double> t;       // recorded times, starting at 0
    std::vector<double> h2;      // |x|^2
    std::vector<double> v2;      // ||x||^2
    std::vector<double> int_v2;  // right-point sum dt * ||x_{j+1}||^2 up to t
    double max_h2 = 0.0;         // sup over every step, not just records
    int jumps = 0;
    MhdState final_state;
};

// (I + dt A)^{-1}, diagonal.
void apply_resolvent(const BasisDescriptor& basis, double dt, MhdState& x);

// One deterministic-part step: x -> (I+dtA)^{-1}(x - dt B(x) + forcing).
MhdState semi_implicit_step(OperatorContext& ctx, const MhdState& x,
                            const MhdState& forcing, double dt,
                            bool disable_nonlinear = false);

PathRecord simulate_path(OperatorContext& ctx, const NoiseModel& noise,
                         const MhdState& x0, const IntegratorConfig& cfg,
                         const StreamId& id, Observer* obs = nullptr);

struct CoupledRecord {
    PathRecord a, b;
    std::vector<double> diff_h2;  // |a - b|^2 at the recorded times
};

// Two states advanced in lockstep under the same noise path.  The contexts
// may have different cutoffs; Wiener increments are shared per wavevector
// and the jump schedule is shared per path, so this covers both the
// two-initial-conditions experiment and the two-resolutions experiment.
CoupledRecord simulate_coupled(OperatorContext& ctx_a, OperatorContext& ctx_b,
                               const NoiseModel& noise_a,
                               const NoiseModel& noise_b, const MhdState& xa0,
                               const MhdState& xb0, const IntegratorConfig& cfg,
                               const StreamId& id, Observer* obs_a = nullptr,
                               Observer* obs_b = nullptr);

// Plain-text state checkpoints (full precision round trip).
void save_state(const MhdState& x, const std::string& path);
MhdState load_state(const std::string& path);

int num_steps(const IntegratorConfig& cfg);

}  // namespace smhd
