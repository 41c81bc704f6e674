#pragma once

// Q-Wiener and compensated compound-Poisson noise with coefficient families
// whose growth / Lipschitz constants are available in closed form, so the
// standing hypotheses (linear growth with constant K, Lipschitz with
// constant L < 1, p-th growth with constant K1) can be audited numerically.
//
// Shipped families:
//   sigma: additive            s_c(x) = alpha
//          diagonal-damped     s_c(x) = alpha + beta * tanh(x_c)
//   g:     additive            g(x, z) = gamma0 * z
//          multiplicative      g(x, z) = (gamma0 + gamma1 * tanh(|x|)) * z
// Jump marks are z = rho * zeta * e_j with zeta standard normal and e_j a
// unit H-norm basis element drawn uniformly from the first m ordered modes
// (the mark perturbs the real part of the mode amplitude).

#include <cstdint>
#include <vector>

#include "smhd/rng.hpp"
#include "smhd/spectral.hpp"

namespace smhd {

struct WienerSpec {
    // Q eigenvalue per (field, wave), aligned with basis enumeration:
    // index = field * num_waves + wave.  Zero beyond the support radius.
    std::vector<double> q;
    double trace_q = 0.0;
    double max_q = 0.0;
};

// q(k) = q0 |k|^{-2 decay} on modes with max(|k1|,|k2|) <= kmax (both fields).
// If trace_target > 0 the spectrum is rescaled to that trace.
WienerSpec make_wiener(const BasisDescriptor& basis, double q0, double decay,
                       int kmax, double trace_target = 0.0);

enum class SigmaKind { additive, diagonal_damped };
enum class GKind { additive, multiplicative_bounded };

struct SigmaFamily {
    SigmaKind kind = SigmaKind::additive;
    double alpha = 0.0;
    double beta = 0.0;
};

struct JumpSpec {
    double intensity = 0.0;   // nu, jumps per unit time (finite Levy measure)
    double mark_amp = 0.0;    // rho
    int mark_modes = 1;       // m, marks on the first m ordered modes
    GKind g_kind = GKind::additive;
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double mark_mean = 0.0;   // non-zero requires the MC compensator
    bool mc_compensator = false;
    int mc_samples = 20000;
};

struct NoiseConstants {
    double k_sigma = 0.0, l_sigma = 0.0;
    double k_g = 0.0, l_g = 0.0;
    double k = 0.0;       // (H.2)
    double l = 0.0;       // (H.3), must be < 1
    double k1 = 0.0;      // p-th growth at the stored p
    double p = 2.0;
    double m1 = 0.0;      // lim sum_k |sigma_k|^2 (additive sigma)
    double m3 = 0.0;      // lim int |g|^2 dlambda (additive g)
    double lambda_z = 0.0;
};

class NoiseModel {
public:
    NoiseModel(BasisPtr basis, WienerSpec wiener, SigmaFamily sigma,
               JumpSpec jump, double p = 2.0);

    const BasisPtr& basis() const { return basis_; }
    const WienerSpec& wiener() const { return wiener_; }
    const SigmaFamily& sigma() const { return sigma_; }
    const JumpSpec& jump() const { return jump_; }
    const NoiseConstants& constants() const { return constants_; }
    NoiseConstants constants_at(double p) const;

    // State-independent sigma and g (required by the stability experiments).
    bool additive() const {
        return sigma_.kind == SigmaKind::additive &&
               jump_.g_kind == GKind::additive;
    }
    bool noise_free() const;

    // Q-Wiener increment over dt as a state (unit-norm coordinates get
    // independent N(0, q/2 dt) real and imaginary parts).  Streams are keyed
    // by wavevector so resolutions of the same path share increments.
    MhdState sample_wiener_increment(double dt, const StreamId& id,
                                     std::uint32_t step) const;

    // sigma(t, x) applied to a Wiener increment.
    MhdState apply_sigma(const MhdState& x, const MhdState& dw) const;

    // |sigma(t, x)|^2_{L_Q} = sum_c q_c s_c(x)^2
    double sigma_hs_norm2(const MhdState& x) const;

    // |sigma(x) - sigma(y)|^2_{L_Q}
    double sigma_lipschitz_gap(const MhdState& x, const MhdState& y) const;

    // int_Z |g(x, z) - g(y, z)|^2 lambda(dz), closed form for the families.
    double g_lipschitz_gap(const MhdState& x, const MhdState& y) const;
    double g_growth2(const MhdState& x) const;  // int |g(x,z)|^2 lambda(dz)

    // Jump increment g(x, z) for one mark.
    struct Mark {
        double time = 0.0;
        int mode = 0;      // ordered-mode index
        double zeta = 0.0; // standard normal draw
    };
    MhdState apply_g(const MhdState& x, const Mark& mark) const;
    double mark_h_norm2(const Mark& mark) const;  // |z|^2 = rho^2 zeta^2

    // int_Z g(x, z) lambda(dz); identically zero for centered marks.
    MhdState compensator_drift(const MhdState& x, const StreamId& id) const;

    // All jump times and marks on [0, t_end], drawn independently of dt.
    std::vector<Mark> sample_jump_schedule(double t_end,
                                           const StreamId& id) const;
    // Marks in one window of length dt (window index = step).
    std::vector<Mark> sample_jumps(double dt, const StreamId& id,
                                   std::uint32_t step) const;

private:
    BasisPtr basis_;
    WienerSpec wiener_;
    SigmaFamily sigma_;
    JumpSpec jump_;
    NoiseConstants constants_;
};

// p-th absolute moment of a standard normal.
double gaussian_abs_moment(double p);

}  // namespace smhd
