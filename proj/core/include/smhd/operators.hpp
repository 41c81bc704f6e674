#pragma once

// The linear operator A, the bilinear operator B built from the trilinear
// convective form, and the drift F = -A - B, plus the local-monotonicity
// audit.  Quadratic terms are evaluated pseudo-spectrally on a dealiased
// grid large enough that the truncated product equals the exact Galerkin
// projection, so the cancellation identities b(x,y,y) = 0 and
// b(x,y,z) = -b(x,z,y) hold to round-off.

#include <memory>

#include "smhd/rng.hpp"
#include "smhd/spectral.hpp"

namespace smhd {

// Holds the basis, dealiased transform and scratch buffers.  Immutable
// configuration, mutable scratch: create one context per worker thread.
class OperatorContext {
public:
    // gridsize 0 selects the smallest FFT-friendly size >= 3N+1, which is
    // exact for quadratic products of band-N fields.
    explicit OperatorContext(BasisPtr basis, int gridsize = 0);

    const BasisPtr& basis() const { return basis_; }
    int dealias_grid() const { return tf_->gridsize(); }

    // Diagonal action of A: a_k -> (|k|^2/R_e) a_k, b_k -> (|k|^2/R_m) b_k.
    MhdState apply_a(const MhdState& x) const;

    // a(x, y) = (1/R_e)[[u_x, u_y]] + (S/R_m)[[B_x, B_y]]
    double bilinear_a(const MhdState& x, const MhdState& y) const;

    // Galerkin projection of the quadratic term:
    //   velocity: P_L[(u1.grad)u2 - S (B1.grad)B2]
    //   magnetic: P_L[(u1.grad)B2 - (B1.grad)u2]
    MhdState apply_b(const MhdState& x1, const MhdState& x2);
    MhdState apply_b(const MhdState& x) { return apply_b(x, x); }

    // b(x1, x2, x3) = [apply_b(x1, x2), x3]
    double trilinear(const MhdState& x1, const MhdState& x2, const MhdState& x3);

    // F(x) = -A x - B(x)
    MhdState apply_f(const MhdState& x);

    // ||y||_{V'} = sqrt(sum |y_k|^2 / |k|^2), S-weighted.
    double dual_norm(const MhdState& y) const;

private:
    void check(const MhdState& x) const;

    BasisPtr basis_;
    std::unique_ptr<GridTransform> tf_;
    std::vector<double> au_x_, au_y_, ab_x_, ab_y_;  // advecting fields on grid
    std::vector<double> du_[4], db_[4];              // gradients of x2 fields
    std::vector<double> velx_, vely_, magx_, magy_;
};

// Scalar Young-inequality constant: sup_{a >= 0} (a b - eps a^{4/3}) =
// C(eps) b^4 with C(eps) = 27 / (256 eps^3).
double young_quartic_constant(double eps);

// Randomized maximization of ||f||_{L4}^2 / (|f| ||f||) over divergence-free
// pair states at the given cutoff, inflated by the given safety factor.
double calibrate_ladyzhenskaya(const BasisPtr& basis, int samples,
                               std::uint64_t seed, double safety_factor = 2.0);

struct MonotonicityCheck {
    double lhs = 0.0;            // (F(x) - F(y), w)
    double rhs = 0.0;            // (-1+eps) ||w||^2 + C(eps) C_L^4 |w|^2 r^4
    double margin = 0.0;         // rhs - lhs
    bool ok = false;
    double holder_lhs = 0.0;     // |b(w, w, y)|
    double holder_rhs = 0.0;     // ||w||_L4 ||w|| ||y||_L4
    double holder_ratio = 0.0;   // lhs / rhs (0 when rhs == 0)
    bool holder_ok = false;
    double r = 0.0;              // ||y||_L4
};

// Audits (F(x)-F(y), w) <= (-1+eps)||w||^2 + C(eps) C_L^4 |w|^2 r^4 with
// r = ||y||_L4, plus the exact Holder step |b(w,w,y)| <= ||w||_L4 ||w|| ||y||_L4.
MonotonicityCheck check_local_monotonicity(OperatorContext& ctx,
                                           const MhdState& x, const MhdState& y,
                                           double eps, double c_ladyzhenskaya);

// Test-oracle helper: random zero-mean divergence-free state with amplitudes
// ~ N(0,1) per mode scaled by |k|^{-decay}.
MhdState random_state(const BasisPtr& basis, std::uint64_t seed,
                      std::uint32_t index, double amplitude = 1.0,
                      double decay = 0.0);

}  // namespace smhd
