#pragma once

// Divergence-free spectral fields on the 2*pi-periodic torus.
//
// A vector field is stored as one complex amplitude per wavevector k using
// the transverse polarization k_perp/|k|, k_perp = (-k2, k1), which makes
// div u = 0 exact by construction.  Only one representative of each
// conjugate pair {k, -k} is kept (k1 > 0, or k1 == 0 and k2 > 0); the field
// is real by implicit conjugate symmetry.  Basis functions are normalized to
// unit L2 norm, so a single stored mode of unit amplitude has |.|_H = 1 and
// the H-norm is the plain (S-weighted) sum of squared amplitudes.
//
// Reconstruction: u(x) = sum_k sqrt(2) * Re[ a_k * (k_perp/|k|) * e^{i k.x} ] / (2*pi).

#include <complex>
#include <memory>
#include <vector>

#include "smhd/errors.hpp"

namespace smhd {

struct WaveIndex {
    int k1 = 0;
    int k2 = 0;
    bool operator==(const WaveIndex&) const = default;
};

enum class FieldKind : int { velocity = 0, magnetic = 1 };

// Basis metadata shared by all states at a given cutoff: wavevector
// enumeration, eigenvalues of the linear operator, and the global mode
// ordering used by P_n and by the noise model.
class BasisDescriptor {
public:
    struct ModeRef {
        FieldKind field;
        int wave;  // index into waves()
    };

    int cutoff() const { return cutoff_; }
    double re() const { return re_; }
    double rm() const { return rm_; }
    double s() const { return s_; }
    double lambda1() const { return lambda1_; }

    const std::vector<WaveIndex>& waves() const { return waves_; }
    int num_waves() const { return int(waves_.size()); }
    int num_modes() const { return 2 * num_waves(); }
    double k_squared(int wave) const { return k2_[wave]; }

    // Eigenvalue of A on the given mode: |k|^2/R_e (velocity) or |k|^2/R_m.
    double eigenvalue(FieldKind f, int wave) const {
        return k2_[wave] / (f == FieldKind::velocity ? re_ : rm_);
    }

    // Modes sorted by (|k|^2, field, k1, k2); velocity before magnetic at
    // equal |k|^2.  This is the ordering behind project() and mark modes.
    const std::vector<ModeRef>& ordered_modes() const { return ordered_; }

    // Index into waves() for a stored representative, -1 if absent.
    int wave_index(int k1, int k2) const;

    friend std::shared_ptr<const BasisDescriptor> make_basis(int, double, double,
                                                             double);

private:
    int cutoff_ = 0;
    double re_ = 1.0, rm_ = 1.0, s_ = 1.0, lambda1_ = 1.0;
    std::vector<WaveIndex> waves_;
    std::vector<double> k2_;
    std::vector<ModeRef> ordered_;
    std::vector<int> lookup_;  // (k1, k2+N) -> wave index
};

using BasisPtr = std::shared_ptr<const BasisDescriptor>;

BasisPtr make_basis(int cutoff, double re, double rm, double s);

// Coefficients of one divergence-free field, aligned with basis.waves().
struct SpectralField {
    int cutoff = 0;
    std::vector<std::complex<double>> coeffs;
};

SpectralField zero_field(const BasisDescriptor& basis);

// State x = (u, B) with the S-weighted inner product of the MHD system.
struct MhdState {
    BasisPtr basis;
    SpectralField u;
    SpectralField b;

    std::complex<double>& coeff(FieldKind f, int wave) {
        return (f == FieldKind::velocity ? u : b).coeffs[wave];
    }
    const std::complex<double>& coeff(FieldKind f, int wave) const {
        return (f == FieldKind::velocity ? u : b).coeffs[wave];
    }
};

MhdState zero_state(BasisPtr basis);

// In-place arithmetic (bases must match).
MhdState& operator+=(MhdState& x, const MhdState& y);
MhdState& operator-=(MhdState& x, const MhdState& y);
MhdState& operator*=(MhdState& x, double c);
MhdState operator+(MhdState x, const MhdState& y);
MhdState operator-(MhdState x, const MhdState& y);
MhdState operator*(double c, MhdState x);
void axpy(double a, const MhdState& x, MhdState& y);  // y += a*x

// [x, y] = (u_x, u_y) + S (B_x, B_y)
double inner_h(const MhdState& x, const MhdState& y);
double norm_h2(const MhdState& x);
double norm_h(const MhdState& x);

// [[x, y]] = (grad u_x, grad u_y) + S (curl B_x, curl B_y)
double inner_v(const MhdState& x, const MhdState& y);
double norm_v2(const MhdState& x);
double norm_v(const MhdState& x);

// Combined L4 norm (|u|_L4^4 + S^2 |B|_L4^4)^(1/4), by grid quadrature.
// gridsize 0 selects 4N+1 rounded up to an FFT-friendly size, which makes
// the quadrature exact for the quartic integrand.
double norm_l4(const MhdState& x, int gridsize = 0);

// Orthogonal projection onto the first n modes of ordered_modes().
MhdState project(const MhdState& x, int n);

// Copy x into a (usually larger) basis, matching modes by wavevector;
// modes absent from the target are dropped.
MhdState embed(const MhdState& x, BasisPtr target);

// Unit-norm real coordinates of the state: mode m of ordered_modes()
// contributes coordinates (2m, 2m+1) = scaled (Re, Im) of its amplitude.
// |x|_H^2 is exactly the sum of squared coordinates.
double real_coordinate(const MhdState& x, int coord);
void add_to_real_coordinate(MhdState& x, int coord, double v);

// Pseudo-spectral grid transforms at a fixed grid size.  Owns FFTW plans
// and scratch; create one per thread.
class GridTransform {
public:
    GridTransform(BasisPtr basis, int gridsize);
    ~GridTransform();
    GridTransform(const GridTransform&) = delete;
    GridTransform& operator=(const GridTransform&) = delete;

    int gridsize() const { return grid_; }
    // Quadrature weight (2*pi/G)^2 of one grid cell.
    double cell_weight() const;

    // Sampled components f_x, f_y at grid points (row-major, x2 fastest).
    void to_grid(const SpectralField& f, std::vector<double>& gx,
                 std::vector<double>& gy);
    // Sampled partial derivatives d(f_j)/d(x_i), i,j in {1,2}.
    void gradient_to_grid(const SpectralField& f, std::vector<double>& d1x,
                          std::vector<double>& d1y, std::vector<double>& d2x,
                          std::vector<double>& d2y);
    // Leray-projected analysis of a sampled vector field back onto the
    // divergence-free basis (inverse of to_grid on band-limited data).
    void from_grid(const std::vector<double>& gx, const std::vector<double>& gy,
                   SpectralField& out);

    // Max |div f| over grid points, via spectral differentiation of the
    // raw (unprojected) sampled field.
    double grid_divergence_max(const std::vector<double>& gx,
                               const std::vector<double>& gy);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    BasisPtr basis_;
    int grid_;
};

// Smallest 2^a 3^b 5^c >= n.
int next_fast_grid(int n);

}  // namespace smhd
