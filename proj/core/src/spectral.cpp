#include "smhd/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace smhd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Amplitude-to-spectrum scale: unit amplitude <-> unit L2 norm.
const double kSynthScale = 1.0 / (std::sqrt(2.0) * kTwoPi);

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void check_same_basis(const MhdState& x, const MhdState& y) {
    if (x.basis.get() != y.basis.get() &&
        (x.basis->cutoff() != y.basis->cutoff() || x.basis->s() != y.basis->s()))
        throw InvalidParameterError("states use different bases");
}

}  // namespace

BasisPtr make_basis(int cutoff, double re, double rm, double s) {
    if (cutoff < 1) throw InvalidParameterError("cutoff must be >= 1");
    if (!(re > 0.0) || !(rm > 0.0) || !(s > 0.0))
        throw InvalidParameterError("R_e, R_m, S must be positive");

    auto basis = std::make_shared<BasisDescriptor>();
    basis->cutoff_ = cutoff;
    basis->re_ = re;
    basis->rm_ = rm;
    basis->s_ = s;
    basis->lambda1_ = std::min(1.0 / re, 1.0 / rm);

    const int n = cutoff;
    basis->lookup_.assign(std::size_t(n + 1) * (2 * n + 1), -1);
    // Half-plane representatives: k1 > 0, or k1 == 0 and k2 > 0.
    for (int k1 = 0; k1 <= n; ++k1) {
        for (int k2 = (k1 == 0 ? 1 : -n); k2 <= n; ++k2) {
            const int idx = int(basis->waves_.size());
            basis->waves_.push_back({k1, k2});
            basis->k2_.push_back(double(k1) * k1 + double(k2) * k2);
            basis->lookup_[std::size_t(k1) * (2 * n + 1) + (k2 + n)] = idx;
        }
    }

    basis->ordered_.reserve(2 * basis->waves_.size());
    for (int f = 0; f < 2; ++f)
        for (int w = 0; w < int(basis->waves_.size()); ++w)
            basis->ordered_.push_back({FieldKind(f), w});
    std::sort(basis->ordered_.begin(), basis->ordered_.end(),
              [&](const BasisDescriptor::ModeRef& a,
                  const BasisDescriptor::ModeRef& b) {
                  const auto& wa = basis->waves_[a.wave];
                  const auto& wb = basis->waves_[b.wave];
                  return std::make_tuple(basis->k2_[a.wave], int(a.field), wa.k1,
                                         wa.k2) <
                         std::make_tuple(basis->k2_[b.wave], int(b.field), wb.k1,
                                         wb.k2);
              });
    return basis;
}

int BasisDescriptor::wave_index(int k1, int k2) const {
    if (k1 < 0 || k1 > cutoff_ || k2 < -cutoff_ || k2 > cutoff_) return -1;
    return lookup_[std::size_t(k1) * (2 * cutoff_ + 1) + (k2 + cutoff_)];
}

SpectralField zero_field(const BasisDescriptor& basis) {
    return {basis.cutoff(), std::vector<std::complex<double>>(basis.num_waves())};
}

MhdState zero_state(BasisPtr basis) {
    MhdState x;
    x.u = zero_field(*basis);
    x.b = zero_field(*basis);
    x.basis = std::move(basis);
    return x;
}

MhdState& operator+=(MhdState& x, const MhdState& y) {
    check_same_basis(x, y);
    for (std::size_t i = 0; i < x.u.coeffs.size(); ++i) {
        x.u.coeffs[i] += y.u.coeffs[i];
        x.b.coeffs[i] += y.b.coeffs[i];
    }
    return x;
}

MhdState& operator-=(MhdState& x, const MhdState& y) {
    check_same_basis(x, y);
    for (std::size_t i = 0; i < x.u.coeffs.size(); ++i) {
        x.u.coeffs[i] -= y.u.coeffs[i];
        x.b.coeffs[i] -= y.b.coeffs[i];
    }
    return x;
}

MhdState& operator*=(MhdState& x, double c) {
    for (std::size_t i = 0; i < x.u.coeffs.size(); ++i) {
        x.u.coeffs[i] *= c;
        x.b.coeffs[i] *= c;
    }
    return x;
}

MhdState operator+(MhdState x, const MhdState& y) { return x += y; }
MhdState operator-(MhdState x, const MhdState& y) { return x -= y; }
MhdState operator*(double c, MhdState x) { return x *= c; }

void axpy(double a, const MhdState& x, MhdState& y) {
    check_same_basis(x, y);
    for (std::size_t i = 0; i < x.u.coeffs.size(); ++i) {
        y.u.coeffs[i] += a * x.u.coeffs[i];
        y.b.coeffs[i] += a * x.b.coeffs[i];
    }
}

double inner_h(const MhdState& x, const MhdState& y) {
    check_same_basis(x, y);
    const double s = x.basis->s();
    double acc_u = 0.0, acc_b = 0.0;
    for (std::size_t i = 0; i < x.u.coeffs.size(); ++i) {
        acc_u += std::real(std::conj(x.u.coeffs[i]) * y.u.coeffs[i]);
        acc_b += std::real(std::conj(x.b.coeffs[i]) * y.b.coeffs[i]);
    }
    return acc_u + s * acc_b;
}

double norm_h2(const MhdState& x) {
    const double s = x.basis->s();
    double acc_u = 0.0, acc_b = 0.0;
    for (std::size_t i = 0; i < x.u.coeffs.size(); ++i) {
        acc_u += std::norm(x.u.coeffs[i]);
        acc_b += std::norm(x.b.coeffs[i]);
    }
    return acc_u + s * acc_b;
}

double norm_h(const MhdState& x) { return std::sqrt(norm_h2(x)); }

double inner_v(const MhdState& x, const MhdState& y) {
    check_same_basis(x, y);
    const double s = x.basis->s();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.u.coeffs.size(); ++i) {
        const double k2 = x.basis->k_squared(int(i));
        acc += k2 * (std::real(std::conj(x.u.coeffs[i]) * y.u.coeffs[i]) +
                     s * std::real(std::conj(x.b.coeffs[i]) * y.b.coeffs[i]));
    }
    return acc;
}

double norm_v2(const MhdState& x) {
    const double s = x.basis->s();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.u.coeffs.size(); ++i) {
        const double k2 = x.basis->k_squared(int(i));
        acc += k2 * (std::norm(x.u.coeffs[i]) + s * std::norm(x.b.coeffs[i]));
    }
    return acc;
}

double norm_v(const MhdState& x) { return std::sqrt(norm_v2(x)); }

MhdState project(const MhdState& x, int n) {
    const auto& ordered = x.basis->ordered_modes();
    if (n < 0 || n > int(ordered.size()))
        throw InvalidParameterError("projection order exceeds available modes");
    MhdState out = zero_state(x.basis);
    for (int m = 0; m < n; ++m)
        out.coeff(ordered[m].field, ordered[m].wave) =
            x.coeff(ordered[m].field, ordered[m].wave);
    return out;
}

MhdState embed(const MhdState& x, BasisPtr target) {
    MhdState out = zero_state(std::move(target));
    for (int w = 0; w < x.basis->num_waves(); ++w) {
        const auto [k1, k2] = x.basis->waves()[w];
        const int tw = out.basis->wave_index(k1, k2);
        if (tw < 0) continue;
        out.u.coeffs[tw] = x.u.coeffs[w];
        out.b.coeffs[tw] = x.b.coeffs[w];
    }
    return out;
}

double real_coordinate(const MhdState& x, int coord) {
    const auto& m = x.basis->ordered_modes()[coord / 2];
    const double scale =
        m.field == FieldKind::magnetic ? std::sqrt(x.basis->s()) : 1.0;
    const auto& a = x.coeff(m.field, m.wave);
    return scale * ((coord & 1) ? a.imag() : a.real());
}

void add_to_real_coordinate(MhdState& x, int coord, double v) {
    const auto& m = x.basis->ordered_modes()[coord / 2];
    const double scale =
        m.field == FieldKind::magnetic ? std::sqrt(x.basis->s()) : 1.0;
    auto& a = x.coeff(m.field, m.wave);
    if (coord & 1)
        a += std::complex<double>(0.0, v / scale);
    else
        a += v / scale;
}

int next_fast_grid(int n) {
    for (int g = std::max(n, 2);; ++g) {
        int r = g;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return g;
    }
}

// ---------------------------------------------------------------------------
// GridTransform

struct GridTransform::Impl {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::vector<double> scratch_x, scratch_y;
};

GridTransform::GridTransform(BasisPtr basis, int gridsize)
    : basis_(std::move(basis)), grid_(gridsize) {
    if (grid_ < 2 * basis_->cutoff() + 1)
        throw InvalidParameterError(
            "gridsize too small for alias-free representation (need >= 2N+1)");
    impl_ = std::make_unique<Impl>();
    impl_->buf = fftw_alloc_complex(std::size_t(grid_) * grid_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->fwd = fftw_plan_dft_2d(grid_, grid_, impl_->buf, impl_->buf,
                                  FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_2d(grid_, grid_, impl_->buf, impl_->buf,
                                  FFTW_BACKWARD, FFTW_ESTIMATE);
}

GridTransform::~GridTransform() {
    if (impl_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(impl_->fwd);
        fftw_destroy_plan(impl_->bwd);
        fftw_free(impl_->buf);
    }
}

double GridTransform::cell_weight() const {
    const double h = kTwoPi / grid_;
    return h * h;
}

namespace {

inline std::size_t grid_slot(int k, int g) {
    return std::size_t(k >= 0 ? k : k + g);
}

}  // namespace

void GridTransform::to_grid(const SpectralField& f, std::vector<double>& gx,
                            std::vector<double>& gy) {
    const std::size_t ng = std::size_t(grid_) * grid_;
    gx.resize(ng);
    gy.resize(ng);
    const auto& waves = basis_->waves();
    for (int comp = 0; comp < 2; ++comp) {
        std::memset(impl_->buf, 0, ng * sizeof(fftw_complex));
        for (std::size_t w = 0; w < waves.size(); ++w) {
            const auto [k1, k2] = waves[w];
            const double kn = std::sqrt(basis_->k_squared(int(w)));
            const double pol = (comp == 0 ? -k2 : k1) / kn;
            const std::complex<double> c = f.coeffs[w] * (pol * kSynthScale);
            const std::size_t i = grid_slot(k1, grid_) * grid_ + grid_slot(k2, grid_);
            const std::size_t j =
                grid_slot(-k1, grid_) * grid_ + grid_slot(-k2, grid_);
            impl_->buf[i][0] += c.real();
            impl_->buf[i][1] += c.imag();
            impl_->buf[j][0] += c.real();
            impl_->buf[j][1] -= c.imag();
        }
        fftw_execute(impl_->bwd);
        double* out = (comp == 0 ? gx : gy).data();
        for (std::size_t i = 0; i < ng; ++i) out[i] = impl_->buf[i][0];
    }
}

void GridTransform::gradient_to_grid(const SpectralField& f,
                                     std::vector<double>& d1x,
                                     std::vector<double>& d1y,
                                     std::vector<double>& d2x,
                                     std::vector<double>& d2y) {
    const std::size_t ng = std::size_t(grid_) * grid_;
    const auto& waves = basis_->waves();
    std::vector<double>* outs[2][2] = {{&d1x, &d1y}, {&d2x, &d2y}};
    for (int deriv = 0; deriv < 2; ++deriv) {
        for (int comp = 0; comp < 2; ++comp) {
            std::vector<double>& out = *outs[deriv][comp];
            out.resize(ng);
            std::memset(impl_->buf, 0, ng * sizeof(fftw_complex));
            for (std::size_t w = 0; w < waves.size(); ++w) {
                const auto [k1, k2] = waves[w];
                const double kn = std::sqrt(basis_->k_squared(int(w)));
                const double pol = (comp == 0 ? -k2 : k1) / kn;
                const double kd = (deriv == 0 ? k1 : k2);
                const std::complex<double> c = f.coeffs[w] * (pol * kSynthScale) *
                                               std::complex<double>(0.0, kd);
                const std::size_t i =
                    grid_slot(k1, grid_) * grid_ + grid_slot(k2, grid_);
                const std::size_t j =
                    grid_slot(-k1, grid_) * grid_ + grid_slot(-k2, grid_);
                impl_->buf[i][0] += c.real();
                impl_->buf[i][1] += c.imag();
                impl_->buf[j][0] += c.real();
                impl_->buf[j][1] -= c.imag();
            }
            fftw_execute(impl_->bwd);
            for (std::size_t i = 0; i < ng; ++i) out[i] = impl_->buf[i][0];
        }
    }
}

void GridTransform::from_grid(const std::vector<double>& gx,
                              const std::vector<double>& gy, SpectralField& out) {
    const std::size_t ng = std::size_t(grid_) * grid_;
    if (gx.size() != ng || gy.size() != ng)
        throw InvalidParameterError("grid array size mismatch");
    out.cutoff = basis_->cutoff();
    out.coeffs.assign(basis_->num_waves(), {});
    const auto& waves = basis_->waves();
    const double inv = 1.0 / double(ng);

    // Forward transform of each component, then project onto the
    // transverse polarization (this is the Leray projection).
    auto& sx = impl_->scratch_x;
    auto& sy = impl_->scratch_y;
    sx.resize(2 * ng);
    sy.resize(2 * ng);
    for (int comp = 0; comp < 2; ++comp) {
        const double* in = (comp == 0 ? gx : gy).data();
        for (std::size_t i = 0; i < ng; ++i) {
            impl_->buf[i][0] = in[i];
            impl_->buf[i][1] = 0.0;
        }
        fftw_execute(impl_->fwd);
        double* dst = comp == 0 ? sx.data() : sy.data();
        for (std::size_t i = 0; i < ng; ++i) {
            dst[2 * i] = impl_->buf[i][0] * inv;
            dst[2 * i + 1] = impl_->buf[i][1] * inv;
        }
    }
    for (std::size_t w = 0; w < waves.size(); ++w) {
        const auto [k1, k2] = waves[w];
        const double kn = std::sqrt(basis_->k_squared(int(w)));
        const double px = -k2 / kn, py = k1 / kn;
        const std::size_t i = grid_slot(k1, grid_) * grid_ + grid_slot(k2, grid_);
        const std::complex<double> cx(sx[2 * i], sx[2 * i + 1]);
        const std::complex<double> cy(sy[2 * i], sy[2 * i + 1]);
        out.coeffs[w] = (cx * px + cy * py) / kSynthScale;
    }
}

double GridTransform::grid_divergence_max(const std::vector<double>& gx,
                                          const std::vector<double>& gy) {
    const std::size_t ng = std::size_t(grid_) * grid_;
    // div_hat(k) = i (k1 Cx + k2 Cy), over the full grid spectrum.
    std::vector<std::complex<double>> div(ng);
    for (int comp = 0; comp < 2; ++comp) {
        const double* in = (comp == 0 ? gx : gy).data();
        for (std::size_t i = 0; i < ng; ++i) {
            impl_->buf[i][0] = in[i];
            impl_->buf[i][1] = 0.0;
        }
        fftw_execute(impl_->fwd);
        for (int a = 0; a < grid_; ++a) {
            const int ka = a <= grid_ / 2 ? a : a - grid_;
            for (int b = 0; b < grid_; ++b) {
                const int kb = b <= grid_ / 2 ? b : b - grid_;
                const double k = comp == 0 ? ka : kb;
                const std::size_t i = std::size_t(a) * grid_ + b;
                div[i] += std::complex<double>(0.0, k) *
                          std::complex<double>(impl_->buf[i][0], impl_->buf[i][1]) /
                          double(ng);
            }
        }
    }
    for (std::size_t i = 0; i < ng; ++i) {
        impl_->buf[i][0] = div[i].real();
        impl_->buf[i][1] = div[i].imag();
    }
    fftw_execute(impl_->bwd);
    double mx = 0.0;
    for (std::size_t i = 0; i < ng; ++i)
        mx = std::max(mx, std::abs(impl_->buf[i][0]));
    return mx;
}

// ---------------------------------------------------------------------------
// norm_l4 with a small per-thread transform cache (transforms depend only on
// cutoff and grid size).

namespace {

GridTransform& cached_transform(const BasisPtr& basis, int gridsize) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<GridTransform>>
        cache;
    auto key = std::make_pair(basis->cutoff(), gridsize);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<GridTransform>(basis, gridsize))
                 .first;
    return *it->second;
}

double l4_pow4(GridTransform& tf, const SpectralField& f) {
    thread_local std::vector<double> gx, gy;
    tf.to_grid(f, gx, gy);
    double acc = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double m2 = gx[i] * gx[i] + gy[i] * gy[i];
        acc += m2 * m2;
    }
    return acc * tf.cell_weight();
}

}  // namespace

double norm_l4(const MhdState& x, int gridsize) {
    const int n = x.basis->cutoff();
    // 4N+1 nodes integrate the quartic of a band-N field exactly.
    const int g = gridsize > 0 ? gridsize : next_fast_grid(4 * n + 1);
    GridTransform& tf = cached_transform(x.basis, g);
    const double s = x.basis->s();
    const double q = l4_pow4(tf, x.u) + s * s * l4_pow4(tf, x.b);
    return std::pow(q, 0.25);
}

}  // namespace smhd
