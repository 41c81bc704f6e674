#include "smhd/operators.hpp"

#include <cmath>

namespace smhd {

OperatorContext::OperatorContext(BasisPtr basis, int gridsize)
    : basis_(std::move(basis)) {
    const int n = basis_->cutoff();
    const int g = gridsize > 0 ? gridsize : next_fast_grid(3 * n + 1);
    if (g < 3 * n + 1)
        throw InvalidParameterError("dealias grid must be >= 3N+1");
    tf_ = std::make_unique<GridTransform>(basis_, g);
}

void OperatorContext::check(const MhdState& x) const {
    if (x.basis->cutoff() != basis_->cutoff() || x.basis->s() != basis_->s())
        throw InvalidParameterError("state cutoff does not match context");
}

MhdState OperatorContext::apply_a(const MhdState& x) const {
    check(x);
    MhdState out = zero_state(x.basis);
    for (int w = 0; w < basis_->num_waves(); ++w) {
        out.u.coeffs[w] =
            x.u.coeffs[w] * basis_->eigenvalue(FieldKind::velocity, w);
        out.b.coeffs[w] =
            x.b.coeffs[w] * basis_->eigenvalue(FieldKind::magnetic, w);
    }
    return out;
}

double OperatorContext::bilinear_a(const MhdState& x, const MhdState& y) const {
    check(x);
    check(y);
    const double s = basis_->s();
    double acc = 0.0;
    for (int w = 0; w < basis_->num_waves(); ++w) {
        const double k2 = basis_->k_squared(w);
        acc += k2 * (std::real(std::conj(x.u.coeffs[w]) * y.u.coeffs[w]) /
                         basis_->re() +
                     s * std::real(std::conj(x.b.coeffs[w]) * y.b.coeffs[w]) /
                         basis_->rm());
    }
    return acc;
}

MhdState OperatorContext::apply_b(const MhdState& x1, const MhdState& x2) {
    check(x1);
    check(x2);
    const double s = basis_->s();
    tf_->to_grid(x1.u, au_x_, au_y_);
    tf_->to_grid(x1.b, ab_x_, ab_y_);
    // du_[2*i + j] = sampled d(u2_j)/d(x_i), likewise db_ for the B field.
    tf_->gradient_to_grid(x2.u, du_[0], du_[1], du_[2], du_[3]);
    tf_->gradient_to_grid(x2.b, db_[0], db_[1], db_[2], db_[3]);

    const std::size_t ng = au_x_.size();
    velx_.resize(ng);
    vely_.resize(ng);
    magx_.resize(ng);
    magy_.resize(ng);
    for (std::size_t i = 0; i < ng; ++i) {
        const double ux = au_x_[i], uy = au_y_[i];
        const double bx = ab_x_[i], by = ab_y_[i];
        // (a.grad)c_j = a_x d1 c_j + a_y d2 c_j
        const double u_adv_u_x = ux * du_[0][i] + uy * du_[2][i];
        const double u_adv_u_y = ux * du_[1][i] + uy * du_[3][i];
        const double b_adv_b_x = bx * db_[0][i] + by * db_[2][i];
        const double b_adv_b_y = bx * db_[1][i] + by * db_[3][i];
        const double u_adv_b_x = ux * db_[0][i] + uy * db_[2][i];
        const double u_adv_b_y = ux * db_[1][i] + uy * db_[3][i];
        const double b_adv_u_x = bx * du_[0][i] + by * du_[2][i];
        const double b_adv_u_y = bx * du_[1][i] + by * du_[3][i];
        velx_[i] = u_adv_u_x - s * b_adv_b_x;
        vely_[i] = u_adv_u_y - s * b_adv_b_y;
        magx_[i] = u_adv_b_x - b_adv_u_x;
        magy_[i] = u_adv_b_y - b_adv_u_y;
    }

    MhdState out = zero_state(x1.basis);
    tf_->from_grid(velx_, vely_, out.u);
    tf_->from_grid(magx_, magy_, out.b);
    return out;
}

double OperatorContext::trilinear(const MhdState& x1, const MhdState& x2,
                                  const MhdState& x3) {
    return inner_h(apply_b(x1, x2), x3);
}

MhdState OperatorContext::apply_f(const MhdState& x) {
    MhdState out = apply_b(x, x);
    for (int w = 0; w < basis_->num_waves(); ++w) {
        out.u.coeffs[w] = -out.u.coeffs[w] -
                          x.u.coeffs[w] *
                              basis_->eigenvalue(FieldKind::velocity, w);
        out.b.coeffs[w] = -out.b.coeffs[w] -
                          x.b.coeffs[w] *
                              basis_->eigenvalue(FieldKind::magnetic, w);
    }
    return out;
}

double OperatorContext::dual_norm(const MhdState& y) const {
    check(y);
    const double s = basis_->s();
    double acc = 0.0;
    for (int w = 0; w < basis_->num_waves(); ++w) {
        const double k2 = basis_->k_squared(w);
        acc += (std::norm(y.u.coeffs[w]) + s * std::norm(y.b.coeffs[w])) / k2;
    }
    return std::sqrt(acc);
}

double young_quartic_constant(double eps) {
    if (!(eps > 0.0)) throw InvalidParameterError("eps must be positive");
    return 27.0 / (256.0 * eps * eps * eps);
}

MhdState random_state(const BasisPtr& basis, std::uint64_t seed,
                      std::uint32_t index, double amplitude, double decay) {
    MhdState x = zero_state(basis);
    const StreamId id{seed, index};
    for (int f = 0; f < 2; ++f) {
        for (int w = 0; w < basis->num_waves(); ++w) {
            const auto [k1, k2] = basis->waves()[w];
            const auto g = gaussian_pair(id, Substream::calibration,
                                         mode_stream_key(f, k1, k2), 0);
            const double scale =
                amplitude * std::pow(basis->k_squared(w), -0.5 * decay);
            x.coeff(FieldKind(f), w) = std::complex<double>(g.a, g.b) * scale;
        }
    }
    return x;
}

double calibrate_ladyzhenskaya(const BasisPtr& basis, int samples,
                               std::uint64_t seed, double safety_factor) {
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        // Vary the spectral slope to probe both rough and concentrated fields.
        const double decay = double(i % 4) * 0.5;
        MhdState x = random_state(basis, seed, std::uint32_t(i), 1.0, decay);
        const double h = norm_h(x), v = norm_v(x);
        if (h == 0.0 || v == 0.0) continue;
        const double l4 = norm_l4(x);
        best = std::max(best, l4 * l4 / (h * v));
    }
    return best * safety_factor;
}

MonotonicityCheck check_local_monotonicity(OperatorContext& ctx,
                                           const MhdState& x, const MhdState& y,
                                           double eps, double c_ladyzhenskaya) {
    if (!(eps > 0.0 && eps < 1.0))
        throw InvalidParameterError("eps must lie in (0, 1)");
    MonotonicityCheck out;
    MhdState w = x - y;
    const MhdState df = ctx.apply_f(x) - ctx.apply_f(y);
    out.r = norm_l4(y);
    out.lhs = inner_h(df, w);
    const double cl4 = std::pow(c_ladyzhenskaya, 4);
    out.rhs = (-1.0 + eps) * norm_v2(w) +
              young_quartic_constant(eps) * cl4 * norm_h2(w) * std::pow(out.r, 4);
    out.margin = out.rhs - out.lhs;
    const double scale =
        std::max({1.0, std::abs(out.lhs), std::abs(out.rhs)});
    out.ok = out.margin >= -1e-10 * scale;

    out.holder_lhs = std::abs(ctx.trilinear(w, w, y));
    out.holder_rhs = norm_l4(w) * norm_v(w) * out.r;
    out.holder_ratio = out.holder_rhs > 0.0 ? out.holder_lhs / out.holder_rhs : 0.0;
    out.holder_ok =
        out.holder_lhs <= out.holder_rhs + 1e-10 * std::max(1.0, out.holder_rhs);
    return out;
}

}  // namespace smhd
