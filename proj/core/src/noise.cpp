#include "smhd/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace smhd {

namespace {

// E|m + Z|^p for Z ~ N(0,1), by trapezoid quadrature on [-12, 12].
double shifted_abs_moment(double mean, double p) {
    const int n = 4000;
    const double a = -12.0, h = 24.0 / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double z = a + i * h;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * std::pow(std::abs(mean + z), p) *
               std::exp(-0.5 * z * z);
    }
    return acc * h / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double gaussian_abs_moment(double p) {
    return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) /
           std::sqrt(std::numbers::pi);
}

WienerSpec make_wiener(const BasisDescriptor& basis, double q0, double decay,
                       int kmax, double trace_target) {
    if (q0 < 0.0) throw InvalidParameterError("q0 must be >= 0");
    WienerSpec spec;
    spec.q.assign(std::size_t(2) * basis.num_waves(), 0.0);
    for (int f = 0; f < 2; ++f) {
        for (int w = 0; w < basis.num_waves(); ++w) {
            const auto [k1, k2] = basis.waves()[w];
            if (std::max(std::abs(k1), std::abs(k2)) > kmax) continue;
            spec.q[std::size_t(f) * basis.num_waves() + w] =
                q0 * std::pow(basis.k_squared(w), -decay);
        }
    }
    double trace = 0.0;
    for (double q : spec.q) trace += q;
    if (trace_target > 0.0) {
        if (trace == 0.0)
            throw InvalidParameterError("cannot rescale an empty spectrum");
        const double c = trace_target / trace;
        for (double& q : spec.q) q *= c;
        trace = trace_target;
    }
    spec.trace_q = trace;
    spec.max_q = spec.q.empty() ? 0.0 : *std::max_element(spec.q.begin(), spec.q.end());
    return spec;
}

NoiseModel::NoiseModel(BasisPtr basis, WienerSpec wiener, SigmaFamily sigma,
                       JumpSpec jump, double p)
    : basis_(std::move(basis)),
      wiener_(std::move(wiener)),
      sigma_(sigma),
      jump_(jump) {
    if (wiener_.q.size() != std::size_t(basis_->num_modes()))
        throw InvalidParameterError("Q spectrum size does not match basis");
    if (jump_.intensity < 0.0)
        throw InvalidParameterError("jump intensity must be >= 0");
    if (jump_.mark_amp < 0.0)
        throw InvalidParameterError("mark amplitude must be >= 0");
    if (jump_.mark_modes < 1 || jump_.mark_modes > basis_->num_modes())
        throw InvalidParameterError("mark_modes out of range");
    constants_ = constants_at(p);
    if (constants_.l >= 1.0)
        throw HypothesisViolationError(
            "joint Lipschitz constant L = " + std::to_string(constants_.l) +
            " is not < 1");
}

NoiseConstants NoiseModel::constants_at(double p) const {
    if (p < 2.0) throw InvalidParameterError("p must be >= 2");
    NoiseConstants c;
    c.p = p;
    const double a = sigma_.alpha, b = sigma_.beta;
    c.k_sigma = (std::abs(a) + std::abs(b)) * (std::abs(a) + std::abs(b)) *
                wiener_.trace_q;
    c.l_sigma = sigma_.kind == SigmaKind::additive
                    ? 0.0
                    : b * b * 0.5 * wiener_.max_q;
    c.m1 = a * a * wiener_.trace_q;

    const double ez2 = 1.0 + jump_.mark_mean * jump_.mark_mean;
    const double rho2 = jump_.mark_amp * jump_.mark_amp;
    c.lambda_z = jump_.intensity;
    const double g_sup = std::abs(jump_.gamma0) + std::abs(jump_.gamma1);
    c.k_g = g_sup * g_sup * jump_.intensity * rho2 * ez2;
    c.l_g = jump_.g_kind == GKind::additive
                ? 0.0
                : jump_.gamma1 * jump_.gamma1 * jump_.intensity * rho2 * ez2;
    c.m3 = jump_.gamma0 * jump_.gamma0 * jump_.intensity * rho2;

    c.k = c.k_sigma + c.k_g;
    c.l = c.l_sigma + c.l_g;

    const double ezp = jump_.mark_mean == 0.0
                           ? gaussian_abs_moment(p)
                           : shifted_abs_moment(jump_.mark_mean, p);
    c.k1 = std::pow(g_sup, p) * jump_.intensity *
           std::pow(jump_.mark_amp, p) * ezp;
    return c;
}

bool NoiseModel::noise_free() const {
    const bool sigma_off = wiener_.trace_q == 0.0 ||
                           (sigma_.alpha == 0.0 && sigma_.beta == 0.0);
    const bool jump_off = jump_.intensity == 0.0 || jump_.mark_amp == 0.0 ||
                          (jump_.gamma0 == 0.0 && jump_.gamma1 == 0.0);
    return sigma_off && jump_off;
}

MhdState NoiseModel::sample_wiener_increment(double dt, const StreamId& id,
                                             std::uint32_t step) const {
    MhdState dw = zero_state(basis_);
    const double s = basis_->s();
    const int nw = basis_->num_waves();
    for (int f = 0; f < 2; ++f) {
        // Magnetic amplitudes carry weight S in the H-norm; divide the
        // increment by sqrt(S) so the Q-eigenvalue is q per unit-norm mode.
        const double field_scale = f == 0 ? 1.0 : 1.0 / std::sqrt(s);
        for (int w = 0; w < nw; ++w) {
            const double q = wiener_.q[std::size_t(f) * nw + w];
            if (q == 0.0) continue;
            const auto [k1, k2] = basis_->waves()[w];
            const auto g = gaussian_pair(id, Substream::wiener,
                                         mode_stream_key(f, k1, k2), step);
            const double amp = std::sqrt(0.5 * q * dt) * field_scale;
            dw.coeff(FieldKind(f), w) = std::complex<double>(g.a, g.b) * amp;
        }
    }
    return dw;
}

MhdState NoiseModel::apply_sigma(const MhdState& x, const MhdState& dw) const {
    if (sigma_.kind == SigmaKind::additive) {
        MhdState out = dw;
        out *= sigma_.alpha;
        return out;
    }
    MhdState out = zero_state(basis_);
    const int nc = 2 * basis_->num_modes();
    for (int c = 0; c < nc; ++c) {
        const double v = real_coordinate(dw, c);
        if (v == 0.0) continue;
        const double s = sigma_.alpha + sigma_.beta * std::tanh(real_coordinate(x, c));
        add_to_real_coordinate(out, c, s * v);
    }
    return out;
}

double NoiseModel::sigma_hs_norm2(const MhdState& x) const {
    if (sigma_.kind == SigmaKind::additive)
        return sigma_.alpha * sigma_.alpha * wiener_.trace_q;
    // Per-wave eigenvalue q splits evenly across the two real coordinates
    // of the complex amplitude.
    const int nw = basis_->num_waves();
    double acc = 0.0;
    const auto& ordered = basis_->ordered_modes();
    for (std::size_t m = 0; m < ordered.size(); ++m) {
        const double q =
            wiener_.q[std::size_t(int(ordered[m].field)) * nw + ordered[m].wave];
        if (q == 0.0) continue;
        for (int part = 0; part < 2; ++part) {
            const int c = 2 * int(m) + part;
            const double s =
                sigma_.alpha + sigma_.beta * std::tanh(real_coordinate(x, c));
            acc += 0.5 * q * s * s;
        }
    }
    return acc;
}

double NoiseModel::sigma_lipschitz_gap(const MhdState& x,
                                       const MhdState& y) const {
    if (sigma_.kind == SigmaKind::additive) return 0.0;
    const int nw = basis_->num_waves();
    const auto& ordered = basis_->ordered_modes();
    double acc = 0.0;
    for (std::size_t m = 0; m < ordered.size(); ++m) {
        const double q =
            wiener_.q[std::size_t(int(ordered[m].field)) * nw + ordered[m].wave];
        if (q == 0.0) continue;
        for (int part = 0; part < 2; ++part) {
            const int c = 2 * int(m) + part;
            const double d = sigma_.beta * (std::tanh(real_coordinate(x, c)) -
                                            std::tanh(real_coordinate(y, c)));
            acc += 0.5 * q * d * d;
        }
    }
    return acc;
}

double NoiseModel::g_growth2(const MhdState& x) const {
    const double ez2 = 1.0 + jump_.mark_mean * jump_.mark_mean;
    const double rho2 = jump_.mark_amp * jump_.mark_amp;
    double s = jump_.gamma0;
    if (jump_.g_kind == GKind::multiplicative_bounded)
        s += jump_.gamma1 * std::tanh(norm_h(x));
    return s * s * jump_.intensity * rho2 * ez2;
}

double NoiseModel::g_lipschitz_gap(const MhdState& x, const MhdState& y) const {
    if (jump_.g_kind == GKind::additive) return 0.0;
    const double ez2 = 1.0 + jump_.mark_mean * jump_.mark_mean;
    const double rho2 = jump_.mark_amp * jump_.mark_amp;
    const double d = jump_.gamma1 * (std::tanh(norm_h(x)) - std::tanh(norm_h(y)));
    return d * d * jump_.intensity * rho2 * ez2;
}

MhdState NoiseModel::apply_g(const MhdState& x, const Mark& mark) const {
    double s = jump_.gamma0;
    if (jump_.g_kind == GKind::multiplicative_bounded)
        s += jump_.gamma1 * std::tanh(norm_h(x));
    MhdState out = zero_state(basis_);
    add_to_real_coordinate(out, 2 * mark.mode, s * jump_.mark_amp * mark.zeta);
    return out;
}

double NoiseModel::mark_h_norm2(const Mark& mark) const {
    return jump_.mark_amp * jump_.mark_amp * mark.zeta * mark.zeta;
}

MhdState NoiseModel::compensator_drift(const MhdState& x,
                                       const StreamId& id) const {
    MhdState out = zero_state(basis_);
    if (jump_.intensity == 0.0 || jump_.mark_amp == 0.0) return out;
    if (!jump_.mc_compensator) {
        if (jump_.mark_mean == 0.0) return out;
        double s = jump_.gamma0;
        if (jump_.g_kind == GKind::multiplicative_bounded)
            s += jump_.gamma1 * std::tanh(norm_h(x));
        const double amp = s * jump_.mark_amp * jump_.mark_mean *
                           jump_.intensity / jump_.mark_modes;
        for (int j = 0; j < jump_.mark_modes; ++j)
            add_to_real_coordinate(out, 2 * j, amp);
        return out;
    }
    // Monte Carlo estimate of nu * E[g(x, Z)], fixed stream so the estimate
    // is deterministic for a given seed.
    for (int i = 0; i < jump_.mc_samples; ++i) {
        Mark m;
        m.mode = int(uniform(id, Substream::calibration, 1, std::uint32_t(i)) *
                     jump_.mark_modes);
        m.mode = std::min(m.mode, jump_.mark_modes - 1);
        m.zeta = jump_.mark_mean +
                 gaussian_pair(id, Substream::calibration, 0, std::uint32_t(i)).a;
        axpy(1.0 / jump_.mc_samples, apply_g(x, m), out);
    }
    out *= jump_.intensity;
    return out;
}

std::vector<NoiseModel::Mark> NoiseModel::sample_jump_schedule(
    double t_end, const StreamId& id) const {
    std::vector<Mark> marks;
    if (jump_.intensity == 0.0 || jump_.mark_amp == 0.0) return marks;
    double t = 0.0;
    for (std::uint32_t n = 0;; ++n) {
        const double u = uniform(id, Substream::jump_times, 0, n);
        t += -std::log(u) / jump_.intensity;
        if (t > t_end) break;
        Mark m;
        m.time = t;
        m.mode = int(uniform(id, Substream::jump_marks, 1, n) * jump_.mark_modes);
        m.mode = std::min(m.mode, jump_.mark_modes - 1);
        m.zeta = jump_.mark_mean +
                 gaussian_pair(id, Substream::jump_marks, 0, n).a;
        marks.push_back(m);
    }
    return marks;
}

std::vector<NoiseModel::Mark> NoiseModel::sample_jumps(
    double dt, const StreamId& id, std::uint32_t step) const {
    const double t0 = step * dt, t1 = (step + 1) * dt;
    auto all = sample_jump_schedule(t1, id);
    std::vector<Mark> out;
    for (const auto& m : all)
        if (m.time > t0 && m.time <= t1) out.push_back(m);
    return out;
}

}  // namespace smhd
