#pragma once

// Experiment configuration: flat [section] key=value files, with a JSON
// object of the same shape accepted interchangeably.  Every field has a
// default; the echo always lists all fields fully resolved, and reloading
// an echoed config reproduces identical results.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smhd/harness.hpp"

namespace smhd {

struct ExperimentConfig {
    // physical
    double re = 1.0, rm = 1.0, s = 1.0;
    // discretization
    int n = 16;
    double dt = 0.01, t_end = 1.0;
    int record_every = 1;
    // wiener
    double q0 = 1.0, q_decay = 2.0;
    int kmax = 2;
    double trace_target = 0.1;
    // sigma
    std::string sigma_kind = "additive";  // or "diagonal-damped"
    double alpha = 1.0, beta = 0.0;
    // jump
    double intensity = 0.0, mark_amp = 0.0;
    int mark_modes = 1;
    std::string g_kind = "additive";  // or "multiplicative"
    double gamma0 = 1.0, gamma1 = 0.0, mark_mean = 0.0;
    bool mc_compensator = false;
    int mc_samples = 20000;
    // initial state
    std::string x0_kind = "random";  // zero | random | mode
    double x0_amplitude = 1.0, x0_decay = 1.0;
    double x0_norm = -1.0;  // > 0 rescales |x0|_H to this value
    int x0_mode = 0;        // ordered-mode index for x0_kind = mode
    // experiment
    double p = 4.0, delta = 0.0, eps = 0.5, radius = 1.0;
    int m_paths = 100, samples = 10000;
    std::vector<int> cutoffs = {8, 16, 32};
    double burn_in = 0.0;
    // ou surrogate
    double ou_lambda = 1.0, ou_sigma0 = 1.0, ou_q = 0.1, ou_nu = 1.0,
           ou_rho = 0.3, ou_x0 = 1.0;
    std::vector<double> ou_dts = {0.0625, 0.03125, 0.015625, 0.0078125};
    int ou_match_paths = 100000, ou_slope_paths = 200000;
    // run
    std::uint64_t seed = 1;
    int threads = 1;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(const std::string& text,
                                  const std::string& origin = "<string>");

    // key is "section.name"; throws ConfigParseError on unknown keys or
    // unparseable values.
    void set(const std::string& key, const std::string& value);

    void echo(std::ostream& os) const;
    std::string echo_string() const;

    // Construction of the model objects; validates ranges.
    BasisPtr build_basis() const;
    BasisPtr build_basis(int cutoff) const;
    NoiseModel build_noise(const BasisPtr& basis) const;
    IntegratorConfig build_integrator() const;
    MhdState build_x0(const BasisPtr& basis) const;
    OuParams build_ou() const;
};

}  // namespace smhd
