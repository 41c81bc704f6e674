#include "smhd/config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace smhd {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigParseError("bad numeric value for " + key + ": '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigParseError("bad integer value for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigParseError("bad boolean value for " + key + ": '" + v + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          T (*one)(const std::string&, const std::string&)) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(one(key, item));
    }
    if (out.empty()) throw ConfigParseError("empty list for " + key);
    return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ",";
        os << xs[i];
    }
    return os.str();
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    using Setter = std::function<void(ExperimentConfig&, const std::string&,
                                      const std::string&)>;
    static const std::map<std::string, Setter> table = {
#define SMHD_DBL(k, field) \
    {k, [](ExperimentConfig& c, const std::string& kk, const std::string& vv) { \
         c.field = parse_double(kk, vv); }}
#define SMHD_INT(k, field) \
    {k, [](ExperimentConfig& c, const std::string& kk, const std::string& vv) { \
         c.field = int(parse_int(kk, vv)); }}
#define SMHD_STR(k, field) \
    {k, [](ExperimentConfig& c, const std::string&, const std::string& vv) { \
         c.field = vv; }}
#define SMHD_BOOL(k, field) \
    {k, [](ExperimentConfig& c, const std::string& kk, const std::string& vv) { \
         c.field = parse_bool(kk, vv); }}
        SMHD_DBL("physical.re", re),
        SMHD_DBL("physical.rm", rm),
        SMHD_DBL("physical.s", s),
        SMHD_INT("discretization.n", n),
        SMHD_DBL("discretization.dt", dt),
        SMHD_DBL("discretization.t_end", t_end),
        SMHD_INT("discretization.record_every", record_every),
        SMHD_DBL("wiener.q0", q0),
        SMHD_DBL("wiener.decay", q_decay),
        SMHD_INT("wiener.kmax", kmax),
        SMHD_DBL("wiener.trace_target", trace_target),
        SMHD_STR("sigma.kind", sigma_kind),
        SMHD_DBL("sigma.alpha", alpha),
        SMHD_DBL("sigma.beta", beta),
        SMHD_DBL("jump.intensity", intensity),
        SMHD_DBL("jump.mark_amp", mark_amp),
        SMHD_INT("jump.mark_modes", mark_modes),
        SMHD_STR("jump.g_kind", g_kind),
        SMHD_DBL("jump.gamma0", gamma0),
        SMHD_DBL("jump.gamma1", gamma1),
        SMHD_DBL("jump.mark_mean", mark_mean),
        SMHD_BOOL("jump.mc_compensator", mc_compensator),
        SMHD_INT("jump.mc_samples", mc_samples),
        SMHD_STR("x0.kind", x0_kind),
        SMHD_DBL("x0.amplitude", x0_amplitude),
        SMHD_DBL("x0.decay", x0_decay),
        SMHD_DBL("x0.norm", x0_norm),
        SMHD_INT("x0.mode", x0_mode),
        SMHD_DBL("experiment.p", p),
        SMHD_DBL("experiment.delta", delta),
        SMHD_DBL("experiment.eps", eps),
        SMHD_DBL("experiment.radius", radius),
        SMHD_INT("experiment.m_paths", m_paths),
        SMHD_INT("experiment.samples", samples),
        SMHD_DBL("experiment.burn_in", burn_in),
        {"experiment.cutoffs",
         [](ExperimentConfig& c, const std::string& kk, const std::string& vv) {
             auto xs = parse_list<long long>(kk, vv, parse_int);
             c.cutoffs.assign(xs.begin(), xs.end());
         }},
        SMHD_DBL("ou.lambda", ou_lambda),
        SMHD_DBL("ou.sigma0", ou_sigma0),
        SMHD_DBL("ou.q", ou_q),
        SMHD_DBL("ou.nu", ou_nu),
        SMHD_DBL("ou.rho", ou_rho),
        SMHD_DBL("ou.x0", ou_x0),
        {"ou.dts",
         [](ExperimentConfig& c, const std::string& kk, const std::string& vv) {
             c.ou_dts = parse_list<double>(kk, vv, parse_double);
         }},
        SMHD_INT("ou.match_paths", ou_match_paths),
        SMHD_INT("ou.slope_paths", ou_slope_paths),
        {"run.seed",
         [](ExperimentConfig& c, const std::string& kk, const std::string& vv) {
             c.seed = std::uint64_t(parse_int(kk, vv));
         }},
        SMHD_INT("run.threads", threads),
#undef SMHD_DBL
#undef SMHD_INT
#undef SMHD_STR
#undef SMHD_BOOL
    };
    const auto it = table.find(key);
    if (it == table.end())
        throw ConfigParseError("unknown configuration key: " + key);
    it->second(*this, key, v);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text,
                                         const std::string& origin) {
    ExperimentConfig cfg;
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigParseError(origin + ": " + e.what());
        }
        for (const auto& [section, body] : j.items()) {
            if (!body.is_object())
                throw ConfigParseError(origin + ": section '" + section +
                                       "' must be an object");
            for (const auto& [key, value] : body.items()) {
                std::string v;
                if (value.is_string())
                    v = value.get<std::string>();
                else if (value.is_array()) {
                    for (std::size_t i = 0; i < value.size(); ++i) {
                        if (i) v += ",";
                        v += value[i].dump();
                    }
                } else
                    v = value.dump();
                cfg.set(section + "." + key, v);
            }
        }
        return cfg;
    }
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigParseError(origin + ":" + std::to_string(lineno) +
                                       ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError(origin + ":" + std::to_string(lineno) +
                                   ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (section.empty())
            throw ConfigParseError(origin + ":" + std::to_string(lineno) +
                                   ": key outside any [section]");
        try {
            cfg.set(section + "." + key, line.substr(eq + 1));
        } catch (const ConfigParseError& e) {
            throw ConfigParseError(origin + ":" + std::to_string(lineno) +
                                   ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigParseError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

void ExperimentConfig::echo(std::ostream& os) const {
    os.precision(17);
    os << "[physical]\n"
       << "re = " << re << "\nrm = " << rm << "\ns = " << s << "\n\n"
       << "[discretization]\n"
       << "n = " << n << "\ndt = " << dt << "\nt_end = " << t_end
       << "\nrecord_every = " << record_every << "\n\n"
       << "[wiener]\n"
       << "q0 = " << q0 << "\ndecay = " << q_decay << "\nkmax = " << kmax
       << "\ntrace_target = " << trace_target << "\n\n"
       << "[sigma]\n"
       << "kind = " << sigma_kind << "\nalpha = " << alpha
       << "\nbeta = " << beta << "\n\n"
       << "[jump]\n"
       << "intensity = " << intensity << "\nmark_amp = " << mark_amp
       << "\nmark_modes = " << mark_modes << "\ng_kind = " << g_kind
       << "\ngamma0 = " << gamma0 << "\ngamma1 = " << gamma1
       << "\nmark_mean = " << mark_mean
       << "\nmc_compensator = " << (mc_compensator ? "true" : "false")
       << "\nmc_samples = " << mc_samples << "\n\n"
       << "[x0]\n"
       << "kind = " << x0_kind << "\namplitude = " << x0_amplitude
       << "\ndecay = " << x0_decay << "\nnorm = " << x0_norm
       << "\nmode = " << x0_mode << "\n\n"
       << "[experiment]\n"
       << "p = " << p << "\ndelta = " << delta << "\neps = " << eps
       << "\nradius = " << radius << "\nm_paths = " << m_paths
       << "\nsamples = " << samples << "\ncutoffs = " << join(cutoffs)
       << "\nburn_in = " << burn_in << "\n\n"
       << "[ou]\n"
       << "lambda = " << ou_lambda << "\nsigma0 = " << ou_sigma0
       << "\nq = " << ou_q << "\nnu = " << ou_nu << "\nrho = " << ou_rho
       << "\nx0 = " << ou_x0 << "\ndts = " << join(ou_dts)
       << "\nmatch_paths = " << ou_match_paths
       << "\nslope_paths = " << ou_slope_paths << "\n\n"
       << "[run]\n"
       << "seed = " << seed << "\nthreads = " << threads << "\n";
}

std::string ExperimentConfig::echo_string() const {
    std::ostringstream os;
    echo(os);
    return os.str();
}

BasisPtr ExperimentConfig::build_basis() const { return build_basis(n); }

BasisPtr ExperimentConfig::build_basis(int cutoff) const {
    return make_basis(cutoff, re, rm, s);
}

NoiseModel ExperimentConfig::build_noise(const BasisPtr& basis) const {
    WienerSpec w = make_wiener(*basis, q0, q_decay, kmax, trace_target);
    SigmaFamily sf;
    if (sigma_kind == "additive")
        sf.kind = SigmaKind::additive;
    else if (sigma_kind == "diagonal-damped")
        sf.kind = SigmaKind::diagonal_damped;
    else
        throw ConfigParseError("unknown sigma.kind: " + sigma_kind);
    sf.alpha = alpha;
    sf.beta = beta;
    JumpSpec js;
    js.intensity = intensity;
    js.mark_amp = mark_amp;
    js.mark_modes = mark_modes;
    if (g_kind == "additive")
        js.g_kind = GKind::additive;
    else if (g_kind == "multiplicative")
        js.g_kind = GKind::multiplicative_bounded;
    else
        throw ConfigParseError("unknown jump.g_kind: " + g_kind);
    js.gamma0 = gamma0;
    js.gamma1 = gamma1;
    js.mark_mean = mark_mean;
    js.mc_compensator = mc_compensator;
    js.mc_samples = mc_samples;
    return NoiseModel(basis, std::move(w), sf, js);
}

IntegratorConfig ExperimentConfig::build_integrator() const {
    IntegratorConfig ic;
    ic.dt = dt;
    ic.t_end = t_end;
    ic.record_every = record_every;
    return ic;
}

MhdState ExperimentConfig::build_x0(const BasisPtr& basis) const {
    MhdState x = zero_state(basis);
    if (x0_kind == "zero") {
        return x;
    } else if (x0_kind == "random") {
        x = random_state(basis, seed ^ 0xA5A5A5A5u, 0, x0_amplitude, x0_decay);
    } else if (x0_kind == "mode") {
        add_to_real_coordinate(x, 2 * x0_mode, x0_amplitude);
    } else {
        throw ConfigParseError("unknown x0.kind: " + x0_kind);
    }
    if (x0_norm > 0.0) {
        const double h = norm_h(x);
        if (h == 0.0)
            throw InvalidParameterError("cannot rescale a zero initial state");
        x *= x0_norm / h;
    }
    return x;
}

OuParams ExperimentConfig::build_ou() const {
    OuParams o;
    o.lambda = ou_lambda;
    o.sigma0 = ou_sigma0;
    o.q = ou_q;
    o.nu = ou_nu;
    o.rho = ou_rho;
    o.x0 = ou_x0;
    return o;
}

}  // namespace smhd
