#include "tdgasci/scenario.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace pt = boost::property_tree;

namespace {

std::vector<double> parse_numbers(const std::string& s) {
    std::string t = s;
    for (char& c : t)
        if (c == ',' || c == ';' || c == '[' || c == ']') c = ' ';
    std::istringstream is(t);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (!is.eof()) throw ConfigError("cannot parse number list '" + s + "'");
    return out;
}

std::vector<int> to_ints(const std::vector<double>& v) {
    std::vector<int> out;
    for (double x : v) {
        if (x != std::round(x)) throw ConfigError("expected integers");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T def) {
    try {
        return tree.get<T>(key, def);
    } catch (const pt::ptree_error& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool def) {
    const auto v = tree.get_optional<std::string>(key);
    if (!v) return def;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError("bad boolean for '" + key + "': " + *v);
}

GasBlock parse_gas(const pt::ptree& tree, const std::string& section) {
    GasBlock g;
    const std::string scheme = get<std::string>(tree, section + ".scheme", "");
    g.two_ms = get<int>(tree, section + ".two_ms", 0);
    if (auto short_form = tree.get_optional<std::string>(section + ".cas_star")) {
        static const std::regex kv(R"((\w+)\s*=\s*(-?\d+))");
        g.scheme = GasScheme::cas_star;
        bool has_k = false;
        for (auto it = std::sregex_iterator(short_form->begin(), short_form->end(), kv); it != std::sregex_iterator(); ++it) {
            const std::string key = (*it)[1];
            const int val = std::stoi((*it)[2]);
            if (key == "frozen") {
                g.frozen = val;
            } else if (key == "active_k") {
                g.active_k = val;
                has_k = true;
            } else {
                throw ConfigError("unknown cas_star key '" + key + "'");
            }
        }
        if (!has_k) throw ConfigError("cas_star shorthand needs active_k");
        return g;
    }
    if (scheme.empty() || scheme == "fci") {
        g.scheme = GasScheme::fci;
    } else if (scheme == "sae") {
        g.scheme = GasScheme::sae;
    } else if (scheme == "cas_star") {
        g.scheme = GasScheme::cas_star;
        g.frozen = get<int>(tree, section + ".frozen", 0);
        g.active_k = get<int>(tree, section + ".active_k", 1);
    } else if (scheme == "raw") {
        g.scheme = GasScheme::raw;
        g.boundaries = to_ints(parse_numbers(get<std::string>(tree, section + ".boundaries", "1")));
        const std::string pats = get<std::string>(tree, section + ".patterns", "");
        std::istringstream is(pats);
        std::string one;
        while (std::getline(is, one, ';'))
            if (one.find_first_not_of(" \t") != std::string::npos) g.patterns.push_back(to_ints(parse_numbers(one)));
    } else {
        throw ConfigError("unknown GAS scheme '" + scheme + "'");
    }
    return g;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

GasSpec GasBlock::make(int n_el, int n_b) const {
    switch (scheme) {
        case GasScheme::fci: return make_fci(n_el, n_b, two_ms);
        case GasScheme::sae: return make_sae(n_el, n_b);
        case GasScheme::cas_star: return make_cas_star(n_el, frozen, active_k, n_b);
        case GasScheme::raw: {
            GasSpec s;
            s.n_el = n_el;
            s.two_ms = two_ms;
            s.boundaries = boundaries;
            s.patterns = patterns;
            s.validate(n_b);
            return s;
        }
    }
    throw ConfigError("bad GAS scheme");
}

std::string Scenario::hash_hex() const {
    std::ostringstream os;
    os << std::hex << hash;
    return os.str();
}

void Scenario::validate() const {
    potential.validate();
    if (n_el < 1) throw ConfigError("scenario: electrons must be positive");
    if (!(grid.x_c > 0.0 && grid.x_c < grid.x_s)) throw ConfigError("scenario: need 0 < x_c < x_s");
    if (use_cap && !(r_cap >= grid.x_c && r_cap < grid.x_s)) throw ConfigError("scenario: need x_c <= r_cap < x_s");
    if (observables.r_ion != 0.0 && observables.r_ion < grid.x_c) throw ConfigError("scenario: r_ion must be >= x_c");
    if (has_pulse) pulse.validate();
    if (scan_omega_points < 0 || (scan_omega_points > 0 && !(scan_omega_max >= scan_omega_min && scan_omega_min > 0.0)))
        throw ConfigError("scenario: need 0 < omega_min <= omega_max for an omega scan");
    propagation.validate();
}

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("scenario syntax: ") + e.what());
    }
    Scenario s;
    s.name = get<std::string>(tree, "run.name", name);
    s.source = text;
    s.hash = fnv1a(text);

    s.grid.x_s = get<double>(tree, "grid.x_s", s.grid.x_s);
    s.grid.x_c = get<double>(tree, "grid.x_c", s.grid.x_c);
    s.grid.elements = get<int>(tree, "grid.elements", s.grid.elements);
    s.grid.n_g = get<int>(tree, "grid.n_g", s.grid.n_g);
    if (auto b = tree.get_optional<std::string>("grid.boundaries")) s.grid.boundaries = parse_numbers(*b);

    const std::string kind = get<std::string>(tree, "potential.kind", "atom");
    const double soft = get<double>(tree, "potential.s", 1.0);
    if (kind == "atom") {
        s.potential = PotentialSpec::atom(get<double>(tree, "potential.Z", 1.0), soft);
    } else if (kind == "diatomic") {
        s.potential = PotentialSpec::diatomic(get<double>(tree, "potential.Z1", 1.0), get<double>(tree, "potential.Z2", 1.0),
                                              get<double>(tree, "potential.R", 0.0), soft);
    } else {
        throw ConfigError("unknown potential kind '" + kind + "'");
    }
    s.n_el = get<int>(tree, "system.electrons", 2);

    s.orbitals.kind = parse_orbital_kind(get<std::string>(tree, "orbitals.kind", "p1"));
    const std::string ortho = get<std::string>(tree, "orbitals.ortho", "gram_schmidt");
    if (ortho == "gram_schmidt")
        s.orbitals.ortho = OrthoMode::gram_schmidt;
    else if (ortho == "projector")
        s.orbitals.ortho = OrthoMode::projector;
    else
        throw ConfigError("unknown orbitals.ortho '" + ortho + "'");
    s.orbitals.natural_gas = parse_gas(tree, "natural");

    s.gas = parse_gas(tree, "gas");

    if (tree.get_child_optional("pulse")) {
        s.has_pulse = true;
        const std::string shape = get<std::string>(tree, "pulse.shape", "enveloped_cos");
        if (shape == "half_cycle")
            s.pulse.shape = PulseShape::half_cycle;
        else if (shape == "enveloped_cos")
            s.pulse.shape = PulseShape::enveloped_cos;
        else
            throw ConfigError("unknown pulse shape '" + shape + "'");
        s.pulse.F0 = get<double>(tree, "pulse.F0", 0.0);
        s.pulse.sigma = get<double>(tree, "pulse.sigma", 1.0);
        s.pulse.t0 = get<double>(tree, "pulse.t0", 0.0);
        s.pulse.omega = get<double>(tree, "pulse.omega", 0.0);
        s.pulse.phi_cep = get<double>(tree, "pulse.phi_cep", 0.0);
    }

    auto& p = s.propagation;
    p.dt = get<double>(tree, "propagation.dt", p.dt);
    p.dtau = get<double>(tree, "propagation.dtau", p.dtau);
    p.krylov_dim = get<int>(tree, "propagation.krylov_dim", p.krylov_dim);
    p.itp_tol = get<double>(tree, "propagation.itp_tol", p.itp_tol);
    p.max_itp_steps = get<int>(tree, "propagation.max_itp_steps", p.max_itp_steps);
    p.t_final = get<double>(tree, "propagation.t_final", p.t_final);
    p.observe_stride = get<int>(tree, "propagation.observe_stride", p.observe_stride);
    p.checkpoint_stride = get<int>(tree, "propagation.checkpoint_stride", p.checkpoint_stride);
    const std::string fa = get<std::string>(tree, "propagation.field_at", "midpoint");
    if (fa == "midpoint")
        p.field_at = FieldEvaluation::midpoint;
    else if (fa == "step_end")
        p.field_at = FieldEvaluation::step_end;
    else
        throw ConfigError("unknown propagation.field_at '" + fa + "'");
    s.r_cap = get<double>(tree, "propagation.r_cap", 0.0);
    s.use_cap = s.r_cap > 0.0;

    auto& o = s.observables;
    o.r_ion = get<double>(tree, "observables.r_ion", o.r_ion);
    o.k_max = get<double>(tree, "observables.k_max", o.k_max);
    o.k_points = get<int>(tree, "observables.k_points", o.k_points);
    o.e_max = get<double>(tree, "observables.e_max", o.e_max);
    o.e_points = get<int>(tree, "observables.e_points", o.e_points);
    o.dipole_spectrum = get_bool(tree, "observables.dipole_spectrum", o.dipole_spectrum);
    o.zero_padding = get<int>(tree, "observables.zero_padding", o.zero_padding);
    o.asymmetry = get_bool(tree, "observables.asymmetry", o.asymmetry);
    if (auto d = tree.get_optional<std::string>("observables.density_x")) o.density_x = parse_numbers(*d);

    if (auto r = tree.get_optional<std::string>("scan.R")) s.scan_r = parse_numbers(*r);
    s.scan_omega_min = get<double>(tree, "scan.omega_min", 0.0);
    s.scan_omega_max = get<double>(tree, "scan.omega_max", 0.0);
    s.scan_omega_points = get<int>(tree, "scan.omega_points", 0);

    s.output_dir = get<std::string>(tree, "run.output", "out/" + s.name);
    s.threads = get<int>(tree, "run.threads", 0);
    s.memory_budget_gb = get<double>(tree, "run.memory_budget_gb", s.memory_budget_gb);
    s.allow_direct = get_bool(tree, "run.allow_direct", false);
    s.max_determinants = get<double>(tree, "run.max_determinants", s.max_determinants);
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string name = path;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return parse_scenario_text(ss.str(), name);
}

}  // namespace tdgasci
