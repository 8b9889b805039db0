#include "tdgasci/model.hpp"

#include <cmath>

#include "tdgasci/errors.hpp"

namespace tdgasci {

PotentialSpec PotentialSpec::atom(double Z, double s) {
    PotentialSpec p;
    p.kind = PotentialKind::atom;
    p.Z = Z;
    p.s = s;
    p.validate();
    return p;
}

PotentialSpec PotentialSpec::diatomic(double Z1, double Z2, double R, double s) {
    PotentialSpec p;
    p.kind = PotentialKind::diatomic;
    p.Z1 = Z1;
    p.Z2 = Z2;
    p.R = R;
    p.s = s;
    p.validate();
    return p;
}

void PotentialSpec::validate() const {
    if (!(s > 0.0)) throw ConfigError("potential: softening s must be positive");
    if (kind == PotentialKind::atom) {
        if (!(Z > 0.0)) throw ConfigError("potential: Z must be positive");
    } else {
        if (!(Z1 > 0.0 && Z2 > 0.0)) throw ConfigError("potential: Z1, Z2 must be positive");
        if (!(R >= 0.0)) throw ConfigError("potential: R must be non-negative");
    }
}

double nuclear_potential(const PotentialSpec& spec, double x) {
    const double s2 = spec.s * spec.s;
    if (spec.kind == PotentialKind::atom) return -spec.Z / std::sqrt(x * x + s2);
    const double a = x - 0.5 * spec.R;
    const double b = x + 0.5 * spec.R;
    return -spec.Z1 / std::sqrt(a * a + s2) - spec.Z2 / std::sqrt(b * b + s2);
}

double internuclear_repulsion(const PotentialSpec& spec) {
    if (spec.kind != PotentialKind::diatomic)
        throw ConfigError("internuclear_repulsion: requires a diatomic potential");
    return spec.Z1 * spec.Z2 / std::sqrt(spec.R * spec.R + 1.0);
}

void PulseSpec::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("pulse: sigma must be positive");
    if (!std::isfinite(F0) || !std::isfinite(t0) || !std::isfinite(omega) || !std::isfinite(phi_cep))
        throw ConfigError("pulse: non-finite parameter");
}

double field(const PulseSpec& pulse, double t) {
    const double u = (t - pulse.t0) / pulse.sigma;
    const double envelope = pulse.F0 * std::exp(-0.5 * u * u);
    if (pulse.shape == PulseShape::half_cycle) return envelope;
    return envelope * std::cos(pulse.omega * (t - pulse.t0) + pulse.phi_cep);
}

double cap_value(double x, double r_cap, double x_s) {
    const double ax = std::abs(x);
    if (ax <= r_cap) return 0.0;
    return 1.0 - std::cos(M_PI * (ax - r_cap) / (2.0 * (x_s - r_cap)));
}

}  // namespace tdgasci
