#pragma once

namespace tdgasci {

enum class PotentialKind { atom, diatomic };

// Soft-Coulomb nuclear potential. For a diatomic, Z1 sits at +R/2 and Z2 at -R/2.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::atom;
    double Z = 1.0;
    double Z1 = 1.0;
    double Z2 = 1.0;
    double R = 0.0;
    double s = 1.0;

    static PotentialSpec atom(double Z, double s = 1.0);
    static PotentialSpec diatomic(double Z1, double Z2, double R, double s = 1.0);
    void validate() const;
};

double nuclear_potential(const PotentialSpec& spec, double x);

// Soft-Coulomb electron-electron interaction 1/sqrt(dx^2 + s^2).
inline double ee_interaction(double s, double x1, double x2) {
    const double d = x1 - x2;
    return 1.0 / __builtin_sqrt(d * d + s * s);
}

// Regularized nuclear repulsion Z1 Z2 / sqrt(R^2 + 1); diatomic specs only.
double internuclear_repulsion(const PotentialSpec& spec);

enum class PulseShape { half_cycle, enveloped_cos };

struct PulseSpec {
    PulseShape shape = PulseShape::enveloped_cos;
    double F0 = 0.0;
    double sigma = 1.0;
    double t0 = 0.0;
    double omega = 0.0;
    double phi_cep = 0.0;

    void validate() const;
};

// Electric field F(t) in the length gauge.
double field(const PulseSpec& pulse, double t);

// Complex absorbing potential strength (the negative imaginary part), zero for |x| <= r_cap.
double cap_value(double x, double r_cap, double x_s);

}  // namespace tdgasci
