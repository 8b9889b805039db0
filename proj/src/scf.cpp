#include "tdgasci/scf.hpp"

#include <cmath>
#include <deque>
#include <iomanip>
#include <sstream>

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace {

struct Diis {
    int capacity;
    std::deque<Eigen::MatrixXd> focks;
    std::deque<Eigen::MatrixXd> errors;

    Eigen::MatrixXd extrapolate(const Eigen::MatrixXd& f, const Eigen::MatrixXd& err) {
        focks.push_back(f);
        errors.push_back(err);
        if (static_cast<int>(focks.size()) > capacity) {
            focks.pop_front();
            errors.pop_front();
        }
        const int n = static_cast<int>(focks.size());
        if (n < 2) return f;
        Eigen::MatrixXd b = Eigen::MatrixXd::Constant(n + 1, n + 1, -1.0);
        b(n, n) = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) = errors[i].cwiseProduct(errors[j]).sum();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
        rhs(n) = -1.0;
        const Eigen::VectorXd c = b.colPivHouseholderQr().solve(rhs);
        if (!c.allFinite()) return f;
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(f.rows(), f.cols());
        for (int i = 0; i < n; ++i) out += c(i) * focks[i];
        return out;
    }
};

}  // namespace

Eigen::VectorXd HfResult::node_density(const FedvrGrid& grid) const {
    Eigen::VectorXd n(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) n(i) = populations(i) / grid.weights()[basis[i]];
    return n;
}

Eigen::MatrixXd HfResult::embedded(const FedvrGrid& grid) const {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(grid.n_b(), coefficients.cols());
    for (std::size_t i = 0; i < basis.size(); ++i) c.row(basis[i]) = coefficients.row(i);
    return c;
}

std::string HfResult::orbital_table(const FedvrGrid& grid, int n_orbitals) const {
    std::ostringstream os;
    os << std::setprecision(12) << "x";
    const int n = std::min<int>(n_orbitals, coefficients.cols());
    for (int k = 0; k < n; ++k) os << "\tphi" << k;
    os << '\n';
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double sw = std::sqrt(grid.weights()[basis[i]]);
        os << grid.nodes()[basis[i]];
        for (int k = 0; k < n; ++k) os << '\t' << coefficients(i, k) / sw;
        os << '\n';
    }
    return os.str();
}

HfResult solve_hf(const FedvrGrid& grid, const PotentialSpec& potential, int n_el, HfRegion region,
                  const ScfOptions& options) {
    if (n_el <= 0 || n_el % 2 != 0) throw ConfigError("solve_hf: closed-shell HF needs a positive even N_el");
    HfResult res;
    if (region == HfRegion::central) {
        res.basis = grid.central();
    } else {
        res.basis.resize(grid.n_b());
        for (int p = 0; p < grid.n_b(); ++p) res.basis[p] = p;
    }
    const int n = static_cast<int>(res.basis.size());
    const int n_occ = n_el / 2;
    if (n_occ > n) throw ConfigError("solve_hf: more occupied orbitals than basis functions");
    res.n_occ = n_occ;

    const Eigen::MatrixXd t_full = kinetic_matrix(grid);
    Eigen::MatrixXd h(n, n);
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i) {
        const int p = res.basis[i];
        const double xp = grid.nodes()[p];
        for (int j = 0; j < n; ++j) {
            const int q = res.basis[j];
            h(i, j) = t_full(p, q);
            w(i, j) = options.ee_scale * ee_interaction(potential.s, xp, grid.nodes()[q]);
        }
        h(i, i) += nuclear_potential(potential, xp);
    }

    auto fock = [&](const Eigen::MatrixXd& d) {
        const Eigen::VectorXd j = w * d.diagonal();
        Eigen::MatrixXd f = h - 0.5 * w.cwiseProduct(d);
        f.diagonal() += j;
        return f;
    };
    auto energy = [&](const Eigen::MatrixXd& d, const Eigen::MatrixXd& f) {
        return 0.5 * d.cwiseProduct(h + f).sum();
    };
    auto density_of = [&](const Eigen::MatrixXd& c) {
        const auto occ = c.leftCols(n_occ);
        return Eigen::MatrixXd(2.0 * occ * occ.transpose());
    };

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    Eigen::MatrixXd d = density_of(solver.eigenvectors());
    double e_old = 0.0;
    Diis diis{options.diis_size, {}, {}};
    bool converged = false;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const Eigen::MatrixXd f = fock(d);
        const double e = energy(d, f);
        const Eigen::MatrixXd err = f * d - d * f;
        const Eigen::MatrixXd f_use = options.diis ? diis.extrapolate(f, err) : f;
        solver.compute(f_use);
        const Eigen::MatrixXd d_new = density_of(solver.eigenvectors());
        const double d_change = (d_new - d).cwiseAbs().maxCoeff();
        const double e_change = e - e_old;
        e_old = e;
        res.iterations = it;
        res.last_energy_change = e_change;
        if (options.diis)
            d = d_new;
        else
            d = options.mixing * d_new + (1.0 - options.mixing) * d;
        if (it > 1 && d_change < options.density_tol && std::abs(e_change) < options.energy_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "solve_hf: no convergence after " << options.max_iterations
           << " iterations, last energy change " << res.last_energy_change;
        throw ConvergenceError(os.str());
    }

    const Eigen::MatrixXd f = fock(d);
    solver.compute(f);
    res.coefficients = solver.eigenvectors();
    res.orbital_energies = solver.eigenvalues();
    for (int k = 0; k < n; ++k) {
        Eigen::Index imax;
        res.coefficients.col(k).cwiseAbs().maxCoeff(&imax);
        if (res.coefficients(imax, k) < 0.0) res.coefficients.col(k) *= -1.0;
    }
    const Eigen::MatrixXd d_final = density_of(res.coefficients);
    res.energy = energy(d_final, fock(d_final));
    res.populations = d_final.diagonal();
    return res;
}

HartreePotential::HartreePotential(double s, std::vector<double> x, std::vector<double> populations)
    : s_(s), x_(std::move(x)), pop_(std::move(populations)) {}

double HartreePotential::operator()(double x) const {
    double v = 0.0;
    for (std::size_t q = 0; q < x_.size(); ++q) v += pop_[q] * ee_interaction(s_, x, x_[q]);
    return v;
}

double HartreePotential::electrons() const {
    double n = 0.0;
    for (double p : pop_) n += p;
    return n;
}

HartreePotential hartree_potential_minus2(const FedvrGrid& grid, const PotentialSpec& potential, int n_el,
                                          HfRegion region, const ScfOptions& options) {
    if (n_el < 2) throw ConfigError("hartree_potential_minus2: N_el must be >= 2");
    if ((n_el - 2) % 2 != 0) throw ConfigError("hartree_potential_minus2: open-shell N_el - 2 is unsupported");
    if (n_el == 2) return HartreePotential(potential.s, {}, {});
    const HfResult hf = solve_hf(grid, potential, n_el - 2, region, options);
    std::vector<double> x(hf.basis.size());
    std::vector<double> pop(hf.basis.size());
    for (std::size_t i = 0; i < hf.basis.size(); ++i) {
        x[i] = grid.nodes()[hf.basis[i]];
        pop[i] = hf.populations(i);
    }
    return HartreePotential(potential.s, std::move(x), std::move(pop));
}

}  // namespace tdgasci
