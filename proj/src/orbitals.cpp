#include "tdgasci/orbitals.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace {

constexpr double kDegeneracyTol = 1e-10;

double center_of(const Eigen::VectorXd& c, const std::vector<double>& x) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) m += c(i) * c(i) * x[i];
    return m;
}

// Orders columns by key (ascending), breaking near-ties by <x>.
void order_columns(Eigen::MatrixXd& c, Eigen::VectorXd& key, const std::vector<double>& x) {
    const int n = static_cast<int>(key.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) < key(b); });
    for (int s = 0; s < n;) {
        int e = s + 1;
        while (e < n && std::abs(key(idx[e]) - key(idx[s])) <= kDegeneracyTol * std::max(1.0, std::abs(key(idx[s]))))
            ++e;
        if (e - s > 1)
            std::stable_sort(idx.begin() + s, idx.begin() + e,
                             [&](int a, int b) { return center_of(c.col(a), x) < center_of(c.col(b), x); });
        s = e;
    }
    Eigen::MatrixXd c2(c.rows(), n);
    Eigen::VectorXd k2(n);
    for (int i = 0; i < n; ++i) {
        c2.col(i) = c.col(idx[i]);
        k2(i) = key(idx[i]);
    }
    c = std::move(c2);
    key = std::move(k2);
}

std::vector<double> central_nodes(const FedvrGrid& grid) {
    std::vector<double> x;
    for (int p : grid.central()) x.push_back(grid.nodes()[p]);
    return x;
}

void require_central_hf(const FedvrGrid& grid, const HfResult& hf) {
    if (hf.basis != grid.central())
        throw ConfigError("orbitals: HF reference must be computed on the central region");
}

Eigen::MatrixXd central_one_body(const FedvrGrid& grid, const PotentialSpec& potential,
                                 const HartreePotential* v_h) {
    const Eigen::MatrixXd t = kinetic_matrix(grid);
    const auto& c = grid.central();
    const int n = static_cast<int>(c.size());
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = t(c[i], c[j]);
    for (int i = 0; i < n; ++i) {
        const double x = grid.nodes()[c[i]];
        a(i, i) += nuclear_potential(potential, x);
        if (v_h != nullptr && !v_h->is_zero()) a(i, i) += (*v_h)(x);
    }
    return a;
}

RotationMatrix pseudo_orbitals(const FedvrGrid& grid, OrbitalKind kind, const Eigen::MatrixXd& a, const HfResult& hf,
                               OrthoMode mode) {
    const int n = static_cast<int>(a.rows());
    const int n_occ = hf.n_occ;
    const int n_virt = n - n_occ;
    const auto x = central_nodes(grid);
    const Eigen::MatrixXd occ = hf.coefficients.leftCols(n_occ);

    Eigen::MatrixXd virt(n, n_virt);
    Eigen::VectorXd eps(n_virt);
    if (mode == OrthoMode::projector) {
        const Eigen::MatrixXd z = hf.coefficients.rightCols(n_virt);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z.transpose() * a * z);
        virt = z * es.eigenvectors();
        eps = es.eigenvalues();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        Eigen::MatrixXd basis = occ;
        int accepted = 0;
        for (int k = n_occ; k < n && accepted < n_virt; ++k) {
            Eigen::VectorXd v = es.eigenvectors().col(k);
            const Eigen::MatrixXd q = basis;
            for (int pass = 0; pass < 2; ++pass) v -= q * (q.transpose() * v);
            const double norm = v.norm();
            if (norm < 1e-8) continue;
            v /= norm;
            virt.col(accepted) = v;
            eps(accepted) = es.eigenvalues()(k);
            basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
            basis.col(basis.cols() - 1) = v;
            ++accepted;
        }
        if (accepted != n_virt) throw ConvergenceError("pseudo_orbitals: Gram-Schmidt lost rank");
    }
    order_columns(virt, eps, x);

    Eigen::MatrixXd b(n, n);
    b.leftCols(n_occ) = occ;
    b.rightCols(n_virt) = virt;
    normalize_signs(b);
    Eigen::VectorXd labels(n);
    labels.head(n_occ) = hf.orbital_energies.head(n_occ);
    labels.tail(n_virt) = eps;
    return assemble_rotation(grid, kind, b, labels);
}

}  // namespace

OrbitalKind parse_orbital_kind(const std::string& name) {
    if (name == "none") return OrbitalKind::none;
    if (name == "identity") return OrbitalKind::identity;
    if (name == "hf" || name == "hf_canonical") return OrbitalKind::hf_canonical;
    if (name == "p1") return OrbitalKind::p1;
    if (name == "p2") return OrbitalKind::p2;
    if (name == "natural") return OrbitalKind::natural;
    throw ConfigError("unknown orbital kind '" + name + "'");
}

std::string to_string(OrbitalKind kind) {
    switch (kind) {
        case OrbitalKind::none: return "none";
        case OrbitalKind::identity: return "identity";
        case OrbitalKind::hf_canonical: return "hf_canonical";
        case OrbitalKind::p1: return "p1";
        case OrbitalKind::p2: return "p2";
        case OrbitalKind::natural: return "natural";
    }
    return "?";
}

void normalize_signs(Eigen::MatrixXd& c) {
    for (Eigen::Index k = 0; k < c.cols(); ++k) {
        const double top = c.col(k).cwiseAbs().maxCoeff();
        // first index within 1e-10 of the maximum, so mirrored entries of odd orbitals tie deterministically
        Eigen::Index imax = 0;
        while (std::abs(c(imax, k)) < top - 1e-10) ++imax;
        if (c(imax, k) < 0.0) c.col(k) *= -1.0;
    }
}

Eigen::MatrixXd RotationMatrix::dense() const {
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n_b, n_b);
    const int nc = n_central();
    for (int i = 0; i < nc; ++i)
        for (int a = 0; a < nc; ++a) full(central[i], a) = b(i, a);
    for (std::size_t k = 0; k < outer.size(); ++k) full(outer[k], nc + static_cast<int>(k)) = 1.0;
    return full;
}

double RotationMatrix::orthogonality_error() const {
    if (b.size() == 0) return 0.0;
    return (b.transpose() * b - Eigen::MatrixXd::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
}

double RotationMatrix::second_moment(const FedvrGrid& grid, int k) const {
    double m = 0.0;
    for (int i = 0; i < n_central(); ++i) {
        const double x = grid.nodes()[central[i]];
        m += b(i, k) * b(i, k) * x * x;
    }
    return m;
}

std::string RotationMatrix::orbital_table(const FedvrGrid& grid, int n) const {
    std::ostringstream os;
    os << std::setprecision(12) << "x";
    n = std::min(n, n_central());
    for (int k = 0; k < n; ++k) os << "\tphi" << k;
    os << '\n';
    for (int i = 0; i < n_central(); ++i) {
        const int p = central[i];
        os << grid.nodes()[p];
        for (int k = 0; k < n; ++k) os << '\t' << b(i, k) / std::sqrt(grid.weights()[p]);
        os << '\n';
    }
    return os.str();
}

RotationMatrix assemble_rotation(const FedvrGrid& grid, OrbitalKind kind, const Eigen::MatrixXd& central_block,
                                 const Eigen::VectorXd& labels) {
    if (central_block.rows() != grid.n_c() || central_block.cols() != grid.n_c())
        throw ConfigError("assemble_rotation: central block must be N_c x N_c");
    RotationMatrix r;
    r.kind = kind;
    r.n_b = grid.n_b();
    r.central = grid.central();
    r.outer = grid.outer();
    r.b = central_block;
    r.labels = labels.size() == central_block.cols() ? labels : Eigen::VectorXd::Zero(central_block.cols());
    return r;
}

RotationMatrix unrotated(const FedvrGrid& grid) {
    RotationMatrix r;
    r.kind = OrbitalKind::none;
    r.n_b = grid.n_b();
    r.outer.resize(grid.n_b());
    std::iota(r.outer.begin(), r.outer.end(), 0);
    r.b.resize(0, 0);
    return r;
}

RotationMatrix identity_rotation(const FedvrGrid& grid) {
    return assemble_rotation(grid, OrbitalKind::identity, Eigen::MatrixXd::Identity(grid.n_c(), grid.n_c()));
}

RotationMatrix build_hf_canonical(const FedvrGrid& grid, const HfResult& hf) {
    require_central_hf(grid, hf);
    return assemble_rotation(grid, OrbitalKind::hf_canonical, hf.coefficients, hf.orbital_energies);
}

RotationMatrix build_p1(const FedvrGrid& grid, const PotentialSpec& potential, const HfResult& hf, OrthoMode mode) {
    require_central_hf(grid, hf);
    return pseudo_orbitals(grid, OrbitalKind::p1, central_one_body(grid, potential, nullptr), hf, mode);
}

RotationMatrix build_p2(const FedvrGrid& grid, const PotentialSpec& potential, const HfResult& hf,
                        const HartreePotential& v_h, OrthoMode mode) {
    require_central_hf(grid, hf);
    return pseudo_orbitals(grid, OrbitalKind::p2, central_one_body(grid, potential, &v_h), hf, mode);
}

RotationMatrix build_natural(const FedvrGrid& grid, const Eigen::MatrixXd& rho_central) {
    if (rho_central.rows() != grid.n_c() || rho_central.cols() != grid.n_c())
        throw ConfigError("build_natural: density matrix must be N_c x N_c");
    const double asym = (rho_central - rho_central.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) throw ConvergenceError("build_natural: density matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (rho_central + rho_central.transpose()));
    Eigen::MatrixXd c = es.eigenvectors();
    Eigen::VectorXd key = -es.eigenvalues();
    order_columns(c, key, central_nodes(grid));
    normalize_signs(c);
    return assemble_rotation(grid, OrbitalKind::natural, c, -key);
}

}  // namespace tdgasci
