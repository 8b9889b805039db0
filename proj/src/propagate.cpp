#include "tdgasci/propagate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace {

constexpr double kBreakdown = 1e-14;

template <class Vec>
using ApplyT = std::function<void(const Vec&, Vec&)>;

// Lanczos with full reorthogonalization. Fills the basis and the tridiagonal (alpha, beta).
template <class Vec>
int lanczos(const ApplyT<Vec>& apply, const Vec& v0, int m, std::vector<Vec>& basis, Eigen::VectorXd& alpha,
            Eigen::VectorXd& beta) {
    basis.clear();
    alpha.setZero(m);
    beta.setZero(m);
    basis.push_back(v0);
    Vec w;
    for (int j = 0; j < m; ++j) {
        apply(basis[j], w);
        alpha(j) = std::real(basis[j].dot(w));
        for (int pass = 0; pass < 2; ++pass)
            for (int k = 0; k <= j; ++k) w -= basis[k] * basis[k].dot(w);
        const double b = w.norm();
        if (j + 1 == m) break;
        if (b < kBreakdown) return j + 1;
        beta(j) = b;
        basis.push_back(w / b);
    }
    return m;
}

template <class Vec>
Vec combine(const std::vector<Vec>& basis, const Eigen::Matrix<typename Vec::Scalar, Eigen::Dynamic, 1>& y) {
    Vec out = basis[0] * y(0);
    for (Eigen::Index k = 1; k < y.size(); ++k) out += basis[k] * y(k);
    return out;
}

}  // namespace

void PropagatorConfig::validate() const {
    if (!(dt > 0.0) || !(dtau > 0.0)) throw ConfigError("propagation: dt and dtau must be positive");
    if (krylov_dim < 2) throw ConfigError("propagation: krylov_dim must be >= 2");
    if (observe_stride < 1) throw ConfigError("propagation: observe_stride must be >= 1");
    if (t_final < 0.0) throw ConfigError("propagation: t_final must be non-negative");
}

int lanczos_exp(const Apply& apply, cvec& v, double dt, int krylov_dim) {
    const double nrm = v.norm();
    if (nrm == 0.0) return 0;
    std::vector<cvec> basis;
    Eigen::VectorXd alpha, beta;
    const int m = lanczos<cvec>(apply, v / nrm, krylov_dim, basis, alpha, beta);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        t(j, j) = alpha(j);
        if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::MatrixXd& q = es.eigenvectors();
    Eigen::VectorXcd y(m);
    for (int j = 0; j < m; ++j) {
        std::complex<double> s = 0.0;
        for (int k = 0; k < m; ++k) s += q(j, k) * std::exp(std::complex<double>(0.0, -dt * es.eigenvalues()(k))) * q(0, k);
        y(j) = s * nrm;
    }
    v = combine(basis, y);
    return m;
}

int arnoldi_exp(const Apply& apply, cvec& v, double dt, int krylov_dim) {
    const double nrm = v.norm();
    if (nrm == 0.0) return 0;
    std::vector<cvec> basis{v / nrm};
    Eigen::MatrixXcd hm = Eigen::MatrixXcd::Zero(krylov_dim, krylov_dim);
    int m = krylov_dim;
    cvec w;
    for (int j = 0; j < krylov_dim; ++j) {
        apply(basis[j], w);
        for (int pass = 0; pass < 2; ++pass)
            for (int k = 0; k <= j; ++k) {
                const std::complex<double> c = basis[k].dot(w);
                hm(k, j) += c;
                w -= basis[k] * c;
            }
        if (j + 1 == krylov_dim) break;
        const double b = w.norm();
        if (b < kBreakdown) {
            m = j + 1;
            break;
        }
        hm(j + 1, j) = b;
        basis.push_back(w / b);
    }
    const Eigen::MatrixXcd e = (std::complex<double>(0.0, -dt) * hm.topLeftCorner(m, m)).exp();
    const Eigen::VectorXcd y = e.col(0) * nrm;
    v = combine(basis, y);
    return m;
}

int lanczos_exp_imag(const ApplyReal& apply, Eigen::VectorXd& v, double tau, int krylov_dim) {
    const double nrm = v.norm();
    if (nrm == 0.0) return 0;
    std::vector<Eigen::VectorXd> basis;
    Eigen::VectorXd alpha, beta;
    const int m = lanczos<Eigen::VectorXd>(apply, v / nrm, krylov_dim, basis, alpha, beta);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        t(j, j) = alpha(j);
        if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double shift = es.eigenvalues()(0);
    Eigen::VectorXd y(m);
    for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
            s += es.eigenvectors()(j, k) * std::exp(-tau * (es.eigenvalues()(k) - shift)) * es.eigenvectors()(0, k);
        y(j) = s * nrm;
    }
    v = combine(basis, y);
    return m;
}

Eigen::VectorXd lowest_diagonal_seed(const SparseHamiltonian& h) {
    Eigen::Index imin = 0;
    h.diagonal.minCoeff(&imin);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h.dim()));
    s(imin) = 1.0;
    return s;
}

ItpResult itp_ground_state(const SparseHamiltonian& h, const PropagatorConfig& config, const Eigen::VectorXd& seed) {
    config.validate();
    if (seed.size() != static_cast<Eigen::Index>(h.dim())) throw ConfigError("itp: seed has the wrong dimension");
    ApplyReal apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { sigma_real(h, x, y); };
    ItpResult r;
    r.state = seed.normalized();
    Eigen::VectorXd hv;
    apply(r.state, hv);
    double e_old = r.state.dot(hv);
    for (int it = 1; it <= config.max_itp_steps; ++it) {
        lanczos_exp_imag(apply, r.state, config.dtau, config.krylov_dim);
        r.state.normalize();
        apply(r.state, hv);
        const double e = r.state.dot(hv);
        r.steps = it;
        r.last_change = e - e_old;
        r.energy = e;
        if (std::abs(e - e_old) < config.itp_tol) return r;
        e_old = e;
    }
    std::ostringstream os;
    os << std::setprecision(12) << "itp: no convergence after " << config.max_itp_steps << " steps, E = " << r.energy
       << ", last change " << r.last_change;
    throw ConvergenceError(os.str());
}

void step(const SparseHamiltonian& h, const std::function<double(double)>& field_of_t, cvec& state, double t,
          const PropagatorConfig& config, bool use_cap) {
    const double tf = config.field_at == FieldEvaluation::midpoint ? t + 0.5 * config.dt : t + config.dt;
    const double f = field_of_t(tf);
    Apply apply = [&](const cvec& x, cvec& y) { sigma(h, f, use_cap, x, y); };
    if (use_cap && h.has_cap())
        arnoldi_exp(apply, state, config.dt, config.krylov_dim);
    else
        lanczos_exp(apply, state, config.dt, config.krylov_dim);
}

TimeSample measure(const SparseHamiltonian& h, const cvec& state, double t, double field_value) {
    TimeSample s;
    s.t = t;
    s.norm = state.squaredNorm();
    s.field = field_value;
    cvec tmp;
    sigma(h, 0.0, false, state, tmp);
    s.energy = std::real(state.dot(tmp));
    if (!h.dipole.val.empty()) {
        dipole_apply(h, state, tmp);
        s.dipole = std::real(state.dot(tmp));
    }
    return s;
}

TimeSeries run(const SparseHamiltonian& h, const PulseSpec& pulse, cvec& state, const PropagatorConfig& config,
               bool use_cap, const std::vector<Observer>& observers, double t_start) {
    config.validate();
    auto f = [&](double t) { return field(pulse, t); };
    TimeSeries ts;
    const long n_steps = std::lround((config.t_final - t_start) / config.dt);
    auto observe = [&](double t) {
        ts.samples.push_back(measure(h, state, t, f(t)));
        for (const auto& o : observers) o(t, state);
    };
    observe(t_start);
    for (long k = 0; k < n_steps; ++k) {
        const double t = t_start + k * config.dt;
        step(h, f, state, t, config, use_cap);
        const double t1 = t_start + (k + 1) * config.dt;
        if ((k + 1) % config.observe_stride == 0 || k + 1 == n_steps) observe(t1);
        if (config.checkpoint_stride > 0 && !config.checkpoint_path.empty() && (k + 1) % config.checkpoint_stride == 0)
            save_checkpoint(config.checkpoint_path, t1, state, h.space_hash);
    }
    return ts;
}

std::string TimeSeries::to_tsv(const std::string& header_comment) const {
    std::ostringstream os;
    os << "# " << header_comment << '\n';
    os << "t\tnorm\tdipole\tenergy\tfield\n";
    os << std::setprecision(12);
    for (const auto& s : samples) os << s.t << '\t' << s.norm << '\t' << s.dipole << '\t' << s.energy << '\t' << s.field << '\n';
    return os.str();
}

void save_checkpoint(const std::string& path, double t, const cvec& state, std::uint64_t space_hash) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("checkpoint: cannot write " + path);
    const std::uint64_t n = static_cast<std::uint64_t>(state.size());
    out.write(reinterpret_cast<const char*>(&space_hash), 8);
    out.write(reinterpret_cast<const char*>(&t), 8);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(state.data()), static_cast<std::streamsize>(16 * n));
}

double load_checkpoint(const std::string& path, cvec& state, std::uint64_t space_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("checkpoint: cannot read " + path);
    std::uint64_t hash = 0, n = 0;
    double t = 0.0;
    in.read(reinterpret_cast<char*>(&hash), 8);
    in.read(reinterpret_cast<char*>(&t), 8);
    in.read(reinterpret_cast<char*>(&n), 8);
    if (!in) throw ConfigError("checkpoint: truncated header in " + path);
    if (hash != space_hash) throw ConfigError("checkpoint: determinant space hash mismatch in " + path);
    state.resize(static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(state.data()), static_cast<std::streamsize>(16 * n));
    if (!in) throw ConfigError("checkpoint: truncated data in " + path);
    return t;
}

}  // namespace tdgasci
