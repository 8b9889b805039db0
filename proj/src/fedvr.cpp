#include "tdgasci/fedvr.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace {

// Legendre P_{m} and P_{m-1} at t by the three-term recurrence.
std::pair<double, double> legendre_pair(int m, double t) {
    double p_prev = 1.0;
    double p = t;
    if (m == 0) return {1.0, 0.0};
    for (int k = 2; k <= m; ++k) {
        const double next = ((2.0 * k - 1.0) * t * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    return {p, p_prev};
}

// Derivative of each Lagrange polynomial l_m at each node x_k: D(k, m) = l_m'(x_k).
Eigen::MatrixXd lagrange_derivatives(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> c(n, 1.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (j != k) c[k] *= x[k] - x[j];
    Eigen::MatrixXd d(n, n);
    for (int k = 0; k < n; ++k) {
        double diag = 0.0;
        for (int m = 0; m < n; ++m) {
            if (m == k) continue;
            d(k, m) = (c[k] / c[m]) / (x[k] - x[m]);
            diag += 1.0 / (x[k] - x[m]);
        }
        d(k, k) = diag;
    }
    return d;
}

double lagrange_value(const std::vector<double>& x, int m, double t) {
    double v = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (static_cast<int>(j) == m) continue;
        v *= (t - x[j]) / (x[m] - x[j]);
    }
    return v;
}

}  // namespace

LobattoRule lobatto_rule(int n) {
    if (n < 2) throw ConfigError("lobatto_rule: n must be >= 2");
    const int order = n - 1;
    LobattoRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = -std::cos(M_PI * i / order);
        if (i > 0 && i < order) {
            bool converged = false;
            for (int it = 0; it < 100; ++it) {
                auto [p_o, p_om1] = legendre_pair(order, t);
                const double step = (t * p_o - p_om1) / ((order + 1) * p_o);
                t -= step;
                if (std::abs(step) < 1e-14) {
                    converged = true;
                    break;
                }
            }
            if (!converged) throw ConvergenceError("lobatto_rule: Newton refinement did not converge");
        }
        rule.nodes[i] = t;
        const double p = legendre_pair(order, t).first;
        rule.weights[i] = 2.0 / (order * (order + 1) * p * p);
    }
    return rule;
}

FedvrGrid FedvrGrid::uniform(double x_s, double x_c, int n_elements, int n_g) {
    if (n_elements < 2) throw ConfigError("FedvrGrid: need at least two elements");
    if (!(x_s > 0.0)) throw ConfigError("FedvrGrid: x_s must be positive");
    std::vector<double> b(n_elements + 1);
    for (int i = 0; i <= n_elements; ++i) b[i] = -x_s + 2.0 * x_s * i / n_elements;
    b.front() = -x_s;
    b.back() = x_s;
    FedvrGrid g;
    g.build(std::move(b), x_c, n_g);
    return g;
}

FedvrGrid FedvrGrid::from_boundaries(std::vector<double> boundaries, double x_c, int n_g) {
    if (boundaries.size() < 3) throw ConfigError("FedvrGrid: need at least two elements");
    FedvrGrid g;
    g.build(std::move(boundaries), x_c, n_g);
    return g;
}

void FedvrGrid::build(std::vector<double> boundaries, double x_c, int n_g) {
    if (n_g < 2) throw ConfigError("FedvrGrid: n_g must be >= 2");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (!(boundaries[i] > boundaries[i - 1]))
            throw ConfigError("FedvrGrid: element boundaries must be strictly increasing");
    x_s_ = boundaries.back();
    if (std::abs(boundaries.front() + x_s_) > 1e-12 * std::max(1.0, x_s_))
        throw ConfigError("FedvrGrid: box must be symmetric, [-x_s, x_s]");
    if (!(x_c > 0.0 && x_c < x_s_)) throw ConfigError("FedvrGrid: need 0 < x_c < x_s");
    const double tol = 1e-9 * std::max(1.0, x_s_);
    auto on_boundary = [&](double v) {
        return std::any_of(boundaries.begin(), boundaries.end(),
                           [&](double b) { return std::abs(b - v) < tol; });
    };
    if (!on_boundary(x_c) || !on_boundary(-x_c))
        throw ConfigError("FedvrGrid: +-x_c must coincide with element boundaries");

    x_c_ = x_c;
    n_g_ = n_g;
    boundaries_ = std::move(boundaries);
    const LobattoRule ref = lobatto_rule(n_g);
    const int ne = n_elements();

    elem_nodes_.assign(ne, std::vector<double>(n_g));
    elem_weights_.assign(ne, std::vector<double>(n_g));
    elem_funcs_.assign(ne, std::vector<int>(n_g, -1));
    nodes_.clear();
    weights_.clear();
    kinds_.clear();
    first_element_.clear();

    for (int e = 0; e < ne; ++e) {
        const double a = boundaries_[e];
        const double b = boundaries_[e + 1];
        const double half = 0.5 * (b - a);
        for (int m = 0; m < n_g; ++m) {
            elem_nodes_[e][m] = a + half * (ref.nodes[m] + 1.0);
            elem_weights_[e][m] = half * ref.weights[m];
        }
        elem_nodes_[e].front() = a;
        elem_nodes_[e].back() = b;
        for (int m = 0; m < n_g; ++m) {
            if (m == 0) {
                if (e == 0) continue;  // left box wall
                elem_funcs_[e][0] = elem_funcs_[e - 1][n_g - 1];
                weights_[elem_funcs_[e][0]] += elem_weights_[e][0];
                continue;
            }
            if (m == n_g - 1 && e == ne - 1) continue;  // right box wall
            elem_funcs_[e][m] = static_cast<int>(nodes_.size());
            nodes_.push_back(elem_nodes_[e][m]);
            weights_.push_back(elem_weights_[e][m]);
            kinds_.push_back(m == n_g - 1 ? FunctionKind::bridge : FunctionKind::element);
            first_element_.push_back(e);
        }
    }

    central_.clear();
    outer_.clear();
    central_mask_.assign(nodes_.size(), 0);
    for (int p = 0; p < n_b(); ++p) {
        if (std::abs(nodes_[p]) < x_c_ - tol) {
            central_.push_back(p);
            central_mask_[p] = 1;
        } else {
            outer_.push_back(p);
        }
    }
}

int FedvrGrid::locate(double x) const {
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
    int e = static_cast<int>(it - boundaries_.begin()) - 1;
    return std::clamp(e, 0, n_elements() - 1);
}

double FedvrGrid::basis_value(int p, double x) const {
    for (auto [q, v] : basis_values(x))
        if (q == p) return v;
    return 0.0;
}

std::vector<std::pair<int, double>> FedvrGrid::basis_values(double x) const {
    std::vector<std::pair<int, double>> out;
    if (x < -x_s_ || x > x_s_) return out;
    const int e = locate(x);
    const auto& xs = elem_nodes_[e];
    for (int m = 0; m < n_g_; ++m) {
        const int p = elem_funcs_[e][m];
        if (p < 0) continue;
        const double v = lagrange_value(xs, m, x) / std::sqrt(weights_[p]);
        out.emplace_back(p, v);
    }
    return out;
}

std::string FedvrGrid::summary_table() const {
    std::ostringstream os;
    os << "index\tnode\tweight\tkind\telement\n";
    os << std::setprecision(15);
    for (int p = 0; p < n_b(); ++p)
        os << p << '\t' << nodes_[p] << '\t' << weights_[p] << '\t'
           << (kinds_[p] == FunctionKind::bridge ? "bridge" : "element") << '\t' << first_element_[p] << '\n';
    return os.str();
}

Eigen::MatrixXd kinetic_matrix(const FedvrGrid& grid) {
    const int nb = grid.n_b();
    const int ng = grid.n_g();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nb, nb);
    const auto& w = grid.weights();
    for (int e = 0; e < grid.n_elements(); ++e) {
        const auto& xs = grid.element_nodes(e);
        const auto& ws = grid.element_weights(e);
        const auto& fs = grid.element_functions(e);
        const Eigen::MatrixXd d = lagrange_derivatives(xs);
        for (int m = 0; m < ng; ++m) {
            const int p = fs[m];
            if (p < 0) continue;
            for (int mm = m; mm < ng; ++mm) {
                const int q = fs[mm];
                if (q < 0) continue;
                double s = 0.0;
                for (int k = 0; k < ng; ++k) s += ws[k] * d(k, m) * d(k, mm);
                const double v = 0.5 * s / std::sqrt(w[p] * w[q]);
                t(p, q) += v;
                if (p != q) t(q, p) += v;
            }
        }
    }
    return t;
}

Eigen::VectorXd diagonal_potential(const FedvrGrid& grid, const std::function<double(double)>& f) {
    Eigen::VectorXd v(grid.n_b());
    for (int p = 0; p < grid.n_b(); ++p) {
        v(p) = f(grid.nodes()[p]);
        if (!std::isfinite(v(p))) throw ConfigError("diagonal_potential: non-finite value at node");
    }
    return v;
}

}  // namespace tdgasci
