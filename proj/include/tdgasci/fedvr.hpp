#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tdgasci {

struct LobattoRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Lobatto rule on [-1, 1].
LobattoRule lobatto_rule(int n);

enum class FunctionKind { element, bridge };

// Finite-element DVR basis on [-x_s, x_s] with Lobatto shape functions.
// Functions at the box endpoints are dropped (hard walls). Global ordering
// follows the node coordinate; a bridge function owns the shared node.
class FedvrGrid {
public:
    static FedvrGrid uniform(double x_s, double x_c, int n_elements, int n_g);
    static FedvrGrid from_boundaries(std::vector<double> boundaries, double x_c, int n_g);

    double x_s() const { return x_s_; }
    double x_c() const { return x_c_; }
    int n_g() const { return n_g_; }
    int n_elements() const { return static_cast<int>(boundaries_.size()) - 1; }
    int n_b() const { return static_cast<int>(nodes_.size()); }
    int n_c() const { return static_cast<int>(central_.size()); }

    const std::vector<double>& boundaries() const { return boundaries_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<FunctionKind>& kinds() const { return kinds_; }

    // Functions whose node lies strictly inside (-x_c, x_c), ascending.
    const std::vector<int>& central() const { return central_; }
    // Remaining functions, including the bridges at +-x_c, ascending.
    const std::vector<int>& outer() const { return outer_; }
    bool is_central(int p) const { return central_mask_[p]; }

    // Element e quadrature: physical nodes and weights, and the global function
    // index of each local shape function (-1 for a dropped endpoint).
    const std::vector<double>& element_nodes(int e) const { return elem_nodes_[e]; }
    const std::vector<double>& element_weights(int e) const { return elem_weights_[e]; }
    const std::vector<int>& element_functions(int e) const { return elem_funcs_[e]; }
    // First element that function p lives in.
    int element_of(int p) const { return first_element_[p]; }

    // Value of basis function chi_p at x (zero outside its support).
    double basis_value(int p, double x) const;
    // Values of every basis function that is nonzero at x: pairs (p, chi_p(x)).
    std::vector<std::pair<int, double>> basis_values(double x) const;
    // Element containing x (clamped to the box).
    int locate(double x) const;

    // Debug table: index, node, weight, kind, element.
    std::string summary_table() const;

private:
    void build(std::vector<double> boundaries, double x_c, int n_g);

    double x_s_ = 0.0;
    double x_c_ = 0.0;
    int n_g_ = 0;
    std::vector<double> boundaries_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<FunctionKind> kinds_;
    std::vector<int> first_element_;
    std::vector<int> central_;
    std::vector<int> outer_;
    std::vector<char> central_mask_;
    std::vector<std::vector<double>> elem_nodes_;
    std::vector<std::vector<double>> elem_weights_;
    std::vector<std::vector<int>> elem_funcs_;
};

// Kinetic energy matrix -1/2 d^2/dx^2 in the DVR basis (dense storage, banded content).
Eigen::MatrixXd kinetic_matrix(const FedvrGrid& grid);

// f evaluated at every node; the DVR representation of a local operator is diag(f(x_p)).
Eigen::VectorXd diagonal_potential(const FedvrGrid& grid, const std::function<double(double)>& f);

}  // namespace tdgasci
