#pragma once
//
// Cubic Hermite finite elements on a uniform 1-D grid.
//
// A configuration v_h : [0, l] -> R^n is stored by its coefficient tuple
// (v_1..v_M, v'_1..v'_M), each entry an n-vector, flattened component-fastest:
//   value  of node j, component c  -> j * n + c
//   slope  of node j, component c  -> (M + j) * n + c
// The scalar finite element matrices are 2M x 2M in the dof order
// (values, slopes); the vector-valued forms are their Kronecker product with
// the n x n identity, which is never materialised on the hot paths.
//

#include <fiber/errors.hpp>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <functional>
#include <optional>

namespace fiber {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

class Grid {
public:
    Grid(double length, int node_count);

    double length() const { return length_; }
    int node_count() const { return node_count_; }
    int cell_count() const { return node_count_ - 1; }
    double h() const { return h_; }
    // 0-based: node(0) == 0, node(M - 1) == l.
    double node(int j) const;

    struct Location {
        int cell;
        double t; // local coordinate in [0, 1]
    };
    // Cell containing s; the right end maps to the last cell with t = 1.
    Location locate(double s) const;

    bool operator==(const Grid&) const = default;

private:
    double length_;
    int node_count_;
    double h_;
};

Grid build_grid(double length, int node_count);

class CoefficientTuple {
public:
    CoefficientTuple() = default;
    CoefficientTuple(int node_count, int dim);
    CoefficientTuple(int node_count, int dim, Vector coeffs);

    int node_count() const { return node_count_; }
    int dim() const { return dim_; }
    Eigen::Index size() const { return coeffs_.size(); }

    static int value_index(int node_count, int dim, int j, int c) { (void)node_count; return j * dim + c; }
    static int slope_index(int node_count, int dim, int j, int c) { return (node_count + j) * dim + c; }

    auto value(int j) { return coeffs_.segment(j * dim_, dim_); }
    auto value(int j) const { return coeffs_.segment(j * dim_, dim_); }
    auto slope(int j) { return coeffs_.segment((node_count_ + j) * dim_, dim_); }
    auto slope(int j) const { return coeffs_.segment((node_count_ + j) * dim_, dim_); }

    Vector& coeffs() { return coeffs_; }
    const Vector& coeffs() const { return coeffs_; }

    // dim x 2M view, column k is scalar dof k.
    Eigen::Map<const Eigen::MatrixXd> blocks() const
    {
        return {coeffs_.data(), dim_, 2 * node_count_};
    }

    bool same_shape(const CoefficientTuple& other) const
    {
        return node_count_ == other.node_count_ && dim_ == other.dim_;
    }
    void require_shape(const CoefficientTuple& other, const char* where) const;
    void require_grid(const Grid& grid, const char* where) const;

    bool all_finite() const { return coeffs_.allFinite(); }

    CoefficientTuple& operator+=(const CoefficientTuple& o);
    CoefficientTuple& operator-=(const CoefficientTuple& o);
    CoefficientTuple& operator*=(double a);

    friend CoefficientTuple operator+(CoefficientTuple a, const CoefficientTuple& b) { return a += b; }
    friend CoefficientTuple operator-(CoefficientTuple a, const CoefficientTuple& b) { return a -= b; }
    friend CoefficientTuple operator*(double s, CoefficientTuple a) { return a *= s; }
    friend CoefficientTuple operator*(CoefficientTuple a, double s) { return a *= s; }

    bool operator==(const CoefficientTuple& o) const
    {
        return same_shape(o) && coeffs_ == o.coeffs_;
    }

private:
    int node_count_ = 0;
    int dim_ = 0;
    Vector coeffs_;
};

// Local cubic Hermite shape functions on a cell of width h, ordered as
// (value left, slope left, value right, slope right), evaluated at local
// coordinate t in [0, 1]; order 0, 1, 2 gives value, d/ds, d^2/ds^2.
std::array<double, 4> hermite_shape(double t, double h, int order);

// Scalar dof indices of the four local shape functions of a cell.
std::array<int, 4> cell_dofs(int cell, int node_count);

Vector eval_fe(const CoefficientTuple& coeffs, const Grid& grid, double s, int order);

// Same as eval_fe with the cell already known; no range checks.
Vector eval_fe_local(const CoefficientTuple& coeffs, const Grid& grid, int cell, double t, int order);

struct AssembledForms {
    int node_count = 0;
    double h = 0.0;
    SparseMatrix mass;      // L2 products of basis functions
    SparseMatrix grad_mass; // L2 products of first derivatives
    SparseMatrix stiffness; // L2 products of second derivatives
    SparseMatrix h2;        // mass + grad_mass + stiffness
};

// The three 4x4 reference element matrices, exact in h.
struct ElementMatrices {
    Eigen::Matrix4d mass, grad_mass, stiffness;
};
ElementMatrices element_matrices(double h);

AssembledForms assemble_forms(const Grid& grid);

// S (x) I_n applied to a coefficient vector.
Vector apply_form(const SparseMatrix& scalar_form, const Vector& coeffs, int dim);
double quadratic_form(const SparseMatrix& scalar_form, const Vector& coeffs, int dim);

// Kronecker expansion S (x) I_n in the tuple's index order.
SparseMatrix expand_form(const SparseMatrix& scalar_form, int dim);

using VectorFunction = std::function<Vector(double)>;

// v_j = f(s_j), v'_j = f'(s_j); without a derivative a central difference
// with step h/100 is used (one-sided at the ends).
CoefficientTuple interpolate(const VectorFunction& f, const Grid& grid, int dim,
                             const std::optional<VectorFunction>& derivative = std::nullopt);

// f(s) * direction, the common scalar-profile case.
CoefficientTuple interpolate_scalar(const std::function<double(double)>& f,
                                    const std::optional<std::function<double(double)>>& derivative,
                                    const Vector& direction, const Grid& grid);

double h2_norm(const CoefficientTuple& coeffs, const AssembledForms& forms);
double h2_seminorm(const CoefficientTuple& coeffs, const AssembledForms& forms);
double l2_norm(const CoefficientTuple& coeffs, const AssembledForms& forms);

// Indices of the coefficients fixed by the clamped end s = l (v_M and v'_M).
bool is_dirichlet_index(int index, int node_count, int dim);
std::vector<int> free_indices(int node_count, int dim);

} // namespace fiber
