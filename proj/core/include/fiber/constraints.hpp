#pragma once
//
// Linearized inextensibility constraints of one time level:
//   (d/ds v_h(sigma_j) - t_j) . t_j = 0,  t_j = d/ds r_k(sigma_j),
// i.e. C v = g with g_j = |t_j|^2.
//

#include <fiber/hermite.hpp>

#include <string>
#include <utility>
#include <vector>

namespace fiber {

enum class ConstraintDensity { Nodal, Half, Third };

std::string to_string(ConstraintDensity d);
ConstraintDensity parse_density(const std::string& name);

// Constraint points per cell (1, 2 or 3).
int points_per_cell(ConstraintDensity d);

struct ConstraintPoint {
    int cell;
    double t;      // local coordinate
    double sigma;  // position in [0, l)
};

std::vector<ConstraintPoint> constraint_points(const Grid& grid, ConstraintDensity density);

class ConstraintSet {
public:
    ConstraintSet(CoefficientTuple reference, Grid grid, ConstraintDensity density);

    const CoefficientTuple& reference() const { return reference_; }
    const Grid& grid() const { return grid_; }
    ConstraintDensity density() const { return density_; }
    int rows() const { return static_cast<int>(points_.size()); }
    int dim() const { return reference_.dim(); }

    const std::vector<ConstraintPoint>& points() const { return points_; }
    const std::vector<Vector>& tangents() const { return tangents_; }

    // d x 2Mn, row j is v -> d/ds v_h(sigma_j) . t_j.
    const SparseMatrix& matrix() const { return c_; }
    const Vector& rhs() const { return g_; }

    // Column split of C into free and clamped coefficients.
    const std::vector<int>& free() const { return free_; }
    const std::vector<int>& fixed() const { return fixed_; }
    const SparseMatrix& free_matrix() const { return c_free_; }
    const SparseMatrix& fixed_matrix() const { return c_fixed_; }

    // Right-hand side for the free part given the clamped values of y.
    Vector free_rhs(const CoefficientTuple& y) const;

    Vector gather_free(const Vector& full) const;
    void scatter_free(const Vector& free_part, Vector& full) const;

private:
    CoefficientTuple reference_;
    Grid grid_;
    ConstraintDensity density_;
    std::vector<ConstraintPoint> points_;
    std::vector<Vector> tangents_;
    SparseMatrix c_;
    Vector g_;
    std::vector<int> free_, fixed_;
    SparseMatrix c_free_, c_fixed_;
};

ConstraintSet build_constraints(const CoefficientTuple& r_k, const Grid& grid, ConstraintDensity density);

// C v - g.
Vector residual(const CoefficientTuple& v, const ConstraintSet& cs);

struct TauCheck {
    double max_deviation = 0.0;
    bool satisfied = true;
};

// max |d/ds v_h - d/ds r_k| over `samples` equispaced points of [0, l], against tau^2.
TauCheck check_tau_inequality(const CoefficientTuple& v, const ConstraintSet& cs, double tau, int samples);

} // namespace fiber
