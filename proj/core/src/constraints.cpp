#include <fiber/constraints.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fiber {

std::string to_string(ConstraintDensity d)
{
    switch (d) {
    case ConstraintDensity::Nodal: return "nodal";
    case ConstraintDensity::Half: return "half";
    case ConstraintDensity::Third: return "third";
    }
    return "?";
}

ConstraintDensity parse_density(const std::string& name)
{
    if (name == "nodal")
        return ConstraintDensity::Nodal;
    if (name == "half")
        return ConstraintDensity::Half;
    if (name == "third")
        return ConstraintDensity::Third;
    throw InvalidConfiguration("unknown constraint density '" + name + "' (expected nodal, half or third)");
}

int points_per_cell(ConstraintDensity d)
{
    switch (d) {
    case ConstraintDensity::Nodal: return 1;
    case ConstraintDensity::Half: return 2;
    case ConstraintDensity::Third: return 3;
    }
    return 1;
}

std::vector<ConstraintPoint> constraint_points(const Grid& grid, ConstraintDensity density)
{
    const int per = points_per_cell(density);
    std::vector<ConstraintPoint> pts;
    pts.reserve(per * grid.cell_count());
    for (int e = 0; e < grid.cell_count(); ++e)
        for (int q = 0; q < per; ++q) {
            const double t = static_cast<double>(q) / per;
            pts.push_back({e, t, grid.node(e) + t * grid.h()});
        }
    return pts;
}

ConstraintSet::ConstraintSet(CoefficientTuple reference, Grid grid, ConstraintDensity density)
    : reference_(std::move(reference)), grid_(std::move(grid)), density_(density)
{
    reference_.require_grid(grid_, "build_constraints");
    if (!reference_.all_finite())
        throw InvalidConfiguration("build_constraints: reference has non-finite coefficients");
    const int m = grid_.node_count();
    const int n = reference_.dim();
    points_ = constraint_points(grid_, density_);
    const int d = rows();

    if (d >= 2 * (m - 1) * n)
        throw InvalidConfiguration("too many constraint points for the free coefficients");

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(d) * 4 * n);
    tangents_.reserve(d);
    g_.resize(d);
    for (int j = 0; j < d; ++j) {
        const auto& p = points_[j];
        Vector t = eval_fe_local(reference_, grid_, p.cell, p.t, 1);
        const double norm = t.norm();
        if (!(norm > 1e-9)) {
            std::ostringstream os;
            os << "degenerate reference: tangent norm " << norm << " at constraint point " << j << " (s = "
               << p.sigma << ")";
            throw DegenerateConstraint(j, p.sigma, os.str());
        }
        const auto w = hermite_shape(p.t, grid_.h(), 1);
        const auto dofs = cell_dofs(p.cell, m);
        for (int a = 0; a < 4; ++a) {
            if (w[a] == 0.0)
                continue;
            for (int c = 0; c < n; ++c)
                entries.emplace_back(j, dofs[a] * n + c, w[a] * t(c));
        }
        g_(j) = t.squaredNorm();
        tangents_.push_back(std::move(t));
    }
    c_.resize(d, 2 * m * n);
    c_.setFromTriplets(entries.begin(), entries.end());

    free_ = free_indices(m, n);
    std::vector<int> column_map(2 * m * n, -1);
    for (int i = 0; i < 2 * m * n; ++i)
        if (is_dirichlet_index(i, m, n))
            fixed_.push_back(i);
    for (std::size_t k = 0; k < free_.size(); ++k)
        column_map[free_[k]] = static_cast<int>(k);
    std::vector<Eigen::Triplet<double>> ef, ex;
    for (int k = 0; k < c_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(c_, k); it; ++it) {
            const int col = static_cast<int>(it.col());
            if (column_map[col] >= 0) {
                ef.emplace_back(it.row(), column_map[col], it.value());
            } else {
                const auto pos = std::find(fixed_.begin(), fixed_.end(), col) - fixed_.begin();
                ex.emplace_back(it.row(), pos, it.value());
            }
        }
    c_free_.resize(d, static_cast<Eigen::Index>(free_.size()));
    c_free_.setFromTriplets(ef.begin(), ef.end());
    c_fixed_.resize(d, static_cast<Eigen::Index>(fixed_.size()));
    c_fixed_.setFromTriplets(ex.begin(), ex.end());
}

Vector ConstraintSet::free_rhs(const CoefficientTuple& y) const
{
    reference_.require_shape(y, "free_rhs");
    Vector yf(static_cast<Eigen::Index>(fixed_.size()));
    for (std::size_t k = 0; k < fixed_.size(); ++k)
        yf(k) = y.coeffs()(fixed_[k]);
    return g_ - c_fixed_ * yf;
}

Vector ConstraintSet::gather_free(const Vector& full) const
{
    Vector out(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k)
        out(k) = full(free_[k]);
    return out;
}

void ConstraintSet::scatter_free(const Vector& free_part, Vector& full) const
{
    for (std::size_t k = 0; k < free_.size(); ++k)
        full(free_[k]) = free_part(k);
}

ConstraintSet build_constraints(const CoefficientTuple& r_k, const Grid& grid, ConstraintDensity density)
{
    return ConstraintSet(r_k, grid, density);
}

Vector residual(const CoefficientTuple& v, const ConstraintSet& cs)
{
    cs.reference().require_shape(v, "residual");
    return cs.matrix() * v.coeffs() - cs.rhs();
}

TauCheck check_tau_inequality(const CoefficientTuple& v, const ConstraintSet& cs, double tau, int samples)
{
    cs.reference().require_shape(v, "check_tau_inequality");
    const Grid& grid = cs.grid();
    if (samples < grid.node_count())
        throw InvalidConfiguration("check_tau_inequality needs at least M samples");
    TauCheck out;
    const CoefficientTuple diff = v - cs.reference();
    for (int i = 0; i < samples; ++i) {
        const double s = grid.length() * static_cast<double>(i) / (samples - 1);
        out.max_deviation = std::max(out.max_deviation, eval_fe(diff, grid, s, 1).norm());
    }
    out.satisfied = out.max_deviation <= tau * tau;
    return out;
}

} // namespace fiber
