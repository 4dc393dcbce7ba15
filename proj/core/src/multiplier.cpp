#include <fiber/multiplier.hpp>
#include <fiber/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fiber {

namespace {

constexpr double kMinTangent = 1e-9;
constexpr int kPoints = 5;

// Integrand psi(u) d/du r_k / (2 |d/du r_k|^2).
Vector integrand(const ScalarFunction& psi, const CoefficientTuple& r_k, const Grid& grid, int cell, double t)
{
    const Vector tan = eval_fe_local(r_k, grid, cell, t, 1);
    const double n2 = tan.squaredNorm();
    const double s = grid.node(cell) + t * grid.h();
    if (!(std::sqrt(n2) > kMinTangent)) {
        std::ostringstream os;
        os << "reference tangent vanishes at s = " << s;
        throw DegenerateConstraint(-1, s, os.str());
    }
    return psi(s) / (2.0 * n2) * tan;
}

// int over local [a, b] of the integrand in `cell`, Gauss rule mapped to it.
Vector cell_integral(const ScalarFunction& psi, const CoefficientTuple& r_k, const Grid& grid, int cell, double a,
                     double b)
{
    const auto& rule = gauss_legendre_unit(kPoints);
    Vector sum = Vector::Zero(r_k.dim());
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        sum += rule.weights[q] * integrand(psi, r_k, grid, cell, a + (b - a) * rule.nodes[q]);
    return sum * ((b - a) * grid.h());
}

} // namespace

SampledField inverse_constraint(const ScalarFunction& psi, const CoefficientTuple& r_k, const Grid& grid)
{
    r_k.require_grid(grid, "inverse_constraint");
    const auto& rule = gauss_legendre_unit(kPoints);
    const int cells = grid.cell_count();
    const int n = r_k.dim();

    double scale = 0.0;
    for (int e = 0; e < cells; ++e)
        for (double t : rule.nodes)
            scale = std::max(scale, std::abs(psi(grid.node(e) + t * grid.h())));
    if (std::abs(psi(grid.length())) > 1e-12 * std::max(scale, 1.0))
        throw InvalidConfiguration("inverse_constraint needs psi(l) = 0");

    SampledField out;
    out.node_values.assign(grid.node_count(), Vector::Zero(n));
    out.node_slopes.assign(grid.node_count(), Vector::Zero(n));
    out.positions.resize(static_cast<std::size_t>(cells) * kPoints);
    out.values.assign(out.positions.size(), Vector::Zero(n));
    out.derivatives.assign(out.positions.size(), Vector::Zero(n));

    // Integrate from the clamped end leftwards.
    for (int e = cells - 1; e >= 0; --e) {
        const Vector& right = out.node_values[e + 1];
        for (int q = 0; q < kPoints; ++q) {
            const auto idx = static_cast<std::size_t>(e) * kPoints + q;
            const double t = rule.nodes[q];
            out.positions[idx] = grid.node(e) + t * grid.h();
            out.values[idx] = right - cell_integral(psi, r_k, grid, e, t, 1.0);
            out.derivatives[idx] = integrand(psi, r_k, grid, e, t);
        }
        out.node_values[e] = right - cell_integral(psi, r_k, grid, e, 0.0, 1.0);
    }
    for (int j = 0; j < grid.node_count(); ++j) {
        const int cell = std::min(j, cells - 1);
        out.node_slopes[j] = integrand(psi, r_k, grid, cell, j == cells ? 1.0 : 0.0);
    }
    return out;
}

CoefficientTuple hermite_interpolant(const SampledField& phi, const Grid& grid)
{
    if (static_cast<int>(phi.node_values.size()) != grid.node_count() ||
        phi.node_slopes.size() != phi.node_values.size())
        throw ShapeMismatch("hermite_interpolant: field does not match grid");
    const int n = static_cast<int>(phi.node_values.front().size());
    CoefficientTuple out(grid.node_count(), n);
    for (int j = 0; j < grid.node_count(); ++j) {
        out.value(j) = phi.node_values[j];
        out.slope(j) = phi.node_slopes[j];
    }
    return out;
}

std::vector<double> linearized_constraint(const SampledField& phi, const CoefficientTuple& r_k, const Grid& grid)
{
    std::vector<double> out(phi.positions.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 2.0 * eval_fe(r_k, grid, phi.positions[i], 1).dot(phi.derivatives[i]);
    return out;
}

double lambda_action(const CoefficientTuple& r_next, const CoefficientTuple& r_k, const CoefficientTuple& r_km1,
                     const ForceField& force, const ModelParams& params, double tau, const ScalarFunction& g,
                     const Grid& grid, const AssembledForms& forms)
{
    const CoefficientTuple phi = hermite_interpolant(inverse_constraint(g, r_k, grid), grid);
    const QuadraticCost cost = assemble_cost(r_k, r_km1, force, params, tau, forms, grid);
    // grad_cost zeroes the clamped entries; phi_h vanishes there anyway.
    return -grad_cost(cost, r_next).coeffs().dot(phi.coeffs());
}

} // namespace fiber
