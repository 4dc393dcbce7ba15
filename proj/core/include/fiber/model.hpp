#pragma once
//
// Physical parameters, external forces and the per-level quadratic cost
//   J(v) = v^T A v + b^T v + c,
//   A = (omega / tau^2) M + bend * S,  b = 2 M ((omega / tau^2) rbar - f),
//   c = (omega / tau^2) rbar^T M rbar,  rbar = -2 r_k + r_{k-1},
// with M the mass form and S the stiffness form of the Hermite space.
//

#include <fiber/hermite.hpp>

#include <string>
#include <variant>
#include <vector>

namespace fiber {

struct ModelParams {
    double omega = 1e-5;
    double bend = 1e-9;
    double length = 1.0;
    double end_time = 1e-3;
    int dim = 2;
    Vector gravity_dir; // empty means -e_1

    // Throws InvalidConfiguration on any violated invariant.
    void validate() const;
    Vector gravity() const;
};

struct ZeroForce {};

// (s-1)^3 sin(2 pi (1-s)) e_2
struct CaseAForce {};

// -exp(-10 (s-0.5)^2) e_2
struct CaseBForce {};

// f_1 e_1 + f_2(s) e_2, f_1 = -1e3 * omega, f_2 = -1e-2 sin(2 pi (1-s))
struct CombinedForce {
    double omega = 1e-5;
};

// Piecewise-linear interpolation of samples (positions ascending).
struct TabulatedForce {
    std::vector<double> positions;
    std::vector<Vector> values;
};

using ForceField = std::variant<ZeroForce, CaseAForce, CaseBForce, CombinedForce, TabulatedForce>;

std::string force_name(const ForceField& force);

// Point value f(s) in R^dim.
Vector force_value(const ForceField& force, double s, int dim);

// Load tuple: the Hermite interpolant of f (analytic slopes where known).
CoefficientTuple force_tuple(const ForceField& force, const Grid& grid, int dim);

CoefficientTuple initial_state(const Grid& grid, const ModelParams& params);

struct QuadraticCost {
    int node_count = 0;
    int dim = 0;
    double tau = 0.0;
    SparseMatrix a; // scalar 2M x 2M form, acts as a (x) I_n
    Vector b;
    double c = 0.0;

    // Split representation used for evaluation without cancellation:
    // J(v) = q |v + rbar|_M^2 + bend |v|_S^2 - 2 (load, v)_M.
    double q = 0.0;
    double bend = 0.0;
    SparseMatrix mass, stiffness;
    Vector rbar, load;
};

// v^T A v + b^T v + c evaluated literally from the triple.
double eval_cost_expanded(const QuadraticCost& cost, const CoefficientTuple& v);

QuadraticCost assemble_cost(const CoefficientTuple& r_k, const CoefficientTuple& r_km1, const ForceField& force,
                            const ModelParams& params, double tau, const AssembledForms& forms, const Grid& grid);

// Same, with the load tuple already computed.
QuadraticCost assemble_cost(const CoefficientTuple& r_k, const CoefficientTuple& r_km1, const CoefficientTuple& load,
                            const ModelParams& params, double tau, const AssembledForms& forms);

double eval_cost(const QuadraticCost& cost, const CoefficientTuple& v);

// 2 A v + b, with the clamped-end coefficients zeroed.
CoefficientTuple grad_cost(const QuadraticCost& cost, const CoefficientTuple& v);

} // namespace fiber
