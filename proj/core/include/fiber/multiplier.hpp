#pragma once
//
// Diagnostic recovery of the multiplier action. The linearized constraint
// e'[phi] = 2 d/ds r_k . d/ds phi is inverted explicitly by
//   phi(s) = -int_s^l psi(u) d/du r_k(u) / (2 |d/du r_k(u)|^2) du,
// and the multiplier tested with g is lambda[g] = -J'(r_{k+1})[phi], phi = e'^{-1} g.
// Not on the solve path.
//

#include <fiber/model.hpp>

#include <functional>
#include <vector>

namespace fiber {

using ScalarFunction = std::function<double(double)>;

// phi and d/ds phi sampled at the 5-point Gauss nodes of every cell (ascending
// in s), plus node values and slopes for the Hermite interpolant.
struct SampledField {
    std::vector<double> positions;
    std::vector<Vector> values;
    std::vector<Vector> derivatives;
    std::vector<Vector> node_values;
    std::vector<Vector> node_slopes;
};

// Requires psi(l) = 0 (relative to max |psi| over the samples) and nonzero
// tangents of r_k; throws InvalidConfiguration / DegenerateConstraint.
SampledField inverse_constraint(const ScalarFunction& psi, const CoefficientTuple& r_k, const Grid& grid);

// Hermite interpolant phi_h of the sampled field.
CoefficientTuple hermite_interpolant(const SampledField& phi, const Grid& grid);

// 2 d/ds r_k . d/ds phi at the sample positions.
std::vector<double> linearized_constraint(const SampledField& phi, const CoefficientTuple& r_k, const Grid& grid);

// -J'(r_next)[phi_h] = -2 (omega (D^2 r_next, phi_h) + bend (d_ss r_next, d_ss phi_h) - (f, phi_h)),
// D^2 r_next = (r_next - 2 r_k + r_km1) / tau^2.
double lambda_action(const CoefficientTuple& r_next, const CoefficientTuple& r_k, const CoefficientTuple& r_km1,
                     const ForceField& force, const ModelParams& params, double tau, const ScalarFunction& g,
                     const Grid& grid, const AssembledForms& forms);

} // namespace fiber
