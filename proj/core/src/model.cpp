#include <fiber/model.hpp>

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fiber {

namespace {

constexpr double two_pi = boost::math::constants::two_pi<double>();

Vector along(int dim, int axis, double a)
{
    Vector v = Vector::Zero(dim);
    v(axis) = a;
    return v;
}

Vector tabulated_value(const TabulatedForce& t, double s, int dim)
{
    if (t.positions.empty() || t.positions.size() != t.values.size())
        throw InvalidConfiguration("tabulated force needs matching, non-empty positions and values");
    for (const auto& v : t.values)
        if (v.size() != dim)
            throw ShapeMismatch("tabulated force sample has wrong dimension");
    const auto& x = t.positions;
    if (s <= x.front())
        return t.values.front();
    if (s >= x.back())
        return t.values.back();
    const auto it = std::upper_bound(x.begin(), x.end(), s);
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double w = (s - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - w) * t.values[i - 1] + w * t.values[i];
}

} // namespace

void ModelParams::validate() const
{
    auto bad = [](const std::string& what) { throw InvalidConfiguration(what); };
    if (!(omega > 0.0) || !std::isfinite(omega))
        bad("omega must be positive");
    if (!(bend > 0.0) || !std::isfinite(bend))
        bad("bend must be positive");
    if (!(length > 0.0) || !std::isfinite(length))
        bad("length must be positive");
    if (!(end_time > 0.0) || !std::isfinite(end_time))
        bad("end time must be positive");
    if (dim != 2 && dim != 3)
        bad("dim must be 2 or 3");
    const Vector g = gravity();
    if (g.size() != dim)
        bad("gravity direction has wrong dimension");
    if (std::abs(g.norm() - 1.0) > 1e-14)
        bad("gravity direction must be a unit vector");
}

Vector ModelParams::gravity() const
{
    if (gravity_dir.size() == 0)
        return along(dim, 0, -1.0);
    return gravity_dir;
}

std::string force_name(const ForceField& force)
{
    struct {
        std::string operator()(const ZeroForce&) const { return "zero"; }
        std::string operator()(const CaseAForce&) const { return "caseA"; }
        std::string operator()(const CaseBForce&) const { return "caseB"; }
        std::string operator()(const CombinedForce&) const { return "combined"; }
        std::string operator()(const TabulatedForce&) const { return "tabulated"; }
    } visitor;
    return std::visit(visitor, force);
}

Vector force_value(const ForceField& force, double s, int dim)
{
    struct {
        double s;
        int dim;
        Vector operator()(const ZeroForce&) const { return Vector::Zero(dim); }
        Vector operator()(const CaseAForce&) const
        {
            return along(dim, 1, std::pow(s - 1.0, 3) * std::sin(two_pi * (1.0 - s)));
        }
        Vector operator()(const CaseBForce&) const
        {
            return along(dim, 1, -std::exp(-10.0 * (s - 0.5) * (s - 0.5)));
        }
        Vector operator()(const CombinedForce& f) const
        {
            Vector v = Vector::Zero(dim);
            v(0) = -1e3 * f.omega;
            v(1) = -1e-2 * std::sin(two_pi * (1.0 - s));
            return v;
        }
        Vector operator()(const TabulatedForce& t) const { return tabulated_value(t, s, dim); }
    } visitor{s, dim};
    return std::visit(visitor, force);
}

namespace {

std::optional<VectorFunction> force_derivative(const ForceField& force, int dim)
{
    if (std::holds_alternative<ZeroForce>(force))
        return VectorFunction([dim](double) -> Vector { return Vector::Zero(dim); });
    if (std::holds_alternative<CaseAForce>(force))
        return VectorFunction([dim](double s) -> Vector {
            const double q = s - 1.0;
            const double arg = two_pi * (1.0 - s);
            return along(dim, 1, 3.0 * q * q * std::sin(arg) - two_pi * q * q * q * std::cos(arg));
        });
    if (std::holds_alternative<CaseBForce>(force))
        return VectorFunction([dim](double s) -> Vector {
            return along(dim, 1, 20.0 * (s - 0.5) * std::exp(-10.0 * (s - 0.5) * (s - 0.5)));
        });
    if (std::holds_alternative<CombinedForce>(force))
        return VectorFunction([dim](double s) -> Vector {
            return along(dim, 1, 1e-2 * two_pi * std::cos(two_pi * (1.0 - s)));
        });
    return std::nullopt;
}

} // namespace

CoefficientTuple force_tuple(const ForceField& force, const Grid& grid, int dim)
{
    if (dim < 2)
        throw InvalidConfiguration("forces need dim >= 2");
    VectorFunction f = [&force, dim](double s) { return force_value(force, s, dim); };
    return interpolate(f, grid, dim, force_derivative(force, dim));
}

CoefficientTuple initial_state(const Grid& grid, const ModelParams& params)
{
    params.validate();
    const Vector eg = params.gravity();
    CoefficientTuple r(grid.node_count(), params.dim);
    for (int j = 0; j < grid.node_count(); ++j) {
        r.value(j) = (grid.length() - grid.node(j)) * eg;
        r.slope(j) = -eg;
    }
    // Exact zero at the clamped end.
    r.value(grid.node_count() - 1).setZero();
    return r;
}

QuadraticCost assemble_cost(const CoefficientTuple& r_k, const CoefficientTuple& r_km1, const CoefficientTuple& load,
                            const ModelParams& params, double tau, const AssembledForms& forms)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw InvalidConfiguration("time step must be positive");
    r_k.require_shape(r_km1, "assemble_cost");
    r_k.require_shape(load, "assemble_cost");
    if (r_k.node_count() != forms.node_count)
        throw ShapeMismatch("assemble_cost: tuples do not match assembled forms");
    const double q = params.omega / (tau * tau);
    const int n = r_k.dim();
    const Vector rbar = -2.0 * r_k.coeffs() + r_km1.coeffs();

    QuadraticCost cost;
    cost.node_count = r_k.node_count();
    cost.dim = n;
    cost.tau = tau;
    cost.a = q * forms.mass + params.bend * forms.stiffness;
    cost.b = 2.0 * apply_form(forms.mass, q * rbar - load.coeffs(), n);
    cost.c = q * quadratic_form(forms.mass, rbar, n);
    cost.q = q;
    cost.bend = params.bend;
    cost.mass = forms.mass;
    cost.stiffness = forms.stiffness;
    cost.rbar = rbar;
    cost.load = load.coeffs();
    return cost;
}

QuadraticCost assemble_cost(const CoefficientTuple& r_k, const CoefficientTuple& r_km1, const ForceField& force,
                            const ModelParams& params, double tau, const AssembledForms& forms, const Grid& grid)
{
    r_k.require_grid(grid, "assemble_cost");
    return assemble_cost(r_k, r_km1, force_tuple(force, grid, r_k.dim()), params, tau, forms);
}

namespace {

void require_cost_shape(const QuadraticCost& cost, const CoefficientTuple& v, const char* where)
{
    if (v.node_count() != cost.node_count || v.dim() != cost.dim) {
        std::ostringstream os;
        os << where << ": tuple shape does not match cost";
        throw ShapeMismatch(os.str());
    }
}

} // namespace

double eval_cost_expanded(const QuadraticCost& cost, const CoefficientTuple& v)
{
    require_cost_shape(cost, v, "eval_cost");
    return quadratic_form(cost.a, v.coeffs(), cost.dim) + cost.b.dot(v.coeffs()) + cost.c;
}

double eval_cost(const QuadraticCost& cost, const CoefficientTuple& v)
{
    if (cost.rbar.size() == 0)
        return eval_cost_expanded(cost, v);
    require_cost_shape(cost, v, "eval_cost");
    const Vector& x = v.coeffs();
    const Vector shifted = x + cost.rbar;
    const Vector ms = apply_form(cost.mass, shifted, cost.dim);
    return cost.q * shifted.dot(ms) + cost.bend * quadratic_form(cost.stiffness, x, cost.dim) -
           2.0 * cost.load.dot(apply_form(cost.mass, x, cost.dim));
}

CoefficientTuple grad_cost(const QuadraticCost& cost, const CoefficientTuple& v)
{
    require_cost_shape(cost, v, "grad_cost");
    Vector g;
    if (cost.rbar.size() == 0) {
        g = 2.0 * apply_form(cost.a, v.coeffs(), cost.dim) + cost.b;
    } else {
        g = 2.0 * (apply_form(cost.mass, cost.q * (v.coeffs() + cost.rbar) - cost.load, cost.dim) +
                   cost.bend * apply_form(cost.stiffness, v.coeffs(), cost.dim));
    }
    const int m = cost.node_count;
    const int n = cost.dim;
    g.segment((m - 1) * n, n).setZero();
    g.segment((2 * m - 1) * n, n).setZero();
    return CoefficientTuple(m, n, std::move(g));
}

} // namespace fiber
