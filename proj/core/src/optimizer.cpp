#include <fiber/optimizer.hpp>

#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace fiber {

std::string to_string(StartGuess s)
{
    return s == StartGuess::Previous ? "previous" : "extrapolated";
}

StartGuess parse_start_guess(const std::string& text)
{
    if (text == "previous")
        return StartGuess::Previous;
    if (text == "extrapolated")
        return StartGuess::Extrapolated;
    throw InvalidConfiguration("unknown start guess '" + text + "'");
}

void OptimizerConfig::validate() const
{
    auto bad = [](const std::string& what) { throw InvalidConfiguration(what); };
    if (!(tol_a > 0.0) || !(tol_r > 0.0))
        bad("optimizer tolerances must be positive");
    if (max_iter < 1)
        bad("optimizer maxIter must be at least 1");
    if (!(beta > 0.0 && beta < 1.0))
        bad("armijo beta must lie in (0, 1)");
    if (!(armijo_c > 0.0 && armijo_c < 1.0))
        bad("armijo c must lie in (0, 1)");
    if (!(sigma0 > 0.0) || !(sigma_min > 0.0) || !(sigma_min < sigma0))
        bad("armijo steps need 0 < sigmaMin < sigma0");
    if (!(rank_tolerance > 0.0))
        bad("rank tolerance must be positive");
}

OptimizerConfig OptimizerConfig::euclidean()
{
    OptimizerConfig c;
    c.projection = Metric::Euclidean;
    c.gradient_metric = Metric::Euclidean;
    c.stationarity_norm = Metric::H2;
    return c;
}

namespace {

std::vector<int> free_scalar_dofs(int m)
{
    std::vector<int> out;
    for (int k = 0; k < 2 * m; ++k)
        if (k != m - 1 && k != 2 * m - 1)
            out.push_back(k);
    return out;
}

} // namespace

struct GradientMap::Impl {
    std::vector<int> free;
    Eigen::SimplicialLLT<SparseMatrix> llt;
};

GradientMap::GradientMap(const AssembledForms& forms, Metric metric, int dim)
    : metric_(metric), node_count_(forms.node_count), dim_(dim), impl_(std::make_unique<Impl>())
{
    if (metric == Metric::Euclidean)
        return;
    impl_->free = free_scalar_dofs(node_count_);
    const SparseMatrix full = metric_form(forms, metric);
    std::vector<int> map(full.rows(), -1);
    for (std::size_t k = 0; k < impl_->free.size(); ++k)
        map[impl_->free[k]] = static_cast<int>(k);
    std::vector<Eigen::Triplet<double>> entries;
    for (int k = 0; k < full.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(full, k); it; ++it)
            if (map[it.row()] >= 0 && map[it.col()] >= 0)
                entries.emplace_back(map[it.row()], map[it.col()], it.value());
    const auto nf = static_cast<Eigen::Index>(impl_->free.size());
    SparseMatrix g(nf, nf);
    g.setFromTriplets(entries.begin(), entries.end());
    impl_->llt.compute(g);
    if (impl_->llt.info() != Eigen::Success)
        throw SingularSystem("gradient metric is not positive definite on the free coefficients");
}

GradientMap::~GradientMap() = default;
GradientMap::GradientMap(GradientMap&&) noexcept = default;
GradientMap& GradientMap::operator=(GradientMap&&) noexcept = default;

CoefficientTuple GradientMap::operator()(const QuadraticCost& cost, const CoefficientTuple& v) const
{
    CoefficientTuple g = grad_cost(cost, v);
    if (metric_ == Metric::Euclidean)
        return g;
    if (g.node_count() != node_count_ || g.dim() != dim_)
        throw ShapeMismatch("gradient map: tuple shape mismatch");
    const auto blocks = g.blocks();
    const auto nf = static_cast<Eigen::Index>(impl_->free.size());
    Eigen::MatrixXd x(nf, dim_);
    for (Eigen::Index k = 0; k < nf; ++k)
        x.row(k) = blocks.col(impl_->free[k]).transpose();
    const Eigen::MatrixXd z = impl_->llt.solve(x);
    CoefficientTuple out(node_count_, dim_);
    Eigen::Map<Eigen::MatrixXd> ob(out.coeffs().data(), dim_, 2 * node_count_);
    for (Eigen::Index k = 0; k < nf; ++k)
        ob.col(impl_->free[k]) = z.row(k).transpose();
    return out;
}

namespace {

double norm_in(const CoefficientTuple& p, const LevelProblem& problem)
{
    if (problem.stationarity_form.rows() == 0)
        return p.coeffs().norm();
    return std::sqrt(std::max(0.0, quadratic_form(problem.stationarity_form, p.coeffs(), p.dim())));
}

SparseMatrix stationarity_form_for(const AssembledForms& forms, Metric m)
{
    if (m == Metric::Euclidean)
        return SparseMatrix();
    return metric_form(forms, m);
}

struct OwnedProblem {
    Projector projector;
    GradientMap gradient;
    LevelProblem problem;

    OwnedProblem(const QuadraticCost& cost, const ConstraintSet& cs, const AssembledForms& forms,
                 const OptimizerConfig& config)
        : projector(cs, config.projection, forms, config.rank_policy, config.rank_tolerance),
          gradient(forms, config.gradient_metric, cs.dim()),
          problem{cost, &cs, &projector, &gradient, &forms, stationarity_form_for(forms, config.stationarity_norm)}
    {
    }
    OwnedProblem(const OwnedProblem&) = delete;
};

} // namespace

double stationarity(const CoefficientTuple& v, const LevelProblem& problem)
{
    const CoefficientTuple step = v - (*problem.gradient)(problem.cost, v);
    const CoefficientTuple p = v - problem.projector->project(step);
    return norm_in(p, problem);
}

double stationarity(const CoefficientTuple& v, const QuadraticCost& cost, const ConstraintSet& cs,
                    const AssembledForms& forms, const OptimizerConfig& config)
{
    config.validate();
    OwnedProblem owned(cost, cs, forms, config);
    return stationarity(v, owned.problem);
}

namespace {

ArmijoResult armijo_with_gradient(const CoefficientTuple& v, double jv, const CoefficientTuple& grad,
                                  const CoefficientTuple& euclidean_grad, const LevelProblem& problem,
                                  const OptimizerConfig& config)
{
    // J(w) - J(v) is evaluated as d^T (2Av + b) + d^T A d, d = w - v, which
    // stays accurate when the decrease is far below the magnitude of J.
    ArmijoResult out;
    double sigma = config.sigma0;
    while (sigma >= config.sigma_min) {
        CoefficientTuple trial = problem.projector->project(v - sigma * grad);
        const Vector d = trial.coeffs() - v.coeffs();
        const double decrease =
            d.dot(euclidean_grad.coeffs()) + quadratic_form(problem.cost.a, d, problem.cost.dim);
        const double dist = problem.projector->distance(v, trial);
        if (decrease < 0.0 && decrease <= -config.armijo_c * dist * dist / sigma) {
            out.sigma = sigma;
            out.v = std::move(trial);
            out.cost = jv + decrease;
            out.decrease = decrease;
            return out;
        }
        sigma *= config.beta;
        ++out.backtracks;
    }
    std::ostringstream os;
    os << "projected Armijo rule found no decrease above sigma = " << config.sigma_min;
    throw ArmijoFailure(os.str());
}

} // namespace

ArmijoResult armijo_step(const CoefficientTuple& v, const LevelProblem& problem, const OptimizerConfig& config)
{
    return armijo_with_gradient(v, eval_cost(problem.cost, v), (*problem.gradient)(problem.cost, v),
                                grad_cost(problem.cost, v), problem, config);
}

ArmijoResult armijo_step(const CoefficientTuple& v, const QuadraticCost& cost, const ConstraintSet& cs,
                         const AssembledForms& forms, const OptimizerConfig& config)
{
    config.validate();
    OwnedProblem owned(cost, cs, forms, config);
    return armijo_step(v, owned.problem, config);
}

namespace {

LevelResult run_projected_gradient(const CoefficientTuple& start, const LevelProblem& problem,
                                   const OptimizerConfig& config)
{
    LevelResult out;
    SolveStats& stats = out.stats;
    stats.dropped_rows = static_cast<int>(problem.projector->dropped_rows().size());
    CoefficientTuple v = start;
    double jv = eval_cost(problem.cost, v);
    stats.cost_history.push_back(jv);

    CoefficientTuple grad = (*problem.gradient)(problem.cost, v);
    double p = norm_in(v - problem.projector->project(v - grad), problem);
    stats.initial_stationarity = p;
    const double target = config.tol_a + config.tol_r * p;
    while (p > target) {
        if (stats.iterations >= config.max_iter) {
            stats.final_stationarity = p;
            std::ostringstream os;
            os << "projected gradient did not reach stationarity " << target << " within " << config.max_iter
               << " iterations (last " << p << ")";
            throw MaxIterationsExceeded(v, stats, os.str());
        }
        ArmijoResult step = armijo_with_gradient(v, jv, grad, grad_cost(problem.cost, v), problem, config);
        v = std::move(step.v);
        jv = step.cost;
        ++stats.iterations;
        stats.backtracks += step.backtracks;
        stats.cost_history.push_back(jv);
        stats.decreases.push_back(step.decrease);
        stats.step_sizes.push_back(step.sigma);
        grad = (*problem.gradient)(problem.cost, v);
        p = norm_in(v - problem.projector->project(v - grad), problem);
    }
    stats.final_stationarity = p;
    out.r_next = std::move(v);
    return out;
}

} // namespace

LevelResult minimize(const CoefficientTuple& start, const QuadraticCost& cost, const ConstraintSet& cs,
                     const AssembledForms& forms, const OptimizerConfig& config)
{
    config.validate();
    OwnedProblem owned(cost, cs, forms, config);
    return run_projected_gradient(start, owned.problem, config);
}

struct LevelSolver::Impl {
    Grid grid;
    const AssembledForms* forms;
    ModelParams params;
    OptimizerConfig config;
    CoefficientTuple load;
    GradientMap gradient;
    SparseMatrix stationarity_form;
};

LevelSolver::LevelSolver(const Grid& grid, const AssembledForms& forms, const ModelParams& params,
                         const ForceField& force, const OptimizerConfig& config)
{
    params.validate();
    config.validate();
    if (forms.node_count != grid.node_count())
        throw ShapeMismatch("level solver: forms do not match grid");
    impl_ = std::unique_ptr<Impl>(new Impl{grid, &forms, params, config, force_tuple(force, grid, params.dim),
                                           GradientMap(forms, config.gradient_metric, params.dim),
                                           stationarity_form_for(forms, config.stationarity_norm)});
}

LevelSolver::~LevelSolver() = default;
LevelSolver::LevelSolver(LevelSolver&&) noexcept = default;

LevelResult LevelSolver::solve(const CoefficientTuple& r_k, const CoefficientTuple& r_km1, double tau,
                               ConstraintDensity density) const
{
    const ConstraintSet cs = build_constraints(r_k, impl_->grid, density);
    const Projector projector(cs, impl_->config.projection, *impl_->forms, impl_->config.rank_policy,
                              impl_->config.rank_tolerance);
    LevelProblem problem{assemble_cost(r_k, r_km1, impl_->load, impl_->params, tau, *impl_->forms), &cs, &projector,
                         &impl_->gradient, impl_->forms, impl_->stationarity_form};
    // r_k == r_{k-1} (first level, fiber at rest) needs no extrapolation.
    if (impl_->config.start == StartGuess::Extrapolated && r_k.coeffs() != r_km1.coeffs())
        return run_projected_gradient(projector.project(2.0 * r_k - r_km1), problem, impl_->config);
    return run_projected_gradient(r_k, problem, impl_->config);
}

LevelResult solve_time_level(const CoefficientTuple& r_k, const CoefficientTuple& r_km1, const ForceField& force,
                             const ModelParams& params, double tau, ConstraintDensity density,
                             const AssembledForms& forms, const Grid& grid, const OptimizerConfig& config)
{
    return LevelSolver(grid, forms, params, force, config).solve(r_k, r_km1, tau, density);
}

} // namespace fiber
