#include <fiber/hermite.hpp>

#include <cmath>
#include <sstream>
#include <vector>

namespace fiber {

Grid::Grid(double length, int node_count)
    : length_(length), node_count_(node_count), h_(0.0)
{
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidConfiguration("grid length must be positive and finite");
    if (node_count < 3)
        throw InvalidConfiguration("grid needs at least 3 nodes, got " + std::to_string(node_count));
    h_ = length / (node_count - 1);
}

double Grid::node(int j) const
{
    if (j == node_count_ - 1)
        return length_;
    return j * h_;
}

Grid::Location Grid::locate(double s) const
{
    if (!(s >= 0.0 && s <= length_)) {
        std::ostringstream os;
        os << "position " << s << " outside [0, " << length_ << "]";
        throw InvalidConfiguration(os.str());
    }
    int cell = static_cast<int>(std::floor(s / h_));
    if (cell >= cell_count())
        cell = cell_count() - 1;
    double t = (s - node(cell)) / h_;
    if (t < 0.0)
        t = 0.0;
    if (t > 1.0)
        t = 1.0;
    return {cell, t};
}

Grid build_grid(double length, int node_count) { return Grid(length, node_count); }

CoefficientTuple::CoefficientTuple(int node_count, int dim)
    : CoefficientTuple(node_count, dim, Vector::Zero(2 * node_count * dim))
{
}

CoefficientTuple::CoefficientTuple(int node_count, int dim, Vector coeffs)
    : node_count_(node_count), dim_(dim), coeffs_(std::move(coeffs))
{
    if (node_count < 1 || dim < 1)
        throw ShapeMismatch("coefficient tuple needs positive node count and dimension");
    if (coeffs_.size() != 2 * node_count * dim)
        throw ShapeMismatch("coefficient vector has length " + std::to_string(coeffs_.size()) +
                            ", expected " + std::to_string(2 * node_count * dim));
}

void CoefficientTuple::require_shape(const CoefficientTuple& other, const char* where) const
{
    if (!same_shape(other)) {
        std::ostringstream os;
        os << where << ": shape mismatch (" << node_count_ << "x" << dim_ << " vs "
           << other.node_count_ << "x" << other.dim_ << ")";
        throw ShapeMismatch(os.str());
    }
}

void CoefficientTuple::require_grid(const Grid& grid, const char* where) const
{
    if (node_count_ != grid.node_count()) {
        std::ostringstream os;
        os << where << ": tuple has " << node_count_ << " nodes, grid has " << grid.node_count();
        throw ShapeMismatch(os.str());
    }
}

CoefficientTuple& CoefficientTuple::operator+=(const CoefficientTuple& o)
{
    require_shape(o, "operator+=");
    coeffs_ += o.coeffs_;
    return *this;
}

CoefficientTuple& CoefficientTuple::operator-=(const CoefficientTuple& o)
{
    require_shape(o, "operator-=");
    coeffs_ -= o.coeffs_;
    return *this;
}

CoefficientTuple& CoefficientTuple::operator*=(double a)
{
    coeffs_ *= a;
    return *this;
}

std::array<double, 4> hermite_shape(double t, double h, int order)
{
    const double t2 = t * t;
    const double t3 = t2 * t;
    switch (order) {
    case 0:
        return {1.0 - 3.0 * t2 + 2.0 * t3, h * (t - 2.0 * t2 + t3), 3.0 * t2 - 2.0 * t3, h * (t3 - t2)};
    case 1:
        return {(6.0 * t2 - 6.0 * t) / h, 1.0 - 4.0 * t + 3.0 * t2, (6.0 * t - 6.0 * t2) / h, 3.0 * t2 - 2.0 * t};
    case 2:
        return {(12.0 * t - 6.0) / (h * h), (6.0 * t - 4.0) / h, (6.0 - 12.0 * t) / (h * h), (6.0 * t - 2.0) / h};
    default:
        throw InvalidConfiguration("derivative order must be 0, 1 or 2");
    }
}

std::array<int, 4> cell_dofs(int cell, int node_count)
{
    return {cell, node_count + cell, cell + 1, node_count + cell + 1};
}

Vector eval_fe_local(const CoefficientTuple& coeffs, const Grid& grid, int cell, double t, int order)
{
    const auto w = hermite_shape(t, grid.h(), order);
    const auto dofs = cell_dofs(cell, grid.node_count());
    const auto b = coeffs.blocks();
    Vector out = Vector::Zero(coeffs.dim());
    for (int a = 0; a < 4; ++a)
        out += w[a] * b.col(dofs[a]);
    return out;
}

Vector eval_fe(const CoefficientTuple& coeffs, const Grid& grid, double s, int order)
{
    coeffs.require_grid(grid, "eval_fe");
    if (order < 0 || order > 2)
        throw InvalidConfiguration("derivative order must be 0, 1 or 2");
    const auto loc = grid.locate(s);
    return eval_fe_local(coeffs, grid, loc.cell, loc.t, order);
}

ElementMatrices element_matrices(double h)
{
    const double h2 = h * h;
    ElementMatrices m;
    m.mass << 156, 22 * h, 54, -13 * h,
              22 * h, 4 * h2, 13 * h, -3 * h2,
              54, 13 * h, 156, -22 * h,
              -13 * h, -3 * h2, -22 * h, 4 * h2;
    m.mass *= h / 420.0;
    m.grad_mass << 36, 3 * h, -36, 3 * h,
                   3 * h, 4 * h2, -3 * h, -h2,
                   -36, -3 * h, 36, -3 * h,
                   3 * h, -h2, -3 * h, 4 * h2;
    m.grad_mass /= 30.0 * h;
    m.stiffness << 12, 6 * h, -12, 6 * h,
                   6 * h, 4 * h2, -6 * h, 2 * h2,
                   -12, -6 * h, 12, -6 * h,
                   6 * h, 2 * h2, -6 * h, 4 * h2;
    m.stiffness /= h2 * h;
    return m;
}

namespace {

SparseMatrix assemble_one(const Eigen::Matrix4d& element, int node_count)
{
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(16 * (node_count - 1));
    for (int e = 0; e < node_count - 1; ++e) {
        const auto dofs = cell_dofs(e, node_count);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                entries.emplace_back(dofs[a], dofs[b], element(a, b));
    }
    SparseMatrix m(2 * node_count, 2 * node_count);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

} // namespace

AssembledForms assemble_forms(const Grid& grid)
{
    const auto el = element_matrices(grid.h());
    AssembledForms forms;
    forms.node_count = grid.node_count();
    forms.h = grid.h();
    forms.mass = assemble_one(el.mass, grid.node_count());
    forms.grad_mass = assemble_one(el.grad_mass, grid.node_count());
    forms.stiffness = assemble_one(el.stiffness, grid.node_count());
    forms.h2 = forms.mass + forms.grad_mass + forms.stiffness;
    return forms;
}

Vector apply_form(const SparseMatrix& scalar_form, const Vector& coeffs, int dim)
{
    const auto cols = scalar_form.cols();
    if (coeffs.size() != cols * dim)
        throw ShapeMismatch("apply_form: vector length does not match form");
    Eigen::Map<const Eigen::MatrixXd> v(coeffs.data(), dim, cols);
    // Forms are symmetric, so V * S == (S * V^T)^T.
    Eigen::MatrixXd out = v * scalar_form;
    return Eigen::Map<const Vector>(out.data(), out.size());
}

double quadratic_form(const SparseMatrix& scalar_form, const Vector& coeffs, int dim)
{
    return coeffs.dot(apply_form(scalar_form, coeffs, dim));
}

SparseMatrix expand_form(const SparseMatrix& scalar_form, int dim)
{
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(scalar_form.nonZeros() * dim);
    for (int k = 0; k < scalar_form.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(scalar_form, k); it; ++it)
            for (int c = 0; c < dim; ++c)
                entries.emplace_back(it.row() * dim + c, it.col() * dim + c, it.value());
    SparseMatrix out(scalar_form.rows() * dim, scalar_form.cols() * dim);
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

namespace {

Vector checked_sample(const VectorFunction& f, double s, int dim, const char* what)
{
    Vector v = f(s);
    if (v.size() != dim)
        throw ShapeMismatch(std::string("interpolate: ") + what + " has wrong dimension");
    if (!v.allFinite()) {
        std::ostringstream os;
        os << "interpolate: non-finite " << what << " at s = " << s;
        throw InvalidConfiguration(os.str());
    }
    return v;
}

} // namespace

CoefficientTuple interpolate(const VectorFunction& f, const Grid& grid, int dim,
                             const std::optional<VectorFunction>& derivative)
{
    const int m = grid.node_count();
    CoefficientTuple out(m, dim);
    const double step = grid.h() / 100.0;
    for (int j = 0; j < m; ++j) {
        const double s = grid.node(j);
        out.value(j) = checked_sample(f, s, dim, "value");
        if (derivative) {
            out.slope(j) = checked_sample(*derivative, s, dim, "derivative");
        } else if (j == 0) {
            out.slope(j) = (-3.0 * checked_sample(f, s, dim, "value") + 4.0 * checked_sample(f, s + step, dim, "value") -
                            checked_sample(f, s + 2 * step, dim, "value")) / (2 * step);
        } else if (j == m - 1) {
            out.slope(j) = (3.0 * checked_sample(f, s, dim, "value") - 4.0 * checked_sample(f, s - step, dim, "value") +
                            checked_sample(f, s - 2 * step, dim, "value")) / (2 * step);
        } else {
            out.slope(j) = (checked_sample(f, s + step, dim, "value") - checked_sample(f, s - step, dim, "value")) /
                           (2 * step);
        }
    }
    return out;
}

CoefficientTuple interpolate_scalar(const std::function<double(double)>& f,
                                    const std::optional<std::function<double(double)>>& derivative,
                                    const Vector& direction, const Grid& grid)
{
    const int dim = static_cast<int>(direction.size());
    VectorFunction vf = [&](double s) -> Vector { return f(s) * direction; };
    std::optional<VectorFunction> vd;
    if (derivative)
        vd = [&](double s) -> Vector { return (*derivative)(s) * direction; };
    return interpolate(vf, grid, dim, vd);
}

namespace {

void require_forms(const CoefficientTuple& v, const AssembledForms& forms)
{
    if (v.node_count() != forms.node_count)
        throw ShapeMismatch("tuple does not match assembled forms");
}

} // namespace

double h2_norm(const CoefficientTuple& coeffs, const AssembledForms& forms)
{
    require_forms(coeffs, forms);
    // Summing the three forms separately avoids the cancellation of the
    // h^-3 stiffness entries against the O(h) mass entries inside h2.
    const int n = coeffs.dim();
    const Vector& c = coeffs.coeffs();
    return std::sqrt(std::max(0.0, quadratic_form(forms.mass, c, n) + quadratic_form(forms.grad_mass, c, n) +
                                       quadratic_form(forms.stiffness, c, n)));
}

double h2_seminorm(const CoefficientTuple& coeffs, const AssembledForms& forms)
{
    require_forms(coeffs, forms);
    return std::sqrt(std::max(0.0, quadratic_form(forms.stiffness, coeffs.coeffs(), coeffs.dim())));
}

double l2_norm(const CoefficientTuple& coeffs, const AssembledForms& forms)
{
    require_forms(coeffs, forms);
    return std::sqrt(std::max(0.0, quadratic_form(forms.mass, coeffs.coeffs(), coeffs.dim())));
}

bool is_dirichlet_index(int index, int node_count, int dim)
{
    const int k = index / dim;
    return k == node_count - 1 || k == 2 * node_count - 1;
}

std::vector<int> free_indices(int node_count, int dim)
{
    std::vector<int> out;
    out.reserve(2 * (node_count - 1) * dim);
    for (int i = 0; i < 2 * node_count * dim; ++i)
        if (!is_dirichlet_index(i, node_count, dim))
            out.push_back(i);
    return out;
}

} // namespace fiber
