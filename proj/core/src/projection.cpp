#include <fiber/projection.hpp>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <Eigen/SparseQR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fiber {

std::string to_string(Metric m)
{
    switch (m) {
    case Metric::Euclidean: return "euclidean";
    case Metric::L2: return "l2";
    case Metric::Seminorm: return "seminorm";
    case Metric::H2: return "h2";
    }
    return "?";
}

Metric parse_metric(const std::string& name)
{
    if (name == "euclidean")
        return Metric::Euclidean;
    if (name == "l2")
        return Metric::L2;
    if (name == "seminorm")
        return Metric::Seminorm;
    if (name == "h2")
        return Metric::H2;
    throw InvalidConfiguration("unknown metric '" + name + "' (expected euclidean, l2, seminorm or h2)");
}

SparseMatrix metric_form(const AssembledForms& forms, Metric metric)
{
    switch (metric) {
    case Metric::Euclidean: {
        SparseMatrix id(2 * forms.node_count, 2 * forms.node_count);
        id.setIdentity();
        return id;
    }
    case Metric::L2: return forms.mass;
    case Metric::Seminorm: return forms.stiffness;
    case Metric::H2: return forms.h2;
    }
    throw InvalidConfiguration("unknown metric");
}

double metric_norm(const CoefficientTuple& v, const AssembledForms& forms, Metric metric)
{
    if (metric == Metric::Euclidean)
        return v.coeffs().norm();
    if (v.node_count() != forms.node_count)
        throw ShapeMismatch("metric_norm: tuple does not match assembled forms");
    return std::sqrt(std::max(0.0, quadratic_form(metric_form(forms, metric), v.coeffs(), v.dim())));
}

std::vector<int> independent_rows(const ConstraintSet& cs, double rank_tolerance, std::vector<int>* dropped)
{
    const SparseMatrix& c = cs.free_matrix();
    const int d = static_cast<int>(c.rows());
    Vector scale(d);
    for (int j = 0; j < d; ++j)
        scale(j) = c.row(j).norm();
    for (int j = 0; j < d; ++j)
        if (!(scale(j) > 0.0)) {
            std::ostringstream os;
            os << "constraint row " << j << " has no free coefficients";
            throw DegenerateConstraint(j, cs.points()[j].sigma, os.str());
        }
    SparseMatrix ct = (scale.cwiseInverse().asDiagonal() * c).transpose();
    ct.makeCompressed();
    Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
    qr.setPivotThreshold(rank_tolerance);
    qr.compute(ct);
    if (qr.info() != Eigen::Success)
        throw SingularSystem("rank detection failed: " + qr.lastErrorMessage());
    const auto& perm = qr.colsPermutation().indices();
    const int rank = static_cast<int>(qr.rank());
    std::vector<int> keep(perm.data(), perm.data() + rank);
    std::sort(keep.begin(), keep.end());
    if (dropped) {
        dropped->assign(perm.data() + rank, perm.data() + d);
        std::sort(dropped->begin(), dropped->end());
    }
    return keep;
}

namespace {

SparseMatrix select_rows(const SparseMatrix& m, const std::vector<int>& rows)
{
    std::vector<Eigen::Triplet<double>> entries;
    std::vector<int> map(m.rows(), -1);
    for (std::size_t k = 0; k < rows.size(); ++k)
        map[rows[k]] = static_cast<int>(k);
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            if (map[it.row()] >= 0)
                entries.emplace_back(map[it.row()], it.col(), it.value());
    SparseMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

SparseMatrix restrict_free(const SparseMatrix& full, const std::vector<int>& free)
{
    std::vector<int> map(full.rows(), -1);
    for (std::size_t k = 0; k < free.size(); ++k)
        map[free[k]] = static_cast<int>(k);
    std::vector<Eigen::Triplet<double>> entries;
    for (int k = 0; k < full.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(full, k); it; ++it)
            if (map[it.row()] >= 0 && map[it.col()] >= 0)
                entries.emplace_back(map[it.row()], map[it.col()], it.value());
    const auto n = static_cast<Eigen::Index>(free.size());
    SparseMatrix out(n, n);
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

Vector select(const Vector& v, const std::vector<int>& rows)
{
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
        out(k) = v(rows[k]);
    return out;
}

} // namespace

struct Projector::Impl {
    SparseMatrix c;     // active rows, free columns
    SparseMatrix g;     // metric on free coefficients (empty for Euclidean)
    SparseMatrix full;  // full scalar metric form
    // Euclidean: C^T P = Q R, so C^T (C C^T)^-1 r = Q R^-T P^T r without squaring cond(C).
    Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
    SparseMatrix kkt_matrix;
    Eigen::SparseLU<SparseMatrix> kkt;
};

Projector::Projector(const ConstraintSet& cs, Metric metric, const AssembledForms& forms, RankPolicy policy,
                     double rank_tolerance)
    : cs_(&cs), forms_(&forms), metric_(metric), impl_(std::make_unique<Impl>())
{
    if (forms.node_count != cs.grid().node_count())
        throw ShapeMismatch("projector: forms do not match constraint grid");
    active_ = independent_rows(cs, rank_tolerance, &dropped_);
    if (!dropped_.empty() && policy == RankPolicy::Strict) {
        std::ostringstream os;
        os << "rank-deficient constraints: " << dropped_.size() << " dependent row(s), first " << dropped_.front();
        throw RankDeficientConstraints(dropped_, os.str());
    }
    impl_->c = select_rows(cs.free_matrix(), active_);
    impl_->full = metric_form(forms, metric);
    const int nf = static_cast<int>(cs.free().size());
    const int d = static_cast<int>(active_.size());
    if (metric == Metric::Euclidean) {
        SparseMatrix ct = impl_->c.transpose();
        ct.makeCompressed();
        impl_->qr.compute(ct);
        if (impl_->qr.info() != Eigen::Success || impl_->qr.rank() < d)
            throw SingularSystem("constraint matrix lost rank in the QR factorization");
        return;
    }
    impl_->g = restrict_free(expand_form(impl_->full, cs.dim()), cs.free());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(impl_->g.nonZeros() + 2 * impl_->c.nonZeros());
    for (int k = 0; k < impl_->g.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(impl_->g, k); it; ++it)
            entries.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < impl_->c.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(impl_->c, k); it; ++it) {
            entries.emplace_back(nf + it.row(), it.col(), it.value());
            entries.emplace_back(it.col(), nf + it.row(), it.value());
        }
    SparseMatrix k(nf + d, nf + d);
    k.setFromTriplets(entries.begin(), entries.end());
    k.makeCompressed();
    impl_->kkt_matrix = k;
    impl_->kkt.analyzePattern(k);
    impl_->kkt.factorize(k);
    if (impl_->kkt.info() != Eigen::Success)
        throw SingularSystem("KKT system is singular: " + impl_->kkt.lastErrorMessage());
}

Projector::~Projector() = default;
Projector::Projector(Projector&&) noexcept = default;
Projector& Projector::operator=(Projector&&) noexcept = default;

CoefficientTuple Projector::project(const CoefficientTuple& y) const
{
    cs_->reference().require_shape(y, "project");
    const Vector yf = cs_->gather_free(y.coeffs());
    const Vector rhs = select(cs_->free_rhs(y), active_);
    Vector vf;
    if (metric_ == Metric::Euclidean) {
        const auto d = rhs.size();
        const Vector r = impl_->c * yf - rhs;
        const Vector pr = impl_->qr.colsPermutation().transpose() * r;
        Vector z = Vector::Zero(yf.size());
        z.head(d) = impl_->qr.matrixR().topLeftCorner(d, d).template triangularView<Eigen::Upper>().transpose().solve(pr);
        vf = yf - impl_->qr.matrixQ() * z;
    } else {
        const auto nf = yf.size();
        Vector b(nf + rhs.size());
        b.head(nf) = impl_->g * yf;
        b.tail(rhs.size()) = rhs;
        Vector x = impl_->kkt.solve(b);
        // One step of iterative refinement against the stored KKT matrix.
        x += impl_->kkt.solve(b - impl_->kkt_matrix * x);
        vf = x.head(nf);
    }
    CoefficientTuple out = y;
    cs_->scatter_free(vf, out.coeffs());
    return out;
}

double Projector::distance(const CoefficientTuple& a, const CoefficientTuple& b) const
{
    const Vector diff = a.coeffs() - b.coeffs();
    if (metric_ == Metric::Euclidean)
        return diff.norm();
    return std::sqrt(std::max(0.0, quadratic_form(impl_->full, diff, a.dim())));
}

CoefficientTuple project_euclidean(const CoefficientTuple& y, const ConstraintSet& cs, RankPolicy policy)
{
    const AssembledForms forms = assemble_forms(cs.grid());
    return Projector(cs, Metric::Euclidean, forms, policy).project(y);
}

CoefficientTuple project_nodal_closed_form(const CoefficientTuple& y, const ConstraintSet& cs)
{
    if (cs.density() != ConstraintDensity::Nodal)
        throw InvalidConfiguration("closed-form projection requires the nodal density");
    cs.reference().require_shape(y, "project_nodal_closed_form");
    CoefficientTuple out = y;
    const auto& r = cs.reference();
    for (int i = 0; i < cs.grid().node_count() - 1; ++i) {
        const Vector rp = r.slope(i);
        const Vector yp = y.slope(i);
        out.slope(i) = rp + yp - (yp.dot(rp) / rp.squaredNorm()) * rp;
    }
    return out;
}

CoefficientTuple project_seminorm(const CoefficientTuple& y, const ConstraintSet& cs, const AssembledForms& forms,
                                  RankPolicy policy)
{
    return Projector(cs, Metric::Seminorm, forms, policy).project(y);
}

CoefficientTuple project_metric(const CoefficientTuple& y, const ConstraintSet& cs, const AssembledForms& forms,
                                Metric metric, RankPolicy policy)
{
    return Projector(cs, metric, forms, policy).project(y);
}

} // namespace fiber
