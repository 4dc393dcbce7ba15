#pragma once
//
// Minimal projections onto {v : C v = g, clamped coefficients kept}.
// In a metric G on the free coefficients the projection solves
//   [G  C^T] [v ]   [G y]
//   [C  0  ] [mu] = [g  ],
// for the Euclidean metric this reduces to v = y - C^T (C C^T)^{-1} (C y - g).
//

#include <fiber/constraints.hpp>

#include <memory>
#include <string>
#include <vector>

namespace fiber {

enum class Metric { Euclidean, L2, Seminorm, H2 };

std::string to_string(Metric m);
Metric parse_metric(const std::string& name);

// Scalar 2M x 2M form of the metric (identity for Euclidean).
SparseMatrix metric_form(const AssembledForms& forms, Metric metric);

// |v|_metric over the full coefficient vector.
double metric_norm(const CoefficientTuple& v, const AssembledForms& forms, Metric metric);

enum class RankPolicy {
    Strict,        // rank-deficient rows raise RankDeficientConstraints
    DropDependent  // numerically dependent rows are removed
};

// Factorized projector for one constraint set and metric.
class Projector {
public:
    Projector(const ConstraintSet& cs, Metric metric, const AssembledForms& forms,
              RankPolicy policy = RankPolicy::Strict, double rank_tolerance = 1e-9);
    ~Projector();
    Projector(Projector&&) noexcept;
    Projector& operator=(Projector&&) noexcept;

    CoefficientTuple project(const CoefficientTuple& y) const;

    // Distance between two tuples in the projection metric.
    double distance(const CoefficientTuple& a, const CoefficientTuple& b) const;

    Metric metric() const { return metric_; }
    const ConstraintSet& constraints() const { return *cs_; }
    const std::vector<int>& active_rows() const { return active_; }
    const std::vector<int>& dropped_rows() const { return dropped_; }

private:
    struct Impl;
    const ConstraintSet* cs_;
    const AssembledForms* forms_;
    Metric metric_;
    std::vector<int> active_, dropped_;
    std::unique_ptr<Impl> impl_;
};

// Rows of C kept by a rank-revealing QR of the normalized rows.
std::vector<int> independent_rows(const ConstraintSet& cs, double rank_tolerance, std::vector<int>* dropped = nullptr);

CoefficientTuple project_euclidean(const CoefficientTuple& y, const ConstraintSet& cs,
                                   RankPolicy policy = RankPolicy::Strict);

// Per-node closed form; only valid for the nodal density.
CoefficientTuple project_nodal_closed_form(const CoefficientTuple& y, const ConstraintSet& cs);

CoefficientTuple project_seminorm(const CoefficientTuple& y, const ConstraintSet& cs, const AssembledForms& forms,
                                  RankPolicy policy = RankPolicy::Strict);

CoefficientTuple project_metric(const CoefficientTuple& y, const ConstraintSet& cs, const AssembledForms& forms,
                                Metric metric, RankPolicy policy = RankPolicy::Strict);

} // namespace fiber
