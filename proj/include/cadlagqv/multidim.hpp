#pragma once

#include <cstddef>
#include <vector>

#include "cadlagqv/convergence.hpp"
#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"

namespace cadlag {

// Symmetric m x m matrix of step paths on one horizon, stored row-major.
// Symmetry is enforced knot-for-knot at construction. Diagonal entries must
// be non-decreasing; off-diagonals are free to move either way. The
// increment-PSD property holds for outer-product sums by construction but is
// not enforced here: psd_increment_check exists to test it, including on
// hand-built counterexamples.
class MatrixStepPath {
public:
    MatrixStepPath(std::size_t dimension, std::vector<CadlagPath> entries);

    std::size_t dimension() const { return m_; }
    double horizon() const { return entries_.front().horizon(); }
    const CadlagPath& entry(std::size_t i, std::size_t j) const;
    double value(std::size_t i, std::size_t j, double t) const {
        return entry(i, j).evaluate(t);
    }

private:
    std::size_t m_;
    std::vector<CadlagPath> entries_;
};

// Signed cross-increment sum: jumps by
// (x(t_{i+1}) - x(t_i)) * (y(t_{i+1}) - y(t_i)) at each t_i <= t. The
// diagonal case y = x reproduces q_n bit for bit.
CadlagPath cross_q_n(const CadlagPath& x, const CadlagPath& y,
                     const Partition& p);

// Outer-product increment sums: entry (i,j) is cross_q_n of components i, j.
MatrixStepPath matrix_q_n(const VectorCadlagPath& x, const Partition& p);

// Largest relative violation of the per-cell expansion
// q_n^(x+y) = q_n^(x) + q_n^(y) + 2 q_n^(x,y), probed at every knot of the
// four step paths and at the horizon. Algebraically zero; anything much
// beyond rounding means the four sums disagree about the increments.
double polarization_identity_gap(const CadlagPath& x, const CadlagPath& y,
                                 const Partition& p);

// Covariation via polarization: (limit of q_n^(x+y) minus the limits for x
// and y alone) / 2, each limit estimated by qv_limit over the same levels.
// The per-level expansion above is asserted to 1e-12 relative at every
// level on the way. Throws domain_error naming the component whose limit is
// undecided, internal_consistency_error on an expansion violation.
//
// The sum path is built knotwise (pointwise_combine); no claim is made that
// addition is continuous for the J1 metric, only that the finite sums obey
// the algebra.
CadlagPath covariation_polarization(const CadlagPath& x, const CadlagPath& y,
                                    const PartitionScheme& scheme,
                                    int level_lo, int level_hi,
                                    double tol = 1e-3);

// Componentwise limit estimation: every entry of matrix_q_n gets the same
// consecutive-J1 stopping rule as the scalar qv_limit (componentwise
// convergence suffices for this limit family because all entries locate
// their jumps with the same partition-point sequence). Converged entries
// are labelled j1, the rest divergent; the matrix-level limit is the
// finest-level matrix. For each converged entry the jump masses of the
// estimate are verified against the products of the declared component
// jumps within atol (atol < 0 selects the shared default policy), throwing
// condition_l_error tagged with the entry on mismatch.
struct MatrixQVLimitResult {
    MatrixStepPath limit;
    std::vector<ConvergenceReport> entry_reports;  // row-major, m*m

    bool all_converged() const;
};

MatrixQVLimitResult matrix_qv_limit(const VectorCadlagPath& x,
                                    const PartitionScheme& scheme,
                                    int level_lo, int level_hi,
                                    double tol = 1e-3, double atol = -1.0);

// Smallest eigenvalue of every increment matrix over consecutive entries of
// `times` must be >= -atol. Violations carry the time pair and eigenvalue.
struct PsdViolation {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double min_eigenvalue = 0.0;
};

struct PsdReport {
    bool pass = true;
    double min_eigenvalue = 0.0;  // over all increments checked
    std::vector<PsdViolation> violations;
};

PsdReport psd_increment_check(const MatrixStepPath& q,
                              const std::vector<double>& times,
                              double atol = 1e-10);

// One locator sequence for all entries: with t_n the last partition point
// strictly before t, the jump of entry (i,j) at t_n must approach the
// product of the declared jumps of components i and j at t. Diagnostic: the
// report carries the per-level observations; pass means every entry's gap
// sequence satisfies the shared stopping rule against tol.
struct JumpAlignmentReport {
    std::vector<int> levels;
    std::vector<double> locators;              // t_n per level
    std::vector<double> targets;               // row-major, m*m
    std::vector<std::vector<double>> observed;  // [level][entry]
    bool pass = false;
};

JumpAlignmentReport jump_alignment_check(const VectorCadlagPath& x,
                                         const PartitionScheme& scheme,
                                         double t, int level_lo, int level_hi,
                                         double tol = 1e-3);

}  // namespace cadlag
