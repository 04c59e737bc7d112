#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cadlagqv/convergence.hpp"
#include "cadlagqv/measures.hpp"
#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"
#include "cadlagqv/step_increasing.hpp"

namespace cadlag {

// Discrete quadratic-variation approximants of a path x along one partition.
//
// All three sums run over the partition points t_i with successor t_{i+1}
// (the last point is its own successor, so it contributes nothing), and x is
// read as constant beyond its horizon when the partition extends further:
//
//   q_n(t) = sum over t_i <= t       of (x(t_{i+1}) - x(t_i))^2
//   s_n(t) = sum over all t_i        of (x(t_{i+1} ^ t) - x(t_i ^ t))^2
//   p_n(t) = sum over t_{i+1} <= t   of (x(t_{i+1}) - x(t_i))^2
//
// q_n counts the full forward increment as soon as its left end is reached,
// s_n caps every increment at t, and p_n waits for the right end. The three
// differ only near t: q and s share every term whose interval lies left of t
// and disagree by the boundary increment (see sn_qn_discrepancy), while p is
// missing the increment covering t entirely. The partition must reach the
// path's horizon.

StepIncreasing q_n(const CadlagPath& x, const Partition& p);
double s_n(const CadlagPath& x, const Partition& p, double t);
StepIncreasing p_n(const CadlagPath& x, const Partition& p);

// The increment measure: mass (x(t_{i+1}) - x(t_i))^2 at each t_i. q_n is
// its distribution function, exactly.
DiscreteMeasure mu_n(const CadlagPath& x, const Partition& p);

// Sum of fourth powers of the increments over t_i <= t, accumulated as
// squared squares so it matches sum (Delta q_n)^2 bit for bit.
double quartic_jump_sum(const CadlagPath& x, const Partition& p, double t);

// |s_n(t) - q_n(t)|. The signed difference equals u^2 + 2uw with
// u = x(t_{i+1}) - x(t), w = x(t) - x(t_i) and t_i the last partition point
// <= t; that identity is re-derived independently and enforced to 1e-12
// relative, an internal consistency error otherwise.
double sn_qn_discrepancy(const CadlagPath& x, const Partition& p, double t);

// Split of a quadratic-variation limit into the squared declared jumps of x
// plus an increasing remainder.
//
// Every atom of `limit` lying within time_tol of a declared jump of x is
// assigned to that jump (nearest wins); the assigned mass must agree with
// (jump size)^2 within atol, and every unassigned atom must have mass at
// most atol. Violations throw condition_l_error naming the time and masses:
// a heavy atom of the limit away from every declared jump is exactly the
// pathology the check exists to catch. Unassigned atoms form the remainder
// `continuous_part` (a fine step approximation of a continuous function, not
// literally continuous), and `jump_part` carries the assigned masses snapped
// to the declared jump times. `total` re-adds the two parts, so it equals
// continuous_part(t) + sum of jump masses <= t exactly, and is the cleaned
// representative of the limit that downstream probes evaluate.
struct QVDecomposition {
    StepIncreasing total;
    StepIncreasing continuous_part;
    std::vector<std::pair<double, double>> jump_part;
};

QVDecomposition lebesgue_decompose(const StepIncreasing& limit,
                                   const CadlagPath& x, double atol,
                                   double time_tol = 0.0);

// Limit estimation across partition levels: computes q_n per level and
// declares convergence when the consecutive-level J1 distances satisfy the
// shared stopping rule. The estimate is the finest-level q_n, decomposed
// against x's declared jumps with the finest mesh as the matching window.
//
// The uniform/j1 label is then decided against the decomposed total (the
// cleaned limit), not from consecutive uniform gaps: neighbouring levels of
// a step path can coincide exactly when the jump locator stalls, which makes
// a consecutive uniform gap zero without any uniform convergence. Both raw
// distance sequences are still reported.
//
// atol < 0 selects max(tol, 8 * sqrt(finest mesh)) for the decomposition:
// wide enough for the squared increments of diffusion-like paths at the
// levels this library targets, and far below any unit-size atom.
//
// report.levels lists every level; report.distances[i] is the gap between
// levels[i] and levels[i+1], so it has one entry less.
struct QVLimitResult {
    ConvergenceReport report;
    StepIncreasing finest;
    std::optional<QVDecomposition> decomposition;
};

QVLimitResult qv_limit(const CadlagPath& x, const PartitionScheme& scheme,
                       int level_lo, int level_hi, double tol = 1e-3,
                       double atol = -1.0);

namespace detail {

// Running sum of time-sorted (time, mass) atoms as a step path; masses may
// be signed. Shared by the scalar and matrix-valued increment sums so their
// diagonal agreement is bit-exact, and kept deliberately separate from
// StepIncreasing::from_measure, which tests compare against as an
// independent route.
CadlagPath accumulate_step_atoms(
    const std::vector<std::pair<double, double>>& atoms, double horizon);

// atol policy for decompositions when the caller does not pin one:
// max(tol, 8 * sqrt(mesh)), wide enough for squared diffusion increments at
// the target levels and far below unit-size atoms.
double default_decomposition_atol(double tol, double mesh);

}  // namespace detail

}  // namespace cadlag
