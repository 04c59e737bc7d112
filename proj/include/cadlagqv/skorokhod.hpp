#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cadlagqv/convergence.hpp"
#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"
#include "cadlagqv/step_increasing.hpp"

namespace cadlag {

// Piecewise-linear strictly increasing bijection of [0, T] onto itself,
// stored by its anchor points (t, lambda(t)). The list always starts at
// (0, 0) and ends at (T, T); between anchors the map interpolates linearly,
// so sup |lambda(t) - t| is attained at an anchor.
class TimeChange {
public:
    static TimeChange identity(double horizon);
    explicit TimeChange(std::vector<std::pair<double, double>> anchors);

    const std::vector<std::pair<double, double>>& anchors() const { return anchors_; }
    double horizon() const { return anchors_.back().first; }
    double operator()(double t) const;
    double inverse(double u) const;
    double max_displacement() const;

private:
    std::vector<std::pair<double, double>> anchors_;
};

struct J1Result {
    double distance = 0.0;
    TimeChange lambda = TimeChange::identity(1.0);
};

// Skorokhod J1 distance on [0, T]:
//
//   inf over lambda of max( sup_t |lambda(t) - t|, sup_t |x(lambda(t)) - y(t)| )
//
// for the step readings of x and y restricted to [0, T] (every knot value
// change is treated as a jump). The infimum over continuous time changes is
// attained in the closed relaxation the solver works with, and it always
// falls on one of finitely many thresholds |x-value - y-value| or
// |x-jump-time - y-jump-time|, so the returned distance is exact up to
// rounding of those differences. The witness lambda achieves the distance up
// to a tie-breaking slack of order 1e-9 * max(1, T).
//
// Jumps at exactly T are pinned: lambda(T) = T, so such a jump can only pair
// with a jump of the other path at exactly T, and no interior jump can be
// re-timed past it. In particular a jump of one path at T forces its pre-T
// value to stay visible against the other path up to the horizon.
J1Result j1_distance_compact(const CadlagPath& x, const CadlagPath& y, double T);

// Decision form: J1 distance on [0, T] at most eps? One reachability sweep,
// no distance search. This is the hot call of the Monte Carlo module.
bool j1_within(const CadlagPath& x, const CadlagPath& y, double T, double eps);

// Metric on the half line via weighted unit horizons:
//
//   sum_{k=1..floor(H)} 2^-k min(1, d_k),
//
// d_k the compact distance at horizon k, with the horizon nudged just below k
// whenever either path declares a jump within eps_h of k (truncating exactly
// at a jump is the classic discontinuity of the restriction map). A common
// horizon below 1 contributes the single term 2^-1 min(1, d(H)).
double j1_distance_halfline(const CadlagPath& x, const CadlagPath& y,
                            double eps_h = 1e-6);

// Brute-force reference for the compact distance: x's jumps are placed on a
// fixed slot grid (an offset lattice of the given step, plus both paths' own
// jump times) and the same objective is minimised by dynamic programming over
// placements. Restricting the placements can only increase the objective, so
// this never falls below the true distance, and it converges to it as the
// grid refines. Kept, and exposed, purely as an independent check of the
// exact solver.
double j1_distance_oracle(const CadlagPath& x, const CadlagPath& y, double T,
                          double grid_step = 1e-3);

// sup_{t in [0, T]} |x(t) - y(t)|, exact for step readings (both one-sided
// values at every event time are covered).
double uniform_distance(const CadlagPath& x, const CadlagPath& y, double T);

// Re-evaluates the J1 objective for a concrete time change. Exact for step
// readings: the supremum is sampled at every breakpoint of x(lambda(.)) and
// y plus a midpoint inside each constancy interval.
double evaluate_time_change_cost(const CadlagPath& x, const CadlagPath& y,
                                 double T, const TimeChange& lambda);

// Strongest mode first: uniform convergence implies J1, so the uniform
// distances are tested first and the J1 distances only decide the remainder.
// Both sequences are judged with gaps_converged against tol. The returned
// report carries J1 distances in .distances and the uniform ones alongside.
ConvergenceReport classify_convergence(const std::vector<StepIncreasing>& seq,
                                       const StepIncreasing& candidate,
                                       double T, double tol = 1e-3);
ConvergenceMode classify_convergence_mode(const std::vector<StepIncreasing>& seq,
                                          const StepIncreasing& candidate,
                                          double T, double tol = 1e-3);

// One-sided limit probes for the discrete quadratic variation along a
// partition scheme, at a fixed time t. With t'_n the last partition point
// strictly before t, the four probes evaluate, per level,
//
//   le_left_limit : q_n(t'_n -)            -> limit value just before t
//   lt_value      : q_n(pred(t'_n))        -> limit value just before t
//   ge_value      : q_n(t'_n)              -> limit value at t
//   gt_left_limit : q_n(succ(t'_n) -)      -> limit value at t
//
// each being the boundary representative of the sequences t_n <= t'_n,
// t_n < t'_n, t_n >= t'_n, t_n > t'_n. The target comes from the certified
// limit of the q_n themselves, decomposed against the declared jumps; it is
// certified on the deepest level prefix whose consecutive J1 gaps satisfy
// the stopping rule, while the probes run over the full level range. A
// domain error is thrown when no prefix certifies.
enum class OneSidedCase { le_left_limit, lt_value, ge_value, gt_left_limit };
std::string one_sided_case_name(OneSidedCase c);

struct OneSidedLimitReport {
    OneSidedCase which = OneSidedCase::ge_value;
    std::vector<int> levels;
    std::vector<double> probe_times;  // the constructed t_n per level
    std::vector<double> observed;     // q_n evaluated per the case
    double target = 0.0;
    std::vector<double> gaps;         // |observed - target|
    bool pass = false;
};

OneSidedLimitReport one_sided_limit_check(const CadlagPath& x,
                                          const PartitionScheme& scheme,
                                          double t, int level_lo, int level_hi,
                                          OneSidedCase which, double tol = 1e-3);

// Evaluates a functional along the sequence and at the candidate; the caller
// pairs this with a classification of the sequence itself to conclude
// F(seq_n) -> F(candidate) for J1-continuous F.
struct FunctionalLimitReport {
    std::vector<double> values;
    double candidate_value = 0.0;
    std::vector<double> gaps;
};

FunctionalLimitReport functional_limit(
    const std::function<double(const StepIncreasing&)>& F,
    const std::vector<StepIncreasing>& seq, const StepIncreasing& candidate);

namespace detail {
// Reachability decision with a forced kernel: 0 = dispatch, 1 = the bitset
// walker, 2 = the interval walker (monotone values only). Exposed so the test
// harness can cross-check the two kernels on the same inputs.
bool j1_feasible(const CadlagPath& x, const CadlagPath& y, double T,
                 double eps, int kernel);
}

}  // namespace cadlag
