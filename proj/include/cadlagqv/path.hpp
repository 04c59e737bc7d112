#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cadlagqv/errors.hpp"

namespace cadlag {

// Right-continuous piecewise-constant path on [0, horizon].
//
// Storage is a sorted knot list (times, values).  A time appearing twice
// encodes a jump: the first occurrence carries the left limit, the second the
// value.  Between knots the path is constant (value of the previous knot), so
// the left-limit knot of a jump must repeat the preceding knot's value; the
// constructor rejects anything else.  Sampled "continuous" paths are the same
// structure with an empty declared-jump set: every consumer that cares about
// jumps (Lebesgue decomposition, compensators, alignment checks) trusts
// jump_times(), never numerical wiggle between knots.
class CadlagPath {
public:
    CadlagPath(std::vector<double> times, std::vector<double> values);
    CadlagPath(std::vector<double> times, std::vector<double> values, double horizon);

    // Constant path, and the single-jump step c.1_[t0,inf) restricted to [0, horizon].
    static CadlagPath constant(double value, double horizon);
    static CadlagPath single_jump(double before, double after, double t0, double horizon);

    double horizon() const { return horizon_; }
    std::size_t knot_count() const { return times_.size(); }

    // x(t) for t in [0, horizon].
    double evaluate(double t) const;
    double operator()(double t) const { return evaluate(t); }

    // x(t-) for t in (0, horizon].
    double left_limit(double t) const;

    // Declared jump size at t; 0 when t carries no declared jump.
    double jump_at(double t) const;

    // Declared jumps (time, size) with time <= t, in time order.
    std::vector<std::pair<double, double>> jumps_up_to(double t) const;

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::pair<double, double>>& jumps() const { return jumps_; }
    std::vector<double> jump_times() const;

    // x(min(t, horizon)); partitions are allowed to overhang the path.
    double evaluate_clamped(double t) const;

private:
    void validate_and_index();

    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<std::pair<double, double>> jumps_;  // (time, size), size != 0
    double horizon_ = 0.0;
};

// w_a * a + w_b * b on the common horizon.  Knot times are merged; the result
// declares a jump exactly where the combination actually jumps.
CadlagPath pointwise_combine(const CadlagPath& a, const CadlagPath& b, double wa, double wb);

// Finitely many components on a shared horizon.
class VectorCadlagPath {
public:
    explicit VectorCadlagPath(std::vector<CadlagPath> components);

    std::size_t dimension() const { return components_.size(); }
    double horizon() const { return components_.front().horizon(); }
    const CadlagPath& component(std::size_t i) const { return components_.at(i); }
    const std::vector<CadlagPath>& components() const { return components_; }

    // Union of component jump times, sorted, deduplicated.
    std::vector<double> jump_times() const;

private:
    std::vector<CadlagPath> components_;
};

}  // namespace cadlag
