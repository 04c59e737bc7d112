#pragma once

#include "cadlagqv/measures.hpp"
#include "cadlagqv/path.hpp"

namespace cadlag {

// Non-negative, non-decreasing, right-continuous step function: the type of
// every discrete quadratic-variation approximant and of their limits.
//
// The value just before 0 is defined to be 0, so a strictly positive value AT
// 0 counts as an atom at 0 of the underlying measure (the sums that produce
// these functions count the increment covering t as soon as its left end is
// <= t, and the left end of the first increment is 0). Such an atom vanishes
// along any sequence the library certifies as convergent, but it is present
// at finite levels and the bookkeeping here keeps it explicit.
class StepIncreasing {
public:
    explicit StepIncreasing(CadlagPath path);
    static StepIncreasing from_measure(const DiscreteMeasure& m, double horizon);

    const CadlagPath& path() const { return path_; }
    double operator()(double t) const { return path_.evaluate(t); }
    double horizon() const { return path_.horizon(); }
    double value_at_zero() const { return path_.evaluate(0.0); }

    // Left limit under the value(0-) = 0 convention.
    double left_value(double t) const;

    // Atoms of the underlying measure: the declared jumps, plus (0, value(0))
    // when the value at 0 is positive.
    DiscreteMeasure measure() const;

private:
    CadlagPath path_;
};

}  // namespace cadlag
