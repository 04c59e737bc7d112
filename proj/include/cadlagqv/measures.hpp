#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cadlag {

// Finite discrete measure on [0, infinity): sorted atoms with positive mass.
// Atoms handed in with duplicate times merge by adding mass; zero-mass atoms
// are dropped, so the stored list is canonical.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::vector<std::pair<double, double>> atoms);

    const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    double total_mass() const;
    double mass_at(double t) const;
    // Mass of the closed interval [0, T].
    double mass_up_to(double T) const;

private:
    std::vector<std::pair<double, double>> atoms_;
};

// Continuous scalar function vanishing beyond a known bound. Evaluation
// outside [0, support_bound] returns 0 without touching the wrapped callable,
// so integrals against discrete measures are always finite sums.
class TestFunction {
public:
    TestFunction(std::function<double(double)> f, double support_bound,
                 std::string name);

    double operator()(double t) const;
    double support_bound() const { return support_bound_; }
    const std::string& name() const { return name_; }

private:
    std::function<double(double)> f_;
    double support_bound_;
    std::string name_;
};

double integrate(const TestFunction& f, const DiscreteMeasure& m);

// Continuous extensions of f restricted to [0, T]: the first agrees with f on
// [0, T] and ramps linearly to 0 on (T, T+eps]; the second vanishes at T,
// ramping down on (T-eps, T]. Together they sandwich f * 1_[0,T] pointwise,
// which requires f >= 0 on [0, T] (checked on samples).
std::pair<TestFunction, TestFunction> taper_extensions(const TestFunction& f,
                                                       double T, double eps);

struct MeasureConvergenceReport {
    struct PerFunction {
        std::string name;
        std::vector<double> gaps;          // |integral against seq[k] - target|
        std::vector<double> lower_bounds;  // weak check only: tapered from below
        std::vector<double> upper_bounds;  // weak check only: tapered from above
        bool pass = false;
    };
    std::vector<PerFunction> functions;
    bool pass = false;
};

// Integrals of each compactly supported f against the whole measures; passes
// per function when the gap sequence satisfies gaps_converged.
MeasureConvergenceReport vague_convergence_check(
    const std::vector<DiscreteMeasure>& seq, const DiscreteMeasure& target,
    const std::vector<TestFunction>& fns, double tol);

// Integrals restricted to [0, T] for continuous f with no support condition.
// T must not carry an atom of the target. Sandwich bounds from the tapered
// extensions are reported alongside for every f that is nonnegative on
// [0, T]; eps <= 0 picks T/20.
MeasureConvergenceReport weak_convergence_check(
    const std::vector<DiscreteMeasure>& seq, const DiscreteMeasure& target,
    double T, const std::vector<TestFunction>& fns, double tol,
    double eps = 0.0);

// Hats at the dyadic eighths of [0, T], a ramp to 0 at T, and the upper taper
// of the indicator of [0, T]: the battery the convergence checks default to.
std::vector<TestFunction> default_test_battery(double T);

}  // namespace cadlag
