#pragma once

#include <functional>
#include <vector>

#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"
#include "cadlagqv/step_increasing.hpp"

namespace cadlag {

// A C^2 function bundled with its first two derivatives. The handle
// constructor cross-checks the derivatives against central finite
// differences on a fixed probe grid in [-2, 2] and throws domain_error on a
// mismatch, so a SmoothFunction that exists is internally consistent. The
// handles must therefore be evaluable on that interval.
class SmoothFunction {
public:
    using Handle = std::function<double(double)>;

    SmoothFunction(Handle f, Handle df, Handle d2f);

    // c[0] + c[1] v + c[2] v^2 + ...; derivatives are exact coefficient
    // arithmetic, not differences.
    static SmoothFunction polynomial(std::vector<double> coefficients);

    double operator()(double v) const { return f_(v); }
    double d1(double v) const { return df_(v); }
    double d2(double v) const { return d2f_(v); }

private:
    SmoothFunction() = default;

    Handle f_, df_, d2f_;
};

// Left Riemann sum of g(x(t_j)) (x(t_{j+1}) - x(t_j)) over cells with
// t_j <= t, the same counting convention as q_n. With g constant 1 the sum
// telescopes to x(t*) - x(0) where t* is the right end of the last counted
// cell, successor(last_at_or_before(t)).
double follmer_integral(const std::function<double(double)>& g,
                        const CadlagPath& x, const Partition& p, double t);

// Lebesgue-Stieltjes sum of h(x(s)) against the increasing step function a
// over (0, t]: a finite sum over the atoms of a, left-point evaluation.
// h constant 1 recovers a(t) - a(0); mass sitting at time 0 is never
// integrated. When a stands in for a continuous increasing function the sum
// is a left-point approximation; error_bound reports
// (sup |h'| estimate) * (largest gap between consecutive atoms) * a(t),
// with sup |h'| estimated by central differences at the sampled values.
struct StieltjesResult {
    double value = 0.0;
    double error_bound = 0.0;
};

StieltjesResult stieltjes_integral(const std::function<double(double)>& h,
                                   const CadlagPath& x,
                                   const StepIncreasing& a, double t);

// Second-order jump correction sum over the declared jumps s <= t:
// f(x(s)) - f(x(s-)) - f'(x(s-)) (x(s) - x(s-)). Zero for paths with no
// declared jumps, and exactly zero for f the identity because the declared
// jump size is the stored value difference.
double jump_compensator(const SmoothFunction& f, const CadlagPath& x,
                        double t);

// Signed residual of the pathwise change-of-variable formula at one level:
//   f(x(t)) - f(x(0)) - sum f'(x(t_i)) dx_i
//   - 1/2 sum f''(x(t_i)) dc_i - jump compensator,
// where dc_i is the cell's squared increment minus the squared declared
// jumps the cell covers (the level-n stand-in for the continuous part of
// the quadratic variation) and both sums run over cells with t_i strictly
// before t. Strict counting agrees with the q_n convention whenever t lies
// between partition points and makes the residual telescope to
// f(x(t)) - f(x(t*)) for f(v) = v^2, hence exactly zero at partition
// points; at other times it vanishes only when x is constant on [t, t*].
// Jumps are counted up to t, so a declared jump inside the covering cell
// but after t leaks into the continuous stand-in, consistent with the
// forward-counting convention.
double ito_residual(const SmoothFunction& f, const CadlagPath& x,
                    const PartitionScheme& scheme, int level, double t);

}  // namespace cadlag
