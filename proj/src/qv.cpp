#include "cadlagqv/qv.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "cadlagqv/errors.hpp"
#include "cadlagqv/skorokhod.hpp"

namespace cadlag {

namespace {

void require_covering(const CadlagPath& x, const Partition& p) {
    if (p.horizon() < x.horizon())
        throw domain_error("partition must reach the path horizon");
}

void require_in_domain(const CadlagPath& x, double t) {
    if (!(t >= 0.0) || t > x.horizon())
        throw domain_error("time outside [0, horizon]");
}

// (t_i, squared increment) over the partition intervals, zero masses
// dropped. x is read as constant beyond its horizon, so intervals past it
// contribute nothing and every kept atom lies strictly inside [0, horizon).
std::vector<std::pair<double, double>> increment_atoms(const CadlagPath& x,
                                                       const Partition& p) {
    const auto& pts = p.points();
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double inc =
            x.evaluate_clamped(pts[i + 1]) - x.evaluate_clamped(pts[i]);
        if (inc != 0.0) atoms.emplace_back(pts[i], inc * inc);
    }
    return atoms;
}

}  // namespace

namespace detail {

CadlagPath accumulate_step_atoms(
    const std::vector<std::pair<double, double>>& atoms, double horizon) {
    std::vector<double> t, v;
    t.reserve(2 * atoms.size() + 1);
    v.reserve(2 * atoms.size() + 1);
    double cur = 0.0;
    std::size_t k = 0;
    if (!atoms.empty() && atoms.front().first == 0.0) {
        cur = atoms.front().second;
        ++k;
    }
    t.push_back(0.0);
    v.push_back(cur);
    for (; k < atoms.size(); ++k) {
        t.push_back(atoms[k].first);
        v.push_back(cur);
        cur += atoms[k].second;
        t.push_back(atoms[k].first);
        v.push_back(cur);
    }
    return CadlagPath(std::move(t), std::move(v), horizon);
}

double default_decomposition_atol(double tol, double mesh) {
    return std::max(tol, 8.0 * std::sqrt(mesh));
}

}  // namespace detail

StepIncreasing q_n(const CadlagPath& x, const Partition& p) {
    require_covering(x, p);
    return StepIncreasing(
        detail::accumulate_step_atoms(increment_atoms(x, p), x.horizon()));
}

double s_n(const CadlagPath& x, const Partition& p, double t) {
    require_covering(x, p);
    require_in_domain(x, t);
    const auto& pts = p.points();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size() && pts[i] < t; ++i) {
        const double inc = x.evaluate_clamped(std::min(pts[i + 1], t)) -
                           x.evaluate_clamped(pts[i]);
        sum += inc * inc;
    }
    return sum;
}

StepIncreasing p_n(const CadlagPath& x, const Partition& p) {
    require_covering(x, p);
    const auto& pts = p.points();
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] > x.horizon()) break;
        const double inc = x.evaluate(pts[i + 1]) - x.evaluate(pts[i]);
        if (inc != 0.0) atoms.emplace_back(pts[i + 1], inc * inc);
    }
    return StepIncreasing(detail::accumulate_step_atoms(atoms, x.horizon()));
}

DiscreteMeasure mu_n(const CadlagPath& x, const Partition& p) {
    require_covering(x, p);
    return DiscreteMeasure(increment_atoms(x, p));
}

double quartic_jump_sum(const CadlagPath& x, const Partition& p, double t) {
    require_covering(x, p);
    require_in_domain(x, t);
    const auto& pts = p.points();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size() && pts[i] <= t; ++i) {
        const double inc =
            x.evaluate_clamped(pts[i + 1]) - x.evaluate_clamped(pts[i]);
        const double sq = inc * inc;
        sum += sq * sq;
    }
    return sum;
}

double sn_qn_discrepancy(const CadlagPath& x, const Partition& p, double t) {
    require_covering(x, p);
    require_in_domain(x, t);
    const auto& pts = p.points();
    double qv = 0.0, sv = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double full = x.evaluate_clamped(pts[i + 1]) -
                            x.evaluate_clamped(pts[i]);
        if (pts[i] <= t) qv += full * full;
        if (pts[i] < t) {
            const double capped = x.evaluate_clamped(std::min(pts[i + 1], t)) -
                                  x.evaluate_clamped(pts[i]);
            sv += capped * capped;
        }
    }
    // Only the increment covering t survives in the difference.
    const double ti = p.last_at_or_before(t);
    const double u = x.evaluate_clamped(p.successor(ti)) - x.evaluate(t);
    const double w = x.evaluate(t) - x.evaluate(ti);
    const double expected = u * u + 2.0 * u * w;
    const double diff = qv - sv;
    const double scale = std::max({1.0, std::fabs(qv), std::fabs(sv)});
    if (std::fabs(diff - expected) > 1e-12 * scale)
        throw internal_consistency_error(
            "boundary increment identity violated between capped and full sums");
    return std::fabs(diff);
}

QVDecomposition lebesgue_decompose(const StepIncreasing& limit,
                                   const CadlagPath& x, double atol,
                                   double time_tol) {
    if (!(atol >= 0.0)) throw domain_error("atol must be non-negative");
    if (!(time_tol >= 0.0)) throw domain_error("time_tol must be non-negative");
    const double H = limit.horizon();

    std::vector<std::pair<double, double>> jumps;  // declared, inside [0, H]
    for (const auto& j : x.jumps())
        if (j.first <= H) jumps.push_back(j);

    const auto atoms = limit.measure().atoms();
    std::vector<double> assigned(jumps.size(), 0.0);
    std::vector<std::pair<double, double>> rest;
    for (const auto& [ta, ma] : atoms) {
        std::ptrdiff_t best = -1;
        double best_gap = std::numeric_limits<double>::infinity();
        auto consider = [&](std::ptrdiff_t k) {
            if (k < 0 || k >= static_cast<std::ptrdiff_t>(jumps.size())) return;
            const double gap =
                std::fabs(jumps[static_cast<std::size_t>(k)].first - ta);
            if (gap <= time_tol && gap < best_gap) {
                best = k;
                best_gap = gap;
            }
        };
        const auto it = std::lower_bound(
            jumps.begin(), jumps.end(), ta,
            [](const std::pair<double, double>& j, double v) {
                return j.first < v;
            });
        const std::ptrdiff_t idx = it - jumps.begin();
        consider(idx - 1);
        consider(idx);
        if (best >= 0) {
            assigned[static_cast<std::size_t>(best)] += ma;
        } else if (ma > atol) {
            std::ostringstream msg;
            msg << "limit carries mass " << ma << " at t = " << ta
                << " with no declared jump of the path within " << time_tol;
            throw condition_l_error(ta, ma, 0.0, msg.str());
        } else {
            rest.emplace_back(ta, ma);
        }
    }

    std::vector<std::pair<double, double>> jump_part;
    for (std::size_t k = 0; k < jumps.size(); ++k) {
        const double expected = jumps[k].second * jumps[k].second;
        if (std::fabs(assigned[k] - expected) > atol) {
            std::ostringstream msg;
            msg << "limit mass " << assigned[k] << " at declared jump t = "
                << jumps[k].first << " does not match squared jump "
                << expected;
            throw condition_l_error(jumps[k].first, assigned[k], expected,
                                    msg.str());
        }
        if (assigned[k] > 0.0) jump_part.emplace_back(jumps[k].first, assigned[k]);
    }

    StepIncreasing cont =
        StepIncreasing::from_measure(DiscreteMeasure(rest), H);
    StepIncreasing jpath =
        StepIncreasing::from_measure(DiscreteMeasure(jump_part), H);
    StepIncreasing total(
        pointwise_combine(cont.path(), jpath.path(), 1.0, 1.0));
    return {std::move(total), std::move(cont), std::move(jump_part)};
}

QVLimitResult qv_limit(const CadlagPath& x, const PartitionScheme& scheme,
                       int level_lo, int level_hi, double tol, double atol) {
    if (level_hi - level_lo + 1 < 3)
        throw domain_error("limit estimation needs at least 3 levels");
    if (!(tol > 0.0)) throw domain_error("tol must be positive");
    const double T = x.horizon();

    std::vector<StepIncreasing> qs;
    ConvergenceReport rep;
    rep.tol = tol;
    for (int n = level_lo; n <= level_hi; ++n) {
        qs.push_back(q_n(x, scheme.generate(n)));
        rep.levels.push_back(n);
    }
    for (std::size_t k = 0; k + 1 < qs.size(); ++k) {
        rep.uniform_distances.push_back(
            uniform_distance(qs[k].path(), qs[k + 1].path(), T));
        rep.distances.push_back(
            j1_distance_compact(qs[k].path(), qs[k + 1].path(), T).distance);
    }
    // The Cauchy gate is the consecutive-gap rule. The uniform/j1 label is
    // decided against the cleaned limit instead of consecutive uniform gaps:
    // a step path can produce identical q_n at neighbouring levels (the jump
    // locator can stall on a run of equal partition points), which would make
    // a consecutive uniform gap exactly zero without any uniform convergence.
    rep.mode = ConvergenceMode::divergent;
    std::optional<QVDecomposition> dec;
    if (gaps_converged(rep.distances, tol)) {
        const double mesh = scheme.generate(level_hi).mesh(T);
        const double a =
            atol >= 0.0 ? atol : detail::default_decomposition_atol(tol, mesh);
        dec = lebesgue_decompose(qs.back(), x, a, mesh);
        rep.mode = classify_convergence_mode(qs, dec->total, T, tol) ==
                           ConvergenceMode::uniform
                       ? ConvergenceMode::uniform
                       : ConvergenceMode::j1;
    }
    return {std::move(rep), std::move(qs.back()), std::move(dec)};
}

OneSidedLimitReport one_sided_limit_check(const CadlagPath& x,
                                          const PartitionScheme& scheme,
                                          double t, int level_lo, int level_hi,
                                          OneSidedCase which, double tol) {
    if (!(t > 0.0) || t > x.horizon())
        throw domain_error("probe time must lie in (0, horizon]");
    if (level_hi - level_lo + 1 < 3)
        throw domain_error("one-sided probes need at least 3 levels");
    if (!(tol > 0.0)) throw domain_error("tol must be positive");
    const double T = x.horizon();

    std::vector<Partition> parts;
    std::vector<StepIncreasing> qs;
    for (int n = level_lo; n <= level_hi; ++n) {
        parts.push_back(scheme.generate(n));
        qs.push_back(q_n(x, parts.back()));
    }
    std::vector<double> gaps;
    for (std::size_t k = 0; k + 1 < qs.size(); ++k)
        gaps.push_back(
            j1_distance_compact(qs[k].path(), qs[k + 1].path(), T).distance);

    // Certify the limit on the deepest level prefix that satisfies the
    // stopping rule. The probe levels themselves are not restricted to it: a
    // gap that is exactly zero followed by a tiny positive one fails the
    // monotone rule at the top even though the sequence has long settled.
    std::size_t cert = 0;
    for (std::size_t m = gaps.size(); m >= 2; --m) {
        const std::vector<double> prefix(gaps.begin(),
                                         gaps.begin() + static_cast<long>(m));
        if (gaps_converged(prefix, tol)) {
            cert = m;
            break;
        }
    }
    if (cert == 0)
        throw domain_error(
            "quadratic-variation limit undecided over the probe levels");
    const double mesh = parts[cert].mesh(T);
    const QVDecomposition dec = lebesgue_decompose(
        qs[cert], x, detail::default_decomposition_atol(tol, mesh), mesh);

    const StepIncreasing& target_path = dec.total;
    const bool left_target =
        which == OneSidedCase::le_left_limit || which == OneSidedCase::lt_value;

    OneSidedLimitReport rep;
    rep.which = which;
    rep.target = left_target ? target_path.left_value(t) : target_path(t);
    for (int n = level_lo; n <= level_hi; ++n) {
        const Partition& p = parts[static_cast<std::size_t>(n - level_lo)];
        const StepIncreasing& qn = qs[static_cast<std::size_t>(n - level_lo)];
        const double before = p.last_strictly_before(t);
        double probe = before;
        double observed = 0.0;
        switch (which) {
            case OneSidedCase::le_left_limit:
                observed = qn.left_value(before);
                break;
            case OneSidedCase::lt_value:
                probe = before > 0.0 ? p.last_strictly_before(before) : 0.0;
                observed = qn(probe);
                break;
            case OneSidedCase::ge_value:
                observed = qn(before);
                break;
            case OneSidedCase::gt_left_limit:
                probe = p.successor(before);
                observed = qn.left_value(probe);
                break;
        }
        rep.levels.push_back(n);
        rep.probe_times.push_back(probe);
        rep.observed.push_back(observed);
        rep.gaps.push_back(std::fabs(observed - rep.target));
    }
    rep.pass = gaps_converged(rep.gaps, tol);
    return rep;
}

}  // namespace cadlag
