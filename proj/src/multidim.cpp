#include "cadlagqv/multidim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "cadlagqv/errors.hpp"
#include "cadlagqv/qv.hpp"
#include "cadlagqv/skorokhod.hpp"
#include "cadlagqv/step_increasing.hpp"

namespace cadlag {

namespace {

void require_covering(double path_horizon, const Partition& p) {
    if (p.horizon() < path_horizon)
        throw domain_error("partition must reach the path horizon");
}

// (time, signed mass) support of a step path, mass at 0 read off the value.
std::vector<std::pair<double, double>> signed_atoms(const CadlagPath& e,
                                                    double horizon) {
    std::vector<std::pair<double, double>> atoms;
    const double at_zero = e.evaluate(0.0);
    if (at_zero != 0.0) atoms.emplace_back(0.0, at_zero);
    for (const auto& j : e.jumps_up_to(horizon)) atoms.push_back(j);
    return atoms;
}

}  // namespace

MatrixStepPath::MatrixStepPath(std::size_t dimension,
                               std::vector<CadlagPath> entries)
    : m_(dimension), entries_(std::move(entries)) {
    if (m_ == 0) throw domain_error("matrix path dimension must be positive");
    if (entries_.size() != m_ * m_)
        throw domain_error("matrix path needs dimension^2 entries");
    const double h = entries_.front().horizon();
    for (const auto& e : entries_)
        if (e.horizon() != h)
            throw domain_error("matrix path entries must share one horizon");
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = i + 1; j < m_; ++j) {
            const CadlagPath& a = entries_[i * m_ + j];
            const CadlagPath& b = entries_[j * m_ + i];
            if (a.times() != b.times() || a.values() != b.values())
                throw domain_error("matrix path must be symmetric");
        }
    for (std::size_t i = 0; i < m_; ++i) {
        const auto& v = entries_[i * m_ + i].values();
        for (std::size_t k = 0; k + 1 < v.size(); ++k)
            if (v[k + 1] < v[k])
                throw domain_error("matrix path diagonal must be non-decreasing");
    }
}

const CadlagPath& MatrixStepPath::entry(std::size_t i, std::size_t j) const {
    if (i >= m_ || j >= m_) throw domain_error("matrix entry index out of range");
    return entries_[i * m_ + j];
}

CadlagPath cross_q_n(const CadlagPath& x, const CadlagPath& y,
                     const Partition& p) {
    if (x.horizon() != y.horizon())
        throw domain_error("cross sum needs paths on one horizon");
    require_covering(x.horizon(), p);
    const auto& pts = p.points();
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double dx =
            x.evaluate_clamped(pts[i + 1]) - x.evaluate_clamped(pts[i]);
        const double dy =
            y.evaluate_clamped(pts[i + 1]) - y.evaluate_clamped(pts[i]);
        const double prod = dx * dy;
        if (prod != 0.0) atoms.emplace_back(pts[i], prod);
    }
    return detail::accumulate_step_atoms(atoms, x.horizon());
}

MatrixStepPath matrix_q_n(const VectorCadlagPath& x, const Partition& p) {
    require_covering(x.horizon(), p);
    const std::size_t m = x.dimension();
    const auto& pts = p.points();

    std::vector<std::vector<double>> incs(m);
    for (std::size_t c = 0; c < m; ++c) {
        incs[c].reserve(pts.size());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            incs[c].push_back(x.component(c).evaluate_clamped(pts[i + 1]) -
                              x.component(c).evaluate_clamped(pts[i]));
    }

    std::vector<CadlagPath> entries(m * m, CadlagPath::constant(0.0, x.horizon()));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            std::vector<std::pair<double, double>> atoms;
            for (std::size_t k = 0; k < incs[i].size(); ++k) {
                const double prod = incs[i][k] * incs[j][k];
                if (prod != 0.0) atoms.emplace_back(pts[k], prod);
            }
            CadlagPath e = detail::accumulate_step_atoms(atoms, x.horizon());
            entries[j * m + i] = e;
            entries[i * m + j] = std::move(e);
        }
    return MatrixStepPath(m, std::move(entries));
}

double polarization_identity_gap(const CadlagPath& x, const CadlagPath& y,
                                 const Partition& p) {
    if (x.horizon() != y.horizon())
        throw domain_error("polarization needs paths on one horizon");
    const CadlagPath sum = pointwise_combine(x, y, 1.0, 1.0);
    const StepIncreasing qs = q_n(sum, p);
    const StepIncreasing qx = q_n(x, p);
    const StepIncreasing qy = q_n(y, p);
    const CadlagPath cr = cross_q_n(x, y, p);

    std::vector<double> probes{0.0, x.horizon()};
    for (const CadlagPath* path : {&qs.path(), &qx.path(), &qy.path(), &cr})
        for (double t : path->times()) probes.push_back(t);
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

    double worst = 0.0;
    for (double t : probes) {
        const double lhs = qs(t);
        const double rhs = qx(t) + qy(t) + 2.0 * cr.evaluate(t);
        const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
        worst = std::max(worst, std::fabs(lhs - rhs) / scale);
    }
    return worst;
}

CadlagPath covariation_polarization(const CadlagPath& x, const CadlagPath& y,
                                    const PartitionScheme& scheme,
                                    int level_lo, int level_hi, double tol) {
    if (x.horizon() != y.horizon())
        throw domain_error("polarization needs paths on one horizon");
    for (int n = level_lo; n <= level_hi; ++n) {
        const double gap = polarization_identity_gap(x, y, scheme.generate(n));
        if (gap > 1e-12) {
            std::ostringstream msg;
            msg << "polarization expansion violated at level " << n
                << " with relative gap " << gap;
            throw internal_consistency_error(msg.str());
        }
    }

    const CadlagPath sum = pointwise_combine(x, y, 1.0, 1.0);
    const auto check = [&](const CadlagPath& path, const char* name) {
        QVLimitResult lim = qv_limit(path, scheme, level_lo, level_hi, tol);
        if (!lim.report.converged())
            throw domain_error(std::string("quadratic variation of the ") +
                               name + " is undecided over these levels");
        return std::move(lim.finest);
    };
    const StepIncreasing qx = check(x, "first path");
    const StepIncreasing qy = check(y, "second path");
    const StepIncreasing qsum = check(sum, "sum path");

    return pointwise_combine(
        pointwise_combine(qsum.path(), qx.path(), 0.5, -0.5), qy.path(), 1.0,
        -0.5);
}

namespace {

// Jump masses of a converged entry estimate must match the products of the
// declared component jumps, up to atol, with atoms located within one mesh.
void verify_entry_decomposition(const CadlagPath& e, const CadlagPath& xi,
                                const CadlagPath& xj, std::size_t i,
                                std::size_t j, double atol, double time_tol,
                                double horizon) {
    std::vector<std::pair<double, double>> expected;
    {
        std::vector<double> times = xi.jump_times();
        for (double t : xj.jump_times()) times.push_back(t);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        for (double t : times)
            if (t <= horizon)
                expected.emplace_back(t, xi.jump_at(t) * xj.jump_at(t));
    }

    std::vector<double> assigned(expected.size(), 0.0);
    const auto tag = [i, j](std::ostringstream& msg) {
        msg << " in covariation entry (" << i << "," << j << ")";
    };
    for (const auto& [ta, ma] : signed_atoms(e, horizon)) {
        std::ptrdiff_t best = -1;
        double best_gap = std::numeric_limits<double>::infinity();
        const auto it = std::lower_bound(
            expected.begin(), expected.end(), ta,
            [](const std::pair<double, double>& c, double v) {
                return c.first < v;
            });
        for (std::ptrdiff_t k = it - expected.begin() - 1;
             k <= it - expected.begin(); ++k) {
            if (k < 0 || k >= static_cast<std::ptrdiff_t>(expected.size()))
                continue;
            const double gap =
                std::fabs(expected[static_cast<std::size_t>(k)].first - ta);
            if (gap <= time_tol && gap < best_gap) {
                best = k;
                best_gap = gap;
            }
        }
        if (best >= 0) {
            assigned[static_cast<std::size_t>(best)] += ma;
        } else if (std::fabs(ma) > atol) {
            std::ostringstream msg;
            msg << "limit carries mass " << ma << " at t = " << ta
                << " with no declared jump of either component nearby";
            tag(msg);
            throw condition_l_error(ta, ma, 0.0, msg.str());
        }
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
        if (std::fabs(assigned[k] - expected[k].second) > atol) {
            std::ostringstream msg;
            msg << "limit mass " << assigned[k] << " at declared jump t = "
                << expected[k].first << " does not match the jump product "
                << expected[k].second;
            tag(msg);
            throw condition_l_error(expected[k].first, assigned[k],
                                    expected[k].second, msg.str());
        }
    }
}

}  // namespace

bool MatrixQVLimitResult::all_converged() const {
    for (const auto& r : entry_reports)
        if (!r.converged()) return false;
    return true;
}

MatrixQVLimitResult matrix_qv_limit(const VectorCadlagPath& x,
                                    const PartitionScheme& scheme,
                                    int level_lo, int level_hi, double tol,
                                    double atol) {
    if (level_hi - level_lo + 1 < 3)
        throw domain_error("limit estimation needs at least 3 levels");
    if (!(tol > 0.0)) throw domain_error("tol must be positive");
    const double T = x.horizon();
    const std::size_t m = x.dimension();

    std::vector<MatrixStepPath> per_level;
    for (int n = level_lo; n <= level_hi; ++n)
        per_level.push_back(matrix_q_n(x, scheme.generate(n)));

    const double mesh = scheme.generate(level_hi).mesh(T);
    const double a =
        atol >= 0.0 ? atol : detail::default_decomposition_atol(tol, mesh);

    std::vector<ConvergenceReport> reports(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            ConvergenceReport rep;
            rep.tol = tol;
            for (std::size_t k = 0; k < per_level.size(); ++k) {
                rep.levels.push_back(level_lo + static_cast<int>(k));
                if (k + 1 < per_level.size()) {
                    const CadlagPath& e0 = per_level[k].entry(i, j);
                    const CadlagPath& e1 = per_level[k + 1].entry(i, j);
                    rep.uniform_distances.push_back(uniform_distance(e0, e1, T));
                    rep.distances.push_back(
                        j1_distance_compact(e0, e1, T).distance);
                }
            }
            rep.mode = gaps_converged(rep.distances, tol)
                           ? ConvergenceMode::j1
                           : ConvergenceMode::divergent;
            if (rep.converged())
                verify_entry_decomposition(per_level.back().entry(i, j),
                                           x.component(i), x.component(j), i,
                                           j, a, mesh, T);
            reports[j * m + i] = rep;
            reports[i * m + j] = std::move(rep);
        }

    return {std::move(per_level.back()), std::move(reports)};
}

PsdReport psd_increment_check(const MatrixStepPath& q,
                              const std::vector<double>& times, double atol) {
    if (times.size() < 2)
        throw domain_error("increment check needs at least two times");
    if (!(atol >= 0.0)) throw domain_error("atol must be non-negative");
    const std::size_t m = q.dimension();

    PsdReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd inc(static_cast<Eigen::Index>(m),
                        static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                inc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    q.value(i, j, times[k + 1]) - q.value(i, j, times[k]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            inc, Eigen::EigenvaluesOnly);
        const double lo = solver.eigenvalues().minCoeff();
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, lo);
        if (lo < -atol) {
            rep.pass = false;
            rep.violations.push_back({times[k], times[k + 1], lo});
        }
    }
    return rep;
}

JumpAlignmentReport jump_alignment_check(const VectorCadlagPath& x,
                                         const PartitionScheme& scheme,
                                         double t, int level_lo, int level_hi,
                                         double tol) {
    if (!(t > 0.0) || t > x.horizon())
        throw domain_error("alignment time must lie in (0, horizon]");
    if (level_hi < level_lo) throw domain_error("empty level range");
    const std::size_t m = x.dimension();

    JumpAlignmentReport rep;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            rep.targets.push_back(x.component(i).jump_at(t) *
                                  x.component(j).jump_at(t));

    for (int n = level_lo; n <= level_hi; ++n) {
        const Partition p = scheme.generate(n);
        const double tn = p.last_strictly_before(t);
        const MatrixStepPath q = matrix_q_n(x, p);
        rep.levels.push_back(n);
        rep.locators.push_back(tn);
        std::vector<double> row;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                // The mass at the locator; a locator at 0 holds the whole
                // first-cell product in the value instead of a jump.
                const CadlagPath& e = q.entry(i, j);
                row.push_back(tn == 0.0 ? e.evaluate(0.0) : e.jump_at(tn));
            }
        rep.observed.push_back(std::move(row));
    }

    rep.pass = true;
    for (std::size_t entry = 0; entry < m * m; ++entry) {
        std::vector<double> gaps;
        for (const auto& row : rep.observed)
            gaps.push_back(std::fabs(row[entry] - rep.targets[entry]));
        if (!gaps_converged(gaps, tol)) rep.pass = false;
    }
    return rep;
}

}  // namespace cadlag
