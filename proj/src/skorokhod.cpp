#include "cadlagqv/skorokhod.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cadlagqv/errors.hpp"

namespace cadlag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TimeChange TimeChange::identity(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw domain_error("time change horizon must be positive and finite");
    return TimeChange({{0.0, 0.0}, {horizon, horizon}});
}

TimeChange::TimeChange(std::vector<std::pair<double, double>> anchors)
    : anchors_(std::move(anchors)) {
    if (anchors_.size() < 2)
        throw domain_error("time change needs at least two anchors");
    if (anchors_.front().first != 0.0 || anchors_.front().second != 0.0)
        throw domain_error("time change must start at (0, 0)");
    const auto& last = anchors_.back();
    if (!(last.first > 0.0) || last.first != last.second)
        throw domain_error("time change must end at (T, T)");
    for (std::size_t k = 1; k < anchors_.size(); ++k) {
        const auto& [s0, u0] = anchors_[k - 1];
        const auto& [s1, u1] = anchors_[k];
        if (!std::isfinite(s1) || !std::isfinite(u1) || s1 <= s0 || u1 <= u0)
            throw domain_error("time change anchors must increase strictly in both coordinates");
    }
}

double TimeChange::operator()(double t) const {
    const double T = anchors_.back().first;
    if (!(t >= 0.0) || !(t <= T))
        throw domain_error("time change evaluated outside [0, horizon]");
    if (t == T) return T;
    auto it = std::upper_bound(
        anchors_.begin(), anchors_.end(), t,
        [](double v, const std::pair<double, double>& a) { return v < a.first; });
    const auto& [s0, u0] = *(it - 1);
    if (t == s0) return u0;
    const auto& [s1, u1] = *it;
    return u0 + (u1 - u0) * ((t - s0) / (s1 - s0));
}

double TimeChange::inverse(double u) const {
    const double T = anchors_.back().second;
    if (!(u >= 0.0) || !(u <= T))
        throw domain_error("time change inverted outside [0, horizon]");
    if (u == T) return T;
    auto it = std::upper_bound(
        anchors_.begin(), anchors_.end(), u,
        [](double v, const std::pair<double, double>& a) { return v < a.second; });
    const auto& [s0, u0] = *(it - 1);
    if (u == u0) return s0;
    const auto& [s1, u1] = *it;
    return s0 + (s1 - s0) * ((u - u0) / (u1 - u0));
}

double TimeChange::max_displacement() const {
    double m = 0.0;
    for (const auto& [s, u] : anchors_) m = std::max(m, std::fabs(s - u));
    return m;
}

namespace {

// Step reading of a path on [0, T]: every knot value change is an event.
struct StepSeq {
    std::vector<double> vals;  // p + 1 segment values
    std::vector<double> jmp;   // p event times, strictly increasing, in (0, T]
    double T = 0.0;
    bool mono = false;
};

StepSeq extract_steps(const CadlagPath& x, double T) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw domain_error("comparison horizon must be positive and finite");
    if (T > x.horizon())
        throw domain_error("comparison horizon exceeds a path horizon");
    StepSeq s;
    s.T = T;
    const auto& ts = x.times();
    const auto& vs = x.values();
    s.vals.push_back(vs.front());
    for (std::size_t k = 1; k < ts.size() && ts[k] <= T; ++k) {
        if (vs[k] != s.vals.back()) {
            s.jmp.push_back(ts[k]);
            s.vals.push_back(vs[k]);
        }
    }
    s.mono = std::is_sorted(s.vals.begin(), s.vals.end());
    return s;
}

double uniform_steps(const StepSeq& X, const StepSeq& Y) {
    double m = std::fabs(X.vals[0] - Y.vals[0]);
    std::size_t i = 0, j = 0;
    while (i < X.jmp.size() || j < Y.jmp.size()) {
        const double ta = i < X.jmp.size() ? X.jmp[i] : kInf;
        const double tb = j < Y.jmp.size() ? Y.jmp[j] : kInf;
        if (ta <= tb) ++i;
        if (tb <= ta) ++j;
        m = std::max(m, std::fabs(X.vals[i] - Y.vals[j]));
    }
    return m;
}

// Every threshold the solver bisects over is a rounded |difference|, so every
// predicate must be the literal fabs comparison: a two-sided bound rewritten
// as arr[k] >= center - eps can disagree with it by an ulp, which is exactly
// enough to lose a bracket endpoint. The helpers below keep the binary-search
// speed by locating a two-sided guess first and then walking the boundary
// with the authoritative test; rounded |center - y| is monotone in y on each
// side of center, so the admissible index set stays contiguous.

// Window of indices of sorted arr with |center - arr[k]| <= eps.
void fabs_window(const std::vector<double>& arr, double center, double eps,
                 std::ptrdiff_t& lo, std::ptrdiff_t& hi) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(arr.size());
    auto ok = [&](std::ptrdiff_t k) {
        return std::fabs(center - arr[static_cast<std::size_t>(k)]) <= eps;
    };
    lo = std::lower_bound(arr.begin(), arr.end(), center - eps) - arr.begin();
    hi = (std::upper_bound(arr.begin(), arr.end(), center + eps) - arr.begin()) - 1;
    lo = std::min(lo, n);
    hi = std::min(hi, n - 1);
    while (lo > 0 && ok(lo - 1)) --lo;
    while (hi + 1 < n && ok(hi + 1)) ++hi;
    while (lo < n && lo <= hi && !ok(lo)) ++lo;
    while (hi >= 0 && lo <= hi && !ok(hi)) --hi;
}

// b is admissible below: b <= center, or past it by at most eps.
inline bool below_ok(double b, double center, double eps) {
    return b <= center || b - center <= eps;
}

// b is admissible above: b >= center, or short of it by at most eps.
inline bool above_ok(double b, double center, double eps) {
    return b >= center || center - b <= eps;
}

// Number of leading entries of sorted arr satisfying below_ok.
std::ptrdiff_t count_below_ok(const std::vector<double>& arr, double center,
                              double eps) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(arr.size());
    std::ptrdiff_t c = std::upper_bound(arr.begin(), arr.end(), center + eps) -
                       arr.begin();
    while (c < n && below_ok(arr[static_cast<std::size_t>(c)], center, eps)) ++c;
    while (c > 0 && !below_ok(arr[static_cast<std::size_t>(c - 1)], center, eps))
        --c;
    return c;
}

// Index of the first entry of sorted arr satisfying above_ok.
std::ptrdiff_t first_above_ok(const std::vector<double>& arr, double center,
                              double eps) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(arr.size());
    std::ptrdiff_t c = std::lower_bound(arr.begin(), arr.end(), center - eps) -
                       arr.begin();
    while (c > 0 && above_ok(arr[static_cast<std::size_t>(c - 1)], center, eps))
        --c;
    while (c < n && !above_ok(arr[static_cast<std::size_t>(c)], center, eps)) ++c;
    return c;
}

// ---------------------------------------------------------------------------
// Reachability at a fixed eps.
//
// States (i, j) mean: x's first i events and y's first j events are placed.
// Moves: R places x's next event on its own inside [a - eps, a + eps]; U lets
// y's next event pass at its fixed time b; D matches the two (|a - b| <= eps).
// Every visited state must satisfy |X_i - Y_j| <= eps, zero-dwell states
// included. The earliest admissible time of the last placed event collapses
// to max(b_j, a_i - eps), which is what makes the row sweeps below valid:
// R only needs b_j <= a_{i+1} + eps, U only needs b_{j+1} >= a_i - eps, and
// the ordering constraint an R move defers is enforced by the very U/D move
// it would block. Events at exactly T are pinned: they only match each other.
// ---------------------------------------------------------------------------

struct Trace {
    int kind = 0;                                   // 1 bitset, 2 interval
    std::vector<std::array<std::ptrdiff_t, 4>> iv;  // seed lo/hi, full lo/hi
    std::vector<std::vector<std::uint64_t>> bits;   // full row per level
};

// In-place rightward flood of s through the contiguous runs of m: a set bit
// of s extends through every 1-run of m it touches from below. Single pass,
// carries chain across words.
void flood_right(std::vector<std::uint64_t>& s,
                 const std::vector<std::uint64_t>& m) {
    std::uint64_t shift_carry = 0;
    std::uint64_t add_carry = 0;
    for (std::size_t w = 0; w < s.size(); ++w) {
        const std::uint64_t pushes = (s[w] << 1) | shift_carry;
        shift_carry = s[w] >> 63;
        const std::uint64_t starts = pushes & m[w];
        const unsigned __int128 sum =
            static_cast<unsigned __int128>(m[w]) + starts + add_carry;
        add_carry = static_cast<std::uint64_t>(sum >> 64);
        const std::uint64_t fill =
            (static_cast<std::uint64_t>(sum) ^ m[w]) & m[w];
        s[w] |= starts | fill;
    }
}

bool feasible_bitset(const StepSeq& X, const StepSeq& Y, double eps,
                     Trace* trace) {
    const std::size_t p = X.jmp.size(), q = Y.jmp.size();
    const std::size_t W = (q + 64) / 64;
    const double T = X.T;
    const auto& yv = Y.vals;
    const auto& yj = Y.jmp;

    std::vector<std::uint64_t> freem(W), um(W), rm(W), dm(W), cur(W), nxt(W);
    auto set_bit = [](std::vector<std::uint64_t>& v, std::size_t j) {
        v[j >> 6] |= std::uint64_t{1} << (j & 63);
    };
    auto test_bit = [](const std::vector<std::uint64_t>& v, std::size_t j) {
        return (v[j >> 6] >> (j & 63)) & 1u;
    };

    auto build_row = [&](std::size_t i) {
        std::fill(freem.begin(), freem.end(), 0);
        std::fill(um.begin(), um.end(), 0);
        std::fill(rm.begin(), rm.end(), 0);
        std::fill(dm.begin(), dm.end(), 0);
        const double xv = X.vals[i];
        const bool first = i == 0;
        const double a = first ? 0.0 : X.jmp[i - 1];
        const bool at_end = !first && a == T;
        for (std::size_t j = 0; j <= q; ++j) {
            const bool free_ok = std::fabs(xv - yv[j]) <= eps;
            if (free_ok) set_bit(freem, j);
            // bprev < T: nothing can be re-timed past a jump at the horizon.
            const double bprev = j == 0 ? 0.0 : yj[j - 1];
            if (!first && bprev < T &&
                (at_end || below_ok(bprev, a, eps)))
                set_bit(rm, j);
            if (j >= 1) {
                const double b = yj[j - 1];
                const bool after_a = at_end ? b >= T : above_ok(b, a, eps);
                if (free_ok && (first || after_a)) set_bit(um, j);
                if (!first) {
                    const bool match = (at_end || b == T)
                                           ? a == b
                                           : std::fabs(a - b) <= eps;
                    if (match) set_bit(dm, j);
                }
            }
        }
    };

    build_row(0);
    std::fill(cur.begin(), cur.end(), 0);
    if (test_bit(freem, 0)) {
        set_bit(cur, 0);
        flood_right(cur, um);
    }
    if (trace) trace->bits.push_back(cur);
    for (std::size_t i = 1; i <= p; ++i) {
        build_row(i);
        std::uint64_t carry = 0;
        bool any = false;
        for (std::size_t w = 0; w < W; ++w) {
            const std::uint64_t shifted = (cur[w] << 1) | carry;
            carry = cur[w] >> 63;
            nxt[w] = ((cur[w] & rm[w]) | (shifted & dm[w])) & freem[w];
        }
        flood_right(nxt, um);
        for (std::size_t w = 0; w < W; ++w) any = any || nxt[w] != 0;
        cur.swap(nxt);
        if (trace) trace->bits.push_back(cur);
        if (!any) return false;
    }
    return test_bit(cur, q) != 0;
}

// Interval sweep for monotone step values: each reachable row is a single
// index interval, so the whole decision runs in O(p log q).
bool feasible_interval(const StepSeq& X, const StepSeq& Y, double eps,
                       Trace* trace) {
    const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(X.jmp.size());
    const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(Y.jmp.size());
    const double T = X.T;
    const auto& yv = Y.vals;
    const auto& yj = Y.jmp;

    std::ptrdiff_t plo = 0, phi = -1;
    bool ok = true;
    for (std::ptrdiff_t i = 0; i <= p; ++i) {
        std::ptrdiff_t flo, fhi;
        fabs_window(yv, X.vals[static_cast<std::size_t>(i)], eps, flo, fhi);
        std::ptrdiff_t slo, shi;
        bool at_end = false;
        double a = 0.0;
        if (i == 0) {
            slo = 0;
            shi = (flo <= 0 && 0 <= fhi) ? 0 : -1;
        } else {
            a = X.jmp[static_cast<std::size_t>(i - 1)];
            at_end = a == T;
            // Previous row stepped in place: admissible while y's last event
            // does not overshoot the window of a. A column past a horizon
            // jump of y is never enterable this way.
            const std::ptrdiff_t jcap =
                (q >= 1 && yj.back() == T) ? q - 1 : q;
            const std::ptrdiff_t jr =
                std::min(jcap, at_end ? q : count_below_ok(yj, a, eps));
            std::ptrdiff_t rlo = plo, rhi = std::min(phi, jr);
            std::ptrdiff_t dlo, dhi;
            if (at_end) {
                const bool has_end = q >= 1 && yj.back() == T;
                dlo = has_end ? q : 1;
                dhi = has_end ? q : 0;
            } else {
                std::ptrdiff_t wlo, whi;
                fabs_window(yj, a, eps, wlo, whi);
                dlo = wlo + 1;
                dhi = whi + 1;
                if (dhi >= 1 && dhi <= q &&
                    yj[static_cast<std::size_t>(dhi - 1)] == T)
                    --dhi;  // an interior jump cannot match one at the horizon
            }
            dlo = std::max(dlo, plo + 1);
            dhi = std::min(dhi, phi + 1);
            const bool rok = rlo <= rhi, dok = dlo <= dhi;
            if (!rok && !dok) {
                slo = 0;
                shi = -1;
            } else if (!rok) {
                slo = dlo;
                shi = dhi;
            } else if (!dok) {
                slo = rlo;
                shi = rhi;
            } else {
                if (std::max(rlo, dlo) > std::min(rhi, dhi) + 1)
                    throw internal_consistency_error(
                        "reachable row split into two intervals on monotone input");
                slo = std::min(rlo, dlo);
                shi = std::max(rhi, dhi);
            }
            slo = std::max(slo, flo);
            shi = std::min(shi, fhi);
        }
        std::ptrdiff_t klo = slo, khi = shi;
        if (slo <= shi) {
            std::ptrdiff_t ju;  // first column enterable from the left
            if (i == 0)
                ju = 1;
            else if (at_end)
                ju = (q >= 1 && yj.back() == T) ? q : q + 1;
            else
                ju = first_above_ok(yj, a, eps) + 1;
            const std::ptrdiff_t mlo = std::max(flo, ju), mhi = fhi;
            if (khi + 1 >= mlo && khi + 1 <= mhi) khi = mhi;
        }
        if (trace) trace->iv.push_back({slo, shi, klo, khi});
        if (slo > shi) {
            ok = false;
            break;
        }
        plo = klo;
        phi = khi;
    }
    return ok && plo <= q && q <= phi;
}

bool kernel_feasible(const StepSeq& X, const StepSeq& Y, double eps, int force,
                     Trace* trace) {
    const bool monotone = X.mono && Y.mono;
    int kind = force;
    if (kind == 0) kind = monotone ? 2 : 1;
    if (kind == 2 && !monotone)
        throw domain_error("interval kernel requires monotone step values");
    if (trace) {
        trace->kind = kind;
        trace->iv.clear();
        trace->bits.clear();
    }
    if (kind == 2) return feasible_interval(X, Y, eps, trace);
    return feasible_bitset(X, Y, eps, trace);
}

// Recovers one admissible move sequence from a stored reachability sweep.
// Matched moves are preferred so witnesses keep jumps aligned where possible.
std::vector<char> backtrack_moves(const StepSeq& X, const StepSeq& Y,
                                  double eps, const Trace& trace) {
    const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(X.jmp.size());
    const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(Y.jmp.size());
    const double T = X.T;
    const auto& yj = Y.jmp;
    std::vector<char> moves;
    std::ptrdiff_t i = p, j = q;

    auto d_ok = [&](std::ptrdiff_t ii, std::ptrdiff_t jj) {
        if (ii < 1 || jj < 1) return false;
        const double a = X.jmp[static_cast<std::size_t>(ii - 1)];
        const double b = yj[static_cast<std::size_t>(jj - 1)];
        if (a == T || b == T) return a == b;
        return std::fabs(a - b) <= eps;
    };
    auto r_ok = [&](std::ptrdiff_t ii, std::ptrdiff_t jj) {
        if (ii < 1) return false;
        const double a = X.jmp[static_cast<std::size_t>(ii - 1)];
        const double bprev = jj == 0 ? 0.0 : yj[static_cast<std::size_t>(jj - 1)];
        if (bprev >= T) return false;
        return a == T || below_ok(bprev, a, eps);
    };
    auto val_ok = [&](std::ptrdiff_t ii, std::ptrdiff_t jj) {
        const double d = X.vals[static_cast<std::size_t>(ii)] -
                         Y.vals[static_cast<std::size_t>(jj)];
        return std::fabs(d) <= eps;
    };
    auto u_ok = [&](std::ptrdiff_t ii, std::ptrdiff_t jj) {
        if (jj < 1) return false;
        if (ii == 0) return true;
        const double a = X.jmp[static_cast<std::size_t>(ii - 1)];
        const double b = yj[static_cast<std::size_t>(jj - 1)];
        return a == T ? b >= T : above_ok(b, a, eps);
    };

    if (trace.kind == 2) {
        const auto& rows = trace.iv;
        while (i > 0 || j > 0) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            if (j > row[1]) {
                moves.push_back('U');
                --j;
                continue;
            }
            const bool prev_has = [&](std::ptrdiff_t jj) {
                if (i < 1) return false;
                const auto& pr = rows[static_cast<std::size_t>(i - 1)];
                return pr[2] <= jj && jj <= pr[3];
            }(j - 1);
            if (d_ok(i, j) && prev_has) {
                moves.push_back('D');
                --i;
                --j;
                continue;
            }
            if (i >= 1) {
                const auto& pr = rows[static_cast<std::size_t>(i - 1)];
                if (r_ok(i, j) && pr[2] <= j && j <= pr[3]) {
                    moves.push_back('R');
                    --i;
                    continue;
                }
            }
            throw internal_consistency_error("witness backtrack left the reachable set");
        }
    } else {
        const auto& rows = trace.bits;
        auto has = [&](std::ptrdiff_t ii, std::ptrdiff_t jj) {
            if (jj < 0) return false;
            const auto& r = rows[static_cast<std::size_t>(ii)];
            return ((r[static_cast<std::size_t>(jj) >> 6] >>
                     (static_cast<std::size_t>(jj) & 63)) &
                    1u) != 0;
        };
        while (i > 0 || j > 0) {
            if (d_ok(i, j) && has(i - 1, j - 1) && val_ok(i, j)) {
                moves.push_back('D');
                --i;
                --j;
                continue;
            }
            if (i >= 1 && r_ok(i, j) && has(i - 1, j) && val_ok(i, j)) {
                moves.push_back('R');
                --i;
                continue;
            }
            if (u_ok(i, j) && has(i, j - 1) && val_ok(i, j)) {
                moves.push_back('U');
                --j;
                continue;
            }
            throw internal_consistency_error("witness backtrack left the reachable set");
        }
    }
    std::reverse(moves.begin(), moves.end());
    return moves;
}

// Turns a move sequence into concrete anchor points. Free placements go as
// early as their window allows, nudged to keep event times strictly
// increasing; matched and passing events sit at y's jump times.
TimeChange build_witness(const StepSeq& X, const StepSeq& Y, double eps,
                         const std::vector<char>& moves) {
    const double T = X.T;
    const double bump = 1e-9 * std::max(1.0, T);
    const std::size_t q = Y.jmp.size();
    std::vector<std::pair<double, double>> anchors{{0.0, 0.0}};
    double cur = 0.0;
    std::size_t i = 0, j = 0;
    for (char mv : moves) {
        if (mv == 'U') {
            ++j;
            cur = std::max(cur, Y.jmp[j - 1]);
            continue;
        }
        const double a = X.jmp[i];
        double tau;
        if (mv == 'D') {
            ++j;
            tau = Y.jmp[j - 1];
            if (tau <= cur) tau = cur + bump;
        } else {
            if (a == T) {
                tau = T;
            } else {
                tau = std::max(cur + bump, a - eps);
                double cap = std::min(a + eps, T);
                if (j < q) cap = std::min(cap, Y.jmp[j] - bump);
                if (tau > cap) tau = std::min(std::max(cur + bump, a - eps), T);
            }
        }
        anchors.emplace_back(tau, a);
        cur = std::max(cur, tau);
        ++i;
    }
    if (anchors.back().first != T || anchors.back().second != T)
        anchors.emplace_back(T, T);
    for (std::size_t k = anchors.size() - 1; k-- > 1;) {
        if (anchors[k].first >= anchors[k + 1].first)
            anchors[k].first = anchors[k + 1].first - bump;
    }
    return TimeChange(std::move(anchors));
}

void collect_candidates(const std::vector<double>& xs, std::vector<double> ys,
                        double lo, double hi, std::vector<double>& out) {
    std::sort(ys.begin(), ys.end());
    const double pad = 1e-12 * std::max(1.0, hi);
    for (double xv : xs) {
        auto it = std::lower_bound(ys.begin(), ys.end(), xv - hi - pad);
        for (; it != ys.end() && *it <= xv + hi + pad; ++it) {
            double c = std::fabs(xv - *it);
            for (int rep = 0; rep < 3; ++rep) {
                if (c > lo && c <= hi + pad) out.push_back(c);
                c = std::nextafter(c, kInf);
            }
        }
    }
}

}  // namespace

namespace detail {

bool j1_feasible(const CadlagPath& x, const CadlagPath& y, double T, double eps,
                 int kernel) {
    if (!(eps >= 0.0)) throw domain_error("eps must be non-negative");
    const StepSeq X = extract_steps(x, T), Y = extract_steps(y, T);
    return kernel_feasible(X, Y, eps, kernel, nullptr);
}

}  // namespace detail

bool j1_within(const CadlagPath& x, const CadlagPath& y, double T, double eps) {
    return detail::j1_feasible(x, y, T, eps, 0);
}

double uniform_distance(const CadlagPath& x, const CadlagPath& y, double T) {
    return uniform_steps(extract_steps(x, T), extract_steps(y, T));
}

J1Result j1_distance_compact(const CadlagPath& x, const CadlagPath& y,
                             double T) {
    const StepSeq X = extract_steps(x, T), Y = extract_steps(y, T);
    const double du = uniform_steps(X, Y);
    if (du == 0.0) return {0.0, TimeChange::identity(T)};

    // The distance always sits on a value or event-time difference; bisection
    // shrinks the bracket (lo infeasible, hi feasible], then the thresholds
    // inside the bracket are tried in order. The identity change certifies
    // that the uniform distance is feasible.
    double lo = 0.0, hi = du;
    for (int it = 0; it < 80; ++it) {
        if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (kernel_feasible(X, Y, mid, 0, nullptr))
            hi = mid;
        else
            lo = mid;
    }
    std::vector<double> cand;
    collect_candidates(X.vals, Y.vals, lo, hi, cand);
    collect_candidates(X.jmp, Y.jmp, lo, hi, cand);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    double dist = hi;
    for (double c : cand) {
        if (c >= hi) break;
        if (kernel_feasible(X, Y, c, 0, nullptr)) {
            dist = c;
            break;
        }
    }
    Trace trace;
    if (!kernel_feasible(X, Y, dist, 0, &trace))
        throw internal_consistency_error("distance bracket lost feasibility");
    const auto moves = backtrack_moves(X, Y, dist, trace);
    return {dist, build_witness(X, Y, dist, moves)};
}

double j1_distance_halfline(const CadlagPath& x, const CadlagPath& y,
                            double eps_h) {
    if (x.horizon() != y.horizon())
        throw domain_error("half line metric needs a common horizon");
    if (!(eps_h > 0.0)) throw domain_error("jump clearance must be positive");
    const double H = x.horizon();

    auto nudge = [&](double t) {
        for (int guard = 0; guard < 1000; ++guard) {
            double conflict = -1.0;
            for (const CadlagPath* path : {&x, &y})
                for (double s : path->jump_times())
                    if (std::fabs(s - t) <= eps_h) conflict = std::max(conflict, s);
            if (conflict < 0.0) return t;
            t = conflict - 2.0 * eps_h;
        }
        return std::max(t, eps_h);
    };

    const int terms = static_cast<int>(std::floor(H));
    if (terms == 0) {
        const double d = j1_distance_compact(x, y, nudge(H)).distance;
        return 0.5 * std::min(1.0, d);
    }
    double total = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double tk = nudge(std::min(static_cast<double>(k), H));
        const double d = j1_distance_compact(x, y, tk).distance;
        total += std::ldexp(std::min(1.0, d), -k);
    }
    return total;
}

double j1_distance_oracle(const CadlagPath& x, const CadlagPath& y, double T,
                          double grid_step) {
    if (!(grid_step > 0.0)) throw domain_error("grid step must be positive");
    const StepSeq X = extract_steps(x, T), Y = extract_steps(y, T);
    if (!X.jmp.empty() && X.jmp.back() == T)
        throw domain_error("oracle cannot place a jump lying exactly at the horizon");
    const std::size_t p = X.jmp.size(), q = Y.jmp.size();

    // max |xv - y(t)| over [u, v), closed at v when v == T.
    auto seg_mismatch = [&](double xv, double u, double v, bool close_end) {
        double m = 0.0;
        for (std::size_t j = 0; j <= q; ++j) {
            const double s = j == 0 ? 0.0 : Y.jmp[j - 1];
            const double e = j == q ? kInf : Y.jmp[j];
            const bool overlaps = (s < v || (close_end && s <= v)) && e > u;
            if (overlaps) m = std::max(m, std::fabs(xv - Y.vals[j]));
        }
        return m;
    };

    if (p == 0) return seg_mismatch(X.vals[0], 0.0, T, true);

    std::vector<double> slots;
    for (std::size_t r = 0;; ++r) {
        const double g = (static_cast<double>(r) + 0.5) * grid_step;
        if (g >= T) break;
        slots.push_back(g);
    }
    for (double b : Y.jmp)
        if (b < T) slots.push_back(b);
    for (double a : X.jmp) slots.push_back(a);
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
    const std::size_t S = slots.size();

    std::vector<double> dp(S), ndp(S);
    for (std::size_t s = 0; s < S; ++s)
        dp[s] = std::max(seg_mismatch(X.vals[0], 0.0, slots[s], false),
                         std::fabs(slots[s] - X.jmp[0]));
    for (std::size_t k = 1; k < p; ++k) {
        std::fill(ndp.begin(), ndp.end(), kInf);
        for (std::size_t s2 = 0; s2 < S; ++s2) {
            const double place = std::fabs(slots[s2] - X.jmp[k]);
            double best = kInf;
            for (std::size_t s1 = 0; s1 < s2; ++s1) {
                if (dp[s1] >= best) continue;
                const double c = std::max(
                    {dp[s1], seg_mismatch(X.vals[k], slots[s1], slots[s2], false),
                     place});
                best = std::min(best, c);
            }
            ndp[s2] = best;
        }
        dp.swap(ndp);
    }
    double ans = kInf;
    for (std::size_t s = 0; s < S; ++s)
        ans = std::min(ans,
                       std::max(dp[s], seg_mismatch(X.vals[p], slots[s], T, true)));
    return ans;
}

double evaluate_time_change_cost(const CadlagPath& x, const CadlagPath& y,
                                 double T, const TimeChange& lambda) {
    if (lambda.horizon() != T)
        throw domain_error("time change horizon does not match the comparison horizon");
    const StepSeq X = extract_steps(x, T), Y = extract_steps(y, T);

    std::vector<double> crit{0.0, T};
    for (double b : Y.jmp) crit.push_back(b);
    for (const auto& [s, u] : lambda.anchors()) crit.push_back(s);
    for (double a : X.jmp) crit.push_back(lambda.inverse(a));
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

    std::vector<double> probes;
    probes.reserve(2 * crit.size());
    for (std::size_t k = 0; k < crit.size(); ++k) {
        if (crit[k] < 0.0 || crit[k] > T) continue;
        probes.push_back(crit[k]);
        if (k + 1 < crit.size())
            probes.push_back(crit[k] + 0.5 * (crit[k + 1] - crit[k]));
    }
    double value_gap = 0.0;
    for (double t : probes) {
        const double u = std::min(std::max(lambda(t), 0.0), T);
        value_gap = std::max(value_gap,
                             std::fabs(x.evaluate(u) - y.evaluate(t)));
    }
    return std::max(value_gap, lambda.max_displacement());
}

ConvergenceReport classify_convergence(const std::vector<StepIncreasing>& seq,
                                       const StepIncreasing& candidate,
                                       double T, double tol) {
    if (seq.size() < 3)
        throw domain_error("classification needs at least three levels");
    ConvergenceReport rep;
    rep.tol = tol;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        rep.levels.push_back(static_cast<int>(k));
        rep.uniform_distances.push_back(
            uniform_distance(seq[k].path(), candidate.path(), T));
        rep.distances.push_back(
            j1_distance_compact(seq[k].path(), candidate.path(), T).distance);
    }
    if (gaps_converged(rep.uniform_distances, tol))
        rep.mode = ConvergenceMode::uniform;
    else if (gaps_converged(rep.distances, tol))
        rep.mode = ConvergenceMode::j1;
    else
        rep.mode = ConvergenceMode::divergent;
    return rep;
}

ConvergenceMode classify_convergence_mode(const std::vector<StepIncreasing>& seq,
                                          const StepIncreasing& candidate,
                                          double T, double tol) {
    return classify_convergence(seq, candidate, T, tol).mode;
}

std::string one_sided_case_name(OneSidedCase c) {
    switch (c) {
        case OneSidedCase::le_left_limit: return "le-left-limit";
        case OneSidedCase::lt_value: return "lt-value";
        case OneSidedCase::ge_value: return "ge-value";
        case OneSidedCase::gt_left_limit: return "gt-left-limit";
    }
    throw domain_error("unknown one-sided case");
}

FunctionalLimitReport functional_limit(
    const std::function<double(const StepIncreasing&)>& F,
    const std::vector<StepIncreasing>& seq, const StepIncreasing& candidate) {
    if (!F) throw domain_error("functional must be callable");
    FunctionalLimitReport rep;
    rep.candidate_value = F(candidate);
    for (const auto& f : seq) {
        rep.values.push_back(F(f));
        rep.gaps.push_back(std::fabs(rep.values.back() - rep.candidate_value));
    }
    return rep;
}

}  // namespace cadlag
