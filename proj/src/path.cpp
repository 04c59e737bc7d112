#include "cadlagqv/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cadlag {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

CadlagPath::CadlagPath(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty()) throw format_error("path needs at least one knot");
    horizon_ = times_.back();
    validate_and_index();
}

CadlagPath::CadlagPath(std::vector<double> times, std::vector<double> values, double horizon)
    : times_(std::move(times)), values_(std::move(values)), horizon_(horizon) {
    validate_and_index();
}

void CadlagPath::validate_and_index() {
    if (times_.size() != values_.size())
        throw format_error("knot times and values differ in length");
    if (times_.empty()) throw format_error("path needs at least one knot");
    if (times_.front() != 0.0)
        throw format_error("first knot must sit at t=0, got t=" + fmt(times_.front()));
    if (!(horizon_ >= times_.back()))
        throw format_error("horizon " + fmt(horizon_) + " precedes last knot " + fmt(times_.back()));
    if (!(horizon_ > 0.0)) throw format_error("horizon must be positive");

    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        if (!(times_[i] <= times_[i + 1]))
            throw format_error("knot times out of order near t=" + fmt(times_[i + 1]));
        if (times_[i] == times_[i + 1]) {
            if (i + 2 < times_.size() && times_[i + 2] == times_[i])
                throw format_error("time " + fmt(times_[i]) + " appears more than twice");
            if (times_[i] == 0.0)
                throw format_error("a jump at t=0 is not representable (x(0-) := x(0))");
            if (i == 0 || values_[i] != values_[i - 1])
                throw format_error("left-limit knot at t=" + fmt(times_[i]) +
                                   " disagrees with the preceding value");
        }
    }

    // Drop degenerate duplicates (equal values: no jump) and index real ones.
    std::vector<double> t2, v2;
    t2.reserve(times_.size());
    v2.reserve(values_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (i + 1 < times_.size() && times_[i] == times_[i + 1]) {
            if (values_[i] == values_[i + 1]) continue;  // degenerate duplicate
            jumps_.emplace_back(times_[i], values_[i + 1] - values_[i]);
        }
        t2.push_back(times_[i]);
        v2.push_back(values_[i]);
    }
    times_ = std::move(t2);
    values_ = std::move(v2);
}

CadlagPath CadlagPath::constant(double value, double horizon) {
    return CadlagPath({0.0}, {value}, horizon);
}

CadlagPath CadlagPath::single_jump(double before, double after, double t0, double horizon) {
    if (!(t0 > 0.0 && t0 <= horizon))
        throw domain_error("jump time must lie in (0, horizon]");
    return CadlagPath({0.0, t0, t0}, {before, before, after}, horizon);
}

double CadlagPath::evaluate(double t) const {
    if (std::isnan(t) || t < 0.0 || t > horizon_)
        throw domain_error("evaluate: t=" + fmt(t) + " outside [0, " + fmt(horizon_) + "]");
    // Last knot with time <= t; duplicated times resolve to the post-jump value.
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double CadlagPath::evaluate_clamped(double t) const {
    return evaluate(std::min(t, horizon_));
}

double CadlagPath::left_limit(double t) const {
    if (std::isnan(t) || t <= 0.0 || t > horizon_)
        throw domain_error("left_limit: t=" + fmt(t) + " outside (0, " + fmt(horizon_) + "]");
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double CadlagPath::jump_at(double t) const {
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                               [](const auto& j, double s) { return j.first < s; });
    if (it != jumps_.end() && it->first == t) return it->second;
    return 0.0;
}

std::vector<std::pair<double, double>> CadlagPath::jumps_up_to(double t) const {
    std::vector<std::pair<double, double>> out;
    for (const auto& j : jumps_) {
        if (j.first > t) break;
        out.push_back(j);
    }
    return out;
}

std::vector<double> CadlagPath::jump_times() const {
    std::vector<double> out;
    out.reserve(jumps_.size());
    for (const auto& j : jumps_) out.push_back(j.first);
    return out;
}

CadlagPath pointwise_combine(const CadlagPath& a, const CadlagPath& b, double wa, double wb) {
    if (a.horizon() != b.horizon())
        throw domain_error("pointwise_combine: horizons differ");

    std::vector<double> grid;
    grid.reserve(a.times().size() + b.times().size());
    std::merge(a.times().begin(), a.times().end(), b.times().begin(), b.times().end(),
               std::back_inserter(grid));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> times, values;
    times.reserve(2 * grid.size());
    values.reserve(2 * grid.size());
    for (double t : grid) {
        const double right = wa * a.evaluate(t) + wb * b.evaluate(t);
        if (t > 0.0) {
            const double left = wa * a.left_limit(t) + wb * b.left_limit(t);
            if (left != right) {
                times.push_back(t);
                values.push_back(left);
            }
        }
        times.push_back(t);
        values.push_back(right);
    }
    return CadlagPath(std::move(times), std::move(values), a.horizon());
}

VectorCadlagPath::VectorCadlagPath(std::vector<CadlagPath> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw domain_error("vector path needs at least one component");
    for (const auto& c : components_)
        if (c.horizon() != components_.front().horizon())
            throw domain_error("vector path components must share one horizon");
}

std::vector<double> VectorCadlagPath::jump_times() const {
    std::vector<double> out;
    for (const auto& c : components_) {
        auto jt = c.jump_times();
        out.insert(out.end(), jt.begin(), jt.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace cadlag
