#include "cadlagqv/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cadlagqv/errors.hpp"

namespace cadlag {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Hard cap on generated partition size; level requests past it are config
// errors, not allocation attempts.
constexpr double kMaxGeneratedPoints = 2.0e7;

}  // namespace

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2)
        throw domain_error("partition needs at least two points");
    if (points_.front() != 0.0)
        throw domain_error("partition must start at 0, got " + fmt(points_.front()));
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]))
            throw domain_error("partition points must be finite");
        if (!(points_[i] > points_[i - 1]))
            throw domain_error("partition points must be strictly increasing (index " +
                               std::to_string(i) + ")");
    }
}

double Partition::mesh(double T) const {
    if (!(T >= 0.0) || T > horizon())
        throw domain_error("mesh query time " + fmt(T) + " outside [0, " + fmt(horizon()) + "]");
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < points_.size() && points_[i] <= T; ++i)
        m = std::max(m, points_[i + 1] - points_[i]);
    return m;
}

bool Partition::contains(double t) const {
    return std::binary_search(points_.begin(), points_.end(), t);
}

std::size_t Partition::index_at_or_before(double t) const {
    if (!(t >= 0.0))
        throw domain_error("query time must be >= 0, got " + fmt(t));
    auto it = std::upper_bound(points_.begin(), points_.end(), t);
    return static_cast<std::size_t>(it - points_.begin()) - 1;
}

double Partition::last_at_or_before(double t) const {
    return points_[index_at_or_before(t)];
}

double Partition::last_strictly_before(double t) const {
    if (!(t > 0.0))
        throw domain_error("last_strictly_before needs t > 0, got " + fmt(t));
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    return *(it - 1);
}

double Partition::successor(double t_i) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t_i);
    if (it == points_.end() || *it != t_i)
        throw domain_error("successor of " + fmt(t_i) + ", which is not a partition point");
    if (it + 1 == points_.end())
        return *it;
    return *(it + 1);
}

PartitionScheme::PartitionScheme(Kind kind, double horizon, std::vector<Partition> levels)
    : kind_(kind), horizon_(horizon), levels_(std::move(levels)) {}

PartitionScheme PartitionScheme::dyadic(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw domain_error("scheme horizon must be positive and finite");
    return PartitionScheme(Kind::dyadic, horizon, {});
}

PartitionScheme PartitionScheme::uniform(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw domain_error("scheme horizon must be positive and finite");
    return PartitionScheme(Kind::uniform, horizon, {});
}

PartitionScheme PartitionScheme::from_levels(std::vector<Partition> levels) {
    if (levels.empty())
        throw domain_error("explicit scheme needs at least one level");
    const double h = levels.front().horizon();
    for (std::size_t n = 0; n < levels.size(); ++n) {
        if (levels[n].horizon() != h)
            throw domain_error("explicit level " + std::to_string(n) +
                               " ends at " + fmt(levels[n].horizon()) +
                               ", expected the common horizon " + fmt(h));
        if (n > 0 && levels[n].mesh() > levels[n - 1].mesh())
            throw domain_error("explicit level " + std::to_string(n) +
                               " has a larger mesh than the previous level");
    }
    return PartitionScheme(Kind::explicit_list, h, std::move(levels));
}

Partition PartitionScheme::generate(int level) const {
    if (level < 0)
        throw domain_error("partition level must be >= 0");
    switch (kind_) {
    case Kind::explicit_list:
        if (static_cast<std::size_t>(level) >= levels_.size())
            throw domain_error("explicit scheme has no level " + std::to_string(level) +
                               " (provided " + std::to_string(levels_.size()) + ")");
        return levels_[static_cast<std::size_t>(level)];
    case Kind::dyadic: {
        if (level > 60)
            throw domain_error("dyadic level " + std::to_string(level) + " too fine");
        const double step = std::ldexp(1.0, -level);
        // Largest k with k * step <= horizon, adjusted so the comparison is
        // done in the same arithmetic the points will use.
        double kd = std::floor(horizon_ / step);
        while ((kd + 1.0) * step <= horizon_) kd += 1.0;
        while (kd > 0.0 && kd * step > horizon_) kd -= 1.0;
        if (kd + 2.0 > kMaxGeneratedPoints)
            throw domain_error("dyadic level " + std::to_string(level) +
                               " would generate too many points");
        const std::size_t k_max = static_cast<std::size_t>(kd);
        std::vector<double> pts;
        pts.reserve(k_max + 2);
        for (std::size_t k = 0; k <= k_max; ++k)
            pts.push_back(static_cast<double>(k) * step);
        if (pts.back() < horizon_)
            pts.push_back(horizon_);
        return Partition(std::move(pts));
    }
    case Kind::uniform: {
        const double cells = static_cast<double>(level) + 1.0;
        if (cells + 2.0 > kMaxGeneratedPoints)
            throw domain_error("uniform level " + std::to_string(level) +
                               " would generate too many points");
        const std::size_t n_cells = static_cast<std::size_t>(level) + 1;
        std::vector<double> pts;
        pts.reserve(n_cells + 1);
        for (std::size_t k = 0; k < n_cells; ++k)
            pts.push_back((static_cast<double>(k) * horizon_) / cells);
        pts.push_back(horizon_);
        return Partition(std::move(pts));
    }
    }
    throw internal_consistency_error("unhandled scheme kind");
}

std::string PartitionScheme::kind_name() const {
    switch (kind_) {
    case Kind::dyadic: return "dyadic";
    case Kind::uniform: return "uniform";
    case Kind::explicit_list: return "explicit";
    }
    return "?";
}

int PartitionScheme::max_level() const {
    if (kind_ == Kind::explicit_list)
        return static_cast<int>(levels_.size()) - 1;
    if (kind_ == Kind::uniform)
        return static_cast<int>(kMaxGeneratedPoints) - 3;
    int n = 0;
    while (n < 60 && horizon_ * std::ldexp(1.0, n + 1) + 2.0 <= kMaxGeneratedPoints)
        ++n;
    return n;
}

}  // namespace cadlag
