#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cadlag {

// A finite partition 0 = t_0 < t_1 < ... < t_k of [0, t_k].
//
// Boundary conventions relied on throughout the library:
//   - last_at_or_before(t) is defined for every t >= 0 because t_0 = 0;
//     there is never an "empty" answer.
//   - successor(last point) == last point, so the increment that would start
//     at the final point is empty rather than an error.
//
// Membership tests use exact double equality. The generators in
// PartitionScheme emit bit-exact dyadic multiples, so whether a query time
// lies on a generated grid never depends on rounding.
class Partition {
public:
    explicit Partition(std::vector<double> points);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double horizon() const { return points_.back(); }

    // Max spacing among the intervals [t_i, t_{i+1}] that intersect [0, T],
    // i.e. those with t_i <= T.
    double mesh(double T) const;
    double mesh() const { return mesh(horizon()); }

    bool contains(double t) const;

    // Largest t_i <= t. For t >= horizon this is the last point.
    double last_at_or_before(double t) const;
    // Largest t_i < t (requires t > 0). Equals 0 whenever t <= t_1.
    double last_strictly_before(double t) const;
    // Next point after t_i, which must be a member; the last point maps to
    // itself.
    double successor(double t_i) const;

    // Index of last_at_or_before(t); the sum kernels iterate with this.
    std::size_t index_at_or_before(double t) const;

private:
    std::vector<double> points_;
};

// Generator of partition sequences whose mesh shrinks to zero on [0, horizon].
//
//   dyadic(h):   level n has points k * 2^-n (exact doubles), plus h itself
//                when h is not a multiple of 2^-n.
//   uniform(h):  level n splits [0, h] into n + 1 equal cells.
//   from_levels: explicit user-supplied levels, validated to share one
//                horizon and to have non-increasing mesh.
class PartitionScheme {
public:
    enum class Kind { dyadic, uniform, explicit_list };

    static PartitionScheme dyadic(double horizon);
    static PartitionScheme uniform(double horizon);
    static PartitionScheme from_levels(std::vector<Partition> levels);

    Partition generate(int level) const;

    Kind kind() const { return kind_; }
    std::string kind_name() const;
    double horizon() const { return horizon_; }

    // Largest level generate() accepts: bounded by the point-count cap for
    // generated schemes and by the list length for explicit ones.
    int max_level() const;

private:
    PartitionScheme(Kind kind, double horizon, std::vector<Partition> levels);

    Kind kind_;
    double horizon_;
    std::vector<Partition> levels_;
};

}  // namespace cadlag
