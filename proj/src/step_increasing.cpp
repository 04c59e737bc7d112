#include "cadlagqv/step_increasing.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "cadlagqv/errors.hpp"

namespace cadlag {

StepIncreasing::StepIncreasing(CadlagPath path) : path_(std::move(path)) {
    const auto& vs = path_.values();
    if (vs.front() < 0.0)
        throw domain_error("step function must be non-negative, value at 0 is " +
                           std::to_string(vs.front()));
    for (std::size_t k = 1; k < vs.size(); ++k) {
        if (vs[k] < vs[k - 1])
            throw domain_error("step function must be non-decreasing, drops at knot " +
                               std::to_string(path_.times()[k]));
    }
}

StepIncreasing StepIncreasing::from_measure(const DiscreteMeasure& m,
                                            double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw domain_error("horizon must be positive and finite");
    if (!m.empty() && m.atoms().back().first > horizon)
        throw domain_error("measure has an atom beyond the horizon");
    std::vector<double> times{0.0};
    std::vector<double> values{m.mass_at(0.0)};
    for (const auto& [t, mass] : m.atoms()) {
        if (t == 0.0) continue;  // folded into the value at 0
        times.push_back(t);
        values.push_back(values.back());
        times.push_back(t);
        values.push_back(values.back() + mass);
    }
    return StepIncreasing(CadlagPath(std::move(times), std::move(values), horizon));
}

double StepIncreasing::left_value(double t) const {
    if (t == 0.0) return 0.0;
    return path_.left_limit(t);
}

DiscreteMeasure StepIncreasing::measure() const {
    std::vector<std::pair<double, double>> atoms;
    const double at_zero = value_at_zero();
    if (at_zero > 0.0) atoms.emplace_back(0.0, at_zero);
    for (const auto& [t, size] : path_.jumps_up_to(horizon()))
        atoms.emplace_back(t, size);
    return DiscreteMeasure(std::move(atoms));
}

}  // namespace cadlag
