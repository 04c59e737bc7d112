#pragma once

#include <stdexcept>
#include <string>

namespace cadlag {

// Precondition or configuration problem: the caller asked for something the
// operation does not define (bad level range, time outside the horizon, ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed external input (CSV rows out of order, triple-repeated times, ...).
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// Two internally computed routes to the same quantity disagreed beyond
// floating-point slack.  Indicates a bug, never bad user input.
class internal_consistency_error : public std::logic_error {
public:
    explicit internal_consistency_error(const std::string& what) : std::logic_error(what) {}
};

// A candidate quadratic-variation limit has an atom that cannot be explained
// by any declared jump of the underlying path (or a declared jump is missing
// from the limit).  Carries the offending time and the mass mismatch.
class condition_l_error : public std::runtime_error {
public:
    condition_l_error(double time, double mass, double expected, const std::string& what)
        : std::runtime_error(what), time_(time), mass_(mass), expected_(expected) {}

    double time() const { return time_; }
    double mass() const { return mass_; }
    double expected() const { return expected_; }

private:
    double time_;
    double mass_;
    double expected_;
};

}  // namespace cadlag
