#include "cadlagqv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cadlagqv/convergence.hpp"
#include "cadlagqv/errors.hpp"

namespace cadlag {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<std::pair<double, double>> atoms)
    : atoms_(std::move(atoms)) {
    for (const auto& [t, m] : atoms_) {
        if (!std::isfinite(t) || t < 0.0)
            throw domain_error("measure atom time must be finite and >= 0, got " + fmt(t));
        if (!std::isfinite(m) || m < 0.0)
            throw domain_error("measure atom mass must be finite and >= 0, got " + fmt(m) +
                               " at t=" + fmt(t));
    }
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<double, double>> merged;
    merged.reserve(atoms_.size());
    for (const auto& [t, m] : atoms_) {
        if (!merged.empty() && merged.back().first == t)
            merged.back().second += m;
        else
            merged.emplace_back(t, m);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& a) { return a.second == 0.0; }),
                 merged.end());
    atoms_ = std::move(merged);
}

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.second;
    return s;
}

double DiscreteMeasure::mass_at(double t) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), t,
                               [](const auto& a, double v) { return a.first < v; });
    if (it != atoms_.end() && it->first == t) return it->second;
    return 0.0;
}

double DiscreteMeasure::mass_up_to(double T) const {
    double s = 0.0;
    for (const auto& [t, m] : atoms_) {
        if (t > T) break;
        s += m;
    }
    return s;
}

TestFunction::TestFunction(std::function<double(double)> f, double support_bound,
                           std::string name)
    : f_(std::move(f)), support_bound_(support_bound), name_(std::move(name)) {
    if (!f_) throw domain_error("test function needs a callable");
    if (!(support_bound_ > 0.0) || !std::isfinite(support_bound_))
        throw domain_error("test function support bound must be positive and finite");
    for (int k = 0; k <= 256; ++k) {
        const double t = support_bound_ * static_cast<double>(k) / 256.0;
        if (!std::isfinite(f_(t)))
            throw domain_error("test function '" + name_ +
                               "' is not finite at t=" + fmt(t));
    }
}

double TestFunction::operator()(double t) const {
    if (t < 0.0 || t > support_bound_) return 0.0;
    return f_(t);
}

double integrate(const TestFunction& f, const DiscreteMeasure& m) {
    double s = 0.0;
    for (const auto& [t, mass] : m.atoms()) {
        if (t > f.support_bound()) break;
        s += f(t) * mass;
    }
    return s;
}

std::pair<TestFunction, TestFunction> taper_extensions(const TestFunction& f,
                                                       double T, double eps) {
    if (!(eps > 0.0)) throw domain_error("taper width must be positive");
    if (!(T > 0.0)) throw domain_error("taper horizon must be positive");
    for (int k = 0; k <= 1000; ++k) {
        const double t = T * static_cast<double>(k) / 1000.0;
        if (f(t) < 0.0)
            throw domain_error("taper extensions need f >= 0 on [0, T]; '" + f.name() +
                               "' is negative at t=" + fmt(t));
    }

    TestFunction upper(
        [f, T, eps](double t) {
            if (t <= T) return f(t);
            return f(T) * (1.0 + (T - t) / eps);
        },
        T + eps, f.name() + "+taper");
    TestFunction lower(
        [f, T, eps](double t) {
            if (t <= T - eps) return f(t);
            return f(t) * (T - t) / eps;
        },
        T, f.name() + "-taper");

    // The sandwich 0 <= lower <= f 1_[0,T] <= upper is what the convergence
    // checks lean on; verify it on samples before handing the pair out.
    for (int k = 0; k <= 1000; ++k) {
        const double t = (T + eps) * static_cast<double>(k) / 1000.0;
        const double mid = t <= T ? f(t) : 0.0;
        const double lo = lower(t);
        const double up = upper(t);
        const double slack = 1e-12 * (1.0 + std::fabs(mid));
        if (lo < -slack || lo > mid + slack || mid > up + slack)
            throw internal_consistency_error("taper sandwich violated at t=" + fmt(t));
    }
    return {upper, lower};
}

namespace {

MeasureConvergenceReport::PerFunction check_one(
    const std::vector<DiscreteMeasure>& seq, double target_value,
    const std::function<double(const DiscreteMeasure&)>& integral,
    const std::string& name, double tol) {
    MeasureConvergenceReport::PerFunction pf;
    pf.name = name;
    pf.gaps.reserve(seq.size());
    for (const auto& m : seq)
        pf.gaps.push_back(std::fabs(integral(m) - target_value));
    pf.pass = gaps_converged(pf.gaps, tol);
    return pf;
}

}  // namespace

MeasureConvergenceReport vague_convergence_check(
    const std::vector<DiscreteMeasure>& seq, const DiscreteMeasure& target,
    const std::vector<TestFunction>& fns, double tol) {
    if (seq.size() < 3)
        throw domain_error("convergence check needs at least 3 measures, got " +
                           std::to_string(seq.size()));
    MeasureConvergenceReport rep;
    rep.pass = true;
    for (const auto& f : fns) {
        auto pf = check_one(
            seq, integrate(f, target),
            [&f](const DiscreteMeasure& m) { return integrate(f, m); }, f.name(), tol);
        rep.pass = rep.pass && pf.pass;
        rep.functions.push_back(std::move(pf));
    }
    return rep;
}

MeasureConvergenceReport weak_convergence_check(
    const std::vector<DiscreteMeasure>& seq, const DiscreteMeasure& target,
    double T, const std::vector<TestFunction>& fns, double tol, double eps) {
    if (seq.size() < 3)
        throw domain_error("convergence check needs at least 3 measures, got " +
                           std::to_string(seq.size()));
    if (!(T > 0.0)) throw domain_error("weak comparison horizon must be positive");
    if (target.mass_at(T) > 0.0)
        throw domain_error("weak comparison horizon t=" + fmt(T) +
                           " carries an atom of the target (mass " +
                           fmt(target.mass_at(T)) + "); pick a horizon off the atom set");
    if (eps <= 0.0) eps = T / 20.0;

    const auto restricted = [T](const TestFunction& f, const DiscreteMeasure& m) {
        double s = 0.0;
        for (const auto& [t, mass] : m.atoms()) {
            if (t > T) break;
            s += f(t) * mass;
        }
        return s;
    };

    MeasureConvergenceReport rep;
    rep.pass = true;
    for (const auto& f : fns) {
        auto pf = check_one(
            seq, restricted(f, target),
            [&](const DiscreteMeasure& m) { return restricted(f, m); }, f.name(), tol);

        bool tapered = true;
        try {
            auto [upper, lower] = taper_extensions(f, T, eps);
            for (std::size_t k = 0; k < seq.size(); ++k) {
                const double lo = integrate(lower, seq[k]);
                const double up = integrate(upper, seq[k]);
                const double mid = restricted(f, seq[k]);
                const double slack = 1e-9 * (1.0 + std::fabs(mid));
                if (lo > mid + slack || mid > up + slack)
                    throw internal_consistency_error(
                        "tapered sandwich bounds disagree with the restricted integral at level " +
                        std::to_string(k));
                pf.lower_bounds.push_back(lo);
                pf.upper_bounds.push_back(up);
            }
        } catch (const domain_error&) {
            tapered = false;  // f dips negative: sandwich bounds undefined
        }
        if (!tapered) {
            pf.lower_bounds.clear();
            pf.upper_bounds.clear();
        }
        rep.pass = rep.pass && pf.pass;
        rep.functions.push_back(std::move(pf));
    }
    return rep;
}

std::vector<TestFunction> default_test_battery(double T) {
    if (!(T > 0.0)) throw domain_error("battery horizon must be positive");
    std::vector<TestFunction> fns;
    const double w = T / 8.0;
    for (int k = 1; k <= 7; ++k) {
        const double c = T * static_cast<double>(k) / 8.0;
        fns.emplace_back(
            [c, w](double t) { return std::max(0.0, 1.0 - std::fabs(t - c) / w); },
            c + w, "hat@" + std::to_string(k) + "/8");
    }
    fns.emplace_back([T](double t) { return std::max(0.0, 1.0 - t / T); }, T, "ramp");
    TestFunction one([](double) { return 1.0; }, T, "one");
    fns.push_back(taper_extensions(one, T, T / 10.0).first);
    return fns;
}

}  // namespace cadlag
