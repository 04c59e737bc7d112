#include "cadlagqv/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>

#include "cadlagqv/errors.hpp"

namespace cadlag {

namespace {

void require_covering(const CadlagPath& x, const Partition& p) {
    if (p.horizon() < x.horizon())
        throw domain_error("partition must reach the path horizon");
}

void require_in_domain(double t, double horizon) {
    if (!(t >= 0.0) || t > horizon)
        throw domain_error("time outside [0, horizon]");
}

}  // namespace

SmoothFunction::SmoothFunction(Handle f, Handle df, Handle d2f) {
    if (!f || !df || !d2f) throw domain_error("smooth function needs all three handles");

    // Central differences on a fixed probe grid. The first-derivative check
    // is tight; the second tolerates the cancellation noise of second
    // differences at this step size.
    const double h = 1e-5;
    for (int k = -8; k <= 8; ++k) {
        const double v = 0.25 * static_cast<double>(k);
        const double fd1 = (f(v + h) - f(v - h)) / (2.0 * h);
        const double fd2 = (f(v + h) - 2.0 * f(v) + f(v - h)) / (h * h);
        if (std::fabs(fd1 - df(v)) > 1e-5 * std::max(1.0, std::fabs(df(v)))) {
            std::ostringstream msg;
            msg << "first derivative disagrees with finite differences at v = " << v;
            throw domain_error(msg.str());
        }
        if (std::fabs(fd2 - d2f(v)) > 1e-3 * std::max(1.0, std::fabs(d2f(v)))) {
            std::ostringstream msg;
            msg << "second derivative disagrees with finite differences at v = " << v;
            throw domain_error(msg.str());
        }
    }
    f_ = std::move(f);
    df_ = std::move(df);
    d2f_ = std::move(d2f);
}

SmoothFunction SmoothFunction::polynomial(std::vector<double> coefficients) {
    if (coefficients.empty()) coefficients.push_back(0.0);

    const auto derive = [](const std::vector<double>& c) {
        std::vector<double> d;
        for (std::size_t i = 1; i < c.size(); ++i)
            d.push_back(static_cast<double>(i) * c[i]);
        if (d.empty()) d.push_back(0.0);
        return d;
    };
    const auto horner = [](std::vector<double> c) {
        return [c = std::move(c)](double v) {
            double acc = 0.0;
            for (std::size_t i = c.size(); i-- > 0;) acc = acc * v + c[i];
            return acc;
        };
    };

    std::vector<double> d1c = derive(coefficients);
    std::vector<double> d2c = derive(d1c);

    SmoothFunction out;
    out.f_ = horner(std::move(coefficients));
    out.df_ = horner(std::move(d1c));
    out.d2f_ = horner(std::move(d2c));
    return out;
}

double follmer_integral(const std::function<double(double)>& g,
                        const CadlagPath& x, const Partition& p, double t) {
    require_covering(x, p);
    require_in_domain(t, x.horizon());
    const auto& pts = p.points();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size() && pts[i] <= t; ++i) {
        const double left = x.evaluate_clamped(pts[i]);
        const double inc = x.evaluate_clamped(pts[i + 1]) - left;
        if (inc != 0.0) sum += g(left) * inc;
    }
    return sum;
}

StieltjesResult stieltjes_integral(const std::function<double(double)>& h,
                                   const CadlagPath& x,
                                   const StepIncreasing& a, double t) {
    require_in_domain(t, a.horizon());

    StieltjesResult out;
    double sup_slope = 0.0;
    double mesh = 0.0;
    double prev = 0.0;
    const auto slope_at = [&](double s) {
        const double v = x.evaluate_clamped(s);
        const double step = 1e-6 * std::max(1.0, std::fabs(v));
        return std::fabs(h(v + step) - h(v - step)) / (2.0 * step);
    };

    sup_slope = slope_at(0.0);
    for (const auto& [s, mass] : a.path().jumps_up_to(t)) {
        out.value += h(x.evaluate_clamped(s)) * mass;
        sup_slope = std::max(sup_slope, slope_at(s));
        mesh = std::max(mesh, s - prev);
        prev = s;
    }
    mesh = std::max(mesh, t - prev);
    sup_slope = std::max(sup_slope, slope_at(t));
    out.error_bound = sup_slope * mesh * a(t);
    return out;
}

double jump_compensator(const SmoothFunction& f, const CadlagPath& x,
                        double t) {
    require_in_domain(t, x.horizon());
    double sum = 0.0;
    for (const auto& [s, size] : x.jumps()) {
        if (s > t) break;
        const double right = x.evaluate(s);
        const double left = x.left_limit(s);
        sum += f(right) - f(left) - f.d1(left) * size;
    }
    return sum;
}

double ito_residual(const SmoothFunction& f, const CadlagPath& x,
                    const PartitionScheme& scheme, int level, double t) {
    const Partition p = scheme.generate(level);
    require_covering(x, p);
    require_in_domain(t, x.horizon());
    const auto& pts = p.points();
    const auto& jumps = x.jumps();

    double follmer = 0.0;
    double stieltjes = 0.0;
    std::size_t jn = 0;
    for (std::size_t i = 0; i + 1 < pts.size() && pts[i] < t; ++i) {
        const double left = x.evaluate_clamped(pts[i]);
        const double inc = x.evaluate_clamped(pts[i + 1]) - left;
        // Squared declared jumps covered by this cell and not past t leave
        // the continuous stand-in; they return through the compensator.
        double cell_jump_sq = 0.0;
        for (; jn < jumps.size() && jumps[jn].first <= pts[i + 1]; ++jn) {
            if (jumps[jn].first > t) continue;
            cell_jump_sq += jumps[jn].second * jumps[jn].second;
        }
        follmer += f.d1(left) * inc;
        stieltjes += f.d2(left) * (inc * inc - cell_jump_sq);
    }

    return f(x.evaluate(t)) - f(x.evaluate(0.0)) - follmer - 0.5 * stieltjes -
           jump_compensator(f, x, t);
}

}  // namespace cadlag
