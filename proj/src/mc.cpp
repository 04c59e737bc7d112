#include "cadlagqv/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "cadlagqv/errors.hpp"
#include "cadlagqv/multidim.hpp"
#include "cadlagqv/parallel.hpp"
#include "cadlagqv/qv.hpp"
#include "cadlagqv/skorokhod.hpp"
#include "cadlagqv/step_increasing.hpp"

namespace cadlag {

namespace {

void require_model_params(double sigma, double lambda, double horizon,
                          std::size_t resolution) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw domain_error("sigma must be finite and non-negative");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw domain_error("lambda must be finite and non-negative");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw domain_error("horizon must be finite and positive");
    if (resolution < 2) throw domain_error("resolution must be at least 2");
}

bool grid_based(ProcessModel::Kind k) {
    return k == ProcessModel::Kind::brownian ||
           k == ProcessModel::Kind::jump_diffusion ||
           k == ProcessModel::Kind::white_noise;
}

// Shared precondition of the ensemble operations.
void require_ensemble(const Ensemble& e, const PartitionScheme& scheme,
                      int level_lo, int level_hi, double eps,
                      std::size_t min_levels) {
    if (e.paths == 0) throw domain_error("ensemble needs at least one path");
    if (level_hi < level_lo ||
        static_cast<std::size_t>(level_hi - level_lo) + 1 < min_levels)
        throw domain_error("level range too short");
    if (!(eps > 0.0)) throw domain_error("eps must be positive");
    if (scheme.horizon() < e.model.horizon)
        throw domain_error("partition scheme must reach the model horizon");
    if (grid_based(e.model.kind)) {
        const double dt = e.model.horizon /
                          static_cast<double>(e.model.resolution);
        if (4.0 * dt > scheme.generate(level_hi).mesh())
            throw domain_error(
                "model resolution must be at least 4x finer than the finest "
                "partition level");
    }
}

// Fraction decay rule, the ensemble mirror of the deterministic stopping
// rule: last min(3, size) entries non-increasing and the final one <= delta.
bool fractions_decayed(const std::vector<double>& fr, double delta) {
    if (fr.empty()) return false;
    const std::size_t tail = std::min<std::size_t>(3, fr.size());
    for (std::size_t k = fr.size() - tail; k + 1 < fr.size(); ++k)
        if (fr[k] < fr[k + 1]) return false;
    return fr.back() <= delta;
}

std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<std::pair<double, double>> draw_jumps(const ProcessModel& m,
                                                  std::mt19937_64& rng) {
    std::vector<std::pair<double, double>> jumps;
    if (m.lambda == 0.0) return jumps;
    std::exponential_distribution<double> gap(m.lambda);
    double t = gap(rng);
    while (t < m.horizon) {
        if (t <= 0.0) {  // exact-zero draw; a jump at 0 is not a cadlag jump
            t += gap(rng);
            continue;
        }
        const double size = m.kind == ProcessModel::Kind::poisson
                                ? m.jump_size
                                : m.sampler(rng);
        // Arrivals are strictly increasing in reals; if rounding ever lands
        // two on one double, merge them into a single jump.
        if (!jumps.empty() && t <= jumps.back().first)
            jumps.back().second += size;
        else
            jumps.emplace_back(t, size);
        t += gap(rng);
    }
    return jumps;
}

std::vector<double> grid_times(double horizon, std::size_t resolution) {
    std::vector<double> times(resolution + 1);
    for (std::size_t k = 0; k <= resolution; ++k)
        times[k] = horizon * static_cast<double>(k) /
                   static_cast<double>(resolution);
    return times;
}

CadlagPath pure_jump_path(const std::vector<std::pair<double, double>>& jumps,
                          double horizon) {
    std::vector<double> times{0.0};
    std::vector<double> values{0.0};
    double cum = 0.0;
    for (const auto& [u, size] : jumps) {
        times.push_back(u);
        values.push_back(cum);
        cum += size;
        times.push_back(u);
        values.push_back(cum);
    }
    return CadlagPath(std::move(times), std::move(values), horizon);
}

}  // namespace

ProcessModel ProcessModel::brownian(double sigma, double horizon,
                                    std::size_t resolution) {
    require_model_params(sigma, 0.0, horizon, resolution);
    ProcessModel m;
    m.kind = Kind::brownian;
    m.sigma = sigma;
    m.horizon = horizon;
    m.resolution = resolution;
    return m;
}

ProcessModel ProcessModel::poisson(double lambda, double jump,
                                   double horizon) {
    require_model_params(0.0, lambda, horizon, 2);
    if (!std::isfinite(jump)) throw domain_error("jump size must be finite");
    ProcessModel m;
    m.kind = Kind::poisson;
    m.lambda = lambda;
    m.jump_size = jump;
    m.horizon = horizon;
    return m;
}

ProcessModel ProcessModel::compound_poisson(double lambda, JumpSampler sampler,
                                            double horizon) {
    require_model_params(0.0, lambda, horizon, 2);
    if (!sampler) throw domain_error("compound model needs a jump sampler");
    ProcessModel m;
    m.kind = Kind::compound_poisson;
    m.lambda = lambda;
    m.sampler = std::move(sampler);
    m.horizon = horizon;
    return m;
}

ProcessModel ProcessModel::jump_diffusion(double sigma, double lambda,
                                          JumpSampler sampler, double horizon,
                                          std::size_t resolution) {
    require_model_params(sigma, lambda, horizon, resolution);
    if (!sampler) throw domain_error("jump diffusion needs a jump sampler");
    ProcessModel m;
    m.kind = Kind::jump_diffusion;
    m.sigma = sigma;
    m.lambda = lambda;
    m.sampler = std::move(sampler);
    m.horizon = horizon;
    m.resolution = resolution;
    return m;
}

ProcessModel ProcessModel::white_noise(double amplitude, double horizon,
                                       std::size_t resolution) {
    require_model_params(0.0, 0.0, horizon, resolution);
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw domain_error("amplitude must be finite and non-negative");
    ProcessModel m;
    m.kind = Kind::white_noise;
    m.amplitude = amplitude;
    m.horizon = horizon;
    m.resolution = resolution;
    return m;
}

std::uint64_t path_seed(std::uint64_t base_seed, std::size_t index) {
    std::uint64_t state =
        base_seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
    return splitmix(state);
}

CadlagPath sample_path(const ProcessModel& model, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    switch (model.kind) {
        case ProcessModel::Kind::brownian: {
            std::vector<double> times = grid_times(model.horizon, model.resolution);
            std::vector<double> values(times.size(), 0.0);
            std::normal_distribution<double> z(0.0, 1.0);
            const double step =
                model.sigma * std::sqrt(model.horizon /
                                        static_cast<double>(model.resolution));
            for (std::size_t k = 1; k < values.size(); ++k)
                values[k] = values[k - 1] + step * z(rng);
            return CadlagPath(std::move(times), std::move(values), model.horizon);
        }
        case ProcessModel::Kind::poisson:
        case ProcessModel::Kind::compound_poisson:
            return pure_jump_path(draw_jumps(model, rng), model.horizon);
        case ProcessModel::Kind::jump_diffusion: {
            // Grid normals first, then arrivals with sizes; fixed draw order
            // keeps regeneration bit-identical.
            std::vector<double> grid = grid_times(model.horizon, model.resolution);
            std::vector<double> bm(grid.size(), 0.0);
            std::normal_distribution<double> z(0.0, 1.0);
            const double step =
                model.sigma * std::sqrt(model.horizon /
                                        static_cast<double>(model.resolution));
            for (std::size_t k = 1; k < bm.size(); ++k)
                bm[k] = bm[k - 1] + step * z(rng);
            const auto jumps = draw_jumps(model, rng);

            std::vector<double> times, values;
            times.reserve(grid.size() + 2 * jumps.size());
            values.reserve(times.capacity());
            double cum = 0.0;
            std::size_t g = 0;
            for (const auto& [u, size] : jumps) {
                while (g < grid.size() && grid[g] < u) {
                    times.push_back(grid[g]);
                    values.push_back(bm[g] + cum);
                    ++g;
                }
                // A grid move landing exactly on the arrival folds into the
                // declared jump; measure-zero but must not corrupt knots.
                const double before = g > 0 ? bm[g - 1] : 0.0;
                const bool collide = g < grid.size() && grid[g] == u;
                times.push_back(u);
                values.push_back(before + cum);
                cum += size;
                times.push_back(u);
                values.push_back((collide ? bm[g] : before) + cum);
                if (collide) ++g;
            }
            for (; g < grid.size(); ++g) {
                times.push_back(grid[g]);
                values.push_back(bm[g] + cum);
            }
            return CadlagPath(std::move(times), std::move(values), model.horizon);
        }
        case ProcessModel::Kind::white_noise: {
            std::vector<double> times = grid_times(model.horizon, model.resolution);
            std::vector<double> values(times.size());
            std::uniform_real_distribution<double> u(-model.amplitude,
                                                     model.amplitude);
            for (double& v : values) v = u(rng);
            return CadlagPath(std::move(times), std::move(values), model.horizon);
        }
    }
    throw domain_error("unknown process kind");
}

CadlagPath squared_jump_target(const CadlagPath& path) {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& [u, size] : path.jumps())
        atoms.emplace_back(u, size * size);
    return detail::accumulate_step_atoms(atoms, path.horizon());
}

CadlagPath linear_target(double slope, double horizon, std::size_t cells) {
    if (cells == 0) throw domain_error("target needs at least one cell");
    std::vector<double> times = grid_times(horizon, cells);
    std::vector<double> values(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) values[k] = slope * times[k];
    return CadlagPath(std::move(times), std::move(values), horizon);
}

CauchyReport cauchy_in_probability(const Ensemble& e,
                                   const PartitionScheme& scheme,
                                   int level_lo, int level_hi, double eps,
                                   double delta, FractionMetric metric) {
    require_ensemble(e, scheme, level_lo, level_hi, eps, 2);
    if (!(delta >= 0.0)) throw domain_error("delta must be non-negative");
    const double T = e.model.horizon;
    const std::size_t pairs = static_cast<std::size_t>(level_hi - level_lo);

    std::vector<std::vector<char>> exceed(
        e.paths, std::vector<char>(pairs, 0));
    parallel_for(e.paths, [&](std::size_t i) {
        const CadlagPath x = sample_path(e.model, path_seed(e.base_seed, i));
        CadlagPath prev = q_n(x, scheme.generate(level_lo)).path();
        for (std::size_t k = 0; k < pairs; ++k) {
            CadlagPath next =
                q_n(x, scheme.generate(level_lo + static_cast<int>(k) + 1)).path();
            exceed[i][k] = metric == FractionMetric::j1
                               ? !j1_within(prev, next, T, eps)
                               : uniform_distance(prev, next, T) > eps;
            prev = std::move(next);
        }
    });

    CauchyReport rep;
    rep.eps = eps;
    rep.delta = delta;
    for (std::size_t k = 0; k < pairs; ++k) {
        rep.pair_levels.push_back(level_lo + static_cast<int>(k));
        std::size_t count = 0;
        for (std::size_t i = 0; i < e.paths; ++i) count += exceed[i][k];
        rep.fractions.push_back(static_cast<double>(count) /
                                static_cast<double>(e.paths));
    }
    rep.pass = fractions_decayed(rep.fractions, delta);
    return rep;
}

LevelFractionReport prob_convergence_estimate(const Ensemble& e,
                                              const PartitionScheme& scheme,
                                              int level_lo, int level_hi,
                                              const TargetOracle& target,
                                              double eps) {
    require_ensemble(e, scheme, level_lo, level_hi, eps, 1);
    if (!target) throw domain_error("target oracle must be callable");
    const double T = e.model.horizon;
    const std::size_t levels = static_cast<std::size_t>(level_hi - level_lo) + 1;

    std::vector<std::vector<char>> exceed(
        e.paths, std::vector<char>(levels, 0));
    parallel_for(e.paths, [&](std::size_t i) {
        const CadlagPath x = sample_path(e.model, path_seed(e.base_seed, i));
        const CadlagPath goal = target(i, x);
        for (std::size_t k = 0; k < levels; ++k) {
            const CadlagPath qn =
                q_n(x, scheme.generate(level_lo + static_cast<int>(k))).path();
            exceed[i][k] = !j1_within(qn, goal, T, eps);
        }
    });

    LevelFractionReport rep;
    rep.eps = eps;
    for (std::size_t k = 0; k < levels; ++k) {
        rep.levels.push_back(level_lo + static_cast<int>(k));
        std::size_t count = 0;
        for (std::size_t i = 0; i < e.paths; ++i) count += exceed[i][k];
        rep.fractions.push_back(static_cast<double>(count) /
                                static_cast<double>(e.paths));
    }
    return rep;
}

UcpReport ucp_vs_j1(const Ensemble& e, const PartitionScheme& scheme,
                    int level_lo, int level_hi, const TargetOracle& target,
                    double eps, double delta) {
    require_ensemble(e, scheme, level_lo, level_hi, eps, 1);
    if (!target) throw domain_error("target oracle must be callable");
    if (!(delta >= 0.0)) throw domain_error("delta must be non-negative");
    const double T = e.model.horizon;
    const std::size_t levels = static_cast<std::size_t>(level_hi - level_lo) + 1;

    std::vector<std::vector<char>> exceed_u(e.paths,
                                            std::vector<char>(levels, 0));
    std::vector<std::vector<char>> exceed_j(e.paths,
                                            std::vector<char>(levels, 0));
    parallel_for(e.paths, [&](std::size_t i) {
        const CadlagPath x = sample_path(e.model, path_seed(e.base_seed, i));
        const CadlagPath goal = target(i, x);
        for (std::size_t k = 0; k < levels; ++k) {
            const CadlagPath qn =
                q_n(x, scheme.generate(level_lo + static_cast<int>(k))).path();
            exceed_u[i][k] = uniform_distance(qn, goal, T) > eps;
            exceed_j[i][k] = !j1_within(qn, goal, T, eps);
        }
    });

    UcpReport rep;
    rep.eps = eps;
    rep.delta = delta;
    for (std::size_t k = 0; k < levels; ++k) {
        rep.levels.push_back(level_lo + static_cast<int>(k));
        std::size_t cu = 0, cj = 0;
        for (std::size_t i = 0; i < e.paths; ++i) {
            cu += exceed_u[i][k];
            cj += exceed_j[i][k];
        }
        rep.uniform_fractions.push_back(static_cast<double>(cu) /
                                        static_cast<double>(e.paths));
        rep.j1_fractions.push_back(static_cast<double>(cj) /
                                   static_cast<double>(e.paths));
    }
    rep.uniform_decays = fractions_decayed(rep.uniform_fractions, delta);
    rep.j1_decays = fractions_decayed(rep.j1_fractions, delta);
    rep.verdict = rep.uniform_decays ? "UCP"
                  : rep.j1_decays    ? "J1-only"
                                     : "neither";
    return rep;
}

std::vector<double> ensemble_mean_qv(const Ensemble& e,
                                     const PartitionScheme& scheme,
                                     int level_lo, int level_hi, double t) {
    require_ensemble(e, scheme, level_lo, level_hi, 1.0, 1);
    const std::size_t levels = static_cast<std::size_t>(level_hi - level_lo) + 1;

    std::vector<std::vector<double>> qv(e.paths,
                                        std::vector<double>(levels, 0.0));
    parallel_for(e.paths, [&](std::size_t i) {
        const CadlagPath x = sample_path(e.model, path_seed(e.base_seed, i));
        for (std::size_t k = 0; k < levels; ++k)
            qv[i][k] =
                q_n(x, scheme.generate(level_lo + static_cast<int>(k)))(t);
    });

    std::vector<double> mean(levels, 0.0);
    for (std::size_t k = 0; k < levels; ++k) {
        for (std::size_t i = 0; i < e.paths; ++i) mean[k] += qv[i][k];
        mean[k] /= static_cast<double>(e.paths);
    }
    return mean;
}

EntryCauchyReport componentwise_reduction(const VectorSampler& sampler,
                                          std::size_t paths,
                                          std::uint64_t base_seed,
                                          const PartitionScheme& scheme,
                                          int level_lo, int level_hi,
                                          double eps, double delta) {
    if (!sampler) throw domain_error("vector sampler must be callable");
    if (paths == 0) throw domain_error("ensemble needs at least one path");
    if (level_hi - level_lo < 1) throw domain_error("level range too short");
    if (!(eps > 0.0)) throw domain_error("eps must be positive");
    if (!(delta >= 0.0)) throw domain_error("delta must be non-negative");

    const VectorCadlagPath probe = sampler(path_seed(base_seed, 0));
    const std::size_t m = probe.dimension();
    if (m < 2)
        throw domain_error("componentwise reduction needs dimension >= 2");
    const double T = probe.horizon();
    if (scheme.horizon() < T)
        throw domain_error("partition scheme must reach the model horizon");

    const std::size_t pairs = static_cast<std::size_t>(level_hi - level_lo);
    std::vector<std::vector<char>> exceed(
        paths, std::vector<char>(m * m * pairs, 0));
    parallel_for(paths, [&](std::size_t i) {
        const VectorCadlagPath x = sampler(path_seed(base_seed, i));
        if (x.dimension() != m)
            throw domain_error("sampler changed the vector dimension");
        MatrixStepPath prev = matrix_q_n(x, scheme.generate(level_lo));
        for (std::size_t k = 0; k < pairs; ++k) {
            MatrixStepPath next = matrix_q_n(
                x, scheme.generate(level_lo + static_cast<int>(k) + 1));
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b)
                    exceed[i][(a * m + b) * pairs + k] =
                        !j1_within(prev.entry(a, b), next.entry(a, b), T, eps);
            prev = std::move(next);
        }
    });

    EntryCauchyReport rep;
    rep.dimension = m;
    rep.eps = eps;
    rep.delta = delta;
    for (std::size_t k = 0; k < pairs; ++k)
        rep.pair_levels.push_back(level_lo + static_cast<int>(k));
    rep.fractions.assign(m * m, std::vector<double>(pairs, 0.0));
    rep.entry_pass.assign(m * m, 0);
    rep.pass = true;
    for (std::size_t entry = 0; entry < m * m; ++entry) {
        for (std::size_t k = 0; k < pairs; ++k) {
            std::size_t count = 0;
            for (std::size_t i = 0; i < paths; ++i)
                count += exceed[i][entry * pairs + k];
            rep.fractions[entry][k] =
                static_cast<double>(count) / static_cast<double>(paths);
        }
        rep.entry_pass[entry] = fractions_decayed(rep.fractions[entry], delta);
        if (!rep.entry_pass[entry]) rep.pass = false;
    }
    return rep;
}

}  // namespace cadlag
