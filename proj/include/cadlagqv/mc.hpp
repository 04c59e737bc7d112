#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"

namespace cadlag {

// Process zoo for the sampling harness. Diffusive kinds (brownian,
// jump_diffusion, white_noise) are realized on a fixed grid of `resolution`
// cells and carry an empty declared jump set for the grid part; analysis
// levels must stay coarse enough that every partition cell aggregates at
// least 4 grid increments (checked by the ensemble operations). Jump kinds
// draw continuous arrival times, almost surely off every dyadic partition,
// and declare their jumps. white_noise draws a fresh independent value at
// every grid point: a deliberately non-convergent fixture.
struct ProcessModel {
    enum class Kind {
        brownian,
        poisson,
        compound_poisson,
        jump_diffusion,
        white_noise
    };
    using JumpSampler = std::function<double(std::mt19937_64&)>;

    Kind kind = Kind::brownian;
    double sigma = 0.0;
    double lambda = 0.0;
    double jump_size = 1.0;   // poisson only; compound kinds use the sampler
    JumpSampler sampler;      // compound_poisson and jump_diffusion
    double amplitude = 0.0;   // white_noise only
    double horizon = 1.0;
    std::size_t resolution = 1u << 16;

    static ProcessModel brownian(double sigma, double horizon = 1.0,
                                 std::size_t resolution = 1u << 16);
    static ProcessModel poisson(double lambda, double jump = 1.0,
                                double horizon = 1.0);
    static ProcessModel compound_poisson(double lambda, JumpSampler sampler,
                                         double horizon = 1.0);
    static ProcessModel jump_diffusion(double sigma, double lambda,
                                       JumpSampler sampler,
                                       double horizon = 1.0,
                                       std::size_t resolution = 1u << 16);
    static ProcessModel white_noise(double amplitude, double horizon = 1.0,
                                    std::size_t resolution = 1u << 10);
};

// Deterministic per-path seed: a fixed mix of the base seed and the path
// index, so regenerating any path needs neither the others nor their order.
std::uint64_t path_seed(std::uint64_t base_seed, std::size_t index);

// One realization. Identical (model, seed) reproduce the path bit for bit
// with this toolchain's distributions. Brownian grid values accumulate
// sigma sqrt(dt) normals; jump kinds build duplicated knots at the arrival
// times; jump_diffusion interleaves both without declaring the grid moves.
CadlagPath sample_path(const ProcessModel& model, std::uint64_t seed);

struct Ensemble {
    ProcessModel model;
    std::size_t paths = 0;
    std::uint64_t base_seed = 0;
};

// Per-path targets for the convergence estimates: called with the path
// index and the realized path, returns the path's known limit.
using TargetOracle =
    std::function<CadlagPath(std::size_t index, const CadlagPath& path)>;

// Step path accumulating the squared declared jumps of `path`: the exact
// quadratic variation of a pure-jump path.
CadlagPath squared_jump_target(const CadlagPath& path);

// Sampled ramp slope * t on a uniform grid, the Brownian target sigma^2 t.
CadlagPath linear_target(double slope, double horizon, std::size_t cells);

// Metric the exceedance fractions are measured in.
enum class FractionMetric { j1, uniform };

// Empirical fraction of paths with d(q_n, q_{n+1}) > eps for each
// consecutive level pair, d the chosen metric (J1 by default). Passes when
// the fractions are non-increasing over the last min(3, count) pairs and
// the final one is <= delta.
struct CauchyReport {
    std::vector<int> pair_levels;  // left level of each pair
    std::vector<double> fractions;
    double eps = 0.0;
    double delta = 0.0;
    bool pass = false;
};

CauchyReport cauchy_in_probability(const Ensemble& e,
                                   const PartitionScheme& scheme,
                                   int level_lo, int level_hi, double eps,
                                   double delta,
                                   FractionMetric metric = FractionMetric::j1);

// Empirical P(d_J1(q_n, target) > eps) per level, target supplied per path.
struct LevelFractionReport {
    std::vector<int> levels;
    std::vector<double> fractions;
    double eps = 0.0;
};

LevelFractionReport prob_convergence_estimate(const Ensemble& e,
                                              const PartitionScheme& scheme,
                                              int level_lo, int level_hi,
                                              const TargetOracle& target,
                                              double eps);

// Exceedance fractions against the target under both metrics. The verdict
// is "UCP" when the uniform fractions decay (non-increasing tail, final
// <= delta), else "J1-only" when the J1 fractions decay, else "neither".
struct UcpReport {
    std::vector<int> levels;
    std::vector<double> uniform_fractions;
    std::vector<double> j1_fractions;
    double eps = 0.0;
    double delta = 0.0;
    bool uniform_decays = false;
    bool j1_decays = false;
    std::string verdict;
};

UcpReport ucp_vs_j1(const Ensemble& e, const PartitionScheme& scheme,
                    int level_lo, int level_hi, const TargetOracle& target,
                    double eps, double delta = 0.05);

// Mean of q_n(t) across the ensemble, one entry per level. The reduction
// order is fixed by path index, so results are identical however the
// per-path work was scheduled.
std::vector<double> ensemble_mean_qv(const Ensemble& e,
                                     const PartitionScheme& scheme,
                                     int level_lo, int level_hi, double t);

// Entrywise Cauchy fractions on the matrix increment sums of sampled vector
// paths (dimension >= 2, read off the first sample). Every entry gets the
// scalar pass rule; the verdict is their conjunction.
using VectorSampler = std::function<VectorCadlagPath(std::uint64_t seed)>;

struct EntryCauchyReport {
    std::size_t dimension = 0;
    std::vector<int> pair_levels;
    std::vector<std::vector<double>> fractions;  // [entry row-major][pair]
    double eps = 0.0;
    double delta = 0.0;
    std::vector<char> entry_pass;  // row-major
    bool pass = false;
};

EntryCauchyReport componentwise_reduction(const VectorSampler& sampler,
                                          std::size_t paths,
                                          std::uint64_t base_seed,
                                          const PartitionScheme& scheme,
                                          int level_lo, int level_hi,
                                          double eps, double delta);

}  // namespace cadlag
