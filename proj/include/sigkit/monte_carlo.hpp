#ifndef SIGKIT_MONTE_CARLO_HPP
#define SIGKIT_MONTE_CARLO_HPP

#include <cstdint>
#include <functional>

#include "sigkit/models.hpp"
#include "sigkit/signatures.hpp"

namespace sigkit {

// Counter-based seeding: sample i's stream depends only on (master, i), never
// on scheduling or worker count.
struct SeedSpec {
    std::uint64_t master = 0;
    std::uint64_t derive(std::uint64_t sample_index) const;
};

// splitmix64 stream; platform-independent uniforms and gaussians.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();   // (0, 1)
    double gaussian();  // standard normal, Box-Muller
    int poisson(double lambda);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Symmetric PSD square root by eigendecomposition (tolerates singular
// correlation); throws on genuinely negative eigenvalues.
std::vector<std::vector<double>> symmetric_sqrt(const std::vector<std::vector<double>>& m);

// One piecewise-linear development sample of the Brownian rough path:
// Gaussian increments over the chosen directions with covariance
// corr * (T/steps), plus drift * (T/steps), as T_0 increments at the working
// level. No Levy-area correction; the level-2 area is recovered in
// distribution as steps grows.
DrivePath<double> sample_brownian_development(const BrownianRoughPathSpec& spec, int steps,
                                              std::uint64_t seed);

// J IID draws from the atom distribution.
DrivePath<double> sample_random_walk(const AtomDistribution<double>& dist, long horizon,
                                     std::uint64_t seed);

// Drift + Gaussian segments with Poisson jump events placed at their sampled
// times inside each step; jump increments are tagged.
DrivePath<double> sample_levy(const LevyTriplet& triplet, int steps, std::uint64_t seed);

struct SigEstimate {
    int dim = 1;
    int level = 0;
    std::uint64_t n = 0;
    TensorSeries<double> mean;
    TensorSeries<double> se;  // per-coefficient standard error
    double seconds = 0.0;
};

using PathSampler = std::function<DrivePath<double>(std::uint64_t)>;

// Streaming per-coefficient mean/variance of marcus_signature(sample(i)) over
// i < n. Samples are processed in fixed-size chunks and the chunk reductions
// are combined in index order, so results are bit-identical for any worker
// count. threads = 0 reads SIGKIT_THREADS (default 1).
SigEstimate estimate_expected_signature(const PathSampler& sampler, std::uint64_t n, int dim,
                                        int level, int threads = 0);

struct McEntry {
    Word word;
    double mean = 0.0;
    double se = 0.0;
    double ref = 0.0;
    double z = 0.0;
    bool exact_mismatch = false;  // se == 0 and mean != ref
};

struct McReport {
    std::vector<McEntry> entries;  // words of length >= 1
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    int steps = 0;
    double max_abs_z = 0.0;
    double frac_gt_3 = 0.0;
    int count_gt_2 = 0;
    int count_gt_3 = 0;
    int count_gt_4 = 0;
    bool any_exact_mismatch = false;
};

McReport compare(const SigEstimate& estimate, const TensorSeries<double>& reference);

}  // namespace sigkit

#endif
