#include "sigkit/monte_carlo.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace sigkit {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SeedSpec::derive(std::uint64_t sample_index) const {
    // two mixing rounds keep adjacent counters decorrelated
    return splitmix64(splitmix64(master ^ 0x5851f42d4c957f2dULL) + sample_index);
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

int Rng::poisson(double lambda) {
    if (lambda < 0) throw std::invalid_argument("poisson: negative rate");
    if (lambda == 0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform();
    } while (p > limit);
    return k - 1;
}

std::vector<std::vector<double>> symmetric_sqrt(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return {};
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n) throw std::invalid_argument("symmetric_sqrt: matrix not square");
        for (std::size_t j = 0; j < n; ++j) a(long(i), long(j)) = m[i][j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symmetric_sqrt: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    for (long i = 0; i < lam.size(); ++i) {
        if (lam(i) < -1e-10 * scale)
            throw std::invalid_argument("symmetric_sqrt: matrix is not positive semidefinite");
        lam(i) = lam(i) > 0 ? std::sqrt(lam(i)) : 0.0;
    }
    Eigen::MatrixXd r = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    std::vector<std::vector<double>> out(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] = r(long(i), long(j));
    return out;
}

namespace {

std::vector<std::vector<double>> rat_matrix_to_double(const std::vector<std::vector<Rat>>& m) {
    std::vector<std::vector<double>> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i].resize(m[i].size());
        for (std::size_t j = 0; j < m[i].size(); ++j) out[i][j] = to_double(m[i][j]);
    }
    return out;
}

// increment = sum_i coords_i u_i (+ extra), with coords = root * z * scale.
TensorSeries<double> gaussian_increment(const std::vector<TensorSeries<double>>& u,
                                        const std::vector<std::vector<double>>& root, double scale,
                                        Rng& rng, int dim, int level) {
    TensorSeries<double> inc(dim, level);
    const std::size_t k = u.size();
    std::vector<double> z(k);
    for (auto& v : z) v = rng.gaussian();
    for (std::size_t i = 0; i < k; ++i) {
        double c = 0.0;
        for (std::size_t j = 0; j < k; ++j) c += root[i][j] * z[j];
        c *= scale;
        if (c != 0.0) inc += u[i] * c;
    }
    return inc;
}

}  // namespace

DrivePath<double> sample_brownian_development(const BrownianRoughPathSpec& spec, int steps,
                                              std::uint64_t seed) {
    spec.validate();
    if (steps < 1) throw std::invalid_argument("sample_brownian_development: need steps >= 1");
    const auto u = spec.direction_tensors();
    const auto root = symmetric_sqrt(rat_matrix_to_double(spec.correlation));
    const TensorSeries<double> drift = to_float(spec.drift);
    const double dt = spec.horizon / steps;
    const double sdt = std::sqrt(dt);

    Rng rng(seed);
    DrivePath<double> path;
    path.dim = spec.dim;
    path.level = spec.level;
    path.increments.reserve(std::size_t(steps));
    for (int s = 0; s < steps; ++s) {
        TensorSeries<double> inc =
            gaussian_increment(u, root, sdt, rng, spec.dim, spec.level);
        inc += drift * dt;
        path.increments.push_back(std::move(inc));
    }
    return path;
}

DrivePath<double> sample_random_walk(const AtomDistribution<double>& dist, long horizon,
                                     std::uint64_t seed) {
    dist.validate();
    if (horizon < 0) throw std::invalid_argument("sample_random_walk: negative horizon");
    std::vector<double> cdf;
    cdf.reserve(dist.atoms.size());
    double acc = 0.0;
    for (const auto& [p, v] : dist.atoms) {
        acc += to_double(p);
        cdf.push_back(acc);
    }
    cdf.back() = 1.0;

    Rng rng(seed);
    DrivePath<double> path;
    path.dim = dist.dim();
    path.level = dist.level();
    path.increments.reserve(std::size_t(horizon));
    for (long j = 0; j < horizon; ++j) {
        const double x = rng.uniform();
        const std::size_t pick =
            std::size_t(std::lower_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
        path.increments.push_back(dist.atoms[std::min(pick, cdf.size() - 1)].second);
    }
    return path;
}

DrivePath<double> sample_levy(const LevyTriplet& triplet, int steps, std::uint64_t seed) {
    triplet.validate();
    if (steps < 1) throw std::invalid_argument("sample_levy: need steps >= 1");
    const double T = triplet.horizon();
    const auto u = triplet.direction_tensors();
    std::vector<std::vector<std::vector<double>>> roots;
    roots.reserve(triplet.pieces.size());
    for (const auto& piece : triplet.pieces) roots.push_back(symmetric_sqrt(piece.cov));

    const auto points = make_time_grid(0.0, T, T / steps, triplet.grid);
    Rng rng(seed);
    DrivePath<double> path;
    path.dim = triplet.dim;
    path.level = triplet.level;

    auto continuous_increment = [&](std::size_t piece, double len) {
        TensorSeries<double> inc = gaussian_increment(u, roots[piece], std::sqrt(len), rng,
                                                      triplet.dim, triplet.level);
        inc += triplet.pieces[piece].drift * len;
        return inc;
    };

    for (std::size_t c = 0; c + 1 < points.size(); ++c) {
        const double a = points[c], b = points[c + 1];
        const std::size_t piece = triplet.piece_at(0.5 * (a + b));
        // jump events of each atom in this cell, at uniform times
        std::vector<std::pair<double, std::size_t>> events;
        const auto& jumps = triplet.pieces[piece].jumps;
        for (std::size_t k = 0; k < jumps.size(); ++k) {
            const int count = rng.poisson(jumps[k].rate * (b - a));
            for (int e = 0; e < count; ++e) events.emplace_back(a + (b - a) * rng.uniform(), k);
        }
        std::sort(events.begin(), events.end());

        double cursor = a;
        for (const auto& [when, atom] : events) {
            if (when > cursor) {
                path.increments.push_back(continuous_increment(piece, when - cursor));
                path.jumps.push_back(0);
                cursor = when;
            }
            path.increments.push_back(jumps[atom].value);
            path.jumps.push_back(1);
        }
        if (b > cursor) {
            path.increments.push_back(continuous_increment(piece, b - cursor));
            path.jumps.push_back(0);
        }
    }
    return path;
}

namespace {

struct Welford {
    std::uint64_t n = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit Welford(std::size_t size) : mean(size, 0.0), m2(size, 0.0) {}

    void push(const std::vector<double>& x) {
        ++n;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double delta = x[i] - mean[i];
            mean[i] += delta / double(n);
            m2[i] += delta * (x[i] - mean[i]);
        }
    }

    void merge(const Welford& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = double(n), nb = double(o.n), nn = na + nb;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double delta = o.mean[i] - mean[i];
            mean[i] += delta * nb / nn;
            m2[i] += o.m2[i] + delta * delta * na * nb / nn;
        }
        n += o.n;
    }
};

std::vector<double> flatten(const TensorSeries<double>& x) {
    std::vector<double> out;
    for (int k = 0; k <= x.level(); ++k)
        out.insert(out.end(), x.degree(k).begin(), x.degree(k).end());
    return out;
}

int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SIGKIT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

constexpr std::uint64_t kChunk = 4096;

}  // namespace

SigEstimate estimate_expected_signature(const PathSampler& sampler, std::uint64_t n, int dim,
                                        int level, int threads) {
    if (n < 1) throw std::invalid_argument("estimate_expected_signature: need n >= 1");
    const auto t0 = std::chrono::steady_clock::now();

    std::size_t width = 0;
    for (int k = 0; k <= level; ++k) width += pow_size(dim, k);

    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<Welford> acc(static_cast<std::size_t>(chunks), Welford(width));

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        Welford& w = acc[std::size_t(c)];
        for (std::uint64_t i = lo; i < hi; ++i)
            w.push(flatten(marcus_signature(sampler(i))));
    };

    const int workers = std::min<std::uint64_t>(thread_count(threads), chunks);
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (std::uint64_t c = std::uint64_t(t); c < chunks; c += std::uint64_t(workers))
                    run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    // ordered combine: identical result for every worker count
    Welford total(width);
    for (const auto& w : acc) total.merge(w);

    SigEstimate est;
    est.dim = dim;
    est.level = level;
    est.n = n;
    est.mean = TensorSeries<double>(dim, level);
    est.se = TensorSeries<double>(dim, level);
    std::size_t pos = 0;
    for (int k = 0; k <= level; ++k) {
        auto& m = est.mean.degree(k);
        auto& s = est.se.degree(k);
        for (std::size_t i = 0; i < m.size(); ++i, ++pos) {
            m[i] = total.mean[pos];
            s[i] = n > 1 ? std::sqrt(total.m2[pos] / double(n - 1) / double(n)) : 0.0;
        }
    }
    est.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return est;
}

McReport compare(const SigEstimate& estimate, const TensorSeries<double>& reference) {
    estimate.mean.require_compatible(reference);
    McReport report;
    report.n = estimate.n;
    for (int k = 1; k <= estimate.level; ++k) {
        const auto& m = estimate.mean.degree(k);
        const auto& s = estimate.se.degree(k);
        const auto& r = reference.degree(k);
        for (std::size_t i = 0; i < m.size(); ++i) {
            McEntry e;
            e.word = index_word(k, i, estimate.dim);
            e.mean = m[i];
            e.se = s[i];
            e.ref = r[i];
            if (s[i] > 0) {
                e.z = (m[i] - r[i]) / s[i];
            } else {
                e.z = 0.0;
                e.exact_mismatch = (m[i] != r[i]);
            }
            const double az = std::abs(e.z);
            report.max_abs_z = std::max(report.max_abs_z, az);
            if (az > 2) ++report.count_gt_2;
            if (az > 3) ++report.count_gt_3;
            if (az > 4) ++report.count_gt_4;
            report.any_exact_mismatch |= e.exact_mismatch;
            report.entries.push_back(std::move(e));
        }
    }
    report.frac_gt_3 =
        report.entries.empty() ? 0.0 : double(report.count_gt_3) / double(report.entries.size());
    return report;
}

}  // namespace sigkit
