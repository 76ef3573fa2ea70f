#include "sigkit/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sigkit/compositions.hpp"

namespace sigkit {

// ---------------------------------------------------------------------------
// Markov chains

void MarkovChainSpec::validate() const {
    if (states.empty()) throw std::invalid_argument("MarkovChainSpec: no states");
    if (horizon < 0) throw std::invalid_argument("MarkovChainSpec: negative horizon");
    if (int(kernels.size()) != horizon)
        throw std::invalid_argument("MarkovChainSpec: need one kernel per step");
    for (const auto& s : states)
        if (int(s.size()) != dim)
            throw std::invalid_argument("MarkovChainSpec: state dimension mismatch");
    for (const auto& kernel : kernels) {
        if (kernel.size() != states.size())
            throw std::invalid_argument("MarkovChainSpec: kernel row count mismatch");
        for (const auto& row : kernel) {
            if (row.size() != states.size())
                throw std::invalid_argument("MarkovChainSpec: kernel column count mismatch");
            Rat total = 0;
            for (const auto& p : row) {
                if (p < 0) throw std::invalid_argument("MarkovChainSpec: negative probability");
                total += p;
            }
            if (total != 1)
                throw std::invalid_argument("MarkovChainSpec: kernel rows must sum exactly to 1");
        }
    }
}

TensorSeries<Rat> MarkovChainSpec::state_value(int s) const {
    TensorSeries<Rat> v(dim, level);
    if (level >= 1)
        for (int i = 0; i < dim; ++i) v.at(1, std::size_t(i)) = states[std::size_t(s)][std::size_t(i)];
    return v;
}

std::vector<std::vector<TensorSeries<Rat>>> markov_expected_signature(
    const MarkovChainSpec& spec) {
    spec.validate();
    const int J = spec.horizon, N = spec.level;
    const std::size_t ns = spec.states.size();

    std::vector<std::vector<TensorSeries<Rat>>> f(
        std::size_t(J) + 1,
        std::vector<TensorSeries<Rat>>(ns, TensorSeries<Rat>::unit(spec.dim, N)));

    // increments y - x as level-1 tensors, then powers (y-x)^{n-k}/(n-k)!
    auto step_tensor = [&](int x, int y) {
        TensorSeries<Rat> t(spec.dim, N);
        for (int i = 0; i < spec.dim; ++i)
            t.at(1, std::size_t(i)) =
                spec.states[std::size_t(y)][std::size_t(i)] - spec.states[std::size_t(x)][std::size_t(i)];
        return t;
    };

    // Backward in j; the degree-n slice of the one-step average is
    //   f_j^n(x) = sum_{k<=n} sum_y p_j(x,y) (y-x)^{(n-k)}/(n-k)! f_{j+1}^k(y),
    // strictly lower triangular across the unknown time slice.
    for (int j = J - 1; j >= 0; --j) {
        const auto& kernel = spec.kernels[std::size_t(j)];
        for (std::size_t x = 0; x < ns; ++x) {
            TensorSeries<Rat> acc(spec.dim, N);
            for (std::size_t y = 0; y < ns; ++y) {
                const Rat& p = kernel[x][y];
                if (p == 0) continue;
                acc += exp_series(step_tensor(int(x), int(y))) * f[std::size_t(j) + 1][y] * p;
            }
            f[std::size_t(j)][x] = std::move(acc);
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// time grids and the backward generator quadrature

std::vector<double> make_time_grid(double t, double T, double h,
                                   const std::vector<double>& breakpoints) {
    if (!(t < T)) throw std::invalid_argument("make_time_grid: need t < T");
    if (!(h > 0)) throw std::invalid_argument("make_time_grid: step must be positive");
    std::vector<double> anchors{t};
    for (double b : breakpoints)
        if (b > t + 1e-15 && b < T - 1e-15) anchors.push_back(b);
    anchors.push_back(T);
    std::sort(anchors.begin(), anchors.end());

    std::vector<double> points;
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        const double a = anchors[i], b = anchors[i + 1];
        const int cells = std::max(1, int(std::ceil((b - a) / h - 1e-12)));
        for (int c = 0; c < cells; ++c) points.push_back(a + (b - a) * c / cells);
    }
    points.push_back(T);
    return points;
}

std::vector<TensorSeries<double>> backward_generator_quadrature(
    const std::function<const TensorSeries<double>&(std::size_t)>& eta_cell,
    const std::vector<double>& points, int dim, int level) {
    const std::size_t m = points.size();
    if (m < 2) throw std::invalid_argument("backward_generator_quadrature: need >= 2 points");
    std::vector<TensorSeries<double>> mu(m, TensorSeries<double>::unit(dim, level));

    // Trapezoid, resolved degree by degree: the unknown mu^{(n)}(t_i) appears
    // on the right only through lower degrees, since eta has no scalar part.
    for (std::size_t i = m - 1; i-- > 0;) {
        const double dt = points[i + 1] - points[i];
        const TensorSeries<double>& eta = eta_cell(i);
        TensorSeries<double>& cur = mu[i];
        const TensorSeries<double>& next = mu[i + 1];
        const TensorSeries<double> right = eta * next;  // degree-n slice ready
        cur = next;
        for (int n = 1; n <= level; ++n) {
            // left integrand at t_i uses cur's degrees < n, already final
            TensorSeries<double> left = eta * cur;
            auto& dst = cur.degree(n);
            const auto& rn = right.degree(n);
            const auto& ln = left.degree(n);
            for (std::size_t w = 0; w < dst.size(); ++w)
                dst[w] = next.degree(n)[w] + 0.5 * dt * (ln[w] + rn[w]);
        }
    }
    return mu;
}

// ---------------------------------------------------------------------------
// Gaussian martingales

void GaussianMartingaleSpec::validate() const {
    if (grid.size() < 2) throw std::invalid_argument("GaussianMartingaleSpec: need a time grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i - 1] < grid[i]))
            throw std::invalid_argument("GaussianMartingaleSpec: grid must strictly increase");
    if (grid.front() != 0.0)
        throw std::invalid_argument("GaussianMartingaleSpec: grid must start at 0");
    if (sigma.size() + 1 != grid.size())
        throw std::invalid_argument("GaussianMartingaleSpec: need one sigma per piece");
    for (const auto& s : sigma) {
        if (int(s.size()) != dim)
            throw std::invalid_argument("GaussianMartingaleSpec: sigma row count != dim");
        for (const auto& row : s)
            if (row.size() != s.front().size())
                throw std::invalid_argument("GaussianMartingaleSpec: ragged sigma");
    }
}

std::size_t GaussianMartingaleSpec::piece_at(double u) const {
    for (std::size_t p = 0; p + 1 < grid.size(); ++p)
        if (u < grid[p + 1]) return p;
    return sigma.size() - 1;
}

TensorSeries<double> GaussianMartingaleSpec::half_qv_tensor(std::size_t piece) const {
    const auto& s = sigma.at(piece);
    const std::size_t m = s.empty() ? 0 : s.front().size();
    TensorSeries<double> g(dim, level);
    if (level < 2) return g;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double v = 0.0;
            for (std::size_t k = 0; k < m; ++k) v += s[std::size_t(i)][k] * s[std::size_t(j)][k];
            g.at(2, std::size_t(i) * std::size_t(dim) + std::size_t(j)) = 0.5 * v;
        }
    return g;
}

TensorSeries<double> gaussian_moments(const GaussianMartingaleSpec& spec, double t, double h) {
    spec.validate();
    if (!(h > 0)) throw std::invalid_argument("gaussian_moments: step must be positive");
    const double T = spec.horizon();
    if (t >= T) return TensorSeries<double>::unit(spec.dim, spec.level);
    const auto points = make_time_grid(t, T, h, spec.grid);
    std::vector<TensorSeries<double>> gens;
    gens.reserve(points.size() - 1);
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        gens.push_back(spec.half_qv_tensor(spec.piece_at(0.5 * (points[i] + points[i + 1]))));
    auto mu = backward_generator_quadrature(
        [&](std::size_t i) -> const TensorSeries<double>& { return gens[i]; }, points, spec.dim,
        spec.level);
    return mu.front();
}

TensorSeries<double> gaussian_moments_path(const GaussianMartingaleSpec& spec, double t) {
    spec.validate();
    const double T = spec.horizon();
    TensorSeries<double> sig = TensorSeries<double>::unit(spec.dim, spec.level);
    if (t >= T) return sig;
    for (std::size_t p = 0; p + 1 < spec.grid.size(); ++p) {
        const double a = std::max(t, spec.grid[p]), b = spec.grid[p + 1];
        if (b <= a) continue;
        sig = sig * exp_series(spec.half_qv_tensor(p) * (b - a));
    }
    return sig;
}

TensorSeries<double> gaussian_magnus_cumulants(const GaussianMartingaleSpec& spec, double t,
                                               double h) {
    spec.validate();
    if (!(h > 0)) throw std::invalid_argument("gaussian_magnus_cumulants: step must be positive");
    const int d = spec.dim, N = spec.level;
    const double T = spec.horizon();
    TensorSeries<double> zero(d, N);
    if (t >= T) return zero;

    const auto points = make_time_grid(t, T, h, spec.grid);
    const std::size_t m = points.size();
    std::vector<TensorSeries<double>> gens;
    gens.reserve(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i)
        gens.push_back(spec.half_qv_tensor(spec.piece_at(0.5 * (points[i] + points[i + 1]))));

    // kappa on the whole grid, assembled degree by degree (only even degrees
    // are nonzero; the composition sum uses lower degrees only).
    std::vector<TensorSeries<double>> kappa(m, zero);

    auto integrand_degree_n = [&](int n, std::size_t point, const TensorSeries<double>& gen) {
        TensorSeries<double> acc(d, N);
        for (const auto& ell : compositions(n - 2)) {
            TensorSeries<double> term = gen;
            bool dead = false;
            for (auto part = ell.rbegin(); part != ell.rend(); ++part) {
                term = bracket(component(kappa[point], *part), term);
                if (term.is_zero()) {
                    dead = true;
                    break;
                }
            }
            if (dead) continue;
            const Rat c = bernoulli(int(ell.size())) / rat_factorial(int(ell.size()));
            if (c == 0) continue;
            term *= to_double(c);
            acc += term;
        }
        return acc;
    };

    for (int n = 2; n <= N; n += 2) {
        // backward trapezoid; endpoint integrand values use the cell's
        // (constant) generator, so piece breaks cost no accuracy
        for (std::size_t i = m - 1; i-- > 0;) {
            const double dt = points[i + 1] - points[i];
            const TensorSeries<double>& gen = gens[i];
            const TensorSeries<double> gi = integrand_degree_n(n, i, gen);
            const TensorSeries<double> gii = integrand_degree_n(n, i + 1, gen);
            auto& dst = kappa[i].degree(n);
            const auto& prev = kappa[i + 1].degree(n);
            const auto& a = gi.degree(n);
            const auto& b = gii.degree(n);
            for (std::size_t w = 0; w < dst.size(); ++w)
                dst[w] = prev[w] + 0.5 * dt * (a[w] + b[w]);
        }
    }
    return kappa.front();
}

// ---------------------------------------------------------------------------
// Brownian rough paths

void BrownianRoughPathSpec::validate() const {
    if (directions.empty()) throw std::invalid_argument("BrownianRoughPathSpec: no directions");
    if (correlation.size() != directions.size())
        throw std::invalid_argument("BrownianRoughPathSpec: correlation size mismatch");
    for (const auto& row : correlation)
        if (row.size() != directions.size())
            throw std::invalid_argument("BrownianRoughPathSpec: correlation not square");
    for (std::size_t i = 0; i < correlation.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (correlation[i][j] != correlation[j][i])
                throw std::invalid_argument("BrownianRoughPathSpec: correlation not symmetric");
    for (const auto& w : directions) {
        if (w.empty() || int(w.size()) > lie_level)
            throw std::invalid_argument("BrownianRoughPathSpec: direction outside g^N");
        for (int letter : w)
            if (letter < 1 || letter > dim)
                throw std::invalid_argument("BrownianRoughPathSpec: direction letter out of range");
    }
    if (drift.dim() != dim || drift.level() != level)
        throw std::invalid_argument("BrownianRoughPathSpec: drift dim/level mismatch");
    if (!drift.in_t0()) throw std::invalid_argument("BrownianRoughPathSpec: drift must lie in T_0");
    const auto lie_flags = dynkin_is_lie(drift);
    for (bool ok : lie_flags)
        if (!ok) throw std::invalid_argument("BrownianRoughPathSpec: drift must be a Lie element");
    if (!(horizon >= 0)) throw std::invalid_argument("BrownianRoughPathSpec: negative horizon");
}

std::vector<TensorSeries<double>> BrownianRoughPathSpec::direction_tensors() const {
    std::vector<TensorSeries<double>> out;
    out.reserve(directions.size());
    std::map<Word, TensorSeries<Rat>> cache;
    const auto basis = lyndon_basis(dim, lie_level);
    for (const auto& e : basis) cache.emplace(e.word, e.bracketing);
    for (const auto& w : directions) {
        auto it = cache.find(w);
        if (it == cache.end())
            throw std::invalid_argument("BrownianRoughPathSpec: direction is not a Lyndon word");
        out.push_back(to_float(extend(it->second, level)));
    }
    return out;
}

TensorSeries<double> BrownianRoughPathSpec::sigma_tensor() const {
    const auto u = direction_tensors();
    TensorSeries<double> sigma(dim, level);
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double c = to_double(correlation[i][j]);
            if (c == 0.0) continue;
            sigma += (u[i] * u[j]) * c;
        }
    return sigma;
}

TensorSeries<double> brownian_esig(const BrownianRoughPathSpec& spec) {
    spec.validate();
    const double T = spec.horizon;
    TensorSeries<double> gen = to_float(spec.drift) * T + spec.sigma_tensor() * (T / 2.0);
    return exp_series(gen);
}

// ---------------------------------------------------------------------------
// Levy triplets

void LevyTriplet::validate() const {
    if (grid.size() < 2) throw std::invalid_argument("LevyTriplet: need a time grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i - 1] < grid[i]))
            throw std::invalid_argument("LevyTriplet: grid must strictly increase");
    if (pieces.size() + 1 != grid.size())
        throw std::invalid_argument("LevyTriplet: need one piece per grid cell");
    for (const auto& p : pieces) {
        if (p.drift.dim() != dim || p.drift.level() != level)
            throw std::invalid_argument("LevyTriplet: drift dim/level mismatch");
        if (!p.drift.in_t0()) throw std::invalid_argument("LevyTriplet: drift must lie in T_0");
        if (p.cov.size() != cov_directions.size())
            throw std::invalid_argument("LevyTriplet: covariance size mismatch");
        for (const auto& row : p.cov)
            if (row.size() != cov_directions.size())
                throw std::invalid_argument("LevyTriplet: covariance not square");
        for (const auto& jump : p.jumps) {
            if (jump.rate < 0) throw std::invalid_argument("LevyTriplet: negative jump rate");
            if (jump.value.dim() != dim || jump.value.level() != level)
                throw std::invalid_argument("LevyTriplet: jump dim/level mismatch");
            if (!jump.value.in_t0())
                throw std::invalid_argument("LevyTriplet: jumps must lie in T_0");
        }
    }
}

std::size_t LevyTriplet::piece_at(double u) const {
    for (std::size_t p = 0; p + 1 < grid.size(); ++p)
        if (u < grid[p + 1]) return p;
    return pieces.size() - 1;
}

std::vector<TensorSeries<double>> LevyTriplet::direction_tensors() const {
    std::vector<TensorSeries<double>> out;
    out.reserve(cov_directions.size());
    if (cov_directions.empty()) return out;
    int max_len = 1;
    for (const auto& w : cov_directions) max_len = std::max(max_len, int(w.size()));
    std::map<Word, TensorSeries<Rat>> cache;
    for (const auto& e : lyndon_basis(dim, max_len)) cache.emplace(e.word, e.bracketing);
    for (const auto& w : cov_directions) {
        auto it = cache.find(w);
        if (it == cache.end())
            throw std::invalid_argument("LevyTriplet: covariance direction is not a Lyndon word");
        out.push_back(to_float(extend(it->second, level)));
    }
    return out;
}

namespace {

// eta for every piece at once; the Lyndon realizations of the covariance
// directions are built a single time.
std::vector<TensorSeries<double>> levy_eta_pieces(const LevyTriplet& triplet) {
    const auto u = triplet.direction_tensors();
    const TensorSeries<double> one = TensorSeries<double>::unit(triplet.dim, triplet.level);
    std::vector<TensorSeries<double>> out;
    out.reserve(triplet.pieces.size());
    for (const LevyPiece& piece : triplet.pieces) {
        TensorSeries<double> eta = piece.drift;
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j < u.size(); ++j) {
                const double c = piece.cov[i][j];
                if (c != 0.0) eta += (u[i] * u[j]) * (0.5 * c);
            }
        for (const auto& jump : piece.jumps) {
            if (jump.rate == 0.0) continue;
            TensorSeries<double> term = exp_series(jump.value) - one;
            if (norm_max(jump.value) <= 1.0) term -= jump.value;
            eta += term * jump.rate;
        }
        out.push_back(std::move(eta));
    }
    return out;
}

}  // namespace

TensorSeries<double> levy_eta(const LevyTriplet& triplet, double t) {
    triplet.validate();
    return levy_eta_pieces(triplet)[triplet.piece_at(t)];
}

TensorSeries<double> levy_expected_signature(const LevyTriplet& triplet, double t, double T,
                                             double h) {
    triplet.validate();
    if (!(h > 0)) throw std::invalid_argument("levy_expected_signature: step must be positive");
    if (t >= T) return TensorSeries<double>::unit(triplet.dim, triplet.level);
    const auto etas = levy_eta_pieces(triplet);
    const auto points = make_time_grid(t, T, h, triplet.grid);
    auto mu = backward_generator_quadrature(
        [&](std::size_t i) -> const TensorSeries<double>& {
            return etas[triplet.piece_at(0.5 * (points[i] + points[i + 1]))];
        },
        points, triplet.dim, triplet.level);
    return mu.front();
}

TensorSeries<double> levy_expected_signature_path(const LevyTriplet& triplet, double t, double T) {
    triplet.validate();
    TensorSeries<double> sig = TensorSeries<double>::unit(triplet.dim, triplet.level);
    if (t >= T) return sig;
    const auto etas = levy_eta_pieces(triplet);
    for (std::size_t p = 0; p + 1 < triplet.grid.size(); ++p) {
        const double a = std::max(t, triplet.grid[p]), b = std::min(T, triplet.grid[p + 1]);
        if (b <= a) continue;
        sig = sig * exp_series(etas[p] * (b - a));
    }
    return sig;
}

std::vector<double> levy_eta_level_integrals(const LevyTriplet& triplet, double t, double T) {
    triplet.validate();
    const auto etas = levy_eta_pieces(triplet);
    std::vector<double> acc(std::size_t(triplet.level) + 1, 0.0);
    for (std::size_t p = 0; p + 1 < triplet.grid.size(); ++p) {
        const double a = std::max(t, triplet.grid[p]), b = std::min(T, triplet.grid[p + 1]);
        if (b <= a) continue;
        const auto norms = level_norms(etas[p]);
        for (std::size_t n = 0; n < acc.size(); ++n) acc[n] += norms[n] * (b - a);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Magnus ODE

TensorSeries<double> magnus_ode_cumulants(
    const std::function<TensorSeries<double>(double)>& eta, double t, double T, double h, int dim,
    int level) {
    if (!(h > 0)) throw std::invalid_argument("magnus_ode_cumulants: step must be positive");
    TensorSeries<double> kappa(dim, level);
    if (t >= T) return kappa;
    const int cells = std::max(1, int(std::ceil((T - t) / h - 1e-12)));
    const double dt = (T - t) / cells;
    for (int c = cells - 1; c >= 0; --c) {
        const double mid = t + dt * (c + 0.5);
        const TensorSeries<double> eta_mid = eta(mid);
        const TensorSeries<double> half = kappa + apply_H(kappa, eta_mid) * (0.5 * dt);
        kappa += apply_H(half, eta_mid) * dt;
    }
    return kappa;
}

// ---------------------------------------------------------------------------
// Radius bound

std::vector<RadiusBound> radius_bound_check(const TensorSeries<double>& mu,
                                            const std::vector<double>& eta_level_integrals,
                                            const std::vector<double>& lambdas) {
    const auto mu_norms = level_norms(mu);
    std::vector<RadiusBound> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        if (!(lambda > 0)) throw std::invalid_argument("radius_bound_check: lambda must be > 0");
        double lhs = 0.0, expo = 0.0;
        double pow_l = 1.0;
        for (std::size_t n = 0; n < mu_norms.size(); ++n) {
            lhs += pow_l * mu_norms[n];
            if (n >= 1 && n < eta_level_integrals.size()) expo += pow_l * eta_level_integrals[n];
            pow_l *= lambda;
        }
        RadiusBound rb;
        rb.lambda = lambda;
        rb.lhs = lhs;
        rb.rhs = std::exp(expo);
        rb.holds = lhs <= rb.rhs * (1.0 + 1e-12);
        out.push_back(rb);
    }
    return out;
}

}  // namespace sigkit
