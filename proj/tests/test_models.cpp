#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sigkit/filtration_tree.hpp"
#include "sigkit/models.hpp"
#include "sigkit/monte_carlo.hpp"
#include "sigkit/verify.hpp"

using namespace sigkit;

namespace {

TensorSeries<Rat> e(int dim, int level, const Word& w) {
    return TensorSeries<Rat>::basis(dim, level, w);
}

TensorSeries<Rat> cosh_series(const TensorSeries<Rat>& x) {
    return (exp_series(x) + exp_series(-x)) * make_rat(1, 2);
}

}  // namespace

TEST_CASE("random walk step expectation") {
    std::mt19937_64 rng(3);
    const auto x = random_rational_series(rng, 2, 3);
    AtomDistribution<Rat> single{{{Rat(1), x}}};
    CHECK(rw_step_expectation(single) == exp_series(x));

    // axis atoms +-e1, +-e2: M = 1/2 (cosh e1 + cosh e2)
    const auto e1 = e(2, 4, {1}), e2 = e(2, 4, {2});
    AtomDistribution<Rat> axis{{{make_rat(1, 4), e1},
                                {make_rat(1, 4), -e1},
                                {make_rat(1, 4), e2},
                                {make_rat(1, 4), -e2}}};
    CHECK(rw_step_expectation(axis) == (cosh_series(e1) + cosh_series(e2)) * make_rat(1, 2));

    // signed pair brackets in d = 3: M = (2/(d(d-1))) sum_{i<j} cosh([ei,ej])
    const int d = 3, N = 4;
    AtomDistribution<Rat> area;
    TensorSeries<Rat> cosh_sum(d, N);
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) {
            const auto b = bracket(e(d, N, {i}), e(d, N, {j}));
            area.atoms.emplace_back(make_rat(1, 6), b);
            area.atoms.emplace_back(make_rat(1, 6), -b);
            cosh_sum += cosh_series(b);
        }
    CHECK(rw_step_expectation(area) == cosh_sum * make_rat(1, 3));

    AtomDistribution<Rat> bad{{{make_rat(1, 2), e1}}};
    CHECK_THROWS_AS(rw_step_expectation(bad), std::invalid_argument);
}

TEST_CASE("random walk expected signature vs tree enumeration") {
    const auto e1 = e(2, 3, {1}), e2 = e(2, 3, {2});
    AtomDistribution<Rat> dist{{{make_rat(1, 3), e1 + e2},
                                {make_rat(1, 3), -e1},
                                {make_rat(1, 3), bracket(e1, e2) - e2}}};
    const long J = 4;
    CHECK(rw_expected_signature(dist, J, J) == TensorSeries<Rat>::unit(2, 3));

    const auto tree = make_iid_tree(dist.atoms, int(J));
    const auto mu = expected_signature_direct(tree);
    for (int j = 0; j <= J; ++j) {
        const int node = tree.at_level(j).front();
        CHECK(rw_expected_signature(dist, J, j) == *mu[std::size_t(node)]);
    }
}

namespace {

// brute-force oracle over all state paths of the chain
TensorSeries<Rat> markov_enumerate(const MarkovChainSpec& spec, int j, int start) {
    TensorSeries<Rat> acc(spec.dim, spec.level);
    struct Item {
        int time;
        int state;
        Rat prob;
        TensorSeries<Rat> sig;
    };
    std::vector<Item> stack{{j, start, Rat(1), TensorSeries<Rat>::unit(spec.dim, spec.level)}};
    while (!stack.empty()) {
        Item it = std::move(stack.back());
        stack.pop_back();
        if (it.time == spec.horizon) {
            acc += it.sig * it.prob;
            continue;
        }
        for (std::size_t y = 0; y < spec.states.size(); ++y) {
            const Rat& p = spec.kernels[std::size_t(it.time)][std::size_t(it.state)][y];
            if (p == 0) continue;
            const auto inc = spec.state_value(int(y)) - spec.state_value(it.state);
            stack.push_back({it.time + 1, int(y), it.prob * p, it.sig * exp_series(inc)});
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("markov chain expected signature") {
    // J = 0: nothing to integrate
    MarkovChainSpec trivial;
    trivial.dim = 1;
    trivial.level = 3;
    trivial.horizon = 0;
    trivial.states = {{Rat(0)}, {Rat(1)}};
    const auto f0 = markov_expected_signature(trivial);
    CHECK(f0[0][0] == TensorSeries<Rat>::unit(1, 3));
    CHECK(f0[0][1] == TensorSeries<Rat>::unit(1, 3));

    // two-state chain, J = 3, d = 1, against the 2^3-path oracle
    MarkovChainSpec spec;
    spec.dim = 1;
    spec.level = 4;
    spec.horizon = 3;
    spec.states = {{Rat(0)}, {Rat(1)}};
    spec.kernels = {
        {{make_rat(1, 2), make_rat(1, 2)}, {make_rat(1, 4), make_rat(3, 4)}},
        {{make_rat(2, 3), make_rat(1, 3)}, {make_rat(1, 3), make_rat(2, 3)}},
        {{make_rat(1, 5), make_rat(4, 5)}, {make_rat(3, 5), make_rat(2, 5)}},
    };
    const auto f = markov_expected_signature(spec);
    for (int j = 0; j <= 3; ++j)
        for (int s = 0; s < 2; ++s)
            CHECK(f[std::size_t(j)][std::size_t(s)] == markov_enumerate(spec, j, s));

    // A walk with IID increments, realized as a chain on the reachable
    // lattice positions, reduces to the random-walk closed form.
    const int J = 3;
    MarkovChainSpec walk;
    walk.dim = 1;
    walk.level = 4;
    walk.horizon = J;
    const int span = J;  // positions -J..J, index p -> value p - J
    for (int p = -span; p <= span; ++p) walk.states.push_back({Rat(p)});
    std::vector<std::vector<Rat>> kernel(walk.states.size(),
                                         std::vector<Rat>(walk.states.size(), Rat(0)));
    for (int p = -span; p <= span; ++p) {
        const std::size_t row = std::size_t(p + span);
        if (p == -span || p == span) {
            kernel[row][row] = 1;  // edge rows are never visited before the horizon
        } else {
            kernel[row][row + 1] = make_rat(1, 3);
            kernel[row][row - 1] = make_rat(2, 3);
        }
    }
    walk.kernels.assign(std::size_t(J), kernel);
    const auto fw = markov_expected_signature(walk);

    const auto e1 = e(1, 4, {1});
    AtomDistribution<Rat> inc_law{{{make_rat(1, 3), e1}, {make_rat(2, 3), -e1}}};
    for (int j = 0; j <= J; ++j)
        CHECK(fw[std::size_t(j)][std::size_t(span)] == rw_expected_signature(inc_law, J, j));
}

TEST_CASE("gaussian martingale moments") {
    // sigma = I_d: mu_t = exp(((T-t)/2) I_d)
    GaussianMartingaleSpec id;
    id.dim = 2;
    id.level = 4;
    id.grid = {0.0, 1.0};
    id.sigma = {{{1.0, 0.0}, {0.0, 1.0}}};
    TensorSeries<double> eye(2, 4);
    eye.at(2, 0) = 1.0;
    eye.at(2, 3) = 1.0;
    const double t = 0.25;
    const auto mu = gaussian_moments(id, t, 1.0 / 512);
    const auto fawcett = exp_series(eye * ((1.0 - t) / 2.0));
    CHECK(max_abs_diff(mu, fawcett) < 1e-12);  // integrand is constant per level step
    CHECK(max_abs_diff(gaussian_moments_path(id, t), fawcett) < 1e-14);

    // sigma = 0: mu = 1
    GaussianMartingaleSpec zero;
    zero.dim = 2;
    zero.level = 3;
    zero.grid = {0.0, 1.0};
    zero.sigma = {{{0.0}, {0.0}}};
    CHECK(gaussian_moments(zero, 0.0, 0.25) == TensorSeries<double>::unit(2, 3));

    // two noncommuting pieces: quadrature vs exact path product within 10 h^2
    GaussianMartingaleSpec two;
    two.dim = 2;
    two.level = 4;
    two.grid = {0.0, 0.5, 1.0};
    two.sigma = {{{1.0, 0.0}, {0.3, 0.8}}, {{0.5, 0.4}, {0.0, 1.2}}};
    const double h = 1.0 / 256;
    const auto quad = gaussian_moments(two, 0.0, h);
    const auto path = gaussian_moments_path(two, 0.0);
    CHECK(max_abs_diff(quad, path) < 10 * h * h);

    // odd degrees vanish identically
    for (int k = 1; k <= two.level; k += 2)
        for (double v : quad.degree(k)) CHECK(v == 0.0);

    CHECK_THROWS_AS(gaussian_moments(two, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("gaussian Magnus cumulants") {
    GaussianMartingaleSpec id;
    id.dim = 2;
    id.level = 4;
    id.grid = {0.0, 1.0};
    id.sigma = {{{1.0, 0.0}, {0.0, 1.0}}};
    TensorSeries<double> eye(2, 4);
    eye.at(2, 0) = 1.0;
    eye.at(2, 3) = 1.0;
    const auto kappa = gaussian_magnus_cumulants(id, 0.25, 1.0 / 512);
    CHECK(max_abs_diff(kappa, eye * ((1.0 - 0.25) / 2.0)) < 1e-12);

    GaussianMartingaleSpec zero;
    zero.dim = 1;
    zero.level = 4;
    zero.grid = {0.0, 1.0};
    zero.sigma = {{{0.0}}};
    CHECK(gaussian_magnus_cumulants(zero, 0.0, 0.25).is_zero());

    // noncommuting two-piece sigma at N = 6: exp(kappa) = mu within 10 h^2
    GaussianMartingaleSpec two;
    two.dim = 2;
    two.level = 6;
    two.grid = {0.0, 0.5, 1.0};
    two.sigma = {{{1.0, 0.0}, {0.3, 0.8}}, {{0.5, 0.4}, {0.0, 1.2}}};
    const double h = 1.0 / 1024;
    const auto mu = gaussian_moments(two, 0.0, h);
    const auto kap = gaussian_magnus_cumulants(two, 0.0, h);
    CHECK(max_abs_diff(exp_series(kap), mu) < 10 * h * h);
    for (int k = 1; k <= two.level; k += 2)
        for (double v : kap.degree(k)) CHECK(v == 0.0);
}

TEST_CASE("brownian rough path expected signature") {
    // Fawcett at N = 1
    BrownianRoughPathSpec spec;
    spec.dim = 2;
    spec.lie_level = 1;
    spec.level = 2;
    spec.directions = {{1}, {2}};
    spec.correlation = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    spec.drift = TensorSeries<Rat>(2, 2);
    spec.horizon = 1.0;
    TensorSeries<double> eye(2, 2);
    eye.at(2, 0) = 1.0;
    eye.at(2, 3) = 1.0;
    CHECK(max_abs_diff(brownian_esig(spec), exp_series(eye * 0.5)) < 1e-15);

    spec.horizon = 0.0;
    CHECK(brownian_esig(spec) == TensorSeries<double>::unit(2, 2));

    // pure-area directions in d = 3 with unit variances: exp((T/2) sum b^2);
    // T = 2/3 realizes the 2/(d(d-1)) = 1/3 constant
    BrownianRoughPathSpec area;
    area.dim = 3;
    area.lie_level = 2;
    area.level = 4;
    area.directions = {{1, 2}, {1, 3}, {2, 3}};
    area.correlation = {
        {Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)}, {Rat(0), Rat(0), Rat(1)}};
    area.drift = TensorSeries<Rat>(3, 4);
    area.horizon = 2.0 / 3.0;
    TensorSeries<Rat> sum_sq(3, 4);
    for (int i = 1; i <= 3; ++i)
        for (int j = i + 1; j <= 3; ++j) {
            const auto b = bracket(e(3, 4, {i}), e(3, 4, {j}));
            sum_sq += b * b;
        }
    const auto expect = exp_series(to_float(sum_sq * make_rat(1, 3)));
    CHECK(max_abs_diff(brownian_esig(area), expect) < 1e-14);

    // drift must be a Lie element
    BrownianRoughPathSpec bad = spec;
    bad.horizon = 1.0;
    bad.drift = e(2, 2, {1, 2});
    CHECK_THROWS_AS(brownian_esig(bad), std::invalid_argument);
}

namespace {

LevyTriplet compound_poisson(int level, double drift, double var, double rate) {
    LevyTriplet triplet;
    triplet.dim = 1;
    triplet.level = level;
    triplet.grid = {0.0, 1.0};
    triplet.cov_directions = {{1}};
    LevyPiece piece;
    piece.drift = TensorSeries<double>(1, level);
    piece.drift.at(1, 0) = drift;
    piece.cov = {{var}};
    TensorSeries<double> up(1, level), down(1, level);
    up.at(1, 0) = 1.0;
    down.at(1, 0) = -1.0;
    piece.jumps = {{rate / 2, up}, {rate / 2, down}};
    triplet.pieces.push_back(piece);
    return triplet;
}

}  // namespace

TEST_CASE("levy eta") {
    // no jumps, b = 0, Sigma = I at level 2: eta = 1/2 I
    LevyTriplet brown;
    brown.dim = 2;
    brown.level = 3;
    brown.grid = {0.0, 1.0};
    brown.cov_directions = {{1}, {2}};
    LevyPiece piece;
    piece.drift = TensorSeries<double>(2, 3);
    piece.cov = {{1.0, 0.0}, {0.0, 1.0}};
    brown.pieces.push_back(piece);
    TensorSeries<double> eye(2, 3);
    eye.at(2, 0) = 1.0;
    eye.at(2, 3) = 1.0;
    CHECK(max_abs_diff(levy_eta(brown, 0.0), eye * 0.5) < 1e-15);

    // single big jump: the small-jump compensator drops out
    LevyTriplet big;
    big.dim = 1;
    big.level = 3;
    big.grid = {0.0, 1.0};
    LevyPiece bp;
    bp.drift = TensorSeries<double>(1, 3);
    TensorSeries<double> x(1, 3);
    x.at(1, 0) = 2.0;  // |x| = 2 > 1
    bp.jumps = {{0.7, x}};
    big.pieces.push_back(bp);
    const auto eta = levy_eta(big, 0.5);
    const auto expect =
        (exp_series(x) - TensorSeries<double>::unit(1, 3)) * 0.7;
    CHECK(max_abs_diff(eta, expect) < 1e-15);

    // compound Poisson +-1, total rate lambda: eta = lambda (cosh(e1) - 1)
    const double lambda = 0.8;
    const auto cp = compound_poisson(4, 0.0, 0.0, lambda);
    TensorSeries<double> e1(1, 4);
    e1.at(1, 0) = 1.0;
    const auto cosh1 =
        (exp_series(e1) + exp_series(-e1)) * 0.5 - TensorSeries<double>::unit(1, 4);
    CHECK(max_abs_diff(levy_eta(cp, 0.0), cosh1 * lambda) < 1e-15);
}

TEST_CASE("levy expected signature") {
    // constant eta: mu_t = exp((T-t) eta), and both routes agree to O(h^2)
    const auto cp = compound_poisson(6, 0.25, 0.5, 1.0);
    const auto eta = levy_eta(cp, 0.0);
    const double h = 1.0 / 512;
    const auto quad = levy_expected_signature(cp, 0.0, 1.0, h);
    const auto path = levy_expected_signature_path(cp, 0.0, 1.0);
    CHECK(max_abs_diff(path, exp_series(eta)) < 1e-13);
    CHECK(max_abs_diff(quad, path) < 10 * h * h);

    // pure Brownian triplet reduces to the gaussian martingale closed form
    LevyTriplet brown;
    brown.dim = 2;
    brown.level = 4;
    brown.grid = {0.0, 1.0};
    brown.cov_directions = {{1}, {2}};
    LevyPiece piece;
    piece.drift = TensorSeries<double>(2, 4);
    piece.cov = {{1.0, 0.3}, {0.3, 0.5}};
    brown.pieces.push_back(piece);

    GaussianMartingaleSpec g;
    g.dim = 2;
    g.level = 4;
    g.grid = {0.0, 1.0};
    // sigma with sigma sigma^T = cov above
    // use the symmetric square root
    const auto root = symmetric_sqrt(piece.cov);
    g.sigma = {root};
    CHECK(max_abs_diff(levy_expected_signature(brown, 0.0, 1.0, h),
                       gaussian_moments(g, 0.0, h)) < 1e-10);

    CHECK_THROWS_AS(levy_expected_signature(cp, 0.0, 1.0, 0.0), std::invalid_argument);

    // exp(cumulants) = moments on the same triplet
    const auto kappa = magnus_ode_cumulants([&](double u) { return levy_eta(cp, u); }, 0.0, 1.0,
                                            h, 1, 6);
    CHECK(max_abs_diff(exp_series(kappa), quad) < 10 * h * h);
}

TEST_CASE("magnus ODE cumulants") {
    const int d = 2, N = 4;
    // constant eta: kappa_t = (T-t) eta
    std::mt19937_64 rng(5);
    const auto eta0 = to_float(random_rational_series(rng, d, N));
    auto const_eta = [&](double) { return eta0; };
    const auto kappa = magnus_ode_cumulants(const_eta, 0.25, 1.0, 1.0 / 128, d, N);
    CHECK(max_abs_diff(kappa, eta0 * 0.75) < 1e-12);

    // piecewise-constant eta on two intervals recovers BCH as h -> 0
    const auto a = random_rational_series(rng, d, N);
    const auto b = random_rational_series(rng, d, N);
    auto two_eta = [&](double u) { return to_float(u < 0.5 ? a : b); };
    const double h = 1.0 / 1024;
    const auto kap2 = magnus_ode_cumulants(two_eta, 0.0, 1.0, h, d, N);
    const auto bch = to_float(bch_exact(a * make_rat(1, 2), b * make_rat(1, 2)));
    CHECK(max_abs_diff(kap2, bch) < 10 * h * h);

    // exp(magnus kappa) matches the generator quadrature on a smooth eta
    auto smooth = [&](double u) { return eta0 * (1.0 + 0.5 * u) + to_float(a) * (u * u); };
    const auto points = make_time_grid(0.0, 1.0, h, {});
    std::vector<TensorSeries<double>> gens;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        gens.push_back(smooth(0.5 * (points[i] + points[i + 1])));
    const auto mu = backward_generator_quadrature(
        [&](std::size_t i) -> const TensorSeries<double>& { return gens[i]; }, points, d, N);
    const auto kap3 = magnus_ode_cumulants(smooth, 0.0, 1.0, h, d, N);
    CHECK(max_abs_diff(exp_series(kap3), mu.front()) < 10 * h * h);
}

TEST_CASE("radius bound") {
    const auto one = TensorSeries<double>::unit(2, 4);
    for (const auto& rb : radius_bound_check(one, {0.0, 0.0, 0.0, 0.0, 0.0}, {0.5, 1.0, 2.0})) {
        CHECK(rb.holds);
        CHECK(rb.lhs == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(radius_bound_check(one, {}, {0.0}), std::invalid_argument);

    // Brownian eta = 1/2 I_d at N = 8, lambda in {1/2, 1, 2}
    const int N = 8;
    TensorSeries<double> eta(2, N);
    eta.at(2, 0) = 0.5;
    eta.at(2, 3) = 0.5;
    const auto mu = exp_series(eta);
    for (const auto& rb : radius_bound_check(mu, level_norms(eta), {0.5, 1.0, 2.0})) {
        CHECK(rb.holds);
        CHECK(rb.lhs <= rb.rhs);
    }
}
