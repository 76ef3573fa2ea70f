#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "sigkit/monte_carlo.hpp"

using namespace sigkit;

TEST_CASE("counter-based seeding") {
    SeedSpec seeds{12345};
    CHECK(seeds.derive(0) == seeds.derive(0));
    CHECK(seeds.derive(0) != seeds.derive(1));
    SeedSpec other{12346};
    CHECK(seeds.derive(0) != other.derive(0));
}

TEST_CASE("rng basics") {
    Rng rng(7);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sumsq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sumsq / n - 1.0) < 0.05);

    double events = 0;
    for (int i = 0; i < n; ++i) events += rng.poisson(0.7);
    CHECK(std::abs(events / n - 0.7) < 0.03);
}

TEST_CASE("symmetric square root") {
    const auto r = symmetric_sqrt({{4.0, 0.0}, {0.0, 9.0}});
    CHECK(r[0][0] == doctest::Approx(2.0));
    CHECK(r[1][1] == doctest::Approx(3.0));
    CHECK(r[0][1] == doctest::Approx(0.0));

    // PSD-singular (perfectly correlated directions) is fine
    const auto s = symmetric_sqrt({{1.0, 1.0}, {1.0, 1.0}});
    double prod = 0.0;
    for (int k = 0; k < 2; ++k) prod += s[0][k] * s[1][k];
    CHECK(prod == doctest::Approx(1.0));

    CHECK_THROWS_AS(symmetric_sqrt({{1.0, 2.0}, {2.0, 1.0}}), std::invalid_argument);
}

namespace {

BrownianRoughPathSpec standard_bm(int dim, int level) {
    BrownianRoughPathSpec spec;
    spec.dim = dim;
    spec.lie_level = 1;
    spec.level = level;
    for (int i = 1; i <= dim; ++i) spec.directions.push_back({i});
    spec.correlation.assign(std::size_t(dim), std::vector<Rat>(std::size_t(dim), Rat(0)));
    for (int i = 0; i < dim; ++i) spec.correlation[std::size_t(i)][std::size_t(i)] = 1;
    spec.drift = TensorSeries<Rat>(dim, level);
    spec.horizon = 1.0;
    return spec;
}

}  // namespace

TEST_CASE("brownian development sampler") {
    // zero correlation and drift: constant path, signature 1
    auto flat = standard_bm(2, 2);
    flat.correlation = {{Rat(0), Rat(0)}, {Rat(0), Rat(0)}};
    const auto path = sample_brownian_development(flat, 16, 9);
    CHECK(marcus_signature(path) == TensorSeries<double>::unit(2, 2));

    // d = 1: increment variance T/steps
    auto line = standard_bm(1, 2);
    const int steps = 8;
    double sumsq = 0.0;
    const int n = 4000;
    SeedSpec seeds{11};
    for (int i = 0; i < n; ++i) {
        const auto p = sample_brownian_development(line, steps, seeds.derive(std::uint64_t(i)));
        sumsq += p.increments[0].coeff({1}) * p.increments[0].coeff({1});
    }
    CHECK(sumsq / n == doctest::Approx(1.0 / steps).epsilon(0.1));
}

TEST_CASE("random walk sampler") {
    TensorSeries<double> e1(1, 2);
    e1.at(1, 0) = 1.0;
    AtomDistribution<double> one_atom{{{Rat(1), e1}}};
    const auto p = sample_random_walk(one_atom, 5, 3);
    CHECK(p.steps() == 5);
    CHECK(marcus_signature(p) == power(exp_series(e1), 5));

    const auto empty = sample_random_walk(one_atom, 0, 3);
    CHECK(empty.steps() == 0);
    CHECK(marcus_signature(empty) == TensorSeries<double>::unit(1, 2));
}

TEST_CASE("levy sampler") {
    LevyTriplet zero;
    zero.dim = 1;
    zero.level = 3;
    zero.grid = {0.0, 1.0};
    LevyPiece piece;
    piece.drift = TensorSeries<double>(1, 3);
    zero.pieces.push_back(piece);
    const auto p = sample_levy(zero, 10, 5);
    CHECK(marcus_signature(p) == TensorSeries<double>::unit(1, 3));

    // pure drift: signature = exp(T b)
    LevyTriplet drift;
    drift.dim = 1;
    drift.level = 3;
    drift.grid = {0.0, 1.0};
    LevyPiece dp;
    dp.drift = TensorSeries<double>(1, 3);
    dp.drift.at(1, 0) = 0.5;
    drift.pieces.push_back(dp);
    const auto q = sample_levy(drift, 10, 5);
    CHECK(max_abs_diff(marcus_signature(q), exp_series(dp.drift)) < 1e-12);

    // jump tags are present when jumps fire
    LevyTriplet jumpy;
    jumpy.dim = 1;
    jumpy.level = 2;
    jumpy.grid = {0.0, 1.0};
    LevyPiece jp;
    jp.drift = TensorSeries<double>(1, 2);
    TensorSeries<double> one_jump(1, 2);
    one_jump.at(1, 0) = 1.0;
    jp.jumps = {{50.0, one_jump}};
    jumpy.pieces.push_back(jp);
    const auto r = sample_levy(jumpy, 4, 17);
    CHECK(std::count(r.jumps.begin(), r.jumps.end(), 1) > 0);
}

TEST_CASE("estimator basics") {
    TensorSeries<double> e1(1, 3);
    e1.at(1, 0) = 0.5;
    AtomDistribution<double> fixed{{{Rat(1), e1}}};
    auto det_sampler = [&](std::uint64_t) { return sample_random_walk(fixed, 3, 0); };

    const auto est = estimate_expected_signature(det_sampler, 50, 1, 3, 1);
    CHECK(max_abs_diff(est.mean, power(exp_series(e1), 3)) < 1e-15);
    CHECK(max_abs_coeff(est.se) == 0.0);

    // antithetic pair at N = 1: mean exactly 0 at level 1
    auto antithetic = [&](std::uint64_t i) {
        DrivePath<double> p;
        p.dim = 1;
        p.level = 1;
        TensorSeries<double> inc(1, 1);
        inc.at(1, 0) = i % 2 == 0 ? 1.0 : -1.0;
        p.increments.push_back(inc);
        return p;
    };
    const auto anti = estimate_expected_signature(antithetic, 2, 1, 1, 1);
    CHECK(anti.mean.coeff({1}) == 0.0);
}

TEST_CASE("estimates are worker-count independent") {
    auto bm = standard_bm(2, 3);
    SeedSpec seeds{99};
    auto sampler = [&](std::uint64_t i) {
        return sample_brownian_development(bm, 12, seeds.derive(i));
    };
    const auto one = estimate_expected_signature(sampler, 9000, 2, 3, 1);
    const auto three = estimate_expected_signature(sampler, 9000, 2, 3, 3);
    CHECK(max_abs_diff(one.mean, three.mean) == 0.0);
    CHECK(max_abs_diff(one.se, three.se) == 0.0);
}

TEST_CASE("standard error scales like one over sqrt n") {
    TensorSeries<double> e1(1, 2);
    e1.at(1, 0) = 1.0;
    AtomDistribution<double> coin{{{make_rat(1, 2), e1}, {make_rat(1, 2), -e1}}};
    SeedSpec seeds{7};
    auto sampler = [&](std::uint64_t i) { return sample_random_walk(coin, 5, seeds.derive(i)); };

    const auto small = estimate_expected_signature(sampler, 10000, 1, 2, 1);
    const auto large = estimate_expected_signature(sampler, 40000, 1, 2, 1);
    const double ratio = small.se.coeff({1}) / large.se.coeff({1});
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.20));
}

TEST_CASE("comparison report") {
    TensorSeries<double> e1(1, 2);
    e1.at(1, 0) = 1.0;
    AtomDistribution<double> coin{{{make_rat(1, 2), e1}, {make_rat(1, 2), -e1}}};
    SeedSpec seeds{21};
    auto sampler = [&](std::uint64_t i) { return sample_random_walk(coin, 4, seeds.derive(i)); };
    const auto est = estimate_expected_signature(sampler, 5000, 1, 2, 1);

    // estimate against itself: all z = 0
    const auto self_report = compare(est, est.mean);
    CHECK(self_report.max_abs_z == 0.0);
    CHECK(!self_report.any_exact_mismatch);

    // reference from the closed form: modest z scores
    AtomDistribution<Rat> exact{{{make_rat(1, 2), TensorSeries<Rat>::basis(1, 2, {1})},
                                 {make_rat(1, 2), -TensorSeries<Rat>::basis(1, 2, {1})}}};
    const auto report = compare(est, to_float(rw_expected_signature(exact, 4, 0)));
    CHECK(report.max_abs_z < 5.0);

    // SE = 0 with a mismatch is flagged
    auto det_sampler = [&](std::uint64_t) {
        DrivePath<double> p;
        p.dim = 1;
        p.level = 2;
        p.increments.push_back(e1);
        return p;
    };
    const auto det = estimate_expected_signature(det_sampler, 10, 1, 2, 1);
    auto wrong = det.mean;
    wrong.at(1, 0) += 1.0;
    CHECK(compare(det, wrong).any_exact_mismatch);
}

TEST_CASE("discretization bias shrinks as steps double") {
    // chord interpolation biases the level-4 Fawcett coefficients by O(1/steps)
    auto bm = standard_bm(2, 4);
    TensorSeries<double> eye(2, 4);
    eye.at(2, 0) = 1.0;
    eye.at(2, 3) = 1.0;
    const auto ref = exp_series(eye * 0.5);

    auto level4_bias = [&](int steps) {
        SeedSpec seeds{31};
        auto sampler = [&](std::uint64_t i) {
            return sample_brownian_development(bm, steps, seeds.derive(i));
        };
        const auto est = estimate_expected_signature(sampler, 40000, 2, 4, 0);
        double worst = 0.0;
        for (std::size_t i = 0; i < est.mean.degree(4).size(); ++i)
            worst = std::max(worst, std::abs(est.mean.degree(4)[i] - ref.degree(4)[i]));
        return worst;
    };
    const double coarse = level4_bias(4);
    const double fine = level4_bias(16);
    CHECK(fine < 0.6 * coarse);
}

TEST_CASE("fawcett smoke run") {
    auto bm = standard_bm(2, 3);
    SeedSpec seeds{2024};
    auto sampler = [&](std::uint64_t i) {
        return sample_brownian_development(bm, 30, seeds.derive(i));
    };
    const auto est = estimate_expected_signature(sampler, 4000, 2, 3, 1);
    TensorSeries<double> eye(2, 3);
    eye.at(2, 0) = 1.0;
    eye.at(2, 3) = 1.0;
    const auto report = compare(est, exp_series(eye * 0.5));
    CHECK(report.max_abs_z < 5.0);
}
