#include "sigkit/verify.hpp"

#include <algorithm>

#include "sigkit/filtration_tree.hpp"
#include "sigkit/lie_ops.hpp"
#include "sigkit/multivariate.hpp"
#include "sigkit/serialize.hpp"
#include "sigkit/signatures.hpp"

namespace sigkit {

const std::vector<std::string> kVerifySuites{"algebra", "bch",          "chen",
                                             "tree",    "multivariate", "radius"};

TensorSeries<Rat> random_rational_series(std::mt19937_64& rng, int dim, int level, bool t_zero,
                                         int coeff_range) {
    std::uniform_int_distribution<long> num(-coeff_range, coeff_range);
    std::uniform_int_distribution<long> den(1, 3);
    TensorSeries<Rat> x(dim, level);
    for (int k = t_zero ? 1 : 0; k <= level; ++k)
        for (std::size_t i = 0; i < pow_size(dim, k); ++i) x.at(k, i) = make_rat(num(rng), den(rng));
    return x;
}

namespace {

struct SuiteBuilder {
    SuiteReport report;

    void exact(const std::string& name, bool ok, const std::string& detail = "") {
        report.checks.push_back({name, ok, ok ? 0.0 : 1.0, detail});
    }

    template <class S>
    void exact_zero(const std::string& name, const TensorSeries<S>& residual,
                    const std::string& detail = "") {
        const double r = max_abs_coeff(residual);
        report.checks.push_back({name, residual.is_zero(), r, detail});
    }

    void tolerance(const std::string& name, double residual, double bound,
                   const std::string& detail = "") {
        report.checks.push_back({name, residual <= bound, residual, detail});
    }

    SuiteReport finish(const std::string& suite) {
        report.suite = suite;
        report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                                    [](const CheckResult& c) { return c.passed; });
        return std::move(report);
    }
};

TensorSeries<Rat> random_lie_element(std::mt19937_64& rng,
                                     const std::vector<LyndonBasisElement>& basis, int dim,
                                     int level) {
    std::uniform_int_distribution<long> num(-2, 2);
    std::uniform_int_distribution<long> den(1, 2);
    TensorSeries<Rat> x(dim, level);
    for (const auto& e : basis) x += e.bracketing * make_rat(num(rng), den(rng));
    return x;
}

SuiteReport run_algebra(const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    SuiteBuilder b;
    const int d = opt.dim, N = opt.level;

    bool assoc = true, grading = true, roundtrip = true, trunc = true, morph = true,
         antisym = true, jacobi = true;
    for (int it = 0; it < opt.count; ++it) {
        const auto x = random_rational_series(rng, d, N, false);
        const auto y = random_rational_series(rng, d, N, false);
        const auto z = random_rational_series(rng, d, N, false);
        assoc = assoc && ((x * y) * z == x * (y * z));

        // degree-n of a product only sees degrees <= n of the factors
        for (int n = 0; n <= N && grading; ++n) {
            const auto masked = extend(truncate(x, n), N) * extend(truncate(y, n), N);
            grading = component(x * y, n) == component(masked, n);
        }

        auto x0 = random_rational_series(rng, d, N);
        auto s1 = random_rational_series(rng, d, N);
        s1.at(0, 0) = 1;
        roundtrip = roundtrip && log_series(exp_series(x0)) == x0 &&
                    exp_series(log_series(s1)) == s1 &&
                    group_inverse(s1) * s1 == TensorSeries<Rat>::unit(d, N) &&
                    group_inverse(exp_series(x0)) == exp_series(-x0);

        // compute at level N, project to n == compute at level n
        for (int n = 0; n <= N && trunc; ++n) {
            trunc = trunc && truncate(x * y, n) == truncate(x, n) * truncate(y, n);
            trunc = trunc && truncate(exp_series(x0), n) == exp_series(truncate(x0, n));
            trunc = trunc && truncate(log_series(s1), n) == log_series(truncate(s1, n));
            trunc = trunc && truncate(group_inverse(s1), n) == group_inverse(truncate(s1, n));
        }

        const Rat lambda = make_rat(3, 2);
        morph = morph && dilate(x * y, lambda) == dilate(x, lambda) * dilate(y, lambda);

        const auto y0 = random_rational_series(rng, d, N);
        const auto z0 = random_rational_series(rng, d, N);
        antisym = antisym && bracket(x0, x0).is_zero() &&
                  bracket(x0, y0) == -bracket(y0, x0);
        const auto jac = bracket(x0, bracket(y0, z0)) + bracket(y0, bracket(z0, x0)) +
                         bracket(z0, bracket(x0, y0));
        jacobi = jacobi && jac.is_zero();
    }
    b.exact("associativity", assoc);
    b.exact("grading", grading);
    b.exact("exp_log_inverse_roundtrips", roundtrip);
    b.exact("truncation_consistency", trunc);
    b.exact("dilation_morphism", morph);
    b.exact("bracket_antisymmetry", antisym);
    b.exact("jacobi_identity", jacobi);
    return b.finish("algebra");
}

SuiteReport run_bch(const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    SuiteBuilder b;
    const int d = opt.dim, N = opt.level;
    const auto basis = lyndon_basis(d, N);

    bool hg = true, psi = true, chain = true, shadow = true, lie = true;
    for (int it = 0; it < opt.count; ++it) {
        const auto x = random_rational_series(rng, d, N);
        const auto v = random_rational_series(rng, d, N);
        hg = hg && apply_H(x, apply_G(x, v)) == v;

        const auto y = random_rational_series(rng, d, N);
        const auto ref = bch_exact(x, y);
        psi = psi && bch_psi(x, y) == ref;
        chain = chain && bch_log_signature({x, y}) == ref;

        const auto z = random_rational_series(rng, d, N);
        shadow = shadow && bch_exact(bch_exact(x, y), z) == bch_exact(x, bch_exact(y, z));

        const auto lx = random_lie_element(rng, basis, d, N);
        const auto ly = random_lie_element(rng, basis, d, N);
        const auto flags = dynkin_is_lie(bch_exact(lx, ly));
        lie = lie && std::all_of(flags.begin(), flags.end(), [](bool f) { return f; });
    }
    b.exact("h_of_g_identity", hg);
    b.exact("bch_psi_equals_bch_exact", psi);
    b.exact("bch_iterated_two_increments", chain);
    b.exact("bch_associativity_shadow", shadow);
    b.exact("bch_lie_closure_dynkin", lie);
    return b.finish("bch");
}

SuiteReport run_chen(const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    SuiteBuilder b;
    const int d = opt.dim, N = opt.level;
    const std::size_t steps = 8;

    bool chen = true, inverse = true, equivariance = true;
    for (int it = 0; it < opt.count; ++it) {
        DrivePath<Rat> path;
        path.dim = d;
        path.level = N;
        for (std::size_t j = 0; j < steps; ++j)
            path.increments.push_back(random_rational_series(rng, d, N));

        SignaturePrefix<Rat> prefix(path);
        for (std::size_t s = 0; s <= steps && chen; ++s)
            for (std::size_t t = s; t <= steps && chen; ++t)
                for (std::size_t u = t; u <= steps && chen; ++u)
                    chen = signature(path, s, t) * signature(path, t, u) ==
                           prefix.query(s, u);

        DrivePath<Rat> reversed;
        reversed.dim = d;
        reversed.level = N;
        for (auto it2 = path.increments.rbegin(); it2 != path.increments.rend(); ++it2)
            reversed.increments.push_back(-*it2);
        inverse = inverse && group_inverse(signature(path)) == signature(reversed);

        const Rat lambda = make_rat(-2, 3);
        DrivePath<Rat> dilated;
        dilated.dim = d;
        dilated.level = N;
        for (const auto& inc : path.increments) dilated.increments.push_back(dilate(inc, lambda));
        equivariance = equivariance && signature(dilated) == dilate(signature(path), lambda);
    }
    b.exact("chen_relation_all_triples", chen);
    b.exact("reversal_inverse", inverse);
    b.exact("dilation_equivariance", equivariance);
    return b.finish("chen");
}

SuiteReport run_tree(const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    SuiteBuilder b;

    std::vector<FiltrationTree> trees;
    std::optional<TensorSeries<Rat>> expected_root_mu;
    if (!opt.tree_input.empty()) {
        const json fixture = load_json_file(opt.tree_input);
        trees.push_back(tree_from_json(fixture));
        if (fixture.contains("expected_root_mu"))
            expected_root_mu = rational_tensor_from_json(fixture.at("expected_root_mu"));
    } else {
        RandomTreeOptions topt;
        topt.depth = opt.depth;
        topt.max_branching = opt.branching;
        topt.dim = opt.dim;
        topt.level = opt.level;
        for (int it = 0; it < opt.count; ++it) trees.push_back(make_random_tree(rng, topt));
    }

    bool match = true, residuals = true, martingale = true, tower = true;
    for (const auto& tree : trees) {
        const NodeField direct = expected_signature_direct(tree);
        const NodeField recursive = expected_signature_recursive(tree);
        for (std::size_t id = 0; id < tree.size(); ++id)
            match = match && *direct[id] == *recursive[id];

        const NodeField kappa = discrete_cumulants(tree, direct);
        for (int j = 0; j < tree.depth() && residuals; ++j) {
            const auto res = martingale_identity_residual(tree, j, kappa);
            for (int a : tree.at_level(j))
                residuals = residuals && res.basic[std::size_t(a)]->is_zero() &&
                            res.transformed[std::size_t(a)]->is_zero();
        }

        // S_j mu_j is a martingale
        const NodeField sig = realized_signature(tree);
        NodeField prod(tree.size());
        for (std::size_t id = 0; id < tree.size(); ++id) prod[id] = *sig[id] * *direct[id];
        for (int j = 0; j + 1 <= tree.depth() && martingale; ++j) {
            const NodeField stepped = cond_expect(tree, j, prod, j + 1);
            for (int a : tree.at_level(j))
                martingale = martingale && *stepped[std::size_t(a)] == *prod[std::size_t(a)];
        }

        // tower property of cond_expect on the leaf field
        NodeField leaf(tree.size());
        for (int id : tree.at_level(tree.depth()))
            leaf[std::size_t(id)] = tree.node(id).value * tree.node(id).value;
        const int mid = tree.depth() / 2;
        const NodeField two_hop =
            cond_expect(tree, 0, cond_expect(tree, mid, leaf, tree.depth()), mid);
        const NodeField one_hop = cond_expect(tree, 0, leaf, tree.depth());
        for (int a : tree.at_level(0))
            tower = tower && *two_hop[std::size_t(a)] == *one_hop[std::size_t(a)];
    }
    b.exact("recursive_equals_direct", match);
    b.exact("martingale_identity_residuals_zero", residuals);
    b.exact("signature_times_mu_is_martingale", martingale);
    b.exact("conditional_expectation_tower", tower);
    if (expected_root_mu) {
        const NodeField mu = expected_signature_direct(trees.front());
        const int root = trees.front().at_level(0).front();
        b.exact_zero("fixture_expected_root_mu", *mu[std::size_t(root)] - *expected_root_mu);
    }
    return b.finish("tree");
}

SuiteReport run_multivariate(const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    SuiteBuilder b;
    const int d = std::min(opt.dim, 2), N = opt.level;

    bool projection = true, naturality = true, oracle = true, recursion = true, additivity = true;
    for (int it = 0; it < opt.count; ++it) {
        const auto a = random_rational_series(rng, d, N, false);
        const auto c = random_rational_series(rng, d, N, false);
        projection = projection && project_sym(a * c) == project_sym(a) * project_sym(c);
        const auto a0 = random_rational_series(rng, d, N);
        projection = projection && project_sym(exp_series(a0)) == sym_exp(project_sym(a0));
        projection = projection && sym_log(sym_exp(project_sym(a0))) == project_sym(a0);
    }

    RandomTreeOptions topt;
    topt.depth = opt.depth;
    topt.max_branching = opt.branching;
    topt.dim = d;
    topt.level = N;
    topt.level_one_values_only = true;
    for (int it = 0; it < std::max(1, opt.count / 2); ++it) {
        const FiltrationTree tree = make_random_tree(rng, topt);

        // pi_Sym of tensor kappa == sym kappa
        const NodeField mu = expected_signature_direct(tree);
        const NodeField kappa = discrete_cumulants(tree, mu);
        const SymNodeField skap = multivariate_cumulants(tree, 0);
        for (int a : tree.at_level(0))
            naturality =
                naturality && project_sym(*kappa[std::size_t(a)]) == *skap[std::size_t(a)];

        // classical set-partition oracle against the sym_log route, at the root
        const SymNodeField smom = multivariate_moments(tree, 0);
        const int root = tree.at_level(0).front();
        const auto moments = *smom[std::size_t(root)];
        const auto oracle_cums = classical_cumulants_from_moments(
            [&](const MultiDegree& m) { return classical_value(moments, m); }, d, N);
        const auto direct_cums = *skap[std::size_t(root)];
        for (const auto& [m, v] : oracle_cums)
            oracle = oracle && classical_value(direct_cums, m) == v;

        // discrete cumulant recursion residuals, Xi drawn from the endpoints
        SymNodeField xi(tree.size());
        for (int id : tree.at_level(tree.depth()))
            xi[std::size_t(id)] = project_sym(tree.node(id).value);
        const auto kres = discrete_K_recursion(tree, xi);
        recursion = recursion && kres.all_zero;
    }

    // independence => cumulant additivity, on a product of two coin trees
    {
        const TensorSeries<Rat> e1 = TensorSeries<Rat>::basis(1, N, {1});
        std::vector<std::pair<Rat, TensorSeries<Rat>>> coin{{make_rat(1, 2), e1},
                                                            {make_rat(1, 2), -e1}};
        const FiltrationTree tree = make_iid_tree(coin, 2);
        // Xi_a = first increment, Xi_b = second; independent by construction
        SymNodeField xa(tree.size()), xb(tree.size()), xab(tree.size());
        for (int id : tree.at_level(2)) {
            const int p = tree.node(id).parent;
            const auto first = project_sym(tree.node(p).value);
            const auto second = project_sym(tree.node(id).value - tree.node(p).value);
            xa[std::size_t(id)] = first;
            xb[std::size_t(id)] = second;
            xab[std::size_t(id)] = first + second;
        }
        const auto ka = discrete_K_recursion(tree, xa).K;
        const auto kb = discrete_K_recursion(tree, xb).K;
        const auto kab = discrete_K_recursion(tree, xab).K;
        const int root = tree.at_level(0).front();
        additivity = *kab[std::size_t(root)] == *ka[std::size_t(root)] + *kb[std::size_t(root)];
    }

    b.exact("projection_is_algebra_morphism", projection);
    b.exact("projection_naturality_kappa", naturality);
    b.exact("set_partition_oracle_agreement", oracle);
    b.exact("cumulant_recursion_residuals_zero", recursion);
    b.exact("independence_additivity", additivity);
    return b.finish("multivariate");
}

SuiteReport run_radius(const VerifyOptions& opt) {
    SuiteBuilder b;

    // Brownian eta = 1/2 I_d: both sides from the Fawcett closed form.
    {
        const int d = 2, N = std::max(opt.level, 4);
        TensorSeries<double> eta(d, N);
        for (int i = 0; i < d; ++i) eta.at(2, std::size_t(i) * std::size_t(d) + std::size_t(i)) = 0.5;
        const TensorSeries<double> mu = exp_series(eta);  // T = 1
        const auto eta_norms = level_norms(eta);
        const auto bounds = radius_bound_check(mu, eta_norms, opt.lambdas);
        for (const auto& rb : bounds)
            b.tolerance("brownian_lambda_" + std::to_string(rb.lambda), rb.lhs, rb.rhs,
                        "lhs=" + std::to_string(rb.lhs) + " rhs=" + std::to_string(rb.rhs));
    }

    // Compound Poisson with drift and diffusion in d = 1.
    {
        const int N = std::max(opt.level, 4);
        LevyTriplet triplet;
        triplet.dim = 1;
        triplet.level = N;
        triplet.grid = {0.0, 1.0};
        triplet.cov_directions = {{1}};
        LevyPiece piece;
        piece.drift = TensorSeries<double>(1, N);
        piece.drift.at(1, 0) = 0.25;
        piece.cov = {{0.5}};
        TensorSeries<double> up(1, N), down(1, N);
        up.at(1, 0) = 1.0;
        down.at(1, 0) = -1.0;
        piece.jumps = {{0.5, up}, {0.5, down}};
        triplet.pieces.push_back(piece);

        const auto mu = levy_expected_signature(triplet, 0.0, 1.0, opt.step);
        const auto integrals = levy_eta_level_integrals(triplet, 0.0, 1.0);
        for (const auto& rb : radius_bound_check(mu, integrals, opt.lambdas))
            b.tolerance("levy_lambda_" + std::to_string(rb.lambda), rb.lhs, rb.rhs,
                        "lhs=" + std::to_string(rb.lhs) + " rhs=" + std::to_string(rb.rhs));
    }
    return b.finish("radius");
}

}  // namespace

SuiteReport run_verify_suite(const std::string& suite, const VerifyOptions& opt) {
    if (suite == "algebra") return run_algebra(opt);
    if (suite == "bch") return run_bch(opt);
    if (suite == "chen") return run_chen(opt);
    if (suite == "tree") return run_tree(opt);
    if (suite == "multivariate") return run_multivariate(opt);
    if (suite == "radius") return run_radius(opt);
    throw std::invalid_argument("unknown verify suite '" + suite + "'");
}

nlohmann::json to_json(const SuiteReport& report) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.checks) {
        nlohmann::json entry{{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}};
        if (!c.detail.empty()) entry["detail"] = c.detail;
        checks.push_back(std::move(entry));
    }
    return nlohmann::json{{"suite", report.suite}, {"passed", report.passed}, {"checks", checks}};
}

}  // namespace sigkit
