#include "sigkit/multivariate.hpp"

#include "sigkit/compositions.hpp"

namespace sigkit {

namespace {

const SymSeries<Rat>& require_defined(const SymNodeField& field, int id) {
    const auto& e = field.at(std::size_t(id));
    if (!e) throw std::invalid_argument("SymNodeField: undefined entry at a required node");
    return *e;
}

// Backward average of a leaf field down to every node (tower property).
SymNodeField sweep_all(const FiltrationTree& tree, SymNodeField field, int d, int N) {
    for (int m = tree.depth() - 1; m >= 0; --m) {
        for (int a : tree.at_level(m)) {
            SymSeries<Rat> acc(d, N);
            for (int c : tree.node(a).children)
                acc += require_defined(field, c) * tree.node(c).prob;
            field[std::size_t(a)] = std::move(acc);
        }
    }
    return field;
}

SymSeries<Rat> level1_projection(const TensorSeries<Rat>& value) {
    for (int k = 2; k <= value.level(); ++k)
        for (const auto& v : value.degree(k))
            if (v != 0)
                throw std::invalid_argument(
                    "multivariate: tree values must have level-1 components only");
    return project_sym(value);
}

}  // namespace

SymNodeField multivariate_moments(const FiltrationTree& tree, int j) {
    if (j < 0 || j > tree.depth()) throw std::invalid_argument("multivariate_moments: bad level");
    const int d = tree.dim(), N = tree.level();

    // exp(Xi^) per leaf relative to the root, then conditional expectations by
    // backward averaging; the time-j recentering divides by exp(X_j^).
    SymNodeField leaf(tree.size());
    for (int id : tree.at_level(tree.depth()))
        leaf[std::size_t(id)] = sym_exp(level1_projection(tree.node(id).value));
    SymNodeField all = sweep_all(tree, std::move(leaf), d, N);

    SymNodeField out(tree.size());
    for (int a : tree.at_level(j)) {
        const SymSeries<Rat> recenter = sym_exp(-level1_projection(tree.node(a).value));
        out[std::size_t(a)] = recenter * require_defined(all, a);
    }
    return out;
}

SymNodeField multivariate_cumulants(const FiltrationTree& tree, int j) {
    SymNodeField mom = multivariate_moments(tree, j);
    SymNodeField out(tree.size());
    for (int a : tree.at_level(j)) out[std::size_t(a)] = sym_log(require_defined(mom, a));
    return out;
}

std::map<MultiDegree, Rat> classical_cumulants_from_moments(
    const std::function<Rat(const MultiDegree&)>& moment, int dim, int max_degree) {
    if (moment(MultiDegree(std::size_t(dim), 0)) != 1)
        throw std::invalid_argument("classical_cumulants_from_moments: empty moment must be 1");

    std::map<MultiDegree, Rat> out;
    // enumerate multidegrees of total degree 1..max_degree
    MultiDegree m(std::size_t(dim), 0);
    std::function<void(int, int)> walk = [&](int pos, int remaining) {
        if (pos == dim) {
            const int n = max_degree - remaining;
            if (n == 0) return;
            // letters of the multiset, one per unit of exponent
            std::vector<int> letters;
            for (int i = 0; i < dim; ++i)
                for (int e = 0; e < m[std::size_t(i)]; ++e) letters.push_back(i);
            Rat kappa = 0;
            for (const auto& rgs : set_partitions(n)) {
                int blocks = 0;
                for (int b : rgs) blocks = std::max(blocks, b + 1);
                Rat term = (blocks % 2 == 1 ? Rat(1) : Rat(-1)) * rat_factorial(blocks - 1);
                for (int b = 0; b < blocks; ++b) {
                    MultiDegree sub(std::size_t(dim), 0);
                    for (std::size_t i = 0; i < rgs.size(); ++i)
                        if (rgs[i] == b) ++sub[std::size_t(letters[i])];
                    term *= moment(sub);
                }
                kappa += term;
            }
            out[m] = kappa;
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            m[std::size_t(pos)] = e;
            walk(pos + 1, remaining - e);
        }
        m[std::size_t(pos)] = 0;
    };
    walk(0, max_degree);
    return out;
}

KRecursionResult discrete_K_recursion(const FiltrationTree& tree, const SymNodeField& xi) {
    const int J = tree.depth();
    if (xi.size() != tree.size())
        throw std::invalid_argument("discrete_K_recursion: xi field size mismatch");
    int d = 0, N = 0;
    for (int id : tree.at_level(J)) {
        const SymSeries<Rat>& x = require_defined(xi, id);
        if (!x.in_s0()) throw std::invalid_argument("discrete_K_recursion: Xi must lie in S_0");
        d = x.dim();
        N = x.level();
    }
    const SymSeries<Rat> unit = SymSeries<Rat>::unit(d, N);

    KRecursionResult res;

    // K_j = sym_log E(e^Xi | G_j), every node.
    SymNodeField e_xi(tree.size());
    for (int id : tree.at_level(J)) e_xi[std::size_t(id)] = sym_exp(require_defined(xi, id));
    SymNodeField m = sweep_all(tree, std::move(e_xi), d, N);
    res.K.assign(tree.size(), std::nullopt);
    for (std::size_t id = 0; id < tree.size(); ++id)
        res.K[id] = sym_log(require_defined(m, int(id)));

    // E(Xi | G_j), every node.
    SymNodeField xi_leaf(tree.size());
    for (int id : tree.at_level(J)) xi_leaf[std::size_t(id)] = require_defined(xi, id);
    SymNodeField e_xi_cond = sweep_all(tree, std::move(xi_leaf), d, N);

    // V_a = E[sum over steps below a of W_child | G_a], accumulated leaf-up,
    // with three choices of W for the three identities.
    auto accumulate = [&](const std::function<SymSeries<Rat>(int)>& w) {
        SymNodeField v(tree.size());
        for (int id : tree.at_level(J)) v[std::size_t(id)] = SymSeries<Rat>(d, N);
        for (int lvl = J - 1; lvl >= 0; --lvl)
            for (int a : tree.at_level(lvl)) {
                SymSeries<Rat> acc(d, N);
                for (int c : tree.node(a).children)
                    acc += (w(c) + require_defined(v, c)) * tree.node(c).prob;
                v[std::size_t(a)] = std::move(acc);
            }
        return v;
    };

    auto delta_K = [&](int c) {
        return require_defined(res.K, c) - require_defined(res.K, tree.node(c).parent);
    };

    // full recursion: W = e^{dK} - 1 - dK
    SymNodeField v_full = accumulate([&](int c) {
        const SymSeries<Rat> dk = delta_K(c);
        return sym_exp(dk) - unit - dk;
    });
    // energy identity: W = 1/2 (dK^(1))^2
    SymNodeField v_2 = accumulate([&](int c) {
        const SymSeries<Rat> dk1 = sym_component(delta_K(c), 1);
        return (dk1 * dk1) * make_rat(1, 2);
    });
    // cubic identity: W = 1/6 (dK^(1))^3 + dK^(1) dK^(2)
    SymNodeField v_3 = accumulate([&](int c) {
        const SymSeries<Rat> dk = delta_K(c);
        const SymSeries<Rat> dk1 = sym_component(dk, 1);
        const SymSeries<Rat> dk2 = sym_component(dk, 2);
        return (dk1 * dk1 * dk1) * make_rat(1, 6) + dk1 * dk2;
    });

    res.eq_residual.assign(tree.size(), std::nullopt);
    res.level2_residual.assign(tree.size(), std::nullopt);
    res.level3_residual.assign(tree.size(), std::nullopt);
    res.all_zero = true;
    for (std::size_t id = 0; id < tree.size(); ++id) {
        const SymSeries<Rat>& k = require_defined(res.K, int(id));
        const SymSeries<Rat>& exi = require_defined(e_xi_cond, int(id));
        SymSeries<Rat> r_full = k - exi - require_defined(v_full, int(id));
        SymSeries<Rat> r2 =
            sym_component(k, 2) - sym_component(exi, 2) - sym_component(require_defined(v_2, int(id)), 2);
        SymSeries<Rat> r3 =
            sym_component(k, 3) - sym_component(exi, 3) - sym_component(require_defined(v_3, int(id)), 3);
        if (!r_full.is_zero() || !r2.is_zero() || !r3.is_zero()) res.all_zero = false;
        res.eq_residual[id] = std::move(r_full);
        res.level2_residual[id] = std::move(r2);
        res.level3_residual[id] = std::move(r3);
    }
    return res;
}

namespace {

// Trapezoid integral of (ss^T)_ij over [t, T] as the degree-2 symmetric
// tensor sum_{i,j} (.) e^_i e^_j. Exact here because sigma is constant per
// grid cell; kept as quadrature to mirror the diamond definition.
SymSeries<double> qv_integral(const GaussianMartingaleSpec& spec, double t, double h, int level) {
    const int d = spec.dim;
    SymSeries<double> acc(d, level >= 2 ? level : 2);
    const double T = spec.horizon();
    if (t >= T) return acc;
    const auto points = make_time_grid(t, T, h, spec.grid);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double dt = points[i + 1] - points[i];
        const auto& s = spec.sigma[spec.piece_at(0.5 * (points[i] + points[i + 1]))];
        const std::size_t m = s.empty() ? 0 : s.front().size();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double v = 0.0;
                for (std::size_t k = 0; k < m; ++k) v += s[std::size_t(a)][k] * s[std::size_t(b)][k];
                if (v == 0.0) continue;
                MultiDegree key(std::size_t(d), 0);
                ++key[std::size_t(a)];
                ++key[std::size_t(b)];
                acc.add_to(key, v * dt);
            }
    }
    return acc;
}

}  // namespace

SymSeries<double> gaussian_diamond_cumulants(const GaussianMartingaleSpec& spec,
                                             const SymSeries<double>& xi_extra, double t,
                                             double h) {
    spec.validate();
    if (!(h > 0)) throw std::invalid_argument("gaussian_diamond_cumulants: step must be positive");
    const int N = xi_extra.level();
    if (!xi_extra.in_s0())
        throw std::invalid_argument("gaussian_diamond_cumulants: xi_extra must lie in S_0");

    // K^(n) = E_t Xi^(n) + 1/2 sum_k (K^(k) <> K^(n-k)); with deterministic
    // brackets only the (1,1) diamond survives and equals int_t^T ss^T du.
    if (xi_extra.dim() != spec.dim)
        throw std::invalid_argument("gaussian_diamond_cumulants: xi_extra dim mismatch");
    SymSeries<double> K(xi_extra.dim(), N);
    K += xi_extra;  // E_t of the deterministic extras; the centered endpoint adds 0 at degree 1
    if (N >= 2) {
        const SymSeries<double> diamond11 = qv_integral(spec, t, h, N);
        for (const auto& [m, v] : diamond11.data()) K.add_to(m, 0.5 * v);
    }
    return K;
}

SymSeries<double> ito_compensator(const GaussianMartingaleSpec& spec, double t, double h,
                                  int level) {
    const SymSeries<double> comp = qv_integral(spec, t, h, level);
    SymSeries<double> out(spec.dim, comp.level());
    for (const auto& [m, v] : comp.data()) out.add_to(m, -0.5 * v);
    return out;
}

}  // namespace sigkit
