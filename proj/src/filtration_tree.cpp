#include "sigkit/filtration_tree.hpp"

#include "sigkit/compositions.hpp"
#include "sigkit/lie_ops.hpp"

namespace sigkit {

FiltrationTree::FiltrationTree(int dim, int level, std::vector<TreeNode> nodes)
    : dim_(dim), level_(level), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("FiltrationTree: no nodes");
    for (auto& n : nodes_) n.children.clear();

    int root = -1;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        TreeNode& n = nodes_[id];
        if (n.parent < 0) {
            if (root >= 0) throw std::invalid_argument("FiltrationTree: multiple roots");
            root = int(id);
            n.level = 0;
        } else {
            if (n.parent >= int(nodes_.size()) || n.parent == int(id))
                throw std::invalid_argument("FiltrationTree: bad parent link");
            if (std::size_t(n.parent) >= id)
                throw std::invalid_argument("FiltrationTree: nodes must be listed parent-first");
            n.level = nodes_[std::size_t(n.parent)].level + 1;
            nodes_[std::size_t(n.parent)].children.push_back(int(id));
            if (n.prob <= 0)
                throw std::invalid_argument("FiltrationTree: transition probabilities must be > 0");
        }
        if (n.value.dim() != dim_ || n.value.level() != level_)
            throw std::invalid_argument("FiltrationTree: node value dim/level mismatch");
        if (!n.value.in_t0())
            throw std::invalid_argument("FiltrationTree: node values must lie in T_0");
        if (n.level > depth_) depth_ = n.level;
    }
    if (root < 0) throw std::invalid_argument("FiltrationTree: missing root");

    by_level_.assign(std::size_t(depth_) + 1, {});
    for (std::size_t id = 0; id < nodes_.size(); ++id)
        by_level_[std::size_t(nodes_[id].level)].push_back(int(id));

    for (const auto& n : nodes_) {
        if (n.level < depth_) {
            if (n.children.empty())
                throw std::invalid_argument("FiltrationTree: interior node without children");
            Rat total = 0;
            for (int c : n.children) total += nodes_[std::size_t(c)].prob;
            if (total != 1)
                throw std::invalid_argument(
                    "FiltrationTree: child probabilities must sum exactly to 1");
        } else if (!n.children.empty()) {
            throw std::invalid_argument("FiltrationTree: leaves must all sit at the final level");
        }
    }
}

TensorSeries<Rat> FiltrationTree::increment(int child_id) const {
    const TreeNode& c = nodes_.at(std::size_t(child_id));
    if (c.parent < 0) throw std::invalid_argument("FiltrationTree: root has no increment");
    return c.value - nodes_[std::size_t(c.parent)].value;
}

namespace {

const TensorSeries<Rat>& require_defined(const NodeField& field, int id) {
    const auto& e = field.at(std::size_t(id));
    if (!e) throw std::invalid_argument("NodeField: undefined entry at a required node");
    return *e;
}

// One-step backward averaging m+1 -> m, for every level m in [j, k).
NodeField sweep_down(const FiltrationTree& tree, int j, NodeField field, int k) {
    for (int m = k - 1; m >= j; --m) {
        for (int a : tree.at_level(m)) {
            TensorSeries<Rat> acc(tree.dim(), tree.level());
            for (int c : tree.node(a).children)
                acc += require_defined(field, c) * tree.node(c).prob;
            field[std::size_t(a)] = std::move(acc);
        }
    }
    return field;
}

}  // namespace

NodeField cond_expect(const FiltrationTree& tree, int j, const NodeField& field, int k) {
    if (j < 0 || k < j || k > tree.depth())
        throw std::invalid_argument("cond_expect: bad level pair");
    if (field.size() != tree.size())
        throw std::invalid_argument("cond_expect: field size mismatch");
    for (int id : tree.at_level(k)) require_defined(field, id);
    if (j == k) return field;
    NodeField out = sweep_down(tree, j, field, k);
    // only level-j entries are the conditional expectation; blank the rest
    NodeField result(tree.size());
    for (int id : tree.at_level(j)) result[std::size_t(id)] = out[std::size_t(id)];
    return result;
}

NodeField expected_signature_direct(const FiltrationTree& tree) {
    NodeField mu(tree.size());
    // Walk descendants of each node, accumulating path probability and the
    // product of exponential increments.
    for (std::size_t id = 0; id < tree.size(); ++id) {
        TensorSeries<Rat> acc(tree.dim(), tree.level());
        const TensorSeries<Rat> one = TensorSeries<Rat>::unit(tree.dim(), tree.level());

        struct Item {
            int node;
            Rat prob;
            TensorSeries<Rat> sig;
        };
        std::vector<Item> stack{{int(id), Rat(1), one}};
        while (!stack.empty()) {
            Item it = std::move(stack.back());
            stack.pop_back();
            const TreeNode& n = tree.node(it.node);
            if (n.level == tree.depth()) {
                acc += it.sig * it.prob;
                continue;
            }
            for (int c : n.children)
                stack.push_back({c, it.prob * tree.node(c).prob,
                                 it.sig * exp_series(tree.increment(c))});
        }
        mu[id] = std::move(acc);
    }
    return mu;
}

NodeField expected_signature_recursive(const FiltrationTree& tree) {
    const int N = tree.level(), J = tree.depth();
    NodeField mu(tree.size());
    for (std::size_t id = 0; id < tree.size(); ++id)
        mu[id] = TensorSeries<Rat>::unit(tree.dim(), tree.level());

    // Per-node graded increment components, child-indexed.
    std::vector<std::vector<TensorSeries<Rat>>> delta_comp(tree.size());
    for (std::size_t id = 0; id < tree.size(); ++id) {
        if (tree.node(int(id)).parent < 0) continue;
        const TensorSeries<Rat> delta = tree.increment(int(id));
        auto& comps = delta_comp[id];
        comps.reserve(std::size_t(N) + 1);
        for (int m = 0; m <= N; ++m) comps.push_back(component(delta, m));
    }

    for (int n = 1; n <= N; ++n) {
        // contributions to degree n of mu at every node
        std::vector<std::vector<Rat>> contrib(tree.size());
        for (auto& c : contrib) c.assign(pow_size(tree.dim(), n), Rat(0));

        for (int i = 0; i < J; ++i) {
            for (int k = 0; k < n; ++k) {
                for (const auto& ell : compositions(n - k)) {
                    // G at level i+1: (dX_i)^{(ell)} mu_{i+1}^{(k)} / |ell|!
                    const Rat inv_fact = 1 / rat_factorial(int(ell.size()));
                    NodeField g(tree.size());
                    for (int c : tree.at_level(i + 1)) {
                        TensorSeries<Rat> term = component(*mu[std::size_t(c)], k);
                        for (auto part = ell.rbegin(); part != ell.rend(); ++part)
                            term = delta_comp[std::size_t(c)][std::size_t(*part)] * term;
                        term *= inv_fact;
                        g[std::size_t(c)] = std::move(term);
                    }
                    // one backward sweep credits every j <= i
                    for (int m = i; m >= 0; --m) {
                        for (int a : tree.at_level(m)) {
                            TensorSeries<Rat> acc(tree.dim(), tree.level());
                            for (int c : tree.node(a).children)
                                acc += require_defined(g, c) * tree.node(c).prob;
                            const auto& comp = acc.degree(n);
                            auto& dst = contrib[std::size_t(a)];
                            for (std::size_t w = 0; w < comp.size(); ++w) dst[w] += comp[w];
                            g[std::size_t(a)] = std::move(acc);
                        }
                    }
                }
            }
        }
        for (std::size_t id = 0; id < tree.size(); ++id)
            mu[id]->degree(n) = std::move(contrib[id]);
    }
    return mu;
}

NodeField discrete_cumulants(const FiltrationTree& tree, const NodeField& mu) {
    NodeField kappa(tree.size());
    for (std::size_t id = 0; id < tree.size(); ++id)
        kappa[id] = log_series(require_defined(mu, int(id)));
    return kappa;
}

NodeField realized_signature(const FiltrationTree& tree) {
    NodeField sig(tree.size());
    for (std::size_t id = 0; id < tree.size(); ++id) {
        const TreeNode& n = tree.node(int(id));
        if (n.parent < 0)
            sig[id] = TensorSeries<Rat>::unit(tree.dim(), tree.level());
        else
            sig[id] = require_defined(sig, n.parent) * exp_series(tree.increment(int(id)));
    }
    return sig;
}

MartingaleResiduals martingale_identity_residual(const FiltrationTree& tree, int j,
                                                 const NodeField& kappa) {
    if (j < 0 || j >= tree.depth())
        throw std::invalid_argument("martingale_identity_residual: need 0 <= j < depth");
    const int d = tree.dim(), N = tree.level();
    const TensorSeries<Rat> one = TensorSeries<Rat>::unit(d, N);

    // Per child c with parent b: (e^{dX}-1) e^{k_c} e^{-k_b} + (e^{k_c} e^{-k_b} - 1).
    auto summand = [&](int c) {
        const int b = tree.node(c).parent;
        const TensorSeries<Rat> ratio =
            exp_series(require_defined(kappa, c)) *
            group_inverse(exp_series(require_defined(kappa, b)));
        return (exp_series(tree.increment(c)) - one) * ratio + ratio - one;
    };

    MartingaleResiduals out;
    out.basic.assign(tree.size(), std::nullopt);
    out.transformed.assign(tree.size(), std::nullopt);

    // basic identity at level j
    for (int a : tree.at_level(j)) {
        TensorSeries<Rat> acc(d, N);
        for (int c : tree.node(a).children) acc += summand(c) * tree.node(c).prob;
        out.basic[std::size_t(a)] = std::move(acc);
    }

    // H(ad kappa_i)-transformed sum over i >= j
    NodeField total(tree.size());
    for (int a : tree.at_level(j)) total[std::size_t(a)] = TensorSeries<Rat>(d, N);
    for (int i = j; i < tree.depth(); ++i) {
        NodeField g(tree.size());
        for (int c : tree.at_level(i + 1)) {
            const int b = tree.node(c).parent;
            g[std::size_t(c)] = apply_H(require_defined(kappa, b), summand(c));
        }
        NodeField e = cond_expect(tree, j, g, i + 1);
        for (int a : tree.at_level(j)) *total[std::size_t(a)] += require_defined(e, a);
    }
    out.transformed = std::move(total);
    return out;
}

FiltrationTree make_random_tree(std::mt19937_64& rng, const RandomTreeOptions& opt) {
    std::uniform_int_distribution<int> branch(1, opt.max_branching);
    std::uniform_int_distribution<long> num(-opt.coeff_range, opt.coeff_range);
    std::uniform_int_distribution<long> den(1, 3);
    std::uniform_int_distribution<long> weight(1, 5);

    auto random_value = [&]() {
        TensorSeries<Rat> v(opt.dim, opt.level);
        const int top = opt.level_one_values_only ? 1 : opt.level;
        for (int k = 1; k <= top; ++k)
            for (std::size_t idx = 0; idx < pow_size(opt.dim, k); ++idx)
                v.at(k, idx) = make_rat(num(rng), den(rng));
        return v;
    };

    std::vector<TreeNode> nodes;
    nodes.push_back({-1, Rat(1), 0, random_value(), {}});
    std::vector<int> frontier{0};
    for (int j = 0; j < opt.depth; ++j) {
        std::vector<int> next;
        for (int parent : frontier) {
            const int fanout = branch(rng);
            std::vector<long> weights(std::size_t(fanout), 0);
            long total = 0;
            for (auto& w : weights) {
                w = weight(rng);
                total += w;
            }
            for (int c = 0; c < fanout; ++c) {
                TreeNode nd;
                nd.parent = parent;
                nd.prob = make_rat(weights[std::size_t(c)], total);
                nd.value = random_value();
                next.push_back(int(nodes.size()));
                nodes.push_back(std::move(nd));
            }
        }
        frontier = std::move(next);
    }
    return FiltrationTree(opt.dim, opt.level, std::move(nodes));
}

FiltrationTree make_iid_tree(const std::vector<std::pair<Rat, TensorSeries<Rat>>>& atoms,
                             int horizon) {
    if (atoms.empty()) throw std::invalid_argument("make_iid_tree: no atoms");
    const int d = atoms.front().second.dim(), N = atoms.front().second.level();
    std::vector<TreeNode> nodes;
    nodes.push_back({-1, Rat(1), 0, TensorSeries<Rat>(d, N), {}});
    std::vector<int> frontier{0};
    for (int j = 0; j < horizon; ++j) {
        std::vector<int> next;
        for (int parent : frontier) {
            for (const auto& [p, g] : atoms) {
                TreeNode nd;
                nd.parent = parent;
                nd.prob = p;
                nd.value = nodes[std::size_t(parent)].value + g;
                next.push_back(int(nodes.size()));
                nodes.push_back(std::move(nd));
            }
        }
        frontier = std::move(next);
    }
    return FiltrationTree(d, N, std::move(nodes));
}

}  // namespace sigkit
