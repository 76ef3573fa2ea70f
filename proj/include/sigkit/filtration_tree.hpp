#ifndef SIGKIT_FILTRATION_TREE_HPP
#define SIGKIT_FILTRATION_TREE_HPP

#include <optional>
#include <random>
#include <vector>

#include "sigkit/rational.hpp"
#include "sigkit/tensor_series.hpp"

namespace sigkit {

// Finite rooted probability tree carrying an adapted T_0-valued process: node
// at level j holds X_j, edges hold strictly positive rational transition
// probabilities summing to 1 at each non-leaf. All leaves sit at level J, so
// conditional expectations are exact finite sums.
struct TreeNode {
    int parent = -1;           // -1 for the root
    Rat prob = 1;              // P(this node | parent); 1 at the root
    int level = 0;
    TensorSeries<Rat> value;   // X_j at this node
    std::vector<int> children;
};

class FiltrationTree {
public:
    FiltrationTree(int dim, int level, std::vector<TreeNode> nodes);

    int dim() const { return dim_; }
    int level() const { return level_; }
    int depth() const { return depth_; }  // J
    std::size_t size() const { return nodes_.size(); }
    const TreeNode& node(int id) const { return nodes_[std::size_t(id)]; }
    const std::vector<int>& at_level(int j) const { return by_level_.at(std::size_t(j)); }

    // X_child - X_parent; the root has no increment.
    TensorSeries<Rat> increment(int child_id) const;

private:
    int dim_;
    int level_;
    int depth_ = 0;
    std::vector<TreeNode> nodes_;
    std::vector<std::vector<int>> by_level_;
};

// Adapted tensor field on the tree; entries may be undefined outside the
// level range a computation touched.
using NodeField = std::vector<std::optional<TensorSeries<Rat>>>;

// Exact conditional expectation E[field | G_j] of a field defined on all
// level-k nodes, k >= j; result is defined on level-j nodes.
NodeField cond_expect(const FiltrationTree& tree, int j, const NodeField& field, int k);

// mu_j = E[S_j^{-1} S_J | G_j] per node, by literal enumeration of all
// descendant paths (the brute-force oracle).
NodeField expected_signature_direct(const FiltrationTree& tree);

// The same field via the degree-graded backward recursion: degree n of mu is
// assembled from degrees < n only (strict lower-triangularity), summing
// compositions in lexicographic order.
NodeField expected_signature_recursive(const FiltrationTree& tree);

// kappa_j = log mu_j per node.
NodeField discrete_cumulants(const FiltrationTree& tree, const NodeField& mu);

// Realized signature S_j along the tree (S at a node is the product of
// exponential increments from the root).
NodeField realized_signature(const FiltrationTree& tree);

// The two discrete martingale identities in cumulant coordinates; both fields
// (defined on level-j nodes) must vanish identically.
struct MartingaleResiduals {
    NodeField basic;        // E[(e^{dX}-1)e^{k_{j+1}}e^{-k_j} + (e^{k_{j+1}}e^{-k_j}-1) | G_j]
    NodeField transformed;  // same summands, H(ad k_i)-transformed and summed over i >= j
};
MartingaleResiduals martingale_identity_residual(const FiltrationTree& tree, int j,
                                                 const NodeField& kappa);

struct RandomTreeOptions {
    int depth = 3;
    int max_branching = 3;
    int dim = 2;
    int level = 3;
    bool level_one_values_only = false;
    int coeff_range = 2;  // numerators drawn from [-range, range]
};

// Random rational tree for property suites; deterministic given the engine
// state.
FiltrationTree make_random_tree(std::mt19937_64& rng, const RandomTreeOptions& opt);

// A depth-J tree realizing an IID increment sequence with the given atoms
// (value, probability); every node fans out into one child per atom.
FiltrationTree make_iid_tree(const std::vector<std::pair<Rat, TensorSeries<Rat>>>& atoms,
                             int horizon);

}  // namespace sigkit

#endif
