#ifndef SIGKIT_MULTIVARIATE_HPP
#define SIGKIT_MULTIVARIATE_HPP

#include <functional>
#include <map>
#include <optional>

#include "sigkit/filtration_tree.hpp"
#include "sigkit/models.hpp"
#include "sigkit/sym_series.hpp"

namespace sigkit {

using SymNodeField = std::vector<std::optional<SymSeries<Rat>>>;

// Keep only the total-degree-n terms.
template <class S>
SymSeries<S> sym_component(const SymSeries<S>& x, int n) {
    SymSeries<S> r(x.dim(), x.level());
    for (const auto& [m, v] : x.data())
        if (total_degree(m) == n) r.set(m, v);
    return r;
}

// Conditional multivariate moments on a tree whose values are level-1 only:
// at each level-j node, E[exp(Xi^)] with Xi^ = sum_i (X_J^i - X_j^i) e^_i.
SymNodeField multivariate_moments(const FiltrationTree& tree, int j);

// sym_log of the above; degree-n coefficients times prod n_i! are the
// classical multivariate cumulants.
SymNodeField multivariate_cumulants(const FiltrationTree& tree, int j);

// Independent set-partition oracle: classical (raw) cumulants from classical
// (raw) moments,
//   kappa(S) = sum over partitions pi of S of (-1)^{|pi|-1} (|pi|-1)! prod_B m(B).
// Input and output are indexed by multidegree in raw-moment semantics.
std::map<MultiDegree, Rat> classical_cumulants_from_moments(
    const std::function<Rat(const MultiDegree&)>& moment, int dim, int max_degree);

// Discrete cumulant recursion checks for a terminal S_0-valued Xi given per
// leaf. K is computed directly as sym_log E(e^Xi | G_j); the residual fields
// compare against the functional-equation route and the level-2/level-3
// projections (all must vanish identically).
struct KRecursionResult {
    SymNodeField K;                 // all nodes
    SymNodeField eq_residual;       // K_j - [E(Xi|G_j) + E(sum e^{dK}-1-dK | G_j)]
    SymNodeField level2_residual;   // degree-2 slice vs the energy identity
    SymNodeField level3_residual;   // degree-3 slice vs the cubic identity
    bool all_zero = false;
};
KRecursionResult discrete_K_recursion(const FiltrationTree& tree, const SymNodeField& xi);

// Gaussian-martingale diamond recursion (deterministic brackets): cumulants
// of Xi = sum_i (M_T^i - M_t^i) e^_i + xi_extra. Only the degree-1 component
// of K is stochastic, so the lone surviving diamond is
// (K^(1) <> K^(1))_t = int_t^T ss^T du, evaluated by trapezoid quadrature.
SymSeries<double> gaussian_diamond_cumulants(const GaussianMartingaleSpec& spec,
                                             const SymSeries<double>& xi_extra, double t,
                                             double h);

// The exponential-compensator extra term -1/2 sum_{i,j} int_t^T (ss^T)_ij du
// e^_i e^_j (ordered sum). With this as xi_extra the cumulants vanish
// identically.
SymSeries<double> ito_compensator(const GaussianMartingaleSpec& spec, double t, double h,
                                  int level);

}  // namespace sigkit

#endif
