#ifndef SIGKIT_MODELS_HPP
#define SIGKIT_MODELS_HPP

#include <functional>
#include <utility>
#include <vector>

#include "sigkit/lie_ops.hpp"
#include "sigkit/tensor_series.hpp"
#include "sigkit/word.hpp"

namespace sigkit {

// ---------------------------------------------------------------------------
// Random walks in the group (IID Lie-algebra increments)

template <class S>
struct AtomDistribution {
    // (probability, T_0 value) pairs; probabilities are exact and sum to 1.
    std::vector<std::pair<Rat, TensorSeries<S>>> atoms;

    void validate() const {
        if (atoms.empty()) throw std::invalid_argument("AtomDistribution: no atoms");
        Rat total = 0;
        for (const auto& [p, v] : atoms) {
            if (p <= 0) throw std::invalid_argument("AtomDistribution: probabilities must be > 0");
            if (!v.in_t0())
                throw std::invalid_argument("AtomDistribution: atom values must lie in T_0");
            atoms.front().second.require_compatible(v);
            total += p;
        }
        if (total != 1)
            throw std::invalid_argument("AtomDistribution: probabilities must sum exactly to 1");
    }

    int dim() const { return atoms.front().second.dim(); }
    int level() const { return atoms.front().second.level(); }
};

// M = E(e^{g_1}) = sum p_i exp(value_i).
template <class S>
TensorSeries<S> rw_step_expectation(const AtomDistribution<S>& dist) {
    dist.validate();
    TensorSeries<S> m(dist.dim(), dist.level());
    for (const auto& [p, v] : dist.atoms)
        m += exp_series(v) * scalar_traits<S>::from_rat(p);
    return m;
}

// mu_j = M^{J-j}, by binary powering.
template <class S>
TensorSeries<S> power(TensorSeries<S> base, long e) {
    TensorSeries<S> acc = TensorSeries<S>::unit(base.dim(), base.level());
    while (e > 0) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return acc;
}

template <class S>
TensorSeries<S> rw_expected_signature(const AtomDistribution<S>& dist, long horizon, long j) {
    if (j < 0 || j > horizon)
        throw std::invalid_argument("rw_expected_signature: need 0 <= j <= J");
    return power(rw_step_expectation(dist), horizon - j);
}

// ---------------------------------------------------------------------------
// Markov chains: the expected signature as a backward dynamic program over
// states; the degree-n slice of the one-step average carries 1/(n-k)!
// constants (see markov_expected_signature)

struct MarkovChainSpec {
    int dim = 1;
    int level = 2;
    int horizon = 1;
    std::vector<std::vector<Rat>> states;                // state -> point in R^d
    std::vector<std::vector<std::vector<Rat>>> kernels;  // kernels[j][from][to], j < horizon

    void validate() const;
    TensorSeries<Rat> state_value(int s) const;  // level-1 embedding of the state
};

// f[j][state] = conditional expected signature started at (j, state); the
// degree-n slice uses only degrees < n of later times.
std::vector<std::vector<TensorSeries<Rat>>> markov_expected_signature(const MarkovChainSpec& spec);

// ---------------------------------------------------------------------------
// Gaussian martingales M_t = int sigma(s) dB_s with piecewise-constant sigma

struct GaussianMartingaleSpec {
    int dim = 1;
    int level = 2;
    std::vector<double> grid;                             // 0 = t_0 < ... < t_m = T
    std::vector<std::vector<std::vector<double>>> sigma;  // per piece, d x m matrix

    void validate() const;
    double horizon() const { return grid.back(); }
    // 1/2 sigma sigma^T on the given piece, as the level-2 tensor generator.
    TensorSeries<double> half_qv_tensor(std::size_t piece) const;
    std::size_t piece_at(double u) const;
};

// Backward level recursion mu^{(n)}_t = int_t^T (1/2 ss^T) mu^{(n-2)} du via
// trapezoid quadrature with step <= h; odd degrees vanish identically.
TensorSeries<double> gaussian_moments(const GaussianMartingaleSpec& spec, double t, double h);

// Same object as the signature of the deterministic path with level-2
// increments int 1/2 ss^T du (exact for piecewise-constant sigma).
TensorSeries<double> gaussian_moments_path(const GaussianMartingaleSpec& spec, double t);

// Magnus form of the logarithm: kappa^{(n)}_t = sum over compositions l of
// n-2 of B_{|l|}/|l|! int_t^T ad kappa^{(l)}_u (1/2 ss^T) du, trapezoid on the
// same grid. exp(kappa) reproduces gaussian_moments up to O(h^2).
TensorSeries<double> gaussian_magnus_cumulants(const GaussianMartingaleSpec& spec, double t,
                                               double h);

// ---------------------------------------------------------------------------
// Brownian rough paths with drift

struct BrownianRoughPathSpec {
    int dim = 1;
    int lie_level = 1;  // N: the driving directions live in g^N
    int level = 2;      // working truncation, canonically 2N
    std::vector<Word> directions;             // Lyndon words of the driving directions
    std::vector<std::vector<Rat>> correlation;  // symmetric PSD over the directions
    TensorSeries<Rat> drift;                  // eta in g^{2N} (T_0, Lie)
    double horizon = 1.0;

    void validate() const;
    // Realized direction tensors u_i (standard Lyndon bracketings).
    std::vector<TensorSeries<double>> direction_tensors() const;
    // Sigma = sum_ij corr_ij u_i u_j.
    TensorSeries<double> sigma_tensor() const;
};

// E(Sig) = exp(T eta + (T/2) Sigma).
TensorSeries<double> brownian_esig(const BrownianRoughPathSpec& spec);

// ---------------------------------------------------------------------------
// Time-inhomogeneous Levy processes at compound-Poisson fidelity

struct LevyJumpAtom {
    double rate = 0.0;            // intensity of this atom
    TensorSeries<double> value;   // jump displacement in g^N (T_0)
};

struct LevyPiece {
    TensorSeries<double> drift;               // b, T_0
    std::vector<std::vector<double>> cov;     // over cov_directions
    std::vector<LevyJumpAtom> jumps;
};

struct LevyTriplet {
    int dim = 1;
    int level = 2;
    std::vector<double> grid;        // 0 = t_0 < ... < t_m = T
    std::vector<Word> cov_directions;
    std::vector<LevyPiece> pieces;

    void validate() const;
    double horizon() const { return grid.back(); }
    std::size_t piece_at(double u) const;
    std::vector<TensorSeries<double>> direction_tensors() const;
};

// eta(t) = b + 1/2 Sigma + sum_k rate_k (exp(x_k) - 1 - x_k 1_{|x_k| <= 1}),
// with |.| the max-of-level-norms and ties |x| = 1 counting as "small".
TensorSeries<double> levy_eta(const LevyTriplet& triplet, double t);

// Backward quadrature of mu_t = 1 + int_t^T eta(u) mu_u du (trapezoid, step <= h).
TensorSeries<double> levy_expected_signature(const LevyTriplet& triplet, double t, double T,
                                             double h);

// Same object as Sig(int eta du)_{t,T}: the ordered product of exp(eta du)
// over the constant pieces (exact for piecewise-constant characteristics).
TensorSeries<double> levy_expected_signature_path(const LevyTriplet& triplet, double t, double T);

// Per-degree int_t^T |eta^{(n)}(s)| ds (exact piecewise sums), feeding the
// convergence-radius bound.
std::vector<double> levy_eta_level_integrals(const LevyTriplet& triplet, double t, double T);

// ---------------------------------------------------------------------------
// Magnus ODE -d kappa = H(ad kappa) eta dt, stepped backward from kappa_T = 0
// with the explicit midpoint scheme. eta is sampled at cell midpoints.

TensorSeries<double> magnus_ode_cumulants(
    const std::function<TensorSeries<double>(double)>& eta, double t, double T, double h, int dim,
    int level);

// ---------------------------------------------------------------------------
// Convergence-radius bound:
//   sum_n lambda^n |mu^{(n)}| <= exp(sum_{n>=1} lambda^n int |eta^{(n)}|)

struct RadiusBound {
    double lambda = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

std::vector<RadiusBound> radius_bound_check(const TensorSeries<double>& mu,
                                            const std::vector<double>& eta_level_integrals,
                                            const std::vector<double>& lambdas);

// Shared helper: quadrature points from t to T with spacing <= h, always
// containing the generator's piece boundaries so cells never straddle a jump
// of the characteristics.
std::vector<double> make_time_grid(double t, double T, double h,
                                   const std::vector<double>& breakpoints);

// Backward trapezoid solve of mu_t = 1 + int_t^T eta(u) mu_u du on the given
// points; eta_cell(i) is the (constant) generator on [points[i], points[i+1]].
std::vector<TensorSeries<double>> backward_generator_quadrature(
    const std::function<const TensorSeries<double>&(std::size_t)>& eta_cell,
    const std::vector<double>& points, int dim, int level);

}  // namespace sigkit

#endif
