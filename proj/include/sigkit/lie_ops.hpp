#ifndef SIGKIT_LIE_OPS_HPP
#define SIGKIT_LIE_OPS_HPP

#include <vector>

#include "sigkit/rational.hpp"
#include "sigkit/tensor_series.hpp"
#include "sigkit/word.hpp"

namespace sigkit {

// Bernoulli numbers with B_1 = -1/2, via the recurrence
// sum_{j<=k} C(k+1, j) B_j = 0. Cached, exact.
const Rat& bernoulli(int k);

// Witt dimension of the free Lie algebra: (1/n) sum_{m|n} mu(m) d^{n/m}.
long witt_dimension(int d, int n);

// G(ad x) = sum_k (ad x)^k / (k+1)!, the differential of exp.
template <class S>
TensorSeries<S> apply_G(const TensorSeries<S>& x, const TensorSeries<S>& v) {
    if (!x.in_t0() || !v.in_t0())
        throw std::invalid_argument("apply_G: operands must lie in T_0");
    const int N = x.level();
    TensorSeries<S> acc(x.dim(), N);
    TensorSeries<S> w = v;
    Rat fact = 1;  // (k+1)!
    for (int k = 0; k < N; ++k) {
        fact *= (k + 1);
        if (w.is_zero()) break;
        TensorSeries<S> t = w;
        t *= scalar_traits<S>::from_rat(1 / fact);
        acc += t;
        w = bracket(x, w);
    }
    return acc;
}

// H(ad x) = sum_k B_k/k! (ad x)^k, the inverse of G(ad x).
template <class S>
TensorSeries<S> apply_H(const TensorSeries<S>& x, const TensorSeries<S>& v) {
    if (!x.in_t0() || !v.in_t0())
        throw std::invalid_argument("apply_H: operands must lie in T_0");
    const int N = x.level();
    TensorSeries<S> acc(x.dim(), N);
    TensorSeries<S> w = v;
    Rat fact = 1;  // k!
    for (int k = 0; k < N; ++k) {
        if (k > 0) fact *= k;
        if (w.is_zero()) break;
        const Rat c = bernoulli(k) / fact;
        if (c != 0) {
            TensorSeries<S> t = w;
            t *= scalar_traits<S>::from_rat(c);
            acc += t;
        }
        w = bracket(x, w);
    }
    return acc;
}

// Q(ad x) = sum_{n,m} 2 (ad x)^n (.) (ad x)^m / ((n+1)! m! (n+m+2)), applied
// to an outer element. Coefficients are kept verbatim; note they enter the
// cumulant functional equation with a 1/2 prefactor, and it is 1/2 * Q that
// equals the second-order term of the exponential map (see the test suite's
// formal jet oracle).
template <class S>
TensorSeries<S> apply_Q(const TensorSeries<S>& x, const OuterElement<S>& u, int dim, int level) {
    if (!x.in_t0()) throw std::invalid_argument("apply_Q: x must lie in T_0");
    const int N = level;
    TensorSeries<S> acc(dim, N);
    for (const auto& [a, b] : u.terms) {
        if (!a.in_t0() || !b.in_t0())
            throw std::invalid_argument("apply_Q: outer element terms must lie in T_0");
        TensorSeries<S> an = a;
        Rat nfact1 = 1;  // (n+1)!
        for (int n = 0; n < N; ++n) {
            nfact1 *= (n + 1);
            if (an.is_zero()) break;
            TensorSeries<S> bm = b;
            Rat mfact = 1;  // m!
            for (int m = 0; m < N; ++m) {
                if (m > 0) mfact *= m;
                if (bm.is_zero()) break;
                const Rat c = Rat(2) / (nfact1 * mfact * (n + m + 2));
                TensorSeries<S> t = an * bm;
                t *= scalar_traits<S>::from_rat(c);
                acc += t;
                bm = bracket(x, bm);
            }
            an = bracket(x, an);
        }
    }
    return acc;
}

// BCH(x, y) = log(exp(x) exp(y)), evaluated exactly through the power series.
template <class S>
TensorSeries<S> bch_exact(const TensorSeries<S>& x, const TensorSeries<S>& y) {
    return log_series(exp_series(x) * exp_series(y));
}

// BCH via the Psi integral form:
//   BCH(x, y) = y + int_0^1 Psi(exp(ad t x) o exp(ad y))(x) dt,
// with Psi(z) = log(z)/(z-1) = sum_n (-1)^n/(n+1) (z - Id)^n. The integrand is
// expanded as a polynomial in t with tensor coefficients (grading truncates
// both the t-degree and the operator powers) and integrated term by term,
// exactly. Rational scalars only.
TensorSeries<Rat> bch_psi(const TensorSeries<Rat>& x, const TensorSeries<Rat>& y);

// Log-signature of a sequence of T_0 increments by the backward iterated-BCH
// recursion Omega_J = 0, Omega_j = BCH_psi(dx_j, Omega_{j+1}).
TensorSeries<Rat> bch_log_signature(const std::vector<TensorSeries<Rat>>& increments);

struct LyndonBasisElement {
    Word word;
    TensorSeries<Rat> bracketing;  // right-standard bracketing realized in T^N
};

// All Lyndon words of length <= N over {1..d} (Duval), with standard
// bracketings. Ordered by (length, lexicographic).
std::vector<LyndonBasisElement> lyndon_basis(int d, int N);

// Left-nested bracket of the letters of w, [[..[e_{i1},e_{i2}],..],e_{in}],
// as a dense degree-|w| coefficient array.
template <class S>
std::vector<S> left_nested_bracket(const Word& w, int d) {
    std::vector<S> v(std::size_t(d), scalar_traits<S>::zero());
    v[std::size_t(w.at(0) - 1)] = scalar_traits<S>::one();
    std::size_t size = std::size_t(d);
    for (std::size_t pos = 1; pos < w.size(); ++pos) {
        const std::size_t j = std::size_t(w[pos] - 1);
        std::vector<S> next(size * std::size_t(d), scalar_traits<S>::zero());
        for (std::size_t i = 0; i < size; ++i) {
            if (scalar_traits<S>::is_zero(v[i])) continue;
            next[i * std::size_t(d) + j] += v[i];
            next[j * size + i] -= v[i];
        }
        v = std::move(next);
        size *= std::size_t(d);
    }
    return v;
}

// Dynkin criterion, degree by degree: x^{(n)} is a Lie element iff
// D(x^{(n)}) = n x^{(n)} with D mapping each word to its left-nested bracket.
// Entry [n-1] of the result covers degree n.
template <class S>
std::vector<bool> dynkin_is_lie(const TensorSeries<S>& x) {
    if (!x.in_t0()) throw std::invalid_argument("dynkin_is_lie: operand must lie in T_0");
    const int d = x.dim(), N = x.level();
    std::vector<bool> out;
    out.reserve(std::size_t(N));
    for (int n = 1; n <= N; ++n) {
        const auto& comp = x.degree(n);
        std::vector<S> dyn(comp.size(), scalar_traits<S>::zero());
        for (std::size_t idx = 0; idx < comp.size(); ++idx) {
            if (scalar_traits<S>::is_zero(comp[idx])) continue;
            const Word w = index_word(n, idx, d);
            const std::vector<S> br = left_nested_bracket<S>(w, d);
            for (std::size_t j = 0; j < br.size(); ++j)
                if (!scalar_traits<S>::is_zero(br[j])) dyn[j] += comp[idx] * br[j];
        }
        bool ok = true;
        const S nn = scalar_traits<S>::from_ratio(n, 1);
        for (std::size_t j = 0; j < comp.size() && ok; ++j)
            ok = scalar_traits<S>::close(dyn[j], nn * comp[j]);
        out.push_back(ok);
    }
    return out;
}

}  // namespace sigkit

#endif
