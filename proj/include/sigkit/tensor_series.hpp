#ifndef SIGKIT_TENSOR_SERIES_HPP
#define SIGKIT_TENSOR_SERIES_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sigkit/rational.hpp"
#include "sigkit/word.hpp"

namespace sigkit {

// Element of the truncated tensor algebra T^N(R^d), stored densely per degree:
// the degree-k component is a coefficient array of length d^k, indexed by the
// big-endian dense word index (see word.hpp). Values are immutable in spirit:
// every operation below returns a fresh series.
template <class S>
class TensorSeries {
public:
    TensorSeries() : dim_(1), level_(0), levels_(1, std::vector<S>(1, scalar_traits<S>::zero())) {}

    TensorSeries(int dim, int level) : dim_(dim), level_(level) {
        if (dim < 1) throw std::invalid_argument("TensorSeries: dim must be >= 1");
        if (level < 0) throw std::invalid_argument("TensorSeries: level must be >= 0");
        levels_.reserve(std::size_t(level) + 1);
        for (int k = 0; k <= level; ++k)
            levels_.emplace_back(pow_size(dim, k), scalar_traits<S>::zero());
    }

    static TensorSeries zero(int dim, int level) { return TensorSeries(dim, level); }

    static TensorSeries unit(int dim, int level) {
        TensorSeries r(dim, level);
        r.levels_[0][0] = scalar_traits<S>::one();
        return r;
    }

    // e_w, coefficient 1 on the given word.
    static TensorSeries basis(int dim, int level, const Word& w) {
        TensorSeries r(dim, level);
        r.set(w, scalar_traits<S>::one());
        return r;
    }

    int dim() const { return dim_; }
    int level() const { return level_; }

    const std::vector<S>& degree(int k) const { return levels_.at(std::size_t(k)); }
    std::vector<S>& degree(int k) { return levels_.at(std::size_t(k)); }

    const S& at(int k, std::size_t idx) const { return levels_.at(std::size_t(k)).at(idx); }
    S& at(int k, std::size_t idx) { return levels_.at(std::size_t(k)).at(idx); }

    const S& coeff(const Word& w) const {
        if (int(w.size()) > level_)
            throw std::out_of_range("TensorSeries::coeff: word longer than truncation level");
        return levels_[w.size()][word_index(w, dim_)];
    }

    void set(const Word& w, S value) {
        if (int(w.size()) > level_)
            throw std::out_of_range("TensorSeries::set: word longer than truncation level");
        levels_[w.size()][word_index(w, dim_)] = std::move(value);
    }

    const S& scalar() const { return levels_[0][0]; }

    bool in_t0() const { return scalar_traits<S>::is_zero(scalar()); }
    bool in_t1() const { return scalar() == scalar_traits<S>::one(); }

    bool is_zero() const {
        for (const auto& lvl : levels_)
            for (const auto& v : lvl)
                if (!scalar_traits<S>::is_zero(v)) return false;
        return true;
    }

    // Lowest degree with a nonzero coefficient; level()+1 when the whole
    // series vanishes. Drives early termination of graded-nilpotent loops.
    int min_degree() const {
        for (int k = 0; k <= level_; ++k)
            for (const auto& v : levels_[std::size_t(k)])
                if (!scalar_traits<S>::is_zero(v)) return k;
        return level_ + 1;
    }

    TensorSeries& operator+=(const TensorSeries& o) {
        require_compatible(o);
        for (int k = 0; k <= level_; ++k) {
            auto& a = levels_[std::size_t(k)];
            const auto& b = o.levels_[std::size_t(k)];
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        }
        return *this;
    }

    TensorSeries& operator-=(const TensorSeries& o) {
        require_compatible(o);
        for (int k = 0; k <= level_; ++k) {
            auto& a = levels_[std::size_t(k)];
            const auto& b = o.levels_[std::size_t(k)];
            for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
        }
        return *this;
    }

    TensorSeries& operator*=(const S& c) {
        for (auto& lvl : levels_)
            for (auto& v : lvl) v *= c;
        return *this;
    }

    friend TensorSeries operator+(TensorSeries a, const TensorSeries& b) { return a += b; }
    friend TensorSeries operator-(TensorSeries a, const TensorSeries& b) { return a -= b; }
    friend TensorSeries operator-(TensorSeries a) {
        for (auto& lvl : a.levels_)
            for (auto& v : lvl) v = -v;
        return a;
    }
    friend TensorSeries operator*(TensorSeries a, const S& c) { return a *= c; }
    friend TensorSeries operator*(const S& c, TensorSeries a) { return a *= c; }

    friend bool operator==(const TensorSeries& a, const TensorSeries& b) {
        return a.dim_ == b.dim_ && a.level_ == b.level_ && a.levels_ == b.levels_;
    }
    friend bool operator!=(const TensorSeries& a, const TensorSeries& b) { return !(a == b); }

    // Truncated concatenation product: degree-n of ab is sum over l of
    // a^(l) b^(n-l); everything above the level is discarded.
    friend TensorSeries operator*(const TensorSeries& a, const TensorSeries& b) {
        a.require_compatible(b);
        const int d = a.dim_, N = a.level_;
        TensorSeries r(d, N);
        const int alo = a.min_degree(), blo = b.min_degree();
        for (int la = alo; la <= N - blo; ++la) {
            const auto& xa = a.levels_[std::size_t(la)];
            for (int lb = blo; lb <= N - la; ++lb) {
                const auto& xb = b.levels_[std::size_t(lb)];
                auto& out = r.levels_[std::size_t(la + lb)];
                const std::size_t nb = xb.size();
                for (std::size_t i = 0; i < xa.size(); ++i) {
                    const S& ai = xa[i];
                    if (scalar_traits<S>::is_zero(ai)) continue;
                    S* dst = out.data() + i * nb;
                    for (std::size_t j = 0; j < nb; ++j) dst[j] += ai * xb[j];
                }
            }
        }
        return r;
    }

    void require_compatible(const TensorSeries& o) const {
        if (dim_ != o.dim_ || level_ != o.level_)
            throw std::invalid_argument("TensorSeries: incompatible operands (dim/level mismatch)");
    }

private:
    int dim_;
    int level_;
    std::vector<std::vector<S>> levels_;
};

// pi_{(0,n)}: keep degrees <= n, returned at truncation level n.
template <class S>
TensorSeries<S> truncate(const TensorSeries<S>& x, int n) {
    if (n > x.level()) throw std::invalid_argument("truncate: target level above source");
    TensorSeries<S> r(x.dim(), n);
    for (int k = 0; k <= n; ++k) r.degree(k) = x.degree(k);
    return r;
}

// Embed into a higher truncation level (zero-padding new degrees).
template <class S>
TensorSeries<S> extend(const TensorSeries<S>& x, int n) {
    if (n < x.level()) throw std::invalid_argument("extend: target level below source");
    TensorSeries<S> r(x.dim(), n);
    for (int k = 0; k <= x.level(); ++k) r.degree(k) = x.degree(k);
    return r;
}

// Only the degree-k part of x.
template <class S>
TensorSeries<S> component(const TensorSeries<S>& x, int k) {
    TensorSeries<S> r(x.dim(), x.level());
    if (k <= x.level()) r.degree(k) = x.degree(k);
    return r;
}

// exp: T_0 -> T_1. The sum terminates because x is graded-nilpotent.
template <class S>
TensorSeries<S> exp_series(const TensorSeries<S>& x) {
    if (!x.in_t0())
        throw std::invalid_argument("exp_series: operand must have zero scalar component");
    const int N = x.level();
    const int lo = x.min_degree();
    if (lo > N) return TensorSeries<S>::unit(x.dim(), N);
    const int terms = N / lo;  // x^k vanishes beyond this
    // Horner form: 1 + x(1 + x/2 (1 + x/3 (...)))
    TensorSeries<S> acc = TensorSeries<S>::unit(x.dim(), N);
    for (int k = terms; k >= 1; --k) {
        acc = x * acc;
        acc *= scalar_traits<S>::from_ratio(1, k);
        acc += TensorSeries<S>::unit(x.dim(), N);
    }
    return acc;
}

// log: T_1 -> T_0.
template <class S>
TensorSeries<S> log_series(const TensorSeries<S>& s) {
    if (!s.in_t1())
        throw std::invalid_argument("log_series: operand must have scalar component 1");
    const int N = s.level();
    TensorSeries<S> y = s - TensorSeries<S>::unit(s.dim(), N);
    TensorSeries<S> acc(s.dim(), N);
    const int lo = y.min_degree();
    if (lo > N) return acc;
    const int terms = N / lo;
    TensorSeries<S> p = TensorSeries<S>::unit(s.dim(), N);
    for (int k = 1; k <= terms; ++k) {
        p = p * y;
        TensorSeries<S> t = p;
        t *= scalar_traits<S>::from_ratio(k % 2 == 1 ? 1 : -1, k);
        acc += t;
    }
    return acc;
}

// [x, y] = xy - yx on T_0.
template <class S>
TensorSeries<S> bracket(const TensorSeries<S>& x, const TensorSeries<S>& y) {
    if (!x.in_t0() || !y.in_t0())
        throw std::invalid_argument("bracket: both operands must lie in T_0");
    return x * y - y * x;
}

// (ad y)^k x, the k-fold nested bracket [y,[y,...[y,x]...]].
template <class S>
TensorSeries<S> ad_pow(const TensorSeries<S>& y, int k, const TensorSeries<S>& x) {
    if (k < 0) throw std::invalid_argument("ad_pow: negative power");
    TensorSeries<S> r = x;
    for (int i = 0; i < k; ++i) {
        if (r.is_zero()) break;
        r = bracket(y, r);
    }
    return r;
}

// Group inverse on T_1 via the Neumann series sum_k (1-s)^k, exact in
// truncation.
template <class S>
TensorSeries<S> group_inverse(const TensorSeries<S>& s) {
    if (!s.in_t1())
        throw std::invalid_argument("group_inverse: operand must have scalar component 1");
    const int N = s.level();
    const TensorSeries<S> one = TensorSeries<S>::unit(s.dim(), N);
    const TensorSeries<S> u = one - s;
    TensorSeries<S> acc = one;
    for (int k = 0; k < N; ++k) acc = one + u * acc;
    return acc;
}

// delta_lambda: scales the degree-k component by lambda^k.
template <class S>
TensorSeries<S> dilate(const TensorSeries<S>& x, const S& lambda) {
    TensorSeries<S> r = x;
    S p = scalar_traits<S>::one();
    for (int k = 1; k <= x.level(); ++k) {
        p *= lambda;
        for (auto& v : r.degree(k)) v *= p;
    }
    return r;
}

template <class S>
TensorSeries<double> to_float(const TensorSeries<S>& x) {
    TensorSeries<double> r(x.dim(), x.level());
    for (int k = 0; k <= x.level(); ++k) {
        const auto& src = x.degree(k);
        auto& dst = r.degree(k);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = scalar_traits<S>::as_double(src[i]);
    }
    return r;
}

// Euclidean norm of each degree component, |x^{(k)}|_{(R^d)^{ox k}}.
template <class S>
std::vector<double> level_norms(const TensorSeries<S>& x) {
    std::vector<double> out(std::size_t(x.level()) + 1, 0.0);
    for (int k = 0; k <= x.level(); ++k) {
        double s = 0.0;
        for (const auto& v : x.degree(k)) {
            double f = scalar_traits<S>::as_double(v);
            s += f * f;
        }
        out[std::size_t(k)] = std::sqrt(s);
    }
    return out;
}

// max_k |x^{(k)}|: the Banach norm of section 2 style. Rational input is
// converted (explicitly, here) to double.
template <class S>
double norm_max(const TensorSeries<S>& x) {
    double m = 0.0;
    for (double v : level_norms(x))
        if (v > m) m = v;
    return m;
}

template <class S>
double max_abs_coeff(const TensorSeries<S>& x) {
    double m = 0.0;
    for (int k = 0; k <= x.level(); ++k)
        for (const auto& v : x.degree(k)) {
            double f = std::abs(scalar_traits<S>::as_double(v));
            if (f > m) m = f;
        }
    return m;
}

template <class S>
double max_abs_diff(const TensorSeries<S>& a, const TensorSeries<S>& b) {
    return max_abs_coeff(a - b);
}

// Element of the outer tensor product, sum_i x_i (outer) y_i. Carrier for the
// arguments of lifted maps g (.) f.
template <class S>
struct OuterElement {
    std::vector<std::pair<TensorSeries<S>, TensorSeries<S>>> terms;

    OuterElement() = default;
    OuterElement(TensorSeries<S> x, TensorSeries<S> y) {
        terms.emplace_back(std::move(x), std::move(y));
    }

    void add(TensorSeries<S> x, TensorSeries<S> y) {
        if (!terms.empty()) {
            terms.front().first.require_compatible(x);
            terms.front().first.require_compatible(y);
        }
        terms.emplace_back(std::move(x), std::move(y));
    }
};

// (g (.) f)(sum x_i (outer) y_i) = sum g(x_i) f(y_i). An empty element maps
// to 0 (callers must pass dim/level for that case).
template <class S, class G, class F>
TensorSeries<S> apply_outer(G&& g, F&& f, const OuterElement<S>& u, int dim, int level) {
    TensorSeries<S> acc(dim, level);
    for (const auto& [x, y] : u.terms) acc += g(x) * f(y);
    return acc;
}

}  // namespace sigkit

#endif
