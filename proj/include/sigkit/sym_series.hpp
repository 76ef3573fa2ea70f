#ifndef SIGKIT_SYM_SERIES_HPP
#define SIGKIT_SYM_SERIES_HPP

#include <map>
#include <numeric>
#include <vector>

#include "sigkit/rational.hpp"
#include "sigkit/tensor_series.hpp"

namespace sigkit {

// Multidegree of a symmetric monomial: letter multiplicities n_1..n_d of a
// non-decreasing word.
using MultiDegree = std::vector<int>;

inline int total_degree(const MultiDegree& m) {
    return std::accumulate(m.begin(), m.end(), 0);
}

// Element of the truncated symmetric algebra S^N(R^d). Sparse storage over
// sorted multidegrees: per-degree symmetric dimension is small and sparse
// keys feed the set-partition oracle directly. Coefficients are stored
// against the basis e^_v of non-decreasing words v; the "raw moment" with the
// prod n_i! factor is a separate accessor, not a storage change.
template <class S>
class SymSeries {
public:
    SymSeries() : dim_(1), level_(0) {}
    SymSeries(int dim, int level) : dim_(dim), level_(level) {
        if (dim < 1 || level < 0) throw std::invalid_argument("SymSeries: bad dim/level");
    }

    static SymSeries unit(int dim, int level) {
        SymSeries r(dim, level);
        r.set(MultiDegree(std::size_t(dim), 0), scalar_traits<S>::one());
        return r;
    }

    int dim() const { return dim_; }
    int level() const { return level_; }
    const std::map<MultiDegree, S>& data() const { return coeffs_; }

    S coeff(const MultiDegree& m) const {
        auto it = coeffs_.find(m);
        return it == coeffs_.end() ? scalar_traits<S>::zero() : it->second;
    }

    void set(const MultiDegree& m, const S& v) {
        check_key(m);
        if (scalar_traits<S>::is_zero(v))
            coeffs_.erase(m);
        else
            coeffs_[m] = v;
    }

    void add_to(const MultiDegree& m, const S& v) {
        check_key(m);
        auto it = coeffs_.find(m);
        if (it == coeffs_.end()) {
            if (!scalar_traits<S>::is_zero(v)) coeffs_.emplace(m, v);
        } else {
            it->second += v;
            if (scalar_traits<S>::is_zero(it->second)) coeffs_.erase(it);
        }
    }

    S scalar() const { return coeff(MultiDegree(std::size_t(dim_), 0)); }
    bool in_s0() const { return scalar_traits<S>::is_zero(scalar()); }
    bool in_s1() const { return scalar() == scalar_traits<S>::one(); }
    bool is_zero() const { return coeffs_.empty(); }

    int min_degree() const {
        int lo = level_ + 1;
        for (const auto& [m, v] : coeffs_) {
            (void)v;
            const int t = total_degree(m);
            if (t < lo) lo = t;
        }
        return lo;
    }

    SymSeries& operator+=(const SymSeries& o) {
        require_compatible(o);
        for (const auto& [m, v] : o.coeffs_) add_to(m, v);
        return *this;
    }
    SymSeries& operator-=(const SymSeries& o) {
        require_compatible(o);
        for (const auto& [m, v] : o.coeffs_) add_to(m, -v);
        return *this;
    }
    SymSeries& operator*=(const S& c) {
        if (scalar_traits<S>::is_zero(c)) {
            coeffs_.clear();
        } else {
            for (auto& [m, v] : coeffs_) v *= c;
        }
        return *this;
    }

    friend SymSeries operator+(SymSeries a, const SymSeries& b) { return a += b; }
    friend SymSeries operator-(SymSeries a, const SymSeries& b) { return a -= b; }
    friend SymSeries operator-(SymSeries a) {
        for (auto& [m, v] : a.coeffs_) v = -v;
        return a;
    }
    friend SymSeries operator*(SymSeries a, const S& c) { return a *= c; }
    friend SymSeries operator*(const S& c, SymSeries a) { return a *= c; }

    friend bool operator==(const SymSeries& a, const SymSeries& b) {
        return a.dim_ == b.dim_ && a.level_ == b.level_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const SymSeries& a, const SymSeries& b) { return !(a == b); }

    // Commutative product: exponent addition, truncated by total degree.
    friend SymSeries operator*(const SymSeries& a, const SymSeries& b) {
        a.require_compatible(b);
        SymSeries r(a.dim_, a.level_);
        MultiDegree key(std::size_t(a.dim_), 0);
        for (const auto& [ma, va] : a.coeffs_) {
            const int ta = total_degree(ma);
            for (const auto& [mb, vb] : b.coeffs_) {
                if (ta + total_degree(mb) > a.level_) continue;
                for (std::size_t i = 0; i < key.size(); ++i) key[i] = ma[i] + mb[i];
                r.add_to(key, va * vb);
            }
        }
        return r;
    }

    void require_compatible(const SymSeries& o) const {
        if (dim_ != o.dim_ || level_ != o.level_)
            throw std::invalid_argument("SymSeries: incompatible operands");
    }

private:
    void check_key(const MultiDegree& m) const {
        if (int(m.size()) != dim_) throw std::invalid_argument("SymSeries: multidegree size != dim");
        int t = 0;
        for (int e : m) {
            if (e < 0) throw std::invalid_argument("SymSeries: negative exponent");
            t += e;
        }
        if (t > level_) throw std::out_of_range("SymSeries: total degree above truncation");
    }

    int dim_;
    int level_;
    std::map<MultiDegree, S> coeffs_;
};

// pi_Sym: coefficient of a multidegree is the sum of x^w over words w whose
// letter multiset matches it. An algebra epimorphism (brackets die).
template <class S>
SymSeries<S> project_sym(const TensorSeries<S>& x) {
    SymSeries<S> r(x.dim(), x.level());
    MultiDegree key(std::size_t(x.dim()), 0);
    for (int k = 0; k <= x.level(); ++k) {
        const auto& comp = x.degree(k);
        for (std::size_t idx = 0; idx < comp.size(); ++idx) {
            if (scalar_traits<S>::is_zero(comp[idx])) continue;
            std::fill(key.begin(), key.end(), 0);
            std::size_t rem = idx;
            for (int pos = 0; pos < k; ++pos) {
                ++key[rem % std::size_t(x.dim())];
                rem /= std::size_t(x.dim());
            }
            r.add_to(key, comp[idx]);
        }
    }
    return r;
}

template <class S>
SymSeries<S> sym_exp(const SymSeries<S>& x) {
    if (!x.in_s0()) throw std::invalid_argument("sym_exp: operand must have zero scalar part");
    const int N = x.level();
    const int lo = x.min_degree();
    SymSeries<S> acc = SymSeries<S>::unit(x.dim(), N);
    if (lo > N) return acc;
    const int terms = N / lo;
    for (int k = terms; k >= 1; --k) {
        acc = x * acc;
        acc *= scalar_traits<S>::from_ratio(1, k);
        acc += SymSeries<S>::unit(x.dim(), N);
    }
    return acc;
}

template <class S>
SymSeries<S> sym_log(const SymSeries<S>& s) {
    if (!s.in_s1()) throw std::invalid_argument("sym_log: operand must have scalar part 1");
    const int N = s.level();
    SymSeries<S> y = s - SymSeries<S>::unit(s.dim(), N);
    SymSeries<S> acc(s.dim(), N);
    const int lo = y.min_degree();
    if (lo > N) return acc;
    const int terms = N / lo;
    SymSeries<S> p = SymSeries<S>::unit(s.dim(), N);
    for (int k = 1; k <= terms; ++k) {
        p = p * y;
        SymSeries<S> t = p;
        t *= scalar_traits<S>::from_ratio(k % 2 == 1 ? 1 : -1, k);
        acc += t;
    }
    return acc;
}

// delta_a with scalar a: scales a degree-n monomial by a^n.
template <class S>
SymSeries<S> sym_dilate(const SymSeries<S>& x, const S& a) {
    SymSeries<S> r(x.dim(), x.level());
    for (const auto& [m, v] : x.data()) {
        S p = scalar_traits<S>::one();
        for (int i = 0; i < total_degree(m); ++i) p *= a;
        r.add_to(m, v * p);
    }
    return r;
}

// Componentwise dilation: e^_w -> a^w e^_w with a^w = prod a_i^{n_i}.
template <class S>
SymSeries<S> sym_dilate(const SymSeries<S>& x, const std::vector<S>& a) {
    if (int(a.size()) != x.dim())
        throw std::invalid_argument("sym_dilate: vector length must equal dim");
    SymSeries<S> r(x.dim(), x.level());
    for (const auto& [m, v] : x.data()) {
        S p = scalar_traits<S>::one();
        for (std::size_t i = 0; i < a.size(); ++i)
            for (int e = 0; e < m[i]; ++e) p *= a[i];
        r.add_to(m, v * p);
    }
    return r;
}

template <class S>
SymSeries<double> to_float(const SymSeries<S>& x) {
    SymSeries<double> r(x.dim(), x.level());
    for (const auto& [m, v] : x.data()) r.set(m, scalar_traits<S>::as_double(v));
    return r;
}

// Classical "raw" semantics: E[prod (X^i)^{n_i}] = coeff(e^_v) * prod n_i!
// (the e^_v coefficient of exp(sum X^i e^_i) is x^v / prod n_i!).
inline Rat multidegree_factorial(const MultiDegree& m) {
    Rat f = 1;
    for (int e : m) f *= rat_factorial(e);
    return f;
}

template <class S>
S classical_value(const SymSeries<S>& x, const MultiDegree& m) {
    return x.coeff(m) * scalar_traits<S>::from_rat(multidegree_factorial(m));
}

template <class S>
double max_abs_diff(const SymSeries<S>& a, const SymSeries<S>& b) {
    double worst = 0.0;
    const SymSeries<S> diff = a - b;
    for (const auto& [m, v] : diff.data()) {
        (void)m;
        const double f = std::abs(scalar_traits<S>::as_double(v));
        if (f > worst) worst = f;
    }
    return worst;
}

}  // namespace sigkit

#endif
