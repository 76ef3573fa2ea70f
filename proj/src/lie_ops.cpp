#include "sigkit/lie_ops.hpp"

#include <algorithm>
#include <map>

namespace sigkit {

const Rat& bernoulli(int k) {
    if (k < 0) throw std::invalid_argument("bernoulli: negative index");
    static std::vector<Rat> cache{Rat(1)};
    while (int(cache.size()) <= k) {
        const int n = int(cache.size());
        // sum_{j=0}^{n} C(n+1, j) B_j = 0
        Rat sum = 0;
        Rat binom = 1;  // C(n+1, j), j running
        for (int j = 0; j < n; ++j) {
            sum += binom * cache[std::size_t(j)];
            binom = binom * (n + 1 - j) / (j + 1);
        }
        cache.push_back(-sum / binom);
    }
    return cache[std::size_t(k)];
}

namespace {

int moebius(int m) {
    int result = 1;
    for (int p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            m /= p;
            if (m % p == 0) return 0;
            result = -result;
        }
    }
    if (m > 1) result = -result;
    return result;
}

}  // namespace

long witt_dimension(int d, int n) {
    long sum = 0;
    for (int m = 1; m <= n; ++m) {
        if (n % m != 0) continue;
        long p = 1;
        for (int i = 0; i < n / m; ++i) p *= d;
        sum += moebius(m) * p;
    }
    return sum / n;
}

namespace {

// Polynomial in t with tensor coefficients; entry k is the coefficient of t^k.
using TPoly = std::vector<TensorSeries<Rat>>;

void poly_add_scaled(TPoly& acc, const TPoly& p, const Rat& c) {
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].is_zero()) continue;
        TensorSeries<Rat> t = p[k];
        t *= c;
        acc[k] += t;
    }
}

// Applies exp(ad y) coefficient-wise (no t involved).
TPoly apply_exp_ad(const TensorSeries<Rat>& y, const TPoly& p) {
    const int N = y.level();
    TPoly out(p.size(), TensorSeries<Rat>(y.dim(), N));
    for (std::size_t k = 0; k < p.size(); ++k) {
        TensorSeries<Rat> w = p[k];
        Rat fact = 1;
        for (int m = 0; m <= N; ++m) {
            if (m > 0) fact *= m;
            if (w.is_zero()) break;
            TensorSeries<Rat> t = w;
            t *= 1 / fact;
            out[k] += t;
            w = bracket(y, w);
        }
    }
    return out;
}

// Applies exp(ad t x): the m-fold ad x picks up a factor t^m / m!.
TPoly apply_exp_ad_t(const TensorSeries<Rat>& x, const TPoly& p) {
    const int N = x.level();
    TPoly out(std::size_t(N) + 1, TensorSeries<Rat>(x.dim(), N));
    for (std::size_t k = 0; k < p.size(); ++k) {
        TensorSeries<Rat> w = p[k];
        Rat fact = 1;
        for (int m = 0; int(k) + m <= N; ++m) {
            if (m > 0) fact *= m;
            if (w.is_zero()) break;
            TensorSeries<Rat> t = w;
            t *= 1 / fact;
            out[k + std::size_t(m)] += t;
            w = bracket(x, w);
        }
    }
    return out;
}

bool poly_is_zero(const TPoly& p) {
    return std::all_of(p.begin(), p.end(), [](const auto& c) { return c.is_zero(); });
}

}  // namespace

TensorSeries<Rat> bch_psi(const TensorSeries<Rat>& x, const TensorSeries<Rat>& y) {
    x.require_compatible(y);
    if (!x.in_t0() || !y.in_t0())
        throw std::invalid_argument("bch_psi: operands must lie in T_0");
    const int d = x.dim(), N = x.level();

    // u_n = (Z - Id)^n (x) with Z = exp(ad t x) o exp(ad y); each application
    // raises the tensor degree, so n < N suffices.
    TPoly u(std::size_t(N) + 1, TensorSeries<Rat>(d, N));
    if (!u.empty()) u[0] = x;
    TPoly acc = u;  // n = 0 term of Psi, coefficient +1
    for (int n = 1; n < N; ++n) {
        TPoly z = apply_exp_ad_t(x, apply_exp_ad(y, u));
        for (std::size_t k = 0; k < u.size(); ++k) z[k] -= u[k];
        u = std::move(z);
        if (poly_is_zero(u)) break;
        poly_add_scaled(acc, u, make_rat(n % 2 == 0 ? 1 : -1, n + 1));
    }

    // y + int_0^1 acc(t) dt
    TensorSeries<Rat> result = y;
    for (std::size_t k = 0; k < acc.size(); ++k) {
        if (acc[k].is_zero()) continue;
        TensorSeries<Rat> t = acc[k];
        t *= make_rat(1, long(k) + 1);
        result += t;
    }
    return result;
}

TensorSeries<Rat> bch_log_signature(const std::vector<TensorSeries<Rat>>& increments) {
    if (increments.empty())
        throw std::invalid_argument("bch_log_signature: need at least one increment");
    TensorSeries<Rat> omega(increments.front().dim(), increments.front().level());
    for (auto it = increments.rbegin(); it != increments.rend(); ++it)
        omega = bch_psi(*it, omega);
    return omega;
}

namespace {

TensorSeries<Rat> standard_bracketing(const Word& w, int d, int N,
                                      std::map<Word, TensorSeries<Rat>>& memo) {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    TensorSeries<Rat> result(d, N);
    if (w.size() == 1) {
        result = TensorSeries<Rat>::basis(d, N, w);
    } else {
        // Standard factorization w = uv with v the lexicographically smallest
        // proper suffix (itself Lyndon); bracketing is [B(u), B(v)].
        std::size_t split = 1;
        for (std::size_t i = 2; i < w.size(); ++i) {
            if (std::lexicographical_compare(w.begin() + long(i), w.end(),
                                             w.begin() + long(split), w.end()))
                split = i;
        }
        const Word u(w.begin(), w.begin() + long(split));
        const Word v(w.begin() + long(split), w.end());
        result = bracket(standard_bracketing(u, d, N, memo),
                         standard_bracketing(v, d, N, memo));
    }
    memo.emplace(w, result);
    return result;
}

}  // namespace

std::vector<LyndonBasisElement> lyndon_basis(int d, int N) {
    if (d < 1 || N < 1) throw std::invalid_argument("lyndon_basis: need d >= 1, N >= 1");
    // Duval's algorithm emits every Lyndon word of length <= N in
    // lexicographic order; re-sorted by (length, lex) afterwards.
    std::vector<Word> words;
    Word w{0};
    while (!w.empty()) {
        ++w.back();
        words.push_back(w);
        const std::size_t m = w.size();
        while (int(w.size()) < N) w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == d) w.pop_back();
    }
    std::stable_sort(words.begin(), words.end(), [](const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });

    std::map<Word, TensorSeries<Rat>> memo;
    std::vector<LyndonBasisElement> out;
    out.reserve(words.size());
    for (const auto& word : words)
        out.push_back({word, standard_bracketing(word, d, N, memo)});
    return out;
}

}  // namespace sigkit
