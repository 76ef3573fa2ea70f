#ifndef SIGKIT_RATIONAL_HPP
#define SIGKIT_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sigkit {

// Exact rational scalar. Kept canonical (reduced, positive denominator) at all
// times: GMP canonicalizes results of arithmetic, we canonicalize at
// construction boundaries.
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p/q" or "p".
inline Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    Rat r;
    if (slash == std::string::npos) {
        if (mpq_set_str(r.get_mpq_t(), (s + "/1").c_str(), 10) != 0)
            throw std::invalid_argument("rat_from_string: bad rational '" + s + "'");
    } else {
        if (mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0 || r.get_den() == 0)
            throw std::invalid_argument("rat_from_string: bad rational '" + s + "'");
    }
    r.canonicalize();
    return r;
}

inline std::string rat_to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline double to_double(const Rat& r) { return r.get_d(); }

inline Rat rat_factorial(int k) {
    Rat r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

// Per-scalar-kind glue so the tensor algebra can be instantiated exactly
// (identity suites) or in double (quadrature, Monte Carlo).
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
    static constexpr bool exact = true;
    static Rat zero() { return Rat(0); }
    static Rat one() { return Rat(1); }
    static Rat from_ratio(long num, long den) { return make_rat(num, den); }
    static Rat from_rat(const Rat& r) { return r; }
    static bool is_zero(const Rat& v) { return v == 0; }
    static bool close(const Rat& a, const Rat& b) { return a == b; }
    static double as_double(const Rat& v) { return v.get_d(); }
    static const char* name() { return "rational"; }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_ratio(long num, long den) {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    static double from_rat(const Rat& r) { return r.get_d(); }
    static bool is_zero(double v) { return v == 0.0; }
    static bool close(double a, double b) {
        const double aa = a < 0 ? -a : a, bb = b < 0 ? -b : b;
        const double scale = aa > bb ? (aa > 1.0 ? aa : 1.0) : (bb > 1.0 ? bb : 1.0);
        const double diff = a > b ? a - b : b - a;
        return diff <= 1e-9 * scale;
    }
    static double as_double(double v) { return v; }
    static const char* name() { return "float64"; }
};

}  // namespace sigkit

#endif
