#ifndef SIGKIT_SIGNATURES_HPP
#define SIGKIT_SIGNATURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sigkit/tensor_series.hpp"

namespace sigkit {

// A discrete T_0-valued driver stored as increments: increment j is
// X_{j+1} - X_j (0-based). Piecewise-linear paths in R^d enter as
// level-1-only increments; g^N-valued drivers carry higher degrees directly.
template <class S>
struct DrivePath {
    int dim = 1;
    int level = 0;
    std::vector<TensorSeries<S>> increments;
    std::vector<double> times;        // optional; size increments.size()+1 when present
    std::vector<std::uint8_t> jumps;  // optional Marcus tags; 1 = jump displacement

    std::size_t steps() const { return increments.size(); }

    void validate() const {
        for (const auto& inc : increments) {
            if (inc.dim() != dim || inc.level() != level)
                throw std::invalid_argument("DrivePath: increment dim/level mismatch");
            if (!inc.in_t0())
                throw std::invalid_argument("DrivePath: increments must lie in T_0");
        }
        if (!times.empty()) {
            if (times.size() != increments.size() + 1)
                throw std::invalid_argument("DrivePath: need one time stamp per node");
            for (std::size_t i = 1; i < times.size(); ++i)
                if (!(times[i - 1] < times[i]))
                    throw std::invalid_argument("DrivePath: time stamps must strictly increase");
        }
        if (!jumps.empty() && jumps.size() != increments.size())
            throw std::invalid_argument("DrivePath: need one tag per increment");
    }
};

// Sig over the index interval (s, t]: the ordered product of exponential
// increments. s == t gives 1.
template <class S>
TensorSeries<S> signature(const DrivePath<S>& path, std::size_t s, std::size_t t) {
    if (s > t || t > path.steps())
        throw std::out_of_range("signature: index range outside path");
    TensorSeries<S> sig = TensorSeries<S>::unit(path.dim, path.level);
    for (std::size_t j = s; j < t; ++j) sig = sig * exp_series(path.increments[j]);
    return sig;
}

template <class S>
TensorSeries<S> signature(const DrivePath<S>& path) {
    return signature(path, 0, path.steps());
}

template <class S>
TensorSeries<S> log_signature(const DrivePath<S>& path, std::size_t s, std::size_t t) {
    return log_series(signature(path, s, t));
}

template <class S>
TensorSeries<S> log_signature(const DrivePath<S>& path) {
    return log_series(signature(path));
}

// Marcus mechanics: jumps enter as exponentials of the displacement, exactly
// like segments, so this is signature() under any tagging. The tags exist so
// Levy-model callers can label jump contributions in reports.
template <class S>
TensorSeries<S> marcus_signature(const DrivePath<S>& path) {
    return signature(path);
}

// Cached prefix products for repeated (s, t] queries against one path:
// prefix[j] = prod_{i<j} exp(increment_i), query = prefix[s]^{-1} prefix[t].
template <class S>
class SignaturePrefix {
public:
    explicit SignaturePrefix(const DrivePath<S>& path) {
        path.validate();
        prefix_.reserve(path.steps() + 1);
        prefix_.push_back(TensorSeries<S>::unit(path.dim, path.level));
        for (const auto& inc : path.increments)
            prefix_.push_back(prefix_.back() * exp_series(inc));
    }

    std::size_t steps() const { return prefix_.size() - 1; }
    const TensorSeries<S>& prefix(std::size_t j) const { return prefix_.at(j); }

    TensorSeries<S> query(std::size_t s, std::size_t t) const {
        if (s > t || t >= prefix_.size())
            throw std::out_of_range("SignaturePrefix::query: bad index range");
        return group_inverse(prefix_[s]) * prefix_[t];
    }

private:
    std::vector<TensorSeries<S>> prefix_;
};

// Parses "t,x1,...,xd" CSV text into level-1 increments. Malformed input
// throws with a line diagnostic.
DrivePath<double> path_from_csv(const std::string& text, int level);
DrivePath<double> path_from_csv_file(const std::string& filename, int level);

}  // namespace sigkit

#endif
