#ifndef SIGKIT_WORD_HPP
#define SIGKIT_WORD_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sigkit {

// A word over the alphabet {1, ..., d}. The empty word indexes the scalar
// component. Dense indexing is big-endian: the first letter is the most
// significant base-d digit, so index(w1 w2) = index(w1) * d^{|w2|} + index(w2).
using Word = std::vector<int>;

inline std::size_t pow_size(int d, int k) {
    std::size_t r = 1;
    for (int i = 0; i < k; ++i) {
        if (r > (std::size_t(1) << 50) / std::size_t(d))
            throw std::overflow_error("pow_size: d^k too large");
        r *= std::size_t(d);
    }
    return r;
}

inline std::size_t word_index(const Word& w, int d) {
    std::size_t idx = 0;
    for (int letter : w) {
        if (letter < 1 || letter > d)
            throw std::invalid_argument("word_index: letter outside [1, d]");
        idx = idx * std::size_t(d) + std::size_t(letter - 1);
    }
    return idx;
}

inline Word index_word(int length, std::size_t idx, int d) {
    Word w(static_cast<std::size_t>(length), 0);
    for (int pos = length - 1; pos >= 0; --pos) {
        w[std::size_t(pos)] = int(idx % std::size_t(d)) + 1;
        idx /= std::size_t(d);
    }
    return w;
}

}  // namespace sigkit

#endif
