#ifndef SIGKIT_COMPOSITIONS_HPP
#define SIGKIT_COMPOSITIONS_HPP

#include <vector>

namespace sigkit {

// All compositions of n into parts >= 1, in lexicographic order (so failures
// reproduce deterministically). n = 0 yields just the empty composition.
inline std::vector<std::vector<int>> compositions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    // iterative DFS, first part smallest
    struct Frame {
        int remaining;
        int next;
    };
    std::vector<Frame> stack{{n, 1}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.remaining == 0) {
            out.push_back(cur);
            stack.pop_back();
            if (!cur.empty()) cur.pop_back();
            continue;
        }
        if (f.next > f.remaining) {
            stack.pop_back();
            if (!cur.empty()) cur.pop_back();
            continue;
        }
        const int part = f.next;
        ++f.next;
        cur.push_back(part);
        stack.push_back({f.remaining - part, 1});
    }
    return out;
}

// All set partitions of {0,...,n-1} as restricted-growth strings; block id of
// element i is rgs[i].
inline std::vector<std::vector<int>> set_partitions(int n) {
    std::vector<std::vector<int>> out;
    if (n == 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> rgs(std::size_t(n), 0);
    while (true) {
        out.push_back(rgs);
        // next restricted growth string
        int i = n - 1;
        for (; i > 0; --i) {
            int maxv = 0;
            for (int j = 0; j < i; ++j)
                if (rgs[std::size_t(j)] > maxv) maxv = rgs[std::size_t(j)];
            if (rgs[std::size_t(i)] <= maxv) break;
        }
        if (i == 0) break;
        ++rgs[std::size_t(i)];
        for (int j = i + 1; j < n; ++j) rgs[std::size_t(j)] = 0;
    }
    return out;
}

}  // namespace sigkit

#endif
