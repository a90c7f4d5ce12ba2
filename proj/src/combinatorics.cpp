#include "tising/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tising/errors.hpp"

namespace tising {

double factorial(int k) {
    if (k < 0 || k > kMaxOrder)
        throw ArgumentError("factorial: order must lie in [0, " + std::to_string(kMaxOrder) + "]");
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double log_binomial(std::int64_t n, std::int64_t r) {
    if (n < 0 || r < 0 || r > n) throw ArgumentError("log_binomial: need 0 <= r <= n");
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(r) + 1.0) -
           std::lgamma(double(n - r) + 1.0);
}

std::uint64_t binomial(std::int64_t n, std::int64_t r) {
    if (n < 0 || r < 0 || r > n) return 0;
    r = std::min(r, n - r);
    unsigned __int128 acc = 1;
    for (std::int64_t i = 1; i <= r; ++i) {
        acc = acc * static_cast<unsigned __int128>(n - r + i) / static_cast<unsigned __int128>(i);
        if (acc > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(acc);
}

std::vector<Subset> enumerate_subsets(std::span<const int> universe, int size) {
    std::vector<Subset> out;
    const int m = static_cast<int>(universe.size());
    if (size < 0 || size > m) return out;
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
        Subset s(size);
        for (int i = 0; i < size; ++i) s[i] = universe[idx[i]];
        out.push_back(std::move(s));
        int i = size - 1;
        while (i >= 0 && idx[i] == m - size + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

bool is_strictly_increasing(std::span<const int> s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] <= s[i - 1]) return false;
    return true;
}

Subset remove_vertex(const Subset& s, int v) {
    Subset out;
    out.reserve(s.size() - 1);
    for (int u : s)
        if (u != v) out.push_back(u);
    return out;
}

Subset insert_vertex(const Subset& s, int v) {
    Subset out(s);
    out.insert(std::lower_bound(out.begin(), out.end(), v), v);
    return out;
}

} // namespace tising
