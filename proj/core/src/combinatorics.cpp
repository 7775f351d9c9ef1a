#include "ocs/combinatorics.hpp"

#include "ocs/error.hpp"

namespace ocs {

std::uint64_t factorial(int n) {
    if (n < 0 || n > 20) throw DomainError("n", "factorial supports 0 <= n <= 20");
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

std::uint64_t n_choose_k(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        std::uint64_t next = c / static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n - k + i) +
                             c % static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n - k + i) /
                                 static_cast<std::uint64_t>(i);
        if (next < c) throw DomainError("n", "n_choose_k overflows 64 bits");
        c = next;
    }
    return c;
}

void for_each_combination(int n, int k, const std::function<void(std::span<const int>)>& visit) {
    if (k < 0 || k > n) throw DomainError("k", "for_each_combination requires 0 <= k <= n");
    if (k == 0) {
        visit({});
        return;
    }
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        visit(idx);
        // advance to the next combination in lexicographic order
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace ocs
