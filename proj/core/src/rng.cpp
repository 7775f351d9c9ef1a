#include "ocs/rng.hpp"

#include <cmath>
#include <numbers>

#include "ocs/error.hpp"

namespace ocs {

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) throw DomainError("n", "below(0) is undefined");
    if ((n & (n - 1)) == 0) return next_u64() & (n - 1);
    // rejection sampling over the largest multiple of n
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return r % n;
}

double RngStream::normal(double mean, double sigma) {
    double u1 = next_real_pos();
    double u2 = next_real();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sigma * z;
}

std::vector<int> RngStream::sample_distinct(int k, int n) {
    if (k < 0 || n < 0 || k > n)
        throw DomainError("k", "sample_distinct requires 0 <= k <= n");
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        std::uint64_t j = static_cast<std::uint64_t>(i) + below(static_cast<std::uint64_t>(n - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

}  // namespace ocs
