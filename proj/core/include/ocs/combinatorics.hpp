#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ocs {

// n! for n <= 20 (fits in 64 bits).
std::uint64_t factorial(int n);

// Binomial coefficient; throws DomainError on 64-bit overflow.
std::uint64_t n_choose_k(int n, int k);

// Visits every k-subset of {0..n-1} in lexicographic order, as a sorted
// index span. The span is reused between calls.
void for_each_combination(int n, int k, const std::function<void(std::span<const int>)>& visit);

}  // namespace ocs
