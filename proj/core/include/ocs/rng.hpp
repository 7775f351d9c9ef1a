#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ocs {

// splitmix64 finalizer; good avalanche for seed derivation.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_purpose(std::string_view purpose) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : purpose) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seeded random stream keyed by (seed, stream_id). Identical keys reproduce
// identical draw sequences on every platform: the engine is mt19937_64 (its
// sequence is fixed by the standard) and all distributions below are
// implemented here rather than with std:: distributions, whose output is
// implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id),
          engine_(mix64(mix64(seed) ^ mix64(stream_id))) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    // Child stream keyed by a purpose tag and an optional index. Children of
    // distinct (purpose, id) pairs are statistically independent.
    RngStream derive(std::string_view purpose, std::uint64_t id = 0) const {
        std::uint64_t child = mix64(stream_id_ ^ mix64(hash_purpose(purpose) + mix64(id)));
        return RngStream(seed_, child);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe as a log() argument.
    double next_real_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    // Box-Muller without caching, so the stream state stays a pure function
    // of the number of calls.
    double normal(double mean = 0.0, double sigma = 1.0);

    // k distinct indices from [0, n), uniform over ordered k-tuples,
    // returned in draw order (partial Fisher-Yates).
    std::vector<int> sample_distinct(int k, int n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

}  // namespace ocs
