#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace stresscert {

// Seeded random source for the instance generator. The engine is mt19937_64,
// whose output stream is fixed by the standard; bounded draws are done by
// rejection here because uniform_int_distribution is allowed to differ
// between standard libraries and generator output must be reproducible
// byte-for-byte across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform value in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        for (;;) {
            std::uint64_t v = eng_();
            if (v < limit) return v % bound;
        }
    }

    // Uniform value in [lo, hi], inclusive.
    long long range(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // k distinct values drawn from {0, ..., pool-1}, returned ascending.
    std::vector<int> sample(int pool, int k) {
        std::vector<int> idx(static_cast<size_t>(pool));
        for (int i = 0; i < pool; ++i) idx[static_cast<size_t>(i)] = i;
        for (int i = 0; i < k; ++i) {
            int j = i + static_cast<int>(below(static_cast<std::uint64_t>(pool - i)));
            std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        }
        idx.resize(static_cast<size_t>(k));
        std::sort(idx.begin(), idx.end());
        return idx;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace stresscert
