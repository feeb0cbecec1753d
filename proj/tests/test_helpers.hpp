#pragma once

#include <cstdint>
#include <random>

// Deterministic uniform draws: mt19937 output is pinned by the standard,
// std::uniform_real_distribution is not, so map raw draws by hand.
namespace testutil {

class Uniform {
public:
    explicit Uniform(std::uint32_t seed) : gen_(seed) {}

    double unit() {
        std::uint64_t hi = gen_();
        std::uint64_t lo = gen_();
        return static_cast<double>(((hi << 21) ^ lo) & ((1ull << 53) - 1)) /
               static_cast<double>(1ull << 53);
    }

    double in(double a, double b) { return a + (b - a) * unit(); }

private:
    std::mt19937 gen_;
};

} // namespace testutil
