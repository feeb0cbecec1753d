#pragma once

// Deterministic test-function suites and evaluation grids for the residual
// engine: smooth decaying Gaussian packets probing all derivative orders,
// plus the system's own bound states probing kernels.

#include "darboux/operators.hpp"
#include "darboux/soliton.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace darboux {

namespace detail {

// mt19937 output is pinned by the standard; the [0,1) mapping is done by
// hand because uniform_real_distribution is not.
class DetUniform {
public:
    explicit DetUniform(std::uint32_t seed) : gen_(seed) {}
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

} // namespace detail

constexpr std::uint32_t kTestFnSeed = 0xDA4B;

struct PacketParams {
    double center, width, momentum;
};

inline std::vector<PacketParams> packet_params(double kappa1, double kappan, int count = 8,
                                               std::uint32_t seed = kTestFnSeed) {
    detail::DetUniform u(seed);
    std::vector<PacketParams> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        out.push_back({u.in(-3.0, 3.0) / kappa1, u.in(0.5, 2.0) / kappa1,
                       u.in(0.0, 3.0 * kappan)});
    }
    return out;
}

// A test function together with the relative accuracy of its own values:
// analytic packets are exact to roundoff, constructed eigenstates carry the
// error of the chain evaluation and branch gluing.
struct TestFunction {
    TestFn eval;
    double noise = 1e-15;
    std::string label;
};

constexpr double kStateNoise = 1e-12;

inline TestFunction packet_fn(PacketParams p) {
    return {[p](double x, int ord) {
                return gaussian_packet_jet(p.center, p.width, p.momentum, x, ord);
            },
            1e-15, "packet"};
}

inline TestFunction bound_state_fn(ChainPtr c, int j) {
    return {[c, j](double x, int ord) { return to_complex(c->bound_state(j, x, ord)); },
            kStateNoise, "bound_state_" + std::to_string(j)};
}

inline TestFunction edge_state_fn(ChainPtr c) {
    return {[c](double x, int ord) { return to_complex(c->edge_state(x, ord)); },
            kStateNoise, "edge_state"};
}

inline TestFunction scatter_state_fn(ChainPtr c, double k, int dir) {
    return {[c, k, dir](double x, int ord) { return c->scatter_state(k, dir, x, ord); },
            kStateNoise, "scatter_state"};
}

// Packets scaled to the spec plus its bound states.
inline std::vector<TestFunction> test_suite(const SolitonSpec& spec, int packets = 8,
                                            std::uint32_t seed = kTestFnSeed) {
    double k1 = spec.n() ? spec.kappas.front() : 1.0;
    double kn = spec.n() ? spec.kappas.back() : 1.0;
    std::vector<TestFunction> fns;
    for (const PacketParams& p : packet_params(k1, kn, packets, seed))
        fns.push_back(packet_fn(p));
    if (spec.n()) {
        ChainPtr c = std::make_shared<const Chain>(spec);
        for (int j = 1; j <= spec.n(); ++j) fns.push_back(bound_state_fn(c, j));
    }
    return fns;
}

inline std::vector<double> chebyshev_grid(double half_span, int points = 41) {
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i)
        xs[i] = -half_span * std::cos(M_PI * (2 * i + 1) / (2.0 * points));
    return xs;
}

inline std::vector<double> filter_poles(std::vector<double> xs,
                                        const std::vector<double>& poles, double guard) {
    std::vector<double> out;
    for (double x : xs) {
        bool ok = true;
        for (double p : poles)
            if (std::abs(x - p) < guard) ok = false;
        if (ok) out.push_back(x);
    }
    return out;
}

// Standard evaluation grid of a system: 41 Chebyshev points over
// [-8/kappa_1, 8/kappa_1], clear of the declared coefficient poles.
inline std::vector<double> evaluation_grid(const SolitonSpec& spec,
                                           const std::vector<double>& poles = {},
                                           int points = 41) {
    double k1 = spec.n() ? spec.kappas.front() : 1.0;
    return filter_poles(chebyshev_grid(8.0 / k1, points), poles, 0.05 / k1);
}

} // namespace darboux
