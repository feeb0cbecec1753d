#pragma once

// Independent numerical oracles: a banded finite-difference eigensolver for
// the bound-state energies and a shooting integrator for the scattering
// data. Neither touches the chain or operator machinery beyond sampling the
// potential pointwise.

#include "darboux/soliton.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace darboux {

struct oracle_error : std::runtime_error {
    explicit oracle_error(const std::string& what) : std::runtime_error(what) {}
};

// Lowest eigenvalues of -d^2/dx^2 + V on [-L, L] with Dirichlet walls,
// discretized with the 4th-order five-point stencil on N interior points.
inline std::vector<double> eigen_oracle(const SolitonSpec& spec, double L, int N,
                                        int levels) {
    validate_spec(spec);
    Chain chain(spec);
    double h = 2.0 * L / (N + 1);
    double c0 = 30.0 / (12.0 * h * h);
    double c1 = -16.0 / (12.0 * h * h);
    double c2 = 1.0 / (12.0 * h * h);
    // symmetric banded, kd = 2, LAPACK lower storage: ab(1+i-j, j) = a(i,j)
    const int kd = 2, ldab = kd + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * N, 0.0);
    for (int j = 0; j < N; ++j) {
        double x = -L + (j + 1) * h;
        ab[0 + j * ldab] = c0 + chain.potential(x);
        if (j + 1 < N) ab[1 + j * ldab] = c1;
        if (j + 2 < N) ab[2 + j * ldab] = c2;
    }
    std::vector<double> w(N), z(1);
    std::vector<lapack_int> ifail(N);
    lapack_int m = 0;
    lapack_int info = LAPACKE_dsbevx(
        LAPACK_COL_MAJOR, 'N', 'I', 'L', N, kd, ab.data(), ldab, nullptr, 1, 0.0, 0.0,
        1, levels, 2.0 * LAPACKE_dlamch('S'), &m, w.data(), z.data(), 1, ifail.data());
    if (info != 0) throw oracle_error("eigen_oracle: dsbevx failed, info = " +
                                      std::to_string(info));
    w.resize(std::min<int>(m, levels));
    return w;
}

// Scattering data extracted by integrating -psi'' + V psi = k^2 psi from the
// transmitted side at +X back to -X and decomposing into incoming/reflected
// plane waves. Returned in the transfer normalization: a is the coefficient
// the closed-form product predicts (|a| = 1, t = 1/a), b the reflected one
// (r = b/a).
struct ScatterData {
    cplx a, b; // psi -> a e^{ikx} + b e^{-ikx} as x -> -inf, psi = e^{ikx} at +inf
    cplx t() const { return cplx(1.0, 0.0) / a; }
    cplx r() const { return b / a; }
};

namespace detail {

// one adaptive RKF45 step for the 2-component complex system
struct ScatterRhs {
    const Chain& chain;
    double k2;
    std::array<cplx, 2> operator()(double x, const std::array<cplx, 2>& y) const {
        return {y[1], (chain.potential(x) - k2) * y[0]};
    }
};

template <class F>
void rk45_integrate(F rhs, double& x, std::array<cplx, 2>& y, double x_end,
                    double tol) {
    // Cash-Karp coefficients
    static const double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
    static const double b21 = 0.2;
    static const double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
    static const double b41 = 0.3, b42 = -0.9, b43 = 1.2;
    static const double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                        b54 = 35.0 / 27.0;
    static const double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                        b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                        b65 = 253.0 / 4096.0;
    static const double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                        c6 = 512.0 / 1771.0;
    static const double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                        d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                        d6 = c6 - 0.25;

    double dir = x_end > x ? 1.0 : -1.0;
    double hstep = dir * 0.05;
    int steps = 0;
    while (dir * (x_end - x) > 1e-14) {
        if (dir * (x + hstep - x_end) > 0.0) hstep = x_end - x;
        auto k1 = rhs(x, y);
        auto at = [&](double c, const std::array<cplx, 2>& dy) {
            return std::array<cplx, 2>{y[0] + hstep * c * dy[0],
                                       y[1] + hstep * c * dy[1]};
        };
        auto add = [&](std::initializer_list<std::pair<double, const std::array<cplx, 2>*>>
                           terms) {
            std::array<cplx, 2> out = y;
            for (auto [c, v] : terms) {
                out[0] += hstep * c * (*v)[0];
                out[1] += hstep * c * (*v)[1];
            }
            return out;
        };
        (void)a2;
        (void)a3;
        (void)a4;
        (void)a5;
        (void)a6;
        auto k2 = rhs(x + a2 * hstep, at(b21, k1));
        auto k3 = rhs(x + a3 * hstep, add({{b31, &k1}, {b32, &k2}}));
        auto k4 = rhs(x + a4 * hstep, add({{b41, &k1}, {b42, &k2}, {b43, &k3}}));
        auto k5 = rhs(x + a5 * hstep, add({{b51, &k1}, {b52, &k2}, {b53, &k3}, {b54, &k4}}));
        auto k6 = rhs(x + a6 * hstep,
                      add({{b61, &k1}, {b62, &k2}, {b63, &k3}, {b64, &k4}, {b65, &k5}}));
        std::array<cplx, 2> ynew = add({{c1, &k1}, {c3, &k3}, {c4, &k4}, {c6, &k6}});
        std::array<cplx, 2> err = {
            hstep * (d1 * k1[0] + d3 * k3[0] + d4 * k4[0] + d5 * k5[0] + d6 * k6[0]),
            hstep * (d1 * k1[1] + d3 * k3[1] + d4 * k4[1] + d5 * k5[1] + d6 * k6[1])};
        double scale = std::max({std::abs(ynew[0]), std::abs(ynew[1]), 1.0});
        double emax = std::max(std::abs(err[0]), std::abs(err[1])) / scale;
        if (emax <= tol) {
            x += hstep;
            y = ynew;
        }
        double grow = emax > 0 ? 0.9 * std::pow(tol / emax, 0.2) : 5.0;
        hstep *= std::clamp(grow, 0.2, 5.0);
        if (++steps > 2000000)
            throw oracle_error("StiffIntegration: scattering integration stalled");
    }
}

} // namespace detail

inline ScatterData scattering_oracle(const SolitonSpec& spec, double k,
                                     double tol = 1e-10) {
    if (!(k > 0.0)) throw spec_error("scattering_oracle: k must be positive");
    validate_spec(spec);
    Chain chain(spec);
    double X = far_field_distance(spec);
    detail::ScatterRhs rhs{chain, k * k};
    std::array<cplx, 2> y = {std::polar(1.0, k * X), cplx(0.0, k) * std::polar(1.0, k * X)};
    double x = X;
    try {
        detail::rk45_integrate(rhs, x, y, -X, tol);
    } catch (const oracle_error&) {
        // reduce step tolerance once and retry from scratch
        x = X;
        y = {std::polar(1.0, k * X), cplx(0.0, k) * std::polar(1.0, k * X)};
        detail::rk45_integrate(rhs, x, y, -X, tol * 10.0);
    }
    cplx eikx = std::polar(1.0, k * x);
    cplx ik(0.0, k);
    ScatterData out;
    out.a = (y[1] + ik * y[0]) / (2.0 * ik * eikx);
    out.b = -(y[1] - ik * y[0]) * eikx / (2.0 * ik);
    return out;
}

} // namespace darboux
