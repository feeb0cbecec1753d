#pragma once

// Kernel certification of the Lax integral. The 2n+1-dimensional kernel of
// Z_{2n+1} = A_n d/dx A_n^dag consists of the n bound states, the zero-energy
// edge state, and the n secular partners A_n (x psi_j) (the dressing of the
// resonant solutions of prod (H_0 + kappa_i^2) h = partner seed). The
// quadrature second solutions psi int dx / psi^2 are eigenfunctions but lie
// outside ker Z; they are annihilated by Z^2 and certified as such.

#include "darboux/intertwiners.hpp"
#include "darboux/residual.hpp"

namespace darboux {

namespace detail {

template <class F>
double adaptive_simpson(F f, double a, double b, double fa, double fm, double fb,
                        double area, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - area) < 15.0 * tol)
        return left + right + (left + right - area) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F f, double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double area = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, area, tol * std::max(1.0, std::abs(area)),
                            40);
}

} // namespace detail

// x as a jet: coeffs (x, 1, 0, ...).
inline RJet linear_jet(double x, int ord) {
    std::vector<double> c(ord + 1, 0.0);
    c[0] = x;
    if (ord >= 1) c[1] = 1.0;
    return RJet(x, ord, {1.0, 0.0, 0.0}, std::move(c));
}

// A_n (x psi_j): the kernel member of Z beyond the bound and edge states.
inline TestFunction secular_partner_fn(ChainPtr chain, int j) {
    return {[chain, j](double x, int ord) {
                int n = chain->n();
                int p = j - 1;
                int seed_ord = ord + n;
                RJet seed = detail::seed_is_cosh(p)
                                ? cosh_jet(chain->spec().kappas[p], chain->spec().taus[p],
                                           x, seed_ord)
                                : sinh_jet(chain->spec().kappas[p], chain->spec().taus[p],
                                           x, seed_ord);
                RJet t = jet_mul(linear_jet(x, seed_ord), seed);
                return to_complex(chain->apply_chain(std::move(t), chain->eval(x, ord + n).w));
            },
            kStateNoise, "secular_partner_" + std::to_string(j)};
}

// The second solution at a bound energy, psi-tilde(x) = psi(x) I(x) with
// I' = 1/psi^2 and I(x0) = 0; x0 sits at the state's maximum and evaluation
// stays inside the node-free interval around it.
class TildePartner {
public:
    TildePartner(ChainPtr chain, int level) : chain_(std::move(chain)), level_(level) {
        double k1 = chain_->spec().kappas.front();
        double span = 10.0 / k1;
        double best = 0.0, bx = 0.0;
        const int m = 401;
        std::vector<double> vals(m);
        for (int i = 0; i < m; ++i) {
            double x = -span + 2.0 * span * i / (m - 1);
            vals[i] = chain_->bound_state(level_, x, 0).value();
            if (std::abs(vals[i]) > best) {
                best = std::abs(vals[i]);
                bx = x;
            }
        }
        x0_ = bx;
        lo_ = -span;
        hi_ = span;
        for (int i = 1; i < m; ++i) {
            double x = -span + 2.0 * span * i / (m - 1);
            if (vals[i - 1] * vals[i] <= 0.0) {
                if (x <= x0_) lo_ = std::max(lo_, x);
                if (x > x0_) hi_ = std::min(hi_, x - 2.0 * span / (m - 1));
            }
        }
        double margin = 0.4 / k1;
        lo_ += margin;
        hi_ -= margin;
    }

    double node_free_lo() const { return lo_; }
    double node_free_hi() const { return hi_; }

    CJet eval(double x, int ord) const {
        if (x < lo_ || x > hi_)
            throw pole_proximity_error("tilde partner: outside the node-free interval");
        RJet psi = chain_->bound_state(level_, x, ord + 1);
        RJet inv2 = jet_reciprocal(jet_mul(psi.truncated(ord), psi.truncated(ord)));
        double q = detail::integrate(
            [this](double t) {
                double v = chain_->bound_state(level_, t, 0).value();
                return 1.0 / (v * v);
            },
            x0_, x);
        RJet integral = jet_antiderivative(inv2, q);
        return to_complex(jet_mul(psi.truncated(ord), integral.truncated(ord)));
    }

    TestFunction as_test_function() const {
        auto self = *this;
        return {[self](double x, int ord) { return self.eval(x, ord); }, 1e-9,
                "tilde_partner_" + std::to_string(level_)};
    }

private:
    ChainPtr chain_;
    int level_;
    double x0_ = 0.0, lo_ = 0.0, hi_ = 0.0;
};

struct KernelSuiteReport {
    std::vector<ResidualReport> members;       // the 2n+1 kernel members under Z
    std::vector<ResidualReport> tilde_partners; // quadrature partners under Z^2
    bool pass = true;
};

inline KernelSuiteReport kernel_suite(const SolitonSpec& spec) {
    validate_spec(spec);
    ChainPtr chain = make_chain(spec);
    Op z = lax_Z(chain);
    KernelSuiteReport out;
    ResidualOptions opt;
    opt.grid = evaluation_grid(spec);
    opt.threshold = 1e-8;
    for (int j = 1; j <= spec.n(); ++j)
        out.members.push_back(annihilation_residual("Z_kernel_bound_" + std::to_string(j),
                                                    z, bound_state_fn(chain, j), opt));
    out.members.push_back(annihilation_residual("Z_kernel_edge", z, edge_state_fn(chain), opt));
    for (int j = 1; j <= spec.n(); ++j)
        out.members.push_back(annihilation_residual(
            "Z_kernel_secular_" + std::to_string(j), z, secular_partner_fn(chain, j), opt));
    for (int j = 1; j <= spec.n(); ++j) {
        TildePartner tilde(chain, j);
        ResidualOptions topt;
        for (double x : chebyshev_grid(8.0 / spec.kappas.front(), 41))
            if (x > tilde.node_free_lo() && x < tilde.node_free_hi())
                topt.grid.push_back(x);
        topt.threshold = 1e-6;
        out.tilde_partners.push_back(annihilation_residual(
            "Z2_kernel_tilde_" + std::to_string(j), z * z, tilde.as_test_function(), topt));
    }
    for (const ResidualReport& r : out.members) out.pass = out.pass && r.pass;
    for (const ResidualReport& r : out.tilde_partners) out.pass = out.pass && r.pass;
    return out;
}

} // namespace darboux
