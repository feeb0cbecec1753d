#include <catch2/catch_amalgamated.hpp>

#include "darboux/soliton.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace darboux;

namespace {

SolitonSpec spec_n1(double k = 1.0, double t = 0.0) { return SolitonSpec::make({k}, {t}); }
SolitonSpec spec_n2(double t1 = 0.0, double t2 = 0.0) { return SolitonSpec::make({1.0, 2.0}, {t1, t2}); }

double eigen_residual(const RJet& psi, double V, double E) {
    double lhs = -psi.deriv(2) + V * psi.value();
    double rhs = E * psi.value();
    double scale = std::max({std::abs(psi.deriv(2)), std::abs(V * psi.value()),
                             std::abs(rhs), 1e-30});
    return std::abs(lhs - rhs) / scale;
}

} // namespace

TEST_CASE("spec validation") {
    CHECK_NOTHROW(validate_spec(spec_n2()));
    CHECK_NOTHROW(validate_spec(SolitonSpec::make({}, {})));
    CHECK_THROWS_WITH(validate_spec(SolitonSpec::make({2.0, 1.0}, {0.0, 0.0})),
                      Catch::Matchers::ContainsSubstring("OrderingViolation"));
    CHECK_THROWS_WITH(validate_spec(SolitonSpec::make({-1.0}, {0.0})),
                      Catch::Matchers::ContainsSubstring("NonPositiveKappa"));
    CHECK_THROWS_WITH(validate_spec(SolitonSpec::make({1.0, 2.0}, {0.0, 0.0}, {0, 0})),
                      Catch::Matchers::ContainsSubstring("seed_order"));
}

TEST_CASE("free particle: empty chain, zero potential, unit transmission") {
    Chain c(SolitonSpec::make({}, {}));
    CHECK(c.potential(0.7) == 0.0);
    CHECK(std::abs(transmission_closed_form(c.spec(), 0.9) - cplx(1.0, 0.0)) < 1e-15);
}

TEST_CASE("n=1 chain factor is kappa tanh") {
    Chain c(spec_n1());
    for (double x : {-3.0, 0.0, 1.7}) {
        ChainJets j = c.eval(x, 2);
        CHECK(j.w[0].value() == Catch::Approx(std::tanh(x)).epsilon(1e-13));
    }
}

TEST_CASE("permuted n=2 chain starts with the coth factor") {
    Chain c(SolitonSpec::make({1.0, 2.0}, {0.1, -0.4}, {1, 0}));
    double x = 1.3;
    ChainJets j = c.eval(x, 2);
    CHECK(j.w[0].value() == Catch::Approx(2.0 / std::tanh(2.0 * (x - 0.4))).epsilon(1e-12));
}

TEST_CASE("identity-order n=2 second factor matches -A1^dag + w") {
    SolitonSpec s = SolitonSpec::make({1.0, 2.0}, {0.3, -0.2});
    Chain c(s);
    for (double x : {-1.1, 0.4, 2.0}) {
        ChainJets j = c.eval(x, 2);
        double expect = -std::tanh(x + 0.3) - n2closed::w_of(s, x);
        CHECK(j.w[1].value() == Catch::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("potential anchors: -2 kappa^2 at the n=1 center, -6 for the PT pair") {
    CHECK(Chain(spec_n1()).potential(0.0) == Catch::Approx(-2.0).epsilon(1e-12));
    CHECK(Chain(spec_n2()).potential(0.0) == Catch::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("n=2 chain potential equals the closed form") {
    SolitonSpec s = SolitonSpec::make({1.0, 2.0}, {0.3, -0.2});
    Chain c(s);
    CHECK(c.potential(1.1) == Catch::Approx(n2closed::potential(s, 1.1)).epsilon(1e-10));
    testutil::Uniform u(31u);
    for (int i = 0; i < 40; ++i) {
        double x = u.in(-6.0, 6.0);
        if (std::abs(x - 0.2) < 0.05) continue; // csch pole of the closed form only
        double ref = n2closed::potential(s, x);
        CHECK(c.potential(x) == Catch::Approx(ref).margin(1e-10 * std::max(1.0, std::abs(ref))));
    }
}

TEST_CASE("w identities of the two-soliton superpotential") {
    SolitonSpec s = SolitonSpec::make({0.9, 1.7}, {0.25, -0.6});
    Chain c(s);
    double k1 = s.kappas[0], k2 = s.kappas[1];
    testutil::Uniform u(32u);
    for (int i = 0; i < 30; ++i) {
        double x = u.in(-5.0, 5.0);
        if (std::abs(x + s.taus[1]) < 0.05) continue;
        RJet wj = c.log_wronskian_slope_neg(x, 1);
        double w = wj.value();
        double V = c.potential(x);
        double tol = 1e-10 * std::max(1.0, std::abs(V));
        CHECK(std::abs(wj.deriv(1) - 0.5 * V) < tol);
        CHECK(std::abs(w * w + 2 * k1 * w * std::tanh(k1 * (x + s.taus[0])) -
                       0.5 * V - k2 * k2 + k1 * k1) < tol);
        CHECK(std::abs(w * w + 2 * k2 * w / std::tanh(k2 * (x + s.taus[1])) -
                       0.5 * V - k1 * k1 + k2 * k2) < tol);
        CHECK(w == Catch::Approx(n2closed::w_of(s, x)).margin(1e-11));
    }
}

TEST_CASE("chain route equals the Wronskian route") {
    std::vector<SolitonSpec> specs = {
        spec_n1(1.0, 0.4),
        spec_n2(0.3, -0.2),
        SolitonSpec::make({0.5, 1.1, 2.2}, {0.0, 0.7, -0.9}),
        SolitonSpec::make({0.5, 1.0, 1.5, 2.5}, {0.2, -0.3, 0.5, 0.0}),
    };
    for (const auto& s : specs) {
        Chain c(s);
        double span = 40.0 / s.kappas[0];
        for (int i = 0; i <= 16; ++i) {
            double x = -span + 2.0 * span * i / 16.0;
            WronskianLog wl = wronskian_log(s, x);
            double v = c.potential(x);
            CHECK(std::isfinite(wl.log_w));
            CHECK(std::abs(-2.0 * wl.d2log - v) < 1e-10 * std::max(1.0, std::abs(v)));
        }
    }
}

TEST_CASE("Wronskian log slope saturates to the sum of kappas") {
    SolitonSpec s = spec_n2(0.3, -0.2);
    WronskianLog wl = wronskian_log(s, 500.0);
    CHECK(wl.dlog == Catch::Approx(3.0).margin(1e-8));
    CHECK(std::isfinite(wl.log_w));
}

TEST_CASE("n=1 Wronskian pieces are cosh quantities") {
    WronskianLog wl = wronskian_log(spec_n1(1.3, 0.2), 0.9);
    CHECK(wl.dlog == Catch::Approx(1.3 * std::tanh(1.3 * 1.1)).epsilon(1e-12));
    CHECK(wl.log_w == Catch::Approx(std::log(std::cosh(1.3 * 1.1))).epsilon(1e-12));
}

TEST_CASE("bound states: sech for n=1, closed two-soliton forms for n=2") {
    Chain c1(spec_n1());
    double r0 = c1.bound_state(1, 0.0, 2).value() / (1.0 / std::cosh(0.0));
    for (double x : {-2.0, 0.5, 3.0}) {
        double ratio = c1.bound_state(1, x, 2).value() / (1.0 / std::cosh(x));
        CHECK(ratio == Catch::Approx(r0).epsilon(1e-11));
    }

    SolitonSpec s2 = SolitonSpec::make({1.0, 2.0}, {0.3, -0.2});
    Chain c2(s2);
    double q1 = c2.bound_state(1, 0.9, 2).value() / n2closed::bound_state_1(s2, 0.9);
    double q2 = c2.bound_state(2, 0.9, 2).value() / n2closed::bound_state_2(s2, 0.9);
    for (double x : {-1.4, 0.0, 1.8}) {
        CHECK(c2.bound_state(1, x, 2).value() ==
              Catch::Approx(q1 * n2closed::bound_state_1(s2, x)).epsilon(1e-10));
        CHECK(c2.bound_state(2, x, 2).value() ==
              Catch::Approx(q2 * n2closed::bound_state_2(s2, x)).epsilon(1e-10));
    }
    // regular across the csch pole of the closed form
    CHECK(std::isfinite(c2.bound_state(2, 0.2, 2).value()));
}

TEST_CASE("eigen-residuals of bound, edge and scattering states") {
    SolitonSpec s = SolitonSpec::make({0.8, 1.9}, {0.45, -0.15});
    Chain c(s);
    testutil::Uniform u(33u);
    for (int i = 0; i < 25; ++i) {
        double x = u.in(-8.0, 8.0);
        double V = c.potential(x);
        for (int j = 1; j <= 2; ++j)
            CHECK(eigen_residual(c.bound_state(j, x, 2), V, c.bound_energy(j)) < 1e-8);
        CHECK(eigen_residual(c.edge_state(x, 2), V, 0.0) < 1e-8);
        double k = u.in(0.3, 2.5);
        CJet psi = c.scatter_state(k, i % 2 == 0 ? +1 : -1, x, 2);
        cplx lhs = -psi.deriv(2) + V * psi.value();
        cplx rhs = k * k * psi.value();
        CHECK(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)) < 1e-8);
    }
}

TEST_CASE("bound states stay accurate deep in the tails") {
    SolitonSpec s = SolitonSpec::make({0.8, 1.9}, {0.45, -0.15});
    Chain c(s);
    for (double x : {-10.0, -8.0, 8.0, 10.0}) {
        double V = c.potential(x);
        for (int j = 1; j <= 2; ++j) {
            RJet psi = c.bound_state(j, x, 2);
            CHECK(eigen_residual(psi, V, c.bound_energy(j)) < 1e-10);
            CHECK(psi.scale().log_mag() < 0.0); // decays, never grows
        }
    }
}

TEST_CASE("n=1 scattering state matches (ik - kappa tanh) e^{ikx}") {
    Chain c(spec_n1());
    CJet psi = c.scatter_state(1.0, +1, 0.0, 1);
    CHECK(std::abs(psi.value() - cplx(0.0, 1.0)) < 1e-13);
    // k -> 0 limit: tanh up to a constant
    CJet edge = c.scatter_state(0.0, +1, 0.8, 1);
    CHECK(std::abs(edge.value() - cplx(-std::tanh(0.8), 0.0)) < 1e-13);
}

TEST_CASE("n=2 scattering state equals the closed form") {
    SolitonSpec s = spec_n2();
    Chain c(s);
    cplx got = c.scatter_state(1.0, +1, 0.0, 1).value();
    cplx ref = n2closed::scatter_state(s, 1.0, +1, 0.0);
    CHECK(std::abs(got - ref) < 1e-11 * std::abs(ref));
    for (double x : {-1.7, 0.6}) {
        got = c.scatter_state(0.7, -1, x, 1).value();
        ref = n2closed::scatter_state(s, 0.7, -1, x);
        CHECK(std::abs(got - ref) < 1e-11 * std::abs(ref));
    }
}

TEST_CASE("transmission amplitude: closed form, unimodularity, asymptotics") {
    CHECK(std::abs(transmission_closed_form(spec_n1(), 1.0) - cplx(0.0, -1.0)) < 1e-15);
    testutil::Uniform u(34u);
    for (int i = 0; i < 10; ++i) {
        double k = u.in(0.2, 4.0);
        CHECK(std::abs(std::abs(transmission_closed_form(spec_n2(), k)) - 1.0) < 1e-14);
    }
    Transmission tr = transmission(SolitonSpec::make({1.0, 2.0}, {0.3, -0.2}), 0.7);
    CHECK(std::abs(tr.asymptotic - tr.closed_form) < 1e-8);
}

TEST_CASE("permutation invariance of potential and states") {
    SolitonSpec id = SolitonSpec::make({1.0, 2.0}, {0.3, -0.2});
    SolitonSpec sw = SolitonSpec::make({1.0, 2.0}, {0.3, -0.2}, {1, 0});
    Chain ci(id), cs(sw);
    double ref_ratio = cs.bound_state(1, 0.9, 2).value() / ci.bound_state(1, 0.9, 2).value();
    for (double x : {-2.3, -0.7, 0.9, 2.6}) {
        CHECK(cs.potential(x) == Catch::Approx(ci.potential(x)).epsilon(1e-10));
        CHECK(cs.bound_state(1, x, 2).value() ==
              Catch::Approx(ref_ratio * ci.bound_state(1, x, 2).value()).epsilon(1e-9));
        cplx a = cs.scatter_state(1.1, +1, x, 1).value();
        cplx b = ci.scatter_state(1.1, +1, x, 1).value();
        CHECK(std::abs(a - b) < 1e-9 * std::abs(b));
    }
    // the permuted chain is singular exactly at the coth node
    CHECK_THROWS_AS(cs.potential(0.2), singular_chain_error);
}

TEST_CASE("asymptotic shifts of the two-soliton scattering limits") {
    SolitonSpec s = spec_n2();
    double xi1 = asymptotic_shift(s, ShiftLimit::tau2_runs);
    double xi2 = asymptotic_shift(s, ShiftLimit::tau1_runs);
    CHECK(std::sinh(1.0 * xi1) == Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(std::sinh(2.0 * xi2) == Catch::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));

    // send tau2 far away; the remaining sech^2 sits at tau1 -+ xi1
    for (int sign : {+1, -1}) {
        SolitonSpec far = SolitonSpec::make({1.0, 2.0}, {0.3, sign * 20.0});
        Chain c(far);
        double center = minimize_scalar([&](double x) { return c.potential(x); }, -6.0, 6.0);
        double expect = -(0.3 - sign * xi1);
        CHECK(center == Catch::Approx(expect).margin(1e-4));
    }
}
