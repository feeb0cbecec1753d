#include <catch2/catch_amalgamated.hpp>

#include "darboux/jet.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace darboux;

TEST_CASE("cosh jet at the origin reproduces the classic expansion") {
    RJet j = seed_jet(SeedKind::cosh_k, 1.0, 0.0, 0.0, 2);
    CHECK(j.taylor(0) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(j.taylor(1)) < 1e-15);
    CHECK(j.taylor(2) == Catch::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cosh jet far in the tail keeps a finite log magnitude") {
    RJet j = seed_jet(SeedKind::cosh_k, 1.0, 0.0, 800.0, 4);
    double logval = j.scale().log_mag() + std::log(std::abs(j.coeff(0)));
    CHECK(logval == Catch::Approx(800.0 - std::log(2.0)).margin(1e-9));
    CHECK(std::isfinite(j.scale().log_mag()));
}

TEST_CASE("tanh seed matches the math library") {
    RJet j = seed_jet(SeedKind::tanh_k, 2.0, 0.5, 0.0, 3);
    CHECK(j.value() == Catch::Approx(std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("seed reconstruction against the math library across the line") {
    testutil::Uniform u(20240517u);
    for (int trial = 0; trial < 200; ++trial) {
        double kappa = u.in(0.2, 3.0);
        double tau = u.in(-2.0, 2.0);
        double x = u.in(-40.0, 40.0); // representable range for cosh
        double arg = kappa * (x + tau);
        RJet c = seed_jet(SeedKind::cosh_k, kappa, tau, x, 3);
        RJet t = seed_jet(SeedKind::tanh_k, kappa, tau, x, 3);
        CHECK(c.value() == Catch::Approx(std::cosh(arg)).epsilon(1e-12));
        CHECK(t.value() == Catch::Approx(std::tanh(arg)).epsilon(1e-12));
        if (std::abs(x + tau) > 0.1) {
            RJet ct = seed_jet(SeedKind::coth_k, kappa, tau, x, 3);
            CHECK(ct.value() == Catch::Approx(1.0 / std::tanh(arg)).epsilon(1e-12));
        }
    }
}

TEST_CASE("adding a jet to its negation yields the zero jet") {
    RJet f = seed_jet(SeedKind::sinh_k, 1.3, 0.2, 0.7, 5);
    RJet z = jet_add(f, jet_scale(f, -1.0));
    CHECK(z.is_zero());
    CHECK(z.scale().log_mag() == -std::numeric_limits<double>::infinity());
}

TEST_CASE("cosh times sech is the constant one jet") {
    for (double x : {-30.0, -1.0, 0.0, 2.5, 600.0}) {
        RJet c = seed_jet(SeedKind::cosh_k, 1.0, 0.3, x, 6);
        RJet s = seed_jet(SeedKind::sech_k, 1.0, 0.3, x, 6);
        RJet p = jet_mul(c, s);
        CHECK(p.taylor(0) == Catch::Approx(1.0).epsilon(1e-14));
        for (int m = 1; m <= p.order(); ++m)
            CHECK(std::abs(p.taylor(m)) < 1e-14);
    }
}

TEST_CASE("scaling a jet doubles every represented derivative") {
    RJet f = seed_jet(SeedKind::cosh_k, 0.8, -0.1, 1.1, 4);
    RJet g = jet_scale(f, 2.0);
    for (int m = 0; m <= 4; ++m)
        CHECK(g.taylor(m) == Catch::Approx(2.0 * f.taylor(m)).epsilon(1e-15));
}

TEST_CASE("derivative of cosh is kappa sinh") {
    double kappa = 1.7, tau = -0.4, x = 0.9;
    RJet d = jet_derivative(seed_jet(SeedKind::cosh_k, kappa, tau, x, 5));
    RJet s = seed_jet(SeedKind::sinh_k, kappa, tau, x, 4);
    for (int m = 0; m <= 4; ++m)
        CHECK(d.taylor(m) == Catch::Approx(kappa * s.taylor(m)).epsilon(1e-13));
}

TEST_CASE("second derivative of a plane wave is -k^2 times itself") {
    double k = 1.4, x = 0.3;
    CJet w = exp_ikx_jet(k, x, 6);
    CJet d2 = jet_derivative(jet_derivative(w));
    for (int m = 0; m <= 4; ++m) {
        cplx expect = -k * k * w.taylor(m);
        CHECK(std::abs(d2.taylor(m) - expect) < 1e-13 * std::abs(expect));
    }
}

TEST_CASE("jet derivative agrees with a central finite difference") {
    double kappa = 1.1, tau = 0.25, x = 0.6, h = 1e-6;
    RJet d = jet_derivative(seed_jet(SeedKind::tanh_k, kappa, tau, x, 4));
    double fd = (std::tanh(kappa * (x + h + tau)) - std::tanh(kappa * (x - h + tau))) / (2 * h);
    CHECK(d.value() == Catch::Approx(fd).margin(1e-8));
}

TEST_CASE("log-derivative of cosh is kappa tanh, including deep tails") {
    double kappa = 1.0, tau = 0.0;
    for (double x : {0.4, -2.0, 600.0}) {
        RJet ld = jet_log_derivative(seed_jet(SeedKind::cosh_k, kappa, tau, x, 5));
        CHECK(ld.value() == Catch::Approx(kappa * std::tanh(kappa * (x + tau))).epsilon(1e-12));
    }
}

TEST_CASE("log-derivative of a plane wave is the constant ik") {
    CJet ld = jet_log_derivative(exp_ikx_jet(2.3, 0.7, 5));
    CHECK(std::abs(ld.value() - cplx(0.0, 2.3)) < 1e-14);
    for (int m = 1; m <= ld.order(); ++m)
        CHECK(std::abs(ld.taylor(m)) < 1e-14);
}

TEST_CASE("coth seed refuses evaluation next to its pole") {
    CHECK_THROWS_AS(seed_jet(SeedKind::coth_k, 2.0, -1.0, 1.0 + 1e-5, 3), pole_proximity_error);
    CHECK_NOTHROW(seed_jet(SeedKind::coth_k, 2.0, -1.0, 1.01, 3));
}

TEST_CASE("error paths: point mismatch, exhausted order, zero base") {
    RJet a = seed_jet(SeedKind::cosh_k, 1.0, 0.0, 0.0, 2);
    RJet b = seed_jet(SeedKind::cosh_k, 1.0, 0.0, 0.5, 2);
    CHECK_THROWS_AS(jet_add(a, b), point_mismatch_error);
    RJet v = a.truncated(0);
    CHECK_THROWS_AS(jet_derivative(v), order_exhausted_error);
    // sinh has a node at x = -tau + pole guard distance just outside the seed guard
    RJet s = seed_jet(SeedKind::sinh_k, 1.0, 0.0, 2e-3, 3);
    CHECK_THROWS_AS(jet_reciprocal(jet_sub(s, s)), zero_base_error);
}

TEST_CASE("Leibniz rule holds coefficient-wise") {
    testutil::Uniform u(77u);
    for (int trial = 0; trial < 50; ++trial) {
        double k1 = u.in(0.3, 2.0), k2 = u.in(0.3, 2.0);
        double t1 = u.in(-1.0, 1.0), t2 = u.in(-1.0, 1.0);
        double x = u.in(-4.0, 4.0);
        RJet a = seed_jet(SeedKind::cosh_k, k1, t1, x, 6);
        RJet b = seed_jet(SeedKind::tanh_k, k2, t2, x, 6);
        RJet lhs = jet_derivative(jet_mul(a, b));
        RJet rhs = jet_add(jet_mul(jet_derivative(a), b.truncated(5)),
                           jet_mul(a.truncated(5), jet_derivative(b)));
        for (int m = 0; m <= lhs.order(); ++m) {
            double ref = std::max(std::abs(lhs.taylor(m)), 1.0);
            CHECK(std::abs(lhs.taylor(m) - rhs.taylor(m)) < 1e-13 * ref);
        }
    }
}

TEST_CASE("moving magnitude between scale and coefficients changes nothing") {
    RJet f = seed_jet(SeedKind::sinh_k, 0.9, 0.4, 1.7, 4);
    double s = 3.25;
    std::vector<double> c(f.order() + 1);
    for (int m = 0; m <= f.order(); ++m) c[m] = f.coeff(m) * std::exp(-s);
    RJet g(f.point(), f.order(), {f.scale().phase, f.scale().log_hi + s, f.scale().log_lo}, std::move(c));
    for (int m = 0; m <= f.order(); ++m)
        CHECK(g.taylor(m) == Catch::Approx(f.taylor(m)).epsilon(1e-13));
}

TEST_CASE("scaled value round-trip") {
    Scaled<double> v = Scaled<double>::from_value(-3.75);
    CHECK(v.phase == -1.0);
    CHECK(v.value() == Catch::Approx(-3.75).epsilon(1e-15));
    Scaled<cplx> w = Scaled<cplx>::from_value(cplx(1.0, -2.0));
    CHECK(std::abs(w.phase) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(w.value() - cplx(1.0, -2.0)) < 1e-14);
}

TEST_CASE("gaussian packet jet: value and exponent bookkeeping") {
    double c = 0.4, w = 1.3, p = 2.0, x = -0.9;
    CJet g = gaussian_packet_jet(c, w, p, x, 5);
    cplx expect = std::exp(cplx(-0.5 * (x - c) * (x - c) / (w * w), p * x));
    CHECK(std::abs(g.value() - expect) < 1e-13 * std::abs(expect));
    // first derivative: (-(x-c)/w^2 + ip) f
    cplx d1 = (cplx(-(x - c) / (w * w), p)) * expect;
    CHECK(std::abs(g.deriv(1) - d1) < 1e-12 * std::abs(d1));
}
