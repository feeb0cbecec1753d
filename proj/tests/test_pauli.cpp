#include <catch2/catch_amalgamated.hpp>

#include "darboux/pauli.hpp"
#include "darboux/presets.hpp"

#include <cmath>

using namespace darboux;

namespace {
std::vector<double> grid_for(const ExtendedSystem& sys, int points = 41) {
    return chebyshev_grid(8.0 / sys.upper().kappas.front(), points);
}
} // namespace

TEST_CASE("n=1 mutually shifted pair: a(x) is the negative gap function, phi constant") {
    presets::PairSpec p = presets::n1_iso(); // kappa 1, tau 0.5 / -0.5
    ExtendedSystem sys(p.upper, p.lower);
    double k = 0.3, kappa = 1.0, tau = 0.5, taup = -0.5;
    FieldProfile f = field_profile(sys, k);
    double coth = 1.0 / std::tanh(kappa * (tau - taup));
    CHECK(f.c0 == Catch::Approx(kappa * coth - k).epsilon(1e-14));
    for (double x : grid_for(sys)) {
        double delta = kappa * (std::tanh(kappa * (x + tau)) - std::tanh(kappa * (x + taup)) -
                                coth);
        CHECK(std::abs(f.a(x) - (-delta - k)) < 1e-10);
    }
    ConstantPhiReport rep = constant_phi_check(f, grid_for(sys));
    CHECK(rep.is_constant);
    CHECK(rep.value == Catch::Approx(kappa * kappa * coth * coth).epsilon(1e-10));
}

TEST_CASE("field relations: bz = da/dx and the g=2 potential reconstruction") {
    presets::PairSpec p = presets::n2_break();
    ExtendedSystem sys(p.upper, p.lower);
    Chain up(p.upper), lo(p.lower);
    FieldProfile f = field_profile(sys, 0.4, 0.1);
    for (double x : grid_for(sys, 17)) {
        double h = 1e-6;
        double da = (f.a(x + h) - f.a(x - h)) / (2 * h);
        CHECK(f.bz(x) == Catch::Approx(da).margin(1e-8));
        double vp = (f.k + f.a(x)) * (f.k + f.a(x)) - f.phi(x) + f.bz(x);
        double vm = (f.k + f.a(x)) * (f.k + f.a(x)) - f.phi(x) - f.bz(x);
        CHECK(vp == Catch::Approx(up.potential(x)).margin(1e-9));
        CHECK(vm == Catch::Approx(lo.potential(x)).margin(1e-9));
    }
}

TEST_CASE("gauge shift moves a uniformly and leaves bz alone") {
    presets::PairSpec p = presets::exact_n2();
    ExtendedSystem sys(p.upper, p.lower);
    FieldProfile f0 = field_profile(sys, 0.2, 0.0);
    FieldProfile f1 = field_profile(sys, 0.2, 0.7);
    for (double x : {-2.0, 0.3, 1.9}) {
        CHECK(f1.a(x) - f0.a(x) == Catch::Approx(0.7).epsilon(1e-12));
        CHECK(f1.bz(x) == Catch::Approx(f0.bz(x)).epsilon(1e-12));
    }
}

TEST_CASE("special n=2 family: the scalar potential collapses to C1^2") {
    presets::PairSpec p = presets::special_n2();
    ExtendedSystem sys(p.upper, p.lower);
    double C1 = sys.iso().pairs.front().C;
    FieldProfile f = field_profile(sys, 0.25);
    ConstantPhiReport rep = constant_phi_check(f, grid_for(sys));
    CHECK(rep.is_constant);
    CHECK(rep.deviation <= 1e-9);
    CHECK(rep.value == Catch::Approx(C1 * C1).epsilon(1e-9));
}

TEST_CASE("mutually shifted PT pair with the modified gyromagnetic ratio") {
    int n = 2;
    presets::PairSpec p = presets::pt_self_iso(n, 1.0, 0.0, 0.35);
    ExtendedSystem sys(p.upper, p.lower);
    double gn = std::sqrt(2.0 * n * (n + 1));
    FieldProfile f = field_profile(sys, 0.15, std::nullopt, gn);
    ConstantPhiReport rep = constant_phi_check(f, grid_for(sys));
    CHECK(rep.is_constant);
    double coth = 1.0 / std::tanh(0.0 - 0.35);
    CHECK(rep.value == Catch::Approx(0.5 * n * (n + 1) * coth * coth).epsilon(1e-9));

    // with g = 2 the same pair has a genuinely x-dependent phi
    FieldProfile f2 = field_profile(sys, 0.15);
    CHECK_FALSE(constant_phi_check(f2, grid_for(sys)).is_constant);
}

TEST_CASE("non-isospectral pair: the electric potential cannot be gauged away") {
    presets::PairSpec p = {SolitonSpec::make({1.0}, {0.2}), SolitonSpec::make({1.5}, {-0.4})};
    ExtendedSystem sys(p.upper, p.lower);
    FieldProfile f = field_profile(sys, 0.0);
    ConstantPhiReport rep = constant_phi_check(f, grid_for(sys));
    CHECK_FALSE(rep.is_constant);
    CHECK(rep.deviation > 0.01);
}
