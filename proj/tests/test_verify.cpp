#include <catch2/catch_amalgamated.hpp>

#include "darboux/kernel.hpp"
#include "darboux/oracles.hpp"
#include "darboux/registry.hpp"

#include <cmath>
#include <map>

using namespace darboux;

TEST_CASE("registry completeness: every equation family is covered, once") {
    std::vector<IdentityRecord> regs = identity_registry();
    CHECK(regs.size() >= 45);

    std::map<std::string, int> counts;
    for (const IdentityRecord& r : regs) ++counts[r.tag];
    std::map<std::string, int> expected = {
        {"n1non.XX01", 2},      {"n1non.XX02", 2},      {"n1non.XX03", 4},
        {"n1non.XX04", 2},      {"n1non.XX05", 2},      {"n1non.XX06", 2},
        {"n1non.XX04.conj", 2}, {"n1non.XX05.conj", 2}, {"n1iso.XX01", 2},
        {"n1iso.XX02", 2},      {"n1iso.XX03", 2},      {"n1iso.XX04", 2},
        {"n1iso.XX03.conj", 2}, {"n1iso.XX04.conj", 2}, {"nnon.XX01", 2},
        {"nnon.XX02", 2},       {"nnon.XX03", 2},       {"nnon.XX04", 2},
        {"nnon.XX05", 1},       {"nnon.XX03.conj", 2},  {"nnon.XX04.conj", 2},
        {"n2partial.01", 6},    {"n2partial.02", 6},    {"n2partial.03", 6},
        {"n2partial.04", 6},    {"aaa.01", 2},          {"aaa.02", 4},
        {"aaa.03", 2},          {"aaa.04", 2},          {"n2iso110.01", 4},
        {"n2iso110.02", 2},     {"n2iso110.03", 2},     {"n2iso110.04", 4},
        {"n2iso110.05", 4},     {"xxab.prod", 4},       {"xxab.prod.dag", 4},
        {"xxab.zx", 4},         {"xxab.zx.dag", 4},     {"n2specialCC.01", 4},
        {"n2specialCC.02", 2},  {"n2specialCC.03", 4},  {"n2specialCC.04", 4},
        {"red.Xbr", 1},         {"red.X5redX3A", 1},    {"red.X5redX3B", 1},
        {"red.X5redX3AB", 1},   {"red.Y4Y2red", 1},     {"red.redXYisos1", 1},
        {"red.redXYisos2", 1},  {"red.XAXBY", 1},       {"red.XAXBred", 2},
        {"red.X7", 3},          {"gencd.X1B1", 2},      {"gencd.X1A1B1", 2},
        {"gencd.dBA", 1},       {"gencd.XbrA", 2},      {"scalar.triginden", 1},
    };
    CHECK(counts == expected);

    // ids unique
    std::map<std::string, int> ids;
    for (const IdentityRecord& r : regs) ++ids[r.id];
    for (const auto& [id, c] : ids) {
        INFO(id);
        CHECK(c == 1);
    }
}

TEST_CASE("every identity record passes on the canonical system of its class") {
    std::vector<IdentityRecord> regs = identity_registry();
    std::map<std::string, ExtendedSystem> systems;
    for (const IdentityRecord& r : regs) {
        if (r.kind == IdentityRecord::Kind::ScalarIdentity) continue;
        if (!systems.count(r.canonical_preset)) {
            presets::PairSpec p = presets::by_name(r.canonical_preset);
            systems.emplace(r.canonical_preset, ExtendedSystem(p.upper, p.lower));
        }
        const ExtendedSystem& sys = systems.at(r.canonical_preset);
        REQUIRE(r.applicable(sys));
        ResidualReport rep = evaluate_identity(r, sys);
        INFO(r.id << " on " << r.canonical_preset << ": residual "
                  << rep.max_rel_residual << " vs " << rep.threshold << " (worst x "
                  << rep.worst_point << ")");
        CHECK(rep.pass);
    }
}

TEST_CASE("the scalar identity holds to near machine precision") {
    CHECK(trig_identity_residual() <= 1e-13);
}

TEST_CASE("identity evaluation is deterministic given the seed") {
    std::vector<IdentityRecord> regs = identity_registry();
    const IdentityRecord* rec = find_record(regs, "N1B_XX02a");
    REQUIRE(rec);
    presets::PairSpec p = presets::n1_break();
    ExtendedSystem sys(p.upper, p.lower);
    ResidualReport a = evaluate_identity(*rec, sys);
    ResidualReport b = evaluate_identity(*rec, sys);
    CHECK(a.max_rel_residual == b.max_rel_residual);
    CHECK(a.worst_point == b.worst_point);
}

TEST_CASE("record lookup and applicability errors") {
    std::vector<IdentityRecord> regs = identity_registry();
    CHECK(find_record(regs, "NO_SUCH") == nullptr);
    const IdentityRecord* rec = find_record(regs, "N1I_XX01a");
    REQUIRE(rec);
    presets::PairSpec p = presets::n1_break();
    ExtendedSystem sys(p.upper, p.lower);
    CHECK_THROWS_AS(evaluate_identity(*rec, sys), relation_error);
}

TEST_CASE("eigen oracle reproduces the bound-state energies") {
    std::vector<double> e1 = eigen_oracle(SolitonSpec::make({1.0}, {0.0}), 25.0, 4001, 4);
    REQUIRE(!e1.empty());
    CHECK(std::abs(e1[0] + 1.0) < 1e-5);
    CHECK(e1[1] > -1e-4); // continuum onset

    std::vector<double> e2 =
        eigen_oracle(SolitonSpec::make({1.0, 2.0}, {0.3, -0.2}), 25.0, 4001, 5);
    CHECK(std::abs(e2[0] + 4.0) < 1e-5);
    CHECK(std::abs(e2[1] + 1.0) < 1e-5);
    CHECK(e2[2] > -1e-4);

    std::vector<double> e0 = eigen_oracle(SolitonSpec::make({}, {}), 25.0, 2001, 3);
    for (double e : e0) CHECK(e > -1e-4);
}

TEST_CASE("eigen oracle converges at fourth order") {
    SolitonSpec s = SolitonSpec::make({1.0}, {0.3});
    double err_coarse = std::abs(eigen_oracle(s, 25.0, 500, 1)[0] + 1.0);
    double err_fine = std::abs(eigen_oracle(s, 25.0, 1000, 1)[0] + 1.0);
    CHECK(err_coarse / err_fine >= 8.0);
}

TEST_CASE("scattering oracle: reflectionless transmission with the predicted phase") {
    SolitonSpec s = SolitonSpec::make({1.0, 2.0}, {0.3, -0.2});
    for (double k : {0.5, 0.7, 1.0, 2.0}) {
        ScatterData sd = scattering_oracle(s, k);
        CHECK(std::abs(sd.r()) <= 1e-6);
        CHECK(std::abs(std::abs(sd.t()) - 1.0) <= 1e-6);
        cplx a_closed = transmission_closed_form(s, k);
        CHECK(std::abs(sd.a - a_closed) <= 2e-6);
        double dphase = std::arg(sd.t() * a_closed); // t = 1/a
        CHECK(std::abs(dphase) <= 1e-6);
    }
    ScatterData free_sd = scattering_oracle(SolitonSpec::make({}, {}), 0.9);
    CHECK(std::abs(free_sd.t() - cplx(1.0, 0.0)) < 1e-9);
    CHECK(std::abs(free_sd.r()) < 1e-9);
}

TEST_CASE("kernel suite: 2n+1 members annihilated") {
    KernelSuiteReport k1 = kernel_suite(SolitonSpec::make({1.0}, {0.25}));
    CHECK(k1.members.size() == 3);
    CHECK(k1.tilde_partners.size() == 1);
    KernelSuiteReport k2 = kernel_suite(SolitonSpec::make({1.0, 2.0}, {0.3, -0.2}));
    CHECK(k2.members.size() == 5);
    CHECK(k2.tilde_partners.size() == 2);
    for (const KernelSuiteReport* k : {&k1, &k2}) {
        for (const ResidualReport& r : k->members) {
            INFO(r.id << " residual " << r.max_rel_residual);
            CHECK(r.pass);
        }
        for (const ResidualReport& r : k->tilde_partners) {
            INFO(r.id << " residual " << r.max_rel_residual);
            CHECK(r.pass);
        }
    }

    // the n=1 secular partner is the cosh seed itself (up to normalization)
    ChainPtr c1 = make_chain(SolitonSpec::make({1.0}, {0.25}));
    TestFunction g = secular_partner_fn(c1, 1);
    double ratio0 = g.eval(0.7, 0).value().real() / std::cosh(0.95);
    double ratio1 = g.eval(-1.3, 0).value().real() / std::cosh(-1.05);
    CHECK(ratio0 == Catch::Approx(ratio1).epsilon(1e-10));

    // the quadrature partner is a true eigenfunction, outside ker Z
    TildePartner tp(c1, 1);
    CJet p = tp.eval(1.0, 2);
    double V = c1->potential(1.0);
    cplx lhs = -p.deriv(2) + V * p.value();
    CHECK(std::abs(lhs - (-1.0) * p.value()) < 1e-10 * std::abs(p.value()));
    Op z3 = lax_Z(c1);
    ResidualOptions zopt;
    zopt.grid = {0.5, 1.0, 2.0};
    zopt.threshold = 1e-6;
    CHECK_FALSE(annihilation_residual("Z_tilde_not", z3, tp.as_test_function(), zopt).pass);
    // free particle: Z reduces to d/dx, whose kernel is the constants
    ChainPtr free_chain = make_chain(SolitonSpec::make({}, {}));
    Op z0 = lax_Z(free_chain);
    ResidualOptions opt;
    opt.grid = chebyshev_grid(8.0, 21);
    opt.threshold = 1e-12;
    TestFunction one{[](double x, int ord) { return CJet::constant(1.0, x, ord); },
                     1e-15, "const"};
    CHECK(annihilation_residual("Z1_const", z0, one, opt).pass);
}
