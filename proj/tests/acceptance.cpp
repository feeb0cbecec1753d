// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Exit status is the number of failed criteria.

#include "darboux/kernel.hpp"
#include "darboux/oracles.hpp"
#include "darboux/pauli.hpp"
#include "darboux/registry.hpp"
#include "darboux/susy_relations.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <functional>
#include <string>
#include <vector>

using namespace darboux;

namespace {

struct Criterion {
    int number;
    std::string title;
    std::function<bool(std::string&)> run;
    double time_budget_s;
};

int failures = 0;

void run_criterion(const Criterion& c) {
    std::string detail;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = c.run(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_budget_s > 0.0 && dt > c.time_budget_s) {
        ok = false;
        detail += " [over time budget]";
    }
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.number,
                c.title.c_str(), dt, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

std::string fmt_res(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2e", v);
    return b;
}

} // namespace

int main() {
    std::vector<Criterion> crits;

    crits.push_back({1, "bound-state energies from the banded eigensolver", [](std::string& d) {
        bool ok = true;
        std::vector<double> e1 = eigen_oracle(SolitonSpec::make({1.0}, {0.0}), 25.0, 4001, 4);
        ok = ok && std::abs(e1[0] + 1.0) <= 1e-4;
        std::vector<double> e2 =
            eigen_oracle(SolitonSpec::make({1.0, 2.0}, {0.3, -0.2}), 25.0, 4001, 5);
        ok = ok && std::abs(e2[0] + 4.0) <= 1e-4 && std::abs(e2[1] + 1.0) <= 1e-4;
        d = "n=1 dev " + fmt_res(std::abs(e1[0] + 1.0)) + ", n=2 dev " +
            fmt_res(std::max(std::abs(e2[0] + 4.0), std::abs(e2[1] + 1.0)));
        return ok;
    }, 30.0});

    crits.push_back({2, "reflectionless scattering with the closed-form phase", [](std::string& d) {
        bool ok = true;
        double worst_r = 0.0, worst_p = 0.0;
        for (const SolitonSpec& s : {SolitonSpec::make({1.0}, {0.2}),
                                     SolitonSpec::make({1.0, 2.0}, {0.3, -0.2})}) {
            for (double k : {0.5, 1.0, 2.0}) {
                ScatterData sd = scattering_oracle(s, k);
                double phase = std::abs(std::arg(sd.t() * transmission_closed_form(s, k)));
                worst_r = std::max(worst_r, std::abs(sd.r()));
                worst_p = std::max(worst_p, phase);
            }
        }
        ok = worst_r <= 1e-6 && worst_p <= 1e-6;
        d = "|r| <= " + fmt_res(worst_r) + ", phase dev <= " + fmt_res(worst_p);
        return ok;
    }, 10.0});

    crits.push_back({3, "identity registry passes at per-record thresholds", [](std::string& d) {
        std::vector<IdentityRecord> regs = identity_registry();
        if (regs.size() < 45) {
            d = "registry too small";
            return false;
        }
        std::map<std::string, ExtendedSystem> systems;
        int failed = 0;
        double worst_margin = 0.0;
        std::string worst_id;
        for (const IdentityRecord& r : regs) {
            if (r.kind == IdentityRecord::Kind::ScalarIdentity) continue;
            if (!systems.count(r.canonical_preset)) {
                presets::PairSpec p = presets::by_name(r.canonical_preset);
                systems.emplace(r.canonical_preset, ExtendedSystem(p.upper, p.lower));
            }
            ResidualReport rep = evaluate_identity(r, systems.at(r.canonical_preset));
            if (!rep.pass) {
                ++failed;
                if (failed == 1) d = "first failure: " + r.id;
            }
            double margin = rep.max_rel_residual / rep.threshold;
            if (margin > worst_margin) {
                worst_margin = margin;
                worst_id = r.id;
            }
        }
        if (failed == 0)
            d = std::to_string(regs.size()) + " records, tightest margin " +
                fmt_res(worst_margin) + " of threshold (" + worst_id + ")";
        return failed == 0;
    }, 60.0});

    crits.push_back({4, "reduction relations at 1e-7", [](std::string& d) {
        std::vector<IdentityRecord> regs = identity_registry();
        std::vector<std::string> ids = {"RED_XBR",     "RED_X5A",     "RED_X5B",
                                        "RED_X5AB",    "RED_Y4Y2",    "RED_ISOS1",
                                        "RED_ISOS2",   "RED_XAXB_A",  "RED_XAXB_B",
                                        "RED_X7_r1",   "RED_X7_r2",   "RED_X7_r3"};
        double worst = 0.0;
        for (const std::string& id : ids) {
            const IdentityRecord* r = find_record(regs, id);
            if (!r) {
                d = "missing record " + id;
                return false;
            }
            presets::PairSpec p = presets::by_name(r->canonical_preset);
            ExtendedSystem sys(p.upper, p.lower);
            ResidualReport rep = evaluate_identity(*r, sys);
            worst = std::max(worst, rep.max_rel_residual);
        }
        d = "worst residual " + fmt_res(worst);
        return worst <= 1e-7;
    }, 30.0});

    crits.push_back({5, "central-charge transmutation and its breaking scale", [](std::string& d) {
        double worst = 0.0;
        for (const presets::PairSpec& p : {presets::exact_n2(), presets::special_n2()}) {
            ExtendedSystem sys(p.upper, p.lower);
            SusyIntegrals g = build_integrals(sys);
            std::vector<VecFn> fns = matrix_suite(sys, 6);
            std::vector<double> grid =
                filter_poles(chebyshev_grid(8.0, 41), g.odd_gen.poles(), 0.12);
            worst = std::max(worst, central_charge_residual(sys, g, fns, grid));
        }
        if (worst > 1e-8) {
            d = "exact-iso commutator residual " + fmt_res(worst);
            return false;
        }
        auto ratio_for = [](double kp) {
            ExtendedSystem sys(SolitonSpec::make({1.0}, {0.2}),
                               SolitonSpec::make({kp}, {-0.4}));
            SusyIntegrals g = build_integrals(sys);
            std::vector<VecFn> fns = matrix_suite(sys, 6);
            return central_charge_action_ratio(sys, g, fns, chebyshev_grid(8.0, 41));
        };
        double measured = ratio_for(1.1) / ratio_for(1.2);
        double expected = (1.0 - 1.1 * 1.1) / (1.0 - 1.2 * 1.2);
        bool ok = std::abs(measured / expected - 1.0) <= 0.01;
        d = "residual " + fmt_res(worst) + ", ratio " + fmt_res(measured) + " vs " +
            fmt_res(expected);
        return ok;
    }, 30.0});

    crits.push_back({6, "irreducible intertwiner total order is 4n+1-2r", [](std::string& d) {
        struct Row {
            presets::PairSpec pair;
            int even, odd;
        };
        std::vector<Row> rows = {
            {presets::n1_break(), 2, 3},       {presets::n1_iso(), 2, 1},
            {presets::n2_break(), 4, 5},       {presets::break1(), 4, 3},
            {presets::break2(), 4, 3},         {presets::break3(), 4, 3},
            {presets::break3_tau_eq(), 4, 3},  {presets::break1_tau_eq(), 2, 5},
            {presets::break2_tau_eq(), 2, 5},  {presets::common_virtual_1(), 2, 3},
            {presets::common_virtual_2(), 2, 3}, {presets::exact_n2(), 2, 3},
            {presets::pt_self_iso(2), 2, 3},   {presets::special_n2(), 4, 1},
            {presets::n3_break(), 6, 7},       {presets::partial_n3_r1(), 6, 5},
            {presets::partial_n3_r2(), 4, 5},  {presets::exact_n3(), 4, 3},
            {presets::special_n3(), 6, 1},
        };
        int checked = 0;
        for (const Row& row : rows) {
            ExtendedSystem sys(row.pair.upper, row.pair.lower);
            SusyIntegrals g = build_integrals(sys);
            int n = sys.n(), r = sys.iso().r();
            if (g.even_order != row.even || g.odd_order != row.odd ||
                g.even_order + g.odd_order != 4 * n + 1 - 2 * r) {
                d = "order mismatch for " + std::string(to_string(sys.iso().tag)) +
                    " n=" + std::to_string(n);
                return false;
            }
            ++checked;
        }
        d = std::to_string(checked) + " class instances";
        return true;
    }, 60.0});

    crits.push_back({7, "special isospectral family: C1 = C2, first-order charge, flat phi",
                     [](std::string& d) {
        presets::PairSpec p = presets::special_n2();
        ExtendedSystem sys(p.upper, p.lower);
        std::vector<double> C = iso_constants(sys.upper(), sys.lower());
        if (std::abs(C[0] - C[1]) > 1e-10) {
            d = "C1 - C2 = " + fmt_res(C[0] - C[1]);
            return false;
        }
        std::vector<IdentityRecord> regs = identity_registry();
        ResidualReport rep = evaluate_identity(*find_record(regs, "N2SP_XX01a"), sys);
        if (rep.max_rel_residual > 1e-9) {
            d = "X1 X1+ residual " + fmt_res(rep.max_rel_residual);
            return false;
        }
        FieldProfile f = field_profile(sys, 0.25);
        ConstantPhiReport phi = constant_phi_check(f, chebyshev_grid(8.0, 41));
        bool ok = phi.deviation <= 1e-9 &&
                  std::abs(phi.value - C[0] * C[0]) <= 1e-9 * std::max(1.0, C[0] * C[0]);
        d = "|C1-C2| = " + fmt_res(std::abs(C[0] - C[1])) + ", X1X1+ res " +
            fmt_res(rep.max_rel_residual) + ", phi dev " + fmt_res(phi.deviation);
        return ok;
    }, 30.0});

    crits.push_back({8, "Lax kernel: all 2n+1 members annihilated (n <= 2)", [](std::string& d) {
        double worst = 0.0;
        int members = 0;
        for (const SolitonSpec& s : {SolitonSpec::make({1.0}, {0.25}),
                                     SolitonSpec::make({1.0, 2.0}, {0.3, -0.2})}) {
            KernelSuiteReport rep = kernel_suite(s);
            members += static_cast<int>(rep.members.size());
            for (const ResidualReport& r : rep.members) {
                worst = std::max(worst, r.max_rel_residual);
                if (!r.pass) {
                    d = r.id + " residual " + fmt_res(r.max_rel_residual);
                    return false;
                }
            }
            for (const ResidualReport& r : rep.tilde_partners)
                if (!r.pass) {
                    d = r.id + " residual " + fmt_res(r.max_rel_residual);
                    return false;
                }
        }
        d = std::to_string(members) + " members, worst " + fmt_res(worst);
        return members == 3 + 5;
    }, 30.0});

    crits.push_back({9, "chain and Wronskian potential routes agree to 1e-10", [](std::string& d) {
        std::vector<SolitonSpec> specs = {
            SolitonSpec::make({1.0}, {0.4}),
            SolitonSpec::make({1.0, 2.0}, {0.3, -0.2}),
            SolitonSpec::make({0.5, 1.1, 2.2}, {0.0, 0.7, -0.9}),
            SolitonSpec::make({0.5, 1.0, 1.5, 2.5}, {0.2, -0.3, 0.5, 0.0}),
        };
        double worst = 0.0;
        for (const SolitonSpec& s : specs) {
            Chain chain(s);
            for (double x : chebyshev_grid(40.0 / s.kappas.front(), 41)) {
                WronskianLog wl = wronskian_log(s, x);
                double v = chain.potential(x);
                if (!std::isfinite(wl.log_w)) {
                    d = "overflow at x = " + std::to_string(x);
                    return false;
                }
                worst = std::max(worst, std::abs(-2.0 * wl.d2log - v) /
                                            std::max(1.0, std::abs(v)));
            }
        }
        d = "worst deviation " + fmt_res(worst);
        return worst <= 1e-10;
    }, 30.0});

    crits.push_back({10, "scalar hyperbolic identity over 100 random pairs", [](std::string& d) {
        double res = trig_identity_residual(100);
        d = "residual " + fmt_res(res);
        return res <= 1e-13;
    }, 5.0});

    for (const Criterion& c : crits) run_criterion(c);
    if (failures == 0) std::printf("all %zu criteria passed\n", crits.size());
    else std::printf("%d criteria FAILED\n", failures);
    return failures;
}
