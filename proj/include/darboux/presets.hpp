#pragma once

// Canonical parameter sets, one per isospectrality scenario; used by the
// CLI presets, the unit tests and the acceptance suite.

#include "darboux/intertwiners.hpp"

namespace darboux::presets {

struct PairSpec {
    SolitonSpec upper, lower;
};

inline PairSpec n1_break() {
    return {SolitonSpec::make({1.0}, {0.2}), SolitonSpec::make({1.6}, {-0.4})};
}

inline PairSpec n1_iso() {
    return {SolitonSpec::make({1.0}, {0.5}), SolitonSpec::make({1.0}, {-0.5})};
}

inline PairSpec n2_break() {
    return {SolitonSpec::make({1.0, 2.0}, {0.3, -0.2}),
            SolitonSpec::make({1.5, 2.5}, {0.1, 0.4})};
}

inline PairSpec n3_break() {
    return {SolitonSpec::make({1.0, 2.0, 3.0}, {0.3, -0.2, 0.1}),
            SolitonSpec::make({1.5, 2.5, 3.5}, {0.1, 0.4, -0.3})};
}

// kappa_1 = kappa_1'
inline PairSpec break1() {
    return {SolitonSpec::make({1.0, 2.0}, {0.4, 0.3}),
            SolitonSpec::make({1.0, 2.5}, {-0.1, 0.7})};
}

// kappa_2 = kappa_2'
inline PairSpec break2() {
    return {SolitonSpec::make({1.0, 2.0}, {0.2, 0.3}),
            SolitonSpec::make({1.4, 2.0}, {0.6, -0.25})};
}

// kappa_1 = kappa_2'
inline PairSpec break3() {
    return {SolitonSpec::make({1.0, 2.0}, {0.4, 0.3}),
            SolitonSpec::make({0.6, 1.0}, {0.5, -0.1})};
}

inline PairSpec break1_tau_eq() {
    return {SolitonSpec::make({1.0, 2.0}, {0.4, 0.3}),
            SolitonSpec::make({1.0, 2.5}, {0.4, 0.7})};
}

inline PairSpec break2_tau_eq() {
    return {SolitonSpec::make({1.0, 2.0}, {0.2, 0.3}),
            SolitonSpec::make({1.4, 2.0}, {0.6, 0.3})};
}

// tau_1 = tau_2' with kappa_1 = kappa_2': the channel constant vanishes
inline PairSpec break3_tau_eq() {
    return {SolitonSpec::make({1.0, 2.0}, {0.4, 0.3}),
            SolitonSpec::make({0.6, 1.0}, {0.5, 0.4})};
}

inline PairSpec common_virtual_1() {
    return {SolitonSpec::make({1.0, 2.0}, {0.25, 0.3}),
            SolitonSpec::make({1.0, 2.0}, {0.25, -0.4})};
}

inline PairSpec common_virtual_2() {
    return {SolitonSpec::make({1.0, 2.0}, {0.25, 0.3}),
            SolitonSpec::make({1.0, 2.0}, {0.8, 0.3})};
}

inline PairSpec exact_n2() {
    return {SolitonSpec::make({1.0, 2.0}, {0.0, 0.0}),
            SolitonSpec::make({1.0, 2.0}, {0.3, 0.7})};
}

inline PairSpec special_n2() {
    double t1p = special_n2_tau1_prime(1.0, 2.0, 0.0, 0.0, 0.7);
    return {SolitonSpec::make({1.0, 2.0}, {0.0, 0.0}),
            SolitonSpec::make({1.0, 2.0}, {t1p, 0.7})};
}

// mutually shifted reflectionless Poschl-Teller pair: kappa_j = j kappa
inline PairSpec pt_self_iso(int n, double kappa = 1.0, double tau = 0.0,
                            double tau_p = 0.35) {
    std::vector<double> ks, ts, tps;
    for (int j = 1; j <= n; ++j) {
        ks.push_back(j * kappa);
        ts.push_back(tau);
        tps.push_back(tau_p);
    }
    return {SolitonSpec::make(ks, ts), SolitonSpec::make(ks, tps)};
}

inline PairSpec exact_n3() {
    return {SolitonSpec::make({1.0, 2.0, 3.0}, {0.1, -0.2, 0.25}),
            SolitonSpec::make({1.0, 2.0, 3.0}, {0.4, 0.15, -0.3})};
}

inline PairSpec special_n3() {
    SolitonSpec up = SolitonSpec::make({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
    return {up, SolitonSpec::make({1.0, 2.0, 3.0}, special_taus_prime(up, 0.5))};
}

inline PairSpec partial_n3_r1() {
    return {SolitonSpec::make({1.0, 2.0, 3.0}, {0.3, -0.2, 0.1}),
            SolitonSpec::make({1.0, 2.4, 3.3}, {-0.1, 0.4, 0.2})};
}

inline PairSpec partial_n3_r2() {
    return {SolitonSpec::make({1.0, 2.0, 3.0}, {0.3, -0.2, 0.1}),
            SolitonSpec::make({1.0, 2.0, 3.6}, {-0.1, 0.4, 0.2})};
}

inline PairSpec identical_n2() {
    return {SolitonSpec::make({1.0, 2.0}, {0.3, -0.2}),
            SolitonSpec::make({1.0, 2.0}, {0.3, -0.2})};
}

inline PairSpec by_name(const std::string& name) {
    if (name == "n1-break") return n1_break();
    if (name == "n1-iso") return n1_iso();
    if (name == "n2-break") return n2_break();
    if (name == "n3-break") return n3_break();
    if (name == "break1") return break1();
    if (name == "break2") return break2();
    if (name == "break3") return break3();
    if (name == "break1-tau-eq") return break1_tau_eq();
    if (name == "break2-tau-eq") return break2_tau_eq();
    if (name == "break3-tau-eq") return break3_tau_eq();
    if (name == "common-virtual-1") return common_virtual_1();
    if (name == "common-virtual-2") return common_virtual_2();
    if (name == "exact-n2") return exact_n2();
    if (name == "special-n2") return special_n2();
    if (name == "pt-self-iso-n2") return pt_self_iso(2);
    if (name == "pt-self-iso-n3") return pt_self_iso(3);
    if (name == "exact-n3") return exact_n3();
    if (name == "special-n3") return special_n3();
    if (name == "partial-n3-r1") return partial_n3_r1();
    if (name == "partial-n3-r2") return partial_n3_r2();
    if (name == "identical-n2") return identical_n2();
    throw spec_error("unknown preset: " + name);
}

inline std::vector<std::string> preset_names() {
    return {"n1-break",       "n1-iso",        "n2-break",        "n3-break",
            "break1",         "break2",        "break3",          "break1-tau-eq",
            "break2-tau-eq",  "break3-tau-eq", "common-virtual-1", "common-virtual-2",
            "exact-n2",       "special-n2",    "pt-self-iso-n2",  "pt-self-iso-n3",
            "exact-n3",       "special-n3",    "partial-n3-r1",   "partial-n3-r2",
            "identical-n2"};
}

} // namespace darboux::presets
