#pragma once

// The (anti)commutation relations of the exotic superalgebra, organized per
// isospectrality class, each as an LHS/RHS pair of matrix operators for the
// action-residual engine.

#include "darboux/susy.hpp"

namespace darboux {

struct SusyRelation {
    std::string id;
    std::string formula;
    double threshold;
    std::function<std::pair<MatOp, MatOp>(const ExtendedSystem&, const SusyIntegrals&)>
        build;
};

namespace detail {

inline double relation_threshold(int order) { return order >= 7 ? 1e-7 : 1e-8; }

struct PartialRoles {
    double ki;  // coinciding scaling parameter
    double kd;  // remaining upper scaling
    double kdp; // remaining lower scaling
    double C;
};

inline PartialRoles partial_roles(const ExtendedSystem& sys) {
    const Coincidence& c = sys.iso().pairs.front();
    PartialRoles r;
    r.ki = sys.upper().kappas[c.upper_level - 1];
    r.kd = sys.upper().kappas[c.upper_level == 1 ? 1 : 0];
    r.kdp = sys.lower().kappas[c.lower_level == 1 ? 1 : 0];
    r.C = c.tau_equal && c.mixed_kinds ? 0.0 : c.C;
    return r;
}

} // namespace detail

inline std::vector<SusyRelation> susy_relations(const ExtendedSystem& sys) {
    using Pair = std::pair<MatOp, MatOp>;
    const IsoClass& cls = sys.iso();
    int n = sys.n();
    std::vector<SusyRelation> rels;
    auto add = [&](std::string id, std::string formula, int order,
                   std::function<Pair(const ExtendedSystem&, const SusyIntegrals&)> b) {
        rels.push_back({std::move(id), std::move(formula),
                        detail::relation_threshold(order), std::move(b)});
    };
    const MatOp zero2 = MatOp::scalar(cplx(0.0, 0.0));

    switch (cls.tag) {
        case IsoTag::CompleteBreak: {
            std::vector<double> ku = sys.upper().kappas, kl = sys.lower().kappas;
            add("SUSY_QQ_DIAG", "{Q1,Q1} = 2 P_n(H,k) P_n(H,k')", 4 * n,
                [ku, kl](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.Q1, g.Q1),
                            2.0 * (spectral_poly(s, ku) * spectral_poly(s, kl))};
                });
            add("SUSY_QQ_MIXED", "{Q1,Q2} = 0", 4 * n,
                [](const ExtendedSystem&, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.Q1, g.Q2), MatOp::scalar(cplx(0.0, 0.0))};
                });
            add("SUSY_SS_DIAG", "{S1,S1} = 2 H P_n(H,k) P_n(H,k')", 4 * n + 2,
                [ku, kl](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.S1, g.S1),
                            2.0 * (h_poly(s, {0.0}) * spectral_poly(s, ku) *
                                   spectral_poly(s, kl))};
                });
            add("SUSY_SQ_EPS", "{S1,Q2} = 2 P_n(H,K) P1", 4 * n + 1,
                [ku, kl](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.S1, g.Q2),
                            2.0 * (h_poly(s, squares(kl), squares(ku)) * g.P1)};
                });
            add("SUSY_SQ_DIAG", "{S1,Q1} = 0", 4 * n + 1,
                [](const ExtendedSystem&, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.S1, g.Q1), MatOp::scalar(cplx(0.0, 0.0))};
                });
            add("SUSY_P1S", "[P1,S1] = i H (P_n(k)-P_n(k')) Q1", 4 * n + 2,
                [ku, kl](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    MatOp pminus = spectral_poly(s, ku) - spectral_poly(s, kl);
                    return {commutator(g.P1, g.S1),
                            cplx(0.0, 1.0) * (h_poly(s, {0.0}) * pminus * g.Q1)};
                });
            add("SUSY_P1Q", "[P1,Q1] = -i (P_n(k)-P_n(k')) S1", 4 * n + 1,
                [ku, kl](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    MatOp pminus = spectral_poly(s, ku) - spectral_poly(s, kl);
                    return {commutator(g.P1, g.Q1), cplx(0.0, -1.0) * (pminus * g.S1)};
                });
            add("SUSY_P2S", "[P2,S1] = i H (P_n(k)+P_n(k')) Q1", 4 * n + 2,
                [ku, kl](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    MatOp pplus = spectral_poly(s, ku) + spectral_poly(s, kl);
                    return {commutator(g.P2, g.S1),
                            cplx(0.0, 1.0) * (h_poly(s, {0.0}) * pplus * g.Q1)};
                });
            add("SUSY_P2Q", "[P2,Q1] = -i (P_n(k)+P_n(k')) S1", 4 * n + 1,
                [ku, kl](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    MatOp pplus = spectral_poly(s, ku) + spectral_poly(s, kl);
                    return {commutator(g.P2, g.Q1), cplx(0.0, -1.0) * (pplus * g.S1)};
                });
            break;
        }
        case IsoTag::PartialSameLevel:
        case IsoTag::PartialCrossLevel: {
            detail::PartialRoles r = detail::partial_roles(sys);
            double ki2 = r.ki * r.ki, kd2 = r.kd * r.kd, kdp2 = r.kdp * r.kdp;
            double C = r.C;
            bool tau_eq_same =
                cls.tag == IsoTag::PartialSameLevel && cls.pairs.front().tau_equal;
            if (!tau_eq_same) {
                add("SUSY_SS_DIAG", "{S1,S1} = 2 h_d h_d' h_C", 6,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.S1),
                                2.0 * h_poly(s, {kd2, kdp2, C * C})};
                    });
                add("SUSY_QQ_DIAG", "{Q1,Q1} = 2 h_i^2 h_d h_d'", 8,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.Q1, g.Q1),
                                2.0 * h_poly(s, {ki2, ki2, kd2, kdp2})};
                    });
                add("SUSY_SQ_DIAG", "{S1,Q1} = 2 C h_i h_d h_d'", 7,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.Q1),
                                (2.0 * C) * h_poly(s, {ki2, kd2, kdp2})};
                    });
                add("SUSY_SQ_EPS", "{S1,Q2} = 2 h_{d',d} P1", 7,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.Q2),
                                2.0 * (h_poly(s, {kdp2}, {kd2}) * g.P1)};
                    });
                add("SUSY_P1S", "[P1,S1] = i (kd^2-kd'^2)(h_C Q1 - C h_i S1)", 8,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp rhs = h_poly(s, {C * C}) * g.Q1 -
                                    C * (h_poly(s, {ki2}) * g.S1);
                        return {commutator(g.P1, g.S1),
                                cplx(0.0, kd2 - kdp2) * rhs};
                    });
                add("SUSY_P1Q", "[P1,Q1] = i (kd^2-kd'^2) h_i (C Q1 - h_i S1)", 8,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp rhs = h_poly(s, {ki2}) *
                                    (C * g.Q1 - h_poly(s, {ki2}) * g.S1);
                        return {commutator(g.P1, g.Q1),
                                cplx(0.0, kd2 - kdp2) * rhs};
                    });
                add("SUSY_P2S", "[P2,S1] = i (h_d+h_d')(h_C Q1 - C h_i S1)", 9,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp hsum = h_poly(s, {kd2}) + h_poly(s, {kdp2});
                        MatOp rhs = h_poly(s, {C * C}) * g.Q1 -
                                    C * (h_poly(s, {ki2}) * g.S1);
                        return {commutator(g.P2, g.S1), cplx(0.0, 1.0) * (hsum * rhs)};
                    });
                add("SUSY_P2Q", "[P2,Q1] = i (h_d+h_d') h_i (C Q1 - h_i S1)", 9,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp hsum = h_poly(s, {kd2}) + h_poly(s, {kdp2});
                        MatOp rhs = h_poly(s, {ki2}) *
                                    (C * g.Q1 - h_poly(s, {ki2}) * g.S1);
                        return {commutator(g.P2, g.Q1), cplx(0.0, 1.0) * (hsum * rhs)};
                    });
            } else {
                // coinciding translation parameters: S carries the full X_5,
                // Q the second-order sandwich
                add("SUSY_SS_DIAG", "{S1,S1} = 2 H h_i^2 h_d h_d'", 10,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.S1),
                                2.0 * h_poly(s, {0.0, ki2, ki2, kd2, kdp2})};
                    });
                add("SUSY_QQ_DIAG", "{Q1,Q1} = 2 h_d h_d'", 4,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.Q1, g.Q1), 2.0 * h_poly(s, {kd2, kdp2})};
                    });
                add("SUSY_SQ_EPS", "{S1,Q2} = 2 h_{d',d} P1", 7,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.Q2),
                                2.0 * (h_poly(s, {kdp2}, {kd2}) * g.P1)};
                    });
                add("SUSY_P1S", "[P1,S1] = i (kd^2-kd'^2) H h_i^2 Q1", 10,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {commutator(g.P1, g.S1),
                                cplx(0.0, kd2 - kdp2) *
                                    (h_poly(s, {0.0, ki2, ki2}) * g.Q1)};
                    });
                add("SUSY_P1Q", "[P1,Q1] = -i (kd^2-kd'^2) S1", 7,
                    [=](const ExtendedSystem&, const SusyIntegrals& g) -> Pair {
                        return {commutator(g.P1, g.Q1),
                                cplx(0.0, -(kd2 - kdp2)) * g.S1};
                    });
                add("SUSY_P2S", "[P2,S1] = i H h_i^2 (h_d+h_d') Q1", 10,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp hsum = h_poly(s, {kd2}) + h_poly(s, {kdp2});
                        return {commutator(g.P2, g.S1),
                                cplx(0.0, 1.0) *
                                    (h_poly(s, {0.0, ki2, ki2}) * hsum * g.Q1)};
                    });
                add("SUSY_P2Q", "[P2,Q1] = -i (h_d+h_d') S1", 7,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp hsum = h_poly(s, {kd2}) + h_poly(s, {kdp2});
                        return {commutator(g.P2, g.Q1),
                                cplx(0.0, -1.0) * (hsum * g.S1)};
                    });
            }
            break;
        }
        case IsoTag::ExactCommonVirtual: {
            int eq = -1, ne = -1;
            double C = 0.0;
            for (const Coincidence& c : cls.pairs) {
                if (c.tau_equal) eq = c.upper_level;
                else {
                    ne = c.upper_level;
                    C = c.C;
                }
            }
            double ke2 = sys.upper().kappas[eq - 1] * sys.upper().kappas[eq - 1];
            double kn2 = sys.upper().kappas[ne - 1] * sys.upper().kappas[ne - 1];
            add("SUSY_SS_DIAG", "{S1,S1} = 2 h_C h_eq^2", 6,
                [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.S1, g.S1),
                            2.0 * h_poly(s, {C * C, ke2, ke2})};
                });
            add("SUSY_QQ_DIAG", "{Q1,Q1} = 2 h_ne^2", 4,
                [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.Q1, g.Q1), 2.0 * h_poly(s, {kn2, kn2})};
                });
            add("SUSY_SQ_DIAG", "{S1,Q1} = 2 C h_1 h_2", 5,
                [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.S1, g.Q1), (2.0 * C) * h_poly(s, {ke2, kn2})};
                });
            add("SUSY_SQ_EPS", "{S1,Q2} = 2 P1", 5,
                [=](const ExtendedSystem&, const SusyIntegrals& g) -> Pair {
                    return {anticommutator(g.S1, g.Q2), 2.0 * g.P1};
                });
            add("SUSY_P2S", "[P2,S1] = 2i h_eq (h_C h_eq Q1 - C h_ne S1)", 8,
                [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    MatOp rhs = h_poly(s, {C * C, ke2}) * g.Q1 -
                                C * (h_poly(s, {kn2}) * g.S1);
                    return {commutator(g.P2, g.S1),
                            cplx(0.0, 2.0) * (h_poly(s, {ke2}) * rhs)};
                });
            add("SUSY_P2Q", "[P2,Q1] = 2i h_ne (C h_eq Q1 - h_ne S1)", 8,
                [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    MatOp rhs = (C * (h_poly(s, {ke2}) * g.Q1)) -
                                h_poly(s, {kn2}) * g.S1;
                    return {commutator(g.P2, g.Q1),
                            cplx(0.0, 2.0) * (h_poly(s, {kn2}) * rhs)};
                });
            break;
        }
        case IsoTag::ExactGeneric: {
            if (n != 2) break; // the F-basis relations are the n = 2 statement
            double C1 = cls.pairs[0].C, C2 = cls.pairs[1].C;
            double k12 = sys.upper().kappas[0] * sys.upper().kappas[0];
            double k22 = sys.upper().kappas[1] * sys.upper().kappas[1];
            double dC = C2 - C1;
            // F^(1) from the A-channel, F^(2) from the B-channel
            auto fpair = [](const ExtendedSystem& s, int which) {
                Op x3 = which == 1 ? reduced_X3_A(s.upper_chain(), s.lower_chain())
                                   : reduced_X3_B(s.upper_chain(), s.lower_chain());
                return detail::charge_pair(x3);
            };
            auto hshift = [=](int i, int j) {
                double Ci = i == 1 ? C1 : C2;
                double Cj = j == 1 ? C1 : C2;
                return Ci * Cj;
            };
            // diagonal products carry the h-factors of the complementary
            // levels: X(i) X(i)^dag = h_{other(i)}^2 h_{ii}, as the two X5
            // reductions together with the generic products dictate
            for (int i = 1; i <= 2; ++i)
                for (int j = i; j <= 2; ++j) {
                    add("SUSY_FF_" + std::to_string(i) + std::to_string(j),
                        "{F(i)1,F(j)1} = 2 h_ij h_comp(i) h_comp(j)", 6,
                        [=](const ExtendedSystem& s, const SusyIntegrals&) -> Pair {
                            MatOp fi = fpair(s, i).first;
                            MatOp fj = fpair(s, j).first;
                            double hi = i == 1 ? k22 : k12;
                            double hj = j == 1 ? k22 : k12;
                            return {anticommutator(fi, fj),
                                    2.0 * h_poly(s, {hshift(i, j), hi, hj})};
                        });
                }
            add("SUSY_FF_EPS", "{F(1)1,F(2)2} = 2 dC P1", 6,
                [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                    MatOp f1 = fpair(s, 1).first;
                    MatOp f2 = fpair(s, 2).second;
                    return {anticommutator(f1, f2), (2.0 * dC) * g.P1};
                });
            add("SUSY_FF_DIAG_MIXED", "{F(1)1,F(1)2} = 0", 6,
                [=](const ExtendedSystem& s, const SusyIntegrals&) -> Pair {
                    auto [f1, f2] = fpair(s, 1);
                    return {anticommutator(f1, f2), MatOp::scalar(cplx(0.0, 0.0))};
                });
            for (int j = 1; j <= 2; ++j) {
                add("SUSY_PF_" + std::to_string(j),
                    "[P2,F(j)1] = (2i/dC)((-1)^j h1 h2 h12 F(j) + e^{jk} h_jj h_k^2 F(k))",
                    11, [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp fj = fpair(s, j).first;
                        int k = 3 - j;
                        MatOp fk = fpair(s, k).first;
                        double sgn = j == 1 ? -1.0 : 1.0;   // (-1)^j
                        double eps = j == 1 ? 1.0 : -1.0;   // e^{jk}
                        double hk2 = k == 1 ? k12 : k22;
                        MatOp rhs =
                            sgn * (h_poly(s, {k12, k22, hshift(1, 2)}) * fj) +
                            eps * (h_poly(s, {hshift(j, j), hk2, hk2}) * fk);
                        return {commutator(g.P2, fj), cplx(0.0, 2.0 / dC) * rhs};
                    });
            }
            break;
        }
        case IsoTag::SpecialCequal: {
            double C1 = cls.pairs.front().C;
            if (n == 1) {
                double k2 = sys.upper().kappas[0] * sys.upper().kappas[0];
                add("SUSY_SS_DIAG", "{S1,S1} = 2 h_C", 2,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.S1), 2.0 * h_poly(s, {C1 * C1})};
                    });
                add("SUSY_QQ_DIAG", "{Q1,Q1} = 2 h_k^2", 4,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.Q1, g.Q1), 2.0 * h_poly(s, {k2, k2})};
                    });
                add("SUSY_SQ_DIAG", "{S1,Q1} = 2 C h_k", 3,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.Q1), (2.0 * C1) * h_poly(s, {k2})};
                    });
                add("SUSY_SQ_EPS", "{S1,Q2} = 2 P1", 3,
                    [=](const ExtendedSystem&, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.Q2), 2.0 * g.P1};
                    });
                add("SUSY_P2S", "[P2,S1] = 2i (h_C Q1 - C h_k S1)", 6,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp rhs = h_poly(s, {C1 * C1}) * g.Q1 -
                                    C1 * (h_poly(s, {k2}) * g.S1);
                        return {commutator(g.P2, g.S1), cplx(0.0, 2.0) * rhs};
                    });
                add("SUSY_P2Q", "[P2,Q1] = 2i h_k (C Q1 - h_k S1)", 6,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp rhs = C1 * g.Q1 - h_poly(s, {k2}) * g.S1;
                        return {commutator(g.P2, g.Q1),
                                cplx(0.0, 2.0) * (h_poly(s, {k2}) * rhs)};
                    });
            } else if (n == 2) {
                double k12 = sys.upper().kappas[0] * sys.upper().kappas[0];
                double k22 = sys.upper().kappas[1] * sys.upper().kappas[1];
                add("SUSY_SS_DIAG", "{S1,S1} = 2 h_C1", 2,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.S1), 2.0 * h_poly(s, {C1 * C1})};
                    });
                add("SUSY_QQ_DIAG", "{Q1,Q1} = 2 h_1^2 h_2^2", 8,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.Q1, g.Q1),
                                2.0 * h_poly(s, {k12, k12, k22, k22})};
                    });
                add("SUSY_SQ_DIAG", "{S1,Q1} = 2 C1 h_1 h_2", 5,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.Q1),
                                (2.0 * C1) * h_poly(s, {k12, k22})};
                    });
                add("SUSY_SQ_EPS", "{S1,Q2} = 2 P1", 5,
                    [=](const ExtendedSystem&, const SusyIntegrals& g) -> Pair {
                        return {anticommutator(g.S1, g.Q2), 2.0 * g.P1};
                    });
                add("SUSY_P2S", "[P2,S1] = 2i (h_C1 Q1 - C1 h_1 h_2 S1)", 8,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp rhs = h_poly(s, {C1 * C1}) * g.Q1 -
                                    C1 * (h_poly(s, {k12, k22}) * g.S1);
                        return {commutator(g.P2, g.S1), cplx(0.0, 2.0) * rhs};
                    });
                add("SUSY_P2Q", "[P2,Q1] = 2i h_1 h_2 (C1 Q1 - h_1 h_2 S1)", 9,
                    [=](const ExtendedSystem& s, const SusyIntegrals& g) -> Pair {
                        MatOp rhs = C1 * g.Q1 - h_poly(s, {k12, k22}) * g.S1;
                        return {commutator(g.P2, g.Q1),
                                cplx(0.0, 2.0) * (h_poly(s, {k12, k22}) * rhs)};
                    });
            }
            break;
        }
        case IsoTag::Identical:
            break;
    }
    (void)zero2;
    return rels;
}

inline ResidualReport susy_relation_residual(const SusyRelation& rel,
                                             const ExtendedSystem& sys,
                                             const SusyIntegrals& g,
                                             const std::vector<VecFn>& fns,
                                             std::vector<double> grid) {
    auto [lhs, rhs] = rel.build(sys, g);
    std::vector<double> poles = lhs.poles();
    std::vector<double> rp = rhs.poles();
    poles.insert(poles.end(), rp.begin(), rp.end());
    double k1 = std::min(sys.upper().kappas.front(), sys.lower().kappas.front());
    ResidualOptions opt;
    // compositions through singular channel factors need generous clearance
    opt.grid = filter_poles(std::move(grid), poles, 0.12 / k1);
    opt.threshold = rel.threshold;
    return matrix_action_residual(rel.id, lhs, rhs, fns, opt);
}

// ---------------------------------------------------------------------------
// Conservation, grading, central charge, dressing

// max residual of [H, G] over the given integrals, annihilation-normalized
inline double conservation_residual(const ExtendedSystem& sys,
                                    const std::vector<MatOp>& integrals,
                                    const std::vector<VecFn>& fns,
                                    const std::vector<double>& grid) {
    MatOp H = h_poly(sys, {0.0});
    double worst = 0.0;
    for (const MatOp& G : integrals) {
        MatOp com = commutator(H, G);
        for (const VecFn& f : fns) {
            for (double x : grid) {
                ApplyStats st;
                double num = 0.0;
                try {
                    for (int row = 0; row < 2; ++row) {
                        cplx v = apply(com.e[row][0], f.up.eval, x, 0, &st).value() +
                                 apply(com.e[row][1], f.dn.eval, x, 0, &st).value();
                        num = std::max(num, std::abs(v));
                    }
                } catch (const jet_error&) {
                    continue;
                }
                worst = std::max(worst, num / (st.max_intermediate + 1e-300));
            }
        }
    }
    return worst;
}

// max over the four supercharges of |[P1, G] f| relative to the evaluation
// scale; the transmutation certificate for exactly isospectral pairs.
inline double central_charge_residual(const ExtendedSystem& sys, const SusyIntegrals& g,
                                      const std::vector<VecFn>& fns,
                                      const std::vector<double>& grid) {
    double worst = 0.0;
    for (const MatOp* G : {&g.Q1, &g.Q2, &g.S1, &g.S2}) {
        MatOp com = commutator(g.P1, *G);
        for (const VecFn& f : fns) {
            for (double x : grid) {
                ApplyStats st;
                double num = 0.0;
                try {
                    for (int row = 0; row < 2; ++row) {
                        cplx v = apply(com.e[row][0], f.up.eval, x, 0, &st).value() +
                                 apply(com.e[row][1], f.dn.eval, x, 0, &st).value();
                        num = std::max(num, std::abs(v));
                    }
                } catch (const jet_error&) {
                    continue;
                }
                worst = std::max(worst, num / (st.max_intermediate + 1e-300));
            }
        }
    }
    (void)sys;
    return worst;
}

// sup |[P1,Q1] f| / sup |S1 f|: scales as |P_{n-1}^-|, i.e. as kappa^2-kappa'^2
// for n = 1.
inline double central_charge_action_ratio(const ExtendedSystem& sys,
                                          const SusyIntegrals& g,
                                          const std::vector<VecFn>& fns,
                                          const std::vector<double>& grid) {
    (void)sys;
    MatOp com = commutator(g.P1, g.Q1);
    double num = 0.0, den = 0.0;
    for (const VecFn& f : fns) {
        for (double x : grid) {
            try {
                for (int row = 0; row < 2; ++row) {
                    cplx cv = apply(com.e[row][0], f.up.eval, x).value() +
                              apply(com.e[row][1], f.dn.eval, x).value();
                    cplx sv = apply(g.S1.e[row][0], f.up.eval, x).value() +
                              apply(g.S1.e[row][1], f.dn.eval, x).value();
                    num = std::max(num, std::abs(cv));
                    den = std::max(den, std::abs(sv));
                }
            } catch (const jet_error&) {
                continue;
            }
        }
    }
    return num / (den + 1e-300);
}

// Every integral equals the dressed form of a free-particle integral:
// D I_0 D^dag with D = diag(A_n, A_n').
inline std::vector<ResidualReport> dressing_check(const ExtendedSystem& sys,
                                                  const SusyIntegrals& g,
                                                  const std::vector<VecFn>& fns,
                                                  const std::vector<double>& grid) {
    Op Au = compose_A(sys.upper_chain());
    Op Al = compose_A(sys.lower_chain());
    MatOp D = MatOp::diag(Au, Al);
    MatOp Dd = D.adjoint();
    Op p = cplx(0.0, -1.0) * Op::derivative();
    MatOp P = MatOp::diag(p, p);
    ResidualOptions opt;
    opt.grid = grid;
    opt.threshold = 1e-8;
    std::vector<ResidualReport> out;
    auto check = [&](const char* id, const MatOp& free_integral, const MatOp& dressed) {
        out.push_back(
            matrix_action_residual(id, D * free_integral * Dd, dressed, fns, opt));
    };
    check("DRESS_SIGMA1", MatOp::sigma1(), g.Q1);
    check("DRESS_SIGMA2", MatOp::sigma2(), cplx(-1.0, 0.0) * g.Q2);
    check("DRESS_SIGMA2_P", MatOp::sigma2() * P, cplx(-1.0, 0.0) * g.S1);
    check("DRESS_SIGMA1_P", MatOp::sigma1() * P, cplx(-1.0, 0.0) * g.S2);
    check("DRESS_P", P, g.P1);
    check("DRESS_SIGMA3_P", MatOp::sigma3() * P, g.P2);
    return out;
}

} // namespace darboux
