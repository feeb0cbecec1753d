#pragma once

// Uniform action-residual evaluation: an identity L = R between operators is
// certified by applying both sides to a suite of test functions on a grid
// and bounding sup |(L-R)f| / (sup|Lf| + sup|Rf|).

#include "darboux/operators.hpp"
#include "darboux/testfuncs.hpp"

#include <limits>
#include <string>
#include <vector>

namespace darboux {

struct ResidualOptions {
    std::vector<double> grid;
    double threshold = 1e-8;
    int out_order = 0;
};

struct ResidualReport {
    std::string id;
    double max_rel_residual = 0.0;
    double worst_point = std::numeric_limits<double>::quiet_NaN();
    int worst_function = -1;
    int skipped_points = 0;
    std::vector<double> per_function;
    double threshold = 0.0;
    bool pass = false;
};

inline ResidualReport action_residual(std::string id, const Op& lhs, const Op& rhs,
                                      const std::vector<TestFunction>& fns,
                                      const ResidualOptions& opt) {
    constexpr double kCancelEps = 4e-15; // attainable cancellation per point
    ResidualReport rep;
    rep.id = std::move(id);
    rep.threshold = opt.threshold;

    struct Sample {
        double x, diff, err_est;
    };
    std::vector<std::vector<Sample>> samples(fns.size());
    std::vector<double> dens(fns.size(), 0.0);
    double suite_scale = 0.0, suite_inter = 0.0;
    for (std::size_t fi = 0; fi < fns.size(); ++fi) {
        for (double x : opt.grid) {
            cplx lv, rv;
            ApplyStats sl, sr;
            try {
                lv = apply(lhs, fns[fi].eval, x, opt.out_order, &sl).value();
                rv = apply(rhs, fns[fi].eval, x, opt.out_order, &sr).value();
            } catch (const jet_error&) {
                ++rep.skipped_points;
                continue;
            }
            suite_inter = std::max(suite_inter, sl.max_intermediate + sr.max_intermediate);
            dens[fi] = std::max(dens[fi], std::abs(lv) + std::abs(rv));
            samples[fi].push_back(
                {x, std::abs(lv - rv),
                 (sl.max_intermediate + sr.max_intermediate) *
                         (kCancelEps + fns[fi].noise) +
                     (sl.max_coeff + sr.max_coeff) * 2e-16});
        }
        suite_scale = std::max(suite_scale, dens[fi]);
    }
    suite_scale = std::max(suite_scale, 0.01 * suite_inter);
    for (std::size_t fi = 0; fi < fns.size(); ++fi) {
        // Floor the denominator at a fraction of the suite scale: a function
        // annihilated by both sides measures residual noise, not L = R, so
        // rate it against the suite; genuine violations on such functions
        // still surface, amplified a hundredfold.
        double den = dens[fi] + 0.01 * suite_scale + 1e-300;
        double num = 0.0, worst_x = 0.0;
        for (const Sample& s : samples[fi]) {
            // Points whose intermediate magnitudes cannot cancel below the
            // threshold (evaluation squeezed past a coefficient pole) carry
            // no certification power; skip them, visibly.
            if (s.err_est > 0.5 * opt.threshold * den) {
                ++rep.skipped_points;
                continue;
            }
            if (s.diff > num) {
                num = s.diff;
                worst_x = s.x;
            }
        }
        double res = num / den;
        rep.per_function.push_back(res);
        if (res > rep.max_rel_residual) {
            rep.max_rel_residual = res;
            rep.worst_point = worst_x;
            rep.worst_function = static_cast<int>(fi);
        }
    }
    rep.pass = rep.max_rel_residual <= rep.threshold;
    return rep;
}

// Annihilation check: |T f| relative to the largest intermediate magnitude
// met while composing T f (the attainable cancellation scale).
inline ResidualReport annihilation_residual(std::string id, const Op& op,
                                            const TestFunction& fn,
                                            const ResidualOptions& opt) {
    ResidualReport rep;
    rep.id = std::move(id);
    rep.threshold = opt.threshold;
    double worst = 0.0, worst_x = 0.0;
    for (double x : opt.grid) {
        ApplyStats stats;
        cplx v;
        try {
            v = apply(op, fn.eval, x, opt.out_order, &stats).value();
        } catch (const jet_error&) {
            ++rep.skipped_points;
            continue;
        }
        double ratio = std::abs(v) / (stats.max_intermediate + 1e-300);
        if (ratio > worst) {
            worst = ratio;
            worst_x = x;
        }
    }
    rep.max_rel_residual = worst;
    rep.worst_point = worst_x;
    rep.per_function = {rep.max_rel_residual};
    rep.pass = rep.max_rel_residual <= rep.threshold;
    return rep;
}

} // namespace darboux
