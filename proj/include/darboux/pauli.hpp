#pragma once

// Spin-1/2 reading of the pair: a planar particle in fields homogeneous
// along y, with vector potential a(x), scalar potential phi(x) and
// perpendicular magnetic field B_z(x) built from the two soliton profiles.

#include "darboux/susy.hpp"

#include <optional>

namespace darboux {

struct FieldProfile {
    double k = 0.0;  // transverse momentum
    double c0 = 0.0; // gauge constant of a(x)
    double g = 2.0;  // gyromagnetic ratio
    std::function<double(double)> a, phi, bz;
};

// a(x) = (2/g) d/dx ln(W'/W) + c0; the magnetic term matches
// (g/2) B_z = (V - V')/2 for every g, reducing to the textbook pairing at
// g = 2:  V_± = (k+a)^2 - phi ± da/dx.
inline FieldProfile field_profile(const ExtendedSystem& sys, double k,
                                  std::optional<double> c0 = std::nullopt,
                                  double g = 2.0) {
    ChainPtr up = sys.upper_chain(), lo = sys.lower_chain();
    double c0_val;
    if (c0) {
        c0_val = *c0;
    } else if ((sys.iso().tag == IsoTag::ExactGeneric ||
                sys.iso().tag == IsoTag::SpecialCequal ||
                sys.iso().tag == IsoTag::ExactCommonVirtual) &&
               !sys.iso().pairs.front().tau_equal) {
        // the choice that turns a(x)+k into the negative gap function
        c0_val = 0.5 * g * sys.iso().pairs.front().C - k;
    } else {
        c0_val = 0.0;
    }
    FieldProfile f;
    f.k = k;
    f.c0 = c0_val;
    f.g = g;
    f.a = [up, lo, c0_val, g](double x) {
        double wu = up->log_wronskian_slope_neg(x, 0).value();
        double wl = lo->log_wronskian_slope_neg(x, 0).value();
        return (2.0 / g) * (wu - wl) + c0_val;
    };
    f.bz = [up, lo, g](double x) {
        return (up->potential(x) - lo->potential(x)) / g;
    };
    f.phi = [up, lo, c0_val, g, k](double x) {
        double wu = up->log_wronskian_slope_neg(x, 0).value();
        double wl = lo->log_wronskian_slope_neg(x, 0).value();
        double ax = (2.0 / g) * (wu - wl) + c0_val;
        return (k + ax) * (k + ax) - 0.5 * (up->potential(x) + lo->potential(x));
    };
    return f;
}

struct ConstantPhiReport {
    bool is_constant;
    double value;     // mean over the grid
    double deviation; // max - min over the grid
};

inline ConstantPhiReport constant_phi_check(const FieldProfile& f,
                                            const std::vector<double>& grid) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double x : grid) {
        double v = f.phi(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    ConstantPhiReport rep;
    rep.value = sum / static_cast<double>(grid.size());
    rep.deviation = hi - lo;
    rep.is_constant = rep.deviation <= 1e-9 * std::max(1.0, std::abs(rep.value));
    return rep;
}

} // namespace darboux
