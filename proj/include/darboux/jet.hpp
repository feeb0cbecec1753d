#pragma once

// Point-local truncated Taylor expansions ("jets") with the magnitude kept
// in log form, so that quantities like cosh(700) stay representable while
// their relative structure is carried by O(1) coefficients.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace darboux {

using cplx = std::complex<double>;

struct jet_error : std::runtime_error {
    explicit jet_error(const std::string& what) : std::runtime_error(what) {}
};
struct pole_proximity_error : jet_error {
    explicit pole_proximity_error(const std::string& what) : jet_error(what) {}
};
struct point_mismatch_error : jet_error {
    explicit point_mismatch_error(const std::string& what) : jet_error(what) {}
};
struct order_exhausted_error : jet_error {
    explicit order_exhausted_error(const std::string& what) : jet_error(what) {}
};
struct zero_base_error : jet_error {
    explicit zero_base_error(const std::string& what) : jet_error(what) {}
};

namespace detail {

inline double mag(double v) { return std::abs(v); }
inline double mag(const cplx& v) { return std::abs(v); }
inline double conj_of(double v) { return v; }
inline cplx conj_of(const cplx& v) { return std::conj(v); }

constexpr double kZeroLog = -std::numeric_limits<double>::infinity();

// Knuth two-sum: a + b = s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    double bv = s - a;
    e = (a - (s - bv)) + (b - bv);
}

} // namespace detail

// value = phase * exp(log); |phase| = 1 unless the value is zero.
// The log of the magnitude is kept as a compensated hi+lo pair so that
// large logs (cosh near x ~ 700) cancel without losing the low bits;
// log_hi = -inf encodes zero, phase is then meaningless.
template <class S>
struct Scaled {
    S phase{1.0};
    double log_hi{detail::kZeroLog};
    double log_lo{0.0};

    static Scaled zero() { return {S{1.0}, detail::kZeroLog, 0.0}; }

    static Scaled from_value(S v) {
        double m = detail::mag(v);
        if (m == 0.0) return zero();
        return {v / m, std::log(m), 0.0};
    }

    bool is_zero() const { return log_hi == detail::kZeroLog; }

    double log_mag() const { return log_hi + log_lo; }

    S value() const {
        if (is_zero()) return S{0.0};
        return phase * std::exp(log_hi) * std::exp(log_lo);
    }

    void fold_log(double d) {
        double s, e;
        detail::two_sum(log_hi, d, s, e);
        log_hi = s;
        log_lo += e;
    }

    Scaled times(const Scaled& o) const {
        if (is_zero() || o.is_zero()) return zero();
        double s, e;
        detail::two_sum(log_hi, o.log_hi, s, e);
        return {phase * o.phase, s, log_lo + o.log_lo + e};
    }

    Scaled inverse() const {
        if (is_zero()) throw zero_base_error("Scaled::inverse of zero");
        return {detail::conj_of(phase), -log_hi, -log_lo};
    }

    // exp(this->log - o.log) * phase ratio, assuming it does not overflow
    S ratio_to(const Scaled& o) const {
        double s, e;
        detail::two_sum(log_hi, -o.log_hi, s, e);
        return (phase / o.phase) * std::exp(s + (e + log_lo - o.log_lo));
    }
};

// Truncated Taylor expansion of f at a point x:
//   f^(m)(x) / m!  =  coeff(m) * scale.value(),   m = 0..order.
// Coefficients stay normalized so max |coeff| lies in [0.5, 2] (or all are
// zero); every operation renormalizes.
template <class S>
class Jet {
public:
    Jet() = default;

    Jet(double x, int order, Scaled<S> scale, std::vector<S> coeffs)
        : x_(x), order_(order), scale_(scale), c_(std::move(coeffs)) {
        if (static_cast<int>(c_.size()) != order_ + 1)
            throw jet_error("Jet: coefficient count does not match order");
        normalize();
    }

    static Jet zero(double x, int order) {
        return Jet(x, order, Scaled<S>::zero(), std::vector<S>(order + 1, S{0.0}));
    }

    static Jet constant(S v, double x, int order) {
        std::vector<S> c(order + 1, S{0.0});
        c[0] = S{1.0};
        if (detail::mag(v) == 0.0) return zero(x, order);
        return Jet(x, order, Scaled<S>::from_value(v), std::move(c));
    }

    // d^m/dx^m of (x'-x)^p/p! at x is the Kronecker basis jet; used to read
    // off individual coefficient functions of a differential operator.
    static Jet monomial(int p, double x, int order) {
        std::vector<S> c(order + 1, S{0.0});
        if (p <= order) c[p] = S{1.0};
        Jet j(x, order, {S{1.0}, 0.0, 0.0}, std::move(c));
        return j;
    }

    double point() const { return x_; }
    int order() const { return order_; }
    const Scaled<S>& scale() const { return scale_; }
    S coeff(int m) const { return c_[m]; }
    bool is_zero() const { return scale_.is_zero(); }

    // f^(m)(x)/m! in scaled form (exact even when huge).
    Scaled<S> scaled_taylor(int m) const {
        return scale_.times(Scaled<S>::from_value(c_[m]));
    }

    // f^(m)(x)/m! reconstructed; may overflow to inf for extreme scales.
    S taylor(int m) const {
        if (is_zero()) return S{0.0};
        return scaled_taylor(m).value();
    }

    S value() const { return taylor(0); }

    // f^(m)(x) = m! * taylor(m)
    S deriv(int m) const {
        S t = taylor(m);
        double f = 1.0;
        for (int i = 2; i <= m; ++i) f *= i;
        return t * f;
    }

    Jet truncated(int new_order) const {
        if (new_order > order_) throw jet_error("Jet::truncated: cannot extend order");
        std::vector<S> c(c_.begin(), c_.begin() + new_order + 1);
        return Jet(x_, new_order, scale_, std::move(c));
    }

private:
    void normalize() {
        double m = 0.0;
        for (const S& v : c_) m = std::max(m, detail::mag(v));
        if (m == 0.0) {
            scale_ = Scaled<S>::zero();
            return;
        }
        if (scale_.is_zero()) { // nonzero coeffs with zero scale: stay zero
            for (S& v : c_) v = S{0.0};
            return;
        }
        if (m >= 0.5 && m <= 2.0) return;
        double inv = 1.0 / m;
        for (S& v : c_) v *= inv;
        scale_.fold_log(std::log(m));
    }

    double x_ = 0.0;
    int order_ = 0;
    Scaled<S> scale_{};
    std::vector<S> c_;
};

using RJet = Jet<double>;
using CJet = Jet<cplx>;

namespace detail {
inline void check_points(double a, double b) {
    if (a != b)
        throw point_mismatch_error("jets anchored at different points: " +
                                   std::to_string(a) + " vs " + std::to_string(b));
}
} // namespace detail

template <class S>
Jet<S> jet_add(const Jet<S>& a, const Jet<S>& b) {
    detail::check_points(a.point(), b.point());
    int ord = std::min(a.order(), b.order());
    if (a.is_zero()) return b.truncated(ord);
    if (b.is_zero()) return a.truncated(ord);
    const bool a_dominates = a.scale().log_mag() >= b.scale().log_mag();
    const Jet<S>& big = a_dominates ? a : b;
    const Jet<S>& small = a_dominates ? b : a;
    S f = small.scale().ratio_to(big.scale());
    std::vector<S> c(ord + 1);
    for (int m = 0; m <= ord; ++m) c[m] = big.coeff(m) + f * small.coeff(m);
    return Jet<S>(a.point(), ord, big.scale(), std::move(c));
}

template <class S>
Jet<S> jet_scale(const Jet<S>& a, S s) {
    if (detail::mag(s) == 0.0 || a.is_zero()) return Jet<S>::zero(a.point(), a.order());
    std::vector<S> c(a.order() + 1);
    for (int m = 0; m <= a.order(); ++m) c[m] = a.coeff(m);
    return Jet<S>(a.point(), a.order(), a.scale().times(Scaled<S>::from_value(s)), std::move(c));
}

template <class S>
Jet<S> jet_sub(const Jet<S>& a, const Jet<S>& b) {
    return jet_add(a, jet_scale(b, S{-1.0}));
}

template <class S>
Jet<S> jet_mul(const Jet<S>& a, const Jet<S>& b) {
    detail::check_points(a.point(), b.point());
    int ord = std::min(a.order(), b.order());
    if (a.is_zero() || b.is_zero()) return Jet<S>::zero(a.point(), ord);
    std::vector<S> c(ord + 1, S{0.0});
    for (int m = 0; m <= ord; ++m) {
        S acc{0.0};
        for (int k = 0; k <= m; ++k) acc += a.coeff(k) * b.coeff(m - k);
        c[m] = acc;
    }
    return Jet<S>(a.point(), ord, a.scale().times(b.scale()), std::move(c));
}

template <class S>
Jet<S> jet_derivative(const Jet<S>& a) {
    if (a.order() < 1)
        throw order_exhausted_error("jet_derivative: order already 0");
    std::vector<S> c(a.order());
    for (int m = 0; m + 1 <= a.order(); ++m)
        c[m] = static_cast<double>(m + 1) * a.coeff(m + 1);
    return Jet<S>(a.point(), a.order() - 1, a.scale(), std::move(c));
}

// g with g' = a and g(x) = value_at_point. Order grows by one.
template <class S>
Jet<S> jet_antiderivative(const Jet<S>& a, S value_at_point) {
    std::vector<S> c(a.order() + 2, S{0.0});
    if (!a.is_zero()) {
        for (int m = 0; m <= a.order(); ++m)
            c[m + 1] = a.coeff(m) / static_cast<double>(m + 1);
    }
    Scaled<S> sc = a.is_zero() ? Scaled<S>{S{1.0}, 0.0, 0.0} : a.scale();
    c[0] = value_at_point / sc.value();
    return Jet<S>(a.point(), a.order() + 1, sc, std::move(c));
}

template <class S>
Jet<S> jet_reciprocal(const Jet<S>& a) {
    if (a.is_zero())
        throw zero_base_error("jet_reciprocal: reciprocal of the zero jet");
    if (detail::mag(a.coeff(0)) < 1e-12)
        throw zero_base_error("jet_reciprocal: leading coefficient vanishes (node)");
    std::vector<S> c(a.order() + 1);
    S inv0 = S{1.0} / a.coeff(0);
    c[0] = S{1.0};
    for (int m = 1; m <= a.order(); ++m) {
        S acc{0.0};
        for (int k = 1; k <= m; ++k) acc += a.coeff(k) * c[m - k];
        c[m] = -inv0 * acc;
    }
    // 1/(c0 * s) = (1/c0) * s^-1; fold 1/c0 into the scale
    Scaled<S> sc = a.scale().inverse().times(Scaled<S>::from_value(inv0));
    return Jet<S>(a.point(), a.order(), sc, std::move(c));
}

template <class S>
Jet<S> jet_div(const Jet<S>& a, const Jet<S>& b) {
    return jet_mul(a, jet_reciprocal(b));
}

// f'/f; the scale cancels, so the result is magnitude-free.
template <class S>
Jet<S> jet_log_derivative(const Jet<S>& a) {
    if (a.is_zero()) throw zero_base_error("jet_log_derivative: zero jet");
    return jet_div(jet_derivative(a), a.truncated(a.order() - 1));
}

template <class S>
Jet<S> promote_order(const Jet<S>& a, int order) {
    if (order <= a.order()) return a.truncated(order);
    std::vector<S> c(order + 1, S{0.0});
    for (int m = 0; m <= a.order(); ++m) c[m] = a.coeff(m);
    return Jet<S>(a.point(), order, a.scale(), std::move(c));
}

inline CJet jet_conj(const CJet& a) {
    std::vector<cplx> c(a.order() + 1);
    for (int m = 0; m <= a.order(); ++m) c[m] = std::conj(a.coeff(m));
    return CJet(a.point(), a.order(),
                {std::conj(a.scale().phase), a.scale().log_hi, a.scale().log_lo}, std::move(c));
}

inline CJet to_complex(const RJet& a) {
    std::vector<cplx> c(a.order() + 1);
    for (int m = 0; m <= a.order(); ++m) c[m] = a.coeff(m);
    return CJet(a.point(), a.order(),
                {cplx(a.scale().phase, 0.0), a.scale().log_hi, a.scale().log_lo}, std::move(c));
}

// ---------------------------------------------------------------------------
// Seeds

enum class SeedKind { cosh_k, sinh_k, tanh_k, coth_k, sech_k, csch_k, exp_ikx, gaussian_packet };

namespace detail {

// cosh/sinh of u = kappa*(x+tau), scaled by e^{-|u|}: both stay in [0, 1].
struct HyperbolicScaled {
    double cosh_s, sinh_s, log_mag;
};

inline HyperbolicScaled hyperbolic_scaled(double u) {
    double L = std::abs(u);
    double ep = std::exp(u - L);  // <= 1
    double em = std::exp(-u - L); // <= 1
    return {0.5 * (ep + em), 0.5 * (ep - em), L};
}

inline RJet cosh_sinh_jet(bool want_cosh, double kappa, double tau, double x, int order) {
    HyperbolicScaled h = hyperbolic_scaled(kappa * (x + tau));
    std::vector<double> c(order + 1);
    double pw = 1.0; // kappa^m / m!
    for (int m = 0; m <= order; ++m) {
        bool even = (m % 2) == 0;
        c[m] = pw * (even == want_cosh ? h.cosh_s : h.sinh_s);
        pw *= kappa / (m + 1);
    }
    return RJet(x, order, {1.0, h.log_mag, 0.0}, std::move(c));
}

constexpr double kPoleGuard = 1e-3; // in units of 1/kappa

} // namespace detail

inline RJet cosh_jet(double kappa, double tau, double x, int order) {
    return detail::cosh_sinh_jet(true, kappa, tau, x, order);
}

inline RJet sinh_jet(double kappa, double tau, double x, int order) {
    return detail::cosh_sinh_jet(false, kappa, tau, x, order);
}

inline void check_pole(double kappa, double tau, double x, const char* what) {
    if (std::abs(x + tau) < detail::kPoleGuard / std::abs(kappa))
        throw pole_proximity_error(std::string(what) + ": x too close to the pole at " +
                                   std::to_string(-tau));
}

inline RJet tanh_jet(double kappa, double tau, double x, int order) {
    return jet_div(sinh_jet(kappa, tau, x, order), cosh_jet(kappa, tau, x, order));
}

inline RJet coth_jet(double kappa, double tau, double x, int order) {
    check_pole(kappa, tau, x, "coth seed");
    return jet_div(cosh_jet(kappa, tau, x, order), sinh_jet(kappa, tau, x, order));
}

inline RJet sech_jet(double kappa, double tau, double x, int order) {
    return jet_reciprocal(cosh_jet(kappa, tau, x, order));
}

inline RJet csch_jet(double kappa, double tau, double x, int order) {
    check_pole(kappa, tau, x, "csch seed");
    return jet_reciprocal(sinh_jet(kappa, tau, x, order));
}

// e^{sigma (x + tau)} as a real jet; the whole magnitude sits in the scale.
inline RJet exp_jet(double sigma, double tau, double x, int order) {
    std::vector<double> c(order + 1);
    double pw = 1.0;
    for (int m = 0; m <= order; ++m) {
        c[m] = pw;
        pw *= sigma / (m + 1);
    }
    return RJet(x, order, {1.0, sigma * (x + tau), 0.0}, std::move(c));
}

inline CJet exp_ikx_jet(double k, double x, int order) {
    std::vector<cplx> c(order + 1);
    cplx ik(0.0, k);
    cplx pw{1.0};
    for (int m = 0; m <= order; ++m) {
        c[m] = pw;
        pw *= ik / static_cast<double>(m + 1);
    }
    return CJet(x, order, {std::polar(1.0, k * x), 0.0, 0.0}, std::move(c));
}

// exp(-(x-center)^2/(2 width^2) + i momentum x)
inline CJet gaussian_packet_jet(double center, double width, double momentum,
                                double x, int order) {
    double d = x - center;
    double w2 = width * width;
    // exponent g(x+e) = g0 + g1 e + g2 e^2
    double g0_re = -0.5 * d * d / w2;
    cplx g1(-d / w2, momentum);
    cplx g2(-0.5 / w2, 0.0);
    std::vector<cplx> g(order + 1, cplx{0.0});
    if (order >= 1) g[1] = g1;
    if (order >= 2) g[2] = g2;
    // series exp via b_m = (1/m) sum_k k g_k b_{m-k}
    std::vector<cplx> b(order + 1, cplx{0.0});
    b[0] = 1.0;
    for (int m = 1; m <= order; ++m) {
        cplx acc{0.0};
        for (int k = 1; k <= m; ++k) acc += static_cast<double>(k) * g[k] * b[m - k];
        b[m] = acc / static_cast<double>(m);
    }
    return CJet(x, order, {std::polar(1.0, momentum * x), g0_re, 0.0}, std::move(b));
}

inline RJet seed_jet(SeedKind kind, double kappa_or_k, double tau, double x, int order) {
    if (order < 0) throw jet_error("seed_jet: negative order");
    switch (kind) {
        case SeedKind::cosh_k: return cosh_jet(kappa_or_k, tau, x, order);
        case SeedKind::sinh_k: return sinh_jet(kappa_or_k, tau, x, order);
        case SeedKind::tanh_k: return tanh_jet(kappa_or_k, tau, x, order);
        case SeedKind::coth_k: return coth_jet(kappa_or_k, tau, x, order);
        case SeedKind::sech_k: return sech_jet(kappa_or_k, tau, x, order);
        case SeedKind::csch_k: return csch_jet(kappa_or_k, tau, x, order);
        default:
            throw jet_error("seed_jet: exp_ikx/gaussian_packet are complex; use the dedicated builders");
    }
}

} // namespace darboux
