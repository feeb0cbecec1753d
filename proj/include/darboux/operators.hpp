#pragma once

// Differential operators as composition trees evaluated factor-by-factor on
// jets. Operators are never expanded into coefficient tables; identities are
// checked as action statements.

#include "darboux/jet.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace darboux {

struct op_error : std::runtime_error {
    explicit op_error(const std::string& what) : std::runtime_error(what) {}
};

// x-dependent coefficient: pure evaluator plus the poles it is allowed to
// have (used to filter evaluation grids; unexpected singularities surface as
// jet errors at apply time).
struct Coeff {
    std::function<CJet(double x, int order)> eval;
    std::string label;
    std::vector<double> poles;
};

inline Coeff conj_coeff(const Coeff& c) {
    return {[e = c.eval](double x, int ord) { return jet_conj(e(x, ord)); },
            c.label, c.poles};
}

inline Coeff constant_coeff(double v, std::string label = "const") {
    return {[v](double x, int ord) { return CJet::constant(cplx(v, 0.0), x, ord); },
            std::move(label), {}};
}

class Op {
public:
    enum class Kind { FirstOrder, Multiply, Derivative, Scalar, PolyH, Sum, Product };

    Op() : Op(scalar(cplx(0.0, 0.0))) {}

    static Op derivative() {
        Node n;
        n.kind = Kind::Derivative;
        n.order = 1;
        return Op(std::move(n));
    }

    // sign * d/dx + coeff
    static Op first_order(int sign, Coeff coeff) {
        Node n;
        n.kind = Kind::FirstOrder;
        n.dsign = sign;
        n.coeff = std::move(coeff);
        n.order = 1;
        return Op(std::move(n));
    }

    static Op multiply(Coeff coeff) {
        Node n;
        n.kind = Kind::Multiply;
        n.coeff = std::move(coeff);
        n.order = 0;
        return Op(std::move(n));
    }

    static Op scalar(cplx v) {
        Node n;
        n.kind = Kind::Scalar;
        n.scalar = v;
        n.order = 0;
        return Op(std::move(n));
    }

    static Op identity() { return scalar(cplx(1.0, 0.0)); }
    static Op zero() { return scalar(cplx(0.0, 0.0)); }

    // prod_i (H + shift_i) with H = -d^2/dx^2 + V, V given as a coefficient.
    static Op poly_h(Coeff potential, std::vector<double> shifts) {
        Node n;
        n.kind = Kind::PolyH;
        n.coeff = std::move(potential);
        n.shifts = std::move(shifts);
        n.order = 2 * static_cast<int>(n.shifts.size());
        return Op(std::move(n));
    }

    static Op sum(std::vector<Op> kids) {
        std::vector<Op> keep;
        for (Op& k : kids)
            if (!k.is_zero()) keep.push_back(std::move(k));
        if (keep.empty()) return zero();
        if (keep.size() == 1) return keep.front();
        Node n;
        n.kind = Kind::Sum;
        n.order = 0;
        for (const Op& k : keep) n.order = std::max(n.order, k.order());
        n.kids = std::move(keep);
        return Op(std::move(n));
    }

    static Op product(std::vector<Op> kids) {
        std::vector<Op> flat;
        for (Op& k : kids) {
            if (k.is_zero()) return zero();
            if (k.node().kind == Kind::Product) {
                for (const Op& kk : k.node().kids) flat.push_back(kk);
            } else {
                flat.push_back(std::move(k));
            }
        }
        if (flat.empty()) return identity();
        if (flat.size() == 1) return flat.front();
        Node n;
        n.kind = Kind::Product;
        n.order = 0;
        for (const Op& k : flat) n.order += k.order();
        n.kids = std::move(flat);
        return Op(std::move(n));
    }

    int order() const { return n_->order; }

    bool is_zero() const {
        return n_->kind == Kind::Scalar && n_->scalar == cplx(0.0, 0.0);
    }

    Op adjoint() const {
        const Node& n = *n_;
        switch (n.kind) {
            case Kind::Derivative:
                return product({scalar(cplx(-1.0, 0.0)), derivative()});
            case Kind::FirstOrder:
                return first_order(-n.dsign, conj_coeff(n.coeff));
            case Kind::Multiply:
                return multiply(conj_coeff(n.coeff));
            case Kind::Scalar:
                return scalar(std::conj(n.scalar));
            case Kind::PolyH:
                return *this;
            case Kind::Sum: {
                std::vector<Op> kids;
                for (const Op& k : n.kids) kids.push_back(k.adjoint());
                return sum(std::move(kids));
            }
            case Kind::Product: {
                std::vector<Op> kids;
                for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it)
                    kids.push_back(it->adjoint());
                return product(std::move(kids));
            }
        }
        throw op_error("Op::adjoint: unreachable");
    }

    std::vector<double> poles() const {
        std::vector<double> out;
        collect_poles(out);
        return out;
    }

    friend Op operator*(const Op& a, const Op& b) { return product({a, b}); }
    friend Op operator+(const Op& a, const Op& b) { return sum({a, b}); }
    friend Op operator-(const Op& a, const Op& b) {
        return sum({a, product({scalar(cplx(-1.0, 0.0)), b})});
    }
    friend Op operator*(cplx c, const Op& b) { return product({scalar(c), b}); }
    friend Op operator*(double c, const Op& b) { return product({scalar(cplx(c, 0.0)), b}); }

    struct Node {
        Kind kind = Kind::Scalar;
        int dsign = 0;
        Coeff coeff;
        cplx scalar{0.0, 0.0};
        std::vector<double> shifts;
        std::vector<Op> kids;
        int order = 0;
    };

    const Node& node() const { return *n_; }

private:
    explicit Op(Node n) : n_(std::make_shared<const Node>(std::move(n))) {}

    void collect_poles(std::vector<double>& out) const {
        const Node& n = *n_;
        for (double p : n.coeff.poles) out.push_back(p);
        for (const Op& k : n.kids) k.collect_poles(out);
    }

    std::shared_ptr<const Node> n_;
};

// ---------------------------------------------------------------------------
// Action on jets

using TestFn = std::function<CJet(double x, int order)>;

struct ApplyStats {
    double max_intermediate = 0.0; // largest |value| met along the evaluation
    double max_coeff = 0.0;        // largest coefficient magnitude (cancel ceiling)
    void feed(const CJet& j) {
        if (j.is_zero()) return;
        double lm = j.scale().log_mag() + std::log(detail::mag(j.coeff(0)) + 1e-300);
        if (lm < 700.0) max_intermediate = std::max(max_intermediate, std::exp(lm));
        else max_intermediate = std::numeric_limits<double>::infinity();
        double lc = j.scale().log_mag(); // max |coeff| is within [0.5, 2]
        if (lc < 700.0) max_coeff = std::max(max_coeff, 2.0 * std::exp(lc));
        else max_coeff = std::numeric_limits<double>::infinity();
    }
};

namespace detail {

inline CJet eval_op(const Op& op, CJet u, ApplyStats* stats) {
    using Kind = Op::Kind;
    const Op::Node& n = op.node();
    switch (n.kind) {
        case Kind::Derivative:
            return jet_derivative(u);
        case Kind::FirstOrder: {
            CJet c = n.coeff.eval(u.point(), u.order() - 1);
            CJet res = jet_add(jet_scale(jet_derivative(u), cplx(n.dsign, 0.0)),
                               jet_mul(c, u.truncated(u.order() - 1)));
            return res;
        }
        case Kind::Multiply: {
            CJet c = n.coeff.eval(u.point(), u.order());
            return jet_mul(c, u);
        }
        case Kind::Scalar:
            return jet_scale(u, n.scalar);
        case Kind::PolyH: {
            for (double lam : n.shifts) {
                CJet v = n.coeff.eval(u.point(), u.order() - 2);
                CJet hu = jet_add(jet_scale(jet_derivative(jet_derivative(u)), cplx(-1.0, 0.0)),
                                  jet_add(jet_mul(v, u.truncated(u.order() - 2)),
                                          jet_scale(u.truncated(u.order() - 2), cplx(lam, 0.0))));
                u = std::move(hu);
                if (stats) stats->feed(u);
            }
            return u;
        }
        case Kind::Sum: {
            int out_order = u.order() - op.order();
            CJet acc = CJet::zero(u.point(), out_order);
            for (const Op& k : n.kids) {
                CJet r = eval_op(k, u, stats);
                acc = jet_add(acc, r.truncated(out_order));
            }
            return acc;
        }
        case Kind::Product: {
            for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it) {
                u = eval_op(*it, std::move(u), stats);
                if (stats) stats->feed(u);
            }
            return u;
        }
    }
    throw op_error("eval_op: unreachable");
}

} // namespace detail

// Evaluate (T f)(x) as a jet of the requested output order.
inline CJet apply(const Op& op, const TestFn& f, double x, int out_order = 0,
                  ApplyStats* stats = nullptr) {
    CJet u = f(x, op.order() + out_order);
    if (stats) stats->feed(u);
    return detail::eval_op(op, std::move(u), stats);
}

// Coefficient functions a_m(x) of T = sum_m a_m(x) d^m/dx^m, read off by
// acting on monomials (y-x)^m: the action value is a_m(x) m!.
inline std::vector<cplx> symbol(const Op& op, double x) {
    std::vector<cplx> a(op.order() + 1);
    double factorial = 1.0;
    for (int m = 0; m <= op.order(); ++m) {
        if (m > 1) factorial *= m;
        TestFn f = [m](double xx, int ord) {
            return to_complex(RJet::monomial(m, xx, ord));
        };
        a[m] = apply(op, f, x).value() / factorial;
    }
    return a;
}

// Differential order actually realized by the action: the highest m whose
// coefficient function is non-negligible on the sample points. Points where
// a coefficient chain is singular are skipped.
inline int effective_order(const Op& op, const std::vector<double>& xs,
                           double rel_tol = 1e-8) {
    double top = 0.0;
    std::vector<double> mx(op.order() + 1, 0.0);
    int used = 0;
    for (double x : xs) {
        std::vector<cplx> a;
        try {
            a = symbol(op, x);
        } catch (const jet_error&) {
            continue;
        }
        ++used;
        for (int m = 0; m <= op.order(); ++m) {
            mx[m] = std::max(mx[m], std::abs(a[m]));
            top = std::max(top, std::abs(a[m]));
        }
    }
    if (used == 0) throw op_error("effective_order: all sample points singular");
    for (int m = op.order(); m >= 0; --m)
        if (mx[m] > rel_tol * top) return m;
    return 0;
}

} // namespace darboux
