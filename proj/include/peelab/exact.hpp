#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "peelab/errors.hpp"

namespace peelab {

using Bigint = mpz_class;
using Rat = mpq_class;

inline double to_double(const Rat& q) { return q.get_d(); }

/// Canonicalized rational (the two-argument mpq constructor does not reduce).
template <typename N, typename D>
inline Rat make_rat(const N& num, const D& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Bigint factorial(unsigned long n) {
    Bigint r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

/// Double factorial n!! with the empty-product convention (-1)!! = 1.
inline Bigint double_factorial(long n) {
    if (n <= 0) {
        if (n == 0 || n == -1) return 1;
        throw DomainError("double_factorial: argument below -1");
    }
    Bigint r;
    mpz_2fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

inline Bigint pow_int(const Bigint& base, unsigned long e) {
    Bigint r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rat pow_rat(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    Rat r;
    const unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), a);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), a);
    r.canonicalize();
    if (e < 0) {
        if (r == 0) throw DomainError("pow_rat: zero to negative power");
        r = 1 / r;
    }
    return r;
}

/// Element of the quadratic field Q[sqrt(3)], stored as a + b*sqrt(3) with
/// rational a, b in canonical reduced form. Degenerates to plain rationals
/// when b = 0, which is the case for the type II and quadrangulation tables.
struct ExactScalar {
    Rat a;
    Rat b;

    ExactScalar() : a(0), b(0) {}
    ExactScalar(const Rat& rational) : a(rational), b(0) {} // NOLINT(implicit)
    ExactScalar(long v) : a(v), b(0) {}                     // NOLINT(implicit)
    ExactScalar(const Rat& ra, const Rat& rb) : a(ra), b(rb) {}

    static ExactScalar sqrt3() { return ExactScalar(Rat(0), Rat(1)); }

    bool is_rational() const { return b == 0; }

    ExactScalar operator-() const { return ExactScalar(-a, -b); }

    ExactScalar& operator+=(const ExactScalar& o) {
        a += o.a;
        b += o.b;
        return *this;
    }
    ExactScalar& operator-=(const ExactScalar& o) {
        a -= o.a;
        b -= o.b;
        return *this;
    }
    ExactScalar& operator*=(const ExactScalar& o) {
        // (a + b s)(c + d s) = (ac + 3 b d) + (ad + bc) s, s^2 = 3
        const Rat na = a * o.a + 3 * b * o.b;
        const Rat nb = a * o.b + b * o.a;
        a = na;
        b = nb;
        return *this;
    }
    ExactScalar& operator/=(const ExactScalar& o) {
        const Rat norm = o.a * o.a - 3 * o.b * o.b;
        if (norm == 0) throw DomainError("ExactScalar: division by zero");
        const Rat na = (a * o.a - 3 * b * o.b) / norm;
        const Rat nb = (b * o.a - a * o.b) / norm;
        a = na;
        b = nb;
        return *this;
    }

    friend ExactScalar operator+(ExactScalar x, const ExactScalar& y) { return x += y; }
    friend ExactScalar operator-(ExactScalar x, const ExactScalar& y) { return x -= y; }
    friend ExactScalar operator*(ExactScalar x, const ExactScalar& y) { return x *= y; }
    friend ExactScalar operator/(ExactScalar x, const ExactScalar& y) { return x /= y; }
    friend bool operator==(const ExactScalar& x, const ExactScalar& y) {
        return x.a == y.a && x.b == y.b;
    }
    friend bool operator!=(const ExactScalar& x, const ExactScalar& y) { return !(x == y); }

    bool is_zero() const { return a == 0 && b == 0; }

    /// Sign of a + b*sqrt(3) decided exactly by comparing a^2 with 3 b^2.
    int sign() const {
        const int sa = sgn(a), sb = sgn(b);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // opposite signs: |a| vs sqrt(3)|b|
        const int cmp = cmp_abs(a, b);
        return cmp == 0 ? 0 : (cmp > 0 ? sa : sb);
    }
    bool is_positive() const { return sign() > 0; }

    double to_double() const {
        if (b == 0) return a.get_d();
        mpf_class fa(a, 128), fb(b, 128);
        mpf_class three(3, 128), root(0, 128);
        mpf_sqrt(root.get_mpf_t(), three.get_mpf_t());
        mpf_class r(fa + fb * root, 128);
        return r.get_d();
    }

    std::string str() const {
        if (b == 0) return a.get_str();
        std::string s = a == 0 ? "" : a.get_str() + " + ";
        return s + "(" + b.get_str() + ")*sqrt(3)";
    }

    friend std::ostream& operator<<(std::ostream& os, const ExactScalar& x) {
        return os << x.str();
    }

private:
    static int sgn(const Rat& q) { return mpq_sgn(q.get_mpq_t()); }
    static int cmp_abs(const Rat& a, const Rat& b) {
        Rat a2 = a * a, b2 = 3 * b * b;
        return cmp(a2, b2);
    }
};

/// Exact constant of the form coef * 2^e2 * 3^e3 * pi^epi with rational
/// exponents, plus sums thereof. Monomials in 2, 3, pi with rational
/// exponents are linearly independent over Q, so equality of canonical
/// forms is equality of values.
struct RadicalTerm {
    Rat coef;
    Rat e2;
    Rat e3;
    Rat epi;

    bool same_exponents(const RadicalTerm& o) const {
        return e2 == o.e2 && e3 == o.e3 && epi == o.epi;
    }
    RadicalTerm operator*(const RadicalTerm& o) const {
        return {coef * o.coef, e2 + o.e2, e3 + o.e3, epi + o.epi};
    }
    /// Brings e2 and e3 into [0,1) by folding their integer parts into the
    /// coefficient. Terms with integer exponent differences are rationally
    /// dependent, so this is what makes representations unique: fractional
    /// powers of 2 and 3 and rational powers of pi are multiplicatively
    /// independent over Q.
    void normalize() {
        if (coef == 0) return;
        auto fold = [this](Rat& e, long base) {
            Bigint q;
            mpz_fdiv_q(q.get_mpz_t(), e.get_num_mpz_t(), e.get_den_mpz_t());
            if (q == 0) return;
            if (!q.fits_slong_p()) throw DomainError("RadicalTerm: exponent too large");
            const long i = q.get_si();
            coef *= pow_rat(Rat(base), i);
            e -= Rat(i);
        };
        fold(e2, 2);
        fold(e3, 3);
    }
    double value() const {
        return coef.get_d() * std::pow(2.0, e2.get_d()) * std::pow(3.0, e3.get_d()) *
               std::pow(3.14159265358979323846, epi.get_d());
    }
};

inline bool operator==(const RadicalTerm& a, const RadicalTerm& b) {
    return a.coef == b.coef && a.same_exponents(b);
}

/// Factors powers of 2 and 3 out of a positive rational; true when the
/// value is exactly 2^e2 3^e3.
inline bool factor_out_23(const Rat& v, long& e2, long& e3) {
    e2 = e3 = 0;
    if (v <= 0) return false;
    Bigint num = v.get_num(), den = v.get_den();
    auto strip = [](Bigint& x, long b, long& e, int sgn) {
        while (x % b == 0) {
            x /= b;
            e += sgn;
        }
    };
    strip(num, 2, e2, +1);
    strip(num, 3, e3, +1);
    strip(den, 2, e2, -1);
    strip(den, 3, e3, -1);
    return num == 1 && den == 1;
}

class RadicalExpr {
public:
    RadicalExpr() = default;
    RadicalExpr(long v) { add_term({Rat(v), 0, 0, 0}); }      // NOLINT(implicit)
    RadicalExpr(const Rat& v) { add_term({v, 0, 0, 0}); }     // NOLINT(implicit)
    static RadicalExpr monomial(const Rat& coef, const Rat& e2, const Rat& e3,
                                const Rat& epi = Rat(0)) {
        RadicalExpr e;
        e.add_term({coef, e2, e3, epi});
        return e;
    }

    RadicalExpr operator+(const RadicalExpr& o) const {
        RadicalExpr r = *this;
        for (const auto& t : o.terms_) r.add_term(t);
        return r;
    }
    RadicalExpr operator-(const RadicalExpr& o) const {
        RadicalExpr neg;
        for (auto t : o.terms_) {
            t.coef = -t.coef;
            neg.terms_.push_back(t);
        }
        return *this + neg;
    }
    RadicalExpr operator*(const RadicalExpr& o) const {
        RadicalExpr r;
        for (const auto& x : terms_)
            for (const auto& y : o.terms_) r.add_term(x * y);
        return r;
    }
    /// Division is only defined by a single monomial.
    RadicalExpr operator/(const RadicalExpr& o) const {
        if (o.terms_.size() != 1) throw DomainError("RadicalExpr: division by a sum");
        const RadicalTerm& d = o.terms_[0];
        RadicalExpr r;
        for (const auto& x : terms_)
            r.add_term({x.coef / d.coef, x.e2 - d.e2, x.e3 - d.e3, x.epi - d.epi});
        return r;
    }

    bool operator==(const RadicalExpr& o) const {
        return canonical().terms_ == o.canonical().terms_;
    }
    bool operator!=(const RadicalExpr& o) const { return !(*this == o); }

    /// Rational power, defined for single monomials whose coefficient is a
    /// product of powers of 2 and 3.
    RadicalExpr pow(const Rat& e) const {
        if (terms_.size() != 1) throw DomainError("RadicalExpr::pow: not a monomial");
        const RadicalTerm& t = terms_[0];
        long f2 = 0, f3 = 0;
        if (!factor_out_23(t.coef, f2, f3))
            throw DomainError("RadicalExpr::pow: coefficient is not 2^x 3^y");
        return monomial(Rat(1), (t.e2 + f2) * e, (t.e3 + f3) * e, t.epi * e);
    }

    double value() const {
        double v = 0;
        for (const auto& t : terms_) v += t.value();
        return v;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            const auto& t = terms_[i];
            if (i) s += " + ";
            std::string part;
            auto app = [&](const char* b, const Rat& e) {
                if (e == 0) return;
                if (!part.empty()) part += "*";
                part += std::string(b) + "^(" + e.get_str() + ")";
            };
            app("2", t.e2);
            app("3", t.e3);
            app("pi", t.epi);
            if (part.empty())
                s += t.coef.get_str();
            else if (t.coef == 1)
                s += part;
            else
                s += t.coef.get_str() + "*" + part;
        }
        return s;
    }

private:
    void add_term(RadicalTerm t) {
        if (t.coef == 0) return;
        t.normalize();
        for (auto& u : terms_) {
            if (u.same_exponents(t)) {
                u.coef += t.coef;
                if (u.coef == 0)
                    terms_.erase(terms_.begin() + (&u - terms_.data()));
                return;
            }
        }
        terms_.push_back(t);
    }
    RadicalExpr canonical() const {
        RadicalExpr c = *this;
        std::sort(c.terms_.begin(), c.terms_.end(),
                  [](const RadicalTerm& x, const RadicalTerm& y) {
                      if (x.e2 != y.e2) return x.e2 < y.e2;
                      if (x.e3 != y.e3) return x.e3 < y.e3;
                      return x.epi < y.epi;
                  });
        return c;
    }
    std::vector<RadicalTerm> terms_;
};

} // namespace peelab
