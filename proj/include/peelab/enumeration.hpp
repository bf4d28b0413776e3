#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "peelab/errors.hpp"
#include "peelab/exact.hpp"
#include "peelab/models.hpp"

namespace peelab {

struct IdentityItem {
    std::string name;
    double target = 0;
    double value = 0;
    double residual = 0;
    bool pass = false;
};

struct IdentityReport {
    ModelId model;
    int p_max = 0;
    double tol = 0;
    std::vector<IdentityItem> items;
    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
};

/// Tail of sum_{p > P} p^{-s} by midpoint Euler-Maclaurin.
inline double tail_power_sum(double s, long P) {
    const double A = static_cast<double>(P) + 0.5;
    return std::pow(A, 1.0 - s) / (s - 1.0) + (s / 24.0) * std::pow(A, -s - 1.0);
}

/// Exact counting and partition-function tables for one model. Lazily
/// memoized; values are immutable once computed. All boundary sizes are
/// half-perimeters in the Quad case.
class WeightTable {
public:
    explicit WeightTable(ModelId model) : model_(model) {}

    ModelId model() const { return model_; }
    int p_min() const { return min_boundary(model_); }

    /// Number of maps with n inner vertices and boundary size p.
    Bigint count(long n, long p) const {
        check_np(n, p);
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, p);
        auto it = counts_.find(key);
        if (it != counts_.end()) return it->second;
        Bigint c = count_direct(n, p);
        counts_.emplace(key, c);
        return c;
    }

    /// Boltzmann partition function Z(p).
    ExactScalar z(long p) const {
        check_p(p);
        std::lock_guard<std::mutex> lock(mu_);
        return z_nolock(p);
    }

    /// Z'(p): Z with the trivial map removed at the smallest boundary of the
    /// triangular models, i.e. Z'(2) = Z(2) - 1 for TypeII, else Z(p).
    ExactScalar z_prime(long p) const {
        ExactScalar v = z(p);
        if (model_ == ModelId::TypeII && p == 2) v -= ExactScalar(1);
        return v;
    }

    /// C(p)/C(q). The model-wide irrational factor of C cancels, so the
    /// ratio is rational for every model.
    Rat c_ratio(long p, long q) const {
        check_p(p);
        check_p(q);
        std::lock_guard<std::mutex> lock(mu_);
        c_prefix_nolock(std::max(p, q)); // grow first; references stay valid below
        const Rat num = c_prefix_[static_cast<std::size_t>(p - p_min())];
        return num / c_prefix_[static_cast<std::size_t>(q - p_min())];
    }

    /// One-step ratio C(p+1)/C(p) as an exact rational.
    Rat c_step(long p) const {
        check_p(p);
        switch (model_) {
            case ModelId::TypeII: return make_rat(9 * (2 * p - 1), 2 * (p - 1));
            case ModelId::TypeI: return make_rat(6 * (2 * p + 1), p);
            case ModelId::Quad:
                return make_rat(Bigint(24) * (3 * p + 1) * (3 * p + 2),
                                Bigint(2) * p * (2 * p + 1));
        }
        throw DomainError("bad model");
    }

    /// One-step ratio Z(p+1)/Z(p) (exact; may lie in Q[sqrt 3] for TypeI
    /// only at the p = 1 step).
    ExactScalar z_step(long p) const {
        check_p(p);
        switch (model_) {
            case ModelId::TypeII:
                return ExactScalar(make_rat(Bigint(9) * (2 * p - 2) * (2 * p - 3),
                                            Bigint(4) * (p - 1) * (p + 1)));
            case ModelId::TypeI:
                if (p == 1) {
                    // (3 sqrt3 / 4) / ((2 - sqrt3)/4) = 9 + 6 sqrt3
                    return ExactScalar(Rat(9), Rat(6));
                }
                return ExactScalar(make_rat(6 * (2 * p - 3), p + 1));
            case ModelId::Quad:
                if (p == 1) return ExactScalar(Rat(4));
                return ExactScalar(make_rat(Bigint(8) * (3 * p - 1) * (3 * p - 2) * (3 * p - 3),
                                            Bigint(1) * (p - 1) * (2 * p + 1) * (2 * p + 2)));
        }
        throw DomainError("bad model");
    }

    /// h(p-k)/h(p) with h(x) = base^-x C(x) on x >= p_min and h = 0 below.
    ExactScalar h_ratio(long p, long k) const {
        check_p(p);
        const long q = p - k;
        if (q < p_min()) return ExactScalar(Rat(0));
        Rat base(kernel_base(model_));
        return ExactScalar(pow_rat(base, k) * c_ratio(q, p));
    }

    /// h(p+1)/h(p), the increasing step ratio of the harmonic function.
    Rat h_step(long p) const { return c_step(p) / kernel_base(model_); }

    /// Asymptotic constant of Z(p+1) base^-p ~ zt * p^{-5/2}.
    double z_tail_const() const {
        const double pi = 3.14159265358979323846;
        switch (model_) {
            case ModelId::TypeII: return 1.0 / (4.0 * std::sqrt(pi));
            case ModelId::TypeI: return std::sqrt(3.0) / (8.0 * std::sqrt(pi));
            case ModelId::Quad: return 1.0 / std::sqrt(3.0 * pi);
        }
        return 0;
    }

    /// log Z(p) through log-Gamma, the floating fallback for large p.
    double log_z(long p) const {
        check_p(p);
        switch (model_) {
            case ModelId::TypeII:
                return std::lgamma(2.0 * p - 3.0) - std::lgamma(p - 1.0) -
                       std::lgamma(p + 1.0) + (p - 1.0) * std::log(2.25);
            case ModelId::TypeI:
                if (p == 1) return std::log((2.0 - std::sqrt(3.0)) / 4.0);
                // (2p-5)!! = (2p-4)! / (2^{p-2} (p-2)!)
                return p * std::log(6.0) + std::lgamma(2.0 * p - 3.0) -
                       (p - 2.0) * std::log(2.0) - std::lgamma(p - 1.0) -
                       std::log(8.0 * std::sqrt(3.0)) - std::lgamma(p + 1.0);
            case ModelId::Quad:
                if (p == 1) return std::log(4.0 / 3.0);
                return p * std::log(8.0) + std::lgamma(3.0 * p - 3.0) -
                       std::lgamma(p - 1.0) - std::lgamma(2.0 * p + 1.0);
        }
        return 0;
    }

    /// log C(p) through log-Gamma, constant factors included.
    double log_c(long p) const {
        check_p(p);
        const double pi = 3.14159265358979323846;
        switch (model_) {
            case ModelId::TypeII:
                return std::log(4.0) - 3.5 * std::log(3.0) - 0.5 * std::log(pi) +
                       std::lgamma(2.0 * p - 2.0) - 2.0 * std::lgamma(p - 1.0) +
                       p * std::log(2.25);
            case ModelId::TypeI:
                return (p - 2.0) * std::log(3.0) + std::log(static_cast<double>(p)) +
                       std::lgamma(2.0 * p + 1.0) - std::log(4.0) - 0.5 * std::log(2.0 * pi) -
                       2.0 * std::lgamma(p + 1.0);
            case ModelId::Quad:
                return (p - 1.0) * std::log(8.0) + std::lgamma(3.0 * p + 1.0) - std::log(3.0) -
                       0.5 * std::log(pi) - std::lgamma(p + 1.0) - std::lgamma(2.0 * p);
        }
        return 0;
    }

    /// log of C(p)/C(q) through log-Gamma.
    double log_c_ratio(long p, long q) const { return log_c(p) - log_c(q); }

    /// Verifies the closed-form series identities of the Z-table against
    /// their limits, with an asymptotics-based tail estimate. Throws
    /// TailError if p_max cannot resolve tail_tol.
    IdentityReport identity_suite(int p_max, double tail_tol) const {
        if (tail_tol <= 0) throw DomainError("identity_suite: tol must be positive");
        if (p_max < 10) // too short to certify any tolerance
            throw TailError("sum_z", std::numeric_limits<double>::infinity());

        const double base = static_cast<double>(kernel_base(model_));
        const double zt = z_tail_const();

        // exact partial sums of Z(p+1) base^-p and p Z(p+1) base^-p,
        // starting from p = p_min - 1 (the closed-form limits include the
        // Z(1) term for the models where boundaries of size 1 exist)
        ExactScalar s0(Rat(0)), s1(Rat(0));
        const long p0 = p_min() - 1;
        ExactScalar zcur = z(p0 + 1);
        Rat bpow = pow_rat(Rat(kernel_base(model_)), -p0);
        double term_mid = 0, term_last = 0;
        const long p_mid = p_max / 2;
        for (long p = p0; p <= p_max; ++p) {
            ExactScalar term = zcur * ExactScalar(bpow);
            s0 += term;
            s1 += term * ExactScalar(Rat(p));
            if (p == p_mid) term_mid = term.to_double();
            if (p == p_max) term_last = term.to_double();
            zcur *= z_step(p + 1);
            bpow /= kernel_base(model_);
        }

        // Fit Z(p+1) base^-p = zt p^{-5/2} (1 + c1/p + c2/p^2) from two terms.
        const double P = static_cast<double>(p_max), Pm = static_cast<double>(p_mid);
        const double ratio = term_last * std::pow(P, 2.5) / zt;
        const double ratio_mid = term_mid * std::pow(Pm, 2.5) / zt;
        const double am = (ratio_mid - 1.0) * Pm, bl = (ratio - 1.0) * P;
        const double c2f = (am - bl) * P * Pm / (P - Pm);
        const double c1 = bl - c2f / P;

        const double kappa = 10.0;
        const double scale = 1.0 + std::abs(c1) + std::abs(c2f);
        const double unc0 = zt * kappa * scale * tail_power_sum(5.5, p_max);
        const double unc1 = zt * kappa * scale * tail_power_sum(4.5, p_max);
        if (unc0 > tail_tol) throw TailError("sum_z", unc0);
        if (unc1 > tail_tol) throw TailError("sum_kz", unc1);

        const double tail0 = zt * (tail_power_sum(2.5, p_max) + c1 * tail_power_sum(3.5, p_max) +
                                   c2f * tail_power_sum(4.5, p_max));
        const double tail1 = zt * (tail_power_sum(1.5, p_max) + c1 * tail_power_sum(2.5, p_max) +
                                   c2f * tail_power_sum(3.5, p_max));

        double t0 = 0, t1 = 0;
        switch (model_) {
            case ModelId::TypeII: t0 = 1.0 / 6.0; t1 = 1.0 / 3.0; break;
            case ModelId::TypeI:
                t0 = (3.0 - std::sqrt(3.0)) / 6.0;
                t1 = std::sqrt(3.0) / 6.0;
                break;
            case ModelId::Quad: t0 = 1.5; t1 = 0.5; break;
        }

        IdentityReport rep{model_, p_max, tail_tol, {}};
        auto add = [&](const std::string& name, double target, double value, double tol) {
            IdentityItem it;
            it.name = name;
            it.target = target;
            it.value = value;
            it.residual = value - target;
            it.pass = std::abs(it.residual) <= tol;
            rep.items.push_back(it);
        };
        add("sum_z", t0, s0.to_double() + tail0, tail_tol);
        add("sum_kz", t1, s1.to_double() + tail1, tail_tol);
        add("z_asymptotic_ratio", 1.0, ratio, 0.01);
        (void)base;
        return rep;
    }

private:
    void check_p(long p) const {
        if (p < p_min())
            throw DomainError(std::string("boundary size ") + std::to_string(p) +
                              " below minimum " + std::to_string(p_min()) + " for model " +
                              model_name(model_));
    }
    void check_np(long n, long p) const {
        check_p(p);
        if (n < 0) throw DomainError("negative size n");
        if (model_ == ModelId::TypeI && n == 0 && p == 1)
            throw DomainError("TypeI excludes (n,p) = (0,1): no loop encloses zero vertices");
    }

    Bigint count_direct(long n, long p) const {
        const auto un = static_cast<unsigned long>(n);
        const auto up = static_cast<unsigned long>(p);
        switch (model_) {
            case ModelId::TypeII: {
                // 2^{n+1} (2p-3)! (2p+3n-4)! / ((p-2)!^2 n! (2p+2n-2)!)
                Bigint num = pow_int(2, un + 1) * factorial(2 * up - 3) *
                             factorial(2 * up + 3 * un - 4);
                Bigint den = factorial(up - 2) * factorial(up - 2) * factorial(un) *
                             factorial(2 * up + 2 * un - 2);
                return exact_div(num, den);
            }
            case ModelId::TypeI: {
                // 4^{n-1} p (2p)! (2p+3n-5)!! / ((p!)^2 n! (2p+n-1)!!)
                Rat v = Rat(Bigint(p) * factorial(2 * up) * double_factorial(2 * p + 3 * n - 5));
                v /= Rat(factorial(up) * factorial(up) * factorial(un) *
                         double_factorial(2 * p + n - 1));
                v *= pow_rat(Rat(4), n - 1);
                return rat_to_int(v);
            }
            case ModelId::Quad: {
                // 3^{n-1} (3p)! (3p-3+2n)! / (n! p! (2p-1)! (n+3p-1)!)
                Rat v = Rat(factorial(3 * up) * factorial(3 * up - 3 + 2 * un));
                v /= Rat(factorial(un) * factorial(up) * factorial(2 * up - 1) *
                         factorial(un + 3 * up - 1));
                v *= pow_rat(Rat(3), n - 1);
                return rat_to_int(v);
            }
        }
        throw DomainError("bad model");
    }

    static Bigint exact_div(const Bigint& num, const Bigint& den) {
        Bigint q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        if (r != 0) throw IntegrityError("count formula did not produce an integer");
        return q;
    }
    static Bigint rat_to_int(const Rat& v) {
        Rat c = v;
        c.canonicalize();
        if (c.get_den() != 1) throw IntegrityError("count formula did not produce an integer");
        return c.get_num();
    }

    ExactScalar z_nolock(long p) const {
        const std::size_t idx = static_cast<std::size_t>(p - p_min());
        if (idx < z_memo_.size() && z_memo_[idx]) return *z_memo_[idx];
        ExactScalar v = z_direct(p);
        if (z_memo_.size() <= idx) z_memo_.resize(idx + 1);
        z_memo_[idx] = v;
        return v;
    }

    ExactScalar z_direct(long p) const {
        const auto up = static_cast<unsigned long>(p);
        switch (model_) {
            case ModelId::TypeII: {
                Rat v(factorial(2 * up - 4), factorial(up - 2) * factorial(up));
                v *= pow_rat(Rat(9, 4), p - 1);
                v.canonicalize();
                return ExactScalar(v);
            }
            case ModelId::TypeI: {
                if (p == 1) return ExactScalar(Rat(1, 2), Rat(-1, 4)); // (2 - sqrt3)/4
                // 6^p (2p-5)!! / (8 sqrt3 p!) = [6^p (2p-5)!! / (24 p!)] sqrt3
                Rat b(pow_int(6, up) * double_factorial(2 * p - 5), Bigint(24) * factorial(up));
                b.canonicalize();
                return ExactScalar(Rat(0), b);
            }
            case ModelId::Quad: {
                if (p == 1) return ExactScalar(Rat(4, 3));
                Rat v(pow_int(8, up) * factorial(3 * up - 4),
                      factorial(up - 2) * factorial(2 * up));
                v.canonicalize();
                return ExactScalar(v);
            }
        }
        throw DomainError("bad model");
    }

    /// Prefix product over c_step from p_min: prefix(p) = C(p)/C(p_min).
    const Rat& c_prefix_nolock(long p) const {
        const std::size_t idx = static_cast<std::size_t>(p - p_min());
        while (c_prefix_.size() <= idx) {
            if (c_prefix_.empty())
                c_prefix_.emplace_back(1);
            else {
                long q = p_min() + static_cast<long>(c_prefix_.size()) - 1;
                c_prefix_.push_back(c_prefix_.back() * c_step(q));
            }
        }
        return c_prefix_[idx];
    }

    ModelId model_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<long, long>, Bigint> counts_;
    mutable std::vector<std::optional<ExactScalar>> z_memo_;
    mutable std::vector<Rat> c_prefix_;
};

/// Shared per-model tables (build-once, read-many).
inline const WeightTable& weight_table(ModelId m) {
    static WeightTable t2(ModelId::TypeII);
    static WeightTable t1(ModelId::TypeI);
    static WeightTable qd(ModelId::Quad);
    switch (m) {
        case ModelId::TypeII: return t2;
        case ModelId::TypeI: return t1;
        case ModelId::Quad: return qd;
    }
    return t2;
}

inline Bigint count_maps(ModelId m, long n, long p) { return weight_table(m).count(n, p); }
inline ExactScalar partition_z(ModelId m, long p) { return weight_table(m).z(p); }
inline ExactScalar c_ratio(ModelId m, long p, long q) {
    return ExactScalar(weight_table(m).c_ratio(p, q));
}
inline ExactScalar h_ratio(ModelId m, long p, long k) { return weight_table(m).h_ratio(p, k); }
inline IdentityReport identity_suite(ModelId m, int p_max, double tail_tol) {
    return weight_table(m).identity_suite(p_max, tail_tol);
}

} // namespace peelab
