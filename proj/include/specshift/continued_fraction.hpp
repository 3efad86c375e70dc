#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "specshift/errors.hpp"

namespace specshift {

/// An element a + b*theta of the module Q + Q*theta.  For an irrational
/// theta the representation is unique, so equality of coefficients decides
/// equality of values; only sign questions need an enclosure of theta.
struct ThetaLinear {
    mpq_class constant;  // a
    mpq_class slope;     // b

    ThetaLinear() : constant(0), slope(0) {}
    ThetaLinear(mpq_class a, mpq_class b) : constant(std::move(a)), slope(std::move(b)) {}

    ThetaLinear operator+(const ThetaLinear& o) const { return {constant + o.constant, slope + o.slope}; }
    ThetaLinear operator-(const ThetaLinear& o) const { return {constant - o.constant, slope - o.slope}; }
    ThetaLinear operator-() const { return {-constant, -slope}; }
    ThetaLinear scaled(const mpq_class& c) const { return {constant * c, slope * c}; }
    bool operator==(const ThetaLinear& o) const { return constant == o.constant && slope == o.slope; }
    bool operator!=(const ThetaLinear& o) const { return !(*this == o); }
    bool is_zero() const { return constant == 0 && slope == 0; }
};

/// theta in (0,1) given by its positive partial quotients a_1, a_2, ...
/// (a_0 = 0).  Convergents are kept as exact integers; theta itself is only
/// ever used through the certified bracket spanned by the deepest
/// convergent and its mediant with the previous one, which contains every
/// irrational whose expansion starts with the stored quotients.
class ContinuedFraction {
public:
    explicit ContinuedFraction(std::vector<mpz_class> quotients)
        : a_(std::move(quotients)) {
        if (a_.empty()) throw validation_error("continued fraction: need at least one partial quotient");
        for (const auto& q : a_)
            if (q < 1) throw validation_error("continued fraction: partial quotients must be positive");
        p_.resize(a_.size() + 3);
        q_.resize(a_.size() + 3);
        // index shift: p_[k+2] holds p_k, starting from p_{-2}=0, p_{-1}=1.
        p_[0] = 0; p_[1] = 1;
        q_[0] = 1; q_[1] = 0;
        p_[2] = 0; q_[2] = 1;  // a_0 = 0
        for (std::size_t k = 1; k <= a_.size(); ++k) {
            p_[k + 2] = a_[k - 1] * p_[k + 1] + p_[k];
            q_[k + 2] = a_[k - 1] * q_[k + 1] + q_[k];
            mpz_class det = q_[k + 2] * p_[k + 1] - p_[k + 2] * q_[k + 1];
            if (det != ((k % 2 == 0) ? 1 : -1))
                throw consistency_error("continued fraction: convergent determinant identity failed");
        }
        const mpq_class deep(p(order()), q(order()));
        const mpq_class mediant(p(order()) + p(order() - 1), q(order() + 0) + q(order() - 1));
        lo_ = std::min(deep, mediant);
        hi_ = std::max(deep, mediant);
        lo_.canonicalize();
        hi_.canonicalize();
    }

    static ContinuedFraction from_ints(const std::vector<long>& quotients) {
        std::vector<mpz_class> a(quotients.begin(), quotients.end());
        return ContinuedFraction(std::move(a));
    }

    /// Quotients a_1 = 1, a_{n+1} = n (q_n + q_{n-1})^2; the induced
    /// convergents grow doubly exponentially and leave machine words within
    /// five steps.
    static ContinuedFraction unbounded_quotients(int n_max) {
        if (n_max < 1) throw validation_error("unbounded_quotients: n_max must be >= 1");
        std::vector<mpz_class> a;
        mpz_class q_prev = 1, q_cur = 1;  // q_0, q_1 with a_1 = 1
        a.emplace_back(1);
        // provide quotients through a_{n_max+3} so ratios at depth n_max stay certified
        for (int n = 1; n + 1 <= n_max + 3; ++n) {
            mpz_class s = q_cur + q_prev;
            mpz_class next = n * s * s;
            a.push_back(next);
            mpz_class q_next = next * q_cur + q_prev;
            q_prev = q_cur;
            q_cur = q_next;
        }
        return ContinuedFraction(std::move(a));
    }

    int order() const { return static_cast<int>(a_.size()); }
    const mpz_class& quotient(int k) const {  // a_k, 1-based
        if (k < 1 || k > order()) throw validation_error("continued fraction: quotient index out of range");
        return a_[static_cast<std::size_t>(k) - 1];
    }
    const mpz_class& p(int k) const { return p_.at(static_cast<std::size_t>(k) + 2); }  // k >= -2
    const mpz_class& q(int k) const { return q_.at(static_cast<std::size_t>(k) + 2); }

    mpq_class theta_lower() const { return lo_; }
    mpq_class theta_upper() const { return hi_; }

    mpq_class lower(const ThetaLinear& x) const {
        return x.constant + x.slope * (x.slope >= 0 ? lo_ : hi_);
    }
    mpq_class upper(const ThetaLinear& x) const {
        return x.constant + x.slope * (x.slope >= 0 ? hi_ : lo_);
    }
    mpq_class enclosure_width(const ThetaLinear& x) const { return upper(x) - lower(x); }

    double to_double(const ThetaLinear& x) const {
        return (mpq_class((lower(x) + upper(x)) / 2)).get_d();
    }

    /// Sign of a + b*theta; exact when b = 0, otherwise from the bracket.
    int sign(const ThetaLinear& x) const {
        if (x.slope == 0) return sgn(x.constant);
        const mpq_class lo = lower(x), hi = upper(x);
        if (lo > 0) return 1;
        if (hi < 0) return -1;
        throw precision_error("continued fraction: bracket too wide to decide a sign; supply more partial quotients");
    }

    bool less(const ThetaLinear& x, const ThetaLinear& y) const {
        if (x == y) return false;
        return sign(y - x) > 0;
    }

    /// Exact floor of a + b*theta; fails if the bracket straddles an integer.
    mpz_class floor_value(const ThetaLinear& x) const {
        mpz_class flo = floor_q(lower(x));
        mpz_class fhi = floor_q(upper(x));
        if (flo != fhi)
            throw precision_error("continued fraction: bracket too wide to determine an integer part");
        return flo;
    }

    /// lambda_0 .. lambda_n as exact elements of Z + Z*theta, via
    /// lambda_{k+1} = lambda_{k-1} - a_k lambda_k.  Requires n+1 quotients
    /// so positivity and monotonicity are certified by the bracket.
    std::vector<ThetaLinear> lambda(int n) const {
        if (n < 0) throw validation_error("lambda: negative index");
        if (order() < n + 1)
            throw precision_error("lambda: need at least n+1 partial quotients to certify lambda_n");
        std::vector<ThetaLinear> lam;
        lam.reserve(static_cast<std::size_t>(n) + 1);
        lam.emplace_back(mpq_class(1), mpq_class(0));           // lambda_0 = 1
        if (n >= 1) lam.emplace_back(mpq_class(0), mpq_class(1));  // lambda_1 = theta
        for (int k = 1; k + 1 <= n; ++k) {
            ThetaLinear next = lam[static_cast<std::size_t>(k) - 1] -
                               lam[static_cast<std::size_t>(k)].scaled(mpq_class(a_[static_cast<std::size_t>(k) - 1]));
            lam.push_back(next);
        }
        for (int k = 0; k <= n; ++k) {
            if (sign(lam[static_cast<std::size_t>(k)]) <= 0)
                throw consistency_error("lambda: a remainder length is not positive");
            if (k >= 1 && sign(lam[static_cast<std::size_t>(k) - 1] - lam[static_cast<std::size_t>(k)]) <= 0)
                throw consistency_error("lambda: remainder lengths are not strictly decreasing");
        }
        return lam;
    }

    /// lambda values as certified doubles; fails when an enclosure is wider
    /// than `tol`.
    std::vector<double> lambda_doubles(int n, double tol) const {
        auto lam = lambda(n);
        std::vector<double> out(lam.size());
        for (std::size_t k = 0; k < lam.size(); ++k) {
            if (enclosure_width(lam[k]).get_d() > tol)
                throw precision_error("lambda: enclosure wider than the requested tolerance; supply more partial quotients");
            out[k] = to_double(lam[k]);
        }
        return out;
    }

private:
    static int sgn(const mpq_class& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }
    static mpz_class floor_q(const mpq_class& v) {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
        return r;
    }

    std::vector<mpz_class> a_;
    std::vector<mpz_class> p_, q_;
    mpq_class lo_, hi_;
};

} // namespace specshift
