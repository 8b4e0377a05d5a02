#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace vspan {

/// Exact rational scalar backed by GMP. Always canonical: lowest terms,
/// positive denominator. No floating point is used anywhere in the engine.
class Scalar {
  public:
    Scalar() : v_(0) {}
    Scalar(long n) : v_(static_cast<signed long>(n)) {} // NOLINT: implicit by design
    Scalar(long num, long den) : v_(static_cast<signed long>(num), static_cast<signed long>(den)) {
        if (den == 0) throw std::invalid_argument("Scalar: zero denominator");
        v_.canonicalize();
    }
    explicit Scalar(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    /// Parses "p" or "p/q" (optional leading '-'). Throws on malformed input.
    static Scalar parse(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("Scalar::parse: empty string");
        std::size_t slash = s.find('/');
        auto check_int = [](const std::string& t) {
            if (t.empty()) throw std::invalid_argument("Scalar::parse: empty component");
            std::size_t i = (t[0] == '-') ? 1 : 0;
            if (i == t.size()) throw std::invalid_argument("Scalar::parse: bare sign");
            for (; i < t.size(); ++i)
                if (t[i] < '0' || t[i] > '9')
                    throw std::invalid_argument("Scalar::parse: not a rational: " + t);
        };
        if (slash == std::string::npos) {
            check_int(s);
            return Scalar(mpq_class(s));
        }
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        check_int(num);
        check_int(den);
        if (den == "0" || den == "-0") throw std::invalid_argument("Scalar::parse: zero denominator");
        return Scalar(mpq_class(num + "/" + den));
    }

    /// Serializes as "p" for integers, "p/q" otherwise (q > 0, lowest terms).
    std::string str() const { return v_.get_str(); }

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }
    bool is_integer() const { return v_.get_den() == 1; }

    /// Value as long; requires an integer that fits. Throws otherwise.
    long to_long() const {
        if (!is_integer() || !v_.get_num().fits_slong_p())
            throw std::invalid_argument("Scalar::to_long: not a small integer: " + str());
        return v_.get_num().get_si();
    }

    const mpq_class& raw() const { return v_; }

    Scalar operator-() const { return Scalar(mpq_class(-v_)); }
    Scalar& operator+=(const Scalar& o) { v_ += o.v_; return *this; }
    Scalar& operator-=(const Scalar& o) { v_ -= o.v_; return *this; }
    Scalar& operator*=(const Scalar& o) { v_ *= o.v_; return *this; }
    Scalar& operator/=(const Scalar& o) {
        if (o.is_zero()) throw std::invalid_argument("Scalar: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend bool operator==(const Scalar& a, const Scalar& b) { return cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return cmp(a.v_, b.v_) != 0; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return cmp(a.v_, b.v_) < 0; }

  private:
    mpq_class v_;
};

/// Generalized binomial coefficient C(n, k) for integer n (possibly
/// negative) and k >= 0: n(n-1)...(n-k+1) / k!. Always an integer.
inline Scalar binom(long n, unsigned long k) {
    mpz_class num = 1;
    for (unsigned long i = 0; i < k; ++i) num *= mpz_class(static_cast<signed long>(n) - static_cast<signed long>(i));
    mpz_class den = 1;
    for (unsigned long i = 2; i <= k; ++i) den *= mpz_class(static_cast<unsigned long>(i));
    mpq_class q(num, den);
    q.canonicalize();
    return Scalar(q);
}

} // namespace vspan
