#pragma once

#include <gmp.h>

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace qc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecisionError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct InputError : Error {
    using Error::Error;
};
struct UnsupportedError : Error {
    using Error::Error;
};

/// Arbitrary-precision signed integer, value semantics over GMP's mpz.
class BigInt {
  public:
    BigInt() { mpz_init(z_); }
    BigInt(long v) { mpz_init_set_si(z_, v); }
    BigInt(int v) : BigInt(static_cast<long>(v)) {}
    explicit BigInt(const std::string& s) {
        if (mpz_init_set_str(z_, s.c_str(), 10) != 0) {
            mpz_clear(z_);
            throw InputError("BigInt: bad integer literal '" + s + "'");
        }
    }
    BigInt(const BigInt& o) { mpz_init_set(z_, o.z_); }
    BigInt(BigInt&& o) noexcept {
        mpz_init(z_);
        mpz_swap(z_, o.z_);
    }
    BigInt& operator=(const BigInt& o) {
        if (this != &o) mpz_set(z_, o.z_);
        return *this;
    }
    BigInt& operator=(BigInt&& o) noexcept {
        mpz_swap(z_, o.z_);
        return *this;
    }
    ~BigInt() { mpz_clear(z_); }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        BigInt r;
        mpz_add(r.z_, a.z_, b.z_);
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) {
        BigInt r;
        mpz_sub(r.z_, a.z_, b.z_);
        return r;
    }
    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        BigInt r;
        mpz_mul(r.z_, a.z_, b.z_);
        return r;
    }
    BigInt operator-() const {
        BigInt r;
        mpz_neg(r.z_, z_);
        return r;
    }
    BigInt& operator+=(const BigInt& o) {
        mpz_add(z_, z_, o.z_);
        return *this;
    }
    BigInt& operator-=(const BigInt& o) {
        mpz_sub(z_, z_, o.z_);
        return *this;
    }
    BigInt& operator*=(const BigInt& o) {
        mpz_mul(z_, z_, o.z_);
        return *this;
    }

    /// Truncated division (C semantics).
    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        if (b.is_zero()) throw DomainError("BigInt: division by zero");
        BigInt r;
        mpz_tdiv_q(r.z_, a.z_, b.z_);
        return r;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        if (b.is_zero()) throw DomainError("BigInt: mod by zero");
        BigInt r;
        mpz_tdiv_r(r.z_, a.z_, b.z_);
        return r;
    }
    /// Floor division and nonnegative remainder.
    BigInt fdiv_q(const BigInt& b) const {
        BigInt r;
        mpz_fdiv_q(r.z_, z_, b.z_);
        return r;
    }
    BigInt mod(const BigInt& m) const {
        BigInt r;
        mpz_mod(r.z_, z_, m.z_);
        return r;
    }
    /// Exact division; throws if it does not divide.
    BigInt divexact(const BigInt& b) const {
        if (!divisible_by(b)) throw DomainError("BigInt: inexact division");
        BigInt r;
        mpz_divexact(r.z_, z_, b.z_);
        return r;
    }
    bool divisible_by(const BigInt& b) const {
        if (b.is_zero()) return is_zero();
        return mpz_divisible_p(z_, b.z_) != 0;
    }

    friend bool operator==(const BigInt& a, const BigInt& b) { return mpz_cmp(a.z_, b.z_) == 0; }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b) { return mpz_cmp(a.z_, b.z_) < 0; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return mpz_cmp(a.z_, b.z_) <= 0; }
    friend bool operator>(const BigInt& a, const BigInt& b) { return mpz_cmp(a.z_, b.z_) > 0; }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return mpz_cmp(a.z_, b.z_) >= 0; }

    int sign() const { return mpz_sgn(z_); }
    bool is_zero() const { return mpz_sgn(z_) == 0; }
    bool is_one() const { return mpz_cmp_si(z_, 1) == 0; }
    bool odd() const { return mpz_odd_p(z_) != 0; }

    BigInt abs() const {
        BigInt r;
        mpz_abs(r.z_, z_);
        return r;
    }
    BigInt pow(unsigned long e) const {
        BigInt r;
        mpz_pow_ui(r.z_, z_, e);
        return r;
    }
    static BigInt gcd(const BigInt& a, const BigInt& b) {
        BigInt r;
        mpz_gcd(r.z_, a.z_, b.z_);
        return r;
    }
    static BigInt lcm(const BigInt& a, const BigInt& b) {
        BigInt r;
        mpz_lcm(r.z_, a.z_, b.z_);
        return r;
    }
    /// Modular inverse mod m > 0; throws if not invertible.
    BigInt invmod(const BigInt& m) const {
        BigInt r;
        if (mpz_invert(r.z_, z_, m.z_) == 0) throw DomainError("BigInt: not invertible");
        return r;
    }
    BigInt powmod(const BigInt& e, const BigInt& m) const {
        BigInt r;
        mpz_powm(r.z_, z_, e.z_, m.z_);
        return r;
    }

    /// Divides out all factors of f, returns the multiplicity.
    long remove_factor(const BigInt& f) {
        if (is_zero()) throw DomainError("BigInt: valuation of zero");
        BigInt tmp;
        long n = static_cast<long>(mpz_remove(tmp.z_, z_, f.z_));
        mpz_swap(z_, tmp.z_);
        return n;
    }
    long valuation(const BigInt& f) const {
        BigInt c(*this);
        return c.remove_factor(f);
    }

    bool is_perfect_square() const { return sign() >= 0 && mpz_perfect_square_p(z_) != 0; }
    BigInt isqrt() const {
        if (sign() < 0) throw DomainError("BigInt: isqrt of negative");
        BigInt r;
        mpz_sqrt(r.z_, z_);
        return r;
    }
    bool probab_prime() const { return mpz_probab_prime_p(z_, 32) != 0; }

    bool fits_long() const { return mpz_fits_slong_p(z_) != 0; }
    long to_long() const {
        if (!fits_long()) throw DomainError("BigInt: does not fit in long");
        return mpz_get_si(z_);
    }
    double to_double() const { return mpz_get_d(z_); }
    std::string to_string() const {
        char* s = mpz_get_str(nullptr, 10, z_);
        std::string out(s);
        void (*freefn)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefn);
        freefn(s, out.size() + 1);
        return out;
    }
    size_t bit_length() const { return mpz_sizeinbase(z_, 2); }

    friend std::ostream& operator<<(std::ostream& os, const BigInt& v) { return os << v.to_string(); }

    mpz_srcptr raw() const { return z_; }
    mpz_ptr raw() { return z_; }

  private:
    mpz_t z_;
};

/// Reduced fraction with positive denominator.
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long v) : num_(v), den_(1) {}
    Rational(const BigInt& n) : num_(n), den_(1) {}
    Rational(const BigInt& n, const BigInt& d) : num_(n), den_(d) { normalize(); }
    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_integer() const { return den_.is_one(); }
    int sign() const { return num_.sign(); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw DomainError("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_, no_normalize{}); }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b < a || a == b; }

    Rational abs() const { return Rational(num_.abs(), den_, no_normalize{}); }
    Rational inverse() const { return Rational(1) / *this; }
    Rational pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        return Rational(num_.pow(static_cast<unsigned long>(e)), den_.pow(static_cast<unsigned long>(e)),
                        no_normalize{});
    }
    bool is_square() const {
        return num_.sign() >= 0 && num_.is_perfect_square() && den_.is_perfect_square();
    }
    Rational sqrt() const {
        if (!is_square()) throw DomainError("Rational: not a square");
        return Rational(num_.isqrt(), den_.isqrt(), no_normalize{});
    }

    /// q-adic valuation; additive, den contributes negatively.
    long valuation(const BigInt& q) const {
        if (is_zero()) throw DomainError("Rational: valuation of zero");
        long vn = num_.valuation(q);
        if (vn > 0) return vn;
        return -den_.valuation(q);
    }

    std::string to_string() const {
        if (den_.is_one()) return num_.to_string();
        return num_.to_string() + "/" + den_.to_string();
    }
    double to_double() const { return num_.to_double() / den_.to_double(); }
    friend std::ostream& operator<<(std::ostream& os, const Rational& v) { return os << v.to_string(); }

  private:
    struct no_normalize {};
    Rational(BigInt n, BigInt d, no_normalize) : num_(std::move(n)), den_(std::move(d)) {}
    void normalize() {
        if (den_.is_zero()) throw DomainError("Rational: zero denominator");
        if (den_.sign() < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        BigInt g = BigInt::gcd(num_.abs(), den_);
        if (!g.is_one() && !g.is_zero()) {
            num_ = num_.divexact(g);
            den_ = den_.divexact(g);
        }
        if (num_.is_zero()) den_ = 1;
    }
    BigInt num_, den_;
};

}  // namespace qc
