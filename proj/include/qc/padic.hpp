#pragma once

#include <string>

#include "qc/bigint.hpp"

namespace qc {

/// p^k as a BigInt (k >= 0).
BigInt p_power(long p, long k);

/**
 * Element of Q_p with tracked absolute precision: value = unit * p^val known
 * modulo p^aprec. The unit part is kept canonical in [1, p^(aprec-val)) and
 * coprime to p. A value indistinguishable from zero is stored as an explicit
 * zero-to-precision.
 *
 * Arithmetic never reports more precision than the inputs justify: absolute
 * precision rules for add/sub, relative for mul/div, Hensel lifting for sqrt.
 */
class PadicNumber {
  public:
    PadicNumber() : p_(0), aprec_(0), zero_(true), val_(0) {}

    static PadicNumber zero(long p, long aprec);
    static PadicNumber from_integer(const BigInt& v, long p, long aprec);
    static PadicNumber from_long(long v, long p, long aprec) { return from_integer(BigInt(v), p, aprec); }
    static PadicNumber from_rational(const Rational& v, long p, long aprec);
    /// unit must be coprime to p (it is canonicalized mod p^(aprec-val)).
    static PadicNumber from_unit_val(const BigInt& unit, long val, long p, long aprec);

    long prime() const { return p_; }
    long abs_prec() const { return aprec_; }
    bool is_zero() const { return zero_; }
    /// Valuation; for a zero-to-precision value this is a lower bound (= aprec).
    long valuation() const { return zero_ ? aprec_ : val_; }
    long rel_prec() const { return zero_ ? 0 : aprec_ - val_; }
    const BigInt& unit_part() const { return unit_; }
    /// Residue of the unit part mod p (value in [1, p)); requires nonzero.
    long unit_residue() const;
    bool is_unit() const { return !zero_ && val_ == 0; }

    /// Canonical integer representative of value/p^min(val,0) — for val >= 0 this is
    /// the value mod p^aprec in [0, p^aprec).
    BigInt integer_rep() const;

    PadicNumber operator-() const;
    friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b);
    PadicNumber& operator+=(const PadicNumber& o) { return *this = *this + o; }
    PadicNumber& operator-=(const PadicNumber& o) { return *this = *this - o; }
    PadicNumber& operator*=(const PadicNumber& o) { return *this = *this * o; }
    PadicNumber& operator/=(const PadicNumber& o) { return *this = *this / o; }

    PadicNumber inverse() const;
    PadicNumber pow_int(long e) const;
    /// Square root with the deterministic branch: the root whose residue mod p is
    /// the smaller representative in {1,...,p-1}. Throws DomainError on non-squares.
    PadicNumber sqrt() const;

    PadicNumber with_prec(long aprec) const;  // lower (or keep) absolute precision
    PadicNumber mul_ppower(long k) const;     // value * p^k

    /// Canonical rendering `v*p^k + O(p^n)`, zero renders as `O(p^n)`.
    std::string to_string() const;

    friend std::ostream& operator<<(std::ostream& os, const PadicNumber& v) {
        return os << v.to_string();
    }

  private:
    void canonicalize();
    long p_;
    long aprec_;
    bool zero_;
    long val_;
    BigInt unit_;
};

/// Iwasawa branch of the p-adic logarithm: log(p) = 0, log(teichmuller) = 0.
PadicNumber iwasawa_log(const PadicNumber& x);

/// Teichmuller representative of the residue of x (x a unit).
PadicNumber teichmuller(const PadicNumber& x);

/// log of q in Q_p under the Iwasawa branch (q any nonzero integer).
PadicNumber iwasawa_log_of_integer(const BigInt& q, long p, long aprec);

bool is_quadratic_residue(const BigInt& a, long p);

}  // namespace qc
