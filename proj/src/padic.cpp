#include "qc/padic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qc {

BigInt p_power(long p, long k) {
    if (k < 0) throw DomainError("p_power: negative exponent");
    struct Cache {
        long p = 0;
        std::vector<BigInt> pows;
    };
    thread_local Cache cache;
    if (cache.p != p) {
        cache.p = p;
        cache.pows.assign(1, BigInt(1));
    }
    while (static_cast<long>(cache.pows.size()) <= k) cache.pows.push_back(cache.pows.back() * BigInt(p));
    return cache.pows[static_cast<size_t>(k)];
}

PadicNumber PadicNumber::zero(long p, long aprec) {
    PadicNumber r;
    r.p_ = p;
    r.aprec_ = aprec;
    r.zero_ = true;
    r.val_ = 0;
    r.unit_ = 0;
    return r;
}

PadicNumber PadicNumber::from_unit_val(const BigInt& unit, long val, long p, long aprec) {
    PadicNumber r;
    r.p_ = p;
    r.aprec_ = aprec;
    r.zero_ = false;
    r.val_ = val;
    r.unit_ = unit;
    r.canonicalize();
    return r;
}

PadicNumber PadicNumber::from_integer(const BigInt& v, long p, long aprec) {
    if (v.is_zero()) return zero(p, aprec);
    BigInt u(v);
    long val = u.remove_factor(BigInt(p));
    return from_unit_val(u, val, p, aprec);
}

PadicNumber PadicNumber::from_rational(const Rational& v, long p, long aprec) {
    if (v.is_zero()) return zero(p, aprec);
    BigInt nu = v.num();
    BigInt de = v.den();
    long val = nu.remove_factor(BigInt(p)) - de.remove_factor(BigInt(p));
    if (val >= aprec) return zero(p, aprec);
    BigInt m = p_power(p, aprec - val);
    BigInt u = nu.mod(m) * de.invmod(m);
    return from_unit_val(u, val, p, aprec);
}

void PadicNumber::canonicalize() {
    if (zero_) return;
    if (val_ >= aprec_) {
        zero_ = true;
        val_ = 0;
        unit_ = 0;
        return;
    }
    BigInt m = p_power(p_, aprec_ - val_);
    unit_ = unit_.mod(m);
    if (unit_.is_zero()) {
        zero_ = true;
        val_ = 0;
        return;
    }
    if (unit_.divisible_by(BigInt(p_))) {
        long extra = unit_.remove_factor(BigInt(p_));
        val_ += extra;
        if (val_ >= aprec_) {
            zero_ = true;
            val_ = 0;
            unit_ = 0;
            return;
        }
        unit_ = unit_.mod(p_power(p_, aprec_ - val_));
    }
}

long PadicNumber::unit_residue() const {
    if (zero_) throw DomainError("unit_residue of zero");
    return unit_.mod(BigInt(p_)).to_long();
}

BigInt PadicNumber::integer_rep() const {
    if (zero_) return BigInt(0);
    if (val_ < 0) throw DomainError("integer_rep: negative valuation");
    return (unit_ * p_power(p_, val_)).mod(p_power(p_, aprec_));
}

PadicNumber PadicNumber::with_prec(long aprec) const {
    if (zero_) return zero(p_, std::min(aprec_, aprec));
    PadicNumber r(*this);
    r.aprec_ = std::min(aprec_, aprec);
    r.canonicalize();
    return r;
}

PadicNumber PadicNumber::mul_ppower(long k) const {
    if (zero_) return zero(p_, aprec_ + k);
    PadicNumber r(*this);
    r.val_ += k;
    r.aprec_ += k;
    return r;
}

PadicNumber PadicNumber::operator-() const {
    if (zero_) return *this;
    return from_unit_val(p_power(p_, aprec_ - val_) - unit_, val_, p_, aprec_);
}

PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
    if (a.p_ != b.p_) throw DomainError("padic add: prime mismatch");
    long n = std::min(a.aprec_, b.aprec_);
    if (a.zero_) return b.with_prec(n);
    if (b.zero_) return a.with_prec(n);
    long v0 = std::min(a.val_, b.val_);
    if (v0 >= n) return PadicNumber::zero(a.p_, n);
    BigInt m = p_power(a.p_, n - v0);
    BigInt s = (a.unit_ * p_power(a.p_, a.val_ - v0) + b.unit_ * p_power(a.p_, b.val_ - v0)).mod(m);
    if (s.is_zero()) return PadicNumber::zero(a.p_, n);
    return PadicNumber::from_unit_val(s, v0, a.p_, n);
}

PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }

PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
    if (a.p_ != b.p_) throw DomainError("padic mul: prime mismatch");
    if (a.zero_ || b.zero_) {
        // product valuation is at least the sum of the lower bounds
        return PadicNumber::zero(a.p_, a.valuation() + b.valuation());
    }
    long k = std::min(a.rel_prec(), b.rel_prec());
    long val = a.val_ + b.val_;
    BigInt u = (a.unit_ * b.unit_).mod(p_power(a.p_, k));
    return PadicNumber::from_unit_val(u, val, a.p_, val + k);
}

PadicNumber PadicNumber::inverse() const {
    if (zero_) throw DomainError("padic inverse of zero-to-precision");
    long k = rel_prec();
    BigInt m = p_power(p_, k);
    return from_unit_val(unit_.invmod(m), -val_, p_, -val_ + k);
}

PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) {
    if (b.zero_) throw DomainError("padic division by zero-to-precision");
    if (a.zero_) return PadicNumber::zero(a.p_, a.aprec_ - b.val_);
    return a * b.inverse();
}

PadicNumber PadicNumber::pow_int(long e) const {
    if (p_ == 0) throw DomainError("pow of uninitialized");
    if (e == 0) return from_long(1, p_, aprec_);
    if (e < 0) return inverse().pow_int(-e);
    PadicNumber acc = *this;
    PadicNumber r = from_long(1, p_, zero_ ? aprec_ : rel_prec());
    long k = e;
    while (k > 0) {
        if (k & 1) r = r * acc;
        k >>= 1;
        if (k > 0) acc = acc * acc;
    }
    return r;
}

bool is_quadratic_residue(const BigInt& a, long p) {
    BigInt r = a.mod(BigInt(p));
    if (r.is_zero()) return true;
    return r.powmod(BigInt((p - 1) / 2), BigInt(p)).is_one();
}

PadicNumber PadicNumber::sqrt() const {
    if (zero_) {
        if (aprec_ % 2 != 0) throw PrecisionError("padic sqrt: zero at odd precision");
        return zero(p_, aprec_ / 2);
    }
    if (p_ == 2) {
        // unit square in Q_2 iff even valuation and unit = 1 mod 8
        if (val_ % 2 != 0) throw DomainError("2-adic sqrt: odd valuation");
        long k = rel_prec();
        if (k < 3 || unit_.mod(BigInt(8)) != BigInt(1))
            throw DomainError("2-adic sqrt: unit not 1 mod 8 (or precision < 3)");
        // iterate y <- (y + u/y)/2 on odd y: v(y^2 - u) grows by >= 1 per step
        BigInt m = p_power(2, k + 2);
        BigInt y(1);
        for (long it = 0; it < k + 4; ++it) {
            BigInt yin = y.invmod(m);
            BigInt next = ((y + unit_ * yin).mod(m));
            next = next.divexact(BigInt(2));
            if (next == y) break;
            y = next;
        }
        y = y.mod(p_power(2, k - 1));
        // canonical branch: residue 1 mod 4
        if (y.mod(BigInt(4)) != BigInt(1)) y = (p_power(2, k - 1) - y).mod(p_power(2, k - 1));
        return from_unit_val(y, val_ / 2, 2, val_ / 2 + k - 1);
    }
    if (val_ % 2 != 0) throw DomainError("padic sqrt: odd valuation, not a square");
    if (!is_quadratic_residue(unit_, p_)) throw DomainError("padic sqrt: unit is a non-residue");
    long k = rel_prec();
    BigInt P(p_);
    // root mod p by exponentiation (p odd), then Hensel to p^k
    BigInt r0 = unit_.powmod(BigInt((p_ + 1) / 4), P);
    if (!((r0 * r0 - unit_).mod(P)).is_zero()) {
        // p ≡ 1 mod 4: Tonelli-Shanks, p is small so search is fine too
        bool found = false;
        for (long t = 1; t < p_; ++t) {
            if (((BigInt(t) * BigInt(t) - unit_).mod(P)).is_zero()) {
                r0 = t;
                found = true;
                break;
            }
        }
        if (!found) throw DomainError("padic sqrt: no residue root");
    }
    // branch: smaller representative in {1,...,p-1}
    long rr = r0.mod(P).to_long();
    if (p_ - rr < rr) r0 = P - r0;
    // Hensel: x -> x - (x^2-u)/(2x) mod p^j, j doubling
    BigInt x = r0.mod(P);
    long j = 1;
    while (j < k) {
        j = std::min(2 * j, k);
        BigInt m = p_power(p_, j);
        BigInt inv2x = (BigInt(2) * x).invmod(m);
        x = (x - (x * x - unit_) * inv2x).mod(m);
    }
    return from_unit_val(x, val_ / 2, p_, val_ / 2 + k);
}

PadicNumber teichmuller(const PadicNumber& x) {
    if (x.is_zero() || x.valuation() != 0) throw DomainError("teichmuller: needs a unit");
    long p = x.prime();
    long k = x.rel_prec();
    // Newton for f(t) = t^(p-1) - 1 starting at the residue
    BigInt t = x.unit_part().mod(BigInt(p));
    long j = 1;
    while (j < k) {
        j = std::min(2 * j, k);
        BigInt m = p_power(p, j);
        BigInt tp = t.powmod(BigInt(p - 2), m);       // t^(p-2)
        BigInt f = (t.powmod(BigInt(p - 1), m) - 1).mod(m);
        BigInt df = (BigInt(p - 1) * tp).mod(m);
        t = (t - f * df.invmod(m)).mod(m);
    }
    return PadicNumber::from_unit_val(t, 0, p, k);
}

PadicNumber iwasawa_log(const PadicNumber& x) {
    if (x.is_zero()) throw DomainError("iwasawa_log of zero-to-precision");
    long p = x.prime();
    long n = x.abs_prec() - x.valuation();  // relative precision governs the unit part
    // strip p-power (log p = 0) and Teichmuller part
    PadicNumber u = PadicNumber::from_unit_val(x.unit_part(), 0, p, n);
    PadicNumber w = u / teichmuller(u) - PadicNumber::from_long(1, p, n);
    if (w.is_zero()) return PadicNumber::zero(p, n);
    // log(1+w) = sum (-1)^(m+1) w^m / m, v(w) >= 1
    long guard = 2;
    long M = n + 2;
    while (M - static_cast<long>(std::log((double)M) / std::log((double)p)) < n + 1) ++M;
    long nw = n + guard + static_cast<long>(std::log((double)M) / std::log((double)p)) + 1;
    PadicNumber wg = PadicNumber::from_unit_val(w.unit_part(), w.valuation(), p, w.valuation() + nw);
    PadicNumber term = wg;
    PadicNumber acc = PadicNumber::zero(p, nw);
    for (long m = 1; m <= M; ++m) {
        PadicNumber t = term / PadicNumber::from_long(m, p, nw);
        acc = (m % 2 == 1) ? acc + t : acc - t;
        if (m < M) term = term * wg;
        if (term.is_zero()) break;
    }
    return acc.with_prec(n);
}

PadicNumber iwasawa_log_of_integer(const BigInt& q, long p, long aprec) {
    if (q.is_zero()) throw DomainError("log of zero");
    return iwasawa_log(PadicNumber::from_integer(q, p, aprec + 2)).with_prec(aprec);
}

std::string PadicNumber::to_string() const {
    if (zero_) return "O(" + std::to_string(p_) + "^" + std::to_string(aprec_) + ")";
    return unit_.to_string() + "*" + std::to_string(p_) + "^" + std::to_string(val_) + " + O(" +
           std::to_string(p_) + "^" + std::to_string(aprec_) + ")";
}

}  // namespace qc
