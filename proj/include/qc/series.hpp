#pragma once

#include <vector>

#include "qc/padic.hpp"

namespace qc {

/**
 * Truncated power series over Q_p in one local parameter. Coefficients carry
 * their own precision; arithmetic truncates to the shorter operand. Used for
 * per-disk expansions, so the engine keeps one uniform truncation order.
 */
class PSeries {
  public:
    PSeries() : p_(0) {}
    PSeries(long p, std::vector<PadicNumber> coeffs) : p_(p), c_(std::move(coeffs)) {}
    static PSeries zeros(long p, long len, long aprec);
    static PSeries constant(const PadicNumber& c0, long len, long aprec);
    /// the identity series t (then zeros up to len)
    static PSeries identity(long p, long len, long aprec);

    long prime() const { return p_; }
    long len() const { return static_cast<long>(c_.size()); }
    const PadicNumber& operator[](long i) const { return c_[static_cast<size_t>(i)]; }
    PadicNumber& at(long i) { return c_[static_cast<size_t>(i)]; }
    const std::vector<PadicNumber>& coeffs() const { return c_; }

    bool is_zero_to_prec() const;
    /// index of first coefficient not zero-to-precision, or -1
    long first_nonzero() const;
    /// min over coefficients of valuation lower bound
    long min_coeff_valuation() const;

    PSeries truncated(long len) const;
    PSeries with_prec(long aprec) const;

    friend PSeries operator+(const PSeries& a, const PSeries& b);
    friend PSeries operator-(const PSeries& a, const PSeries& b);
    friend PSeries operator*(const PSeries& a, const PSeries& b);
    PSeries operator-() const;
    PSeries scaled(const PadicNumber& c) const;
    /// multiply by t^k (k >= 0), same truncation length
    PSeries shifted_up(long k) const;
    /// divide by t^k; the dropped coefficients must be zero to precision
    PSeries shifted_down(long k) const;

    PSeries derivative() const;
    /// termwise antiderivative with zero constant term; same length
    PSeries antiderivative() const;

    /// F(G) for G with G(0) of positive valuation
    PSeries compose(const PSeries& g) const;
    /// division; g[0] must be nonzero to precision (valuation loss is tracked)
    PSeries divided_by(const PSeries& g) const;
    PSeries inverse() const;
    /// square root with unit constant term, branch chosen by PadicNumber::sqrt
    PSeries sqrt_series() const;

    /// log(self/self[0]) via the log1p series; self[0] must be nonzero
    PSeries log_of_unit_part() const;
    /// exp of a series with zero constant term
    PSeries exp_series() const;

    /// Horner evaluation of the stored truncation at s (v(s) >= 0).
    PadicNumber eval(const PadicNumber& s) const;
    /// evaluate the formal derivative at s
    PadicNumber eval_derivative(const PadicNumber& s) const;

    std::string to_string(long max_terms = 8) const;

  private:
    long p_;
    std::vector<PadicNumber> c_;
};

/// Laurent series: t^shift * series.
struct Laurent {
    long shift = 0;
    PSeries ser;

    Laurent() = default;
    Laurent(long sh, PSeries s) : shift(sh), ser(std::move(s)) {}
    static Laurent from_series(const PSeries& s) { return Laurent(0, s); }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        return Laurent(a.shift + b.shift, a.ser * b.ser);
    }
    friend Laurent operator/(const Laurent& a, const Laurent& b);
    friend Laurent operator+(const Laurent& a, const Laurent& b);
    friend Laurent operator-(const Laurent& a, const Laurent& b);
    Laurent operator-() const { return Laurent(shift, -ser); }

    /// reduce to a power series; negative-exponent part must vanish to precision
    PSeries to_series(long len) const;
    /// normalize so that ser[0] is nonzero-to-precision (adjusts shift)
    Laurent normalized() const;
};

}  // namespace qc
