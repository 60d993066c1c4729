#include "qc/series.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace qc {

PSeries PSeries::zeros(long p, long len, long aprec) {
    return PSeries(p, std::vector<PadicNumber>(static_cast<size_t>(len), PadicNumber::zero(p, aprec)));
}

PSeries PSeries::constant(const PadicNumber& c0, long len, long aprec) {
    PSeries r = zeros(c0.prime(), len, aprec);
    r.at(0) = c0;
    return r;
}

PSeries PSeries::identity(long p, long len, long aprec) {
    PSeries r = zeros(p, len, aprec);
    if (len > 1) r.at(1) = PadicNumber::from_long(1, p, aprec);
    return r;
}

bool PSeries::is_zero_to_prec() const { return first_nonzero() < 0; }

long PSeries::first_nonzero() const {
    for (long i = 0; i < len(); ++i)
        if (!c_[static_cast<size_t>(i)].is_zero()) return i;
    return -1;
}

long PSeries::min_coeff_valuation() const {
    long m = std::numeric_limits<long>::max();
    for (const auto& c : c_) m = std::min(m, c.valuation());
    return m;
}

PSeries PSeries::truncated(long length) const {
    std::vector<PadicNumber> v(c_.begin(), c_.begin() + std::min<long>(length, len()));
    while (static_cast<long>(v.size()) < length) v.push_back(PadicNumber::zero(p_, c_.empty() ? 1 : c_.back().abs_prec()));
    return PSeries(p_, std::move(v));
}

PSeries PSeries::with_prec(long aprec) const {
    PSeries r(*this);
    for (auto& c : r.c_) c = c.with_prec(aprec);
    return r;
}

PSeries operator+(const PSeries& a, const PSeries& b) {
    long n = std::min(a.len(), b.len());
    std::vector<PadicNumber> v;
    v.reserve(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) v.push_back(a[i] + b[i]);
    return PSeries(a.p_, std::move(v));
}

PSeries operator-(const PSeries& a, const PSeries& b) {
    long n = std::min(a.len(), b.len());
    std::vector<PadicNumber> v;
    v.reserve(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) v.push_back(a[i] - b[i]);
    return PSeries(a.p_, std::move(v));
}

PSeries PSeries::operator-() const {
    PSeries r(*this);
    for (auto& c : r.c_) c = -c;
    return r;
}

PSeries PSeries::scaled(const PadicNumber& c) const {
    PSeries r(*this);
    for (auto& x : r.c_) x = x * c;
    return r;
}

PSeries operator*(const PSeries& a, const PSeries& b) {
    long n = std::min(a.len(), b.len());
    PSeries r = PSeries::zeros(a.p_, n, 1);
    for (long k = 0; k < n; ++k) {
        PadicNumber acc = a[0] * b[k];
        for (long j = 1; j <= k; ++j) acc = acc + a[j] * b[k - j];
        r.at(k) = acc;
    }
    return r;
}

PSeries PSeries::shifted_up(long k) const {
    PSeries r = zeros(p_, len(), 1);
    for (long i = len() - 1; i >= k; --i) r.at(i) = c_[static_cast<size_t>(i - k)];
    for (long i = 0; i < std::min(k, len()); ++i)
        r.at(i) = PadicNumber::zero(p_, c_.empty() ? 1 : c_[0].abs_prec() + 0);
    return r;
}

PSeries PSeries::shifted_down(long k) const {
    for (long i = 0; i < std::min(k, len()); ++i)
        if (!c_[static_cast<size_t>(i)].is_zero())
            throw DomainError("shifted_down drops a nonzero coefficient");
    std::vector<PadicNumber> v(c_.begin() + std::min<long>(k, len()), c_.end());
    for (long i = 0; i < k; ++i) v.push_back(PadicNumber::zero(p_, v.empty() ? 1 : v.back().abs_prec()));
    return PSeries(p_, std::move(v));
}

PSeries PSeries::derivative() const {
    std::vector<PadicNumber> v;
    v.reserve(c_.size());
    for (long i = 1; i < len(); ++i)
        v.push_back(c_[static_cast<size_t>(i)] * PadicNumber::from_long(i, p_, c_[static_cast<size_t>(i)].abs_prec() + 4));
    v.push_back(PadicNumber::zero(p_, v.empty() ? 1 : v.back().abs_prec()));
    return PSeries(p_, std::move(v));
}

PSeries PSeries::antiderivative() const {
    std::vector<PadicNumber> v;
    v.reserve(c_.size());
    v.push_back(PadicNumber::zero(p_, c_.empty() ? 1 : c_[0].abs_prec()));
    for (long i = 0; i + 1 < len(); ++i)
        v.push_back(c_[static_cast<size_t>(i)] / PadicNumber::from_long(i + 1, p_, c_[static_cast<size_t>(i)].abs_prec() + 4));
    return PSeries(p_, std::move(v));
}

PSeries PSeries::compose(const PSeries& g) const {
    if (g.len() > 0 && !g[0].is_zero() && g[0].valuation() < 1)
        throw DomainError("compose: inner series needs positive valuation at 0");
    long n = std::min(len(), g.len());
    PSeries r = PSeries::constant(c_[static_cast<size_t>(len() - 1)], n, c_[0].abs_prec() + 8);
    for (long i = len() - 2; i >= 0; --i) {
        r = r * g;
        r.at(0) = r[0] + c_[static_cast<size_t>(i)];
    }
    return r;
}

PSeries PSeries::divided_by(const PSeries& g) const {
    if (g.len() == 0 || g[0].is_zero()) throw DomainError("series division: leading term zero to precision");
    long n = std::min(len(), g.len());
    PSeries q = PSeries::zeros(p_, n, 1);
    PadicNumber inv0 = g[0].inverse();
    for (long k = 0; k < n; ++k) {
        PadicNumber acc = c_[static_cast<size_t>(k)];
        for (long j = 0; j < k; ++j) acc = acc - q[j] * g[k - j];
        q.at(k) = acc * inv0;
    }
    return q;
}

PSeries PSeries::inverse() const {
    return PSeries::constant(PadicNumber::from_long(1, p_, c_[0].abs_prec() + 4), len(), c_[0].abs_prec() + 4)
        .divided_by(*this);
}

PSeries PSeries::sqrt_series() const {
    if (len() == 0 || c_[0].is_zero()) throw DomainError("series sqrt: constant term zero");
    PSeries r = zeros(p_, len(), 1);
    PadicNumber y0 = c_[0].sqrt();
    r.at(0) = y0;
    PadicNumber inv2y0 = (PadicNumber::from_long(2, p_, y0.abs_prec()) * y0).inverse();
    for (long k = 1; k < len(); ++k) {
        PadicNumber acc = c_[static_cast<size_t>(k)];
        for (long j = 1; j < k; ++j) acc = acc - r[j] * r[k - j];
        r.at(k) = acc * inv2y0;
    }
    return r;
}

PSeries PSeries::log_of_unit_part() const {
    if (len() == 0 || c_[0].is_zero()) throw DomainError("series log: constant term zero");
    PSeries w = scaled(c_[0].inverse());
    w.at(0) = w[0] - PadicNumber::from_long(1, p_, w[0].abs_prec());
    if (w.first_nonzero() < 0) return PSeries::zeros(p_, len(), c_[0].abs_prec());
    // log(1+w), w(0) = 0: Horner over powers of w
    long n = len();
    PSeries acc = PSeries::zeros(p_, n, c_[0].abs_prec() + 8);
    for (long m = n - 1; m >= 1; --m) {
        // acc = acc*w + (-1)^(m+1)/m
        acc = acc * w;
        PadicNumber term = PadicNumber::from_rational(Rational(m % 2 == 1 ? 1 : -1, BigInt(m)), p_,
                                                      c_[0].abs_prec() + 8);
        acc.at(0) = acc[0] + term;
    }
    return acc * w;
}

PSeries PSeries::exp_series() const {
    if (len() > 0 && !c_[0].is_zero()) throw DomainError("series exp: nonzero constant term");
    long n = len();
    PSeries e = PSeries::zeros(p_, n, 1);
    e.at(0) = PadicNumber::from_long(1, p_, c_.empty() ? 1 : c_[0].abs_prec() + 8);
    // k e_k = sum_{j=1..k} j a_j e_{k-j}
    for (long k = 1; k < n; ++k) {
        PadicNumber acc = PadicNumber::zero(p_, e[0].abs_prec());
        for (long j = 1; j <= k; ++j) {
            acc = acc + PadicNumber::from_long(j, p_, e[0].abs_prec()) * c_[static_cast<size_t>(j)] * e[k - j];
        }
        e.at(k) = acc / PadicNumber::from_long(k, p_, e[0].abs_prec());
    }
    return e;
}

PadicNumber PSeries::eval(const PadicNumber& s) const {
    if (len() == 0) throw DomainError("eval of empty series");
    PadicNumber r = c_[static_cast<size_t>(len() - 1)];
    for (long i = len() - 2; i >= 0; --i) r = r * s + c_[static_cast<size_t>(i)];
    return r;
}

PadicNumber PSeries::eval_derivative(const PadicNumber& s) const { return derivative().eval(s); }

std::string PSeries::to_string(long max_terms) const {
    std::ostringstream os;
    os << "[";
    for (long i = 0; i < std::min(max_terms, len()); ++i) {
        if (i) os << ", ";
        os << c_[static_cast<size_t>(i)].to_string();
    }
    if (len() > max_terms) os << ", ...";
    os << "]";
    return os.str();
}

Laurent operator/(const Laurent& a, const Laurent& b) {
    Laurent bn = b.normalized();
    return Laurent(a.shift - bn.shift, a.ser.divided_by(bn.ser));
}

Laurent operator+(const Laurent& a, const Laurent& b) {
    long sh = std::min(a.shift, b.shift);
    return Laurent(sh, a.ser.shifted_up(a.shift - sh) + b.ser.shifted_up(b.shift - sh));
}

Laurent operator-(const Laurent& a, const Laurent& b) { return a + (-b); }

PSeries Laurent::to_series(long length) const {
    if (shift >= 0) return ser.shifted_up(shift).truncated(length);
    return ser.shifted_down(-shift).truncated(length);
}

Laurent Laurent::normalized() const {
    long fn = ser.first_nonzero();
    if (fn < 0) throw DomainError("normalizing a zero Laurent series");
    if (fn == 0) return *this;
    return Laurent(shift + fn, ser.shifted_down(fn));
}

}  // namespace qc
