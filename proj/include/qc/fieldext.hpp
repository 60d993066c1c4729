#pragma once

#include "qc/qcrun.hpp"

namespace qc {

/// element a + b sqrt(-D) of Q(sqrt(-D)), D squarefree positive
struct KElem {
    Rational a, b;
    long D = 0;

    bool is_zero() const { return a.is_zero() && b.is_zero(); }
    KElem conj() const { return {a, -b, D}; }
    Rational norm() const { return a * a + b * b * Rational(D); }
    friend KElem operator+(const KElem& x, const KElem& y) { return {x.a + y.a, x.b + y.b, x.D}; }
    friend KElem operator-(const KElem& x, const KElem& y) { return {x.a - y.a, x.b - y.b, x.D}; }
    KElem operator-() const { return {-a, -b, D}; }
    friend KElem operator*(const KElem& x, const KElem& y) {
        return {x.a * y.a - x.b * y.b * Rational(y.D), x.a * y.b + x.b * y.a, x.D};
    }
    friend KElem operator/(const KElem& x, const KElem& y) {
        Rational n = y.norm();
        if (n.is_zero()) throw DomainError("KElem division by zero");
        KElem z = x * y.conj();
        return {z.a / n, z.b / n, x.D};
    }
    std::string to_string() const;
};

struct QuadImagField {
    long D;    // squarefree positive: the field Q(sqrt(-D))
    long d_K;  // field discriminant: -D if -D = 1 mod 4, else -4D

    explicit QuadImagField(long d);
    std::vector<long> ramified_primes() const;
};

/// splitting of an odd prime p not dividing d_K; ramified input throws
bool split_check(long p, const QuadImagField& F);

using KPoint = ECPointT<KElem>;

ECGroup<KElem> ec_group_k(const EllipticCurve& E, long D);
/// embedding into Q_p for split p: sqrt(-D) -> branch * (canonical p-adic root)
ECPointP embed_point(const KPoint& P, long p, long prec, int branch);

/// the valuation ladder of an element at the places over ell
struct PlaceValuation {
    enum class Kind { Split, Inert, Ramified } kind;
    long v1 = 0, v2 = 0;  // split: two places; else v1 only
};
PlaceValuation kelem_valuations(const KElem& x, long ell, long D);

/// canonical p-adic height of a K-point on the (Q-)minimal model, normalized
/// so rational points get twice their Q-height: h = sum over all places of K
PadicNumber k_height(const HeightContext& hc, const EllipticCurve& Emin, const KPoint& Pmin,
                     long D);

/// alpha over K: h / (2 Log(iota_1 P)^2)
PadicNumber alpha_constant_K(const HeightContext& hc, const EllipticCurve& Emin,
                             const KPoint& Pmin, long D);

/// search for a non-torsion K-point via E itself or the -D quadratic twist
std::optional<KPoint> search_k_point(const EllipticCurve& E, long D, long num_bound = 4000,
                                     long den_bound = 24);

/// eligible (D, p) pairs per the scan protocol: increasing p then D, rank-2
/// metadata over K, good ordinary split p, capped at `max_pairs`
std::vector<std::pair<long, long>> eligible_pairs(const BiellipticModel& X, long p_bound,
                                                  long max_pairs = 5);

/// exact sampled Omega_q value set at a ramified prime of K (log-q units)
std::optional<std::vector<Rational>> sampled_wq_values_K(const BiellipticModel& X,
                                                         const EllipticCurve& E1,
                                                         const EllipticCurve& E2, long q, long D);

/// full K-run: alphas from k_height, Omega with the disc(K) primes
RunRecord run_qc_over_K(const BiellipticModel& X, long D, long p, QCOptions opt = {},
                        std::optional<KPoint> gen1 = std::nullopt,
                        std::optional<KPoint> gen2 = std::nullopt);

}  // namespace qc
