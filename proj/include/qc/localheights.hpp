#pragma once

#include <map>

#include "qc/tate.hpp"

namespace qc {

/// Symbolic value sum_q r_q log q, realized p-adically only on demand.
class SymLog {
  public:
    SymLog() = default;
    static SymLog single(long q, const Rational& r);

    friend SymLog operator+(const SymLog& a, const SymLog& b);
    friend SymLog operator-(const SymLog& a, const SymLog& b);
    SymLog operator-() const;
    SymLog scaled(const Rational& c) const;
    bool operator==(const SymLog& o) const { return t_ == o.t_; }
    bool operator<(const SymLog& o) const;

    bool is_zero() const { return t_.empty(); }
    const std::map<long, Rational>& terms() const { return t_; }
    PadicNumber realize(long p, long prec) const;
    std::string to_string() const;

  private:
    void prune();
    std::map<long, Rational> t_;
};

/// lambda_q of a q-adic point given on the *minimal* model, in units of log q.
/// Handles nonsingular reduction by log max{1,|x|_q} and singular components by
/// the quasi-parallelogram bootstrap against identity-component points.
Rational lambda_q_minimal(const LocalData& ld, const ECPointP& Pmin);

/// Spec-shaped entry point: P given on the original model over Q_q.
SymLog local_height_away(const EllipticCurve& E, const ECPointP& P, long q);

/// W_q: the set of lambda_q values attained on integral points, units of log q.
std::vector<Rational> wq_set(const EllipticCurve& Emin, const LocalData& ld);

/// integral points of the q-adic curve reducing into the singular locus,
/// one Hensel-certified sample per x-branch (used by wq_set and tests)
std::vector<ECPointP> singular_branch_samples(const EllipticCurve& Emin, const LocalData& ld,
                                              long extra_depth = 4);

/// all y^2 = g(x) solubility over Z_q by residue refinement (g integral)
bool squares_represented(const ZPoly& g, long q);

}  // namespace qc
