#pragma once

#include "qc/qcrun.hpp"

namespace qc {

/// rational reconstruction with numerator/denominator bound floor(sqrt(p^n/2))
std::optional<Rational> lift_rational(const PadicNumber& z);

/// minimal-degree integer relation for z (degree <= maxdeg <= 4) by exact
/// lattice reduction; content-free, coefficient norm bounded by p^(n/3)
std::optional<ZPoly> algdep(const PadicNumber& z, int maxdeg);

/// exact a + b sqrt(d) with d squarefree (d != 0, 1)
struct QuadElem {
    Rational a, b;
    BigInt d;

    static QuadElem rational(const Rational& r, const BigInt& d) { return {r, Rational(0), d}; }
    QuadElem conj() const { return {a, -b, d}; }
    Rational norm() const { return a * a - b * b * Rational(d); }
    bool is_rational() const { return b.is_zero(); }
    friend QuadElem operator+(const QuadElem& x, const QuadElem& y);
    friend QuadElem operator-(const QuadElem& x, const QuadElem& y);
    friend QuadElem operator*(const QuadElem& x, const QuadElem& y);
    PadicNumber embed(long p, long prec, int branch) const;  // branch: sign of sqrt(d)
    std::string to_string() const;
};

enum class PointClass { Rational, AlgebraicWeierstrass, AlgebraicNonWeierstrass, Unrecognized };

struct ClassifiedPoint {
    RecoveredPoint rec;
    PointClass cls = PointClass::Unrecognized;
    bool exact_on_curve = false;
    bool simple_root_certificate = false;
    std::string field = "";      // "Q", "Q(sqrt(-2))", "Q(sqrt(-3),sqrt(21))", ...
    ZPoly minpoly_x, minpoly_y;  // integer minimal polynomials when algebraic
    Rational x_rat, y_rat;       // exact coordinates in the rational case
    long orbit_id = -1;
    /// squarefree radicands of the quadratic subfields the point involves
    std::vector<BigInt> radicands;
};

struct RecognitionResult {
    std::vector<ClassifiedPoint> points;
    long n_rational = 0;
    long n_mock = 0;
    long n_alg_weierstrass = 0;
    long n_alg_nonweier = 0;
    long n_unrecognized = 0;
};

/// classify all candidates of a run; fills rec.n_rational / rec.n_mock
RecognitionResult recognize_candidates(RunRecord& rec);

struct WeierstrassCheck {
    ZPoly factor;      // irreducible quadratic factor of f
    BigInt D;          // squarefree field radicand of its roots
    bool ordinary_ok;  // the run prime is good ordinary (run precondition)
    bool qr_ok;        // D is a quadratic residue mod p
    bool appeared;     // the corresponding Weierstrass points were recovered
};

/// Weierstrass mock-point criteria for one completed run
std::vector<WeierstrassCheck> validate_weierstrass_criteria(const BiellipticModel& X, long p,
                                                            const RecognitionResult& rr);

/// exact LLL on integer rows (delta = 3/4); exposed for tests
void lll_reduce(std::vector<std::vector<BigInt>>& basis);

}  // namespace qc
