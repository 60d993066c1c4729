#pragma once

#include "qc/curves.hpp"

namespace qc {

enum class KodairaType { I0, In, II, III, IV, I0star, Instar, IVstar, IIIstar, IIstar };

std::string kodaira_to_string(KodairaType t, long n);

/// Coordinate change x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.
struct ECTransform {
    Rational u = Rational(1), r = Rational(0), s = Rational(0), t = Rational(0);

    ECTransform compose(const ECTransform& second) const;
    /// map a point of the source model to the target model
    ECPointQ map_point(const ECPointQ& P) const;
    ECPointP map_point(const ECPointP& P, long p, long aprec) const;
};

EllipticCurve transform_curve(const EllipticCurve& E, const ECTransform& T);

struct LocalData {
    BigInt q;
    KodairaType type = KodairaType::I0;
    long n = 0;           // index for In / In*
    long vdisc_min = 0;   // valuation of the minimal discriminant
    long tamagawa = 1;
    bool split = false;   // multiplicative case
    EllipticCurve minimal_model;  // minimal at q (integral)
    ECTransform to_minimal;       // original -> minimal coordinates
};

/// Tate's algorithm at q for an integral model.
LocalData tate_local_data(const EllipticCurve& E, const BigInt& q);

/// Global minimal model (Laska–Kraus–Connell), with the transform from the
/// input model.
EllipticCurve global_minimal_model(const EllipticCurve& E, ECTransform& to_minimal);

/// Reduction of a Q-point mod q is nonsingular on the given q-integral model.
/// The point may have a denominator at q (then it reduces to O: nonsingular).
bool reduces_nonsingular(const EllipticCurve& E, const ECPointQ& P, const BigInt& q);
bool reduces_nonsingular(const EllipticCurve& E, const ECPointP& P);

/// coordinates of the singular point of the reduction mod q, if any
std::optional<std::pair<BigInt, BigInt>> singular_point_mod_q(const EllipticCurve& E, const BigInt& q);

}  // namespace qc
