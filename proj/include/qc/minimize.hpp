#pragma once

#include "qc/curves.hpp"

namespace qc {

/// M(a,b,c,d,e) = [[a,0,b],[0,e,0],[c,0,d]] acting by x' = (ax+b)/(cx+d),
/// y' = e y/(cx+d)^3.
struct TransformMatrix {
    Rational a = Rational(1), b = Rational(0), c = Rational(0), d = Rational(1), e = Rational(1);

    Rational det() const { return a * d - b * c; }
    /// multiplier on the genus-2 discriminant: e^20 (ad-bc)^-30
    Rational discriminant_effect() const;
    TransformMatrix compose(const TransformMatrix& second) const;
    /// transport a point of the source model to the target model
    std::pair<Rational, Rational> map_point(const Rational& x, const Rational& y) const;
};

/// the transformed sextic coefficients (degree-6 dense, rational)
std::vector<Rational> transformed_sextic(const TransformMatrix& M, const BiellipticModel& X);

/// true iff applying M yields an even sextic model with integer coefficients
bool check_transform_conditions(const TransformMatrix& M, const BiellipticModel& X);

/// apply M; throws if check_transform_conditions fails
BiellipticModel apply_transform(const TransformMatrix& M, const BiellipticModel& X);

struct MinimizeResult {
    BiellipticModel model;
    TransformMatrix transform;  // composite, original -> minimal
    BigInt disc_before, disc_after;
};

/// Greedy discriminant minimization over prime-power reduction factors.
MinimizeResult minimize_model(const BiellipticModel& X);

}  // namespace qc
