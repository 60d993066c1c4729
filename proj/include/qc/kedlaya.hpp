#pragma once

#include "qc/curves.hpp"

namespace qc {

/**
 * Frobenius action on H^1_dR of y^2 = x^3 + Ax + B via a Frobenius lift on
 * Monsky-Washnitzer cohomology, basis {dx/y, x dx/y}. Entries carry working
 * precision; charpoly is T^2 - a_p T + p.
 */
struct FrobeniusData {
    PadicNumber m00, m01, m10, m11;  // columns = images of dx/y, x dx/y
    PadicNumber unit_root;           // unit eigenvalue
    PadicNumber e2;                  // E2 of (E, omega) for the *input* model
    long ap = 0;
};

/// E must be p-integral with good reduction at p, p >= 5 ordinary.
FrobeniusData padic_E2_and_unit_root(const EllipticCurve& E, long p, long prec);

}  // namespace qc
