#pragma once

#include <vector>

#include "qc/series.hpp"

namespace qc {

struct SeriesRoot {
    PadicNumber t;
    long multiplicity = 1;
    bool simple = true;
    /// true when refinement exhausted the precision budget before isolating
    bool at_precision_boundary = false;
};

/**
 * All roots of F in Z_p up to working precision, by exhaustive residue
 * refinement with Hensel acceleration on simple roots. Throws PrecisionError
 * if F is indistinguishable from zero at working precision.
 */
std::vector<SeriesRoot> series_roots_in_Zp(const PSeries& F);

struct WeierstrassFactorResult {
    PSeries quotient;
    bool exact = false;   // remainder vanished to the precision floor
    bool simple = false;  // exact and quotient(t0) nonzero
};

/// Divide F by (t - t0); exactness certifies t0 as a root, quotient(t0) != 0
/// certifies it simple.
WeierstrassFactorResult weierstrass_factor(const PSeries& F, const PadicNumber& t0);

/// Taylor shift F(t + c).
PSeries taylor_shift(const PSeries& F, const PadicNumber& c);

}  // namespace qc
