#pragma once

#include <vector>

#include "qc/bigint.hpp"

namespace qc {

/// Dense integer polynomial, index = degree. Trailing zeros allowed.
using ZPoly = std::vector<BigInt>;

long poly_degree(const ZPoly& f);
ZPoly poly_trim(ZPoly f);
ZPoly poly_add(const ZPoly& a, const ZPoly& b);
ZPoly poly_sub(const ZPoly& a, const ZPoly& b);
ZPoly poly_mul(const ZPoly& a, const ZPoly& b);
ZPoly poly_scale(const ZPoly& a, const BigInt& c);
ZPoly poly_derivative(const ZPoly& f);
BigInt poly_eval(const ZPoly& f, const BigInt& x);
Rational poly_eval(const ZPoly& f, const Rational& x);
BigInt poly_content(const ZPoly& f);
ZPoly poly_primitive(const ZPoly& f);
/// exact division; throws if remainder nonzero
ZPoly poly_divexact(const ZPoly& f, const ZPoly& g);
bool poly_divides(const ZPoly& g, const ZPoly& f);

/// Resultant of f and g by fraction-free Gaussian elimination on Sylvester.
BigInt poly_resultant(const ZPoly& f, const ZPoly& g);
/// disc(f) = (-1)^(d(d-1)/2) Res(f, f') / lc(f)
BigInt poly_discriminant(const ZPoly& f);

/// prime factorization by trial division + Pollard rho (inputs are desk scale)
std::vector<std::pair<BigInt, long>> factorize(const BigInt& n);
std::vector<BigInt> divisors_of(const BigInt& n);

/// all rational roots, lowest terms
std::vector<Rational> rational_roots(const ZPoly& f);
/// all irreducible integer quadratic factors (primitive, positive leading coeff)
std::vector<ZPoly> quadratic_factors(const ZPoly& f);

/// squarefree part of a nonzero integer, sign preserved
BigInt squarefree_part(const BigInt& n);

}  // namespace qc
