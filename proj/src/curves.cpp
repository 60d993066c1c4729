#include "qc/curves.hpp"

#include <algorithm>
#include <sstream>

namespace qc {

BigInt BiellipticModel::discriminant() const {
    return BigInt(256) * poly_discriminant(sextic());
}

void BiellipticModel::validate() const {
    if (a6.is_zero()) throw InputError("bielliptic model: a6 = 0");
    if (poly_degree(sextic()) != 6) throw InputError("bielliptic model: degree drop");
    if (poly_discriminant(sextic()).is_zero()) throw InputError("bielliptic model: singular");
}

std::string EllipticCurve::to_string() const {
    std::ostringstream os;
    os << "[" << a1 << "," << a2 << "," << a3 << "," << a4 << "," << a6 << "]";
    return os.str();
}

std::pair<EllipticCurve, EllipticCurve> associated_curves(const BiellipticModel& X) {
    EllipticCurve E1{BigInt(0), X.a4, BigInt(0), X.a2 * X.a6, X.a0 * X.a6 * X.a6};
    EllipticCurve E2{BigInt(0), X.a2, BigInt(0), X.a4 * X.a0, X.a6 * X.a0 * X.a0};
    if (E1.disc().is_zero() || E2.disc().is_zero())
        throw InputError("associated curve is singular");
    return {E1, E2};
}

ECGroup<Rational> ec_group_q(const EllipticCurve& E) {
    return ECGroup<Rational>(Rational(E.a1), Rational(E.a2), Rational(E.a3), Rational(E.a4),
                             Rational(E.a6));
}

ECGroup<PadicNumber> ec_group_p(const EllipticCurve& E, long p, long aprec) {
    auto cv = [&](const BigInt& v) { return PadicNumber::from_integer(v, p, aprec); };
    return ECGroup<PadicNumber>(cv(E.a1), cv(E.a2), cv(E.a3), cv(E.a4), cv(E.a6));
}

ECPointP ec_point_to_padic(const ECPointQ& P, long p, long aprec) {
    if (P.inf) return ECPointP::infinity();
    return ECPointP::affine(PadicNumber::from_rational(P.x, p, aprec),
                            PadicNumber::from_rational(P.y, p, aprec));
}

ECPointQ phi_rational(int which, const BiellipticModel& X, const XPointQ& P) {
    Rational a6(X.a6), a0(X.a0);
    if (which == 1) {
        if (P.infinite) return ECPointQ::infinity();
        return ECPointQ::affine(a6 * P.x * P.x, a6 * P.y);
    }
    if (P.infinite) {
        // phi_2(inf±) = (0, ±a0 sqrt(a6)); rational only when a6 is a square
        Rational s = Rational(X.a6).sqrt();
        return ECPointQ::affine(Rational(0), a0 * s * Rational(P.inf_branch));
    }
    if (P.x.is_zero()) return ECPointQ::infinity();  // by continuity
    Rational ix = P.x.inverse();
    return ECPointQ::affine(a0 * ix * ix, a0 * P.y * ix * ix * ix);
}

ECPointP phi_padic(int which, const BiellipticModel& X, const PadicNumber& x, const PadicNumber& y) {
    long p = x.prime();
    long n = x.abs_prec() + 6;
    auto a6 = PadicNumber::from_integer(X.a6, p, n);
    auto a0 = PadicNumber::from_integer(X.a0, p, n);
    if (which == 1) return ECPointP::affine(a6 * x * x, a6 * y);
    if (x.is_zero()) return ECPointP::infinity();
    auto ix = x.inverse();
    return ECPointP::affine(a0 * ix * ix, a0 * y * ix * ix * ix);
}

long count_points_fp(const EllipticCurve& E, long p) {
    // complete the square: eta^2 = 4x^3 + b2 x^2 + 2 b4 x + b6 (p odd)
    long b2 = E.b2().mod(BigInt(p)).to_long();
    long b4 = E.b4().mod(BigInt(p)).to_long();
    long b6 = E.b6().mod(BigInt(p)).to_long();
    std::vector<int> qr(static_cast<size_t>(p), 0);
    for (long t = 0; t < p; ++t) qr[static_cast<size_t>((t * t) % p)] = 1;
    long count = 1;  // infinity
    for (long x = 0; x < p; ++x) {
        long rhs = (((4 * x + b2) % p) * ((x * x) % p) % p + (2 * b4 % p) * x % p + b6) % p;
        rhs = (rhs % p + p) % p;
        if (rhs == 0)
            count += 1;
        else if (qr[static_cast<size_t>(rhs)])
            count += 2;
    }
    return count;
}

long trace_of_frobenius(const EllipticCurve& E, long p) { return p + 1 - count_points_fp(E, p); }

bool good_reduction_for_model(const BiellipticModel& X, long p) {
    if (p <= 3) return false;
    if (X.a6.divisible_by(BigInt(p))) return false;
    return !poly_discriminant(X.sextic()).divisible_by(BigInt(p));
}

bool is_good_ordinary(const BiellipticModel& X, long p) {
    if (!good_reduction_for_model(X, p)) return false;
    auto [E1, E2] = associated_curves(X);
    return trace_of_frobenius(E1, p) % p != 0 && trace_of_frobenius(E2, p) % p != 0;
}

std::vector<long> good_ordinary_primes(const BiellipticModel& X, long bound) {
    if (bound < 5) throw InputError("good_ordinary_primes: bound >= 5 required");
    std::vector<long> out;
    for (long p = 5; p <= bound; ++p) {
        bool prime = true;
        for (long d = 2; d * d <= p; ++d)
            if (p % d == 0) {
                prime = false;
                break;
            }
        if (!prime) continue;
        if (is_good_ordinary(X, p)) out.push_back(p);
    }
    return out;
}

long count_x_points_fp(const BiellipticModel& X, long p) {
    std::vector<int> qr(static_cast<size_t>(p), 0);
    for (long t = 0; t < p; ++t) qr[static_cast<size_t>((t * t) % p)] = 1;
    ZPoly f = X.sextic();
    long count = 0;
    for (long x = 0; x < p; ++x) {
        long rhs = poly_eval(f, BigInt(x)).mod(BigInt(p)).to_long();
        if (rhs == 0)
            count += 1;
        else if (qr[static_cast<size_t>(rhs)])
            count += 2;
    }
    long a6r = X.a6.mod(BigInt(p)).to_long();
    if (a6r != 0 && qr[static_cast<size_t>(a6r)]) count += 2;
    return count;
}

std::vector<ResidueOrbit> residue_points_mod_automorphism(const BiellipticModel& X, long p) {
    if (!good_reduction_for_model(X, p)) throw InputError("residue points: bad reduction");
    std::vector<int> qr(static_cast<size_t>(p), 0);
    std::vector<long> root_of(static_cast<size_t>(p), -1);
    for (long t = 0; t < p; ++t) {
        long sq = (t * t) % p;
        qr[static_cast<size_t>(sq)] = 1;
        if (root_of[static_cast<size_t>(sq)] < 0) root_of[static_cast<size_t>(sq)] = t;
    }
    ZPoly f = X.sextic();
    std::vector<ResiduePoint> all;
    for (long x = 0; x < p; ++x) {
        long rhs = poly_eval(f, BigInt(x)).mod(BigInt(p)).to_long();
        if (rhs == 0) {
            all.push_back({ResiduePoint::Kind::Affine, x, 0});
        } else if (qr[static_cast<size_t>(rhs)]) {
            long y = root_of[static_cast<size_t>(rhs)];
            all.push_back({ResiduePoint::Kind::Affine, x, y});
            all.push_back({ResiduePoint::Kind::Affine, x, p - y});
        }
    }
    long a6r = X.a6.mod(BigInt(p)).to_long();
    if (qr[static_cast<size_t>(a6r)]) {
        long s = root_of[static_cast<size_t>(a6r)];
        all.push_back({ResiduePoint::Kind::Infinite, 0, s});
        all.push_back({ResiduePoint::Kind::Infinite, 0, p - s});
    }

    auto apply = [&](const ResiduePoint& pt, int sx, int sy) {
        ResiduePoint r = pt;
        if (pt.kind == ResiduePoint::Kind::Affine) {
            r.x = sx > 0 ? pt.x : (p - pt.x) % p;
            r.y = sy > 0 ? pt.y : (p - pt.y) % p;
        } else {
            // both sign maps swap the two infinite branches: y/x^3 flips under either
            int flips = (sx < 0 ? 1 : 0) + (sy < 0 ? 1 : 0);
            r.y = (flips % 2 == 0) ? pt.y : (p - pt.y) % p;
        }
        return r;
    };

    std::vector<ResidueOrbit> orbits;
    std::vector<bool> used(all.size(), false);
    for (size_t i = 0; i < all.size(); ++i) {
        if (used[i]) continue;
        ResidueOrbit orb;
        orb.rep = all[i];
        for (int sx : {1, -1})
            for (int sy : {1, -1}) {
                ResiduePoint im = apply(all[i], sx, sy);
                bool seen = false;
                for (auto& m : orb.members)
                    if (m == im) seen = true;
                if (!seen) orb.members.push_back(im);
                for (size_t j = 0; j < all.size(); ++j)
                    if (all[j] == im) used[j] = true;
            }
        orbits.push_back(std::move(orb));
    }
    return orbits;
}

}  // namespace qc
