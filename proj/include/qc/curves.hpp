#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qc/padic.hpp"
#include "qc/poly.hpp"

namespace qc {

/// Genus-2 bielliptic model y^2 = a6 x^6 + a4 x^4 + a2 x^2 + a0.
struct BiellipticModel {
    BigInt a6, a4, a2, a0;
    std::string label;
    long level = 0;
    int jac_rank = -1;
    std::vector<std::pair<Rational, Rational>> known_rational_points;
    std::map<long, int> rank_over_K;  // D -> Jacobian rank over Q(sqrt(-D))
    // optional generator metadata: per curve index (1,2), affine x,y over Q or over K
    // as pairs (a, b) meaning a + b*sqrt(-D); D = 0 entries are rational points
    struct GeneratorHint {
        int which;  // 1 or 2
        long D;     // 0 for rational
        Rational xa, xb, ya, yb;
    };
    std::vector<GeneratorHint> generator_hints;

    ZPoly sextic() const { return poly_trim(ZPoly{a0, BigInt(0), a2, BigInt(0), a4, BigInt(0), a6}); }
    /// genus-2 discriminant normalization disc(4f)/2^12 = 2^8 disc(f)
    BigInt discriminant() const;
    void validate() const;
};

/// Integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct EllipticCurve {
    BigInt a1, a2, a3, a4, a6;

    BigInt b2() const { return a1 * a1 + BigInt(4) * a2; }
    BigInt b4() const { return BigInt(2) * a4 + a1 * a3; }
    BigInt b6() const { return a3 * a3 + BigInt(4) * a6; }
    BigInt b8() const {
        return a1 * a1 * a6 + BigInt(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    }
    BigInt c4() const { return b2() * b2() - BigInt(24) * b4(); }
    BigInt c6() const {
        return -b2() * b2() * b2() + BigInt(36) * b2() * b4() - BigInt(216) * b6();
    }
    BigInt disc() const {
        BigInt B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
        return -B2 * B2 * B8 - BigInt(8) * B4 * B4 * B4 - BigInt(27) * B6 * B6 +
               BigInt(9) * B2 * B4 * B6;
    }
    bool operator==(const EllipticCurve& o) const {
        return a1 == o.a1 && a2 == o.a2 && a3 == o.a3 && a4 == o.a4 && a6 == o.a6;
    }
    std::string to_string() const;
};

/// E1: y^2 = x^3 + a4 x^2 + a2 a6 x + a0 a6^2 ; E2: y^2 = x^3 + a2 x^2 + a4 a0 x + a6 a0^2.
std::pair<EllipticCurve, EllipticCurve> associated_curves(const BiellipticModel& X);

template <typename K>
struct ECPointT {
    bool inf = true;
    K x{}, y{};
    static ECPointT infinity() { return ECPointT{}; }
    static ECPointT affine(K xx, K yy) { return ECPointT{false, std::move(xx), std::move(yy)}; }
};

/// Group law over any field-like coordinate type (Rational, PadicNumber, ...).
template <typename K>
class ECGroup {
  public:
    ECGroup(K a1, K a2, K a3, K a4, K a6)
        : a1_(a1), a2_(a2), a3_(a3), a4_(a4), a6_(a6) {}

    using P = ECPointT<K>;

    bool on_curve(const P& pt) const {
        if (pt.inf) return true;
        K lhs = pt.y * pt.y + a1_ * pt.x * pt.y + a3_ * pt.y;
        K rhs = ((pt.x + a2_) * pt.x + a4_) * pt.x + a6_;
        return (lhs - rhs).is_zero();
    }
    P neg(const P& pt) const {
        if (pt.inf) return pt;
        return P::affine(pt.x, -(pt.y + a1_ * pt.x + a3_));
    }
    K eta(const P& pt) const { return pt.y + pt.y + a1_ * pt.x + a3_; }

    P add(const P& a, const P& b) const {
        if (a.inf) return b;
        if (b.inf) return a;
        K dx = b.x - a.x;
        if (dx.is_zero()) {
            K sy = eta(a) + (b.y - a.y);
            if (sy.is_zero()) return P::infinity();  // b == -a
            return dbl(a);
        }
        K lam = (b.y - a.y) / dx;
        return chord(a, b, lam);
    }
    P dbl(const P& a) const {
        if (a.inf) return a;
        K e = eta(a);
        if (e.is_zero()) return P::infinity();  // 2-torsion
        K num = (a.x * (a.x + a.x + a.x) + (a2_ + a2_) * a.x + a4_) - a1_ * a.y;
        K lam = num / e;
        return chord(a, a, lam);
    }
    P mul(const P& a, long n) const {
        if (n == 0) return P::infinity();
        if (n < 0) return neg(mul(a, -n));
        P acc = P::infinity(), base = a;
        long k = n;
        while (k) {
            if (k & 1) acc = add(acc, base);
            k >>= 1;
            if (k) base = dbl(base);
        }
        return acc;
    }

  private:
    P chord(const P& a, const P& b, const K& lam) const {
        K nu = a.y - lam * a.x;
        K x3 = lam * lam + a1_ * lam - a2_ - a.x - b.x;
        K y3 = -((lam + a1_) * x3 + nu + a3_);
        return P::affine(x3, y3);
    }
    K a1_, a2_, a3_, a4_, a6_;
};

using ECPointQ = ECPointT<Rational>;
using ECPointP = ECPointT<PadicNumber>;

ECGroup<Rational> ec_group_q(const EllipticCurve& E);
ECGroup<PadicNumber> ec_group_p(const EllipticCurve& E, long p, long aprec);
ECPointP ec_point_to_padic(const ECPointQ& P, long p, long aprec);

/// Point on X as exact rationals; at infinity the branch records the sign of
/// y/x^3 -> ±sqrt(a6).
struct XPointQ {
    bool infinite = false;
    int inf_branch = 0;  // +1 / -1
    Rational x, y;
};

/// phi_1(x,y) = (a6 x^2, a6 y); phi_2(x,y) = (a0 x^-2, a0 y x^-3); infinity and
/// x = 0 map by continuity.
ECPointQ phi_rational(int which, const BiellipticModel& X, const XPointQ& P);
ECPointP phi_padic(int which, const BiellipticModel& X, const PadicNumber& x, const PadicNumber& y);

/// #E(F_p) by direct count (p odd, good reduction), and a_p = p + 1 - #E(F_p).
long count_points_fp(const EllipticCurve& E, long p);
long trace_of_frobenius(const EllipticCurve& E, long p);

bool good_reduction_for_model(const BiellipticModel& X, long p);
bool is_good_ordinary(const BiellipticModel& X, long p);
/// all p in (3, bound] good for the model of X and both E_i, ordinary for both
std::vector<long> good_ordinary_primes(const BiellipticModel& X, long bound);

struct ResiduePoint {
    enum class Kind { Affine, Infinite } kind = Kind::Affine;
    long x = 0, y = 0;  // for Infinite, y = residue of the sqrt(a6) branch
    bool operator==(const ResiduePoint& o) const { return kind == o.kind && x == o.x && y == o.y; }
};

struct ResidueOrbit {
    ResiduePoint rep;
    std::vector<ResiduePoint> members;  // full orbit under (x,y) -> (±x, ±y)
};

/// F_p-points of the smooth model of X, one representative per automorphism orbit.
std::vector<ResidueOrbit> residue_points_mod_automorphism(const BiellipticModel& X, long p);
/// total number of F_p points of the smooth model
long count_x_points_fp(const BiellipticModel& X, long p);

}  // namespace qc
