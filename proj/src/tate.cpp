#include "qc/tate.hpp"

#include <algorithm>

namespace qc {

namespace {

long vq(const BigInt& x, const BigInt& q) {
    if (x.is_zero()) return 1000000000L;
    return x.valuation(q);
}

long vq(const Rational& x, const BigInt& q) {
    if (x.is_zero()) return 1000000000L;
    return x.valuation(q);
}

bool legendre_is_square(const BigInt& a, const BigInt& q) {
    BigInt r = a.mod(q);
    if (r.is_zero()) return true;
    return r.powmod((q - BigInt(1)) / BigInt(2), q).is_one();
}

long q_as_long(const BigInt& q) {
    if (!q.fits_long() || q.to_long() > 2000000)
        throw UnsupportedError("tate: residue enumeration beyond supported prime size");
    return q.to_long();
}

// roots in F_q of a polynomial given by BigInt coefficients (enumeration)
std::vector<long> fq_roots(const std::vector<BigInt>& poly, const BigInt& q) {
    long qq = q_as_long(q);
    std::vector<long> out;
    std::vector<long> c;
    for (const auto& v : poly) c.push_back(v.mod(q).to_long());
    for (long x = 0; x < qq; ++x) {
        long acc = 0;
        for (long i = static_cast<long>(c.size()) - 1; i >= 0; --i)
            acc = (acc * x + c[static_cast<size_t>(i)]) % qq;
        if (acc == 0) out.push_back(x);
    }
    return out;
}

}  // namespace

std::string kodaira_to_string(KodairaType t, long n) {
    switch (t) {
        case KodairaType::I0: return "I0";
        case KodairaType::In: return "I" + std::to_string(n);
        case KodairaType::II: return "II";
        case KodairaType::III: return "III";
        case KodairaType::IV: return "IV";
        case KodairaType::I0star: return "I0*";
        case KodairaType::Instar: return "I" + std::to_string(n) + "*";
        case KodairaType::IVstar: return "IV*";
        case KodairaType::IIIstar: return "III*";
        case KodairaType::IIstar: return "II*";
    }
    return "?";
}

ECTransform ECTransform::compose(const ECTransform& second) const {
    // apply *this then second
    ECTransform out;
    out.u = u * second.u;
    out.r = r + u * u * second.r;
    out.s = s + u * second.s;
    out.t = t + u * u * second.r * s + u * u * u * second.t;
    return out;
}

ECPointQ ECTransform::map_point(const ECPointQ& P) const {
    if (P.inf) return P;
    Rational xp = (P.x - r) / (u * u);
    Rational yp = (P.y - s * (P.x - r) - t) / (u * u * u);
    return ECPointQ::affine(xp, yp);
}

ECPointP ECTransform::map_point(const ECPointP& P, long p, long aprec) const {
    if (P.inf) return P;
    auto cv = [&](const Rational& v) { return PadicNumber::from_rational(v, p, aprec); };
    PadicNumber xp = (P.x - cv(r)) / cv(u * u);
    PadicNumber yp = (P.y - cv(s) * (P.x - cv(r)) - cv(t)) / cv(u * u * u);
    return ECPointP::affine(xp, yp);
}

EllipticCurve transform_curve(const EllipticCurve& E, const ECTransform& T) {
    const Rational &u = T.u, &r = T.r, &s = T.s, &t = T.t;
    Rational a1(E.a1), a2(E.a2), a3(E.a3), a4(E.a4), a6(E.a6);
    Rational u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u6 = u3 * u3;
    Rational b1 = (a1 + Rational(2) * s) / u;
    Rational b2v = (a2 - s * a1 + Rational(3) * r - s * s) / u2;
    Rational b3 = (a3 + r * a1 + Rational(2) * t) / u3;
    Rational b4v = (a4 - s * a3 + Rational(2) * r * a2 - (t + r * s) * a1 + Rational(3) * r * r -
                    Rational(2) * s * t) /
                   u4;
    Rational b6v =
        (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / u6;
    for (const Rational* v : {&b1, &b2v, &b3, &b4v, &b6v})
        if (!v->is_integer()) throw DomainError("transform_curve: non-integral result");
    return EllipticCurve{b1.num(), b2v.num(), b3.num(), b4v.num(), b6v.num()};
}

std::optional<std::pair<BigInt, BigInt>> singular_point_mod_q(const EllipticCurve& E, const BigInt& q) {
    if (!E.disc().divisible_by(q)) return std::nullopt;
    if (q == BigInt(2)) {
        for (long x = 0; x < 2; ++x)
            for (long y = 0; y < 2; ++y) {
                // F = y^2 + a1 xy + a3 y - x^3 - a2 x^2 - a4 x - a6
                auto m = [&](const BigInt& v) { return v.mod(BigInt(2)).to_long(); };
                long F = (y * y + m(E.a1) * x * y + m(E.a3) * y + x * x * x + m(E.a2) * x * x +
                          m(E.a4) * x + m(E.a6)) %
                         2;
                long Fx = (m(E.a1) * y + 3 * x * x + 2 * m(E.a2) * x + m(E.a4)) % 2;
                long Fy = (2 * y + m(E.a1) * x + m(E.a3)) % 2;
                if (F == 0 && Fx == 0 && Fy == 0) return std::make_pair(BigInt(x), BigInt(y));
            }
        return std::nullopt;
    }
    // odd q: x0 is a multiple root of 4x^3 + b2 x^2 + 2 b4 x + b6 mod q
    std::vector<BigInt> cubic = {E.b6(), BigInt(2) * E.b4(), E.b2(), BigInt(4)};
    std::vector<BigInt> deriv = {BigInt(2) * E.b4(), BigInt(2) * E.b2(), BigInt(12)};
    for (long x : fq_roots(cubic, q)) {
        // multiple root iff derivative also vanishes
        BigInt xv(x);
        BigInt dv = (BigInt(12) * xv * xv + BigInt(2) * E.b2() * xv + BigInt(2) * E.b4()).mod(q);
        if (!dv.is_zero()) continue;
        BigInt inv2 = BigInt(2).invmod(q);
        BigInt y0 = (-(E.a1 * xv + E.a3) * inv2).mod(q);
        return std::make_pair(xv, y0);
    }
    return std::nullopt;
}

namespace {

struct Work {
    EllipticCurve W;
    ECTransform T;  // original -> current
    void apply(const ECTransform& step) {
        W = transform_curve(W, step);
        T = T.compose(step);
    }
    void translate(const BigInt& r, const BigInt& s, const BigInt& t) {
        ECTransform step;
        step.r = Rational(r);
        step.s = Rational(s);
        step.t = Rational(t);
        apply(step);
    }
};

// past-IV normalization: v(a1)>=1, v(a2)>=1, v(a3)>=2, v(a4)>=2, v(a6)>=3
void normalize_past_iv(Work& wk, const BigInt& q) {
    auto ok = [&](const EllipticCurve& E) {
        return vq(E.a1, q) >= 1 && vq(E.a2, q) >= 1 && vq(E.a3, q) >= 2 && vq(E.a4, q) >= 2 &&
               vq(E.a6, q) >= 3;
    };
    if (ok(wk.W)) return;
    if (q > BigInt(3)) {
        BigInt inv2 = BigInt(2).invmod(q);
        BigInt s = ((-wk.W.a1) * inv2).mod(q);
        wk.translate(BigInt(0), s, BigInt(0));
        BigInt t = q * ((-(wk.W.a3.divexact(q))) * inv2).mod(q);
        wk.translate(BigInt(0), BigInt(0), t);
        if (!ok(wk.W)) throw DomainError("tate: past-IV normalization failed (odd q)");
        return;
    }
    long qq = q.to_long();
    for (long s = 0; s < qq; ++s)
        for (long tt = 0; tt < qq; ++tt) {
            Work trial = wk;
            trial.translate(BigInt(0), BigInt(s), BigInt(tt * qq));
            if (ok(trial.W)) {
                wk = trial;
                return;
            }
        }
    // widen the search once; the theory guarantees suitable coordinates exist
    for (long s = 0; s < qq * qq; ++s)
        for (long tt = 0; tt < qq * qq; ++tt) {
            Work trial = wk;
            trial.translate(BigInt(0), BigInt(s), BigInt(tt));
            if (ok(trial.W)) {
                wk = trial;
                return;
            }
        }
    throw DomainError("tate: past-IV normalization failed");
}

// number of distinct roots in F_q of a monic quadratic Y^2 + bY + c, also flag double root
struct QuadInfo {
    int distinct_fq_roots;
    bool has_double_root;
    BigInt double_root;
};

QuadInfo quad_info(const BigInt& b, const BigInt& c, const BigInt& q) {
    QuadInfo info{0, false, BigInt(0)};
    BigInt disc = (b * b - BigInt(4) * c).mod(q);
    if (disc.is_zero()) {
        info.has_double_root = true;
        if (q == BigInt(2)) {
            // Y^2 + bY + c with disc-like degeneration: find the double root by scan
            for (long y = 0; y < 2; ++y)
                if (((BigInt(y * y) + b * BigInt(y) + c).mod(q)).is_zero()) info.double_root = y;
        } else {
            info.double_root = ((-b) * BigInt(2).invmod(q)).mod(q);
        }
        return info;
    }
    if (q == BigInt(2)) {
        int cnt = 0;
        for (long y = 0; y < 2; ++y)
            if (((BigInt(y * y) + b * BigInt(y) + c).mod(q)).is_zero()) ++cnt;
        info.distinct_fq_roots = cnt;
        return info;
    }
    info.distinct_fq_roots = legendre_is_square(disc, q) ? 2 : 0;
    return info;
}

}  // namespace

LocalData tate_local_data(const EllipticCurve& E, const BigInt& q) {
    LocalData ld;
    ld.q = q;
    Work wk{E, ECTransform{}};

    for (int outer = 0; outer < 64; ++outer) {
        BigInt disc = wk.W.disc();
        if (disc.is_zero()) throw InputError("tate: singular curve");
        long n = vq(disc, q);
        if (n == 0) {
            ld.type = KodairaType::I0;
            ld.tamagawa = 1;
            ld.n = 0;
            break;
        }
        auto sing = singular_point_mod_q(wk.W, q);
        if (!sing) throw DomainError("tate: positive disc valuation but nonsingular reduction");
        wk.translate(sing->first, BigInt(0), sing->second);
        if (vq(wk.W.a3, q) < 1 || vq(wk.W.a4, q) < 1 || vq(wk.W.a6, q) < 1)
            throw DomainError("tate: singular point translation failed");

        if (vq(wk.W.b2(), q) == 0) {
            // multiplicative: type In
            ld.type = KodairaType::In;
            ld.n = n;
            if (q == BigInt(2)) {
                // T^2 + a1 T - a2 over F_2, a1 odd
                ld.split = wk.W.a2.mod(q).is_zero();
            } else {
                ld.split = legendre_is_square(wk.W.b2(), q);
            }
            ld.tamagawa = ld.split ? n : (n % 2 == 0 ? 2 : 1);
            break;
        }

        if (vq(wk.W.a6, q) < 2) {
            ld.type = KodairaType::II;
            ld.tamagawa = 1;
            break;
        }
        if (vq(wk.W.b8(), q) < 3) {
            ld.type = KodairaType::III;
            ld.tamagawa = 2;
            break;
        }
        if (vq(wk.W.b6(), q) < 3) {
            ld.type = KodairaType::IV;
            auto qi = quad_info(wk.W.a3.divexact(q), (-wk.W.a6).divexact(q * q), q);
            ld.tamagawa = qi.distinct_fq_roots == 2 ? 3 : 1;
            break;
        }

        normalize_past_iv(wk, q);

        // cubic P(T) = T^3 + (a2/q) T^2 + (a4/q^2) T + a6/q^3 mod q
        BigInt A = wk.W.a2.divexact(q);
        BigInt B = wk.W.a4.divexact(q * q);
        BigInt C = wk.W.a6.divexact(q * q * q);
        std::vector<BigInt> P = {C, B, A, BigInt(1)};
        std::vector<BigInt> dP = {B, BigInt(2) * A, BigInt(3)};
        auto roots = fq_roots(P, q);
        std::vector<long> multiple_roots;
        for (long x : roots) {
            BigInt dv = (BigInt(3) * BigInt(x) * BigInt(x) + BigInt(2) * A * BigInt(x) + B).mod(q);
            if (dv.is_zero()) multiple_roots.push_back(x);
        }

        if (multiple_roots.empty()) {
            ld.type = KodairaType::I0star;
            ld.n = 0;
            ld.tamagawa = 1 + static_cast<long>(roots.size());
            break;
        }

        // decide double vs triple root: P = (T - x0)^3 iff coefficients match mod q
        long x0 = multiple_roots[0];
        BigInt xm(x0);
        bool triple = ((A.mod(q)) == ((BigInt(-3) * xm).mod(q))) &&
                      ((B.mod(q)) == ((BigInt(3) * xm * xm).mod(q))) &&
                      ((C.mod(q)) == ((-xm * xm * xm).mod(q)));

        if (!triple) {
            // In*, n >= 1: move the double root to 0
            wk.translate(q * BigInt(x0), BigInt(0), BigInt(0));
            if (vq(wk.W.a2, q) != 1 || vq(wk.W.a3, q) < 2 || vq(wk.W.a4, q) < 3 ||
                vq(wk.W.a6, q) < 4)
                throw DomainError("tate: In* entry pattern failed");
            BigInt mx = q * q, my = q * q;
            long ix = 3, iy = 3;
            bool done = false;
            long cp = 0;
            for (int guard = 0; guard < 256 && !done; ++guard) {
                BigInt a2t = wk.W.a2.divexact(q);
                BigInt a3t = wk.W.a3.divexact(my);
                BigInt a6t = wk.W.a6.divexact(mx * my);
                auto qi = quad_info(a3t, -a6t, q);
                if (!qi.has_double_root) {
                    cp = (qi.distinct_fq_roots == 2) ? 4 : 2;
                    done = true;
                    break;
                }
                wk.translate(BigInt(0), BigInt(0), my * qi.double_root);
                my = my * q;
                ++iy;

                BigInt a4t = wk.W.a4.divexact(q * mx);
                BigInt a6s = wk.W.a6.divexact(q * mx * mx);
                // a2t X^2 + a4t X + a6s: double root iff disc = a4t^2 - 4 a2t a6s = 0 mod q
                BigInt disc2 = (a4t * a4t - BigInt(4) * a2t * a6s).mod(q);
                if (!disc2.is_zero()) {
                    bool rational_roots;
                    if (q == BigInt(2)) {
                        int cnt = 0;
                        for (long xx = 0; xx < 2; ++xx)
                            if (((a2t * BigInt(xx * xx) + a4t * BigInt(xx) + a6s).mod(q)).is_zero())
                                ++cnt;
                        rational_roots = cnt > 0;
                    } else {
                        rational_roots = legendre_is_square(disc2, q);
                    }
                    cp = rational_roots ? 4 : 2;
                    done = true;
                    break;
                }
                BigInt x1;
                if (q == BigInt(2)) {
                    x1 = BigInt(0);
                    for (long xx = 0; xx < 2; ++xx)
                        if (((a2t * BigInt(xx * xx) + a4t * BigInt(xx) + a6s).mod(q)).is_zero())
                            x1 = BigInt(xx);
                } else {
                    x1 = ((-a4t) * (BigInt(2) * a2t).invmod(q)).mod(q);
                }
                wk.translate(mx * x1, BigInt(0), BigInt(0));
                mx = mx * q;
                ++ix;
            }
            if (!done) throw DomainError("tate: In* loop did not terminate");
            ld.type = KodairaType::Instar;
            ld.n = ix + iy - 5;
            ld.tamagawa = cp;
            break;
        }

        // triple root: move it to 0
        wk.translate(q * BigInt(x0), BigInt(0), BigInt(0));
        if (vq(wk.W.a2, q) < 2 || vq(wk.W.a3, q) < 2 || vq(wk.W.a4, q) < 3 || vq(wk.W.a6, q) < 4)
            throw DomainError("tate: triple-root pattern failed");

        // Y^2 + (a3/q^2) Y - a6/q^4
        auto qi = quad_info(wk.W.a3.divexact(q * q), (-wk.W.a6).divexact(q.pow(4)), q);
        if (!qi.has_double_root) {
            ld.type = KodairaType::IVstar;
            ld.tamagawa = qi.distinct_fq_roots == 2 ? 3 : 1;
            break;
        }
        wk.translate(BigInt(0), BigInt(0), q * q * qi.double_root);
        if (vq(wk.W.a3, q) < 3 || vq(wk.W.a6, q) < 5)
            throw DomainError("tate: III*/II* pattern failed");

        if (vq(wk.W.a4, q) < 4) {
            ld.type = KodairaType::IIIstar;
            ld.tamagawa = 2;
            break;
        }
        if (vq(wk.W.a6, q) < 6) {
            ld.type = KodairaType::IIstar;
            ld.tamagawa = 1;
            break;
        }
        // non-minimal: divide by q
        ECTransform scale;
        scale.u = Rational(q);
        wk.apply(scale);
    }

    ld.vdisc_min = vq(wk.W.disc(), q);
    if (ld.vdisc_min >= 1000000000L) throw DomainError("tate: disc vanished");
    ld.minimal_model = wk.W;
    ld.to_minimal = wk.T;
    if (ld.type == KodairaType::In) ld.n = ld.vdisc_min;
    return ld;
}

EllipticCurve global_minimal_model(const EllipticCurve& E, ECTransform& to_minimal) {
    BigInt c4 = E.c4(), c6 = E.c6(), disc = E.disc();
    if (disc.is_zero()) throw InputError("global_minimal_model: singular");
    BigInt u(1);
    for (auto& [qf, e] : factorize(disc)) {
        if (e < 12) continue;
        long d = e / 12;
        if (!c4.is_zero()) d = std::min(d, vq(c4, qf) / 4);
        if (!c6.is_zero()) d = std::min(d, vq(c6, qf) / 6);
        while (d > 0) {
            BigInt uq = qf.pow(static_cast<unsigned long>(d));
            BigInt c4p = c4.divexact(uq.pow(4));
            BigInt c6p = c6.divexact(uq.pow(6));
            bool ok = true;
            if (qf == BigInt(3)) ok = (vq(c6p, BigInt(3)) != 2);
            if (qf == BigInt(2)) {
                bool condA = (c6p.mod(BigInt(4)) == BigInt(3));  // c6' = -1 mod 4
                BigInt c6m32 = c6p.mod(BigInt(32));
                bool condB = (vq(c4p, BigInt(2)) >= 4) && (c6m32.is_zero() || c6m32 == BigInt(8));
                ok = condA || condB;
            }
            if (ok) break;
            --d;
        }
        if (d > 0) u *= qf.pow(static_cast<unsigned long>(d));
    }
    BigInt c4m = c4.divexact(u.pow(4));
    BigInt c6m = c6.divexact(u.pow(6));

    // reconstruct a canonical integral model from (c4m, c6m)
    EllipticCurve M;
    bool found = false;
    for (long b2v : {-4L, -3L, 0L, 1L, 4L, 5L}) {
        BigInt b2(b2v);
        BigInt num4 = b2 * b2 - c4m;
        if (!num4.divisible_by(BigInt(24))) continue;
        BigInt b4 = num4.divexact(BigInt(24));
        BigInt num6 = -b2 * b2 * b2 + BigInt(36) * b2 * b4 - c6m;
        if (!num6.divisible_by(BigInt(216))) continue;
        BigInt b6 = num6.divexact(BigInt(216));
        BigInt a1 = b2.mod(BigInt(2));
        BigInt a2 = (b2 - a1) / BigInt(4);
        if (b2 != a1 * a1 + BigInt(4) * a2) continue;
        BigInt a3 = b6.mod(BigInt(2));
        BigInt a6 = (b6 - a3 * a3) / BigInt(4);
        if (b6 != a3 * a3 + BigInt(4) * a6) continue;
        BigInt num_a4 = b4 - a1 * a3;
        if (!num_a4.divisible_by(BigInt(2))) continue;
        BigInt a4 = num_a4.divexact(BigInt(2));
        EllipticCurve cand{a1, a2, a3, a4, a6};
        if (cand.c4() == c4m && cand.c6() == c6m) {
            M = cand;
            found = true;
            break;
        }
    }
    if (!found) throw DomainError("global_minimal_model: reconstruction failed");

    // derive the transform E -> M: u known; r, s, t from the b/a relations
    Rational ur(u);
    Rational r = (ur * ur * Rational(M.b2()) - Rational(E.b2())) / Rational(12);
    Rational s = (ur * Rational(M.a1) - Rational(E.a1)) / Rational(2);
    Rational t = (ur * ur * ur * Rational(M.a3) - Rational(E.a3) - r * Rational(E.a1)) / Rational(2);
    ECTransform T;
    T.u = ur;
    T.r = r;
    T.s = s;
    T.t = t;
    EllipticCurve check = transform_curve(E, T);
    if (!(check == M)) throw DomainError("global_minimal_model: transform verification failed");
    to_minimal = T;
    return M;
}

bool reduces_nonsingular(const EllipticCurve& E, const ECPointQ& P, const BigInt& q) {
    if (P.inf) return true;
    long vx = P.x.is_zero() ? 1000000000L : P.x.valuation(q);
    if (vx < 0) return true;  // reduces to O
    auto sing = singular_point_mod_q(E, q);
    if (!sing) return true;
    BigInt xr = (P.x.num() * P.x.den().invmod(q)).mod(q);
    BigInt yr = (P.y.num() * P.y.den().invmod(q)).mod(q);
    return !(xr == sing->first && yr == sing->second);
}

bool reduces_nonsingular(const EllipticCurve& E, const ECPointP& P) {
    if (P.inf) return true;
    BigInt q(P.x.prime());
    if (!P.x.is_zero() && P.x.valuation() < 0) return true;
    auto sing = singular_point_mod_q(E, q);
    if (!sing) return true;
    BigInt xr = P.x.is_zero() ? BigInt(0) : P.x.integer_rep().mod(q);
    BigInt yr = P.y.is_zero() ? BigInt(0) : P.y.integer_rep().mod(q);
    return !(xr == sing->first && yr == sing->second);
}

}  // namespace qc
