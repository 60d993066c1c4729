#include "qc/kedlaya.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qc {

namespace {

// raw dense polynomials mod p^Nw; the heavy passes are division-free, and the
// few divisions by p-divisible integers are rounded with the loss verified
// against trace/det at the end
struct RawCtx {
    long p;
    long nw;
    BigInt M;

    BigInt red(const BigInt& v) const { return v.mod(M); }
    using Poly = std::vector<BigInt>;

    long deg(const Poly& f) const {
        for (long i = static_cast<long>(f.size()) - 1; i >= 0; --i)
            if (!f[static_cast<size_t>(i)].is_zero()) return i;
        return -1;
    }
    Poly trim(Poly f) const {
        while (!f.empty() && f.back().is_zero()) f.pop_back();
        return f;
    }
    Poly add(const Poly& a, const Poly& b) const {
        Poly r(std::max(a.size(), b.size()), BigInt(0));
        for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
        for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
        for (auto& x : r) x = red(x);
        return trim(r);
    }
    Poly sub(const Poly& a, const Poly& b) const {
        Poly r(std::max(a.size(), b.size()), BigInt(0));
        for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
        for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
        for (auto& x : r) x = red(x);
        return trim(r);
    }
    Poly mul(const Poly& a, const Poly& b) const {
        if (a.empty() || b.empty()) return {};
        Poly r(a.size() + b.size() - 1, BigInt(0));
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i].is_zero()) continue;
            for (size_t j = 0; j < b.size(); ++j) {
                if (b[j].is_zero()) continue;
                r[i + j] += a[i] * b[j];
            }
        }
        for (auto& x : r) x = red(x);
        return trim(r);
    }
    void monic_divmod(const Poly& a, const Poly& g, Poly& quo, Poly& rem) const {
        long dg = deg(g);
        rem = a;
        quo.assign(a.size(), BigInt(0));
        for (long da = static_cast<long>(rem.size()) - 1; da >= dg; --da) {
            BigInt q = rem[static_cast<size_t>(da)];
            if (q.is_zero()) continue;
            quo[static_cast<size_t>(da - dg)] = red(quo[static_cast<size_t>(da - dg)] + q);
            for (long i = 0; i <= dg; ++i)
                rem[static_cast<size_t>(da - dg + i)] =
                    red(rem[static_cast<size_t>(da - dg + i)] - q * g[static_cast<size_t>(i)]);
        }
        rem.resize(static_cast<size_t>(std::max<long>(dg, 1)), BigInt(0));
        quo = trim(quo);
    }
    // value / n where n = p^v * u: rounds away sub-p^v residue (tracked loss)
    BigInt div_tracked(const BigInt& c, long n, long& maxloss) const {
        BigInt den(n < 0 ? -n : n);
        long v = 0;
        BigInt u = den;
        while (u.divisible_by(BigInt(p))) {
            u = u.divexact(BigInt(p));
            ++v;
        }
        BigInt cc = c;
        if (v > 0) {
            BigInt pv = p_power(p, v);
            cc = cc - cc.mod(pv);
            cc = cc.divexact(pv);
            maxloss = std::max(maxloss, v);
        }
        BigInt r = red(cc * u.invmod(M));
        return (n < 0) ? red(M - r) : r;
    }
};

FrobeniusData kedlaya_core(const EllipticCurve& E, long p, long prec, long guard) {
    long J = prec + 3;
    RawCtx ctx{p, prec + guard, p_power(p, prec + guard)};
    const long nw = ctx.nw;
    using Poly = RawCtx::Poly;
    long maxloss = 0;

    auto from_rat = [&](const Rational& v) {
        return ctx.red(v.num().mod(ctx.M) * v.den().invmod(ctx.M));
    };

    Poly Q = {from_rat(Rational(E.b6(), BigInt(4))), from_rat(Rational(E.b4(), BigInt(2))),
              from_rat(Rational(E.b2(), BigInt(4))), BigInt(1)};
    Poly dQ = {ctx.red(Q[1]), ctx.red(BigInt(2) * Q[2]), BigInt(3)};

    // Bezout s Q + t dQ = 1 lifted from F_p (no p-divisions involved)
    Poly s, t;
    {
        struct FpPoly {
            std::vector<long> c;
        };
        auto fp_trim = [](FpPoly f) {
            while (!f.c.empty() && f.c.back() == 0) f.c.pop_back();
            return f;
        };
        auto fp_mul = [&](const FpPoly& a, const FpPoly& b) {
            FpPoly r;
            if (a.c.empty() || b.c.empty()) return r;
            r.c.assign(a.c.size() + b.c.size() - 1, 0);
            for (size_t i = 0; i < a.c.size(); ++i)
                for (size_t j = 0; j < b.c.size(); ++j)
                    r.c[i + j] = (r.c[i + j] + a.c[i] * b.c[j]) % p;
            return fp_trim(r);
        };
        auto fp_sub = [&](const FpPoly& a, const FpPoly& b) {
            FpPoly r;
            r.c.assign(std::max(a.c.size(), b.c.size()), 0);
            for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i] % p;
            for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = ((r.c[i] - b.c[i]) % p + p) % p;
            return fp_trim(r);
        };
        auto fp_inv = [&](long v) {
            long e = p - 2, base = ((v % p) + p) % p, acc = 1;
            while (e) {
                if (e & 1) acc = acc * base % p;
                base = base * base % p;
                e >>= 1;
            }
            return acc;
        };
        std::function<void(FpPoly, FpPoly, FpPoly&, FpPoly&, FpPoly&)> ext =
            [&](FpPoly a, FpPoly b, FpPoly& g, FpPoly& x, FpPoly& y) {
                if (b.c.empty()) {
                    g = a;
                    x.c = {1};
                    y.c = {};
                    return;
                }
                FpPoly quo, rem = a;
                long db = static_cast<long>(b.c.size()) - 1;
                long inv_lb = fp_inv(b.c.back());
                while (!rem.c.empty() && static_cast<long>(rem.c.size()) - 1 >= db) {
                    long da = static_cast<long>(rem.c.size()) - 1;
                    long qc = rem.c.back() * inv_lb % p;
                    if (static_cast<long>(quo.c.size()) < da - db + 1) quo.c.resize(da - db + 1, 0);
                    quo.c[static_cast<size_t>(da - db)] = qc;
                    for (long i = 0; i <= db; ++i)
                        rem.c[static_cast<size_t>(da - db + i)] =
                            ((rem.c[static_cast<size_t>(da - db + i)] -
                              qc * b.c[static_cast<size_t>(i)]) %
                                 p +
                             p) %
                            p;
                    rem = fp_trim(rem);
                }
                FpPoly g2, x2, y2;
                ext(b, rem, g2, x2, y2);
                g = g2;
                x = y2;
                y = fp_sub(x2, fp_mul(quo, y2));
            };
        FpPoly fQ, fdQ;
        for (auto& c : Q) fQ.c.push_back(c.mod(BigInt(p)).to_long());
        for (auto& c : dQ) fdQ.c.push_back(c.mod(BigInt(p)).to_long());
        FpPoly g, xx, yy;
        ext(fp_trim(fQ), fp_trim(fdQ), g, xx, yy);
        if (g.c.size() != 1) throw InputError("kedlaya: Q not squarefree mod p");
        long ginv = fp_inv(g.c[0]);
        for (long v : xx.c) s.push_back(BigInt(v * ginv % p));
        for (long v : yy.c) t.push_back(BigInt(v * ginv % p));
        Poly one = {BigInt(1)};
        for (long have = 1; have < nw; have *= 2) {
            Poly err = ctx.sub(ctx.add(ctx.mul(s, Q), ctx.mul(t, dQ)), one);
            t = ctx.sub(t, ctx.mul(err, t));
            Poly quo, rem;
            ctx.monic_divmod(t, Q, quo, rem);
            t = rem;
            Poly num = ctx.sub(one, ctx.mul(t, dQ));
            Poly srem;
            ctx.monic_divmod(num, Q, s, srem);
        }
        Poly check = ctx.sub(ctx.add(ctx.mul(s, Q), ctx.mul(t, dQ)), one);
        if (ctx.deg(check) >= 0) throw DomainError("kedlaya: Bezout lift failed");
    }

    // one y-level: split A = q1 Q + r1 in place, Bezout the remainder
    auto reduce_level = [&](Poly R, long k) -> Poly {
        for (long i = static_cast<long>(R.size()) - 1; i >= 3; --i) {
            const BigInt& c = R[static_cast<size_t>(i)];
            if (c.is_zero()) continue;
            R[static_cast<size_t>(i - 1)] = ctx.red(R[static_cast<size_t>(i - 1)] - c * Q[2]);
            R[static_cast<size_t>(i - 2)] = ctx.red(R[static_cast<size_t>(i - 2)] - c * Q[1]);
            R[static_cast<size_t>(i - 3)] = ctx.red(R[static_cast<size_t>(i - 3)] - c * Q[0]);
        }
        Poly r1 = {R.size() > 0 ? R[0] : BigInt(0), R.size() > 1 ? R[1] : BigInt(0),
                   R.size() > 2 ? R[2] : BigInt(0)};
        Poly out(std::max<size_t>(R.size() >= 3 ? R.size() - 3 : 1, 5), BigInt(0));
        for (size_t i = 3; i < R.size(); ++i) out[i - 3] = R[i];
        Poly tr = ctx.mul(t, r1);
        Poly q2, beta2;
        ctx.monic_divmod(tr, Q, q2, beta2);
        Poly alpha2 = ctx.add(ctx.mul(s, r1), ctx.mul(q2, dQ));
        for (size_t i = 0; i < alpha2.size() && i < out.size(); ++i)
            out[i] = ctx.red(out[i] + alpha2[i]);
        // + 2/(2k-1) * beta2'
        for (size_t i = 1; i < beta2.size(); ++i) {
            if (beta2[i].is_zero()) continue;
            BigInt term = ctx.div_tracked(ctx.red(BigInt(2) * BigInt(static_cast<long>(i)) * beta2[i]),
                                          2 * k - 1, maxloss);
            out[i - 1] = ctx.red(out[i - 1] + term);
        }
        return ctx.trim(out);
    };

    // degree reduction at level 0: [m x^(m-1) Q + 1/2 x^m Q'] dx/y ~ 0
    auto reduce_degree = [&](Poly R) -> Poly {
        BigInt inv2 = BigInt(2).invmod(ctx.M);
        for (long dd = ctx.deg(R); dd >= 2; dd = ctx.deg(R)) {
            long m = dd - 2;
            BigInt lead = R[static_cast<size_t>(dd)];
            BigInt coeff = ctx.div_tracked(ctx.red(BigInt(2) * lead), 2 * m + 3, maxloss);
            for (long i = 0; i <= 3; ++i) {
                if (m >= 1)
                    R[static_cast<size_t>(m - 1 + i)] = ctx.red(
                        R[static_cast<size_t>(m - 1 + i)] - coeff * BigInt(m) * Q[static_cast<size_t>(i)]);
                if (i <= 2)
                    R[static_cast<size_t>(m + i)] =
                        ctx.red(R[static_cast<size_t>(m + i)] -
                                coeff * inv2 * dQ[static_cast<size_t>(i)]);
            }
            R.resize(static_cast<size_t>(dd), BigInt(0));
            if (ctx.deg(R) >= dd) throw DomainError("kedlaya: degree reduction stalled");
        }
        return R;
    };

    // D = Q(x^p) - Q(x)^p and Q^p
    Poly D, Qp_pow;
    {
        Poly Qxp(static_cast<size_t>(3 * p + 1), BigInt(0));
        for (long i = 0; i <= 3; ++i) Qxp[static_cast<size_t>(i * p)] = Q[static_cast<size_t>(i)];
        Poly acc = {BigInt(1)};
        Poly base = Q;
        long e = p;
        while (e) {
            if (e & 1) acc = ctx.mul(acc, base);
            e >>= 1;
            if (e) base = ctx.mul(base, base);
        }
        Qp_pow = acc;
        D = ctx.sub(Qxp, Qp_pow);
    }

    // binom(-1/2, j) = (-1)^j binom(2j,j)/4^j
    std::vector<BigInt> binom(static_cast<size_t>(J + 1));
    {
        BigInt b(1);
        BigInt inv4 = BigInt(4).invmod(ctx.M);
        BigInt pw(1);
        for (long j = 0; j <= J; ++j) {
            BigInt v = ctx.red(b.mod(ctx.M) * pw);
            binom[static_cast<size_t>(j)] = (j % 2 == 0) ? v : ctx.red(ctx.M - v);
            b = (b * BigInt(2) * BigInt(2 * j + 1)).divexact(BigInt(j + 1));
            pw = ctx.red(pw * inv4);
        }
    }

    FrobeniusData out;
    PadicNumber cols[2][2];
    for (int form = 0; form < 2; ++form) {
        long e = p * (form + 1) - 1;
        // S = p x^e sum_j binom_j D^j Q^(p(J-j)) at the top level
        Poly S(static_cast<size_t>(e + 1), BigInt(0));
        S[static_cast<size_t>(e)] = ctx.red(BigInt(p) * binom[static_cast<size_t>(J)]);
        Poly W = {BigInt(1)};
        for (long j = J - 1; j >= 0; --j) {
            W = ctx.mul(W, Qp_pow);
            S = ctx.mul(S, D);
            BigInt cj = ctx.red(BigInt(p) * binom[static_cast<size_t>(j)]);
            if (S.size() < W.size() + static_cast<size_t>(e))
                S.resize(W.size() + static_cast<size_t>(e), BigInt(0));
            for (size_t i = 0; i < W.size(); ++i)
                S[i + static_cast<size_t>(e)] = ctx.red(S[i + static_cast<size_t>(e)] + cj * W[i]);
            S = ctx.trim(S);
        }
        long k_top = (p * (2 * J + 1) - 1) / 2;
        for (long k = k_top; k >= 1; --k) S = reduce_level(std::move(S), k);
        S = reduce_degree(S);
        S.resize(2, BigInt(0));
        long keep = nw - maxloss - 2;
        if (keep < prec) throw PrecisionError("kedlaya: guard digits exhausted");
        cols[form][0] = PadicNumber::from_integer(S[0].mod(p_power(p, prec)), p, prec);
        cols[form][1] = PadicNumber::from_integer(S[1].mod(p_power(p, prec)), p, prec);
    }
    out.m00 = cols[0][0];
    out.m10 = cols[0][1];
    out.m01 = cols[1][0];
    out.m11 = cols[1][1];

    out.ap = trace_of_frobenius(E, p);
    // verification at full requested precision: charpoly must be T^2 - ap T + p
    {
        PadicNumber tr = out.m00 + out.m11;
        PadicNumber det = out.m00 * out.m11 - out.m01 * out.m10;
        if (!(tr - PadicNumber::from_long(out.ap, p, prec)).is_zero() ||
            !(det - PadicNumber::from_long(p, p, prec)).is_zero())
            throw PrecisionError("kedlaya: verification failed at requested precision");
    }
    {
        long n = prec;
        PadicNumber a = out.m00 + out.m11;
        PadicNumber pp = PadicNumber::from_long(p, p, n);
        PadicNumber alpha = a;
        for (int it = 0; it < 2 * n + 8; ++it) {
            PadicNumber next = a - pp / alpha;
            if ((next - alpha).is_zero()) {
                alpha = next;
                break;
            }
            alpha = next;
        }
        out.unit_root = alpha;
        PadicNumber v0a = out.m01, v1a = alpha - out.m00;
        PadicNumber v0b = alpha - out.m11, v1b = out.m10;
        PadicNumber v0 = v0a, v1 = v1a;
        if (v1b.valuation() < v1a.valuation()) {
            v0 = v0b;
            v1 = v1b;
        }
        PadicNumber b2p = PadicNumber::from_integer(E.b2(), p, n);
        if (v1.is_zero()) {
            out.e2 = b2p;  // diagonal: unit-root line is the x dx/y axis, c = 0
        } else {
            out.e2 = b2p - PadicNumber::from_long(12, p, n) * (v0 / v1);
        }
    }
    return out;
}
}  // namespace

FrobeniusData padic_E2_and_unit_root(const EllipticCurve& E, long p, long prec) {
    if (p < 5) throw UnsupportedError("kedlaya: p >= 5 required");
    if (E.disc().divisible_by(BigInt(p))) throw InputError("kedlaya: bad reduction at p");
    if (trace_of_frobenius(E, p) % p == 0) throw UnsupportedError("kedlaya: supersingular at p");
    long base = 8 + static_cast<long>(
                        std::ceil(std::log((double)(p * (2 * (prec + 3) + 3))) / std::log((double)p)));
    for (long guard : {base, base + 10, base + 24}) {
        try {
            return kedlaya_core(E, p, prec, guard);
        } catch (const PrecisionError&) {
        }
    }
    throw PrecisionError("kedlaya: guard escalation exhausted");
}

}  // namespace qc
