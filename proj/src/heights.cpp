#include "qc/heights.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace qc {

namespace {

// w(t) = t^3 (1 + ...) solving w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3
PSeries solve_w(const EllipticCurve& E, long p, long len, long nw) {
    auto cv = [&](const BigInt& v) { return PSeries::constant(PadicNumber::from_integer(v, p, nw), len, nw); };
    PSeries t = PSeries::identity(p, len, nw);
    PSeries w = PSeries::zeros(p, len, nw);
    PSeries t3 = t * t * t;
    PSeries a1 = cv(E.a1), a2 = cv(E.a2), a3 = cv(E.a3), a4 = cv(E.a4), a6 = cv(E.a6);
    for (long it = 0; it < len + 2; ++it) {
        PSeries w2 = w * w;
        PSeries next = t3 + a1 * t * w + a2 * t * t * w + a3 * w2 + a4 * t * w2 + a6 * w2 * w;
        w = next;
    }
    return w;
}

}  // namespace

HeightContext::HeightContext(const EllipticCurve& Emin, long p, long prec)
    : E_(Emin), p_(p), n_(prec) {
    len_ = 2 * prec + 8;
    // guard: antiderivatives, exp denominators (len/(p-1)), log-series divisions
    nw_ = prec + 8 + len_ / (p - 1) + 4;
    Np_ = count_points_fp(Emin, p);
    frob_ = padic_E2_and_unit_root(Emin, p, prec + 6);
    // c = (a1^2 + 4 a2 - E2)/12
    PadicNumber a1p = to_padic(E_.a1), a2p = to_padic(E_.a2);
    c_ = (a1p * a1p + PadicNumber::from_long(4, p_, nw_) * a2p - frob_.e2) /
         PadicNumber::from_long(12, p_, nw_);

    wser_ = solve_w(E_, p_, len_, nw_);
    // x = t/w = t^-2 * xU, xU = t^3/w unit series
    PSeries w_shift = wser_.shifted_down(3);  // w/t^3, unit constant 1
    xU_ = w_shift.inverse();
    // eta = 2y + a1 x + a3 with y = -1/w: eta = t^-3*(-2 xU_y...)  compute via series:
    // dLog/dt = x'(t)/eta(t)
    // x(t) = t^-2 xU: x'(t) = t^-3 (-2 xU + t xU')
    PSeries xUp = xU_.derivative();
    PSeries tser = PSeries::identity(p_, len_, nw_);
    PSeries num = xU_.scaled(PadicNumber::from_long(-2, p_, nw_)) + tser * xUp;  // t^3 x'(t)
    // eta(t) = -2/w + a1 t^-2 xU + a3 = t^-3 [ -2 xU_w... ]: -2/w = -2 t^-3 (t^3/w) = t^-3 (-2 xU)
    auto cv = [&](const BigInt& v) { return PSeries::constant(PadicNumber::from_integer(v, p_, nw_), len_, nw_); };
    PSeries eta_t3 = xU_.scaled(PadicNumber::from_long(-2, p_, nw_)) + tser * cv(E_.a1) * xU_ +
                     tser * tser * tser * cv(E_.a3);  // t^3 * eta
    lamp_ = num.divided_by(eta_t3);  // = x'/eta, power series 1 + ...
    log_f_ = lamp_.antiderivative();
    if (!(log_f_[1] - PadicNumber::from_long(1, p_, nw_)).is_zero())
        throw DomainError("height context: formal log normalization failed");

    // zeta' = -(x + c) dLog/dt; x = t^-2 xU gives zeta = 1/t + Z(t):
    // the t^-2 coefficient of -(x + c) lamp integrates to +1/t, and the t^-1
    // coefficient (the residue of x omega) must vanish
    PSeries xl = xU_ * lamp_;
    if (!xl[1].is_zero()) throw DomainError("height context: residue of x omega nonzero");
    PSeries Z = PSeries::zeros(p_, len_, nw_);
    // terms k >= 2 of xl: -(xl_k) t^{k-2} integrate to -(xl_k)/(k-1) t^{k-1}
    for (long k = 2; k < len_ - 1; ++k)
        Z.at(k - 1) = -(xl[k] / PadicNumber::from_long(k - 1, p_, nw_));
    PSeries cl = lamp_.scaled(c_).antiderivative();
    zeta_reg_ = Z - cl;
    if (!zeta_reg_[0].is_zero()) throw DomainError("height context: zeta constant term nonzero");

    // sigma: dlog sigma/dt = zeta_f * lamp = (1/t + Z) lamp; sigma = t exp(V),
    // V' = (lamp - 1)/t + Z lamp  (power series since lamp = 1 + O(t))
    PSeries lm1 = lamp_;
    lm1.at(0) = lm1[0] - PadicNumber::from_long(1, p_, nw_);
    PSeries Vp = lm1.shifted_down(1) + zeta_reg_ * lamp_;
    PSeries V = Vp.antiderivative();
    sigma_u_ = V.exp_series();
}

PadicNumber HeightContext::t_of(const ECPointP& P) const {
    if (P.inf) throw DomainError("t_of: point at infinity");
    return -(P.x / P.y);
}

namespace {
// order of an affine point in E(F_p) using long arithmetic
struct FpPoint {
    bool inf = true;
    long x = 0, y = 0;
};

struct FpCurve {
    long p, a1, a2, a3, a4, a6;
    static long norm(long v, long p) { return ((v % p) + p) % p; }
    long inv(long v) const {
        long e = p - 2, base = norm(v, p), acc = 1;
        while (e) {
            if (e & 1) acc = acc * base % p;
            base = base * base % p;
            e >>= 1;
        }
        return acc;
    }
    FpPoint neg(const FpPoint& a) const {
        if (a.inf) return a;
        return {false, a.x, norm(-a.y - a1 * a.x - a3, p)};
    }
    FpPoint add(const FpPoint& A, const FpPoint& B) const {
        if (A.inf) return B;
        if (B.inf) return A;
        long lam;
        if (A.x == B.x) {
            long eta = norm(2 * A.y + a1 * A.x + a3, p);
            if (norm(A.y + B.y + a1 * A.x + a3, p) == 0) return {};
            lam = norm((3 * A.x % p * A.x + 2 * a2 * A.x + a4 - a1 * A.y) % p, p) * inv(eta) % p;
        } else {
            lam = norm(B.y - A.y, p) * inv(norm(B.x - A.x, p)) % p;
        }
        long nu = norm(A.y - lam * A.x % p, p);
        long x3 = norm(lam * lam % p + a1 * lam - a2 - A.x - B.x, p);
        long y3 = norm(-((lam + a1) * x3 % p) - nu - a3, p);
        return {false, x3, y3};
    }
    FpPoint mul(const FpPoint& A, long n) const {
        FpPoint acc{}, base = A;
        while (n) {
            if (n & 1) acc = add(acc, base);
            n >>= 1;
            if (n) base = add(base, base);
        }
        return acc;
    }
};
}  // namespace

long HeightContext::order_of_reduction(const ECPointP& P) const {
    if (P.inf || (!P.x.is_zero() && P.x.valuation() < 0)) return 1;
    FpCurve C{p_,
              E_.a1.mod(BigInt(p_)).to_long(),
              E_.a2.mod(BigInt(p_)).to_long(),
              E_.a3.mod(BigInt(p_)).to_long(),
              E_.a4.mod(BigInt(p_)).to_long(),
              E_.a6.mod(BigInt(p_)).to_long()};
    FpPoint A{false, P.x.is_zero() ? 0 : P.x.integer_rep().mod(BigInt(p_)).to_long(),
              P.y.is_zero() ? 0 : P.y.integer_rep().mod(BigInt(p_)).to_long()};
    for (long d = 1; d <= Np_; ++d) {
        if (Np_ % d != 0) continue;
        if (C.mul(A, d).inf) return d;
    }
    throw DomainError("order_of_reduction: no divisor order found");
}

long HeightContext::order_of_reduction(const ECPointQ& P) const {
    if (P.inf) return 1;
    if (!P.x.is_zero() && P.x.valuation(BigInt(p_)) < 0) return 1;
    return order_of_reduction(ec_point_to_padic(P, p_, 3));
}

PadicNumber HeightContext::log_f_at(const PadicNumber& t) const {
    if (!t.is_zero() && t.valuation() < 1) throw DomainError("formal log: |t| >= 1");
    return log_f_.eval(t);
}

PadicNumber HeightContext::sigma_at(const PadicNumber& t) const { return t * sigma_u_.eval(t); }

PadicNumber HeightContext::log_sigma_at(const PadicNumber& t) const {
    if (t.is_zero()) throw DomainError("log sigma at 0");
    return iwasawa_log(t) + iwasawa_log(sigma_u_.eval(t));
}

PadicNumber HeightContext::zeta_f_at(const PadicNumber& t) const {
    return t.inverse() + zeta_reg_.eval(t);
}

PadicNumber HeightContext::log_point(const ECPointP& P) const {
    if (P.inf) return PadicNumber::zero(p_, nw_);
    long m = order_of_reduction(P);
    auto G = group();
    ECPointP Q = G.mul(P, m);
    if (Q.inf) return PadicNumber::zero(p_, nw_);  // torsion
    PadicNumber t = t_of(Q);
    return log_f_at(t) / PadicNumber::from_long(m, p_, nw_);
}

PadicNumber HeightContext::psi_value(long m, const ECPointP& P) const {
    if (m < 1) throw DomainError("psi_value: m >= 1");
    auto cv = [&](const BigInt& v) { return PadicNumber::from_integer(v, p_, nw_); };
    const PadicNumber x = P.x, y = P.y;
    PadicNumber b2 = cv(E_.b2()), b4 = cv(E_.b4()), b6 = cv(E_.b6()), b8 = cv(E_.b8());
    std::vector<PadicNumber> psi(static_cast<size_t>(std::max<long>(m + 3, 6)));
    psi[0] = PadicNumber::zero(p_, nw_);
    psi[1] = cv(BigInt(1));
    psi[2] = y + y + cv(E_.a1) * x + cv(E_.a3);
    PadicNumber x2 = x * x, x3 = x2 * x, x4 = x3 * x;
    psi[3] = cv(BigInt(3)) * x4 + b2 * x3 + cv(BigInt(3)) * b4 * x2 + cv(BigInt(3)) * b6 * x + b8;
    PadicNumber x6 = x4 * x2, x5 = x4 * x;
    psi[4] = psi[2] * (cv(BigInt(2)) * x6 + b2 * x5 + cv(BigInt(5)) * b4 * x4 +
                       cv(BigInt(10)) * b6 * x3 + cv(BigInt(10)) * b8 * x2 +
                       (b2 * b8 - b4 * b6) * x + (b4 * b8 - b6 * b6));
    for (long k = 5; k <= m; ++k) {
        long h = k / 2;
        if (k % 2 == 1) {
            psi[static_cast<size_t>(k)] =
                psi[static_cast<size_t>(h + 2)] * psi[static_cast<size_t>(h)].pow_int(3) -
                psi[static_cast<size_t>(h - 1)] * psi[static_cast<size_t>(h + 1)].pow_int(3);
        } else {
            psi[static_cast<size_t>(k)] =
                (psi[static_cast<size_t>(h + 2)] * psi[static_cast<size_t>(h - 1)].pow_int(2) -
                 psi[static_cast<size_t>(h - 2)] * psi[static_cast<size_t>(h + 1)].pow_int(2)) *
                psi[static_cast<size_t>(h)] / psi[2];
        }
    }
    return psi[static_cast<size_t>(m)];
}

PadicNumber HeightContext::lambda_p(const ECPointP& P) const {
    if (P.inf) throw DomainError("lambda_p at O");
    long m = order_of_reduction(P);
    auto G = group();
    if (m == 1) {
        // P in the formal group
        return PadicNumber::from_long(-2, p_, nw_) * log_sigma_at(t_of(P));
    }
    ECPointP Q = G.mul(P, m);
    if (Q.inf) {
        // torsion: continue through the parallelogram with an auxiliary point
        // lambda(P) = [lambda(P+R) + lambda(P-R) - 2 lambda(R) + 2 log(x(P)-x(R))]/2
        for (long xr = 1; xr < p_; ++xr) {
            try {
                ZPoly rhs = {E_.b6(), BigInt(2) * E_.b4(), E_.b2(), BigInt(4)};
                BigInt v = poly_eval(rhs, BigInt(xr)).mod(BigInt(p_));
                if (v.is_zero() || !is_quadratic_residue(v, p_)) continue;
                PadicNumber x = PadicNumber::from_long(xr, p_, nw_);
                PadicNumber eta = (PadicNumber::from_integer(poly_eval(rhs, BigInt(xr)), p_, nw_)).sqrt();
                PadicNumber a1 = to_padic(E_.a1), a3 = to_padic(E_.a3);
                PadicNumber y = (eta - a1 * x - a3) / PadicNumber::from_long(2, p_, nw_);
                ECPointP R = ECPointP::affine(x, y);
                ECPointP S1 = G.add(P, R), S2 = G.add(P, G.neg(R));
                if (S1.inf || S2.inf) continue;
                if ((P.x - R.x).is_zero()) continue;
                // auxiliary point must not be torsion itself
                if (G.mul(R, order_of_reduction(R)).inf) continue;
                PadicNumber lr = lambda_p(R);
                PadicNumber l1 = lambda_p(S1), l2 = lambda_p(S2);
                PadicNumber corr = iwasawa_log(P.x - R.x);
                return (l1 + l2 - lr - lr + corr + corr) / PadicNumber::from_long(2, p_, nw_);
            } catch (const Error&) {
                continue;
            }
        }
        throw DomainError("lambda_p: no auxiliary point found");
    }
    PadicNumber t = t_of(Q);
    PadicNumber psi = psi_value(m, P);
    PadicNumber two = PadicNumber::from_long(2, p_, nw_);
    return (-two * log_sigma_at(t) + two * iwasawa_log(psi)) /
           PadicNumber::from_long(m * m, p_, nw_);
}

PadicNumber HeightContext::zeta_point(const ECPointP& P) const {
    if (P.inf) throw DomainError("zeta at O");
    long m = order_of_reduction(P);
    auto G = group();
    if (m == 1) return zeta_f_at(t_of(P));
    ECPointP Q = G.mul(P, m);
    if (Q.inf) throw DomainError("zeta_point at torsion");
    // walk a double-and-add chain, telescoping the addition law:
    // zeta(A+B) = zeta(A)+zeta(B) + (eta(A)-eta(B))/(2(x(A)-x(B)))
    // zeta(2A) = 2 zeta(A) + (6x^2 + b2 x + b4)/(2 eta)|_A
    PadicNumber b2 = to_padic(E_.b2()), b4 = to_padic(E_.b4());
    PadicNumber two = PadicNumber::from_long(2, p_, nw_);
    auto corr_dbl = [&](const ECPointP& A) {
        PadicNumber etaA = G.eta(A);
        return (PadicNumber::from_long(6, p_, nw_) * A.x * A.x + b2 * A.x + b4) / (two * etaA);
    };
    auto corr_add = [&](const ECPointP& A, const ECPointP& B) {
        return (G.eta(A) - G.eta(B)) / (two * (A.x - B.x));
    };
    // binary chain for m
    std::vector<int> bits;
    for (long k = m; k > 0; k >>= 1) bits.push_back(static_cast<int>(k & 1));
    std::reverse(bits.begin(), bits.end());
    ECPointP A = P;
    long coef = 1;
    PadicNumber S = PadicNumber::zero(p_, nw_);
    for (size_t i = 1; i < bits.size(); ++i) {
        S = two * S + corr_dbl(A);
        A = G.dbl(A);
        coef *= 2;
        if (bits[i]) {
            S = S + corr_add(A, P);
            A = G.add(A, P);
            coef += 1;
        }
    }
    if (coef != m) throw DomainError("zeta chain bookkeeping");
    // zeta_f(t(mP)) = m zeta(P) + S
    return (zeta_f_at(t_of(A)) - S) / PadicNumber::from_long(m, p_, nw_);
}

long clearing_multiple(const EllipticCurve& Emin, const ECPointQ& P) {
    long m = 1;
    for (auto& [q, e] : factorize(Emin.disc())) {
        ECGroup<Rational> G = ec_group_q(Emin);
        ECPointQ Q = P;
        long k = 1;
        while (!reduces_nonsingular(Emin, Q, q)) {
            Q = G.add(Q, P);
            ++k;
            if (k > 200) throw DomainError("clearing_multiple: runaway");
        }
        m = std::lcm(m, k);
    }
    return m;
}

PadicNumber canonical_height(const HeightContext& hc, const ECPointQ& Pmin) {
    if (Pmin.inf) throw DomainError("height of O");
    long p = hc.prime();
    long m_bad = clearing_multiple(hc.curve(), Pmin);
    long m_p = hc.order_of_reduction(Pmin);
    long m = std::lcm(m_bad, m_p);
    auto G = ec_group_q(hc.curve());
    ECPointQ Q = G.mul(Pmin, m);
    if (Q.inf) throw DomainError("height of torsion point");
    // denominator of x(Q) is an exact square
    BigInt den = Q.x.den();
    if (!den.is_perfect_square()) throw DomainError("height: x denominator not a square");
    BigInt d = den.isqrt();
    ECPointP Qp = ec_point_to_padic(Q, p, hc.work_prec());
    PadicNumber t = hc.t_of(Qp);
    PadicNumber two = PadicNumber::from_long(2, p, hc.work_prec());
    PadicNumber h =
        (-two * hc.log_sigma_at(t) + two * iwasawa_log_of_integer(d, p, hc.work_prec())) /
        PadicNumber::from_long(m * m, p, hc.work_prec());
    return h;
}

PadicNumber alpha_constant(const HeightContext& hc, const ECPointQ& Pmin, int field_degree) {
    PadicNumber h = canonical_height(hc, Pmin);
    PadicNumber L = hc.log_point(ec_point_to_padic(Pmin, hc.prime(), hc.work_prec()));
    if (L.is_zero()) throw DomainError("alpha: Log vanishes (torsion generator?)");
    return h / (PadicNumber::from_long(field_degree, hc.prime(), hc.work_prec()) * L * L);
}

PadicNumber half_log_via_involution(const PSeries& omega_pullback, const PadicNumber& s) {
    PSeries F = omega_pullback.antiderivative();
    PadicNumber half = PadicNumber::from_rational(Rational(BigInt(1), BigInt(2)), s.prime(),
                                                  s.abs_prec() + 4);
    return half * (F.eval(s) - F.eval(-s));
}

}  // namespace qc
