#include "qc/qcrun.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace qc {

bool is_locally_soluble(const BiellipticModel& X, long q) {
    ZPoly f = X.sextic();
    ZPoly frev(f.rbegin(), f.rend());
    return squares_represented(f, q) || squares_represented(poly_trim(frev), q);
}

std::optional<ECPointQ> search_nontorsion_point(const EllipticCurve& E, long num_bound,
                                                long den_bound) {
    auto G = ec_group_q(E);
    // (2y + a1 x + a3)^2 = 4 RHS + (a1 x + a3)^2
    ZPoly Dq = poly_add(poly_mul({E.a3, E.a1}, {E.a3, E.a1}),
                        poly_scale(ZPoly{E.a6, E.a4, E.a2, BigInt(1)}, BigInt(4)));
    for (long d = 1; d <= den_bound; ++d) {
        BigInt d2 = BigInt(d) * BigInt(d);
        for (long an = 0; an <= num_bound; ++an) {
            for (int sgn = 0; sgn < (an == 0 ? 1 : 2); ++sgn) {
                BigInt a = sgn ? BigInt(-an) : BigInt(an);
                if (!BigInt::gcd(a.abs(), BigInt(d)).is_one()) continue;
                Rational x(a, d2);
                Rational disc = poly_eval(Dq, x);
                if (disc.sign() < 0 || !disc.is_square()) continue;
                Rational r = disc.sqrt();
                Rational y = (r - Rational(E.a1) * x - Rational(E.a3)) / Rational(2);
                ECPointQ P = ECPointQ::affine(x, y);
                if (!G.on_curve(P)) continue;
                bool torsion = false;
                ECPointQ M = P;
                for (int m = 2; m <= 12; ++m) {
                    M = G.add(M, P);
                    if (M.inf) {
                        torsion = true;
                        break;
                    }
                }
                if (torsion) continue;
                return P;
            }
        }
    }
    return std::nullopt;
}

namespace {

}  // namespace

// sample q-adic points of X by residue refinement on x (affine patch) or
// u = 1/x (infinite patch); two depths per branch for value-stability checks
std::vector<XSample> sample_x_points(const BiellipticModel& X, long q, long prec, long cap) {
    std::vector<XSample> out;
    for (int patch = 0; patch < 2; ++patch) {
        ZPoly f;
        if (patch == 0)
            f = X.sextic();
        else {
            ZPoly g = X.sextic();
            f = ZPoly(g.rbegin(), g.rend());
            f = poly_trim(f);
        }
        struct Node {
            BigInt x0;
            long k;
        };
        std::vector<Node> work;
        if (patch == 0)
            for (long r = 0; r < q; ++r) work.push_back({BigInt(r), 1});
        else
            work.push_back({BigInt(0), 1});  // u = 0 mod q only: v(x) < 0 region
        long margin = (q == 2) ? 3 : 1;
        while (!work.empty()) {
            Node nd = work.back();
            work.pop_back();
            BigInt val = poly_eval(f, nd.x0);
            long v = val.is_zero() ? 1000000 : val.valuation(BigInt(q));
            if (!val.is_zero() && v <= nd.k - margin) {
                if (v % 2 != 0) continue;
                BigInt u = val.divexact(BigInt(q).pow(static_cast<unsigned long>(v)));
                bool sq = (q == 2) ? (u.mod(BigInt(8)) == BigInt(1)) : is_quadratic_residue(u, q);
                if (!sq) continue;
                // two samples at different depths on the branch
                for (long deep : {0L, 2L}) {
                    BigInt xv = nd.x0 + ((deep && nd.x0.is_zero() && patch == 1)
                                             ? p_power(q, nd.k + 1)
                                             : p_power(q, nd.k + deep) * BigInt(deep ? 1 : 0));
                    PadicNumber xp = PadicNumber::from_integer(xv, q, prec);
                    PadicNumber fv = PadicNumber::from_integer(poly_eval(f, xv), q, prec);
                    if (fv.is_zero()) continue;
                    try {
                        PadicNumber yp = fv.sqrt();
                        out.push_back({xp, yp, patch == 1});
                    } catch (const Error&) {
                    }
                }
                continue;
            }
            if (nd.k > cap) {
                // Weierstrass-adjacent branch: exact root of f nearby
                if (val.is_zero() && (patch == 0 || !nd.x0.is_zero())) {
                    PadicNumber xp = PadicNumber::from_integer(nd.x0, q, prec);
                    out.push_back({xp, PadicNumber::zero(q, prec), patch == 1});
                }
                continue;
            }
            for (long dgt = 0; dgt < q; ++dgt)
                work.push_back(
                    {(nd.x0 + BigInt(dgt) * p_power(q, nd.k)).mod(p_power(q, nd.k + 1)), nd.k + 1});
        }
    }
    return out;
}

namespace {

// local contribution of rho at q for one sample, units of log q; the LocalData
// carry transforms from the original associated models to q-minimal ones
std::optional<Rational> wq_of_sample(const BiellipticModel& X, const LocalData& ld1,
                                     const LocalData& ld2, const XSample& S, long q, long prec) {
    try {
        PadicNumber x = S.x, y = S.y;
        if (S.inf_patch) {
            if (x.is_zero()) return std::nullopt;  // exact infinity
            PadicNumber u = x;
            x = u.inverse();
            y = S.y * x * x * x;
        }
        if (x.is_zero()) return std::nullopt;
        ECPointP F1 = phi_padic(1, X, x, y);
        ECPointP F2 = phi_padic(2, X, x, y);
        if (F1.inf || F2.inf) return std::nullopt;
        Rational l1 = lambda_q_minimal(ld1, ld1.to_minimal.map_point(F1, q, prec));
        Rational l2 = lambda_q_minimal(ld2, ld2.to_minimal.map_point(F2, q, prec));
        long vx = x.is_zero() ? 0 : x.valuation();
        // w_q = -l1 + l2 + 2 log|x|_q = -l1 + l2 - 2 v_q(x)
        return -l1 + l2 + Rational(-2 * vx);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

std::optional<std::vector<Rational>> sampled_wq_values(const BiellipticModel& X,
                                                       const EllipticCurve& E1,
                                                       const EllipticCurve& E2, long q) {
    if (q > 2000) return std::nullopt;
    LocalData ld1 = tate_local_data(E1, BigInt(q));
    LocalData ld2 = tate_local_data(E2, BigInt(q));
    long vdisc = poly_discriminant(X.sextic()).valuation(BigInt(q));
    long cap = 2 * vdisc + 8;
    long prec = 4 * std::max<long>({ld1.vdisc_min, ld2.vdisc_min, vdisc, 4L}) + 40;
    auto samples = sample_x_points(X, q, prec, cap);
    if (samples.empty()) return std::vector<Rational>{};  // locally insoluble
    std::vector<Rational> vals;
    long undecided = 0;
    for (auto& S : samples) {
        auto w = wq_of_sample(X, ld1, ld2, S, q, prec);
        if (!w) {
            ++undecided;
            continue;
        }
        if (std::find(vals.begin(), vals.end(), *w) == vals.end()) vals.push_back(*w);
    }
    if (vals.empty()) return std::nullopt;
    (void)undecided;
    std::sort(vals.begin(), vals.end());
    return vals;
}

OmegaSet build_omega(const BiellipticModel& X, const EllipticCurve& E1, const EllipticCurve& E2,
                     long p, long prec, bool refine, const std::vector<long>& extra_primes,
                     const std::function<std::optional<std::vector<Rational>>(long)>& override_q) {
    OmegaSet om;
    std::set<long> S;
    for (auto& [q, e] : factorize(E1.disc()))
        if (q.fits_long()) S.insert(q.to_long());
    for (auto& [q, e] : factorize(E2.disc()))
        if (q.fits_long()) S.insert(q.to_long());
    for (auto& [q, e] : factorize(X.a0)) S.insert(q.to_long());
    for (auto& [q, e] : factorize(X.a6)) S.insert(q.to_long());
    for (long q : extra_primes) S.insert(q);
    S.erase(p);  // q != p in the local sums

    for (long q : S) {
        if (override_q) {
            if (auto ov = override_q(q)) {
                om.primes.push_back(q);
                om.omega_q[q] = *ov;
                om.refined[q] = true;
                continue;
            }
        }
        LocalData ld1 = tate_local_data(E1, BigInt(q));
        LocalData ld2 = tate_local_data(E2, BigInt(q));
        if (ld1.vdisc_min == 0 && ld2.vdisc_min == 0 && !X.a0.divisible_by(BigInt(q)) &&
            !X.a6.divisible_by(BigInt(q)) &&
            std::find(extra_primes.begin(), extra_primes.end(), q) == extra_primes.end())
            continue;  // good after minimization and no coefficient contribution
        auto W1 = wq_set(ld1.minimal_model, ld1);
        auto W2 = wq_set(ld2.minimal_model, ld2);
        long v0 = X.a0.valuation(BigInt(q));
        long v6 = X.a6.valuation(BigInt(q));
        std::set<Rational> oq;
        for (auto& w1 : W1)
            for (auto& w2 : W2)
                for (long n = -v6; n <= v0; ++n) {
                    if (n % 2 != 0) continue;
                    oq.insert(-w1 + w2 + Rational(-n));
                }
        for (auto& w1 : W1) oq.insert(Rational(-v0) - w1);
        for (auto& w2 : W2) oq.insert(Rational(v6) + w2);
        std::vector<Rational> vals(oq.begin(), oq.end());
        om.refined[q] = false;
        if (refine) {
            auto sampled = sampled_wq_values(X, E1, E2, q);
            if (sampled && !sampled->empty() && sampled->size() < vals.size()) {
                bool subset = true;
                for (auto& v : *sampled)
                    if (!oq.count(v)) subset = false;
                if (subset && sampled->size() == 1) {
                    vals = *sampled;
                    om.refined[q] = true;
                }
            }
        }
        om.primes.push_back(q);
        om.omega_q[q] = vals;
    }

    std::vector<SymLog> acc = {SymLog()};
    for (long q : om.primes) {
        std::vector<SymLog> next;
        for (auto& base : acc)
            for (auto& v : om.omega_q[q]) next.push_back(base + SymLog::single(q, v));
        std::set<SymLog> dedup(next.begin(), next.end());
        acc.assign(dedup.begin(), dedup.end());
    }
    om.symbolic = acc;
    for (auto& s : om.symbolic) om.realized.push_back(s.realize(p, prec));
    return om;
}

QCEngine::QCEngine(const BiellipticModel& X, long p, QCOptions opt) : X_(X), p_(p), opt_(opt) {
    X_.validate();
    nw_ = opt_.prec + 10 + (2 * opt_.prec + 8) / (p - 1) + 4;
}

void QCEngine::set_generator(int which, const ECPointQ& P) {
    (which == 1 ? s1_ : s2_).gen = GeneratorInfo{P, false, 0};
    (which == 1 ? s1_ : s2_).gen.point = P;
}

void QCEngine::set_alpha_external(const PadicNumber& a1, const PadicNumber& a2, long D,
                                  const std::vector<long>& extra) {
    alpha1_ = a1;
    alpha2_ = a2;
    field_D_ = D;
    extra_primes_ = extra;
    alphas_external_ = true;
}

void QCEngine::prepare() {
    if (prepared_) return;
    if (!is_good_ordinary(X_, p_)) throw InputError("qc: p is not good ordinary for the model");
    auto [E1, E2] = associated_curves(X_);
    s1_.original = E1;
    s2_.original = E2;
    s1_.minimal = global_minimal_model(E1, s1_.to_min);
    s2_.minimal = global_minimal_model(E2, s2_.to_min);
    s1_.hc = std::make_shared<HeightContext>(s1_.minimal, p_, opt_.prec);
    s2_.hc = std::make_shared<HeightContext>(s2_.minimal, p_, opt_.prec);

    if (!alphas_external_) {
        for (Side* sd : {&s1_, &s2_}) {
            if (sd->gen.point.inf) {
                auto found = search_nontorsion_point(sd->original);
                if (!found)
                    throw InputError("qc: no non-torsion point found on an associated curve");
                sd->gen.point = *found;
                sd->gen.from_search = true;
            }
            if (!ec_group_q(sd->original).on_curve(sd->gen.point))
                throw InputError("qc: supplied generator is not on the curve");
        }
        ECPointQ g1 = s1_.to_min.map_point(s1_.gen.point);
        ECPointQ g2 = s2_.to_min.map_point(s2_.gen.point);
        alpha1_ = alpha_constant(*s1_.hc, g1, 1);
        alpha2_ = alpha_constant(*s2_.hc, g2, 1);
    }
    omega_ = build_omega(X_, s1_.original, s2_.original, p_, opt_.prec, opt_.refine_omega,
                         extra_primes_, omega_override_);
    prepared_ = true;
}

namespace {

PSeries poly_to_series(const ZPoly& f, const PSeries& xs) {
    long p = xs.prime();
    long n = xs.len();
    long prec = xs[0].abs_prec() + 4;
    PSeries acc = PSeries::constant(PadicNumber::from_integer(f.empty() ? BigInt(0) : f.back(), p, prec), n, prec);
    for (long i = static_cast<long>(f.size()) - 2; i >= 0; --i) {
        acc = acc * xs;
        acc.at(0) = acc[0] + PadicNumber::from_integer(f[static_cast<size_t>(i)], p, prec);
    }
    return acc;
}

PSeries sqrt_series_branch(const PSeries& F, long ybar) {
    PSeries r = F.sqrt_series();
    if (r[0].unit_residue() != ybar % r[0].prime()) return -r;
    return r;
}

// divide num/den cancelling a common leading zero run
PSeries divide_cancel(PSeries num, PSeries den) {
    int guard = 0;
    while (num[0].is_zero() && den[0].is_zero() && guard < 4) {
        num = num.shifted_down(1);
        den = den.shifted_down(1);
        ++guard;
    }
    return num.divided_by(den);
}

PSeries odd_part(const PSeries& F) {
    PSeries r = F;
    for (long i = 0; i < r.len(); i += 2) r.at(i) = PadicNumber::zero(F.prime(), F[i].abs_prec());
    return r;
}

Laurent laurent_affine(const Laurent& X, const PadicNumber& shift, const PadicNumber& scale) {
    // (X + shift) * scale
    Laurent sh(0, PSeries::constant(shift, X.ser.len(), shift.abs_prec()));
    Laurent sum = X + sh;
    Laurent out = sum;
    out.ser = out.ser.scaled(scale);
    return out;
}

}  // namespace

QCEngine::TermWithLog QCEngine::eside_lambda_finite(const Side& side, const PSeries& X,
                                                    const PSeries& Y, PSeries& log_out,
                                                    bool weierstrass_disk) {
    const HeightContext& hc = *side.hc;
    long p = p_;
    long prec = X[0].abs_prec();
    auto cvr = [&](const Rational& v) { return PadicNumber::from_rational(v, p, prec); };
    PadicNumber u = cvr(side.to_min.u), r = cvr(side.to_min.r), s = cvr(side.to_min.s),
                t = cvr(side.to_min.t);
    PadicNumber iu2 = (u * u).inverse(), iu3 = (u * u * u).inverse();
    long n = X.len();
    PSeries rC = PSeries::constant(r, n, prec);
    PSeries Xm = (X - rC).scaled(iu2);
    PSeries Ym = (Y - (X - rC).scaled(s) - PSeries::constant(t, n, prec)).scaled(iu3);

    auto cvb = [&](const BigInt& v) { return PadicNumber::from_integer(v, p, prec); };
    PSeries eta = Ym + Ym + Xm.scaled(cvb(hc.curve().a1)) +
                  PSeries::constant(cvb(hc.curve().a3), n, prec);
    PSeries omega_s = divide_cancel(Xm.derivative(), eta);

    // Log series
    PSeries F = omega_s.antiderivative();
    if (weierstrass_disk) {
        log_out = odd_part(F);
    } else {
        bool done = false;
        for (long s0v = 0; s0v < 20 && !done; ++s0v) {
            try {
                PadicNumber s0 = PadicNumber::from_long(s0v, p, prec);
                ECPointP R0 = ECPointP::affine(Xm.eval(s0), Ym.eval(s0));
                PadicNumber L0 = hc.log_point(R0);
                log_out = F + PSeries::constant(L0 - F.eval(s0), n, prec);
                done = true;
            } catch (const Error&) {
            }
        }
        if (!done) throw DomainError("qc: Log constant not computable on disk");
    }

    // zeta and lambda by antidifferentiation with pointwise constants
    PSeries G = -((Xm + PSeries::constant(hc.c_constant().with_prec(prec), n, prec)) * omega_s)
                     .antiderivative();
    for (long s0v = 0; s0v < 20; ++s0v) {
        try {
            PadicNumber s0 = PadicNumber::from_long(s0v, p, prec);
            ECPointP R0 = ECPointP::affine(Xm.eval(s0), Ym.eval(s0));
            PadicNumber z0 = hc.zeta_point(R0);
            PadicNumber l0 = hc.lambda_p(R0);
            PSeries zeta_ser = G + PSeries::constant(z0 - G.eval(s0), n, prec);
            PSeries H = (zeta_ser * omega_s).antiderivative().scaled(
                PadicNumber::from_long(-2, p, prec));
            PSeries lam = H + PSeries::constant(l0 - H.eval(s0), n, prec);
            return {lam, 0};
        } catch (const Error&) {
        }
    }
    throw DomainError("qc: lambda constants not computable on disk");
}

QCEngine::TermWithLog QCEngine::eside_lambda_odisk(const Side& side, const Laurent& XL,
                                                   const Laurent& YL, PSeries& log_out) {
    const HeightContext& hc = *side.hc;
    long p = p_;
    long prec = XL.ser[0].abs_prec();
    auto cvr = [&](const Rational& v) { return PadicNumber::from_rational(v, p, prec); };
    PadicNumber u = cvr(side.to_min.u), r = cvr(side.to_min.r), s = cvr(side.to_min.s),
                t = cvr(side.to_min.t);
    Laurent Xm = laurent_affine(XL, -r, (u * u).inverse());
    Laurent mid = laurent_affine(XL, -r, s);  // s*(X - r)
    Laurent Ym = (YL - mid - Laurent(0, PSeries::constant(t, YL.ser.len(), prec)));
    Ym.ser = Ym.ser.scaled((u * u * u).inverse());
    Laurent tm_l = -(Xm / Ym);
    long T = XL.ser.len();
    PSeries tm = tm_l.to_series(T);
    if (!tm[0].is_zero()) throw DomainError("qc: O-disk parameter has nonzero constant term");

    log_out = hc.formal_log().truncated(T).compose(tm);
    PSeries U = hc.sigma_unit().truncated(T).compose(tm);
    PSeries V = tm.shifted_down(1);
    if (V[0].is_zero()) throw DomainError("qc: degenerate O-disk parametrization");
    PadicNumber logv0 = iwasawa_log(V[0]);
    PSeries ana = (PSeries::constant(logv0, T, prec) + V.log_of_unit_part() + U.log_of_unit_part())
                      .scaled(PadicNumber::from_long(-2, p, prec));
    return {ana, -2};
}

QCEngine::DiskSeries QCEngine::build_disk(const ResidueOrbit& orb, long T) {
    DiskSeries ds;
    ds.orbit = orb;
    long p = p_;
    long prec = nw_;
    auto cvb = [&](const BigInt& v) { return PadicNumber::from_integer(v, p, prec); };
    PadicNumber a6 = cvb(X_.a6), a0 = cvb(X_.a0);
    PSeries sid = PSeries::identity(p, T, prec);

    TermWithLog lam1, lam2, xterm;
    PSeries L1, L2;

    if (orb.rep.kind == ResiduePoint::Kind::Infinite) {
        ds.kind = DiskKind::Infinite;
        // u = 1/x = p*s ; y = u^-3 h(s), h = sqrt(a6 + a4 u^2 + a2 u^4 + a0 u^6)
        PSeries us = sid.scaled(PadicNumber::from_long(p, p, prec));
        ZPoly frev = {X_.a6, BigInt(0), X_.a4, BigInt(0), X_.a2, BigInt(0), X_.a0};
        ds.hser = sqrt_series_branch(poly_to_series(frev, us), orb.rep.y);
        PadicNumber ip = PadicNumber::from_long(p, p, prec).inverse();
        // phi1 lands at O: X1 = a6 x^2 = Laurent(-2, a6/p^2), Y1 = a6 y = Laurent(-3, a6 h/p^3)
        Laurent X1(-2, PSeries::constant(a6 * ip * ip, T, prec));
        Laurent Y1(-3, ds.hser.scaled(a6 * ip * ip * ip));
        lam1 = eside_lambda_odisk(s1_, X1, Y1, L1);
        // phi2 finite: X2 = a0 p^2 s^2, Y2 = a0 h(s)
        PSeries X2 = (sid * sid).scaled(a0 * PadicNumber::from_long(p * p, p, prec));
        PSeries Y2 = ds.hser.scaled(a0);
        lam2 = eside_lambda_finite(s2_, X2, Y2, L2, false);
        xterm = {PSeries::zeros(p, T, prec), 2};  // -2 log x = +2 log s
    } else if (orb.rep.y == 0) {
        ds.kind = DiskKind::Weierstrass;
        // y = p s; x solves f(x) = (p s)^2 around the exact root above x-bar
        ds.yser = sid.scaled(PadicNumber::from_long(p, p, prec));
        PSeries target = ds.yser * ds.yser;
        // exact Hensel root of f at the residue
        ZPoly f = X_.sextic();
        PadicNumber xc = PadicNumber::from_long(orb.rep.x, p, prec);
        {
            ZPoly df = poly_derivative(f);
            for (int it = 0; it < 64; ++it) {
                PadicNumber fv = poly_to_series(f, PSeries::constant(xc, 1, prec))[0];
                if (fv.is_zero()) break;
                PadicNumber dfv = poly_to_series(df, PSeries::constant(xc, 1, prec))[0];
                xc = xc - fv / dfv;
            }
        }
        PSeries xs = PSeries::constant(xc, T, prec);
        ZPoly df = poly_derivative(f);
        for (int it = 0; it < 16; ++it) {
            PSeries fv = poly_to_series(f, xs) - target;
            if (fv.is_zero_to_prec()) break;
            xs = xs - fv.divided_by(poly_to_series(df, xs));
        }
        ds.xser = xs;
        PSeries X1 = (xs * xs).scaled(a6);
        PSeries Y1 = ds.yser.scaled(a6);
        lam1 = eside_lambda_finite(s1_, X1, Y1, L1, true);
        PSeries xinv = xs.inverse();
        PSeries X2 = (xinv * xinv).scaled(a0);
        PSeries Y2 = (ds.yser * xinv * xinv * xinv).scaled(a0);
        lam2 = eside_lambda_finite(s2_, X2, Y2, L2, true);
        PSeries xlog = xs.log_of_unit_part() + PSeries::constant(iwasawa_log(xs[0]), T, prec);
        xterm = {xlog.scaled(PadicNumber::from_long(-2, p, prec)), 0};
    } else if (orb.rep.x == 0) {
        ds.kind = DiskKind::ZeroX;
        // x = p s exactly
        ds.xser = sid.scaled(PadicNumber::from_long(p, p, prec));
        ds.yser = sqrt_series_branch(poly_to_series(X_.sextic(), ds.xser), orb.rep.y);
        PSeries X1 = (ds.xser * ds.xser).scaled(a6);
        PSeries Y1 = ds.yser.scaled(a6);
        lam1 = eside_lambda_finite(s1_, X1, Y1, L1, false);
        PadicNumber ip = PadicNumber::from_long(p, p, prec).inverse();
        Laurent X2(-2, PSeries::constant(a0 * ip * ip, T, prec));
        Laurent Y2(-3, ds.yser.scaled(a0 * ip * ip * ip));
        lam2 = eside_lambda_odisk(s2_, X2, Y2, L2);
        xterm = {PSeries::zeros(p, T, prec), -2};  // -2 log x = -2 log s
    } else {
        ds.kind = DiskKind::Generic;
        ds.xser = PSeries::constant(PadicNumber::from_long(orb.rep.x, p, prec), T, prec) +
                  sid.scaled(PadicNumber::from_long(p, p, prec));
        ds.yser = sqrt_series_branch(poly_to_series(X_.sextic(), ds.xser), orb.rep.y);
        PSeries X1 = (ds.xser * ds.xser).scaled(a6);
        PSeries Y1 = ds.yser.scaled(a6);
        lam1 = eside_lambda_finite(s1_, X1, Y1, L1, false);
        PSeries xinv = ds.xser.inverse();
        PSeries X2 = (xinv * xinv).scaled(a0);
        PSeries Y2 = (ds.yser * xinv * xinv * xinv).scaled(a0);
        lam2 = eside_lambda_finite(s2_, X2, Y2, L2, false);
        PSeries xlog =
            ds.xser.log_of_unit_part() + PSeries::constant(iwasawa_log(ds.xser[0]), T, prec);
        xterm = {xlog.scaled(PadicNumber::from_long(-2, p, prec)), 0};
    }

    long logs_total = lam1.logs - lam2.logs + xterm.logs;
    if (logs_total != 0) throw DomainError("qc: log-singularity bookkeeping failed on disk");
    ds.rho = lam1.ser - lam2.ser + xterm.ser - (L1 * L1).scaled(alpha1_.with_prec(nw_)) +
             (L2 * L2).scaled(alpha2_.with_prec(nw_));
    return ds;
}

RunRecord QCEngine::run() {
    auto t_start = std::chrono::steady_clock::now();
    prepare();
    RunRecord rec;
    rec.label = X_.label;
    rec.model = X_;
    rec.p = p_;
    rec.prec = opt_.prec;
    rec.field_D = field_D_;
    rec.omega = omega_;
    rec.alpha1 = alpha1_;
    rec.alpha2 = alpha2_;
    auto render = [](const GeneratorInfo& g) {
        if (g.point.inf) return std::string("-");
        return "(" + g.point.x.to_string() + ", " + g.point.y.to_string() + ")" +
               (g.from_search ? " [search]" : "");
    };
    rec.gen1 = render(s1_.gen);
    rec.gen2 = render(s2_.gen);

    long T = opt_.truncation > 0 ? opt_.truncation : 2 * opt_.prec + 5;
    auto orbits = residue_points_mod_automorphism(X_, p_);
    std::vector<RecoveredPoint> raw;
    for (auto& orb : orbits) {
        DiskSeries ds = build_disk(orb, T);
        DiskRecord dr;
        dr.orbit = orb;
        dr.kind = ds.kind;
        bool need_double = false;
        for (int attempt = 0; attempt < 2; ++attempt) {
            dr.roots.clear();
            need_double = false;
            for (size_t oi = 0; oi < omega_.realized.size(); ++oi) {
                PSeries F = ds.rho - PSeries::constant(omega_.realized[oi].with_prec(nw_),
                                                       ds.rho.len(), nw_);
                std::vector<SeriesRoot> roots;
                try {
                    roots = series_roots_in_Zp(F);
                } catch (const PrecisionError&) {
                    continue;  // omega value indistinguishable: no isolated roots
                }
                for (auto& rt : roots) {
                    DiskRoot droot;
                    droot.s = rt.t;
                    droot.omega_index = static_cast<long>(oi);
                    droot.simple = rt.simple;
                    droot.boundary = rt.at_precision_boundary;
                    droot.multiplicity = rt.multiplicity;
                    if (!rt.simple) need_double = true;
                    dr.roots.push_back(droot);
                }
            }
            if (!need_double || attempt == 1) break;
            dr.truncation_doubled = true;
            ds = build_disk(orb, 2 * T);
        }
        for (auto& rt : dr.roots)
            if (!rt.simple) dr.nonsimple_flag = true;

        // reconstruct points
        for (size_t ri = 0; ri < dr.roots.size(); ++ri) {
            const auto& rt = dr.roots[ri];
            RecoveredPoint pt;
            pt.disk_index = static_cast<long>(rec.disks.size());
            pt.root_index = static_cast<long>(ri);
            pt.omega_index = rt.omega_index;
            pt.simple_root = rt.simple;
            pt.boundary_root = rt.boundary;
            if (ds.kind == DiskKind::Infinite) {
                if (rt.s.is_zero()) {
                    pt.infinite = true;
                    pt.inf_branch = (orb.rep.y < p_ - orb.rep.y) ? 1 : -1;
                    pt.x = PadicNumber::zero(p_, opt_.prec);
                    pt.y = PadicNumber::zero(p_, opt_.prec);
                } else {
                    PadicNumber u = rt.s * PadicNumber::from_long(p_, p_, nw_);
                    pt.x = u.inverse();
                    pt.y = ds.hser.eval(rt.s) * pt.x * pt.x * pt.x;
                }
            } else {
                pt.x = ds.xser.eval(rt.s);
                pt.y = ds.yser.eval(rt.s);
            }
            raw.push_back(pt);
        }
        rec.disks.push_back(std::move(dr));
    }

    // orbit expansion to individual points, then dedupe
    std::vector<RecoveredPoint> expanded;
    auto eq_pt = [&](const RecoveredPoint& a, const RecoveredPoint& b) {
        if (a.infinite != b.infinite) return false;
        if (a.infinite) return a.inf_branch == b.inf_branch;
        long cp = opt_.prec - 3;
        return (a.x - b.x).with_prec(cp).is_zero() && (a.y - b.y).with_prec(cp).is_zero();
    };
    for (auto& pt : raw) {
        std::vector<RecoveredPoint> images;
        if (pt.infinite) {
            RecoveredPoint m = pt;
            images.push_back(m);
            if (opt_.expand_orbits) {
                m.inf_branch = -m.inf_branch;
                m.from_orbit_expansion = true;
                images.push_back(m);
            }
        } else {
            images.push_back(pt);
            if (opt_.expand_orbits) {
                for (int sx : {1, -1})
                    for (int sy : {1, -1}) {
                        if (sx == 1 && sy == 1) continue;
                        RecoveredPoint m = pt;
                        if (sx < 0) m.x = -m.x;
                        if (sy < 0) m.y = -m.y;
                        m.from_orbit_expansion = true;
                        images.push_back(m);
                    }
            }
        }
        for (auto& im : images) {
            bool seen = false;
            for (auto& have : expanded)
                if (eq_pt(have, im)) seen = true;
            if (!seen) expanded.push_back(im);
        }
    }
    rec.candidates = std::move(expanded);
    rec.seconds =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t_start)
            .count() /
        1000.0;
    return rec;
}

PSeries QCEngine::disk_rho_series(const ResidueOrbit& orb, long truncation) {
    prepare();
    long T = truncation > 0 ? truncation : (opt_.truncation > 0 ? opt_.truncation : 2 * opt_.prec + 5);
    return build_disk(orb, T).rho;
}

PadicNumber QCEngine::rho_eval(const PadicNumber& x, const PadicNumber& y) {
    prepare();
    long T = opt_.truncation > 0 ? opt_.truncation : 2 * opt_.prec + 5;
    // reduce and find the orbit member
    auto orbits = residue_points_mod_automorphism(X_, p_);
    bool at_infinity = !x.is_zero() && x.valuation() < 0;
    long xr = 0, yr = 0;
    if (!at_infinity) {
        xr = x.is_zero() ? 0 : x.integer_rep().mod(BigInt(p_)).to_long();
        yr = y.is_zero() ? 0 : y.integer_rep().mod(BigInt(p_)).to_long();
    } else {
        // residue of the branch: y/x^3 mod p
        PadicNumber w = y / (x * x * x);
        yr = w.integer_rep().mod(BigInt(p_)).to_long();
    }
    for (auto& orb : orbits) {
        for (int sx : {1, -1})
            for (int sy : {1, -1}) {
                // does (sx*x, sy*y) reduce to orb.rep?
                long xi, yi;
                if (at_infinity) {
                    if (orb.rep.kind != ResiduePoint::Kind::Infinite) continue;
                    int flips = (sx < 0 ? 1 : 0) + (sy < 0 ? 1 : 0);
                    yi = (flips % 2 == 0) ? yr : (p_ - yr) % p_;
                    if (yi != orb.rep.y) continue;
                } else {
                    if (orb.rep.kind != ResiduePoint::Kind::Affine) continue;
                    xi = sx > 0 ? xr : (p_ - xr) % p_;
                    yi = sy > 0 ? yr : (p_ - yr) % p_;
                    if (xi != orb.rep.x || yi != orb.rep.y) continue;
                }
                PadicNumber xx = sx > 0 ? x : -x;
                PadicNumber yy = sy > 0 ? y : -y;
                DiskSeries ds = build_disk(orb, T);
                PadicNumber s = PadicNumber::zero(p_, nw_);
                switch (ds.kind) {
                    case DiskKind::Generic: {
                        PadicNumber x0 = ds.xser[0];
                        s = (xx - x0) / PadicNumber::from_long(p_, p_, nw_);
                        break;
                    }
                    case DiskKind::Weierstrass:
                        s = yy / PadicNumber::from_long(p_, p_, nw_);
                        break;
                    case DiskKind::ZeroX:
                        s = xx / PadicNumber::from_long(p_, p_, nw_);
                        break;
                    case DiskKind::Infinite:
                        s = xx.inverse() / PadicNumber::from_long(p_, p_, nw_);
                        break;
                }
                return ds.rho.eval(s);
            }
    }
    throw DomainError("rho_eval: point does not reduce into any disk");
}

PadicNumber QCEngine::rho_eval_infinite(int branch) {
    prepare();
    long T = opt_.truncation > 0 ? opt_.truncation : 2 * opt_.prec + 5;
    auto orbits = residue_points_mod_automorphism(X_, p_);
    for (auto& orb : orbits) {
        if (orb.rep.kind != ResiduePoint::Kind::Infinite) continue;
        DiskSeries ds = build_disk(orb, T);
        (void)branch;  // rho is automorphism-invariant; both branches agree
        return ds.rho.eval(PadicNumber::zero(p_, nw_));
    }
    throw DomainError("rho_eval_infinite: no infinite disk (a6 not a square mod p)");
}

long QCEngine::containment_valuation(const PadicNumber& x, const PadicNumber& y) {
    PadicNumber r = rho_eval(x, y);
    long best = -1000;
    for (auto& w : omega_.realized) {
        PadicNumber d = r - w;
        long v = d.is_zero() ? d.abs_prec() : d.valuation();
        best = std::max(best, v);
    }
    return best;
}

}  // namespace qc
