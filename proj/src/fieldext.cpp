#include "qc/fieldext.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "qc/recognize.hpp"

namespace qc {

std::string KElem::to_string() const {
    std::ostringstream os;
    os << a.to_string();
    if (!b.is_zero()) os << " + " << b.to_string() << "*sqrt(-" << D << ")";
    return os.str();
}

QuadImagField::QuadImagField(long d) : D(d) {
    if (d < 1) throw InputError("QuadImagField: D >= 1");
    BigInt sf = squarefree_part(BigInt(d));
    if (sf != BigInt(d)) throw InputError("QuadImagField: D must be squarefree");
    d_K = ((-d) % 4 == -3 || (-d) % 4 == 1) ? -d : -4 * d;
}

std::vector<long> QuadImagField::ramified_primes() const {
    std::vector<long> out;
    for (auto& [q, e] : factorize(BigInt(d_K)))
        if (q.fits_long()) out.push_back(q.to_long());
    return out;
}

bool split_check(long p, const QuadImagField& F) {
    if (p == 2) {
        if (F.d_K % 2 == 0) throw InputError("split_check: ramified prime");
        return ((F.d_K % 8) + 8) % 8 == 1;
    }
    if (F.d_K % p == 0) throw InputError("split_check: ramified prime");
    return is_quadratic_residue(BigInt(F.d_K).mod(BigInt(p)), p);
}

ECGroup<KElem> ec_group_k(const EllipticCurve& E, long D) {
    auto cv = [&](const BigInt& v) { return KElem{Rational(v), Rational(0), D}; };
    return ECGroup<KElem>(cv(E.a1), cv(E.a2), cv(E.a3), cv(E.a4), cv(E.a6));
}

ECPointP embed_point(const KPoint& P, long p, long prec, int branch) {
    if (P.inf) return ECPointP::infinity();
    PadicNumber rt = PadicNumber::from_long(-P.x.D, p, prec).sqrt();
    if (branch < 0) rt = -rt;
    auto emb = [&](const KElem& v) {
        return PadicNumber::from_rational(v.a, p, prec) +
               PadicNumber::from_rational(v.b, p, prec) * rt;
    };
    return ECPointP::affine(emb(P.x), emb(P.y));
}

PlaceValuation kelem_valuations(const KElem& x, long ell, long D) {
    QuadImagField F(D);
    PlaceValuation pv;
    if (x.is_zero()) throw DomainError("kelem_valuations of zero");
    bool ram = false;
    for (long r : F.ramified_primes())
        if (r == ell) ram = true;
    Rational Nm = x.norm();
    if (ram) {
        pv.kind = PlaceValuation::Kind::Ramified;
        pv.v1 = Nm.valuation(BigInt(ell));
        return pv;
    }
    bool split = (ell == 2) ? (((F.d_K % 8) + 8) % 8 == 1)
                            : is_quadratic_residue(BigInt(F.d_K).mod(BigInt(ell)), ell);
    if (!split) {
        pv.kind = PlaceValuation::Kind::Inert;
        long vn = Nm.valuation(BigInt(ell));
        if (vn % 2 != 0) throw DomainError("kelem_valuations: odd norm valuation at inert prime");
        pv.v1 = vn / 2;
        return pv;
    }
    pv.kind = PlaceValuation::Kind::Split;
    long vn = Nm.valuation(BigInt(ell));
    long prec = 24 + (vn < 0 ? -vn : vn);
    PadicNumber rt = PadicNumber::from_long(-D, ell, prec).sqrt();
    auto emb = [&](int br) {
        PadicNumber r = br > 0 ? rt : -rt;
        return PadicNumber::from_rational(x.a, ell, prec) +
               PadicNumber::from_rational(x.b, ell, prec) * r;
    };
    PadicNumber e1 = emb(1), e2 = emb(-1);
    pv.v1 = e1.is_zero() ? 1000000 : e1.valuation();
    pv.v2 = e2.is_zero() ? 1000000 : e2.valuation();
    return pv;
}

namespace {

// curve with K coefficients, for ramified-place minimal models
struct KCurve {
    KElem a1, a2, a3, a4, a6;
};

KCurve transform_kcurve(const KCurve& E, const KElem& u, const KElem& r, const KElem& s,
                        const KElem& t) {
    KElem u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u6 = u3 * u3;
    KElem two{Rational(2), Rational(0), u.D}, three{Rational(3), Rational(0), u.D};
    KCurve out;
    out.a1 = (E.a1 + two * s) / u;
    out.a2 = (E.a2 - s * E.a1 + three * r - s * s) / u2;
    out.a3 = (E.a3 + r * E.a1 + two * t) / u3;
    out.a4 = (E.a4 - s * E.a3 + two * r * E.a2 - (t + r * s) * E.a1 + three * r * r - two * s * t) / u4;
    out.a6 = (E.a6 + r * E.a4 + r * r * E.a2 + r * r * r - t * E.a3 - t * t - r * t * E.a1) / u6;
    return out;
}

long vw_ram(const KElem& x, long ell) {
    if (x.is_zero()) return 1000000;
    return x.norm().valuation(BigInt(ell));
}

KElem uniformizer(long ell, long D) {
    if (D % ell == 0 && ell != 2) return KElem{Rational(0), Rational(1), D};
    if (ell == 2) {
        if (D % 2 == 0) return KElem{Rational(0), Rational(1), D};
        return KElem{Rational(1), Rational(1), D};  // 1 + sqrt(-D), D odd (2 ramified)
    }
    throw DomainError("uniformizer: prime not ramified");
}

struct RamifiedModel {
    bool good = false;   // good reduction over K_w after minimalization
    long k = 0;          // u = pi^k
    KElem u{Rational(1), Rational(0), 0}, r{Rational(0), Rational(0), 0},
        s{Rational(0), Rational(0), 0}, t{Rational(0), Rational(0), 0};
};

// search a w-integral rescaling by pi^k of a model over the ramified completion
RamifiedModel try_ramified_scale(const EllipticCurve& E, long ell, long D, long k) {
    RamifiedModel out;
    out.u.D = out.r.D = out.s.D = out.t.D = D;
    if (k == 0) {
        out.good = true;
        out.u = KElem{Rational(1), Rational(0), D};
        return out;
    }
    KElem pi = uniformizer(ell, D);
    KElem u{Rational(1), Rational(0), D};
    for (long i = 0; i < k; ++i) u = u * pi;
    KCurve base{KElem{Rational(E.a1), Rational(0), D}, KElem{Rational(E.a2), Rational(0), D},
                KElem{Rational(E.a3), Rational(0), D}, KElem{Rational(E.a4), Rational(0), D},
                KElem{Rational(E.a6), Rational(0), D}};
    // residue search for r, s, t in O_K mod pi-powers
    long R1 = 2 * k + 1, S1 = k + 1, T1 = 3 * k + 1;  // depth of representatives (in pi-valuation)
    long reps_r = 1, reps_s = 1, reps_t = 1;
    for (long i = 0; i < (R1 + 1) / 2; ++i) reps_r *= ell;
    for (long i = 0; i < (S1 + 1) / 2; ++i) reps_s *= ell;
    for (long i = 0; i < (T1 + 1) / 2; ++i) reps_t *= ell;
    reps_r = std::min<long>(reps_r, 64);
    reps_s = std::min<long>(reps_s, 64);
    reps_t = std::min<long>(reps_t, 64);
    for (long ra = 0; ra < reps_r; ++ra)
        for (long rb = 0; rb < reps_r; ++rb)
            for (long sa = 0; sa < reps_s; ++sa)
                for (long sb = 0; sb < reps_s; ++sb)
                    for (long ta = 0; ta < reps_t; ++ta)
                        for (long tb = 0; tb < reps_t; ++tb) {
                            KElem r{Rational(ra), Rational(rb), D};
                            KElem s{Rational(sa), Rational(sb), D};
                            KElem t{Rational(ta), Rational(tb), D};
                            KCurve cand;
                            try {
                                cand = transform_kcurve(base, u, r, s, t);
                            } catch (const Error&) {
                                continue;
                            }
                            bool ok = true;
                            for (const KElem* c : {&cand.a1, &cand.a2, &cand.a3, &cand.a4, &cand.a6})
                                if (!c->is_zero() && vw_ram(*c, ell) < 0) ok = false;
                            if (!ok) continue;
                            out.good = true;
                            out.k = k;
                            out.u = u;
                            out.r = r;
                            out.s = s;
                            out.t = t;
                            return out;
                        }
    return out;
}

// highest attainable pi-power rescaling (w-minimal model over K_w)
RamifiedModel ramified_minimalize(const EllipticCurve& E, long ell, long D) {
    long vd = E.disc().valuation(BigInt(ell));
    for (long k = (2 * vd) / 12; k >= 1; --k) {
        RamifiedModel cand = try_ramified_scale(E, ell, D, k);
        if (cand.good) {
            cand.good = (2 * vd - 12 * k == 0);
            cand.k = k;
            return cand;
        }
    }
    RamifiedModel out = try_ramified_scale(E, ell, D, 0);
    out.good = (vd == 0);
    return out;
}

}  // namespace

namespace {

// element of the ramified completion K_w = Q_q(sqrt(-D)) as a + b sqrt(-D)
// with q-adic components; only valuations and residues are needed
struct KwElem {
    PadicNumber a, b;
    long D;

    bool is_zero() const { return a.is_zero() && b.is_zero(); }
    friend KwElem operator+(const KwElem& x, const KwElem& y) { return {x.a + y.a, x.b + y.b, x.D}; }
    friend KwElem operator-(const KwElem& x, const KwElem& y) { return {x.a - y.a, x.b - y.b, x.D}; }
    friend KwElem operator*(const KwElem& x, const KwElem& y) {
        PadicNumber Dv = PadicNumber::from_long(-x.D, x.a.prime(), x.a.abs_prec() + 8);
        return {x.a * y.a + x.b * y.b * Dv, x.a * y.b + x.b * y.a, x.D};
    }
    PadicNumber nrm() const {
        PadicNumber Dv = PadicNumber::from_long(x_D_pos(), a.prime(), a.abs_prec() + 8);
        return a * a + Dv * b * b;
    }
    long x_D_pos() const { return D; }
    long vw() const {
        PadicNumber n = nrm();
        return n.is_zero() ? 1000000 : n.valuation();
    }
};

KwElem kw_of(const KElem& v, long q, long prec) {
    return {PadicNumber::from_rational(v.a, q, prec), PadicNumber::from_rational(v.b, q, prec), v.D};
}
KwElem kw_of(const PadicNumber& v, long D) {
    return {v, PadicNumber::zero(v.prime(), v.abs_prec()), D};
}

// ramified place data for one (E-original, q, D): the Q_q-minimal model, the
// best pi-power rescaling over K_w, and w-level tests for Q_q-points
struct WPlace {
    long q, D, k = 0;
    LocalData ld;
    RamifiedModel rm;
    bool good = false;
    long prec;
    std::optional<std::pair<long, long>> singular_residue;  // of the w-minimal reduction

    // apply the Q_q-minimal transform then the pi-power transform
    std::pair<KwElem, KwElem> map_xy(KwElem x, KwElem y) const {
        auto divk = [&](const KwElem& z, const KwElem& w) {
            KwElem cj{w.a, -w.b, w.D};
            KwElem zz = z * cj;
            PadicNumber n = w.nrm();
            return KwElem{zz.a / n, zz.b / n, z.D};
        };
        {
            const ECTransform& T = ld.to_minimal;
            KwElem r = kw_of(KElem{T.r, Rational(0), D}, q, prec);
            KwElem s = kw_of(KElem{T.s, Rational(0), D}, q, prec);
            KwElem t = kw_of(KElem{T.t, Rational(0), D}, q, prec);
            KwElem u = kw_of(KElem{T.u, Rational(0), D}, q, prec);
            KwElem u2 = u * u, u3 = u2 * u;
            KwElem xm = divk(x - r, u2);
            KwElem ym = divk(y - s * (x - r) - t, u3);
            x = xm;
            y = ym;
        }
        if (k == 0) return {x, y};
        KwElem r = kw_of(rm.r, q, prec), s = kw_of(rm.s, q, prec), t = kw_of(rm.t, q, prec);
        KwElem u = kw_of(rm.u, q, prec);
        KwElem u2 = u * u, u3 = u2 * u;
        KwElem xp = divk(x - r, u2);
        KwElem yp = divk(y - s * (x - r) - t, u3);
        return {xp, yp};
    }
    std::pair<KwElem, KwElem> map_point(const ECPointP& P) const {
        return map_xy(kw_of(P.x, D), kw_of(P.y, D));
    }
    std::pair<KwElem, KwElem> map_kpoint(const KPoint& P) const {
        return map_xy(kw_of(P.x, q, prec), kw_of(P.y, q, prec));
    }
    bool nonsingular_kw(const std::pair<KwElem, KwElem>& xy) const {
        if (!xy.first.is_zero() && xy.first.vw() < 0) return true;
        if (!singular_residue) return true;
        return !(residue_of(xy.first) == singular_residue->first &&
                 residue_of(xy.second) == singular_residue->second);
    }
    Rational lambda_identity_kw(const std::pair<KwElem, KwElem>& xy) const {
        long v = xy.first.is_zero() ? 0 : xy.first.vw();
        return Rational(std::max<long>(0, -v));
    }

    long residue_of(const KwElem& v) const {
        // v must be w-integral; residue in F_q: the c with v_w(v - c) >= 1
        for (long c = 0; c < q; ++c) {
            KwElem d = v - kw_of(KElem{Rational(c), Rational(0), D}, q, prec);
            if (d.is_zero() || d.vw() >= 1) return c;
        }
        throw DomainError("w-residue not found");
    }

    bool nonsingular(const ECPointP& P) const {
        if (P.inf) return true;
        return nonsingular_kw(map_point(P));
    }

    // lambda_w (log-q units, f_w = 1) at a nonsingular-reducing point
    Rational lambda_identity(const ECPointP& P) const { return lambda_identity_kw(map_point(P)); }
};

WPlace make_wplace(const EllipticCurve& Eorig, long q, long D) {
    WPlace w;
    w.q = q;
    w.D = D;
    w.ld = tate_local_data(Eorig, BigInt(q));
    w.prec = 8 * std::max<long>(w.ld.vdisc_min, 2) + 60;
    long vd = w.ld.vdisc_min;
    if (vd == 0) {
        w.good = true;
        return w;
    }
    // best attainable pi-power rescaling: try k from floor(2 vd / 12) down
    for (long k = (2 * vd) / 12; k >= 1; --k) {
        RamifiedModel cand = try_ramified_scale(w.ld.minimal_model, q, D, k);
        if (cand.good) {
            w.rm = cand;
            w.k = k;
            w.good = (2 * vd - 12 * k == 0);
            break;
        }
    }
    // reduction singular point of the w-minimal model over F_q
    KCurve base{KElem{Rational(w.ld.minimal_model.a1), Rational(0), D},
                KElem{Rational(w.ld.minimal_model.a2), Rational(0), D},
                KElem{Rational(w.ld.minimal_model.a3), Rational(0), D},
                KElem{Rational(w.ld.minimal_model.a4), Rational(0), D},
                KElem{Rational(w.ld.minimal_model.a6), Rational(0), D}};
    KCurve wc = base;
    if (w.k > 0) wc = transform_kcurve(base, w.rm.u, w.rm.r, w.rm.s, w.rm.t);
    // residues of coefficients
    auto resid = [&](const KElem& v) -> long {
        KwElem kv = kw_of(v, q, w.prec);
        for (long c = 0; c < q; ++c) {
            KwElem d = kv - kw_of(KElem{Rational(c), Rational(0), D}, q, w.prec);
            if (d.is_zero() || d.vw() >= 1) return c;
        }
        throw DomainError("coefficient residue not found");
    };
    long a1 = resid(wc.a1), a2 = resid(wc.a2), a3 = resid(wc.a3), a4 = resid(wc.a4),
         a6 = resid(wc.a6);
    for (long xs = 0; xs < q && !w.singular_residue; ++xs)
        for (long ys = 0; ys < q && !w.singular_residue; ++ys) {
            long F = ((ys * ys + a1 * xs * ys + a3 * ys) -
                      (xs * xs * xs + a2 * xs * xs + a4 * xs + a6)) %
                     q;
            long Fx = ((a1 * ys) - (3 * xs * xs + 2 * a2 * xs + a4)) % q;
            long Fy = (2 * ys + a1 * xs + a3) % q;
            if (((F % q) + q) % q == 0 && ((Fx % q) + q) % q == 0 && ((Fy % q) + q) % q == 0)
                w.singular_residue = std::make_pair(xs, ys);
        }
    return w;
}

// lambda_w of a Q_q-point on a possibly bad w-minimal model via the multiple
// ladder with two identity-component anchors (log-q units, f_w = 1)
Rational lambda_w_ladder(const WPlace& w, const EllipticCurve& Eorig, const ECPointP& P) {
    if (w.nonsingular(P)) return w.lambda_identity(P);
    auto G = ec_group_p(Eorig, w.q, w.prec);
    long cap = 4 * w.ld.vdisc_min + 8;
    long i0 = 0;
    {
        ECPointP M = P;
        for (long i = 2; i <= cap; ++i) {
            M = G.add(M, P);
            if (M.inf) throw DomainError("lambda_w ladder: torsion sample");
            if (w.nonsingular(M)) {
                i0 = i;
                break;
            }
        }
    }
    if (i0 == 0) throw UnsupportedError("lambda_w ladder: component order not found");
    // u_i = i^2 g + D_i + (i-1) d2, D_1 = D_2 = 0,
    // D_{i+1} = 2 D_i - D_{i-1} + 2 c_i, c_i = v_w(x(iP) - x(P))
    std::vector<Rational> Ds = {Rational(0), Rational(0), Rational(0)};  // D_0 unused
    ECPointP Pi = G.dbl(P);
    ECPointP anchor1 = ECPointP::infinity(), anchor2 = ECPointP::infinity();
    for (long i = 2; i < 2 * i0; ++i) {
        if (Pi.inf) throw DomainError("lambda_w ladder: torsion inside ladder");
        auto [xi, yi] = w.map_point(Pi);
        auto [xp, yp] = w.map_point(P);
        (void)yi;
        (void)yp;
        KwElem dx = xi - xp;
        if (dx.is_zero()) throw DomainError("lambda_w ladder: collision");
        Rational ci(dx.vw());
        Ds.push_back(Rational(2) * Ds[static_cast<size_t>(i)] - Ds[static_cast<size_t>(i - 1)] +
                     Rational(2) * ci);
        if (i == i0 - 1) anchor1 = G.add(Pi, P);
        if (i == 2 * i0 - 1) anchor2 = G.add(Pi, P);
        Pi = G.add(Pi, P);
    }
    if (i0 == 2) {
        // short ladder: anchors are 2P and 4P, D_2 = 0 known, only d2 via pair (P, 3P)
        // u_3 + u_1 = 2u_2 + 2u_1 + 2c_2 is the generic relation; here use the
        // 2x2 solve below with D_i computed above (loop covered i = 2..2i0-1)
    }
    ECPointP A1 = G.mul(P, i0), A2 = G.mul(P, 2 * i0);
    if (A1.inf || A2.inf) throw DomainError("lambda_w ladder: torsion anchor");
    if (!w.nonsingular(A1) || !w.nonsingular(A2))
        throw DomainError("lambda_w ladder: anchor not on identity component");
    Rational u1v = w.lambda_identity(A1) - Ds[static_cast<size_t>(i0)];
    Rational u2v = w.lambda_identity(A2) - Ds[static_cast<size_t>(2 * i0)];
    // [ i0^2, i0-1 ; 4 i0^2, 2 i0-1 ] (g, d2)^T = (u1v, u2v)^T
    Rational a(i0 * i0), b(i0 - 1), c(4 * i0 * i0), d(2 * i0 - 1);
    Rational det = a * d - b * c;
    if (det.is_zero()) throw DomainError("lambda_w ladder: degenerate system");
    Rational g = (u1v * d - b * u2v) / det;
    (void)anchor1;
    (void)anchor2;
    return g;
}

// (1/2) lambda_w of a Q_q-point on E at the ramified place w | q, log-q units
Rational k_half_lambda_ramified(const EllipticCurve& Eorig, const ECPointP& R, const WPlace& w) {
    return lambda_w_ladder(w, Eorig, R) / Rational(2);
}

}  // namespace

std::optional<std::vector<Rational>> sampled_wq_values_K(const BiellipticModel& X,
                                                         const EllipticCurve& E1,
                                                         const EllipticCurve& E2, long q, long D) {
    long vdisc = poly_discriminant(X.sextic()).valuation(BigInt(q));
    long cap = 2 * vdisc + 8;
    long prec = 4 * std::max<long>(vdisc, 4L) + 40;
    WPlace w1 = make_wplace(E1, q, D);
    WPlace w2 = make_wplace(E2, q, D);
    auto samples = sample_x_points(X, q, prec, cap);
    if (samples.empty()) return std::vector<Rational>{};
    std::vector<Rational> vals;
    for (auto& S : samples) {
        PadicNumber x = S.x, y = S.y;
        if (S.inf_patch) {
            if (x.is_zero()) continue;
            PadicNumber u = x;
            x = u.inverse();
            y = S.y * x * x * x;
        }
        if (x.is_zero()) continue;
        ECPointP F1 = phi_padic(1, X, x, y);
        ECPointP F2 = phi_padic(2, X, x, y);
        if (F1.inf || F2.inf) continue;
        try {
            Rational l1 = k_half_lambda_ramified(E1, F1, w1);
            Rational l2 = k_half_lambda_ramified(E2, F2, w2);
            long vx = x.valuation();
            Rational w = -l1 + l2 + Rational(-2 * vx);
            if (std::find(vals.begin(), vals.end(), w) == vals.end()) vals.push_back(w);
        } catch (const UnsupportedError&) {
            throw;
        } catch (const Error&) {
            return std::nullopt;  // incomplete sampling: fail loud upstream
        }
    }
    if (vals.empty()) return std::nullopt;
    std::sort(vals.begin(), vals.end());
    return vals;
}

std::optional<KPoint> search_k_point(const EllipticCurve& E, long D, long num_bound,
                                     long den_bound) {
    if (!E.a1.is_zero() || !E.a3.is_zero())
        throw UnsupportedError("search_k_point: model must have a1 = a3 = 0");
    auto lift_q = [&](const ECPointQ& P) {
        return KPoint::affine(KElem{P.x, Rational(0), D}, KElem{P.y, Rational(0), D});
    };
    auto torsion_free = [&](const KPoint& P) {
        auto G = ec_group_k(E, D);
        KPoint M = P;
        for (int m = 2; m <= 16; ++m) {
            M = G.add(M, P);
            if (M.inf) return false;
        }
        return true;
    };
    if (auto P = search_nontorsion_point(E, num_bound, den_bound)) {
        KPoint kp = lift_q(*P);
        if (torsion_free(kp)) return kp;
    }
    // -D twist: y^2 = x^3 + d a2 x^2 + d^2 a4 x + d^3 a6, d = -D
    BigInt d(-D);
    EllipticCurve T{BigInt(0), E.a2 * d, BigInt(0), E.a4 * d * d, E.a6 * d * d * d};
    if (auto P = search_nontorsion_point(T, num_bound, den_bound)) {
        // (xt, yt) -> (xt/d, (yt/d^2) sqrt(d)); sqrt(-D) coefficient = yt/d^2 adjusted
        Rational xk = P->x / Rational(d);
        Rational yb = P->y / Rational(d * d);
        KPoint kp = KPoint::affine(KElem{xk, Rational(0), D}, KElem{Rational(0), yb, D});
        if (!ec_group_k(E, D).on_curve(kp)) throw DomainError("twist point mapping failed");
        if (torsion_free(kp)) return kp;
    }
    return std::nullopt;
}

PadicNumber k_height(const HeightContext& hc, const EllipticCurve& Emin, const KPoint& Pmin,
                     long D) {
    long p = hc.prime();
    long prec = hc.work_prec();
    QuadImagField F(D);
    if (F.d_K % p == 0) throw InputError("k_height: p ramified");
    if (!split_check(p, F)) throw InputError("k_height: p must split");
    auto G = ec_group_k(Emin, D);
    if (!G.on_curve(Pmin)) throw InputError("k_height: point not on curve");

    // relevant finite primes: bad primes, ramified primes, denominators
    std::set<long> primes;
    for (auto& [q, e] : factorize(Emin.disc()))
        if (q.fits_long()) primes.insert(q.to_long());
    for (long q : F.ramified_primes()) primes.insert(q);

    // ramified place data
    std::map<long, WPlace> wplaces;
    for (long q : F.ramified_primes()) wplaces.emplace(q, make_wplace(Emin, q, D));

    auto nonsingular_everywhere = [&](const KPoint& Q) -> bool {
        for (long ell : primes) {
            QuadImagField FF(D);
            bool ram = false;
            for (long r : FF.ramified_primes())
                if (r == ell) ram = true;
            if (ram) {
                if (Emin.disc().valuation(BigInt(ell)) == 0) continue;
                if (!wplaces.at(ell).nonsingular_kw(wplaces.at(ell).map_kpoint(Q))) return false;
                continue;
            }
            LocalData ld = tate_local_data(Emin, BigInt(ell));
            if (ld.vdisc_min == 0) continue;
            // map to the ell-minimal model (rational transform on K coordinates)
            auto cvK = [&](const Rational& v) { return KElem{v, Rational(0), D}; };
            KElem xm = (Q.x - cvK(ld.to_minimal.r)) / cvK(ld.to_minimal.u * ld.to_minimal.u);
            KElem ym = (Q.y - cvK(ld.to_minimal.s) * (Q.x - cvK(ld.to_minimal.r)) -
                        cvK(ld.to_minimal.t)) /
                       cvK(ld.to_minimal.u * ld.to_minimal.u * ld.to_minimal.u);
            auto sing = singular_point_mod_q(ld.minimal_model, BigInt(ell));
            if (!sing) continue;
            bool split =
                (ell == 2) ? (((FF.d_K % 8) + 8) % 8 == 1)
                           : is_quadratic_residue(BigInt(FF.d_K).mod(BigInt(ell)), ell);
            if (split) {
                long eprec = 40 + 4 * ld.vdisc_min;
                PadicNumber rt = PadicNumber::from_long(-D, ell, eprec).sqrt();
                for (int br : {1, -1}) {
                    PadicNumber rr = br > 0 ? rt : -rt;
                    PadicNumber xe = PadicNumber::from_rational(xm.a, ell, eprec) +
                                     PadicNumber::from_rational(xm.b, ell, eprec) * rr;
                    PadicNumber ye = PadicNumber::from_rational(ym.a, ell, eprec) +
                                     PadicNumber::from_rational(ym.b, ell, eprec) * rr;
                    if (!reduces_nonsingular(ld.minimal_model, ECPointP::affine(xe, ye)))
                        return false;
                }
            } else {
                // inert: w-integral iff both components are; residue in F_{ell^2}
                long va = xm.a.is_zero() ? 1000000 : xm.a.valuation(BigInt(ell));
                long vb = xm.b.is_zero() ? 1000000 : xm.b.valuation(BigInt(ell));
                if (std::min(va, vb) < 0) continue;  // pole: reduces to O
                auto redl = [&](const Rational& v) {
                    return (v.num() * v.den().invmod(BigInt(ell))).mod(BigInt(ell));
                };
                bool xs = redl(xm.a) == sing->first && redl(xm.b).is_zero();
                bool ys = redl(ym.a) == sing->second && redl(ym.b).is_zero();
                if (xs && ys) return false;
            }
        }
        return true;
    };

    // find m with both embeddings in the formal group and all places nonsingular
    long ordp;
    {
        ECPointP e1 = embed_point(Pmin, p, 8, 1);
        ordp = hc.order_of_reduction(e1);
        ECPointP e2 = embed_point(Pmin, p, 8, -1);
        ordp = std::lcm(ordp, hc.order_of_reduction(e2));
    }
    long m = 0;
    KPoint Q = KPoint::infinity();
    for (long k = 1; k <= 64; ++k) {
        long cand = ordp * k;
        KPoint M = G.mul(Pmin, cand);
        if (M.inf) throw DomainError("k_height: point is torsion");
        if (nonsingular_everywhere(M)) {
            m = cand;
            Q = M;
            break;
        }
    }
    if (m == 0) throw DomainError("k_height: no clearing multiple found");

    // h(Q) = -2 log sigma(t(i1 Q)) - 2 log sigma(t(i2 Q)) + sum_ell c_ell log ell
    PadicNumber h = PadicNumber::zero(p, prec);
    for (int br : {1, -1}) {
        ECPointP Qp = embed_point(Q, p, prec, br);
        if (Qp.inf || Qp.x.valuation() >= 0)
            throw DomainError("k_height: multiple not in the formal group");
        PadicNumber t = hc.t_of(Qp);
        h = h - PadicNumber::from_long(2, p, prec) * hc.log_sigma_at(t);
    }
    // denominator primes of the coordinates of Q as well
    std::set<long> cprimes = primes;
    for (const Rational* part : {&Q.x.a, &Q.x.b}) {
        if (part->den().is_one()) continue;
        for (auto& [q, e] : factorize(part->den()))
            if (q.fits_long()) cprimes.insert(q.to_long());
    }
    for (long ell : cprimes) {
        if (ell == p) continue;
        long c = 0;
        QuadImagField FF(D);
        bool ram = false;
        for (long r : FF.ramified_primes())
            if (r == ell) ram = true;
        LocalData ld = tate_local_data(Emin, BigInt(ell));
        auto cvK = [&](const Rational& v) { return KElem{v, Rational(0), D}; };
        KElem xm = (Q.x - cvK(ld.to_minimal.r)) / cvK(ld.to_minimal.u * ld.to_minimal.u);
        if (ram) {
            auto it = wplaces.find(ell);
            if (it == wplaces.end()) it = wplaces.emplace(ell, make_wplace(Emin, ell, D)).first;
            Rational lam = it->second.lambda_identity_kw(it->second.map_kpoint(Q));
            h = h + PadicNumber::from_rational(lam, p, prec) *
                        iwasawa_log_of_integer(BigInt(ell), p, prec);
            continue;
        }
        auto pv = kelem_valuations(xm.is_zero() ? KElem{Rational(1), Rational(0), D} : xm, ell, D);
        if (xm.is_zero()) {
            continue;
        }
        if (pv.kind == PlaceValuation::Kind::Split) {
            c = std::max<long>(0, -pv.v1) + std::max<long>(0, -pv.v2);
        } else {
            c = 2 * std::max<long>(0, -pv.v1);
        }
        if (c)
            h = h + PadicNumber::from_long(c, p, prec) * iwasawa_log_of_integer(BigInt(ell), p, prec);
    }
    return h / PadicNumber::from_long(m * m, p, prec);
}

PadicNumber alpha_constant_K(const HeightContext& hc, const EllipticCurve& Emin,
                             const KPoint& Pmin, long D) {
    PadicNumber h = k_height(hc, Emin, Pmin, D);
    ECPointP P1 = embed_point(Pmin, hc.prime(), hc.work_prec(), 1);
    PadicNumber L = hc.log_point(P1);
    if (L.is_zero()) throw DomainError("alpha_K: Log vanishes");
    return h / (PadicNumber::from_long(2, hc.prime(), hc.work_prec()) * L * L);
}

std::vector<std::pair<long, long>> eligible_pairs(const BiellipticModel& X, long p_bound,
                                                  long max_pairs) {
    static const std::vector<long> dset = {1,  2,  3,  5,  6,  7,  10, 11,
                                           13, 14, 15, 17, 19, 43, 67, 163};
    std::vector<std::pair<long, long>> out;
    for (long p : good_ordinary_primes(X, p_bound)) {
        for (long D : dset) {
            auto it = X.rank_over_K.find(D);
            if (it == X.rank_over_K.end() || it->second != 2) continue;
            QuadImagField F(D);
            bool ramified = false;
            for (long r : F.ramified_primes())
                if (r == p) ramified = true;
            if (ramified) continue;
            if (!split_check(p, F)) continue;
            out.push_back({D, p});
            if (static_cast<long>(out.size()) >= max_pairs) return out;
        }
    }
    return out;
}

RunRecord run_qc_over_K(const BiellipticModel& X, long D, long p, QCOptions opt,
                        std::optional<KPoint> gen1, std::optional<KPoint> gen2) {
    QuadImagField F(D);
    for (long r : F.ramified_primes())
        if (r == p) throw InputError("run_qc_over_K: p ramified in K");
    if (!split_check(p, F)) throw InputError("run_qc_over_K: p must split in K");
    if (!is_good_ordinary(X, p)) throw InputError("run_qc_over_K: p not good ordinary");

    auto [E1, E2] = associated_curves(X);
    ECTransform t1, t2;
    EllipticCurve M1 = global_minimal_model(E1, t1);
    EllipticCurve M2 = global_minimal_model(E2, t2);
    HeightContext hc1(M1, p, opt.prec), hc2(M2, p, opt.prec);

    auto prep_gen = [&](const EllipticCurve& Eorig, const ECTransform& tmin,
                        std::optional<KPoint> given) -> KPoint {
        KPoint P = KPoint::infinity();
        if (given)
            P = *given;
        else {
            auto found = search_k_point(Eorig, D);
            if (!found) throw InputError("run_qc_over_K: no non-torsion K-point found");
            P = *found;
        }
        // map to the minimal model
        auto cvK = [&](const Rational& v) { return KElem{v, Rational(0), D}; };
        KElem xm = (P.x - cvK(tmin.r)) / cvK(tmin.u * tmin.u);
        KElem ym = (P.y - cvK(tmin.s) * (P.x - cvK(tmin.r)) - cvK(tmin.t)) /
                   cvK(tmin.u * tmin.u * tmin.u);
        return KPoint::affine(xm, ym);
    };
    KPoint g1 = prep_gen(E1, t1, gen1);
    KPoint g2 = prep_gen(E2, t2, gen2);
    PadicNumber a1 = alpha_constant_K(hc1, M1, g1, D);
    PadicNumber a2 = alpha_constant_K(hc2, M2, g2, D);

    QCEngine eng(X, p, opt);
    eng.set_alpha_external(a1, a2, D, F.ramified_primes());
    auto ram = F.ramified_primes();
    eng.set_omega_override([&, ram](long q) -> std::optional<std::vector<Rational>> {
        if (std::find(ram.begin(), ram.end(), q) == ram.end()) return std::nullopt;
        auto v = sampled_wq_values_K(X, E1, E2, q, D);
        if (!v) throw UnsupportedError("run_qc_over_K: ramified Omega sampling incomplete at " +
                                       std::to_string(q));
        return v;
    });
    RunRecord rec = eng.run();
    rec.gen1 = "(" + g1.x.to_string() + ", " + g1.y.to_string() + ")";
    rec.gen2 = "(" + g2.x.to_string() + ", " + g2.y.to_string() + ")";
    return rec;
}

}  // namespace qc
