#include "qc/recognize.hpp"

#include <algorithm>
#include <sstream>

namespace qc {

std::optional<Rational> lift_rational(const PadicNumber& z) {
    if (z.is_zero()) return Rational(0);
    long p = z.prime();
    long v = z.valuation();
    // reconstruct the unit part, then restore the p-power
    PadicNumber u = z.mul_ppower(-v);
    long n = u.abs_prec();
    BigInt m = p_power(p, n);
    BigInt Z = u.integer_rep();
    BigInt bound = (m / BigInt(2)).isqrt();
    BigInt r0 = m, r1 = Z, t0(0), t1(1);
    while (r1 > bound) {
        BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        BigInt t2 = t0 - q * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if (t1.is_zero()) return std::nullopt;
    BigInt a = r1, b = t1;
    if (b.sign() < 0) {
        a = -a;
        b = -b;
    }
    if (b > bound || !BigInt::gcd(a.abs(), b).is_one()) return std::nullopt;
    if (b.divisible_by(BigInt(p))) return std::nullopt;
    // noise filter: a genuine reconstruction sits well inside the lattice bound
    if (a.abs() * b * BigInt(1024) > m) return std::nullopt;
    Rational val(a, b);
    if (v > 0)
        val = val * Rational(p_power(p, v));
    else if (v < 0)
        val = val / Rational(p_power(p, -v));
    // verify the congruence
    PadicNumber back = PadicNumber::from_rational(val, p, z.abs_prec());
    if (!(back - z).is_zero()) return std::nullopt;
    return val;
}

namespace {

BigInt round_rational(const Rational& r) {
    // nearest integer, ties toward zero
    BigInt twice = BigInt(2) * r.num() + r.den();  // 2r + 1 in den-units
    return twice.fdiv_q(BigInt(2) * r.den());
}

}  // namespace

void lll_reduce(std::vector<std::vector<BigInt>>& B) {
    // greedy pairwise (Lagrange-style) reduction; for these small dimensions
    // the planted relation is many orders shorter than the noise vectors, so
    // pairwise reduction to a fixpoint recovers it
    size_t n = B.size();
    auto dot = [](const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
        BigInt s(0);
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    auto norm2 = [&](const std::vector<BigInt>& a) { return dot(a, a); };
    bool changed = true;
    for (int pass = 0; pass < 400 && changed; ++pass) {
        changed = false;
        std::sort(B.begin(), B.end(), [&](const auto& a, const auto& b) {
            return norm2(a) < norm2(b);
        });
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                BigInt den = norm2(B[j]);
                if (den.is_zero()) continue;
                BigInt num = dot(B[i], B[j]);
                // q = round(num/den)
                BigInt q = (BigInt(2) * num + den).fdiv_q(BigInt(2) * den);
                if (q.is_zero()) continue;
                std::vector<BigInt> cand = B[i];
                for (size_t c = 0; c < cand.size(); ++c) cand[c] -= q * B[j][c];
                if (norm2(cand) < norm2(B[i])) {
                    B[i] = std::move(cand);
                    changed = true;
                }
            }
        }
    }
}

std::optional<ZPoly> algdep(const PadicNumber& z0, int maxdeg) {
    if (maxdeg > 4) throw InputError("algdep: maxdeg <= 4");
    if (z0.is_zero()) return ZPoly{BigInt(0), BigInt(1)};
    PadicNumber z = z0;
    bool inverted = false;
    if (z.valuation() < 0) {
        z = z.inverse();
        inverted = true;
    }
    long p = z.prime();
    long n = z.abs_prec();
    BigInt m = p_power(p, n);
    // acceptance bound on coefficient size
    BigInt norm_bound = p_power(p, (2 * n) / 3);
    for (int d = 1; d <= maxdeg; ++d) {
        // lattice rows: (e_i | S Z^i), plus (0 | S m): the weight S forces short
        // vectors to carry an exact relation in the last column
        const BigInt S = m;
        std::vector<std::vector<BigInt>> B;
        BigInt Zi(1);
        for (int i = 0; i <= d; ++i) {
            std::vector<BigInt> row(static_cast<size_t>(d + 2), BigInt(0));
            row[static_cast<size_t>(i)] = 1;
            row[static_cast<size_t>(d + 1)] = S * Zi;
            B.push_back(row);
            Zi = (Zi * z.integer_rep()).mod(m);
        }
        {
            std::vector<BigInt> row(static_cast<size_t>(d + 2), BigInt(0));
            row[static_cast<size_t>(d + 1)] = S * m;
            B.push_back(row);
        }
        lll_reduce(B);
        for (auto& row : B) {
            if (!row[static_cast<size_t>(d + 1)].is_zero()) continue;
            ZPoly cand(row.begin(), row.begin() + d + 1);
            cand = poly_trim(cand);
            if (poly_degree(cand) < 1) continue;
            BigInt l2(0);
            for (auto& c : cand) l2 += c * c;
            if (l2 > norm_bound) continue;
            cand = poly_primitive(cand);
            if (cand.back().sign() < 0) cand = poly_scale(cand, BigInt(-1));
            // verify z is a root modulo p^(n - few)
            PadicNumber acc = PadicNumber::zero(p, n);
            PadicNumber zp = PadicNumber::from_long(1, p, n);
            for (size_t i = 0; i < cand.size(); ++i) {
                acc = acc + PadicNumber::from_integer(cand[i], p, n) * zp;
                zp = zp * z;
            }
            if (!acc.is_zero() && acc.valuation() < n - 4) continue;
            // minimality: strip factors not vanishing at z
            for (auto& r : rational_roots(cand)) {
                ZPoly lin = {-r.num(), r.den()};
                PadicNumber lv = PadicNumber::from_rational(Rational(-r.num(), BigInt(1)), p, n) +
                                 PadicNumber::from_rational(Rational(r.den()), p, n) * z;
                if (lv.is_zero() || lv.valuation() >= n - 4) {
                    cand = lin;
                    break;
                }
                if (poly_degree(cand) > 1 && poly_divides(lin, cand))
                    cand = poly_divexact(cand, lin);
            }
            if (poly_degree(cand) > 2) {
                for (auto& qf : quadratic_factors(cand)) {
                    PadicNumber qv = PadicNumber::from_integer(qf[0], p, n) +
                                     PadicNumber::from_integer(qf[1], p, n) * z +
                                     PadicNumber::from_integer(qf[2], p, n) * z * z;
                    if (qv.is_zero() || qv.valuation() >= n - 4) {
                        cand = qf;
                        break;
                    }
                }
            }
            if (poly_degree(cand) == 2) {
                BigInt disc = cand[1] * cand[1] - BigInt(4) * cand[2] * cand[0];
                if (disc.sign() >= 0 && disc.is_perfect_square()) continue;  // reducible
            }
            if (inverted) {
                ZPoly rev(cand.rbegin(), cand.rend());
                cand = poly_primitive(poly_trim(rev));
                if (cand.back().sign() < 0) cand = poly_scale(cand, BigInt(-1));
            }
            return cand;
        }
    }
    return std::nullopt;
}

QuadElem operator+(const QuadElem& x, const QuadElem& y) { return {x.a + y.a, x.b + y.b, x.d}; }
QuadElem operator-(const QuadElem& x, const QuadElem& y) { return {x.a - y.a, x.b - y.b, x.d}; }
QuadElem operator*(const QuadElem& x, const QuadElem& y) {
    return {x.a * y.a + x.b * y.b * Rational(x.d), x.a * y.b + x.b * y.a, x.d};
}

PadicNumber QuadElem::embed(long p, long prec, int branch) const {
    PadicNumber av = PadicNumber::from_rational(a, p, prec);
    if (b.is_zero()) return av;
    PadicNumber rt = PadicNumber::from_integer(d, p, prec).sqrt();
    if (branch < 0) rt = -rt;
    return av + PadicNumber::from_rational(b, p, prec) * rt;
}

std::string QuadElem::to_string() const {
    if (b.is_zero()) return a.to_string();
    std::ostringstream os;
    os << a.to_string() << " + " << b.to_string() << "*sqrt(" << d.to_string() << ")";
    return os.str();
}

namespace {

std::string field_name(const std::vector<BigInt>& radicands) {
    if (radicands.empty()) return "Q";
    std::string s = "Q(";
    for (size_t i = 0; i < radicands.size(); ++i) {
        if (i) s += ",";
        s += "sqrt(" + radicands[i].to_string() + ")";
    }
    return s + ")";
}

// is the quadratic element a square in Q(sqrt(d))? If so return a root.
std::optional<QuadElem> quad_sqrt(const QuadElem& F) {
    // y = u + v sqrt(d): u^2 + v^2 d = A, 2uv = B
    const Rational& A = F.a;
    const Rational& B = F.b;
    Rational Nm = F.norm();
    if (Nm.sign() < 0 || !Nm.is_square()) return std::nullopt;
    Rational s = Nm.sqrt();
    for (int sgn = 0; sgn < 2; ++sgn) {
        Rational u2 = (A + (sgn ? -s : s)) / Rational(2);
        if (u2.sign() < 0 || !u2.is_square()) continue;
        Rational u = u2.sqrt();
        if (B.is_zero()) {
            if (u2 == A && !u.is_zero()) return QuadElem{u, Rational(0), F.d};
            // A - u^2 = v^2 d
            Rational v2 = A / Rational(F.d);
            if (u.is_zero() && v2.sign() >= 0 && v2.is_square())
                return QuadElem{Rational(0), v2.sqrt(), F.d};
            continue;
        }
        if (u.is_zero()) continue;
        Rational v = B / (Rational(2) * u);
        QuadElem cand{u, v, F.d};
        if ((cand * cand).a == A && (cand * cand).b == B) return cand;
    }
    return std::nullopt;
}

struct ExactXY {
    bool ok = false;
    std::vector<BigInt> radicands;
    ZPoly mpx, mpy;
    bool y_zero = false;
    bool x_rational = false, y_rational = false;
    Rational xr, yr;
};

// exact verification that the recognized coordinates satisfy y^2 = f(x)
ExactXY certify_exact(const BiellipticModel& X, const PadicNumber& xp, const PadicNumber& yp) {
    ExactXY out;
    ZPoly f = X.sextic();
    long p = xp.prime();
    long prec = xp.abs_prec();
    auto xr = lift_rational(xp);
    auto yr = lift_rational(yp);
    if (xr && yr) {
        if (poly_eval(f, *xr) == (*yr) * (*yr)) {
            out.ok = true;
            out.x_rational = out.y_rational = true;
            out.xr = *xr;
            out.yr = *yr;
            out.y_zero = yr->is_zero();
            out.mpx = {-xr->num(), xr->den()};
            out.mpy = {-yr->num(), yr->den()};
            return out;
        }
    }
    if (xr) {
        // y^2 = f(x) in Q: y quadratic (or zero)
        Rational F = poly_eval(f, *xr);
        if (F.num().bit_length() > 140 || F.den().bit_length() > 140) return out;
        if (yp.is_zero() && F.is_zero()) {
            out.ok = true;
            out.x_rational = true;
            out.xr = *xr;
            out.y_zero = true;
            out.mpx = {-xr->num(), xr->den()};
            out.mpy = {BigInt(0), BigInt(1)};
            return out;
        }
        if (!F.is_square() && !F.is_zero()) {
            // y = sqrt(F): field Q(sqrt(sf)) with sf = squarefree part of F
            BigInt sf = squarefree_part(F.num() * F.den());
            QuadElem y{Rational(0), Rational(0), sf};
            // F = g^2 sf: g = sqrt(F/sf)
            Rational g2 = F / Rational(sf);
            if (g2.sign() >= 0 && g2.is_square()) {
                y = QuadElem{Rational(0), g2.sqrt(), sf};
                // match the embedding branch
                for (int br : {1, -1}) {
                    try {
                        if ((y.embed(p, prec, br) - yp).with_prec(prec - 4).is_zero()) {
                            out.ok = true;
                            out.x_rational = true;
                            out.xr = *xr;
                            out.radicands = {sf};
                            out.mpx = {-xr->num(), xr->den()};
                            // minpoly of y: den^2 T^2 - num-part: y^2 = F
                            out.mpy = poly_primitive(ZPoly{-F.num(), BigInt(0), F.den()});
                            return out;
                        }
                    } catch (const Error&) {
                    }
                }
            }
        }
        return out;
    }
    // x algebraic of degree 2
    auto mpx = algdep(xp, 2);
    if (!mpx || poly_degree(*mpx) != 2) return out;
    BigInt c2 = (*mpx)[2], c1 = (*mpx)[1], c0 = (*mpx)[0];
    BigInt disc = c1 * c1 - BigInt(4) * c2 * c0;
    BigInt d1 = squarefree_part(disc);
    // x = (-c1 + t sqrt(d1)) / (2 c2), disc = t^2 d1
    Rational t2(disc, d1);
    if (!t2.is_square()) return out;
    Rational tq = t2.sqrt();
    QuadElem x{Rational(-c1, BigInt(2) * c2), tq / Rational(BigInt(2) * c2), d1};
    int xbr = 0;
    for (int br : {1, -1}) {
        try {
            if ((x.embed(p, prec, br) - xp).with_prec(prec - 4).is_zero()) xbr = br;
        } catch (const Error&) {
        }
    }
    if (xbr == 0) return out;
    // F = f(x) in Q(sqrt(d1))
    QuadElem F = QuadElem::rational(Rational(0), d1);
    for (long i = poly_degree(f); i >= 0; --i)
        F = F * x + QuadElem::rational(Rational(f[static_cast<size_t>(i)]), d1);
    if (yp.is_zero() && F.a.is_zero() && F.b.is_zero()) {
        out.ok = true;
        out.y_zero = true;
        out.radicands = {d1};
        out.mpx = *mpx;
        out.mpy = {BigInt(0), BigInt(1)};
        return out;
    }
    // y in Q(sqrt(d1))?
    if (auto y = quad_sqrt(F)) {
        for (int br : {1, -1}) {
            try {
                QuadElem yy = *y;
                if (br < 0) yy = QuadElem{-yy.a, -yy.b, yy.d};
                // the sqrt(d1) branch must match x's branch
                if ((yy.embed(p, prec, xbr) - yp).with_prec(prec - 4).is_zero()) {
                    out.ok = true;
                    out.radicands = {d1};
                    out.mpx = *mpx;
                    auto ympq = algdep(yp, 2);
                    out.mpy = ympq ? *ympq : ZPoly{};
                    return out;
                }
            } catch (const Error&) {
            }
        }
    }
    // biquadratic: y = (u + v sqrt(d1)) sqrt(d2)
    Rational Nm = F.norm();
    if (Nm.sign() >= 0 && Nm.is_square()) {
        Rational s = Nm.sqrt();
        std::vector<BigInt> d2cands;
        for (int sgn = 0; sgn < 2; ++sgn) {
            Rational w = (F.a + (sgn ? -s : s)) * Rational(2);
            if (!w.is_zero()) d2cands.push_back(squarefree_part(w.num() * w.den()));
            if (!w.is_zero()) d2cands.push_back(squarefree_part(w.num() * w.den() * d1));
        }
        for (const BigInt& d2 : d2cands) {
            if (d2.is_one() || d2 == d1) continue;
            QuadElem Fd2 = F * QuadElem::rational(Rational(BigInt(1), d2), d1);
            if (auto g = quad_sqrt(Fd2)) {
                // y = g sqrt(d2) with g in Q(sqrt(d1)): verify embedding
                for (int br2 : {1, -1}) {
                    try {
                        PadicNumber rt2 = PadicNumber::from_integer(d2, p, prec).sqrt();
                        if (br2 < 0) rt2 = -rt2;
                        PadicNumber ye = g->embed(p, prec, xbr) * rt2;
                        if ((ye - yp).with_prec(prec - 4).is_zero()) {
                            out.ok = true;
                            out.radicands = {d1, d2};
                            out.mpx = *mpx;
                            auto ymp = algdep(yp, 4);
                            out.mpy = ymp ? *ymp : ZPoly{};
                            return out;
                        }
                    } catch (const Error&) {
                    }
                }
            }
        }
    }
    return out;
}

ZPoly minpoly_sign_canonical(const ZPoly& f) {
    // lexicographically smaller of minpoly(x) and minpoly(-x)
    ZPoly g = f;
    for (size_t i = 0; i < g.size(); ++i)
        if ((g.size() - 1 - i) % 2 == 1) g[i] = -g[i];
    if (poly_degree(g) >= 0 && g.back().sign() < 0) g = poly_scale(g, BigInt(-1));
    auto less = [](const ZPoly& a, const ZPoly& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t i = a.size(); i-- > 0;)
            if (!(a[i] == b[i])) return a[i] < b[i];
        return false;
    };
    return less(f, g) ? f : g;
}

}  // namespace

RecognitionResult recognize_candidates(RunRecord& rec) {
    RecognitionResult rr;
    long p = rec.p;
    for (auto& cand : rec.candidates) {
        ClassifiedPoint cp;
        cp.rec = cand;
        cp.simple_root_certificate = cand.simple_root && !cand.boundary_root;
        if (cand.infinite) {
            // points at infinity: rational iff a6 is a rational square
            Rational a6r(rec.model.a6);
            if (a6r.is_square()) {
                cp.cls = PointClass::Rational;
                cp.exact_on_curve = true;
                cp.field = "Q";
            } else {
                BigInt sf = squarefree_part(rec.model.a6);
                cp.cls = PointClass::AlgebraicNonWeierstrass;
                cp.exact_on_curve = true;  // the two infinite points are defined over Q(sqrt(a6))
                cp.radicands = {sf};
                cp.field = field_name(cp.radicands);
                cp.minpoly_y = poly_primitive(ZPoly{-rec.model.a6, BigInt(0), BigInt(1)});
            }
            rr.points.push_back(cp);
            continue;
        }
        ExactXY ex = certify_exact(rec.model, cand.x, cand.y);
        if (ex.ok && ex.x_rational && ex.y_rational) {
            cp.cls = PointClass::Rational;
            cp.exact_on_curve = true;
            cp.field = "Q";
            cp.x_rat = ex.xr;
            cp.y_rat = ex.yr;
            cp.minpoly_x = ex.mpx;
            cp.minpoly_y = ex.mpy;
        } else if (ex.ok) {
            cp.cls = ex.y_zero ? PointClass::AlgebraicWeierstrass : PointClass::AlgebraicNonWeierstrass;
            cp.exact_on_curve = true;
            cp.radicands = ex.radicands;
            cp.field = field_name(ex.radicands);
            cp.minpoly_x = ex.mpx;
            cp.minpoly_y = ex.mpy;
            if (ex.x_rational) cp.x_rat = ex.xr;
            if (ex.y_zero) cp.y_rat = Rational(0);
        } else {
            cp.cls = PointClass::Unrecognized;
        }
        rr.points.push_back(cp);
    }
    // galois/automorphism orbit grouping by canonicalized minimal polynomials
    std::vector<std::pair<std::string, long>> keys;
    long next_id = 0;
    for (auto& cp : rr.points) {
        std::ostringstream key;
        if (cp.cls == PointClass::Unrecognized) {
            key << "unrec-" << (cp.rec.infinite ? -1 : cp.rec.disk_index) << "-" << cp.rec.root_index
                << "-" << cp.rec.omega_index;
        } else {
            auto cx = minpoly_sign_canonical(cp.minpoly_x);
            auto cy = minpoly_sign_canonical(cp.minpoly_y);
            key << cp.field << "|";
            for (auto& c : cx) key << c << ",";
            key << "|";
            for (auto& c : cy) key << c << ",";
        }
        bool found = false;
        for (auto& [k, id] : keys)
            if (k == key.str()) {
                cp.orbit_id = id;
                found = true;
            }
        if (!found) {
            cp.orbit_id = next_id;
            keys.push_back({key.str(), next_id++});
        }
    }
    for (auto& cp : rr.points) {
        switch (cp.cls) {
            case PointClass::Rational: ++rr.n_rational; break;
            case PointClass::AlgebraicWeierstrass: ++rr.n_alg_weierstrass; break;
            case PointClass::AlgebraicNonWeierstrass: ++rr.n_alg_nonweier; break;
            case PointClass::Unrecognized: ++rr.n_unrecognized; break;
        }
    }
    rr.n_mock = static_cast<long>(rr.points.size()) - rr.n_rational;
    rec.n_rational = rr.n_rational;
    rec.n_mock = rr.n_mock;
    (void)p;
    return rr;
}

std::vector<WeierstrassCheck> validate_weierstrass_criteria(const BiellipticModel& X, long p,
                                                            const RecognitionResult& rr) {
    std::vector<WeierstrassCheck> out;
    ZPoly f = X.sextic();
    for (auto& qf : quadratic_factors(f)) {
        WeierstrassCheck wc;
        wc.factor = qf;
        BigInt disc = qf[1] * qf[1] - BigInt(4) * qf[2] * qf[0];
        wc.D = squarefree_part(disc);
        wc.ordinary_ok = is_good_ordinary(X, p);
        wc.qr_ok = is_quadratic_residue(wc.D.mod(BigInt(p)), p);
        wc.appeared = false;
        for (auto& cp : rr.points) {
            if (cp.cls != PointClass::AlgebraicWeierstrass) continue;
            if (poly_degree(cp.minpoly_x) != 2) continue;
            if (cp.minpoly_x == qf || poly_divides(cp.minpoly_x, qf)) wc.appeared = true;
        }
        out.push_back(wc);
    }
    return out;
}

}  // namespace qc
