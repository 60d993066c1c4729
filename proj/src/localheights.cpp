#include "qc/localheights.hpp"

#include <algorithm>

#include "qc/roots.hpp"

namespace qc {

SymLog SymLog::single(long q, const Rational& r) {
    SymLog s;
    if (!r.is_zero()) s.t_[q] = r;
    return s;
}

SymLog operator+(const SymLog& a, const SymLog& b) {
    SymLog r = a;
    for (auto& [q, c] : b.t_) {
        auto it = r.t_.find(q);
        if (it == r.t_.end())
            r.t_[q] = c;
        else
            it->second += c;
    }
    r.prune();
    return r;
}

SymLog operator-(const SymLog& a, const SymLog& b) { return a + (-b); }

SymLog SymLog::operator-() const {
    SymLog r = *this;
    for (auto& [q, c] : r.t_) c = -c;
    return r;
}

SymLog SymLog::scaled(const Rational& c) const {
    SymLog r = *this;
    for (auto& [q, v] : r.t_) v *= c;
    r.prune();
    return r;
}

bool SymLog::operator<(const SymLog& o) const {
    auto it = t_.begin();
    auto jt = o.t_.begin();
    for (; it != t_.end() && jt != o.t_.end(); ++it, ++jt) {
        if (it->first != jt->first) return it->first < jt->first;
        if (it->second != jt->second) return it->second < jt->second;
    }
    return t_.size() < o.t_.size();
}

void SymLog::prune() {
    for (auto it = t_.begin(); it != t_.end();) {
        if (it->second.is_zero())
            it = t_.erase(it);
        else
            ++it;
    }
}

PadicNumber SymLog::realize(long p, long prec) const {
    PadicNumber acc = PadicNumber::zero(p, prec);
    for (auto& [q, c] : t_) {
        acc = acc + PadicNumber::from_rational(c, p, prec + 4) * iwasawa_log_of_integer(BigInt(q), p, prec + 2);
    }
    return acc.with_prec(prec);
}

std::string SymLog::to_string() const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto& [q, c] : t_) {
        if (!first) s += " + ";
        s += c.to_string() + "*log(" + std::to_string(q) + ")";
        first = false;
    }
    return s;
}

namespace {

long q_of(const ECPointP& P) { return P.x.prime(); }

// lambda on nonsingular-reducing points: log max{1, |x|_q} in log q units
Rational lambda_nonsingular(const ECPointP& P) {
    if (P.inf) throw DomainError("lambda at O");
    if (P.x.is_zero()) return Rational(0);
    long v = P.x.valuation();
    if (v >= 0) return Rational(0);
    return Rational(-v);
}

// Hensel-lift a smooth residue point: Newton in y when F_y is a unit, else
// Newton in x (works uniformly, including q = 2)
ECPointP hensel_lift_point(const EllipticCurve& E, long xbar, long ybar, long q, long prec) {
    auto cv = [&](const BigInt& v) { return PadicNumber::from_integer(v, q, prec); };
    PadicNumber a1 = cv(E.a1), a2 = cv(E.a2), a3 = cv(E.a3), a4 = cv(E.a4), a6 = cv(E.a6);
    auto F = [&](const PadicNumber& x, const PadicNumber& y) {
        return y * y + a1 * x * y + a3 * y - ((x + a2) * x + a4) * x - a6;
    };
    auto Fy = [&](const PadicNumber& x, const PadicNumber& y) { return y + y + a1 * x + a3; };
    auto Fx = [&](const PadicNumber& x, const PadicNumber& y) {
        return a1 * y - (PadicNumber::from_long(3, q, prec) * x * x +
                         PadicNumber::from_long(2, q, prec) * a2 * x + a4);
    };
    PadicNumber x = PadicNumber::from_long(xbar, q, prec);
    PadicNumber y = PadicNumber::from_long(ybar, q, prec);
    if (!Fy(x, y).is_zero() && Fy(x, y).valuation() == 0) {
        for (int it = 0; it < 64; ++it) {
            PadicNumber f = F(x, y);
            if (f.is_zero()) break;
            y = y - f / Fy(x, y);
        }
        return ECPointP::affine(x, y);
    }
    if (!Fx(x, y).is_zero() && Fx(x, y).valuation() == 0) {
        for (int it = 0; it < 64; ++it) {
            PadicNumber f = F(x, y);
            if (f.is_zero()) break;
            x = x - f / Fx(x, y);
        }
        return ECPointP::affine(x, y);
    }
    throw DomainError("hensel_lift_point: singular residue point");
}

// identity-component auxiliary point with smooth reduction
ECPointP aux_smooth_point(const EllipticCurve& E, long q, long prec, long skip) {
    auto sing = singular_point_mod_q(E, BigInt(q));
    long found = 0;
    auto try_point = [&](long xr, long yr) -> ECPointP* {
        static thread_local ECPointP R;
        if (sing && BigInt(xr).mod(BigInt(q)) == sing->first &&
            BigInt(yr).mod(BigInt(q)) == sing->second)
            return nullptr;
        try {
            R = hensel_lift_point(E, xr, yr, q, prec);
            return &R;
        } catch (const Error&) {
            return nullptr;
        }
    };
    if (q == 2) {
        for (long xr = 0; xr < 2; ++xr)
            for (long yr = 0; yr < 2; ++yr) {
                auto m = [&](const BigInt& v) { return v.mod(BigInt(2)).to_long(); };
                long lhs = (yr + m(E.a1) * xr * yr + m(E.a3) * yr) % 2;
                long rhs = (xr + m(E.a2) * xr + m(E.a4) * xr + m(E.a6)) % 2;
                if (lhs != rhs) continue;
                if (auto* R = try_point(xr, yr))
                    if (found++ >= skip) return *R;
            }
        throw DomainError("no smooth auxiliary point found");
    }
    std::vector<long> root_of(static_cast<size_t>(q), -1);
    for (long t = 0; t < q; ++t)
        if (root_of[static_cast<size_t>(t * t % q)] < 0) root_of[static_cast<size_t>(t * t % q)] = t;
    ZPoly rhs_poly = {E.b6(), BigInt(2) * E.b4(), E.b2(), BigInt(4)};
    BigInt inv2 = BigInt(2).invmod(BigInt(q));
    for (long xr = 0; xr < q; ++xr) {
        long rhs = poly_eval(rhs_poly, BigInt(xr)).mod(BigInt(q)).to_long();
        long r = root_of[static_cast<size_t>(rhs)];
        if (r < 0) continue;
        for (long eta : {r, (q - r) % q}) {
            long yr = ((BigInt(eta) - E.a1 * BigInt(xr) - E.a3) * inv2).mod(BigInt(q)).to_long();
            if (auto* R = try_point(xr, yr)) {
                if (found++ >= skip) return *R;
            }
            if (eta == 0) break;
        }
    }
    throw DomainError("no smooth auxiliary point found");
}

Rational lambda_singular_ladder(const LocalData& ld, const ECPointP& P);

Rational lambda_any(const LocalData& ld, const ECPointP& P, int depth) {
    (void)depth;
    if (reduces_nonsingular(ld.minimal_model, P)) return lambda_nonsingular(P);
    return lambda_singular_ladder(ld, P);
}

// lambda on a singular component via the multiple ladder: with u_i = lambda(iP)
// and the law l(A+B)+l(A-B) = 2l(A)+2l(B)+2v(x_A - x_B), u_i = i^2 g + d_i where
// d_1 = 0, d_2 comes from pairing with an identity-component point, and
// d_{i+1} = 2 d_i - d_{i-1} + 2 v(x(iP)-x(P)). The first nonsingular multiple
// pins g. Values on a singular component are constant, so the relations close.
Rational lambda_singular_ladder(const LocalData& ld, const ECPointP& P) {
    const EllipticCurve& E = ld.minimal_model;
    long q = q_of(P);
    long prec = P.x.abs_prec();
    auto G = ec_group_p(E, q, prec);
    long cap = std::max<long>(2 * ld.vdisc_min + 6, 8);

    // io = order of the component of P
    long io = 0;
    {
        ECPointP M = P;
        for (long i = 2; i <= cap; ++i) {
            M = G.add(M, P);
            if (M.inf) throw DomainError("lambda ladder: sample is torsion");
            if (reduces_nonsingular(E, M)) {
                io = i;
                break;
            }
        }
    }
    if (io == 0) throw DomainError("lambda ladder: component order not found");

    for (long rtry = 0; rtry < 12; ++rtry) {
        try {
            ECPointP R = aux_smooth_point(E, q, prec, rtry);
            ECPointP P2 = G.add(P, R);
            if (P2.inf) continue;
            PadicNumber dx0 = P2.x - P.x;
            if (dx0.is_zero()) continue;
            Rational lamR = lambda_nonsingular(R);
            Rational c0(2 * dx0.valuation());
            if (io == 2) {
                ECPointP Sum = G.add(P, P2);  // 2P + R, nonsingular generically
                if (Sum.inf || !reduces_nonsingular(E, Sum)) continue;
                Rational lam_sum = lambda_nonsingular(Sum);
                return (lam_sum + lamR - c0) / Rational(4);
            }
            // d_2 from the aux pair: lambda(2P (+) R) = gamma_{2c} = u_2 by constancy
            Rational d2 = c0 - lamR;
            std::vector<Rational> d = {Rational(0), Rational(0), d2};  // d_0 unused, d_1 = 0
            ECPointP Pi = G.dbl(P);  // iP from i = 2
            bool bad = false;
            for (long i = 2; i < io; ++i) {
                PadicNumber dx = Pi.x - P.x;
                if (dx.is_zero()) {
                    bad = true;
                    break;
                }
                Rational ci(2 * dx.valuation());
                d.push_back(Rational(2) * d[static_cast<size_t>(i)] -
                            d[static_cast<size_t>(i - 1)] + ci);
                Pi = G.add(Pi, P);
            }
            if (bad) continue;
            // Pi is now io*P, nonsingular
            Rational u_io = lambda_nonsingular(Pi);
            return (u_io - d[static_cast<size_t>(io)]) / Rational(io * io);
        } catch (const Error&) {
            continue;
        }
    }
    throw DomainError("lambda ladder: auxiliary sampling exhausted");
}

}  // namespace

Rational lambda_q_minimal(const LocalData& ld, const ECPointP& Pmin) {
    return lambda_any(ld, Pmin, 0);
}

SymLog local_height_away(const EllipticCurve& E, const ECPointP& P, long q) {
    LocalData ld = tate_local_data(E, BigInt(q));
    ECPointP Pm = ld.to_minimal.map_point(P, q, P.x.abs_prec());
    return SymLog::single(q, lambda_q_minimal(ld, Pm));
}

bool squares_represented(const ZPoly& g, long q) {
    // residue refinement: does y^2 = g(x) have a solution with x in Z_q?
    struct Node {
        BigInt x0;
        long k;
    };
    std::vector<Node> stack = {{BigInt(0), 0}};
    // depth cap: beyond v(disc)-scale everything is decided
    long cap = 6;
    if (poly_degree(g) >= 1) {
        BigInt disc = poly_discriminant(g);
        if (!disc.is_zero()) cap = std::max<long>(6, 2 * disc.valuation(BigInt(q)) + 6);
    }
    std::vector<Node> work;
    for (long r = 0; r < q; ++r) work.push_back({BigInt(r), 1});
    while (!work.empty()) {
        Node nd = work.back();
        work.pop_back();
        BigInt val = poly_eval(g, nd.x0);
        if (val.is_zero()) return true;  // exact Weierstrass point
        long v = val.valuation(BigInt(q));
        long margin = (q == 2) ? 3 : 1;  // unit part needed mod 8 at q = 2
        if (v <= nd.k - margin) {
            // valuation determined on this branch
            if (v % 2 != 0) continue;
            BigInt u = val.divexact(BigInt(q).pow(static_cast<unsigned long>(v)));
            if (q == 2) {
                if (u.mod(BigInt(8)) == BigInt(1)) return true;
                continue;
            }
            if (is_quadratic_residue(u, q)) return true;
            continue;
        }
        if (nd.k > cap) {
            // x0 is within q^cap of a root of g; a nearby exact root gives y = 0
            // solutions; find roots of g in this class via the series machinery
            std::vector<PadicNumber> cs;
            long prec = cap + 12;
            ZPoly shifted = g;
            // g(x0 + q^k u) as polynomial in u
            // build via repeated synthetic shift then scale
            // (simple: evaluate through PSeries taylor shift)
            std::vector<PadicNumber> coeffs;
            for (auto& c : g) coeffs.push_back(PadicNumber::from_integer(c, q, prec));
            PSeries gp(q, coeffs);
            PSeries sh = taylor_shift(gp, PadicNumber::from_integer(nd.x0, q, prec));
            PSeries scaled = PSeries::zeros(q, sh.len(), 1);
            for (long i = 0; i < sh.len(); ++i) scaled.at(i) = sh[i].mul_ppower(i * nd.k);
            try {
                auto roots = series_roots_in_Zp(scaled);
                if (!roots.empty()) return true;
            } catch (const PrecisionError&) {
            }
            continue;
        }
        for (long d = 0; d < q; ++d)
            work.push_back({nd.x0 + BigInt(d) * p_power(q, nd.k), nd.k + 1});
    }
    return false;
}

std::vector<ECPointP> singular_branch_samples(const EllipticCurve& Emin, const LocalData& ld,
                                              long extra_depth) {
    long q = ld.q.to_long();
    auto sing = singular_point_mod_q(Emin, ld.q);
    if (!sing) return {};
    long depth_cap = ld.vdisc_min + extra_depth;
    long prec = 4 * ld.vdisc_min + 40;

    // points with x = x0: y from y^2 + (a1 x + a3) y - (x^3+a2x^2+a4x+a6) = 0,
    // discriminant Dq(x) = (a1 x + a3)^2 + 4(x^3 + a2 x^2 + a4 x + a6)
    ZPoly Dq = poly_add(
        poly_mul({Emin.a3, Emin.a1}, {Emin.a3, Emin.a1}),
        poly_scale(ZPoly{Emin.a6, Emin.a4, Emin.a2, BigInt(1)}, BigInt(4)));

    std::vector<ECPointP> out;
    auto push_sample = [&](const BigInt& x0exact, bool weierstrass_only) {
        PadicNumber x = PadicNumber::from_integer(x0exact, q, prec);
        BigInt dv = poly_eval(Dq, x0exact);
        PadicNumber a1 = PadicNumber::from_integer(Emin.a1, q, prec);
        PadicNumber a3 = PadicNumber::from_integer(Emin.a3, q, prec);
        PadicNumber two = PadicNumber::from_long(2, q, prec);
        if (weierstrass_only) {
            PadicNumber y = -(a1 * x + a3) / two;
            out.push_back(ECPointP::affine(x, y));
            return;
        }
        PadicNumber disc = PadicNumber::from_integer(dv, q, prec);
        PadicNumber y = (disc.sqrt() - a1 * x - a3) / two;
        out.push_back(ECPointP::affine(x, y));
    };

    struct Node {
        BigInt x0;
        long k;
    };
    std::vector<Node> work = {{sing->first, 1}};
    while (!work.empty()) {
        Node nd = work.back();
        work.pop_back();
        BigInt val = poly_eval(Dq, nd.x0);
        long v = val.is_zero() ? 1000000 : val.valuation(BigInt(q));
        long margin = (q == 2) ? 3 : 1;
        if (!val.is_zero() && v <= nd.k - margin) {
            if (v % 2 != 0) continue;
            BigInt u = val.divexact(BigInt(q).pow(static_cast<unsigned long>(v)));
            bool sq = (q == 2) ? (u.mod(BigInt(8)) == BigInt(1)) : is_quadratic_residue(u, q);
            if (!sq) continue;
            push_sample(nd.x0, false);
            continue;
        }
        if (nd.k > depth_cap) {
            // Dq has a deep/exact root here: q-adic Weierstrass point
            std::vector<PadicNumber> coeffs;
            for (auto& c : Dq) coeffs.push_back(PadicNumber::from_integer(c, q, prec));
            PSeries gp(q, coeffs);
            PSeries sh = taylor_shift(gp, PadicNumber::from_integer(nd.x0, q, prec));
            PSeries sc = PSeries::zeros(q, sh.len(), 1);
            for (long i = 0; i < sh.len(); ++i) sc.at(i) = sh[i].mul_ppower(i * nd.k);
            try {
                for (auto& rt : series_roots_in_Zp(sc)) {
                    if (rt.at_precision_boundary) continue;
                    // x = x0 + q^k * root
                    PadicNumber xr = PadicNumber::from_integer(nd.x0, q, prec) +
                                     rt.t.mul_ppower(nd.k);
                    BigInt xint = xr.integer_rep();
                    push_sample(xint, true);
                }
            } catch (const PrecisionError&) {
            }
            continue;
        }
        for (long d = 0; d < q; ++d)
            work.push_back({(nd.x0 + BigInt(d) * p_power(q, nd.k)).mod(p_power(q, nd.k + 1)), nd.k + 1});
    }
    return out;
}

std::vector<Rational> wq_set(const EllipticCurve& Emin, const LocalData& ld) {
    long q = ld.q.to_long();
    std::vector<Rational> W;
    // 0 attained iff an affine smooth F_q point exists
    {
        bool zero_attained = false;
        auto sing = singular_point_mod_q(Emin, ld.q);
        std::vector<int> qr(static_cast<size_t>(q), 0);
        for (long t = 0; t < q; ++t) qr[static_cast<size_t>((t * t) % q)] = 1;
        for (long x = 0; x < q && !zero_attained; ++x) {
            BigInt rhs = (poly_eval(ZPoly{Emin.b6(), BigInt(2) * Emin.b4(), Emin.b2(), BigInt(4)},
                                    BigInt(x)))
                             .mod(ld.q);
            bool has_y = rhs.is_zero() || qr[static_cast<size_t>(rhs.to_long())];
            if (!has_y) continue;
            if (sing && BigInt(x).mod(ld.q) == sing->first) {
                // x matches the singular point; the smooth partner y differs unless y = y_sing
                if (!rhs.is_zero()) zero_attained = true;  // two y-values, at most one singular
                continue;
            }
            zero_attained = true;
        }
        if (zero_attained) W.push_back(Rational(0));
    }
    if (ld.type == KodairaType::I0) return W;
    if (ld.type == KodairaType::In) {
        long N = ld.n;
        if (ld.split) {
            for (long j = 1; j < N; ++j) {
                Rational g(-BigInt(j) * BigInt(N - j), BigInt(N));
                if (std::find(W.begin(), W.end(), g) == W.end()) W.push_back(g);
            }
        } else if (N % 2 == 0) {
            Rational g(-BigInt(N), BigInt(4));
            if (std::find(W.begin(), W.end(), g) == W.end()) W.push_back(g);
        }
        std::sort(W.begin(), W.end());
        return W;
    }
    // additive: sample each singular branch
    for (auto& P : singular_branch_samples(Emin, ld)) {
        try {
            Rational g = lambda_q_minimal(ld, P);
            if (std::find(W.begin(), W.end(), g) == W.end()) W.push_back(g);
        } catch (const Error&) {
            // a degenerate sample; other samples on the same component cover it
        }
    }
    std::sort(W.begin(), W.end());
    return W;
}

}  // namespace qc
