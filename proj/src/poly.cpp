#include "qc/poly.hpp"

#include <algorithm>
#include <map>

namespace qc {

long poly_degree(const ZPoly& f) {
    for (long i = static_cast<long>(f.size()) - 1; i >= 0; --i)
        if (!f[static_cast<size_t>(i)].is_zero()) return i;
    return -1;
}

ZPoly poly_trim(ZPoly f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
    return f;
}

ZPoly poly_add(const ZPoly& a, const ZPoly& b) {
    ZPoly r(std::max(a.size(), b.size()), BigInt(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return poly_trim(r);
}

ZPoly poly_sub(const ZPoly& a, const ZPoly& b) {
    ZPoly r(std::max(a.size(), b.size()), BigInt(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return poly_trim(r);
}

ZPoly poly_mul(const ZPoly& a, const ZPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, BigInt(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return poly_trim(r);
}

ZPoly poly_scale(const ZPoly& a, const BigInt& c) {
    ZPoly r(a);
    for (auto& x : r) x *= c;
    return poly_trim(r);
}

ZPoly poly_derivative(const ZPoly& f) {
    ZPoly r;
    for (size_t i = 1; i < f.size(); ++i) r.push_back(f[i] * BigInt(static_cast<long>(i)));
    return poly_trim(r);
}

BigInt poly_eval(const ZPoly& f, const BigInt& x) {
    BigInt r(0);
    for (long i = static_cast<long>(f.size()) - 1; i >= 0; --i) r = r * x + f[static_cast<size_t>(i)];
    return r;
}

Rational poly_eval(const ZPoly& f, const Rational& x) {
    Rational r(0);
    for (long i = static_cast<long>(f.size()) - 1; i >= 0; --i)
        r = r * x + Rational(f[static_cast<size_t>(i)]);
    return r;
}

BigInt poly_content(const ZPoly& f) {
    BigInt g(0);
    for (const auto& c : f) g = BigInt::gcd(g, c.abs());
    return g;
}

ZPoly poly_primitive(const ZPoly& f) {
    BigInt c = poly_content(f);
    if (c.is_zero() || c.is_one()) return poly_trim(f);
    ZPoly r(f);
    for (auto& x : r) x = x.divexact(c);
    return poly_trim(r);
}

bool poly_divides(const ZPoly& g0, const ZPoly& f0) {
    ZPoly f = poly_trim(f0), g = poly_trim(g0);
    if (g.empty()) return f.empty();
    if (f.empty()) return true;
    long df = poly_degree(f), dg = poly_degree(g);
    if (df < dg) return false;
    // pseudo-division then verify exactness
    const BigInt lg = g.back();
    ZPoly rem = f;
    ZPoly quot(static_cast<size_t>(df - dg + 1), BigInt(0));
    for (long k = df - dg; k >= 0; --k) {
        long dr = poly_degree(rem);
        if (dr < dg + k) continue;
        BigInt coef = rem[static_cast<size_t>(dg + k)];
        if (coef.is_zero()) continue;
        if (!coef.divisible_by(lg)) return false;
        BigInt q = coef.divexact(lg);
        quot[static_cast<size_t>(k)] = q;
        for (long i = 0; i <= dg; ++i)
            rem[static_cast<size_t>(i + k)] -= q * g[static_cast<size_t>(i)];
    }
    return poly_degree(rem) < 0;
}

ZPoly poly_divexact(const ZPoly& f0, const ZPoly& g0) {
    ZPoly f = poly_trim(f0), g = poly_trim(g0);
    if (g.empty()) throw DomainError("poly division by zero");
    long df = poly_degree(f), dg = poly_degree(g);
    if (df < dg) throw DomainError("poly_divexact: degree");
    const BigInt lg = g.back();
    ZPoly rem = f;
    ZPoly quot(static_cast<size_t>(df - dg + 1), BigInt(0));
    for (long k = df - dg; k >= 0; --k) {
        long dr = poly_degree(rem);
        if (dr < dg + k) continue;
        BigInt coef = rem[static_cast<size_t>(dg + k)];
        if (coef.is_zero()) continue;
        BigInt q = coef / lg;
        if (!(q * lg == coef)) throw DomainError("poly_divexact: inexact");
        quot[static_cast<size_t>(k)] = q;
        for (long i = 0; i <= dg; ++i)
            rem[static_cast<size_t>(i + k)] -= q * g[static_cast<size_t>(i)];
    }
    if (poly_degree(rem) >= 0) throw DomainError("poly_divexact: nonzero remainder");
    return poly_trim(quot);
}

BigInt poly_resultant(const ZPoly& f0, const ZPoly& g0) {
    ZPoly f = poly_trim(f0), g = poly_trim(g0);
    long m = poly_degree(f), n = poly_degree(g);
    if (m < 0 || n < 0) return BigInt(0);
    if (m == 0) return f[0].pow(static_cast<unsigned long>(n));
    if (n == 0) return g[0].pow(static_cast<unsigned long>(m));
    long N = m + n;
    // Sylvester matrix, then fraction-free (Bareiss) elimination
    std::vector<std::vector<BigInt>> M(static_cast<size_t>(N),
                                       std::vector<BigInt>(static_cast<size_t>(N), BigInt(0)));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j <= m; ++j) M[static_cast<size_t>(i)][static_cast<size_t>(i + j)] = f[static_cast<size_t>(m - j)];
    for (long i = 0; i < m; ++i)
        for (long j = 0; j <= n; ++j)
            M[static_cast<size_t>(n + i)][static_cast<size_t>(i + j)] = g[static_cast<size_t>(n - j)];
    BigInt denom(1);
    int sign = 1;
    for (long k = 0; k < N - 1; ++k) {
        // pivot
        if (M[static_cast<size_t>(k)][static_cast<size_t>(k)].is_zero()) {
            long piv = -1;
            for (long i = k + 1; i < N; ++i)
                if (!M[static_cast<size_t>(i)][static_cast<size_t>(k)].is_zero()) {
                    piv = i;
                    break;
                }
            if (piv < 0) return BigInt(0);
            std::swap(M[static_cast<size_t>(k)], M[static_cast<size_t>(piv)]);
            sign = -sign;
        }
        for (long i = k + 1; i < N; ++i) {
            for (long j = k + 1; j < N; ++j) {
                BigInt v = M[static_cast<size_t>(i)][static_cast<size_t>(j)] * M[static_cast<size_t>(k)][static_cast<size_t>(k)] -
                           M[static_cast<size_t>(i)][static_cast<size_t>(k)] * M[static_cast<size_t>(k)][static_cast<size_t>(j)];
                M[static_cast<size_t>(i)][static_cast<size_t>(j)] = v.divexact(denom);
            }
            M[static_cast<size_t>(i)][static_cast<size_t>(k)] = 0;
        }
        denom = M[static_cast<size_t>(k)][static_cast<size_t>(k)];
    }
    BigInt r = M[static_cast<size_t>(N - 1)][static_cast<size_t>(N - 1)];
    return sign > 0 ? r : -r;
}

BigInt poly_discriminant(const ZPoly& f0) {
    ZPoly f = poly_trim(f0);
    long d = poly_degree(f);
    if (d < 1) throw DomainError("discriminant needs degree >= 1");
    BigInt res = poly_resultant(f, poly_derivative(f));
    BigInt disc = res.divexact(f.back());
    long e = (d * (d - 1) / 2) % 2;
    return e ? -disc : disc;
}

namespace {
BigInt pollard_rho(const BigInt& n) {
    if (!n.odd()) return BigInt(2);
    for (long c = 1; c < 64; ++c) {
        BigInt x(2), y(2), d(1);
        while (d.is_one()) {
            x = (x * x + BigInt(c)).mod(n);
            y = (y * y + BigInt(c)).mod(n);
            y = (y * y + BigInt(c)).mod(n);
            d = BigInt::gcd((x - y).abs(), n);
        }
        if (d != n) return d;
    }
    throw DomainError("pollard_rho failed");
}

void factor_rec(const BigInt& n, std::map<std::string, std::pair<BigInt, long>>& acc) {
    if (n.is_one()) return;
    if (n.probab_prime()) {
        auto key = n.to_string();
        auto it = acc.find(key);
        if (it == acc.end())
            acc[key] = {n, 1};
        else
            it->second.second++;
        return;
    }
    BigInt d = pollard_rho(n);
    factor_rec(d, acc);
    factor_rec(n.divexact(d), acc);
}
}  // namespace

std::vector<std::pair<BigInt, long>> factorize(const BigInt& n0) {
    if (n0.is_zero()) throw DomainError("factorize(0)");
    BigInt n = n0.abs();
    std::map<std::string, std::pair<BigInt, long>> acc;
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L, 41L, 43L, 47L}) {
        long e = 0;
        while (n.divisible_by(BigInt(p))) {
            n = n.divexact(BigInt(p));
            ++e;
        }
        if (e) acc[BigInt(p).to_string()] = {BigInt(p), e};
        if (n.is_one()) break;
    }
    if (!n.is_one()) factor_rec(n, acc);
    std::vector<std::pair<BigInt, long>> out;
    for (auto& [k, v] : acc) out.push_back(v);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

std::vector<BigInt> divisors_of(const BigInt& n) {
    auto fac = factorize(n);
    std::vector<BigInt> ds = {BigInt(1)};
    for (auto& [p, e] : fac) {
        size_t base = ds.size();
        BigInt pk(1);
        for (long k = 1; k <= e; ++k) {
            pk *= p;
            for (size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

std::vector<Rational> rational_roots(const ZPoly& f0) {
    ZPoly f = poly_primitive(poly_trim(f0));
    std::vector<Rational> out;
    if (poly_degree(f) < 1) return out;
    long k = 0;
    while (f[static_cast<size_t>(k)].is_zero()) ++k;
    if (k > 0) {
        out.push_back(Rational(0));
        f = ZPoly(f.begin() + k, f.end());
    }
    auto nums = divisors_of(f[0]);
    auto dens = divisors_of(f.back());
    for (const auto& a : nums)
        for (const auto& b : dens) {
            if (!BigInt::gcd(a, b).is_one()) continue;
            for (int s = 0; s < 2; ++s) {
                Rational r(s ? -a : a, b);
                if (poly_eval(f, r).is_zero()) out.push_back(r);
            }
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ZPoly> quadratic_factors(const ZPoly& f0) {
    ZPoly f = poly_primitive(poly_trim(f0));
    std::vector<ZPoly> out;
    if (poly_degree(f) < 2) return out;
    // strip linear factors so the value-divisor method has nonzero values
    for (auto& r : rational_roots(f)) {
        ZPoly lin = {-r.num(), r.den()};
        while (poly_divides(lin, f) && poly_degree(f) >= 1) f = poly_divexact(f, lin);
    }
    if (poly_degree(f) < 2) return out;
    BigInt f0v = poly_eval(f, BigInt(0));
    BigInt f1v = poly_eval(f, BigInt(1));
    BigInt fm1v = poly_eval(f, BigInt(-1));
    auto d0 = divisors_of(f0v), d1 = divisors_of(f1v), dm1 = divisors_of(fm1v);
    auto consider = [&](const BigInt& c0, const BigInt& v1, const BigInt& vm1) {
        // q(x) = c2 x^2 + c1 x + c0 with q(1) = v1, q(-1) = vm1
        BigInt two(2);
        if (!(v1 + vm1 - two * c0).divisible_by(two)) return;
        if (!(v1 - vm1).divisible_by(two)) return;
        BigInt c2 = (v1 + vm1 - two * c0).divexact(two);
        BigInt c1 = (v1 - vm1).divexact(two);
        if (c2.is_zero()) return;
        ZPoly q = {c0, c1, c2};
        if (!poly_content(q).is_one()) return;
        if (c2.sign() < 0) q = poly_scale(q, BigInt(-1));
        // irreducible over Q: discriminant not a perfect square
        BigInt disc = c1 * c1 - BigInt(4) * c2 * c0;
        if (disc.sign() >= 0 && disc.is_perfect_square()) return;
        if (!poly_divides(q, f)) return;
        for (auto& have : out)
            if (have == q) return;
        out.push_back(q);
    };
    for (const auto& a0 : d0)
        for (int s0 = 0; s0 < 2; ++s0)
            for (const auto& a1 : d1)
                for (int s1 = 0; s1 < 2; ++s1)
                    for (const auto& am : dm1)
                        for (int sm = 0; sm < 2; ++sm)
                            consider(s0 ? -a0 : a0, s1 ? -a1 : a1, sm ? -am : am);
    return out;
}

BigInt squarefree_part(const BigInt& n) {
    if (n.is_zero()) throw DomainError("squarefree_part(0)");
    auto fac = factorize(n);
    BigInt r = n.sign() < 0 ? BigInt(-1) : BigInt(1);
    for (auto& [p, e] : fac)
        if (e % 2) r *= p;
    return r;
}

}  // namespace qc
