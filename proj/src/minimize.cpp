#include "qc/minimize.hpp"

#include <algorithm>

namespace qc {

Rational TransformMatrix::discriminant_effect() const {
    return e.pow(20) * det().pow(-30);
}

TransformMatrix TransformMatrix::compose(const TransformMatrix& second) const {
    TransformMatrix out;
    out.a = second.a * a + second.b * c;
    out.b = second.a * b + second.b * d;
    out.c = second.c * a + second.d * c;
    out.d = second.c * b + second.d * d;
    out.e = e * second.e;
    return out;
}

std::pair<Rational, Rational> TransformMatrix::map_point(const Rational& x, const Rational& y) const {
    Rational den = c * x + d;
    if (den.is_zero()) throw DomainError("transform maps point to infinity");
    return {(a * x + b) / den, e * y / (den * den * den)};
}

std::vector<Rational> transformed_sextic(const TransformMatrix& M, const BiellipticModel& X) {
    // Y^2 = e^2 (ad-bc)^-6 * sum_i f_i (dX - b)^i (a - cX)^(6-i)
    std::vector<Rational> f(7, Rational(0));
    f[0] = Rational(X.a0);
    f[2] = Rational(X.a2);
    f[4] = Rational(X.a4);
    f[6] = Rational(X.a6);
    std::vector<Rational> acc(7, Rational(0));
    // powers of (dX - b) and (a - cX)
    auto polymul = [](const std::vector<Rational>& u, const std::vector<Rational>& v) {
        std::vector<Rational> r(u.size() + v.size() - 1, Rational(0));
        for (size_t i = 0; i < u.size(); ++i)
            for (size_t j = 0; j < v.size(); ++j) r[i + j] += u[i] * v[j];
        return r;
    };
    std::vector<std::vector<Rational>> pow1(7), pow2(7);
    pow1[0] = {Rational(1)};
    pow2[0] = {Rational(1)};
    std::vector<Rational> lin1 = {-M.b, M.d};
    std::vector<Rational> lin2 = {M.a, -M.c};
    for (int i = 1; i <= 6; ++i) {
        pow1[static_cast<size_t>(i)] = polymul(pow1[static_cast<size_t>(i - 1)], lin1);
        pow2[static_cast<size_t>(i)] = polymul(pow2[static_cast<size_t>(i - 1)], lin2);
    }
    for (int i = 0; i <= 6; ++i) {
        if (f[static_cast<size_t>(i)].is_zero()) continue;
        auto term = polymul(pow1[static_cast<size_t>(i)], pow2[static_cast<size_t>(6 - i)]);
        for (size_t j = 0; j < term.size() && j < 7; ++j)
            acc[j] += f[static_cast<size_t>(i)] * term[j];
    }
    Rational scale = M.e * M.e * M.det().pow(-6);
    for (auto& cva : acc) cva *= scale;
    return acc;
}

bool check_transform_conditions(const TransformMatrix& M, const BiellipticModel& X) {
    if (M.det().is_zero() || M.e.is_zero()) return false;
    auto F = transformed_sextic(M, X);
    for (int j : {1, 3, 5})
        if (!F[static_cast<size_t>(j)].is_zero()) return false;
    for (int j : {0, 2, 4, 6})
        if (!F[static_cast<size_t>(j)].is_integer()) return false;
    if (F[6].is_zero()) return false;
    return true;
}

BiellipticModel apply_transform(const TransformMatrix& M, const BiellipticModel& X) {
    if (!check_transform_conditions(M, X)) throw DomainError("transform conditions violated");
    auto F = transformed_sextic(M, X);
    BiellipticModel out = X;
    out.a6 = F[6].num();
    out.a4 = F[4].num();
    out.a2 = F[2].num();
    out.a0 = F[0].num();
    out.known_rational_points.clear();
    for (auto& [x, y] : X.known_rational_points) {
        auto [nx, ny] = M.map_point(x, y);
        out.known_rational_points.push_back({nx, ny});
    }
    out.validate();
    return out;
}

namespace {

bool lex_less(const TransformMatrix& A, const TransformMatrix& B) {
    if (A.a != B.a) return A.a < B.a;
    if (A.b != B.b) return A.b < B.b;
    if (A.c != B.c) return A.c < B.c;
    if (A.d != B.d) return A.d < B.d;
    return A.e < B.e;
}

// integer matrices with |entries| <= bound and ad - bc = target
void det_matrices(const BigInt& target, long bound, std::vector<std::array<long, 4>>& out) {
    for (long a = -bound; a <= bound; ++a)
        for (long d = -bound; d <= bound; ++d) {
            BigInt bc = BigInt(a) * BigInt(d) - target;
            if (bc.is_zero()) {
                for (long b = -bound; b <= bound; ++b) out.push_back({a, b, 0, d});
                for (long c = -bound; c <= bound; ++c)
                    if (c != 0) out.push_back({a, 0, c, d});
                continue;
            }
            if (!bc.fits_long()) continue;
            long bcl = bc.to_long();
            for (long b = -bound; b <= bound; ++b) {
                if (b == 0) continue;
                if (bcl % b != 0) continue;
                long c = bcl / b;
                if (c < -bound || c > bound) continue;
                out.push_back({a, b, c, d});
            }
        }
}

}  // namespace

MinimizeResult minimize_model(const BiellipticModel& X0) {
    MinimizeResult res;
    res.model = X0;
    res.transform = TransformMatrix{};
    res.disc_before = X0.discriminant();

    bool progress = true;
    int guard = 0;
    while (progress && ++guard < 64) {
        progress = false;
        BigInt disc = res.model.discriminant();
        auto fac = factorize(disc);
        long maxp = 1;
        for (auto& [pp, e] : fac)
            if (pp.fits_long()) maxp = std::max(maxp, pp.to_long());
        for (auto& [pp, vP] : fac) {
            if (!pp.fits_long()) continue;
            long P = pp.to_long();
            if (vP < 10) continue;
            long kmax = vP / 10;
            bool applied = false;
            for (long k = kmax; k >= 1 && !applied; --k) {
                // e^20 det^-30 = P^-10k: e = P^e1, det = ±P^m1, 2 e1 - 3 m1 = -k
                std::vector<TransformMatrix> valid;
                for (long e1 = -2; e1 <= 2; ++e1) {
                    long num = 2 * e1 + k;
                    if (num % 3 != 0) continue;
                    long m1 = num / 3;
                    if (m1 < -2 || m1 > 3) continue;
                    Rational ev = Rational(BigInt(P)).pow(e1);
                    if (ev.abs() > Rational(maxp)) continue;
                    if (m1 >= 0) {
                        BigInt tgt = BigInt(P).pow(static_cast<unsigned long>(m1));
                        std::vector<std::array<long, 4>> mats;
                        det_matrices(tgt, maxp, mats);
                        det_matrices(-tgt, maxp, mats);
                        for (auto& m : mats) {
                            TransformMatrix M;
                            M.a = Rational(m[0]);
                            M.b = Rational(m[1]);
                            M.c = Rational(m[2]);
                            M.d = Rational(m[3]);
                            M.e = ev;
                            if (check_transform_conditions(M, res.model)) valid.push_back(M);
                        }
                    } else {
                        // diagonal matrices with 1/P entries
                        std::vector<std::pair<Rational, Rational>> diags;
                        Rational invP = Rational(BigInt(1), BigInt(P));
                        if (m1 == -1) {
                            diags.push_back({invP, Rational(1)});
                            diags.push_back({Rational(1), invP});
                            diags.push_back({-invP, Rational(1)});
                            diags.push_back({Rational(1), -invP});
                        } else {
                            diags.push_back({invP, invP});
                            diags.push_back({-invP, -invP});
                        }
                        for (auto& [av, dv] : diags) {
                            TransformMatrix M;
                            M.a = av;
                            M.d = dv;
                            M.e = ev;
                            if (check_transform_conditions(M, res.model)) valid.push_back(M);
                        }
                    }
                }
                if (valid.empty()) continue;
                std::sort(valid.begin(), valid.end(), lex_less);
                const TransformMatrix& M = valid.front();
                BiellipticModel next = apply_transform(M, res.model);
                if (next.discriminant().abs() >= res.model.discriminant().abs()) continue;
                res.model = next;
                res.transform = res.transform.compose(M);
                applied = true;
                progress = true;
            }
            if (applied) break;  // re-factorize from scratch
        }
    }
    res.disc_after = res.model.discriminant();
    return res;
}

}  // namespace qc
