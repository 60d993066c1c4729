#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qc/heights.hpp"

using namespace qc;

namespace {
EllipticCurve make(long a1, long a2, long a3, long a4, long a6) {
    return EllipticCurve{BigInt(a1), BigInt(a2), BigInt(a3), BigInt(a4), BigInt(a6)};
}
}  // namespace

TEST_CASE("frobenius matrix: charpoly = T^2 - a_p T + p, det = p") {
    for (long p : {5L, 7L, 11L}) {
        auto E = make(0, 0, 0, -1, 1);  // y^2 = x^3 - x + 1
        if (E.disc().divisible_by(BigInt(p))) continue;
        long ap = trace_of_frobenius(E, p);
        if (ap % p == 0) continue;  // need ordinary
        auto fd = padic_E2_and_unit_root(E, p, 12);
        auto tr = fd.m00 + fd.m11;
        auto det = fd.m00 * fd.m11 - fd.m01 * fd.m10;
        CHECK((tr - PadicNumber::from_long(ap, p, 10)).with_prec(10).is_zero());
        CHECK((det - PadicNumber::from_long(p, p, 10)).with_prec(10).is_zero());
        CHECK(fd.unit_root.valuation() == 0);
        // unit root solves T^2 - ap T + p
        auto resid = fd.unit_root * fd.unit_root -
                     PadicNumber::from_long(ap, p, 12) * fd.unit_root + PadicNumber::from_long(p, p, 12);
        CHECK(resid.with_prec(10).is_zero());
    }
}

TEST_CASE("sigma function is integral and normalized t + O(t^2)") {
    // canonical-c characterization: sigma in t + t^2 Z_p[[t]]; this pins the E2
    // convention (first sensitive coefficient appears near degree p)
    for (long p : {5L, 7L}) {
        auto E = make(0, 0, 0, -1, 1);
        if (E.disc().divisible_by(BigInt(p)) || trace_of_frobenius(E, p) % p == 0) continue;
        HeightContext hc(E, p, 12);
        const auto& su = hc.sigma_unit();
        CHECK((su[0] - PadicNumber::from_long(1, p, 8)).with_prec(8).is_zero());
        for (long i = 1; i < std::min<long>(su.len(), 2 * p + 2); ++i) {
            INFO("coefficient ", i, " = ", su[i].to_string());
            CHECK(su[i].valuation() >= 0);
        }
    }
}

TEST_CASE("Log: identity, oddness, homomorphism by independent doubling") {
    auto E = make(0, 0, 1, -1, 0);  // rank 1, generator (0,0)
    long p = 7;
    HeightContext hc(E, p, 16);
    auto G = hc.group();
    auto P = ec_point_to_padic(ECPointQ::affine(Rational(0), Rational(0)), p, hc.work_prec());
    REQUIRE(G.on_curve(P));
    auto L1 = hc.log_point(P);
    auto Lm = hc.log_point(G.neg(P));
    CHECK((L1 + Lm).with_prec(12).is_zero());
    auto L2 = hc.log_point(G.dbl(P));
    CHECK((L2 - L1 - L1).with_prec(12).is_zero());
    auto L3 = hc.log_point(G.add(G.dbl(P), P));
    CHECK((L3 - L1 - L1 - L1).with_prec(12).is_zero());
}

TEST_CASE("Log vanishes exactly on torsion") {
    // y^2 = x^3 + 1 has 6-torsion (2,3)? no: (2,3) has infinite order on 36a?
    // use y^2 + y = x^3 - x^2 (11a3, rank 0, 5-torsion (0,0))
    auto E = make(0, -1, 1, 0, 0);
    long p = 7;
    HeightContext hc(E, p, 14);
    auto T = ec_point_to_padic(ECPointQ::affine(Rational(0), Rational(0)), p, hc.work_prec());
    REQUIRE(hc.group().on_curve(T));
    CHECK(hc.log_point(T).with_prec(12).is_zero());
}

TEST_CASE("lambda_p quasi-parallelogram law") {
    auto E = make(0, 0, 1, -1, 0);
    long p = 7;
    HeightContext hc(E, p, 14);
    auto G = hc.group();
    auto P = ec_point_to_padic(ECPointQ::affine(Rational(0), Rational(0)), p, hc.work_prec());
    auto Q = ec_point_to_padic(ECPointQ::affine(Rational(2), Rational(2)), p, hc.work_prec());
    REQUIRE(G.on_curve(Q));
    auto S = G.add(P, Q), D = G.add(P, G.neg(Q));
    REQUIRE(!S.inf);
    REQUIRE(!D.inf);
    auto lhs = hc.lambda_p(S) + hc.lambda_p(D) - hc.lambda_p(P) - hc.lambda_p(P) -
               hc.lambda_p(Q) - hc.lambda_p(Q);
    auto rhs = PadicNumber::from_long(-2, p, hc.work_prec()) * iwasawa_log(P.x - Q.x);
    CHECK((lhs - rhs).with_prec(9).is_zero());
}

TEST_CASE("lambda_p evenness and 2P consistency via division polynomial") {
    auto E = make(0, 0, 1, -1, 0);
    long p = 13;
    HeightContext hc(E, p, 14);
    auto G = hc.group();
    auto P = ec_point_to_padic(ECPointQ::affine(Rational(0), Rational(0)), p, hc.work_prec());
    CHECK((hc.lambda_p(G.neg(P)) - hc.lambda_p(P)).with_prec(10).is_zero());
    // lambda(2P) - 4 lambda(P) = -2 log psi_2(P)
    auto l2 = hc.lambda_p(G.dbl(P));
    auto l1 = hc.lambda_p(P);
    auto psi2 = hc.psi_value(2, P);
    auto rhs = PadicNumber::from_long(-2, p, hc.work_prec()) * iwasawa_log(psi2);
    CHECK((l2 - PadicNumber::from_long(4, p, hc.work_prec()) * l1 - rhs).with_prec(9).is_zero());
}

TEST_CASE("zeta addition chain is consistent with the direct formal value") {
    auto E = make(0, 0, 1, -1, 0);
    long p = 7;
    HeightContext hc(E, p, 14);
    auto G = hc.group();
    auto P = ec_point_to_padic(ECPointQ::affine(Rational(0), Rational(0)), p, hc.work_prec());
    // zeta(2P) = 2 zeta(P) + (6x^2+b2x+b4)/(2 eta)
    auto z1 = hc.zeta_point(P);
    auto z2 = hc.zeta_point(G.dbl(P));
    auto b2 = hc.to_padic(E.b2());
    auto b4 = hc.to_padic(E.b4());
    auto corr = (PadicNumber::from_long(6, p, hc.work_prec()) * P.x * P.x + b2 * P.x + b4) /
                (PadicNumber::from_long(2, p, hc.work_prec()) * G.eta(P));
    CHECK((z2 - z1 - z1 - corr).with_prec(8).is_zero());
}

TEST_CASE("canonical height: quadraticity and alpha independence") {
    auto E = make(0, 0, 1, -1, 0);  // rank 1, generator (0,0)
    long p = 7;
    HeightContext hc(E, p, 16);
    auto G = ec_group_q(E);
    auto P = ECPointQ::affine(Rational(0), Rational(0));
    auto h1 = canonical_height(hc, P);
    auto h2 = canonical_height(hc, G.mul(P, 2));
    CHECK((h2 - PadicNumber::from_long(4, p, 10) * h1).with_prec(9).is_zero());
    auto h3 = canonical_height(hc, G.mul(P, 3));
    CHECK((h3 - PadicNumber::from_long(9, p, 10) * h1).with_prec(9).is_zero());
    auto a1 = alpha_constant(hc, P, 1);
    auto a2 = alpha_constant(hc, G.mul(P, 2), 1);
    auto a3 = alpha_constant(hc, G.mul(P, 3), 1);
    CHECK((a1 - a2).with_prec(9).is_zero());
    CHECK((a1 - a3).with_prec(9).is_zero());
}

TEST_CASE("half-log via involution agrees with elliptic log (dual path)") {
    // on an a1 = a3 = 0 model the involution is t -> -t on the formal disk, so
    // the half tangential-basepoint integral of the pullback reproduces Log
    auto E = make(0, 0, 0, -1, 1);
    long p = 7;
    HeightContext hc(E, p, 14);
    auto t0 = PadicNumber::from_long(7, p, hc.work_prec());
    auto direct = hc.log_f_at(t0);
    auto half = half_log_via_involution(hc.omega_coeff(), t0);
    CHECK((direct - half).with_prec(10).is_zero());
}
