#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qc/curves.hpp"

using namespace qc;

namespace {
BiellipticModel model(long a6, long a4, long a2, long a0) {
    BiellipticModel X;
    X.a6 = a6;
    X.a4 = a4;
    X.a2 = a2;
    X.a0 = a0;
    return X;
}
}  // namespace

TEST_CASE("associated curves match the quotient formulas") {
    auto X = model(-45, 75, -15, 1);
    auto [E1, E2] = associated_curves(X);
    CHECK(E1.a2 == BigInt(75));
    CHECK(E1.a4 == BigInt(675));
    CHECK(E1.a6 == BigInt(2025));

    auto Xs = model(1, 0, 0, 1);
    auto [F1, F2] = associated_curves(Xs);
    CHECK(F1 == F2);
    CHECK(F1.a6 == BigInt(1));
    CHECK(F1.a2.is_zero());
    CHECK(F1.a4.is_zero());

    auto X37 = model(-1, -9, -11, 37);
    auto [G1, G2] = associated_curves(X37);
    CHECK(G2.a2 == BigInt(-11));
    CHECK(G2.a4 == BigInt(-333));
    CHECK(G2.a6 == BigInt(-1369));
}

TEST_CASE("phi images satisfy the target curve equation") {
    auto X = model(-45, 75, -15, 1);
    auto [E1, E2] = associated_curves(X);
    XPointQ P;
    P.x = Rational(1);
    P.y = Rational(4);
    auto Q = phi_rational(1, X, P);
    CHECK(Q.x == Rational(-45));
    CHECK(Q.y == Rational(-180));
    CHECK(ec_group_q(E1).on_curve(Q));
    auto R = phi_rational(2, X, P);
    CHECK(ec_group_q(E2).on_curve(R));

    // phi_1 is even in x, phi_2 odd in y
    XPointQ Pm = P;
    Pm.x = -P.x;
    auto Q2 = phi_rational(1, X, Pm);
    CHECK(Q2.x == Q.x);
    CHECK(Q2.y == Q.y);
    XPointQ Py = P;
    Py.y = -P.y;
    auto R2 = phi_rational(2, X, Py);
    auto negR = ec_group_q(E2).neg(R);
    CHECK(R2.x == negR.x);
    CHECK(R2.y == negR.y);
}

TEST_CASE("phi images over Q_p land on the curve (fuzz)") {
    auto X = model(1, -5, -5, 1);
    auto [E1, E2] = associated_curves(X);
    long p = 11, n = 20;
    std::mt19937_64 rng(5);
    auto f = X.sextic();
    int tested = 0;
    for (long x0 = 1; x0 < p && tested < 5; ++x0) {
        BigInt rhs = poly_eval(f, BigInt(x0)).mod(BigInt(p));
        if (rhs.is_zero() || !is_quadratic_residue(rhs, p)) continue;
        auto xv = PadicNumber::from_long(x0, p, n);
        auto yv = PadicNumber::from_rational(Rational(poly_eval(f, BigInt(x0))), p, n).sqrt();
        auto Q1 = phi_padic(1, X, xv, yv);
        auto Q2 = phi_padic(2, X, xv, yv);
        CHECK(ec_group_p(E1, p, n).on_curve(Q1));
        CHECK(ec_group_p(E2, p, n).on_curve(Q2));
        ++tested;
    }
    CHECK(tested > 0);
}

TEST_CASE("good ordinary primes for X_ns+(15)") {
    auto X = model(-45, 75, -15, 1);
    auto primes = good_ordinary_primes(X, 100);
    std::vector<long> expected = {7, 13, 19, 31, 37, 43, 61, 67, 73, 97};
    CHECK(primes == expected);
}

TEST_CASE("24.72.2.iy.1 excludes 7 and 47") {
    auto X = model(6, 12, 12, 6);
    auto primes = good_ordinary_primes(X, 100);
    for (long p : primes) {
        CHECK(p != 7);
        CHECK(p != 47);
    }
    // all other good primes in range are present
    for (long p : {5L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L, 41L, 43L, 53L}) {
        if (!good_reduction_for_model(X, p)) continue;
        bool in = std::find(primes.begin(), primes.end(), p) != primes.end();
        CHECK(in == (p != 7 && p != 47));
    }
}

TEST_CASE("Hasse bound on point counts") {
    auto X = model(-45, 75, -15, 1);
    auto [E1, E2] = associated_curves(X);
    for (long p : good_ordinary_primes(X, 60)) {
        long ap = trace_of_frobenius(E1, p);
        CHECK(ap * ap <= 4 * p);
    }
}

TEST_CASE("residue orbits: sizes, representatives, total count") {
    auto X = model(1, 0, 0, 1);  // y^2 = x^6 + 1 over F_5
    long p = 5;
    auto orbits = residue_points_mod_automorphism(X, p);
    long total = 0;
    for (auto& orb : orbits) {
        CHECK(orb.members.size() >= 1);
        CHECK(orb.members.size() <= 4);
        CHECK(4 % orb.members.size() == 0);
        total += static_cast<long>(orb.members.size());
    }
    CHECK(total == count_x_points_fp(X, p));
    // infinite points form one orbit (a6 = 1 is a square)
    long inf_orbits = 0;
    for (auto& orb : orbits)
        if (orb.rep.kind == ResiduePoint::Kind::Infinite) ++inf_orbits;
    CHECK(inf_orbits == 1);
}

TEST_CASE("x=0, y=0 residue points are fixed points of subgroups") {
    auto X = model(1, 0, 0, 1);  // (0, ±1) and weierstrass points on x^6 = -1
    auto orbits = residue_points_mod_automorphism(X, 5);
    for (auto& orb : orbits) {
        if (orb.rep.kind == ResiduePoint::Kind::Affine && orb.rep.x == 0)
            CHECK(orb.members.size() == 2);  // (0, ±1)
        if (orb.rep.kind == ResiduePoint::Kind::Affine && orb.rep.y == 0)
            CHECK(orb.members.size() == 2);  // (±x0, 0)
    }
}

TEST_CASE("group law sanity over Q") {
    EllipticCurve E{BigInt(0), BigInt(0), BigInt(0), BigInt(0), BigInt(1)};  // y^2 = x^3 + 1
    auto G = ec_group_q(E);
    auto P = ECPointQ::affine(Rational(2), Rational(3));
    CHECK(G.on_curve(P));
    auto P2 = G.dbl(P);
    CHECK(G.on_curve(P2));
    auto P3 = G.add(P2, P);
    CHECK(G.on_curve(P3));
    auto O = G.add(P, G.neg(P));
    CHECK(O.inf);
    auto P6a = G.mul(P, 6);
    auto P6b = G.dbl(P3);
    if (!P6a.inf) {
        CHECK(P6a.x == P6b.x);
        CHECK(P6a.y == P6b.y);
    }
}
