#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qc/roots.hpp"

using namespace qc;

namespace {
std::mt19937_64 rng(777);

PSeries series_from_longs(long p, std::vector<long> cs, long aprec) {
    std::vector<PadicNumber> v;
    for (long c : cs) v.push_back(PadicNumber::from_long(c, p, aprec));
    return PSeries(p, std::move(v));
}

PSeries random_unit_series(long p, long len, long aprec) {
    std::uniform_int_distribution<long> d(0, p - 1);
    std::vector<PadicNumber> v;
    v.push_back(PadicNumber::from_long(1 + d(rng) % (p - 1), p, aprec));
    for (long i = 1; i < len; ++i) v.push_back(PadicNumber::from_long(d(rng), p, aprec));
    return PSeries(p, std::move(v));
}
}  // namespace

TEST_CASE("linear root") {
    auto F = series_from_longs(5, {-3, 1, 0, 0, 0, 0}, 20);
    auto roots = series_roots_in_Zp(F);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].simple);
    CHECK((roots[0].t - PadicNumber::from_long(3, 5, 20)).is_zero());
}

TEST_CASE("double root at origin") {
    auto F = series_from_longs(5, {0, 0, 1, 0, 0, 0}, 20);
    auto roots = series_roots_in_Zp(F);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].multiplicity == 2);
    CHECK(!roots[0].simple);
    CHECK(roots[0].t.is_zero());
}

TEST_CASE("planted simple root inside a random unit series") {
    for (long p : {5L, 7L}) {
        for (int rep = 0; rep < 10; ++rep) {
            long aprec = 20;
            std::uniform_int_distribution<long> d(0, 3000);
            long t0v = d(rng);
            auto t0 = PadicNumber::from_long(t0v, p, aprec);
            // degree <= 10 unit series so that the degree-11 product is not truncated
            auto U = random_unit_series(p, 11, aprec).truncated(12);
            auto lin = series_from_longs(p, {-t0v, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, aprec);
            auto F = U * lin;
            auto roots = series_roots_in_Zp(F);
            bool found = false;
            for (auto& r : roots)
                if ((r.t - t0).is_zero()) found = true;
            CHECK(found);
            // evaluation at every returned root has valuation >= working precision
            for (auto& r : roots)
                if (!r.at_precision_boundary) CHECK(F.eval(r.t).is_zero());
        }
    }
}

TEST_CASE("roots against exhaustive residue enumeration on random polynomials") {
    // oracle: enumerate residues mod p^3 and count solutions' residue classes
    for (long p : {5L, 7L}) {
        for (int rep = 0; rep < 25; ++rep) {
            long aprec = 14;
            std::uniform_int_distribution<long> d(-40, 40);
            std::vector<long> cs;
            for (int i = 0; i < 7; ++i) cs.push_back(d(rng));
            auto F = series_from_longs(p, cs, aprec);
            if (F.is_zero_to_prec()) continue;
            std::vector<SeriesRoot> roots;
            try {
                roots = series_roots_in_Zp(F);
            } catch (const PrecisionError&) {
                continue;
            }
            // oracle at depth 3: a residue class r mod p^3 "survives" if F(r) = 0 mod p^3
            long m3 = p * p * p;
            std::vector<long> survivors;
            for (long r = 0; r < m3; ++r) {
                long acc = 0;
                for (int i = 6; i >= 0; --i) {
                    acc = (acc * r + ((cs[static_cast<size_t>(i)] % m3) + m3)) % m3;
                }
                if (acc % m3 == 0) survivors.push_back(r);
            }
            // every root must reduce to a survivor
            for (auto& root : roots) {
                if (root.t.valuation() >= 3 || root.at_precision_boundary) continue;
                long rmod = root.t.integer_rep().mod(BigInt(m3)).to_long();
                CHECK(std::find(survivors.begin(), survivors.end(), rmod) != survivors.end());
            }
            // every survivor class must contain a root or fail to refine deeper;
            // check at least that simple Hensel-type survivors are all found
            for (long r : survivors) {
                // check F(r) = 0 mod p^3 and F'(r) unit: then a root with this residue exists
                long fr = 0, dfr = 0;
                for (int i = 6; i >= 0; --i) {
                    dfr = (dfr * r + fr) % p;
                    fr = (fr * r + ((cs[static_cast<size_t>(i)] % p) + p)) % p;
                }
                if (fr % p == 0 && dfr % p != 0) {
                    bool found = false;
                    for (auto& root : roots) {
                        if (root.at_precision_boundary) continue;
                        if (root.t.valuation() > 0 && r % p == 0) {
                            found = true;
                            break;
                        }
                        if (!root.t.is_zero() && root.t.valuation() == 0 &&
                            root.t.integer_rep().mod(BigInt(p)).to_long() == r % p)
                            found = true;
                    }
                    CHECK(found);
                }
            }
        }
    }
}

TEST_CASE("weierstrass factorization: constructed and double roots") {
    long p = 7, aprec = 20;
    // F = (t-2)(1+t)
    auto F = series_from_longs(p, {-2, -1, 1, 0, 0, 0}, aprec);
    auto two = PadicNumber::from_long(2, p, aprec);
    auto wf = weierstrass_factor(F, two);
    CHECK(wf.exact);
    CHECK(wf.simple);
    CHECK((wf.quotient[0] - PadicNumber::from_long(1, p, aprec)).is_zero());
    CHECK((wf.quotient[1] - PadicNumber::from_long(1, p, aprec)).is_zero());

    // F = (t-2)^2: exact but not simple
    auto F2 = series_from_longs(p, {4, -4, 1, 0, 0, 0}, aprec);
    auto wf2 = weierstrass_factor(F2, two);
    CHECK(wf2.exact);
    CHECK(!wf2.simple);

    // round trip: (t - t0) * Q == F coefficientwise
    auto lin = series_from_longs(p, {-2, 1, 0, 0, 0, 0}, aprec);
    auto back = lin * wf.quotient;
    for (long i = 0; i < back.len(); ++i) CHECK((back[i] - F[i]).is_zero());
}

TEST_CASE("zero series raises a precision-insufficient signal") {
    auto F = PSeries::zeros(5, 6, 10);
    CHECK_THROWS_AS(series_roots_in_Zp(F), PrecisionError);
}

TEST_CASE("taylor shift correctness") {
    long p = 5, aprec = 18;
    auto F = series_from_longs(p, {1, 2, 3, 4, 0, 0}, aprec);
    auto c = PadicNumber::from_long(11, p, aprec);
    auto G = taylor_shift(F, c);
    for (long s0 : {0L, 1L, 7L}) {
        auto s = PadicNumber::from_long(s0, p, aprec);
        CHECK((G.eval(s) - F.eval(s + c)).is_zero());
    }
}
