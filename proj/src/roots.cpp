#include "qc/roots.hpp"

#include <algorithm>
#include <limits>

namespace qc {

PSeries taylor_shift(const PSeries& F, const PadicNumber& c) {
    // repeated synthetic division by (t - c): F(t) = sum b_k (t - c)^k, want F(t + c)
    long n = F.len();
    std::vector<PadicNumber> work(F.coeffs());
    std::vector<PadicNumber> out;
    out.reserve(static_cast<size_t>(n));
    for (long k = 0; k < n; ++k) {
        // divide work (degree n-1-k) by (t - c): remainder is coefficient b_k
        PadicNumber rem = work[static_cast<size_t>(n - 1 - k)];
        for (long i = n - 2 - k; i >= 0; --i) {
            PadicNumber tmp = work[static_cast<size_t>(i)] + rem * c;
            work[static_cast<size_t>(i)] = rem;
            rem = tmp;
        }
        out.push_back(rem);
    }
    return PSeries(F.prime(), std::move(out));
}

WeierstrassFactorResult weierstrass_factor(const PSeries& F, const PadicNumber& t0) {
    long n = F.len();
    WeierstrassFactorResult res;
    std::vector<PadicNumber> q(static_cast<size_t>(n), PadicNumber::zero(F.prime(), 1));
    PadicNumber carry = F[n - 1];
    for (long i = n - 2; i >= 0; --i) {
        q[static_cast<size_t>(i)] = carry;
        carry = F[i] + carry * t0;
    }
    res.exact = carry.is_zero();
    res.quotient = PSeries(F.prime(), std::move(q));
    res.simple = res.exact && !res.quotient.eval(t0).is_zero();
    return res;
}

namespace {

long residue_of(const PadicNumber& c, long p) {
    if (c.is_zero() || c.valuation() > 0) return 0;
    (void)p;
    return c.unit_residue();
}

// Newton iteration for a simple residue root; F'(start) must be a unit.
PadicNumber hensel_lift(const PSeries& F, long start) {
    long p = F.prime();
    long target = 1;
    for (long i = 0; i < F.len(); ++i) target = std::max(target, F[i].abs_prec());
    PadicNumber t = PadicNumber::from_long(start, p, target);
    for (int it = 0; it < 64; ++it) {
        PadicNumber f = F.eval(t);
        if (f.is_zero()) break;
        PadicNumber df = F.eval_derivative(t);
        PadicNumber step = f / df;
        t = t - step;
        if (step.is_zero()) break;
    }
    return t;
}

struct RootAccum {
    BigInt prefix;   // accumulated digits
    long scale;      // current level: variable substitution t = prefix + p^scale * s
};

struct FoundRoot {
    SeriesRoot root;
    bool hensel;  // found by Newton from a simple residue root
};

void find_roots_rec(const PSeries& F, const RootAccum& acc, std::vector<FoundRoot>& out, int depth) {
    long p = F.prime();
    if (depth > 200) throw PrecisionError("series_roots_in_Zp: refinement did not terminate");

    // normalize so that some coefficient is a unit
    PSeries G = F;
    long v = G.min_coeff_valuation();
    long floor_prec = std::numeric_limits<long>::max();
    for (long i = 0; i < G.len(); ++i) floor_prec = std::min(floor_prec, G[i].abs_prec());
    if (G.is_zero_to_prec() || floor_prec - v <= 0) {
        // precision budget exhausted: this whole branch is a root ball
        SeriesRoot r;
        r.t = PadicNumber::from_integer(acc.prefix, p, std::max<long>(acc.scale, 1));
        r.at_precision_boundary = true;
        r.simple = false;
        out.push_back({r, false});
        return;
    }
    if (v > 0) {
        PSeries H = PSeries::zeros(p, G.len(), 1);
        for (long i = 0; i < G.len(); ++i) H.at(i) = G[i].mul_ppower(-v);
        G = H;
    }

    // residue polynomial roots
    for (long r = 0; r < p; ++r) {
        // evaluate G and G' mod p at r by Horner on residues
        long fr = 0, dfr = 0;
        for (long i = G.len() - 1; i >= 0; --i) {
            dfr = (dfr * r + fr) % p;
            fr = (fr * r + residue_of(G[i], p)) % p;
        }
        if (fr != 0) continue;
        if (dfr != 0) {
            PadicNumber s = hensel_lift(G, r);
            SeriesRoot root;
            root.t = PadicNumber::from_integer(acc.prefix, p, s.abs_prec() + acc.scale) +
                     s.mul_ppower(acc.scale);
            root.simple = true;
            out.push_back({root, true});
        } else {
            // branch: s = r + p*u
            PSeries shifted = taylor_shift(G, PadicNumber::from_long(r, p, G[0].abs_prec() + 2));
            PSeries scaled = PSeries::zeros(p, shifted.len(), 1);
            for (long i = 0; i < shifted.len(); ++i) scaled.at(i) = shifted[i].mul_ppower(i);
            RootAccum next{acc.prefix + BigInt(r) * p_power(p, acc.scale), acc.scale + 1};
            find_roots_rec(scaled, next, out, depth + 1);
        }
    }
}

}  // namespace

std::vector<SeriesRoot> series_roots_in_Zp(const PSeries& F) {
    if (F.is_zero_to_prec())
        throw PrecisionError("series_roots_in_Zp: series is zero at working precision");
    std::vector<FoundRoot> found;
    find_roots_rec(F, RootAccum{BigInt(0), 0}, found, 0);

    std::vector<SeriesRoot> out;
    out.reserve(found.size());
    for (auto& fr : found) out.push_back(fr.root);

    // multiplicities by repeated certified division; Hensel-found roots carry
    // their own simplicity certificate
    for (size_t idx = 0; idx < out.size(); ++idx) {
        auto& r = out[idx];
        if (found[idx].hensel) {
            r.multiplicity = 1;
            r.simple = true;
            continue;
        }
        long mult = 0;
        PSeries cur = F;
        while (true) {
            if (cur.is_zero_to_prec()) {
                // residual factor indistinguishable from zero: cannot certify more
                r.at_precision_boundary = true;
                break;
            }
            auto wf = weierstrass_factor(cur, r.t);
            if (!wf.exact) break;
            ++mult;
            cur = wf.quotient;
            if (mult > F.len()) {
                r.at_precision_boundary = true;
                break;
            }
            if (!cur.eval(r.t).is_zero()) break;
        }
        r.multiplicity = std::max<long>(mult, 1);
        r.simple = (r.multiplicity == 1) && !r.at_precision_boundary;
    }
    return out;
}

}  // namespace qc
