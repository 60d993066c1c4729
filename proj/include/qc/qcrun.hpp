#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "qc/heights.hpp"
#include "qc/localheights.hpp"
#include "qc/roots.hpp"

namespace qc {

struct OmegaSet {
    std::vector<long> primes;                       // contributing set S
    std::map<long, std::vector<Rational>> omega_q;  // per-prime values, units of log q
    std::map<long, bool> refined;
    std::vector<SymLog> symbolic;
    std::vector<PadicNumber> realized;
};

/// local solubility of y^2 = f(x) over Q_q (both affine patches)
bool is_locally_soluble(const BiellipticModel& X, long q);

/// a sampled q-adic point of X; on the infinite patch coordinates are
/// (u, w) = (1/x, y/x^3)
struct XSample {
    PadicNumber x, y;
    bool inf_patch;
};
std::vector<XSample> sample_x_points(const BiellipticModel& X, long q, long prec, long cap);

struct GeneratorInfo {
    ECPointQ point;  // non-torsion point on the original associated model
    bool from_search = false;
    long twist_D = 0;  // nonzero when the point came from a twist (K runs)
};

/// bounded naive search for a non-torsion point on E (original model)
std::optional<ECPointQ> search_nontorsion_point(const EllipticCurve& E, long num_bound = 4000,
                                                long den_bound = 24);

struct DiskRoot {
    PadicNumber s;
    long omega_index;
    bool simple = true;
    bool boundary = false;
    long multiplicity = 1;
};

enum class DiskKind { Generic, Weierstrass, ZeroX, Infinite };

struct DiskRecord {
    ResidueOrbit orbit;
    DiskKind kind;
    std::vector<DiskRoot> roots;
    bool truncation_doubled = false;
    bool nonsimple_flag = false;  // some root not simple at working precision
};

struct RecoveredPoint {
    bool infinite = false;
    int inf_branch = 0;  // for points at infinity: sign of y/x^3 branch
    PadicNumber x, y;
    long disk_index = -1, root_index = -1, omega_index = -1;
    bool simple_root = true, boundary_root = false;
    bool from_orbit_expansion = false;
};

struct RunRecord {
    std::string label;
    BiellipticModel model;
    long p = 0, prec = 0;
    long field_D = 0;  // 0: over Q; else over Q(sqrt(-D))
    OmegaSet omega;
    PadicNumber alpha1, alpha2;
    std::string gen1, gen2;  // rendered generators
    std::vector<DiskRecord> disks;
    std::vector<RecoveredPoint> candidates;  // orbit-expanded, deduped
    long n_rational = -1;                    // filled by recognition
    long n_mock = -1;
    std::string counting_convention =
        "individual Q_p points, orbit-expanded, rational points excluded from mock count";
    double seconds = 0;
};

struct QCOptions {
    long prec = 25;
    long truncation = 0;  // 0: default 2*prec + 5
    bool refine_omega = true;
    bool expand_orbits = true;
};

/**
 * The quadratic Chabauty engine for one (curve, prime) over Q: builds the
 * height contexts and alpha constants, assembles Omega, expands rho-tilde on
 * each residue disk and solves rho-tilde = omega.
 */
class QCEngine {
  public:
    QCEngine(const BiellipticModel& X, long p, QCOptions opt = {});

    /// supply a non-torsion point on the original E_i model (else searched)
    void set_generator(int which, const ECPointQ& P);
    /// K-mode: alphas computed externally (fieldext); omega gets the extra primes
    void set_alpha_external(const PadicNumber& a1, const PadicNumber& a2, long D,
                            const std::vector<long>& extra_primes);
    /// K-mode: replaces the Omega_q set at specific primes (ramified places)
    void set_omega_override(std::function<std::optional<std::vector<Rational>>(long)> f) {
        omega_override_ = std::move(f);
    }

    void prepare();
    RunRecord run();

    const OmegaSet& omega() const { return omega_; }
    PadicNumber alpha(int which) const { return which == 1 ? alpha1_ : alpha2_; }
    const HeightContext& context(int which) const { return *(which == 1 ? s1_ : s2_).hc; }
    const EllipticCurve& original_curve(int which) const {
        return (which == 1 ? s1_ : s2_).original;
    }
    const EllipticCurve& minimal_curve(int which) const {
        return (which == 1 ? s1_ : s2_).minimal;
    }

    /// rho-tilde at a Q_p point of X via its disk expansion (containment checks)
    PadicNumber rho_eval(const PadicNumber& x, const PadicNumber& y);
    /// the assembled rho-tilde series of one residue disk (tests/diagnostics)
    PSeries disk_rho_series(const ResidueOrbit& orb, long truncation = 0);
    PadicNumber rho_eval_infinite(int branch);
    /// smallest |rho(z) - w| over realized omega values, as a valuation
    long containment_valuation(const PadicNumber& x, const PadicNumber& y);

  private:
    struct Side {
        EllipticCurve original, minimal;
        ECTransform to_min;
        std::shared_ptr<HeightContext> hc;
        GeneratorInfo gen;
    };
    struct TermWithLog {
        PSeries ser;
        long logs = 0;
    };
    struct DiskSeries {
        DiskKind kind;
        ResidueOrbit orbit;
        PSeries rho;
        PSeries xser, yser;  // finite disks
        PSeries hser;        // infinite disks: y = s^-3 p^-3 h(s)
    };

    DiskSeries build_disk(const ResidueOrbit& orb, long truncation);
    TermWithLog eside_lambda_finite(const Side& side, const PSeries& X, const PSeries& Y,
                                    PSeries& log_out, bool weierstrass_disk);
    TermWithLog eside_lambda_odisk(const Side& side, const Laurent& XL, const Laurent& YL,
                                   PSeries& log_out);

    BiellipticModel X_;
    long p_;
    QCOptions opt_;
    long nw_;  // working precision for series
    Side s1_, s2_;
    PadicNumber alpha1_, alpha2_;
    OmegaSet omega_;
    long field_D_ = 0;
    std::vector<long> extra_primes_;
    std::function<std::optional<std::vector<Rational>>(long)> omega_override_;
    bool alphas_external_ = false;
    bool prepared_ = false;
};

/// Omega assembly per the local-contribution formula over the original
/// associated curves (each prime uses its own local minimal model). The
/// override supplies exact per-prime value sets (K-runs at ramified places).
OmegaSet build_omega(
    const BiellipticModel& X, const EllipticCurve& E1, const EllipticCurve& E2, long p, long prec,
    bool refine, const std::vector<long>& extra_primes = {},
    const std::function<std::optional<std::vector<Rational>>(long)>& override_q = {});

/// the candidate refinement: complete sampled set of local rho contributions at q
std::optional<std::vector<Rational>> sampled_wq_values(const BiellipticModel& X,
                                                       const EllipticCurve& E1,
                                                       const EllipticCurve& E2, long q);

}  // namespace qc
