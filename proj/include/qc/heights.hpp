#pragma once

#include <optional>

#include "qc/kedlaya.hpp"
#include "qc/series.hpp"
#include "qc/tate.hpp"

namespace qc {

/**
 * Per-(E, p) height machinery on a global minimal model E with good ordinary
 * reduction at p: formal group series, the canonical sigma function, the
 * elliptic Log, and pointwise local heights at p. All series live at an
 * internal working precision above the requested one.
 */
class HeightContext {
  public:
    HeightContext(const EllipticCurve& Emin, long p, long prec);

    const EllipticCurve& curve() const { return E_; }
    long prime() const { return p_; }
    long prec() const { return n_; }
    long work_prec() const { return nw_; }
    long series_len() const { return len_; }
    long group_order_fp() const { return Np_; }
    const FrobeniusData& frobenius() const { return frob_; }
    PadicNumber c_constant() const { return c_; }

    const PSeries& formal_log() const { return log_f_; }     // Log(t)
    const PSeries& omega_coeff() const { return lamp_; }     // dLog/dt
    const PSeries& sigma_unit() const { return sigma_u_; }   // sigma(t)/t
    const PSeries& zeta_reg() const { return zeta_reg_; }    // zeta_f(t) - 1/t
    const PSeries& x_laurent_unit() const { return xU_; }    // x(t) = t^-2 xU(t)

    ECGroup<PadicNumber> group() const { return ec_group_p(E_, p_, nw_); }
    PadicNumber to_padic(const BigInt& v) const { return PadicNumber::from_integer(v, p_, nw_); }

    /// -x/y of a point in the formal group (reduction = O)
    PadicNumber t_of(const ECPointP& P) const;
    /// order of the reduction of P in E(F_p)
    long order_of_reduction(const ECPointP& P) const;
    long order_of_reduction(const ECPointQ& P) const;

    /// elliptic Log via the formal-group logarithm on a multiple
    PadicNumber log_point(const ECPointP& P) const;
    /// psi_m(P), the m-division polynomial value
    PadicNumber psi_value(long m, const ECPointP& P) const;
    /// local Néron height at p, normalization lambda_p = -2 log sigma on the
    /// formal group, extended by sigma(t(mP)) = psi_m(P) sigma(t(P))^{m^2}
    PadicNumber lambda_p(const ECPointP& P) const;
    /// omega-normalized logarithmic derivative of sigma (the quasi-log)
    PadicNumber zeta_point(const ECPointP& P) const;

    /// sigma evaluated at a formal parameter value (val >= 1)
    PadicNumber sigma_at(const PadicNumber& t) const;
    /// log(sigma(t)) under the Iwasawa branch
    PadicNumber log_sigma_at(const PadicNumber& t) const;
    PadicNumber zeta_f_at(const PadicNumber& t) const;
    PadicNumber log_f_at(const PadicNumber& t) const;

  private:
    EllipticCurve E_;
    long p_, n_, nw_, len_, Np_;
    FrobeniusData frob_;
    PadicNumber c_;
    PSeries wser_, xU_, lamp_, log_f_, zeta_reg_, sigma_u_;
};

/// Canonical p-adic height of a rational point on the minimal model:
/// h(P) = [ -2 log sigma(t(mP)) + 2 log d(mP) ] / m^2 with mP in the formal
/// group and nonsingular everywhere, d = sqrt of the denominator of x(mP).
PadicNumber canonical_height(const HeightContext& hc, const ECPointQ& Pmin);

/// alpha = h(P) / (field_degree * Log(P)^2); P on the minimal model.
PadicNumber alpha_constant(const HeightContext& hc, const ECPointQ& Pmin, int field_degree);

/// m >= 1 with mP nonsingular-reducing at every bad prime of the minimal model
long clearing_multiple(const EllipticCurve& Emin, const ECPointQ& P);

/// Log of the phi-image using the half tangential-basepoint path on a
/// Weierstrass disk, from the pullback differential alone.
PadicNumber half_log_via_involution(const PSeries& omega_pullback, const PadicNumber& s);

}  // namespace qc
