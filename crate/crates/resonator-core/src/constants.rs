//! Growth-rate constants behind the predicted lower bounds.
//!
//! The resonance method certifies characters with
//!
//!   max_chi Re e^{-i theta} log L(sigma, chi) >= C (log q)^{1-sigma} (loglog q)^{-sigma}
//!
//! (and the L'/L analogue with (loglog q)^{+(1-sigma)}), where the constant
//! C depends on the resonator scale A through C = cos(theta) *
//! (sigma/(1-sigma)) * A^{1-sigma}. How large A may be taken is governed by
//!
//!   lambda(sigma) = int_0^1 t^sigma / (2 - t^sigma) dt,
//!   vartheta(sigma) = min(3(1-sigma)/(2-sigma), 2(1-sigma)/sigma),
//!
//! via A < (1 - vartheta(sigma - epsilon)) / (sigma (1 + lambda(sigma))),
//! with vartheta replaced by 0 when zero-density input is upgraded to the
//! generalized Riemann hypothesis. The two branches of vartheta cross at
//! sigma = 0.8 (both equal 1/2 there), and lambda(1) = 2 log 2 - 1.
//!
//! Everything in this module drops o(1) corrections in q; the
//! `asymptotic_terms_dropped` flag on [`ConstantBundle`] records that.

use crate::error::{CoreError, Result};

/// Default epsilon for the zero-density loss, before clamping against
/// sigma - 1/2.
pub const DEFAULT_EPSILON: f64 = 0.01;

fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, fm, flm, left, 0.5 * eps, depth - 1)
            + simpson_rec(f, m, b, fm, fb, frm, right, 0.5 * eps, depth - 1)
    }
}

/// Adaptive Simpson quadrature to absolute tolerance `eps`.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fb, fm, whole, eps, 52)
}

/// lambda(sigma) = int_0^1 t^sigma / (2 - t^sigma) dt, to 1e-12 absolute.
pub fn lambda_sigma(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(CoreError::OutOfRange {
            what: "sigma",
            got: sigma,
            range: "(0, inf)",
        });
    }
    let f = move |t: f64| {
        let ts = t.powf(sigma);
        ts / (2.0 - ts)
    };
    Ok(integrate(&f, 0.0, 1.0, 1e-12))
}

/// The zero-density exponent: min(3(1-s)/(2-s), 2(1-s)/s) on [1/2, 1].
pub fn vartheta(sigma: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&sigma) {
        return Err(CoreError::OutOfRange {
            what: "sigma",
            got: sigma,
            range: "[1/2, 1]",
        });
    }
    let ingham = 3.0 * (1.0 - sigma) / (2.0 - sigma);
    let huxley = 2.0 * (1.0 - sigma) / sigma;
    Ok(ingham.min(huxley))
}

fn check_epsilon(sigma: f64, epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon < sigma - 0.5) {
        return Err(CoreError::OutOfRange {
            what: "epsilon",
            got: epsilon,
            range: "[0, sigma - 1/2)",
        });
    }
    Ok(())
}

/// Supremum of admissible resonator scales A at this sigma:
/// (1 - vartheta(sigma - epsilon)) / (sigma (1 + lambda(sigma))),
/// with the vartheta factor removed under GRH.
pub fn a_max(sigma: f64, epsilon: f64, grh: bool) -> Result<f64> {
    if !(sigma > 0.5 && sigma <= 1.0) {
        return Err(CoreError::OutOfRange {
            what: "sigma",
            got: sigma,
            range: "(1/2, 1]",
        });
    }
    check_epsilon(sigma, epsilon)?;
    let lam = lambda_sigma(sigma)?;
    let base = 1.0 / (sigma * (1.0 + lam));
    if grh {
        Ok(base)
    } else {
        Ok((1.0 - vartheta(sigma - epsilon)?) * base)
    }
}

/// Which constant to report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantVariant {
    /// The ceiling stated by the general theorem:
    /// cos(theta) (sigma/(1-sigma)) ((1 - vartheta(sigma-eps)) / (2 sigma))^{1-sigma}.
    TheoremCap,
    /// What the concrete resonator scale A actually delivers:
    /// cos(theta) (sigma/(1-sigma)) A^{1-sigma}.
    Achieved { a: f64 },
}

pub fn predicted_constant(
    sigma: f64,
    theta: f64,
    epsilon: f64,
    grh: bool,
    variant: ConstantVariant,
) -> Result<f64> {
    if !(sigma > 0.5 && sigma < 1.0) {
        return Err(CoreError::OutOfRange {
            what: "sigma",
            got: sigma,
            range: "(1/2, 1)",
        });
    }
    let ct = theta.cos();
    if ct < 0.0 {
        return Err(CoreError::invalid(format!(
            "cos(theta) = {ct} < 0: the lower bound degenerates at this angle"
        )));
    }
    let front = ct * sigma / (1.0 - sigma);
    match variant {
        ConstantVariant::TheoremCap => {
            check_epsilon(sigma, epsilon)?;
            let th = if grh { 0.0 } else { vartheta(sigma - epsilon)? };
            Ok(front * ((1.0 - th) / (2.0 * sigma)).powf(1.0 - sigma))
        }
        ConstantVariant::Achieved { a } => {
            if !(a > 0.0) || !a.is_finite() {
                return Err(CoreError::invalid(format!(
                    "resonator scale A must be positive, got {a}"
                )));
            }
            Ok(front * a.powf(1.0 - sigma))
        }
    }
}

/// The two predicted lower bounds at a concrete modulus:
/// C (log q)^{1-sigma} (loglog q)^{-sigma} for max Re e^{-i theta} log L, and
/// C (log q)^{1-sigma} (loglog q)^{1-sigma} for the -Re e^{-i theta} L'/L
/// analogue. Their quotient is exactly loglog q.
#[derive(Debug, Clone, Copy)]
pub struct PredictedBounds {
    pub log_l: f64,
    pub log_deriv: f64,
}

pub fn predicted_bounds(
    q: u64,
    sigma: f64,
    theta: f64,
    a: f64,
    epsilon: f64,
    grh: bool,
) -> Result<PredictedBounds> {
    if q < 17 {
        return Err(CoreError::invalid(format!(
            "predicted bounds need q >= 17 (loglog q > 1), got {q}"
        )));
    }
    // epsilon participates only through validation here; the achieved
    // constant depends on A alone
    check_epsilon(sigma, epsilon)?;
    let _ = grh;
    let c = predicted_constant(sigma, theta, epsilon, grh, ConstantVariant::Achieved { a })?;
    let lq = (q as f64).ln();
    let llq = lq.ln();
    let shared = c * lq.powf(1.0 - sigma);
    Ok(PredictedBounds {
        log_l: shared * llq.powf(-sigma),
        log_deriv: shared * llq.powf(1.0 - sigma),
    })
}

/// Everything the reporting layer wants in one bundle.
#[derive(Debug, Clone, Copy)]
pub struct ConstantBundle {
    pub sigma: f64,
    pub theta: f64,
    /// effective epsilon after defaulting/clamping
    pub epsilon: f64,
    pub grh: bool,
    pub lambda: f64,
    /// vartheta(sigma - epsilon)
    pub vartheta: f64,
    pub a_max_uncond: f64,
    pub a_max_grh: f64,
    /// the A the bundle was evaluated at
    pub a_used: f64,
    pub c_theorem_cap: f64,
    pub c_achieved: f64,
    /// o(1) corrections in q are not modeled anywhere in this bundle
    pub asymptotic_terms_dropped: bool,
}

impl ConstantBundle {
    /// `epsilon = None` picks the default 0.01, clamped to half the distance
    /// from sigma to 1/2; an explicit epsilon must already be admissible.
    /// `a = None` uses 99% of the admissible supremum for the chosen mode.
    pub fn compute(
        sigma: f64,
        theta: f64,
        epsilon: Option<f64>,
        grh: bool,
        a: Option<f64>,
    ) -> Result<Self> {
        if !(sigma > 0.5 && sigma < 1.0) {
            return Err(CoreError::OutOfRange {
                what: "sigma",
                got: sigma,
                range: "(1/2, 1)",
            });
        }
        let eps = match epsilon {
            Some(e) => {
                check_epsilon(sigma, e)?;
                e
            }
            None => DEFAULT_EPSILON.min(0.5 * (sigma - 0.5)),
        };
        let lambda = lambda_sigma(sigma)?;
        let vth = vartheta(sigma - eps)?;
        let a_max_uncond = a_max(sigma, eps, false)?;
        let a_max_grh = a_max(sigma, eps, true)?;
        let a_used = a.unwrap_or(0.99 * if grh { a_max_grh } else { a_max_uncond });
        if !(a_used > 0.0) {
            return Err(CoreError::invalid(format!(
                "resonator scale A must be positive, got {a_used}"
            )));
        }
        let c_theorem_cap =
            predicted_constant(sigma, theta, eps, grh, ConstantVariant::TheoremCap)?;
        let c_achieved =
            predicted_constant(sigma, theta, eps, grh, ConstantVariant::Achieved { a: a_used })?;
        Ok(ConstantBundle {
            sigma,
            theta,
            epsilon: eps,
            grh,
            lambda,
            vartheta: vth,
            a_max_uncond,
            a_max_grh,
            a_used,
            c_theorem_cap,
            c_achieved,
            asymptotic_terms_dropped: true,
        })
    }
}
