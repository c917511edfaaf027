//! The single-modulus pipeline: resolve run parameters, compute resonator
//! weights and both moments, evaluate log L and L'/L across the character
//! group, certify the max >= weighted-mean inequality, and emit one
//! [`ScanRecord`].
//!
//! Everything here is deterministic for a fixed configuration: the core's
//! batch reductions use fixed chunk boundaries, so the emitted numeric
//! fields are bit-identical regardless of thread count. Only `runtime_ms`
//! varies between runs.

use std::sync::Arc;
use std::time::Instant;

use resonator_core::arith::{is_prime_u64, PrimeSieve};
use resonator_core::characters::CharacterGroup;
use resonator_core::constants::{predicted_bounds, ConstantBundle};
use resonator_core::lfun::{log_deriv_all_with, log_l_all, truncated_log_l_all, EvalParams};
use resonator_core::resonator::{
    certificate, q1_from_weights, q2_from_parts, ratio_rhs, weights_all, ResonatorParams,
};
use resonator_core::C64;

use crate::config::{AParam, RunConfig};
use crate::records::{ScanRecord, SCHEMA_VERSION};
use crate::{CliError, Result};

/// Records require loglog q > 1 so the predicted-bound normalization is
/// meaningful; 17 is the first prime past e^e.
pub const MIN_RECORD_Q: u64 = 17;

/// Prime cutoff Y for the truncated sums: the slowly-varying theoretical
/// choice (log q)^{100/(sigma - 1/2)} is astronomically large at any feasible
/// q, so it is capped at `y_cap`; the cutoff never drops below the resonator
/// support X.
pub fn y_cutoff(q: u64, sigma: f64, x: f64, y_cap: u64) -> f64 {
    let theoretical = (q as f64).ln().powf(100.0 / (sigma - 0.5));
    theoretical.min(y_cap as f64).max(x)
}

/// The resonator scale for one sigma: the configured value, or 99% of the
/// admissible supremum for this sigma/epsilon/GRH mode.
pub fn resolve_a(cfg: &RunConfig, sigma: f64) -> Result<f64> {
    match cfg.a {
        AParam::Fixed(v) => Ok(v),
        AParam::Auto => {
            let b = ConstantBundle::compute(sigma, 0.0, cfg.epsilon, cfg.grh, None)?;
            Ok(b.a_used)
        }
    }
}

/// The resonator cutoff X for one (q, sigma).
pub fn resolve_x(cfg: &RunConfig, q: u64, sigma: f64) -> Result<f64> {
    match cfg.x_override {
        Some(x) => Ok(x),
        None => {
            let a = resolve_a(cfg, sigma)?;
            let lq = (q as f64).ln();
            Ok(a * lq * lq.ln())
        }
    }
}

/// Shared state for one or many resonate runs: the prime sieve (sized to the
/// largest Y any planned task needs) and the L-evaluation parameters.
/// Cloning is cheap; the sieve is shared.
#[derive(Clone)]
pub struct Engine {
    eval: EvalParams,
    sieve: Arc<PrimeSieve>,
}

impl Engine {
    /// Build an engine able to serve every (q in `moduli`) x (sigma in the
    /// config) combination.
    pub fn new(cfg: &RunConfig, moduli: &[u64]) -> Result<Self> {
        let mut need: f64 = 3.0;
        for &q in moduli {
            for &sigma in &cfg.sigma_list {
                let x = resolve_x(cfg, q, sigma)?;
                need = need.max(y_cutoff(q, sigma, x, cfg.y_cap));
            }
        }
        let sieve = PrimeSieve::new(need.ceil() as u64)?;
        Ok(Engine {
            eval: EvalParams::default(),
            sieve: Arc::new(sieve),
        })
    }

    pub fn sieve(&self) -> &PrimeSieve {
        &self.sieve
    }

    /// Run the full pipeline for one (q, sigma, theta) cell.
    pub fn resonate(&self, cfg: &RunConfig, q: u64, sigma: f64, theta: f64) -> Result<ScanRecord> {
        let t0 = Instant::now();

        // ---- preconditions ------------------------------------------------
        if !is_prime_u64(q) {
            return Err(CliError::Validation(format!("q = {q} is not prime")));
        }
        if q < MIN_RECORD_Q {
            return Err(CliError::Validation(format!(
                "records need prime q >= {MIN_RECORD_Q} (loglog q must exceed 1), got {q}"
            )));
        }
        if !(sigma > 0.5 && sigma < 1.0) {
            return Err(CliError::Validation(format!(
                "sigma = {sigma} outside the open window (1/2, 1)"
            )));
        }
        if !(0.0..=std::f64::consts::TAU).contains(&theta) {
            return Err(CliError::Validation(format!("theta = {theta} outside [0, 2 pi]")));
        }
        if theta.cos() < 0.0 {
            return Err(CliError::Validation(format!(
                "theta = {theta} has negative cosine; the predicted lower bounds are vacuous there"
            )));
        }

        // ---- parameters ---------------------------------------------------
        // The bundle fixes the effective epsilon and (in auto mode) the
        // scale A; neither depends on theta.
        let a_opt = match cfg.a {
            AParam::Auto => None,
            AParam::Fixed(v) => Some(v),
        };
        let bundle = ConstantBundle::compute(sigma, 0.0, cfg.epsilon, cfg.grh, a_opt)?;
        let a_used = bundle.a_used;
        let params = match cfg.x_override {
            Some(x) => ResonatorParams::with_x(q, sigma, x)?,
            None => ResonatorParams::new(q, sigma, a_used)?,
        };
        let x = params.x();
        let y = y_cutoff(q, sigma, x, cfg.y_cap);
        if y > self.sieve.limit() as f64 {
            return Err(CliError::Invariant(format!(
                "engine sieve (limit {}) does not cover Y = {y}; engine built for the wrong task set",
                self.sieve.limit()
            )));
        }
        let g = CharacterGroup::new(q)?;
        let m = g.m();

        // ---- moments ------------------------------------------------------
        let weights = weights_all(&g, &params)?;
        let q1 = q1_from_weights(&weights.values);
        let t_all = truncated_log_l_all(&g, sigma, y, &self.sieve)?;
        let q2 = q2_from_parts(&t_all, theta, &weights.values);
        let ratio = q2 / q1;
        let rhs = ratio_rhs(&params, theta);
        // cos(theta) >= 0 and Y >= X hold here, so the finite lower bound is
        // a theorem, not an asymptotic statement.
        if !(ratio >= rhs.finite - 1e-10) {
            return Err(CliError::Invariant(format!(
                "q = {q}: moment ratio {ratio} fell below its finite lower bound {}",
                rhs.finite
            )));
        }

        // ---- per-character log L and the certificate ----------------------
        let batch = log_l_all(&g, sigma, &self.eval)?;
        let rot = C64::from_polar(1.0, -theta);
        let mut excluded = vec![false; m];
        let mut values = vec![0.0; m];
        excluded[0] = true; // principal: carries the zeta pole
        for j in 0..m {
            match &batch.outcomes[j] {
                Ok(v) => values[j] = (rot * v.value).re,
                Err(_) => excluded[j] = true,
            }
        }
        let excluded_count = excluded.iter().filter(|&&e| e).count() as u64;
        let cert = certificate(&values, &weights.values, &excluded)
            .map_err(|e| CliError::Invariant(format!("certificate at q = {q}: {e}")))?;
        if !(cert.max_value >= cert.weighted_mean - 1e-12 * (1.0 + cert.weighted_mean.abs())) {
            return Err(CliError::Invariant(format!(
                "q = {q}: certified max {} below its own weighted mean {}",
                cert.max_value, cert.weighted_mean
            )));
        }

        // ---- truncation slack ---------------------------------------------
        // Chain from the moment ratio down to the certified max:
        //   max Re(e^{-i theta} log L) >= mean'(log L)      [certificate]
        //                              >= mean'(T) - gap    [term-by-term]
        //                              >= ratio - excluded-mass - gap,
        // where mean' averages over admissible characters only, gap bounds
        // the largest per-character truncation discrepancy, and the
        // excluded-mass correction is (ratio - mean'(T))^+.
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        let mut gap: f64 = 0.0;
        for j in 0..m {
            if excluded[j] {
                continue;
            }
            s1 += weights.values[j];
            s2 += (rot * t_all[j]).re * weights.values[j];
            let log_l_j = batch.outcomes[j]
                .as_ref()
                .expect("non-excluded characters carry a branch value")
                .value;
            gap = gap.max((rot * (t_all[j] - log_l_j)).re.abs());
        }
        let mean_t = if s1 > 0.0 { s2 / s1 } else { 0.0 };
        let truncation_slack = (ratio - mean_t).max(0.0) + gap;

        // ---- remaining observables ----------------------------------------
        let mut max_log_abs_l = f64::NEG_INFINITY;
        for j in 0..m {
            if !excluded[j] {
                max_log_abs_l = max_log_abs_l.max(batch.l_at_sigma[j].norm().ln());
            }
        }

        let deriv = log_deriv_all_with(&g, sigma, &self.eval, &batch.l_at_sigma)?;
        let mut max_neg_re_logderiv = f64::NEG_INFINITY;
        for j in 0..m {
            if excluded[j] {
                continue;
            }
            if let Ok(v) = deriv.values[j] {
                max_neg_re_logderiv = max_neg_re_logderiv.max(-(rot * v).re);
            }
        }
        if !max_neg_re_logderiv.is_finite() {
            return Err(CliError::Invariant(format!(
                "q = {q}: no admissible character yielded a finite L'/L value"
            )));
        }

        let pb = predicted_bounds(q, sigma, theta, a_used, bundle.epsilon, cfg.grh)?;

        let record = ScanRecord {
            schema_version: SCHEMA_VERSION,
            q,
            sigma,
            theta,
            a: a_used,
            x,
            y,
            grh: cfg.grh,
            q1,
            q2,
            ratio,
            ratio_rhs: rhs.finite,
            argmax_j: cert.argmax.0 as u64,
            max_re_e_itheta_logl: cert.max_value,
            max_log_abs_l,
            max_neg_re_logderiv,
            predicted_logl_bound: pb.log_l,
            predicted_logderiv_bound: pb.log_deriv,
            truncation_slack,
            excluded_count,
            runtime_ms: t0.elapsed().as_millis() as u64,
        };
        record.check_invariants()?;
        Ok(record)
    }
}
