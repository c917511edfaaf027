//! The resonator and its moments.
//!
//! For a modulus q, an exponent sigma in (1/2, 1) and a cutoff X < q, the
//! resonance coefficients are r(p) = 1 - (p/X)^sigma on primes p <= X
//! (zero beyond, and exactly zero at p = X), extended to all n by complete
//! multiplicativity. The resonator attached to a character is the finite
//! Euler product
//!
//!   R(chi) = prod_{p <= X} (1 - r(p) chi(p))^{-1} = sum_n r(n) chi(n),
//!
//! absolutely convergent since 0 <= r(p) < 1. The first moment
//! Q1 = sum_chi |R(chi)|^2 and the twisted second moment
//! Q2 = sum_chi Re(e^{-i theta} T_chi) |R(chi)|^2 (with T_chi a truncated
//! prime sum, see `lfun::truncated_log_l_all`) satisfy
//! Q2/Q1 >= cos(theta) sum_{p <= X} r(p) p^{-sigma} whenever cos(theta) >= 0
//! and the truncation covers the resonator range: expanding Q2 by
//! orthogonality leaves only nonnegative congruence terms. Since a weighted
//! mean never exceeds the max, some character must reach the ratio — that is
//! the certificate this module produces.

use crate::arith::{is_prime_u64, PrimeSieve};
use crate::characters::{CharacterGroup, CharIndex};
use crate::error::{CoreError, Result};
use crate::lfun::truncated_log_l_all;
use crate::{parallel, C64};

/// Largest support bound accepted by the congruence oracle.
pub const CONGRUENCE_ORACLE_CAP: u64 = 100_000;

#[derive(Debug, Clone)]
pub struct ResonatorParams {
    q: u64,
    sigma: f64,
    x: f64,
    a_param: Option<f64>,
    /// (p, r(p)) for primes p <= X, ascending.
    coeffs: Vec<(u64, f64)>,
}

impl ResonatorParams {
    /// Standard cutoff X = A log(q) loglog(q).
    pub fn new(q: u64, sigma: f64, a_param: f64) -> Result<Self> {
        if !(a_param.is_finite() && a_param > 0.0) {
            return Err(CoreError::invalid(format!(
                "resonator scale A must be positive, got {a_param}"
            )));
        }
        let lq = (q as f64).ln();
        let x = a_param * lq * lq.ln();
        let mut p = Self::with_x(q, sigma, x)?;
        p.a_param = Some(a_param);
        Ok(p)
    }

    /// Explicit cutoff (diagnostics and tests).
    pub fn with_x(q: u64, sigma: f64, x: f64) -> Result<Self> {
        if q == 2 || !is_prime_u64(q) {
            return Err(CoreError::invalid(format!(
                "resonator modulus must be an odd prime, got {q}"
            )));
        }
        if !(sigma > 0.5 && sigma < 1.0) {
            return Err(CoreError::OutOfRange {
                what: "sigma",
                got: sigma,
                range: "(1/2, 1)",
            });
        }
        if !x.is_finite() || x < 0.0 {
            return Err(CoreError::invalid(format!("bad resonator cutoff {x}")));
        }
        if x >= q as f64 {
            return Err(CoreError::invalid(format!(
                "resonator cutoff X = {x} must stay below q = {q} so that the \
                 support is coprime to q"
            )));
        }
        let coeffs = if x < 2.0 {
            Vec::new()
        } else {
            let sieve = PrimeSieve::new(x.floor() as u64)?;
            sieve
                .primes()
                .iter()
                .map(|&p| (p, 1.0 - (p as f64 / x).powf(sigma)))
                .collect()
        };
        Ok(ResonatorParams {
            q,
            sigma,
            x,
            a_param: None,
            coeffs,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// The scale A when the cutoff came from A log q loglog q.
    pub fn a_param(&self) -> Option<f64> {
        self.a_param
    }

    pub fn coeffs(&self) -> &[(u64, f64)] {
        &self.coeffs
    }

    /// r(p) for prime p.
    pub fn r_coeff(&self, p: u64) -> Result<f64> {
        if !is_prime_u64(p) {
            return Err(CoreError::invalid(format!(
                "r_coeff takes a prime, got {p}"
            )));
        }
        if (p as f64) >= self.x {
            return Ok(0.0);
        }
        match self.coeffs.binary_search_by_key(&p, |&(pp, _)| pp) {
            Ok(i) => Ok(self.coeffs[i].1),
            Err(_) => Ok(0.0),
        }
    }

    /// r(n) by complete multiplicativity; r(1) = 1.
    pub fn r_value(&self, n: u64, sieve: &PrimeSieve) -> Result<f64> {
        if n == 0 {
            return Err(CoreError::invalid("r_value(0) undefined"));
        }
        let mut out = 1.0;
        for (p, e) in sieve.factorize(n)? {
            if (p as f64) >= self.x {
                return Ok(0.0);
            }
            let rp = self.r_coeff(p)?;
            if rp == 0.0 {
                return Ok(0.0);
            }
            out *= rp.powi(e as i32);
        }
        Ok(out)
    }

    /// Total resonance mass sum_n r(n) = prod_{p <= X} (X/p)^sigma; this is
    /// also R(chi_0). Empty cutoff gives 1.
    pub fn principal_mass(&self) -> f64 {
        let mut out = 1.0;
        for &(p, _) in &self.coeffs {
            out *= (self.x / p as f64).powf(self.sigma);
        }
        out
    }

    /// (n, r(n)) over the support n <= n_max, sorted by n.
    fn smooth_support(&self, n_max: u64) -> Vec<(u64, f64)> {
        let mut out = Vec::new();
        if n_max >= 1 {
            rec_support(&self.coeffs, 1, 1.0, n_max, &mut out);
        }
        out.sort_unstable_by_key(|&(n, _)| n);
        out
    }
}

fn rec_support(cs: &[(u64, f64)], n: u64, rn: f64, n_max: u64, out: &mut Vec<(u64, f64)>) {
    out.push((n, rn));
    for (i, &(p, rp)) in cs.iter().enumerate() {
        if rp == 0.0 {
            continue; // the boundary prime p = X carries no mass
        }
        if n > n_max / p {
            break; // primes are ascending: nothing further fits
        }
        rec_support(&cs[i..], n * p, rn * rp, n_max, out);
    }
}

fn check_group(g: &CharacterGroup, params: &ResonatorParams) -> Result<()> {
    if g.q() != params.q {
        return Err(CoreError::invalid(format!(
            "character group mod {} paired with resonator mod {}",
            g.q(),
            params.q
        )));
    }
    Ok(())
}

/// R(chi_j) as the finite Euler product.
pub fn resonator_value(g: &CharacterGroup, j: CharIndex, params: &ResonatorParams) -> Result<C64> {
    check_group(g, params)?;
    let mut out = C64::new(1.0, 0.0);
    for &(p, rp) in &params.coeffs {
        let f = C64::new(1.0, 0.0) - g.char_value(j, p) * rp;
        if f.norm() < 1e-12 {
            return Err(CoreError::DegenerateFactor(p));
        }
        out /= f;
    }
    Ok(out)
}

/// Truncated series sum_{n <= n_max} r(n) chi_j(n) with a rigorous bound on
/// the dropped mass: tail = prod (X/p)^sigma - sum_{n <= n_max} r(n), which
/// dominates |R(chi) - partial| since |chi| <= 1 on the support.
#[derive(Debug, Clone, Copy)]
pub struct SeriesPartial {
    pub sum: C64,
    pub tail: f64,
}

pub fn series_partial(
    g: &CharacterGroup,
    j: CharIndex,
    params: &ResonatorParams,
    n_max: u64,
    sieve: &PrimeSieve,
) -> Result<SeriesPartial> {
    check_group(g, params)?;
    if n_max < 1 {
        return Err(CoreError::invalid("series_partial needs n_max >= 1"));
    }
    if n_max > sieve.limit() {
        return Err(CoreError::invalid(format!(
            "n_max {n_max} exceeds sieve limit {}",
            sieve.limit()
        )));
    }
    let support = params.smooth_support(n_max);
    let mut sum = C64::new(0.0, 0.0);
    let mut mass = 0.0;
    for &(n, rn) in &support {
        debug_assert!((params.r_value(n, sieve).unwrap() - rn).abs() <= 1e-12 * rn);
        sum += g.char_value(j, n) * rn;
        mass += rn;
    }
    let tail = (params.principal_mass() - mass).max(0.0);
    Ok(SeriesPartial { sum, tail })
}

/// All resonator weights |R(chi_j)|^2, with the uniform log-bound they obey:
/// log |R(chi)|^2 <= 2 sigma sum_{p <= X} log(X/p), with equality at the
/// principal character. The bound is verified before returning.
#[derive(Debug, Clone)]
pub struct ResonatorWeights {
    pub values: Vec<f64>,
    pub log_bound: f64,
}

pub fn weights_all(g: &CharacterGroup, params: &ResonatorParams) -> Result<ResonatorWeights> {
    check_group(g, params)?;
    let coeffs = params.coeffs.clone();
    let values: Vec<f64> = parallel::map_indexed(g.m(), |j| {
        let mut r = C64::new(1.0, 0.0);
        for &(p, rp) in &coeffs {
            r /= C64::new(1.0, 0.0) - g.char_value(CharIndex(j), p) * rp;
        }
        r.norm_sqr()
    });
    let log_bound: f64 = 2.0
        * params.sigma
        * params
            .coeffs
            .iter()
            .map(|&(p, _)| (params.x / p as f64).ln())
            .sum::<f64>();
    for (j, &w) in values.iter().enumerate() {
        if w.ln() > log_bound + 1e-10 {
            return Err(CoreError::Internal(format!(
                "weight bound violated at j = {j}: log w = {} > {log_bound}",
                w.ln()
            )));
        }
    }
    Ok(ResonatorWeights { values, log_bound })
}

/// First moment Q1 = sum over all characters of |R(chi)|^2.
pub fn q1_moment(g: &CharacterGroup, params: &ResonatorParams) -> Result<f64> {
    let w = weights_all(g, params)?;
    Ok(q1_from_weights(&w.values))
}

pub fn q1_from_weights(weights: &[f64]) -> f64 {
    parallel::sum_by_f64(weights.len(), |j| weights[j])
}

/// Independent route to Q1 through orthogonality: expanding |R|^2 as a double
/// series and summing over characters leaves phi(q) times the sum of
/// r(m) r(n) over congruent pairs m = n (mod q) — computed here by grouping
/// the truncated support by residue class. Returned together with an upper
/// bound on the truncation deficit and the diagonal lower bound
/// (q-1) sum r(n)^2 that Q1 itself must respect.
#[derive(Debug, Clone, Copy)]
pub struct CongruenceOracle {
    pub value: f64,
    pub deficit_bound: f64,
    pub diagonal_bound: f64,
}

pub fn q1_congruence_oracle(params: &ResonatorParams, n_max: u64) -> Result<CongruenceOracle> {
    if n_max == 0 || n_max > CONGRUENCE_ORACLE_CAP {
        return Err(CoreError::invalid(format!(
            "congruence oracle support bound must lie in [1, {CONGRUENCE_ORACLE_CAP}], got {n_max}"
        )));
    }
    let q = params.q;
    let phi = (q - 1) as f64;
    let support = params.smooth_support(n_max);
    let mut by_class = vec![0.0f64; q as usize];
    let mut mass = 0.0;
    let mut diag = 0.0;
    for &(n, rn) in &support {
        let c = (n % q) as usize;
        debug_assert_ne!(c, 0, "support is built from primes below X < q");
        by_class[c] += rn;
        mass += rn;
        diag += rn * rn;
    }
    let value = phi * by_class.iter().map(|&s| s * s).sum::<f64>();
    let tail = (params.principal_mass() - mass).max(0.0);
    Ok(CongruenceOracle {
        value,
        deficit_bound: phi * (2.0 * mass * tail + tail * tail),
        diagonal_bound: phi * diag,
    })
}

/// Twisted second moment Q2 = sum_chi Re(e^{-i theta} T_chi(sigma, Y)) |R(chi)|^2,
/// where T_chi is the truncated prime sum of log L.
pub fn q2_moment(
    g: &CharacterGroup,
    params: &ResonatorParams,
    y: f64,
    theta: f64,
    sieve: &PrimeSieve,
) -> Result<f64> {
    check_group(g, params)?;
    if !theta.is_finite() {
        return Err(CoreError::invalid("theta must be finite"));
    }
    let w = weights_all(g, params)?;
    let t = truncated_log_l_all(g, params.sigma, y, sieve)?;
    Ok(q2_from_parts(&t, theta, &w.values))
}

/// Combine precomputed truncated sums and weights into Q2. Fixed-order
/// chunked reduction, so thread count does not affect the result.
pub fn q2_from_parts(t: &[C64], theta: f64, weights: &[f64]) -> f64 {
    debug_assert_eq!(t.len(), weights.len());
    let rot = C64::from_polar(1.0, -theta);
    parallel::sum_by_f64(t.len(), |j| (rot * t[j]).re * weights[j])
}

/// O(m * pi(Y)) reference for Q2 that avoids every batch path: weights come
/// from per-character Euler products and the truncated sums from direct
/// character evaluation.
pub fn q2_moment_naive(
    g: &CharacterGroup,
    params: &ResonatorParams,
    y: f64,
    theta: f64,
    sieve: &PrimeSieve,
) -> Result<f64> {
    check_group(g, params)?;
    if y > sieve.limit() as f64 {
        return Err(CoreError::invalid(format!(
            "truncation bound {y} exceeds sieve limit {}",
            sieve.limit()
        )));
    }
    let rot = C64::from_polar(1.0, -theta);
    let primes = sieve.primes_upto(y);
    let mut out = 0.0;
    for j in 0..g.m() {
        let r = resonator_value(g, CharIndex(j), params)?;
        let mut t = C64::new(0.0, 0.0);
        for &p in primes {
            t += g.char_value(CharIndex(j), p) * (p as f64).powf(-params.sigma);
        }
        out += (rot * t).re * r.norm_sqr();
    }
    Ok(out)
}

/// The finite lower bound for Q2/Q1 and its asymptotic display form.
///
/// Whenever cos(theta) >= 0, Y >= X and X < q,
///   Q2/Q1 >= cos(theta) * sum_{p <= X} r(p) p^{-sigma}   (the `finite` field);
/// the `asymptotic` field is the standard approximation
/// cos(theta) * (sigma/(1-sigma)) * X^{1-sigma}/log X of the same sum.
/// A negative cos(theta) does not invalidate the computation, only the
/// inequality; `cos_applicable` records which case we are in.
#[derive(Debug, Clone, Copy)]
pub struct RatioBound {
    pub finite: f64,
    pub asymptotic: f64,
    pub cos_applicable: bool,
}

pub fn ratio_rhs(params: &ResonatorParams, theta: f64) -> RatioBound {
    let ct = theta.cos();
    let mut sum = 0.0;
    for &(p, rp) in &params.coeffs {
        sum += rp * (p as f64).powf(-params.sigma);
    }
    let asymptotic = if params.x >= 3.0 {
        ct * (params.sigma / (1.0 - params.sigma)) * params.x.powf(1.0 - params.sigma)
            / params.x.ln()
    } else {
        0.0
    };
    RatioBound {
        finite: ct * sum,
        asymptotic,
        cos_applicable: ct >= 0.0,
    }
}

/// The max >= weighted-mean certificate over the non-excluded characters.
#[derive(Debug, Clone, Copy)]
pub struct Certificate {
    pub weighted_mean: f64,
    pub argmax: CharIndex,
    pub max_value: f64,
    /// number of characters that entered the comparison
    pub included: usize,
}

/// Given per-character values and positive weights, certify that the maximum
/// over non-excluded characters is at least the weighted mean. The principal
/// character (j = 0) must be excluded by the caller — its L-value carries the
/// zeta pole and never participates in extremal statistics. Ties on the max
/// resolve to the smallest index.
pub fn certificate(values: &[f64], weights: &[f64], excluded: &[bool]) -> Result<Certificate> {
    let m = values.len();
    if weights.len() != m || excluded.len() != m || m == 0 {
        return Err(CoreError::invalid(
            "certificate needs equally sized non-empty tables",
        ));
    }
    if !excluded[0] {
        return Err(CoreError::invalid(
            "certificate requires the principal character to be excluded",
        ));
    }
    let mut wsum = 0.0;
    let mut vsum = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for j in 0..m {
        if excluded[j] {
            continue;
        }
        let w = weights[j];
        if !(w > 0.0) || !values[j].is_finite() {
            return Err(CoreError::invalid(format!(
                "character {j}: weight must be positive and value finite"
            )));
        }
        wsum += w;
        vsum += values[j] * w;
        match best {
            Some((_, bv)) if values[j] <= bv => {}
            _ => best = Some((j, values[j])),
        }
    }
    let Some((argmax, max_value)) = best else {
        return Err(CoreError::EmptyDomain);
    };
    Ok(Certificate {
        weighted_mean: vsum / wsum,
        argmax: CharIndex(argmax),
        max_value,
        included: (0..m).filter(|&j| !excluded[j]).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(q: u64) -> CharacterGroup {
        CharacterGroup::new(q).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ResonatorParams::with_x(2, 0.75, 1.0).is_err());
        assert!(ResonatorParams::with_x(15, 0.75, 4.0).is_err());
        assert!(ResonatorParams::with_x(101, 0.5, 20.0).is_err());
        assert!(ResonatorParams::with_x(101, 1.0, 20.0).is_err());
        assert!(ResonatorParams::with_x(101, 0.75, 101.0).is_err());
        assert!(ResonatorParams::with_x(101, 0.75, 150.0).is_err());
        assert!(ResonatorParams::new(101, 0.75, -1.0).is_err());
        let p = ResonatorParams::with_x(101, 0.75, 100.9).unwrap();
        assert_eq!(p.coeffs().last().unwrap().0, 97);
    }

    #[test]
    fn default_cutoff_formula() {
        let q = 1009u64;
        let a = 0.36;
        let p = ResonatorParams::new(q, 0.75, a).unwrap();
        let lq = (q as f64).ln();
        assert!((p.x() - a * lq * lq.ln()).abs() < 1e-12);
        assert_eq!(p.a_param(), Some(a));
        assert!(p.x() < q as f64);
    }

    #[test]
    fn r_coeff_golden_value() {
        // 1 - 0.02^{0.75}, independently computed
        let p = ResonatorParams::with_x(1009, 0.75, 100.0).unwrap();
        assert!((p.r_coeff(2).unwrap() - 0.9468170410305501).abs() < 1e-15);
        // boundary and beyond carry nothing
        let p3 = ResonatorParams::with_x(101, 0.75, 3.0).unwrap();
        assert_eq!(p3.r_coeff(3).unwrap(), 0.0);
        assert_eq!(p3.r_coeff(5).unwrap(), 0.0);
        assert!(p3.r_coeff(2).unwrap() > 0.0);
        assert!(p3.r_coeff(4).is_err()); // not prime
    }

    #[test]
    fn r_is_completely_multiplicative() {
        let p = ResonatorParams::with_x(1009, 0.6, 30.0).unwrap();
        let sieve = PrimeSieve::new(10_000).unwrap();
        let r = |n| p.r_value(n, &sieve).unwrap();
        assert_eq!(r(1), 1.0);
        assert!((r(12) - r(2) * r(2) * r(3)).abs() < 1e-15);
        assert!((r(35) - r(5) * r(7)).abs() < 1e-15);
        assert_eq!(r(31), 0.0); // 31 > X
        assert_eq!(r(62), 0.0);
        assert!(p.r_value(0, &sieve).is_err());
    }

    #[test]
    fn principal_resonator_is_total_mass() {
        let g = group(101);
        for x in [1.5, 3.0, 20.0, 97.5] {
            let p = ResonatorParams::with_x(101, 0.75, x).unwrap();
            let r0 = resonator_value(&g, CharIndex(0), &p).unwrap();
            let want = p.principal_mass();
            assert!(
                (r0 - C64::new(want, 0.0)).norm() <= 1e-12 * want,
                "x={x}: {r0} vs {want}"
            );
        }
        // empty cutoff: R = 1 identically
        let p = ResonatorParams::with_x(101, 0.75, 1.5).unwrap();
        assert_eq!(resonator_value(&g, CharIndex(7), &p).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn series_partial_converges_to_euler_product() {
        let g = group(101);
        let sieve = PrimeSieve::new(2_000_000).unwrap();
        let p = ResonatorParams::with_x(101, 0.75, 3.0).unwrap();
        // X = 3: only p = 2 carries mass, total = (3/2)^{3/4}
        assert!((p.principal_mass() - 1.5f64.powf(0.75)).abs() < 1e-14);
        let mut last_tail = f64::INFINITY;
        for n_max in [1u64, 8, 64, 4096, 1_048_576] {
            for j in [0usize, 1, 55] {
                let sp = series_partial(&g, CharIndex(j), &p, n_max, &sieve).unwrap();
                let rv = resonator_value(&g, CharIndex(j), &p).unwrap();
                assert!(
                    (rv - sp.sum).norm() <= sp.tail + 1e-14,
                    "j={j} n_max={n_max}: gap {} vs tail {}",
                    (rv - sp.sum).norm(),
                    sp.tail
                );
            }
            let t = series_partial(&g, CharIndex(1), &p, n_max, &sieve).unwrap().tail;
            assert!(t <= last_tail);
            last_tail = t;
        }
        assert!(last_tail < 1e-8);
    }

    #[test]
    fn weight_bound_holds_with_equality_at_principal() {
        let g = group(1009);
        let p = ResonatorParams::with_x(1009, 0.75, 30.0).unwrap();
        let w = weights_all(&g, &p).unwrap();
        assert_eq!(w.values.len(), 1008);
        for (j, &v) in w.values.iter().enumerate() {
            assert!(v.ln() <= w.log_bound + 1e-10, "j={j}");
        }
        assert!((w.values[0].ln() - w.log_bound).abs() < 1e-10);
        // the bound is attained only at the principal character here
        for (j, &v) in w.values.iter().enumerate().skip(1) {
            assert!(v.ln() < w.log_bound - 1e-6, "j={j} unexpectedly extremal");
        }
    }

    #[test]
    fn q1_matches_congruence_oracle_small() {
        for (q, x) in [(5u64, 4.0), (7, 6.0), (11, 10.0)] {
            let g = group(q);
            let p = ResonatorParams::with_x(q, 0.75, x).unwrap();
            let q1 = q1_moment(&g, &p).unwrap();
            let oracle = q1_congruence_oracle(&p, 30_000).unwrap();
            assert!(
                (q1 - oracle.value).abs() <= oracle.deficit_bound,
                "q={q}: {q1} vs {} (deficit {})",
                oracle.value,
                oracle.deficit_bound
            );
            assert!(q1 >= oracle.diagonal_bound - 1e-9 * q1.abs());
        }
    }

    #[test]
    fn congruence_oracle_rejects_oversized_support() {
        let p = ResonatorParams::with_x(11, 0.75, 10.0).unwrap();
        assert!(q1_congruence_oracle(&p, CONGRUENCE_ORACLE_CAP + 1).is_err());
        assert!(q1_congruence_oracle(&p, 0).is_err());
    }

    #[test]
    fn q2_fast_matches_naive() {
        let g = group(61);
        let sieve = PrimeSieve::new(2000).unwrap();
        let p = ResonatorParams::with_x(61, 0.75, 12.0).unwrap();
        for theta in [0.0, 0.7, std::f64::consts::PI] {
            let fast = q2_moment(&g, &p, 1500.0, theta, &sieve).unwrap();
            let naive = q2_moment_naive(&g, &p, 1500.0, theta, &sieve).unwrap();
            assert!(
                (fast - naive).abs() <= 1e-9 * naive.abs().max(1.0),
                "theta={theta}: {fast} vs {naive}"
            );
        }
    }

    #[test]
    fn q2_angle_law() {
        // summing over the full (conjugation-closed) character group kills
        // every imaginary part, so Q2(theta) = cos(theta) Q2(0) exactly
        let g = group(101);
        let sieve = PrimeSieve::new(2000).unwrap();
        let p = ResonatorParams::with_x(101, 0.75, 20.0).unwrap();
        let q2_0 = q2_moment(&g, &p, 1000.0, 0.0, &sieve).unwrap();
        for theta in [0.3, std::f64::consts::FRAC_PI_4, 2.0, 5.5] {
            let q2_t = q2_moment(&g, &p, 1000.0, theta, &sieve).unwrap();
            assert!(
                (q2_t - theta.cos() * q2_0).abs() <= 1e-10 * q2_0.abs(),
                "theta={theta}"
            );
        }
    }

    #[test]
    fn ratio_inequality_at_finite_scale() {
        let g = group(101);
        let sieve = PrimeSieve::new(20_000).unwrap();
        for x in [4.0, 10.0, 20.0] {
            let p = ResonatorParams::with_x(101, 0.75, x).unwrap();
            let q1 = q1_moment(&g, &p).unwrap();
            for theta in [0.0, 0.5, std::f64::consts::FRAC_PI_2] {
                let q2 = q2_moment(&g, &p, 10_000.0, theta, &sieve).unwrap();
                let rhs = ratio_rhs(&p, theta);
                assert!(rhs.cos_applicable);
                assert!(
                    q2 / q1 >= rhs.finite - 1e-10,
                    "x={x} theta={theta}: {} < {}",
                    q2 / q1,
                    rhs.finite
                );
            }
        }
    }

    #[test]
    fn ratio_rhs_flags_negative_cos() {
        let p = ResonatorParams::with_x(101, 0.75, 20.0).unwrap();
        let b = ratio_rhs(&p, std::f64::consts::PI);
        assert!(!b.cos_applicable);
        assert!(b.finite < 0.0); // value still reported
        let b0 = ratio_rhs(&p, 0.0);
        assert!(b0.cos_applicable && b0.finite > 0.0);
        assert!(b0.asymptotic > 0.0);
    }

    #[test]
    fn certificate_max_dominates_mean() {
        let values = vec![0.0, 1.0, 3.0, 2.0, 3.0];
        let weights = vec![1.0, 1.0, 1.0, 5.0, 1.0];
        let excluded = vec![true, false, false, false, false];
        let c = certificate(&values, &weights, &excluded).unwrap();
        assert_eq!(c.argmax, CharIndex(2)); // smallest index wins the tie
        assert_eq!(c.max_value, 3.0);
        assert_eq!(c.included, 4);
        let want_mean = (1.0 + 3.0 + 10.0 + 3.0) / 8.0;
        assert!((c.weighted_mean - want_mean).abs() < 1e-15);
        assert!(c.max_value >= c.weighted_mean - 1e-12);
    }

    #[test]
    fn certificate_error_paths() {
        let v = vec![0.0, 1.0];
        let w = vec![1.0, 1.0];
        // principal not excluded
        assert!(certificate(&v, &w, &[false, false]).is_err());
        // everything excluded
        assert!(matches!(
            certificate(&v, &w, &[true, true]),
            Err(CoreError::EmptyDomain)
        ));
        // non-positive weight
        assert!(certificate(&v, &[1.0, 0.0], &[true, false]).is_err());
        // mismatched lengths
        assert!(certificate(&v, &w, &[true]).is_err());
    }

    #[test]
    fn group_modulus_mismatch_is_caught() {
        let g = group(101);
        let p = ResonatorParams::with_x(103, 0.75, 20.0).unwrap();
        assert!(resonator_value(&g, CharIndex(1), &p).is_err());
        assert!(weights_all(&g, &p).is_err());
    }
}
