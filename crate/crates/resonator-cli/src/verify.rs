//! The invariant verification suite behind `resonator verify`.
//!
//! Each check is named, timed, and independent. Hard checks decide the exit
//! status; soft checks only warn (they monitor quantities whose size the
//! theory does not pin down at desk scale). `quick` finishes in well under a
//! minute; `full` adds the heavier grids and an end-to-end record run.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resonator_core::arith::PrimeSieve;
use resonator_core::characters::{CharIndex, CharacterGroup};
use resonator_core::constants::{a_max, lambda_sigma, vartheta};
use resonator_core::lfun::{
    hurwitz_zeta, l_value, l_values_all, log_deriv, log_l, log_l_all, truncated_log_deriv,
    truncated_log_l_all, EvalParams,
};
use resonator_core::resonator::{
    q1_congruence_oracle, q1_moment, q2_moment, q2_moment_naive, resonator_value, series_partial,
    weights_all, ResonatorParams,
};
use resonator_core::C64;

use crate::config::RunConfig;
use crate::engine::Engine;

/// Verification depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// soft checks warn instead of failing
    pub soft: bool,
    pub passed: bool,
    pub warning: Option<String>,
    /// failure explanation (empty when passed)
    pub detail: String,
    pub millis: u128,
}

type CheckResult = std::result::Result<Option<String>, String>;

/// Exact-roots check for a character table: entry k must be
/// e(k/m) = exp(2 pi i k / m). Taking the table as a parameter makes the
/// check injectable: tests feed it corrupted tables and expect a named
/// failure.
pub fn check_roots_table(roots: &[C64]) -> std::result::Result<(), String> {
    let m = roots.len();
    if m == 0 {
        return Err("roots-of-unity table is empty".into());
    }
    let step = std::f64::consts::TAU / m as f64;
    for (k, &r) in roots.iter().enumerate() {
        let (s, c) = (step * k as f64).sin_cos();
        let want = C64::new(c, s);
        if (r - want).norm() > 1e-12 {
            return Err(format!("root {k} of {m} is {r}, expected {want}"));
        }
    }
    Ok(())
}

fn ok() -> CheckResult {
    Ok(None)
}

// ---------------------------------------------------------------------------
// individual checks
// ---------------------------------------------------------------------------

fn roots_and_transform() -> CheckResult {
    for q in [101u64, 107] {
        let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
        check_roots_table(g.roots())?;
        // point mass at the generator: the transform must return the table
        let mut f = vec![C64::new(0.0, 0.0); g.m()];
        f[(g.generator() - 1) as usize] = C64::new(1.0, 0.0);
        let out = g.transform_all(&f).map_err(|e| e.to_string())?;
        for (j, (&got, &want)) in out.iter().zip(g.roots()).enumerate() {
            if (got - want).norm() > 1e-9 {
                return Err(format!(
                    "q = {q}: transform of the generator point mass gives {got} at {j}, wants {want}"
                ));
            }
        }
    }
    ok()
}

fn orthogonality() -> CheckResult {
    for q in [5u64, 7, 11, 101] {
        let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
        for a in 1..q {
            for n in 1..=2 * q {
                let s = g.orthogonality_sum(a, n).map_err(|e| e.to_string())?;
                let want = if n % q == a % q { 1.0 } else { 0.0 };
                if (s - want).norm() > 1e-10 {
                    return Err(format!(
                        "q = {q}, a = {a}, n = {n}: sum {s} vs indicator {want}"
                    ));
                }
            }
        }
    }
    ok()
}

fn euler_product_vs_series(seed: u64) -> CheckResult {
    let q = 101u64;
    let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
    let params = ResonatorParams::with_x(q, 0.75, 20.0).map_err(|e| e.to_string())?;
    let sieve = PrimeSieve::new(100_000).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let j = CharIndex(rng.gen_range(0..g.m()));
        let r = resonator_value(&g, j, &params).map_err(|e| e.to_string())?;
        let s = series_partial(&g, j, &params, 100_000, &sieve).map_err(|e| e.to_string())?;
        let diff = (r - s.sum).norm();
        if diff > s.tail + 1e-9 {
            return Err(format!(
                "j = {}: |product - series| = {diff} exceeds tail bound {}",
                j.0, s.tail
            ));
        }
    }
    ok()
}

fn q1_congruence() -> CheckResult {
    for q in [5u64, 7, 11] {
        let params = ResonatorParams::with_x(q, 0.75, (q - 1) as f64).map_err(|e| e.to_string())?;
        let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
        let q1 = q1_moment(&g, &params).map_err(|e| e.to_string())?;
        let oracle = q1_congruence_oracle(&params, 30_000).map_err(|e| e.to_string())?;
        let diff = (q1 - oracle.value).abs();
        if diff > oracle.deficit_bound + 1e-9 * q1.abs() {
            return Err(format!(
                "q = {q}: |Q1 - oracle| = {diff} exceeds deficit bound {}",
                oracle.deficit_bound
            ));
        }
        if oracle.value < oracle.diagonal_bound - 1e-9 * oracle.value.abs() {
            return Err(format!(
                "q = {q}: oracle {} fell below its diagonal lower bound {}",
                oracle.value, oracle.diagonal_bound
            ));
        }
    }
    ok()
}

/// Shared grid driver for the moment-ratio lower bound.
fn ratio_bound_grid(q: u64, extra_x: f64) -> CheckResult {
    let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
    let cfg = RunConfig::default();
    for &sigma in &[0.6, 0.75, 0.9] {
        let auto_x = crate::engine::resolve_x(&cfg, q, sigma).map_err(|e| e.to_string())?;
        for x in [auto_x, extra_x] {
            let params = ResonatorParams::with_x(q, sigma, x).map_err(|e| e.to_string())?;
            let y = params.x().max(10_000.0);
            let sieve = PrimeSieve::new(y.ceil() as u64).map_err(|e| e.to_string())?;
            let q1 = q1_moment(&g, &params).map_err(|e| e.to_string())?;
            for &theta in &[0.0, FRAC_PI_4, FRAC_PI_2, 7.0 * FRAC_PI_4] {
                let q2 = q2_moment(&g, &params, y, theta, &sieve).map_err(|e| e.to_string())?;
                let rhs = resonator_core::resonator::ratio_rhs(&params, theta);
                let ratio = q2 / q1;
                if !(ratio >= rhs.finite - 1e-10) {
                    return Err(format!(
                        "q = {q}, sigma = {sigma}, theta = {theta}, X = {x}: \
                         ratio {ratio} below bound {}",
                        rhs.finite
                    ));
                }
            }
        }
    }
    ok()
}

fn weight_bound_q1009() -> CheckResult {
    let q = 1009u64;
    let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
    let cfg = RunConfig::default();
    let auto_x = crate::engine::resolve_x(&cfg, q, 0.75).map_err(|e| e.to_string())?;
    for x in [auto_x, 100.0] {
        let params = ResonatorParams::with_x(q, 0.75, x).map_err(|e| e.to_string())?;
        let w = weights_all(&g, &params).map_err(|e| e.to_string())?;
        for (j, &v) in w.values.iter().enumerate() {
            if v.ln() > w.log_bound + 1e-10 {
                return Err(format!(
                    "X = {x}, j = {j}: log weight {} exceeds bound {}",
                    v.ln(),
                    w.log_bound
                ));
            }
        }
        let gap = (w.values[0].ln() - w.log_bound).abs();
        if gap > 1e-10 {
            return Err(format!(
                "X = {x}: principal character misses the bound by {gap}"
            ));
        }
    }
    ok()
}

fn constants_goldens() -> CheckResult {
    let l1 = lambda_sigma(1.0).map_err(|e| e.to_string())?;
    let want = 2.0 * std::f64::consts::LN_2 - 1.0;
    if (l1 - want).abs() > 1e-10 {
        return Err(format!("lambda(1) = {l1}, closed form {want}"));
    }
    let l75 = lambda_sigma(0.75).map_err(|e| e.to_string())?;
    if (l75 - 0.4514942084755584).abs() > 1e-8 {
        return Err(format!("lambda(3/4) = {l75} drifted from its golden value"));
    }
    // the two zero-density branches cross at sigma = 4/5
    let left: f64 = 3.0 * (1.0 - 0.8) / (2.0 - 0.8);
    let right: f64 = 2.0 * (1.0 - 0.8) / 0.8;
    if (left - right).abs() > 1e-15 {
        return Err(format!("branch values at 0.8 differ: {left} vs {right}"));
    }
    let v = vartheta(0.8).map_err(|e| e.to_string())?;
    if (v - left).abs() > 1e-15 {
        return Err(format!("vartheta(0.8) = {v} off the crossing value {left}"));
    }
    let unc = a_max(0.75, 0.01, false).map_err(|e| e.to_string())?;
    let grh = a_max(0.75, 0.01, true).map_err(|e| e.to_string())?;
    if !(grh > unc) {
        return Err(format!("GRH supremum {grh} not above unconditional {unc}"));
    }
    ok()
}

fn l_values_q101() -> CheckResult {
    let q = 101u64;
    let sigma = 0.75;
    let p = EvalParams::default();
    let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;

    // batch vs single-character route
    let batch = l_values_all(&g, sigma, &p).map_err(|e| e.to_string())?;
    for j in 0..g.m() {
        let single = l_value(&g, CharIndex(j), sigma, &p).map_err(|e| e.to_string())?;
        let scale = single.norm().max(1.0);
        if (batch.values[j] - single).norm() > 1e-9 * scale {
            return Err(format!(
                "j = {j}: batch {} vs single {single}",
                batch.values[j]
            ));
        }
    }

    // principal identity L(s, chi_0) = zeta(s) (1 - q^{-s})
    let zeta = hurwitz_zeta(sigma, 1.0, &p).map_err(|e| e.to_string())?.value;
    let want = zeta * (1.0 - (q as f64).powf(-sigma));
    let got = batch.values[0];
    if (got - want).norm() > 1e-9 * want.abs().max(1.0) {
        return Err(format!("principal L = {got}, zeta route gives {want}"));
    }

    // exponentiating the tracked logarithm recovers L
    let logs = log_l_all(&g, sigma, &p).map_err(|e| e.to_string())?;
    for j in 1..g.m() {
        if let Ok(v) = &logs.outcomes[j] {
            let l = logs.l_at_sigma[j];
            if (v.value.exp() - l).norm() > 1e-8 * l.norm().max(1e-3) {
                return Err(format!(
                    "j = {j}: exp(log L) = {} vs L = {l}",
                    v.value.exp()
                ));
            }
        }
    }

    // in the absolutely convergent region the log matches the Euler sum
    let sieve = PrimeSieve::new(100_000).map_err(|e| e.to_string())?;
    for j in [1usize, 7, 42] {
        let tracked = log_l(&g, CharIndex(j), 2.0, &p).map_err(|e| e.to_string())?;
        let mut euler = C64::new(0.0, 0.0);
        for &pr in sieve.primes() {
            let chi = g.char_value(CharIndex(j), pr);
            if chi == C64::new(0.0, 0.0) {
                continue;
            }
            let base = (pr as f64).powi(-2);
            let mut chik = chi;
            let mut pk = base;
            for k in 1..=60 {
                euler += chik * (pk / k as f64);
                if pk < 1e-18 {
                    break;
                }
                chik *= chi;
                pk *= base;
            }
        }
        if (tracked.value - euler).norm() > 1e-6 {
            return Err(format!(
                "j = {j}: log L(2) = {} vs Euler sum {euler}",
                tracked.value
            ));
        }
    }
    ok()
}

/// Q2(theta) must equal cos(theta) Q2(0): conjugation symmetry of the
/// character sum kills every imaginary contribution.
fn q2_angle_law(q: u64, extra_x: f64) -> CheckResult {
    let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
    let cfg = RunConfig::default();
    let auto_x = crate::engine::resolve_x(&cfg, q, 0.75).map_err(|e| e.to_string())?;
    for x in [auto_x, extra_x] {
        let params = ResonatorParams::with_x(q, 0.75, x).map_err(|e| e.to_string())?;
        let y = params.x().max(10_000.0);
        let sieve = PrimeSieve::new(y.ceil() as u64).map_err(|e| e.to_string())?;
        let base = q2_moment(&g, &params, y, 0.0, &sieve).map_err(|e| e.to_string())?;
        for &theta in &[FRAC_PI_4, FRAC_PI_2, 7.0 * FRAC_PI_4] {
            let got = q2_moment(&g, &params, y, theta, &sieve).map_err(|e| e.to_string())?;
            let want = theta.cos() * base;
            if (got - want).abs() > 1e-10 * base.abs().max(1.0) {
                return Err(format!(
                    "q = {q}, X = {x}, theta = {theta}: Q2 = {got}, cos law wants {want}"
                ));
            }
        }
    }
    ok()
}

fn transform_dual_route(seed: u64) -> CheckResult {
    let g = CharacterGroup::new(107).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7261_6e64);
    let f: Vec<C64> = (0..g.m())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let fast = g.transform_all(&f).map_err(|e| e.to_string())?;
    let naive = g.transform_all_naive(&f).map_err(|e| e.to_string())?;
    let scale: f64 = f.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
    for j in 0..g.m() {
        if (fast[j] - naive[j]).norm() > 1e-9 * scale {
            return Err(format!(
                "j = {j}: fft route {} vs direct sum {}",
                fast[j], naive[j]
            ));
        }
    }
    ok()
}

fn q2_dual_route_q101() -> CheckResult {
    let q = 101u64;
    let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
    let params = ResonatorParams::with_x(q, 0.75, 20.0).map_err(|e| e.to_string())?;
    let sieve = PrimeSieve::new(1_000).map_err(|e| e.to_string())?;
    for &theta in &[0.0, FRAC_PI_4] {
        let fast = q2_moment(&g, &params, 1_000.0, theta, &sieve).map_err(|e| e.to_string())?;
        let naive =
            q2_moment_naive(&g, &params, 1_000.0, theta, &sieve).map_err(|e| e.to_string())?;
        if (fast - naive).abs() > 1e-9 * naive.abs().max(1.0) {
            return Err(format!(
                "theta = {theta}: batch Q2 = {fast} vs per-character Q2 = {naive}"
            ));
        }
    }
    ok()
}

fn log_deriv_series_q7() -> CheckResult {
    let g = CharacterGroup::new(7).map_err(|e| e.to_string())?;
    let p = EvalParams::default();
    let sieve = PrimeSieve::new(100_000).map_err(|e| e.to_string())?;
    for j in [1usize, 3] {
        let d = log_deriv(&g, CharIndex(j), 2.5, &p).map_err(|e| e.to_string())?;
        let t = truncated_log_deriv(&g, CharIndex(j), 2.5, 1e5, &sieve).map_err(|e| e.to_string())?;
        if (-d - t.full).norm() > 1e-6 {
            return Err(format!(
                "j = {j}: -L'/L = {} vs von Mangoldt series {}",
                -d, t.full
            ));
        }
    }
    ok()
}

fn hurwitz_refinement() -> CheckResult {
    let coarse = EvalParams::new(16, 6, 1e-10).map_err(|e| e.to_string())?;
    let fine = EvalParams::new(32, 10, 1e-10).map_err(|e| e.to_string())?;
    for &s in &[0.6, 0.75, 0.9, 1.3, 2.5] {
        for &a in &[0.01, 0.3, 0.5, 0.99, 1.0] {
            let c = hurwitz_zeta(s, a, &coarse).map_err(|e| e.to_string())?;
            let f = hurwitz_zeta(s, a, &fine).map_err(|e| e.to_string())?;
            if (c.value - f.value).abs() > c.err_bound + f.err_bound {
                return Err(format!(
                    "s = {s}, a = {a}: refinement moved by {} beyond bound {}",
                    (c.value - f.value).abs(),
                    c.err_bound + f.err_bound
                ));
            }
        }
    }
    ok()
}

fn resonate_record_q1009() -> CheckResult {
    let cfg = RunConfig::default();
    let engine = Engine::new(&cfg, &[1009]).map_err(|e| e.to_string())?;
    let rec = engine
        .resonate(&cfg, 1009, 0.75, 0.0)
        .map_err(|e| e.to_string())?;
    rec.check_invariants().map_err(|e| e.to_string())?;
    if rec.excluded_count as usize >= 1008 {
        return Err("every character was excluded".into());
    }
    ok()
}

/// Soft: the gap between the truncated prime sum and the tracked logarithm.
/// The theory makes it o(max) only asymptotically, so desk-scale size is
/// monitored, not asserted.
fn truncation_discrepancy(threshold: f64) -> CheckResult {
    let q = 10_007u64;
    let sigma = 0.75;
    let p = EvalParams::default();
    let g = CharacterGroup::new(q).map_err(|e| e.to_string())?;
    let sieve = PrimeSieve::new(1_000_000).map_err(|e| e.to_string())?;
    let t = truncated_log_l_all(&g, sigma, 1e6, &sieve).map_err(|e| e.to_string())?;
    let logs = log_l_all(&g, sigma, &p).map_err(|e| e.to_string())?;
    let mut gaps: Vec<f64> = Vec::new();
    for j in 1..g.m() {
        if let Ok(v) = &logs.outcomes[j] {
            gaps.push((t[j] - v.value).re.abs());
        }
    }
    if gaps.is_empty() {
        return Err("no admissible characters at q = 10007".into());
    }
    gaps.sort_by(f64::total_cmp);
    let median = gaps[gaps.len() / 2];
    if median > threshold {
        return Ok(Some(format!(
            "median |Re(T - log L)| = {median:.3} over {} characters exceeds {threshold}",
            gaps.len()
        )));
    }
    ok()
}

// ---------------------------------------------------------------------------
// the runner
// ---------------------------------------------------------------------------

/// Run the suite. Soft checks never fail the report; their findings surface
/// as warnings.
pub fn run(level: Level, seed: u64) -> Vec<CheckOutcome> {
    type Entry = (&'static str, bool, Box<dyn Fn() -> CheckResult>);
    let mut checks: Vec<Entry> = vec![
        ("roots-table", false, Box::new(roots_and_transform)),
        ("orthogonality", false, Box::new(orthogonality)),
        (
            "euler-product-series",
            false,
            Box::new(move || euler_product_vs_series(seed)),
        ),
        ("q1-congruence", false, Box::new(q1_congruence)),
        (
            "ratio-lower-bound-q101",
            false,
            Box::new(|| ratio_bound_grid(101, 20.0)),
        ),
        ("weight-bound-q1009", false, Box::new(weight_bound_q1009)),
        ("constants-goldens", false, Box::new(constants_goldens)),
        ("l-values-q101", false, Box::new(l_values_q101)),
        (
            "q2-angle-law-q101",
            false,
            Box::new(|| q2_angle_law(101, 20.0)),
        ),
        (
            "transform-dual-route",
            false,
            Box::new(move || transform_dual_route(seed)),
        ),
        ("q2-dual-route-q101", false, Box::new(q2_dual_route_q101)),
    ];
    if level == Level::Full {
        checks.extend([
            (
                "ratio-lower-bound-q1009",
                false,
                Box::new(|| ratio_bound_grid(1009, 100.0)) as Box<dyn Fn() -> CheckResult>,
            ),
            (
                "q2-angle-law-q1009",
                false,
                Box::new(|| q2_angle_law(1009, 100.0)),
            ),
            ("log-deriv-series-q7", false, Box::new(log_deriv_series_q7)),
            ("hurwitz-refinement", false, Box::new(hurwitz_refinement)),
            (
                "resonate-record-q1009",
                false,
                Box::new(resonate_record_q1009),
            ),
            (
                "truncation-discrepancy",
                true,
                Box::new(|| truncation_discrepancy(2.0)),
            ),
        ]);
    }

    checks
        .into_iter()
        .map(|(name, soft, f)| {
            let t0 = Instant::now();
            let result = f();
            let millis = t0.elapsed().as_millis();
            match result {
                Ok(warning) => CheckOutcome {
                    name,
                    soft,
                    passed: true,
                    warning,
                    detail: String::new(),
                    millis,
                },
                Err(detail) => CheckOutcome {
                    name,
                    soft,
                    passed: soft, // soft failures downgrade to warnings
                    warning: if soft { Some(detail.clone()) } else { None },
                    detail,
                    millis,
                },
            }
        })
        .collect()
}

/// Print one line per check; returns the number of hard failures.
pub fn print_report(outcomes: &[CheckOutcome]) -> usize {
    let mut failures = 0;
    for o in outcomes {
        if !o.passed {
            failures += 1;
            println!("FAIL {} ({} ms): {}", o.name, o.millis, o.detail);
        } else if let Some(w) = &o.warning {
            println!("WARN {} ({} ms): {w}", o.name, o.millis);
        } else {
            println!("PASS {} ({} ms)", o.name, o.millis);
        }
    }
    println!(
        "{} checks, {} failed{}",
        outcomes.len(),
        failures,
        if failures == 0 { " -- all invariants hold" } else { "" }
    );
    failures
}
