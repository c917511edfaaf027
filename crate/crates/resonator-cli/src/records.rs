//! Persistent scan output: one JSON object per line, append-only so an
//! interrupted scan can resume, plus a derived CSV summary for plotting.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// Bumped whenever the record layout changes; resume matching is scoped to
/// one schema version so stale files never poison a new scan.
pub const SCHEMA_VERSION: u32 = 1;

/// One completed (q, sigma, theta) run.
///
/// Invariants (asserted by the engine and re-checkable from the record):
/// - `ratio` equals `q2 / q1` to 1e-12 relative;
/// - when `cos(theta) >= 0`:
///   `max_re_e_itheta_logl >= ratio - truncation_slack - 1e-12 * scale`,
///   where `scale = 1 + |ratio| + truncation_slack`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRecord {
    pub schema_version: u32,
    pub q: u64,
    pub sigma: f64,
    pub theta: f64,
    /// resonator scale actually used (auto mode resolves before recording)
    pub a: f64,
    /// resonator cutoff X
    pub x: f64,
    /// truncated-sum cutoff Y
    pub y: f64,
    pub grh: bool,
    pub q1: f64,
    pub q2: f64,
    pub ratio: f64,
    /// finite-scale analytic lower bound for `ratio` (valid when
    /// cos(theta) >= 0)
    pub ratio_rhs: f64,
    /// index of the character attaining the certified maximum
    pub argmax_j: u64,
    /// max over admissible characters of Re(e^{-i theta} log L(sigma, chi))
    pub max_re_e_itheta_logl: f64,
    /// max over admissible characters of log |L(sigma, chi)|
    pub max_log_abs_l: f64,
    /// max over characters (excluding principal and guard failures) of
    /// -Re(e^{-i theta} L'/L(sigma, chi))
    pub max_neg_re_logderiv: f64,
    pub predicted_logl_bound: f64,
    pub predicted_logderiv_bound: f64,
    /// certified gap between `ratio` and the log-L certificate: the sum of
    /// the excluded-mass correction and the largest truncation discrepancy
    /// |Re e^{-i theta}(T_chi - log L)| over admissible characters
    pub truncation_slack: f64,
    /// characters excluded from the log-L maxima (principal + branch
    /// failures)
    pub excluded_count: u64,
    /// wall-clock duration; the only field allowed to differ between
    /// otherwise identical runs
    pub runtime_ms: u64,
}

impl ScanRecord {
    /// Resume identity: same modulus, same sigma/theta bit patterns, same
    /// schema.
    pub fn key(&self) -> RecordKey {
        (
            self.q,
            self.sigma.to_bits(),
            self.theta.to_bits(),
            self.schema_version,
        )
    }

    /// Re-check the record-level invariants (engine asserts these before
    /// writing; readers can distrust-and-verify).
    pub fn check_invariants(&self) -> Result<()> {
        let ratio = self.q2 / self.q1;
        if !((self.ratio - ratio).abs() <= 1e-12 * ratio.abs().max(1.0)) {
            return Err(CliError::Invariant(format!(
                "q = {}: recorded ratio {} disagrees with q2/q1 = {ratio}",
                self.q, self.ratio
            )));
        }
        if self.theta.cos() >= 0.0 {
            let scale = 1.0 + self.ratio.abs() + self.truncation_slack;
            if !(self.max_re_e_itheta_logl >= self.ratio - self.truncation_slack - 1e-12 * scale)
            {
                return Err(CliError::Invariant(format!(
                    "q = {}: certified max {} fell below ratio {} - slack {}",
                    self.q, self.max_re_e_itheta_logl, self.ratio, self.truncation_slack
                )));
            }
        }
        Ok(())
    }
}

pub type RecordKey = (u64, u64, u64, u32);

/// Read every record from a JSONL file. A malformed line aborts with its
/// 1-based line number; a missing file is an empty scan.
pub fn read_jsonl(path: &Path) -> Result<Vec<ScanRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CliError::Io(format!("{}: {e}", path.display()))),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ScanRecord = serde_json::from_str(&line).map_err(|e| {
            CliError::Io(format!(
                "{} line {}: malformed record ({e}); refusing to resume",
                path.display(),
                i + 1
            ))
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Resume keys of the records already present in `path`.
pub fn existing_keys(path: &Path) -> Result<HashSet<RecordKey>> {
    Ok(read_jsonl(path)?.iter().map(ScanRecord::key).collect())
}

/// Append-only JSONL writer; every record is flushed as one line so an
/// interrupted scan leaves a readable prefix.
pub struct JsonlWriter {
    file: File,
    path: PathBuf,
}

impl JsonlWriter {
    pub fn append(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(JsonlWriter {
            file,
            path: path.to_path_buf(),
        })
    }

    pub fn write(&mut self, rec: &ScanRecord) -> Result<()> {
        let mut line = serde_json::to_string(rec)
            .map_err(|e| CliError::Io(format!("serialize record: {e}")))?;
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|()| self.file.flush())
            .map_err(|e| CliError::Io(format!("{}: {e}", self.path.display())))
    }
}

/// Serialize one record to its JSONL line (without trailing newline).
pub fn to_line(rec: &ScanRecord) -> Result<String> {
    serde_json::to_string(rec).map_err(|e| CliError::Io(format!("serialize record: {e}")))
}

/// Where the CSV summary for a JSONL output lives.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

/// Regenerate the CSV summary from the full record set: one row per record,
/// sorted by (q, sigma, theta), with observed-to-predicted ratio columns.
pub fn write_summary(records: &[ScanRecord], path: &Path) -> Result<()> {
    let mut sorted: Vec<&ScanRecord> = records.iter().collect();
    sorted.sort_by(|x, y| {
        (x.q, x.sigma.to_bits(), x.theta.to_bits()).cmp(&(y.q, y.sigma.to_bits(), y.theta.to_bits()))
    });
    let mut text = String::from(
        "q,sigma,theta,max_log_abs_l,predicted_logl_bound,logl_over_bound,\
         max_neg_re_logderiv,predicted_logderiv_bound,logderiv_over_bound,\
         ratio,ratio_rhs,excluded_count\n",
    );
    for r in sorted {
        let logl_over = r.max_log_abs_l / r.predicted_logl_bound;
        let deriv_over = r.max_neg_re_logderiv / r.predicted_logderiv_bound;
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.q,
            r.sigma,
            r.theta,
            r.max_log_abs_l,
            r.predicted_logl_bound,
            logl_over,
            r.max_neg_re_logderiv,
            r.predicted_logderiv_bound,
            deriv_over,
            r.ratio,
            r.ratio_rhs,
            r.excluded_count,
        ));
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(q: u64) -> ScanRecord {
        ScanRecord {
            schema_version: SCHEMA_VERSION,
            q,
            sigma: 0.75,
            theta: 0.0,
            a: 0.3,
            x: 5.0,
            y: 1e4,
            grh: false,
            q1: 10.0,
            q2: 5.0,
            ratio: 0.5,
            ratio_rhs: 0.4,
            argmax_j: 3,
            max_re_e_itheta_logl: 0.9,
            max_log_abs_l: 0.9,
            max_neg_re_logderiv: 1.2,
            predicted_logl_bound: 0.8,
            predicted_logderiv_bound: 1.5,
            truncation_slack: 0.05,
            excluded_count: 1,
            runtime_ms: 12,
        }
    }

    #[test]
    fn roundtrip_preserves_bits() {
        let rec = sample(1009);
        let line = to_line(&rec).unwrap();
        let back: ScanRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back.sigma.to_bits(), rec.sigma.to_bits());
        assert_eq!(back, rec);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&to_line(&sample(17)).unwrap()).unwrap();
        v["surprise"] = serde_json::json!(1);
        let res: std::result::Result<ScanRecord, _> = serde_json::from_value(v);
        assert!(res.is_err());
    }

    #[test]
    fn invariant_checks_fire() {
        let mut rec = sample(17);
        rec.check_invariants().unwrap();
        rec.ratio = 0.7; // no longer q2/q1
        assert!(rec.check_invariants().is_err());
        let mut rec = sample(17);
        rec.max_re_e_itheta_logl = 0.1; // below ratio - slack
        assert!(rec.check_invariants().is_err());
        // inadmissible angle: the certificate clause is vacuous
        rec.theta = std::f64::consts::PI;
        rec.check_invariants().unwrap();
    }

    #[test]
    fn jsonl_append_read_and_resume_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.jsonl");
        let mut w = JsonlWriter::append(&path).unwrap();
        w.write(&sample(17)).unwrap();
        w.write(&sample(19)).unwrap();
        drop(w);
        // appending reopens cleanly
        let mut w = JsonlWriter::append(&path).unwrap();
        w.write(&sample(23)).unwrap();
        drop(w);
        let recs = read_jsonl(&path).unwrap();
        assert_eq!(recs.iter().map(|r| r.q).collect::<Vec<_>>(), [17, 19, 23]);
        let keys = existing_keys(&path).unwrap();
        assert_eq!(keys.len(), 3);
        assert!(keys.contains(&sample(19).key()));
        // missing file reads as empty
        assert!(read_jsonl(&dir.path().join("absent.jsonl")).unwrap().is_empty());
    }

    #[test]
    fn corrupt_line_aborts_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.jsonl");
        let good = to_line(&sample(17)).unwrap();
        std::fs::write(&path, format!("{good}\nnot json\n")).unwrap();
        let err = read_jsonl(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(matches!(err, CliError::Io(_)));
    }

    #[test]
    fn summary_is_sorted_by_q() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.summary.csv");
        write_summary(&[sample(1009), sample(17)], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("q,sigma"));
        assert!(lines[1].starts_with("17,"));
        assert!(lines[2].starts_with("1009,"));
        // ratio column present: max_log_abs_l / predicted bound = 0.9/0.8
        assert!(lines[1].contains("1.125"));
    }
}
