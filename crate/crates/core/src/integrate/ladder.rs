//! Ladders of truncated integrals and power-law fits.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderEntry {
    pub param: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LadderVerdict {
    Converged { limit: f64, error_bound: f64 },
    Diverging,
    Inconclusive,
}

impl LadderVerdict {
    pub fn is_converged(&self) -> bool {
        matches!(self, LadderVerdict::Converged { .. })
    }
}

impl fmt::Display for LadderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LadderVerdict::Converged { limit, error_bound } => write!(f, "CONVERGED {limit:.10} +/- {error_bound:.3e}"),
            LadderVerdict::Diverging => f.write_str("DIVERGING"),
            LadderVerdict::Inconclusive => f.write_str("INCONCLUSIVE"),
        }
    }
}

/// Rules for reading a ladder whose parameter tends to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderRule {
    /// Number of trailing differences inspected.
    pub window: usize,
    /// Each difference in the window must shrink by at least this factor.
    pub shrink: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ladder {
    pub entries: Vec<LadderEntry>,
    pub verdict: LadderVerdict,
}

impl Ladder {
    pub fn new(entries: Vec<LadderEntry>, rule: &LadderRule) -> Ladder {
        let verdict = judge(&entries, rule);
        Ladder { entries, verdict }
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn last(&self) -> Option<&LadderEntry> {
        self.entries.last()
    }

    /// `param,value,stderr` rows and a trailing verdict line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,value,stderr\n");
        for e in &self.entries {
            let _ = writeln!(out, "{:e},{:.15e},{:.3e}", e.param, e.value, e.stderr);
        }
        let _ = writeln!(out, "# {}", self.verdict);
        out
    }
}

fn judge(entries: &[LadderEntry], rule: &LadderRule) -> LadderVerdict {
    let k = entries.len();
    if k == 0 {
        return LadderVerdict::Inconclusive;
    }
    let noise =
        |i: usize| entries[i].stderr + entries[i - 1].stderr + rule.abs_tol + rule.rel_tol * entries[i].value.abs();
    let last = entries[k - 1];
    if k == 1 {
        return LadderVerdict::Converged {
            limit: last.value,
            error_bound: last.stderr,
        };
    }
    let w = rule.window.min(k - 1);
    let diffs: Vec<f64> = (1..k).map(|i| entries[i].value - entries[i - 1].value).collect();
    let window = &diffs[diffs.len() - w..];
    let first = k - w; // entry index of the first difference in the window
    if window.iter().enumerate().all(|(j, d)| d.abs() <= noise(first + j)) {
        let spread = window.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        return LadderVerdict::Converged {
            limit: last.value,
            error_bound: spread + last.stderr,
        };
    }
    if k - 1 < rule.window + 1 {
        return LadderVerdict::Inconclusive;
    }
    // Compare each windowed difference with its predecessor.
    let pairs: Vec<(f64, f64, usize)> = (diffs.len() - w..diffs.len())
        .map(|i| (diffs[i - 1], diffs[i], i + 1))
        .collect();
    let shrinking = pairs
        .iter()
        .all(|&(prev, cur, idx)| cur.abs() <= noise(idx) || cur.abs() * rule.shrink <= prev.abs());
    if shrinking {
        let d_last = diffs[diffs.len() - 1];
        let d_prev = diffs[diffs.len() - 2];
        let rho = pairs
            .iter()
            .filter(|(p, _, _)| p.abs() > 0.0)
            .map(|(p, c, _)| (c / p).abs())
            .fold(0.0f64, f64::max)
            .min(1.0 / rule.shrink);
        // Geometric tail with the observed ratio, signed by the last steps.
        let ratio = if d_prev != 0.0 { d_last / d_prev } else { 0.0 };
        let tail = if ratio > 0.0 && ratio < 1.0 {
            d_last * ratio / (1.0 - ratio)
        } else {
            0.0
        };
        let bound = d_last.abs() * rho / (1.0 - rho);
        return LadderVerdict::Converged {
            limit: last.value + tail,
            error_bound: bound.max(tail.abs()) + last.stderr + rule.abs_tol,
        };
    }
    let growing = pairs
        .iter()
        .all(|&(prev, cur, idx)| cur.abs() > noise(idx) && cur.abs() >= 0.9 * prev.abs());
    if growing {
        LadderVerdict::Diverging
    } else {
        LadderVerdict::Inconclusive
    }
}

/// `vol ≈ C·t^α` fitted on log-log axes.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub c: f64,
    pub alpha: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub used: usize,
    /// Entries with zero (or negative) volume, left out of the fit.
    pub dropped: usize,
    /// α too small to call a decay.
    pub no_decay: bool,
}

impl fmt::Display for DecayFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={:.4} C={:.4} residual={:.2e} used={} dropped={}",
            self.alpha, self.c, self.residual, self.used, self.dropped
        )?;
        if self.no_decay {
            f.write_str(" [no decay]")?;
        }
        Ok(())
    }
}

pub const NO_DECAY_ALPHA: f64 = 0.05;

/// Least-squares line through `(ln t, ln vol)`.
pub fn fit_decay_exponent(points: &[(f64, f64)]) -> Result<DecayFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, v)| *t > 0.0 && *v > 0.0 && t.is_finite() && v.is_finite())
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if usable.len() < 4 {
        return Err(Error::Fit(format!("{} usable entries, need 4", usable.len())));
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all parameters equal".into()));
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let residual = (usable
        .iter()
        .map(|p| (p.1 - intercept - alpha * p.0).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(DecayFit {
        c: intercept.exp(),
        alpha,
        residual,
        used: usable.len(),
        dropped: points.len() - usable.len(),
        no_decay: alpha <= NO_DECAY_ALPHA,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const RULE: LadderRule = LadderRule {
        window: 3,
        shrink: 1.5,
        abs_tol: 1e-12,
        rel_tol: 1e-10,
    };

    fn ladder(values: impl Iterator<Item = (f64, f64)>) -> Ladder {
        Ladder::new(
            values
                .map(|(param, value)| LadderEntry {
                    param,
                    value,
                    stderr: 0.0,
                })
                .collect(),
            &RULE,
        )
    }

    #[test]
    fn geometric_convergence_extrapolates() {
        let l = ladder((0..12).map(|k| {
            let e = 0.0625 / 2f64.powi(k);
            (e, 2.0 - e)
        }));
        match l.verdict {
            LadderVerdict::Converged { limit, error_bound } => {
                assert!((limit - 2.0).abs() < 1e-12);
                assert!(error_bound < 1e-4);
            }
            v => panic!("{v}"),
        }
    }

    #[test]
    fn log_growth_diverges() {
        let l = ladder((0..12).map(|k| {
            let e = 0.0625 / 2f64.powi(k);
            (e, e.ln().powi(2))
        }));
        assert_eq!(l.verdict, LadderVerdict::Diverging);
        let l = ladder((0..12).map(|k| {
            let e = 0.0625 / 2f64.powi(k);
            (e, -e.ln())
        }));
        assert_eq!(l.verdict, LadderVerdict::Diverging);
    }

    #[test]
    fn constant_and_single() {
        let l = ladder((0..12).map(|k| (1.0 / (k + 1) as f64, 0.5)));
        assert!(l.verdict.is_converged());
        let l = ladder(std::iter::once((1.0, 3.0)));
        assert_eq!(
            l.verdict,
            LadderVerdict::Converged {
                limit: 3.0,
                error_bound: 0.0
            }
        );
        assert!(l.to_csv().starts_with("param,value,stderr\n"));
    }

    #[test]
    fn fits() {
        let pts: Vec<(f64, f64)> = (3..=10).map(|k| (0.5f64.powi(k), 0.5f64.powi(k))).collect();
        let f = fit_decay_exponent(&pts).unwrap();
        assert!((f.alpha - 1.0).abs() < 1e-12 && (f.c - 1.0).abs() < 1e-12 && f.residual < 1e-12);
        let pts: Vec<(f64, f64)> = (3..=10).map(|k| 0.5f64.powi(k)).map(|t| (t, -(1.0 - t).ln())).collect();
        let f = fit_decay_exponent(&pts).unwrap();
        assert!(f.alpha > 0.95 && f.alpha < 1.05);
        let pts: Vec<(f64, f64)> = (3..=10).map(|k| (0.5f64.powi(k), 2.0)).collect();
        assert!(fit_decay_exponent(&pts).unwrap().no_decay);
        assert!(fit_decay_exponent(&pts[..3]).is_err());
        let mut pts = pts;
        pts[0].1 = 0.0;
        assert_eq!(fit_decay_exponent(&pts).unwrap().dropped, 1);
    }
}
