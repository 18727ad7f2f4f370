//! Numerical comparison of an integral with its sum over the leaf charts.

use std::fmt;

use super::tower::{BlowupTower, ChartId};
use crate::error::{Error, Result};
use crate::integrate::{integrate_log_form, IntegralResult, QuadConfig};
use crate::polyform::LogForm;
use crate::region::Region;

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub base: IntegralResult,
    pub charts: Vec<(ChartId, IntegralResult)>,
    /// `Σ ∫|μ*ω|` over the leaf preimages.
    pub chart_sum: f64,
    pub combined_error: f64,
    pub pass: bool,
}

impl InvarianceReport {
    pub fn difference(&self) -> f64 {
        (self.base.abs_value - self.chart_sum).abs()
    }
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} base={:.10} charts={:.10} diff={:.3e} combined_error={:.3e} ({} charts)",
            if self.pass { "PASS" } else { "FAIL" },
            self.base.abs_value,
            self.chart_sum,
            self.difference(),
            self.combined_error,
            self.charts.len()
        )
    }
}

/// `∫_A |ω|` against `Σ_leaves ∫_{μ⁻¹(A) ∩ chart} |μ*ω|`. The charts share
/// only the exceptional locus, which has measure zero, so their closures
/// are integrated independently. Passes when the two agree within three
/// combined error estimates.
pub fn integral_invariance_check(
    a: &Region,
    w: &LogForm,
    tower: &BlowupTower,
    cfg: &QuadConfig,
) -> Result<InvarianceReport> {
    if a.n() != tower.n() || a.p() != tower.p() {
        return Err(Error::DimensionMismatch {
            expected: tower.n(),
            got: a.n(),
        });
    }
    let base = integrate_log_form(a, w, cfg)?;
    let mut charts = Vec::new();
    for chart in tower.leaves() {
        let pre = chart.preimage_region(a, None)?;
        let form = w.pullback(chart.map())?;
        charts.push((chart.id(), integrate_log_form(&pre, &form, cfg)?));
    }
    let chart_sum = charts.iter().map(|(_, r)| r.abs_value).sum::<f64>();
    let combined_error = base.abs_error + charts.iter().map(|(_, r)| r.abs_error).sum::<f64>() + cfg.abs_tol;
    let converged = base.converged() && charts.iter().all(|(_, r)| r.converged());
    let pass = converged && (base.abs_value - chart_sum).abs() <= 3.0 * combined_error;
    Ok(InvarianceReport {
        base,
        charts,
        chart_sum,
        combined_error,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::parse_log_form;
    use crate::region::Face;

    fn li2_half() -> f64 {
        (1..=60).map(|k| 0.5f64.powi(k) / (k * k) as f64).sum()
    }

    #[test]
    fn one_blowup_of_the_dilogarithm_region() {
        let a = Region::from_strings(
            2,
            2,
            &[&["0 <= r1", "r1 <= 1", "0 <= r2", "r2 <= 1/2", "r1 + r2 >= 1"]],
            None,
        )
        .unwrap();
        let w = parse_log_form("dr1/r1 ^ dr2/r2", 2, 2).unwrap();
        let t = BlowupTower::new(2, 2)
            .blow_up_face(ChartId(0), &Face::from_one_based(&[1, 2]))
            .unwrap();
        let r = integral_invariance_check(&a, &w, &t, &QuadConfig::default()).unwrap();
        assert!(r.pass, "{r}");
        assert_eq!(r.charts.len(), 2);
        assert!((r.chart_sum - li2_half()).abs() < 1e-3, "{r}");
    }

    #[test]
    fn trivial_tower_and_product() {
        let cfg = QuadConfig::default();
        let w = parse_log_form("dr1/r1 ^ dr2/r2", 2, 2).unwrap();
        let sq = Region::from_strings(2, 2, &[&["1 <= r1", "r1 <= 2", "1 <= r2", "r2 <= 2"]], None).unwrap();
        let r = integral_invariance_check(&sq, &w, &BlowupTower::new(2, 2), &cfg).unwrap();
        assert!(r.pass && r.difference() == 0.0);
        let t = BlowupTower::new(2, 2)
            .blow_up_face(ChartId(0), &Face::from_one_based(&[1, 2]))
            .unwrap();
        let r = integral_invariance_check(&sq, &w, &t, &cfg).unwrap();
        assert!(r.pass, "{r}");
        assert!((r.chart_sum - 2f64.ln().powi(2)).abs() < 1e-6);
    }
}
