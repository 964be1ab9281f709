use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::sw::exact::exact_schrieffer_wolff;
use crate::sw::gadget::GadgetInstance;

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    /// Spectral-norm deviation of the traceless parts; absent on rank mismatch.
    pub eps: Option<f64>,
    pub eta: Option<f64>,
    /// tr(H_eff − target)/g.
    pub identity_offset: Option<f64>,
    pub rank_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub gadget: String,
    pub order: usize,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of log ε against log Δ over rank-matched rows.
    pub slope: Option<f64>,
    /// ε strictly decreasing over the rank-matched rows.
    pub monotone: bool,
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(Error::OutOfRange(format!("invalid sweep {lo}:{hi}:{n}")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..n).map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)).collect())
}

/// Nine points from 10² to 10¹⁰.
pub fn default_deltas() -> Vec<f64> {
    (2..=10).map(|k| 10f64.powi(k)).collect()
}

/// Parses `lo:hi:n`.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("sweep '{spec}' is not lo:hi:n")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| Error::Parse(format!("bad sweep start '{}'", parts[0])))?;
    let hi: f64 = parts[1].parse().map_err(|_| Error::Parse(format!("bad sweep end '{}'", parts[1])))?;
    let n: usize = parts[2].parse().map_err(|_| Error::Parse(format!("bad sweep count '{}'", parts[2])))?;
    log_spaced(lo, hi, n)
}

/// ε and identity offset of `h_eff` against `target` modulo the identity.
pub fn traceless_deviation(h_eff: &Mat, target: &Mat) -> (f64, f64) {
    let g = h_eff.nrows();
    if g == 0 {
        return (0.0, 0.0);
    }
    let diff = h_eff - target;
    let offset = linalg::trace(&diff).re / g as f64;
    let eps = linalg::spectral_norm(&(diff - linalg::eye(g).scale(offset)));
    (eps, offset)
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Exact-SW deviation from the gadget target at every Δ, in parallel.
pub fn convergence_sweep(g: &GadgetInstance, deltas: &[f64]) -> Result<SweepReport> {
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("delta list must be strictly ascending".into()));
    }
    let target = g.target_ground_block();
    sweep_against(g, deltas, &target)
}

/// Sweep against an explicit ground-block target (g × g in the split's ground basis).
pub fn sweep_against(g: &GadgetInstance, deltas: &[f64], target: &Mat) -> Result<SweepReport> {
    let rows: Vec<SweepRow> = deltas
        .par_iter()
        .map(|&delta| -> Result<SweepRow> {
            let a = g.perturbations.combined(g.order, delta, g.dim())?;
            match exact_schrieffer_wolff(&g.split, &a, delta) {
                Ok(r) => {
                    let (eps, offset) = traceless_deviation(&r.h_eff, target);
                    Ok(SweepRow { delta, eps: Some(eps), eta: Some(r.eta), identity_offset: Some(offset), rank_ok: true, note: None })
                }
                Err(Error::RankMismatch { expected, found }) => Ok(SweepRow {
                    delta,
                    eps: None,
                    eta: None,
                    identity_offset: None,
                    rank_ok: false,
                    note: Some(format!("low-energy rank {found}, expected {expected}")),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let good: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.eps.map(|e| (r.delta, e))).collect();
    let slope = loglog_slope(&good);
    let monotone = good.len() >= 2 && good.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(SweepReport { gadget: g.name.clone(), order: g.order, rows, slope, monotone })
}

/// Aligned text table of a sweep.
pub fn format_table(report: &SweepReport) -> String {
    let mut out = format!("{} (order {})\n{:>12} {:>14} {:>14} {:>14}\n", report.gadget, report.order, "delta", "eps", "eta", "offset");
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6e}"));
    for r in &report.rows {
        out.push_str(&format!("{:>12.3e} {:>14} {:>14} {:>14}", r.delta, fmt(r.eps), fmt(r.eta), fmt(r.identity_offset)));
        if let Some(n) = &r.note {
            out.push_str(&format!("  {n}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("slope {}  monotone {}\n", report.slope.map_or("-".into(), |s| format!("{s:.4}")), report.monotone));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{proj, random_hermitian, random_state};
    use crate::sw::series::Perturbations;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spacing_and_parsing() {
        let d = parse_sweep("1e2:1e10:9").unwrap();
        assert_eq!(d.len(), 9);
        assert!((d[4] - 1e6).abs() < 1e-6);
        assert_eq!(default_deltas().len(), 9);
        assert!(parse_sweep("1:2").is_err());
        assert!(parse_sweep("0:2:3").is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 10.0, 100.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(-0.5))).collect();
        assert!((loglog_slope(&pts).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn first_order_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let psi = random_state(2, &mut rng);
        let h0 = linalg::kron(&linalg::eye(4), &(linalg::eye(2) - proj(&psi)));
        let mut h1 = random_hermitian(8, &mut rng);
        h1 = h1.unscale(linalg::spectral_norm(&h1));
        let g = GadgetInstance::new("order-1", 1, 2, 3, h0, Perturbations { h1: Some(h1), ..Default::default() }).unwrap();
        let r = convergence_sweep(&g, &default_deltas()).unwrap();
        assert!(r.rows.iter().all(|x| x.rank_ok));
        assert!(r.slope.unwrap() <= -0.9, "{:?}", r.slope);
        // Self-comparison at the largest Δ is exact.
        let last = *default_deltas().last().unwrap();
        let a = g.perturbations.combined(1, last, 8).unwrap();
        let exact = exact_schrieffer_wolff(&g.split, &a, last).unwrap();
        let r = sweep_against(&g, &[last], &exact.h_eff).unwrap();
        assert!(r.rows[0].eps.unwrap() < 1e-14);
    }
}
