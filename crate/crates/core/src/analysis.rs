//! Parameter sweeps, finite-difference sensitivities and crossover search.
//!
//! The sensitivity of a distance along a family is the magnitude of
//! `dD/dθ`. Two metrics cross over where their sensitivities are equal;
//! [`sensitivity_crossover`] brackets and bisects that point.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{all_distances, DistanceKind, Distances};
use crate::states::{make_family, FamilyKind, FamilyParams, StateFamily, SweepParam};

/// Number of intervals in the default one-dimensional sweep.
pub const DEFAULT_SWEEP_STEPS: usize = 500;
/// Upper end of the default mixing-fraction sweep.
pub const DEFAULT_X_MAX: f64 = 1.0 - 1e-6;
/// Upper end of the default time sweep, in units of `τ`.
pub const DEFAULT_T_MAX_TAUS: f64 = 5.0;
/// Points per axis of the default two-slab surface.
pub const DEFAULT_GRID_POINTS: usize = 60;
/// Modulus range of the default two-slab surface.
pub const DEFAULT_GRID_RANGE: (f64, f64) = (1e-4, 0.5);

/// Relative finite-difference step; the absolute step never drops below it either.
pub const FD_REL_STEP: f64 = 1e-6;

/// Bisection stops once the bracket has shrunk by this factor.
pub const BISECTION_REL_TOL: f64 = 1e-10;
const BISECTION_MAX_ITER: usize = 200;

/// `n` evenly spaced points from `from` to `to` inclusive.
pub fn linear_points(from: f64, to: f64, n: usize) -> Result<Vec<f64>> {
    check_range(from, to, n)?;
    let step = (to - from) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { to } else { from + step * i as f64 })
        .collect())
}

/// `n` logarithmically spaced points from `from` to `to` inclusive.
pub fn log_points(from: f64, to: f64, n: usize) -> Result<Vec<f64>> {
    check_range(from, to, n)?;
    if from <= 0.0 {
        return Err(Error::InvalidGrid(format!("logarithmic grid needs from > 0, got {from}")));
    }
    let (a, b) = (from.ln(), to.ln());
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| match i {
            0 => from,
            _ if i == n - 1 => to,
            _ => (a + step * i as f64).exp(),
        })
        .collect())
}

fn check_range(from: f64, to: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Error::InvalidGrid(format!("need finite from < to, got [{from}, {to}]")));
    }
    Ok(())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {}", grid.len())));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid(format!(
            "grid must be strictly increasing ({} followed by {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// All three distances between the family's reference and its state at `theta`.
pub fn distances_at(family: &StateFamily, theta: f64) -> Result<Distances> {
    all_distances(family.reference(), &family.state_at(theta)?)
}

fn fd_step(theta: f64) -> f64 {
    FD_REL_STEP.max(FD_REL_STEP * theta.abs())
}

/// A signed derivative estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sensitivity {
    pub value: f64,
    /// Set when `θ` sat within one step of a domain edge and a second-order
    /// one-sided stencil replaced the central difference.
    pub one_sided: bool,
}

/// `dD/dθ` for all three metrics at once.
pub fn gradients_at(family: &StateFamily, theta: f64) -> Result<(Distances, bool)> {
    family.check_domain(theta)?;
    let (lo, hi) = family.domain();
    let h = fd_step(theta);
    if theta - h >= lo && theta + h <= hi {
        let up = distances_at(family, theta + h)?;
        let down = distances_at(family, theta - h)?;
        return Ok((up.zip_with(&down, |a, b| (a - b) / (2.0 * h)), false));
    }
    // (-3 D(θ) + 4 D(θ ± h) - D(θ ± 2h)) / (±2h)
    let dir = if theta + 2.0 * h <= hi {
        1.0
    } else if theta - 2.0 * h >= lo {
        -1.0
    } else {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("domain [{lo}, {hi}] is too narrow for a step of {h}"),
        });
    };
    let d0 = distances_at(family, theta)?;
    let d1 = distances_at(family, theta + dir * h)?;
    let d2 = distances_at(family, theta + 2.0 * dir * h)?;
    let num = d0
        .zip_with(&d1, |a, b| -3.0 * a + 4.0 * b)
        .zip_with(&d2, |a, b| a - b);
    Ok((num.zip_with(&num, |a, _| a / (2.0 * dir * h)), true))
}

/// Central finite difference of one metric along the family.
pub fn sensitivity(family: &StateFamily, metric: DistanceKind, theta: f64) -> Result<Sensitivity> {
    let (g, one_sided) = gradients_at(family, theta)?;
    Ok(Sensitivity {
        value: g.get(metric),
        one_sided,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub distances: Distances,
    pub gradients: Option<Distances>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub family: String,
    pub parameter: SweepParam,
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

/// Evaluates every metric (and optionally its gradient) at each grid point.
///
/// Rows are computed in parallel but always returned in grid order.
pub fn sweep(family: &StateFamily, grid: &[f64], with_gradients: bool) -> Result<SweepResult> {
    check_grid(grid)?;
    for &theta in grid {
        family.check_domain(theta)?;
    }
    let rows = grid
        .par_iter()
        .map(|&theta| {
            let distances = distances_at(family, theta)?;
            let gradients = if with_gradients {
                Some(gradients_at(family, theta)?.0)
            } else {
                None
            };
            Ok(SweepRow {
                theta,
                distances,
                gradients,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        family: family.descriptor(),
        parameter: family.parameter(),
        rows,
        warnings: family.warnings().to_vec(),
    })
}

/// `D_A − D_B` along a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceCurve {
    pub family: String,
    pub parameter: SweepParam,
    pub minuend: DistanceKind,
    pub subtrahend: DistanceKind,
    pub points: Vec<(f64, f64)>,
}

pub fn difference_curve(
    family: &StateFamily,
    a: DistanceKind,
    b: DistanceKind,
    grid: &[f64],
) -> Result<DifferenceCurve> {
    let s = sweep(family, grid, false)?;
    Ok(DifferenceCurve {
        family: s.family,
        parameter: s.parameter,
        minuend: a,
        subtrahend: b,
        points: s
            .rows
            .iter()
            .map(|r| (r.theta, r.distances.get(a) - r.distances.get(b)))
            .collect(),
    })
}

/// `D_B − D_HS` over a grid of slab amplitudes `(|f1|, |f2|)` for the
/// two-slab mixture at fixed `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSlabSurface {
    pub x: f64,
    pub f1_phase: f64,
    pub f2_phase: f64,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    /// `diff[i][j]` belongs to `(f1[i], f2[j])`.
    pub diff: Vec<Vec<f64>>,
}

pub fn sweep_2d(
    x_fixed: f64,
    f1_moduli: &[f64],
    f2_moduli: &[f64],
    f1_phase: f64,
    f2_phase: f64,
) -> Result<TwoSlabSurface> {
    if !(0.0..=1.0).contains(&x_fixed) {
        return Err(Error::OutOfDomain {
            param: "x",
            value: x_fixed,
            lo: 0.0,
            hi: 1.0,
        });
    }
    for (name, grid) in [("f1", f1_moduli), ("f2", f2_moduli)] {
        check_grid(grid)?;
        if grid.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
            return Err(Error::InvalidGrid(format!("{name} moduli must lie in (0, 1)")));
        }
    }
    if !(f1_phase.is_finite() && f2_phase.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "phase",
            reason: "phases must be finite".into(),
        });
    }
    let diff = f1_moduli
        .par_iter()
        .map(|&m1| {
            f2_moduli
                .iter()
                .map(|&m2| {
                    let family = make_family(
                        FamilyKind::TwoSlabMix,
                        &FamilyParams {
                            f1: Some(Complex64::from_polar(m1, f1_phase)),
                            f2: Some(Complex64::from_polar(m2, f2_phase)),
                            ..Default::default()
                        },
                    )?;
                    let d = distances_at(&family, x_fixed)?;
                    Ok(d.bures - d.hs)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TwoSlabSurface {
        x: x_fixed,
        f1_phase,
        f2_phase,
        f1: f1_moduli.to_vec(),
        f2: f2_moduli.to_vec(),
        diff,
    })
}

/// Point where `|dD_A/dθ| = |dD_B/dθ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub theta_star: f64,
    /// Final bisection bracket around `theta_star`.
    pub bracket: (f64, f64),
    /// `|S_A(θ*)| − |S_B(θ*)|`.
    pub residual: f64,
    pub sensitivity_a: f64,
    pub sensitivity_b: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverReport {
    pub metric_a: DistanceKind,
    pub metric_b: DistanceKind,
    /// Search bracket as requested.
    pub bracket: (f64, f64),
    /// `None` when the sensitivity difference keeps its sign over the bracket.
    pub crossover: Option<Crossover>,
    /// Metric with the larger gradient magnitude at the low end of the bracket.
    pub dominant_low_side: DistanceKind,
    /// Metric with the larger gradient magnitude at the high end of the bracket.
    pub dominant_high_side: DistanceKind,
}

impl CrossoverReport {
    pub fn found(&self) -> bool {
        self.crossover.is_some()
    }

    pub fn theta_star(&self) -> Option<f64> {
        self.crossover.map(|c| c.theta_star)
    }
}

/// Bisects `g(θ) = |S_A(θ)| − |S_B(θ)|` on `bracket`.
///
/// A bracket without a sign change is a legitimate answer, reported with
/// `crossover: None` rather than as an error.
pub fn sensitivity_crossover(
    family: &StateFamily,
    metric_a: DistanceKind,
    metric_b: DistanceKind,
    bracket: (f64, f64),
) -> Result<CrossoverReport> {
    let (lo0, hi0) = bracket;
    if !(lo0 < hi0) {
        return Err(Error::InvalidGrid(format!("bracket needs lo < hi, got ({lo0}, {hi0})")));
    }
    family.check_domain(lo0)?;
    family.check_domain(hi0)?;

    let eval = |theta: f64| -> Result<(f64, f64, f64)> {
        let (g, _) = gradients_at(family, theta)?;
        let (sa, sb) = (g.get(metric_a), g.get(metric_b));
        Ok((sa.abs() - sb.abs(), sa, sb))
    };
    let dominant = |g: f64| if g >= 0.0 { metric_a } else { metric_b };

    let (g_lo, ..) = eval(lo0)?;
    let (g_hi, ..) = eval(hi0)?;
    let mut report = CrossoverReport {
        metric_a,
        metric_b,
        bracket,
        crossover: None,
        dominant_low_side: dominant(g_lo),
        dominant_high_side: dominant(g_hi),
    };
    if g_lo.signum() == g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
        return Ok(report);
    }

    let (mut lo, mut hi) = (lo0, hi0);
    let lo_positive = g_lo > 0.0;
    let tol = BISECTION_REL_TOL * (hi0 - lo0);
    let mut iterations = 0;
    if g_lo == 0.0 {
        hi = lo;
    } else if g_hi == 0.0 {
        lo = hi;
    }
    while hi - lo > tol && iterations < BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let (g_mid, ..) = eval(mid)?;
        if g_mid == 0.0 {
            lo = mid;
            hi = mid;
        } else if (g_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let theta_star = 0.5 * (lo + hi);
    let (residual, sa, sb) = eval(theta_star)?;
    report.crossover = Some(Crossover {
        theta_star,
        bracket: (lo, hi),
        residual,
        sensitivity_a: sa,
        sensitivity_b: sb,
        iterations,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::make_family;

    fn decohered(l: f64) -> StateFamily {
        make_family(
            FamilyKind::Decohered,
            &FamilyParams {
                l: Some(l),
                ..Default::default()
            },
        )
        .unwrap()
    }

    fn depolarized() -> StateFamily {
        make_family(FamilyKind::Depolarized, &FamilyParams::default()).unwrap()
    }

    #[test]
    fn grids() {
        let g = linear_points(0.0, 5.0, 501).unwrap();
        assert_eq!(g.len(), 501);
        assert_eq!((g[0], g[500]), (0.0, 5.0));
        assert!((g[100] - 1.0).abs() < 1e-15);
        let g = log_points(1e-4, 0.5, 60).unwrap();
        assert_eq!((g[0], g[59]), (1e-4, 0.5));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_points(0.0, 1.0, 5).is_err());
        assert!(linear_points(1.0, 1.0, 5).is_err());
        assert!(linear_points(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn sweep_examples() {
        let fam = decohered(1.0);
        let s = sweep(&fam, &[0.0, std::f64::consts::LN_2], false).unwrap();
        assert_eq!(s.rows[0].distances, Distances::default());
        let d = s.rows[1].distances;
        assert!((d.bures - 0.5).abs() < 1e-12);
        assert!((d.hs - 0.25).abs() < 1e-15);
        assert!((d.trace - 0.25).abs() < 1e-14);

        let s = sweep(&depolarized(), &[0.0, 0.5], true).unwrap();
        let d = s.rows[0].distances;
        assert!((d.bures - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((d.trace - 0.75).abs() < 1e-14);
        assert!((d.hs - 6f64.sqrt() / 4.0).abs() < 1e-15);
        assert!(s.rows[0].gradients.unwrap().trace < 0.0);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let fam = depolarized();
        assert!(matches!(sweep(&fam, &[0.5], false), Err(Error::InvalidGrid(_))));
        assert!(matches!(sweep(&fam, &[0.5, 0.2], false), Err(Error::InvalidGrid(_))));
        assert!(matches!(sweep(&fam, &[0.5, 1.2], false), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn sensitivity_examples() {
        let l = 1.3;
        let fam = decohered(l);
        for theta in [0.05, 0.4, 1.0, 3.0] {
            let e = (-l * theta).exp();
            let bures = l / (2.0 * 2f64.sqrt()) * e / (1.0 - e).sqrt();
            let hs = l / 2.0 * e;
            let s = sensitivity(&fam, DistanceKind::Bures, theta).unwrap();
            assert!(!s.one_sided);
            assert!((s.value - bures).abs() / bures < 1e-4);
            let s = sensitivity(&fam, DistanceKind::HilbertSchmidt, theta).unwrap();
            assert!((s.value - hs).abs() / hs < 1e-6);
        }
        let fam = depolarized();
        for x in [0.1, 0.5, 0.9] {
            let s = sensitivity(&fam, DistanceKind::Trace, x).unwrap();
            assert!((s.value + 0.75).abs() < 1e-8, "{}", s.value);
        }
    }

    #[test]
    fn sensitivity_falls_back_to_one_sided_at_edges() {
        let fam = depolarized();
        for x in [0.0, 1.0] {
            let s = sensitivity(&fam, DistanceKind::HilbertSchmidt, x).unwrap();
            assert!(s.one_sided);
            assert!((s.value + 6f64.sqrt() / 4.0).abs() < 1e-8);
        }
        assert!(sensitivity(&fam, DistanceKind::Trace, 1.5).is_err());
    }

    #[test]
    fn crossover_decohered() {
        let r = sensitivity_crossover(&decohered(1.0), DistanceKind::Bures, DistanceKind::HilbertSchmidt, (0.1, 2.0))
            .unwrap();
        let c = r.crossover.unwrap();
        assert!((c.theta_star - std::f64::consts::LN_2).abs() < 1e-6);
        assert!(c.bracket.0 < c.theta_star && c.theta_star < c.bracket.1);
        assert_eq!(r.dominant_low_side, DistanceKind::Bures);
        assert_eq!(r.dominant_high_side, DistanceKind::HilbertSchmidt);
        assert!(c.residual.abs() <= 1e-6 * c.sensitivity_a.abs().max(c.sensitivity_b.abs()));
    }

    #[test]
    fn crossover_scales_with_tau() {
        let r = sensitivity_crossover(&decohered(2.0), DistanceKind::Bures, DistanceKind::HilbertSchmidt, (0.05, 1.0))
            .unwrap();
        assert!((r.theta_star().unwrap() - std::f64::consts::LN_2 / 2.0).abs() < 1e-6);
    }

    #[test]
    fn crossover_absent() {
        // Both distances are linear in x for the depolarized singlet, with
        // slopes 3/4 (trace) and √6/4 (HS).
        let r = sensitivity_crossover(&depolarized(), DistanceKind::HilbertSchmidt, DistanceKind::Trace, (0.1, 0.9))
            .unwrap();
        assert!(!r.found());
        assert_eq!(r.dominant_low_side, DistanceKind::Trace);
        assert_eq!(r.dominant_high_side, DistanceKind::Trace);
    }

    #[test]
    fn crossover_bracket_validation() {
        let fam = depolarized();
        assert!(sensitivity_crossover(&fam, DistanceKind::Bures, DistanceKind::Trace, (0.9, 0.1)).is_err());
        assert!(sensitivity_crossover(&fam, DistanceKind::Bures, DistanceKind::Trace, (0.1, 1.5)).is_err());
    }

    #[test]
    fn difference_curve_vanishes_at_reference() {
        let c = difference_curve(&decohered(1.0), DistanceKind::Bures, DistanceKind::HilbertSchmidt, &[0.0, 1.0])
            .unwrap();
        assert_eq!(c.points[0], (0.0, 0.0));
        let e = (-1.0f64).exp();
        assert!((c.points[1].1 - (((1.0 - e) / 2.0).sqrt() - (1.0 - e) / 2.0)).abs() < 1e-12);

        let c = difference_curve(&depolarized(), DistanceKind::Bures, DistanceKind::HilbertSchmidt, &[0.0, 1.0])
            .unwrap();
        assert!((c.points[0].1 - (3f64.sqrt() / 2.0 - 6f64.sqrt() / 4.0)).abs() < 1e-12);
        assert!((c.points[0].1 - 0.2536).abs() < 1e-4);
        assert_eq!(c.points[1].1, 0.0);
    }

    #[test]
    fn surface_diagonal_is_zero() {
        let g = log_points(1e-3, 0.2, 5).unwrap();
        let s = sweep_2d(0.5, &g, &g, 0.0, 0.0).unwrap();
        for i in 0..g.len() {
            assert_eq!(s.diff[i][i], 0.0);
        }
        assert!(sweep_2d(1.5, &g, &g, 0.0, 0.0).is_err());
        assert!(sweep_2d(0.5, &[0.1, 1.2], &g, 0.0, 0.0).is_err());
    }

    #[test]
    fn surface_matches_two_slab_sweep() {
        let s = sweep_2d(0.5, &[0.01, 0.05], &[0.001, 0.002], 0.0, 0.0).unwrap();
        let fam = make_family(
            FamilyKind::TwoSlabMix,
            &FamilyParams {
                f1: Some(Complex64::new(0.05, 0.0)),
                f2: Some(Complex64::new(0.001, 0.0)),
                ..Default::default()
            },
        )
        .unwrap();
        let c = difference_curve(&fam, DistanceKind::Bures, DistanceKind::HilbertSchmidt, &[0.25, 0.5]).unwrap();
        assert!((s.diff[1][0] - c.points[1].1).abs() < 1e-15);
    }
}
