//! Merging of `--config` files with flags, and validation into run plans.

use std::fs;
use std::path::{Path, PathBuf};

use mesodist::analysis::{
    linear_points, log_points, DEFAULT_GRID_POINTS, DEFAULT_GRID_RANGE, DEFAULT_SWEEP_STEPS, DEFAULT_T_MAX_TAUS,
    DEFAULT_X_MAX,
};
use mesodist::{make_family, DistanceKind, FamilyKind, FamilyParams, StateFamily, SweepParam};
use num_complex::Complex64;
use serde::Deserialize;

use crate::args::RunArgs;
use crate::error::{CliError, CliResult};

/// Default crossover bracket for mixing-fraction families.
pub const DEFAULT_X_BRACKET: (f64, f64) = (0.01, 0.99);
/// Default crossover bracket for time families, in units of `τ`.
pub const DEFAULT_T_BRACKET_TAUS: (f64, f64) = (0.01, 5.0);
/// Mixing fraction used by `grid` when `--x-fixed` is absent.
pub const DEFAULT_X_FIXED: f64 = 0.5;

/// Every knob of a run. Keys of a `--config` file use these names.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub family: Option<String>,
    pub param: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub log: Option<bool>,
    pub metrics: Option<String>,
    pub gradients: Option<bool>,
    pub out: Option<PathBuf>,
    pub l: Option<f64>,
    pub bg: Option<f64>,
    pub f: Option<f64>,
    pub f_phase: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub f1_phase: Option<f64>,
    pub f2_phase: Option<f64>,
    pub x_fixed: Option<f64>,
}

impl Settings {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))
    }

    /// Loads `--config` if given, then lets every present flag override it.
    pub fn resolve(args: RunArgs) -> CliResult<Self> {
        let base = match &args.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        Ok(Settings {
            family: args.family.or(base.family),
            param: args.param.or(base.param),
            from: args.from.or(base.from),
            to: args.to.or(base.to),
            steps: args.steps.or(base.steps),
            log: if args.log { Some(true) } else { base.log },
            metrics: args.metrics.or(base.metrics),
            gradients: if args.gradients { Some(true) } else { base.gradients },
            out: args.out.or(base.out),
            l: args.l.or(base.l),
            bg: args.bg.or(base.bg),
            f: args.f.or(base.f),
            f_phase: args.f_phase.or(base.f_phase),
            f1: args.f1.or(base.f1),
            f2: args.f2.or(base.f2),
            f1_phase: args.f1_phase.or(base.f1_phase),
            f2_phase: args.f2_phase.or(base.f2_phase),
            x_fixed: args.x_fixed.or(base.x_fixed),
        })
    }

    fn family(&self) -> CliResult<StateFamily> {
        let token = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::config("family", "required; one of ".to_string() + &family_tokens()))?;
        let kind: FamilyKind = token
            .parse()
            .map_err(|_| CliError::config("family", format!("unknown token `{token}`; expected one of {}", family_tokens())))?;

        let finite = |field: &'static str, v: Option<f64>| -> CliResult<Option<f64>> {
            match v {
                Some(x) if !x.is_finite() => Err(CliError::config(field, "must be finite")),
                other => Ok(other),
            }
        };
        let amplitude = |field: &'static str, m: Option<f64>, phase_field: &'static str, phase: Option<f64>| {
            let m = finite(field, m)?;
            let phase = finite(phase_field, phase)?.unwrap_or(0.0);
            Ok::<_, CliError>(m.map(|m| Complex64::from_polar(m, phase)))
        };
        let params = FamilyParams {
            l: Some(finite("l", self.l)?.unwrap_or(1.0)),
            bg: finite("bg", self.bg)?,
            f: amplitude("f", self.f, "f_phase", self.f_phase)?,
            f1: amplitude("f1", self.f1, "f1_phase", self.f1_phase)?,
            f2: amplitude("f2", self.f2, "f2_phase", self.f2_phase)?,
        };
        let family = make_family(kind, &params)?;

        if let Some(p) = &self.param {
            let p: SweepParam = p
                .parse()
                .map_err(|_| CliError::config("param", format!("unknown token `{p}`; expected `t` or `x`")))?;
            if p != family.parameter() {
                return Err(CliError::config(
                    "param",
                    format!("family `{kind}` is swept in `{}`, not `{p}`", family.parameter()),
                ));
            }
        }
        Ok(family)
    }

    fn tau(&self) -> f64 {
        1.0 / self.l.unwrap_or(1.0)
    }

    fn range(&self, default: (f64, f64)) -> CliResult<(f64, f64)> {
        let from = self.from.unwrap_or(default.0);
        let to = self.to.unwrap_or(default.1);
        if !from.is_finite() {
            return Err(CliError::config("from", "must be finite"));
        }
        if !to.is_finite() {
            return Err(CliError::config("to", "must be finite"));
        }
        if from >= to {
            return Err(CliError::config("from", format!("must be below `to` ({from} >= {to})")));
        }
        Ok((from, to))
    }

    fn steps(&self, default: usize) -> CliResult<usize> {
        let steps = self.steps.unwrap_or(default);
        if steps < 2 {
            return Err(CliError::config("steps", format!("must be at least 2, got {steps}")));
        }
        Ok(steps)
    }

    fn metrics(&self, default: &[DistanceKind]) -> CliResult<Vec<DistanceKind>> {
        let Some(list) = &self.metrics else {
            return Ok(default.to_vec());
        };
        let mut out = Vec::new();
        for token in list.split(',').map(str::trim) {
            let kind: DistanceKind = token
                .parse()
                .map_err(|_| CliError::config("metrics", format!("unknown metric `{token}`; expected bures, hs or trace")))?;
            if out.contains(&kind) {
                return Err(CliError::config("metrics", format!("`{token}` listed twice")));
            }
            out.push(kind);
        }
        Ok(out)
    }

    pub fn sweep_plan(&self) -> CliResult<SweepPlan> {
        let family = self.family()?;
        let default = match family.parameter() {
            SweepParam::Time => (0.0, DEFAULT_T_MAX_TAUS * self.tau()),
            SweepParam::Mixing => (0.0, DEFAULT_X_MAX),
        };
        let (from, to) = self.range(default)?;
        let steps = self.steps(DEFAULT_SWEEP_STEPS)?;
        let log = self.log.unwrap_or(false);
        if log && from <= 0.0 {
            return Err(CliError::config("from", "a logarithmic grid needs from > 0"));
        }
        family.check_domain(from)?;
        family.check_domain(to)?;
        let grid = if log {
            log_points(from, to, steps + 1)?
        } else {
            linear_points(from, to, steps + 1)?
        };
        let mut metrics = self.metrics(&DistanceKind::ALL)?;
        metrics.sort();
        Ok(SweepPlan {
            family,
            grid,
            metrics,
            gradients: self.gradients.unwrap_or(false),
            out: self.out.clone(),
        })
    }

    pub fn crossover_plan(&self) -> CliResult<CrossoverPlan> {
        let family = self.family()?;
        let default = match family.parameter() {
            SweepParam::Time => (DEFAULT_T_BRACKET_TAUS.0 * self.tau(), DEFAULT_T_BRACKET_TAUS.1 * self.tau()),
            SweepParam::Mixing => DEFAULT_X_BRACKET,
        };
        let bracket = self.range(default)?;
        family.check_domain(bracket.0)?;
        family.check_domain(bracket.1)?;
        let metrics = self.metrics(&[DistanceKind::Bures, DistanceKind::HilbertSchmidt])?;
        let [a, b] = metrics[..] else {
            return Err(CliError::config("metrics", format!("crossover needs exactly two metrics, got {}", metrics.len())));
        };
        Ok(CrossoverPlan {
            family,
            metrics: (a, b),
            bracket,
            out: self.out.clone(),
        })
    }

    pub fn grid_plan(&self) -> CliResult<GridPlan> {
        if let Some(token) = &self.family {
            if token != FamilyKind::TwoSlabMix.token() {
                return Err(CliError::config("family", format!("grid only covers two-slab-mix, got `{token}`")));
            }
        }
        let (from, to) = self.range(DEFAULT_GRID_RANGE)?;
        if from <= 0.0 {
            return Err(CliError::config("from", "grid moduli are log-spaced and need from > 0"));
        }
        if to >= 1.0 {
            return Err(CliError::config("to", "slab amplitudes must stay below 1"));
        }
        let steps = self.steps(DEFAULT_GRID_POINTS)?;
        let x_fixed = self.x_fixed.unwrap_or(DEFAULT_X_FIXED);
        if !(0.0..=1.0).contains(&x_fixed) {
            return Err(CliError::config("x_fixed", format!("must lie in [0, 1], got {x_fixed}")));
        }
        let phase = |field: &'static str, v: Option<f64>| match v {
            Some(p) if !p.is_finite() => Err(CliError::config(field, "must be finite")),
            p => Ok(p.unwrap_or(0.0)),
        };
        Ok(GridPlan {
            moduli: log_points(from, to, steps)?,
            x_fixed,
            f1_phase: phase("f1_phase", self.f1_phase)?,
            f2_phase: phase("f2_phase", self.f2_phase)?,
            out: self.out.clone(),
        })
    }
}

fn family_tokens() -> String {
    FamilyKind::ALL.map(FamilyKind::token).join(", ")
}

#[derive(Debug)]
pub struct SweepPlan {
    pub family: StateFamily,
    pub grid: Vec<f64>,
    /// Canonical column order.
    pub metrics: Vec<DistanceKind>,
    pub gradients: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CrossoverPlan {
    pub family: StateFamily,
    pub metrics: (DistanceKind, DistanceKind),
    pub bracket: (f64, f64),
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct GridPlan {
    pub moduli: Vec<f64>,
    pub x_fixed: f64,
    pub f1_phase: f64,
    pub f2_phase: f64,
    pub out: Option<PathBuf>,
}
