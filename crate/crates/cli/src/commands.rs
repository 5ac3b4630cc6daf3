use std::fs;
use std::path::Path;

use mesodist::analysis::{sensitivity_crossover, sweep, sweep_2d, CrossoverReport, SweepResult};
use mesodist::{make_family, DistanceKind, FamilyKind, FamilyParams};
use serde::Serialize;

use crate::args::Target;
use crate::config::{CrossoverPlan, GridPlan, Settings, SweepPlan};
use crate::error::{CliError, CliResult};
use crate::output::{emit_csv, emit_json, Table};

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

/// Sweep columns `theta, d_*[, g_*]` followed by one `diff_a_b` column per pair.
fn sweep_table(
    result: &SweepResult,
    metrics: &[DistanceKind],
    gradients: bool,
    diffs: &[(DistanceKind, DistanceKind)],
) -> Table {
    let mut header = vec!["theta".to_string()];
    header.extend(metrics.iter().map(|m| format!("d_{m}")));
    if gradients {
        header.extend(metrics.iter().map(|m| format!("g_{m}")));
    }
    header.extend(diffs.iter().map(|(a, b)| format!("diff_{a}_{b}")));

    let rows = result
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![r.theta];
            row.extend(metrics.iter().map(|&m| r.distances.get(m)));
            if let Some(g) = r.gradients.filter(|_| gradients) {
                row.extend(metrics.iter().map(|&m| g.get(m)));
            }
            row.extend(diffs.iter().map(|&(a, b)| r.distances.get(a) - r.distances.get(b)));
            row
        })
        .collect();
    Table { header, rows }
}

pub fn run_sweep(settings: &Settings) -> CliResult<()> {
    let plan: SweepPlan = settings.sweep_plan()?;
    warn(plan.family.warnings());
    let result = sweep(&plan.family, &plan.grid, plan.gradients)?;
    emit_csv(&sweep_table(&result, &plan.metrics, plan.gradients, &[]), plan.out.as_deref())
}

#[derive(Debug, Serialize)]
pub struct CrossoverJson {
    pub family: String,
    pub metrics: (DistanceKind, DistanceKind),
    pub theta_star: Option<f64>,
    pub bracket: (f64, f64),
    pub residual: Option<f64>,
    pub dominant_low_side: DistanceKind,
    pub dominant_high_side: DistanceKind,
    pub crossover_found: bool,
}

impl CrossoverJson {
    fn new(family: String, r: &CrossoverReport) -> Self {
        CrossoverJson {
            family,
            metrics: (r.metric_a, r.metric_b),
            theta_star: r.theta_star(),
            bracket: r.bracket,
            residual: r.crossover.map(|c| c.residual),
            dominant_low_side: r.dominant_low_side,
            dominant_high_side: r.dominant_high_side,
            crossover_found: r.found(),
        }
    }
}

pub fn run_crossover(settings: &Settings) -> CliResult<()> {
    let plan: CrossoverPlan = settings.crossover_plan()?;
    warn(plan.family.warnings());
    let (a, b) = plan.metrics;
    let report = sensitivity_crossover(&plan.family, a, b, plan.bracket)?;
    emit_json(&CrossoverJson::new(plan.family.descriptor(), &report), plan.out.as_deref())
}

fn grid_table(plan: &GridPlan) -> CliResult<Table> {
    let surface = sweep_2d(plan.x_fixed, &plan.moduli, &plan.moduli, plan.f1_phase, plan.f2_phase)?;
    let mut rows = Vec::with_capacity(surface.f1.len() * surface.f2.len());
    for (i, &f1) in surface.f1.iter().enumerate() {
        for (j, &f2) in surface.f2.iter().enumerate() {
            rows.push(vec![f1, f2, surface.diff[i][j]]);
        }
    }
    Ok(Table {
        header: vec!["f1".into(), "f2".into(), "diff_bures_hs".into()],
        rows,
    })
}

pub fn run_grid(settings: &Settings) -> CliResult<()> {
    let plan = settings.grid_plan()?;
    emit_csv(&grid_table(&plan)?, plan.out.as_deref())
}

fn settings_for(family: FamilyKind, from: f64, to: f64, steps: usize) -> Settings {
    Settings {
        family: Some(family.token().into()),
        from: Some(from),
        to: Some(to),
        steps: Some(steps),
        ..Default::default()
    }
}

fn fig1() -> CliResult<Table> {
    let plan = settings_for(FamilyKind::Decohered, 0.0, 5.0, 500).sweep_plan()?;
    let metrics = [DistanceKind::Bures, DistanceKind::HilbertSchmidt];
    let result = sweep(&plan.family, &plan.grid, false)?;
    Ok(sweep_table(&result, &metrics, false, &[(metrics[0], metrics[1])]))
}

fn fig3() -> CliResult<Table> {
    let mut s = settings_for(FamilyKind::TwoSlabMix, 0.0, 1.0, 400);
    (s.f1, s.f2) = (Some(0.05), Some(0.001));
    let plan = s.sweep_plan()?;
    let metrics = [DistanceKind::Bures, DistanceKind::HilbertSchmidt];
    let result = sweep(&plan.family, &plan.grid, true)?;
    Ok(sweep_table(&result, &metrics, true, &[(metrics[0], metrics[1])]))
}

fn fig4() -> CliResult<Table> {
    let plan = settings_for(FamilyKind::Depolarized, 0.0, 0.999, 500).sweep_plan()?;
    let result = sweep(&plan.family, &plan.grid, true)?;
    let diffs = [
        (DistanceKind::Bures, DistanceKind::HilbertSchmidt),
        (DistanceKind::Bures, DistanceKind::Trace),
    ];
    Ok(sweep_table(&result, &DistanceKind::ALL, true, &diffs))
}

#[derive(Debug, Serialize)]
pub struct TableEntry {
    pub name: &'static str,
    pub family: String,
    pub metrics: (DistanceKind, DistanceKind),
    pub bracket: (f64, f64),
    /// Value quoted in the literature.
    #[serde(rename = "paper")]
    pub quoted: f64,
    pub computed: Option<f64>,
    pub crossover_found: bool,
}

#[derive(Debug, Serialize)]
pub struct CrossoverTable {
    pub crossovers: Vec<TableEntry>,
}

pub fn crossover_table() -> CliResult<CrossoverTable> {
    let decohered = |bg: Option<f64>| FamilyParams {
        l: Some(1.0),
        bg,
        ..Default::default()
    };
    let cases = [
        ("decohered", FamilyKind::Decohered, decohered(None), DistanceKind::HilbertSchmidt, (0.1, 2.0), 0.69),
        ("decohered-bg-1%", FamilyKind::DecoheredBackground, decohered(Some(0.01)), DistanceKind::HilbertSchmidt, (0.1, 2.0), 0.67),
        ("decohered-bg-10%", FamilyKind::DecoheredBackground, decohered(Some(0.10)), DistanceKind::HilbertSchmidt, (0.1, 2.0), 0.51),
        ("depolarized-hs", FamilyKind::Depolarized, FamilyParams::default(), DistanceKind::HilbertSchmidt, (0.1, 0.95), 0.5),
        ("depolarized-trace", FamilyKind::Depolarized, FamilyParams::default(), DistanceKind::Trace, (0.1, 0.95), 0.6667),
    ];
    let crossovers = cases
        .into_iter()
        .map(|(name, kind, params, other, bracket, quoted)| {
            let family = make_family(kind, &params)?;
            let report = sensitivity_crossover(&family, DistanceKind::Bures, other, bracket)?;
            Ok(TableEntry {
                name,
                family: family.descriptor(),
                metrics: (DistanceKind::Bures, other),
                bracket,
                quoted,
                computed: report.theta_star(),
                crossover_found: report.found(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CrossoverTable { crossovers })
}

pub fn run_reproduce(target: Target, dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.to_path_buf(),
        source,
    })?;
    let targets: &[Target] = match target {
        Target::All => &[Target::Fig1, Target::Fig2, Target::Fig3, Target::Fig4, Target::TableCrossovers],
        _ => std::slice::from_ref(&target),
    };
    for &t in targets {
        let written = match t {
            Target::Fig1 => csv_file(dir, "fig1.csv", fig1()?)?,
            Target::Fig2 => csv_file(dir, "fig2.csv", grid_table(&Settings::default().grid_plan()?)?)?,
            Target::Fig3 => csv_file(dir, "fig3.csv", fig3()?)?,
            Target::Fig4 => csv_file(dir, "fig4.csv", fig4()?)?,
            Target::TableCrossovers => {
                let path = dir.join("table-crossovers.json");
                emit_json(&crossover_table()?, Some(&path))?;
                path
            }
            Target::All => unreachable!("expanded above"),
        };
        println!("{}", written.display());
    }
    Ok(())
}

fn csv_file(dir: &Path, name: &str, table: Table) -> CliResult<std::path::PathBuf> {
    let path = dir.join(name);
    emit_csv(&table, Some(&path))?;
    Ok(path)
}
