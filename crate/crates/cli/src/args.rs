use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const REPRODUCE_HELP: &str = "\
Targets are named after the caption of the curve they reproduce:
  fig1              D_B - D_HS between the singlet and the decohered singlet versus t
                    (l = 1, t in [0, 5 tau], 500 steps)
  fig2              D_B - D_HS for the two-slab mixture at x = 0.5 over log-spaced real
                    f1, f2 in [1e-4, 0.5], 60 x 60 points
  fig3              two-slab mixture versus x with f1 = 0.05, f2 = 0.001 (400 steps)
  fig4              depolarized singlet versus x: Bures minus HS (solid curve) and Bures
                    minus trace (dashed curve), with gradients (500 steps up to 0.999)
  table-crossovers  every quoted crossover value next to the computed one
  all               every target above

Cross-references elsewhere sometimes cite the depolarizing curves under a different
number; the names here always follow the caption content.";

#[derive(Debug, Parser)]
#[command(
    name = "mesodist",
    version,
    about = "Bures, Hilbert-Schmidt and trace distances between two-meson states",
    long_about = "Bures, Hilbert-Schmidt and trace distances between two-meson states.\n\n\
        Exit status: 0 on success, 2 on an invalid configuration (the message names the \
        offending field), 3 on a numerical failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate distances, and optionally their gradients, along a family. Writes CSV.
    Sweep(RunArgs),
    /// Locate where two metrics are equally sensitive inside [--from, --to]. Writes JSON.
    Crossover(RunArgs),
    /// D_B - D_HS of the two-slab mixture over a log grid of |f1|, |f2|. Writes long-format CSV.
    ///
    /// --from/--to bound both moduli and --steps is the number of points per axis.
    Grid(RunArgs),
    /// Regenerate figure data and crossover values with their published parameters.
    #[command(after_help = REPRODUCE_HELP)]
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    TableCrossovers,
    All,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Flags shared by `sweep`, `crossover` and `grid`. Each one overrides the
/// matching key of `--config`.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Scenario token: decohered, decohered-bg, singlet-regen-mix, two-slab-mix,
    /// depolarized, regen-depolarized.
    #[arg(long)]
    pub family: Option<String>,
    /// Swept parameter, `t` or `x`. Must match the family.
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Number of intervals (sweep) or points per axis (grid).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Logarithmic spacing for sweeps. Grids are always logarithmic.
    #[arg(long)]
    pub log: bool,
    /// Comma-separated subset of bures,hs,trace. Crossover takes exactly two.
    #[arg(long)]
    pub metrics: Option<String>,
    /// Add g_* columns holding dD/dθ.
    #[arg(long)]
    pub gradients: bool,
    /// Output file. Defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the keys above (snake_case). Flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Decoherence rate; time is in units of 1/l.
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<f64>,
    /// Background weight of the decohered-bg family.
    #[arg(long, allow_hyphen_values = true)]
    pub bg: Option<f64>,
    /// Regeneration amplitude modulus for single-slab families.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f_phase: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f1_phase: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f2_phase: Option<f64>,
    /// Mixing fraction held fixed by `grid`.
    #[arg(long, allow_hyphen_values = true)]
    pub x_fixed: Option<f64>,
}
