use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Accepts plain numbers and fractions such as `1/6`.
pub fn parse_num(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            a / b
        }
        None => s.parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "maglab",
    version,
    about = "Numerical laboratory for random magnetic Schrödinger operators"
)]
pub struct Cli {
    /// JSON model configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 50)]
    pub trials: usize,

    /// Parent directory of run directories.
    #[arg(long, global = true, default_value = "runs")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the model assumptions on a grid.
    Validate {
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Band edges, forbidden interval and band estimates.
    Edges(EdgesArgs),
    /// Draw one field sample and tabulate coefficients and field values.
    Sample(SampleArgs),
    /// Spectrum of one finite-volume operator.
    Spectrum(SpectrumArgs),
    /// Expected eigenvalue counts in windows of width η.
    Wegner(WegnerArgs),
    /// Probability that a box is (γ, E)-good.
    Goodbox(GoodBoxArgs),
    /// Probability that a box is (E, C∞, α)-balanced.
    Balanced(BalancedArgs),
    /// Lifshitz-tail intrusion probability against its bound.
    Lifshitz(LifshitzArgs),
    /// Off-diagonal resolvent decay in a Landau gap on a torus.
    Decay(DecayArgs),
    /// Landau trial-state residuals as the field strength grows.
    Trial(TrialArgs),
    /// Empirical constants of the resolvent kernel bounds.
    KernelAudit(KernelAuditArgs),
    /// Averaged integrated density of states.
    Ids(IdsArgs),
    /// Merge the records of finished runs.
    Report {
        /// Run directories.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Edges(_) => "edges",
            Command::Sample(_) => "sample",
            Command::Spectrum(_) => "spectrum",
            Command::Wegner(_) => "wegner",
            Command::Goodbox(_) => "goodbox",
            Command::Balanced(_) => "balanced",
            Command::Lifshitz(_) => "lifshitz",
            Command::Decay(_) => "decay",
            Command::Trial(_) => "trial",
            Command::KernelAudit(_) => "kernel-audit",
            Command::Ids(_) => "ids",
            Command::Report { .. } => "report",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Lattice spacing.
    #[arg(long, value_parser = parse_num, default_value = "1/6")]
    pub spacing: f64,

    /// Fourth-order kinetic stencil.
    #[arg(long)]
    pub fourth_order: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EdgesArgs {
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
    #[arg(long, value_parser = parse_num, default_value = "1")]
    pub c_ext: f64,
    #[arg(long, value_parser = parse_num, default_value = "1")]
    pub c_int: f64,
    /// Widening of the localization window.
    #[arg(long, value_parser = parse_num)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    /// `xmin,ymin,xmax,ymax`.
    #[arg(long, value_parser = parse_num, value_delimiter = ',', default_value = "-2,-2,2,2")]
    pub region: Vec<f64>,
    /// Field grid cells per side.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_parser = parse_num, default_value = "5")]
    pub l: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Only eigenvalues in `a,b`.
    #[arg(long, value_parser = parse_num, value_delimiter = ',')]
    pub window: Option<Vec<f64>>,
    /// Also write the matrix in coordinate format.
    #[arg(long)]
    pub export_matrix: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WegnerArgs {
    #[arg(long, value_parser = parse_num)]
    pub energy: f64,
    #[arg(long, value_parser = parse_num, value_delimiter = ',', required = true)]
    pub eta: Vec<f64>,
    #[arg(long, value_parser = parse_num, default_value = "12")]
    pub l: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GoodBoxArgs {
    #[arg(long, value_parser = parse_num)]
    pub energy: f64,
    #[arg(long, value_parser = parse_num, value_delimiter = ',', required = true)]
    pub gamma: Vec<f64>,
    #[arg(long, value_parser = parse_num, default_value = "9")]
    pub l: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BalancedArgs {
    #[arg(long, value_parser = parse_num)]
    pub energy: f64,
    #[arg(long, value_parser = parse_num, default_value = "3")]
    pub l: f64,
    #[arg(long, value_parser = parse_num, default_value = "3")]
    pub proxy_factor: f64,
    #[arg(long, value_parser = parse_num, default_value = "1")]
    pub c_inf: f64,
    #[arg(long, value_parser = parse_num, default_value = "0")]
    pub alpha: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LifshitzArgs {
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Tail widths `h`.
    #[arg(long, value_parser = parse_num, value_delimiter = ',', required = true)]
    pub tail: Vec<f64>,
    #[arg(long, value_parser = parse_num, default_value = "3")]
    pub l: f64,
    #[arg(long, value_parser = parse_num, default_value = "3")]
    pub proxy_factor: f64,
    #[arg(long, value_parser = parse_num, default_value = "1")]
    pub c_ext: f64,
    #[arg(long, default_value_t = 100)]
    pub resolution: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecayArgs {
    /// Gap above Landau level `n`.
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Torus side (an integer when the configuration has a periodic field part).
    #[arg(long, value_parser = parse_num, default_value = "8")]
    pub side: f64,
    #[arg(long, value_parser = parse_num, default_value = "1/8")]
    pub spacing: f64,
    /// Half side of the source and target squares.
    #[arg(long, value_parser = parse_num, default_value = "0.5")]
    pub half: f64,
    #[arg(long, value_parser = parse_num, value_delimiter = ',', default_value = "0.25,0.5,0.75,1,1.25,1.5,1.75,2")]
    pub distances: Vec<f64>,
    /// Energies as fractions of the gap measured from its lower edge.
    #[arg(long, value_parser = parse_num, value_delimiter = ',', default_value = "0.125,0.25,0.5")]
    pub fractions: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrialArgs {
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long, value_parser = parse_num, value_delimiter = ',', default_value = "25,100,400")]
    pub b0_list: Vec<f64>,
    #[arg(long, value_parser = parse_num, value_delimiter = ',', default_value = "0,0")]
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KernelAuditArgs {
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Field strength; defaults to the configuration's `B0`.
    #[arg(long, value_parser = parse_num)]
    pub b0: Option<f64>,
    #[arg(long, value_parser = parse_num, value_delimiter = ',', default_value = "0.01,20,12")]
    pub zeta: Vec<f64>,
    /// Points of the z grid along the real and imaginary axes.
    #[arg(long, value_delimiter = ',', default_value = "9,5")]
    pub z_grid: Vec<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IdsArgs {
    #[arg(long, value_parser = parse_num, default_value = "8")]
    pub l: f64,
    /// `lo,hi,count`.
    #[arg(long, value_parser = parse_num, value_delimiter = ',')]
    pub energies: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_parse() {
        assert_eq!(parse_num("1/8").unwrap(), 0.125);
        assert_eq!(parse_num(" 2.5 ").unwrap(), 2.5);
        assert!(parse_num("1/0").is_err());
        assert!(parse_num("x").is_err());
    }

    #[test]
    fn lists_and_globals() {
        let cli = Cli::try_parse_from([
            "maglab",
            "wegner",
            "--energy",
            "9.7",
            "--eta",
            "0.2,0.1",
            "--trials",
            "7",
            "--spacing",
            "1/6",
        ])
        .unwrap();
        assert_eq!(cli.trials, 7);
        match cli.command {
            Command::Wegner(w) => {
                assert_eq!(w.eta, vec![0.2, 0.1]);
                assert!((w.grid.spacing - 1.0 / 6.0).abs() < 1e-15);
            }
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["maglab", "frobnicate"]).is_err());
    }
}
