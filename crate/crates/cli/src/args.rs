use std::f64::consts::TAU;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use specbox::inclusion::DEFAULT_ENUMERATION_CAP;
use specbox::C64;

#[derive(Debug, Parser)]
#[command(
    name = "specbox",
    version,
    about = "Spectral inclusion sets for tridiagonal bi-infinite operators"
)]
pub struct Cli {
    /// Worker threads for grid and oracle sweeps.
    #[arg(long, global = true, env = "SPECBOX_THREADS")]
    pub threads: Option<usize>,

    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate penalty functions over a range of n.
    Penalty(PenaltyArgs),
    /// Evaluate a membership grid.
    Inclusion(InclusionArgs),
    /// Finite-arithmetic approximation of the spectrum.
    SpectrumApprox(SpectrumArgs),
    /// Sampled spectra of periodic operators or symbol alphabets.
    Oracle(OracleArgs),
    /// Hausdorff distance between two CSV point sets.
    Hausdorff(HausdorffArgs),
}

#[derive(Debug, Args)]
pub struct PenaltyArgs {
    /// Section sizes, `a..b` (inclusive) or a single value.
    #[arg(long, value_parser = parse_n_range)]
    pub n: NRange,
    /// Bound on the sub-diagonal.
    #[arg(long)]
    pub r: f64,
    /// Bound on the super-diagonal.
    #[arg(long)]
    pub s: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Tau,
    Pi,
    Tau1,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct FamilyArgs {
    /// Select representative indices from the window `a..b`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<(i64, i64)>,
    /// Enumerate every section over the symbol alphabet.
    #[arg(long)]
    pub enumerate: bool,
    /// File of explicit section indices k.
    #[arg(long)]
    pub k_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Operator file (JSON).
    #[arg(long)]
    pub operator: Option<PathBuf>,
    /// Symbol alphabet file (JSON); defaults to the operator file's `alphabet` entry.
    #[arg(long)]
    pub alphabet: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Maximum number of enumerated sections.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u128,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON summary destination; stderr when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InclusionArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Section size.
    #[arg(long)]
    pub n: usize,
    /// Periodisation parameter t = exp(2πi·turns).
    #[arg(long = "t-turns", alias = "t", default_value_t = 0.0, allow_hyphen_values = true)]
    pub t_turns: f64,
    /// Grid resolution: spacing 1/grid_n. Defaults to n.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Grid radius. Defaults to the operator norm bound.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Threshold override; defaults to the penalty of the method.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Truncation distance added to the threshold for band-dominated operators.
    #[arg(long, default_value_t = 0.0, value_parser = parse_delta, allow_hyphen_values = true)]
    pub bdo_delta: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Section sizes, `a..b` (inclusive) or a single value.
    #[arg(long, value_parser = parse_n_range)]
    pub n: NRange,
    /// Periodisation parameter for the enumerated π pipeline.
    #[arg(long = "t-turns", alias = "t", default_value_t = 0.0, allow_hyphen_values = true)]
    pub t_turns: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_delta, allow_hyphen_values = true)]
    pub bdo_delta: f64,
    /// Oracle samples on the unit circle.
    #[arg(long, default_value_t = specbox::oracle::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Compare against the union of periodic spectra up to this period (alphabets only).
    #[arg(long)]
    pub period_union: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = specbox::oracle::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Union over every alphabet word of period at most this value.
    #[arg(long)]
    pub period_union: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HausdorffArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// Keep only rows with this `n` in files that have an `n` column.
    #[arg(long)]
    pub n: Option<usize>,
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let lo = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let d: f64 = s.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
    if d >= 0.0 && d.is_finite() {
        Ok(d)
    } else {
        Err(format!("delta must be a nonnegative number, got {s}"))
    }
}

/// Inclusive list of section sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NRange(pub Vec<usize>);

fn parse_n_range(s: &str) -> Result<NRange, String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse::<usize>(), b.trim().parse::<usize>()),
        None => (s.trim().parse::<usize>(), s.trim().parse::<usize>()),
    };
    let (lo, hi) = (lo.map_err(|e| e.to_string())?, hi.map_err(|e| e.to_string())?);
    if lo == 0 {
        return Err("n must be at least 1".into());
    }
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(NRange((lo..=hi).collect()))
}

/// `exp(2πi·turns)`, exact at quarter turns.
pub fn turns_to_unit(turns: f64) -> C64 {
    let frac = turns.rem_euclid(1.0);
    let quarters = frac * 4.0;
    if quarters.fract() == 0.0 {
        return match quarters as u8 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, TAU * frac)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_n_range("1..4").unwrap().0, vec![1, 2, 3, 4]);
        assert_eq!(parse_n_range("7").unwrap().0, vec![7]);
        assert!(parse_n_range("0..3").is_err());
        assert!(parse_n_range("5..2").is_err());
        assert_eq!(parse_window("-8..8").unwrap(), (-8, 8));
        assert!(parse_window("3").is_err());
    }

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(turns_to_unit(0.25), C64::new(0.0, 1.0));
        assert_eq!(turns_to_unit(1.0), C64::new(1.0, 0.0));
        assert_eq!(turns_to_unit(-0.25), C64::new(0.0, -1.0));
        assert!((turns_to_unit(0.125).norm() - 1.0).abs() < 1e-15);
    }
}
