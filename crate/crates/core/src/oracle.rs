//! Reference spectra: closed forms for the shift, symbol sweeps for periodic operators and
//! unions over periodic words of a pseudoergodic alphabet.

use std::f64::consts::PI;

use thiserror::Error;

use crate::exec::Exec;
use crate::inclusion::{PointSet, SymbolAlphabet};
use crate::linalg::{complex_eigenvalues_small, LinalgError, C64, MAX_SMALL_EIG};
use crate::operator::{extract_periodised, OperatorError, OperatorSpec};
use crate::penalty::{eps_pi, eps_tau1};

pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("operator is not periodic (window or sampled diagonals)")]
    NotPeriodic,
    #[error("symbol dimension {dim} exceeds {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("at least 8 samples are needed, got {0}")]
    TooFewSamples(usize),
    #[error("period-union would visit {count} words, above the cap {cap}")]
    TooMany { count: u128, cap: u128 },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Closed-form inclusion sets of the shift `V` (`α = 1`, `β = γ = 0`).
#[derive(Clone, Debug, PartialEq)]
pub enum ShiftRegion {
    /// `{|λ| ≤ radius}`.
    Disc { radius: f64 },
    /// Union of closed discs of one radius.
    DiscUnion { centers: Vec<C64>, radius: f64 },
    /// `{inner ≤ |λ| ≤ outer}`.
    Annulus { inner: f64, outer: f64 },
}

/// Closed regions are tested with this much room so that points on the boundary in exact
/// arithmetic still count after rounding.
pub const BOUNDARY_TOL: f64 = 1e-12;

impl ShiftRegion {
    pub fn contains(&self, z: C64) -> bool {
        let tol = BOUNDARY_TOL;
        match self {
            ShiftRegion::Disc { radius } => z.norm() <= radius + tol,
            ShiftRegion::DiscUnion { centers, radius } => centers.iter().any(|c| (z - c).norm() <= radius + tol),
            ShiftRegion::Annulus { inner, outer } => {
                let r = z.norm();
                inner - tol <= r && r <= outer + tol
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShiftMethod {
    Tau,
    Pi { t: C64 },
    Tau1,
}

/// The principal `n`-th roots of `t` times the `n`-th roots of unity.
pub fn roots_on_circle(n: usize, t: C64) -> Vec<C64> {
    let base = t.arg() / n as f64;
    (0..n)
        .map(|m| C64::from_polar(1.0, base + 2.0 * PI * m as f64 / n as f64))
        .collect()
}

pub fn shift_sets(n: usize, method: ShiftMethod) -> ShiftRegion {
    let n = n.max(1);
    match method {
        ShiftMethod::Tau => ShiftRegion::Disc { radius: 1.0 },
        ShiftMethod::Pi { t } => ShiftRegion::DiscUnion {
            centers: roots_on_circle(n, t),
            radius: eps_pi(n, 1.0, 0.0),
        },
        ShiftMethod::Tau1 if n <= 2 => ShiftRegion::Disc { radius: 1.0 },
        ShiftMethod::Tau1 => ShiftRegion::Annulus {
            inner: 1.0 - eps_tau1(n, 1.0, 0.0).powi(2),
            outer: 1.0,
        },
    }
}

/// `μ_τ₁` of the shift: `sqrt(1 + |λ|² - 2|λ|cos(π/(n+1)))`.
pub fn shift_tau1_mu(n: usize, z: C64) -> f64 {
    let r = z.norm();
    (1.0 + r * r - 2.0 * r * (PI / (n + 1) as f64).cos()).max(0.0).sqrt()
}

/// Eigenvalues of the periodised period-cell section at each `z_m = exp(2πi m/N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSweep {
    pub num_samples: usize,
    pub z: Vec<C64>,
    pub eigenvalues: Vec<Vec<C64>>,
}

impl SymbolSweep {
    pub fn points(&self) -> PointSet {
        PointSet::new(self.eigenvalues.iter().flatten().copied().collect())
    }

    /// Largest distance from an eigenvalue at `z_m` to the nearest one at `z_{m+1}` (cyclic).
    pub fn max_adjacent_gap(&self) -> f64 {
        let m = self.eigenvalues.len();
        (0..m)
            .flat_map(|i| {
                let next = &self.eigenvalues[(i + 1) % m];
                self.eigenvalues[i]
                    .iter()
                    .map(move |a| next.iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min))
            })
            .fold(0.0, f64::max)
    }
}

pub fn unit_samples(num_samples: usize) -> Vec<C64> {
    (0..num_samples)
        .map(|m| C64::from_polar(1.0, 2.0 * PI * m as f64 / num_samples as f64))
        .collect()
}

/// Symbol sweep with the period cell at origin `k`.
pub fn periodic_sweep(op: &OperatorSpec, num_samples: usize, k: i64, exec: Exec) -> Result<SymbolSweep, OracleError> {
    if num_samples < 8 {
        return Err(OracleError::TooFewSamples(num_samples));
    }
    let period = op.period().ok_or(OracleError::NotPeriodic)?;
    let dim = period * op.block_dim;
    if dim > MAX_SMALL_EIG {
        return Err(OracleError::TooLarge {
            dim,
            max: MAX_SMALL_EIG,
        });
    }
    let z = unit_samples(num_samples);
    let eigenvalues = exec
        .map(&z, |&t| -> Result<Vec<C64>, OracleError> {
            let s = extract_periodised(op, period, k, t)?;
            Ok(complex_eigenvalues_small(&s.matrix)?)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SymbolSweep {
        num_samples,
        z,
        eigenvalues,
    })
}

/// Sampled spectrum of a periodic operator as the union over `z ∈ T` of the eigenvalues of its
/// periodised period-cell section.
pub fn periodic_spectrum(op: &OperatorSpec, num_samples: usize, exec: Exec) -> Result<PointSet, OracleError> {
    Ok(periodic_sweep(op, num_samples, 0, exec)?.points())
}

/// Smallest period of a word.
fn minimal_period(word: &[(usize, usize, usize)]) -> usize {
    let p = word.len();
    (1..=p)
        .find(|&d| p % d == 0 && (d..p).all(|i| word[i] == word[i - d]))
        .unwrap_or(p)
}

/// Union of the spectra of all periodic operators whose period-`p` word (`p ≤ max_period`)
/// is drawn from the alphabet. Words are visited once, at their minimal period.
pub fn pseudoergodic_period_union(
    alphabet: &SymbolAlphabet,
    max_period: usize,
    num_samples: usize,
    cap: u128,
    exec: Exec,
) -> Result<PointSet, OracleError> {
    let letters: Vec<(usize, usize, usize)> = (0..alphabet.alpha.len())
        .flat_map(|a| (0..alphabet.beta.len()).flat_map(move |b| (0..alphabet.gamma.len()).map(move |g| (a, b, g))))
        .collect();
    let per_letter = letters.len() as u128;
    let mut total: u128 = 0;
    for p in 1..=max_period {
        total = per_letter
            .checked_pow(p as u32)
            .and_then(|c| total.checked_add(c))
            .unwrap_or(u128::MAX);
    }
    if total > cap {
        return Err(OracleError::TooMany { count: total, cap });
    }
    let mut words: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    for p in 1..=max_period {
        let mut digits = vec![0usize; p];
        for _ in 0..per_letter.pow(p as u32) {
            let word: Vec<_> = digits.iter().map(|&d| letters[d]).collect();
            if minimal_period(&word) == p {
                words.push(word);
            }
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < letters.len() {
                    break;
                }
                *d = 0;
            }
        }
    }
    let spectra = exec
        .map(&words, |word| -> Result<Vec<C64>, OracleError> {
            let a: Vec<C64> = word.iter().map(|w| alphabet.alpha[w.0]).collect();
            let b: Vec<C64> = word.iter().map(|w| alphabet.beta[w.1]).collect();
            let g: Vec<C64> = word.iter().map(|w| alphabet.gamma[w.2]).collect();
            let op = OperatorSpec::periodic(&a, &b, &g)?;
            Ok(periodic_spectrum(&op, num_samples, Exec::Sequential)?.into_vec())
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PointSet::new(spectra.into_iter().flatten().collect()))
}
