//! Tridiagonal bi-infinite operators described by three diagonal generators.
//!
//! Row `i` of the operator acts as `y_i = α_{i-1} x_{i-1} + β_i x_i + γ_{i+1} x_{i+1}`, so
//! `α_j = a_{j+1,j}`, `β_j = a_{j,j}` and `γ_j = a_{j-1,j}`. Entries are complex scalars or dense
//! `p×p` blocks. All generators are queried at absolute integer indices.

mod banded;
pub(crate) mod file;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::{hermitian_eigenvalues, CMatrix, LinalgError, C64};

pub use banded::{block_reduce, BandSpec};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("{diagonal} index {index} outside sampled range {lo}..={hi}")]
    IndexOutsideRange {
        diagonal: &'static str,
        index: i64,
        lo: i64,
        hi: i64,
    },
    #[error("block dimension mismatch: expected {expected}x{expected}, found {rows}x{cols}")]
    BlockDimMismatch { expected: usize, rows: usize, cols: usize },
    #[error("generator has no values")]
    EmptyGenerator,
    #[error("declared period {declared} does not match {len} values")]
    PeriodMismatch { declared: usize, len: usize },
    #[error("declared bound {declared} for {diagonal} is below the entry norm {required}")]
    BoundTooSmall {
        diagonal: &'static str,
        declared: f64,
        required: f64,
    },
    #[error("invalid norm bound {value} for {diagonal}")]
    InvalidBound { diagonal: &'static str, value: f64 },
    #[error("t must have unit modulus, got |t| = {modulus}")]
    NotUnitModulus { modulus: f64 },
    #[error("section size n must be at least 1")]
    ZeroSize,
    #[error("block size b = {b} is smaller than the band width w = {w}")]
    BandWidthExceeded { b: usize, w: usize },
    #[error("unsupported generator mix for blocking: {0}")]
    UnsupportedBlocking(String),
    #[error("operator file: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One diagonal of the operator.
#[derive(Clone, Debug, PartialEq)]
pub enum DiagonalGen {
    Constant(CMatrix),
    /// Value at `j` is `values[j mod p]`.
    Periodic(Vec<CMatrix>),
    /// Finite exceptions over a default.
    Window {
        entries: BTreeMap<i64, CMatrix>,
        default: CMatrix,
    },
    /// Values at `start, start + 1, ...`; any other index is an error.
    Sampled {
        start: i64,
        values: Vec<CMatrix>,
    },
}

impl DiagonalGen {
    pub fn constant(z: C64) -> Self {
        DiagonalGen::Constant(CMatrix::scalar(z))
    }

    pub fn periodic(values: &[C64]) -> Self {
        DiagonalGen::Periodic(values.iter().map(|&z| CMatrix::scalar(z)).collect())
    }

    pub fn sampled(start: i64, values: &[C64]) -> Self {
        DiagonalGen::Sampled {
            start,
            values: values.iter().map(|&z| CMatrix::scalar(z)).collect(),
        }
    }

    pub fn window(entries: &[(i64, C64)], default: C64) -> Self {
        DiagonalGen::Window {
            entries: entries.iter().map(|&(k, z)| (k, CMatrix::scalar(z))).collect(),
            default: CMatrix::scalar(default),
        }
    }

    /// `None` only for indices outside a sampled range.
    pub fn value(&self, j: i64) -> Option<&CMatrix> {
        match self {
            DiagonalGen::Constant(v) => Some(v),
            DiagonalGen::Periodic(vals) => vals.get(j.rem_euclid(vals.len() as i64) as usize),
            DiagonalGen::Window { entries, default } => Some(entries.get(&j).unwrap_or(default)),
            DiagonalGen::Sampled { start, values } => {
                let off = j.checked_sub(*start)?;
                usize::try_from(off).ok().and_then(|o| values.get(o))
            }
        }
    }

    /// Period for constant and periodic generators.
    pub fn period(&self) -> Option<usize> {
        match self {
            DiagonalGen::Constant(_) => Some(1),
            DiagonalGen::Periodic(v) => Some(v.len()),
            _ => None,
        }
    }

    /// Inclusive index range of a sampled generator.
    pub fn sampled_range(&self) -> Option<(i64, i64)> {
        match self {
            DiagonalGen::Sampled { start, values } => Some((*start, *start + values.len() as i64 - 1)),
            _ => None,
        }
    }

    /// Every stored block.
    pub fn stored_values(&self) -> Vec<&CMatrix> {
        match self {
            DiagonalGen::Constant(v) => vec![v],
            DiagonalGen::Periodic(v) | DiagonalGen::Sampled { values: v, .. } => v.iter().collect(),
            DiagonalGen::Window { entries, default } => entries.values().chain(std::iter::once(default)).collect(),
        }
    }

    fn validate(&self, p: usize) -> Result<(), OperatorError> {
        let vals = self.stored_values();
        if vals.is_empty() {
            return Err(OperatorError::EmptyGenerator);
        }
        for v in vals {
            if v.rows() != p || v.cols() != p {
                return Err(OperatorError::BlockDimMismatch {
                    expected: p,
                    rows: v.rows(),
                    cols: v.cols(),
                });
            }
        }
        Ok(())
    }

    fn block_dim(&self) -> Option<usize> {
        self.stored_values().first().map(|v| v.rows())
    }

    /// Largest spectral norm among stored blocks.
    pub fn sup_norm(&self) -> f64 {
        self.stored_values().into_iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// The generator `j ↦ f(self(j + offset))`.
    pub fn reindexed(&self, offset: i64, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        match self {
            DiagonalGen::Constant(v) => DiagonalGen::Constant(f(v)),
            DiagonalGen::Periodic(vals) => {
                let p = vals.len() as i64;
                let vals = (0..p).map(|j| f(&vals[(j + offset).rem_euclid(p) as usize])).collect();
                DiagonalGen::Periodic(vals)
            }
            DiagonalGen::Window { entries, default } => DiagonalGen::Window {
                entries: entries.iter().map(|(&k, v)| (k - offset, f(v))).collect(),
                default: f(default),
            },
            DiagonalGen::Sampled { start, values } => DiagonalGen::Sampled {
                start: start - offset,
                values: values.iter().map(f).collect(),
            },
        }
    }
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.rows() == 1 && m.cols() == 1 {
        return m[(0, 0)].norm();
    }
    let g = m.gram();
    hermitian_eigenvalues(&g)
        .ok()
        .and_then(|ev| ev.last().copied())
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// A tridiagonal bi-infinite operator with declared sup-norm bounds on its diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub alpha: DiagonalGen,
    pub beta: DiagonalGen,
    pub gamma: DiagonalGen,
    pub alpha_max: f64,
    pub beta_max: f64,
    pub gamma_max: f64,
    pub block_dim: usize,
}

/// Relative shortfall of a declared bound below the stored norm that is still accepted as rounding.
const BOUND_SLACK: f64 = 1e-12;

impl OperatorSpec {
    /// Builds an operator with bounds computed from the stored values.
    pub fn new(alpha: DiagonalGen, beta: DiagonalGen, gamma: DiagonalGen) -> Result<Self, OperatorError> {
        Self::with_bounds(alpha, beta, gamma, None, None, None)
    }

    /// Builds an operator with optional declared bounds, which must dominate the stored norms.
    pub fn with_bounds(
        alpha: DiagonalGen,
        beta: DiagonalGen,
        gamma: DiagonalGen,
        alpha_max: Option<f64>,
        beta_max: Option<f64>,
        gamma_max: Option<f64>,
    ) -> Result<Self, OperatorError> {
        let p = beta.block_dim().ok_or(OperatorError::EmptyGenerator)?;
        for g in [&alpha, &beta, &gamma] {
            g.validate(p)?;
        }
        let bound = |name: &'static str, g: &DiagonalGen, declared: Option<f64>| {
            let required = g.sup_norm();
            match declared {
                None => Ok(required),
                Some(d) if !d.is_finite() || d < 0.0 => Err(OperatorError::InvalidBound {
                    diagonal: name,
                    value: d,
                }),
                Some(d) if d < required - BOUND_SLACK * (1.0 + required) => Err(OperatorError::BoundTooSmall {
                    diagonal: name,
                    declared: d,
                    required,
                }),
                Some(d) => Ok(d),
            }
        };
        Ok(Self {
            alpha_max: bound("alpha", &alpha, alpha_max)?,
            beta_max: bound("beta", &beta, beta_max)?,
            gamma_max: bound("gamma", &gamma, gamma_max)?,
            alpha,
            beta,
            gamma,
            block_dim: p,
        })
    }

    /// Forward shift `(Vx)_i = x_{i-1}`.
    pub fn shift() -> Self {
        Self::laurent(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Constant-diagonal scalar operator.
    pub fn laurent(alpha: C64, beta: C64, gamma: C64) -> Self {
        Self::new(
            DiagonalGen::constant(alpha),
            DiagonalGen::constant(beta),
            DiagonalGen::constant(gamma),
        )
        .expect("scalar constants are valid")
    }

    /// Scalar operator with periodic diagonals of independent periods.
    pub fn periodic(alpha: &[C64], beta: &[C64], gamma: &[C64]) -> Result<Self, OperatorError> {
        Self::new(
            DiagonalGen::periodic(alpha),
            DiagonalGen::periodic(beta),
            DiagonalGen::periodic(gamma),
        )
    }

    /// `r(A) = alpha_max + gamma_max`.
    pub fn r(&self) -> f64 {
        self.alpha_max + self.gamma_max
    }

    /// `R = alpha_max + beta_max + gamma_max`, a bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.alpha_max + self.beta_max + self.gamma_max
    }

    /// Common period of constant/periodic diagonals.
    pub fn period(&self) -> Option<usize> {
        let a = self.alpha.period()?;
        let b = self.beta.period()?;
        let g = self.gamma.period()?;
        Some(lcm(lcm(a, b), g))
    }

    fn entry(&self, which: Diag, j: i64) -> Result<&CMatrix, OperatorError> {
        let (name, g) = match which {
            Diag::Alpha => ("alpha", &self.alpha),
            Diag::Beta => ("beta", &self.beta),
            Diag::Gamma => ("gamma", &self.gamma),
        };
        g.value(j).ok_or_else(|| {
            let (lo, hi) = g.sampled_range().unwrap_or((0, -1));
            OperatorError::IndexOutsideRange {
                diagonal: name,
                index: j,
                lo,
                hi,
            }
        })
    }

    pub fn alpha_at(&self, j: i64) -> Result<&CMatrix, OperatorError> {
        self.entry(Diag::Alpha, j)
    }

    pub fn beta_at(&self, j: i64) -> Result<&CMatrix, OperatorError> {
        self.entry(Diag::Beta, j)
    }

    pub fn gamma_at(&self, j: i64) -> Result<&CMatrix, OperatorError> {
        self.entry(Diag::Gamma, j)
    }

    /// `(A*)`: `α'_j = γ_{j+1}^H`, `β'_j = β_j^H`, `γ'_j = α_{j-1}^H`.
    pub fn adjoint(&self) -> Self {
        let ct = |m: &CMatrix| m.conj_transpose();
        Self {
            alpha: self.gamma.reindexed(1, ct),
            beta: self.beta.reindexed(0, ct),
            gamma: self.alpha.reindexed(-1, ct),
            alpha_max: self.gamma_max,
            beta_max: self.beta_max,
            gamma_max: self.alpha_max,
            block_dim: self.block_dim,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, OperatorError> {
        file::parse(s)
    }

    pub fn to_json_string(&self) -> String {
        file::serialize(self)
    }
}

#[derive(Clone, Copy)]
enum Diag {
    Alpha,
    Beta,
    Gamma,
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SectionShape {
    Square { n: usize },
    Periodised { n: usize, t: C64 },
    Rect { n: usize },
}

/// A finite section together with where it was taken from.
#[derive(Clone, Debug, PartialEq)]
pub struct Submatrix {
    pub matrix: CMatrix,
    pub origin_k: i64,
    pub shape: SectionShape,
}

impl Submatrix {
    /// Row at which the `I_n` part of `I^+_n` starts (zero for square shapes).
    pub fn identity_row_offset(&self, block_dim: usize) -> usize {
        match self.shape {
            SectionShape::Rect { .. } => block_dim,
            _ => 0,
        }
    }
}

fn square_into(op: &OperatorSpec, n: usize, k: i64, out: &mut CMatrix, row0: usize) -> Result<(), OperatorError> {
    let p = op.block_dim;
    for i in 0..n {
        let j = k + 1 + i as i64;
        out.add_block(row0 + i * p, i * p, op.beta_at(j)?);
        if i + 1 < n {
            out.add_block(row0 + (i + 1) * p, i * p, op.alpha_at(j)?);
            out.add_block(row0 + i * p, (i + 1) * p, op.gamma_at(j + 1)?);
        }
    }
    Ok(())
}

/// `A_{n,k}`: rows and columns `k+1..k+n`.
pub fn extract_square(op: &OperatorSpec, n: usize, k: i64) -> Result<Submatrix, OperatorError> {
    if n == 0 {
        return Err(OperatorError::ZeroSize);
    }
    let p = op.block_dim;
    let mut m = CMatrix::zeros(n * p, n * p);
    square_into(op, n, k, &mut m, 0)?;
    Ok(Submatrix {
        matrix: m,
        origin_k: k,
        shape: SectionShape::Square { n },
    })
}

/// `A^{per,t}_{n,k}`: `A_{n,k}` plus `t α_k` in the top-right and `conj(t) γ_{k+n+1}` in the
/// bottom-left block. For `n ≤ 2` the corners add onto existing entries.
pub fn extract_periodised(op: &OperatorSpec, n: usize, k: i64, t: C64) -> Result<Submatrix, OperatorError> {
    let modulus = t.norm();
    if (modulus - 1.0).abs() > 1e-12 {
        return Err(OperatorError::NotUnitModulus { modulus });
    }
    let mut s = extract_square(op, n, k)?;
    let p = op.block_dim;
    s.matrix.add_block(0, (n - 1) * p, &op.alpha_at(k)?.scale(t));
    s.matrix
        .add_block((n - 1) * p, 0, &op.gamma_at(k + n as i64 + 1)?.scale(t.conj()));
    s.shape = SectionShape::Periodised { n, t };
    Ok(s)
}

/// `A^+_{n,k}`: the `(n+2)×n` block section with `γ_{k+1}` above and `α_{k+n}` below `A_{n,k}`.
pub fn extract_rect(op: &OperatorSpec, n: usize, k: i64) -> Result<Submatrix, OperatorError> {
    if n == 0 {
        return Err(OperatorError::ZeroSize);
    }
    let p = op.block_dim;
    let mut m = CMatrix::zeros((n + 2) * p, n * p);
    m.add_block(0, 0, op.gamma_at(k + 1)?);
    square_into(op, n, k, &mut m, p)?;
    m.add_block((n + 1) * p, (n - 1) * p, op.alpha_at(k + n as i64)?);
    Ok(Submatrix {
        matrix: m,
        origin_k: k,
        shape: SectionShape::Rect { n },
    })
}

/// `A^+_{n,k} - λ I^+_n`.
pub fn rect_shifted(op: &OperatorSpec, n: usize, k: i64, lambda: C64) -> Result<CMatrix, OperatorError> {
    let r = extract_rect(op, n, k)?;
    Ok(r.matrix.shift_diagonal(lambda, op.block_dim))
}

pub fn adjoint(op: &OperatorSpec) -> OperatorSpec {
    op.adjoint()
}
