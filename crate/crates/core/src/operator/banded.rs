use std::collections::BTreeSet;

use crate::linalg::CMatrix;

use super::{gcd, lcm, DiagonalGen, OperatorError, OperatorSpec};

/// A band operator `a_{i,i+m}` for `|m| <= width`, each diagonal indexed by its row `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandSpec {
    width: usize,
    block_dim: usize,
    diagonals: Vec<DiagonalGen>,
}

impl BandSpec {
    /// `diagonals[m + w]` holds offset `m`; the list length must be odd.
    pub fn new(diagonals: Vec<DiagonalGen>) -> Result<Self, OperatorError> {
        if diagonals.len() % 2 == 0 {
            return Err(OperatorError::UnsupportedBlocking(format!(
                "expected 2w+1 diagonals, got {}",
                diagonals.len()
            )));
        }
        let width = diagonals.len() / 2;
        let q = diagonals[width]
            .stored_values()
            .first()
            .map(|v| v.rows())
            .ok_or(OperatorError::EmptyGenerator)?;
        for d in &diagonals {
            d.validate(q)?;
        }
        Ok(Self {
            width,
            block_dim: q,
            diagonals,
        })
    }

    /// The band form of a tridiagonal operator.
    pub fn from_tridiagonal(op: &OperatorSpec) -> Self {
        let id = |m: &CMatrix| m.clone();
        Self {
            width: 1,
            block_dim: op.block_dim,
            diagonals: vec![op.alpha.reindexed(-1, id), op.beta.clone(), op.gamma.reindexed(1, id)],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn diagonal(&self, m: i64) -> Option<&DiagonalGen> {
        let idx = m + self.width as i64;
        usize::try_from(idx).ok().and_then(|i| self.diagonals.get(i))
    }

    /// Block `a_{i,j}`; zero outside the band, `None` outside a sampled range.
    pub fn entry(&self, i: i64, j: i64) -> Option<CMatrix> {
        match self.diagonal(j - i) {
            Some(d) => d.value(i).cloned(),
            None => Some(CMatrix::zeros(self.block_dim, self.block_dim)),
        }
    }

    /// Dense matrix on absolute rows and columns `lo..=hi`.
    pub fn dense_window(&self, lo: i64, hi: i64) -> Option<CMatrix> {
        let q = self.block_dim;
        let n = (hi - lo + 1) as usize;
        let mut m = CMatrix::zeros(n * q, n * q);
        for r in 0..n {
            let i = lo + r as i64;
            for c in r.saturating_sub(self.width)..(r + self.width + 1).min(n) {
                m.add_block(r * q, c * q, &self.entry(i, lo + c as i64)?);
            }
        }
        Some(m)
    }

    /// Band-`n` approximation with entries scaled by `(1 - |i-j|/(n+1))^p`.
    pub fn damped(&self, n: usize, p: f64) -> Self {
        let w = self.width.min(n);
        let diagonals = (-(w as i64)..=w as i64)
            .map(|m| {
                let f = (1.0 - m.unsigned_abs() as f64 / (n + 1) as f64).powf(p);
                let z = crate::linalg::C64::new(f, 0.0);
                self.diagonal(m)
                    .expect("offset within band")
                    .reindexed(0, |b| b.scale(z))
            })
            .collect();
        Self {
            width: w,
            block_dim: self.block_dim,
            diagonals,
        }
    }

    fn block(&self, b: usize, bi: i64, bj: i64) -> Option<CMatrix> {
        let q = self.block_dim;
        let mut m = CMatrix::zeros(b * q, b * q);
        let bb = b as i64;
        for r in 0..b {
            for c in 0..b {
                let e = self.entry(bb * bi + r as i64, bb * bj + c as i64)?;
                m.add_block(r * q, c * q, &e);
            }
        }
        Some(m)
    }
}

/// Groups coordinates into blocks of `b` (block `I` holds scalar indices `bI..bI+b-1`), turning a
/// band-`w` operator into a tridiagonal one with `bq×bq` blocks.
pub fn block_reduce(band: &BandSpec, b: usize) -> Result<OperatorSpec, OperatorError> {
    let w = band.width;
    if b < w.max(1) {
        return Err(OperatorError::BandWidthExceeded { b, w });
    }
    let sampled: Vec<(i64, i64)> = band.diagonals.iter().filter_map(DiagonalGen::sampled_range).collect();
    let windows = band.diagonals.iter().any(|d| matches!(d, DiagonalGen::Window { .. }));
    let periods: Vec<usize> = band.diagonals.iter().filter_map(DiagonalGen::period).collect();
    let missing = |i: i64| OperatorError::IndexOutsideRange {
        diagonal: "band",
        index: i,
        lo: 0,
        hi: -1,
    };

    if windows && !sampled.is_empty() {
        return Err(OperatorError::UnsupportedBlocking(
            "window and sampled diagonals cannot be mixed".into(),
        ));
    }

    let (alpha, beta, gamma) = if !sampled.is_empty() {
        let lo = sampled.iter().map(|r| r.0).max().unwrap_or(0);
        let hi = sampled.iter().map(|r| r.1).min().unwrap_or(-1);
        let bb = b as i64;
        let first = lo.div_euclid(bb) + i64::from(lo.rem_euclid(bb) != 0);
        let last = (hi - bb + 1).div_euclid(bb);
        if first > last {
            return Err(OperatorError::UnsupportedBlocking(
                "sampled range shorter than one block".into(),
            ));
        }
        let gen = |range: std::ops::RangeInclusive<i64>, f: &dyn Fn(i64) -> Option<CMatrix>| {
            let start = *range.start();
            let values = range
                .map(|i| f(i).ok_or_else(|| missing(i)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok::<_, OperatorError>(DiagonalGen::Sampled { start, values })
        };
        (
            gen(first - 1..=last - 1, &|i| band.block(b, i + 1, i))?,
            gen(first..=last, &|i| band.block(b, i, i))?,
            gen(first + 1..=last + 1, &|j| band.block(b, j - 1, j))?,
        )
    } else if windows {
        if periods.iter().any(|&p| p > 1) {
            return Err(OperatorError::UnsupportedBlocking(
                "window diagonals combine only with constants".into(),
            ));
        }
        let defaults = BandSpec {
            diagonals: band
                .diagonals
                .iter()
                .map(|d| match d {
                    DiagonalGen::Window { default, .. } => DiagonalGen::Constant(default.clone()),
                    other => other.clone(),
                })
                .collect(),
            ..band.clone()
        };
        let bb = b as i64;
        let rows: BTreeSet<i64> = band
            .diagonals
            .iter()
            .filter_map(|d| match d {
                DiagonalGen::Window { entries, .. } => Some(entries.keys().map(|&k| k.div_euclid(bb))),
                _ => None,
            })
            .flatten()
            .collect();
        let gen = |shift: i64, f: &dyn Fn(&BandSpec, i64) -> Option<CMatrix>| {
            let default = f(&defaults, 0).ok_or_else(|| missing(0))?;
            let entries = rows
                .iter()
                .map(|&r| {
                    let i = r + shift;
                    f(band, i).map(|m| (i, m)).ok_or_else(|| missing(i))
                })
                .collect::<Result<_, _>>()?;
            Ok::<_, OperatorError>(DiagonalGen::Window { entries, default })
        };
        (
            gen(-1, &|s, i| s.block(b, i + 1, i))?,
            gen(0, &|s, i| s.block(b, i, i))?,
            gen(1, &|s, j| s.block(b, j - 1, j))?,
        )
    } else {
        let l = periods.iter().copied().fold(1, lcm);
        let p = (l / gcd(l, b)) as i64;
        let gen = |f: &dyn Fn(i64) -> Option<CMatrix>| {
            let values = (0..p)
                .map(|i| f(i).ok_or_else(|| missing(i)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok::<_, OperatorError>(if values.len() == 1 {
                DiagonalGen::Constant(values.into_iter().next().expect("one value"))
            } else {
                DiagonalGen::Periodic(values)
            })
        };
        (
            gen(&|i| band.block(b, i + 1, i))?,
            gen(&|i| band.block(b, i, i))?,
            gen(&|j| band.block(b, j - 1, j))?,
        )
    };
    OperatorSpec::new(alpha, beta, gamma)
}
