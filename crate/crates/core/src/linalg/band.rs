//! Banded Hermitian storage and the LDL^H definiteness test.

use super::matrix::{CMatrix, C64};
use super::{LinalgError, Tolerances};

/// Outcome of an LDL^H inertia check on `H - shift I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Definiteness {
    Positive,
    /// Some pivots were within tolerance of zero, none clearly negative.
    Semidefinite,
    Indefinite,
}

impl Definiteness {
    pub fn is_psd(self) -> bool {
        self != Definiteness::Indefinite
    }
}

/// Lower band of a Hermitian matrix; entry `(i, i - d)` lives at `data[i * (bw + 1) + d]`.
#[derive(Clone, Debug)]
pub struct HermitianBand {
    n: usize,
    bw: usize,
    data: Vec<C64>,
}

impl HermitianBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bw = bw.min(n.saturating_sub(1));
        Self {
            n,
            bw,
            data: vec![C64::new(0.0, 0.0); n * (bw + 1)],
        }
    }

    /// Reads the lower band of `h` after checking squareness and Hermitian symmetry.
    pub fn from_matrix(h: &CMatrix, tol: &Tolerances) -> Result<Self, LinalgError> {
        if !h.is_square() {
            return Err(LinalgError::NotSquare {
                rows: h.rows(),
                cols: h.cols(),
            });
        }
        let defect = h.hermitian_defect();
        if defect > tol.hermitian.tolerance {
            return Err(LinalgError::NotHermitian { defect });
        }
        let n = h.rows();
        let bw = lower_bandwidth(h);
        let mut b = Self::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(b.bw)..=i {
                // Average the two triangles so rounding asymmetry cannot leak in.
                let v = if i == j {
                    C64::new(h[(i, i)].re, 0.0)
                } else {
                    (h[(i, j)] + h[(j, i)].conj()) * 0.5
                };
                b.set(i, j, v);
            }
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Entry `(i, j)` for `i >= j` inside the band.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * (self.bw + 1) + (i - j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * (self.bw + 1) + (i - j)] = v;
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re.abs()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    /// Decides the definiteness of `self - shift I` by an unpivoted banded LDL^H.
    ///
    /// Pivots with magnitude at most `pivot_rel * max_diag` count as zero. A zero pivot
    /// whose remaining column is not negligible makes the matrix indefinite.
    pub fn definiteness(&self, shift: f64, pivot_rel: f64) -> Definiteness {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let scale = self.max_diag();
        let tol = pivot_rel * scale;
        let mut l = vec![C64::new(0.0, 0.0); n * w];
        let mut d = vec![0.0f64; n];
        let mut semi = false;
        for j in 0..n {
            let k0 = j.saturating_sub(bw);
            let mut dj = self.get(j, j).re - shift;
            for k in k0..j {
                dj -= l[j * w + (j - k)].norm_sqr() * d[k];
            }
            if dj < -tol {
                return Definiteness::Indefinite;
            }
            let zero = dj <= tol;
            for i in j + 1..n.min(j + bw + 1) {
                let mut v = self.get(i, j);
                for k in i.saturating_sub(bw)..j {
                    v -= l[i * w + (i - k)] * l[j * w + (j - k)].conj() * d[k];
                }
                if zero {
                    if v.norm_sqr() > tol * scale {
                        return Definiteness::Indefinite;
                    }
                } else {
                    l[i * w + (i - j)] = v / dj;
                }
            }
            if zero {
                semi = true;
            } else {
                d[j] = dj;
            }
        }
        if semi {
            Definiteness::Semidefinite
        } else {
            Definiteness::Positive
        }
    }

    /// Square root of the smallest eigenvalue, by bisection on `s` in `[0, upper]`.
    ///
    /// `lo` only advances where `self - s^2 I` is positive definite with no tolerance-zero
    /// pivots, so an eigenvalue inside the pivot tolerance of zero yields 0 rather than
    /// `sqrt(pivot_tol)`. Stops once the bracket is below `sv` both in `s` and in `s^2`.
    pub fn sqrt_min_eigenvalue(&self, upper: f64, tol: &Tolerances) -> f64 {
        let positive = |s: f64| self.definiteness(s * s, tol.pivot_rel) == Definiteness::Positive;
        if !positive(0.0) {
            return 0.0;
        }
        let mut lo = 0.0f64;
        let mut hi = upper.max(0.0);
        if positive(hi) {
            return hi;
        }
        for _ in 0..400 {
            if hi - lo <= tol.sv && (hi - lo) * (hi + lo) <= tol.sv {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if positive(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Largest `i - j` with a nonzero entry below the diagonal.
pub fn lower_bandwidth(m: &CMatrix) -> usize {
    let mut bw = 0;
    for i in 0..m.rows() {
        for j in 0..i.min(m.cols()) {
            if i - j > bw && m[(i, j)] != C64::new(0.0, 0.0) {
                bw = i - j;
                break;
            }
        }
    }
    bw
}

fn upper_bandwidth(m: &CMatrix) -> usize {
    let mut bw = 0;
    for i in 0..m.rows() {
        for j in (i + 1..m.cols()).rev() {
            if m[(i, j)] != C64::new(0.0, 0.0) {
                bw = bw.max(j - i);
                break;
            }
        }
    }
    bw
}

/// The family `G(λ) = (M - λJ)^H (M - λJ)` where `J` places the identity at rows
/// `row_offset..row_offset + cols`, precomputed so that each `λ` costs one banded assembly.
///
/// With `C = J^H M` this is `M^H M - λ C^H - conj(λ) C + |λ|^2 I`.
#[derive(Clone, Debug)]
pub struct ShiftedGram {
    g0: HermitianBand,
    c_low: HermitianBand,
    c_up: HermitianBand,
}

impl ShiftedGram {
    pub fn new(m: &CMatrix, row_offset: usize) -> Result<Self, LinalgError> {
        let n = m.cols();
        if row_offset + n > m.rows() {
            return Err(LinalgError::DimensionMismatch {
                left: (m.rows(), m.cols()),
                right: (row_offset + n, n),
            });
        }
        let c = m.submatrix(row_offset, 0, n, n);
        let g = m.gram();
        let bw = lower_bandwidth(&g).max(lower_bandwidth(&c)).max(upper_bandwidth(&c));
        let mut g0 = HermitianBand::zeros(n, bw);
        let mut c_low = HermitianBand::zeros(n, bw);
        let mut c_up = HermitianBand::zeros(n, bw);
        let bw = g0.bw;
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                g0.set(i, j, g[(i, j)]);
                c_low.set(i, j, c[(i, j)]);
                c_up.set(i, j, c[(j, i)]);
            }
        }
        Ok(Self { g0, c_low, c_up })
    }

    pub fn dim(&self) -> usize {
        self.g0.n
    }

    pub fn at(&self, lambda: C64) -> HermitianBand {
        let n = self.g0.n;
        let bw = self.g0.bw;
        let lc = lambda.conj();
        let l2 = lambda.norm_sqr();
        let mut h = HermitianBand::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let mut v = self.g0.get(i, j) - lambda * self.c_up.get(i, j).conj() - lc * self.c_low.get(i, j);
                if i == j {
                    v = C64::new(v.re + l2, 0.0);
                }
                h.set(i, j, v);
            }
        }
        h
    }

    /// Smallest singular value of `M - λJ`.
    pub fn lower_norm(&self, lambda: C64, tol: &Tolerances) -> f64 {
        let h = self.at(lambda);
        let upper = h.trace().max(0.0).sqrt();
        h.sqrt_min_eigenvalue(upper, tol)
    }

    /// Whether the smallest singular value of `M - λJ` is at most `eps`, via one factorization.
    pub fn lower_norm_at_most(&self, lambda: C64, eps: f64, tol: &Tolerances) -> bool {
        self.at(lambda).definiteness(eps * eps, tol.pivot_rel) != Definiteness::Positive
    }
}
