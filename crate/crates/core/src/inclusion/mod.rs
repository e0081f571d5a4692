//! Membership tests for the τ, π and τ₁ inclusion sets and the sweeps built on them.
//!
//! For a family of finite sections the three methods use
//!
//! * τ: `min_k s_min(A_{n,k} - λI)`,
//! * π: `min_k s_min(A^{per,t}_{n,k} - λI)`,
//! * τ₁: `min_k min(s_min(A⁺_{n,k} - λI⁺), s_min((A*)⁺_{n,k} - conj(λ)I⁺))`.
//!
//! A [`SectionFamily`] precomputes one shifted Gram matrix per member, so each `λ` costs one
//! banded factorization per member for a threshold decision and a bisection for the value.

mod enumerate;
mod grid;

use thiserror::Error;

use crate::linalg::{CMatrix, LinalgError, ShiftedGram, Tolerances, C64};
use crate::operator::{extract_periodised, extract_rect, extract_square, OperatorError, OperatorSpec};

pub use enumerate::{enumerate_pseudoergodic, EnumerationMethod, SymbolAlphabet, DEFAULT_ENUMERATION_CAP};
pub use grid::{
    bdo_inflate, distance_to, gamma_fin, gamma_fin_inflated, grid_points, hausdorff, members_of, mu_grid, pi_fin,
    pi_fin_inflated, wiener_tail, FinSet, GridSpec, Inflated, MuGrid, PointSet, DEDUP_TOL,
};

/// Added to every membership threshold to absorb rounding in the factorization.
pub const MEMBER_SLACK: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum InclusionError {
    #[error("index family is empty")]
    EmptyFamily,
    #[error("window {lo}..={hi} is empty")]
    EmptyWindow { lo: i64, hi: i64 },
    #[error("enumeration would produce {count} matrices, above the cap {cap}")]
    TooMany { count: u128, cap: u128 },
    #[error("delta must be nonnegative, got {0}")]
    NegativeDelta(f64),
    #[error("point set is empty")]
    EmptySet,
    #[error("invalid grid: n = {n}, radius = {radius}")]
    InvalidGrid { n: usize, radius: f64 },
    #[error("alphabet for {0} is empty")]
    EmptyAlphabet(&'static str),
    #[error("enumerated member has shape {rows}x{cols}, which does not fit method {method:?} at n = {n}")]
    MemberShape {
        rows: usize,
        cols: usize,
        method: InclusionMethod,
        n: usize,
    },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InclusionMethod {
    Tau,
    Pi { t: C64 },
    Tau1,
}

impl InclusionMethod {
    pub fn name(&self) -> &'static str {
        match self {
            InclusionMethod::Tau => "tau",
            InclusionMethod::Pi { .. } => "pi",
            InclusionMethod::Tau1 => "tau1",
        }
    }
}

/// The finite set of sections a method minimises over.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexFamily {
    /// Section origins `k`.
    ExplicitK(Vec<i64>),
    /// Square sections for τ/π given directly; π corners must already be included.
    EnumeratedMatrices(Vec<CMatrix>),
    /// `(A⁺, (A*)⁺)` pairs for τ₁.
    EnumeratedPairs(Vec<(CMatrix, CMatrix)>),
    /// Every `k` in the window, thinned by [`kn_select`] to a `1/n` net.
    WindowScan { lo: i64, hi: i64 },
}

impl IndexFamily {
    pub fn len(&self) -> usize {
        match self {
            IndexFamily::ExplicitK(ks) => ks.len(),
            IndexFamily::EnumeratedMatrices(ms) => ms.len(),
            IndexFamily::EnumeratedPairs(ps) => ps.len(),
            IndexFamily::WindowScan { lo, hi } => (hi - lo + 1).max(0) as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The `1/n` greedy net: `k` is kept unless an earlier representative is within Frobenius
/// distance `1/n` on both `A⁺_{n,·}` and `(A*)⁺_{n,·}`.
pub fn kn_select(op: &OperatorSpec, n: usize, lo: i64, hi: i64) -> Result<IndexFamily, InclusionError> {
    if lo > hi {
        return Err(InclusionError::EmptyWindow { lo, hi });
    }
    let adj = op.adjoint();
    let radius = 1.0 / n as f64;
    let mut reps: Vec<(i64, CMatrix, CMatrix)> = Vec::new();
    for k in lo..=hi {
        let a = extract_rect(op, n, k)?.matrix;
        let b = extract_rect(&adj, n, k)?.matrix;
        let covered = reps
            .iter()
            .any(|(_, ra, rb)| frobenius_distance(ra, &a) <= radius && frobenius_distance(rb, &b) <= radius);
        if !covered {
            reps.push((k, a, b));
        }
    }
    Ok(IndexFamily::ExplicitK(reps.into_iter().map(|(k, _, _)| k).collect()))
}

pub(crate) fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug)]
enum Member {
    Single(ShiftedGram),
    Pair(ShiftedGram, ShiftedGram),
}

/// A resolved family with precomputed shifted Gram matrices.
#[derive(Clone, Debug)]
pub struct SectionFamily {
    method: InclusionMethod,
    n: usize,
    members: Vec<Member>,
    tol: Tolerances,
}

impl SectionFamily {
    pub fn build(
        op: &OperatorSpec,
        method: InclusionMethod,
        n: usize,
        family: &IndexFamily,
    ) -> Result<Self, InclusionError> {
        if n == 0 {
            return Err(OperatorError::ZeroSize.into());
        }
        let ks = match family {
            IndexFamily::ExplicitK(ks) => ks.clone(),
            IndexFamily::WindowScan { lo, hi } => match kn_select(op, n, *lo, *hi)? {
                IndexFamily::ExplicitK(ks) => ks,
                _ => unreachable!("kn_select returns explicit indices"),
            },
            other => return Self::from_enumerated(method, n, other),
        };
        if ks.is_empty() {
            return Err(InclusionError::EmptyFamily);
        }
        let p = op.block_dim;
        let adj = matches!(method, InclusionMethod::Tau1).then(|| op.adjoint());
        let members = ks
            .iter()
            .map(|&k| -> Result<Member, InclusionError> {
                Ok(match method {
                    InclusionMethod::Tau => Member::Single(ShiftedGram::new(&extract_square(op, n, k)?.matrix, 0)?),
                    InclusionMethod::Pi { t } => {
                        Member::Single(ShiftedGram::new(&extract_periodised(op, n, k, t)?.matrix, 0)?)
                    }
                    InclusionMethod::Tau1 => {
                        let adj = adj.as_ref().expect("adjoint built for tau1");
                        Member::Pair(
                            ShiftedGram::new(&extract_rect(op, n, k)?.matrix, p)?,
                            ShiftedGram::new(&extract_rect(adj, n, k)?.matrix, p)?,
                        )
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            method,
            n,
            members,
            tol: Tolerances::default(),
        })
    }

    /// A family made only of supplied matrices.
    pub fn from_enumerated(method: InclusionMethod, n: usize, family: &IndexFamily) -> Result<Self, InclusionError> {
        let shape_err = |m: &CMatrix| InclusionError::MemberShape {
            rows: m.rows(),
            cols: m.cols(),
            method,
            n,
        };
        let members = match (family, method) {
            (IndexFamily::EnumeratedMatrices(ms), InclusionMethod::Tau | InclusionMethod::Pi { .. }) => ms
                .iter()
                .map(|m| {
                    if !m.is_square() || m.cols() % n != 0 {
                        return Err(shape_err(m));
                    }
                    Ok::<_, InclusionError>(Member::Single(ShiftedGram::new(m, 0)?))
                })
                .collect::<Result<Vec<_>, _>>()?,
            (IndexFamily::EnumeratedPairs(ps), InclusionMethod::Tau1) => ps
                .iter()
                .map(|(a, b)| {
                    let offset = |m: &CMatrix| -> Result<usize, InclusionError> {
                        let extra = m.rows().checked_sub(m.cols()).ok_or_else(|| shape_err(m))?;
                        if extra == 0 || extra % 2 != 0 || m.cols() % n != 0 {
                            return Err(shape_err(m));
                        }
                        Ok(extra / 2)
                    };
                    Ok::<_, InclusionError>(Member::Pair(
                        ShiftedGram::new(a, offset(a)?)?,
                        ShiftedGram::new(b, offset(b)?)?,
                    ))
                })
                .collect::<Result<Vec<_>, _>>()?,
            (IndexFamily::EnumeratedMatrices(ms), _) => {
                return Err(ms.first().map_or(InclusionError::EmptyFamily, shape_err))
            }
            (IndexFamily::EnumeratedPairs(ps), _) => {
                return Err(ps.first().map_or(InclusionError::EmptyFamily, |p| shape_err(&p.0)))
            }
            _ => return Err(InclusionError::EmptyFamily),
        };
        if members.is_empty() {
            return Err(InclusionError::EmptyFamily);
        }
        Ok(Self {
            method,
            n,
            members,
            tol: Tolerances::default(),
        })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn method(&self) -> InclusionMethod {
        self.method
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The method's `μ` at `λ`.
    pub fn mu(&self, lambda: C64) -> f64 {
        let mut best = f64::INFINITY;
        for m in &self.members {
            match m {
                Member::Single(g) => best = self.improve(g, lambda, best),
                Member::Pair(a, b) => {
                    best = self.improve(a, lambda, best);
                    best = self.improve(b, lambda.conj(), best);
                }
            }
        }
        best
    }

    fn improve(&self, g: &ShiftedGram, lambda: C64, best: f64) -> f64 {
        // One factorization rules out members that cannot beat the running minimum.
        if best.is_finite() && !g.lower_norm_at_most(lambda, best, &self.tol) {
            return best;
        }
        best.min(g.lower_norm(lambda, &self.tol))
    }

    /// `μ(λ) ≤ eps`, up to [`MEMBER_SLACK`].
    pub fn contains(&self, lambda: C64, eps: f64) -> bool {
        let eps = eps + MEMBER_SLACK;
        self.members.iter().any(|m| match m {
            Member::Single(g) => g.lower_norm_at_most(lambda, eps, &self.tol),
            Member::Pair(a, b) => {
                a.lower_norm_at_most(lambda, eps, &self.tol) || b.lower_norm_at_most(lambda.conj(), eps, &self.tol)
            }
        })
    }
}

pub fn mu_tau(op: &OperatorSpec, n: usize, family: &IndexFamily, lambda: C64) -> Result<f64, InclusionError> {
    Ok(SectionFamily::build(op, InclusionMethod::Tau, n, family)?.mu(lambda))
}

pub fn mu_pi(op: &OperatorSpec, n: usize, family: &IndexFamily, t: C64, lambda: C64) -> Result<f64, InclusionError> {
    Ok(SectionFamily::build(op, InclusionMethod::Pi { t }, n, family)?.mu(lambda))
}

pub fn mu_tau1(op: &OperatorSpec, n: usize, family: &IndexFamily, lambda: C64) -> Result<f64, InclusionError> {
    Ok(SectionFamily::build(op, InclusionMethod::Tau1, n, family)?.mu(lambda))
}

pub fn member(
    op: &OperatorSpec,
    method: InclusionMethod,
    n: usize,
    family: &IndexFamily,
    eps: f64,
    lambda: C64,
) -> Result<bool, InclusionError> {
    Ok(SectionFamily::build(op, method, n, family)?.contains(lambda, eps))
}
