//! Truncation penalties for the τ, π and τ₁ methods.
//!
//! `r` bounds the sub-diagonal and `s` the super-diagonal. The τ penalty at its optimum needs
//! a one-dimensional minimisation over `φ ∈ (0, 1)` of a function defined through the root
//! `θ_n(φ)` of a trigonometric equation; everything else is closed form.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PenaltyError {
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("weights must be finite and nonnegative")]
    InvalidWeights,
    #[error("n must be at least 1")]
    ZeroN,
    #[error("bounds r = {r}, s = {s} must be finite and nonnegative")]
    InvalidBounds { r: f64, s: f64 },
    #[error("mode {mode:?} is not defined for method {method:?}")]
    UnsupportedMode { method: Method, mode: Mode },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Tau,
    Pi,
    Tau1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Optimal,
    CorollaryA,
    CorollaryB,
    RationalBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RationalKind {
    /// `22/(7(n+1))`, dominating the τ₁ penalty.
    Star,
    /// `22/(7n)`, dominating the π penalty.
    Dagger,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyRequest {
    pub method: Method,
    pub n: usize,
    pub r: f64,
    pub s: f64,
    pub mode: Mode,
}

/// A computed penalty and how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyValue {
    pub value: f64,
    pub mode: Mode,
    /// The `φ` used by the τ formulas (numerical minimiser for `Optimal`).
    pub phi: Option<f64>,
    pub theta: Option<f64>,
    /// Set when `r = s = 0`; the value is then 0.
    pub degenerate: bool,
}

impl PenaltyValue {
    fn closed(value: f64, mode: Mode) -> Self {
        Self {
            value,
            mode,
            phi: None,
            theta: None,
            degenerate: false,
        }
    }
}

const THETA_TOL: f64 = 1e-15;
const ROOT_ITERS: usize = 200;
const SCAN_POINTS: usize = 64;
const PHI_EDGE: f64 = 1e-6;
const PHI_TOL: f64 = 1e-12;

/// `F(t) = 2 sin(t/2) cos((n+½)t) + φ(1-φ) sin((n-1)t)`.
pub fn theta_residual(n: usize, phi: f64, t: f64) -> f64 {
    let nf = n as f64;
    2.0 * (t / 2.0).sin() * ((nf + 0.5) * t).cos() + phi * (1.0 - phi) * ((nf - 1.0) * t).sin()
}

/// Bisection for a sign change of `f` on `[lo, hi]` with `f(lo) > 0 >= f(hi)`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..ROOT_ITERS {
        if hi - lo <= THETA_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The root of `F` in `[π/(2n+1), π/(n+2)]`. `phi` is clamped to `[0, 1]`.
pub fn theta_n(n: usize, phi: f64) -> f64 {
    let n = n.max(1);
    let phi = phi.clamp(0.0, 1.0);
    let lo = PI / (2 * n + 1) as f64;
    let hi = PI / (n + 2) as f64;
    if n == 1 || theta_residual(n, phi, lo) <= 0.0 {
        return lo;
    }
    bisect(lo, hi, |t| theta_residual(n, phi, t))
}

/// Root of `2cos((n+1)t/2) - cos((n-1)t/2)` in `(π/(n+3), π/(n+2)]`.
pub fn theta_half(n: usize) -> f64 {
    let nf = n.max(1) as f64;
    let g = |t: f64| 2.0 * ((nf + 1.0) * t / 2.0).cos() - ((nf - 1.0) * t / 2.0).cos();
    let lo = PI / (nf + 3.0);
    let hi = PI / (nf + 2.0);
    if g(hi) >= 0.0 {
        return hi;
    }
    bisect(lo, hi, g)
}

fn check(n: usize, r: f64, s: f64) -> Result<(), PenaltyError> {
    if n == 0 {
        return Err(PenaltyError::ZeroN);
    }
    if !(r.is_finite() && s.is_finite() && r >= 0.0 && s >= 0.0) {
        return Err(PenaltyError::InvalidBounds { r, s });
    }
    Ok(())
}

/// `g(φ) = 2 sqrt(r²/φ + s²/(1-φ)) sin(θ_n(φ)/2)`. The weight is floored at its exact minimum `r + s`.
fn tau_objective(n: usize, r: f64, s: f64, phi: f64) -> f64 {
    let weight = (r * r / phi + s * s / (1.0 - phi)).sqrt().max(r + s);
    2.0 * weight * half_sin(n, theta_n(n, phi))
}

/// `sin(θ/2)` with `θ/2` held inside `[π/(4n+2), π/(2n+4)]` so rounding cannot leave the bracket.
fn half_sin(n: usize, theta: f64) -> f64 {
    let n = n.max(1);
    (theta / 2.0)
        .clamp(PI / (4 * n + 2) as f64, PI / (2 * n + 4) as f64)
        .sin()
}

fn golden_section(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > PHI_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// The τ penalty `ε_n`.
pub fn eps_tau(n: usize, r: f64, s: f64, mode: Mode) -> Result<PenaltyValue, PenaltyError> {
    check(n, r, s)?;
    if r == 0.0 && s == 0.0 {
        return Ok(PenaltyValue {
            value: 0.0,
            mode,
            phi: None,
            theta: None,
            degenerate: true,
        });
    }
    let edge = PI / (4 * n + 2) as f64;
    let out = match mode {
        Mode::Optimal if s == 0.0 || r == 0.0 => {
            let phi = if s == 0.0 { 1.0 } else { 0.0 };
            PenaltyValue {
                value: 2.0 * (r + s) * edge.sin(),
                mode,
                phi: Some(phi),
                theta: Some(2.0 * edge),
                degenerate: false,
            }
        }
        Mode::Optimal => {
            let f = |phi: f64| tau_objective(n, r, s, phi);
            let mut grid: Vec<f64> = (0..SCAN_POINTS)
                .map(|i| PHI_EDGE + (1.0 - 2.0 * PHI_EDGE) * i as f64 / (SCAN_POINTS - 1) as f64)
                .collect();
            // The two corollary choices join the scan so the optimum never exceeds them.
            grid.push(r / (r + s));
            grid.push(0.5);
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let vals: Vec<f64> = grid.iter().map(|&p| f(p)).collect();
            let best = (0..grid.len())
                .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
                .expect("nonempty scan");
            let lo = grid[best.saturating_sub(1)];
            let hi = grid[(best + 1).min(grid.len() - 1)];
            let (x, fx) = golden_section(lo, hi, f);
            let (mut phi, mut value) = if fx <= vals[best] {
                (x, fx)
            } else {
                (grid[best], vals[best])
            };
            let phi_a = r / (r + s);
            let closed_a = 2.0 * (r + s) * half_sin(n, theta_n(n, phi_a));
            if closed_a <= value {
                (phi, value) = (phi_a, closed_a);
            }
            PenaltyValue {
                value,
                mode,
                phi: Some(phi),
                theta: Some(theta_n(n, phi)),
                degenerate: false,
            }
        }
        Mode::CorollaryA => {
            let phi = r / (r + s);
            let theta = theta_n(n, phi);
            PenaltyValue {
                value: 2.0 * (r + s) * half_sin(n, theta),
                mode,
                phi: Some(phi),
                theta: Some(theta),
                degenerate: false,
            }
        }
        Mode::CorollaryB => {
            let theta = theta_half(n);
            PenaltyValue {
                value: 2.0 * 2f64.sqrt() * (r * r + s * s).sqrt() * half_sin(n, theta),
                mode,
                phi: Some(0.5),
                theta: Some(theta),
                degenerate: false,
            }
        }
        Mode::RationalBound => PenaltyValue::closed((r + s) * 22.0 / (7.0 * (n + 2) as f64), mode),
    };
    Ok(out)
}

/// The π penalty `ε'_n = 2(r+s) sin(π/(2n))`.
pub fn eps_pi(n: usize, r: f64, s: f64) -> f64 {
    2.0 * (r + s) * (PI / (2 * n.max(1)) as f64).sin()
}

/// The τ₁ penalty `ε''_n = 2(r+s) sin(π/(2(n+1)))`.
pub fn eps_tau1(n: usize, r: f64, s: f64) -> f64 {
    2.0 * (r + s) * (PI / (2 * (n + 1)) as f64).sin()
}

/// Rational over-bounds of the τ₁ (`Star`) and π (`Dagger`) penalties.
pub fn eps_rational(kind: RationalKind, n: usize, a_max: f64, g_max: f64) -> f64 {
    let denom = match kind {
        RationalKind::Star => 7.0 * (n + 1) as f64,
        RationalKind::Dagger => 7.0 * n.max(1) as f64,
    };
    (a_max + g_max) * 22.0 / denom
}

/// The penalty produced by a weight vector `w_1..w_n` in the method's weighted estimate.
pub fn eps_weighted(method: Method, weights: &[f64], r: f64, s: f64) -> Result<f64, PenaltyError> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(PenaltyError::InvalidWeights);
    }
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    if weights.is_empty() || sum_sq == 0.0 {
        return Err(PenaltyError::AllZeroWeights);
    }
    check(weights.len(), r, s)?;
    let n = weights.len();
    let inner: f64 = weights.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum();
    let (first, last) = (weights[0], weights[n - 1]);
    let value = match method {
        // T⁻ adds (w_0 - w_1)² with w_0 = 0; T⁺ adds (w_{n+1} - w_n)² with w_{n+1} = 0.
        Method::Tau => r * ((first * first + inner) / sum_sq).sqrt() + s * ((inner + last * last) / sum_sq).sqrt(),
        Method::Pi => (r + s) * (((first + last).powi(2) + inner) / sum_sq).sqrt(),
        Method::Tau1 => (r + s) * ((first * first + last * last + inner) / sum_sq).sqrt(),
    };
    Ok(value)
}

/// Dispatches a request to the method's formula.
pub fn penalty(req: &PenaltyRequest) -> Result<PenaltyValue, PenaltyError> {
    check(req.n, req.r, req.s)?;
    let unsupported = Err(PenaltyError::UnsupportedMode {
        method: req.method,
        mode: req.mode,
    });
    let val = match (req.method, req.mode) {
        (Method::Tau, mode) => return eps_tau(req.n, req.r, req.s, mode),
        (Method::Pi, Mode::Optimal) => eps_pi(req.n, req.r, req.s),
        (Method::Pi, Mode::RationalBound) => eps_rational(RationalKind::Dagger, req.n, req.r, req.s),
        (Method::Tau1, Mode::Optimal) => eps_tau1(req.n, req.r, req.s),
        (Method::Tau1, Mode::RationalBound) => eps_rational(RationalKind::Star, req.n, req.r, req.s),
        _ => return unsupported,
    };
    Ok(PenaltyValue::closed(val, req.mode))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyRow {
    pub n: usize,
    pub value: f64,
    pub mode: Mode,
}

/// One method and mode tabulated over several `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyTable {
    pub method: Method,
    pub r: f64,
    pub s: f64,
    pub rows: Vec<PenaltyRow>,
}

impl PenaltyTable {
    pub fn build(method: Method, mode: Mode, ns: &[usize], r: f64, s: f64) -> Result<Self, PenaltyError> {
        let rows = ns
            .iter()
            .map(|&n| {
                penalty(&PenaltyRequest { method, n, r, s, mode }).map(|v| PenaltyRow {
                    n,
                    value: v.value,
                    mode,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { method, r, s, rows })
    }
}
