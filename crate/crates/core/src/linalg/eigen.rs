use super::matrix::{CMatrix, C64};
use super::{LinalgError, Tolerances};

/// Largest dimension accepted by [`complex_eigenvalues_small`].
pub const MAX_SMALL_EIG: usize = 16;

const JACOBI_SWEEPS: usize = 100;
const ABERTH_MAX_ITERS: usize = 2000;

/// Eigenvalues of a Hermitian matrix in ascending order, by cyclic complex Jacobi rotations.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    hermitian_eigenvalues_with(h, &Tolerances::default())
}

pub fn hermitian_eigenvalues_with(h: &CMatrix, tol: &Tolerances) -> Result<Vec<f64>, LinalgError> {
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
    let mut a = h.clone();
    for i in 0..n {
        for j in 0..i {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
        a[(i, i)].im = 0.0;
    }
    let total: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let mut converged = n <= 1;
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    if !converged {
        return Err(LinalgError::NonConvergence {
            iterations: JACOBI_SWEEPS,
        });
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// One Jacobi step annihilating `a[p][q]`: a phase change on `q` makes it real, then a real rotation.
fn rotate(a: &mut CMatrix, p: usize, q: usize) {
    let n = a.rows();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    for k in 0..n {
        a[(k, q)] *= phase.conj();
    }
    for k in 0..n {
        a[(q, k)] *= phase;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    for k in 0..n {
        let kp = a[(k, p)];
        let kq = a[(k, q)];
        a[(k, p)] = kp * c - kq * s;
        a[(k, q)] = kp * s + kq * c;
    }
    for k in 0..n {
        let pk = a[(p, k)];
        let qk = a[(q, k)];
        a[(p, k)] = pk * c - qk * s;
        a[(q, k)] = pk * s + qk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// Characteristic polynomial coefficients `c[0] + c[1] x + ... + c[n] x^n` (monic), by Faddeev–LeVerrier.
pub fn characteristic_polynomial(m: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let mut mk = CMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.matmul(&mk)?;
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        let am = m.matmul(&next)?;
        c[n - k] = -am.trace() / k as f64;
        mk = next;
    }
    Ok(c)
}

fn horner(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// `|p(z)| / (sum |c_k| · max(1, |z|)^deg)`, a normwise backward error of a root.
pub fn relative_residual(c: &[C64], z: C64) -> f64 {
    let (p, _) = horner(c, z);
    let deg = c.len().saturating_sub(1) as i32;
    let scale = c.iter().map(|a| a.norm()).sum::<f64>() * z.norm().max(1.0).powi(deg);
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// All roots of a polynomial with nonzero leading coefficient, by Aberth–Ehrlich iteration.
pub fn polynomial_roots(c: &[C64]) -> Result<Vec<C64>, LinalgError> {
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    // Exact zero roots are split off so the iteration never has to approach them.
    let zeros = c.iter().take_while(|a| **a == C64::new(0.0, 0.0)).count().min(deg);
    if zeros > 0 {
        let mut roots = vec![C64::new(0.0, 0.0); zeros];
        roots.extend(polynomial_roots(&c[zeros..])?);
        return Ok(roots);
    }
    let lead = c[deg];
    let c: Vec<C64> = c.iter().map(|&a| a / lead).collect();
    if deg == 1 {
        return Ok(vec![-c[0]]);
    }
    // Initial guesses on a circle of Cauchy-bound radius, offset to avoid symmetric stalls.
    let radius = 1.0 + c[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let r0 = c[..deg]
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm().powf(1.0 / (deg - k) as f64))
        .fold(0.0, f64::max)
        .clamp(1e-3, radius);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4))
        .collect();
    let mut done = vec![false; deg];
    for _ in 0..ABERTH_MAX_ITERS {
        let mut all = true;
        for k in 0..deg {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(&c, z[k]);
            if p == C64::new(0.0, 0.0) {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..deg {
                if j != k {
                    sum += 1.0 / (z[k] - z[j]);
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                let bump = C64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
                z[k] += bump;
                all = false;
                continue;
            }
            z[k] -= w;
            if w.norm() <= 1e-15 * (1.0 + z[k].norm()) {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    let worst = z.iter().map(|&r| relative_residual(&c, r)).fold(0.0, f64::max);
    if worst > 1e-8 {
        return Err(LinalgError::NonConvergence {
            iterations: ABERTH_MAX_ITERS,
        });
    }
    Ok(z)
}

/// Eigenvalues of a small square matrix with multiplicity, sorted by real then imaginary part.
pub fn complex_eigenvalues_small(m: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() > MAX_SMALL_EIG {
        return Err(LinalgError::TooLarge {
            dim: m.rows(),
            max: MAX_SMALL_EIG,
        });
    }
    if m.rows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let c = characteristic_polynomial(m)?;
    let mut roots = polynomial_roots(&c)?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}
