//! Lattice grids, point sets, μ sweeps and the finite-arithmetic approximations.

use crate::exec::Exec;
use crate::linalg::C64;
use crate::operator::OperatorSpec;
use crate::penalty::{eps_rational, RationalKind};

use super::enumerate::{enumerate_pseudoergodic, EnumerationMethod, SymbolAlphabet};
use super::{InclusionError, InclusionMethod, IndexFamily, SectionFamily, MEMBER_SLACK};

/// Points closer than this in both coordinates are merged by [`PointSet::new`].
pub const DEDUP_TOL: f64 = 1e-12;

/// `(1/n)(ℤ + iℤ) ∩ R·D` with `D` the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub radius: f64,
}

impl GridSpec {
    pub fn new(n: usize, radius: f64) -> Result<Self, InclusionError> {
        if n == 0 || !(radius.is_finite() && radius > 0.0) {
            return Err(InclusionError::InvalidGrid { n, radius });
        }
        Ok(Self { n, radius })
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }
}

/// A finite set of complex numbers in a fixed order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointSet {
    points: Vec<C64>,
}

impl PointSet {
    /// Keeps the first of any points within [`DEDUP_TOL`] of each other.
    pub fn new(points: Vec<C64>) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].re.total_cmp(&points[b].re).then(a.cmp(&b)));
        let mut drop = vec![false; points.len()];
        for (pos, &i) in order.iter().enumerate() {
            if drop[i] {
                continue;
            }
            for &j in &order[pos + 1..] {
                if points[j].re - points[i].re > DEDUP_TOL {
                    break;
                }
                if (points[j].im - points[i].im).abs() <= DEDUP_TOL {
                    // Keep whichever came first in the input.
                    if j > i {
                        drop[j] = true;
                    } else {
                        drop[i] = true;
                    }
                }
            }
        }
        let points = points
            .into_iter()
            .zip(drop)
            .filter(|(_, d)| !d)
            .map(|(p, _)| p)
            .collect();
        Self { points }
    }

    /// Wraps points known to be distinct.
    pub fn from_distinct(points: Vec<C64>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.points.iter()
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.points
    }

    /// Union preserving the order of `self` then new points of `other`.
    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(self.points.iter().chain(other.points.iter()).copied().collect())
    }
}

/// Lattice points ordered by real index, then imaginary index. The disc test uses integer
/// coordinates, `j² + k² < (nR)²`.
pub fn grid_points(g: &GridSpec) -> PointSet {
    let n = g.n as f64;
    let bound = (n * g.radius).powi(2);
    let m = (n * g.radius).ceil() as i64;
    let mut pts = Vec::new();
    for j in -m..=m {
        for k in -m..=m {
            if ((j * j + k * k) as f64) < bound {
                pts.push(C64::new(j as f64 / n, k as f64 / n));
            }
        }
    }
    PointSet::from_distinct(pts)
}

/// `μ` values over a point set with the threshold used to classify them.
#[derive(Clone, Debug, PartialEq)]
pub struct MuGrid {
    pub points: Vec<C64>,
    pub mu_values: Vec<f64>,
    pub method: InclusionMethod,
    pub n: usize,
    pub threshold: f64,
}

impl MuGrid {
    pub fn is_member(&self, i: usize) -> bool {
        self.mu_values[i] <= self.threshold + MEMBER_SLACK
    }

    pub fn members(&self) -> PointSet {
        PointSet::from_distinct(
            (0..self.points.len())
                .filter(|&i| self.is_member(i))
                .map(|i| self.points[i])
                .collect(),
        )
    }
}

pub fn mu_grid(family: &SectionFamily, points: &PointSet, threshold: f64, exec: Exec) -> MuGrid {
    let mu_values = exec.map(points.points(), |&z| family.mu(z));
    MuGrid {
        points: points.points().to_vec(),
        mu_values,
        method: family.method(),
        n: family.n(),
        threshold,
    }
}

/// Threshold decisions only, one factorization per member and point.
pub fn members_of(family: &SectionFamily, points: &PointSet, threshold: f64, exec: Exec) -> PointSet {
    let keep = exec.map(points.points(), |&z| family.contains(z, threshold));
    PointSet::from_distinct(points.iter().zip(keep).filter(|(_, k)| *k).map(|(z, _)| *z).collect())
}

/// A finite-arithmetic approximation: grid centres, the threshold that selected them and the
/// dilation radius of the covering discs.
#[derive(Clone, Debug, PartialEq)]
pub struct FinSet {
    pub centers: PointSet,
    pub threshold: f64,
    pub radius: f64,
    pub grid: GridSpec,
    pub family_size: usize,
}

/// `Γ^n_fin`: grid points of `Grid(n, ‖A‖ bound)` with `μ_τ₁ ≤ ε*_n + 3/n`.
pub fn gamma_fin(op: &OperatorSpec, n: usize, family: &IndexFamily, exec: Exec) -> Result<FinSet, InclusionError> {
    gamma_fin_inflated(op, n, family, 0.0, exec)
}

/// [`gamma_fin`] with the threshold raised by a truncation distance `delta_n`.
pub fn gamma_fin_inflated(
    op: &OperatorSpec,
    n: usize,
    family: &IndexFamily,
    delta_n: f64,
    exec: Exec,
) -> Result<FinSet, InclusionError> {
    let fam = SectionFamily::build(op, InclusionMethod::Tau1, n, family)?;
    let base = eps_rational(RationalKind::Star, n, op.alpha_max, op.gamma_max) + 3.0 / n as f64;
    let threshold = bdo_inflate(base, delta_n)?.inner;
    let grid = GridSpec::new(n, op.norm_bound())?;
    Ok(FinSet {
        centers: members_of(&fam, &grid_points(&grid), threshold, exec),
        threshold,
        radius: 2.0 / n as f64,
        grid,
        family_size: fam.len(),
    })
}

/// `Π^n_fin` for a pseudoergodic operator: the π family is every alphabet section.
pub fn pi_fin(alphabet: &SymbolAlphabet, n: usize, t: C64, cap: u128, exec: Exec) -> Result<FinSet, InclusionError> {
    pi_fin_inflated(alphabet, n, t, cap, 0.0, exec)
}

pub fn pi_fin_inflated(
    alphabet: &SymbolAlphabet,
    n: usize,
    t: C64,
    cap: u128,
    delta_n: f64,
    exec: Exec,
) -> Result<FinSet, InclusionError> {
    let base = eps_rational(RationalKind::Dagger, n, alphabet.alpha_max(), alphabet.gamma_max()) + 3.0 / n as f64;
    let threshold = bdo_inflate(base, delta_n)?.inner;
    let family = enumerate_pseudoergodic(alphabet, n, EnumerationMethod::PiWith(t), cap)?;
    let fam = SectionFamily::from_enumerated(InclusionMethod::Pi { t }, n, &family)?;
    let grid = GridSpec::new(n, alphabet.norm_bound())?;
    Ok(FinSet {
        centers: members_of(&fam, &grid_points(&grid), threshold, exec),
        threshold,
        radius: 2.0 / n as f64,
        grid,
        family_size: fam.len(),
    })
}

/// Thresholds for a banded operator approximated by its truncation at distance `δ_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inflated {
    pub inner: f64,
    pub outer: f64,
}

pub fn bdo_inflate(eps: f64, delta_n: f64) -> Result<Inflated, InclusionError> {
    if delta_n < 0.0 || delta_n.is_nan() {
        return Err(InclusionError::NegativeDelta(delta_n));
    }
    Ok(Inflated {
        inner: eps + delta_n,
        outer: eps + 2.0 * delta_n,
    })
}

/// `Σ_{n < |k| ≤ cutoff} κ_k`.
pub fn wiener_tail(kappa: impl Fn(i64) -> f64, n: usize, cutoff: usize) -> f64 {
    let n = n as i64;
    ((n + 1)..=cutoff as i64).map(|k| kappa(k) + kappa(-k)).sum()
}

pub fn distance_to(z: C64, set: &PointSet) -> f64 {
    set.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
}

fn directed(a: &PointSet, b: &PointSet, exec: Exec) -> f64 {
    exec.map(a.points(), |&z| distance_to(z, b))
        .into_iter()
        .fold(0.0, f64::max)
}

pub fn hausdorff(a: &PointSet, b: &PointSet, exec: Exec) -> Result<f64, InclusionError> {
    if a.is_empty() || b.is_empty() {
        return Err(InclusionError::EmptySet);
    }
    Ok(directed(a, b, exec).max(directed(b, a, exec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inclusion::SectionFamily;
    use crate::penalty::eps_rational;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn circle(m: usize, r: f64) -> PointSet {
        PointSet::new(
            (0..m)
                .map(|i| C64::from_polar(r, 2.0 * PI * i as f64 / m as f64))
                .collect(),
        )
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid_points(&GridSpec::new(2, 1.1).unwrap()).len(), 13);
        assert_eq!(
            grid_points(&GridSpec::new(1, 0.5).unwrap()).points(),
            &[C64::new(0.0, 0.0)]
        );
        // The open disc excludes the lattice points on the circle.
        assert_eq!(grid_points(&GridSpec::new(1, 1.0).unwrap()).len(), 1);
        let g = grid_points(&GridSpec::new(7, 1.3).unwrap());
        for z in g.iter() {
            assert!(g.iter().any(|w| (*w + *z).norm() < 1e-15));
            assert!(g.iter().any(|w| (*w - z.conj()).norm() < 1e-15));
        }
        assert!(GridSpec::new(0, 1.0).is_err());
        assert!(GridSpec::new(3, -1.0).is_err());
    }

    #[test]
    fn point_set_dedups() {
        let p = PointSet::new(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(1.0 + 1e-13, -1e-13),
            C64::new(0.0, 1.0 + 1e-9),
        ]);
        assert_eq!(
            p.points(),
            &[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 1.0 + 1e-9)]
        );
        let u = p.union(&PointSet::new(vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]));
        assert_eq!(u.len(), 4);
    }

    #[test]
    fn gamma_fin_shift() {
        let v = OperatorSpec::shift();
        let n = 4;
        let fin = gamma_fin(&v, n, &IndexFamily::ExplicitK(vec![0]), Exec::default()).unwrap();
        assert_abs_diff_eq!(fin.threshold, 22.0 / 35.0 + 0.75, epsilon = 1e-15);
        assert_eq!(fin.radius, 0.5);
        let c = (PI / 5.0).cos();
        let expected: Vec<C64> = grid_points(&GridSpec::new(4, 1.0).unwrap())
            .into_vec()
            .into_iter()
            .filter(|z| (1.0 + z.norm_sqr() - 2.0 * z.norm() * c).sqrt() <= fin.threshold)
            .collect();
        assert_eq!(fin.centers.points(), &expected[..]);
    }

    #[test]
    fn gamma_fin_zero_operator() {
        let z = OperatorSpec::laurent(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let n = 5;
        // Grid(n, 0) is not defined; a positive declared bound is needed.
        assert!(matches!(
            gamma_fin(&z, n, &IndexFamily::ExplicitK(vec![0]), Exec::Sequential),
            Err(InclusionError::InvalidGrid { .. })
        ));
        let z =
            OperatorSpec::with_bounds(z.alpha.clone(), z.beta.clone(), z.gamma.clone(), None, Some(2.0), None).unwrap();
        let fin = gamma_fin(&z, n, &IndexFamily::ExplicitK(vec![0]), Exec::Sequential).unwrap();
        let expected: Vec<C64> = grid_points(&GridSpec::new(n, 2.0).unwrap())
            .into_vec()
            .into_iter()
            .filter(|z| z.norm() <= 3.0 / n as f64)
            .collect();
        assert_eq!(fin.centers.points(), &expected[..]);
    }

    #[test]
    fn pi_fin_examples() {
        let n = 4;
        let fin = pi_fin(
            &SymbolAlphabet::feinberg_zee(),
            n,
            C64::new(1.0, 0.0),
            1 << 24,
            Exec::default(),
        )
        .unwrap();
        assert_eq!(fin.family_size, 16);
        for z in grid_points(&fin.grid)
            .iter()
            .filter(|z| z.norm() <= 1.0 - 1.0 / n as f64)
        {
            assert!(fin.centers.points().contains(z), "{z}");
        }
        let c = C64::new(0.5, -0.25);
        let zero = C64::new(0.0, 0.0);
        let diag = SymbolAlphabet::new(vec![zero], vec![c], vec![zero]).unwrap();
        let fin = pi_fin(&diag, n, C64::new(0.0, 1.0), 1 << 24, Exec::default()).unwrap();
        let expected: Vec<C64> = grid_points(&fin.grid)
            .into_vec()
            .into_iter()
            .filter(|z| (z - c).norm() <= 3.0 / n as f64 + MEMBER_SLACK)
            .collect();
        assert_eq!(fin.threshold, eps_rational(RationalKind::Dagger, n, 0.0, 0.0) + 0.75);
        assert_eq!(fin.centers.points(), &expected[..]);
    }

    #[test]
    fn bdo_and_wiener() {
        assert_eq!(bdo_inflate(0.3, 0.0).unwrap(), Inflated { inner: 0.3, outer: 0.3 });
        let b = bdo_inflate(0.1, 0.05).unwrap();
        assert_abs_diff_eq!(b.inner, 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(b.outer, 0.2, epsilon = 1e-15);
        assert!(matches!(bdo_inflate(0.1, -1e-3), Err(InclusionError::NegativeDelta(_))));
        let eta = wiener_tail(|k| 0.5f64.powi(k.abs() as i32), 3, 200);
        assert_abs_diff_eq!(eta, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn inflated_finite_sets() {
        let v = OperatorSpec::shift();
        let ks = IndexFamily::ExplicitK(vec![0]);
        let base = gamma_fin(&v, 8, &ks, Exec::default()).unwrap();
        let wide = gamma_fin_inflated(&v, 8, &ks, 0.05, Exec::default()).unwrap();
        assert_abs_diff_eq!(wide.threshold, base.threshold + 0.05, epsilon = 1e-15);
        assert!(wide.centers.len() > base.centers.len());
        assert!(base.centers.iter().all(|z| wide.centers.points().contains(z)));
        assert!(matches!(
            gamma_fin_inflated(&v, 8, &ks, -0.1, Exec::default()),
            Err(InclusionError::NegativeDelta(_))
        ));
        let fz = SymbolAlphabet::feinberg_zee();
        let one = C64::new(1.0, 0.0);
        let wide = pi_fin_inflated(&fz, 4, one, 1 << 24, 0.1, Exec::default()).unwrap();
        assert_abs_diff_eq!(
            wide.threshold,
            pi_fin(&fz, 4, one, 1 << 24, Exec::default()).unwrap().threshold + 0.1
        );
    }

    #[test]
    fn hausdorff_examples() {
        let t = circle(256, 1.0);
        assert_eq!(hausdorff(&t, &t, Exec::default()).unwrap(), 0.0);
        let origin = PointSet::new(vec![C64::new(0.0, 0.0)]);
        assert_abs_diff_eq!(hausdorff(&origin, &t, Exec::default()).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(
            hausdorff(&origin, &PointSet::default(), Exec::default()),
            Err(InclusionError::EmptySet)
        ));
    }

    #[test]
    fn mu_grid_sequential_equals_parallel() {
        let v = OperatorSpec::shift();
        let fam = SectionFamily::build(&v, InclusionMethod::Tau1, 6, &IndexFamily::ExplicitK(vec![0])).unwrap();
        let pts = grid_points(&GridSpec::new(10, 1.5).unwrap());
        let a = mu_grid(&fam, &pts, 0.3, Exec::Sequential);
        let b = mu_grid(&fam, &pts, 0.3, Exec::Parallel);
        assert_eq!(a, b);
        assert_eq!(a.members(), members_of(&fam, &pts, 0.3, Exec::Sequential));
    }
}
