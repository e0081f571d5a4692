//! Finite symbol alphabets and exhaustive enumeration of the sections they generate.

use serde_json::{json, Value};

use crate::linalg::{CMatrix, C64};
use crate::operator::file::{parse_scalar, scalar_json};
use crate::operator::OperatorError;

use super::{InclusionError, IndexFamily};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

/// Finite value sets for the sub-, main and super-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolAlphabet {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    pub gamma: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnumerationMethod {
    Tau,
    PiWith(C64),
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl SymbolAlphabet {
    pub fn new(alpha: Vec<C64>, beta: Vec<C64>, gamma: Vec<C64>) -> Result<Self, InclusionError> {
        for (name, v) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma)] {
            if v.is_empty() {
                return Err(InclusionError::EmptyAlphabet(name));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// `Σ_α = {±1}`, `Σ_β = {0}`, `Σ_γ = {1}`.
    pub fn feinberg_zee() -> Self {
        let one = C64::new(1.0, 0.0);
        Self {
            alpha: vec![-one, one],
            beta: vec![C64::new(0.0, 0.0)],
            gamma: vec![one],
        }
    }

    pub fn alpha_max(&self) -> f64 {
        max_abs(&self.alpha)
    }

    pub fn beta_max(&self) -> f64 {
        max_abs(&self.beta)
    }

    pub fn gamma_max(&self) -> f64 {
        max_abs(&self.gamma)
    }

    pub fn norm_bound(&self) -> f64 {
        self.alpha_max() + self.beta_max() + self.gamma_max()
    }

    /// Number of matrices [`enumerate_pseudoergodic`] would list, saturating at `u128::MAX`.
    pub fn count(&self, n: usize, method: EnumerationMethod) -> u128 {
        let pow = |base: usize, e: usize| -> u128 {
            (0..e)
                .try_fold(1u128, |acc, _| acc.checked_mul(base as u128))
                .unwrap_or(u128::MAX)
        };
        let sub = n.saturating_sub(1);
        let mut count = pow(self.alpha.len(), sub)
            .saturating_mul(pow(self.beta.len(), n))
            .saturating_mul(pow(self.gamma.len(), sub));
        if matches!(method, EnumerationMethod::PiWith(_)) {
            count = count.saturating_mul((self.alpha.len() * self.gamma.len()) as u128);
        }
        count
    }

    /// `{"alpha": [[re, im], ...], "beta": [...], "gamma": [...]}`.
    pub fn from_json_str(s: &str) -> Result<Self, InclusionError> {
        let v: Value = serde_json::from_str(s).map_err(|e| OperatorError::Parse(e.to_string()))?;
        let list = |key: &str| -> Result<Vec<C64>, InclusionError> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| OperatorError::Parse(format!("alphabet needs an array `{key}`")))?
                .iter()
                .map(|z| parse_scalar(z).map_err(InclusionError::from))
                .collect()
        };
        Self::new(list("alpha")?, list("beta")?, list("gamma")?)
    }

    pub fn to_json_string(&self) -> String {
        let arr = |v: &[C64]| v.iter().map(|&z| scalar_json(z)).collect::<Vec<_>>();
        serde_json::to_string_pretty(&json!({
            "alpha": arr(&self.alpha),
            "beta": arr(&self.beta),
            "gamma": arr(&self.gamma),
        }))
        .expect("JSON values serialize")
    }
}

/// Every `n×n` tridiagonal matrix with entries from the alphabet, in mixed-radix order
/// (sub-diagonal digits first). For `PiWith(t)` each is followed by all corner choices
/// `t·â` at the top right and `conj(t)·ĝ` at the bottom left.
pub fn enumerate_pseudoergodic(
    alphabet: &SymbolAlphabet,
    n: usize,
    method: EnumerationMethod,
    cap: u128,
) -> Result<IndexFamily, InclusionError> {
    if n == 0 {
        return Err(OperatorError::ZeroSize.into());
    }
    let count = alphabet.count(n, method);
    if count > cap {
        return Err(InclusionError::TooMany { count, cap });
    }
    if let EnumerationMethod::PiWith(t) = method {
        let modulus = t.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(OperatorError::NotUnitModulus { modulus }.into());
        }
    }
    let sub = n - 1;
    let mut radices = Vec::with_capacity(3 * n);
    radices.extend(std::iter::repeat(alphabet.alpha.len()).take(sub));
    radices.extend(std::iter::repeat(alphabet.beta.len()).take(n));
    radices.extend(std::iter::repeat(alphabet.gamma.len()).take(sub));
    if matches!(method, EnumerationMethod::PiWith(_)) {
        radices.push(alphabet.alpha.len());
        radices.push(alphabet.gamma.len());
    }
    let mut digits = vec![0usize; radices.len()];
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..sub {
            m[(i + 1, i)] = alphabet.alpha[digits[i]];
            m[(i, i + 1)] = alphabet.gamma[digits[sub + n + i]];
        }
        for i in 0..n {
            m[(i, i)] = alphabet.beta[digits[sub + i]];
        }
        if let EnumerationMethod::PiWith(t) = method {
            let base = sub + n + sub;
            m[(0, n - 1)] += t * alphabet.alpha[digits[base]];
            m[(n - 1, 0)] += t.conj() * alphabet.gamma[digits[base + 1]];
        }
        out.push(m);
        // The last digit varies fastest.
        for (d, &r) in digits.iter_mut().zip(&radices).rev() {
            *d += 1;
            if *d < r {
                break;
            }
            *d = 0;
        }
    }
    Ok(IndexFamily::EnumeratedMatrices(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inclusion::{mu_tau, InclusionMethod, SectionFamily};
    use crate::operator::{extract_periodised, OperatorSpec};
    use std::collections::HashSet;

    fn fz_count(n: usize, method: EnumerationMethod) -> usize {
        enumerate_pseudoergodic(&SymbolAlphabet::feinberg_zee(), n, method, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .len()
    }

    #[test]
    fn feinberg_zee_counts() {
        assert_eq!(fz_count(6, EnumerationMethod::Tau), 32);
        assert_eq!(fz_count(6, EnumerationMethod::PiWith(C64::new(1.0, 0.0))), 64);
        for n in 3..=10 {
            assert_eq!(fz_count(n, EnumerationMethod::Tau), 1 << (n - 1));
            assert_eq!(fz_count(n, EnumerationMethod::PiWith(C64::new(0.0, 1.0))), 1 << n);
        }
    }

    #[test]
    fn enumerated_matrices_are_distinct() {
        let IndexFamily::EnumeratedMatrices(ms) = enumerate_pseudoergodic(
            &SymbolAlphabet::feinberg_zee(),
            5,
            EnumerationMethod::PiWith(C64::new(1.0, 0.0)),
            DEFAULT_ENUMERATION_CAP,
        )
        .unwrap() else {
            unreachable!()
        };
        let keys: HashSet<Vec<(u64, u64)>> = ms
            .iter()
            .map(|m| m.as_slice().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect())
            .collect();
        assert_eq!(keys.len(), ms.len());
    }

    #[test]
    fn singleton_alphabet_gives_one_matrix() {
        let one = C64::new(1.0, 0.0);
        let a = SymbolAlphabet::new(vec![one], vec![C64::new(0.0, 0.0)], vec![C64::new(0.0, 0.0)]).unwrap();
        let fam = enumerate_pseudoergodic(&a, 4, EnumerationMethod::Tau, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(fam.len(), 1);
        let t = C64::from_polar(1.0, 0.3);
        let IndexFamily::EnumeratedMatrices(ms) =
            enumerate_pseudoergodic(&a, 4, EnumerationMethod::PiWith(t), DEFAULT_ENUMERATION_CAP).unwrap()
        else {
            unreachable!()
        };
        assert_eq!(
            ms,
            vec![extract_periodised(&OperatorSpec::shift(), 4, 0, t).unwrap().matrix]
        );
    }

    #[test]
    fn feinberg_zee_n3_has_singular_member() {
        let fam = enumerate_pseudoergodic(
            &SymbolAlphabet::feinberg_zee(),
            3,
            EnumerationMethod::Tau,
            DEFAULT_ENUMERATION_CAP,
        )
        .unwrap();
        assert_eq!(fam.len(), 4);
        let mu = SectionFamily::from_enumerated(InclusionMethod::Tau, 3, &fam)
            .unwrap()
            .mu(C64::new(0.0, 0.0));
        assert!(mu < 1e-9);
        // mu_tau ignores the operator for enumerated families.
        assert_eq!(mu_tau(&OperatorSpec::shift(), 3, &fam, C64::new(0.0, 0.0)).unwrap(), mu);
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_pseudoergodic(
            &SymbolAlphabet::feinberg_zee(),
            34,
            EnumerationMethod::Tau,
            DEFAULT_ENUMERATION_CAP,
        )
        .unwrap_err();
        assert!(matches!(err, InclusionError::TooMany { count, .. } if count == 1u128 << 33));
        assert!(enumerate_pseudoergodic(&SymbolAlphabet::feinberg_zee(), 4, EnumerationMethod::Tau, 7).is_err());
        assert!(enumerate_pseudoergodic(&SymbolAlphabet::feinberg_zee(), 4, EnumerationMethod::Tau, 8).is_ok());
    }

    #[test]
    fn alphabet_json_round_trip() {
        let a = SymbolAlphabet::new(
            vec![C64::new(-1.0, 0.5), C64::new(0.25, 0.0)],
            vec![C64::new(0.0, 0.0)],
            vec![C64::new(1.0, -1.0 / 3.0)],
        )
        .unwrap();
        assert_eq!(SymbolAlphabet::from_json_str(&a.to_json_string()).unwrap(), a);
        assert!(SymbolAlphabet::from_json_str(r#"{"alpha": [], "beta": [0], "gamma": [1]}"#).is_err());
        let fz = SymbolAlphabet::from_json_str(r#"{"alpha": [-1, 1], "beta": [0], "gamma": [1]}"#).unwrap();
        assert_eq!(fz, SymbolAlphabet::feinberg_zee());
    }
}
