//! Trigonometric polynomials on `T² = (R/2πZ)²` with the Poisson bracket
//! `{f, g} = ∂_x f ∂_y g − ∂_y f ∂_x g` and the `L²` pairing.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{input, Error, Result};
use crate::linalg::c;

/// Largest admissible frequency per axis.
pub const FOURIER_MAX: i32 = 128;

const REALITY_TOL: f64 = 1e-12;

/// `f(x, y) = Σ a_{m,n} e^{i(mx + ny)}` with finite support.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPolynomial {
    coeffs: BTreeMap<(i32, i32), Complex64>,
}

fn check_freq(m: i32, n: i32) -> Result<()> {
    if m.abs() > FOURIER_MAX || n.abs() > FOURIER_MAX {
        return Err(Error::Capability(format!(
            "frequency ({m}, {n}) exceeds the bound {FOURIER_MAX}"
        )));
    }
    Ok(())
}

impl TrigPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = ((i32, i32), Complex64)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for ((m, n), a) in coeffs {
            check_freq(m, n)?;
            if !a.re.is_finite() || !a.im.is_finite() {
                return input("non-finite Fourier coefficient");
            }
            *out.entry((m, n)).or_insert(c(0.0, 0.0)) += a;
        }
        out.retain(|_, a| *a != c(0.0, 0.0));
        Ok(Self { coeffs: out })
    }

    pub fn constant(a: f64) -> Self {
        Self::from_coeffs([((0, 0), c(a, 0.0))]).expect("zero frequency")
    }

    /// `cos(mx + ny)`.
    pub fn cos(m: i32, n: i32) -> Result<Self> {
        Self::from_coeffs([((m, n), c(0.5, 0.0)), ((-m, -n), c(0.5, 0.0))])
    }

    /// `sin(mx + ny)`.
    pub fn sin(m: i32, n: i32) -> Result<Self> {
        Self::from_coeffs([((m, n), c(0.0, -0.5)), ((-m, -n), c(0.0, 0.5))])
    }

    pub fn coeff(&self, m: i32, n: i32) -> Complex64 {
        self.coeffs.get(&(m, n)).copied().unwrap_or(c(0.0, 0.0))
    }

    pub fn support(&self) -> impl Iterator<Item = &(i32, i32)> {
        self.coeffs.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_{−m,−n} = conj(a_{m,n})` within tolerance.
    pub fn is_real(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(&(m, n), a)| (self.coeff(-m, -n) - a.conj()).norm() <= REALITY_TOL * (1.0 + a.norm()))
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&(m, n), a)| a * Complex64::from_polar(1.0, m as f64 * x + n as f64 * y))
            .sum()
    }

    /// `f ∘ τ` with `τ(x, y) = (x + s, y + t)`.
    pub fn translate(&self, s: f64, t: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&(m, n), a)| ((m, n), a * Complex64::from_polar(1.0, m as f64 * s + n as f64 * t)))
            .collect();
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.coeffs.clone();
        for (k, b) in &other.coeffs {
            *out.entry(*k).or_insert(c(0.0, 0.0)) += b;
        }
        out.retain(|_, a| *a != c(0.0, 0.0));
        Self { coeffs: out }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out: BTreeMap<_, _> = self.coeffs.iter().map(|(k, a)| (*k, a * s)).collect();
        out.retain(|_, a| *a != c(0.0, 0.0));
        Self { coeffs: out }
    }

    /// `‖f‖₂ = (f, f)^{1/2}`.
    pub fn l2_norm(&self) -> Result<f64> {
        Ok(l2_inner_torus(self, self)?.max(0.0).sqrt())
    }
}

/// Exact coefficient form of the bracket. The `e^{i(k₁+k₂)·z}` coefficient
/// collects `−(m₁n₂ − n₁m₂) a_{k₁} b_{k₂}`. Each unordered frequency pair is
/// combined before summation, which makes antisymmetry and `{f, f} = 0`
/// hold bit for bit.
pub fn poisson_bracket_torus(f: &TrigPolynomial, g: &TrigPolynomial) -> Result<TrigPolynomial> {
    let keys: Vec<(i32, i32)> = {
        let mut k: Vec<_> = f.coeffs.keys().chain(g.coeffs.keys()).copied().collect();
        k.sort_unstable();
        k.dedup();
        k
    };
    let mut out: BTreeMap<(i32, i32), Complex64> = BTreeMap::new();
    for (idx, &k1) in keys.iter().enumerate() {
        for &k2 in &keys[idx + 1..] {
            let det = (k1.0 as i64 * k2.1 as i64 - k1.1 as i64 * k2.0 as i64) as f64;
            if det == 0.0 {
                continue;
            }
            let cross = f.coeff(k1.0, k1.1) * g.coeff(k2.0, k2.1) - f.coeff(k2.0, k2.1) * g.coeff(k1.0, k1.1);
            if cross == c(0.0, 0.0) {
                continue;
            }
            let key = (k1.0 + k2.0, k1.1 + k2.1);
            check_freq(key.0, key.1)?;
            *out.entry(key).or_insert(c(0.0, 0.0)) += cross * (-det);
        }
    }
    out.retain(|_, a| *a != c(0.0, 0.0));
    Ok(TrigPolynomial { coeffs: out })
}

/// `(f, g) = ∫_{T²} f g dx dy = (2π)² Σ a_{m,n} conj(b_{m,n})` for real `f`, `g`.
pub fn l2_inner_torus(f: &TrigPolynomial, g: &TrigPolynomial) -> Result<f64> {
    if !f.is_real() || !g.is_real() {
        return input("l2_inner_torus needs real-valued trigonometric polynomials");
    }
    let s: Complex64 = f
        .coeffs
        .iter()
        .map(|(&(m, n), a)| a * g.coeff(m, n).conj())
        .sum();
    Ok(4.0 * std::f64::consts::PI * std::f64::consts::PI * s.re)
}
