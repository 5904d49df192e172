//! Finite-dimensional real Lie algebras given by structure constants, with
//! optional matrix realizations.
//!
//! Convention: `[x_i, x_j] = Σ_k c_{ij}^k x_k`. For `su(2)` the constants are
//! `c_{ij}^k = ε_{ijk}`. The adjoint matrix has entries
//! `(ad_y)_{kj} = Σ_i y_i c_{ij}^k`, so its `j`-th column is `[y, x_j]`.

mod torus;

pub use torus::{l2_inner_torus, poisson_bracket_torus, TrigPolynomial, FOURIER_MAX};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::convex::DualFunctional;
use crate::error::{check_dims, input, Error, Result};
use crate::linalg::{c, op_norm, unitarity_defect, CMatrix, I};

/// Tolerance on Jacobi and matrix-realization residuals.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgebra", into = "RawAlgebra")]
pub struct LieAlgebraDesc {
    name: String,
    dim: usize,
    /// `c[(i * d + j) * d + k] = c_{ij}^k`.
    c: Vec<f64>,
    basis: Option<Vec<CMatrix>>,
}

#[derive(Serialize, Deserialize)]
struct RawAlgebra {
    #[serde(default)]
    name: String,
    dim: usize,
    c: Vec<Vec<Vec<f64>>>,
    #[serde(default, with = "crate::linalg::serde_cmatrix::opt_vec", skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<CMatrix>>,
}

impl TryFrom<RawAlgebra> for LieAlgebraDesc {
    type Error = Error;
    fn try_from(raw: RawAlgebra) -> Result<Self> {
        let d = raw.dim;
        if raw.c.len() != d || raw.c.iter().any(|r| r.len() != d || r.iter().any(|s| s.len() != d)) {
            return input(format!("structure constants must be {d}×{d}×{d}"));
        }
        let flat = raw.c.into_iter().flatten().flatten().collect();
        LieAlgebraDesc::new(raw.name, d, flat, raw.basis)
    }
}

impl From<LieAlgebraDesc> for RawAlgebra {
    fn from(l: LieAlgebraDesc) -> Self {
        let d = l.dim;
        let c = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| l.constant(i, j, k)).collect()).collect())
            .collect();
        RawAlgebra { name: l.name, dim: d, c, basis: l.basis }
    }
}

impl LieAlgebraDesc {
    /// Validates antisymmetry, the Jacobi identity and, if given, the matrix
    /// realization.
    pub fn new(name: impl Into<String>, dim: usize, c: Vec<f64>, basis: Option<Vec<CMatrix>>) -> Result<Self> {
        if dim == 0 {
            return input("Lie algebra needs dimension >= 1");
        }
        if c.len() != dim * dim * dim {
            return input(format!("expected {} structure constants, got {}", dim * dim * dim, c.len()));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return input("structure constants must be finite");
        }
        let l = Self { name: name.into(), dim, c, basis };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if (l.constant(i, j, k) + l.constant(j, i, k)).abs() > STRUCTURE_TOL {
                        return input(format!("c[{i}][{j}][{k}] is not antisymmetric"));
                    }
                }
            }
        }
        let jac = l.jacobi_residual();
        if jac > STRUCTURE_TOL {
            return input(format!("Jacobi residual {jac:e} exceeds {STRUCTURE_TOL:e}"));
        }
        if let Some(b) = &l.basis {
            if b.len() != dim {
                return input(format!("matrix basis has {} entries, expected {dim}", b.len()));
            }
            let n = b[0].nrows();
            if b.iter().any(|m| m.nrows() != n || m.ncols() != n) {
                return input("matrix basis entries must be square of equal size");
            }
            let res = l.realization_residual().unwrap_or(0.0);
            if res > STRUCTURE_TOL {
                return input(format!("matrix basis violates brackets by {res:e}"));
            }
        }
        Ok(l)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn matrix_basis(&self) -> Option<&[CMatrix]> {
        self.basis.as_deref()
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }

    /// Max over triples of the Jacobi sum in coordinates.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let e = |i: usize| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            v
        };
        let br = |a: &[f64], b: &[f64]| self.bracket_unchecked(a, b);
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let (a, b, cc) = (e(i), e(j), e(k));
                    let t1 = br(&br(&a, &b), &cc);
                    let t2 = br(&br(&b, &cc), &a);
                    let t3 = br(&br(&cc, &a), &b);
                    for m in 0..d {
                        worst = worst.max((t1[m] + t2[m] + t3[m]).abs());
                    }
                }
            }
        }
        worst
    }

    /// `max_{i,j} ‖[X_i, X_j] − Σ_k c_{ij}^k X_k‖`, when a basis is present.
    pub fn realization_residual(&self) -> Option<f64> {
        let b = self.basis.as_ref()?;
        Some(structure_residual(self, b))
    }

    fn bracket_unchecked(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for i in 0..d {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = a[i] * b[j];
                if w == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.constant(i, j, k);
                }
            }
        }
        out
    }

    /// `ad_y` as a real `d×d` matrix.
    pub fn ad(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        check_dims(self.dim, y.len(), "ad")?;
        let d = self.dim;
        Ok(DMatrix::from_fn(d, d, |k, j| (0..d).map(|i| y[i] * self.constant(i, j, k)).sum()))
    }

    /// `Σ y_i X_i` in the matrix realization.
    pub fn matrix_of(&self, y: &[f64]) -> Result<CMatrix> {
        check_dims(self.dim, y.len(), "matrix_of")?;
        let b = self
            .basis
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("{} has no matrix basis", self.name)))?;
        let n = b[0].nrows();
        let mut m = CMatrix::zeros(n, n);
        for (yi, x) in y.iter().zip(b) {
            m += x * c(*yi, 0.0);
        }
        Ok(m)
    }
}

/// Max over basis pairs of `‖[A_i, A_j] − Σ_k c_{ij}^k A_k‖` for any list of
/// matrices indexed like the algebra basis.
pub(crate) fn structure_residual(l: &LieAlgebraDesc, a: &[CMatrix]) -> f64 {
    let d = l.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let mut r = &a[i] * &a[j] - &a[j] * &a[i];
            for (k, ak) in a.iter().enumerate() {
                let ck = l.constant(i, j, k);
                if ck != 0.0 {
                    r -= ak * c(ck, 0.0);
                }
            }
            worst = worst.max(op_norm(&r));
        }
    }
    worst
}

/// `[a, b] = Σ_{i,j} a_i b_j c_{ij}`.
pub fn bracket(a: &[f64], b: &[f64], l: &LieAlgebraDesc) -> Result<Vec<f64>> {
    check_dims(l.dim, a.len(), "bracket lhs")?;
    check_dims(l.dim, b.len(), "bracket rhs")?;
    Ok(l.bracket_unchecked(a, b))
}

/// Tolerance for the agreement of `exp(ad_y)` with matrix conjugation.
pub const CONJUGATION_TOL: f64 = 1e-8;

/// `Ad(exp y) = exp(ad_y)`. With a matrix basis, the result is cross-checked
/// against `g X_j g⁻¹` expanded in the basis.
pub fn adjoint_of_exp(y: &[f64], l: &LieAlgebraDesc) -> Result<DMatrix<f64>> {
    let ad = l.ad(y)?;
    let ad_exp = ad.exp();
    if ad_exp.iter().any(|x| !x.is_finite()) {
        return Err(Error::Computation("exp(ad_y) overflowed".into()));
    }
    if l.basis.is_some() {
        let conj = adjoint_by_conjugation(y, l)?;
        let scale = 1.0 + ad_exp.amax();
        let diff = (&conj - &ad_exp).amax();
        if diff > CONJUGATION_TOL * scale {
            return Err(Error::Computation(format!(
                "conjugation and exp(ad) disagree by {diff:e}"
            )));
        }
    }
    Ok(ad_exp)
}

/// `Ad(exp y)` computed as `g X_j g⁻¹` with each image expanded in the
/// matrix basis by real least squares.
pub fn adjoint_by_conjugation(y: &[f64], l: &LieAlgebraDesc) -> Result<DMatrix<f64>> {
    let g = GroupElement::exp(l, y)?;
    let g_inv = g.inverse()?;
    let basis = l.basis.as_ref().expect("checked by GroupElement::exp");
    let d = l.dim;
    let n = basis[0].nrows();
    // Real design matrix: rows are (re, im) of every entry, columns basis elements.
    let rows = 2 * n * n;
    let design = DMatrix::from_fn(rows, d, |r, j| {
        let z = basis[j][r / 2];
        if r % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.amax();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax).count();
    if rank < d {
        return Err(Error::Computation("matrix basis is numerically dependent".into()));
    }
    let mut out = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        let img = &g.matrix * &basis[j] * &g_inv.matrix;
        let rhs = nalgebra::DVector::from_fn(rows, |r, _| {
            let z = img[r / 2];
            if r % 2 == 0 {
                z.re
            } else {
                z.im
            }
        });
        let coef = svd
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::Computation(format!("least squares failed: {e}")))?;
        let resid = (&design * &coef - &rhs).amax();
        if resid > CONJUGATION_TOL * (1.0 + rhs.amax()) {
            return Err(Error::Computation(format!(
                "g X_{j} g⁻¹ leaves the span of the basis (residual {resid:e})"
            )));
        }
        out.set_column(j, &coef);
    }
    Ok(out)
}

/// `Ad*(g)α = α ∘ Ad(g)⁻¹`; in coordinates `Ad^{-T} α`.
pub fn coadjoint(ad: &DMatrix<f64>, alpha: &DualFunctional) -> Result<DualFunctional> {
    if ad.nrows() != ad.ncols() {
        return input("Ad matrix must be square");
    }
    check_dims(ad.nrows(), alpha.dim(), "coadjoint")?;
    let sv = ad.clone().singular_values();
    let smax = sv.amax();
    if smax == 0.0 || sv.min() <= 1e-14 * smax {
        return input("Ad matrix is singular");
    }
    let inv = ad
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Input("Ad matrix is singular".into()))?;
    let a = nalgebra::DVector::from_column_slice(alpha.coords());
    let out = inv.transpose() * a;
    Ok(DualFunctional::new(out.iter().copied().collect()))
}

/// A group element realized as an invertible matrix, built from products
/// of exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: CMatrix,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n, n) }
    }

    /// `exp(Σ y_i X_i)` in the algebra's matrix realization.
    pub fn exp(l: &LieAlgebraDesc, y: &[f64]) -> Result<Self> {
        Self::exp_matrix(&l.matrix_of(y)?)
    }

    pub fn exp_matrix(x: &CMatrix) -> Result<Self> {
        if x.nrows() != x.ncols() {
            return input("exponent must be square");
        }
        let m = x.clone().exp();
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Computation("matrix exponential overflowed".into()));
        }
        Ok(Self { matrix: m })
    }

    /// Wraps a matrix, rejecting singular ones.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return input("group element must be a nonempty square matrix");
        }
        let g = Self { matrix: m };
        g.inverse()?;
        Ok(g)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        check_dims(self.matrix.nrows(), other.matrix.nrows(), "group product")?;
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let sv = self.matrix.clone().singular_values();
        if sv.min() <= 1e-14 * sv.amax().max(f64::MIN_POSITIVE) {
            return Err(Error::Computation("group element is numerically singular".into()));
        }
        self.matrix
            .clone()
            .try_inverse()
            .map(|matrix| Self { matrix })
            .ok_or_else(|| Error::Computation("group element is not invertible".into()))
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn real_matrix(n: usize, entries: &[(usize, usize, f64)]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for &(r, col, v) in entries {
        m[(r, col)] = c(v, 0.0);
    }
    m
}

/// Builds the constant table from a list of nonzero brackets `[x_i, x_j] = Σ v x_k`.
fn constants_from(d: usize, brackets: &[(usize, usize, usize, f64)]) -> Vec<f64> {
    let mut consts = vec![0.0; d * d * d];
    for &(i, j, k, v) in brackets {
        consts[(i * d + j) * d + k] = v;
        consts[(j * d + i) * d + k] = -v;
    }
    consts
}

/// `su(2)` with `[e_i, e_j] = ε_{ijk} e_k`, realized by `e_k = −(i/2)σ_k`.
pub fn su2() -> LieAlgebraDesc {
    let mut consts = vec![0.0; 27];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                consts[(i * 3 + j) * 3 + k] = levi_civita(i, j, k);
            }
        }
    }
    let half = c(0.0, -0.5);
    let s1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let s2 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), -I, I, c(0.0, 0.0)]);
    let s3 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    let basis = vec![s1 * half, s2 * half, s3 * half];
    LieAlgebraDesc::new("su2", 3, consts, Some(basis)).expect("su(2) tables are valid")
}

/// Heisenberg algebra `(p, q, c)` with `[p, q] = c`, realized by strictly
/// upper triangular `3×3` matrices.
pub fn heisenberg() -> LieAlgebraDesc {
    let consts = constants_from(3, &[(0, 1, 2, 1.0)]);
    let basis = vec![
        real_matrix(3, &[(0, 1, 1.0)]),
        real_matrix(3, &[(1, 2, 1.0)]),
        real_matrix(3, &[(0, 2, 1.0)]),
    ];
    LieAlgebraDesc::new("heisenberg", 3, consts, Some(basis)).expect("heisenberg tables are valid")
}

/// Oscillator algebra `(h, p, q, c)`: `[h, p] = q`, `[h, q] = −p`,
/// `[p, q] = c`, realized in `4×4` real matrices.
pub fn oscillator() -> LieAlgebraDesc {
    let consts = constants_from(4, &[(0, 1, 2, 1.0), (0, 2, 1, -1.0), (1, 2, 3, 1.0)]);
    let basis = vec![
        real_matrix(4, &[(2, 1, 1.0), (1, 2, -1.0)]),
        real_matrix(4, &[(0, 1, 1.0), (2, 3, -0.5)]),
        real_matrix(4, &[(0, 2, 1.0), (1, 3, 0.5)]),
        real_matrix(4, &[(0, 3, 1.0)]),
    ];
    LieAlgebraDesc::new("oscillator", 4, consts, Some(basis)).expect("oscillator tables are valid")
}

/// `R^n` with zero bracket, realized by diagonal matrices.
pub fn abelian(n: usize) -> LieAlgebraDesc {
    let basis = (0..n).map(|i| real_matrix(n, &[(i, i, 1.0)])).collect();
    LieAlgebraDesc::new(format!("abelian{n}"), n, vec![0.0; n * n * n], Some(basis))
        .expect("abelian tables are valid")
}

/// Looks up a shipped algebra by name (`su2`, `heisenberg`, `oscillator`,
/// `abelianN`).
pub fn shipped(name: &str) -> Option<LieAlgebraDesc> {
    match name {
        "su2" => Some(su2()),
        "heisenberg" => Some(heisenberg()),
        "oscillator" => Some(oscillator()),
        _ => name
            .strip_prefix("abelian")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .map(abelian),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn shipped_algebras_are_valid() {
        for l in [su2(), heisenberg(), oscillator(), abelian(3)] {
            assert!(l.jacobi_residual() <= 1e-10, "{}", l.name());
            assert!(l.realization_residual().unwrap() <= 1e-10, "{}", l.name());
        }
        assert_eq!(shipped("abelian5").unwrap().dim(), 5);
        assert!(shipped("abelian0").is_none());
    }

    #[test]
    fn su2_bracket_matches_pauli_commutator() {
        let l = su2();
        assert_eq!(bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &l).unwrap(), vec![0.0, 0.0, 1.0]);
        // independent oracle: commutator of −(i/2)σ matrices
        let b = l.matrix_basis().unwrap();
        let comm = &b[0] * &b[1] - &b[1] * &b[0];
        assert!(op_norm(&(comm - &b[2])) < 1e-15);
    }

    #[test]
    fn bracket_trivial_cases() {
        let l = su2();
        let a = [0.3, -1.2, 2.0];
        assert!(bracket(&a, &a, &l).unwrap().iter().all(|x| x.abs() < 1e-15));
        assert_eq!(bracket(&[1.0, 2.0], &[3.0, 4.0], &abelian(2)).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(bracket(&[1.0], &a, &l), Err(Error::Input(_))));
    }

    #[test]
    fn invalid_tables_rejected() {
        // [x0, x1] = x0 stored without antisymmetric partner
        let mut c = vec![0.0; 8];
        c[2] = 1.0;
        assert!(LieAlgebraDesc::new("bad", 2, c, None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let l = su2();
        let s = serde_json::to_string(&l).unwrap();
        let back: LieAlgebraDesc = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["dim"], 3);
        assert_eq!(v["c"][0][1][2], 1.0);
    }

    #[test]
    fn adjoint_identity_cases() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert!(close(&adjoint_of_exp(&[0.0; 3], &su2()).unwrap(), &id, 1e-15));
        assert!(close(&adjoint_of_exp(&[1.0, -2.0, 5.0], &abelian(3)).unwrap(), &id, 1e-15));
    }

    #[test]
    fn su2_adjoint_is_rotation() {
        for t in [0.3, 1.0, PI / 2.0, 2.5] {
            let ad = adjoint_of_exp(&[0.0, 0.0, t], &su2()).unwrap();
            let (s, co) = t.sin_cos();
            let expected = DMatrix::from_row_slice(3, 3, &[co, -s, 0.0, s, co, 0.0, 0.0, 0.0, 1.0]);
            assert!(close(&ad, &expected, 1e-12), "{ad}");
        }
    }

    #[test]
    fn conjugation_agrees_for_non_compact_algebras() {
        for (l, y) in [(heisenberg(), vec![0.7, -1.1, 0.4]), (oscillator(), vec![0.9, 0.3, -0.5, 2.0])] {
            let a = adjoint_of_exp(&y, &l).unwrap();
            let b = adjoint_by_conjugation(&y, &l).unwrap();
            assert!(close(&a, &b, 1e-10));
        }
    }

    #[test]
    fn coadjoint_examples() {
        let alpha = DualFunctional::new(vec![1.0, 0.0, 0.0]);
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(coadjoint(&id, &alpha).unwrap(), alpha);

        let ad = adjoint_of_exp(&[0.0, 0.0, PI / 2.0], &su2()).unwrap();
        let out = coadjoint(&ad, &alpha).unwrap();
        // Ad is orthogonal here, so Ad^{-T} = Ad and e1 ↦ e2.
        assert!(out.max_abs_diff(&DualFunctional::new(vec![0.0, 1.0, 0.0])) < 1e-12);
        assert!((out.norm() - 1.0).abs() < 1e-12);

        assert!(matches!(coadjoint(&DMatrix::zeros(3, 3), &alpha), Err(Error::Input(_))));
    }

    #[test]
    fn coadjoint_is_a_left_action() {
        let l = heisenberg();
        let a = adjoint_of_exp(&[0.5, 0.2, 0.0], &l).unwrap();
        let b = adjoint_of_exp(&[-0.3, 1.0, 0.7], &l).unwrap();
        let alpha = DualFunctional::new(vec![0.2, -1.0, 3.0]);
        let lhs = coadjoint(&(&a * &b), &alpha).unwrap();
        let rhs = coadjoint(&a, &coadjoint(&b, &alpha).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn group_elements() {
        let g = GroupElement::exp(&su2(), &[0.4, -0.2, 1.3]).unwrap();
        assert!(g.unitarity_defect() < 1e-12);
        let prod = g.mul(&g.inverse().unwrap()).unwrap();
        assert!(op_norm(&(prod.matrix() - CMatrix::identity(2, 2))) < 1e-12);
        assert!(GroupElement::from_matrix(CMatrix::zeros(2, 2)).is_err());
    }
}
