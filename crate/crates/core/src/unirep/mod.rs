//! Finite-dimensional unitary representations given by their derived
//! representation: skew-Hermitian matrices `A_i = dπ(x_i)`.
//!
//! Truncations of infinite-dimensional representations are allowed but
//! flagged; for those the bracket relations are measured, never assumed.

mod builders;

pub use builders::{
    diagonal_abelian, direct_sum, fock_rotation_truncated, heisenberg_truncated,
    oscillator_truncated, su2_spin, zero_rep,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, input, Error, Result};
use crate::liealg::{structure_residual, GroupElement, LieAlgebraDesc};
use crate::linalg::{
    c, eigh, expm_skew_hermitian, null_space_real, op_norm, skew_hermitian_defect, CMatrix, CVector, I,
};

pub const SKEW_TOL: f64 = 1e-10;
pub const HOMOMORPHISM_TOL: f64 = 1e-9;
pub const MAX_REP_DIM: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRep", into = "RawRep")]
pub struct UnitaryRep {
    algebra: LieAlgebraDesc,
    generators: Vec<CMatrix>,
    truncated: bool,
    label: String,
}

#[derive(Serialize, Deserialize)]
struct RawRep {
    label: String,
    algebra: LieAlgebraDesc,
    #[serde(with = "crate::linalg::serde_cmatrix::vec")]
    generators: Vec<CMatrix>,
    #[serde(default)]
    truncated: bool,
}

impl TryFrom<RawRep> for UnitaryRep {
    type Error = Error;
    fn try_from(r: RawRep) -> Result<Self> {
        UnitaryRep::new(r.algebra, r.generators, r.truncated, r.label)
    }
}

impl From<UnitaryRep> for RawRep {
    fn from(r: UnitaryRep) -> Self {
        RawRep { label: r.label, algebra: r.algebra, generators: r.generators, truncated: r.truncated }
    }
}

impl UnitaryRep {
    /// Checks shapes and skew-Hermitian generators; untruncated reps must also
    /// satisfy the bracket relations to [`HOMOMORPHISM_TOL`].
    pub fn new(
        algebra: LieAlgebraDesc,
        generators: Vec<CMatrix>,
        truncated: bool,
        label: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        check_dims(algebra.dim(), generators.len(), "generator count")?;
        let n = generators[0].nrows();
        if n == 0 {
            return input("representation space must have dimension >= 1");
        }
        if n > MAX_REP_DIM {
            return Err(Error::Capability(format!(
                "representation dimension {n} exceeds {MAX_REP_DIM}"
            )));
        }
        for (i, a) in generators.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return input(format!("generator {i} is not {n}×{n}"));
            }
            if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return input(format!("generator {i} has a non-finite entry"));
            }
            let defect = skew_hermitian_defect(a);
            if defect > SKEW_TOL * (1.0 + op_norm(a)) {
                return input(format!("generator {i} is not skew-Hermitian (defect {defect:e})"));
            }
        }
        let rep = Self { algebra, generators, truncated, label };
        if !truncated {
            let r = homomorphism_residual(&rep);
            if r > HOMOMORPHISM_TOL {
                return input(format!("{}: bracket residual {r:e} exceeds {HOMOMORPHISM_TOL:e}", rep.label));
            }
        }
        Ok(rep)
    }

    pub fn algebra(&self) -> &LieAlgebraDesc {
        &self.algebra
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Algebra dimension `d`.
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Dimension `N` of the representation space.
    pub fn space_dim(&self) -> usize {
        self.generators[0].nrows()
    }

    /// `C = Σ_i ‖A_i‖`, so that `‖dπ(x)‖ ≤ C max_i |x_i|`.
    pub fn seminorm_constant(&self) -> f64 {
        self.generators.iter().map(op_norm).sum()
    }
}

/// A nonzero vector standing for the line `[v] = Cv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProjective", into = "RawProjective")]
pub struct ProjectiveVector {
    vec: CVector,
}

#[derive(Serialize, Deserialize)]
struct RawProjective {
    #[serde(with = "crate::linalg::serde_cvector")]
    vec: CVector,
}

impl TryFrom<RawProjective> for ProjectiveVector {
    type Error = Error;
    fn try_from(r: RawProjective) -> Result<Self> {
        ProjectiveVector::new(r.vec)
    }
}

impl From<ProjectiveVector> for RawProjective {
    fn from(p: ProjectiveVector) -> Self {
        RawProjective { vec: p.vec }
    }
}

impl ProjectiveVector {
    pub fn new(vec: CVector) -> Result<Self> {
        if vec.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return input("projective vector has a non-finite entry");
        }
        if vec.is_empty() || vec.norm() == 0.0 {
            return input("projective vector must be nonzero");
        }
        Ok(Self { vec })
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[k] = c(1.0, 0.0);
        Self { vec: v }
    }

    pub fn vec(&self) -> &CVector {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    /// A unit representative.
    pub fn unit(&self) -> CVector {
        self.vec.unscale(self.vec.norm())
    }
}

/// `dπ(x) = Σ x_i A_i`.
pub fn d_pi(rep: &UnitaryRep, x: &[f64]) -> Result<CMatrix> {
    check_dims(rep.dim(), x.len(), "d_pi")?;
    let n = rep.space_dim();
    let mut m = CMatrix::zeros(n, n);
    for (xi, a) in x.iter().zip(&rep.generators) {
        if *xi != 0.0 {
            m += a * c(*xi, 0.0);
        }
    }
    Ok(m)
}

/// `π(exp x) = exp(dπ(x))`, through the eigenbasis of `i·dπ(x)`.
pub fn pi_of_exp(rep: &UnitaryRep, x: &[f64]) -> Result<GroupElement> {
    GroupElement::from_matrix(expm_skew_hermitian(&d_pi(rep, x)?)?)
}

/// `max_{i<j} ‖[A_i, A_j] − Σ_k c_{ij}^k A_k‖`.
pub fn homomorphism_residual(rep: &UnitaryRep) -> f64 {
    structure_residual(&rep.algebra, &rep.generators)
}

/// `λ_max(i·dπ(x))`, which equals the support function of the momentum set.
pub fn spectral_sup(rep: &UnitaryRep, x: &[f64]) -> Result<f64> {
    Ok(eigh(&(d_pi(rep, x)? * I))?.max())
}

/// `λ_max(i·dπ(x))` together with a unit top eigenvector.
pub fn top_eigenpair(rep: &UnitaryRep, x: &[f64]) -> Result<(f64, CVector)> {
    let e = eigh(&(d_pi(rep, x)? * I))?;
    Ok((e.max(), e.top_vector()))
}

/// Orthonormal basis (columns, `d × k`) of `ker dπ = {x : dπ(x) = 0}`,
/// with rank decided at relative tolerance `rel_tol`.
pub fn derived_kernel(rep: &UnitaryRep, rel_tol: f64) -> DMatrix<f64> {
    let n = rep.space_dim();
    let d = rep.dim();
    // Real-linear map x ↦ (Re, Im) of every entry of dπ(x).
    let m = DMatrix::from_fn(2 * n * n, d, |r, j| {
        let z = rep.generators[j][r / 2];
        if r % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    null_space_real(&m, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{abelian, su2};
    use crate::linalg::{identity, unitarity_defect};
    use std::f64::consts::PI;

    #[test]
    fn spin_half_generator() {
        let rep = su2_spin(0.5).unwrap();
        let a3 = d_pi(&rep, &[0.0, 0.0, 1.0]).unwrap();
        let expect = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.5)]);
        assert!(op_norm(&(a3 - expect)) < 1e-15);
        let zero = d_pi(&rep, &[0.0; 3]).unwrap();
        assert_eq!(zero, CMatrix::zeros(2, 2));
    }

    #[test]
    fn d_pi_is_linear() {
        let rep = su2_spin(1.5).unwrap();
        let x = [0.3, -1.0, 2.0];
        let y = [1.1, 0.4, -0.7];
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = d_pi(&rep, &sum).unwrap();
        let rhs = d_pi(&rep, &x).unwrap() + d_pi(&rep, &y).unwrap();
        assert!(op_norm(&(lhs - rhs)) < 1e-12);
        assert!(matches!(d_pi(&rep, &[1.0]), Err(Error::Input(_))));
    }

    #[test]
    fn full_turn_is_minus_identity() {
        let rep = su2_spin(0.5).unwrap();
        let u = pi_of_exp(&rep, &[0.0, 0.0, 2.0 * PI]).unwrap();
        assert!(op_norm(&(u.matrix() + identity(2))) < 1e-12);
        let id = pi_of_exp(&rep, &[0.0; 3]).unwrap();
        assert!(op_norm(&(id.matrix() - identity(2))) < 1e-15);
    }

    #[test]
    fn one_parameter_group_law() {
        let rep = su2_spin(2.0).unwrap();
        let x = [0.4, -0.9, 0.3];
        let (s, t) = (0.7, -1.3);
        let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
        let xt: Vec<f64> = x.iter().map(|v| v * t).collect();
        let xst: Vec<f64> = x.iter().map(|v| v * (s + t)).collect();
        let a = pi_of_exp(&rep, &xs).unwrap();
        let b = pi_of_exp(&rep, &xt).unwrap();
        let ab = pi_of_exp(&rep, &xst).unwrap();
        assert!(op_norm(&(a.matrix() * b.matrix() - ab.matrix())) < 1e-9);
        assert!(unitarity_defect(a.matrix()) < 1e-10);
    }

    #[test]
    fn homomorphism_residuals() {
        for twice_j in 1..=20 {
            let rep = su2_spin(twice_j as f64 / 2.0).unwrap();
            assert!(homomorphism_residual(&rep) <= 1e-10, "j = {}", twice_j as f64 / 2.0);
        }
        let ab = diagonal_abelian(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(homomorphism_residual(&ab), 0.0);
        let osc = oscillator_truncated(16).unwrap();
        assert!(osc.is_truncated());
        assert!(homomorphism_residual(&osc) > 1.0);
    }

    #[test]
    fn spectral_sup_examples() {
        let rep = su2_spin(3.0).unwrap();
        assert!(spectral_sup(&rep, &[0.0; 3]).unwrap().abs() < 1e-15);
        assert!((spectral_sup(&rep, &[0.0, 0.0, 1.0]).unwrap() - 3.0).abs() < 1e-12);
        let x = [0.3, -0.2, 0.9];
        let x5: Vec<f64> = x.iter().map(|v| v * 5.0).collect();
        let a = spectral_sup(&rep, &x).unwrap();
        assert!((spectral_sup(&rep, &x5).unwrap() - 5.0 * a).abs() < 1e-12);
    }

    #[test]
    fn untruncated_rep_must_satisfy_brackets() {
        let g = vec![
            crate::linalg::diag_real(&[1.0, 0.0]) * I,
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]),
            crate::linalg::diag_real(&[1.0, -1.0]) * I,
        ];
        assert!(UnitaryRep::new(su2(), g.clone(), false, "bad").is_err());
        assert!(UnitaryRep::new(su2(), g, true, "bad").is_ok());
        let hermitian = vec![crate::linalg::diag_real(&[1.0])];
        assert!(UnitaryRep::new(abelian(1), hermitian, true, "h").is_err());
    }

    #[test]
    fn derived_kernel_of_block_rep() {
        // Generator pair (i, 0) on C¹: kernel is spanned by e₂.
        let rep = diagonal_abelian(&[vec![1.0, 0.0]]).unwrap();
        let k = derived_kernel(&rep, 1e-9);
        assert_eq!(k.ncols(), 1);
        assert!((k[(1, 0)].abs() - 1.0).abs() < 1e-12);
        assert_eq!(derived_kernel(&su2_spin(1.0).unwrap(), 1e-9).ncols(), 0);
    }

    #[test]
    fn json_round_trip() {
        let rep = su2_spin(1.0).unwrap();
        let s = serde_json::to_string(&rep).unwrap();
        let back: UnitaryRep = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rep);
        let v = ProjectiveVector::new(CVector::from_vec(vec![c(1.0, 2.0), c(0.0, -1.0)])).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"vec":[[1.0,2.0],[0.0,-1.0]]}"#);
        assert!(serde_json::from_str::<ProjectiveVector>(r#"{"vec":[[0.0,0.0]]}"#).is_err());
    }
}
