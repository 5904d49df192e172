//! Dense complex matrix helpers shared by the representation modules.
//!
//! Inner products are linear in the first argument and conjugate-linear in
//! the second: `inner(a, b) = Σ a_k conj(b_k)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `⟨a, b⟩ = Σ a_k conj(b_k)`.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    b.dotc(a)
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

pub fn op_norm_real(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// `‖m + m†‖`, zero exactly when `m` is skew-Hermitian.
pub fn skew_hermitian_defect(m: &CMatrix) -> f64 {
    op_norm(&(m + m.adjoint()))
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    op_norm(&(m - m.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn top_vector(&self) -> CVector {
        self.vectors.column(self.values.len() - 1).into_owned()
    }
}

/// Dense Hermitian eigensolver. The input is symmetrized as `(h + h†)/2`
/// before the decomposition.
pub fn eigh(h: &CMatrix) -> Result<HermitianEigen> {
    let n = h.nrows();
    if n == 0 || h.ncols() != n {
        return Err(Error::Input(format!(
            "eigh needs a non-empty square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Computation("eigh: non-finite matrix entry".into()));
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Computation("eigh: eigensolver did not converge".into()));
    }
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Exponential of a skew-Hermitian matrix through the eigenbasis of the
/// Hermitian matrix `i·a`: with `i·a = V Λ V†`, `exp(a) = V e^{-iΛ} V†`.
pub fn expm_skew_hermitian(a: &CMatrix) -> Result<CMatrix> {
    let h = a * I;
    let eig = eigh(&h)?;
    let phases = CVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&l| Complex64::from_polar(1.0, -l)),
    );
    let v = &eig.vectors;
    Ok(v * CMatrix::from_diagonal(&phases) * v.adjoint())
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diag_real(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| c(x, 0.0)),
    ))
}

/// Unitary defect `‖u†u − I‖`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    op_norm(&(u.adjoint() * u - identity(u.nrows())))
}

/// Minimum eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMatrix) -> Result<f64> {
    Ok(eigh(h)?.min())
}

/// Orthonormal basis (columns) of the null space of a real matrix, with
/// rank decided relative to the largest singular value.
pub fn null_space_real(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Pad to at least `cols` rows so the SVD returns a full right basis.
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::<f64>::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let cutoff = rel_tol * smax.max(f64::MIN_POSITIVE);
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= cutoff || smax == 0.0)
        .collect();
    let mut out = DMatrix::<f64>::zeros(cols, null.len());
    for (j, &k) in null.iter().enumerate() {
        out.set_column(j, &v_t.row(k).transpose());
    }
    out
}

/// Numerical rank of a real matrix.
pub fn rank_real(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().fold(0.0_f64, |a, &s| a.max(s));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Serde adapter storing complex matrices as rows of `[re, im]` pairs.
pub mod serde_cmatrix {
    use super::{c, CMatrix};
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err("ragged complex matrix".into());
        }
        Ok(CMatrix::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&to_rows(m), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::Serialize;

        pub fn serialize<S: Serializer>(ms: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
            ms.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
            let raw = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            raw.iter()
                .map(|rows| from_rows(rows).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod opt_vec {
        use super::*;
        use serde::Serialize;

        pub fn serialize<S: Serializer>(ms: &Option<Vec<CMatrix>>, s: S) -> Result<S::Ok, S::Error> {
            ms.as_ref()
                .map(|v| v.iter().map(to_rows).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<CMatrix>>, D::Error> {
            let raw = Option::<Vec<Vec<Vec<[f64; 2]>>>>::deserialize(d)?;
            raw.map(|v| {
                v.iter()
                    .map(|rows| from_rows(rows).map_err(D::Error::custom))
                    .collect()
            })
            .transpose()
        }
    }
}

/// Serde adapter storing complex vectors as `[re, im]` pairs.
pub mod serde_cvector {
    use super::{c, CVector};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(CVector::from_iterator(raw.len(), raw.iter().map(|p| c(p[0], p[1]))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_ascending() {
        let h = diag_real(&[3.0, -1.0, 2.0]);
        let e = eigh(&h).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        assert!((e.top_vector()[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn expm_of_phase_generator() {
        let a = diag_real(&[1.0, -2.0]) * I;
        let u = expm_skew_hermitian(&a).unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, 1.0)).norm() < 1e-14);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, -2.0)).norm() < 1e-14);
        assert!(unitarity_defect(&u) < 1e-14);
    }

    #[test]
    fn inner_is_linear_in_first_slot() {
        let a = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let b = CVector::from_vec(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let lhs = inner(&(a.clone() * I), &b);
        assert!((lhs - I * inner(&a, &b)).norm() < 1e-15);
        let rhs = inner(&a, &(b.clone() * I));
        assert!((rhs + I * inner(&a, &b)).norm() < 1e-15);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space_real(&m, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-14);
    }
}
