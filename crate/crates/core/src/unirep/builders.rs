//! Shipped representations.

use super::UnitaryRep;
use crate::error::{input, Result};
use crate::liealg::{abelian, heisenberg, oscillator, su2, LieAlgebraDesc};
use crate::linalg::{c, diag_real, CMatrix, I};

/// Spin-`j` representation of `su(2)` on `C^{2j+1}`, basis ordered by weight
/// `m = j, j−1, …, −j`.
///
/// The generators are `A_k = i·conj(J_k)` for the standard angular momentum
/// matrices `J_k`; this satisfies `[A_i, A_j] = ε_{ijk} A_k` and gives
/// `A_3 = i·diag(m)`.
pub fn su2_spin(j: f64) -> Result<UnitaryRep> {
    let twice = 2.0 * j;
    if !(j >= 0.0) || (twice - twice.round()).abs() > 1e-12 || twice > 511.0 {
        return input(format!("spin j = {j} must be a half-integer in [0, 255.5]"));
    }
    let n = twice.round() as usize + 1;
    let m = |k: usize| j - k as f64;
    // J_+ |m⟩ = sqrt(j(j+1) − m(m+1)) |m+1⟩; index k−1 carries weight m+1.
    let mut jp = CMatrix::zeros(n, n);
    for k in 1..n {
        let mk = m(k);
        jp[(k - 1, k)] = c((j * (j + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5, 0.0);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    let jz = diag_real(&(0..n).map(m).collect::<Vec<_>>());
    let gens = [jx, jy, jz].iter().map(|jk| jk.map(|z| z.conj()) * I).collect();
    UnitaryRep::new(su2(), gens, false, format!("su2-spin-{j}"))
}

/// Truncated annihilation operator on `span{|0⟩, …, |N−1⟩}`.
fn lowering(n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
    }
    a
}

fn number(n: usize) -> CMatrix {
    diag_real(&(0..n).map(|k| k as f64).collect::<Vec<_>>())
}

/// Position and momentum `Q = (a + a†)/√2`, `P = i(a† − a)/√2`.
fn position_momentum(n: usize) -> (CMatrix, CMatrix) {
    let a = lowering(n);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad) * c(s, 0.0);
    let p = (&ad - &a) * c(0.0, s);
    (q, p)
}

fn check_level(n: usize) -> Result<()> {
    if n < 2 {
        return input("truncation level must be at least 2");
    }
    Ok(())
}

/// Oscillator algebra `(h, p, q, c)` on the first `N` Fock levels:
/// `h ↦ −iN̂`, `p ↦ iP`, `q ↦ iQ`, `c ↦ i·1`.
pub fn oscillator_truncated(n: usize) -> Result<UnitaryRep> {
    check_level(n)?;
    let (q, p) = position_momentum(n);
    let gens = vec![number(n) * (-I), p * I, q * I, CMatrix::identity(n, n) * I];
    UnitaryRep::new(oscillator(), gens, true, format!("oscillator-N{n}"))
}

/// Schrödinger representation of the Heisenberg algebra `(p, q, c)`,
/// truncated to `N` Fock levels: `p ↦ iP`, `q ↦ iQ`, `c ↦ i·1`.
pub fn heisenberg_truncated(n: usize) -> Result<UnitaryRep> {
    check_level(n)?;
    let (q, p) = position_momentum(n);
    let gens = vec![p * I, q * I, CMatrix::identity(n, n) * I];
    UnitaryRep::new(heisenberg(), gens, true, format!("heisenberg-N{n}"))
}

/// Circle rotation `m ↦ e^{−it}m` on Fock space: one generator `−iN̂`, truncated
/// to `N` levels. The truncation is exact for this algebra but still flagged,
/// since it cuts an unbounded operator.
pub fn fock_rotation_truncated(n: usize) -> Result<UnitaryRep> {
    check_level(n)?;
    UnitaryRep::new(abelian(1), vec![number(n) * (-I)], true, format!("fock-rotation-N{n}"))
}

/// Commuting diagonal generators `A_j = i·diag(α_{k,j})` of `R^n`; the
/// momentum image of the `k`-th basis vector is `α_k`.
pub fn diagonal_abelian(weights: &[Vec<f64>]) -> Result<UnitaryRep> {
    let Some(first) = weights.first() else {
        return input("diagonal_abelian needs at least one weight");
    };
    let d = first.len();
    if d == 0 || weights.iter().any(|w| w.len() != d) {
        return input("weights must share a positive dimension");
    }
    let gens = (0..d)
        .map(|j| diag_real(&weights.iter().map(|w| w[j]).collect::<Vec<_>>()) * I)
        .collect();
    UnitaryRep::new(abelian(d), gens, false, format!("diagonal-abelian{d}"))
}

/// Block-diagonal direct sum of representations of the same algebra.
pub fn direct_sum(reps: &[UnitaryRep]) -> Result<UnitaryRep> {
    let Some(first) = reps.first() else {
        return input("direct_sum needs at least one summand");
    };
    if reps.iter().any(|r| r.algebra != first.algebra) {
        return input("direct_sum summands must share the algebra");
    }
    let n: usize = reps.iter().map(UnitaryRep::space_dim).sum();
    let gens = (0..first.dim())
        .map(|i| {
            let mut m = CMatrix::zeros(n, n);
            let mut off = 0;
            for r in reps {
                let k = r.space_dim();
                m.view_mut((off, off), (k, k)).copy_from(&r.generators[i]);
                off += k;
            }
            m
        })
        .collect();
    let label = reps.iter().map(UnitaryRep::label).collect::<Vec<_>>().join("+");
    UnitaryRep::new(first.algebra.clone(), gens, reps.iter().any(|r| r.truncated), label)
}

/// The trivial representation on `C^n`: every generator is zero.
pub fn zero_rep(algebra: LieAlgebraDesc, n: usize) -> Result<UnitaryRep> {
    let gens = vec![CMatrix::zeros(n, n); algebra.dim()];
    UnitaryRep::new(algebra, gens, false, format!("zero-{n}"))
}
