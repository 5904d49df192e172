//! Momentum map `Φ_π([v])(x) = ⟨dπ(x)v, v⟩ / (i⟨v, v⟩)` and estimates of the
//! momentum set `I_π`, the closed convex hull of its image.
//!
//! The support function of `I_π` is `s(x) = λ_max(i·dπ(x))`. Estimates pair
//! an inner hull of sampled momentum values with these exact outer values.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::convex::{
    dual_cone, semi_equicontinuity_certificate, support_function, ConvexSetV, DualFunctional, Tolerances,
    Vector,
};
use crate::error::{check_dims, input, Error, Result};
use crate::liealg::{adjoint_of_exp, coadjoint};
use crate::linalg::{null_space_real, CVector};
use crate::sampling::{projective_sample, stream_rng};
use crate::unirep::{d_pi, pi_of_exp, spectral_sup, top_eigenpair, ProjectiveVector, UnitaryRep};

/// `Φ_j = ⟨A_j v, v⟩ / (i‖v‖²) = Im(v†A_j v) / ‖v‖²`.
pub fn momentum_map(rep: &UnitaryRep, v: &ProjectiveVector) -> Result<DualFunctional> {
    check_dims(rep.space_dim(), v.dim(), "momentum_map")?;
    Ok(momentum_of_vec(rep, v.vec()))
}

fn momentum_of_vec(rep: &UnitaryRep, v: &CVector) -> DualFunctional {
    let norm2 = v.norm_squared();
    DualFunctional::new(rep.generators().iter().map(|a| v.dotc(&(a * v)).im / norm2).collect())
}

/// One row of a support table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportRow {
    pub direction: Vector,
    /// Support value of the inner hull.
    pub inner: f64,
    /// `λ_max(i·dπ(x))`.
    pub outer: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuterValue {
    pub direction: Vector,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumSetEstimate {
    pub inner: ConvexSetV,
    pub outer_support: Vec<OuterValue>,
    /// `max_x (outer(x) − inner(x))` over the stored directions.
    pub gap: f64,
}

impl MomentumSetEstimate {
    /// Assembles an estimate from an inner hull and outer values, computing
    /// the gap.
    pub fn from_parts(inner: ConvexSetV, outer_support: Vec<OuterValue>) -> Result<Self> {
        if outer_support.is_empty() {
            return input("estimate needs at least one direction");
        }
        let mut gap = f64::NEG_INFINITY;
        for o in &outer_support {
            let s = support_function(&inner, &o.direction)?
                .finite()
                .ok_or_else(|| Error::Computation("inner hull unbounded on a probe direction".into()))?;
            gap = gap.max(o.value - s);
        }
        Ok(Self { inner, outer_support, gap })
    }

    pub fn directions(&self) -> Vec<Vector> {
        self.outer_support.iter().map(|o| o.direction.clone()).collect()
    }

    /// Direction, inner value, outer value and gap per stored direction.
    pub fn support_table(&self) -> Result<Vec<SupportRow>> {
        self.outer_support
            .iter()
            .map(|o| {
                let inner = support_function(&self.inner, &o.direction)?
                    .finite()
                    .ok_or_else(|| Error::Computation("inner hull unbounded on a probe direction".into()))?;
                Ok(SupportRow { direction: o.direction.clone(), inner, outer: o.value, gap: o.value - inner })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    pub n_samples: usize,
    pub seed: u64,
    /// Add the top eigenvector of `i·dπ(x)` for every direction `x`.
    pub inject_eigenvectors: bool,
}

impl EstimateOptions {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self { n_samples, seed, inject_eigenvectors: true }
    }
}

/// Inner hull from `n_samples` projective samples plus injected top
/// eigenvectors; outer values from `spectral_sup`. Deterministic in `seed`
/// regardless of thread count.
pub fn momentum_set_estimate(
    rep: &UnitaryRep,
    n_samples: usize,
    directions: &[Vector],
    seed: u64,
) -> Result<MomentumSetEstimate> {
    momentum_set_estimate_with(rep, directions, &EstimateOptions::new(n_samples, seed))
}

pub fn momentum_set_estimate_with(
    rep: &UnitaryRep,
    directions: &[Vector],
    opts: &EstimateOptions,
) -> Result<MomentumSetEstimate> {
    if opts.n_samples == 0 {
        return input("n_samples must be at least 1");
    }
    if directions.is_empty() {
        return input("momentum_set_estimate needs at least one direction");
    }
    for v in directions {
        check_dims(rep.dim(), v.dim(), "estimate direction")?;
    }
    let n = rep.space_dim();
    let mut points: Vec<DualFunctional> = (0..opts.n_samples)
        .into_par_iter()
        .map(|i| {
            let v = projective_sample(&mut stream_rng(opts.seed, i as u64), n);
            momentum_of_vec(rep, &v)
        })
        .collect();

    let eig: Vec<(f64, CVector)> = directions
        .par_iter()
        .map(|x| top_eigenpair(rep, x.coords()))
        .collect::<Result<_>>()?;
    if opts.inject_eigenvectors {
        points.extend(eig.iter().map(|(_, u)| momentum_of_vec(rep, u)));
    }
    let outer = directions
        .iter()
        .zip(&eig)
        .map(|(x, (lam, _))| OuterValue { direction: x.clone(), value: *lam })
        .collect();
    MomentumSetEstimate::from_parts(ConvexSetV::new(points, Vec::new())?, outer)
}

/// Orthonormal basis (columns) of `{x : ⟨α, x⟩ = 0 for all generators α of X}`.
pub fn annihilator(x: &ConvexSetV, rel_tol: f64) -> DMatrix<f64> {
    let gens: Vec<&DualFunctional> = x.points().iter().chain(x.rays()).collect();
    let d = x.dim();
    let m = DMatrix::from_fn(gens.len(), d, |i, j| gens[i][j]);
    null_space_real(&m, rel_tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceResidual {
    pub residual: f64,
    /// Set for truncated representations, whose residual includes
    /// truncation error.
    pub warning: Option<String>,
}

/// `‖Φ([π(exp y)v]) − Ad*(exp y)Φ([v])‖`.
pub fn equivariance_residual(rep: &UnitaryRep, y: &[f64], v: &ProjectiveVector) -> Result<EquivarianceResidual> {
    check_dims(rep.space_dim(), v.dim(), "equivariance_residual")?;
    let g = pi_of_exp(rep, y)?;
    let moved = momentum_of_vec(rep, &(g.matrix() * v.vec()));
    let ad = adjoint_of_exp(y, rep.algebra())?;
    let transported = coadjoint(&ad, &momentum_of_vec(rep, v.vec()))?;
    let warning = rep
        .is_truncated()
        .then(|| format!("{} is truncated; residual includes truncation error", rep.label()));
    Ok(EquivarianceResidual { residual: moved.sub(&transported).norm(), warning })
}

/// Growth threshold below which a direction counts as bounded across a
/// truncation family.
pub const GROWTH_TOL: f64 = 1e-6;
/// Largest log-log slope a bounded direction may show.
pub const GROWTH_SLOPE_MAX: f64 = 0.1;
/// Size of the probe perturbations around bounded basis directions.
pub const PROBE_OFFSET: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundednessKind {
    Bounded,
    Semibounded,
    UnboundedDirectionwise,
}

/// `spectral_sup` along one direction across truncation levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionGrowth {
    pub direction: Vector,
    pub values: Vec<f64>,
    /// Log-log least squares slope; absent when some value is not positive.
    pub slope: Option<f64>,
    pub increase: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessVerdict {
    pub kind: BoundednessKind,
    /// Bounded: `±e_i` with finite support values. Semibounded: a direction
    /// in the interior of the estimated domain cone. Otherwise: directions
    /// whose support values grow.
    pub witness: Vec<Vector>,
    /// `C = Σ‖A_i‖` with `|⟨I_π, x⟩| ≤ C max|x_i|`, for a single rep.
    pub equicontinuity_constant: Option<f64>,
    /// Truncation levels, for families.
    pub levels: Vec<usize>,
    pub growth: Vec<DirectionGrowth>,
}

impl BoundednessVerdict {
    pub fn growth_of(&self, direction: &[f64]) -> Option<&DirectionGrowth> {
        self.growth.iter().find(|g| g.direction.coords() == direction)
    }

    pub fn bounded_directions(&self) -> Vec<&Vector> {
        self.growth.iter().filter(|g| g.bounded).map(|g| &g.direction).collect()
    }
}

fn signed_basis(d: usize) -> Vec<Vector> {
    let mut out = Vec::with_capacity(2 * d);
    for i in 0..d {
        out.push(Vector::basis(d, i));
        out.push(Vector::basis(d, i).scale(-1.0));
    }
    out
}

/// A single finite-dimensional representation is always bounded.
pub fn classify_boundedness(rep: &UnitaryRep) -> Result<BoundednessVerdict> {
    let witness = signed_basis(rep.dim());
    let growth = witness
        .iter()
        .map(|x| {
            let v = spectral_sup(rep, x.coords())?;
            Ok(DirectionGrowth { direction: x.clone(), values: vec![v], slope: None, increase: 0.0, bounded: true })
        })
        .collect::<Result<_>>()?;
    Ok(BoundednessVerdict {
        kind: BoundednessKind::Bounded,
        witness,
        equicontinuity_constant: Some(rep.seminorm_constant()),
        levels: vec![rep.space_dim()],
        growth,
    })
}

fn growth_along(family: &[(usize, UnitaryRep)], x: &Vector) -> Result<DirectionGrowth> {
    let values: Vec<f64> = family
        .iter()
        .map(|(_, r)| spectral_sup(r, x.coords()))
        .collect::<Result<_>>()?;
    let increase = values.last().unwrap() - values[0];
    let slope = values.iter().all(|&v| v > 0.0).then(|| {
        let pts: Vec<(f64, f64)> = family
            .iter()
            .zip(&values)
            .map(|((n, _), v)| ((*n as f64).ln(), v.ln()))
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let bounded = increase < GROWTH_TOL && slope.is_none_or(|s| s < GROWTH_SLOPE_MAX);
    Ok(DirectionGrowth { direction: x.clone(), values, slope, increase, bounded })
}

/// Classifies a family of truncations `(N, rep_N)` by the growth of
/// `spectral_sup` in `N`.
///
/// Probes are `±e_i` and, around each bounded basis direction `u`, the
/// perturbations `u ± 0.1 e_j`. The bounded probes generate the estimate
/// of `B(I_π)`; the family is semibounded when that cone has interior.
pub fn classify_truncation_family(family: &[(usize, UnitaryRep)]) -> Result<BoundednessVerdict> {
    if family.len() < 3 {
        return input(format!("need at least 3 truncation levels, got {}", family.len()));
    }
    let d = family[0].1.dim();
    if family.iter().any(|(_, r)| r.algebra() != family[0].1.algebra()) {
        return input("truncation family must share one algebra");
    }
    if family.windows(2).any(|w| w[0].0 >= w[1].0) {
        return input("truncation levels must be strictly increasing");
    }
    let mut growth: Vec<DirectionGrowth> = signed_basis(d)
        .par_iter()
        .map(|x| growth_along(family, x))
        .collect::<Result<_>>()?;
    let mut probes = Vec::new();
    for g in growth.iter().filter(|g| g.bounded) {
        for j in 0..d {
            if g.direction[j] != 0.0 {
                continue;
            }
            for s in [PROBE_OFFSET, -PROBE_OFFSET] {
                probes.push(g.direction.add(&Vector::basis(d, j).scale(s)));
            }
        }
    }
    let extra: Vec<DirectionGrowth> = probes
        .par_iter()
        .map(|x| growth_along(family, x))
        .collect::<Result<_>>()?;
    growth.extend(extra);

    let levels = family.iter().map(|(n, _)| *n).collect();
    let bounded: Vec<Vector> = growth.iter().filter(|g| g.bounded).map(|g| g.direction.clone()).collect();
    let unbounded: Vec<Vector> = growth.iter().filter(|g| !g.bounded).map(|g| g.direction.clone()).collect();
    if unbounded.is_empty() {
        return Ok(BoundednessVerdict {
            kind: BoundednessKind::Bounded,
            witness: signed_basis(d),
            equicontinuity_constant: None,
            levels,
            growth,
        });
    }
    let semibounded = if bounded.is_empty() {
        None
    } else {
        // Outer estimate: its recession cone is the dual of the bounded cone.
        let rec = dual_cone(&bounded)?;
        let outer = ConvexSetV::new(vec![DualFunctional::zeros(d)], rec.rays().to_vec())?
            .with_tolerances(Tolerances::default());
        semi_equicontinuity_certificate(&outer)?.interior_point.map(|p| (outer, p))
    };
    match semibounded {
        Some((outer, p)) => {
            // Prefer bounded probes that are themselves interior, else the LP point.
            let mut witness: Vec<Vector> = bounded
                .iter()
                .filter(|b| outer.in_domain_interior(b).unwrap_or(false))
                .cloned()
                .collect();
            if witness.is_empty() {
                witness.push(p);
            }
            Ok(BoundednessVerdict {
                kind: BoundednessKind::Semibounded,
                witness,
                equicontinuity_constant: None,
                levels,
                growth,
            })
        }
        None => Ok(BoundednessVerdict {
            kind: BoundednessKind::UnboundedDirectionwise,
            witness: unbounded,
            equicontinuity_constant: None,
            levels,
            growth,
        }),
    }
}

/// `‖dπ(x)‖` for a representation; used for the `|⟨α, x⟩| ≤ ‖dπ(x)‖` bound.
pub fn operator_bound(rep: &UnitaryRep, x: &[f64]) -> Result<f64> {
    Ok(crate::linalg::op_norm(&d_pi(rep, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::su2;
    use crate::linalg::c;
    use crate::sampling::{direction_set, fibonacci_sphere};
    use crate::unirep::{
        diagonal_abelian, heisenberg_truncated, oscillator_truncated, su2_spin, zero_rep,
    };

    #[test]
    fn zero_rep_momentum() {
        let rep = zero_rep(su2(), 3).unwrap();
        let v = ProjectiveVector::new(CVector::from_vec(vec![c(1.0, 2.0), c(0.0, 1.0), c(-3.0, 0.5)])).unwrap();
        assert_eq!(momentum_map(&rep, &v).unwrap(), DualFunctional::zeros(3));
        let est = momentum_set_estimate(&rep, 20, &direction_set(3, 8, 0), 1).unwrap();
        assert_eq!(est.inner.points(), &[DualFunctional::zeros(3)]);
        assert!(est.outer_support.iter().all(|o| o.value.abs() < 1e-15));
        assert!(est.gap.abs() < 1e-15);
    }

    #[test]
    fn highest_weight_vector() {
        let rep = su2_spin(0.5).unwrap();
        let phi = momentum_map(&rep, &ProjectiveVector::basis(2, 0)).unwrap();
        assert!(phi.max_abs_diff(&DualFunctional::new(vec![0.0, 0.0, 0.5])) < 1e-15);
    }

    #[test]
    fn projective_invariance() {
        let rep = su2_spin(1.5).unwrap();
        let v = CVector::from_vec(vec![c(0.3, -1.0), c(2.0, 0.1), c(0.0, 0.7), c(-1.2, 0.4)]);
        let a = momentum_map(&rep, &ProjectiveVector::new(v.clone()).unwrap()).unwrap();
        let b = momentum_map(&rep, &ProjectiveVector::new(v * c(3.0, -4.0)).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn spin_j_sandwich_is_exact() {
        for j in [0.5, 1.0, 2.5] {
            let rep = su2_spin(j).unwrap();
            let est = momentum_set_estimate(&rep, 10, &direction_set(3, 0, 0), 3).unwrap();
            let row = &est.support_table().unwrap()[4];
            assert_eq!(row.direction.coords(), &[0.0, 0.0, 1.0]);
            assert!((row.inner - j).abs() < 1e-10);
            assert!((row.outer - j).abs() < 1e-10);
            assert!(est.gap <= 1e-10);
        }
    }

    #[test]
    fn abelian_triangle_estimate() {
        let rep = diagonal_abelian(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let dirs: Vec<Vector> = fibonacci_sphere(64)
            .into_iter()
            .map(|v| Vector::new(v.coords()[..2].to_vec()))
            .filter(|v| v.norm() > 1e-6)
            .collect();
        let est = momentum_set_estimate(&rep, 50, &dirs, 0).unwrap();
        let tri = ConvexSetV::from_points(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        for row in est.support_table().unwrap() {
            let exact = support_function(&tri, &row.direction).unwrap().finite().unwrap();
            assert!((row.inner - exact).abs() < 1e-10);
            assert!((row.outer - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn estimate_is_deterministic() {
        let rep = su2_spin(1.0).unwrap();
        let dirs = direction_set(3, 16, 0);
        let a = momentum_set_estimate(&rep, 40, &dirs, 9).unwrap();
        let b = momentum_set_estimate(&rep, 40, &dirs, 9).unwrap();
        assert_eq!(a, b);
        assert!(momentum_set_estimate(&rep, 0, &dirs, 9).is_err());
        assert!(momentum_set_estimate(&rep, 4, &[], 9).is_err());
    }

    #[test]
    fn equivariance_for_spin_one() {
        let rep = su2_spin(1.0).unwrap();
        let v = ProjectiveVector::new(CVector::from_vec(vec![c(0.3, -1.0), c(2.0, 0.1), c(0.0, 0.7)])).unwrap();
        assert!(equivariance_residual(&rep, &[0.0; 3], &v).unwrap().residual < 1e-14);
        let r = equivariance_residual(&rep, &[0.8, -1.7, 0.4], &v).unwrap();
        assert!(r.residual < 1e-9);
        assert!(r.warning.is_none());
    }

    #[test]
    fn truncated_equivariance_is_flagged() {
        let rep = oscillator_truncated(12).unwrap();
        let v = ProjectiveVector::basis(12, 11);
        let r = equivariance_residual(&rep, &[0.0, 0.3, -0.2, 0.0], &v).unwrap();
        assert!(r.warning.is_some());
        assert!(r.residual > 1e-6);
    }

    #[test]
    fn single_rep_is_bounded() {
        let rep = su2_spin(2.0).unwrap();
        let v = classify_boundedness(&rep).unwrap();
        assert_eq!(v.kind, BoundednessKind::Bounded);
        let c_eq = v.equicontinuity_constant.unwrap();
        for g in &v.growth {
            assert!(g.values[0].abs() <= c_eq);
        }
    }

    #[test]
    fn oscillator_family_is_semibounded() {
        let fam: Vec<_> = [32, 64, 128].iter().map(|&n| (n, oscillator_truncated(n).unwrap())).collect();
        let v = classify_truncation_family(&fam).unwrap();
        assert_eq!(v.kind, BoundednessKind::Semibounded);
        let minus_h = [-1.0, 0.0, 0.0, 0.0];
        assert!(v.growth_of(&minus_h).unwrap().bounded);
        assert!(v.witness.iter().any(|w| w.coords() == minus_h));
        let slope = v.growth_of(&[1.0, 0.0, 0.0, 0.0]).unwrap().slope.unwrap();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn heisenberg_family_is_not_semibounded() {
        let fam: Vec<_> = [32, 64, 128].iter().map(|&n| (n, heisenberg_truncated(n).unwrap())).collect();
        let v = classify_truncation_family(&fam).unwrap();
        assert_eq!(v.kind, BoundednessKind::UnboundedDirectionwise);
        assert!(v.growth_of(&[0.0, 0.0, 1.0]).unwrap().bounded);
        assert!(v.growth_of(&[0.0, 0.0, -1.0]).unwrap().bounded);
        assert!(!v.growth_of(&[1.0, 0.0, 0.0]).unwrap().bounded);
        assert!(classify_truncation_family(&fam[..2]).is_err());
    }

    #[test]
    fn annihilator_matches_derived_kernel() {
        // Generators (i, 0) and (i·2, 0): second coordinate is in the kernel.
        let rep = diagonal_abelian(&[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let est = momentum_set_estimate(&rep, 10, &direction_set(2, 4, 0), 0).unwrap();
        let ann = annihilator(&est.inner, 1e-9);
        let ker = crate::unirep::derived_kernel(&rep, 1e-9);
        assert_eq!(ann.ncols(), 1);
        assert_eq!(ker.ncols(), 1);
        assert!((ann.column(0).dot(&ker.column(0)).abs() - 1.0).abs() < 1e-9);
    }
}
