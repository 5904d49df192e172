use serde::Serialize;

use super::{ConvexSetV, DualFunctional, Vector};
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome};

/// Outcome of the semi-equicontinuity test.
///
/// In finite dimension `X` is semi-equicontinuous iff `B(X)` has interior
/// points, iff the recession cone `cone(rays)` contains no line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiEquicontinuityCertificate {
    pub verdict: bool,
    /// A point of `B(X)⁰` (every normalized ray pairs with it by at least
    /// `τ_cone`). Present iff `verdict`.
    pub interior_point: Option<Vector>,
    /// A ray `r` with `±r ∈ cone(rays)`. Present iff `!verdict`.
    pub line_direction: Option<DualFunctional>,
}

pub fn semi_equicontinuity_certificate(x: &ConvexSetV) -> Result<SemiEquicontinuityCertificate> {
    let d = x.dim();
    let rays = x.rays();
    if rays.is_empty() {
        return Ok(SemiEquicontinuityCertificate {
            verdict: true,
            interior_point: Some(Vector::zeros(d)),
            line_direction: None,
        });
    }
    let unit: Vec<DualFunctional> = rays.iter().map(DualFunctional::normalized).collect();

    // max t  s.t.  ⟨r̂_i, v⟩ ≥ t,  v ∈ [-1, 1]^d,  t ≤ 1
    let mut lp = LinearProgram::maximize();
    let vs: Vec<usize> = (0..d).map(|_| lp.var(0.0, -1.0, 1.0)).collect();
    let t = lp.var(1.0, f64::NEG_INFINITY, 1.0);
    for r in &unit {
        let mut terms: Vec<(usize, f64)> = vs.iter().zip(r.coords()).map(|(&k, &c)| (k, c)).collect();
        terms.push((t, -1.0));
        lp.constraint(terms, Cmp::Ge, 0.0);
    }
    if let LpOutcome::Optimal { x: sol, objective } = lp.solve()? {
        let v = Vector::new(vs.iter().map(|&k| sol[k]).collect());
        let margin = unit.iter().map(|r| r.pair(&v)).fold(f64::INFINITY, f64::min);
        if objective > x.tolerances().cone && margin >= x.tolerances().cone {
            return Ok(SemiEquicontinuityCertificate {
                verdict: true,
                interior_point: Some(v),
                line_direction: None,
            });
        }
    }

    // No interior: the lowest-index ray whose negative lies in the cone.
    for (i, r) in unit.iter().enumerate() {
        if negation_in_cone(&unit, r)? {
            return Ok(SemiEquicontinuityCertificate {
                verdict: false,
                interior_point: None,
                line_direction: Some(rays[i].clone()),
            });
        }
    }
    Err(Error::Computation(
        "semi-equicontinuity: cone is numerically neither pointed nor lineal".into(),
    ))
}

/// Whether `−r ∈ cone(unit)`, decided by an L1 residual LP.
fn negation_in_cone(unit: &[DualFunctional], r: &DualFunctional) -> Result<bool> {
    let d = r.dim();
    let mut lp = LinearProgram::minimize();
    let mu: Vec<usize> = unit.iter().map(|_| lp.var(0.0, 0.0, f64::INFINITY)).collect();
    let plus: Vec<usize> = (0..d).map(|_| lp.var(1.0, 0.0, f64::INFINITY)).collect();
    let minus: Vec<usize> = (0..d).map(|_| lp.var(1.0, 0.0, f64::INFINITY)).collect();
    for j in 0..d {
        let mut terms: Vec<(usize, f64)> = mu
            .iter()
            .zip(unit)
            .map(|(&k, u)| (k, u[j]))
            .collect();
        terms.push((plus[j], 1.0));
        terms.push((minus[j], -1.0));
        lp.constraint(terms, Cmp::Eq, -r[j]);
    }
    match lp.solve()? {
        LpOutcome::Optimal { objective, .. } => Ok(objective <= 1e-9),
        _ => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rays: Vec<Vec<f64>>) -> ConvexSetV {
        ConvexSetV::from_parts(vec![vec![0.0; 2]], rays).unwrap()
    }

    #[test]
    fn bounded_set_is_semi_equicontinuous() {
        let c = semi_equicontinuity_certificate(&set(vec![])).unwrap();
        assert!(c.verdict);
        assert!(c.interior_point.is_some());
        assert!(c.line_direction.is_none());
    }

    #[test]
    fn opposite_rays_form_a_line() {
        let c = semi_equicontinuity_certificate(&set(vec![vec![1.0, 0.0], vec![-1.0, 0.0]])).unwrap();
        assert!(!c.verdict);
        assert_eq!(c.line_direction, Some(DualFunctional::new(vec![1.0, 0.0])));
    }

    #[test]
    fn pointed_cone_has_interior_point() {
        let x = set(vec![vec![1.0, 0.0], vec![1.0, 1.0]]);
        let c = semi_equicontinuity_certificate(&x).unwrap();
        assert!(c.verdict);
        let v = c.interior_point.unwrap();
        for r in x.rays() {
            assert!(r.pair(&v) > 0.0);
        }
        assert!(x.in_domain_interior(&v).unwrap());
    }

    #[test]
    fn hidden_line_reports_lowest_index() {
        // No two generators are opposite, yet the cone is the whole plane.
        let x = set(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]);
        let c = semi_equicontinuity_certificate(&x).unwrap();
        assert!(!c.verdict);
        assert_eq!(c.line_direction, Some(DualFunctional::new(vec![0.0, 1.0])));
    }

    #[test]
    fn half_plane_rays_not_pointed() {
        let x = set(vec![vec![0.0, 1.0], vec![0.0, -1.0], vec![1.0, 0.0]]);
        let c = semi_equicontinuity_certificate(&x).unwrap();
        assert!(!c.verdict);
        assert_eq!(c.line_direction, Some(DualFunctional::new(vec![0.0, 1.0])));
    }
}
