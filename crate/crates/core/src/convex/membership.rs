use serde::Serialize;

use super::{
    semi_equicontinuity_certificate, support_function, ConvexSetV, DualFunctional, ExtendedReal,
    Tolerances, Vector,
};
use crate::error::{check_dims, input, precondition, Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome};

/// Anything that can evaluate a support function `s_X`.
///
/// When the set is known explicitly the oracle exposes it, which lets
/// [`membership_reconstruct`] settle the `inside` case exactly.
pub trait SupportOracle {
    fn dim(&self) -> usize;
    fn support(&self, v: &Vector) -> Result<ExtendedReal>;
    fn explicit(&self) -> Option<&ConvexSetV> {
        None
    }
    fn tolerances(&self) -> Tolerances {
        Tolerances::default()
    }
}

impl SupportOracle for ConvexSetV {
    fn dim(&self) -> usize {
        ConvexSetV::dim(self)
    }

    fn support(&self, v: &Vector) -> Result<ExtendedReal> {
        support_function(self, v)
    }

    fn explicit(&self) -> Option<&ConvexSetV> {
        Some(self)
    }

    fn tolerances(&self) -> Tolerances {
        *ConvexSetV::tolerances(self)
    }
}

/// Support oracle given only as a function, e.g. a sampled estimate.
pub struct FnOracle<F> {
    dim: usize,
    f: F,
    tol: Tolerances,
}

impl<F: Fn(&Vector) -> Result<ExtendedReal>> FnOracle<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, tol: Tolerances::default() }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }
}

impl<F: Fn(&Vector) -> Result<ExtendedReal>> SupportOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self, v: &Vector) -> Result<ExtendedReal> {
        (self.f)(v)
    }

    fn tolerances(&self) -> Tolerances {
        self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MembershipVerdict {
    Inside,
    /// `⟨α, separator⟩ < inf⟨X, separator⟩ − τ_mem`; `margin` is the gap.
    Outside { separator: Vector, margin: f64 },
    Undetermined,
}

impl MembershipVerdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipVerdict::Inside)
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, MembershipVerdict::Outside { .. })
    }
}

/// Exact LP membership of `α` in `conv(points) + cone(rays)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpMembership {
    pub inside: bool,
    /// L1 distance from `α` to the set (0 when inside).
    pub distance: f64,
    /// Optimal separating direction in `B(X) ∩ [-1, 1]^d`, when outside.
    pub separator: Option<Vector>,
}

/// Solves `min ⟨α, v⟩ − t` subject to `⟨p, v⟩ ≥ t`, `⟨r, v⟩ ≥ 0`,
/// `v ∈ [-1, 1]^d`. The optimum is `−dist_1(α, X)`.
pub fn lp_membership(x: &ConvexSetV, alpha: &DualFunctional) -> Result<LpMembership> {
    let d = x.dim();
    check_dims(d, alpha.dim(), "lp_membership")?;
    let mut lp = LinearProgram::minimize();
    let vs: Vec<usize> = (0..d).map(|j| lp.var(alpha[j], -1.0, 1.0)).collect();
    let t = lp.var(-1.0, f64::NEG_INFINITY, f64::INFINITY);
    for p in x.points() {
        let mut terms: Vec<(usize, f64)> = vs.iter().zip(p.coords()).map(|(&k, &c)| (k, c)).collect();
        terms.push((t, -1.0));
        lp.constraint(terms, Cmp::Ge, 0.0);
    }
    for r in x.rays() {
        let unit = r.normalized();
        let terms = vs.iter().zip(unit.coords()).map(|(&k, &c)| (k, c)).collect();
        lp.constraint(terms, Cmp::Ge, 0.0);
    }
    match lp.solve()? {
        LpOutcome::Optimal { x: sol, objective } => {
            let distance = (-objective).max(0.0);
            let inside = objective >= -x.tolerances().mem;
            let separator = (!inside).then(|| Vector::new(vs.iter().map(|&k| sol[k]).collect()));
            Ok(LpMembership { inside, distance, separator })
        }
        other => Err(Error::Computation(format!("membership LP ended as {other:?}"))),
    }
}

/// Hahn–Banach reconstruction test: `α ∈ conv̄(X)` iff
/// `⟨α, v⟩ ≥ −s_X(v)` for every `v ∈ B(X)⁰`.
///
/// Sampled `directions` are tried first, in order; the first violation is
/// returned. If none separates and the oracle exposes an explicit set, an
/// exact LP decides; otherwise the verdict is `Undetermined`.
pub fn membership_reconstruct(
    alpha: &DualFunctional,
    oracle: &dyn SupportOracle,
    directions: &[Vector],
) -> Result<MembershipVerdict> {
    if directions.is_empty() {
        return input("membership_reconstruct needs at least one direction");
    }
    let d = oracle.dim();
    check_dims(d, alpha.dim(), "membership_reconstruct alpha")?;
    let tol = oracle.tolerances();
    let explicit = oracle.explicit();
    for (k, v) in directions.iter().enumerate() {
        check_dims(d, v.dim(), "membership_reconstruct direction")?;
        if let Some(x) = explicit {
            if !x.in_domain_interior(v)? {
                return precondition(format!("direction {k} is not in B(X)⁰"));
            }
        }
    }
    for v in directions {
        let Some(s) = oracle.support(v)?.finite() else {
            return precondition("support oracle is infinite on a supplied direction");
        };
        let gap = -s - alpha.pair(v);
        if gap > tol.mem {
            return Ok(MembershipVerdict::Outside { separator: v.clone(), margin: gap });
        }
    }
    let Some(x) = explicit else {
        return Ok(MembershipVerdict::Undetermined);
    };
    let lp = lp_membership(x, alpha)?;
    let Some(sep) = lp.separator else {
        return Ok(MembershipVerdict::Inside);
    };
    let separator = push_into_interior(x, alpha, sep)?;
    let s = support_function(x, &separator)?
        .finite()
        .ok_or_else(|| Error::Computation("separator left B(X)".into()))?;
    Ok(MembershipVerdict::Outside { margin: -s - alpha.pair(&separator), separator })
}

/// The LP separator may sit on the boundary of `B(X)`. Nudge it toward an
/// interior point while it still separates, so the certificate lies in
/// `B(X)⁰` whenever that cone is nonempty.
fn push_into_interior(x: &ConvexSetV, alpha: &DualFunctional, v: Vector) -> Result<Vector> {
    if x.in_domain_interior(&v)? {
        return Ok(v);
    }
    let cert = semi_equicontinuity_certificate(x)?;
    let Some(u) = cert.interior_point else {
        return Ok(v);
    };
    let mem = x.tolerances().mem;
    let mut step = 0.5;
    for _ in 0..60 {
        let w = v.add(&u.scale(step));
        if x.in_domain_interior(&w)? {
            if let Some(s) = support_function(x, &w)?.finite() {
                if -s - alpha.pair(&w) > mem {
                    return Ok(w);
                }
            }
        }
        step *= 0.5;
    }
    Ok(v)
}
