//! Convex analysis of polyhedral subsets `X ⊆ E′` of a finite-dimensional
//! dual space.
//!
//! Sets are stored in V-representation, `X = conv(points) + cone(rays)`. The
//! support function `s_X(v) = −inf⟨X, v⟩` is then a finite maximum when every
//! ray pairs nonnegatively with `v`, and `+∞` otherwise, so the domain cone
//! `B(X)` is the dual cone of the recession cone.

mod certificate;
mod dual_cone;
mod membership;

pub use certificate::{semi_equicontinuity_certificate, SemiEquicontinuityCertificate};
pub use dual_cone::{dual_cone, MAX_DUAL_CONE_DIM, MAX_DUAL_CONE_RAYS};
pub use membership::{
    lp_membership, membership_reconstruct, FnOracle, LpMembership, MembershipVerdict, SupportOracle,
};

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, input, precondition, Error, Result};

/// Points closer than this in max-norm are merged at construction.
pub const DEDUP_TOL: f64 = 1e-12;

/// Numerical tolerances used by cone and membership decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack allowed when testing `⟨r, v⟩ ≥ 0` against a recession ray.
    pub cone: f64,
    /// Margin required before a direction counts as separating.
    pub mem: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { cone: 1e-9, mem: 1e-8 }
    }
}

/// An element `v ∈ E ≅ R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

/// An element `α ∈ E′`, paired with vectors by `⟨α, v⟩ = Σ α_i v_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualFunctional(Vec<f64>);

macro_rules! coord_type {
    ($t:ident) => {
        impl $t {
            pub fn new(coords: Vec<f64>) -> Self {
                Self(coords)
            }

            /// Validating constructor: at least one coordinate, all finite.
            pub fn try_new(coords: Vec<f64>) -> Result<Self> {
                if coords.is_empty() {
                    return input(concat!(stringify!($t), " needs dimension >= 1"));
                }
                if coords.iter().any(|x| !x.is_finite()) {
                    return input(concat!(stringify!($t), " has a non-finite entry"));
                }
                Ok(Self(coords))
            }

            pub fn zeros(d: usize) -> Self {
                Self(vec![0.0; d])
            }

            pub fn basis(d: usize, i: usize) -> Self {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                Self(e)
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &[f64] {
                &self.0
            }

            pub fn into_coords(self) -> Vec<f64> {
                self.0
            }

            pub fn norm(&self) -> f64 {
                self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
            }

            pub fn scale(&self, s: f64) -> Self {
                Self(self.0.iter().map(|x| x * s).collect())
            }

            pub fn add(&self, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
            }

            pub fn dot(&self, other: &Self) -> f64 {
                self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.0
                    .iter()
                    .zip(&other.0)
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            }

            pub fn normalized(&self) -> Self {
                self.scale(1.0 / self.norm())
            }
        }

        impl From<Vec<f64>> for $t {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl std::ops::Index<usize> for $t {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }
    };
}

coord_type!(Vector);
coord_type!(DualFunctional);

impl DualFunctional {
    /// The pairing `⟨α, v⟩ = α(v)`.
    pub fn pair(&self, v: &Vector) -> f64 {
        self.0.iter().zip(&v.0).map(|(a, b)| a * b).sum()
    }

    /// Reinterpret as a vector of `E` through the coordinate identification.
    pub fn to_vector(&self) -> Vector {
        Vector(self.0.clone())
    }
}

impl Vector {
    pub fn to_dual(&self) -> DualFunctional {
        DualFunctional(self.0.clone())
    }
}

/// Value in `R ∪ {+∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinity => None,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinity,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::Infinity) => Some(Less),
            (ExtendedReal::Infinity, ExtendedReal::Finite(_)) => Some(Greater),
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => Some(Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinity => write!(f, "+inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            ExtendedReal::Infinity => s.serialize_str("+inf"),
        }
    }
}

/// Closed convex set `conv(points) + cone(rays)` in `E′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConvexSet", into = "RawConvexSet")]
pub struct ConvexSetV {
    points: Vec<DualFunctional>,
    rays: Vec<DualFunctional>,
    tol: Tolerances,
}

#[derive(Serialize, Deserialize)]
struct RawConvexSet {
    points: Vec<Vec<f64>>,
    #[serde(default)]
    rays: Vec<Vec<f64>>,
}

impl TryFrom<RawConvexSet> for ConvexSetV {
    type Error = Error;
    fn try_from(raw: RawConvexSet) -> Result<Self> {
        ConvexSetV::new(
            raw.points.into_iter().map(DualFunctional).collect(),
            raw.rays.into_iter().map(DualFunctional).collect(),
        )
    }
}

impl From<ConvexSetV> for RawConvexSet {
    fn from(x: ConvexSetV) -> Self {
        RawConvexSet {
            points: x.points.into_iter().map(|p| p.0).collect(),
            rays: x.rays.into_iter().map(|r| r.0).collect(),
        }
    }
}

impl ConvexSetV {
    /// Builds the set, rejecting zero rays and merging duplicate points and
    /// parallel rays within [`DEDUP_TOL`].
    pub fn new(points: Vec<DualFunctional>, rays: Vec<DualFunctional>) -> Result<Self> {
        let Some(first) = points.first() else {
            return input("ConvexSetV needs at least one point");
        };
        let d = first.dim();
        if d == 0 {
            return input("ConvexSetV needs dimension >= 1");
        }
        for p in points.iter().chain(&rays) {
            check_dims(d, p.dim(), "ConvexSetV entry")?;
            if p.0.iter().any(|x| !x.is_finite()) {
                return input("ConvexSetV has a non-finite coordinate");
            }
        }
        let mut pts: Vec<DualFunctional> = Vec::with_capacity(points.len());
        for p in points {
            if !pts.iter().any(|q| q.max_abs_diff(&p) <= DEDUP_TOL) {
                pts.push(p);
            }
        }
        let mut rs: Vec<DualFunctional> = Vec::with_capacity(rays.len());
        for (k, r) in rays.into_iter().enumerate() {
            let n = r.norm();
            if n <= DEDUP_TOL {
                return input(format!("ray {k} is zero"));
            }
            let unit = r.scale(1.0 / n);
            if !rs.iter().any(|q| q.normalized().max_abs_diff(&unit) <= DEDUP_TOL) {
                rs.push(r);
            }
        }
        Ok(Self { points: pts, rays: rs, tol: Tolerances::default() })
    }

    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(points.into_iter().map(DualFunctional).collect(), Vec::new())
    }

    pub fn from_parts(points: Vec<Vec<f64>>, rays: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            points.into_iter().map(DualFunctional).collect(),
            rays.into_iter().map(DualFunctional).collect(),
        )
    }

    pub fn singleton(alpha: DualFunctional) -> Result<Self> {
        Self::new(vec![alpha], Vec::new())
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[DualFunctional] {
        &self.points
    }

    pub fn rays(&self) -> &[DualFunctional] {
        &self.rays
    }

    /// No recession directions, i.e. the set is weak-*-bounded.
    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// Union of the generators of two sets (hull of the union).
    pub fn hull_union(&self, other: &ConvexSetV) -> Result<ConvexSetV> {
        check_dims(self.dim(), other.dim(), "hull_union")?;
        let pts = self.points.iter().chain(&other.points).cloned().collect();
        let rays = self.rays.iter().chain(&other.rays).cloned().collect();
        Ok(ConvexSetV::new(pts, rays)?.with_tolerances(self.tol))
    }

    /// Strict interior test for `B(X)`: every normalized ray pairs with `v`
    /// by at least `τ_cone`.
    pub fn in_domain_interior(&self, v: &Vector) -> Result<bool> {
        check_dims(self.dim(), v.dim(), "in_domain_interior")?;
        Ok(self
            .rays
            .iter()
            .all(|r| r.pair(v) / r.norm() >= self.tol.cone))
    }

    /// Applies a linear map to every generator (points and rays alike).
    pub fn map_generators(&self, f: impl Fn(&DualFunctional) -> DualFunctional) -> Result<Self> {
        let pts = self.points.iter().map(&f).collect();
        let rays = self.rays.iter().map(&f).collect();
        Ok(ConvexSetV::new(pts, rays)?.with_tolerances(self.tol))
    }
}

/// `s_X(v) = −inf⟨X, v⟩ = sup⟨X, −v⟩`.
pub fn support_function(x: &ConvexSetV, v: &Vector) -> Result<ExtendedReal> {
    check_dims(x.dim(), v.dim(), "support_function")?;
    if x.rays.iter().any(|r| r.pair(v) < -x.tol.cone) {
        return Ok(ExtendedReal::Infinity);
    }
    let s = x
        .points
        .iter()
        .map(|p| -p.pair(v))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ExtendedReal::Finite(s))
}

/// `v ∈ B(X)`, i.e. `inf⟨X, v⟩ > −∞`.
pub fn domain_membership(x: &ConvexSetV, v: &Vector) -> Result<bool> {
    check_dims(x.dim(), v.dim(), "domain_membership")?;
    Ok(x.rays.iter().all(|r| r.pair(v) >= -x.tol.cone))
}

/// Finite-dimensional shadow of properness of `η_v : X → R`: whether the
/// sublevel set `{α ∈ X : ⟨α, v⟩ ≤ c}` is bounded.
///
/// An empty sublevel set is bounded. Otherwise its recession cone is spanned
/// by the rays that pair to zero with `v`, so it is bounded exactly when no
/// ray does. For `v ∈ B(X)⁰` the answer is always `true`.
pub fn properness_check(x: &ConvexSetV, v: &Vector, level: f64) -> Result<bool> {
    if !domain_membership(x, v)? {
        return precondition("properness_check: v is not in B(X)");
    }
    let min_pair = x
        .points
        .iter()
        .map(|p| p.pair(v))
        .fold(f64::INFINITY, f64::min);
    if min_pair > level {
        return Ok(true);
    }
    Ok(x.rays.iter().all(|r| r.pair(v) / r.norm() > x.tol.cone))
}

/// The point evaluations `{δ_y}` of a finite weighted space
/// `C_ω(Y, R) ≅ R^|Y|`, as a ray-free set of basis functionals.
pub fn build_weighted_delta_family(omega: &[f64]) -> Result<ConvexSetV> {
    if omega.is_empty() {
        return input("weighted delta family needs at least one point");
    }
    if let Some(k) = omega.iter().position(|w| !(*w > 0.0) || !w.is_finite()) {
        return input(format!("weight omega[{k}] = {} is not positive", omega[k]));
    }
    let n = omega.len();
    ConvexSetV::new((0..n).map(|i| DualFunctional::basis(n, i)).collect(), Vec::new())
}

/// The weighted sup-norm `‖f‖_ω = sup |f| / ω`.
pub fn weighted_sup_norm(f: &[f64], omega: &[f64]) -> f64 {
    f.iter()
        .zip(omega)
        .fold(0.0_f64, |m, (fy, wy)| m.max(fy.abs() / wy))
}

/// Constants `(ε, d)` with `|⟨α, w⟩| ≤ ε⁻¹(⟨α, v⟩ + d)` on `X`, for
/// `v ∈ B(X)⁰` and arbitrary `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationBound {
    pub eps: f64,
    pub d: f64,
}

pub fn domination_bound(x: &ConvexSetV, v: &Vector, w: &Vector) -> Result<DominationBound> {
    check_dims(x.dim(), w.dim(), "domination_bound")?;
    if !x.in_domain_interior(v)? {
        return precondition("domination_bound: v is not in B(X)⁰");
    }
    // Largest step keeping v ± εw inside B(X), halved to stay interior.
    let mut eps: f64 = 1.0;
    for r in &x.rays {
        let rw = r.pair(w).abs();
        if rw > 0.0 {
            eps = eps.min(0.5 * r.pair(v) / rw);
        }
    }
    let plus = support_function(x, &v.add(&w.scale(eps)))?;
    let minus = support_function(x, &v.sub(&w.scale(eps)))?;
    let base = support_function(x, v)?;
    let (Some(p), Some(m), Some(b)) = (plus.finite(), minus.finite(), base.finite()) else {
        return Err(Error::Computation("domination_bound: v ± εw left B(X)".into()));
    };
    Ok(DominationBound { eps, d: p.max(m).max(b + 1.0) })
}
