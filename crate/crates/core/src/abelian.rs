//! Unitary representations of a vector group `(E, +)` given by discrete
//! spectral measures `P = Σ_k δ_{α_k} P_k`, their holomorphic extension to the
//! tube `E + iB(X)⁰`, and recovery of `P` from commuting generators.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::convex::{
    lp_membership, support_function, ConvexSetV, DualFunctional, ExtendedReal, Vector, DEDUP_TOL,
};
use crate::error::{check_dims, input, precondition, Error, Result};
use crate::liealg::abelian;
use crate::linalg::{c, commutator, eigh, identity, op_norm, skew_hermitian_defect, CMatrix, I};
use crate::sampling::{random_unitary, stream_rng};
use crate::unirep::UnitaryRep;

/// Tolerance for the projection identities of a measure.
pub const MEASURE_TOL: f64 = 1e-10;
/// Generators whose commutators exceed this are rejected by [`recover_measure`].
pub const COMMUTATOR_TOL: f64 = 1e-8;
/// Joint eigenvalues closer than this are merged.
pub const CLUSTER_TOL: f64 = 1e-7;
/// A projection with operator norm below this counts as zero.
const ZERO_PROJECTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub alpha: DualFunctional,
    #[serde(rename = "P", with = "crate::linalg::serde_cmatrix")]
    pub projection: CMatrix,
}

impl Atom {
    pub fn is_zero(&self) -> bool {
        op_norm(&self.projection) < ZERO_PROJECTION
    }

    pub fn rank(&self) -> usize {
        self.projection.trace().re.round().max(0.0) as usize
    }
}

/// Atoms `(α_k, P_k)` with orthogonal projections summing to the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct SpectralMeasureDiscrete {
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<RawMeasure> for SpectralMeasureDiscrete {
    type Error = Error;
    fn try_from(r: RawMeasure) -> Result<Self> {
        SpectralMeasureDiscrete::new(r.atoms)
    }
}

impl From<SpectralMeasureDiscrete> for RawMeasure {
    fn from(m: SpectralMeasureDiscrete) -> Self {
        RawMeasure { atoms: m.atoms }
    }
}

impl SpectralMeasureDiscrete {
    /// Validates every invariant and reports all violations at once.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return input("spectral measure needs at least one atom");
        };
        let n = first.projection.nrows();
        let d = first.alpha.dim();
        if n == 0 || d == 0 {
            return input("spectral measure needs positive space and group dimensions");
        }
        for (k, a) in atoms.iter().enumerate() {
            if a.projection.shape() != (n, n) {
                return input(format!("atom {k}: P is not {n}×{n}"));
            }
            check_dims(d, a.alpha.dim(), &format!("atom {k} alpha"))?;
            if a.alpha.coords().iter().any(|x| !x.is_finite())
                || a.projection.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
            {
                return input(format!("atom {k} has a non-finite entry"));
            }
        }
        let mut violations = Vec::new();
        let mut sum = CMatrix::zeros(n, n);
        for (k, a) in atoms.iter().enumerate() {
            let p = &a.projection;
            let herm = op_norm(&(p - p.adjoint()));
            if herm > MEASURE_TOL {
                violations.push(format!("P_{k} is not Hermitian (defect {herm:e})"));
            }
            let idem = op_norm(&(p * p - p));
            if idem > MEASURE_TOL {
                violations.push(format!("P_{k} is not idempotent (defect {idem:e})"));
            }
            for (l, b) in atoms.iter().enumerate().skip(k + 1) {
                let cross = op_norm(&(p * &b.projection));
                if cross > MEASURE_TOL {
                    violations.push(format!("P_{k} P_{l} ≠ 0 (norm {cross:e})"));
                }
                if a.alpha.max_abs_diff(&b.alpha) <= DEDUP_TOL {
                    violations.push(format!("alpha_{k} and alpha_{l} coincide"));
                }
            }
            sum += p;
        }
        let total = op_norm(&(sum - identity(n)));
        if total > MEASURE_TOL {
            violations.push(format!("projections do not sum to the identity (defect {total:e})"));
        }
        if !violations.is_empty() {
            return input(format!("invalid spectral measure: {}", violations.join("; ")));
        }
        Ok(Self { atoms })
    }

    /// Rank-one atoms on the standard basis of `C^N`, one per weight.
    pub fn diagonal(weights: &[Vec<f64>]) -> Result<Self> {
        let n = weights.len();
        let atoms = weights
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let mut p = CMatrix::zeros(n, n);
                p[(k, k)] = c(1.0, 0.0);
                Atom { alpha: DualFunctional::new(w.clone()), projection: p }
            })
            .collect();
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Dimension of `E`.
    pub fn dim(&self) -> usize {
        self.atoms[0].alpha.dim()
    }

    /// Dimension `N` of the Hilbert space.
    pub fn space_dim(&self) -> usize {
        self.atoms[0].projection.nrows()
    }

    fn support(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| !a.is_zero())
    }

    /// `Σ_k f(α_k) P_k`.
    fn functional_calculus(&self, f: impl Fn(&DualFunctional) -> Complex64) -> CMatrix {
        let n = self.space_dim();
        let mut m = CMatrix::zeros(n, n);
        for a in &self.atoms {
            m += &a.projection * f(&a.alpha);
        }
        m
    }

    /// `A_j = dπ(e_j) = i Σ_k ⟨α_k, e_j⟩ P_k`.
    pub fn generators(&self) -> Vec<CMatrix> {
        (0..self.dim())
            .map(|j| self.functional_calculus(|a| I * a.coords()[j]))
            .collect()
    }

    pub fn to_rep(&self) -> Result<UnitaryRep> {
        UnitaryRep::new(abelian(self.dim()), self.generators(), false, "spectral-measure")
    }
}

/// `π(v) = Σ_k e^{i⟨α_k, v⟩} P_k`.
pub fn rep_from_measure(measure: &SpectralMeasureDiscrete, v: &Vector) -> Result<CMatrix> {
    check_dims(measure.dim(), v.dim(), "rep_from_measure")?;
    Ok(measure.functional_calculus(|a| Complex64::from_polar(1.0, a.pair(v))))
}

/// `s = x + iy` in the tube `E + iB(X)⁰`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeElement {
    pub x: Vector,
    pub y: Vector,
}

impl TubeElement {
    pub fn new(x: Vector, y: Vector) -> Result<Self> {
        check_dims(x.dim(), y.dim(), "tube element")?;
        Ok(Self { x, y })
    }

    /// `(x + iy)* = −x + iy`.
    pub fn star(&self) -> Self {
        Self { x: self.x.scale(-1.0), y: self.y.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { x: self.x.add(&other.x), y: self.y.add(&other.y) }
    }

    /// Shift by a real group element.
    pub fn shift(&self, v: &Vector) -> Self {
        Self { x: self.x.add(v), y: self.y.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    /// `‖π̂(s)‖`, from the singular values.
    pub norm: f64,
    /// `e^{−inf⟨X, y⟩}`.
    pub bound: f64,
    pub satisfied: bool,
}

/// Relative slack when comparing a computed norm to its bound.
pub const NORM_SLACK: f64 = 1e-12;

fn extension_matrix(measure: &SpectralMeasureDiscrete, s: &TubeElement) -> CMatrix {
    measure.functional_calculus(|a| (c(-a.pair(&s.y), a.pair(&s.x))).exp())
}

/// Checks `y ∈ B(X)⁰` and that the measure lives on `X`.
pub fn check_tube(measure: &SpectralMeasureDiscrete, domain: &ConvexSetV, s: &TubeElement) -> Result<()> {
    check_dims(measure.dim(), domain.dim(), "declared set")?;
    check_dims(measure.dim(), s.x.dim(), "tube element")?;
    if !domain.in_domain_interior(&s.y)? {
        return precondition(format!("y = {:?} is not in the interior of B(X)", s.y.coords()));
    }
    let tol = domain.tolerances().mem;
    for (k, a) in measure.support().enumerate() {
        let m = lp_membership(domain, &a.alpha)?;
        if m.distance > tol {
            return precondition(format!(
                "atom {k} at {:?} lies outside X (distance {:e})",
                a.alpha.coords(),
                m.distance
            ));
        }
    }
    Ok(())
}

/// `π̂(x + iy) = Σ_k e^{i⟨α_k, x⟩ − ⟨α_k, y⟩} P_k` with its norm and the bound
/// `e^{−inf⟨X, y⟩}` for the declared `X ⊇ {α_k}`.
pub fn semigroup_extension(
    measure: &SpectralMeasureDiscrete,
    domain: &ConvexSetV,
    s: &TubeElement,
) -> Result<(CMatrix, NormReport)> {
    check_tube(measure, domain, s)?;
    let m = extension_matrix(measure, s);
    let norm = op_norm(&m);
    let ExtendedReal::Finite(sx) = support_function(domain, &s.y)? else {
        return precondition("y is outside B(X)");
    };
    let bound = sx.exp();
    Ok((m, NormReport { norm, bound, satisfied: norm <= bound * (1.0 + NORM_SLACK) }))
}

/// `e^{−min_k ⟨α_k, y⟩}` over atoms with `P_k ≠ 0`, the exact norm of `π̂(x + iy)`.
pub fn exact_extension_norm(measure: &SpectralMeasureDiscrete, y: &Vector) -> Result<f64> {
    check_dims(measure.dim(), y.dim(), "exact_extension_norm")?;
    let min = measure.support().map(|a| a.alpha.pair(y)).fold(f64::INFINITY, f64::min);
    Ok((-min).exp())
}

/// Agreement of `∂/∂x_j` (real step) with `−i ∂/∂y_j` (imaginary step) for the
/// entries of `s ↦ π̂(s)`, relative to the derivative's size.
pub fn holomorphy_residual(measure: &SpectralMeasureDiscrete, s: &TubeElement, j: usize, h: f64) -> Result<f64> {
    let d = measure.dim();
    if j >= d {
        return input(format!("coordinate {j} out of range for dimension {d}"));
    }
    check_dims(d, s.x.dim(), "holomorphy_residual")?;
    let e = Vector::basis(d, j).scale(h);
    let zero = Vector::zeros(d);
    let at = |dx: &Vector, dy: &Vector| {
        extension_matrix(measure, &TubeElement { x: s.x.add(dx), y: s.y.add(dy) })
    };
    let dx = (at(&e, &zero) - at(&e.scale(-1.0), &zero)) / c(2.0 * h, 0.0);
    let dy = (at(&zero, &e) - at(&zero, &e.scale(-1.0))) / c(0.0, 2.0 * h);
    let scale = dx.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let diff = (&dx - &dy).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    Ok(diff / (1.0 + scale))
}

/// `conv{α_k : P_k ≠ 0}`, the momentum set of the representation.
pub fn momentum_set_of_measure(measure: &SpectralMeasureDiscrete) -> Result<ConvexSetV> {
    let pts: Vec<DualFunctional> = measure.support().map(|a| a.alpha.clone()).collect();
    if pts.is_empty() {
        return Err(Error::Computation("measure has no nonzero atoms".into()));
    }
    ConvexSetV::new(pts, Vec::new())
}

/// Eigenvalues of one generator that were merged into a single atom although
/// they were numerically distinct.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterEvent {
    pub atom: usize,
    pub generator: usize,
    pub values: Vec<f64>,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovery {
    pub measure: SpectralMeasureDiscrete,
    pub clusters: Vec<ClusterEvent>,
}

/// Eigenvalue spread below this is rounding noise, not a merge.
fn noise_level(scale: f64, n: usize) -> f64 {
    1e3 * f64::EPSILON * (1.0 + scale) * n as f64
}

/// Splits sorted eigenvalues into runs whose consecutive gaps are at most `tol`.
fn cluster_sorted(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Joint spectral decomposition of commuting skew-Hermitian generators: the
/// Hermitian family `H_j = −i A_j` is diagonalized one generator at a time
/// inside the eigenspaces of the previous ones. Atoms are the joint
/// eigenvalue tuples, so `A_j = i Σ_k ⟨α_k, e_j⟩ P_k`.
pub fn recover_measure(generators: &[CMatrix]) -> Result<Recovery> {
    let Some(first) = generators.first() else {
        return input("recover_measure needs at least one generator");
    };
    let n = first.nrows();
    if n == 0 {
        return input("generators must be non-empty matrices");
    }
    for (j, a) in generators.iter().enumerate() {
        if a.shape() != (n, n) {
            return input(format!("generator {j} is not {n}×{n}"));
        }
        let defect = skew_hermitian_defect(a);
        if defect > crate::unirep::SKEW_TOL * (1.0 + op_norm(a)) {
            return input(format!("generator {j} is not skew-Hermitian (defect {defect:e})"));
        }
    }
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            let r = op_norm(&commutator(&generators[i], &generators[j]));
            if r > COMMUTATOR_TOL {
                return precondition(format!("generators {i} and {j} do not commute (‖[A_{i}, A_{j}]‖ = {r:e})"));
            }
        }
    }
    let hermitian: Vec<CMatrix> = generators
        .iter()
        .map(|a| {
            let h = a * (-I);
            (&h + h.adjoint()).scale(0.5)
        })
        .collect();

    let mut blocks: Vec<CMatrix> = vec![identity(n)];
    for h in &hermitian {
        let mut next = Vec::with_capacity(blocks.len());
        for u in &blocks {
            let e = eigh(&(u.adjoint() * h * u))?;
            let rotated = u * &e.vectors;
            for range in cluster_sorted(&e.values, CLUSTER_TOL) {
                next.push(rotated.columns(range.start, range.len()).into_owned());
            }
        }
        blocks = next;
    }

    let mut atoms = Vec::with_capacity(blocks.len());
    let mut clusters = Vec::new();
    for (k, u) in blocks.iter().enumerate() {
        let rank = u.ncols() as f64;
        let mut alpha = Vec::with_capacity(hermitian.len());
        for (j, h) in hermitian.iter().enumerate() {
            let compressed = u.adjoint() * h * u;
            alpha.push(compressed.trace().re / rank);
            if u.ncols() > 1 {
                let values = eigh(&compressed)?.values;
                let spread = values[values.len() - 1] - values[0];
                if spread > noise_level(op_norm(h), n) {
                    clusters.push(ClusterEvent { atom: k, generator: j, values, spread });
                }
            }
        }
        atoms.push(Atom { alpha: DualFunctional::new(alpha), projection: u * u.adjoint() });
    }
    Ok(Recovery { measure: SpectralMeasureDiscrete::new(atoms)?, clusters })
}

/// Random measure on `C^N` with `n_atoms` atoms whose `α_k` lie in `[0, 2]^d`
/// at max-distance at least `0.1` from each other. Projections come from a
/// Haar unitary split into consecutive column blocks of random sizes.
pub fn random_measure(seed: u64, dim: usize, space_dim: usize, n_atoms: usize) -> Result<SpectralMeasureDiscrete> {
    if dim == 0 || space_dim == 0 || n_atoms == 0 || n_atoms > space_dim {
        return input(format!(
            "random_measure needs 1 <= n_atoms <= space_dim and dim >= 1 (got dim {dim}, N {space_dim}, atoms {n_atoms})"
        ));
    }
    let mut rng = stream_rng(seed, 0);
    let mut alphas: Vec<DualFunctional> = Vec::with_capacity(n_atoms);
    let mut attempts = 0;
    while alphas.len() < n_atoms {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Computation("could not place separated atoms".into()));
        }
        let a = DualFunctional::new((0..dim).map(|_| 2.0 * rng.random::<f64>()).collect());
        if alphas.iter().all(|b| b.max_abs_diff(&a) >= 0.1) {
            alphas.push(a);
        }
    }
    // Block sizes: one column each, the remaining columns spread at random.
    let mut sizes = vec![1usize; n_atoms];
    for _ in n_atoms..space_dim {
        sizes[rng.random_range(0..n_atoms)] += 1;
    }
    let u = random_unitary(&mut rng, space_dim);
    let mut start = 0;
    let atoms = alphas
        .into_iter()
        .zip(sizes)
        .map(|(alpha, k)| {
            let cols = u.columns(start, k);
            start += k;
            Atom { alpha, projection: cols * cols.adjoint() }
        })
        .collect();
    SpectralMeasureDiscrete::new(atoms)
}

/// Pairs each atom of `a` with the nearest atom of `b` and returns the largest
/// atom distance and projection distance.
pub fn measure_distance(a: &SpectralMeasureDiscrete, b: &SpectralMeasureDiscrete) -> Result<(f64, f64)> {
    check_dims(a.dim(), b.dim(), "measure_distance")?;
    check_dims(a.space_dim(), b.space_dim(), "measure_distance")?;
    let (sa, sb): (Vec<_>, Vec<_>) = (a.support().collect(), b.support().collect());
    if sa.len() != sb.len() {
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    let mut alpha_err: f64 = 0.0;
    let mut proj_err: f64 = 0.0;
    for x in &sa {
        let y = sb
            .iter()
            .min_by(|p, q| p.alpha.max_abs_diff(&x.alpha).total_cmp(&q.alpha.max_abs_diff(&x.alpha)))
            .expect("non-empty");
        alpha_err = alpha_err.max(y.alpha.max_abs_diff(&x.alpha));
        proj_err = proj_err.max(op_norm(&(&y.projection - &x.projection)));
    }
    Ok((alpha_err, proj_err))
}
