//! Reproducing kernel Hilbert spaces of holomorphic functions on open sets
//! `M ⊆ C^n`, with a group acting on `M` and leaving the kernel invariant.
//!
//! The representation is `π(g)f(z) = f(z.g)`, so `π(g)K_m = K_{m.g⁻¹}`. On a
//! finite set of points the span of the `K_{z_i}` stands in for the Hilbert
//! space, and all norms are taken in its Gram inner product.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::convex::{support_function, ConvexSetV, DualFunctional, Vector};
use crate::error::{check_dims, input, precondition, Error, Result};
use crate::linalg::{c, eigh, op_norm, CMatrix, CVector, I};
use crate::momentum::{MomentumSetEstimate, OuterValue};
use crate::sampling::stream_rng;
use crate::unirep::{spectral_sup, UnitaryRep};

/// A point of `M ⊆ C^n`.
pub type Point = Vec<Complex64>;

pub type KernelFn = dyn Fn(&[Complex64], &[Complex64]) -> Result<Complex64> + Send + Sync;

/// Gram matrices count as positive semidefinite down to this eigenvalue.
pub const PSD_TOL: f64 = 1e-9;
/// Smallest Gram eigenvalue accepted for norm computations.
pub const GRAM_MIN_EIGENVALUE: f64 = 1e-8;
/// Points closer than this (max-norm) are duplicates.
pub const POINT_TOL: f64 = 1e-12;

/// `K : M × M̄ → C`, holomorphic in `z` and antiholomorphic in `w`.
#[derive(Clone)]
pub struct KernelSpec {
    label: String,
    domain_dim: usize,
    eval: Arc<KernelFn>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("label", &self.label)
            .field("domain_dim", &self.domain_dim)
            .finish()
    }
}

impl KernelSpec {
    pub fn new(
        label: impl Into<String>,
        domain_dim: usize,
        eval: impl Fn(&[Complex64], &[Complex64]) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if domain_dim == 0 {
            return input("kernel domain needs dimension >= 1");
        }
        Ok(Self { label: label.into(), domain_dim, eval: Arc::new(eval) })
    }

    /// Fock (Bargmann) kernel `exp(Σ z_k conj(w_k))` on `C^n`.
    pub fn fock(n: usize) -> Result<Self> {
        Self::new(format!("fock{n}"), n, |z, w| {
            Ok(z.iter().zip(w).map(|(a, b)| a * b.conj()).sum::<Complex64>().exp())
        })
    }

    /// Szegő kernel `1 / (1 − z conj(w))` on the unit disk.
    pub fn szego() -> Self {
        Self::new("szego", 1, |z, w| {
            for p in [z[0], w[0]] {
                if p.norm() >= 1.0 {
                    return Err(Error::Domain(format!("point {p} is outside the unit disk")));
                }
            }
            Ok((c(1.0, 0.0) - z[0] * w[0].conj()).inv())
        })
        .expect("dimension 1")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn eval(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        check_dims(self.domain_dim, z.len(), "kernel argument z")?;
        check_dims(self.domain_dim, w.len(), "kernel argument w")?;
        let k = (self.eval)(z, w)?;
        if !k.re.is_finite() || !k.im.is_finite() {
            return Err(Error::Computation(format!("{}: non-finite kernel value", self.label)));
        }
        Ok(k)
    }

    /// `max |K(z, w) − conj K(w, z)|` over pairs of `points`.
    pub fn hermitian_defect(&self, points: &[Point]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for z in points {
            for w in points {
                worst = worst.max((self.eval(z, w)? - self.eval(w, z)?.conj()).norm());
            }
        }
        Ok(worst)
    }
}

/// A right action of a Lie group `G` on `M`, through one-parameter flows.
pub trait GroupAction: Send + Sync {
    fn label(&self) -> &str;
    fn algebra_dim(&self) -> usize;
    fn domain_dim(&self) -> usize;

    /// `m.exp_G(t x)`.
    fn flow(&self, m: &[Complex64], x: &[f64], t: f64) -> Result<Point>;

    /// The same formula at complex time, when it is holomorphic in `t`
    /// near 0. Used for differentiation only.
    fn holomorphic_flow(&self, _m: &[Complex64], _x: &[f64], _s: Complex64) -> Option<Result<Point>> {
        None
    }

    /// The declared holomorphic extension `m.s` for `s` in the closed upper
    /// half plane. `None` when `x` does not admit it.
    fn complex_flow(&self, _m: &[Complex64], _x: &[f64], _s: Complex64) -> Option<Result<Point>> {
        None
    }

    /// `m.exp_G(y)`.
    fn act(&self, m: &[Complex64], y: &[f64]) -> Result<Point> {
        self.flow(m, y, 1.0)
    }
}

/// Torus `T^n` acting on `C^n` by `m.exp(tx) = (e^{−i t x_k} m_k)_k`.
///
/// The extension to `Im s ≥ 0` is `m.(s x) = (e^{−i s x_k} m_k)`, which has
/// modulus `e^{x_k Im s}|m_k|`; it is declared exactly when every `x_k ≤ 0`.
#[derive(Debug, Clone)]
pub struct RotationAction {
    n: usize,
}

impl RotationAction {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    fn at(&self, m: &[Complex64], x: &[f64], s: Complex64) -> Result<Point> {
        check_dims(self.n, m.len(), "rotation point")?;
        check_dims(self.n, x.len(), "rotation direction")?;
        Ok(m.iter().zip(x).map(|(mk, xk)| (-I * s * xk).exp() * mk).collect())
    }
}

impl GroupAction for RotationAction {
    fn label(&self) -> &str {
        "rotation"
    }

    fn algebra_dim(&self) -> usize {
        self.n
    }

    fn domain_dim(&self) -> usize {
        self.n
    }

    fn flow(&self, m: &[Complex64], x: &[f64], t: f64) -> Result<Point> {
        self.at(m, x, c(t, 0.0))
    }

    fn holomorphic_flow(&self, m: &[Complex64], x: &[f64], s: Complex64) -> Option<Result<Point>> {
        Some(self.at(m, x, s))
    }

    fn complex_flow(&self, m: &[Complex64], x: &[f64], s: Complex64) -> Option<Result<Point>> {
        if x.iter().any(|&xk| xk > 0.0) {
            return None;
        }
        if s.im < 0.0 {
            return Some(precondition("complex flow needs Im s >= 0"));
        }
        Some(self.at(m, x, s))
    }
}

/// `R^n` acting on `C^n` by translation `m.exp(tx) = m + t x`.
#[derive(Debug, Clone)]
pub struct TranslationAction {
    n: usize,
}

impl TranslationAction {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl GroupAction for TranslationAction {
    fn label(&self) -> &str {
        "translation"
    }

    fn algebra_dim(&self) -> usize {
        self.n
    }

    fn domain_dim(&self) -> usize {
        self.n
    }

    fn flow(&self, m: &[Complex64], x: &[f64], t: f64) -> Result<Point> {
        check_dims(self.n, m.len(), "translation point")?;
        check_dims(self.n, x.len(), "translation direction")?;
        Ok(m.iter().zip(x).map(|(mk, xk)| mk + t * xk).collect())
    }

    fn holomorphic_flow(&self, m: &[Complex64], x: &[f64], s: Complex64) -> Option<Result<Point>> {
        Some(Ok(m.iter().zip(x).map(|(mk, xk)| mk + s * xk).collect()))
    }
}

/// `R^d` acting trivially on `C^n`.
#[derive(Debug, Clone)]
pub struct TrivialAction {
    d: usize,
    n: usize,
}

impl TrivialAction {
    pub fn new(d: usize, n: usize) -> Self {
        Self { d, n }
    }
}

impl GroupAction for TrivialAction {
    fn label(&self) -> &str {
        "trivial"
    }

    fn algebra_dim(&self) -> usize {
        self.d
    }

    fn domain_dim(&self) -> usize {
        self.n
    }

    fn flow(&self, m: &[Complex64], x: &[f64], _t: f64) -> Result<Point> {
        check_dims(self.d, x.len(), "trivial action direction")?;
        Ok(m.to_vec())
    }

    fn holomorphic_flow(&self, m: &[Complex64], x: &[f64], _s: Complex64) -> Option<Result<Point>> {
        Some(self.flow(m, x, 0.0))
    }

    fn complex_flow(&self, m: &[Complex64], x: &[f64], _s: Complex64) -> Option<Result<Point>> {
        Some(self.flow(m, x, 0.0))
    }
}

/// Max over samples of `|act(act(m, y₁), y₂) − act(m, y₁ + y₂)|`. This is the
/// right-action law for abelian groups, where `exp(y₁)exp(y₂) = exp(y₁+y₂)`.
pub fn abelian_action_residual(action: &dyn GroupAction, points: &[Point], ys: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in points {
        for y1 in ys {
            for y2 in ys {
                let a = action.act(&action.act(m, y1)?, y2)?;
                let sum: Vec<f64> = y1.iter().zip(y2).map(|(p, q)| p + q).collect();
                let b = action.act(m, &sum)?;
                for (p, q) in a.iter().zip(&b) {
                    worst = worst.max((p - q).norm());
                }
            }
        }
    }
    Ok(worst)
}

fn check_distinct(points: &[Point]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            let d = p.iter().zip(q).fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
            if d <= POINT_TOL {
                return input(format!("points {i} and {j} coincide"));
            }
        }
    }
    Ok(())
}

fn kernel_matrix(kernel: &KernelSpec, rows: &[Point], cols: &[Point]) -> Result<CMatrix> {
    let mut m = CMatrix::zeros(rows.len(), cols.len());
    for (i, z) in rows.iter().enumerate() {
        for (j, w) in cols.iter().enumerate() {
            m[(i, j)] = kernel.eval(z, w)?;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct GramReport {
    pub gram: CMatrix,
    pub min_eigenvalue: f64,
    pub psd: bool,
}

/// `G_{ij} = K(z_i, z_j)` with a positive-semidefiniteness verdict.
pub fn gram_matrix(kernel: &KernelSpec, points: &[Point]) -> Result<GramReport> {
    if points.is_empty() {
        return input("gram_matrix needs at least one point");
    }
    check_distinct(points)?;
    let gram = kernel_matrix(kernel, points, points)?;
    let min_eigenvalue = eigh(&gram)?.min();
    Ok(GramReport { gram, min_eigenvalue, psd: min_eigenvalue >= -PSD_TOL })
}

/// `span{K_{z_i}}` with its Gram matrix.
#[derive(Debug, Clone)]
pub struct FiniteModel {
    kernel: KernelSpec,
    points: Vec<Point>,
    gram: CMatrix,
    min_eigenvalue: f64,
}

impl FiniteModel {
    /// Rejects duplicate points and Gram matrices that are not PSD.
    pub fn new(kernel: &KernelSpec, points: Vec<Point>) -> Result<Self> {
        let g = gram_matrix(kernel, &points)?;
        if !g.psd {
            return input(format!(
                "{}: Gram matrix has eigenvalue {:e} < −{PSD_TOL:e}",
                kernel.label, g.min_eigenvalue
            ));
        }
        Ok(Self { kernel: kernel.clone(), points, gram: g.gram, min_eigenvalue: g.min_eigenvalue })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Lower Cholesky factor, failing when the Gram matrix is too close to
    /// singular for norm computations.
    fn cholesky(&self) -> Result<CMatrix> {
        if self.min_eigenvalue < GRAM_MIN_EIGENVALUE {
            return Err(Error::Computation(format!(
                "Gram matrix is ill-conditioned (min eigenvalue {:e} < {GRAM_MIN_EIGENVALUE:e}); \
                 use fewer or better separated points",
                self.min_eigenvalue
            )));
        }
        let sym = (&self.gram + self.gram.adjoint()).scale(0.5);
        sym.cholesky()
            .map(|ch| ch.l())
            .ok_or_else(|| Error::Computation("Cholesky factorization of the Gram matrix failed".into()))
    }

    /// Largest `c†Hc / c†Gc`, i.e. the squared norm of an operator whose
    /// pulled-back form is `H`.
    fn relative_norm2(&self, h: &CMatrix) -> Result<f64> {
        let l = self.cholesky()?;
        let l_inv = l
            .try_inverse()
            .ok_or_else(|| Error::Computation("Gram factor is singular".into()))?;
        let m = &l_inv * h * l_inv.adjoint();
        Ok(eigh(&m)?.max().max(0.0))
    }

    /// Operator norm of the compression to the model span whose matrix
    /// against the kernel vectors is `d`.
    fn relative_op_norm(&self, d: &CMatrix) -> Result<f64> {
        let l = self.cholesky()?;
        let l_inv = l
            .try_inverse()
            .ok_or_else(|| Error::Computation("Gram factor is singular".into()))?;
        Ok(op_norm(&(&l_inv * d * l_inv.adjoint())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReproducingCheck {
    pub residual: f64,
    pub value: Complex64Serde,
}

/// `(re, im)` pair for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex64Serde(pub f64, pub f64);

impl From<Complex64> for Complex64Serde {
    fn from(z: Complex64) -> Self {
        Self(z.re, z.im)
    }
}

/// `|⟨f, K_z⟩ − f(z)|` for `f = Σ c_i K_{z_i}`, with `z` a model point.
/// The left side uses the Gram matrix, the right side fresh kernel values.
pub fn reproducing_check(model: &FiniteModel, coefficients: &[Complex64], z: &[Complex64]) -> Result<ReproducingCheck> {
    check_dims(model.points.len(), coefficients.len(), "reproducing_check coefficients")?;
    let Some(k) = model
        .points
        .iter()
        .position(|p| p.len() == z.len() && p.iter().zip(z).all(|(a, b)| (a - b).norm() <= POINT_TOL))
    else {
        return precondition("reproducing_check: z is not a model point");
    };
    let via_gram: Complex64 = (0..coefficients.len()).map(|i| model.gram[(k, i)] * coefficients[i]).sum();
    let mut direct = c(0.0, 0.0);
    for (ci, zi) in coefficients.iter().zip(&model.points) {
        direct += ci * model.kernel.eval(z, zi)?;
    }
    Ok(ReproducingCheck { residual: (via_gram - direct).norm(), value: direct.into() })
}

/// `max |K(z.g, w.g) − K(z, w)|` over group samples `g = exp(y)` and point
/// pairs. Leaving the kernel's domain is reported with the offending sample.
pub fn invariance_residual(
    kernel: &KernelSpec,
    action: &dyn GroupAction,
    group_samples: &[Vec<f64>],
    points: &[Point],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (gi, y) in group_samples.iter().enumerate() {
        let moved: Vec<Point> = points.iter().map(|p| action.act(p, y)).collect::<Result<_>>()?;
        for (i, z) in points.iter().enumerate() {
            for (j, w) in points.iter().enumerate() {
                let k_moved = kernel.eval(&moved[i], &moved[j]).map_err(|e| match e {
                    Error::Domain(msg) => Error::Domain(format!("group sample {gi} moves point {i} or {j}: {msg}")),
                    other => other,
                })?;
                worst = worst.max((k_moved - kernel.eval(z, w)?).norm());
            }
        }
    }
    Ok(worst)
}

const CONTOUR_POINTS: usize = 16;
const CONTOUR_RADIUS: f64 = 0.1;
const FD_STEP: f64 = 1e-4;
const FD_AGREEMENT: f64 = 1e-6;

/// `d/dt|₀ K(m.exp(tx), m)`.
fn flow_derivative(kernel: &KernelSpec, action: &dyn GroupAction, x: &[f64], m: &[Complex64]) -> Result<Complex64> {
    let probe = action.holomorphic_flow(m, x, c(0.0, 0.0));
    if probe.is_some() {
        // Cauchy integral f'(0) = (1/2πi)∮ f(s)/s² ds on a circle of radius r.
        let mut acc = c(0.0, 0.0);
        for k in 0..CONTOUR_POINTS {
            let theta = 2.0 * PI * k as f64 / CONTOUR_POINTS as f64;
            let s = Complex64::from_polar(CONTOUR_RADIUS, theta);
            let p = action.holomorphic_flow(m, x, s).expect("declared above")?;
            acc += kernel.eval(&p, m)? * Complex64::from_polar(1.0, -theta);
        }
        return Ok(acc / (CONTOUR_POINTS as f64 * CONTOUR_RADIUS));
    }
    let f = |t: f64| -> Result<Complex64> { kernel.eval(&action.flow(m, x, t)?, m) };
    let d4 = |h: f64| -> Result<Complex64> {
        Ok((f(-2.0 * h)? - f(2.0 * h)? + (f(h)? - f(-h)?) * 8.0) / (12.0 * h))
    };
    let coarse = d4(FD_STEP)?;
    let fine = d4(FD_STEP / 2.0)?;
    // Richardson: the two estimates differ by O(h⁴).
    if (coarse - fine).norm() > FD_AGREEMENT * (1.0 + fine.norm()) {
        return Err(Error::Computation(format!(
            "finite differences disagree ({coarse} vs {fine}); flow is not smooth enough"
        )));
    }
    Ok(fine + (fine - coarse) / 15.0)
}

/// `Φ([K_m])(x) = (1/i)·(d/dt|₀ K(m.exp(tx), m)) / K(m, m)`.
pub fn kernel_momentum_value(kernel: &KernelSpec, action: &dyn GroupAction, x: &[f64], m: &[Complex64]) -> Result<f64> {
    check_dims(action.algebra_dim(), x.len(), "kernel_momentum_value direction")?;
    check_dims(kernel.domain_dim(), m.len(), "kernel_momentum_value point")?;
    let kmm = kernel.eval(m, m)?;
    if !(kmm.re > 0.0) {
        return precondition(format!("K(m, m) = {kmm} is not positive; m is outside Ω"));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let phi = flow_derivative(kernel, action, x, m)? / (I * kmm.re);
    if phi.im.abs() > 1e-8 * (1.0 + phi.re.abs()) {
        return Err(Error::Computation(format!("momentum value {phi} is not real")));
    }
    Ok(phi.re)
}

/// The vector `Φ([K_m]) ∈ R^d`.
pub fn kernel_momentum_vector(kernel: &KernelSpec, action: &dyn GroupAction, m: &[Complex64]) -> Result<DualFunctional> {
    let d = action.algebra_dim();
    let coords = (0..d)
        .map(|j| kernel_momentum_value(kernel, action, Vector::basis(d, j).coords(), m))
        .collect::<Result<_>>()?;
    Ok(DualFunctional::new(coords))
}

/// Seeded point generator for `M`.
pub trait PointSampler: Send + Sync {
    fn dim(&self) -> usize;
    fn sample(&self, index: usize, seed: u64) -> Point;
}

/// Polydisk `{|m_k| ≤ R}`. The first `2^n` indices are the corners with
/// every `m_k ∈ {0, R}`; later indices are uniform in each disk.
#[derive(Debug, Clone)]
pub struct PolydiskSampler {
    pub dim: usize,
    pub radius: f64,
}

impl PointSampler for PolydiskSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, index: usize, seed: u64) -> Point {
        use rand::Rng;
        if self.dim < usize::BITS as usize && index < (1usize << self.dim) {
            return (0..self.dim)
                .map(|k| if index >> k & 1 == 1 { c(self.radius, 0.0) } else { c(0.0, 0.0) })
                .collect();
        }
        let mut rng = stream_rng(seed, index as u64);
        (0..self.dim)
            .map(|_| {
                let r = self.radius * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSupportRow {
    pub direction: Vector,
    pub inner: f64,
    pub outer: Option<f64>,
    /// Whether `direction` admits the declared upper-half-plane extension.
    pub extension: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelMomentumSet {
    pub inner: ConvexSetV,
    pub table: Vec<KernelSupportRow>,
    /// Largest `outer − inner` over extension directions with an outer value.
    pub extension_gap: Option<f64>,
    /// Sampled points with `K(m, m) ≤ 0`.
    pub skipped: usize,
    pub n_points: usize,
}

impl KernelMomentumSet {
    /// The estimate restricted to extension directions with outer values.
    pub fn extension_estimate(&self) -> Result<MomentumSetEstimate> {
        let outer = self
            .table
            .iter()
            .filter(|r| r.extension)
            .filter_map(|r| r.outer.map(|value| OuterValue { direction: r.direction.clone(), value }))
            .collect();
        MomentumSetEstimate::from_parts(self.inner.clone(), outer)
    }
}

/// Checks on sample points that the declared extension does not push points
/// away from the fixed origin: `|m.(ib)| ≤ |m|` for a few `b > 0`.
pub fn extension_contracts(action: &dyn GroupAction, x: &[f64], points: &[Point]) -> Result<bool> {
    for m in points {
        let n0 = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
        for b in [0.1, 1.0] {
            let Some(p) = action.complex_flow(m, x, c(0.0, b)) else {
                return Ok(false);
            };
            let n1 = p?.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if n1 > n0 * (1.0 + 1e-12) + 1e-300 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Inner hull of `Φ([K_m])` over sampled `m ∈ Ω`, with outer values from a
/// truncated matrix representation when one is supplied.
pub fn kernel_momentum_set(
    kernel: &KernelSpec,
    action: &dyn GroupAction,
    directions: &[Vector],
    sampler: &dyn PointSampler,
    n_points: usize,
    seed: u64,
    oracle: Option<&UnitaryRep>,
) -> Result<KernelMomentumSet> {
    if directions.is_empty() {
        return input("kernel_momentum_set needs at least one direction");
    }
    if n_points == 0 {
        return input("kernel_momentum_set needs n_points >= 1");
    }
    check_dims(kernel.domain_dim(), sampler.dim(), "sampler dimension")?;
    let d = action.algebra_dim();
    for x in directions {
        check_dims(d, x.dim(), "kernel_momentum_set direction")?;
    }
    let samples: Vec<Option<DualFunctional>> = (0..n_points)
        .into_par_iter()
        .map(|i| {
            let m = sampler.sample(i, seed);
            let kmm = kernel.eval(&m, &m)?;
            if !(kmm.re > 0.0) {
                return Ok(None);
            }
            kernel_momentum_vector(kernel, action, &m).map(Some)
        })
        .collect::<Result<_>>()?;
    let skipped = samples.iter().filter(|s| s.is_none()).count();
    let points: Vec<DualFunctional> = samples.into_iter().flatten().collect();
    if points.is_empty() {
        return Err(Error::Computation("sampler produced no points with K(m, m) > 0".into()));
    }
    let inner = ConvexSetV::new(points, Vec::new())?;
    let probe: Vec<Point> = (0..n_points.min(16)).map(|i| sampler.sample(i, seed)).collect();
    let mut table = Vec::with_capacity(directions.len());
    let mut gap: Option<f64> = None;
    for x in directions {
        let s_inner = support_function(&inner, x)?.finite().expect("bounded hull");
        let outer = oracle.map(|r| spectral_sup(r, x.coords())).transpose()?;
        let extension = extension_contracts(action, x.coords(), &probe)?;
        if extension {
            if let Some(o) = outer {
                gap = Some(gap.map_or(o - s_inner, |g: f64| g.max(o - s_inner)));
            }
        }
        table.push(KernelSupportRow { direction: x.clone(), inner: s_inner, outer, extension });
    }
    Ok(KernelMomentumSet { inner, table, extension_gap: gap, skipped, n_points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionReport {
    /// `‖π̂_x(ib)‖` on the model span.
    pub lhs_norm: f64,
    /// `exp(b · sup⟨Φ(Ω), −x⟩)` with the sup over model points.
    pub rhs_bound: f64,
    pub sup_value: f64,
    pub verdict: bool,
}

/// Relative slack allowed in the contraction inequality.
pub const CONTRACTION_SLACK: f64 = 1e-6;

fn star_flow(action: &dyn GroupAction, m: &[Complex64], x: &[f64], b: f64) -> Result<Point> {
    // (ib)* = −conj(ib) = ib
    match action.complex_flow(m, x, c(0.0, b)) {
        Some(p) => p,
        None => precondition(format!(
            "{} declares no upper-half-plane extension along {x:?}",
            action.label()
        )),
    }
}

/// Norm of `π̂_x(ib) : K_{z_i} ↦ K_{z_i.(ib)*}` in the Gram inner product,
/// compared with `exp(b · sup⟨Φ(Ω), −x⟩)`.
pub fn contraction_check(
    action: &dyn GroupAction,
    x: &[f64],
    b: f64,
    model: &FiniteModel,
) -> Result<ContractionReport> {
    if !(b >= 0.0) || !b.is_finite() {
        return input(format!("b = {b} must be a finite nonnegative number"));
    }
    check_dims(action.algebra_dim(), x.len(), "contraction_check direction")?;
    let kernel = &model.kernel;
    let moved: Vec<Point> = model
        .points
        .iter()
        .map(|z| star_flow(action, z, x, b))
        .collect::<Result<_>>()?;
    let h = kernel_matrix(kernel, &moved, &moved)?;
    let lhs_norm = model.relative_norm2(&h)?.sqrt();
    let neg_x: Vec<f64> = x.iter().map(|v| -v).collect();
    let mut sup_value = f64::NEG_INFINITY;
    for z in &model.points {
        if kernel.eval(z, z)?.re > 0.0 {
            sup_value = sup_value.max(kernel_momentum_value(kernel, action, &neg_x, z)?);
        }
    }
    if !sup_value.is_finite() {
        return Err(Error::Computation("model has no points with K(m, m) > 0".into()));
    }
    let rhs_bound = (b * sup_value).exp();
    Ok(ContractionReport { lhs_norm, rhs_bound, sup_value, verdict: lhs_norm <= rhs_bound * (1.0 + CONTRACTION_SLACK) })
}

/// `‖π̂_x(ib₁)π̂_x(ib₂) − π̂_x(i(b₁+b₂))‖` compressed to the model span, in the
/// Gram operator norm. The difference enters linearly, so roundoff stays at
/// machine scale.
pub fn semigroup_residual(action: &dyn GroupAction, x: &[f64], b1: f64, b2: f64, model: &FiniteModel) -> Result<f64> {
    if !(b1 >= 0.0 && b2 >= 0.0) {
        return input("semigroup_residual needs b1, b2 >= 0");
    }
    let kernel = &model.kernel;
    let mut u = Vec::with_capacity(model.points.len());
    let mut v = Vec::with_capacity(model.points.len());
    for z in &model.points {
        u.push(star_flow(action, &star_flow(action, z, x, b2)?, x, b1)?);
        v.push(star_flow(action, z, x, b1 + b2)?);
    }
    let d = kernel_matrix(kernel, &model.points, &u)? - kernel_matrix(kernel, &model.points, &v)?;
    model.relative_op_norm(&d)
}

/// Coefficients of `K_m` for the Fock kernel in the orthonormal monomial
/// basis `z^n/√n!`, truncated to `N` terms: `conj(m)^n / √n!`.
pub fn fock_coefficients(m: Complex64, n: usize) -> CVector {
    let mut out = CVector::zeros(n);
    let mut term = c(1.0, 0.0);
    for k in 0..n {
        out[k] = term;
        term = term * m.conj() / ((k + 1) as f64).sqrt();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momentum::momentum_map;
    use crate::unirep::{fock_rotation_truncated, ProjectiveVector};

    fn pt(re: f64, im: f64) -> Point {
        vec![c(re, im)]
    }

    #[test]
    fn gram_examples() {
        let k = KernelSpec::fock(1).unwrap();
        let g = gram_matrix(&k, &[pt(0.0, 0.0)]).unwrap();
        assert_eq!(g.gram[(0, 0)], c(1.0, 0.0));
        assert!(g.psd);
        let g = gram_matrix(&k, &[pt(0.0, 0.0), pt(1.0, 0.0)]).unwrap();
        assert!((g.gram[(1, 1)].re - std::f64::consts::E).abs() < 1e-15);
        assert!(g.min_eigenvalue > 0.0);

        let bad = KernelSpec::new("z+conj(w)", 1, |z, w| Ok(z[0] + w[0].conj())).unwrap();
        assert!(!gram_matrix(&bad, &[pt(0.0, 0.0), pt(1.0, 0.0)]).unwrap().psd);
        assert!(matches!(gram_matrix(&k, &[pt(1.0, 0.0), pt(1.0, 0.0)]), Err(Error::Input(_))));
    }

    #[test]
    fn reproducing_examples() {
        let k = KernelSpec::fock(1).unwrap();
        let pts: Vec<Point> = (0..8).map(|i| pt(0.3 * i as f64 - 1.0, 0.2 * (i % 3) as f64)).collect();
        let model = FiniteModel::new(&k, pts.clone()).unwrap();
        let mut e1 = vec![c(0.0, 0.0); 8];
        e1[1] = c(1.0, 0.0);
        let r = reproducing_check(&model, &e1, &pts[1]).unwrap();
        assert_eq!(r.residual, 0.0);
        let coeffs: Vec<Complex64> = (0..8).map(|i| c((i as f64).sin(), (2.0 * i as f64).cos())).collect();
        assert!(reproducing_check(&model, &coeffs, &pts[5]).unwrap().residual <= 1e-10);
        assert_eq!(reproducing_check(&model, &[c(0.0, 0.0); 8], &pts[0]).unwrap().residual, 0.0);
        assert!(matches!(reproducing_check(&model, &coeffs, &pt(9.0, 9.0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn invariance_examples() {
        let k = KernelSpec::fock(1).unwrap();
        let pts: Vec<Point> = vec![pt(0.3, 0.1), pt(-1.0, 0.5), pt(0.0, -0.7)];
        let ys: Vec<Vec<f64>> = vec![vec![0.4], vec![2.0], vec![-1.3]];
        assert!(invariance_residual(&k, &RotationAction::new(1), &ys, &pts).unwrap() <= 1e-12);
        assert!(invariance_residual(&k, &TranslationAction::new(1), &ys, &pts).unwrap() > 1e-3);
        assert_eq!(invariance_residual(&k, &TranslationAction::new(1), &[vec![0.0]], &pts).unwrap(), 0.0);
        let szego = KernelSpec::szego();
        let e = invariance_residual(&szego, &TranslationAction::new(1), &[vec![0.9]], &pts[..1]);
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn action_laws() {
        let a = RotationAction::new(2);
        let pts = vec![vec![c(0.3, 0.1), c(-1.0, 2.0)]];
        let ys = vec![vec![0.2, -0.4], vec![1.5, 3.0]];
        assert!(abelian_action_residual(&a, &pts, &ys).unwrap() < 1e-14);
        assert_eq!(a.flow(&pts[0], &[1.0, 1.0], 0.0).unwrap(), pts[0]);
    }

    #[test]
    fn fock_rotation_momentum() {
        let k = KernelSpec::fock(1).unwrap();
        let a = RotationAction::new(1);
        assert_eq!(kernel_momentum_value(&k, &a, &[0.0], &[c(1.0, 1.0)]).unwrap(), 0.0);
        assert!(kernel_momentum_value(&k, &a, &[1.0], &[c(0.0, 0.0)]).unwrap().abs() < 1e-14);
        for m in [c(0.5, 0.0), c(-1.0, 1.2), c(1.9, -0.3)] {
            let phi = kernel_momentum_value(&k, &a, &[1.0], &[m]).unwrap();
            assert!((phi + m.norm_sqr()).abs() < 1e-10, "{phi} vs {}", -m.norm_sqr());
        }
    }

    #[test]
    fn finite_difference_path_agrees() {
        // A wrapper hiding the holomorphic flow forces finite differences.
        struct RealOnly(RotationAction);
        impl GroupAction for RealOnly {
            fn label(&self) -> &str {
                "real-only"
            }
            fn algebra_dim(&self) -> usize {
                1
            }
            fn domain_dim(&self) -> usize {
                1
            }
            fn flow(&self, m: &[Complex64], x: &[f64], t: f64) -> Result<Point> {
                self.0.flow(m, x, t)
            }
        }
        let k = KernelSpec::fock(1).unwrap();
        let m = c(1.2, -0.4);
        let phi = kernel_momentum_value(&k, &RealOnly(RotationAction::new(1)), &[1.0], &[m]).unwrap();
        assert!((phi + m.norm_sqr()).abs() < 1e-8);
    }

    #[test]
    fn matches_truncated_oracle() {
        let k = KernelSpec::fock(1).unwrap();
        let rep = fock_rotation_truncated(64).unwrap();
        for m in [c(0.3, 0.2), c(-1.5, 1.0), c(0.0, 2.0)] {
            let v = ProjectiveVector::new(fock_coefficients(m, 64)).unwrap();
            let oracle = momentum_map(&rep, &v).unwrap()[0];
            let phi = kernel_momentum_value(&k, &RotationAction::new(1), &[1.0], &[m]).unwrap();
            assert!((phi - oracle).abs() < 1e-6);
        }
    }

    #[test]
    fn outside_omega_is_precondition() {
        let k = KernelSpec::new("vanishing", 1, |z, w| Ok(z[0] * w[0].conj())).unwrap();
        let r = kernel_momentum_value(&k, &RotationAction::new(1), &[1.0], &[c(0.0, 0.0)]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn fock_hull_and_contraction() {
        let k = KernelSpec::fock(1).unwrap();
        let a = RotationAction::new(1);
        let rep = fock_rotation_truncated(64).unwrap();
        let sampler = PolydiskSampler { dim: 1, radius: 2.0 };
        let dirs = vec![Vector::new(vec![1.0]), Vector::new(vec![-1.0])];
        let set = kernel_momentum_set(&k, &a, &dirs, &sampler, 200, 5, Some(&rep)).unwrap();
        assert_eq!(set.skipped, 0);
        assert!((set.table[0].inner - 4.0).abs() < 1e-8);
        assert!(set.table[1].inner.abs() < 1e-12);
        assert!(!set.table[0].extension);
        assert!(set.table[1].extension);
        assert!(set.extension_gap.unwrap().abs() < 1e-6);

        let model = FiniteModel::new(&k, (0..6).map(|i| sampler.sample(i, 5)).collect()).unwrap();
        for b in [0.0, 0.1, 1.0, 10.0] {
            let r = contraction_check(&a, &[-1.0], b, &model).unwrap();
            assert!(r.verdict, "{r:?}");
            assert!(r.lhs_norm <= 1.0 + 1e-6);
        }
        let r0 = contraction_check(&a, &[-1.0], 0.0, &model).unwrap();
        assert!((r0.lhs_norm - 1.0).abs() < 1e-8);
        assert!(matches!(contraction_check(&a, &[1.0], 1.0, &model), Err(Error::Precondition(_))));
        assert!(semigroup_residual(&a, &[-1.0], 0.3, 0.7, &model).unwrap() < 1e-8);
    }

    #[test]
    fn trivial_action_has_zero_momentum() {
        let k = KernelSpec::fock(1).unwrap();
        let sampler = PolydiskSampler { dim: 1, radius: 1.0 };
        let set = kernel_momentum_set(
            &k,
            &TrivialAction::new(1, 1),
            &[Vector::new(vec![1.0])],
            &sampler,
            20,
            0,
            None,
        )
        .unwrap();
        assert!(set.inner.points().iter().all(|p| p[0].abs() < 1e-12));
    }

    #[test]
    fn hermitian_symmetry_of_shipped_kernels() {
        let pts: Vec<Point> = vec![pt(0.3, 0.1), pt(-0.5, 0.5), pt(0.0, -0.7)];
        assert!(KernelSpec::fock(1).unwrap().hermitian_defect(&pts).unwrap() <= 1e-12);
        assert!(KernelSpec::szego().hermitian_defect(&pts).unwrap() <= 1e-12);
    }
}
