use momentumlab::convex::Vector;
use momentumlab::linalg::c;
use momentumlab::momentum::momentum_map;
use momentumlab::rkhs::{
    contraction_check, fock_coefficients, gram_matrix, invariance_residual, kernel_momentum_set,
    kernel_momentum_value, reproducing_check, semigroup_residual, FiniteModel, KernelSpec, PointSampler,
    PolydiskSampler, RotationAction,
};
use momentumlab::sampling::{gaussian_vec, stream_rng};
use momentumlab::unirep::{fock_rotation_truncated, ProjectiveVector};

use crate::config::{positive, CheckTolerances, ScenarioConfig};
use crate::error::{usage, CliError};
use crate::report::{ReportBuilder, Table};

pub const TOLERANCES: &[(&str, f64)] = &[
    ("oracle", 1e-6),
    ("closed_form", 1e-8),
    ("hull", 1e-6),
    ("extension_gap", 1e-6),
    ("contraction", 1e-6),
    ("semigroup", 1e-8),
    ("reproducing", 1e-10),
    ("invariance", 1e-12),
];

const ORACLE_POINTS: usize = 50;
const MODEL_POINTS: usize = 6;
const CONTRACTION_B: [f64; 3] = [0.1, 1.0, 10.0];

pub fn run(cfg: &ScenarioConfig, tol: &CheckTolerances, b: &mut ReportBuilder) -> Result<(), CliError> {
    let radii = cfg.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0]);
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return usage("radii must be a non-empty list of positive numbers");
    }
    let n_points = cfg.n_samples_or(200)?;
    let trunc = positive("truncation", cfg.truncation.unwrap_or(64))?;
    b.parameter("radii", &radii)?;
    b.parameter("n_samples", n_points)?;
    b.parameter("truncation", trunc)?;

    let kernel = KernelSpec::fock(1)?;
    let action = RotationAction::new(1);
    let rep = fock_rotation_truncated(trunc).map_err(|e| CliError::Usage(e.to_string()))?;
    let seed = cfg.seed();

    // Kernel momentum values against the matrix oracle and the closed form.
    let oracle_sampler = PolydiskSampler { dim: 1, radius: 2.0 };
    let (mut oracle_err, mut closed_err) = (0.0_f64, 0.0_f64);
    for i in 0..ORACLE_POINTS {
        let m = oracle_sampler.sample(i, seed)[0];
        let phi = kernel_momentum_value(&kernel, &action, &[1.0], &[m])?;
        let v = ProjectiveVector::new(fock_coefficients(m, trunc))?;
        oracle_err = oracle_err.max((phi - momentum_map(&rep, &v)?[0]).abs());
        closed_err = closed_err.max((phi + m.norm_sqr()).abs());
    }
    b.check("oracle", oracle_err, tol.get("oracle"));
    b.check("closed_form", closed_err, tol.get("closed_form"));

    let dirs = vec![Vector::new(vec![1.0]), Vector::new(vec![-1.0])];
    let mut table = Table::new("hull_by_radius", &["radius", "inner_min", "inner_max", "extension_gap", "skipped"]);
    let (mut hull_err, mut gap_err) = (0.0_f64, 0.0_f64);
    let mut largest = None;
    for &r in &radii {
        let sampler = PolydiskSampler { dim: 1, radius: r };
        let set = kernel_momentum_set(&kernel, &action, &dirs, &sampler, n_points, seed, Some(&rep))?;
        // s(+1) = −min, s(−1) = max
        let lo = -set.table[0].inner;
        let hi = set.table[1].inner;
        hull_err = hull_err.max((lo + r * r).abs()).max(hi.abs());
        let g = set.extension_gap.unwrap_or(f64::INFINITY);
        gap_err = gap_err.max(g.abs());
        table.push(vec![r, lo, hi, g, set.skipped as f64]);
        largest = Some(set);
    }
    b.check("hull", hull_err, tol.get("hull"));
    b.check("extension_gap", gap_err, tol.get("extension_gap"));
    b.table(table);
    if let Some(set) = largest {
        b.verdict(
            "extension_directions",
            set.table.iter().filter(|r| r.extension).map(|r| &r.direction).collect::<Vec<_>>(),
        )?;
        for row in &set.table {
            b.support_row(row.direction.clone(), row.inner, row.outer);
        }
        b.momentum_set(set.inner);
    }

    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let sampler = PolydiskSampler { dim: 1, radius: r_max.min(2.0) };
    let pts: Vec<_> = (0..MODEL_POINTS).map(|i| sampler.sample(i, seed)).collect();
    let gram = gram_matrix(&kernel, &pts)?;
    b.check_flag("gram_psd", gram.psd, format!("min eigenvalue {:e}", gram.min_eigenvalue));
    let model = FiniteModel::new(&kernel, pts.clone())?;
    let mut worst: f64 = 0.0;
    let mut report = Vec::new();
    for bb in CONTRACTION_B {
        let rep = contraction_check(&action, &[-1.0], bb, &model)?;
        worst = worst.max(rep.lhs_norm - rep.rhs_bound).max(rep.lhs_norm - 1.0);
        report.push(rep);
    }
    b.check("contraction", worst.max(0.0), tol.get("contraction"));
    b.verdict("contraction", report)?;
    b.check("semigroup", semigroup_residual(&action, &[-1.0], 0.3, 0.7, &model)?, tol.get("semigroup"));

    let mut rng = stream_rng(seed ^ 0x5c, 0);
    let coeffs: Vec<_> = (0..MODEL_POINTS).map(|_| {
        let g = gaussian_vec(&mut rng, 2);
        c(g[0], g[1])
    }).collect();
    let mut repro: f64 = 0.0;
    for p in &pts {
        repro = repro.max(reproducing_check(&model, &coeffs, p)?.residual);
    }
    b.check("reproducing", repro, tol.get("reproducing"));
    let ys: Vec<Vec<f64>> = (0..8).map(|_| gaussian_vec(&mut rng, 1)).collect();
    b.check("invariance", invariance_residual(&kernel, &action, &ys, &pts)?, tol.get("invariance"));
    Ok(())
}
