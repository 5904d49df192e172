use momentumlab::convex::{support_function, Vector};
use momentumlab::momentum::{classify_boundedness, equivariance_residual, momentum_set_estimate, BoundednessKind};
use momentumlab::sampling::{gaussian_vec, projective_sample, stream_rng};
use momentumlab::unirep::{homomorphism_residual, spectral_sup, su2_spin, ProjectiveVector};

use crate::config::{CheckTolerances, ScenarioConfig};
use crate::error::CliError;
use crate::report::ReportBuilder;

pub const TOLERANCES: &[(&str, f64)] = &[
    ("support", 1e-10),
    ("highest_weight", 1e-10),
    ("homomorphism", 1e-10),
    ("equivariance", 1e-8),
];

const EQUIVARIANCE_TRIALS: u64 = 20;

pub fn run(cfg: &ScenarioConfig, tol: &CheckTolerances, b: &mut ReportBuilder) -> Result<(), CliError> {
    let j = cfg.j.unwrap_or(1.0);
    let rep = su2_spin(j).map_err(|e| CliError::Usage(e.to_string()))?;
    let n_samples = cfg.n_samples_or(200)?;
    let dirs = cfg.directions_or(3, 64)?;
    b.parameter("j", j)?;
    b.parameter("n_samples", n_samples)?;
    b.parameter("n_directions", dirs.len())?;

    let est = momentum_set_estimate(&rep, n_samples, &dirs, cfg.seed())?;
    let mut worst: f64 = 0.0;
    for row in est.support_table()? {
        worst = worst.max(row.gap.abs());
        b.support_row(row.direction, row.inner, Some(row.outer));
    }
    b.check("support", worst, tol.get("support"));

    let top = spectral_sup(&rep, &[0.0, 0.0, 1.0])?;
    b.check_with("highest_weight", (top - j).abs(), tol.get("highest_weight"), Some(format!("s(e3) = {top}")));
    let e3_inner = support_function(&est.inner, &Vector::new(vec![0.0, 0.0, 1.0]))?.finite().unwrap_or(f64::NAN);
    b.verdict("support_e3_inner", e3_inner)?;
    b.check("homomorphism", homomorphism_residual(&rep), tol.get("homomorphism"));

    let mut eq: f64 = 0.0;
    for t in 0..EQUIVARIANCE_TRIALS {
        let mut rng = stream_rng(cfg.seed() ^ 0xe9, t);
        let y = gaussian_vec(&mut rng, 3);
        let v = ProjectiveVector::new(projective_sample(&mut rng, rep.space_dim()))?;
        eq = eq.max(equivariance_residual(&rep, &y, &v)?.residual);
    }
    b.check("equivariance", eq, tol.get("equivariance"));

    let verdict = classify_boundedness(&rep)?;
    b.check_flag("bounded", verdict.kind == BoundednessKind::Bounded, "finite-dimensional rep is bounded");
    b.verdict("boundedness", verdict.kind)?;
    b.verdict("equicontinuity_constant", verdict.equicontinuity_constant)?;
    b.verdict("estimate_gap", est.gap)?;
    b.momentum_set(est.inner);
    Ok(())
}
