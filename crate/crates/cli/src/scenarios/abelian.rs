use momentumlab::abelian::{
    exact_extension_norm, holomorphy_residual, measure_distance, momentum_set_of_measure, recover_measure,
    rep_from_measure, semigroup_extension, SpectralMeasureDiscrete, TubeElement,
};
use momentumlab::convex::{support_function, ConvexSetV, Vector};
use momentumlab::linalg::{expm_skew_hermitian, op_norm};
use momentumlab::momentum::momentum_set_estimate;
use momentumlab::sampling::{gaussian_vec, stream_rng};
use rand::Rng;

use crate::config::{CheckTolerances, ScenarioConfig};
use crate::error::CliError;
use crate::report::ReportBuilder;

pub const TOLERANCES: &[(&str, f64)] = &[
    ("hull_vertices", 1e-12),
    ("estimate_gap", 1e-9),
    ("norm_law", 1e-12),
    ("norm_bound", 1e-12),
    ("semigroup", 1e-12),
    ("involution", 1e-12),
    ("compatibility", 1e-10),
    ("holomorphy", 1e-6),
    ("recovery", 1e-8),
];

const TUBE_TRIALS: u64 = 20;

fn orthant(d: usize) -> Result<ConvexSetV, CliError> {
    let rays = (0..d).map(|i| Vector::basis(d, i).into_coords()).collect();
    Ok(ConvexSetV::from_parts(vec![vec![0.0; d]], rays)?)
}

pub fn run(cfg: &ScenarioConfig, tol: &CheckTolerances, b: &mut ReportBuilder) -> Result<(), CliError> {
    let vertices = [vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
    let measure = SpectralMeasureDiscrete::diagonal(&vertices)?;
    let n_samples = cfg.n_samples_or(200)?;
    let dirs = cfg.directions_or(2, 32)?;
    b.parameter("n_samples", n_samples)?;
    b.parameter("n_directions", dirs.len())?;

    let hull = momentum_set_of_measure(&measure)?;
    let vertex_err = vertices
        .iter()
        .map(|v| {
            hull.points()
                .iter()
                .map(|p| p.coords().iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0_f64, f64::max);
    let count_ok = hull.points().len() == vertices.len();
    b.check("hull_vertices", if count_ok { vertex_err } else { f64::INFINITY }, tol.get("hull_vertices"));

    let rep = measure.to_rep()?;
    let est = momentum_set_estimate(&rep, n_samples, &dirs, cfg.seed())?;
    let mut gap: f64 = est.gap.max(0.0);
    for row in est.support_table()? {
        let exact = support_function(&hull, &row.direction)?.finite().unwrap_or(f64::NAN);
        gap = gap.max((row.outer - exact).abs()).max((row.inner - exact).abs());
        b.support_row(row.direction, row.inner, Some(row.outer));
    }
    b.check("estimate_gap", gap, tol.get("estimate_gap"));

    let x = orthant(2)?;
    let (mut law, mut bound, mut semi, mut inv, mut compat, mut holo) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for t in 0..TUBE_TRIALS {
        let mut rng = stream_rng(cfg.seed() ^ 0x7b, t);
        let mut tube = || -> Result<TubeElement, CliError> {
            let re = Vector::new(gaussian_vec(&mut rng, 2));
            let im = Vector::new((0..2).map(|_| rng.random_range(0.05..2.0)).collect());
            Ok(TubeElement::new(re, im)?)
        };
        let s = tube()?;
        let u = tube()?;
        let (ps, report) = semigroup_extension(&measure, &x, &s)?;
        law = law.max((report.norm - exact_extension_norm(&measure, &s.y)?).abs());
        bound = bound.max(report.norm - report.bound);
        let (pu, _) = semigroup_extension(&measure, &x, &u)?;
        let (psu, _) = semigroup_extension(&measure, &x, &s.add(&u))?;
        semi = semi.max(op_norm(&(&ps * &pu - psu)));
        let (pstar, _) = semigroup_extension(&measure, &x, &s.star())?;
        inv = inv.max(op_norm(&(pstar - ps.adjoint())));
        let v = u.x.clone();
        let (pvs, _) = semigroup_extension(&measure, &x, &s.shift(&v))?;
        compat = compat.max(op_norm(&(rep_from_measure(&measure, &v)? * &ps - pvs)));
        for j in 0..2 {
            holo = holo.max(holomorphy_residual(&measure, &s, j, 1e-5)?);
        }
    }
    b.check("norm_law", law, tol.get("norm_law"));
    b.check("norm_bound", bound.max(0.0), tol.get("norm_bound"));
    b.check("semigroup", semi, tol.get("semigroup"));
    b.check("involution", inv, tol.get("involution"));
    b.check("compatibility", compat, tol.get("compatibility"));
    b.check("holomorphy", holo, tol.get("holomorphy"));

    let gens = measure.generators();
    let rec = recover_measure(&gens)?;
    let (da, dp) = measure_distance(&measure, &rec.measure)?;
    let mut round_trip: f64 = da.max(dp);
    for (j, a) in gens.iter().enumerate() {
        let lhs = rep_from_measure(&rec.measure, &Vector::basis(2, j))?;
        round_trip = round_trip.max(op_norm(&(lhs - expm_skew_hermitian(a)?)));
    }
    b.check("recovery", round_trip, tol.get("recovery"));
    b.verdict("cluster_events", rec.clusters.len())?;
    b.verdict("recovered_atoms", rec.measure.atoms().iter().map(|a| a.alpha.clone()).collect::<Vec<_>>())?;
    b.momentum_set(hull);
    Ok(())
}
