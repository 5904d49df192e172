use momentumlab::convex::{
    domain_membership, dual_cone, membership_reconstruct, support_function, ConvexSetV, DualFunctional,
    MembershipVerdict, Vector,
};
use momentumlab::sampling::{gaussian_vec, random_unit_vector, stream_rng};
use rand::Rng;
use serde::Serialize;

use crate::config::{positive, CheckTolerances, ScenarioConfig};
use crate::error::CliError;
use crate::report::{ReportBuilder, Table};

pub const TOLERANCES: &[(&str, f64)] = &[("query_margin", 1e-6), ("dual_support", 1e-12), ("probe_step", 1e-6)];

const DIM: usize = 3;
const CONES: u64 = 10;
const CONE_INTERIOR_POINTS: usize = 100;

/// Facet inequality `⟨normal, α⟩ + offset ≥ 0` with a unit normal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Facet {
    pub fn slack(&self, alpha: &[f64]) -> f64 {
        self.normal.iter().zip(alpha).map(|(n, a)| n * a).sum::<f64>() + self.offset
    }
}

/// Facets of `conv(points)` for a full-dimensional polytope, read off the
/// dual of the homogenized cone `cone{(p, 1)}`.
pub fn polytope_facets(points: &[DualFunctional]) -> Result<Vec<Facet>, CliError> {
    let lifted: Vec<Vector> = points
        .iter()
        .map(|p| {
            let mut v = p.coords().to_vec();
            v.push(1.0);
            Vector::new(v)
        })
        .collect();
    let dual = dual_cone(&lifted)?;
    let d = points[0].dim();
    Ok(dual
        .rays()
        .iter()
        .filter_map(|r| {
            let n = r.coords()[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
            (n > 1e-12).then(|| Facet {
                normal: r.coords()[..d].iter().map(|x| x / n).collect(),
                offset: r.coords()[d] / n,
            })
        })
        .collect())
}

/// Signed distance proxy: positive depth inside, negative violation outside.
pub fn facet_margin(facets: &[Facet], alpha: &[f64]) -> f64 {
    facets.iter().map(|f| f.slack(alpha)).fold(f64::INFINITY, f64::min)
}

pub fn run(cfg: &ScenarioConfig, tol: &CheckTolerances, b: &mut ReportBuilder) -> Result<(), CliError> {
    let n_poly = positive("polytopes", cfg.polytopes.unwrap_or(20))?;
    let n_queries = positive("queries", cfg.queries.unwrap_or(1000))?;
    let dirs = cfg.directions_or(DIM, 64)?;
    let seed = cfg.seed();
    b.parameter("polytopes", n_poly)?;
    b.parameter("queries", n_queries)?;
    b.parameter("n_directions", dirs.len())?;

    let margin_tol = tol.get("query_margin");
    let mut table = Table::new(
        "membership",
        &["polytope", "vertices", "facets", "inside", "outside", "excluded", "disagreements"],
    );
    let (mut disagreements, mut bad_separators, mut sampled_hits) = (0usize, 0usize, 0usize);
    for k in 0..n_poly {
        let mut rng = stream_rng(seed, k as u64);
        let nv = rng.random_range(4..=12);
        let pts: Vec<DualFunctional> = (0..nv).map(|_| DualFunctional::new(gaussian_vec(&mut rng, DIM))).collect();
        let x = ConvexSetV::new(pts.clone(), Vec::new())?;
        let facets = polytope_facets(&pts)?;
        let share = n_queries / n_poly + usize::from(k < n_queries % n_poly);
        let (mut inside, mut outside, mut excluded, mut wrong) = (0, 0, 0, 0);
        for _ in 0..share {
            let alpha = DualFunctional::new(gaussian_vec(&mut rng, DIM).iter().map(|v| 1.5 * v).collect());
            let margin = facet_margin(&facets, alpha.coords());
            if margin.abs() < margin_tol {
                excluded += 1;
                continue;
            }
            let truth_inside = margin > 0.0;
            let verdict = membership_reconstruct(&alpha, &x, &dirs)?;
            match &verdict {
                MembershipVerdict::Inside => inside += 1,
                MembershipVerdict::Outside { separator, margin: m } => {
                    outside += 1;
                    let s = support_function(&x, separator)?.finite().unwrap_or(f64::INFINITY);
                    if !(-s - alpha.pair(separator) > 0.0 && *m > 0.0) {
                        bad_separators += 1;
                    }
                    if dirs.contains(separator) {
                        sampled_hits += 1;
                    }
                }
                MembershipVerdict::Undetermined => {}
            }
            if verdict.is_inside() != truth_inside {
                wrong += 1;
            }
        }
        disagreements += wrong;
        table.push(vec![
            k as f64,
            x.points().len() as f64,
            facets.len() as f64,
            inside as f64,
            outside as f64,
            excluded as f64,
            wrong as f64,
        ]);
    }
    b.check_with("disagreements", disagreements as f64, 0.0, Some("against the facet oracle".into()));
    b.check_with("separators", bad_separators as f64, 0.0, Some("every separator certifies".into()));
    b.verdict("separated_by_sampled_direction", sampled_hits)?;
    b.table(table);

    let step = tol.get("probe_step");
    let mut cone_table = Table::new("dual_cones", &["cone", "generators", "dual_rays", "max_support", "probe_mismatches"]);
    let (mut worst_support, mut mismatches) = (0.0_f64, 0usize);
    for k in 0..CONES {
        let mut rng = stream_rng(seed ^ 0xc0, k);
        let axis = random_unit_vector(&mut rng, DIM);
        let ng = rng.random_range(3..=6);
        let gens: Vec<Vector> = (0..ng)
            .map(|_| axis.add(&Vector::new(gaussian_vec(&mut rng, DIM)).scale(0.6)).normalized())
            .collect();
        let dual = dual_cone(&gens)?;
        let mut cone_support: f64 = 0.0;
        for _ in 0..CONE_INTERIOR_POINTS {
            let w = gens
                .iter()
                .fold(Vector::zeros(DIM), |acc, g| acc.add(&g.scale(rng.random_range(0.1..1.0))));
            let s = support_function(&dual, &w)?.finite().unwrap_or(f64::INFINITY);
            cone_support = cone_support.max(s.abs());
        }
        let mut miss = 0;
        let mut probe = |v: &Vector, expect: bool| -> Result<(), CliError> {
            if domain_membership(&dual, v)? != expect {
                miss += 1;
            }
            Ok(())
        };
        for g in &gens {
            probe(g, true)?;
        }
        for r in dual.rays() {
            let n = r.normalized().to_vector();
            let on_face: Vec<&Vector> = gens.iter().filter(|g| n.dot(g).abs() <= 1e-9).collect();
            if on_face.is_empty() {
                continue;
            }
            let p = on_face.iter().fold(Vector::zeros(DIM), |acc, g| acc.add(g));
            probe(&p, true)?;
            probe(&p.add(&n.scale(step)), true)?;
            probe(&p.add(&n.scale(-step)), false)?;
        }
        worst_support = worst_support.max(cone_support);
        mismatches += miss;
        cone_table.push(vec![k as f64, ng as f64, dual.rays().len() as f64, cone_support, miss as f64]);
    }
    b.check("dual_support", worst_support, tol.get("dual_support"));
    b.check_with("boundary_probes", mismatches as f64, 0.0, Some("closure of W accepted exactly".into()));
    b.table(cone_table);
    Ok(())
}
