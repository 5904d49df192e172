//! The scenario catalog.

mod abelian;
mod fock;
mod polytope;
mod su2;
mod torus;
mod truncation;

use std::time::Instant;

use crate::config::{CheckTolerances, ScenarioConfig};
use crate::error::{usage, CliError};
use crate::report::{ReportBuilder, RunReport};

pub use polytope::{polytope_facets, Facet};

type RunFn = fn(&ScenarioConfig, &CheckTolerances, &mut ReportBuilder) -> Result<(), CliError>;

pub struct Scenario {
    pub label: &'static str,
    pub description: &'static str,
    /// Check tolerances with their defaults.
    pub tolerances: &'static [(&'static str, f64)],
    /// Config parameters the scenario reads.
    pub parameters: &'static [&'static str],
    run: RunFn,
}

pub const CATALOG: &[Scenario] = &[
    Scenario {
        label: "su2-spin-j",
        description: "spin-j representation of su(2): momentum set, support identity, equivariance",
        tolerances: su2::TOLERANCES,
        parameters: &["j", "n_samples", "directions"],
        run: su2::run,
    },
    Scenario {
        label: "abelian-triangle",
        description: "three rank-one atoms at (0,0), (1,0), (0,1): hull, tube norm law, measure recovery",
        tolerances: abelian::TOLERANCES,
        parameters: &["n_samples", "directions"],
        run: abelian::run,
    },
    Scenario {
        label: "oscillator-truncation",
        description: "oscillator algebra on truncated Fock space: semiboundedness from growth across levels",
        tolerances: truncation::OSCILLATOR_TOLERANCES,
        parameters: &["levels"],
        run: truncation::run_oscillator,
    },
    Scenario {
        label: "heisenberg-truncation",
        description: "Heisenberg algebra on truncated Fock space: only the center stays bounded",
        tolerances: truncation::HEISENBERG_TOLERANCES,
        parameters: &["levels"],
        run: truncation::run_heisenberg,
    },
    Scenario {
        label: "fock-rotation-rkhs",
        description: "circle rotation on the Fock kernel: kernel momentum values, hull, contraction",
        tolerances: fock::TOLERANCES,
        parameters: &["radii", "n_samples", "truncation"],
        run: fock::run,
    },
    Scenario {
        label: "torus-poisson",
        description: "Poisson bracket on the 2-torus: L2 growth of {cos nx, cos y}",
        tolerances: torus::TOLERANCES,
        parameters: &["n_max"],
        run: torus::run,
    },
    Scenario {
        label: "random-polytope-convex",
        description: "random polytopes and polyhedral cones: membership reconstruction and dual cones",
        tolerances: polytope::TOLERANCES,
        parameters: &["polytopes", "queries", "directions"],
        run: polytope::run,
    },
];

pub fn list_scenarios() -> Vec<(&'static str, &'static str)> {
    CATALOG.iter().map(|s| (s.label, s.description)).collect()
}

pub fn find(label: &str) -> Option<&'static Scenario> {
    CATALOG.iter().find(|s| s.label == label)
}

/// Runs one scenario. Configuration problems are usage errors; library
/// failures propagate as they are.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport, CliError> {
    let Some(sc) = find(&cfg.scenario) else {
        let known: Vec<&str> = CATALOG.iter().map(|s| s.label).collect();
        return usage(format!("unknown scenario {:?}; known: {}", cfg.scenario, known.join(", ")));
    };
    cfg.only(sc.parameters)?;
    let tol = CheckTolerances::resolve(sc.tolerances, &cfg.tolerances)?;
    let start = Instant::now();
    let mut b = ReportBuilder::default();
    (sc.run)(cfg, &tol, &mut b)?;
    let tolerances = serde_json::from_value(serde_json::to_value(&tol)?)?;
    Ok(b.finish(sc.label, cfg.seed(), tolerances, start.elapsed().as_secs_f64() * 1e3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_stable() {
        let a = list_scenarios();
        assert_eq!(a, list_scenarios());
        assert!(a.iter().any(|(l, _)| *l == "su2-spin-j"));
        assert!(a.iter().any(|(l, _)| *l == "fock-rotation-rkhs"));
        assert_eq!(a.len(), 7);
    }

    #[test]
    fn unknown_scenario_is_usage() {
        let e = run_scenario(&ScenarioConfig::named("nope")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn foreign_parameter_is_usage() {
        let mut cfg = ScenarioConfig::named("torus-poisson");
        cfg.j = Some(1.0);
        assert_eq!(run_scenario(&cfg).unwrap_err().exit_code(), 2);
    }
}
