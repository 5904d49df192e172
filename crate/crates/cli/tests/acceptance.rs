//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use momentumlab::abelian::{
    measure_distance, momentum_set_of_measure, random_measure, recover_measure, semigroup_extension, TubeElement,
};
use momentumlab::convex::{support_function, ConvexSetV, Vector};
use momentumlab::momentum::{equivariance_residual, momentum_set_estimate};
use momentumlab::sampling::{direction_set, projective_sample, stream_rng};
use momentumlab::unirep::{su2_spin, ProjectiveVector};
use momentumlab_cli::config::ScenarioConfig;
use momentumlab_cli::report::RunReport;
use momentumlab_cli::scenarios::CATALOG;
use momentumlab_cli::{run_cli, run_scenario};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn max_entry(m: &momentumlab::linalg::CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

/// Requires each named check to be present, to carry `tolerance`, and to pass.
fn require(report: &RunReport, checks: &[(&str, f64)]) -> Outcome {
    let mut parts = Vec::new();
    for (name, tolerance) in checks {
        let c = report
            .checks
            .iter()
            .find(|c| c.name == *name)
            .ok_or_else(|| format!("{}: no check named {name}", report.scenario))?;
        if c.tolerance != *tolerance {
            return Err(format!("{name}: tolerance {:e}, expected {tolerance:e}", c.tolerance));
        }
        if !c.passed {
            return Err(format!("{name}: residual {:e} > {:e}", c.residual, c.tolerance));
        }
        parts.push(format!("{name}={:.1e}", c.residual));
    }
    Ok(parts.join(" "))
}

fn scenario(cfg: ScenarioConfig) -> Result<RunReport, String> {
    run_scenario(&cfg).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0_f64;
    for twice_j in 1..=10 {
        let j = twice_j as f64 / 2.0;
        let rep = su2_spin(j).map_err(|e| e.to_string())?;
        let dirs = direction_set(3, 58, twice_j);
        assert_eq!(dirs.len(), 64);
        let est = momentum_set_estimate(&rep, 32, &dirs, twice_j).map_err(|e| e.to_string())?;
        for x in &dirs {
            let s = support_function(&est.inner, x).map_err(|e| e.to_string())?.finite().ok_or("unbounded")?;
            // The spectrum of i·dπ(x) on spin j is {m|x| : m = −j..j}.
            let norm = x.coords().iter().map(|v| v * v).sum::<f64>().sqrt();
            worst = worst.max((s - j * norm).abs());
        }
    }
    if worst <= 1e-10 {
        Ok(format!("max error {worst:.1e} over j = 1/2..5, 64 directions"))
    } else {
        Err(format!("max error {worst:e} > 1e-10"))
    }
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0_f64;
    for j in [1.0, 2.0] {
        let rep = su2_spin(j).map_err(|e| e.to_string())?;
        for t in 0..200 {
            let mut rng = stream_rng(2, t);
            let y: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let v = ProjectiveVector::new(projective_sample(&mut rng, rep.space_dim())).map_err(|e| e.to_string())?;
            worst = worst.max(equivariance_residual(&rep, &y, &v).map_err(|e| e.to_string())?.residual);
        }
    }
    if worst <= 1e-8 {
        Ok(format!("max residual {worst:.1e} over 200 trials each on spin 1 and 2"))
    } else {
        Err(format!("max residual {worst:e} > 1e-8"))
    }
}

fn criterion_3() -> Outcome {
    let mut cfg = ScenarioConfig::named("random-polytope-convex");
    cfg.polytopes = Some(20);
    cfg.queries = Some(1000);
    let r = scenario(cfg)?;
    let t = r.tables.iter().find(|t| t.name == "membership").ok_or("no membership table")?;
    let col = |name: &str| {
        let i = t.columns.iter().position(|c| c == name).unwrap();
        t.rows.iter().map(|row| row[i]).sum::<f64>()
    };
    let (inside, outside, excluded) = (col("inside"), col("outside"), col("excluded"));
    if inside + outside + excluded != 1000.0 || inside == 0.0 || outside == 0.0 {
        return Err(format!("query split {inside}/{outside}/{excluded} is degenerate"));
    }
    require(&r, &[("disagreements", 0.0), ("separators", 0.0)]).map(|s| {
        format!("20 polytopes, {inside} inside / {outside} outside / {excluded} within 1e-6 of the boundary: {s}")
    })
}

fn criterion_4() -> Outcome {
    let r = scenario(ScenarioConfig::named("random-polytope-convex"))?;
    require(&r, &[("dual_support", 1e-12), ("boundary_probes", 0.0)]).map(|s| format!("10 cones: {s}"))
}

fn random_tube_vector(rng: &mut impl Rng, d: usize, radius: f64) -> Vector {
    Vector::new((0..d).map(|_| rng.random_range(-radius..radius)).collect())
}

fn criterion_5() -> Outcome {
    let (mut law, mut bound, mut semi, mut inv) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for t in 0..100u64 {
        let mut rng = stream_rng(5, t);
        let n = rng.random_range(1..=4);
        let big_n = rng.random_range(1..=32);
        let atoms = rng.random_range(1..=big_n.min(8));
        let mu = random_measure(t, n, big_n, atoms).map_err(|e| e.to_string())?;
        let hull = momentum_set_of_measure(&mu).map_err(|e| e.to_string())?;
        let s = TubeElement::new(random_tube_vector(&mut rng, n, 2.0), random_tube_vector(&mut rng, n, 0.5))
            .map_err(|e| e.to_string())?;
        let u = TubeElement::new(random_tube_vector(&mut rng, n, 2.0), random_tube_vector(&mut rng, n, 0.5))
            .map_err(|e| e.to_string())?;
        let ext = |s: &TubeElement| semigroup_extension(&mu, &hull, s).map_err(|e| e.to_string());
        let (ms, report) = ext(&s)?;
        let min = mu
            .atoms()
            .iter()
            .filter(|a| !a.is_zero())
            .map(|a| a.alpha.pair(&s.y))
            .fold(f64::INFINITY, f64::min);
        let exact = (-min).exp();
        law = law.max((report.norm - exact).abs());
        bound = bound.max(report.norm - report.bound);
        let (mu_, _) = ext(&u)?;
        let (msu, _) = ext(&s.add(&u))?;
        semi = semi.max(max_entry(&(&ms * &mu_ - &msu)));
        let (star, _) = ext(&s.star())?;
        inv = inv.max(max_entry(&(star - ms.adjoint())));
    }
    let ok = law <= 1e-12 && bound <= 1e-12 && semi <= 1e-12 && inv <= 1e-12;
    let msg = format!("norm law {law:.1e}, bound excess {bound:.1e}, semigroup {semi:.1e}, involution {inv:.1e}");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Outcome {
    let (mut alpha, mut proj, mut hull) = (0.0_f64, 0.0_f64, 0.0_f64);
    for t in 0..100u64 {
        let mut rng = stream_rng(6, t);
        let n = rng.random_range(1..=4);
        let big_n = rng.random_range(1..=32);
        let atoms = rng.random_range(1..=big_n.min(8));
        let mu = random_measure(1000 + t, n, big_n, atoms).map_err(|e| e.to_string())?;
        let rec = recover_measure(&mu.generators()).map_err(|e| e.to_string())?;
        let (a, p) = measure_distance(&mu, &rec.measure).map_err(|e| e.to_string())?;
        alpha = alpha.max(a);
        proj = proj.max(p);
        let set = momentum_set_of_measure(&mu).map_err(|e| e.to_string())?;
        let recovered = ConvexSetV::new(rec.measure.atoms().iter().map(|a| a.alpha.clone()).collect(), Vec::new())
            .map_err(|e| e.to_string())?;
        for x in direction_set(n, 16, t) {
            let s1 = support_function(&set, &x).map_err(|e| e.to_string())?.finite().ok_or("unbounded")?;
            let s2 = support_function(&recovered, &x).map_err(|e| e.to_string())?.finite().ok_or("unbounded")?;
            hull = hull.max((s1 - s2).abs());
        }
    }
    let msg = format!("atoms {alpha:.1e}, projections {proj:.1e}, hull support {hull:.1e}");
    if alpha <= 1e-8 && proj <= 1e-8 && hull <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Outcome {
    let r = scenario(ScenarioConfig::named("fock-rotation-rkhs"))?;
    require(&r, &[("oracle", 1e-6), ("closed_form", 1e-8)]).map(|s| format!("50 points |m| <= 2, N = 64: {s}"))
}

fn criterion_8() -> Outcome {
    let mut cfg = ScenarioConfig::named("fock-rotation-rkhs");
    cfg.radii = Some(vec![1.0, 2.0, 3.0]);
    let r = scenario(cfg)?;
    require(&r, &[("hull", 1e-6), ("extension_gap", 1e-6), ("contraction", 1e-6)])
        .map(|s| format!("R in 1,2,3, b in 0.1,1,10: {s}"))
}

fn criterion_9() -> Outcome {
    let mut cfg = ScenarioConfig::named("oscillator-truncation");
    cfg.levels = Some(vec![32, 64, 128]);
    let r = scenario(cfg)?;
    let out = require(
        &r,
        &[("semibounded", 0.0), ("witness_minus_h", 0.0), ("minus_h_growth", 1e-6), ("plus_h_slope", 0.05)],
    )?;
    let slope = r.checks.iter().find(|c| c.name == "plus_h_slope").and_then(|c| c.note.clone()).unwrap_or_default();
    Ok(format!("N in 32,64,128: {out} ({slope})"))
}

fn criterion_10() -> Outcome {
    let mut cfg = ScenarioConfig::named("torus-poisson");
    cfg.n_max = Some(64);
    let r = scenario(cfg)?;
    require(&r, &[("ratio_constant", 1e-10), ("translation", 1e-12)]).map(|s| format!("n = 1..64: {s}"))
}

fn strip_timing(bytes: &[u8]) -> String {
    let s = String::from_utf8_lossy(bytes).into_owned();
    match s.find("\"timing\"") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn run_bytes(label: &str, seed: &str, threads: &str) -> Result<String, String> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(["momentumlab", "--scenario", label, "--seed", seed], Some(threads), &mut out, &mut err);
    if code != 0 {
        return Err(format!("{label} exited {code}: {}", String::from_utf8_lossy(&err)));
    }
    Ok(strip_timing(&out))
}

fn criterion_11() -> Outcome {
    for sc in CATALOG {
        for seed in ["0", "13"] {
            let a = run_bytes(sc.label, seed, "1")?;
            let b = run_bytes(sc.label, seed, "1")?;
            let c = run_bytes(sc.label, seed, "4")?;
            if a != b {
                return Err(format!("{} seed {seed}: reruns differ", sc.label));
            }
            if a != c {
                return Err(format!("{} seed {seed}: 1 and 4 threads differ", sc.label));
            }
        }
    }
    Ok(format!("{} scenarios x 2 seeds, identical across reruns and 1/4 threads", CATALOG.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("support identity on su(2) spin j", criterion_1),
        ("momentum map equivariance", criterion_2),
        ("membership reconstruction", criterion_3),
        ("dual cone support and closure", criterion_4),
        ("abelian norm law", criterion_5),
        ("measure recovery round trip", criterion_6),
        ("kernel momentum formula", criterion_7),
        ("Fock rotation hull and contraction", criterion_8),
        ("oscillator truncation classification", criterion_9),
        ("torus Poisson bracket growth", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
