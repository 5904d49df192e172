use momentumlab::liealg::{l2_inner_torus, poisson_bracket_torus, TrigPolynomial};
use momentumlab::sampling::stream_rng;
use rand::Rng;

use crate::config::{positive, CheckTolerances, ScenarioConfig};
use crate::error::{usage, CliError};
use crate::report::{ReportBuilder, Table};

pub const TOLERANCES: &[(&str, f64)] = &[
    ("ratio_constant", 1e-10),
    ("ratio_value", 1e-10),
    ("translation", 1e-12),
    ("antisymmetry", 1e-15),
];

/// `‖{cos nx, cos y}‖₂ / ‖cos nx‖₂ = n/√2`.
pub fn bracket_ratio(n: i32) -> Result<f64, CliError> {
    let f = TrigPolynomial::cos(n, 0)?;
    let g = TrigPolynomial::cos(0, 1)?;
    Ok(poisson_bracket_torus(&f, &g)?.l2_norm()? / f.l2_norm()?)
}

pub fn run(cfg: &ScenarioConfig, tol: &CheckTolerances, b: &mut ReportBuilder) -> Result<(), CliError> {
    let n_max = positive("n_max", cfg.n_max.unwrap_or(64))?;
    if n_max > momentumlab::liealg::FOURIER_MAX as usize {
        return usage(format!("n_max must be at most {}", momentumlab::liealg::FOURIER_MAX));
    }
    b.parameter("n_max", n_max)?;
    let mut table = Table::new("bracket_growth", &["n", "ratio", "ratio_over_n"]);
    let base = bracket_ratio(1)?;
    let mut spread: f64 = 0.0;
    let mut value_err: f64 = 0.0;
    let mut monotone = true;
    let mut prev = 0.0;
    for n in 1..=n_max as i32 {
        let r = bracket_ratio(n)?;
        let per = r / n as f64;
        spread = spread.max((per - base).abs());
        value_err = value_err.max((per - std::f64::consts::FRAC_1_SQRT_2).abs());
        monotone &= r > prev;
        prev = r;
        table.push(vec![n as f64, r, per]);
    }
    b.check("ratio_constant", spread, tol.get("ratio_constant"));
    b.check_with("ratio_value", value_err, tol.get("ratio_value"), Some("ratio(n)/n against 1/sqrt 2".into()));
    b.check_flag("monotone_growth", monotone, "ratio(n) strictly increasing");
    b.verdict("ratio_over_n", base)?;
    b.table(table);

    let f = TrigPolynomial::cos(3, 1)?.add(&TrigPolynomial::sin(-2, 5)?.scale(0.4));
    let g = TrigPolynomial::sin(1, 1)?.add(&TrigPolynomial::cos(0, 4)?.scale(-1.3));
    let base_ip = l2_inner_torus(&f, &g)?;
    let mut rng = stream_rng(cfg.seed(), 0);
    let mut trans: f64 = 0.0;
    for _ in 0..16 {
        let (s, t) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        trans = trans.max((l2_inner_torus(&f.translate(s, t), &g.translate(s, t))? - base_ip).abs());
    }
    b.check("translation", trans, tol.get("translation"));

    let fg = poisson_bracket_torus(&f, &g)?;
    let gf = poisson_bracket_torus(&g, &f)?;
    let anti = fg
        .support()
        .chain(gf.support())
        .map(|&(m, n)| (fg.coeff(m, n) + gf.coeff(m, n)).norm())
        .fold(0.0_f64, f64::max);
    b.check("antisymmetry", anti, tol.get("antisymmetry"));
    Ok(())
}
