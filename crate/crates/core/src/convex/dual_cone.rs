//! Dual cone `W★ = {α : ⟨α, w⟩ ≥ 0 for all w ∈ W}` of a finitely generated
//! cone `W = cone(w_1, …, w_m)`, returned in V-representation.
//!
//! The lineality space `{α : ⟨α, w_i⟩ = 0}` is split off first; the pointed
//! remainder lives in the row space of the generator matrix and is
//! enumerated by the double description method with the combinatorial
//! adjacency test.

use nalgebra::DMatrix;

use super::{ConvexSetV, DualFunctional, Vector};
use crate::error::{check_dims, input, Error, Result};

pub const MAX_DUAL_CONE_DIM: usize = 16;
pub const MAX_DUAL_CONE_RAYS: usize = 10_000;

const RANK_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-10;

#[derive(Clone)]
struct Ray {
    coords: Vec<f64>,
    zero_set: Bitset,
}

#[derive(Clone, PartialEq)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn new(n: usize) -> Self {
        Bitset(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, k: usize) {
        self.0[k / 64] |= 1 << (k % 64);
    }

    fn and(&self, other: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains_all(&self, other: &Bitset) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

fn snap(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| if x.abs() < 1e-15 { 0.0 } else { x }).collect()
}

/// Generators of `W★`: points `{0}`, rays = extreme rays of the pointed part
/// followed by `±` a basis of the lineality space. All rays have unit norm.
pub fn dual_cone(w_rays: &[Vector]) -> Result<ConvexSetV> {
    let Some(first) = w_rays.first() else {
        return input("dual_cone needs at least one generator");
    };
    let d = first.dim();
    if d == 0 {
        return input("dual_cone needs dimension >= 1");
    }
    if d > MAX_DUAL_CONE_DIM {
        return Err(Error::Capability(format!(
            "dual_cone supports d <= {MAX_DUAL_CONE_DIM}, got {d}"
        )));
    }
    if w_rays.len() > MAX_DUAL_CONE_RAYS {
        return Err(Error::Capability(format!(
            "dual_cone supports at most {MAX_DUAL_CONE_RAYS} generators, got {}",
            w_rays.len()
        )));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(w_rays.len());
    for (k, w) in w_rays.iter().enumerate() {
        check_dims(d, w.dim(), "dual_cone generator")?;
        if w.coords().iter().any(|x| !x.is_finite()) {
            return input(format!("generator {k} has a non-finite entry"));
        }
        let n = w.norm();
        if n <= super::DEDUP_TOL {
            return input(format!("generator {k} is zero"));
        }
        rows.push(w.coords().iter().map(|x| x / n).collect());
    }
    let m = rows.len();
    let a = DMatrix::from_fn(m, d, |i, j| rows[i][j]);

    // Row space basis Q (d × r) and lineality basis L (d × (d − r)).
    let mut padded = DMatrix::<f64>::zeros(m.max(d), d);
    padded.view_mut((0, 0), (m, d)).copy_from(&a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().fold(0.0_f64, |acc, &s| acc.max(s));
    let mut q_cols = Vec::new();
    let mut l_cols = Vec::new();
    for k in 0..svd.singular_values.len() {
        let row: Vec<f64> = v_t.row(k).iter().copied().collect();
        if svd.singular_values[k] > RANK_TOL * smax {
            q_cols.push(row);
        } else {
            l_cols.push(row);
        }
    }
    let r = q_cols.len();

    // Constraints in reduced coordinates β (α = Qβ): (A Q)β ≥ 0.
    let reduced: Vec<Vec<f64>> = rows
        .iter()
        .map(|w| {
            let mut row: Vec<f64> = q_cols.iter().map(|q| dot(w, q)).collect();
            normalize(&mut row);
            row
        })
        .collect();

    let pointed = double_description(&reduced, r)?;

    let mut out: Vec<DualFunctional> = Vec::new();
    for beta in pointed {
        let mut alpha = vec![0.0; d];
        for (b, q) in beta.iter().zip(&q_cols) {
            for j in 0..d {
                alpha[j] += b * q[j];
            }
        }
        normalize(&mut alpha);
        out.push(DualFunctional::new(snap(alpha)));
    }
    for mut l in l_cols {
        // canonical sign: first nonzero component positive
        if let Some(&lead) = l.iter().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                l.iter_mut().for_each(|x| *x = -*x);
            }
        }
        normalize(&mut l);
        let l = snap(l);
        out.push(DualFunctional::new(l.clone()));
        out.push(DualFunctional::new(l.into_iter().map(|x| -x).collect()));
    }
    ConvexSetV::new(vec![DualFunctional::zeros(d)], out)
}

/// Extreme rays of the pointed cone `{β ∈ R^r : ⟨a_i, β⟩ ≥ 0}`, where the
/// rows `a_i` span `R^r`.
fn double_description(rows: &[Vec<f64>], r: usize) -> Result<Vec<Vec<f64>>> {
    let m = rows.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    // Greedy choice of r independent rows (lowest indices first).
    let mut basis_rows: Vec<usize> = Vec::with_capacity(r);
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(r);
    for (i, row) in rows.iter().enumerate() {
        let mut res = row.clone();
        for q in &ortho {
            let c = dot(&res, q);
            res.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
        let n = dot(&res, &res).sqrt();
        if n > 1e-9 {
            res.iter_mut().for_each(|x| *x /= n);
            ortho.push(res);
            basis_rows.push(i);
            if basis_rows.len() == r {
                break;
            }
        }
    }
    if basis_rows.len() < r {
        return Err(Error::Computation("dual_cone: rank deficiency in reduced system".into()));
    }
    let b = DMatrix::from_fn(r, r, |i, j| rows[basis_rows[i]][j]);
    let b_inv = b
        .try_inverse()
        .ok_or_else(|| Error::Computation("dual_cone: singular initial basis".into()))?;

    let mut rays: Vec<Ray> = (0..r)
        .map(|j| {
            let mut coords: Vec<f64> = b_inv.column(j).iter().copied().collect();
            normalize(&mut coords);
            let mut zero_set = Bitset::new(m);
            for (i, &row) in basis_rows.iter().enumerate() {
                if i != j {
                    zero_set.insert(row);
                }
            }
            Ray { coords, zero_set }
        })
        .collect();

    let in_basis: Vec<bool> = (0..m).map(|i| basis_rows.contains(&i)).collect();
    for (i, a) in rows.iter().enumerate() {
        if in_basis[i] {
            continue;
        }
        let vals: Vec<f64> = rays.iter().map(|ray| dot(a, &ray.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > ZERO_TOL).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < -ZERO_TOL).collect();

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero_set.and(&rays[n].zero_set);
                if common.count() + 2 < r {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&k| k != p && k != n)
                    .all(|k| !rays[k].zero_set.contains_all(&common));
                if !adjacent {
                    continue;
                }
                let (sp, sn) = (vals[p], vals[n]);
                let mut coords: Vec<f64> = rays[n]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(xn, xp)| sp * xn - sn * xp)
                    .collect();
                normalize(&mut coords);
                let mut zero_set = common;
                zero_set.insert(i);
                next.push(Ray { coords, zero_set });
            }
        }
        for (k, mut ray) in rays.into_iter().enumerate() {
            if vals[k] > ZERO_TOL {
                next.push(ray);
            } else if vals[k] >= -ZERO_TOL {
                ray.zero_set.insert(i);
                next.push(ray);
            }
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.coords).collect())
}
