//! Seeded random streams and direction sets.
//!
//! Every sample index gets its own ChaCha stream derived from `(seed, index)`,
//! so results do not depend on the order in which samples are evaluated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convex::Vector;
use crate::linalg::{c, CMatrix, CVector};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Complex Gaussian vector normalized to the unit sphere of `C^n`; this is
/// the unitarily invariant distribution on projective space.
pub fn projective_sample<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = CVector::from_iterator(
            n,
            (0..n).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))),
        );
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, k)] *= phase;
            }
        }
    }
    q
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vector {
    loop {
        let g = gaussian_vec(rng, d);
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return Vector::new(g.into_iter().map(|x| x / n).collect());
        }
    }
}

/// `n` nearly uniform points on the unit sphere `S²` (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<Vector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            Vector::new(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Reproducible probe directions for a `d`-dimensional algebra: the `±e_i`
/// followed by `extra` unit directions (circle for `d = 2`, Fibonacci sphere
/// for `d = 3`, seeded Gaussian directions for `d > 3`).
pub fn direction_set(d: usize, extra: usize, seed: u64) -> Vec<Vector> {
    let mut out = Vec::with_capacity(2 * d + extra);
    for i in 0..d {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = sign;
            out.push(Vector::new(e));
        }
    }
    match d {
        0 | 1 => {}
        2 => out.extend((0..extra).map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / extra as f64;
            Vector::new(vec![t.cos(), t.sin()])
        })),
        3 => out.extend(fibonacci_sphere(extra)),
        _ => out.extend((0..extra).map(|k| random_unit_vector(&mut stream_rng(seed, k as u64), d))),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream_rng(7, 3).random();
        let b: f64 = stream_rng(7, 3).random();
        let c: f64 = stream_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for v in fibonacci_sphere(64) {
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn direction_set_layout() {
        let d = direction_set(3, 64, 0);
        assert_eq!(d.len(), 70);
        assert_eq!(d[0].coords(), &[1.0, 0.0, 0.0]);
        assert_eq!(d[1].coords(), &[-1.0, 0.0, 0.0]);
        assert_eq!(direction_set(5, 4, 1), direction_set(5, 4, 1));
    }
}
