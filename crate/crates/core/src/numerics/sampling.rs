use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::SymMatrix;
use crate::Real;

/// Reproducible generator used by every seeded routine in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const PRIMES: [u32; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

/// Radical inverse of `index` in the given base.
pub fn halton(mut index: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= f64::from(base);
        r += f * (index % b) as f64;
        index /= b;
    }
    r
}

/// Low-discrepancy directions on the unit sphere `S^{dim-1}`.
///
/// Halton points with a seeded Cranley–Patterson shift are pushed through
/// Box–Muller and normalized. The same seed always yields the same list.
#[derive(Debug, Clone)]
pub struct SphereSampler {
    dim: usize,
    shift: Vec<f64>,
}

impl SphereSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1 && dim <= PRIMES.len(), "sphere dimension out of range");
        let mut rng = seeded_rng(seed ^ 0x5eed_0000_0000_0000);
        let slots = dim + dim % 2;
        let shift = (0..slots).map(|_| rng.gen::<f64>()).collect();
        Self { dim, shift }
    }

    pub fn point<T: Real>(&self, index: usize) -> Vec<T> {
        if self.dim == 1 {
            let u = (halton(index as u64 + 1, 2) + self.shift[0]).fract();
            return vec![if u < 0.5 { T::one() } else { -T::one() }];
        }
        let mut v = Vec::with_capacity(self.shift.len());
        for pair in 0..self.shift.len() / 2 {
            let u1 = (halton(index as u64 + 1, PRIMES[2 * pair]) + self.shift[2 * pair]).fract();
            let u2 =
                (halton(index as u64 + 1, PRIMES[2 * pair + 1]) + self.shift[2 * pair + 1]).fract();
            let r = (-2.0 * (1.0 - u1).max(1e-300).ln()).sqrt();
            let th = std::f64::consts::TAU * u2;
            v.push(r * th.cos());
            v.push(r * th.sin());
        }
        v.truncate(self.dim);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-12 {
            let mut e = vec![T::zero(); self.dim];
            e[index % self.dim] = T::one();
            return e;
        }
        v.into_iter().map(|x| T::lit(x / n)).collect()
    }

    pub fn points<T: Real>(&self, count: usize) -> Vec<Vec<T>> {
        (0..count).map(|i| self.point(i)).collect()
    }
}

/// Modified Gram–Schmidt with a re-orthogonalization pass in the inner
/// product `g`. Candidates whose residual norm falls below `drop_tol` (relative
/// to their original norm) are skipped. Stops after `max` vectors.
pub fn gram_schmidt<T: Real>(
    g: &SymMatrix<T>,
    candidates: &[Vec<T>],
    max: usize,
    drop_tol: T,
) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for c in candidates {
        if basis.len() == max {
            break;
        }
        let n0 = g.quad(c).max(T::zero()).sqrt();
        if n0 == T::zero() {
            continue;
        }
        let mut v = c.clone();
        for _pass in 0..2 {
            for b in &basis {
                let p = g.bilinear(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = *vi - p * *bi;
                }
            }
        }
        let n = g.quad(&v).max(T::zero()).sqrt();
        if n <= drop_tol * n0 {
            continue;
        }
        basis.push(v.into_iter().map(|x| x / n).collect());
    }
    basis
}
