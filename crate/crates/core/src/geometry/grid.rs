use rand::Rng;

use crate::numerics::{halton, seeded_rng};
use crate::Real;

const BASES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    /// `per_axis` cell-centered points on each axis (tensor grid).
    Uniform { per_axis: usize },
    /// First `count` points of a shifted Halton sequence.
    Halton { count: usize },
}

/// Sample points in a box. `jitter` is a fraction of a uniform cell by
/// which each point is displaced; the displacement and the Halton shift are
/// drawn from `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub kind: GridKind,
    pub jitter: f64,
    pub seed: u64,
}

impl GridSpec {
    pub fn uniform(per_axis: usize) -> Self {
        Self {
            kind: GridKind::Uniform { per_axis },
            jitter: 0.0,
            seed: 0,
        }
    }

    pub fn halton(count: usize, seed: u64) -> Self {
        Self {
            kind: GridKind::Halton { count },
            jitter: 0.0,
            seed,
        }
    }

    pub fn with_jitter(mut self, jitter: f64, seed: u64) -> Self {
        self.jitter = jitter;
        self.seed = seed;
        self
    }

    pub fn describe(&self) -> String {
        match self.kind {
            GridKind::Uniform { per_axis } => format!("uniform {per_axis}/axis, jitter {}", self.jitter),
            GridKind::Halton { count } => format!("halton {count}, seed {}", self.seed),
        }
    }

    /// Points inside `[lo, hi]`, in a fixed order.
    pub fn points<T: Real>(&self, lo: &[T], hi: &[T]) -> Vec<Vec<T>> {
        let n = lo.len();
        if n == 0 {
            return vec![Vec::new()];
        }
        let lo: Vec<f64> = lo.iter().map(|x| x.as_f64()).collect();
        let hi: Vec<f64> = hi.iter().map(|x| x.as_f64()).collect();
        let mut rng = seeded_rng(self.seed);
        let raw: Vec<Vec<f64>> = match self.kind {
            GridKind::Uniform { per_axis } => {
                let k = per_axis.max(1);
                let total = k.pow(n as u32);
                (0..total)
                    .map(|mut idx| {
                        (0..n)
                            .map(|axis| {
                                let i = idx % k;
                                idx /= k;
                                let j = if self.jitter > 0.0 {
                                    self.jitter * (rng.gen::<f64>() - 0.5)
                                } else {
                                    0.0
                                };
                                let u = (i as f64 + 0.5 + j) / k as f64;
                                lo[axis] + u * (hi[axis] - lo[axis])
                            })
                            .collect()
                    })
                    .collect()
            }
            GridKind::Halton { count } => {
                let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
                (0..count)
                    .map(|i| {
                        (0..n)
                            .map(|axis| {
                                let u = (halton(i as u64 + 1, BASES[axis % BASES.len()]) + shift[axis]).fract();
                                lo[axis] + u * (hi[axis] - lo[axis])
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        raw.into_iter()
            .map(|p| p.into_iter().map(T::lit).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_counts_and_bounds() {
        let pts: Vec<Vec<f64>> = GridSpec::uniform(4).with_jitter(0.5, 3).points(&[0.0, -1.0], &[1.0, 1.0]);
        assert_eq!(pts.len(), 16);
        for p in &pts {
            assert!(p[0] > 0.0 && p[0] < 1.0 && p[1] > -1.0 && p[1] < 1.0);
        }
    }

    #[test]
    fn halton_is_seeded() {
        let a: Vec<Vec<f64>> = GridSpec::halton(10, 1).points(&[0.0; 3], &[1.0; 3]);
        let b: Vec<Vec<f64>> = GridSpec::halton(10, 1).points(&[0.0; 3], &[1.0; 3]);
        let c: Vec<Vec<f64>> = GridSpec::halton(10, 2).points(&[0.0; 3], &[1.0; 3]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_dimensional_box() {
        let p: Vec<Vec<f64>> = GridSpec::uniform(5).points(&[], &[]);
        assert_eq!(p, vec![Vec::<f64>::new()]);
    }
}
