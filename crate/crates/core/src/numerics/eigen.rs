use super::matrix::{cholesky, Mat, SymMatrix};
use crate::{Real, Result};

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// columns of the second component.
pub fn sym_eigen<T: Real>(a: &SymMatrix<T>) -> (Vec<T>, Mat<T>) {
    let n = a.dim();
    let mut m = a.to_dense();
    let mut v: Mat<T> = Mat::identity(n);
    let two = T::lit(2.0);
    let scale = a.frobenius();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= eps * eps.sqrt() * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .partial_cmp(&m[(j, j)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of the pencil `A v = λ G v`, ascending. `G` must be positive
/// definite; the pencil is reduced to `L^{-1} A L^{-T}` with `G = L L^T`.
pub fn generalized_eigenvalues<T: Real>(a: &SymMatrix<T>, g: &SymMatrix<T>) -> Result<Vec<T>> {
    let l = cholesky(g)?;
    let n = a.dim();
    // Forward substitution: Y = L^{-1} A, then C = Y L^{-T}.
    let ad = a.to_dense();
    let mut y = Mat::zeros(n, n);
    for col in 0..n {
        for i in 0..n {
            let mut s = ad[(i, col)];
            for k in 0..i {
                s = s - l[(i, k)] * y[(k, col)];
            }
            y[(i, col)] = s / l[(i, i)];
        }
    }
    let mut c = Mat::zeros(n, n);
    for row in 0..n {
        for j in 0..n {
            let mut s = y[(row, j)];
            for k in 0..j {
                s = s - c[(row, k)] * l[(j, k)];
            }
            c[(row, j)] = s / l[(j, j)];
        }
    }
    Ok(sym_eigen(&SymMatrix::from_dense(&c)).0)
}

/// Smallest `λ` with `A v = λ G v`, i.e. the minimum of `v^T A v` over
/// `v^T G v = 1`.
pub fn sym_generalized_eigen_min<T: Real>(a: &SymMatrix<T>, g: &SymMatrix<T>) -> Result<T> {
    Ok(generalized_eigenvalues(a, g)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sampling::seeded_rng;
    use crate::Error;
    use rand::Rng;

    #[test]
    fn identity_pencil() {
        let i = SymMatrix::<f64>::identity(2);
        assert_eq!(sym_generalized_eigen_min(&i, &i).unwrap(), 1.0);
    }

    #[test]
    fn diagonal_pencil() {
        let a = SymMatrix::from_diag(&[2.0f64, 6.0]);
        let g = SymMatrix::from_diag(&[1.0, 2.0]);
        assert!((sym_generalized_eigen_min(&a, &g).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_indefinite_weight() {
        let a = SymMatrix::<f64>::identity(2);
        let g = SymMatrix::from_diag(&[1.0, 0.0]);
        assert_eq!(sym_generalized_eigen_min(&a, &g), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let mut rng = seeded_rng(3);
        let a = SymMatrix::from_fn(5, |_, _| rng.gen_range(-1.0f64..1.0));
        let (vals, vecs) = sym_eigen(&a);
        for (k, &lam) in vals.iter().enumerate() {
            let v = vecs.column(k);
            let av = a.matvec(&v);
            for i in 0..5 {
                assert!((av[i] - lam * v[i]).abs() < 1e-12);
            }
        }
    }

    fn random_spd(rng: &mut impl Rng, n: usize) -> SymMatrix<f64> {
        let b = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0f64..1.0));
        let btb = b.transpose().matmul(&b);
        SymMatrix::from_fn(n, |i, j| btb[(i, j)] + if i == j { 0.5 } else { 0.0 })
    }

    #[test]
    fn brute_force_sampling_oracle() {
        // 1e5 sampled directions: half global, half a shrinking random
        // search around the incumbent. No factorization is involved.
        let mut rng = seeded_rng(11);
        let g = random_spd(&mut rng, 4);
        let a = SymMatrix::from_fn(4, |_, _| rng.gen_range(-2.0f64..2.0));
        let lam = sym_generalized_eigen_min(&a, &g).unwrap();
        let rq = |v: &[f64]| a.quad(v) / g.quad(v);
        let gauss = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..4).map(|_| rng.sample(rand_distr::StandardNormal)).collect()
        };
        let mut best = gauss(&mut rng);
        let mut best_q = rq(&best);
        for _ in 0..50_000 {
            let v = gauss(&mut rng);
            let q = rq(&v);
            if q < best_q {
                best = v;
                best_q = q;
            }
        }
        let mut radius = 0.1;
        for k in 0..50_000 {
            let norm = best.iter().map(|x| x * x).sum::<f64>().sqrt();
            let step = gauss(&mut rng);
            let v: Vec<f64> = best.iter().zip(&step).map(|(b, s)| b / norm + radius * s).collect();
            let q = rq(&v);
            if q < best_q {
                best = v;
                best_q = q;
            }
            if k % 2_000 == 1_999 {
                radius *= 0.6;
            }
        }
        assert!(best_q >= lam - 1e-12);
        assert!((best_q - lam).abs() < 1e-6, "sampled {best_q} vs solver {lam}");
    }

    proptest::proptest! {
        #[test]
        fn congruence_invariance(seed in 0u64..10_000) {
            let mut rng = seeded_rng(seed);
            let g = random_spd(&mut rng, 4);
            let a = SymMatrix::from_fn(4, |_, _| rng.gen_range(-2.0f64..2.0));
            let s = loop {
                let s = Mat::from_fn(4, 4, |_, _| rng.gen_range(-1.0f64..1.0));
                if crate::numerics::invert(&s).is_ok() {
                    break s;
                }
            };
            let l0 = sym_generalized_eigen_min(&a, &g).unwrap();
            let l1 = sym_generalized_eigen_min(&a.congruence(&s), &g.congruence(&s)).unwrap();
            proptest::prop_assert!((l0 - l1).abs() <= 1e-9 * l0.abs().max(1.0));
        }
    }
}
