use rand_distr::{Distribution, StandardNormal};

use crate::numerics::{seeded_rng, Quaternion};
use crate::{Error, Real, Result};

type Q<T> = Quaternion<T>;

/// Unit checks on inputs accept this deviation of the norm from 1.
pub const UNIT_TOL: f64 = 1e-10;

/// `1e-12` in `f64`, a few ulps in narrower scalars.
fn alg_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}

fn require_unit<T: Real>(norm_sqr: T) -> Result<()> {
    let n = norm_sqr.sqrt();
    if (n - T::one()).abs() > T::lit(UNIT_TOL).max(T::epsilon() * T::lit(64.0)) {
        return Err(Error::NotUnit { norm: n.as_f64() });
    }
    Ok(())
}

/// A point of `S⁷ ⊂ H²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S7Point<T> {
    pub x: Q<T>,
    pub y: Q<T>,
}

impl<T: Real> S7Point<T> {
    pub fn new(x: Q<T>, y: Q<T>) -> Self {
        Self { x, y }
    }

    pub fn norm_sqr(&self) -> T {
        self.x.norm_sqr() + self.y.norm_sqr()
    }

    /// `(x q, y q)`.
    pub fn right_mul(&self, q: Q<T>) -> Self {
        Self::new(self.x * q, self.y * q)
    }

    /// `(q x, q y)`.
    pub fn left_mul(&self, q: Q<T>) -> Self {
        Self::new(q * self.x, q * self.y)
    }

    /// `k(x, y) = (x̄, ȳ)`.
    pub fn k(&self) -> Self {
        Self::new(self.x.conj(), self.y.conj())
    }

    pub fn dist(&self, o: &Self) -> T {
        ((self.x - o.x).norm_sqr() + (self.y - o.y).norm_sqr()).sqrt()
    }
}

/// A point of `S⁴ ⊂ R × H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S4Point<T> {
    pub r: T,
    pub q: Q<T>,
}

impl<T: Real> S4Point<T> {
    pub fn norm_sqr(&self) -> T {
        self.r * self.r + self.q.norm_sqr()
    }

    pub fn dist(&self, o: &Self) -> T {
        ((self.r - o.r) * (self.r - o.r) + (self.q - o.q).norm_sqr()).sqrt()
    }
}

/// `h(a, b) = (|a|² − |b|², 2 a b̄)`.
pub fn h<T: Real>(u: &S7Point<T>) -> Result<S4Point<T>> {
    require_unit(u.norm_sqr())?;
    Ok(S4Point {
        r: u.x.norm_sqr() - u.y.norm_sqr(),
        q: (u.x * u.y.conj()).scale(T::lit(2.0)),
    })
}

/// `h̃(a, b) = (|a|² − |b|², 2 ā b)`.
pub fn h_tilde<T: Real>(u: &S7Point<T>) -> Result<S4Point<T>> {
    require_unit(u.norm_sqr())?;
    Ok(S4Point {
        r: u.x.norm_sqr() - u.y.norm_sqr(),
        q: (u.x.conj() * u.y).scale(T::lit(2.0)),
    })
}

pub fn antipodal<T: Real>(v: &S4Point<T>) -> Result<S4Point<T>> {
    require_unit(v.norm_sqr())?;
    Ok(S4Point { r: -v.r, q: -v.q })
}

/// An element of `Sp(2)` as the quaternionic unitary matrix
/// `[[a, b], [c, d]]`: rows `(a, b)`, `(c, d)` are unit vectors of `H²`,
/// `a c̄ + b d̄ = 0` and `ā b + c̄ d = 0`.
///
/// The second row `(b, d)` of the `[[a, c], [b, d]]` layout is the column
/// `(b, d)` here; in that layout the right multiplication of the second row
/// by `q̄` and the Gromoll–Meyer action preserve exactly this set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sp2Element<T> {
    pub a: Q<T>,
    pub b: Q<T>,
    pub c: Q<T>,
    pub d: Q<T>,
}

impl<T: Real> Sp2Element<T> {
    pub fn identity() -> Self {
        Self {
            a: Q::one(),
            b: Q::zero(),
            c: Q::zero(),
            d: Q::one(),
        }
    }

    /// `(a, b)` and `(c, d)`.
    pub fn rows(&self) -> (S7Point<T>, S7Point<T>) {
        (S7Point::new(self.a, self.b), S7Point::new(self.c, self.d))
    }

    pub fn from_rows(r1: S7Point<T>, r2: S7Point<T>) -> Self {
        Self {
            a: r1.x,
            b: r1.y,
            c: r2.x,
            d: r2.y,
        }
    }

    /// Largest violation of the unit and orthogonality relations.
    pub fn constraint_residual(&self) -> T {
        let one = T::one();
        let r = [
            (self.a.norm_sqr() + self.b.norm_sqr() - one).abs(),
            (self.c.norm_sqr() + self.d.norm_sqr() - one).abs(),
            (self.a.norm_sqr() + self.c.norm_sqr() - one).abs(),
            (self.b.norm_sqr() + self.d.norm_sqr() - one).abs(),
            (self.a.conj() * self.b + self.c.conj() * self.d).norm(),
            (self.a * self.c.conj() + self.b * self.d.conj()).norm(),
        ];
        r.into_iter().fold(T::zero(), T::max)
    }

    pub fn dist(&self, o: &Self) -> T {
        let (p, q) = self.rows();
        let (r, s) = o.rows();
        (p.dist(&r).powi(2) + q.dist(&s).powi(2)).sqrt()
    }

    fn check(self) -> Result<Self> {
        let r = self.constraint_residual();
        if r > alg_tol::<T>() {
            return Err(Error::ConstraintViolated { residual: r.as_f64() });
        }
        Ok(self)
    }
}

/// A unit vector of `H²` orthogonal to `r` for `⟨u, v⟩ = u₁ v̄₁ + u₂ v̄₂`,
/// namely `q (−b̄ a / |a|, |a|)` (or `q (|b|, −ā b / |b|)` when `|a| < |b|`).
pub fn partner<T: Real>(r: &S7Point<T>, q: Q<T>) -> S7Point<T> {
    let (a, b) = (r.x, r.y);
    let (na, nb) = (a.norm(), b.norm());
    let v = if na >= nb {
        S7Point::new(-(b.conj() * a).scale(na.recip()), Q::real(na))
    } else {
        S7Point::new(Q::real(nb), -(a.conj() * b).scale(nb.recip()))
    };
    v.left_mul(q)
}

fn gaussian_quat<T: Real>(rng: &mut rand_chacha::ChaCha8Rng) -> Q<T> {
    let mut c = [T::zero(); 4];
    for v in &mut c {
        let z: f64 = StandardNormal.sample(rng);
        *v = T::lit(z);
    }
    Q::from_array(c)
}

/// Uniform random unit quaternion from `rng`.
pub fn random_unit_quat<T: Real>(rng: &mut rand_chacha::ChaCha8Rng) -> Q<T> {
    loop {
        let q = gaussian_quat::<T>(rng);
        if q.norm() > T::lit(1e-3) {
            return q.normalized();
        }
    }
}

pub fn random_s7<T: Real>(rng: &mut rand_chacha::ChaCha8Rng) -> S7Point<T> {
    loop {
        let u: S7Point<T> = S7Point::new(gaussian_quat(rng), gaussian_quat(rng));
        let n = u.norm_sqr().sqrt();
        if n > T::lit(1e-3) {
            return S7Point::new(u.x.scale(n.recip()), u.y.scale(n.recip()));
        }
    }
}

/// Random element: a uniform first row and a random partner.
pub fn random_sp2<T: Real>(seed: u64) -> Sp2Element<T> {
    random_sp2_from(&mut seeded_rng(seed))
}

pub fn random_sp2_from<T: Real>(rng: &mut rand_chacha::ChaCha8Rng) -> Sp2Element<T> {
    let r1 = random_s7(rng);
    let q = random_unit_quat(rng);
    Sp2Element::from_rows(r1, partner(&r1, q))
}

/// Nearest-style correction of an approximate element: normalize the first
/// row, remove its component from the second, normalize the second.
pub fn project_to_sp2<T: Real>(m: &Sp2Element<T>) -> Result<Sp2Element<T>> {
    let (r1, r2) = m.rows();
    let eps = T::lit(1e-6);
    let n1 = r1.norm_sqr().sqrt();
    if n1 < eps {
        return Err(Error::ProjectionFailed);
    }
    let r1 = S7Point::new(r1.x.scale(n1.recip()), r1.y.scale(n1.recip()));
    // λ = ⟨r2, r1⟩ = r2₁ r̄1₁ + r2₂ r̄1₂ ; r2 ← r2 − λ r1
    let lam = r2.x * r1.x.conj() + r2.y * r1.y.conj();
    let r2 = S7Point::new(r2.x - lam * r1.x, r2.y - lam * r1.y);
    let n2 = r2.norm_sqr().sqrt();
    if n2 < eps {
        return Err(Error::ProjectionFailed);
    }
    let r2 = S7Point::new(r2.x.scale(n2.recip()), r2.y.scale(n2.recip()));
    Ok(Sp2Element::from_rows(r1, r2))
}

fn check_input<T: Real>(q: Q<T>, m: &Sp2Element<T>) -> Result<()> {
    require_unit(q.norm_sqr())?;
    m.check()?;
    Ok(())
}

/// Principal action: `b ↦ b q̄`, `d ↦ d q̄`.
pub fn bullet_action<T: Real>(q: Q<T>, m: &Sp2Element<T>) -> Result<Sp2Element<T>> {
    check_input(q, m)?;
    let qb = q.conj();
    Sp2Element {
        a: m.a,
        b: m.b * qb,
        c: m.c,
        d: m.d * qb,
    }
    .check()
}

/// Gromoll–Meyer action: `a ↦ q a q̄`, `c ↦ q c q̄`, `b ↦ q b`, `d ↦ q d`.
pub fn star_action<T: Real>(q: Q<T>, m: &Sp2Element<T>) -> Result<Sp2Element<T>> {
    check_input(q, m)?;
    let qb = q.conj();
    Sp2Element {
        a: q * m.a * qb,
        b: q * m.b,
        c: q * m.c * qb,
        d: q * m.d,
    }
    .check()
}

/// Induced action on the first column `(a, c)`: `(q x q̄, q y q̄)`.
pub fn s7_action<T: Real>(q: Q<T>, u: &S7Point<T>) -> Result<S7Point<T>> {
    require_unit(q.norm_sqr())?;
    require_unit(u.norm_sqr())?;
    let qb = q.conj();
    Ok(S7Point::new(q * u.x * qb, q * u.y * qb))
}

/// `(a, c)`, the column the bullet action leaves fixed.
pub fn sp2_projection<T: Real>(m: &Sp2Element<T>) -> S7Point<T> {
    S7Point::new(m.a, m.c)
}

/// A point `(u₁, …, u_m)` of `(S⁷)^m` with `h(u₁) = α h(u₂)` and
/// `h̃(u_j) = α h(u_{j+1})` for `j ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sp2mElement<T> {
    pub u: Vec<S7Point<T>>,
}

impl<T: Real> Sp2mElement<T> {
    pub fn m(&self) -> usize {
        self.u.len()
    }

    /// Largest deviation among unit norms and the defining relations.
    pub fn constraint_residual(&self) -> Result<T> {
        let mut worst = T::zero();
        for u in &self.u {
            worst = worst.max((u.norm_sqr() - T::one()).abs());
        }
        for j in 0..self.u.len().saturating_sub(1) {
            let lhs = if j == 0 { h(&self.u[0])? } else { h_tilde(&self.u[j])? };
            let rhs = antipodal(&h(&self.u[j + 1])?)?;
            worst = worst.max(lhs.dist(&rhs));
        }
        Ok(worst)
    }

    /// Builds a point from the pair description: `(u₁, u₂)` from an `Sp(2)`
    /// element through `k`, then `u_{j+1}` with `(k u_j, u_{j+1})` in `Sp(2)`.
    pub fn random(m: usize, seed: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::BadParams(format!("Sp(2, m) needs m ≥ 2, got {m}")));
        }
        let mut rng = seeded_rng(seed);
        let e: Sp2Element<T> = random_sp2_from(&mut rng);
        let (r1, r2) = e.rows();
        let mut u = vec![r1.k(), r2.k()];
        while u.len() < m {
            let last = *u.last().expect("nonempty");
            let q = random_unit_quat(&mut rng);
            u.push(partner(&last, q).k());
        }
        Ok(Self { u })
    }

    /// For `m = 2`: the `Sp(2)` element with rows `k u₁`, `k u₂`.
    pub fn as_sp2(&self) -> Option<Sp2Element<T>> {
        (self.u.len() == 2).then(|| Sp2Element::from_rows(self.u[0].k(), self.u[1].k()))
    }

    pub fn dist(&self, o: &Self) -> T {
        self.u
            .iter()
            .zip(&o.u)
            .fold(T::zero(), |s, (a, b)| s + a.dist(b).powi(2))
            .sqrt()
    }
}

/// `(u₁ q̄₁, u₂ q̄₂, q₂ u₃ q̄₃, …, q_{m−1} u_m q̄_m)`.
pub fn wilhelm_action<T: Real>(qs: &[Q<T>], e: &Sp2mElement<T>) -> Result<Sp2mElement<T>> {
    if qs.len() != e.m() {
        return Err(Error::DimensionMismatch {
            expected: e.m(),
            found: qs.len(),
        });
    }
    for q in qs {
        require_unit(q.norm_sqr())?;
    }
    let r = e.constraint_residual()?;
    if r > alg_tol::<T>() {
        return Err(Error::ConstraintViolated { residual: r.as_f64() });
    }
    let u = e
        .u
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let right = u.right_mul(qs[j].conj());
            if j >= 2 {
                right.left_mul(qs[j - 1])
            } else {
                right
            }
        })
        .collect();
    let out = Sp2mElement { u };
    let r = out.constraint_residual()?;
    if r > alg_tol::<T>() {
        return Err(Error::ConstraintViolated { residual: r.as_f64() });
    }
    Ok(out)
}

/// Sampled evidence that the actions have no fixed points: the smallest
/// displacement `|q·x − x| / |q − 1|` over the samples, per action.
#[derive(Debug, Clone, PartialEq)]
pub struct FreenessReport {
    pub samples: usize,
    pub bullet_min_ratio: f64,
    pub star_min_ratio: f64,
    pub wilhelm_min_ratio: f64,
}

pub fn freeness_check(samples: usize, seed: u64) -> Result<FreenessReport> {
    let mut rng = seeded_rng(seed);
    let mut out = FreenessReport {
        samples,
        bullet_min_ratio: f64::INFINITY,
        star_min_ratio: f64::INFINITY,
        wilhelm_min_ratio: f64::INFINITY,
    };
    let w: Sp2mElement<f64> = Sp2mElement::random(3, seed ^ 0x3)?;
    for _ in 0..samples {
        let m: Sp2Element<f64> = random_sp2_from(&mut rng);
        let q: Q<f64> = random_unit_quat(&mut rng);
        let gap = (q - Q::one()).norm();
        if gap < 1e-9 || (q + Q::one()).norm() < 1e-9 {
            continue;
        }
        out.bullet_min_ratio = out.bullet_min_ratio.min(bullet_action(q, &m)?.dist(&m) / gap);
        out.star_min_ratio = out.star_min_ratio.min(star_action(q, &m)?.dist(&m) / gap);
        let qs = [q, Q::one(), Q::one()];
        out.wilhelm_min_ratio = out.wilhelm_min_ratio.min(wilhelm_action(&qs, &w)?.dist(&w) / gap);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poles() {
        let n = h(&S7Point::new(Q::<f64>::one(), Q::zero())).unwrap();
        assert_eq!((n.r, n.q), (1.0, Q::zero()));
        let s = h(&S7Point::new(Q::<f64>::zero(), Q::one())).unwrap();
        assert_eq!((s.r, s.q), (-1.0, Q::zero()));
    }

    #[test]
    fn not_unit_rejected() {
        let u = S7Point::new(Q::<f64>::real(2.0), Q::zero());
        assert!(matches!(h(&u), Err(Error::NotUnit { .. })));
    }

    #[test]
    fn identity_actions() {
        let m = random_sp2::<f64>(3);
        assert!(bullet_action(Q::one(), &m).unwrap().dist(&m) < 1e-15);
        assert!(star_action(Q::one(), &m).unwrap().dist(&m) < 1e-15);
        let u = sp2_projection(&m);
        assert!(s7_action(Q::one(), &u).unwrap().dist(&u) < 1e-15);
    }

    #[test]
    fn projection_fixes_identity_and_rejects_zero() {
        let i = Sp2Element::<f64>::identity();
        assert_eq!(project_to_sp2(&i).unwrap(), i);
        let z = Sp2Element {
            a: Q::<f64>::zero(),
            b: Q::zero(),
            c: Q::one(),
            d: Q::zero(),
        };
        assert_eq!(project_to_sp2(&z), Err(Error::ProjectionFailed));
    }

    #[test]
    fn sp2m_random_points_satisfy_relations() {
        for m in 2..6 {
            let e = Sp2mElement::<f64>::random(m, m as u64).unwrap();
            assert!(e.constraint_residual().unwrap() < 1e-12);
        }
    }

    #[test]
    fn m2_is_sp2() {
        let e = Sp2mElement::<f64>::random(2, 11).unwrap();
        assert!(e.as_sp2().unwrap().constraint_residual() < 1e-12);
    }
}
