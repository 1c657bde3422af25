use std::ops::{Add, Mul, Neg, Sub};

use crate::Real;

/// Quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn zero() -> Self {
        Self::real(T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(self) -> Self {
        self.scale(self.norm().recip())
    }

    /// Imaginary part.
    pub fn im(self) -> Self {
        Self::new(T::zero(), self.x, self.y, self.z)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn inverse(self) -> Self {
        self.conj().scale(self.norm_sqr().recip())
    }
}

pub fn quat_conj<T: Real>(q: Quaternion<T>) -> Quaternion<T> {
    q.conj()
}

/// Hamilton product.
pub fn quat_mul<T: Real>(p: Quaternion<T>, q: Quaternion<T>) -> Quaternion<T> {
    Quaternion::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, q: Self) -> Self {
        quat_mul(self, q)
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, q: Self) -> Self {
        Self::new(self.w + q.w, self.x + q.x, self.y + q.y, self.z + q.z)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, q: Self) -> Self {
        Self::new(self.w - q.w, self.x - q.x, self.y - q.y, self.z - q.z)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion<f64>;

    #[test]
    fn hamilton_relations() {
        assert_eq!(Q::i() * Q::j(), Q::k());
        assert_eq!(Q::j() * Q::k(), Q::i());
        assert_eq!(Q::k() * Q::i(), Q::j());
        assert_eq!(Q::i() * Q::i(), -Q::one());
        assert_eq!(Q::j() * Q::i(), -Q::k());
    }

    #[test]
    fn identity_and_conjugate() {
        let q = Q::new(0.3, -1.2, 2.0, 0.5);
        assert_eq!(Q::one() * q, q);
        assert_eq!(q * Q::one(), q);
        assert_eq!(q.conj(), Q::new(0.3, 1.2, -2.0, -0.5));
        let n = q * q.conj();
        assert!((n.w - q.norm_sqr()).abs() < 1e-15);
        assert!(n.im().norm() < 1e-15);
    }
}
