//! Fixed-size vectors and matrices in two and three dimensions.

use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector2<T> {
    pub x: T,
    pub y: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

/// 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2<T> {
    pub m: [[T; 2]; 2],
}

/// 3x3 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Vector2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// 2D cross product `x1*y2 - y1*x2`.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    /// Counter-clockwise rotation by 90 degrees.
    pub fn rot90(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn normalize(self) -> Self {
        self / self.norm()
    }
}

impl<T: Real> Vector3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn normalize(self) -> Self {
        self / self.norm()
    }

    /// Outer product `self * other^T`.
    pub fn outer(self, o: Self) -> Matrix3<T> {
        Matrix3 {
            m: [
                [self.x * o.x, self.x * o.y, self.x * o.z],
                [self.y * o.x, self.y * o.y, self.y * o.z],
                [self.z * o.x, self.z * o.y, self.z * o.z],
            ],
        }
    }

    /// Some unit vector orthogonal to `self` (which must be nonzero),
    /// chosen deterministically from the smallest component.
    pub fn any_orthonormal(self) -> Self {
        let n = self.normalize();
        let ax = n.x.abs();
        let ay = n.y.abs();
        let az = n.z.abs();
        let pick = if ax <= ay && ax <= az {
            Self::new(T::one(), T::zero(), T::zero())
        } else if ay <= az {
            Self::new(T::zero(), T::one(), T::zero())
        } else {
            Self::new(T::zero(), T::zero(), T::one())
        };
        (pick - n * pick.dot(n)).normalize()
    }

    pub fn as_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Real> Index<usize> for Vector3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("index out of range"),
        }
    }
}

impl<T: Real> IndexMut<usize> for Vector3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("index out of range"),
        }
    }
}

impl<T: Real> Matrix2<T> {
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Self {
            m: [[a11, a12], [a21, a22]],
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    /// Rotation by `psi` in the plane.
    pub fn rotation(psi: T) -> Self {
        let (s, c) = (psi.sin(), psi.cos());
        Self::new(c, s, -s, c)
    }

    pub fn transpose(self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn det(self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul_vec(self, v: Vector2<T>) -> Vector2<T> {
        Vector2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    pub fn mul_mat(self, o: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        r
    }

    /// Frobenius norm.
    pub fn norm(self) -> T {
        let mut s = T::zero();
        for row in &self.m {
            for &e in row {
                s = s + e * e;
            }
        }
        s.sqrt()
    }
}

impl<T: Real> Matrix3<T> {
    pub fn zero() -> Self {
        Self {
            m: [[T::zero(); 3]; 3],
        }
    }

    pub fn identity() -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            r.m[i][i] = T::one();
        }
        r
    }

    pub fn from_rows(r0: Vector3<T>, r1: Vector3<T>, r2: Vector3<T>) -> Self {
        Self {
            m: [r0.as_array(), r1.as_array(), r2.as_array()],
        }
    }

    pub fn diagonal(d: Vector3<T>) -> Self {
        let mut r = Self::zero();
        r.m[0][0] = d.x;
        r.m[1][1] = d.y;
        r.m[2][2] = d.z;
        r
    }

    pub fn transpose(self) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[j][i];
            }
        }
        r
    }

    pub fn row(self, i: usize) -> Vector3<T> {
        Vector3::new(self.m[i][0], self.m[i][1], self.m[i][2])
    }

    pub fn col(self, j: usize) -> Vector3<T> {
        Vector3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn mul_vec(self, v: Vector3<T>) -> Vector3<T> {
        Vector3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    pub fn mul_mat(self, o: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for k in 0..3 {
                    s = s + self.m[i][k] * o.m[k][j];
                }
                r.m[i][j] = s;
            }
        }
        r
    }

    /// Frobenius norm.
    pub fn norm(self) -> T {
        let mut s = T::zero();
        for row in &self.m {
            for &e in row {
                s = s + e * e;
            }
        }
        s.sqrt()
    }

    pub fn is_symmetric(self, tol: T) -> bool {
        let scale = self.norm().max(T::one());
        (self.m[0][1] - self.m[1][0]).abs() <= tol * scale
            && (self.m[0][2] - self.m[2][0]).abs() <= tol * scale
            && (self.m[1][2] - self.m[2][1]).abs() <= tol * scale
    }
}

macro_rules! impl_vec_ops {
    ($name:ident { $($f:ident),+ }) => {
        impl<T: Real> Add for $name<T> {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                Self { $($f: self.$f + o.$f),+ }
            }
        }
        impl<T: Real> Sub for $name<T> {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                Self { $($f: self.$f - o.$f),+ }
            }
        }
        impl<T: Real> Neg for $name<T> {
            type Output = Self;
            fn neg(self) -> Self {
                Self { $($f: -self.$f),+ }
            }
        }
        impl<T: Real> Mul<T> for $name<T> {
            type Output = Self;
            fn mul(self, s: T) -> Self {
                Self { $($f: self.$f * s),+ }
            }
        }
        impl<T: Real> Div<T> for $name<T> {
            type Output = Self;
            fn div(self, s: T) -> Self {
                Self { $($f: self.$f / s),+ }
            }
        }
        impl<T: Real> AddAssign for $name<T> {
            fn add_assign(&mut self, o: Self) {
                $(self.$f = self.$f + o.$f;)+
            }
        }
        impl<T: Real> SubAssign for $name<T> {
            fn sub_assign(&mut self, o: Self) {
                $(self.$f = self.$f - o.$f;)+
            }
        }
    };
}

impl_vec_ops!(Vector2 { x, y });
impl_vec_ops!(Vector3 { x, y, z });

impl<T: Real> Add for Matrix3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        r
    }
}

impl<T: Real> Sub for Matrix3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        r
    }
}

impl<T: Real> Mul<T> for Matrix3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[i][j] * s;
            }
        }
        r
    }
}

/// Compensated (Kahan) accumulator for deterministic sums.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }
}

impl<T: Real> KahanSum<T> {
    pub fn add(&mut self, x: T) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum
    }
}
