//! Fixed-size 2×2 linear algebra used by the step map and the controllers.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2(pub [f64; 2]);

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Vec2 {
    pub const ZERO: Vec2 = Vec2([0.0, 0.0]);

    pub const fn new(a: f64, b: f64) -> Self {
        Vec2([a, b])
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    pub fn norm(self) -> f64 {
        self.0[0].hypot(self.0[1])
    }

    pub fn norm_inf(self) -> f64 {
        self.0[0].abs().max(self.0[1].abs())
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2([self.0[0] * k, self.0[1] * k])
    }

    /// Outer product `self · otherᵀ`.
    pub fn outer(self, other: Vec2) -> Mat2 {
        let [a, b] = self.0;
        let [c, d] = other.0;
        Mat2([[a * c, a * d], [b * c, b * d]])
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2([-self.0[0], -self.0[1]])
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn transpose(self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a, c], [b, d]])
    }

    pub fn trace(self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(self, k: f64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a * k, b * k], [c * k, d * k]])
    }

    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        let [[a, b], [c, d]] = self.0;
        let [x, y] = v.0;
        Vec2([a * x + b * y, c * x + d * y])
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(self) -> f64 {
        self.0
            .iter()
            .map(|row| row[0].abs() + row[1].abs())
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry.
    pub fn max_abs(self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Average with the transpose.
    pub fn symmetrize(self) -> Mat2 {
        (self + self.transpose()).scale(0.5)
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().flat_map(|row| row.iter()).all(|v| v.is_finite())
    }

    /// Eigenvalues from the characteristic polynomial `z² − tr·z + det`.
    ///
    /// Real pairs are sorted descending; complex pairs come back as
    /// `(re + i·im, re − i·im)` with `im > 0`.
    pub fn eigenvalues(self) -> [Complex64; 2] {
        let [[a, b], [c, d]] = self.0;
        let mean = 0.5 * (a + d);
        let half_gap = 0.5 * (a - d);
        // ((a−d)/2)² + bc equals (tr/2)² − det without the cancellation.
        let disc = half_gap * half_gap + b * c;
        if disc >= 0.0 {
            let root = disc.sqrt();
            [Complex64::new(mean + root, 0.0), Complex64::new(mean - root, 0.0)]
        } else {
            let im = (-disc).sqrt();
            [Complex64::new(mean, im), Complex64::new(mean, -im)]
        }
    }

    pub fn spectral_radius(self) -> f64 {
        let [a, b] = self.eigenvalues();
        a.norm().max(b.norm())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for (r, row) in out.0.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v += rhs.0[r][c];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = self.0;
        let b = rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        self.mul_vec(rhs)
    }
}

/// Roots of `z² − sum·z + product`, i.e. the pair with the given sum and product.
pub fn quadratic_roots(sum: f64, product: f64) -> [Complex64; 2] {
    let half = 0.5 * sum;
    let disc = half * half - product;
    if disc >= 0.0 {
        let root = disc.sqrt();
        // Larger-magnitude root first, the other from Vieta to avoid cancellation.
        let big = if half >= 0.0 { half + root } else { half - root };
        let small = if big != 0.0 { product / big } else { half - root };
        let (hi, lo) = if big >= small { (big, small) } else { (small, big) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let im = (-disc).sqrt();
        [Complex64::new(half, im), Complex64::new(half, -im)]
    }
}
