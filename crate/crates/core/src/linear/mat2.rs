use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

/// Real 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn apply(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (x * self.a + y * self.b, x * self.c + y * self.d)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Eigenvalues from the characteristic polynomial, ordered so that the
    /// first has the larger modulus; the smaller one comes from the product of
    /// roots, which avoids cancellation.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let half_tr = 0.5 * self.trace();
        let det = self.det();
        let disc = half_tr * half_tr - det;
        if disc >= 0.0 {
            let root = disc.sqrt();
            let big = if half_tr >= 0.0 { half_tr + root } else { half_tr - root };
            if big == 0.0 {
                return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            }
            (Complex64::new(big, 0.0), Complex64::new(det / big, 0.0))
        } else {
            let im = (-disc).sqrt();
            (Complex64::new(half_tr, im), Complex64::new(half_tr, -im))
        }
    }

    /// `f(M)` for an entire function `f`, via the Newton form
    /// `f(λ₁) I + f[λ₁, λ₂] (M − λ₁ I)`, which stays valid at a defective double root.
    pub fn function(&self, f: impl Fn(Complex64) -> Complex64) -> Mat2 {
        let (l1, l2) = self.eigenvalues();
        let f1 = f(l1);
        let dd = divided_difference(&f, l1, l2, f1);
        let shifted = [
            Complex64::new(self.a, 0.0) - l1,
            Complex64::new(self.b, 0.0),
            Complex64::new(self.c, 0.0),
            Complex64::new(self.d, 0.0) - l1,
        ];
        Mat2::new(
            (f1 + dd * shifted[0]).re,
            (dd * shifted[1]).re,
            (dd * shifted[2]).re,
            (f1 + dd * shifted[3]).re,
        )
    }

    pub fn exp(&self) -> Mat2 {
        self.function(|z| z.exp())
    }
}

const CONTOUR_NODES: usize = 64;

/// `f[x, y] = (f(x) − f(y)) / (x − y)`, with a circular trapezoid contour
/// integral replacing the quotient when the nodes are close.
pub fn divided_difference(
    f: &impl Fn(Complex64) -> Complex64,
    x: Complex64,
    y: Complex64,
    fx: Complex64,
) -> Complex64 {
    let delta = x - y;
    if delta.norm() >= 0.5 {
        return (fx - f(y)) / delta;
    }
    let centre = (x + y) * 0.5;
    let radius = 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..CONTOUR_NODES {
        let theta = 2.0 * PI * (k as f64 + 0.5) / CONTOUR_NODES as f64;
        let u = Complex64::from_polar(radius, theta);
        let z = centre + u;
        acc += f(z) * u / ((z - x) * (z - y));
    }
    acc / CONTOUR_NODES as f64
}

/// `φ_k(z) = Σ_{n≥0} z^n / (n + k)!`, so `φ_0 = exp` and `φ_{k+1}(z) = (φ_k(z) − 1/k!) / z`.
pub fn phi(k: u32, z: Complex64) -> Complex64 {
    if k == 0 {
        return z.exp();
    }
    if z.norm() < 1.0 {
        let mut term = Complex64::new(1.0 / factorial(k), 0.0);
        let mut sum = term;
        for n in 1..40 {
            term *= z / (n + k) as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        return sum;
    }
    let mut p = z.exp();
    for j in 0..k {
        p = (p - 1.0 / factorial(j)) / z;
    }
    p
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}
