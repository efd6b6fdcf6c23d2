//! Order-3 Taylor jets.
//!
//! A [`Jet3`] carries `f(t), f'(t), f''(t), f'''(t)` through arithmetic and
//! elementary functions, so every curve quantity downstream (tangent,
//! curvature, torsion, second fundamental form) is computed from exact
//! derivatives instead of finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::Vector3;

/// Value and first three derivatives of a scalar function of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet3 {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const fn new(d0: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Self { d0, d1, d2, d3 }
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0)
    }

    /// The identity function evaluated at `t`.
    pub const fn variable(t: f64) -> Self {
        Self::new(t, 1.0, 0.0, 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0 && self.d3 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.d0.is_finite() && self.d1.is_finite() && self.d2.is_finite() && self.d3.is_finite()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.d0, self.d1, self.d2, self.d3]
    }

    /// Chain rule: `phi(self)` given `phi, phi', phi'', phi'''` at `self.d0`.
    pub fn compose(self, p0: f64, p1: f64, p2: f64, p3: f64) -> Self {
        let (f1, f2, f3) = (self.d1, self.d2, self.d3);
        Self { d0: p0, d1: p1 * f1, d2: p2 * f1 * f1 + p1 * f2, d3: p3 * f1 * f1 * f1 + 3.0 * p2 * f1 * f2 + p1 * f3 }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.d0, k * self.d1, k * self.d2, k * self.d3)
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.d0;
        let r2 = r * r;
        self.compose(r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2)
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.d0.sin_cos();
        self.compose(s, c, -s, -c)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.d0.sin_cos();
        self.compose(c, -s, -c, s)
    }

    pub fn tan(self) -> Self {
        let y = self.d0.tan();
        let p = 1.0 + y * y;
        self.compose(y, p, 2.0 * y * p, 2.0 * p * (1.0 + 3.0 * y * y))
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.d0.sinh(), self.d0.cosh());
        self.compose(s, c, s, c)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.d0.sinh(), self.d0.cosh());
        self.compose(c, s, c, s)
    }

    pub fn tanh(self) -> Self {
        let y = self.d0.tanh();
        let q = 1.0 - y * y;
        self.compose(y, q, -2.0 * y * q, q * (6.0 * y * y - 2.0))
    }

    /// Hyperbolic secant with its own derivative table (no `1/cosh`).
    pub fn sech(self) -> Self {
        let s = sech(self.d0);
        let y = self.d0.tanh();
        self.compose(s, -s * y, s * (2.0 * y * y - 1.0), s * y * (5.0 - 6.0 * y * y))
    }

    pub fn exp(self) -> Self {
        let e = self.d0.exp();
        self.compose(e, e, e, e)
    }

    /// Natural logarithm; caller guarantees `d0 > 0`.
    pub fn ln(self) -> Self {
        let r = 1.0 / self.d0;
        self.compose(self.d0.ln(), r, -r * r, 2.0 * r * r * r)
    }

    /// Square root; caller guarantees `d0 > 0`.
    pub fn sqrt(self) -> Self {
        let r = self.d0.sqrt();
        let ir = 1.0 / r;
        self.compose(r, 0.5 * ir, -0.25 * ir * ir * ir, 0.375 * ir.powi(5))
    }

    /// Arcsine; caller guarantees `|d0| < 1`.
    pub fn asin(self) -> Self {
        let x = self.d0;
        let q = 1.0 / (1.0 - x * x).sqrt();
        let q3 = q * q * q;
        self.compose(x.asin(), q, x * q3, (1.0 + 2.0 * x * x) * q3 * q * q)
    }

    pub fn atan(self) -> Self {
        let x = self.d0;
        let p = 1.0 / (1.0 + x * x);
        self.compose(x.atan(), p, -2.0 * x * p * p, (6.0 * x * x - 2.0) * p * p * p)
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet3::constant(1.0);
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

pub fn sech(x: f64) -> f64 {
    // 2 e^{-|x|} / (1 + e^{-2|x|}) stays finite for large |x|.
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(self.d0 + o.d0, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(self.d0 - o.d0, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, g: Jet3) -> Jet3 {
        let f = self;
        Jet3 {
            d0: f.d0 * g.d0,
            d1: f.d1 * g.d0 + f.d0 * g.d1,
            d2: f.d2 * g.d0 + 2.0 * f.d1 * g.d1 + f.d0 * g.d2,
            d3: f.d3 * g.d0 + 3.0 * (f.d2 * g.d1 + f.d1 * g.d2) + f.d0 * g.d3,
        }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, g: Jet3) -> Jet3 {
        self * g.recip()
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(self, c: f64) -> Jet3 {
        Jet3 { d0: self.d0 + c, ..self }
    }
}

impl Sub<f64> for Jet3 {
    type Output = Jet3;
    fn sub(self, c: f64) -> Jet3 {
        Jet3 { d0: self.d0 - c, ..self }
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, c: f64) -> Jet3 {
        self.scale(c)
    }
}

impl Mul<Jet3> for f64 {
    type Output = Jet3;
    fn mul(self, j: Jet3) -> Jet3 {
        j.scale(self)
    }
}

impl Div<f64> for Jet3 {
    type Output = Jet3;
    fn div(self, c: f64) -> Jet3 {
        self.scale(1.0 / c)
    }
}

/// Position and first three derivatives of a space curve at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub pos: Vector3<f64>,
    pub d1: Vector3<f64>,
    pub d2: Vector3<f64>,
    pub d3: Vector3<f64>,
}

impl CurveJet {
    pub fn from_components(x: Jet3, y: Jet3, z: Jet3) -> Self {
        Self {
            pos: Vector3::new(x.d0, y.d0, z.d0),
            d1: Vector3::new(x.d1, y.d1, z.d1),
            d2: Vector3::new(x.d2, y.d2, z.d2),
            d3: Vector3::new(x.d3, y.d3, z.d3),
        }
    }

    /// Component `i` (0, 1, 2) as a scalar jet.
    pub fn component(&self, i: usize) -> Jet3 {
        Jet3::new(self.pos[i], self.d1[i], self.d2[i], self.d3[i])
    }

    pub fn is_finite(&self) -> bool {
        (0..3).all(|i| self.component(i).is_finite())
    }

    pub fn translate(mut self, offset: Vector3<f64>) -> Self {
        self.pos += offset;
        self
    }
}
