//! Quaternion scalars over the reals: `w + x·i + y·j + z·k`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A real quaternion `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// The imaginary unit used by η-conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Eta {
    I,
    J,
    K,
}

impl Eta {
    pub const ALL: [Eta; 3] = [Eta::I, Eta::J, Eta::K];

    /// The unit quaternion this variant stands for.
    pub fn unit(self) -> Quaternion {
        match self {
            Eta::I => Quaternion::I,
            Eta::J => Quaternion::J,
            Eta::K => Quaternion::K,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Eta::I => "i",
            Eta::J => "j",
            Eta::K => "k",
        }
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Eta {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i" => Ok(Eta::I),
            "j" => Ok(Eta::J),
            "k" => Ok(Eta::K),
            other => Err(format!("unknown eta `{other}` (expected i, j or k)")),
        }
    }
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    /// Builds `a + b·j` from the two complex halves `a = w + x i`, `b = y + z i`.
    pub fn from_parts(a: Complex64, b: Complex64) -> Self {
        Quaternion::new(a.re, a.im, b.re, b.im)
    }

    /// The complex halves `(w + x i, y + z i)` with `q = a + b·j`.
    pub fn parts(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    /// `−η · conj(q) · η`; flips the sign of the single component along η.
    pub fn eta_conj(self, eta: Eta) -> Self {
        match eta {
            Eta::I => Quaternion::new(self.w, -self.x, self.y, self.z),
            Eta::J => Quaternion::new(self.w, self.x, -self.y, self.z),
            Eta::K => Quaternion::new(self.w, self.x, self.y, -self.z),
        }
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self) -> Option<Self> {
        let n = self.norm_sqr();
        (n > 0.0).then(|| self.conj().scale(1.0 / n))
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a, b) = (self, o);
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Quaternion) {
        *self = *self * o;
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(4);
        let mut wrote = false;
        for (c, unit) in [(self.w, ""), (self.x, "i"), (self.y, "j"), (self.z, "k")] {
            if c == 0.0 && !(unit.is_empty() && *self == Quaternion::ZERO) {
                continue;
            }
            if wrote {
                write!(f, "{}", if c < 0.0 { " - " } else { " + " })?;
                write!(f, "{:.*}{unit}", prec, c.abs())?;
            } else {
                write!(f, "{:.*}{unit}", prec, c)?;
            }
            wrote = true;
        }
        Ok(())
    }
}

/// Free-function form of the Hamilton product.
pub fn quat_mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// Free-function form of η-conjugation.
pub fn quat_eta_conj(q: Quaternion, eta: Eta) -> Quaternion {
    q.eta_conj(eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_table() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        let m1 = -Quaternion::ONE;
        assert_eq!(i * i, m1);
        assert_eq!(j * j, m1);
        assert_eq!(k * k, m1);
        assert_eq!(i * j * k, m1);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
    }

    #[test]
    fn eta_conj_matches_triple_product() {
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.7);
        for eta in Eta::ALL {
            let e = eta.unit();
            let direct = -(e * q.conj() * e);
            assert_eq!(q.eta_conj(eta), direct);
        }
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(Quaternion::ZERO.inv().is_none());
        let q = Quaternion::new(1.0, 2.0, -1.0, 0.5);
        let p = q * q.inv().unwrap();
        assert!((p - Quaternion::ONE).abs() < 1e-15);
    }

    #[test]
    fn display() {
        assert_eq!(format!("{:.1}", Quaternion::new(1.0, -2.0, 0.0, 3.0)), "1.0 - 2.0i + 3.0k");
        assert_eq!(format!("{:.0}", Quaternion::ZERO), "0");
        assert_eq!(format!("{:.0}", Quaternion::J), "1j");
    }
}
