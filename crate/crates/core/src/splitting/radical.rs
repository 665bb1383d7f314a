//! Exact arithmetic in the biquadratic field `Q(sqrt5, sqrt6)`.
//!
//! Enough to carry the k = 4 telescoping constants symbolically: every one of
//! them is built from `sqrt(37.5) = (5/2) sqrt6` and
//! `sqrt(1687.5) = (15/2) sqrt30`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// `r0 + r1 sqrt5 + r2 sqrt6 + r3 sqrt30`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radical(pub [BigRational; 4]);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl Radical {
    pub fn rational(r: BigRational) -> Self {
        Radical([r, BigRational::zero(), BigRational::zero(), BigRational::zero()])
    }

    pub fn int(v: i64) -> Self {
        Self::rational(q(v, 1))
    }

    pub fn sqrt5() -> Self {
        Radical([BigRational::zero(), q(1, 1), BigRational::zero(), BigRational::zero()])
    }

    pub fn sqrt6() -> Self {
        Radical([BigRational::zero(), BigRational::zero(), q(1, 1), BigRational::zero()])
    }

    pub fn sqrt30() -> Self {
        Radical([BigRational::zero(), BigRational::zero(), BigRational::zero(), q(1, 1)])
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Radical(self.0.clone().map(|c| c * s))
    }

    /// Rational part when the element is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.0[1..].iter().all(Zero::is_zero).then(|| self.0[0].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    // sqrt5 -> -sqrt5
    fn conj5(&self) -> Self {
        let [a, b, c, d] = self.0.clone();
        Radical([a, -b, c, -d])
    }

    // sqrt6 -> -sqrt6
    fn conj6(&self) -> Self {
        let [a, b, c, d] = self.0.clone();
        Radical([a, b, -c, -d])
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let c = self.conj5() * self.conj6() * self.conj5().conj6();
        let norm = (self.clone() * c.clone()).as_rational().expect("field norm is rational");
        Some(c.scale(&(BigRational::from_integer(1.into()) / norm)))
    }

    pub fn to_f64(&self) -> f64 {
        let w = [1.0, 5f64.sqrt(), 6f64.sqrt(), 30f64.sqrt()];
        self.0.iter().zip(w).map(|(c, w)| c.to_f64().unwrap_or(f64::NAN) * w).sum()
    }
}

impl Add for Radical {
    type Output = Radical;
    fn add(self, o: Radical) -> Radical {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Radical([a + e, b + f, c + g, d + h])
    }
}

impl Sub for Radical {
    type Output = Radical;
    fn sub(self, o: Radical) -> Radical {
        self + (-o)
    }
}

impl Neg for Radical {
    type Output = Radical;
    fn neg(self) -> Radical {
        Radical(self.0.map(|c| -c))
    }
}

impl Mul for Radical {
    type Output = Radical;
    fn mul(self, o: Radical) -> Radical {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = o.0;
        let five = q(5, 1);
        let six = q(6, 1);
        let thirty = q(30, 1);
        // basis products: s5*s5 = 5, s6*s6 = 6, s30*s30 = 30, s5*s6 = s30,
        // s5*s30 = 5 s6, s6*s30 = 6 s5
        let r0 = &a0 * &b0 + &five * &a1 * &b1 + &six * &a2 * &b2 + &thirty * &a3 * &b3;
        let r1 = &a0 * &b1 + &a1 * &b0 + &six * (&a2 * &b3 + &a3 * &b2);
        let r2 = &a0 * &b2 + &a2 * &b0 + &five * (&a1 * &b3 + &a3 * &b1);
        let r3 = &a0 * &b3 + &a3 * &b0 + &a1 * &b2 + &a2 * &b1;
        Radical([r0, r1, r2, r3])
    }
}

impl Div for Radical {
    type Output = Radical;
    fn div(self, o: Radical) -> Radical {
        self * o.inverse().expect("division by zero radical")
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "*sqrt5", "*sqrt6", "*sqrt30"];
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| format!("({c}){n}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
