//! Second-order forward-mode derivatives.
//!
//! A [`Jet`] carries a value together with its first and second derivative
//! with respect to a single real variable. Only the operations needed by the
//! backward recurrence `t = b + a / t_next` are provided.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0)
    }

    /// The independent variable itself, evaluated at `x`.
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    pub fn recip(self) -> Self {
        Jet::constant(1.0) / self
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet::new(self.value + rhs.value, self.d1 + rhs.d1, self.d2 + rhs.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet::new(self.value - rhs.value, self.d1 - rhs.d1, self.d2 - rhs.d2)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.value, -self.d1, -self.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet::new(
            self.value * rhs.value,
            self.d1 * rhs.value + self.value * rhs.d1,
            self.d2 * rhs.value + 2.0 * self.d1 * rhs.d1 + self.value * rhs.d2,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    // q = a/t:  q' = (a' - q t')/t,  q'' = (a'' - 2 q' t' - q t'')/t
    fn div(self, rhs: Jet) -> Jet {
        let q = self.value / rhs.value;
        let q1 = (self.d1 - q * rhs.d1) / rhs.value;
        let q2 = (self.d2 - 2.0 * q1 * rhs.d1 - q * rhs.d2) / rhs.value;
        Jet::new(q, q1, q2)
    }
}
