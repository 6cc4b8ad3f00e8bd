//! Forward-mode dual numbers with a vector of partials.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value together with its first derivatives along the seeded directions.
/// Arithmetic follows the chain rule exactly; no truncation beyond first
/// order is involved.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub partials: Vec<f64>,
}

impl Dual {
    pub fn new(value: f64, partials: Vec<f64>) -> Dual {
        Dual { value, partials }
    }

    pub fn constant(value: f64, width: usize) -> Dual {
        Dual {
            value,
            partials: vec![0.0; width],
        }
    }

    pub fn powi(&self, n: i32) -> Dual {
        // d(a^n) = n a^(n-1) da; a^0 has zero derivative
        let value = self.value.powi(n);
        let factor = if n == 0 {
            0.0
        } else {
            f64::from(n) * self.value.powi(n - 1)
        };
        Dual {
            value,
            partials: self.partials.iter().map(|d| factor * d).collect(),
        }
    }

    pub fn sqrt(&self) -> Dual {
        let r = self.value.sqrt();
        let factor = 0.5 / r;
        Dual {
            value: r,
            partials: self.partials.iter().map(|d| factor * d).collect(),
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value + rhs.value,
            partials: zip(&self.partials, &rhs.partials, |a, b| a + b),
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value - rhs.value,
            partials: zip(&self.partials, &rhs.partials, |a, b| a - b),
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    // the product rule mixes + into Mul by nature
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Dual) -> Dual {
        // d(ab) = a db + b da
        let (a, b) = (self.value, rhs.value);
        Dual {
            value: a * b,
            partials: zip(&self.partials, &rhs.partials, |da, db| a * db + b * da),
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Dual) -> Dual {
        // d(a/b) = (b da - a db) / b^2
        let (a, b) = (self.value, rhs.value);
        let b2 = b * b;
        Dual {
            value: a / b,
            partials: zip(&self.partials, &rhs.partials, |da, db| (b * da - a * db) / b2),
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            value: -self.value,
            partials: self.partials.iter().map(|d| -d).collect(),
        }
    }
}

fn zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rule_for_sqrt() {
        // d sqrt(a)/da = 1/(2 sqrt a) at a = 4, seeded da = 1
        let a = Dual::new(4.0, vec![1.0]);
        let r = a.sqrt();
        assert_eq!(r.value, 2.0);
        assert!((r.partials[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn product_and_quotient() {
        let a = Dual::new(2.0, vec![1.0, 0.0]);
        let b = Dual::new(3.0, vec![0.0, 1.0]);
        let m = a.clone() * b.clone();
        assert_eq!(m.value, 6.0);
        assert_eq!(m.partials, vec![3.0, 2.0]);
        let q = a / b;
        assert!((q.value - 2.0 / 3.0).abs() < 1e-15);
        assert!((q.partials[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.partials[1] + 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn integer_power_including_negative() {
        let a = Dual::new(2.0, vec![1.0]);
        let r = a.powi(-2);
        assert!((r.value - 0.25).abs() < 1e-15);
        assert!((r.partials[0] + 0.25).abs() < 1e-15); // -2 * 2^-3
    }
}
