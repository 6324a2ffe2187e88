//! Order-independent summation of simplex weights.
//!
//! Weights are rounded to a fixed-point grid of 2^-64 and accumulated in an
//! `i128`, so the running Euler characteristic does not depend on the order in
//! which simplices of equal height are visited.

const SCALE: f64 = 18_446_744_073_709_551_616.0; // 2^64

/// Largest magnitude a single weight may have (keeps 2^24 additions in range).
pub const MAX_WEIGHT: f64 = 1.0e12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed(i128);

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);

    pub fn from_f64(value: f64) -> Fixed {
        debug_assert!(value.is_finite() && value.abs() <= MAX_WEIGHT);
        Fixed((value * SCALE).round() as i128)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE
    }
}

impl std::ops::Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for Fixed {
    fn add_assign(&mut self, rhs: Fixed) {
        self.0 += rhs.0;
    }
}

impl std::ops::Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(-self.0)
    }
}

impl std::iter::Sum for Fixed {
    fn sum<I: Iterator<Item = Fixed>>(iter: I) -> Fixed {
        iter.fold(Fixed::ZERO, |a, b| a + b)
    }
}

/// Signed weight `(-1)^dim * w` in fixed point.
pub(crate) fn signed(dim: usize, weight: f64) -> Fixed {
    let w = Fixed::from_f64(weight);
    if dim.is_multiple_of(2) {
        w
    } else {
        -w
    }
}
