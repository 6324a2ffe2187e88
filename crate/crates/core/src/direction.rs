//! Unit directions in the plane and the lattice height function.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};
use crate::grid::Point;

/// Heights are snapped to multiples of 2^-30 so that lattice points at equal
/// true height share one filtration value (e.g. `cos(pi/2)` is not exactly 0).
const HEIGHT_QUANTUM: f64 = 1.0 / (1u64 << 30) as f64;

pub fn snap_height(h: f64) -> f64 {
    (h / HEIGHT_QUANTUM).round() * HEIGHT_QUANTUM
}

/// Angle of the default first direction `(0, 1)`.
pub const DEFAULT_FIRST_ANGLE: f64 = FRAC_PI_2;

/// A unit vector `s = (cos theta, sin theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct Direction {
    angle: f64,
    cos: f64,
    sin: f64,
}

impl Direction {
    /// Direction at `angle` radians from the positive x axis.
    pub fn from_angle(angle: f64) -> Direction {
        let angle = angle.rem_euclid(TAU);
        let (sin, cos) = angle.sin_cos();
        let clean = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
        Direction {
            angle: if angle >= TAU { 0.0 } else { angle },
            cos: clean(cos),
            sin: clean(sin),
        }
    }

    /// Direction of the (not necessarily unit) vector `(x, y)`.
    pub fn from_vector(x: f64, y: f64) -> Result<Direction> {
        if !(x.is_finite() && y.is_finite()) || (x == 0.0 && y == 0.0) {
            return Err(WectError::BadDirection(format!("({x}, {y})")));
        }
        Ok(Direction::from_angle(y.atan2(x)))
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn vector(&self) -> (f64, f64) {
        (self.cos, self.sin)
    }

    /// `h_s(v) = v . s`, snapped to the height grid.
    pub fn height(&self, p: Point) -> f64 {
        snap_height(p.x as f64 * self.cos + p.y as f64 * self.sin)
    }

    /// The opposite direction.
    pub fn reversed(&self) -> Direction {
        Direction::from_angle(self.angle + std::f64::consts::PI)
    }
}

impl From<f64> for Direction {
    fn from(angle: f64) -> Direction {
        Direction::from_angle(angle)
    }
}

impl From<Direction> for f64 {
    fn from(d: Direction) -> f64 {
        d.angle
    }
}

/// `count` equally spaced directions, the first at `first_angle`, in order of
/// increasing angle from the first.
pub fn equally_spaced(count: usize, first_angle: f64) -> Result<Vec<Direction>> {
    if count == 0 {
        return Err(WectError::NoDirections);
    }
    Ok((0..count)
        .map(|k| Direction::from_angle(first_angle + TAU * k as f64 / count as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_norm() {
        for k in 0..100 {
            let d = Direction::from_angle(k as f64 * 0.37);
            let (c, s) = d.vector();
            assert!((c * c + s * s - 1.0).abs() < 1e-12);
            assert!((0.0..TAU).contains(&d.angle()));
        }
    }

    #[test]
    fn heights_are_dot_products() {
        let east = Direction::from_vector(1.0, 0.0).unwrap();
        assert_eq!(east.height(Point::new(3, -2)), 3.0);
        let north = Direction::from_angle(FRAC_PI_2);
        assert_eq!(north.vector(), (0.0, 1.0));
        assert_eq!(north.height(Point::new(17, -4)), -4.0);
        let diag = Direction::from_angle(std::f64::consts::FRAC_PI_4);
        assert_eq!(diag.height(Point::new(1, -1)), 0.0);
        assert_eq!(diag.height(Point::new(1, 0)), diag.height(Point::new(0, 1)));
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert!(Direction::from_vector(0.0, 0.0).is_err());
        assert!(Direction::from_vector(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn spacing_starts_at_first_direction() {
        assert!(matches!(equally_spaced(0, 0.0), Err(WectError::NoDirections)));
        let ds = equally_spaced(4, DEFAULT_FIRST_ANGLE).unwrap();
        let vs: Vec<_> = ds.iter().map(|d| d.vector()).collect();
        assert_eq!(vs, vec![(0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)]);
    }
}
