//! Binary shape supports on the pixel grid.
//!
//! The seven study shapes are unions of lattice discs and rectangles minus
//! other discs and rectangles. Their constants live in `shapes.json` (versioned)
//! and were chosen to reproduce the target nonzero-pixel counts:
//!
//! | shape          | pixels |
//! |----------------|--------|
//! | disc           | 1257   |
//! | square         | 1225   |
//! | tetris         | 1248   |
//! | annulus        | 1212   |
//! | clusters       | 1125   |
//! | swiss cheese   | 1495   |
//! | square annulus | 1296   |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};
use crate::grid::Point;

pub const STUDY_GRID: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Disc,
    Square,
    Tetris,
    Annulus,
    Clusters,
    SwissCheese,
    SquareAnnulus,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 7] = [
        ShapeKind::Disc,
        ShapeKind::Square,
        ShapeKind::Tetris,
        ShapeKind::Annulus,
        ShapeKind::Clusters,
        ShapeKind::SwissCheese,
        ShapeKind::SquareAnnulus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Disc => "disc",
            ShapeKind::Square => "square",
            ShapeKind::Tetris => "tetris",
            ShapeKind::Annulus => "annulus",
            ShapeKind::Clusters => "clusters",
            ShapeKind::SwissCheese => "swiss_cheese",
            ShapeKind::SquareAnnulus => "square_annulus",
        }
    }

    /// Nonzero-pixel count the study geometry was calibrated against.
    pub fn target_pixels(self) -> usize {
        match self {
            ShapeKind::Disc => 1257,
            ShapeKind::Square => 1225,
            ShapeKind::Tetris => 1249,
            ShapeKind::Annulus => 1212,
            ShapeKind::Clusters => 1125,
            ShapeKind::SwissCheese => 1495,
            ShapeKind::SquareAnnulus => 1296,
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = WectError;

    fn from_str(s: &str) -> Result<ShapeKind> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        ShapeKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| WectError::UnknownShape(s.to_string()))
    }
}

/// A lattice region; rectangle bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Region {
    Disc { cx: i32, cy: i32, r2: i64 },
    Rect { x0: i32, y0: i32, x1: i32, y1: i32 },
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Region::Disc { cx, cy, r2 } => {
                let (dx, dy) = ((p.x - cx) as i64, (p.y - cy) as i64);
                dx * dx + dy * dy <= r2
            }
            Region::Rect { x0, y0, x1, y1 } => (x0..=x1).contains(&p.x) && (y0..=y1).contains(&p.y),
        }
    }

    /// Inclusive bounding box `(x0, y0, x1, y1)`.
    fn bounds(&self) -> (i32, i32, i32, i32) {
        match *self {
            Region::Disc { cx, cy, r2 } => {
                let r = (r2.max(0) as f64).sqrt().floor() as i32;
                (cx - r, cy - r, cx + r, cy + r)
            }
            Region::Rect { x0, y0, x1, y1 } => (x0, y0, x1, y1),
        }
    }
}

/// Union of `add` minus union of `remove`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Geometry {
    pub add: Vec<Region>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub remove: Vec<Region>,
}

impl Geometry {
    pub fn contains(&self, p: Point) -> bool {
        self.add.iter().any(|r| r.contains(p)) && !self.remove.iter().any(|r| r.contains(p))
    }
}

#[derive(Deserialize)]
struct GeometryTable {
    version: u32,
    grid: usize,
    shapes: BTreeMap<ShapeKind, Geometry>,
}

fn study_table() -> &'static GeometryTable {
    static TABLE: OnceLock<GeometryTable> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(include_str!("shapes.json")).expect("embedded shape table is valid"))
}

/// Version of the embedded geometry table.
pub fn geometry_version() -> u32 {
    study_table().version
}

pub fn study_geometry(kind: ShapeKind) -> &'static Geometry {
    &study_table().shapes[&kind]
}

/// A shape on an `n x n` grid. Without explicit geometry the study geometry
/// of `kind` is used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    #[serde(default = "default_grid")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
}

fn default_grid() -> usize {
    study_table().grid
}

impl ShapeSpec {
    pub fn study(kind: ShapeKind) -> ShapeSpec {
        ShapeSpec {
            kind,
            n: STUDY_GRID,
            geometry: None,
        }
    }

    /// A centred lattice disc `x^2 + y^2 <= r2`.
    pub fn disc(r2: i64, n: usize) -> ShapeSpec {
        ShapeSpec {
            kind: ShapeKind::Disc,
            n,
            geometry: Some(Geometry {
                add: vec![Region::Disc { cx: 0, cy: 0, r2 }],
                remove: vec![],
            }),
        }
    }

    /// A centred `side x side` square, `side` odd.
    pub fn square(side: i32, n: usize) -> ShapeSpec {
        let h = side / 2;
        ShapeSpec {
            kind: ShapeKind::Square,
            n,
            geometry: Some(Geometry {
                add: vec![Region::Rect {
                    x0: -h,
                    y0: -h,
                    x1: h,
                    y1: h,
                }],
                remove: vec![],
            }),
        }
    }

    pub fn geometry(&self) -> &Geometry {
        self.geometry.as_ref().unwrap_or_else(|| study_geometry(self.kind))
    }
}

/// Row-major binary mask of an `n x n` grid (row 0 at the top).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mask {
    n: usize,
    cells: Vec<bool>,
}

impl Mask {
    pub fn new(n: usize, cells: Vec<bool>) -> Result<Mask> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(WectError::EvenGrid(n));
        }
        if cells.len() != n * n {
            return Err(WectError::ImageShape {
                expected: n * n,
                found: cells.len(),
            });
        }
        Ok(Mask { n, cells })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.n + col]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Rasterizes a shape; fails when part of it falls outside the grid.
pub fn generate_support(spec: &ShapeSpec) -> Result<Mask> {
    let n = spec.n;
    if n == 0 || n.is_multiple_of(2) {
        return Err(WectError::EvenGrid(n));
    }
    let h = ((n - 1) / 2) as i32;
    let geometry = spec.geometry();
    if geometry.add.is_empty() {
        return Err(WectError::ShapeDoesNotFit("geometry has no regions".into()));
    }
    for region in &geometry.add {
        if let Region::Disc { r2, .. } = region {
            if *r2 < 0 {
                return Err(WectError::ShapeDoesNotFit(format!("negative squared radius {r2}")));
            }
        }
        let (x0, y0, x1, y1) = region.bounds();
        if x0 < -h || y0 < -h || x1 > h || y1 > h {
            return Err(WectError::ShapeDoesNotFit(format!(
                "{region:?} exceeds the {n}x{n} grid"
            )));
        }
    }
    let mut cells = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            cells.push(geometry.contains(Point::new(col as i32 - h, h - row as i32)));
        }
    }
    Mask::new(n, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SimplicialComplex;

    #[test]
    fn study_pixel_counts() {
        for kind in ShapeKind::ALL {
            let count = generate_support(&ShapeSpec::study(kind)).unwrap().count();
            let target = kind.target_pixels() as f64;
            let rel = (count as f64 - target).abs() / target;
            assert!(rel <= 0.02, "{kind}: {count} pixels vs {target}");
        }
        let exact = |k| generate_support(&ShapeSpec::study(k)).unwrap().count();
        assert_eq!(exact(ShapeKind::Square), 1225);
        assert_eq!(exact(ShapeKind::Disc), 1257);
        assert_eq!(exact(ShapeKind::Tetris), 1248);
        assert_eq!(geometry_version(), 1);
    }

    #[test]
    fn disc_radius_sweep_hits_target() {
        // brute-force lattice count over squared radii
        let count = |r2: i64| {
            let mut c = 0;
            for x in -32i64..=32 {
                for y in -32i64..=32 {
                    if x * x + y * y <= r2 {
                        c += 1;
                    }
                }
            }
            c
        };
        let hits: Vec<i64> = (0..1024).filter(|&r2| count(r2) == 1257).collect();
        assert_eq!(hits.first(), Some(&400));
        assert_eq!(generate_support(&ShapeSpec::disc(400, 65)).unwrap().count(), count(400));
    }

    #[test]
    fn degenerate_disc_is_the_center_pixel() {
        let m = generate_support(&ShapeSpec::disc(0, 65)).unwrap();
        assert_eq!(m.count(), 1);
        assert!(m.get(32, 32));
    }

    #[test]
    fn oversized_shapes_are_rejected() {
        assert!(matches!(
            generate_support(&ShapeSpec::disc(400, 21)),
            Err(WectError::ShapeDoesNotFit(_))
        ));
        assert!(generate_support(&ShapeSpec::study(ShapeKind::Square).clone()).is_ok());
        let mut small = ShapeSpec::study(ShapeKind::Square);
        small.n = 31;
        assert!(generate_support(&small).is_err());
    }

    #[test]
    fn supports_avoid_the_boundary_ring() {
        for kind in ShapeKind::ALL {
            let m = generate_support(&ShapeSpec::study(kind)).unwrap();
            let n = m.n();
            for i in 0..n {
                assert!(
                    !m.get(0, i) && !m.get(n - 1, i) && !m.get(i, 0) && !m.get(i, n - 1),
                    "{kind}"
                );
            }
        }
    }

    #[test]
    fn rotationally_symmetric_shapes() {
        for kind in [ShapeKind::Disc, ShapeKind::Annulus] {
            let m = generate_support(&ShapeSpec::study(kind)).unwrap();
            let n = m.n();
            for r in 0..n {
                for c in 0..n {
                    // quarter turn: (r, c) -> (c, n - 1 - r)
                    assert_eq!(m.get(r, c), m.get(c, n - 1 - r), "{kind}");
                }
            }
        }
    }

    #[test]
    fn topology_of_study_shapes() {
        let chi = |k| {
            let m = generate_support(&ShapeSpec::study(k)).unwrap();
            SimplicialComplex::from_mask(m.n(), m.cells())
                .unwrap()
                .euler_characteristic()
        };
        assert_eq!(chi(ShapeKind::Disc), 1);
        assert_eq!(chi(ShapeKind::Square), 1);
        assert_eq!(chi(ShapeKind::Tetris), 1);
        assert_eq!(chi(ShapeKind::Annulus), 0);
        assert_eq!(chi(ShapeKind::SquareAnnulus), 0);
        assert_eq!(chi(ShapeKind::Clusters), 5);
        assert_eq!(chi(ShapeKind::SwissCheese), 1 - 6);
    }

    #[test]
    fn names_parse() {
        for k in ShapeKind::ALL {
            assert_eq!(k.name().parse::<ShapeKind>().unwrap(), k);
        }
        assert_eq!("Swiss Cheese".parse::<ShapeKind>().unwrap(), ShapeKind::SwissCheese);
        assert!("hexagon".parse::<ShapeKind>().is_err());
    }
}
