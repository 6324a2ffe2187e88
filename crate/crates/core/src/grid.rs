//! Images, their Freudenthal triangulation and weighted simplicial complexes.
//!
//! Pixel `(row, col)` of an `n x n` image (row 0 at the top) becomes the vertex
//! with integer coordinates `(col - h, h - row)`, `h = (n - 1) / 2`, so the
//! center pixel sits at the origin and `y` grows upwards. Every unit square of
//! the lattice is split by the diagonal running from its top-left to its
//! bottom-right corner.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};
use crate::exact::{self, Fixed};

/// Lattice location of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Point {
        Point { x, y }
    }
}

/// A square grayscale image with an odd side length and intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    n: usize,
    pixels: Vec<f64>,
}

impl Image {
    /// Builds an image from row-major intensities (row 0 is the top row).
    pub fn new(n: usize, pixels: Vec<f64>) -> Result<Image> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(WectError::EvenGrid(n));
        }
        if pixels.len() != n * n {
            return Err(WectError::ImageShape {
                expected: n * n,
                found: pixels.len(),
            });
        }
        for (i, &value) in pixels.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(WectError::IntensityOutOfRange {
                    row: i / n,
                    col: i % n,
                    value,
                });
            }
        }
        Ok(Image { n, pixels })
    }

    pub fn filled(n: usize, value: f64) -> Result<Image> {
        Image::new(n, vec![value; n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.n + col]
    }

    /// Half-width `(n - 1) / 2` of the coordinate square.
    pub fn half(&self) -> i32 {
        ((self.n - 1) / 2) as i32
    }

    pub fn point_of(&self, row: usize, col: usize) -> Point {
        let h = self.half();
        Point::new(col as i32 - h, h - row as i32)
    }

    /// Intensity at a lattice point, `None` outside the grid.
    pub fn at(&self, p: Point) -> Option<f64> {
        let h = self.half();
        let (col, row) = (p.x + h, h - p.y);
        let n = self.n as i32;
        if (0..n).contains(&col) && (0..n).contains(&row) {
            Some(self.get(row as usize, col as usize))
        } else {
            None
        }
    }

    /// Pixels with intensity strictly above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<bool> {
        self.pixels.iter().map(|&v| v > threshold).collect()
    }
}

/// A simplex of a two-dimensional complex, given by its vertex ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Simplex {
    Vertex([u32; 1]),
    Edge([u32; 2]),
    Triangle([u32; 3]),
}

impl Simplex {
    pub fn dim(&self) -> usize {
        match self {
            Simplex::Vertex(_) => 0,
            Simplex::Edge(_) => 1,
            Simplex::Triangle(_) => 2,
        }
    }

    pub fn vertices(&self) -> &[u32] {
        match self {
            Simplex::Vertex(v) => v,
            Simplex::Edge(v) => v,
            Simplex::Triangle(v) => v,
        }
    }
}

/// How vertex weights are carried to edges and triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    Max,
    Min,
    Avg,
}

impl Extension {
    pub const ALL: [Extension; 3] = [Extension::Max, Extension::Min, Extension::Avg];

    pub fn name(self) -> &'static str {
        match self {
            Extension::Max => "max",
            Extension::Min => "min",
            Extension::Avg => "avg",
        }
    }

    /// Weight of a simplex whose vertices carry `weights`.
    ///
    /// The average is summed in ascending order so it does not depend on the
    /// order in which the vertices are listed.
    pub fn apply(self, weights: &[f64]) -> f64 {
        match self {
            Extension::Max => weights.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Extension::Min => weights.iter().copied().fold(f64::INFINITY, f64::min),
            Extension::Avg => {
                let mut sorted = [0.0; 3];
                let sorted = &mut sorted[..weights.len()];
                sorted.copy_from_slice(weights);
                sorted.sort_by(f64::total_cmp);
                sorted.iter().sum::<f64>() / weights.len() as f64
            }
        }
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Extension {
    type Err = WectError;

    fn from_str(s: &str) -> Result<Extension> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max" | "maximum" => Ok(Extension::Max),
            "min" | "minimum" => Ok(Extension::Min),
            "avg" | "average" | "mean" => Ok(Extension::Avg),
            _ => Err(WectError::UnknownExtension(s.to_string())),
        }
    }
}

/// A simplicial complex embedded in the integer lattice, at most two-dimensional.
///
/// Simplex ids are positional: vertices first, then edges, then triangles.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    vertices: Vec<Point>,
    edges: Vec<[u32; 2]>,
    triangles: Vec<[u32; 3]>,
}

impl SimplicialComplex {
    /// Subcomplex of the Freudenthal triangulation of an `n x n` grid induced by
    /// the pixels set in the row-major `mask`.
    pub fn from_mask(n: usize, mask: &[bool]) -> Result<SimplicialComplex> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(WectError::EvenGrid(n));
        }
        if mask.len() != n * n {
            return Err(WectError::ImageShape {
                expected: n * n,
                found: mask.len(),
            });
        }
        let h = ((n - 1) / 2) as i32;
        Ok(SimplicialComplex::triangulate_block(n, n, mask, |row, col| {
            Point::new(col as i32 - h, h - row as i32)
        }))
    }

    /// Full Freudenthal triangulation of a `rows x cols` block of pixels, any
    /// size, with pixel `(row, col)` at `(col, -row)`.
    pub fn rectangle(rows: usize, cols: usize) -> SimplicialComplex {
        SimplicialComplex::triangulate_block(rows, cols, &vec![true; rows * cols], |row, col| {
            Point::new(col as i32, -(row as i32))
        })
    }

    fn triangulate_block(
        rows: usize,
        cols: usize,
        mask: &[bool],
        point: impl Fn(usize, usize) -> Point,
    ) -> SimplicialComplex {
        let mut ids = vec![u32::MAX; rows * cols];
        let mut vertices = Vec::new();
        for row in 0..rows {
            for col in 0..cols {
                if mask[row * cols + col] {
                    ids[row * cols + col] = vertices.len() as u32;
                    vertices.push(point(row, col));
                }
            }
        }
        let id = |row: usize, col: usize| -> Option<u32> {
            let v = ids[row * cols + col];
            (v != u32::MAX).then_some(v)
        };
        let mut edges = Vec::new();
        let mut triangles = Vec::new();
        for row in 0..rows {
            for col in 0..cols {
                let Some(a) = id(row, col) else { continue };
                // right neighbour
                if col + 1 < cols {
                    if let Some(b) = id(row, col + 1) {
                        edges.push([a, b]);
                    }
                }
                // neighbour below
                if row + 1 < rows {
                    if let Some(b) = id(row + 1, col) {
                        edges.push([a, b]);
                    }
                }
                if row + 1 < rows && col + 1 < cols {
                    let tr = id(row, col + 1);
                    let bl = id(row + 1, col);
                    if let Some(br) = id(row + 1, col + 1) {
                        edges.push([a, br]);
                        if let Some(tr) = tr {
                            triangles.push([a, tr, br]);
                        }
                        if let Some(bl) = bl {
                            triangles.push([a, bl, br]);
                        }
                    }
                }
            }
        }
        SimplicialComplex {
            vertices,
            edges,
            triangles,
        }
    }

    /// Full Freudenthal triangulation of an `n x n` grid.
    pub fn full_grid(n: usize) -> Result<SimplicialComplex> {
        SimplicialComplex::from_mask(n, &vec![true; n * n])
    }

    /// Builds a complex from explicit simplices, checking that it is closed
    /// under faces and that every simplex is non-degenerate.
    pub fn from_parts(
        vertices: Vec<Point>,
        edges: Vec<[u32; 2]>,
        triangles: Vec<[u32; 3]>,
    ) -> Result<SimplicialComplex> {
        let invalid = |msg: String| Err(WectError::InvalidComplex(msg));
        let nv = vertices.len() as u32;
        if vertices.iter().collect::<HashSet<_>>().len() != vertices.len() {
            return invalid("duplicate vertex locations".into());
        }
        let mut edge_set = HashSet::new();
        for e in &edges {
            if e[0] >= nv || e[1] >= nv {
                return invalid(format!("edge {e:?} references a missing vertex"));
            }
            if e[0] == e[1] {
                return invalid(format!("edge {e:?} is degenerate"));
            }
            if !edge_set.insert(sorted2(*e)) {
                return invalid(format!("duplicate edge {e:?}"));
            }
        }
        let mut tri_set = HashSet::new();
        for t in &triangles {
            if t.iter().any(|&v| v >= nv) {
                return invalid(format!("triangle {t:?} references a missing vertex"));
            }
            let [a, b, c] = t.map(|v| vertices[v as usize]);
            let cross = (b.x - a.x) as i64 * (c.y - a.y) as i64 - (b.y - a.y) as i64 * (c.x - a.x) as i64;
            if cross == 0 {
                return invalid(format!("triangle {t:?} is degenerate"));
            }
            for face in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                if !edge_set.contains(&sorted2(face)) {
                    return invalid(format!("triangle {t:?} is missing edge {face:?}"));
                }
            }
            let mut key = *t;
            key.sort_unstable();
            if !tri_set.insert(key) {
                return invalid(format!("duplicate triangle {t:?}"));
            }
        }
        Ok(SimplicialComplex {
            vertices,
            edges,
            triangles,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// `[|K0|, |K1|, |K2|]`.
    pub fn counts(&self) -> [usize; 3] {
        [self.vertices.len(), self.edges.len(), self.triangles.len()]
    }

    pub fn len(&self) -> usize {
        self.vertices.len() + self.edges.len() + self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn simplex(&self, id: usize) -> Simplex {
        let nv = self.vertices.len();
        let ne = self.edges.len();
        if id < nv {
            Simplex::Vertex([id as u32])
        } else if id < nv + ne {
            Simplex::Edge(self.edges[id - nv])
        } else {
            Simplex::Triangle(self.triangles[id - nv - ne])
        }
    }

    /// All simplices in id order.
    pub fn simplices(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.vertices.len() as u32)
            .map(|v| Simplex::Vertex([v]))
            .chain(self.edges.iter().map(|&e| Simplex::Edge(e)))
            .chain(self.triangles.iter().map(|&t| Simplex::Triangle(t)))
    }

    /// Alternating count `|K0| - |K1| + |K2|`.
    pub fn euler_characteristic(&self) -> i64 {
        let [v, e, t] = self.counts();
        v as i64 - e as i64 + t as i64
    }
}

fn sorted2(e: [u32; 2]) -> [u32; 2] {
    if e[0] <= e[1] {
        e
    } else {
        [e[1], e[0]]
    }
}

/// A complex together with vertex weights and, once extended, a weight for
/// every simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedComplex {
    complex: Arc<SimplicialComplex>,
    vertex_weights: Vec<f64>,
    extended: Option<(Extension, Vec<f64>)>,
}

impl WeightedComplex {
    pub fn new(complex: Arc<SimplicialComplex>, vertex_weights: Vec<f64>) -> Result<WeightedComplex> {
        if vertex_weights.len() != complex.vertices().len() {
            return Err(WectError::Mismatch(format!(
                "{} vertex weights for {} vertices",
                vertex_weights.len(),
                complex.vertices().len()
            )));
        }
        if let Some(w) = vertex_weights
            .iter()
            .find(|w| !w.is_finite() || w.abs() > exact::MAX_WEIGHT)
        {
            return Err(WectError::InvalidComplex(format!("vertex weight {w} is not usable")));
        }
        Ok(WeightedComplex {
            complex,
            vertex_weights,
            extended: None,
        })
    }

    /// Vertex weights read from the pixels of `image` under each vertex.
    pub fn from_image(complex: Arc<SimplicialComplex>, image: &Image) -> Result<WeightedComplex> {
        let weights = complex
            .vertices()
            .iter()
            .map(|&p| {
                image.at(p).ok_or_else(|| {
                    WectError::Mismatch(format!("vertex {p:?} lies outside the {0}x{0} image", image.n()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        WeightedComplex::new(complex, weights)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn shared_complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn extension(&self) -> Option<Extension> {
        self.extended.as_ref().map(|(e, _)| *e)
    }

    pub fn is_extended(&self) -> bool {
        self.extended.is_some()
    }

    /// Weight of every simplex in id order; fails before [`Self::extend`].
    pub fn weights(&self) -> Result<&[f64]> {
        self.extended
            .as_ref()
            .map(|(_, w)| w.as_slice())
            .ok_or(WectError::WeightsNotExtended)
    }

    /// Weight of one simplex. Vertex weights are always available; edges and
    /// triangles only after extension.
    pub fn weight(&self, id: usize) -> Result<f64> {
        match &self.extended {
            Some((_, w)) => Ok(w[id]),
            None if id < self.vertex_weights.len() => Ok(self.vertex_weights[id]),
            None => Err(WectError::WeightsNotExtended),
        }
    }

    /// Recomputes every simplex weight from the vertex weights.
    pub fn extend(mut self, extension: Extension) -> WeightedComplex {
        let mut weights = Vec::with_capacity(self.complex.len());
        weights.extend_from_slice(&self.vertex_weights);
        let vw = &self.vertex_weights;
        for e in self.complex.edges() {
            weights.push(extension.apply(&[vw[e[0] as usize], vw[e[1] as usize]]));
        }
        for t in self.complex.triangles() {
            weights.push(extension.apply(&[vw[t[0] as usize], vw[t[1] as usize], vw[t[2] as usize]]));
        }
        self.extended = Some((extension, weights));
        self
    }

    /// `(-1)^dim * weight` in fixed point for every simplex.
    pub(crate) fn signed_weights(&self) -> Result<Vec<Fixed>> {
        let weights = self.weights()?;
        let [nv, ne, _] = self.complex.counts();
        Ok(weights
            .iter()
            .enumerate()
            .map(|(id, &w)| {
                let dim = if id < nv {
                    0
                } else if id < nv + ne {
                    1
                } else {
                    2
                };
                exact::signed(dim, w)
            })
            .collect())
    }
}

/// Thresholds `image` to the pixels above `threshold` and triangulates them.
/// Only vertex weights are set; see [`extend_weights`].
pub fn triangulate(image: &Image, threshold: f64) -> Result<WeightedComplex> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(WectError::BadThreshold(threshold));
    }
    let complex = SimplicialComplex::from_mask(image.n(), &image.support(threshold))?;
    WeightedComplex::from_image(Arc::new(complex), image)
}

pub fn extend_weights(complex: WeightedComplex, extension: Extension) -> WeightedComplex {
    complex.extend(extension)
}

pub fn euler_characteristic(complex: &SimplicialComplex) -> i64 {
    complex.euler_characteristic()
}

/// `sum over simplices of (-1)^dim * weight`.
pub fn weighted_euler_characteristic(complex: &WeightedComplex) -> Result<f64> {
    Ok(complex.signed_weights()?.into_iter().sum::<Fixed>().to_f64())
}
