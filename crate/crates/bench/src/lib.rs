//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use wectkit::dataset::sample_intensities;
use wectkit::{
    equally_spaced, generate_support, vectorize, Direction, Extension, IntensityModel, ShapeKind, ShapeSpec,
    SimplicialComplex, VectorizedWect, Wect, WectEngine, WeightedComplex,
};

/// A 65 x 65 study image of `shape`, extended and ready to transform.
pub fn study_complex(shape: ShapeKind, model: IntensityModel, extension: Extension, seed: u64) -> WeightedComplex {
    let mask = generate_support(&ShapeSpec::study(shape)).unwrap();
    let complex = Arc::new(SimplicialComplex::from_mask(mask.n(), mask.cells()).unwrap());
    let image = sample_intensities(&mask, model, seed).unwrap();
    WeightedComplex::from_image(complex, &image).unwrap().extend(extension)
}

pub fn study_directions() -> Vec<Direction> {
    equally_spaced(15, wectkit::direction::DEFAULT_FIRST_ANGLE).unwrap()
}

/// WECTs of `count` images of one shape sharing one engine.
pub fn study_wects(shape: ShapeKind, model: IntensityModel, count: usize) -> Vec<Wect> {
    let first = study_complex(shape, model, Extension::Max, 0);
    let engine = WectEngine::new(first.shared_complex().clone(), &study_directions()).unwrap();
    let mask = generate_support(&ShapeSpec::study(shape)).unwrap();
    (0..count as u64)
        .map(|seed| {
            let image = sample_intensities(&mask, model, seed).unwrap();
            let k = WeightedComplex::from_image(first.shared_complex().clone(), &image)
                .unwrap()
                .extend(Extension::Max);
            engine.wect(&k).unwrap()
        })
        .collect()
}

pub fn study_vectors(wects: &[Wect]) -> Vec<VectorizedWect> {
    wects.iter().map(|w| vectorize(w, 91, -45.0, 45.0).unwrap()).collect()
}
