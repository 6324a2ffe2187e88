//! Seeded image datasets with a stratified train/test split.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WectError};
use crate::grid::Image;
use crate::intensity::IntensityModel;
use crate::seed;
use crate::shapes::{generate_support, Mask, ShapeSpec};

/// One class of images: a shape filled with i.i.d. intensities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub shape: ShapeSpec,
    pub model: IntensityModel,
    pub count: usize,
    pub seed: u64,
}

/// Fills the pixels of `mask` with draws from `model`; other pixels are 0.
pub fn sample_intensities(mask: &Mask, model: IntensityModel, seed: u64) -> Result<Image> {
    let model = model.validate()?;
    let mut rng = seed::rng(seed);
    let pixels = mask
        .cells()
        .iter()
        .map(|&on| if on { model.sample(&mut rng) } else { 0.0 })
        .collect();
    Image::new(mask.n(), pixels)
}

/// Seed of image `index` of a class.
pub fn image_seed(class_seed: u64, index: usize) -> u64 {
    seed::derive(class_seed, &[index as u64])
}

/// The `count` images of one class, generated in parallel.
pub fn generate_class_images(spec: &DatasetSpec) -> Result<Vec<Image>> {
    let mask = generate_support(&spec.shape)?;
    (0..spec.count)
        .into_par_iter()
        .map(|i| sample_intensities(&mask, spec.model, image_seed(spec.seed, i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// Number of test images per class.
///
/// The test set holds `ceil(total / 5)` images, shared between classes in
/// proportion to their size by largest remainder (ties go to the lower class
/// index). Within a class the last images are the test images.
pub fn test_counts(class_sizes: &[usize]) -> Vec<usize> {
    let total: usize = class_sizes.iter().sum();
    if total == 0 {
        return vec![0; class_sizes.len()];
    }
    let test_total = total.div_ceil(5);
    let mut counts: Vec<usize> = class_sizes.iter().map(|&c| test_total * c / total).collect();
    let mut order: Vec<usize> = (0..class_sizes.len()).collect();
    // remainder of test_total * c / total, largest first
    order.sort_by_key(|&k| std::cmp::Reverse(test_total * class_sizes[k] % total));
    let mut left = test_total - counts.iter().sum::<usize>();
    for k in order {
        if left == 0 {
            break;
        }
        if counts[k] < class_sizes[k] {
            counts[k] += 1;
            left -= 1;
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub file: String,
    pub class: usize,
    pub seed: u64,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub geometry_version: u32,
    pub classes: Vec<DatasetSpec>,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn count(&self, split: Split) -> usize {
        self.entries.iter().filter(|e| e.split == split).count()
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub images: Vec<Image>,
    pub manifest: Manifest,
}

/// Generates every class and records per-image seeds, labels and the split.
pub fn generate_dataset(classes: &[DatasetSpec]) -> Result<Dataset> {
    if classes.is_empty() || classes.iter().any(|c| c.count == 0) {
        return Err(WectError::TooFewImages { min: 1, found: 0 });
    }
    let sizes: Vec<usize> = classes.iter().map(|c| c.count).collect();
    let tests = test_counts(&sizes);
    let mut images = Vec::new();
    let mut entries = Vec::new();
    for (class, spec) in classes.iter().enumerate() {
        let class_images = generate_class_images(spec)?;
        for (i, image) in class_images.into_iter().enumerate() {
            let index = images.len();
            entries.push(ManifestEntry {
                index,
                file: format!("img_{index:05}.csv"),
                class,
                seed: image_seed(spec.seed, i),
                split: if i >= spec.count - tests[class] {
                    Split::Test
                } else {
                    Split::Train
                },
            });
            images.push(image);
        }
    }
    Ok(Dataset {
        images,
        manifest: Manifest {
            geometry_version: crate::shapes::geometry_version(),
            classes: classes.to_vec(),
            entries,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::ShapeKind;

    fn spec(count: usize, seed: u64) -> DatasetSpec {
        DatasetSpec {
            shape: ShapeSpec::study(ShapeKind::Square),
            model: IntensityModel::Uniform,
            count,
            seed,
        }
    }

    #[test]
    fn stratified_split_counts() {
        assert_eq!(test_counts(&[125, 125]), vec![25, 25]);
        assert_eq!(test_counts(&[1, 1]), vec![1, 0]);
        assert_eq!(test_counts(&[10]), vec![2]);
        assert_eq!(test_counts(&[3, 7]), vec![1, 1]);
    }

    #[test]
    fn two_hundred_fifty_images() {
        let ds = generate_dataset(&[spec(125, 1), spec(125, 2)]).unwrap();
        assert_eq!(ds.images.len(), 250);
        assert_eq!(ds.manifest.count(Split::Train), 200);
        assert_eq!(ds.manifest.count(Split::Test), 50);
        for class in 0..2 {
            let n = ds.manifest.entries.iter().filter(|e| e.class == class).count();
            assert_eq!(n, 125);
        }
    }

    #[test]
    fn smallest_split() {
        let ds = generate_dataset(&[spec(1, 1), spec(1, 2)]).unwrap();
        assert_eq!(ds.manifest.count(Split::Train), 1);
        assert_eq!(ds.manifest.count(Split::Test), 1);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = generate_dataset(&[spec(4, 9)]).unwrap();
        let b = generate_dataset(&[spec(4, 9)]).unwrap();
        assert_eq!(a.images, b.images);
        assert_eq!(
            serde_json::to_string(&a.manifest).unwrap(),
            serde_json::to_string(&b.manifest).unwrap()
        );
        let c = generate_dataset(&[spec(4, 10)]).unwrap();
        assert_ne!(a.images, c.images);
    }

    #[test]
    fn pixels_outside_the_mask_are_zero() {
        let mask = generate_support(&ShapeSpec::study(ShapeKind::Annulus)).unwrap();
        let img = sample_intensities(&mask, IntensityModel::normal(0.25), 3).unwrap();
        for (on, v) in mask.cells().iter().zip(img.pixels()) {
            assert_eq!(*on, *v > 0.0);
        }
        assert!(sample_intensities(&mask, IntensityModel::normal(0.0), 3).is_err());
    }
}
