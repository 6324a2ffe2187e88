//! One function per subcommand. Each writes its outputs, reads them back and
//! checks them before reporting success.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{ensure, Context, Result};
use rayon::prelude::*;
use wectkit::classify::{direction_sweep, run_experiments};
use wectkit::dataset::generate_dataset;
use wectkit::io::{
    append_results_csv, read_dataset, read_json, read_matrix_csv, read_vectorized, read_wect_json, write_curve_csv,
    write_dataset, write_distance_matrix, write_json, write_vectorized, write_wect_json, CurveTable, MANIFEST,
};
use wectkit::{
    compute_wect_along, default_interval, distance_matrix, equally_spaced, expected_wecf, generate_support,
    monte_carlo_wecf_mean, seed, thresholds, triangulate, vectorize, DatasetSpec, Direction, ShapeSpec,
    SimplicialComplex, StepFunction, Wect,
};

use crate::config::{self, pick_seed, resolve, schema, Support};
use crate::RunConfig;

fn interval(given: Option<[f64; 2]>, n: usize) -> (f64, f64) {
    given.map_or_else(|| default_interval(n), |[a, b]| (a, b))
}

/// Replaces `path` so reruns never append to stale output.
fn write_fresh(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn csv_rows(path: &Path) -> Result<usize> {
    let text = fs::read_to_string(path)?;
    ensure!(text.ends_with('\n'), "{} is truncated", path.display());
    Ok(text.lines().count())
}

pub fn generate(run: &RunConfig) -> Result<()> {
    let cfg: config::GenerateConfig = config::load(&run.config)?;
    let seed = pick_seed(run.seed, cfg.seed)?;
    if cfg.classes.is_empty() {
        return Err(schema("\"classes\" must list at least one class"));
    }
    let specs: Vec<DatasetSpec> = cfg
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| DatasetSpec {
            shape: ShapeSpec {
                kind: c.shape,
                n: c.n,
                geometry: None,
            },
            model: c.distribution,
            count: c.count,
            seed: seed::derive(seed, &[i as u64]),
        })
        .collect();
    let dataset = generate_dataset(&specs)?;
    write_dataset(&run.out, &dataset)?;

    let back = read_dataset(&run.out)?;
    ensure!(back.manifest == dataset.manifest, "{} does not round-trip", MANIFEST);
    ensure!(back.images == dataset.images, "image files do not round-trip");
    println!(
        "wrote {} images and {} to {}",
        dataset.images.len(),
        MANIFEST,
        run.out.display()
    );
    Ok(())
}

pub fn wect(run: &RunConfig) -> Result<()> {
    let cfg: config::WectConfig = config::load(&run.config)?;
    let path = resolve(&run.config, &cfg.image);
    let (image, _) = wectkit::io::read_image_with_meta(&path)?;
    let k = triangulate(&image, 0.0)?.extend(cfg.extension);
    let dirs = equally_spaced(cfg.n_s, cfg.first_angle)?;
    let wect = compute_wect_along(&k, &dirs)?;
    let (t_min, t_max) = interval(cfg.interval, image.n());
    let v = vectorize(&wect, cfg.n_v, t_min, t_max)?;

    let (json, csv, header) = (
        run.out.join("wect.json"),
        run.out.join("vector.csv"),
        run.out.join("vector.json"),
    );
    write_wect_json(&json, &wect)?;
    write_vectorized(&csv, &header, &v)?;

    ensure!(read_wect_json(&json)? == wect, "{} does not round-trip", json.display());
    ensure!(
        read_vectorized(&csv, &header)? == v,
        "{} does not round-trip",
        csv.display()
    );
    println!(
        "wrote {} directions x {} thresholds to {}",
        v.n_s,
        v.n_v,
        run.out.display()
    );
    Ok(())
}

pub fn expect(run: &RunConfig) -> Result<()> {
    let cfg: config::ExpectConfig = config::load(&run.config)?;
    let n = cfg.n;
    let complex = match cfg.support {
        Support::Full => SimplicialComplex::full_grid(n)?,
        Support::Empty => SimplicialComplex::from_mask(n, &vec![false; n * n])?,
        Support::Shape(kind) => {
            let mask = generate_support(&ShapeSpec {
                kind,
                n,
                geometry: None,
            })?;
            SimplicialComplex::from_mask(n, mask.cells())?
        }
    };
    let s = Direction::from_angle(cfg.angle);
    let curve = expected_wecf(&Arc::new(complex), s, cfg.extension, cfg.distribution)?;
    let (t_min, t_max) = interval(cfg.interval, n);
    let ts = thresholds(cfg.n_v, t_min, t_max)?;
    let mut table = CurveTable {
        expected: Some(curve.sample(&ts)),
        thresholds: ts,
        ..CurveTable::default()
    };
    if let Some(images) = cfg.monte_carlo {
        let shape = match cfg.support {
            Support::Full => ShapeSpec::square(n as i32, n),
            Support::Shape(kind) => ShapeSpec {
                kind,
                n,
                geometry: None,
            },
            Support::Empty => return Err(schema("\"monte_carlo\" needs a nonempty support")),
        };
        let seed = pick_seed(run.seed, cfg.seed)?;
        let mc = monte_carlo_wecf_mean(
            &shape,
            cfg.distribution,
            cfg.extension,
            s,
            images,
            seed,
            &table.thresholds,
        )?;
        table.mean = Some(mc.mean);
        table.std = Some(mc.std);
    }

    let (csv, json) = (run.out.join("expected.csv"), run.out.join("expected.json"));
    write_curve_csv(&csv, &table)?;
    write_json(&json, &curve)?;

    ensure!(
        csv_rows(&csv)? == table.thresholds.len() + 1,
        "{} has the wrong row count",
        csv.display()
    );
    ensure!(
        read_json::<StepFunction>(&json)? == curve,
        "{} does not round-trip",
        json.display()
    );
    println!(
        "wrote expected curve with {} breakpoints to {}",
        curve.len(),
        run.out.display()
    );
    Ok(())
}

pub fn distance(run: &RunConfig) -> Result<()> {
    let cfg: config::DistanceConfig = config::load(&run.config)?;
    let (wects, (t_min, t_max)) = match (&cfg.dataset, cfg.wects.is_empty()) {
        (Some(dir), true) => {
            let (Some(ext), Some(n_s)) = (cfg.extension, cfg.n_s) else {
                return Err(schema("a dataset needs \"extension\" and \"n_s\""));
            };
            let dataset = read_dataset(&resolve(&run.config, dir))?;
            let n = dataset.images.first().map_or(0, |im| im.n());
            let dirs = equally_spaced(n_s, cfg.first_angle)?;
            let wects = dataset
                .images
                .par_iter()
                .map(|im| Ok(compute_wect_along(&triangulate(im, 0.0)?.extend(ext), &dirs)?))
                .collect::<Result<Vec<Wect>>>()?;
            (wects, interval(cfg.interval, n))
        }
        (None, false) => {
            let Some([a, b]) = cfg.interval else {
                return Err(schema("comparing WECT files needs \"interval\""));
            };
            let wects = cfg
                .wects
                .iter()
                .map(|p| read_wect_json(&resolve(&run.config, p)).with_context(|| format!("reading {}", p.display())))
                .collect::<Result<Vec<_>>>()?;
            (wects, (a, b))
        }
        _ => return Err(schema("give exactly one of \"dataset\" and \"wects\"")),
    };
    let m = distance_matrix(&wects, cfg.metric.validate()?, cfg.aggregation, t_min, t_max)?;

    let csv = run.out.join("distance.csv");
    write_distance_matrix(&csv, &m)?;
    ensure!(read_matrix_csv(&csv)? == m, "{} does not round-trip", csv.display());
    println!("wrote {0} x {0} distance matrix to {1}", m.len(), csv.display());
    Ok(())
}

pub fn experiment(run: &RunConfig) -> Result<()> {
    let cfg: config::ExperimentConfig = config::load(&run.config)?;
    let mut specs = cfg.specs;
    if let Some(mut grid) = cfg.grid {
        if let Some(s) = run.seed {
            grid.seeds = vec![s];
        }
        if grid.seeds.is_empty() {
            return Err(schema("\"grid\" needs \"seeds\" or --seed"));
        }
        specs.extend(grid.specs());
    }
    if specs.is_empty() {
        return Err(schema("nothing to run: give \"specs\" or \"grid\""));
    }
    for (i, s) in specs.iter().enumerate() {
        s.validate().map_err(|e| schema(format!("spec {i}: {e}")))?;
    }
    let results = run_experiments(&specs)?;

    let csv = run.out.join("results.csv");
    write_fresh(&csv, "")?;
    append_results_csv(&csv, &results)?;
    ensure!(
        csv_rows(&csv)? == results.len() + 1,
        "{} has the wrong row count",
        csv.display()
    );
    let mean = results.iter().map(|r| r.accuracy).sum::<f64>() / results.len() as f64;
    println!(
        "ran {} experiments, mean accuracy {mean:.3}; wrote {}",
        results.len(),
        csv.display()
    );
    Ok(())
}

pub fn sweep(run: &RunConfig) -> Result<()> {
    let cfg: config::SweepConfig = config::load(&run.config)?;
    let seeds = run.seed.map_or(cfg.seeds, |s| vec![s]);
    if seeds.is_empty() || cfg.shapes.is_empty() || cfg.n_s.is_empty() {
        return Err(schema(
            "a sweep needs shapes, direction counts and seeds (\"seeds\" or --seed)",
        ));
    }
    let jobs: Vec<_> = cfg
        .shapes
        .iter()
        .flat_map(|&sh| seeds.iter().map(move |&s| (sh, s)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(shape, s)| Ok(direction_sweep(shape, cfg.classifier, &cfg.n_s, s)?))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = String::from("shape,n_s,seed,accuracy,correct,total\n");
    let mut means = String::from("shape,n_s,mean_accuracy\n");
    for (j, &shape) in cfg.shapes.iter().enumerate() {
        let mut acc = vec![0.0; cfg.n_s.len()];
        for (k, &s) in seeds.iter().enumerate() {
            for (i, (n_s, r)) in runs[j * seeds.len() + k].iter().enumerate() {
                writeln!(rows, "{shape},{n_s},{s},{},{},{}", r.accuracy, r.correct, r.total)?;
                acc[i] += r.accuracy / seeds.len() as f64;
            }
        }
        for (n_s, a) in cfg.n_s.iter().zip(acc) {
            writeln!(means, "{shape},{n_s},{a}")?;
        }
    }
    let (csv, mean_csv) = (run.out.join("sweep.csv"), run.out.join("sweep_mean.csv"));
    write_fresh(&csv, &rows)?;
    write_fresh(&mean_csv, &means)?;
    ensure!(
        csv_rows(&csv)? == jobs.len() * cfg.n_s.len() + 1,
        "{} has the wrong row count",
        csv.display()
    );
    ensure!(
        csv_rows(&mean_csv)? == cfg.shapes.len() * cfg.n_s.len() + 1,
        "{} has the wrong row count",
        mean_csv.display()
    );
    println!(
        "swept {} shapes x {} seeds; wrote {}",
        cfg.shapes.len(),
        seeds.len(),
        csv.display()
    );
    Ok(())
}
