//! Experiment orchestration: Monte Carlo replications, distance reports,
//! sweeps over matrix sizes, and file emission (CSV, JSON, SVG).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{kolmogorov_distance, levy_distance, StepCdf};
use crate::mp::MPLaw;
use crate::sampling::{derive_seed, preprocess_entries, sample_matrix, EntryDistribution};
use crate::spectra::{empirical_stieltjes, spectral_sample, SpectralSample};

/// Eigenvalues at or below `ATOM_THRESHOLD * lambda_max` count as the atom
/// at the origin.
pub const ATOM_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub p: usize,
    pub n: usize,
    pub dist: EntryDistribution,
    pub replications: usize,
    pub seed: u64,
    /// When set, entries pass through the truncation/centralization/
    /// rescaling pipeline with this threshold parameter before the
    /// covariance is formed.
    pub eta: Option<f64>,
    /// Upper-half-plane points at which the empirical and limiting
    /// Stieltjes transforms are compared.
    pub z_grid: Vec<Complex64>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.p == 0 {
            bad.push("p (must be >= 1)".to_string());
        }
        if self.n == 0 {
            bad.push("n (must be >= 1)".to_string());
        }
        if self.replications == 0 {
            bad.push("replications (must be >= 1)".to_string());
        }
        if let Err(e) = self.dist.validate() {
            bad.push(format!("dist ({e})"));
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0) {
                bad.push("eta (must be positive)".to_string());
            }
        }
        for (i, z) in self.z_grid.iter().enumerate() {
            if z.im <= 0.0 {
                bad.push(format!("z_grid[{i}] (Im z must be > 0, got {z})"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad.join("; ")))
        }
    }

    /// Scale of the limiting law: unit after the rescaling pipeline,
    /// otherwise the entry variance.
    pub fn law_sigma2(&self) -> f64 {
        if self.eta.is_some() {
            1.0
        } else {
            self.dist.sigma2()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicationReport {
    pub ks: f64,
    pub levy: f64,
    pub atom_mass: f64,
    pub stieltjes_errors: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregates {
    pub ks_median: f64,
    pub ks_max: f64,
    pub levy_median: f64,
    pub levy_max: f64,
    pub stieltjes_error_median: Vec<f64>,
    pub stieltjes_error_max: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub p: usize,
    pub n: usize,
    pub dist: String,
    pub replications: usize,
    pub seed: u64,
    pub eta: Option<f64>,
    pub z_grid: Vec<[f64; 2]>,
    pub y_n: f64,
    pub law_sigma2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub schema: u32,
    pub config: ConfigEcho,
    pub per_replication: Vec<ReplicationReport>,
    pub aggregates: Aggregates,
    pub runtime_seconds: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Sample, (optionally) preprocess, eigensolve, and measure one replication.
fn run_replication(cfg: &ExperimentConfig, law: &MPLaw, r: usize) -> Result<(SpectralSample, ReplicationReport)> {
    let seed_r = derive_seed(cfg.seed, r as u64);
    let x = sample_matrix(cfg.p, cfg.n, &cfg.dist, seed_r)?;
    let x = match cfg.eta {
        Some(eta) => {
            let (_, _, rescaled) = preprocess_entries(&x, &cfg.dist, eta, seed_r)?;
            rescaled.matrix
        }
        None => x,
    };
    let sample = spectral_sample(&x, seed_r, cfg.dist.tag())?;
    let step = StepCdf::from_sample(&sample);
    let ks = kolmogorov_distance(&step, law);
    let levy = levy_distance(&step, law);
    let atom_mass = sample.mass_below(ATOM_THRESHOLD * sample.lambda_max());
    let stieltjes_errors = cfg
        .z_grid
        .iter()
        .map(|&z| {
            let mn = empirical_stieltjes(&sample, z)?;
            let m = law.stieltjes(z)?;
            Ok((mn - m).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((
        sample,
        ReplicationReport {
            ks,
            levy,
            atom_mass,
            stieltjes_errors,
        },
    ))
}

/// Run every replication of `cfg`, write `eigenvalues.csv`, `report.json`
/// and `histogram.svg` into `cfg.output_dir`, and return the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let start = Instant::now();
    let law = MPLaw::new(cfg.p as f64 / cfg.n as f64, cfg.law_sigma2())?;

    let mut samples = Vec::with_capacity(cfg.replications);
    let mut per_replication = Vec::with_capacity(cfg.replications);
    for r in 0..cfg.replications {
        let (sample, rep) = run_replication(cfg, &law, r)?;
        samples.push(sample);
        per_replication.push(rep);
    }

    let ks: Vec<f64> = per_replication.iter().map(|r| r.ks).collect();
    let levy: Vec<f64> = per_replication.iter().map(|r| r.levy).collect();
    let nz = cfg.z_grid.len();
    let aggregates = Aggregates {
        ks_median: median(&ks),
        ks_max: ks.iter().cloned().fold(0.0, f64::max),
        levy_median: median(&levy),
        levy_max: levy.iter().cloned().fold(0.0, f64::max),
        stieltjes_error_median: (0..nz)
            .map(|i| {
                median(
                    &per_replication
                        .iter()
                        .map(|r| r.stieltjes_errors[i])
                        .collect::<Vec<_>>(),
                )
            })
            .collect(),
        stieltjes_error_max: (0..nz)
            .map(|i| {
                per_replication
                    .iter()
                    .map(|r| r.stieltjes_errors[i])
                    .fold(0.0, f64::max)
            })
            .collect(),
    };

    let report = ConvergenceReport {
        schema: 1,
        config: ConfigEcho {
            p: cfg.p,
            n: cfg.n,
            dist: cfg.dist.tag(),
            replications: cfg.replications,
            seed: cfg.seed,
            eta: cfg.eta,
            z_grid: cfg.z_grid.iter().map(|z| [z.re, z.im]).collect(),
            y_n: cfg.p as f64 / cfg.n as f64,
            law_sigma2: cfg.law_sigma2(),
        },
        per_replication,
        aggregates,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };

    write_outputs(cfg, &law, &samples, &report)?;
    Ok(report)
}

/// One experiment per size, all at the same aspect ratio, plus a summary
/// CSV of median KS against n.
pub fn run_sweep(
    base: &ExperimentConfig,
    sizes: &[(usize, usize)],
) -> Result<Vec<ConvergenceReport>> {
    if sizes.is_empty() {
        return Err(Error::Validation("sweep sizes must be nonempty".into()));
    }
    let ratio0 = sizes[0].0 as f64 / sizes[0].1 as f64;
    for &(p, n) in sizes {
        if p == 0 || n == 0 {
            return Err(Error::Validation(format!("invalid sweep size ({p}, {n})")));
        }
        let ratio = p as f64 / n as f64;
        if (ratio - ratio0).abs() > 0.01 * ratio0 {
            return Err(Error::Validation(format!(
                "sweep sizes must share the p/n ratio within 1%: ({p}, {n}) has {ratio:.4}, first size has {ratio0:.4}"
            )));
        }
    }
    let mut reports = Vec::with_capacity(sizes.len());
    for &(p, n) in sizes {
        let cfg = ExperimentConfig {
            p,
            n,
            output_dir: base.output_dir.join(format!("size_{p}x{n}")),
            ..base.clone()
        };
        reports.push(run_experiment(&cfg)?);
    }
    let summary_path = base.output_dir.join("sweep_summary.csv");
    let mut summary = String::from("p,n,median_ks\n");
    for ((p, n), rep) in sizes.iter().zip(&reports) {
        summary.push_str(&format!("{p},{n},{:.16e}\n", rep.aggregates.ks_median));
    }
    write_file(&summary_path, summary.as_bytes())?;
    Ok(reports)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::Io {
            path: parent.display().to_string(),
            source: e,
        })?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    f.write_all(bytes).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn write_outputs(
    cfg: &ExperimentConfig,
    law: &MPLaw,
    samples: &[SpectralSample],
    report: &ConvergenceReport,
) -> Result<()> {
    // Eigenvalues CSV: one row per eigenvalue, 17 significant digits.
    let mut csv = String::from("replication,index,lambda\n");
    for (r, sample) in samples.iter().enumerate() {
        for (i, l) in sample.eigenvalues.iter().enumerate() {
            csv.push_str(&format!("{r},{i},{l:.16e}\n"));
        }
    }
    write_file(&cfg.output_dir.join("eigenvalues.csv"), csv.as_bytes())?;

    let json = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    write_file(&cfg.output_dir.join("report.json"), json.as_bytes())?;

    let pooled: Vec<f64> = samples
        .iter()
        .flat_map(|s| s.eigenvalues.iter().cloned())
        .collect();
    let svg = render_histogram_svg(&pooled, law);
    write_file(&cfg.output_dir.join("histogram.svg"), svg.as_bytes())
}

/// Freedman-Diaconis bin count, clipped to at least 40 bins.
fn bin_count(sorted: &[f64]) -> usize {
    let n = sorted.len();
    let q1 = sorted[n / 4];
    let q3 = sorted[(3 * n) / 4];
    let iqr = q3 - q1;
    let range = sorted[n - 1] - sorted[0];
    if iqr <= 0.0 || range <= 0.0 {
        return 40;
    }
    let width = 2.0 * iqr / (n as f64).cbrt();
    ((range / width).ceil() as usize).max(40)
}

/// Histogram of the pooled spectrum overlaid with the limiting density.
fn render_histogram_svg(eigenvalues: &[f64], law: &MPLaw) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const MARGIN: f64 = 50.0;

    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let total = sorted.len() as f64;
    let lo = sorted.first().copied().unwrap_or(0.0).min(0.0);
    let hi = sorted.last().copied().unwrap_or(1.0).max(law.b) * 1.05 + 1e-12;
    let bins = bin_count(&sorted);
    let bw = (hi - lo) / bins as f64;

    let mut counts = vec![0usize; bins];
    for &l in &sorted {
        let idx = (((l - lo) / bw) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let densities: Vec<f64> = counts.iter().map(|&c| c as f64 / (total * bw)).collect();
    let mut ymax = densities.iter().cloned().fold(0.0, f64::max);
    for i in 0..400 {
        let x = law.a + (law.b - law.a) * (i as f64 + 0.5) / 400.0;
        ymax = ymax.max(law.density(x));
    }
    let ymax = ymax * 1.1 + 1e-12;

    let sx = |x: f64| MARGIN + (x - lo) / (hi - lo) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - y / ymax * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, &d) in densities.iter().enumerate() {
        if d <= 0.0 {
            continue;
        }
        let x0 = sx(lo + i as f64 * bw);
        let x1 = sx(lo + (i as f64 + 1.0) * bw);
        let y = sy(d);
        svg.push_str(&format!(
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"#7aa6d6\" stroke=\"none\"/>\n",
            x0,
            y,
            x1 - x0,
            H - MARGIN - y
        ));
    }
    let mut path = String::new();
    for i in 0..=400 {
        let x = law.a + (law.b - law.a) * i as f64 / 400.0;
        let cmd = if i == 0 { 'M' } else { 'L' };
        path.push_str(&format!("{cmd}{:.3},{:.3} ", sx(x), sy(law.density(x))));
    }
    svg.push_str(&format!(
        "<path d=\"{path}\" fill=\"none\" stroke=\"#c23b22\" stroke-width=\"2\"/>\n"
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{y}\" x2=\"{w}\" y2=\"{y}\" stroke=\"black\"/>\n",
        m = MARGIN,
        y = H - MARGIN,
        w = W - MARGIN
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{y}\" stroke=\"black\"/>\n",
        m = MARGIN,
        y = H - MARGIN
    ));
    if law.atom_mass() > 0.0 {
        svg.push_str(&format!(
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\">atom mass {:.4}</text>\n",
            sx(0.0) + 4.0,
            MARGIN + 12.0,
            law.atom_mass()
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
