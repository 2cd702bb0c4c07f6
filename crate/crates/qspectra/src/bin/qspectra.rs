//! Command-line front end: Monte Carlo experiments, convergence sweeps,
//! law tables, Stieltjes comparisons, and the structure verification suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use qspectra::error::{Error, Result};
use qspectra::experiment::{run_experiment, run_sweep, ExperimentConfig};
use qspectra::mp::MPLaw;
use qspectra::sampling::EntryDistribution;
use qspectra::spectra::{empirical_stieltjes, spectral_sample};
use qspectra::structure::{inverse_structure_check, random_type_iii};
use qspectra::Quaternion;

#[derive(Parser)]
#[command(name = "qspectra", about = "Quaternion sample covariance spectral laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one Monte Carlo experiment and write its report files.
    Simulate(SimulateArgs),
    /// Run a fixed-ratio size sweep and write one report per size.
    Sweep(SweepArgs),
    /// Print a density/CDF table of the limiting law.
    Density(DensityArgs),
    /// Compare the empirical and limiting Stieltjes transforms on a z grid.
    Stieltjes(StieltjesArgs),
    /// Verify the block-structure predicates and the Type-III inverse theorem.
    CheckStructure(CheckStructureArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DistKind {
    Gaussian,
    SignedUnits,
    StudentT,
}

#[derive(Args, Clone)]
struct DistArgs {
    /// Entry distribution.
    #[arg(long, value_enum, default_value = "gaussian")]
    dist: DistKind,
    /// Degrees of freedom for student-t (must be > 2).
    #[arg(long, default_value_t = 3.0)]
    df: f64,
    /// Entry variance E||x - Ex||^2.
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Common mean, as a real multiple of the identity unit.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
}

impl DistArgs {
    fn build(&self) -> EntryDistribution {
        let base = match self.dist {
            DistKind::Gaussian => EntryDistribution::Gaussian { sigma2: self.sigma2 },
            DistKind::SignedUnits => EntryDistribution::SignedUnits { sigma2: self.sigma2 },
            DistKind::StudentT => EntryDistribution::StudentT {
                df: self.df,
                sigma2: self.sigma2,
            },
        };
        if self.mu != 0.0 {
            EntryDistribution::Shifted {
                base: Box::new(base),
                mu: Quaternion::real(self.mu),
            }
        } else {
            base
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Read the whole experiment configuration from a JSON file instead of flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    p: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[command(flatten)]
    dist: DistArgs,
    /// Truncation threshold parameter; enables the preprocessing pipeline.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated upper-half-plane points, e.g. "0+1i,1+1i,2+0.5i".
    #[arg(long, default_value = "0+1i,1+1i,2+0.5i")]
    z_grid: String,
    #[arg(long, default_value = "qspectra-out")]
    out: PathBuf,
    /// Output formats to keep.
    #[arg(long, default_value = "csv,json,svg")]
    format: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated sizes "p1xn1,p2xn2,...", all with the same p/n ratio.
    #[arg(long, default_value = "50x100,100x200,200x400")]
    sizes: String,
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "0+1i,1+1i,2+0.5i")]
    z_grid: String,
    #[arg(long, default_value = "qspectra-sweep")]
    out: PathBuf,
    #[arg(long, default_value = "csv,json,svg")]
    format: String,
}

#[derive(Args)]
struct DensityArgs {
    /// Dimension-to-sample ratio of the law.
    #[arg(long, default_value_t = 0.5)]
    y: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Number of table rows across the support.
    #[arg(long, default_value_t = 50)]
    points: usize,
}

#[derive(Args)]
struct StieltjesArgs {
    #[arg(long, default_value_t = 100)]
    p: usize,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "0+1i,1+1i,2+0.5i")]
    z_grid: String,
}

#[derive(Args)]
struct CheckStructureArgs {
    /// Random Type-III matrices tested per block dimension.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Residual tolerance for the Type-I check of the inverse.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

/// JSON mirror of the simulate flags, for `simulate --config FILE`.
#[derive(Deserialize)]
struct FileConfig {
    p: usize,
    n: usize,
    dist: String,
    #[serde(default)]
    df: Option<f64>,
    #[serde(default = "default_sigma2")]
    sigma2: f64,
    #[serde(default)]
    mu: f64,
    #[serde(default)]
    eta: Option<f64>,
    reps: usize,
    seed: u64,
    z_grid: Vec<[f64; 2]>,
    out: PathBuf,
}

fn default_sigma2() -> f64 {
    1.0
}

fn parse_z_grid(s: &str) -> Result<Vec<Complex64>> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let body = tok
                .strip_suffix('i')
                .ok_or_else(|| Error::Validation(format!("z value '{tok}' must end in 'i'")))?;
            let split = body
                .char_indices()
                .skip(1)
                .find(|&(_, c)| c == '+' || c == '-')
                .map(|(i, _)| i)
                .ok_or_else(|| {
                    Error::Validation(format!("z value '{tok}' must look like re+imi"))
                })?;
            let re: f64 = body[..split]
                .parse()
                .map_err(|_| Error::Validation(format!("bad real part in '{tok}'")))?;
            let im: f64 = body[split..]
                .parse()
                .map_err(|_| Error::Validation(format!("bad imaginary part in '{tok}'")))?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

fn parse_sizes(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|tok| {
            let (p, n) = tok
                .trim()
                .split_once('x')
                .ok_or_else(|| Error::Validation(format!("size '{tok}' must look like PxN")))?;
            let p = p
                .parse()
                .map_err(|_| Error::Validation(format!("bad p in '{tok}'")))?;
            let n = n
                .parse()
                .map_err(|_| Error::Validation(format!("bad n in '{tok}'")))?;
            Ok((p, n))
        })
        .collect()
}

fn prune_formats(dir: &std::path::Path, format: &str) -> Result<()> {
    let keep: Vec<&str> = format.split(',').map(str::trim).collect();
    let files = [
        ("csv", "eigenvalues.csv"),
        ("json", "report.json"),
        ("svg", "histogram.svg"),
    ];
    for (fmt, name) in files {
        if !keep.contains(&fmt) {
            let path = dir.join(name);
            if path.exists() {
                std::fs::remove_file(&path).map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    source: e,
                })?;
            }
        }
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            let fc: FileConfig = serde_json::from_str(&raw)
                .map_err(|e| Error::Validation(format!("bad config file: {e}")))?;
            let base = match fc.dist.as_str() {
                "gaussian" => EntryDistribution::Gaussian { sigma2: fc.sigma2 },
                "signed-units" | "signed_units" => {
                    EntryDistribution::SignedUnits { sigma2: fc.sigma2 }
                }
                "student-t" | "student_t" => EntryDistribution::StudentT {
                    df: fc.df.unwrap_or(3.0),
                    sigma2: fc.sigma2,
                },
                other => {
                    return Err(Error::Validation(format!("unknown dist '{other}'")));
                }
            };
            let dist = if fc.mu != 0.0 {
                EntryDistribution::Shifted {
                    base: Box::new(base),
                    mu: Quaternion::real(fc.mu),
                }
            } else {
                base
            };
            ExperimentConfig {
                p: fc.p,
                n: fc.n,
                dist,
                replications: fc.reps,
                seed: fc.seed,
                eta: fc.eta,
                z_grid: fc.z_grid.iter().map(|z| Complex64::new(z[0], z[1])).collect(),
                output_dir: fc.out,
            }
        }
        None => ExperimentConfig {
            p: args.p,
            n: args.n,
            dist: args.dist.build(),
            replications: args.reps,
            seed: args.seed,
            eta: args.eta,
            z_grid: parse_z_grid(&args.z_grid)?,
            output_dir: args.out.clone(),
        },
    };
    let report = run_experiment(&cfg)?;
    prune_formats(&cfg.output_dir, &args.format)?;
    println!(
        "p={} n={} reps={}: median KS {:.4}, median Levy {:.4} (outputs in {})",
        cfg.p,
        cfg.n,
        cfg.replications,
        report.aggregates.ks_median,
        report.aggregates.levy_median,
        cfg.output_dir.display()
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let sizes = parse_sizes(&args.sizes)?;
    let base = ExperimentConfig {
        p: sizes[0].0,
        n: sizes[0].1,
        dist: args.dist.build(),
        replications: args.reps,
        seed: args.seed,
        eta: args.eta,
        z_grid: parse_z_grid(&args.z_grid)?,
        output_dir: args.out.clone(),
    };
    let reports = run_sweep(&base, &sizes)?;
    for ((p, n), rep) in sizes.iter().zip(&reports) {
        prune_formats(&args.out.join(format!("size_{p}x{n}")), &args.format)?;
        println!("p={p} n={n}: median KS {:.4}", rep.aggregates.ks_median);
    }
    println!("summary written to {}", args.out.join("sweep_summary.csv").display());
    Ok(())
}

fn cmd_density(args: &DensityArgs) -> Result<()> {
    let law = MPLaw::new(args.y, args.sigma2)?;
    let (a, b) = law.support();
    println!("# y={} sigma2={} support=[{a:.6}, {b:.6}] atom={}", args.y, args.sigma2, law.atom_mass());
    println!("x,density,cdf");
    let lo = (a - 0.1 * (b - a)).min(-0.05);
    let hi = b + 0.1 * (b - a);
    for i in 0..args.points {
        let x = lo + (hi - lo) * i as f64 / (args.points.max(2) - 1) as f64;
        println!("{x:.6},{:.10},{:.10}", law.density(x), law.cdf(x));
    }
    Ok(())
}

fn cmd_stieltjes(args: &StieltjesArgs) -> Result<()> {
    let dist = args.dist.build();
    let law = MPLaw::new(args.p as f64 / args.n as f64, dist.sigma2())?;
    let x = qspectra::sampling::sample_matrix(args.p, args.n, &dist, args.seed)?;
    let sample = spectral_sample(&x, args.seed, dist.tag())?;
    println!("z_re,z_im,m_re,m_im,mn_re,mn_im,abs_err");
    for z in parse_z_grid(&args.z_grid)? {
        let m = law.stieltjes(z)?;
        let mn = empirical_stieltjes(&sample, z)?;
        println!(
            "{},{},{:.10},{:.10},{:.10},{:.10},{:.3e}",
            z.re,
            z.im,
            m.re,
            m.im,
            mn.re,
            mn.im,
            (mn - m).norm()
        );
    }
    Ok(())
}

fn cmd_check_structure(args: &CheckStructureArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for &m in &[2usize, 4, 8] {
        for _ in 0..args.trials {
            let a = random_type_iii(m, 3.0, &mut rng);
            let report = inverse_structure_check(&a, 1e-10)?;
            worst = worst.max(report.residual);
            if report.residual > args.tol {
                failures += 1;
            }
        }
    }
    println!(
        "inverse-structure check: {} trials per dimension (2n in {{4,8,16}}), worst Type-I residual {:.3e}",
        args.trials, worst
    );
    if failures > 0 {
        return Err(Error::Contract(format!(
            "{failures} inverses exceeded the Type-I residual tolerance {:.1e}",
            args.tol
        )));
    }
    println!("PASS: every inverse is Type-I within {:.1e}", args.tol);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Density(a) => cmd_density(a),
        Command::Stieltjes(a) => cmd_stieltjes(a),
        Command::CheckStructure(a) => cmd_check_structure(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
