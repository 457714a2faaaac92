//! Command-line front end for the `quakelab` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::barycentric::DeParams;
use crate::earthquake::{recover_measure, verify_left_seeded, BuildOptions, EarthquakeMap, Orientation};
use crate::error::{Error, Result};
use crate::experiments::{
    generators, run_asymptotic_test, run_box_functional, run_odelta_test, run_scaling_path, AsymptoticConfig,
    BoxTestFunction, OdeltaConfig, ProxyConfig, ScalingConfig,
};
use crate::hyperbolic::{BoundaryPoint, HPoint};
use crate::lamination::{thurston_norm_chain, FiniteMeasuredLamination};
use crate::report::{Cell, ExperimentReport, Format};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Fixture {
    Single,
    Five,
}

#[derive(Debug, Parser)]
#[command(name = "quakelab", version, about = "Earthquakes, measured laminations and barycentric extensions")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Barycenter residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Quadrature nodes for the barycenter Jacobian.
    #[arg(long, global = true, default_value_t = 512)]
    pub quadrature: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Images of boundary and interior points under the earthquake.
    Eval {
        #[arg(long)]
        lamination: PathBuf,
        /// Boundary point: a real number or `inf`.
        #[arg(long = "boundary", allow_hyphen_values = true)]
        boundary: Vec<String>,
        /// Interior point `x,y` with `y > 0`.
        #[arg(long = "interior", allow_hyphen_values = true)]
        interior: Vec<String>,
    },
    /// Thurston norm and the maximizing chain.
    Norm {
        #[arg(long)]
        lamination: PathBuf,
    },
    /// Rebuild the measure from the earthquake's comparison maps.
    Recover {
        #[arg(long)]
        lamination: PathBuf,
    },
    /// Check the left-earthquake condition on all strata pairs.
    VerifyLeft {
        #[arg(long)]
        lamination: PathBuf,
        /// Build a right earthquake instead.
        #[arg(long)]
        right: bool,
        /// Translate this leaf the wrong way (repeatable).
        #[arg(long)]
        flip: Vec<usize>,
    },
    /// Sampled box functional between two laminations.
    BoxFunctional {
        #[arg(long)]
        lamination: PathBuf,
        /// Second lamination; empty if omitted.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        boxes: usize,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 2.0)]
        power: f64,
    },
    /// Proxy distance along the scaling path.
    ScalingPath {
        #[arg(long, conflicts_with = "fixture")]
        lamination: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Fixture::Single)]
        fixture: Fixture,
        #[arg(long, default_value_t = 0.5)]
        t0: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.1, 0.05, 0.025, 0.0125])]
        steps: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
    /// Beltrami decay for decaying and constant geodesic stacks.
    AsymptoticTest {
        #[arg(long, default_value_t = 12)]
        leaves: usize,
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        floor: f64,
    },
    /// Circle-mass bounds for power-law decay.
    OdeltaTest {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8, 16, 32, 64])]
        n_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 1.5])]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 17)]
        leaves: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
}

/// Scaling-path fixtures: weights are kept small enough that the proxy at
/// the finest default step is below the default threshold.
pub fn fixture(f: Fixture) -> FiniteMeasuredLamination {
    match f {
        Fixture::Single => generators::single_leaf(0.15),
        Fixture::Five => generators::five_leaf(0.25),
    }
}

fn read_lamination(path: &std::path::Path) -> Result<FiniteMeasuredLamination> {
    crate::lamination::read_lamination(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })
}

fn parse_boundary(s: &str) -> Result<BoundaryPoint> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(BoundaryPoint::infinity());
    }
    let t: f64 = s.parse().map_err(|_| Error::InvalidPoint(format!("bad boundary point `{s}`")))?;
    if !t.is_finite() {
        return Err(Error::InvalidPoint(format!("bad boundary point `{s}`")));
    }
    Ok(BoundaryPoint::from_real(t))
}

fn parse_interior(s: &str) -> Result<HPoint> {
    let bad = || Error::InvalidPoint(format!("bad interior point `{s}`, expected x,y"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    HPoint::new(x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?)
}

fn boundary_cells(p: &BoundaryPoint) -> Cell {
    p.real().map_or(Cell::Text("inf".into()), Cell::Num)
}

fn proxy_config(cli: &Cli) -> ProxyConfig {
    ProxyConfig { de: DeParams { quadrature_n: cli.quadrature, tol: cli.tol, ..DeParams::default() }, ..ProxyConfig::default() }
}

/// Runs the selected subcommand and returns its report.
pub fn execute(cli: &Cli) -> Result<ExperimentReport> {
    let mut report = match &cli.command {
        Command::Eval { lamination, boundary, interior } => {
            let mu = read_lamination(lamination)?;
            let quake = EarthquakeMap::build(&mu, &BuildOptions::default());
            let mut r = ExperimentReport::new("eval", &["kind", "x", "y", "image_x", "image_y"]);
            r.param("lamination", lamination.display().to_string());
            for s in boundary {
                let p = parse_boundary(s)?;
                let q = quake.eval_boundary(&p);
                r.push_row(vec!["boundary".into(), boundary_cells(&p), Cell::Missing, boundary_cells(&q), Cell::Missing]);
            }
            for s in interior {
                let z = parse_interior(s)?;
                let w = quake.eval_interior(&z);
                r.push_row(vec!["interior".into(), z.x.into(), z.y.into(), w.x.into(), w.y.into()]);
            }
            r
        }
        Command::Norm { lamination } => {
            let mu = read_lamination(lamination)?;
            let (norm, chain) = thurston_norm_chain(&mu);
            let mut r = ExperimentReport::new("norm", &["norm", "chain"]);
            r.param("lamination", lamination.display().to_string());
            let chain = chain.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
            r.push_row(vec![norm.into(), chain.into()]);
            r
        }
        Command::Recover { lamination } => {
            let mu = read_lamination(lamination)?;
            let back = recover_measure(&EarthquakeMap::build(&mu, &BuildOptions::default()));
            let mut r = ExperimentReport::new("recover", &["leaf", "a", "b", "weight", "recovered", "abs_error"]);
            r.param("lamination", lamination.display().to_string());
            let mut worst = 0.0f64;
            for (k, leaf) in mu.leaves().iter().enumerate() {
                let (p, q) = leaf.geodesic.endpoints();
                let found = back.leaves().iter().find(|l| l.geodesic.approx_eq(&leaf.geodesic, 1e-8)).map(|l| l.weight);
                let err = found.map_or(f64::INFINITY, |w| (w - leaf.weight).abs());
                worst = worst.max(err);
                r.push_row(vec![
                    k.into(),
                    boundary_cells(&p),
                    boundary_cells(&q),
                    leaf.weight.into(),
                    found.map_or(Cell::Missing, Cell::Num),
                    err.into(),
                ]);
            }
            let extra = back.len().saturating_sub(mu.len());
            r.verdict("weights_recovered", worst < 1e-9 && extra == 0, 1e-9, worst);
            r
        }
        Command::VerifyLeft { lamination, right, flip } => {
            let mu = read_lamination(lamination)?;
            if let Some(&k) = flip.iter().find(|&&k| k >= mu.len()) {
                return Err(Error::InvalidParameter(format!("leaf index {k} out of range")));
            }
            let orientation = if *right { Orientation::Right } else { Orientation::Left };
            let opts = BuildOptions { orientation, flipped_leaves: flip.clone(), ..BuildOptions::default() };
            let left = verify_left_seeded(&EarthquakeMap::build(&mu, &opts), cli.seed);
            let mut r = ExperimentReport::new("verify-left", &["first", "second", "reason"]);
            r.param("lamination", lamination.display().to_string())
                .param("right", if *right { "true" } else { "false" })
                .param("flipped", flip.iter().map(|&k| k as f64).collect::<Vec<_>>())
                .param("pairs_checked", left.pairs_checked);
            for v in &left.violations {
                r.push_row(vec![format!("{:?}", v.first).into(), format!("{:?}", v.second).into(), v.reason.clone().into()]);
            }
            r.verdict("left", left.ok, 0.0, left.violations.len() as f64);
            r
        }
        Command::BoxFunctional { lamination, against, boxes, amplitude, power } => {
            let mu = read_lamination(lamination)?;
            let other = match against {
                Some(path) => read_lamination(path)?,
                None => FiniteMeasuredLamination::empty(),
            };
            let phi = BoxTestFunction { amplitude: *amplitude, power: *power };
            run_box_functional(&mu, &other, &phi, *boxes, cli.seed)?
        }
        Command::ScalingPath { lamination, fixture: f, t0, steps, threshold } => {
            let mu = match lamination {
                Some(path) => read_lamination(path)?,
                None => fixture(*f),
            };
            let cfg = ScalingConfig { t0: *t0, steps: steps.clone(), threshold: *threshold, proxy: proxy_config(cli) };
            run_scaling_path(&mu, &cfg)?
        }
        Command::AsymptoticTest { leaves, c, r, radii, floor } => {
            let cfg = AsymptoticConfig {
                leaves: *leaves,
                c: *c,
                r: *r,
                radii: radii.clone(),
                floor: *floor,
                proxy: proxy_config(cli),
                ..AsymptoticConfig::default()
            };
            run_asymptotic_test(&cfg)?
        }
        Command::OdeltaTest { n_list, alphas, leaves, c } => {
            let cfg = OdeltaConfig { n_list: n_list.clone(), alphas: alphas.clone(), leaves: *leaves, c: *c, ..OdeltaConfig::default() };
            run_odelta_test(&cfg)?
        }
    };
    report.param("seed", cli.seed).param("tol", cli.tol).param("quadrature", cli.quadrature);
    Ok(report)
}

/// Parses `args`, runs, writes the report, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let outcome = execute(&cli).and_then(|report| {
        match &cli.out {
            Some(path) => report.write(format, std::fs::File::create(path)?)?,
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                report.write(format, &mut lock)?;
                lock.flush()?;
            }
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            for v in report.verdicts.iter().filter(|v| !v.passed) {
                eprintln!("verdict {} failed: observed {} against {}", v.name, v.observed, v.threshold);
            }
            if report.numerical_failures > 0 {
                eprintln!("error: {} rows failed numerically", report.numerical_failures);
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}
