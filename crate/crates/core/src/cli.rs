//! Command-line front end. [`run`] is the whole program; the binary only forwards
//! `std::env::args` and the process streams.
//!
//! Exit codes: 0 on success, 2 for usage and validation errors, 3 when a computation
//! fails (the error name is printed on stderr). Column layouts are listed in
//! `docs/formats.md`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::model::{FieldConfig, FieldKind};
use crate::oracle;
use crate::phase::{self, classify, PhaseRegion};
use crate::spectral::{self, MODES};
use crate::topology::{self, ChernResult, Quantized};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "ISINGTOP_THREADS";

/// Agreement required between the analytic and curvature Chern numbers.
pub const METHOD_AGREEMENT_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "isingtop", version, about = "Dimerized transverse-field Ising chain: spectra, phases and topology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The four Bloch eigenvalues −ρ·ε_σ(k) on a uniform k grid.
    Spectrum {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = spectral::DEFAULT_NUM_K)]
        nk: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ground-state energy density and phase label.
    Energy {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = spectral::DEFAULT_NUM_K)]
        nk: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Energy density along a straight ray with detected critical points.
    Scan {
        #[command(flatten)]
        ray: RayArgs,
        #[arg(long, default_value_t = phase::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = spectral::DEFAULT_NUM_K)]
        nk: usize,
        /// Spike threshold in MADs above the median.
        #[arg(long, default_value_t = phase::DEFAULT_Z)]
        z: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Chern number of one configuration, or a phase-diagram grid.
    Chern {
        #[command(flatten)]
        target: ChernTarget,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, default_value_t = spectral::DEFAULT_NUM_K)]
        nk: usize,
        #[arg(long, default_value_t = topology::DEFAULT_NPHI)]
        nphi: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Winding number of the φ = π/2 loop.
    Winding {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = spectral::DEFAULT_NUM_K)]
        nk: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sampled φ = π/2 loop for plotting.
    Loop {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = spectral::DEFAULT_NUM_K)]
        nk: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Brute-force cross-checks against dense diagonalization.
    Oracle {
        #[command(flatten)]
        field: FieldArgs,
        /// Ring sizes (unit cells) for the BdG-versus-Bloch comparison.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        cells: Vec<usize>,
        /// Ring sizes (unit cells) for spin-chain exact diagonalization.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        ed_cells: Vec<usize>,
        /// Momenta at which the characteristic polynomial is evaluated.
        #[arg(long, default_value_t = 64)]
        nk: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct FieldArgs {
    /// Real staggered fields g1 g2.
    #[arg(long, num_args = 2, value_names = ["G1", "G2"], allow_negative_numbers = true)]
    real: Option<Vec<f64>>,
    /// Complex fields g1 = eta − i·xi, g2 = eta + i·xi.
    #[arg(long, num_args = 2, value_names = ["ETA", "XI"], allow_negative_numbers = true)]
    complex: Option<Vec<f64>>,
}

impl FieldArgs {
    fn config(&self) -> Result<FieldConfig> {
        match (&self.real, &self.complex) {
            (Some(v), None) => FieldConfig::real(v[0], v[1]),
            (None, Some(v)) => FieldConfig::complex(v[0], v[1]),
            _ => unreachable!("clap enforces exactly one field flag"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pair(f64, f64);

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected `A,B`, got `{s}`"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("`{t}`: {e}"))
        };
        Ok(Pair(parse(a)?, parse(b)?))
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct RayArgs {
    /// Real ray from G1,G2 to G1,G2.
    #[arg(long, num_args = 2, value_names = ["FROM", "TO"], allow_hyphen_values = true)]
    real_ray: Option<Vec<Pair>>,
    /// Complex ray from ETA,XI to ETA,XI.
    #[arg(long, num_args = 2, value_names = ["FROM", "TO"], allow_hyphen_values = true)]
    complex_ray: Option<Vec<Pair>>,
}

impl RayArgs {
    fn endpoints(&self) -> Result<(FieldConfig, FieldConfig)> {
        let (kind, v) = match (&self.real_ray, &self.complex_ray) {
            (Some(v), None) => (FieldKind::Real, v),
            (None, Some(v)) => (FieldKind::Complex, v),
            _ => unreachable!("clap enforces exactly one ray flag"),
        };
        Ok((
            FieldConfig::new(kind, v[0].0, v[0].1)?,
            FieldConfig::new(kind, v[1].0, v[1].1)?,
        ))
    }
}

#[derive(Debug, Clone, Copy)]
struct GridSpec {
    lo: f64,
    hi: f64,
    n: usize,
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected `LO,HI,N`, got `{s}`"));
        };
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        Ok(GridSpec {
            lo: num(lo)?,
            hi: num(hi)?,
            n: n.parse().map_err(|e| format!("`{n}`: {e}"))?,
        })
    }
}

impl GridSpec {
    fn values(&self) -> Result<Vec<f64>> {
        if self.n < 2 || !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return Err(Error::InvalidGrid(format!(
                "grid {},{},{} needs finite LO < HI and N ≥ 2",
                self.lo, self.hi, self.n
            )));
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        Ok((0..self.n).map(|i| self.lo + step * i as f64).collect())
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ChernTarget {
    /// Real staggered fields g1 g2.
    #[arg(long, num_args = 2, value_names = ["G1", "G2"], allow_negative_numbers = true)]
    real: Option<Vec<f64>>,
    /// Complex fields g1 = eta − i·xi, g2 = eta + i·xi.
    #[arg(long, num_args = 2, value_names = ["ETA", "XI"], allow_negative_numbers = true)]
    complex: Option<Vec<f64>>,
    /// Square grid LO,HI,N over (g1, g2); writes CSV.
    #[arg(long, allow_hyphen_values = true)]
    real_grid: Option<GridSpec>,
    /// Square grid LO,HI,N over (eta, xi); writes CSV.
    #[arg(long, allow_hyphen_values = true)]
    complex_grid: Option<GridSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Analytic,
    Curvature,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Spelling of a value on the command line.
fn flag_name<T: ValueEnum>(value: T) -> String {
    value
        .to_possible_value()
        .map(|v| v.get_name().to_owned())
        .unwrap_or_default()
}

fn kind_name(kind: FieldKind) -> &'static str {
    match kind {
        FieldKind::Real => "real",
        FieldKind::Complex => "complex",
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

// JSON documents. Every one carries `schema_version`.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub schema_version: u32,
    pub config: FieldConfig,
    pub num_k: usize,
    pub energy_density: f64,
    pub phase: PhaseRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub k: f64,
    /// `[re, im]` of −ρ·ε_σ for (ρ, σ) = (+,+), (+,−), (−,+), (−,−).
    pub values: [[f64; 2]; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub schema_version: u32,
    pub config: FieldConfig,
    pub num_k: usize,
    pub points: Vec<SpectrumPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub num_k: usize,
    pub result: phase::PhaseScanResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernReport {
    pub schema_version: u32,
    pub config: FieldConfig,
    pub phase: PhaseRegion,
    pub results: Vec<ChernResult>,
    /// Raw value of the first method run.
    pub raw: f64,
    pub snapped: Quantized,
    /// Largest residual over the methods run.
    pub residual: f64,
    /// All methods snap to the same value and their raw values agree to 1e−3.
    pub methods_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub schema_version: u32,
    pub config: FieldConfig,
    pub num_k: usize,
    pub winding: f64,
    pub snapped: Quantized,
    pub boundary: bool,
    pub encloses_origin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopReport {
    pub schema_version: u32,
    pub config: FieldConfig,
    pub trace: topology::LoopTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochUnionSummary {
    pub n_cells: usize,
    pub max_deviation: f64,
    pub raw_deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub config: FieldConfig,
    pub bloch_union: Vec<BlochUnionSummary>,
    pub characteristic_residual: f64,
    pub crosscheck: oracle::CrosscheckReport,
}

/// Runs the program on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let threads = match thread_cap() {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(stderr, "error: InvalidEnvironment: {msg}");
            return 2;
        }
    };
    let outcome = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => {
                let _ = writeln!(stderr, "error: ThreadPool: {e}");
                return 3;
            }
        },
        None => execute(&cli.command),
    };
    match outcome.and_then(|(text, out)| emit(&text, out, stdout)) {
        Ok(()) => 0,
        Err(CliError::Compute(e)) => {
            let _ = writeln!(stderr, "error: {}: {e}", e.name());
            if e.is_validation() {
                2
            } else {
                3
            }
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: Usage: {msg}");
            2
        }
        Err(CliError::Io(msg)) => {
            let _ = writeln!(stderr, "error: Io: {msg}");
            3
        }
    }
}

fn thread_cap() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{THREADS_ENV}: {e}")),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be an integer ≥ 1, got `{v}`")),
        },
    }
}

enum CliError {
    Compute(Error),
    Usage(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn emit(text: &str, out: Option<&PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn pick_format(out: &OutArgs, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let f = out.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!(
            "format {} is not available for this command",
            flag_name(f)
        )))
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn header(command: &str, lines: &[String]) -> String {
    let mut s = format!("# isingtop {} {command}\n", env!("CARGO_PKG_VERSION"));
    for l in lines {
        let _ = writeln!(s, "# {l}");
    }
    s
}

fn param_names(kind: FieldKind) -> (&'static str, &'static str) {
    match kind {
        FieldKind::Real => ("g1", "g2"),
        FieldKind::Complex => ("eta", "xi"),
    }
}

fn execute(cmd: &Command) -> CliResult<(String, Option<&PathBuf>)> {
    match cmd {
        Command::Spectrum { field, nk, out } => {
            let cfg = field.config()?;
            let fmt = pick_format(out, Format::Csv, &[Format::Csv, Format::Json])?;
            Ok((spectrum(&cfg, *nk, fmt)?, out.output.as_ref()))
        }
        Command::Energy { field, nk, out } => {
            let cfg = field.config()?;
            let fmt = pick_format(out, Format::Json, &[Format::Csv, Format::Json])?;
            Ok((energy(&cfg, *nk, fmt)?, out.output.as_ref()))
        }
        Command::Scan {
            ray,
            samples,
            nk,
            z,
            out,
        } => {
            let (a, b) = ray.endpoints()?;
            let fmt = pick_format(out, Format::Csv, &[Format::Csv, Format::Json])?;
            Ok((scan(&a, &b, *samples, *nk, *z, fmt)?, out.output.as_ref()))
        }
        Command::Chern {
            target,
            method,
            nk,
            nphi,
            out,
        } => {
            let text = match (target.real_grid, target.complex_grid) {
                (Some(g), None) => {
                    pick_format(out, Format::Csv, &[Format::Csv])?;
                    chern_grid(FieldKind::Real, g, *method, *nk, *nphi)?
                }
                (None, Some(g)) => {
                    pick_format(out, Format::Csv, &[Format::Csv])?;
                    chern_grid(FieldKind::Complex, g, *method, *nk, *nphi)?
                }
                (None, None) => {
                    pick_format(out, Format::Json, &[Format::Json])?;
                    let cfg = match (&target.real, &target.complex) {
                        (Some(v), None) => FieldConfig::real(v[0], v[1])?,
                        (None, Some(v)) => FieldConfig::complex(v[0], v[1])?,
                        _ => return Err(CliError::Usage("give --real or --complex".into())),
                    };
                    to_json(&chern_report(&cfg, *method, *nk, *nphi)?)
                }
                _ => unreachable!("clap enforces exactly one target flag"),
            };
            Ok((text, out.output.as_ref()))
        }
        Command::Winding { field, nk, out } => {
            let cfg = field.config()?;
            pick_format(out, Format::Json, &[Format::Json])?;
            let t = topology::loop_trace(&cfg, *nk)?;
            let report = WindingReport {
                schema_version: SCHEMA_VERSION,
                config: cfg,
                num_k: *nk,
                winding: t.winding,
                snapped: t.snapped(),
                boundary: t.boundary,
                encloses_origin: t.encloses_origin,
            };
            Ok((to_json(&report), out.output.as_ref()))
        }
        Command::Loop { field, nk, out } => {
            let cfg = field.config()?;
            let fmt = pick_format(out, Format::Csv, &[Format::Csv, Format::Json])?;
            Ok((loop_output(&cfg, *nk, fmt)?, out.output.as_ref()))
        }
        Command::Oracle {
            field,
            cells,
            ed_cells,
            nk,
            out,
        } => {
            let cfg = field.config()?;
            pick_format(out, Format::Json, &[Format::Json])?;
            Ok((to_json(&oracle_report(&cfg, cells, ed_cells, *nk)?), out.output.as_ref()))
        }
    }
}

fn k_grid(nk: usize) -> Result<Vec<f64>> {
    if nk == 0 {
        return Err(Error::InvalidGrid("nk = 0".into()));
    }
    Ok((0..nk)
        .map(|m| std::f64::consts::TAU * m as f64 / nk as f64)
        .collect())
}

fn spectrum(cfg: &FieldConfig, nk: usize, fmt: Format) -> Result<String> {
    let points: Vec<SpectrumPoint> = k_grid(nk)?
        .into_iter()
        .map(|k| {
            let f = spectral::spectral_factors(cfg, k);
            let mut values = [[0.0; 2]; 4];
            for (slot, &(rho, sigma)) in values.iter_mut().zip(MODES.iter()) {
                let v = f.value(rho, sigma);
                *slot = [v.re, v.im];
            }
            SpectrumPoint { k, values }
        })
        .collect();
    Ok(match fmt {
        Format::Json => to_json(&SpectrumReport {
            schema_version: SCHEMA_VERSION,
            config: *cfg,
            num_k: nk,
            points,
        }),
        Format::Csv => {
            let mut s = header("spectrum", &[format!("config={cfg}"), format!("nk={nk}")]);
            s.push_str("k,pp_re,pp_im,pm_re,pm_im,mp_re,mp_im,mm_re,mm_im\n");
            for p in &points {
                s.push_str(&num(p.k));
                for v in &p.values {
                    let _ = write!(s, ",{},{}", num(v[0]), num(v[1]));
                }
                s.push('\n');
            }
            s
        }
    })
}

fn energy(cfg: &FieldConfig, nk: usize, fmt: Format) -> Result<String> {
    let report = EnergyReport {
        schema_version: SCHEMA_VERSION,
        config: *cfg,
        num_k: nk,
        energy_density: spectral::ground_energy_density(cfg, nk)?,
        phase: classify(cfg),
    };
    Ok(match fmt {
        Format::Json => to_json(&report),
        Format::Csv => {
            let (a, b) = param_names(cfg.kind());
            let (x, y) = cfg.params();
            let mut s = header("energy", &[format!("config={cfg}"), format!("nk={nk}")]);
            let _ = writeln!(s, "{a},{b},p,phase,energy");
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                num(x),
                num(y),
                num(report.phase.p),
                report.phase.label,
                num(report.energy_density)
            );
            s
        }
    })
}

fn scan(
    a: &FieldConfig,
    b: &FieldConfig,
    samples: usize,
    nk: usize,
    z: f64,
    fmt: Format,
) -> Result<String> {
    let result = phase::scan_energy_with(a, b, samples, nk, z)?;
    Ok(match fmt {
        Format::Json => to_json(&ScanReport {
            schema_version: SCHEMA_VERSION,
            num_k: nk,
            result,
        }),
        Format::Csv => {
            let (pa, pb) = param_names(a.kind());
            let crit: Vec<String> = result
                .criticals
                .iter()
                .map(|c| {
                    let (x, y) = c.config.params();
                    format!("({},{})", num(x), num(y))
                })
                .collect();
            let mut s = header(
                "scan",
                &[
                    format!("from={a} to={b}"),
                    format!("samples={samples} nk={nk} z={z}"),
                    format!("threshold={}", num(result.threshold)),
                    format!("criticals={}", crit.join(";")),
                ],
            );
            let _ = writeln!(s, "t,{pa},{pb},energy,d2e,excess,critical");
            for (i, cfg) in result.configs().enumerate() {
                let (x, y) = cfg.params();
                let flag = result.criticals.iter().any(|c| c.index == i) as u8;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{flag}",
                    num(result.ray.t(i)),
                    num(x),
                    num(y),
                    num(result.energies[i]),
                    num(result.second_derivative[i]),
                    num(result.excess[i]),
                );
            }
            s
        }
    })
}

fn run_methods(
    cfg: &FieldConfig,
    method: MethodArg,
    nk: usize,
    nphi: usize,
) -> Result<Vec<ChernResult>> {
    let mut results = Vec::new();
    if matches!(method, MethodArg::Analytic | MethodArg::Both) {
        results.push(topology::chern_analytic(cfg, nk)?);
    }
    if matches!(method, MethodArg::Curvature | MethodArg::Both) {
        results.push(topology::chern_curvature(cfg, nk, nphi)?);
    }
    Ok(results)
}

fn chern_report(cfg: &FieldConfig, method: MethodArg, nk: usize, nphi: usize) -> Result<ChernReport> {
    // the winding of θ exists for any p, but the invariant is only meaningful while the
    // pair energy is real
    topology::check_real_pair_spectrum(cfg, nk)?;
    let results = run_methods(cfg, method, nk, nphi)?;
    let first = results[0];
    let methods_agree = results
        .iter()
        .all(|r| r.snapped == first.snapped && (r.raw - first.raw).abs() < METHOD_AGREEMENT_TOL);
    Ok(ChernReport {
        schema_version: SCHEMA_VERSION,
        config: *cfg,
        phase: classify(cfg),
        raw: first.raw,
        snapped: first.snapped,
        residual: results.iter().map(|r| r.residual).fold(0.0, f64::max),
        methods_agree,
        results,
    })
}

/// Phase-diagram grid. Points where an invariant is undefined (broken regime) get
/// `NaN` and the error name in the `status` column instead of failing the whole grid.
fn chern_grid(
    kind: FieldKind,
    grid: GridSpec,
    method: MethodArg,
    nk: usize,
    nphi: usize,
) -> Result<String> {
    use rayon::prelude::*;
    let values = grid.values()?;
    let points: Vec<(f64, f64)> = values
        .iter()
        .flat_map(|&a| values.iter().map(move |&b| (a, b)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(a, b)| {
            let cfg = FieldConfig::new(kind, a, b)?;
            let region = classify(&cfg);
            let (chern, snapped, status) = match chern_report(&cfg, method, nk, nphi) {
                Ok(r) => (r.raw, r.snapped.value(), "ok"),
                Err(e) if e.is_validation() => return Err(e),
                Err(e) => (f64::NAN, f64::NAN, e.name()),
            };
            Ok(format!(
                "{},{},{},{},{},{},{status}\n",
                num(a),
                num(b),
                num(region.p),
                region.label,
                num(chern),
                num(snapped),
            ))
        })
        .collect::<Result<Vec<String>>>()?;
    let (pa, pb) = param_names(kind);
    let mut s = header(
        "chern",
        &[
            format!("grid={},{},{} kind={}", grid.lo, grid.hi, grid.n, kind_name(kind)),
            format!("method={} nk={nk} nphi={nphi}", flag_name(method)),
        ],
    );
    let _ = writeln!(s, "{pa},{pb},p,phase,chern,snapped,status");
    rows.iter().for_each(|r| s.push_str(r));
    Ok(s)
}

fn loop_output(cfg: &FieldConfig, nk: usize, fmt: Format) -> Result<String> {
    let trace = topology::loop_trace(cfg, nk)?;
    Ok(match fmt {
        Format::Json => to_json(&LoopReport {
            schema_version: SCHEMA_VERSION,
            config: *cfg,
            trace,
        }),
        Format::Csv => {
            let p = cfg.product();
            let mut s = header("loop", &[format!("config={cfg}"), format!("nk={nk} p={}", num(p))]);
            s.push_str("k,x,y\n");
            for q in &trace.samples {
                let _ = writeln!(s, "{},{},{}", num(q.k), num(q.x), num(q.y));
            }
            let _ = writeln!(
                s,
                "# winding={} snapped={} boundary={} encloses_origin={}",
                num(trace.winding),
                trace.snapped().value(),
                trace.boundary,
                trace.encloses_origin
            );
            s
        }
    })
}

fn oracle_report(
    cfg: &FieldConfig,
    cells: &[usize],
    ed_cells: &[usize],
    nk: usize,
) -> Result<OracleReport> {
    let bloch_union = cells
        .iter()
        .map(|&n| {
            oracle::realspace_vs_bloch(cfg, n).map(|c| BlochUnionSummary {
                n_cells: n,
                max_deviation: c.max_deviation,
                raw_deviation: c.raw_deviation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let characteristic_residual = k_grid(nk)?
        .into_iter()
        .map(|k| oracle::characteristic_residual(cfg, k))
        .fold(0.0, f64::max);
    Ok(OracleReport {
        schema_version: SCHEMA_VERSION,
        config: *cfg,
        bloch_union,
        characteristic_residual,
        crosscheck: oracle::crosscheck_energy_density(cfg, ed_cells)?,
    })
}
