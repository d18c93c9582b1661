//! Command-line surface: deterministic CSV/JSON emitters for figure data.
//!
//! Every subcommand writes either a commented CSV table (two leading `#`
//! lines naming columns and units, then data rows) or a JSON array of the
//! same rows. Floats are printed as `{:.12e}`, so two runs with identical
//! arguments produce byte-identical files regardless of the worker count.

use std::f64::consts::PI;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};

#[cfg(feature = "ed")]
use crate::model::g_from_k;
use crate::model::{k_from_g, CouplingSet, JastrowParams};
use crate::quad::{self, JacobiFrame, QuadratureConfig};
use crate::{bethe, jastrow, varopt, verify};
use crate::{Error, PairKind, Result};

const E_TG: f64 = 4.0 * PI * PI;

/// Exits 0 on success, 1 on usage errors, 2 on computation failures,
/// 3 when verification fails.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests arrive as "errors" with exit code 0;
            // everything else is a usage problem.
            let code = if err.exit_code() == 0 { 0 } else { 1 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Usage(_) => 1,
                _ => 2,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::EnergyScan(args) => cmd_energy_scan(args).map(|()| 0),
        Command::ErrorScan(args) => cmd_error_scan(args).map(|()| 0),
        Command::OptimalV(args) => cmd_optimal_v(args).map(|()| 0),
        Command::Stability(args) => cmd_stability(args).map(|()| 0),
        Command::Correlations(args) => cmd_correlations(args).map(|()| 0),
        Command::Oracle(args) => cmd_oracle(args).map(|()| 0),
        Command::Verify(args) => cmd_verify(args),
    }
}

#[derive(Parser)]
#[command(
    name = "ringtrio",
    version,
    about = "Three bosons on a unit ring with per-pair contact couplings: \
             exact, variational, and oracle energies plus correlation data",
    after_help = "Pairs may be specified by momentum (--k, --k-prime) or by \
                  coupling (--g, --g-prime), never both for the same pair. \
                  Energies are in hbar^2/(M L^2), lengths in the ring \
                  circumference L."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ansatz, variational, exact, and oracle energies over a k grid
    EnergyScan(EnergyScanArgs),
    /// Relative deviations of the ansatz energies from the exact ones
    ErrorScan(ErrorScanArgs),
    /// Optimal Jastrow exponent over a k grid
    OptimalV(OptimalVArgs),
    /// Sensitivity of the energy to detuning off the integrable line
    Stability(StabilityArgs),
    /// Correlation functions and probability densities
    Correlations(CorrelationsArgs),
    /// Independent exact-diagonalization energies and correlations
    Oracle(OracleArgs),
    /// Self-check suite; exit code 3 when any check fails
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyScanArgs {
    /// Impurity-pair momentum grid start:stop:count, k in (0, pi]
    #[arg(long)]
    grid: String,
    /// Majority-pair momentum k'; repeat for several curves. Empty means
    /// the integrable diagonal k' = k
    #[arg(long = "k-prime")]
    k_prime: Vec<f64>,
    /// Majority-pair coupling g'; repeatable alternative to --k-prime
    #[arg(long = "g-prime")]
    g_prime: Vec<f64>,
    /// Divide every energy column by the Tonks-Girardeau value 4 pi^2
    #[arg(long = "normalize-tg")]
    normalize_tg: bool,
    /// Skip the exact-diagonalization column
    #[arg(long)]
    quick: bool,
    /// Worker threads for the per-point computations
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ErrorScanArgs {
    /// Impurity-pair momentum grid start:stop:count, k in (0, pi]
    #[arg(long)]
    grid: String,
    /// Fixed majority-pair momentum k'; omit for the integrable diagonal
    #[arg(long = "k-prime")]
    k_prime: Option<f64>,
    /// Fixed majority-pair coupling g'; alternative to --k-prime
    #[arg(long = "g-prime")]
    g_prime: Option<f64>,
    /// Worker threads for the per-point computations
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OptimalVArgs {
    /// Impurity-pair momentum grid start:stop:count, k in (0, pi]
    #[arg(long)]
    grid: String,
    /// Fixed majority-pair momentum k'; omit for the integrable diagonal
    #[arg(long = "k-prime")]
    k_prime: Option<f64>,
    /// Fixed majority-pair coupling g'; alternative to --k-prime
    #[arg(long = "g-prime")]
    g_prime: Option<f64>,
    /// Worker threads for the per-point computations
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct StabilityArgs {
    /// Momentum grid start:stop:count, interior of (0, pi)
    #[arg(long)]
    grid: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Frame {
    /// Majority-majority pair-distance marginal
    PairMm,
    /// Impurity-majority pair-distance marginal
    PairIm,
    /// Density over an apex coordinate and the base-pair separation
    Jacobi,
    /// Two-particle density of the majority pair on the ring
    TwoBody,
    /// |psi|^2 on the plane through the center of mass orthogonal to (1,1,1)
    ThreeBodyContour,
    /// Majority coupling k'*(k) where the pair marginal splits its maximum
    TransitionCurve,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Apex {
    /// One majority atom against the impurity-majority base pair
    Majority,
    /// The impurity against the majority base pair
    Impurity,
}

#[derive(Args)]
struct CorrelationsArgs {
    /// What to emit
    #[arg(long, value_enum)]
    frame: Frame,
    /// Impurity-pair momentum k
    #[arg(long)]
    k: Option<f64>,
    /// Impurity-pair coupling g; alternative to --k
    #[arg(long)]
    g: Option<f64>,
    /// Majority-pair momentum k'
    #[arg(long = "k-prime")]
    k_prime: Option<f64>,
    /// Majority-pair coupling g'; alternative to --k-prime
    #[arg(long = "g-prime")]
    g_prime: Option<f64>,
    /// Jastrow exponent; 1 selects the closed-form marginals
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    /// Apex particle for the jacobi frame
    #[arg(long, value_enum, default_value_t = Apex::Majority)]
    apex: Apex,
    /// Points per axis; defaults to 201 for curves, 101 for planes
    #[arg(long)]
    resolution: Option<usize>,
    /// Momentum grid start:stop:count for the transition curve
    #[arg(long)]
    grid: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleFrame {
    /// Majority-majority pair-distance marginal
    PairMm,
    /// Impurity-majority pair-distance marginal
    PairIm,
}

#[derive(Args)]
struct OracleArgs {
    /// Impurity-pair momentum k, converted to a coupling at v = 1
    #[arg(long)]
    k: Option<f64>,
    /// Impurity-pair coupling g; alternative to --k
    #[arg(long)]
    g: Option<f64>,
    /// Majority-pair momentum k'
    #[arg(long = "k-prime")]
    k_prime: Option<f64>,
    /// Majority-pair coupling g'; alternative to --k-prime
    #[arg(long = "g-prime")]
    g_prime: Option<f64>,
    /// Particle count; 2 uses the single coupling g
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
    particles: u8,
    /// Single reduced cutoff without extrapolation
    #[arg(long)]
    quick: bool,
    /// Emit a pair-correlation curve instead of the energy table
    #[arg(long, value_enum)]
    frame: Option<OracleFrame>,
    /// Correlation grid points
    #[arg(long)]
    resolution: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced check set that skips optimization and oracle runs
    #[arg(long)]
    quick: bool,
    /// Multiply the analytic norm constant by (1 + p) to demonstrate that
    /// the equivalence checks detect it (diagnostic)
    #[arg(long = "perturb-c2", default_value_t = 0.0)]
    perturb_c2: f64,
    #[command(flatten)]
    output: OutputArgs,
}

// ---------------------------------------------------------------------------
// Argument helpers.

/// Inclusive grid from a start:stop:count spec.
fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let usage = || Error::Usage(format!("grid must be start:stop:count, got {text:?}"));
    let [start, stop, count] = parts.as_slice() else {
        return Err(usage());
    };
    let start: f64 = start.parse().map_err(|_| usage())?;
    let stop: f64 = stop.parse().map_err(|_| usage())?;
    let count: usize = count.parse().map_err(|_| usage())?;
    if !start.is_finite() || !stop.is_finite() {
        return Err(usage());
    }
    match count {
        0 => Err(Error::Usage(format!("grid count must be positive, got {text:?}"))),
        1 if start == stop => Ok(vec![start]),
        1 => Err(Error::Usage(format!(
            "a one-point grid needs start = stop, got {text:?}"
        ))),
        _ => Ok(crate::linspace(start, stop, count)),
    }
}

/// Exactly one of a momentum or a coupling flag, reduced to the momentum.
fn resolve_momentum(k: Option<f64>, g: Option<f64>, v: f64, what: &str) -> Result<f64> {
    match (k, g) {
        (Some(_), Some(_)) => Err(Error::Usage(format!(
            "give {what} either as a momentum or as a coupling, not both"
        ))),
        (Some(k), None) => Ok(k),
        (None, Some(g)) => k_from_g(g, v),
        (None, None) => Err(Error::Usage(format!("{what} is required"))),
    }
}

/// Like [`resolve_momentum`] with absence allowed.
fn resolve_momentum_opt(k: Option<f64>, g: Option<f64>, what: &str) -> Result<Option<f64>> {
    match (k, g) {
        (None, None) => Ok(None),
        _ => resolve_momentum(k, g, 1.0, what).map(Some),
    }
}

fn resolution_at_least_two(resolution: Option<usize>, default: usize) -> Result<usize> {
    let n = resolution.unwrap_or(default);
    if n < 2 {
        return Err(Error::Usage(format!("--resolution must be at least 2, got {n}")));
    }
    Ok(n)
}

/// Maps items through a fallible function on `workers` threads. Results are
/// assembled by input index and errors surface in input order, so the output
/// does not depend on the worker count.
fn par_map<T, R, F>(items: &[T], workers: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<R>>> = Vec::with_capacity(items.len());
    slots.resize_with(items.len(), || None);
    let mut chunks: Vec<Vec<(usize, Result<R>)>> = Vec::with_capacity(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                let next = &next;
                let f = &f;
                scope.spawn(move || {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= items.len() {
                            break;
                        }
                        local.push((i, f(&items[i])));
                    }
                    local
                })
            })
            .collect();
        for handle in handles {
            chunks.push(handle.join().expect("worker thread panicked"));
        }
    });
    for (i, result) in chunks.into_iter().flatten() {
        slots[i] = Some(result);
    }
    slots.into_iter().map(|s| s.expect("work item left unfilled")).collect()
}

// ---------------------------------------------------------------------------
// Table emission.

enum Cell {
    Float(f64),
    // Integer cells appear only in the oracle's convergence table.
    #[cfg(feature = "ed")]
    Int(i64),
    Flag(bool),
    OptFloat(Option<f64>),
    #[cfg(feature = "ed")]
    OptInt(Option<i64>),
}

impl Cell {
    fn render(&self) -> String {
        match *self {
            Cell::Float(x) => format!("{x:.12e}"),
            #[cfg(feature = "ed")]
            Cell::Int(n) => n.to_string(),
            Cell::Flag(b) => (b as i32).to_string(),
            Cell::OptFloat(Some(x)) => format!("{x:.12e}"),
            #[cfg(feature = "ed")]
            Cell::OptInt(Some(n)) => n.to_string(),
            Cell::OptFloat(None) => String::new(),
            #[cfg(feature = "ed")]
            Cell::OptInt(None) => String::new(),
        }
    }
}

fn emit_table<R: serde::Serialize>(
    rows: &[R],
    columns: &[&str],
    units: &str,
    to_cells: impl Fn(&R) -> Vec<Cell>,
    output: &OutputArgs,
) -> Result<()> {
    let text = match output.format {
        Format::Csv => {
            let mut text = String::new();
            text.push_str("# ");
            text.push_str(&columns.join(","));
            text.push_str("\n# units: ");
            text.push_str(units);
            text.push('\n');
            for row in rows {
                let cells = to_cells(row);
                debug_assert_eq!(cells.len(), columns.len());
                let rendered: Vec<String> = cells.iter().map(Cell::render).collect();
                text.push_str(&rendered.join(","));
                text.push('\n');
            }
            text
        }
        Format::Json => {
            let mut text = serde_json::to_string_pretty(rows)
                .map_err(|e| Error::Numerics(format!("json encoding failed: {e}")))?;
            text.push('\n');
            text
        }
    };
    write_output(&text, output)
}

fn write_output(text: &str, output: &OutputArgs) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// energy-scan.

#[derive(serde::Serialize)]
struct EnergyRow {
    k: f64,
    k_prime: f64,
    #[serde(rename = "E_jastrow")]
    e_jastrow: f64,
    #[serde(rename = "E_variational")]
    e_variational: f64,
    v_opt: f64,
    #[serde(rename = "E_bethe")]
    e_bethe: Option<f64>,
    #[serde(rename = "E_ed")]
    e_ed: Option<f64>,
}

impl EnergyRow {
    fn normalized(mut self) -> Self {
        self.e_jastrow /= E_TG;
        self.e_variational /= E_TG;
        self.e_bethe = self.e_bethe.map(|e| e / E_TG);
        self.e_ed = self.e_ed.map(|e| e / E_TG);
        self
    }
}

fn energy_row(k: f64, k_prime: f64, quick: bool) -> Result<EnergyRow> {
    let e_jastrow = jastrow::jastrow_energy(k, k_prime)?.total;
    let couplings = CouplingSet::from_pair_momenta(k, k_prime)?;
    let opt = varopt::optimize_v(&couplings, &QuadratureConfig::default())?;
    let e_bethe = if (k - k_prime).abs() < 1e-9 {
        Some(bethe::bethe_three_body(couplings.g)?.energy)
    } else {
        None
    };
    #[cfg(feature = "ed")]
    let e_ed = if quick {
        None
    } else {
        Some(crate::ed::ed_energy(&couplings, 3, &crate::ed::EDConfig::default())?
            .energy_report()
            .total)
    };
    #[cfg(not(feature = "ed"))]
    let e_ed = {
        let _ = quick;
        None
    };
    Ok(EnergyRow {
        k,
        k_prime,
        e_jastrow,
        e_variational: opt.energy.total,
        v_opt: opt.v_opt,
        e_bethe,
        e_ed,
    })
}

fn cmd_energy_scan(args: EnergyScanArgs) -> Result<()> {
    let ks = parse_grid(&args.grid)?;
    let k_primes: Option<Vec<f64>> = match (args.k_prime.is_empty(), args.g_prime.is_empty()) {
        (false, false) => {
            return Err(Error::Usage(
                "give the majority pair either as --k-prime or as --g-prime values, not both"
                    .into(),
            ))
        }
        (false, true) => Some(args.k_prime.clone()),
        (true, false) => Some(
            args.g_prime
                .iter()
                .map(|&g| k_from_g(g, 1.0))
                .collect::<Result<Vec<f64>>>()?,
        ),
        (true, true) => None,
    };
    let points: Vec<(f64, f64)> = match &k_primes {
        None => ks.iter().map(|&k| (k, k)).collect(),
        Some(list) => list
            .iter()
            .flat_map(|&kp| ks.iter().map(move |&k| (k, kp)))
            .collect(),
    };
    let quick = args.quick;
    let rows = par_map(&points, args.workers, |&(k, kp)| energy_row(k, kp, quick))?;
    let rows: Vec<EnergyRow> = if args.normalize_tg {
        rows.into_iter().map(EnergyRow::normalized).collect()
    } else {
        rows
    };
    let units = if args.normalize_tg {
        "momenta in 1/L on the unit ring; energies in units of E_TG = 4 pi^2"
    } else {
        "momenta in 1/L on the unit ring; energies in hbar^2/(M L^2)"
    };
    emit_table(
        &rows,
        &["k", "k_prime", "E_jastrow", "E_variational", "v_opt", "E_bethe", "E_ed"],
        units,
        |r| {
            vec![
                Cell::Float(r.k),
                Cell::Float(r.k_prime),
                Cell::Float(r.e_jastrow),
                Cell::Float(r.e_variational),
                Cell::Float(r.v_opt),
                Cell::OptFloat(r.e_bethe),
                Cell::OptFloat(r.e_ed),
            ]
        },
        &args.output,
    )
}

// ---------------------------------------------------------------------------
// error-scan, optimal-v, stability.

#[derive(serde::Serialize)]
struct ErrorRow {
    k: f64,
    k_prime: f64,
    dev_v1_vs_bethe: Option<f64>,
    dev_var_vs_bethe: Option<f64>,
    dev_v1_vs_var: f64,
}

fn cmd_error_scan(args: ErrorScanArgs) -> Result<()> {
    let ks = parse_grid(&args.grid)?;
    let k_prime = resolve_momentum_opt(
        args.k_prime,
        args.g_prime,
        "the majority pair (--k-prime | --g-prime)",
    )?;
    let cfg = QuadratureConfig::default();
    let scan = if args.workers > 1 {
        // Rows are independent, so singleton scans concatenate to the same
        // table the one-shot call produces.
        par_map(&ks, args.workers, |&k| {
            varopt::error_scan(&[k], k_prime, &cfg).map(|mut rows| rows.remove(0))
        })?
    } else {
        varopt::error_scan(&ks, k_prime, &cfg)?
    };
    let rows: Vec<ErrorRow> = scan
        .iter()
        .map(|r| ErrorRow {
            k: r.k,
            k_prime: r.k_prime,
            dev_v1_vs_bethe: r.dev_v1_vs_bethe,
            dev_var_vs_bethe: r.dev_var_vs_bethe,
            dev_v1_vs_var: r.dev_v1_vs_var,
        })
        .collect();
    emit_table(
        &rows,
        &["k", "k_prime", "dev_v1_vs_bethe", "dev_var_vs_bethe", "dev_v1_vs_var"],
        "momenta in 1/L; deviations are relative and dimensionless, exact \
         columns empty off the integrable line",
        |r| {
            vec![
                Cell::Float(r.k),
                Cell::Float(r.k_prime),
                Cell::OptFloat(r.dev_v1_vs_bethe),
                Cell::OptFloat(r.dev_var_vs_bethe),
                Cell::Float(r.dev_v1_vs_var),
            ]
        },
        &args.output,
    )
}

#[derive(serde::Serialize)]
struct OptimalVRow {
    k: f64,
    k_prime: f64,
    v_opt: f64,
    flat_flag: bool,
}

fn cmd_optimal_v(args: OptimalVArgs) -> Result<()> {
    let ks = parse_grid(&args.grid)?;
    let k_prime = resolve_momentum_opt(
        args.k_prime,
        args.g_prime,
        "the majority pair (--k-prime | --g-prime)",
    )?;
    let points: Vec<(f64, f64)> = ks.iter().map(|&k| (k, k_prime.unwrap_or(k))).collect();
    let rows = par_map(&points, args.workers, |&(k, kp)| {
        let couplings = CouplingSet::from_pair_momenta(k, kp)?;
        let opt = varopt::optimize_v(&couplings, &QuadratureConfig::default())?;
        Ok(OptimalVRow { k, k_prime: kp, v_opt: opt.v_opt, flat_flag: opt.flat_flag })
    })?;
    emit_table(
        &rows,
        &["k", "k_prime", "v_opt", "flat_flag"],
        "momenta in 1/L; v_opt dimensionless; flat_flag 1 when the \
         objective is flat and v_opt is 1 by convention",
        |r| {
            vec![
                Cell::Float(r.k),
                Cell::Float(r.k_prime),
                Cell::Float(r.v_opt),
                Cell::Flag(r.flat_flag),
            ]
        },
        &args.output,
    )
}

#[derive(serde::Serialize)]
struct StabilityRow {
    k: f64,
    slope: f64,
    h_used: f64,
}

fn cmd_stability(args: StabilityArgs) -> Result<()> {
    let ks = parse_grid(&args.grid)?;
    let scan = varopt::stability_scan(&ks)?;
    let rows: Vec<StabilityRow> = scan
        .k_grid
        .iter()
        .zip(&scan.slope)
        .map(|(&k, &slope)| StabilityRow { k, slope, h_used: scan.h_used })
        .collect();
    emit_table(
        &rows,
        &["k", "slope", "h_used"],
        "k and h_used in 1/L; slope in L (derivative of a relative energy \
         deviation with respect to k')",
        |r| vec![Cell::Float(r.k), Cell::Float(r.slope), Cell::Float(r.h_used)],
        &args.output,
    )
}

// ---------------------------------------------------------------------------
// correlations.

#[derive(serde::Serialize)]
struct PairRow {
    r: f64,
    rho: f64,
}

#[derive(serde::Serialize)]
struct PlaneRow {
    x: f64,
    y: f64,
    value: f64,
}

#[derive(serde::Serialize)]
struct TransitionRow {
    k: f64,
    k_prime_star: f64,
    k_minus_k_prime_star: f64,
}

fn correlation_pair(args: &CorrelationsArgs) -> Result<(f64, f64, f64)> {
    let v = args.v;
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Usage(format!("--v must be positive and finite, got {v}")));
    }
    let k = resolve_momentum(args.k, args.g, v, "the impurity pair (--k | --g)")?;
    let k_prime = resolve_momentum(
        args.k_prime,
        args.g_prime,
        v,
        "the majority pair (--k-prime | --g-prime)",
    )?;
    Ok((k, k_prime, v))
}

fn plane_rows(grid: &crate::DensityGrid) -> Vec<PlaneRow> {
    let mut rows = Vec::with_capacity(grid.values.len());
    for (i, &x) in grid.x.iter().enumerate() {
        for (j, &y) in grid.y.iter().enumerate() {
            rows.push(PlaneRow { x, y, value: grid.values[i * grid.y.len() + j] });
        }
    }
    rows
}

fn emit_plane(
    grid: &crate::DensityGrid,
    columns: &[&str],
    units: &str,
    output: &OutputArgs,
) -> Result<()> {
    let rows = plane_rows(grid);
    emit_table(
        &rows,
        columns,
        units,
        |r| vec![Cell::Float(r.x), Cell::Float(r.y), Cell::Float(r.value)],
        output,
    )
}

fn cmd_correlations(args: CorrelationsArgs) -> Result<()> {
    let cfg = QuadratureConfig::default();
    match args.frame {
        Frame::TransitionCurve => {
            let grid = args
                .grid
                .as_deref()
                .ok_or_else(|| Error::Usage("transition-curve needs --grid".into()))?;
            let ks = parse_grid(grid)?;
            let rows: Vec<TransitionRow> = ks
                .iter()
                .map(|&k| {
                    let star = jastrow::transition_kprime_star(k)?;
                    Ok(TransitionRow {
                        k,
                        k_prime_star: star,
                        k_minus_k_prime_star: k - star,
                    })
                })
                .collect::<Result<_>>()?;
            emit_table(
                &rows,
                &["k", "k_prime_star", "k_minus_k_prime_star"],
                "momenta in 1/L; k_prime_star may exceed pi near the \
                 Tonks-Girardeau point",
                |r| {
                    vec![
                        Cell::Float(r.k),
                        Cell::Float(r.k_prime_star),
                        Cell::Float(r.k_minus_k_prime_star),
                    ]
                },
                &args.output,
            )
        }
        Frame::PairMm | Frame::PairIm => {
            let (k, k_prime, v) = correlation_pair(&args)?;
            let n = resolution_at_least_two(args.resolution, 201)?;
            let kind = match args.frame {
                Frame::PairMm => PairKind::MajorityMajority,
                _ => PairKind::ImpurityMajority,
            };
            let (r_grid, values) = if v == 1.0 {
                let r_grid = crate::linspace(0.0, 1.0, n);
                let values: Vec<f64> = r_grid
                    .iter()
                    .map(|&r| match kind {
                        PairKind::MajorityMajority => jastrow::pair_corr_mm(r, k, k_prime),
                        PairKind::ImpurityMajority => jastrow::pair_corr_im(r, k, k_prime),
                    })
                    .collect::<Result<_>>()?;
                (r_grid, values)
            } else {
                let params = JastrowParams::new(k, k_prime, v)?;
                let curve = quad::pair_marginal_resolved(&params, kind, &cfg, n)?;
                (curve.r_grid, curve.values)
            };
            let rows: Vec<PairRow> = r_grid
                .iter()
                .zip(&values)
                .map(|(&r, &rho)| PairRow { r, rho })
                .collect();
            emit_table(
                &rows,
                &["r", "rho"],
                "r in L; rho dimensionless, normalized to ring average 1",
                |row| vec![Cell::Float(row.r), Cell::Float(row.rho)],
                &args.output,
            )
        }
        Frame::Jacobi => {
            let (k, k_prime, v) = correlation_pair(&args)?;
            let n = resolution_at_least_two(args.resolution, 101)?;
            let params = JastrowParams::new(k, k_prime, v)?;
            let frame = match args.apex {
                Apex::Majority => JacobiFrame::MajorityApex,
                Apex::Impurity => JacobiFrame::ImpurityApex,
            };
            let grid = quad::jacobi_density_in_frame(&params, frame, &cfg, n)?;
            emit_plane(
                &grid,
                &["xi", "r", "value"],
                "xi is the apex coordinate and r the base-pair separation, \
                 both in L; value is the normalized in-frame density",
                &args.output,
            )
        }
        Frame::TwoBody => {
            let (k, k_prime, v) = correlation_pair(&args)?;
            let n = resolution_at_least_two(args.resolution, 101)?;
            let params = JastrowParams::new(k, k_prime, v)?;
            let grid = quad::two_body_density_resolved(&params, &cfg, n)?;
            emit_plane(
                &grid,
                &["x", "y", "value"],
                "majority positions x, y in L; value is the two-particle \
                 density with the impurity integrated out",
                &args.output,
            )
        }
        Frame::ThreeBodyContour => {
            let (k, k_prime, v) = correlation_pair(&args)?;
            let n = resolution_at_least_two(args.resolution, 101)?;
            let params = JastrowParams::new(k, k_prime, v)?;
            let grid = quad::three_body_contour(&params, &cfg, n)?;
            emit_plane(
                &grid,
                &["a", "b", "value"],
                "in-plane coordinates a along (1,-1,0)/sqrt(2) and b along \
                 (1,1,-2)/sqrt(6), in L; value is |psi|^2 / norm",
                &args.output,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// oracle.

#[cfg(feature = "ed")]
#[derive(serde::Serialize)]
struct OracleEnergyRow {
    n_max: i64,
    ground_energy: f64,
    gap: Option<f64>,
    basis_size: Option<i64>,
    residual: Option<f64>,
    extrapolated_energy: Option<f64>,
    uncertainty: Option<f64>,
}

#[cfg(feature = "ed")]
#[derive(serde::Serialize)]
struct OracleCurveRow {
    r: f64,
    value: f64,
}

#[cfg(feature = "ed")]
fn cmd_oracle(args: OracleArgs) -> Result<()> {
    use crate::ed;

    let g = match (args.k, args.g) {
        (Some(_), Some(_)) => {
            return Err(Error::Usage(
                "give the impurity pair either as --k or as --g, not both".into(),
            ))
        }
        (Some(k), None) => g_from_k(k, 1.0)?,
        (None, Some(g)) => g,
        (None, None) => {
            return Err(Error::Usage("the impurity pair (--k | --g) is required".into()))
        }
    };
    let g_prime = match (args.k_prime, args.g_prime) {
        (Some(_), Some(_)) => {
            return Err(Error::Usage(
                "give the majority pair either as --k-prime or as --g-prime, not both".into(),
            ))
        }
        (Some(k), None) => g_from_k(k, 1.0)?,
        (None, Some(g2)) => g2,
        // The two-particle problem has a single pair.
        (None, None) if args.particles == 2 => g,
        (None, None) => {
            return Err(Error::Usage(
                "the majority pair (--k-prime | --g-prime) is required for three particles"
                    .into(),
            ))
        }
    };
    let couplings = CouplingSet::new(g, g_prime)?;
    let cfg = if args.quick {
        ed::EDConfig { n_max: 10, extrapolate: false, n_max_sequence: Vec::new(), ..Default::default() }
    } else {
        ed::EDConfig::default()
    };
    match args.frame {
        Some(frame) => {
            if args.particles != 3 {
                return Err(Error::Usage("pair correlations need --particles 3".into()));
            }
            let n = resolution_at_least_two(args.resolution, 201)?;
            let r_grid = crate::linspace(0.0, 1.0, n);
            let kind = match frame {
                OracleFrame::PairMm => PairKind::MajorityMajority,
                OracleFrame::PairIm => PairKind::ImpurityMajority,
            };
            let curve = ed::ed_pair_correlation(&couplings, kind, &cfg, &r_grid)?;
            let rows: Vec<OracleCurveRow> = curve
                .r_grid
                .iter()
                .zip(&curve.values)
                .map(|(&r, &value)| OracleCurveRow { r, value })
                .collect();
            emit_table(
                &rows,
                &["r", "value"],
                "r in L; value dimensionless, normalized to ring average 1",
                |row| vec![Cell::Float(row.r), Cell::Float(row.value)],
                &args.output,
            )
        }
        None => {
            let result = ed::ed_energy(&couplings, args.particles as usize, &cfg)?;
            let last = result.energy_by_cutoff.len() - 1;
            let rows: Vec<OracleEnergyRow> = result
                .energy_by_cutoff
                .iter()
                .enumerate()
                .map(|(i, &(n_max, energy))| OracleEnergyRow {
                    n_max: n_max as i64,
                    ground_energy: energy,
                    gap: (i == last).then_some(result.gap),
                    basis_size: (i == last).then_some(result.basis_size as i64),
                    residual: (i == last).then_some(result.residual),
                    extrapolated_energy: if i == last { result.extrapolated_energy } else { None },
                    uncertainty: if i == last { result.extrapolation_uncertainty } else { None },
                })
                .collect();
            emit_table(
                &rows,
                &[
                    "n_max",
                    "ground_energy",
                    "gap",
                    "basis_size",
                    "residual",
                    "extrapolated_energy",
                    "uncertainty",
                ],
                "energies in hbar^2/(M L^2); gap, basis_size, residual, and \
                 the extrapolation belong to the largest cutoff row",
                |r| {
                    vec![
                        Cell::Int(r.n_max),
                        Cell::Float(r.ground_energy),
                        Cell::OptFloat(r.gap),
                        Cell::OptInt(r.basis_size),
                        Cell::OptFloat(r.residual),
                        Cell::OptFloat(r.extrapolated_energy),
                        Cell::OptFloat(r.uncertainty),
                    ]
                },
                &args.output,
            )
        }
    }
}

#[cfg(not(feature = "ed"))]
fn cmd_oracle(_args: OracleArgs) -> Result<()> {
    Err(Error::Usage(
        "this binary was built without the `ed` feature; rebuild with default features".into(),
    ))
}

// ---------------------------------------------------------------------------
// verify.

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let report = verify::run_verify(args.quick, args.perturb_c2)?;
    let rendered = report.render();
    let text = match args.output.format {
        Format::Csv => rendered.clone(),
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Numerics(format!("json encoding failed: {e}")))?;
            text.push('\n');
            text
        }
    };
    match &args.output.out {
        Some(path) => {
            fs::write(path, &text)?;
            // The verdict still goes to the terminal when a file captures
            // the report.
            print!("{rendered}");
        }
        None => print!("{text}"),
    }
    Ok(if report.passed { 0 } else { 3 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let grid = parse_grid("0.5:2.5:5").unwrap();
        assert_eq!(grid, vec![0.5, 1.0, 1.5, 2.0, 2.5]);
        assert_eq!(parse_grid("2.0:2.0:1").unwrap(), vec![2.0]);
        assert!(matches!(parse_grid("0.5:2.5"), Err(Error::Usage(_))));
        assert!(matches!(parse_grid("a:b:c"), Err(Error::Usage(_))));
        assert!(matches!(parse_grid("0.5:2.5:0"), Err(Error::Usage(_))));
        assert!(matches!(parse_grid("1.0:2.0:1"), Err(Error::Usage(_))));
    }

    #[test]
    fn momentum_resolution_rejects_double_specification() {
        assert!(matches!(
            resolve_momentum(Some(1.0), Some(2.0), 1.0, "pair"),
            Err(Error::Usage(_))
        ));
        assert!(matches!(resolve_momentum(None, None, 1.0, "pair"), Err(Error::Usage(_))));
        let k = resolve_momentum(None, Some(std::f64::consts::PI), 1.0, "pair").unwrap();
        assert!((k - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn par_map_is_order_stable_and_error_ordered() {
        let items: Vec<usize> = (0..40).collect();
        let sequential = par_map(&items, 1, |&i| Ok(3 * i)).unwrap();
        let threaded = par_map(&items, 4, |&i| Ok(3 * i)).unwrap();
        assert_eq!(sequential, threaded);
        let err = par_map(&items, 4, |&i| {
            if i >= 20 {
                Err(Error::Numerics(format!("item {i}")))
            } else {
                Ok(i)
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Numerics(msg) if msg == "item 20"));
    }

    #[test]
    fn cells_render_fixed_width_floats_and_empty_options() {
        assert_eq!(Cell::Float(1.0).render(), "1.000000000000e0");
        assert_eq!(Cell::OptFloat(None).render(), "");
        assert_eq!(Cell::Flag(true).render(), "1");
        assert_eq!(Cell::Flag(false).render(), "0");
        assert_eq!(Cell::OptInt(Some(368)).render(), "368");
    }

    #[test]
    fn cli_parses_every_subcommand() {
        Cli::try_parse_from(["ringtrio", "energy-scan", "--grid", "0.3:3.1:8", "--k-prime", "1.0", "--quick"]).unwrap();
        Cli::try_parse_from(["ringtrio", "error-scan", "--grid", "0.3:3.1:8"]).unwrap();
        Cli::try_parse_from(["ringtrio", "optimal-v", "--grid", "0.3:3.1:8", "--g-prime", "2.0"]).unwrap();
        Cli::try_parse_from(["ringtrio", "stability", "--grid", "0.3:3.0:10"]).unwrap();
        Cli::try_parse_from([
            "ringtrio",
            "correlations",
            "--frame",
            "pair-mm",
            "--k",
            "2.6",
            "--k-prime",
            "1.0",
        ])
        .unwrap();
        Cli::try_parse_from(["ringtrio", "oracle", "--g", "1.0", "--g-prime", "1.0", "--quick"]).unwrap();
        Cli::try_parse_from(["ringtrio", "verify", "--quick", "--perturb-c2", "0.01"]).unwrap();
        assert!(Cli::try_parse_from(["ringtrio", "bogus"]).is_err());
    }
}
