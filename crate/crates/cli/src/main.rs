//! `horn`: command-line front end for the horn library.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use horn_core::lr::bridge::{verify_bridge, BridgeOutcome};
use horn_core::lr::ehrhart::{polytope_dimension, stretch_quasipolynomial};
use horn_core::lr::pictograph::{enumerate_pictographs, PictographKind};
use horn_core::lr::{lr_coefficient, tensor_decomposition};
use horn_core::orbital::{hciz, OrbitalArgs};
use horn_core::sampler::{
    horn_histogram, sample_horn_all, sample_schur, HistBounds, SamplerConfig,
};
use horn_core::scalar::{parse_rational, Scalar};
use horn_core::so_density::{
    pdf_so3, singular_curves, so2_horn_pdf, so2_schur_pdf, so3_density_grid,
};
use horn_core::spectra::{singular_hyperplanes, vandermonde};
use horn_core::su_density::{density_grid, j_exact, pdf_su_values};
use horn_core::{DynkinWeight, Execution, GroupClass, HornError, Spectrum};
use num_rational::BigRational;
use output::{csv_row, Run};
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "horn",
    version,
    about = "Eigenvalues of sums of random matrix orbits"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Machine-readable JSON instead of text/CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Write the result here instead of stdout; a manifest goes to <OUT>.manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to HORN_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Histogram (or raw list) of Horn samples.
    Sample(SampleArgs),
    /// Diagonals of random orbit points.
    Schur(SchurArgs),
    /// SU(n) Horn density at a point, or on a grid for n = 3.
    PdfSu(PdfSuArgs),
    /// SO(3) density for alpha = beta = (1, 0, -1).
    #[command(alias = "so3-pdf")]
    PdfSo3(PdfSo3Args),
    /// SO(2) Horn or Schur density.
    PdfSo2(PdfSo2Args),
    /// Harish-Chandra orbital integral H(alpha; i x).
    Hciz(HcizArgs),
    /// Littlewood-Richardson multiplicity N_{lambda mu}^nu.
    Lr(TripleArgs),
    /// Full tensor product decomposition of V_lambda (x) V_mu.
    Decompose(PairArgs),
    /// Stretching polynomial P(s) = N_{s lambda, s mu}^{s nu}.
    Stretch(StretchArgs),
    /// Pictographs (BZ triangles, O-blades, honeycombs) of a triple.
    Pictograph(PictographArgs),
    /// Candidate walls of the Horn polytope.
    Walls(WallsArgs),
    /// Exact identities linking J and LR multiplicities.
    Bridge(TripleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    So,
    Su,
    Usp,
}

impl From<Group> for GroupClass {
    fn from(g: Group) -> Self {
        match g {
            Group::So => GroupClass::So,
            Group::Su => GroupClass::Su,
            Group::Usp => GroupClass::Usp,
        }
    }
}

/// A comma-separated list of decimals or fractions, kept verbatim.
#[derive(Clone, Debug)]
struct NumList(Vec<String>);

impl NumList {
    fn floats(&self) -> Vec<f64> {
        self.0.iter().map(|s| float_of(s)).collect()
    }

    fn rationals(&self) -> Option<Vec<BigRational>> {
        self.0.iter().map(|s| parse_rational(s)).collect()
    }

    fn has_fraction(&self) -> bool {
        self.0.iter().any(|s| s.contains('/'))
    }
}

fn float_of(s: &str) -> f64 {
    match s.split_once('/') {
        Some((n, d)) => n.trim().parse::<f64>().unwrap() / d.trim().parse::<f64>().unwrap(),
        None => s.trim().parse().unwrap(),
    }
}

fn parse_num_list(s: &str) -> Result<NumList, String> {
    let items: Vec<String> = s.split(',').map(|t| t.trim().to_string()).collect();
    for t in &items {
        let ok = match t.split_once('/') {
            Some((n, d)) => {
                n.trim().parse::<i64>().is_ok() && d.trim().parse::<i64>().is_ok_and(|d| d != 0)
            }
            None => t.parse::<f64>().is_ok_and(f64::is_finite),
        };
        if !ok {
            return Err(format!("{t:?} is not a number or fraction"));
        }
    }
    Ok(NumList(items))
}

fn parse_labels(s: &str) -> Result<DynkinWeight, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("{t:?} is not a non-negative integer label"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(DynkinWeight::new)
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    group: Group,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    alpha: NumList,
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    beta: NumList,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    bins: usize,
    /// Scale of the rotated orbit.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t: f64,
    /// Emit every sorted spectrum instead of a histogram.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct SchurArgs {
    #[arg(long, value_enum)]
    group: Group,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    alpha: NumList,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PdfSuArgs {
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    alpha: NumList,
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    beta: NumList,
    /// Full spectrum of the sum.
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true, conflicts_with = "grid")]
    gamma: Option<NumList>,
    /// Grid resolution over the Horn box (n = 3).
    #[arg(long)]
    grid: Option<usize>,
    /// Exact rational arithmetic even without fractions in the input.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct PdfSo3Args {
    #[arg(long, allow_hyphen_values = true, requires = "gamma2")]
    gamma1: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "gamma1")]
    gamma2: Option<f64>,
    /// Grid resolution over [0, 2] x [-1, 1].
    #[arg(long, conflicts_with_all = ["gamma1", "singular"])]
    grid: Option<usize>,
    /// Singular curves as a point list; the value sets the search resolution.
    #[arg(long, conflicts_with = "gamma1")]
    singular: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum So2Mode {
    Horn,
    Schur,
}

#[derive(Args)]
struct PdfSo2Args {
    #[arg(long, value_enum, default_value = "horn")]
    mode: So2Mode,
    /// alpha_1 - alpha_2 (Horn) or alpha_1 (Schur).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// beta_1 - beta_2 (Horn only).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// gamma_1 - gamma_2 (Horn) or the diagonal entry x (Schur).
    #[arg(long, allow_hyphen_values = true)]
    at: f64,
}

#[derive(Args)]
struct HcizArgs {
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    alpha: NumList,
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    x: NumList,
}

#[derive(Args)]
struct TripleArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_labels)]
    lambda: DynkinWeight,
    #[arg(long, value_parser = parse_labels)]
    mu: DynkinWeight,
    #[arg(long, value_parser = parse_labels)]
    nu: DynkinWeight,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_labels)]
    lambda: DynkinWeight,
    #[arg(long, value_parser = parse_labels)]
    mu: DynkinWeight,
}

#[derive(Args)]
struct StretchArgs {
    #[command(flatten)]
    triple: TripleArgs,
    /// Largest stretch counted (default 2d + 2).
    #[arg(long)]
    s_max: Option<u32>,
}

#[derive(Args)]
struct PictographArgs {
    #[command(flatten)]
    triple: TripleArgs,
    /// bz-triangle, o-blade or honeycomb.
    #[arg(long, default_value = "bz-triangle")]
    kind: String,
}

#[derive(Args)]
struct WallsArgs {
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    alpha: NumList,
    #[arg(long, value_parser = parse_num_list, allow_hyphen_values = true)]
    beta: NumList,
    /// Largest |I| = |J| = |K| (default n - 1).
    #[arg(long)]
    max_card: Option<usize>,
}

enum CliError {
    Usage(String),
    Compute(HornError),
    Failed(String),
    Io(std::io::Error),
}

impl From<HornError> for CliError {
    fn from(e: HornError) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn record(&self) -> serde_json::Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage".to_string(), m.clone()),
            CliError::Compute(e) => {
                let dbg = format!("{e:?}");
                let kind = dbg
                    .split(|c: char| !c.is_alphanumeric())
                    .next()
                    .unwrap_or("")
                    .to_string();
                (kind, e.to_string())
            }
            CliError::Failed(m) => ("check_failed".to_string(), m.clone()),
            CliError::Io(e) => ("io".to_string(), e.to_string()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn check_n(n: Option<usize>, len: usize, what: &str) -> CliResult<()> {
    match n {
        Some(n) if n != len => usage(format!("{what} has {len} entries but --n is {n}")),
        _ => Ok(()),
    }
}

fn check_rank(n: Option<usize>, ws: &[&DynkinWeight]) -> CliResult<()> {
    let rank = ws[0].rank();
    if ws.iter().any(|w| w.rank() != rank) {
        return usage("weights must all have the same number of labels");
    }
    if rank == 0 {
        return usage("weights need at least one label");
    }
    match n {
        Some(n) if n != rank + 1 => {
            usage(format!("su({n}) weights take {} labels, got {rank}", n - 1))
        }
        _ => Ok(()),
    }
}

fn labels(w: &DynkinWeight) -> String {
    w.labels()
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Horn box in (gamma_1, gamma_2) from the Weyl inequalities.
fn gamma12_bounds(a: &[f64], b: &[f64]) -> HistBounds {
    let n = a.len();
    // gamma_k >= alpha_i + beta_j for i + j = n + k, gamma_k <= alpha_i + beta_j for i + j = k + 1 (1-based)
    let lower = |k: usize| {
        (0..n)
            .filter_map(|i| {
                (n + k)
                    .checked_sub(i + 2)
                    .filter(|&j| j < n)
                    .map(|j| a[i] + b[j])
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let upper = |k: usize| {
        (0..k)
            .map(|i| a[i] + b[k - 1 - i])
            .fold(f64::INFINITY, f64::min)
    };
    let (x0, x1) = (lower(1), upper(1));
    let (y0, y1) = if n >= 2 {
        (lower(2), upper(2))
    } else {
        (x0, x1)
    };
    let pad = |lo: f64, hi: f64| {
        let w = (hi - lo).abs().max(1e-9) * 1e-9;
        (lo - w, hi + w)
    };
    let (x_min, x_max) = pad(x0, x1);
    let (y_min, y_max) = pad(y0, y1);
    HistBounds {
        x_min,
        x_max,
        y_min,
        y_max,
    }
}

fn spectrum(v: &NumList, traceless: bool) -> CliResult<Spectrum> {
    Ok(Spectrum::new(v.floats(), traceless)?)
}

fn superfactorial(n: usize) -> BigRational {
    let mut prod = BigRational::from_i64(1);
    let mut f = BigRational::from_i64(1);
    for p in 1..n {
        f *= BigRational::from_i64(p as i64);
        prod *= f.clone();
    }
    prod
}

fn run(cli: Cli, exec: Execution, threads: Option<usize>) -> CliResult<()> {
    let common = cli.common.clone();
    let out = common.out.as_deref();
    let (name, seed) = match &cli.command {
        Command::Sample(a) => ("sample", Some(a.seed)),
        Command::Schur(a) => ("schur", Some(a.seed)),
        Command::PdfSu(_) => ("pdf-su", None),
        Command::PdfSo3(_) => ("pdf-so3", None),
        Command::PdfSo2(_) => ("pdf-so2", None),
        Command::Hciz(_) => ("hciz", None),
        Command::Lr(_) => ("lr", None),
        Command::Decompose(_) => ("decompose", None),
        Command::Stretch(_) => ("stretch", None),
        Command::Pictograph(_) => ("pictograph", None),
        Command::Walls(_) => ("walls", None),
        Command::Bridge(_) => ("bridge", None),
    };
    let mut run = Run::new(name, seed, threads);
    let body = match cli.command {
        Command::Sample(a) => sample(a, common.json, exec)?,
        Command::Schur(a) => schur(a, common.json, exec)?,
        Command::PdfSu(a) => pdf_su(a, common.json, exec)?,
        Command::PdfSo3(a) => pdf_so3_cmd(a, common.json, exec)?,
        Command::PdfSo2(a) => pdf_so2(a, common.json)?,
        Command::Hciz(a) => hciz_cmd(a, common.json)?,
        Command::Lr(a) => lr(a, common.json)?,
        Command::Decompose(a) => decompose(a, common.json, exec)?,
        Command::Stretch(a) => stretch(a, common.json)?,
        Command::Pictograph(a) => pictograph(a, common.json)?,
        Command::Walls(a) => walls(a, common.json)?,
        Command::Bridge(a) => bridge(a, common.json)?,
    };
    run.emit(out, body.text.as_bytes())?;
    run.finish(out)?;
    body.verdict
}

/// Rendered output plus an optional failure raised after it is written.
struct Body {
    text: String,
    verdict: CliResult<()>,
}

impl Body {
    fn ok(text: String) -> Cmd {
        Ok(Body {
            text,
            verdict: Ok(()),
        })
    }
}

type Cmd = CliResult<Body>;

fn sample(a: SampleArgs, as_json: bool, exec: Execution) -> Cmd {
    check_n(a.n, a.alpha.0.len(), "--alpha")?;
    check_n(a.n, a.beta.0.len(), "--beta")?;
    if a.bins == 0 {
        return usage("--bins must be positive");
    }
    let alpha = spectrum(&a.alpha, false)?;
    let beta = spectrum(&a.beta, false)?;
    let bounds = gamma12_bounds(alpha.values(), beta.values());
    let cfg = SamplerConfig::new(a.group.into(), alpha, beta, a.samples, a.seed)?.with_t(a.t);
    if a.raw {
        let all = sample_horn_all(&cfg, exec)?;
        if as_json {
            return Body::ok(to_json(&all));
        }
        let n = cfg.n();
        let mut s = csv_row((1..=n).map(|k| format!("gamma{k}")));
        for g in &all {
            s.push_str(&csv_row(g.iter().map(|v| v.to_string())));
        }
        return Body::ok(s);
    }
    let h = horn_histogram(&cfg, bounds, (a.bins, a.bins), exec)?;
    if as_json {
        return Body::ok(to_json(&h));
    }
    Body::ok(h.to_csv())
}

fn schur(a: SchurArgs, as_json: bool, exec: Execution) -> Cmd {
    check_n(a.n, a.alpha.0.len(), "--alpha")?;
    if a.samples == 0 {
        return usage("--samples must be positive");
    }
    let alpha = spectrum(&a.alpha, false)?;
    let diags = sample_schur(a.group.into(), &alpha, a.samples, a.seed, exec);
    if as_json {
        return Body::ok(to_json(&diags));
    }
    let mut s = csv_row((1..=alpha.n()).map(|k| format!("x{k}")));
    for d in &diags {
        s.push_str(&csv_row(d.iter().map(|v| v.to_string())));
    }
    Body::ok(s)
}

fn pdf_su(a: PdfSuArgs, as_json: bool, exec: Execution) -> Cmd {
    if let Some(res) = a.grid {
        let grid = density_grid(
            &spectrum(&a.alpha, false)?,
            &spectrum(&a.beta, false)?,
            res,
            exec,
        )?;
        return Body::ok(if as_json {
            to_json(&grid)
        } else {
            grid.to_csv()
        });
    }
    let Some(gamma) = a.gamma else {
        return usage("pdf-su needs --gamma or --grid");
    };
    let exact = a.exact || [&a.alpha, &a.beta, &gamma].iter().any(|l| l.has_fraction());
    if !exact {
        let v = pdf_su_values(&a.alpha.floats(), &a.beta.floats(), &gamma.floats())?;
        return Body::ok(if as_json {
            to_json(&v)
        } else {
            format!("{}\n", v.value)
        });
    }
    let (Some(al), Some(be), Some(ga)) =
        (a.alpha.rationals(), a.beta.rationals(), gamma.rationals())
    else {
        return usage("exact evaluation needs integer, fraction or terminating decimal entries");
    };
    let (da, db) = (vandermonde(&al), vandermonde(&be));
    if da == BigRational::from_i64(0) || db == BigRational::from_i64(0) {
        return Err(HornError::DegenerateSpectrum.into());
    }
    let j = j_exact(&al, &be, &ga)?;
    let sorted = ga.windows(2).all(|w| w[0] >= w[1]);
    let value = if sorted {
        superfactorial(al.len()) * vandermonde(&ga) / (da * db) * j.value.clone()
    } else {
        BigRational::from_i64(0)
    };
    if as_json {
        return Body::ok(to_json(&json!({
            "value": value.to_string(),
            "value_f64": value.as_f64(),
            "j": j.value.to_string(),
            "on_wall": j.on_wall,
        })));
    }
    Body::ok(format!("{value}\n"))
}

fn pdf_so3_cmd(a: PdfSo3Args, as_json: bool, exec: Execution) -> Cmd {
    if let Some(res) = a.singular {
        if res == 0 {
            return usage("--singular must be positive");
        }
        let set = singular_curves(res, exec);
        if as_json {
            return Body::ok(to_json(&set));
        }
        let mut s = csv_row(["kind", "gamma1", "gamma2"]);
        for p in &set.points {
            s.push_str(&csv_row([
                "point".to_string(),
                p.gamma1.to_string(),
                p.gamma2.to_string(),
            ]));
        }
        for &(x, y) in &set.special {
            s.push_str(&csv_row([
                "special".to_string(),
                x.to_string(),
                y.to_string(),
            ]));
        }
        return Body::ok(s);
    }
    if let Some(res) = a.grid {
        if res == 0 || res > 2000 {
            return usage("--grid must be in 1..=2000");
        }
        let grid = so3_density_grid(res, exec);
        if as_json {
            return Body::ok(to_json(&grid));
        }
        let mut s = csv_row(["gamma1", "gamma2", "pdf", "flag"]);
        for i in 0..res {
            for j in 0..res {
                let (x, y) = grid.center(i, j);
                let v = grid.value(i, j);
                let flag = if v.is_infinite() {
                    "singular"
                } else if v == 0.0 {
                    "zero"
                } else {
                    "regular"
                };
                s.push_str(&csv_row([
                    x.to_string(),
                    y.to_string(),
                    v.to_string(),
                    flag.to_string(),
                ]));
            }
        }
        return Body::ok(s);
    }
    let (Some(g1), Some(g2)) = (a.gamma1, a.gamma2) else {
        return usage("pdf-so3 needs --gamma1/--gamma2, --grid or --singular");
    };
    let v = pdf_so3(g1, g2);
    Body::ok(if as_json {
        to_json(&v)
    } else {
        format!("{}\n", v.value)
    })
}

fn pdf_so2(a: PdfSo2Args, as_json: bool) -> Cmd {
    let value = match a.mode {
        So2Mode::Horn => {
            let Some(b) = a.beta else {
                return usage("--mode horn needs --beta");
            };
            so2_horn_pdf(a.alpha, b, a.at)
        }
        So2Mode::Schur => so2_schur_pdf(a.alpha, a.at),
    };
    Body::ok(if as_json {
        to_json(&json!({ "value": value }))
    } else {
        format!("{value}\n")
    })
}

fn hciz_cmd(a: HcizArgs, as_json: bool) -> Cmd {
    let h = hciz(&OrbitalArgs::new(a.alpha.floats(), a.x.floats())?);
    Body::ok(if as_json {
        to_json(&json!({ "re": h.re, "im": h.im }))
    } else {
        format!("{},{}\n", h.re, h.im)
    })
}

fn lr(a: TripleArgs, as_json: bool) -> Cmd {
    check_rank(a.n, &[&a.lambda, &a.mu, &a.nu])?;
    let c = lr_coefficient(&a.lambda, &a.mu, &a.nu);
    Body::ok(if as_json {
        to_json(&json!({
            "lambda": a.lambda, "mu": a.mu, "nu": a.nu, "multiplicity": c,
        }))
    } else {
        format!("{c}\n")
    })
}

fn decompose(a: PairArgs, as_json: bool, exec: Execution) -> Cmd {
    check_rank(a.n, &[&a.lambda, &a.mu])?;
    let d = tensor_decomposition(&a.lambda, &a.mu, exec);
    let total: u64 = d.values().sum();
    if as_json {
        let map: serde_json::Map<String, serde_json::Value> =
            d.iter().map(|(w, c)| (labels(w), json!(c))).collect();
        return Body::ok(to_json(&json!({
            "lambda": a.lambda,
            "mu": a.mu,
            "total": total,
            "distinct": d.len(),
            "constituents": map,
        })));
    }
    let mut s = csv_row(["nu", "multiplicity"]);
    for (w, c) in &d {
        s.push_str(&csv_row([labels(w), c.to_string()]));
    }
    Body::ok(s)
}

fn stretch(a: StretchArgs, as_json: bool) -> Cmd {
    let t = &a.triple;
    check_rank(t.n, &[&t.lambda, &t.mu, &t.nu])?;
    let Some(d) = polytope_dimension(&t.lambda, &t.mu, &t.nu) else {
        return Err(HornError::InvalidArgument("the hive polytope is empty".into()).into());
    };
    let s_max = a.s_max.unwrap_or(2 * d as u32 + 2);
    let qp = stretch_quasipolynomial(&t.lambda, &t.mu, &t.nu, s_max)?;
    let coeffs: Vec<Vec<String>> = qp
        .coefficients
        .iter()
        .map(|c| c.iter().map(|x| x.to_string()).collect())
        .collect();
    let leading = qp.leading().map(|x| x.to_string());
    if as_json {
        return Body::ok(to_json(&json!({
            "degree": qp.degree,
            "period": qp.period,
            "coefficients": coeffs,
            "leading": leading,
            "counts": qp.counts,
        })));
    }
    let mut s = format!("degree {}\nperiod {}\n", qp.degree, qp.period);
    for (r, c) in coeffs.iter().enumerate() {
        s.push_str(&format!("residue {r}: {}\n", c.join(" ")));
    }
    s.push_str(&csv_row(["s", "count"]));
    for (k, c) in &qp.counts {
        s.push_str(&csv_row([k.to_string(), c.to_string()]));
    }
    Body::ok(s)
}

fn pictograph(a: PictographArgs, as_json: bool) -> Cmd {
    let t = &a.triple;
    check_rank(t.n, &[&t.lambda, &t.mu, &t.nu])?;
    let kind: PictographKind = match a.kind.parse() {
        Ok(k) => k,
        Err(e) => return usage(format!("{e}")),
    };
    let all = enumerate_pictographs(&t.lambda, &t.mu, &t.nu, kind);
    if as_json {
        return Body::ok(to_json(&all));
    }
    let mut s = format!("{} {} pictograph(s)\n", all.len(), kind.name());
    for p in &all {
        s.push('\n');
        s.push_str(&p.render());
        if !s.ends_with('\n') {
            s.push('\n');
        }
    }
    Body::ok(s)
}

fn walls(a: WallsArgs, as_json: bool) -> Cmd {
    let (alpha, beta) = (spectrum(&a.alpha, false)?, spectrum(&a.beta, false)?);
    let max_card = a.max_card.unwrap_or(alpha.n().saturating_sub(1).max(1));
    let ws = singular_hyperplanes(&alpha, &beta, max_card)?;
    if as_json {
        return Body::ok(to_json(&ws));
    }
    let set = |v: &[usize]| {
        v.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = csv_row(["I", "J", "K", "constant"]);
    for w in &ws {
        s.push_str(&csv_row([
            set(&w.i),
            set(&w.j),
            set(&w.k),
            w.constant.to_string(),
        ]));
    }
    Body::ok(s)
}

fn bridge(a: TripleArgs, as_json: bool) -> Cmd {
    check_rank(a.n, &[&a.lambda, &a.mu, &a.nu])?;
    let outcomes = verify_bridge(&a.lambda, &a.mu, &a.nu)?;
    let failed: Vec<String> = outcomes
        .iter()
        .filter_map(|o| match o {
            BridgeOutcome::Checked(c) if !c.holds => Some(c.name.clone()),
            _ => None,
        })
        .collect();
    let text = if as_json {
        to_json(&outcomes)
    } else {
        let mut s = String::new();
        for o in &outcomes {
            match o {
                BridgeOutcome::Checked(c) => s.push_str(&format!(
                    "{}: {} ({} = {})\n",
                    c.name,
                    if c.holds { "holds" } else { "FAILS" },
                    c.lhs,
                    c.rhs
                )),
                BridgeOutcome::Skipped { name, reason } => {
                    s.push_str(&format!("{name}: skipped ({reason})\n"))
                }
            }
        }
        s
    };
    let verdict = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "identities fail: {}",
            failed.join(", ")
        )))
    };
    Ok(Body { text, verdict })
}

fn threads_setting(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return match flag {
            Some(0) => usage("--threads must be positive"),
            k => Ok(k),
        };
    }
    match std::env::var("HORN_THREADS") {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => usage(format!("HORN_THREADS={v:?} is not a positive integer")),
        },
        _ => Ok(None),
    }
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("{}", e.record());
    ExitCode::from(e.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    let threads = match threads_setting(cli.common.threads) {
        Ok(t) => t,
        Err(e) => return report(&e),
    };
    let exec = if cli.common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match horn_core::exec::with_threads(threads, || run(cli, exec, threads)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
