//! `lcmpsi`: command-line driver.
//!
//! Every subcommand prints CSV (a header line, then rows) or, with `--json`,
//! a JSON object carrying `schema_version`. Floats are printed to 9
//! significant digits.
//!
//! Exit codes: 0 success, 1 a suite criterion failed, 2 invalid arguments,
//! 3 a resource cap was exceeded.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use lcmpsi::extremal::{build_prime_tail_set, build_smooth_set, extremal_bounds};
use lcmpsi::moments::{DEFAULT_UNIFORM_PAIR_CAP, DEFAULT_VARIANCE_CAP};
use lcmpsi::poly::B_CONSTANT_X2P1;
use lcmpsi::set::DEFAULT_LCM_DIGIT_CAP;
use lcmpsi::sieve::DEFAULT_LIMIT_CAP;
use lcmpsi::suite::{Scale, Suite};
use lcmpsi::*;

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "lcmpsi", version, about = "psi(A) = log lcm(A): exact moments, sampling and extremal sets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Prime table limit (default: the largest n the command needs)
    #[arg(long, global = true)]
    limit: Option<u64>,
    /// Base seed for sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of CSV
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for sampling (0 = auto; output does not depend on it)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Largest prime table that may be built
    #[arg(long, global = true, default_value_t = DEFAULT_LIMIT_CAP)]
    limit_cap: u64,
    /// Largest n for pairwise second-moment sums
    #[arg(long, global = true)]
    pairwise_cap: Option<u64>,
    /// Largest exact lcm, in decimal digits
    #[arg(long, global = true, default_value_t = DEFAULT_LCM_DIGIT_CAP)]
    lcm_digit_cap: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build the prime table up to --limit.
    ///
    /// CSV with --stats: limit,pi,psi. Otherwise one prime per line.
    Sieve {
        #[arg(long)]
        stats: bool,
    },
    /// psi of a set read from a file ('-' for stdin; '#' starts a comment).
    ///
    /// CSV: n,size,psi (plus lcm with --exact-lcm).
    Psi {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        input: PathBuf,
        /// Also print lcm(A) in full
        #[arg(long)]
        exact_lcm: bool,
    },
    /// Exact E psi(A) under independent inclusion.
    ///
    /// CSV: n,delta_or_k,expectation,second_moment,variance,method.
    Expect {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = SumMethod::Direct)]
        method: SumMethod,
    },
    /// Exact variance under independent inclusion.
    ///
    /// CSV: n,delta_or_k,expectation,second_moment,variance,method.
    Variance {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: f64,
    },
    /// Exact mean (and second moment) over uniform k-subsets.
    ///
    /// CSV: n,delta_or_k,expectation,second_moment,variance,method.
    Meank {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        second_moment: bool,
    },
    /// Monte Carlo summary of psi.
    ///
    /// CSV: model,n,param,trials,seed,mean_psi,var_psi,mean_size,q05,q50,q95,degenerate.
    Sample {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Write each trial's psi, one per line
        #[arg(long)]
        dump_psis: Option<PathBuf>,
    },
    /// Brute-force moments or extremes by enumeration (small n only).
    ///
    /// CSV: as `expect`/`meank`, or with --extremal: n,k,min_psi,argmin,max_psi,argmax.
    Oracle {
        #[arg(long)]
        n: u64,
        #[arg(long, conflicts_with = "k")]
        delta: Option<f64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, requires = "k")]
        extremal: bool,
    },
    /// Build a prime-tail or smooth set.
    ///
    /// CSV: n,k,kind,size,psi,y,t_effective[,max_lower_bound,min_upper_bound].
    Extremal {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, value_enum)]
        kind: SetKind,
        #[arg(long, requires_all = ["theta", "c"])]
        report_bounds: bool,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        /// Write the set, one element per line
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// psi of the values of an integer polynomial in [1, n].
    ///
    /// CSV: n,set_size,psi,predictor_name,predicted.
    Poly {
        /// Coefficients a0,a1,...,ad
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        n: u64,
        /// Add rows for the main-term predictors matching the polynomial
        #[arg(long)]
        predict: bool,
        /// Apply one predictor regardless of the polynomial's class
        #[arg(long, value_enum)]
        predictor: Option<Predictor>,
        /// Constant for the irreducible quadratic predictor
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Estimate the x^2+1 constant from primes up to P and use it
        #[arg(long = "estimate-B", value_name = "P")]
        estimate_b: Option<u64>,
    },
    /// Main terms for |A| = c n^theta.
    ///
    /// CSV: n,theta,c,delta,k,predict_mean,bernoulli_main_term.
    Predict {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        c: f64,
    },
    /// Run the acceptance grid.
    ///
    /// CSV: id,name,status,elapsed_s,detail.
    Suite {
        #[arg(long, value_enum, default_value_t = ScaleArg::Quick)]
        scale: ScaleArg,
        /// Run only these criteria
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SumMethod {
    Direct,
    Grouped,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Bernoulli,
    UniformK,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetKind {
    Smooth,
    Primes,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Predictor {
    Linear,
    Quadratic,
    X2m1,
    Conjecture,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Quick,
    Full,
}

enum Failure {
    Usage(String),
    Cap(String),
    Suite,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit { .. } | Error::OutOfTable { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn io_err(path: &std::path::Path, e: io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

/// Ordered rows of named cells.
struct Output {
    rows: Vec<Map<String, Value>>,
}

impl Output {
    fn new() -> Self {
        Output { rows: Vec::new() }
    }

    fn row(&mut self, cells: Value) {
        match cells {
            Value::Object(m) => self.rows.push(m),
            _ => unreachable!("rows are objects"),
        }
    }

    fn render(&self, as_json: bool) -> String {
        if as_json {
            let body = match self.rows.as_slice() {
                [one] => {
                    let mut obj = Map::new();
                    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
                    obj.extend(one.iter().map(|(k, v)| (k.clone(), round_value(v))));
                    Value::Object(obj)
                }
                rows => json!({
                    "schema_version": SCHEMA_VERSION,
                    "rows": rows.iter().map(|r| Value::Object(r.iter().map(|(k, v)| (k.clone(), round_value(v))).collect())).collect::<Vec<_>>(),
                }),
            };
            return body.to_string() + "\n";
        }
        let Some(first) = self.rows.first() else {
            return String::new();
        };
        let header: Vec<&str> = first.keys().map(String::as_str).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(&header);
        for row in &self.rows {
            let _ = w.write_record(header.iter().map(|k| csv_cell(row.get(*k).unwrap_or(&Value::Null))));
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

/// `x` to 9 significant digits, trailing zeros dropped.
fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}").to_lowercase();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{x:.8e}");
    }
    let s = format!("{:.*}", (8 - exp).max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn round_value(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            sig9(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.iter().map(round_value).collect()),
        other => other.clone(),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => sig9(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Array(a) => a.iter().map(csv_cell).collect::<Vec<_>>().join(" "),
        Value::Object(_) => v.to_string(),
    }
}

fn float_or_null(x: Option<f64>) -> Value {
    x.filter(|v| v.is_finite()).map_or(Value::Null, |v| json!(v))
}

fn moment_row(r: &MomentReport) -> Outcome<Value> {
    if r.clamped {
        eprintln!("warning: variance rounded below zero was clamped to 0");
    }
    serde_json::to_value(r).map_err(|e| Failure::Usage(e.to_string()))
}

struct Ctx<'a> {
    g: &'a Global,
}

impl Ctx<'_> {
    /// Prime table covering `need`, or exactly `--limit` when given.
    fn table(&self, need: u64) -> Outcome<PrimeTableF64> {
        let limit = self.g.limit.unwrap_or(need).max(2);
        let config = SieveConfig { limit_cap: self.g.limit_cap, ..SieveConfig::default() };
        Ok(PrimeTable::build_with(limit, &config)?)
    }

    fn pairwise_cap(&self, default: u64) -> u64 {
        self.g.pairwise_cap.unwrap_or(default)
    }
}

fn read_input(path: &PathBuf) -> Outcome<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| io_err(path, e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| io_err(path, e))
    }
}

fn isqrt_ceil(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

fn run(cli: &Cli) -> Outcome<Output> {
    let ctx = Ctx { g: &cli.global };
    let mut out = Output::new();
    match &cli.command {
        Command::Sieve { stats } => {
            let limit = cli.global.limit.ok_or_else(|| Failure::Usage("sieve needs --limit".into()))?;
            let t = ctx.table(limit)?;
            if *stats {
                out.row(json!({
                    "limit": limit,
                    "pi": t.prime_count(limit)?,
                    "psi": t.chebyshev_psi(limit)?,
                }));
            } else if cli.global.json {
                out.row(json!({ "limit": limit, "primes": t.primes() }));
            } else {
                let mut s = String::new();
                for p in t.primes() {
                    let _ = writeln!(s, "{p}");
                }
                print!("{s}");
                return Ok(Output::new());
            }
        }
        Command::Psi { n, input, exact_lcm } => {
            let set = IntegerSet::parse(*n, &read_input(input)?)?;
            let t = ctx.table(*n)?;
            let mut row = json!({ "n": n, "size": set.len(), "psi": psi_of_set(&set, &t)? });
            if *exact_lcm {
                row["lcm"] = json!(lcm_exact(&set, cli.global.lcm_digit_cap)?.to_string());
            }
            out.row(row);
        }
        Command::Expect { n, delta, method } => {
            let t = ctx.table(*n)?;
            let m = match method {
                SumMethod::Direct => Method::Direct,
                SumMethod::Grouped => Method::Grouped,
            };
            out.row(moment_row(&MomentReport::bernoulli_expectation(*n, *delta, &t, m)?)?);
        }
        Command::Variance { n, delta } => {
            let t = ctx.table(*n)?;
            let cap = ctx.pairwise_cap(DEFAULT_VARIANCE_CAP);
            out.row(moment_row(&MomentReport::bernoulli_variance(*n, *delta, &t, cap)?)?);
        }
        Command::Meank { n, k, second_moment } => {
            let t = ctx.table(*n)?;
            let cap = ctx.pairwise_cap(DEFAULT_UNIFORM_PAIR_CAP);
            out.row(moment_row(&MomentReport::uniform(*n, *k, &t, *second_moment, cap)?)?);
        }
        Command::Sample { model, n, delta, k, trials, dump_psis } => {
            let (m, param) = match (model, delta, k) {
                (ModelKind::Bernoulli, Some(d), None) => (Model::Bernoulli(BernoulliModel::new(*n, *d)?), json!(d)),
                (ModelKind::UniformK, None, Some(k)) => (Model::UniformK(UniformKModel::new(*n, *k)?), json!(k)),
                (ModelKind::Bernoulli, _, _) => {
                    return Err(Failure::Usage("--model bernoulli takes --delta only".into()))
                }
                (ModelKind::UniformK, _, _) => return Err(Failure::Usage("--model uniform-k takes --k only".into())),
            };
            let t = ctx.table(*n)?;
            let run = montecarlo_psi(&m, *trials, cli.global.seed, &t, cli.global.threads)?;
            if let Some(path) = dump_psis {
                let body: String = run.psis.iter().map(|p| sig9(*p) + "\n").collect();
                fs::write(path, body).map_err(|e| io_err(path, e))?;
            }
            let s = &run.stats;
            let mut row = json!({
                "model": match model { ModelKind::Bernoulli => "bernoulli", ModelKind::UniformK => "uniform-k" },
                "n": n,
                "param": param,
                "trials": s.trials,
                "seed": cli.global.seed,
                "mean_psi": s.mean_psi,
                "var_psi": s.var_psi,
                "mean_size": s.mean_size,
            });
            for (level, q) in &s.quantiles {
                row[format!("q{:02}", (level * 100.0).round() as u32)] = json!(q);
            }
            row["degenerate"] = json!(s.degenerate);
            if s.degenerate {
                eprintln!("warning: a single trial leaves the variance undefined; reported as 0");
            }
            out.row(row);
        }
        Command::Oracle { n, delta, k, extremal } => match (delta, k) {
            (_, Some(k)) if *extremal => {
                let ex = extremal_psi_exhaustive(*n, *k)?;
                out.row(json!({
                    "n": n,
                    "k": k,
                    "min_psi": ex.min_psi,
                    "argmin": ex.argmin,
                    "max_psi": ex.max_psi,
                    "argmax": ex.argmax,
                }));
            }
            (Some(d), None) => {
                let (e, v) = enumerate_bernoulli_moments(*n, *d)?;
                out.row(moment_row(&MomentReport::oracle(*n, ModelParam::Delta(*d), e, v + e * e))?);
            }
            (None, Some(k)) => {
                let (m1, m2) = enumerate_uniform_k_moments(*n, *k)?;
                out.row(moment_row(&MomentReport::oracle(*n, ModelParam::K(*k), m1, m2))?);
            }
            _ => return Err(Failure::Usage("oracle needs --delta or --k".into())),
        },
        Command::Extremal { n, k, kind, report_bounds, theta, c, output } => {
            let t = ctx.table(*n)?;
            let (set, y, t_eff, name) = match kind {
                SetKind::Primes => (build_prime_tail_set(*n, *k, &t)?, None, None, "primes"),
                SetKind::Smooth => {
                    let (set, info) = build_smooth_set(*n, *k, &t)?;
                    (set, Some(info.y), info.t_effective, "smooth")
                }
            };
            if let Some(path) = output {
                let body: String = set.iter().map(|a| format!("{a}\n")).collect();
                fs::write(path, body).map_err(|e| io_err(path, e))?;
            }
            let mut row = json!({
                "n": n,
                "k": k,
                "kind": name,
                "size": set.len(),
                "psi": psi_of_set(&set, &t)?,
                "y": y,
                "t_effective": float_or_null(t_eff),
            });
            if *report_bounds {
                let b = extremal_bounds(*n, theta.unwrap_or_default(), c.unwrap_or_default())?;
                row["max_lower_bound"] = json!(b.max_lower_bound);
                row["min_upper_bound"] = json!(b.min_upper_bound);
            }
            out.row(row);
        }
        Command::Poly { coeffs, n, predict, predictor, b, estimate_b } => {
            let f = IntPolynomial::parse(coeffs)?;
            let need = isqrt_ceil(*n).max(estimate_b.unwrap_or(0)).max(f.leading() as u64);
            let t = ctx.table(need)?;
            let set = poly_set(&f, *n);
            let psi = psi_poly(&f, *n, &t)?;
            let is_x2p1 = f.coeffs() == [1, 0, 1];
            let is_x2m1 = f.coeffs() == [-1, 0, 1];

            let mut b_value = b.unwrap_or(if is_x2p1 { B_CONSTANT_X2P1 } else { 0.0 });
            let mut b_row = None;
            if let Some(p) = estimate_b {
                let est = estimate_b_constant(*p, &t)?;
                eprintln!("B estimate at P={p}: {} (last block {})", sig9(est.value), sig9(est.last_block_increment));
                if b.is_none() {
                    b_value = est.value;
                }
                b_row = Some(est.value);
            }

            let chosen: Vec<Predictor> = match predictor {
                Some(p) => vec![*p],
                None if *predict => match f.class() {
                    PolyClass::Linear => vec![Predictor::Linear],
                    PolyClass::QuadraticIrreducible => vec![Predictor::Quadratic, Predictor::Conjecture],
                    PolyClass::QuadraticReducible if is_x2m1 => vec![Predictor::X2m1],
                    PolyClass::QuadraticReducible => vec![],
                    PolyClass::Higher => vec![Predictor::Conjecture],
                },
                None => vec![],
            };
            let matches = |p: Predictor| match p {
                Predictor::Linear => f.class() == PolyClass::Linear,
                Predictor::Quadratic => f.class() == PolyClass::QuadraticIrreducible,
                Predictor::X2m1 => is_x2m1,
                Predictor::Conjecture => f.class() == PolyClass::QuadraticIrreducible || f.class() == PolyClass::Higher,
            };
            let base = |name: Value, predicted: Value| json!({ "n": n, "set_size": set.len(), "psi": psi, "predictor_name": name, "predicted": predicted });
            if chosen.is_empty() && b_row.is_none() {
                out.row(base(Value::Null, Value::Null));
            }
            for p in chosen {
                if !matches(p) {
                    eprintln!("warning: predictor does not match the class of {f}");
                }
                let (name, value) = match p {
                    Predictor::Linear => ("linear", predict_linear(&f, *n, &t)?),
                    Predictor::Quadratic => ("quadratic-irreducible", predict_quadratic_irreducible(&f, *n, b_value)?),
                    Predictor::X2m1 => ("reducible-x2m1", predict_reducible_x2m1::<f64>(*n)),
                    Predictor::Conjecture => ("conjecture", predict_conjecture(&f, *n)?),
                };
                out.row(base(json!(name), json!(value)));
            }
            if let Some(v) = b_row {
                out.row(base(json!(format!("B-estimate(P={})", estimate_b.unwrap_or(0))), json!(v)));
            }
        }
        Command::Predict { n, theta, c } => {
            let r = RegimeParamsF64::new(*n, *theta, *c)?;
            out.row(json!({
                "n": n,
                "theta": theta,
                "c": c,
                "delta": r.delta(),
                "k": r.k(),
                "predict_mean": predict_mean(&r),
                "bernoulli_main_term": bernoulli_main_term(*n, r.delta())?,
            }));
        }
        Command::Suite { scale, only } => {
            let scale = match scale {
                ScaleArg::Quick => Scale::Quick,
                ScaleArg::Full => Scale::Full,
            };
            let suite = Suite::new(scale, cli.global.seed).with_threads(cli.global.threads);
            let ids: Vec<u8> =
                if only.is_empty() { suite::CRITERIA.iter().map(|c| c.0).collect() } else { only.clone() };
            let mut all_ok = true;
            for id in ids {
                let o = suite.run(id).ok_or_else(|| Failure::Usage(format!("no criterion {id} (1-12)")))?;
                eprintln!("{o}");
                all_ok &= o.ok();
                out.row(json!({
                    "id": o.id,
                    "name": o.name,
                    "status": o.status.as_str(),
                    "elapsed_s": o.elapsed.as_secs_f64(),
                    "detail": o.detail,
                }));
            }
            if !all_ok {
                print!("{}", out.render(cli.global.json));
                return Err(Failure::Suite);
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.render(cli.global.json));
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Suite) => ExitCode::from(1),
    }
}
