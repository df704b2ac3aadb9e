mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qspec::bounds::{jackson_upper, limit_probe, minimax_lower_curve, random_unit_ball_series, truncation_error, SobolevParams};
use qspec::dla::{dla_report, DEFAULT_TOL as DLA_TOL};
use qspec::experiments::{spectrum_matching_experiment, variance_sweep, TrainConfig, PUBLISHED_SAMPLES};
use qspec::linalg::pauli;
use qspec::report::{cell, Table};
use qspec::rng::derive_seed;
use qspec::selftest::{self, TrainProfile, DEFAULT_SEED};
use qspec::spectrum::{envelope, gap_set, normalize_gaps, DEFAULT_COMMENSURATE_TOL, DEFAULT_GAP_TOL, MAX_SCAN_DIM};

use output::{Format, Manifest, Output};

#[derive(Parser)]
#[command(name = "qspec", version, about = "Fourier spectra, approximation bounds and Lie-algebraic diagnostics of parameterized quantum circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Base seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Gap sets, integer normalization, frequency envelope and radii.
    Spectrum(SpectrumArgs),
    /// Approximation-error curves on the Sobolev ball.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Lie closure, center, derived algebra and eta of Pauli generators.
    Dla(DlaArgs),
    /// Spectrum-matching training experiment.
    Train(TrainArgs),
    /// Gradient variance against the non-identity weight.
    Variance(VarianceArgs),
    /// Runs the acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Eigenvalues per parameter: comma-separated, parameters separated by ';'.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_eig_lists)]
    eigs: EigLists,
    /// Tolerance for merging equal gaps.
    #[arg(long, default_value_t = DEFAULT_GAP_TOL)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Annulus-witness truncation error and its fitted rate.
    Lower {
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        /// Radii, comma-separated.
        #[arg(long = "K", value_parser = parse_f64_list, default_value = "4,8,16,32,64")]
        k: F64List,
        #[command(flatten)]
        common: Common,
    },
    /// Truncation error of random unit-ball series against the upper bound.
    Upper {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long = "K", value_parser = parse_f64_list, default_value = "1,2,3,4,5,6,7,8")]
        k: F64List,
        /// Number of random series.
        #[arg(long, default_value_t = 20)]
        series: usize,
        /// Modes are drawn from [-box, box]^d.
        #[arg(long = "box", default_value_t = 10)]
        box_radius: i64,
        /// Nonzero modes per series.
        #[arg(long, default_value_t = 40)]
        terms: usize,
        #[command(flatten)]
        common: Common,
    },
    /// d^-(r - d/2) over a grid of (r, d).
    Limit {
        #[arg(long, value_parser = parse_f64_list, default_value = "2")]
        r: F64List,
        #[arg(long, value_parser = parse_usize_list, default_value = "1,2,3")]
        d: UsizeList,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct DlaArgs {
    /// Pauli-string generators, comma-separated (e.g. ZI,IZ).
    #[arg(long, value_delimiter = ',', required = true)]
    paulis: Vec<String>,
    #[arg(long, default_value_t = DLA_TOL)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TrainArgs {
    /// Configuration file: key = value lines or one JSON object.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reduced profile (200 samples, 100 epochs, 6 seeds).
    #[arg(long, conflicts_with = "config")]
    fast: bool,
    /// Reuse the target's per-layer bases for the models.
    #[arg(long)]
    share_generator_basis: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VarianceArgs {
    /// Weights of the non-identity component, comma-separated.
    #[arg(long, value_parser = parse_f64_list, default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
    weights: F64List,
    #[arg(long, default_value_t = PUBLISHED_SAMPLES)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run the training check at the reduced profile.
    #[arg(long)]
    fast: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Debug)]
struct F64List(Vec<f64>);
#[derive(Clone, Debug)]
struct UsizeList(Vec<usize>);
#[derive(Clone, Debug)]
struct EigLists(Vec<Vec<f64>>);

fn split_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    let items: Vec<&str> = s.split(',').map(str::trim).collect();
    if items.iter().any(|t| t.is_empty()) {
        return Err(format!("empty entry in list '{s}'"));
    }
    items
        .iter()
        .map(|t| t.parse::<T>().map_err(|_| format!("'{t}' is not a valid number")))
        .collect()
}

fn parse_f64_list(s: &str) -> Result<F64List, String> {
    let v: Vec<f64> = split_list(s)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(F64List(v))
}

fn parse_usize_list(s: &str) -> Result<UsizeList, String> {
    split_list(s).map(UsizeList)
}

fn parse_eig_lists(s: &str) -> Result<EigLists, String> {
    s.split(';')
        .map(|p| parse_f64_list(p).map(|l| l.0))
        .collect::<Result<_, _>>()
        .map(EigLists)
}

enum Failure {
    Usage(String),
    Compute(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<qspec::Error> for Failure {
    fn from(e: qspec::Error) -> Self {
        Failure::Compute(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("QSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("QSPEC_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

struct Prepared {
    name: String,
    config: Value,
    seeds: Vec<u64>,
    common: Common,
    exit_on_fail: bool,
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    init_threads()?;
    let start = Instant::now();
    let (prep, out) = match cli.command {
        Command::Spectrum(a) => spectrum(a)?,
        Command::Bounds(b) => bounds(b)?,
        Command::Dla(a) => dla(a)?,
        Command::Train(a) => train(a)?,
        Command::Variance(a) => variance(a)?,
        Command::Selftest(a) => selftest_cmd(a)?,
    };
    let manifest = Manifest {
        tool: "qspec",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: prep.name,
        config: prep.config,
        seeds: prep.seeds,
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    let text = output::render(&manifest, &out, prep.common.format)?;
    output::write(&text, prep.common.out.as_deref())?;
    let failed = prep.exit_on_fail && out.result["all_passed"] == Value::Bool(false);
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn prepared(name: &str, config: Value, seeds: Vec<u64>, common: Common) -> Prepared {
    Prepared {
        name: name.to_string(),
        config,
        seeds,
        common,
        exit_on_fail: false,
    }
}

fn spectrum(a: SpectrumArgs) -> Result<(Prepared, Output), Failure> {
    let mut table = Table::new(["key", "metric", "value"]);
    let mut params = Vec::new();
    let mut normalized = Vec::new();
    for (j, eigs) in a.eigs.0.iter().enumerate() {
        let g = gap_set(eigs, a.tol);
        let key = format!("param{j}");
        for &x in &g.gaps {
            table.push_kv(&key, "gap", x);
        }
        table.push_kv(&key, "omega_max", g.omega_max);
        let norm = normalize_gaps(&g, DEFAULT_COMMENSURATE_TOL);
        let norm_json = match &norm {
            Ok(n) => {
                table.push_kv(&key, "gamma", n.gamma);
                for &i in &n.int_gaps {
                    table.push(vec![key.clone(), "int_gap".into(), i.to_string()]);
                }
                json!({ "commensurate": true, "gamma": n.gamma, "int_gaps": n.int_gaps })
            }
            Err(e) => json!({ "commensurate": false, "reason": e.to_string() }),
        };
        params.push(json!({ "eigenvalues": eigs, "gaps": g.gaps, "omega_max": g.omega_max, "normalized": norm_json }));
        normalized.push(norm.ok());
    }
    let env_json = match normalized.into_iter().collect::<Option<Vec<_>>>() {
        Some(sets) => {
            let e = envelope(sets);
            for (m, v) in [
                ("k_l2", e.k_l2),
                ("k_l1", e.k_l1),
                ("k_cov", e.k_cov),
                ("radius_bound", e.radius_bound()),
            ] {
                table.push_kv("envelope", m, v);
            }
            let scan = (e.d <= MAX_SCAN_DIM)
                .then(|| qspec::spectrum::coverage_radius_scan(&e.per_param))
                .transpose()?;
            json!({ "d": e.d, "k_l2": e.k_l2, "k_l1": e.k_l1, "k_cov": e.k_cov, "k_cov_scan": scan, "radius_bound": e.radius_bound() })
        }
        None => Value::Null,
    };
    // single-parameter output keeps the gap set at the top level
    let mut result = json!({ "parameters": params, "envelope": env_json });
    if params_len(&result) == 1 {
        let p = result["parameters"][0].clone();
        result["gaps"] = p["gaps"].clone();
        result["omega_max"] = p["omega_max"].clone();
    }
    let config = json!({ "eigs": a.eigs.0, "tol": a.tol });
    Ok((prepared("spectrum", config, seeds_of(&a.common), a.common), Output { result, table }))
}

fn params_len(v: &Value) -> usize {
    v["parameters"].as_array().map_or(0, Vec::len)
}

fn seeds_of(c: &Common) -> Vec<u64> {
    c.seed.into_iter().collect()
}

fn bounds(cmd: BoundsCommand) -> Result<(Prepared, Output), Failure> {
    match cmd {
        BoundsCommand::Lower { d, r, k, common } => {
            let p = sobolev(d, r)?;
            let c = minimax_lower_curve(&p, &k.0)?;
            let mut table = Table::new(["K", "error", "annulus_size", "fitted_slope", "claimed_exponent"]);
            for ((&kk, &e), &n) in c.k.iter().zip(&c.errors).zip(&c.annulus_sizes) {
                table.push(vec![cell(kk), cell(e), n.to_string(), cell(c.fitted_slope), cell(c.claimed_exponent)]);
            }
            let result = serde_json::to_value(&c).context("serializing curve")?;
            let config = json!({ "d": d, "r": r, "K": k.0 });
            Ok((prepared("bounds lower", config, seeds_of(&common), common), Output { result, table }))
        }
        BoundsCommand::Upper {
            d,
            r,
            k,
            series,
            box_radius,
            terms,
            common,
        } => {
            if series == 0 || terms == 0 || box_radius < 1 {
                return Err(Failure::Usage("--series, --terms and --box must be positive".into()));
            }
            let p = sobolev(d, r)?;
            let seed = common.seed.unwrap_or(DEFAULT_SEED);
            let hs: Vec<_> = (0..series as u64)
                .map(|i| random_unit_ball_series(&p, box_radius, terms, derive_seed(seed, "unit-ball", i)))
                .collect();
            let mut table = Table::new(["K", "max_error", "rigorous_bound", "power_form", "violations"]);
            let mut rows = Vec::new();
            let mut non_monotone = 0usize;
            let mut prev = vec![f64::INFINITY; hs.len()];
            for &kk in &k.0 {
                let errs: Vec<f64> = hs.iter().map(|h| truncation_error(h, kk)).collect();
                let bound = jackson_upper(&hs[0], &p, kk);
                let violations = hs
                    .iter()
                    .zip(&errs)
                    .filter(|(h, &e)| e > jackson_upper(h, &p, kk).rigorous)
                    .count();
                non_monotone += errs.iter().zip(&prev).filter(|(e, pv)| e > pv).count();
                prev = errs.clone();
                let max = errs.iter().copied().fold(0.0, f64::max);
                table.push(vec![cell(kk), cell(max), cell(bound.rigorous), cell(bound.power_form), violations.to_string()]);
                rows.push(json!({ "K": kk, "max_error": max, "rigorous_bound": bound.rigorous, "power_form": bound.power_form, "violations": violations }));
            }
            let result = json!({ "series": series, "points": rows, "non_monotone_steps": non_monotone });
            let config = json!({ "d": d, "r": r, "K": k.0, "series": series, "box": box_radius, "terms": terms });
            Ok((prepared("bounds upper", config, vec![seed], common), Output { result, table }))
        }
        BoundsCommand::Limit { r, d, common } => {
            let pairs: Vec<(f64, usize)> = r.0.iter().flat_map(|&rr| d.0.iter().map(move |&dd| (rr, dd))).collect();
            for &(rr, dd) in &pairs {
                sobolev(dd, rr)?;
            }
            let values = limit_probe(&pairs)?;
            let mut table = Table::new(["r", "d", "value"]);
            let mut rows = Vec::new();
            for (&(rr, dd), &v) in pairs.iter().zip(&values) {
                table.push(vec![cell(rr), dd.to_string(), cell(v)]);
                rows.push(json!({ "r": rr, "d": dd, "value": v }));
            }
            let config = json!({ "r": r.0, "d": d.0 });
            Ok((prepared("bounds limit", config, seeds_of(&common), common), Output { result: json!({ "points": rows }), table }))
        }
    }
}

fn sobolev(d: usize, r: f64) -> Result<SobolevParams<f64>, Failure> {
    SobolevParams::new(d, r).map_err(|e| Failure::Usage(format!("--d/--r: {e}")))
}

fn dla(a: DlaArgs) -> Result<(Prepared, Output), Failure> {
    let gens = a
        .paulis
        .iter()
        .map(|l| pauli::string::<f64>(l.trim()))
        .collect::<qspec::Result<Vec<_>>>()
        .map_err(|e| Failure::Usage(format!("--paulis: {e}")))?;
    let n = gens[0].dim();
    let rep = dla_report(&gens, a.tol, n * n)?;
    let mut table = Table::new(["key", "metric", "value"]);
    table.push(vec!["algebra".into(), "dim".into(), rep.dim.to_string()]);
    table.push(vec!["algebra".into(), "center_dim".into(), rep.center_dim.to_string()]);
    table.push(vec!["algebra".into(), "derived_dim".into(), rep.derived_dim.to_string()]);
    for (l, &e) in a.paulis.iter().zip(&rep.eta_per_generator) {
        table.push_kv(l.trim(), "eta", e);
    }
    let result = serde_json::to_value(&rep).context("serializing report")?;
    let config = json!({ "paulis": a.paulis, "tol": a.tol });
    Ok((prepared("dla", config, seeds_of(&a.common), a.common), Output { result, table }))
}

fn train(a: TrainArgs) -> Result<(Prepared, Output), Failure> {
    let mut cfg = match (&a.config, a.fast) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))?;
            TrainConfig::parse(&text).map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))?
        }
        (None, true) => TrainConfig::fast(),
        (None, false) => TrainConfig::published(),
    };
    if a.share_generator_basis {
        cfg.share_generator_basis = true;
    }
    if let Some(s) = a.common.seed {
        let count = cfg.seeds.len() as u64;
        cfg.seeds = (s..s + count).collect();
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let report = spectrum_matching_experiment(&cfg)?;
    let mut table = Table::new(["seed", "metric", "value"]);
    for run in &report.runs {
        for (b, m) in cfg.b_models.iter().zip(&run.models) {
            table.push_kv(run.seed.to_string(), format!("rmse_b{b}"), m.rmse);
        }
    }
    for s in &report.summary {
        table.push_kv("all", format!("mean_rmse_b{}", s.b), s.mean);
        table.push_kv("all", format!("std_rmse_b{}", s.b), s.std);
    }
    if let Some(w) = &report.wilcoxon_b1_vs_b10 {
        table.push_kv("all", "wilcoxon_p_b1_vs_b10", w.p_two_sided);
        table.push_kv("all", "wilcoxon_w_plus", w.w_plus);
    }
    let result = serde_json::to_value(&report).context("serializing report")?;
    let config = serde_json::to_value(&cfg).context("serializing config")?;
    let seeds = cfg.seeds.clone();
    Ok((prepared("train", config, seeds, a.common), Output { result, table }))
}

fn variance(a: VarianceArgs) -> Result<(Prepared, Output), Failure> {
    if a.samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let seed = a.common.seed.unwrap_or(DEFAULT_SEED);
    let rep = variance_sweep(&a.weights.0, a.samples, seed)?;
    let mut table = Table::new(["weight", "variance", "eta", "mean_gradient", "oracle_variance"]);
    for p in &rep.points {
        table.push(vec![cell(p.weight), cell(p.variance), cell(p.eta), cell(p.mean_gradient), cell(p.oracle_variance)]);
    }
    let result = serde_json::to_value(&rep).context("serializing report")?;
    let config = json!({ "weights": a.weights.0, "samples": a.samples });
    Ok((prepared("variance", config, vec![seed], a.common), Output { result, table }))
}

fn selftest_cmd(a: SelftestArgs) -> Result<(Prepared, Output), Failure> {
    let seed = a.common.seed.unwrap_or(DEFAULT_SEED);
    let profile = if a.fast { TrainProfile::Fast } else { TrainProfile::Published };
    let results = selftest::run_all(seed, profile)?;
    let mut table = Table::new(["criterion", "name", "passed"]);
    for c in &results {
        table.push(vec![c.id.to_string(), c.name.clone(), c.passed.to_string()]);
    }
    let all = results.iter().all(|c| c.passed);
    let result = json!({ "all_passed": all, "criteria": results });
    let config = json!({ "profile": profile });
    let mut p = prepared("selftest", config, vec![seed], a.common);
    p.exit_on_fail = true;
    Ok((p, Output { result, table }))
}
