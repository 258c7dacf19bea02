//! ghzw: classify multipartite quantum states by GHZ-witness values against
//! the 2^(1-k) bound, cross-checked by partial-transpose eigensolves.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation failure, 3 numerical
//! failure. Reports are line-oriented `key: value` pairs with floats at 12
//! significant digits; `--json` switches to a machine-readable object.
//! Thread count for the parallel searches follows RAYON_NUM_THREADS.

mod report;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use ghzw_core::criteria::{ANALYTIC_DECISION_TOL, ORACLE_PSD_TOL};
use ghzw_core::dmx::{self, LoadOptions};
use ghzw_core::*;
use report::{fmt_f64, yes_no, JsonObject};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ghzw", version, about = "GHZ-witness classification of multipartite states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search the witness at every level k = 2..n and report the smallest violated level
    Classify(ClassifyArgs),
    /// Evaluate the witness at a single (k, selection) pair
    Witness(WitnessArgs),
    /// Brute-force partial-transpose eigenvalues for one partition
    Ppt(PptArgs),
    /// Generate a state and write it as a DMX file
    Gen(GenArgs),
    /// Compare the analytic GHZ-diagonal PPT criterion with the eigenvalue oracle
    Diagcheck(DiagcheckArgs),
}

#[derive(Args)]
struct StateArgs {
    /// DMX state file
    file: PathBuf,
    /// Skip the positive-semidefiniteness check on load
    #[arg(long)]
    no_validate: bool,
    /// Rescale to unit trace instead of rejecting a trace deviation
    #[arg(long)]
    renormalize: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    state: StateArgs,
    /// 'exhaustive' or 'random:N'; default picks exhaustive for small
    /// selection spaces and random:10000 otherwise
    #[arg(long)]
    strategy: Option<String>,
    /// Seed for randomized searches
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cross-check every partition with the eigenvalue oracle (n <= 8)
    #[arg(long)]
    oracle: bool,
    /// Emit a JSON object instead of the text report
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Witness level, 2 <= k <= n
    #[arg(long)]
    k: usize,
    /// Per-site level pairs "a1,b1;a2,b2;..."; default 0,1 at every site
    #[arg(long)]
    selection: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PptArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Partition such as "1|2,3"
    #[arg(long)]
    partition: String,
    /// Eigenvalue slack for the PPT verdict
    #[arg(long, default_value_t = ORACLE_PSD_TOL)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// p * (embedded GHZ projector) + (1-p) * I/d
    GhzNoisy {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        selection: Option<String>,
        /// Optional site count, checked against --dims
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// The state achieving the witness bound with equality at level k
    Boundary {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        selection: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random mixture of block-product pure states for a partition
    KSeparable {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 4)]
        terms: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random density operator G G† / Tr
    Random {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// GHZ-diagonal state from explicit coefficients "l0+,l0-,l1,..."
    GhzDiagonal {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        selection: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DiagcheckArgs {
    /// Number of qubit sites
    #[arg(long)]
    n: usize,
    /// Coefficients "l0+,l0-,l1,...,l_{2^(n-1)-1}"
    #[arg(long)]
    coeffs: String,
    /// Slack on the analytic criterion
    #[arg(long, default_value_t = ANALYTIC_DECISION_TOL)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: 1, message: msg.into() }
    }
}

/// Errors from interpreting command-line values are usage errors.
fn usage(e: Error) -> CliError {
    CliError { code: 1, message: e.to_string() }
}

/// Errors from state data are validation failures, except numerical ones.
fn validation(e: Error) -> CliError {
    let code = match e {
        Error::EigenNoConvergence(_) => 3,
        _ => 2,
    };
    CliError { code, message: e.to_string() }
}

/// Errors while computing on already-validated data.
fn numerical(e: Error) -> CliError {
    let code = match e {
        Error::EigenNoConvergence(_) => 3,
        Error::SearchCapExceeded { .. } => 1,
        Error::Io(_) => 2,
        _ => 3,
    };
    CliError { code, message: e.to_string() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Ppt(args) => cmd_ppt(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Diagcheck(args) => cmd_diagcheck(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn load(args: &StateArgs) -> Result<DensityOperator> {
    dmx::load_state_with(
        &args.file,
        LoadOptions { validate_psd: !args.no_validate, renormalize: args.renormalize },
    )
}

fn parse_strategy(s: Option<&str>, seed: u64) -> std::result::Result<Option<SearchStrategy>, CliError> {
    match s {
        None => Ok(None),
        Some("exhaustive") => Ok(Some(SearchStrategy::Exhaustive)),
        Some(other) => {
            if let Some(n) = other.strip_prefix("random:") {
                let samples: usize = n
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad sample count in '{}'", other)))?;
                Ok(Some(SearchStrategy::Random { samples, seed }))
            } else {
                Err(CliError::usage(format!(
                    "unknown strategy '{}', expected 'exhaustive' or 'random:N'",
                    other
                )))
            }
        }
    }
}

fn parse_selection(
    s: Option<&str>,
    dims: &SiteDims,
) -> std::result::Result<Option<TwoLevelSelection>, CliError> {
    match s {
        None => Ok(None),
        Some(text) => TwoLevelSelection::parse(text, dims).map(Some).map_err(usage),
    }
}

fn dims_line(dims: &SiteDims) -> String {
    dims.dims()
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_classify(args: ClassifyArgs) -> std::result::Result<(), CliError> {
    let w = load(&args.state).map_err(validation)?;
    let strategy = parse_strategy(args.strategy.as_deref(), args.seed)?;
    let opts = ClassifyOptions {
        strategy,
        seed: args.seed,
        oracle: args.oracle,
        oracle_tol: ORACLE_PSD_TOL,
    };
    let report = classify(&w, &opts).map_err(numerical)?;

    if args.json {
        let mut obj = JsonObject::new();
        obj.push_str("file", &args.state.file.display().to_string());
        obj.push_raw("dims", &format!("[{}]", w.dims().dims().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")));
        obj.push_str("strategy", &report.strategy.to_string());
        let mut levels = Vec::new();
        for r in &report.reports {
            let mut o = JsonObject::new();
            o.push_raw("k", &r.k.to_string());
            o.push_num("value", r.value);
            o.push_num("bound", r.bound);
            o.push_raw("violated", if r.violated { "true" } else { "false" });
            o.push_str("selection", &r.selection.to_string());
            levels.push(o.finish());
        }
        obj.push_raw("levels", &format!("[{}]", levels.join(",")));
        obj.push_num("fidelity", report.ghz_fidelity);
        match report.min_violated_k {
            Some(k) => obj.push_raw("min_violated_k", &k.to_string()),
            None => obj.push_raw("min_violated_k", "null"),
        }
        obj.push_str("conclusion", &report.conclusion());
        if let Some(oracle) = &report.oracle {
            let mut checks = Vec::new();
            for c in oracle {
                let mut o = JsonObject::new();
                o.push_str("partition", &c.partition.to_string());
                o.push_raw("k", &c.partition.k().to_string());
                o.push_raw("k_ppt", if c.all_ppt { "true" } else { "false" });
                let min = c.subsets.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min);
                o.push_num("min_eig", min);
                checks.push(o.finish());
            }
            obj.push_raw("oracle", &format!("[{}]", checks.join(",")));
        }
        println!("{}", obj.finish());
        return Ok(());
    }

    println!("file: {}", args.state.file.display());
    println!("dims: {}", dims_line(w.dims()));
    println!("strategy: {}", report.strategy);
    for r in &report.reports {
        println!(
            "k: {} value: {} bound: {} violated: {} selection: {}",
            r.k,
            fmt_f64(r.value),
            fmt_f64(r.bound),
            yes_no(r.violated),
            r.selection
        );
    }
    println!("fidelity: {}", fmt_f64(report.ghz_fidelity));
    match report.min_violated_k {
        Some(k) => println!("min_violated_k: {}", k),
        None => println!("min_violated_k: none"),
    }
    println!("conclusion: {}", report.conclusion());
    if let Some(oracle) = &report.oracle {
        for c in oracle {
            let min = c.subsets.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min);
            println!(
                "oracle: k={} partition={} k_ppt={} min_eig={}",
                c.partition.k(),
                c.partition,
                yes_no(c.all_ppt),
                fmt_f64(min)
            );
        }
    }
    Ok(())
}

fn cmd_witness(args: WitnessArgs) -> std::result::Result<(), CliError> {
    let w = load(&args.state).map_err(validation)?;
    let sel = parse_selection(args.selection.as_deref(), w.dims())?
        .unwrap_or_else(|| TwoLevelSelection::canonical(w.dims()));
    let coeffs = extract_coefficients(&w, &sel).map_err(validation)?;
    let report = witness_value(&w, args.k, &sel).map_err(usage)?;

    if args.json {
        let mut obj = JsonObject::new();
        obj.push_raw("k", &report.k.to_string());
        obj.push_str("selection", &report.selection.to_string());
        obj.push_num("lambda0_plus", coeffs.lambda0_plus());
        obj.push_num("lambda0_minus", coeffs.lambda0_minus());
        obj.push_num("value", report.value);
        obj.push_num("bound", report.bound);
        obj.push_raw("violated", if report.violated { "true" } else { "false" });
        println!("{}", obj.finish());
        return Ok(());
    }

    println!("k: {}", report.k);
    println!("selection: {}", report.selection);
    println!("lambda0_plus: {}", fmt_f64(coeffs.lambda0_plus()));
    println!("lambda0_minus: {}", fmt_f64(coeffs.lambda0_minus()));
    println!("value: {}", fmt_f64(report.value));
    println!("bound: {}", fmt_f64(report.bound));
    println!("violated: {}", yes_no(report.violated));
    Ok(())
}

fn cmd_ppt(args: PptArgs) -> std::result::Result<(), CliError> {
    let w = load(&args.state).map_err(validation)?;
    let partition = Partition::parse(&args.partition, w.n()).map_err(usage)?;
    let report = is_k_ppt(&w, &partition, args.tol).map_err(numerical)?;

    if args.json {
        let mut obj = JsonObject::new();
        obj.push_str("partition", &partition.to_string());
        obj.push_raw("k", &partition.k().to_string());
        let mut subsets = Vec::new();
        for s in &report.subsets {
            let mut o = JsonObject::new();
            o.push_str("subset", &s.subset.to_string());
            o.push_num("min_eig", s.min_eigenvalue);
            o.push_raw("ppt", if s.ppt { "true" } else { "false" });
            subsets.push(o.finish());
        }
        obj.push_raw("subsets", &format!("[{}]", subsets.join(",")));
        obj.push_raw("k_ppt", if report.all_ppt { "true" } else { "false" });
        println!("{}", obj.finish());
        return Ok(());
    }

    println!("partition: {}", partition);
    for s in &report.subsets {
        println!(
            "subset: {} min_eig: {} verdict: {}",
            s.subset,
            fmt_f64(s.min_eigenvalue),
            if s.ppt { "PPT" } else { "NPT" }
        );
    }
    println!("k_ppt: {}", yes_no(report.all_ppt));
    Ok(())
}

fn parse_coeff_list(n: usize, text: &str) -> std::result::Result<GhzDiagonalCoeffs, CliError> {
    let values: std::result::Result<Vec<f64>, _> =
        text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let values = values.map_err(|_| CliError::usage(format!("bad coefficient list '{}'", text)))?;
    if values.len() < 2 {
        return Err(CliError::usage("need at least lambda0+ and lambda0-"));
    }
    GhzDiagonalCoeffs::new(n, values[0], values[1], values[2..].to_vec()).map_err(usage)
}

fn cmd_gen(args: GenArgs) -> std::result::Result<(), CliError> {
    let (spec, out) = match &args.kind {
        GenKind::GhzNoisy { dims, p, selection, n, out } => {
            let dims = SiteDims::new(dims.clone()).map_err(usage)?;
            if let Some(n) = n {
                if *n != dims.n() {
                    return Err(CliError::usage(format!(
                        "--n {} does not match {} site dimensions",
                        n,
                        dims.n()
                    )));
                }
            }
            let sel = parse_selection(selection.as_deref(), &dims)?;
            (GeneratorSpec::GhzNoisy { dims, sel, p: *p }, out.clone())
        }
        GenKind::Boundary { dims, k, partition, selection, out } => {
            let dims = SiteDims::new(dims.clone()).map_err(usage)?;
            let partition = Partition::parse(partition, dims.n()).map_err(usage)?;
            let sel = parse_selection(selection.as_deref(), &dims)?;
            (GeneratorSpec::Boundary { dims, sel, k: *k, partition }, out.clone())
        }
        GenKind::KSeparable { dims, partition, terms, seed, out } => {
            let dims = SiteDims::new(dims.clone()).map_err(usage)?;
            let partition = Partition::parse(partition, dims.n()).map_err(usage)?;
            (
                GeneratorSpec::KSeparable { dims, partition, terms: *terms, seed: *seed },
                out.clone(),
            )
        }
        GenKind::Random { dims, seed, out } => {
            let dims = SiteDims::new(dims.clone()).map_err(usage)?;
            (GeneratorSpec::Random { dims, seed: *seed }, out.clone())
        }
        GenKind::GhzDiagonal { dims, coeffs, selection, out } => {
            let dims = SiteDims::new(dims.clone()).map_err(usage)?;
            let coeffs = parse_coeff_list(dims.n(), coeffs)?;
            let sel = parse_selection(selection.as_deref(), &dims)?;
            (GeneratorSpec::GhzDiagonal { dims, sel, coeffs }, out.clone())
        }
    };
    let w = spec.build().map_err(usage)?;
    dmx::save_state(&w, &out).map_err(validation)?;
    println!("wrote: {}", out.display());
    println!("dims: {}", dims_line(w.dims()));
    Ok(())
}

fn cmd_diagcheck(args: DiagcheckArgs) -> std::result::Result<(), CliError> {
    let coeffs = parse_coeff_list(args.n, &args.coeffs)?;
    let n = args.n;
    let dims = SiteDims::qubits(n).map_err(usage)?;
    let sel = TwoLevelSelection::canonical(&dims);
    let h = coeffs.embedded(&sel, &dims).map_err(usage)?;

    let mut rows = Vec::new();
    let mut all_agree = true;
    for mask in 1..((1usize << n) - 1) {
        let sites: Vec<usize> = (1..=n).filter(|m| mask & (1 << (n - m)) != 0).collect();
        let beta = SiteSubset::new(sites, n).map_err(usage)?;
        let analytic = coeffs.ppt_verdict(&beta, args.tol).map_err(usage)?;
        let min_eig = partial_transpose(&h, &dims, &beta)
            .map_err(numerical)?
            .min_eigenvalue()
            .map_err(numerical)?;
        let oracle_ppt = min_eig >= -ORACLE_PSD_TOL;
        let agree = analytic.is_ppt() == oracle_ppt;
        all_agree &= agree;
        rows.push((beta, analytic, min_eig, oracle_ppt, agree));
    }

    if args.json {
        let mut obj = JsonObject::new();
        obj.push_raw("n", &n.to_string());
        obj.push_num("trace", coeffs.trace());
        obj.push_num("delta", coeffs.delta());
        let mut items = Vec::new();
        for (beta, analytic, min_eig, oracle_ppt, agree) in &rows {
            let mut o = JsonObject::new();
            o.push_str("beta", &beta.to_string());
            o.push_raw("g", &g_of(beta).to_string());
            o.push_str("analytic", &analytic.to_string());
            o.push_num("min_eig", *min_eig);
            o.push_str("oracle", if *oracle_ppt { "PPT" } else { "NPT" });
            o.push_raw("agree", if *agree { "true" } else { "false" });
            items.push(o.finish());
        }
        obj.push_raw("subsets", &format!("[{}]", items.join(",")));
        obj.push_raw("agree_all", if all_agree { "true" } else { "false" });
        println!("{}", obj.finish());
        return Ok(());
    }

    println!("n: {}", n);
    println!("trace: {}", fmt_f64(coeffs.trace()));
    println!("delta: {}", fmt_f64(coeffs.delta()));
    for (beta, analytic, min_eig, oracle_ppt, agree) in &rows {
        println!(
            "beta: {} g: {} analytic: {} min_eig: {} oracle: {} agree: {}",
            beta,
            g_of(beta),
            analytic,
            fmt_f64(*min_eig),
            if *oracle_ppt { "PPT" } else { "NPT" },
            yes_no(*agree)
        );
    }
    println!("agree_all: {}", yes_no(all_agree));
    Ok(())
}
