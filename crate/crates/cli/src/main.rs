//! Single-binary driver: deterministic experiments with JSON/CSV outputs.
//!
//! Every run echoes its fully resolved configuration, the tool version and
//! a hash of the configuration into the output, so artifacts are
//! reproducible byte for byte given the same config and seed.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::Digest;

use polarmax_core::asymptotics::{h_star_ratio_run, tau};
use polarmax_core::continuous::chebyshev_constant;
use polarmax_core::covering::{minimize_covering, CoverMode};
use polarmax_core::domain::load_point_cloud_csv;
use polarmax_core::procedures::{non_concentration_census, replacement_points};
use polarmax_core::solver::{concentric_thresholds, maximize_polarization};
use polarmax_core::{Configuration, Domain, KernelSpec, SolveMode, SolveOptions};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "polarmax", version, about = "max-min potential placement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize the min-potential of N points over a set.
    Solve(SolveArgs),
    /// Minimize the covering radius of N points.
    Cover(CoverArgs),
    /// Continuous two-plate constant via the sampled matrix game.
    Chebyshev(ChebyshevArgs),
    /// Solver value / tau ratios across a list of N.
    Asymptotics(AsymptoticsArgs),
    /// Concentric-circle threshold table over a range of N.
    Thresholds(ThresholdsArgs),
    /// Audit procedures over existing artifacts.
    Verify(VerifyArgs),
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct SolveArgs {
    /// Kernel, e.g. riesz:2, riesz:-1, innerpower:2, geodesic:0.5:2
    #[arg(long)]
    kernel: String,
    /// Target set, e.g. circle, circle:0.5, sphere:3, ball:2, interval:0:1,
    /// cube:2:1, cloud:points.csv
    #[arg(long)]
    set: String,
    #[arg(long)]
    n: usize,
    /// unconstrained | constrained | plate:<set spec>
    #[arg(long, default_value = "unconstrained")]
    mode: String,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 400)]
    iterations: usize,
    #[arg(long, default_value_t = 1024)]
    resolution: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with this argument structure; overrides the flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct CoverArgs {
    #[arg(long)]
    set: String,
    #[arg(long)]
    n: usize,
    /// unconstrained | constrained
    #[arg(long, default_value = "unconstrained")]
    mode: String,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 400)]
    iterations: usize,
    #[arg(long, default_value_t = 2048)]
    resolution: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct ChebyshevArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long = "setA")]
    set_a: String,
    #[arg(long = "setB")]
    set_b: String,
    #[arg(long, default_value_t = 400)]
    res: usize,
    #[arg(long, default_value_t = 50_000)]
    iterations: usize,
    /// Measure CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct AsymptoticsArgs {
    #[arg(long)]
    set: String,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    d: f64,
    /// Comma-separated increasing list, e.g. 16,32,64,128
    #[arg(long)]
    ns: String,
    #[arg(long, default_value = "unconstrained")]
    mode: String,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct ThresholdsArgs {
    #[arg(long)]
    s: f64,
    /// Inclusive range lo:hi
    #[arg(long = "n-range")]
    n_range: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    what: VerifyCommand,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Replace an external charge by dominating sample points.
    Replacement {
        /// CSV of sample points, one per row.
        #[arg(long)]
        cloud: PathBuf,
        /// External point, comma separated, e.g. 2,2
        #[arg(long)]
        x: String,
    },
    /// Count configuration points farther than eps from the set.
    Census {
        /// A solve output JSON.
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        eps: f64,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("POLARMAX_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap help/version on stdout with success status
            if e.use_stderr() {
                eprintln!("{}", e.render());
                std::process::exit(1);
            }
            print!("{}", e.render());
            std::process::exit(0);
        }
    };
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<polarmax_core::Error>()
                .map_or(false, |err| matches!(err, polarmax_core::Error::SolverFailure(_)))
            {
                2
            } else {
                1
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve(args) => cmd_solve(with_config(args)?),
        Command::Cover(args) => cmd_cover(with_config(args)?),
        Command::Chebyshev(args) => cmd_chebyshev(with_config(args)?),
        Command::Asymptotics(args) => cmd_asymptotics(with_config(args)?),
        Command::Thresholds(args) => cmd_thresholds(with_config(args)?),
        Command::Verify(args) => cmd_verify(args),
    }
}

/// `--config file.json` replaces the flag values wholesale.
fn with_config<T: for<'de> Deserialize<'de> + HasConfig>(args: T) -> anyhow::Result<T> {
    match args.config_path() {
        None => Ok(args),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text).context("parsing config JSON")
        }
    }
}

trait HasConfig {
    fn config_path(&self) -> Option<&PathBuf>;
}

macro_rules! has_config {
    ($($t:ty),*) => {$(
        impl HasConfig for $t {
            fn config_path(&self) -> Option<&PathBuf> {
                self.config.as_ref()
            }
        }
    )*};
}
has_config!(SolveArgs, CoverArgs, ChebyshevArgs, AsymptoticsArgs, ThresholdsArgs);

fn parse_kernel(text: &str) -> anyhow::Result<KernelSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["riesz", s] => Ok(KernelSpec::riesz(s.parse()?)),
        ["innerpower", k] => Ok(KernelSpec::inner_power(k.parse()?)?),
        ["geodesic", r, s] => Ok(KernelSpec::geodesic_radial(r.parse()?, s.parse()?)?),
        _ => bail!("unrecognized kernel '{text}' (riesz:S | innerpower:K | geodesic:R:S)"),
    }
}

fn parse_set(text: &str) -> anyhow::Result<Domain> {
    let parts: Vec<&str> = text.split(':').collect();
    let domain = match parts.as_slice() {
        ["circle"] => Domain::unit_circle(),
        ["circle", r] => Domain::circle(r.parse()?, [0.0, 0.0]),
        ["sphere", p] => Domain::unit_sphere(p.parse()?),
        ["sphere", p, r] => {
            let p: usize = p.parse()?;
            Domain::Sphere {
                p,
                radius: r.parse()?,
                center: vec![0.0; p],
            }
        }
        ["ball", p] => {
            let p: usize = p.parse()?;
            Domain::Ball {
                p,
                radius: 1.0,
                center: vec![0.0; p],
            }
        }
        ["ball", p, r] => {
            let p: usize = p.parse()?;
            Domain::Ball {
                p,
                radius: r.parse()?,
                center: vec![0.0; p],
            }
        }
        ["interval", a, b] => Domain::Interval {
            a: a.parse()?,
            b: b.parse()?,
        },
        ["cube", p, side] => {
            let p: usize = p.parse()?;
            Domain::Cube {
                p,
                side: side.parse()?,
                corner: vec![0.0; p],
            }
        }
        ["cloud", path] => Domain::PointCloud {
            points: load_point_cloud_csv(std::path::Path::new(path))?,
        },
        _ => bail!("unrecognized set '{text}'"),
    };
    Ok(domain)
}

fn parse_mode(text: &str) -> anyhow::Result<SolveMode> {
    if text == "unconstrained" {
        return Ok(SolveMode::Unconstrained);
    }
    if text == "constrained" {
        return Ok(SolveMode::ConstrainedToA);
    }
    if let Some(rest) = text.strip_prefix("plate:") {
        return Ok(SolveMode::ConstrainedToB(parse_set(rest)?));
    }
    bail!("unrecognized mode '{text}' (unconstrained | constrained | plate:<set>)")
}

fn config_hash<T: Serialize>(config: &T) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let mut hasher = sha2::Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn emit(out: &Option<PathBuf>, payload: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, payload)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            std::io::stdout().write_all(payload.as_bytes())?;
        }
    }
    Ok(())
}

fn json_output<C: Serialize, R: Serialize>(config: &C, result: &R) -> String {
    let doc = serde_json::json!({
        "tool_version": VERSION,
        "config_hash": config_hash(config),
        "config": config,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("output serializes");
    text.push('\n');
    text
}

fn csv_header<C: Serialize>(config: &C, columns: &str) -> String {
    format!(
        "# tool_version={}\n# config_hash={}\n# config={}\n{}\n",
        VERSION,
        config_hash(config),
        serde_json::to_string(config).expect("config serializes"),
        columns
    )
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<()> {
    let kernel = parse_kernel(&args.kernel)?;
    let domain = parse_set(&args.set)?;
    let mode = parse_mode(&args.mode)?;
    let opts = SolveOptions {
        restarts: args.restarts,
        iterations: args.iterations,
        resolution: args.resolution,
        seed: args.seed,
        mode,
        ..SolveOptions::default()
    };
    let (config, report) = maximize_polarization(&kernel, &domain, args.n, &opts)?;
    let result = serde_json::json!({
        "value": report.value,
        "witness": report.witness,
        "configuration": config.points(),
        "mode": report.mode,
        "resolution": report.resolution,
        "options": opts,
    });
    emit(&args.out, &json_output(&args, &result))
}

fn cmd_cover(args: CoverArgs) -> anyhow::Result<()> {
    let domain = parse_set(&args.set)?;
    let mode = match args.mode.as_str() {
        "unconstrained" => CoverMode::Unconstrained,
        "constrained" => CoverMode::Constrained,
        other => bail!("unrecognized cover mode '{other}'"),
    };
    let opts = SolveOptions {
        restarts: args.restarts,
        iterations: args.iterations,
        resolution: args.resolution,
        seed: args.seed,
        ..SolveOptions::default()
    };
    let report = minimize_covering(&domain, args.n, &opts, mode)?;
    let result = serde_json::json!({
        "eta": report.eta,
        "configuration": report.config.points(),
        "mode": report.mode,
    });
    emit(&args.out, &json_output(&args, &result))
}

fn cmd_chebyshev(args: ChebyshevArgs) -> anyhow::Result<()> {
    let kernel = parse_kernel(&args.kernel)?;
    let set_a = parse_set(&args.set_a)?;
    let set_b = parse_set(&args.set_b)?;
    let sol = chebyshev_constant(&kernel, &set_a, &set_b, args.res, args.res, args.iterations)?;
    println!(
        "value {:.12}\ngap {:.3e}\niterations {}\nconverged {}",
        sol.value, sol.duality_gap, sol.iterations, sol.converged
    );
    let mut csv = csv_header(&args, "weight,point");
    for (w, q) in sol.measure.weights.iter().zip(&sol.measure.support) {
        let coords: Vec<String> = q.iter().map(|c| format!("{c}")).collect();
        csv.push_str(&format!("{w},{}\n", coords.join(",")));
    }
    if args.out.is_some() {
        emit(&args.out, &csv)?;
    }
    Ok(())
}

fn cmd_asymptotics(args: AsymptoticsArgs) -> anyhow::Result<()> {
    let domain = parse_set(&args.set)?;
    let kernel = KernelSpec::riesz(args.s);
    let ns: Vec<usize> = args
        .ns
        .split(',')
        .map(|tok| tok.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .context("parsing --ns")?;
    let opts = SolveOptions {
        restarts: args.restarts,
        iterations: args.iterations,
        seed: args.seed,
        mode: parse_mode(&args.mode)?,
        ..SolveOptions::default()
    };
    let run = h_star_ratio_run(&kernel, &domain, args.d, &ns, &opts)?;
    let mut csv = csv_header(&args, "n,value,tau,ratio");
    for (i, &n) in run.ns.iter().enumerate() {
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            run.values[i],
            tau(args.s, args.d, n),
            run.ratios[i]
        ));
    }
    if let Some((slope, intercept)) = run.fit {
        csv.push_str(&format!("# fit_slope={slope}\n# fit_intercept={intercept}\n"));
    }
    if let Some(i) = run.failed_at {
        csv.push_str(&format!("# failed_at_n={}\n", ns[i]));
    }
    emit(&args.out, &csv)
}

fn cmd_thresholds(args: ThresholdsArgs) -> anyhow::Result<()> {
    let (lo, hi) = args
        .n_range
        .split_once(':')
        .ok_or_else(|| anyhow!("--n-range expects lo:hi"))?;
    let (lo, hi): (usize, usize) = (lo.parse()?, hi.parse()?);
    if lo < 3 || hi < lo {
        bail!("--n-range expects 3 <= lo <= hi");
    }
    let mut csv = csv_header(&args, "n,r_bar,r_limit_inv,r_limit");
    for n in lo..=hi {
        let th = concentric_thresholds(n, args.s)?;
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            th.r_bar,
            1.0 / th.radius_limit,
            th.radius_limit
        ));
    }
    emit(&args.out, &csv)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<()> {
    match args.what {
        VerifyCommand::Replacement { cloud, x } => {
            let sample = load_point_cloud_csv(&cloud)?;
            let x: Vec<f64> = x
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .context("parsing --x")?;
            let res = replacement_points(&sample, &x)?;
            println!(
                "replacements {}\ncap_bound {}\ndominance_violations {}",
                res.replacements.len(),
                res.cap_bound,
                res.dominance_violations
            );
            if res.dominance_violations > 0 {
                bail!(polarmax_core::Error::SolverFailure(
                    "dominance violations found".into()
                ));
            }
        }
        VerifyCommand::Census { from, eps } => {
            let text = std::fs::read_to_string(&from)
                .with_context(|| format!("reading {}", from.display()))?;
            let doc: serde_json::Value = serde_json::from_str(&text)?;
            let set = doc["config"]["set"]
                .as_str()
                .ok_or_else(|| anyhow!("missing config.set in {}", from.display()))?;
            let domain = parse_set(set)?;
            let points: Vec<Vec<f64>> =
                serde_json::from_value(doc["result"]["configuration"].clone())
                    .context("missing result.configuration")?;
            let config = Configuration::new(points)?;
            let count = non_concentration_census(&config, &domain, eps)?;
            println!("census {count}");
        }
    }
    Ok(())
}
