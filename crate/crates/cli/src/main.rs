use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adelic_core::bundle::{
    dual, ext_power, height, max_slope, min_search_with, slope, sym_power, tensor, HeightResult,
    MaxSlopeMode, SearchFamily, SearchOptions,
};
use adelic_core::gallery;
use adelic_core::multinomial::{p_bruteforce, p_closed_form, DEFAULT_COMPOSITION_CAP};
use adelic_core::primes::factorize;
use adelic_core::rational::{fmt_rat, parse_rat, Rat};
use adelic_core::suite::run_all;
use adelic_core::{Bundle, Config, OutputFormat};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

/// Heights, slopes and minima of adelic vector bundles; lcm of multinomials.
#[derive(Parser)]
#[command(name = "adelic", version)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

/// Config overrides; every flag can also be set through its ADELIC_ variable.
#[derive(Args)]
struct ConfigArgs {
    #[arg(long, global = true, env = "ADELIC_PRECISION_BITS", default_value_t = 128)]
    precision_bits: u64,
    #[arg(long, global = true, env = "ADELIC_SEARCH_RADIUS", default_value_t = 3)]
    radius: u64,
    #[arg(long, global = true, env = "ADELIC_DENOM_BOUND", default_value_t = 4)]
    denom: u64,
    #[arg(long, global = true, env = "ADELIC_DIMENSION_CAP", default_value_t = 5000)]
    dimension_cap: usize,
    #[arg(long, global = true, env = "ADELIC_INTEGER_CAP_BITS", default_value_t = 1_000_000)]
    integer_cap_bits: u64,
    #[arg(long, global = true, env = "ADELIC_FORMAT", default_value = "md")]
    format: String,
    #[arg(long, global = true, env = "ADELIC_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// lcm of the multinomial coefficients l!/(i_1!...i_n!)
    Pnl {
        n: u64,
        l: u64,
        #[arg(long, value_enum, default_value = "closed")]
        method: Method,
        /// Compute both ways and fail on mismatch.
        #[arg(long)]
        check: bool,
        /// Also print the prime factorization.
        #[arg(long)]
        factored: bool,
        /// Largest number of compositions the enumeration may visit.
        #[arg(long, default_value_t = DEFAULT_COMPOSITION_CAP)]
        cap: u128,
    },
    /// p(n, l) over a grid, as a table in the chosen format.
    PnlGrid {
        #[arg(long, default_value_t = 6)]
        n_max: u64,
        #[arg(long, default_value_t = 12)]
        l_max: u64,
    },
    /// Print a gallery bundle as JSON.
    Gallery {
        #[command(subcommand)]
        which: GalleryCmd,
        /// Print the bundle with its expected values instead of the bare bundle.
        #[arg(long, global = true)]
        entry: bool,
        #[arg(long, short, global = true)]
        out: Option<PathBuf>,
    },
    /// Operations on a bundle read from a JSON file.
    Bundle {
        #[command(subcommand)]
        action: BundleCmd,
    },
    /// Run the statement suite and write the report.
    Verify {
        /// Comma-separated statement groups.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Closed,
    Both,
}

#[derive(Subcommand)]
enum GalleryCmd {
    Standard { n: usize },
    An { n: usize },
    /// The two-place counterexample E_q.
    Eq {
        #[arg(default_value = "1/4")]
        q: String,
    },
    /// Minkowski-Hlawka construction.
    Mh {
        n: usize,
        #[arg(long, default_value = "1/100")]
        eps: String,
    },
}

#[derive(Subcommand)]
enum BundleCmd {
    Height {
        file: PathBuf,
        /// Comma-separated rational coordinates.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    Slope { file: PathBuf },
    Dual { file: PathBuf },
    Tensor { file: PathBuf, other: PathBuf },
    Sym {
        file: PathBuf,
        #[arg(long)]
        power: usize,
    },
    Ext {
        file: PathBuf,
        #[arg(long)]
        power: usize,
    },
    Minsearch {
        file: PathBuf,
        #[arg(long, default_value_t = 20_000_000)]
        node_cap: u64,
    },
    Maxslope {
        file: PathBuf,
        /// Search coordinate subspaces and small lines instead of the exact split route.
        #[arg(long)]
        search: bool,
    },
}

enum Failure {
    Input(String),
    Io(String),
    Violated(String),
}

impl From<adelic_core::Error> for Failure {
    fn from(e: adelic_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Out = Result<String, Failure>;

fn config_from(a: &ConfigArgs) -> Result<Config, Failure> {
    let c = Config {
        precision_bits: a.precision_bits,
        search_radius: a.radius,
        denom_bound: a.denom,
        dimension_cap: a.dimension_cap,
        integer_cap_bits: a.integer_cap_bits,
        output_format: a.format.parse::<OutputFormat>()?,
        seed: a.seed,
        only: Vec::new(),
    };
    c.validate()?;
    Ok(c)
}

fn read_bundle(path: &Path) -> Result<Bundle, Failure> {
    let s = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(Bundle::from_json(&s)?)
}

fn write_or_return(out: &Option<PathBuf>, text: String) -> Out {
    match out {
        Some(p) => {
            fs::write(p, &text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn pretty(v: &impl serde::Serialize) -> Out {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Input(e.to_string()))
}

fn compact(v: &impl serde::Serialize) -> Out {
    serde_json::to_string(v).map_err(|e| Failure::Input(e.to_string()))
}

fn height_json(h: &HeightResult) -> Value {
    match h {
        HeightResult::Exact(v) => json!(v),
        HeightResult::Interval { lower, upper } => json!({"interval": {"lower": lower, "upper": upper}}),
    }
}

fn ints(y: &[BigInt]) -> Value {
    Value::Array(
        y.iter()
            .map(|v| i64::try_from(v).map_or_else(|_| json!(v.to_string()), |i| json!(i)))
            .collect(),
    )
}

fn rats(y: &[Rat]) -> Value {
    Value::Array(y.iter().map(|v| json!(fmt_rat(v))).collect())
}

fn cmd_pnl(n: u64, l: u64, method: Method, check: bool, factored: bool, cap: u128) -> Out {
    let brute = || p_bruteforce(n, l, cap).map(|b| b.value);
    if check {
        let (b, c) = (brute()?, p_closed_form(n, l)?);
        return if b == c {
            Ok(format!("{b} {c} OK"))
        } else {
            Err(Failure::Violated(format!("{b} {c} MISMATCH")))
        };
    }
    let mut lines = Vec::new();
    let values = match method {
        Method::Brute => vec![brute()?],
        Method::Closed => vec![p_closed_form(n, l)?],
        Method::Both => vec![brute()?, p_closed_form(n, l)?],
    };
    for v in values {
        if factored {
            let parts: Vec<String> = factorize(&v)?.iter().map(|(p, e)| format!("{p}^{e}")).collect();
            let rhs = if parts.is_empty() { "1".to_string() } else { parts.join(" * ") };
            lines.push(format!("{v} = {rhs}"));
        } else {
            lines.push(v.to_string());
        }
    }
    Ok(lines.join("\n"))
}

fn cmd_pnl_grid(n_max: u64, l_max: u64, format: OutputFormat) -> Out {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for l in 1..=l_max {
            rows.push((n, l, p_closed_form(n, l)?));
        }
    }
    Ok(match format {
        OutputFormat::Json => {
            let v: Vec<Value> = rows.iter().map(|(n, l, p)| json!({"n": n, "l": l, "p": p.to_string()})).collect();
            pretty(&v)?
        }
        OutputFormat::Csv => {
            let mut s = String::from("n,l,p\n");
            rows.iter().for_each(|(n, l, p)| s.push_str(&format!("{n},{l},{p}\n")));
            s.trim_end().to_string()
        }
        OutputFormat::Md => {
            let mut s = String::from("| n | l | p(n,l) |\n|---|---|---|\n");
            rows.iter().for_each(|(n, l, p)| s.push_str(&format!("| {n} | {l} | {p} |\n")));
            s.trim_end().to_string()
        }
    })
}

fn cmd_gallery(which: &GalleryCmd, entry: bool, config: &Config) -> Out {
    let policy = config.policy();
    if entry {
        let e = match which {
            GalleryCmd::Standard { n } => gallery::standard_entry(*n)?,
            GalleryCmd::An { n } => gallery::an_entry(*n)?,
            GalleryCmd::Eq { q } => gallery::eq_entry(&parse_rat(q)?)?,
            GalleryCmd::Mh { n, eps } => gallery::mh_entry(*n, &parse_rat(eps)?)?,
        };
        return pretty(&e);
    }
    let b = match which {
        GalleryCmd::Standard { n } => gallery::standard(*n)?,
        GalleryCmd::An { n } => gallery::root_lattice_an(*n)?,
        GalleryCmd::Eq { q } => gallery::counterexample_eq(&parse_rat(q)?, &policy)?,
        GalleryCmd::Mh { n, eps } => {
            let opts = gallery::MhOptions { policy, ..Default::default() };
            gallery::mh_construct(*n, &parse_rat(eps)?, &opts)?.0
        }
    };
    Ok(b.to_json_pretty())
}

fn cmd_bundle(action: &BundleCmd, config: &Config) -> Out {
    let policy = config.policy();
    let cap = config.dimension_cap;
    match action {
        BundleCmd::Height { file, vector } => {
            let b = read_bundle(file)?;
            let x = vector.split(',').map(parse_rat).collect::<Result<Vec<_>, _>>()?;
            compact(&height_json(&height(&b, &x)?))
        }
        BundleCmd::Slope { file } => compact(&slope(&read_bundle(file)?)?.exp()),
        BundleCmd::Dual { file } => Ok(dual(&read_bundle(file)?)?.to_json_pretty()),
        BundleCmd::Tensor { file, other } => Ok(tensor(&read_bundle(file)?, &read_bundle(other)?)?.to_json_pretty()),
        BundleCmd::Sym { file, power } => Ok(sym_power(&read_bundle(file)?, *power, cap)?.to_json_pretty()),
        BundleCmd::Ext { file, power } => Ok(ext_power(&read_bundle(file)?, *power, cap)?.to_json_pretty()),
        BundleCmd::Minsearch { file, node_cap } => {
            let b = read_bundle(file)?;
            let opts = SearchOptions { node_cap: *node_cap, policy };
            let s = min_search_with(&b, config.search_radius, config.denom_bound, &opts)?;
            pretty(&json!({
                "value": height_json(&s.value),
                "witness": ints(&s.witness),
                "radius": config.search_radius,
                "denom_bound": config.denom_bound,
                "evaluated": s.evaluated,
            }))
        }
        BundleCmd::Maxslope { file, search } => {
            let b = read_bundle(file)?;
            let mode = if *search {
                MaxSlopeMode::Search(SearchFamily::coordinate(b.dim()))
            } else {
                MaxSlopeMode::ExactSplit
            };
            let m = max_slope(&b, &mode, &policy)?;
            pretty(&json!({
                "value": m.value.exp(),
                "certificate": m.certificate,
                "argmax": m.argmax.iter().map(|v| rats(v)).collect::<Vec<_>>(),
                "candidates": m.candidates,
                "skipped": m.skipped,
            }))
        }
    }
}

fn cmd_verify(mut config: Config, only: Vec<String>, out: &Option<PathBuf>) -> Out {
    config.only = only;
    let report = run_all(&config)?;
    let text = report.render(config.output_format)?;
    let summary = format!(
        "{} entries, {} violated, {} undecided",
        report.entries.len(),
        report.violated(),
        report.undecided()
    );
    let printed = write_or_return(out, text)?;
    if report.violated() > 0 {
        if !printed.is_empty() {
            let _ = writeln!(std::io::stdout(), "{printed}");
        }
        return Err(Failure::Violated(summary));
    }
    eprintln!("{summary}");
    Ok(printed)
}

fn run(cli: Cli) -> Out {
    let config = config_from(&cli.config)?;
    match cli.command {
        Command::Pnl { n, l, method, check, factored, cap } => cmd_pnl(n, l, method, check, factored, cap),
        Command::PnlGrid { n_max, l_max } => cmd_pnl_grid(n_max, l_max, config.output_format),
        Command::Gallery { which, entry, out } => {
            let text = cmd_gallery(&which, entry, &config)?;
            write_or_return(&out, text)
        }
        Command::Bundle { action } => cmd_bundle(&action, &config),
        Command::Verify { only, out } => cmd_verify(config, only, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(s) => {
            if !s.is_empty() {
                // a closed pipe is not an error worth reporting
                let _ = writeln!(std::io::stdout(), "{s}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Violated(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
