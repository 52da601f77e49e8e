use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use preproj_core::algebra::build_algebra;
use preproj_core::certificate::{self, Format, PipelineError, RunConfig};
use preproj_core::cochain::{cyclic_dims, CochainComplex};
use preproj_core::exactla::FieldError;
use preproj_core::nakayama::associated_form;
use preproj_core::oracle::{self, OracleError};
use preproj_core::presentation::{self, all_generators};
use preproj_core::resolution::Resolution;
use preproj_core::yoneda::{c_matrix_report, YonedaEngine};
use preproj_core::FieldSpec;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "preproj", version, about = "Exact Hochschild cohomology of preprojective algebras of type L_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Markdown,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Markdown => Format::Markdown,
        }
    }
}

#[derive(Args, Clone)]
struct Grid {
    /// Values of n: `3`, `1,2,5` or an inclusive range `1..4`.
    #[arg(long = "n", default_value = "1..4", value_parser = parse_ns)]
    ns: NList,
    /// Characteristics: 0 or odd primes, comma separated.
    #[arg(long = "char", default_value = "0", value_parser = parse_chars)]
    chars: CharList,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    /// Directory for output files; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the algebra and print its summary.
    Build(Grid),
    /// Hochschild cohomology dimensions.
    Dims {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 6)]
        upto: usize,
    },
    /// Cartan matrix and determinant.
    Cartan(Grid),
    /// The C matrix by all three routes.
    Cmatrix(Grid),
    /// Generator-by-generator product table.
    Products {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 12)]
        upto: usize,
    },
    /// Verify the ring presentation and the stable check.
    Verify(Grid),
    /// Compare with the bar-complex oracle.
    Oracle {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 3)]
        upto: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Full pipeline with one certificate per grid point.
    Run {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 13)]
        maxdeg: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 6)]
        triple_degree: usize,
    },
    /// Re-render stored JSON certificates.
    Report {
        /// Directory holding `cert_*.json` files.
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Wrappers keep clap from treating the parsed list as a repeated argument.
#[derive(Clone)]
struct NList(Vec<usize>);

#[derive(Clone)]
struct CharList(Vec<u64>);

fn parse_ns(s: &str) -> Result<NList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.parse().map_err(|_| format!("bad range start in {part:?}"))?;
            let b: usize = b.trim_start_matches('=').parse().map_err(|_| format!("bad range end in {part:?}"))?;
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad value {part:?}"))?);
        }
    }
    if out.contains(&0) {
        return Err("n must be at least 1".into());
    }
    out.sort_unstable();
    out.dedup();
    Ok(NList(out))
}

fn parse_chars(s: &str) -> Result<CharList, String> {
    s.split(',')
        .map(|p| {
            let v: u64 = p.trim().parse().map_err(|_| format!("bad characteristic {p:?}"))?;
            FieldSpec::new(v).map_err(|e| e.to_string())?;
            Ok(v)
        })
        .collect::<Result<_, _>>()
        .map(CharList)
}

impl Grid {
    fn points(&self) -> Vec<(usize, u64)> {
        RunConfig {
            ns: self.ns.0.clone(),
            characteristics: self.chars.0.clone(),
            ..RunConfig::default()
        }
        .points()
    }
}

fn complex(n: usize, p: u64) -> Result<Arc<CochainComplex>> {
    let t = Arc::new(build_algebra(n, FieldSpec::new(p)?)?);
    let f = associated_form(&t)?;
    Ok(Arc::new(CochainComplex::new(Arc::new(Resolution::new(t, &f)))?))
}

/// Records for one command, one per grid point.
struct Table {
    command: &'static str,
    records: Vec<Value>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_table(t: &Table, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({"schema": certificate::SCHEMA, "command": t.command, "results": t.records}))
                .expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv | Format::Markdown => {
            let keys: Vec<String> = t
                .records
                .first()
                .and_then(Value::as_object)
                .map(|o| o.keys().cloned().collect())
                .unwrap_or_default();
            let rows: Vec<Vec<String>> = t
                .records
                .iter()
                .map(|r| keys.iter().map(|k| cell(&r[k])).collect())
                .collect();
            if matches!(format, Format::Csv) {
                let quote = |s: &String| {
                    if s.contains(',') || s.contains('"') {
                        format!("\"{}\"", s.replace('"', "\"\""))
                    } else {
                        s.clone()
                    }
                };
                let mut s = keys.join(",") + "\n";
                for r in rows {
                    s.push_str(&r.iter().map(quote).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            } else {
                let mut s = format!("| {} |\n|{}\n", keys.join(" | "), "---|".repeat(keys.len()));
                for r in rows {
                    s.push_str(&format!("| {} |\n", r.join(" | ")));
                }
                s
            }
        }
    }
}

fn emit(t: &Table, grid: &Grid, default: Format) -> Result<()> {
    let format = grid.format.map(Format::from).unwrap_or(default);
    let text = render_table(t, format);
    match &grid.out {
        Some(dir) => {
            let path = dir.join(format!("{}.{}", t.command, format.extension()));
            certificate::write_atomic(&path, &text)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn per_point<F>(grid: &Grid, f: F) -> Result<Vec<Value>>
where
    F: Fn(usize, u64) -> Result<Value> + Sync,
{
    let out: Vec<Result<Value>> = grid.points().par_iter().map(|&(n, p)| f(n, p)).collect();
    out.into_iter().collect()
}

fn list(v: &[usize]) -> String {
    format!("[{}]", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn cmd_build(grid: &Grid) -> Result<u8> {
    let records = per_point(grid, |n, p| {
        let t = build_algebra(n, FieldSpec::new(p)?)?;
        let s = t.sanity_report();
        Ok(json!({
            "n": n,
            "characteristic": p,
            "dim": t.dim(),
            "center_dim": t.center_basis()?.len(),
            "cartan_determinant": t.cartan_determinant().to_exact_string(),
            "sanity": s.pass(),
        }))
    })?;
    let ok = records.iter().all(|r| r["sanity"] == json!(true));
    emit(&Table { command: "build", records }, grid, Format::Markdown)?;
    Ok(if ok { 0 } else { EXIT_FAIL })
}

fn cmd_dims(grid: &Grid, upto: usize) -> Result<u8> {
    let records = per_point(grid, |n, p| {
        let c = complex(n, p)?;
        let field = c.field();
        Ok(json!({
            "n": n,
            "characteristic": p,
            "cohomology": list(&c.hh_dims(upto)),
            "homology": list(&c.homology_dims(upto)),
            "cyclic": cyclic_dims(field, n, upto).map(|v| list(&v)).unwrap_or_else(|_| "-".into()),
        }))
    })?;
    if grid.format.is_none() && grid.out.is_none() {
        for r in &records {
            println!("{}", cell(&r["cohomology"]));
        }
        return Ok(0);
    }
    emit(&Table { command: "dims", records }, grid, Format::Markdown)?;
    Ok(0)
}

fn cmd_cartan(grid: &Grid) -> Result<u8> {
    let records = per_point(grid, |n, p| {
        let t = build_algebra(n, FieldSpec::new(p)?)?;
        Ok(json!({
            "n": n,
            "characteristic": p,
            "cartan": serde_json::to_string(&t.cartan_matrix())?,
            "determinant": t.cartan_determinant().to_exact_string(),
        }))
    })?;
    emit(&Table { command: "cartan", records }, grid, Format::Markdown)?;
    Ok(0)
}

fn cmd_cmatrix(grid: &Grid) -> Result<u8> {
    let records = per_point(grid, |n, p| {
        let c = complex(n, p)?;
        let e = YonedaEngine::new(c.clone());
        let r = c_matrix_report(c.algebra(), Some(&e))?;
        Ok(json!({
            "n": n,
            "characteristic": p,
            "entries": serde_json::to_string(&r.entries)?,
            "rank": r.rank,
            "expected_rank": r.expected_rank,
            "determinant": r.determinant,
            "routes_agree": r.closed_form_agrees && r.cup_agrees == Some(true),
            "adjacency_identity": r.adjacency_identity,
            "pass": r.pass(),
        }))
    })?;
    let ok = records.iter().all(|r| r["pass"] == json!(true));
    emit(&Table { command: "cmatrix", records }, grid, Format::Markdown)?;
    Ok(if ok { 0 } else { EXIT_FAIL })
}

fn cmd_products(grid: &Grid, upto: usize) -> Result<u8> {
    let records = per_point(grid, |n, p| {
        let c = complex(n, p)?;
        let e = YonedaEngine::new(c.clone());
        let gens = all_generators(n);
        let mut rows = Vec::new();
        for a in &gens {
            for b in &gens {
                let d = a.degree() + b.degree();
                if d > upto {
                    continue;
                }
                let v = e.monomial(&[*a, *b])?;
                let labels = c.canonical(d).labels;
                let terms: Vec<String> = v
                    .coords
                    .iter()
                    .zip(&labels)
                    .filter(|(x, _)| !x.is_zero())
                    .map(|(x, l)| format!("{}*{l}", x.to_exact_string()))
                    .collect();
                rows.push(format!(
                    "{}*{} = {}",
                    a.name(),
                    b.name(),
                    if terms.is_empty() { "0".into() } else { terms.join(" + ") }
                ));
            }
        }
        Ok(json!({"n": n, "characteristic": p, "products": rows.join("; ")}))
    })?;
    emit(&Table { command: "products", records }, grid, Format::Markdown)?;
    Ok(0)
}

fn cmd_verify(grid: &Grid) -> Result<u8> {
    let records = per_point(grid, |n, p| {
        let c = complex(n, p)?;
        let e = YonedaEngine::new(c);
        let pres = presentation::presentation_for(n, p)?;
        let r = presentation::verify(&pres, &e, 12)?;
        let s = presentation::stable_check(&e)?;
        Ok(json!({
            "n": n,
            "characteristic": p,
            "regime": format!("{:?}", r.regime).to_lowercase(),
            "relations": r.relations.len(),
            "presentation": r.pass,
            "stable": s.pass(),
            "failures": r.failures().join("; "),
        }))
    })?;
    let ok = records.iter().all(|r| r["presentation"] == json!(true) && r["stable"] == json!(true));
    emit(&Table { command: "verify", records }, grid, Format::Markdown)?;
    Ok(if ok { 0 } else { EXIT_FAIL })
}

fn cmd_oracle(grid: &Grid, upto: usize, budget: u64) -> Result<u8> {
    let records = per_point(grid, |n, p| {
        let c = complex(n, p)?;
        let r = oracle::compare(c.algebra(), &c, upto, budget)?;
        Ok(json!({
            "n": n,
            "characteristic": p,
            "bar": list(&r.bar),
            "resolution": list(&r.resolution),
            "equal": r.pass(),
        }))
    })?;
    let ok = records.iter().all(|r| r["equal"] == json!(true));
    emit(&Table { command: "oracle", records }, grid, Format::Markdown)?;
    Ok(if ok { 0 } else { EXIT_FAIL })
}

fn cmd_run(grid: &Grid, maxdeg: usize, budget: u64, triple_degree: usize) -> Result<u8> {
    let cfg = RunConfig {
        ns: grid.ns.0.clone(),
        characteristics: grid.chars.0.clone(),
        maxdeg,
        oracle_budget: budget,
        triple_degree,
    };
    let format = grid.format.map(Format::from).unwrap_or(Format::Json);
    let out = grid.out.clone().unwrap_or_else(|| PathBuf::from("certificates"));
    let (outcome, _) = certificate::run(&cfg, Some(&out), format)?;
    for p in &outcome.points {
        let path = p.path.as_ref().map(|x| x.display().to_string()).unwrap_or_default();
        println!(
            "n={} char={}: {} {path}",
            p.n,
            p.characteristic,
            if p.pass { "pass" } else { "FAIL" }
        );
        for f in &p.failures {
            println!("  {f}");
        }
    }
    Ok(outcome.exit_code() as u8)
}

fn read_certificates(dir: &Path) -> Result<Vec<Value>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name().is_some_and(|f| f.to_string_lossy().starts_with("cert_"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no certificates in {}", dir.display());
    }
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)?;
            let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            if v["schema"] != json!(certificate::SCHEMA) {
                bail!("{} has an unsupported schema", p.display());
            }
            Ok(v)
        })
        .collect()
}

fn cmd_report(dir: &Path, format: OutFormat, out: Option<&Path>) -> Result<u8> {
    let docs = read_certificates(dir)?;
    let format: Format = format.into();
    let text = match format {
        Format::Csv => certificate::render_csv(&docs),
        Format::Markdown => docs.iter().map(certificate::render_markdown).collect::<Vec<_>>().join("\n"),
        Format::Json => {
            let bodies: Vec<&Value> = docs.iter().map(|d| &d["certificate"]).collect();
            serde_json::to_string_pretty(&json!({"schema": certificate::SCHEMA, "certificates": bodies}))? + "\n"
        }
    };
    match out {
        Some(path) => certificate::write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    let ok = docs.iter().all(|d| d["certificate"]["pass"] == json!(true));
    Ok(if ok { 0 } else { EXIT_FAIL })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("PREPROJ_THREADS") {
        let k: usize = v.parse().with_context(|| format!("PREPROJ_THREADS={v:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<u8> {
    configure_threads()?;
    match &cli.command {
        Command::Build(g) => cmd_build(g),
        Command::Dims { grid, upto } => cmd_dims(grid, *upto),
        Command::Cartan(g) => cmd_cartan(g),
        Command::Cmatrix(g) => cmd_cmatrix(g),
        Command::Products { grid, upto } => cmd_products(grid, *upto),
        Command::Verify(g) => cmd_verify(g),
        Command::Oracle { grid, upto, budget } => cmd_oracle(grid, *upto, *budget),
        Command::Run {
            grid,
            maxdeg,
            budget,
            triple_degree,
        } => cmd_run(grid, *maxdeg, *budget, *triple_degree),
        Command::Report { dir, format, out } => cmd_report(dir, *format, out.as_deref()),
    }
}

fn exit_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<OracleError>().is_some() {
            return EXIT_BUDGET;
        }
        if let Some(PipelineError::Oracle(_)) = cause.downcast_ref::<PipelineError>() {
            return EXIT_BUDGET;
        }
        if cause.downcast_ref::<FieldError>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(PipelineError::Field(_) | PipelineError::EmptyGrid | PipelineError::ShortWindow) = cause.downcast_ref::<PipelineError>() {
            return EXIT_USAGE;
        }
    }
    EXIT_FAIL
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_for(&err))
        }
    }
}
