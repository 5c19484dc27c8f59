use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use arcforge::analysis::{PairCensus, ScanMode};
use arcforge::codes::code_from_arc;
use arcforge::curves::{bks_arc_implicit, bks_arc_parametric, hermitian_arc, ArcDocument, PlaneArc};
use arcforge::finite_field::{field_from_descriptor, field_of_order, Elem};
use arcforge::genus::{closure_profile, guarantee_table, guarantee_table_json, guarantee_table_text, ClosureCase};
use arcforge::monodromy::{
    compare_distribution, specialization_records, write_census_csv, CensusFamily, CensusReport, FamilyKind,
};
use arcforge::plane::Plane;
use arcforge::polynomial::CalibrationFamily;
use arcforge::verify::{desk_tier, run_task, TaskId, TaskParams, TaskReport, Verdict};

/// Exit code for usage and runtime errors; 0, 1 and 2 are verdicts.
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "arcforge", version, about = "Hermitian and BKS arcs over finite fields")]
struct Cli {
    /// Worker threads for the parallel scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification task, or `all` of a tier.
    Verify(VerifyArgs),
    /// Write an arc, spectrum, census, code or genus table.
    Export(ExportArgs),
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long)]
    field_order: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tolerance_tv: Option<f64>,
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Task id, or `all`.
    task: String,
    #[arg(long, value_enum, default_value = "desk")]
    tier: Tier,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tier {
    Desk,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Arc,
    Spectrum,
    Census,
    Code,
    Genus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Implicit,
    Parametric,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(value_enum)]
    kind: ExportKind,
    #[command(flatten)]
    params: ParamArgs,
    /// Arc construction for the BKS family.
    #[arg(long, value_enum, default_value = "implicit")]
    construction: Construction,
    /// Curve parameter t for the bks-onpoint census.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Read the arc from a JSON document written by `export arc`.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Verify(v) => verify(v, cli.format, cli.out.as_deref()),
        Command::Export(e) => export(e, cli.format, cli.out.as_deref()),
    }
}

fn emit(out: Option<&Path>, body: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(body).context("writing to stdout"),
    }
}

fn pretty(v: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn task_params(p: &ParamArgs) -> TaskParams {
    TaskParams {
        q: p.q,
        r: p.r,
        a: p.a.clone(),
        b: p.b.clone(),
        field_order: p.field_order,
        seed: p.seed,
        tolerance_tv: p.tolerance_tv,
        family: p.family.clone(),
    }
}

fn run_one(id: TaskId, params: &TaskParams) -> Result<TaskReport> {
    let start = Instant::now();
    let rep = run_task(id, params).with_context(|| format!("task {id}"))?;
    eprintln!("{} {id} ({:.1}s)", rep.verdict, start.elapsed().as_secs_f64());
    Ok(rep)
}

fn verify(v: VerifyArgs, format: Option<Format>, out: Option<&Path>) -> Result<u8> {
    let format = format.unwrap_or(Format::Json);
    if format == Format::Csv {
        bail!("verify reports are json or text");
    }
    let params = task_params(&v.params);
    let reports = if v.task == "all" {
        let p = &v.params;
        if p.q.is_some() || p.r.is_some() || p.a.is_some() || p.b.is_some() || p.field_order.is_some() || p.family.is_some() {
            bail!("`verify all` runs every task at its defaults; only --seed and --tolerance-tv apply");
        }
        let Tier::Desk = v.tier;
        desk_tier().into_iter().map(|id| run_one(id, &params)).collect::<Result<Vec<_>>>()?
    } else {
        vec![run_one(v.task.parse()?, &params)?]
    };
    let body = match format {
        Format::Text => reports.iter().map(TaskReport::text).collect::<String>().into_bytes(),
        _ if reports.len() == 1 => pretty(&reports[0])?,
        _ => pretty(&reports)?,
    };
    emit(out, &body)?;
    let verdicts: Vec<Verdict> = reports.iter().map(|r| r.verdict).collect();
    Ok(if verdicts.contains(&Verdict::Fail) {
        1
    } else if verdicts.contains(&Verdict::ReportOnly) {
        2
    } else {
        0
    })
}

fn load_arc(args: &ExportArgs) -> Result<PlaneArc> {
    if let Some(path) = &args.input {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc: ArcDocument = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let plane = Plane::new(&field_from_descriptor(&doc.field)?)?;
        return Ok(PlaneArc::from_document(&plane, &doc)?);
    }
    let p = &args.params;
    let q = p.q.ok_or_else(|| anyhow!("--q is required (or --input)"))?;
    let r = p.r.unwrap_or(1);
    Ok(match p.family.as_deref().unwrap_or("hermitian") {
        "hermitian" => hermitian_arc(q, r)?,
        "bks" => match args.construction {
            Construction::Implicit => bks_arc_implicit(q, r)?,
            Construction::Parametric => bks_arc_parametric(q, r)?,
        },
        f => bail!("unknown arc family {f:?}; expected hermitian or bks"),
    })
}

fn export(args: ExportArgs, format: Option<Format>, out: Option<&Path>) -> Result<u8> {
    let body = match args.kind {
        ExportKind::Arc => {
            require(format, Format::Json, &[Format::Json])?;
            pretty(&load_arc(&args)?.to_document())?
        }
        ExportKind::Spectrum => {
            let arc = load_arc(&args)?;
            let census = PairCensus::compute(&arc);
            let spectrum = census.spectrum();
            let cov = census.coverage(spectrum.n(), ScanMode::Parallel);
            drop(census);
            match require(format, Format::Json, &[Format::Json, Format::Text])? {
                Format::Text => spectrum.counts.iter().map(|(c, n)| format!("{c} {n}\n")).collect::<String>().into_bytes(),
                _ => pretty(&cov.to_json(&arc, &spectrum))?,
            }
        }
        ExportKind::Code => {
            let arc = load_arc(&args)?;
            let spectrum = PairCensus::compute(&arc).spectrum();
            let code = code_from_arc(&arc)?;
            match require(format, Format::Text, &[Format::Json, Format::Text])? {
                Format::Json => pretty(&code.parameters_json(&code.min_distance(Some(&spectrum))?, spectrum.n()))?,
                _ => code.matrix_text().into_bytes(),
            }
        }
        ExportKind::Census => census_export(&args, format)?,
        ExportKind::Genus => genus_export(&args, format)?,
    };
    emit(out, &body)?;
    Ok(0)
}

fn require(format: Option<Format>, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = format.unwrap_or(default);
    if !allowed.contains(&f) {
        bail!("this export does not support the requested format");
    }
    Ok(f)
}

fn census_export(args: &ExportArgs, format: Option<Format>) -> Result<Vec<u8>> {
    let p = &args.params;
    let q = p.q.unwrap_or(3);
    let ctx = field_of_order(p.field_order.unwrap_or(q.pow(4)))?;
    let id = p.family.as_deref().ok_or_else(|| anyhow!("--family is required for a census"))?;
    let kind = FamilyKind::ALL
        .into_iter()
        .find(|k| k.id() == id)
        .ok_or_else(|| anyhow!("unknown census family {id:?}"))?;
    let elem = |s: &Option<String>, name: &str| -> Result<Option<Elem>> {
        s.as_deref().map(|s| ctx.parse(s).with_context(|| format!("--{name}"))).transpose()
    };
    let (a, b, t) = (elem(&p.a, "a")?, elem(&p.b, "b")?, elem(&args.t, "t")?);
    let family = match (kind, a, b, t) {
        (FamilyKind::HermitianLine, Some(a), Some(b), _) => CensusFamily::HermitianLine { a, b },
        (FamilyKind::HermitianOnPoint, Some(a), Some(b), _) => CensusFamily::HermitianOnPoint { a, b },
        (FamilyKind::BksLine, Some(a), Some(b), _) => CensusFamily::BksLine { a, b },
        (FamilyKind::BksOnPoint, _, _, Some(t)) => CensusFamily::BksOnPoint { t },
        (FamilyKind::CalibrationI, ..) => CensusFamily::Calibration(CalibrationFamily::HermitianI),
        (FamilyKind::CalibrationII, ..) => CensusFamily::Calibration(CalibrationFamily::HermitianII),
        _ => kind.seeded_instance(&ctx, q, p.seed)?,
    };
    let records = specialization_records(&ctx, q, family)?;
    match require(format, Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Csv => {
            let mut buf = Vec::new();
            write_census_csv(&ctx, &records, &mut buf)?;
            Ok(buf)
        }
        _ => {
            let mut rep = CensusReport::from_records(&ctx, q, family, &records);
            rep.comparison = compare_distribution(&rep, &family.group(q)?).ok();
            pretty(&rep)
        }
    }
}

fn genus_export(args: &ExportArgs, format: Option<Format>) -> Result<Vec<u8>> {
    let p = &args.params;
    let fmt = require(format, Format::Text, &[Format::Json, Format::Text])?;
    match (&p.family, p.q) {
        (Some(case), Some(q)) => {
            let case: ClosureCase = case.parse().map_err(|e: String| anyhow!(e))?;
            let prof = closure_profile(case, q)?;
            let mut v = prof.to_json();
            v["min_r"] = json!(prof.minimal_r());
            match fmt {
                Format::Json => pretty(&v),
                _ => Ok(format!("{case} q={q} genus={} min_r={:?}\n", prof.genus, prof.minimal_r()).into_bytes()),
            }
        }
        (None, q) => {
            let rows = guarantee_table(q.unwrap_or(16));
            match fmt {
                Format::Json => pretty(&guarantee_table_json(&rows)),
                _ => Ok(guarantee_table_text(&rows).into_bytes()),
            }
        }
        (Some(_), None) => bail!("--family with a closure case needs --q"),
    }
}
