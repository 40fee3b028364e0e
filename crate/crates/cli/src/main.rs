//! `carlitz-lab`: batch front end for exceptionality tests, auxiliary curves,
//! point counts, zeta numerators and the exhaustive scan.
//!
//! Exit status: 0 success, 1 a mathematical check failed, 2 usage error,
//! 3 a cap or budget was hit.

mod config;
mod text;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use carlitz_core::counting::{defect_sequence, growth_report, CountOptions};
use carlitz_core::curves::{construct_auxiliary_curve, PlaneCurve, SearchOptions};
use carlitz_core::exceptional::{
    carlitz_wan_scan, is_exceptional_cohen, permutation_levels, run_pipeline, CohenOptions, CohenVerdict,
    PipelineOptions, ScanOptions, DEFAULT_AUDIT_SAMPLES, DEFAULT_PERMUTATION_LEVELS,
};
use carlitz_core::poly::parse_uni;
use carlitz_core::report::{
    count_table_csv, to_json, AuxiliaryCurveView, CountView, CurveView, ExceptionalView, GrowthView, PermcheckView,
    PipelineView, TraceView, ZetaView,
};
use carlitz_core::zeta::{verify_weil, zeta_of_curve};
use carlitz_core::{Error, ErrorKind, Field, UniPoly};
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error as ThisError;

use config::{parse_list, parse_range, CapFlags, Caps, Settings};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Math(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Math(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Io(_) => 2,
        }
    }

    fn core(e: Error) -> CliError {
        let msg = e.to_string();
        match e.kind() {
            ErrorKind::Usage => CliError::Usage(msg),
            ErrorKind::Cap => CliError::Cap(msg),
            ErrorKind::Math => CliError::Math(msg),
        }
    }

    /// A core error for the input text `src`, with a caret under the parse
    /// position when there is one.
    fn input(e: Error, what: &str, src: &str) -> CliError {
        match &e {
            Error::Parse { pos, msg } => CliError::Usage(format!(
                "cannot parse {what} at position {pos}: {msg}\n  {src}\n  {}^",
                " ".repeat(src[..(*pos).min(src.len())].chars().count())
            )),
            _ => CliError::core(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "carlitz-lab",
    version,
    about = "Exceptional polynomials and their auxiliary curves over finite fields"
)]
struct Cli {
    /// Output format; csv is available for tabular reports only.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report to this path (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized step; recorded in the report.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// File of key=value defaults, overridden by flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    caps: CapFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Debug, Default, clap::Args)]
struct PolyArgs {
    /// Field spec such as 2^3 (order 8) or 9.
    #[arg(long)]
    field: Option<String>,
    /// Polynomial in x, e.g. "x^3 + [t+1]*x".
    #[arg(long)]
    poly: Option<String>,
}

#[derive(Clone, Debug, Default, clap::Args)]
struct CurveArgs {
    /// Field spec such as 2^3 (order 8) or 9.
    #[arg(long)]
    field: Option<String>,
    /// Homogeneous form in x, y, z, e.g. "x^3 + y^3 + z^3".
    #[arg(long)]
    curve: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Whether f permutes F_{q^n} for n = 1..levels.
    Permcheck {
        #[command(flatten)]
        input: PolyArgs,
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Cohen verdict for f with factor evidence and permutation levels.
    Exceptional {
        #[command(flatten)]
        input: PolyArgs,
        #[arg(long)]
        levels: Option<u32>,
    },
    /// As exceptional, with each split factor's factorization over its
    /// splitting extension.
    CohenEvidence {
        #[command(flatten)]
        input: PolyArgs,
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Smoothness certificate of a plane curve (--curve), or the auxiliary
    /// curve of f with its search trace (--poly).
    Curve {
        #[arg(long)]
        field: Option<String>,
        #[arg(long, conflicts_with = "poly")]
        curve: Option<String>,
        #[arg(long)]
        poly: Option<String>,
    },
    /// Point counts and defects A(n) = q^n + 1 - N_n for n = 1..nmax.
    Count {
        #[command(flatten)]
        input: CurveArgs,
        #[arg(long, alias = "n")]
        nmax: Option<u32>,
        /// Omit the affine / infinity split.
        #[arg(long)]
        no_split: bool,
    },
    /// Zeta numerator P(T) and its Weil numbers for a smooth curve.
    Zeta {
        #[command(flatten)]
        input: CurveArgs,
        /// Levels beyond g used to verify the prediction (at most g).
        #[arg(long)]
        extra: Option<u32>,
    },
    /// Growth table of the defects of a curve.
    Growth {
        #[command(flatten)]
        input: CurveArgs,
        #[arg(long, alias = "n")]
        nmax: Option<u32>,
        /// Levels at which the underlying polynomial permutes, e.g. 1,3,5.
        #[arg(long)]
        permuting: Option<String>,
        #[arg(long)]
        threshold_m: Option<u64>,
        #[arg(long)]
        threshold_n: Option<u32>,
    },
    /// Normalize an exceptional f, build its auxiliary curve, count it and
    /// check the count identities at every permuting level.
    Pipeline {
        #[command(flatten)]
        input: PolyArgs,
        #[arg(long, alias = "n")]
        nmax: Option<u32>,
    },
    /// Exhaustive scan of monic f over F_q of degree d for exceptional
    /// polynomials with gcd(d, q - 1) > 1.
    Scan {
        /// Field orders, e.g. 2,3,4,5.
        #[arg(long)]
        q: Option<String>,
        /// Degrees, e.g. 2..5.
        #[arg(long)]
        d: Option<String>,
        /// Prefilter-rejected candidates re-tested per cell.
        #[arg(long)]
        audit: Option<usize>,
    },
}

/// A rendered report and whether it records a failed check.
struct Outcome {
    body: String,
    output: Option<PathBuf>,
    failure: Option<String>,
    partial: Option<String>,
}

impl Outcome {
    fn ok(body: String) -> Outcome {
        Outcome { body, output: None, failure: None, partial: None }
    }
}

struct Ctx {
    settings: Settings,
    format: Format,
    seed: u64,
    caps: Caps,
}

impl Ctx {
    fn field(&self, flag: Option<String>) -> Result<Field, CliError> {
        let spec = self.settings.require(flag, "field")?;
        Field::from_spec(&spec).map_err(|e| CliError::input(e, "field", &spec))
    }

    fn poly(&self, input: PolyArgs) -> Result<UniPoly, CliError> {
        let field = self.field(input.field)?;
        let src = self.settings.require(input.poly, "poly")?;
        parse_uni(&field, &src).map_err(|e| CliError::input(e, "polynomial", &src))
    }

    fn curve(&self, input: CurveArgs) -> Result<PlaneCurve, CliError> {
        let field = self.field(input.field)?;
        let src = self.settings.require(input.curve, "curve")?;
        PlaneCurve::parse(&field, &src).map_err(|e| CliError::input(e, "curve", &src))
    }

    fn count_opts(&self) -> CountOptions {
        CountOptions { level_cap: self.caps.level, ..CountOptions::default() }
    }

    fn cohen_opts(&self, levels: Option<u32>) -> Result<CohenOptions, CliError> {
        Ok(CohenOptions {
            levels: self.settings.number(levels, "levels", DEFAULT_PERMUTATION_LEVELS)?,
            level_cap: self.caps.level,
        })
    }

    fn search_opts(&self) -> SearchOptions {
        SearchOptions { extension_cap: self.caps.extension }
    }

    fn json<T: serde::Serialize>(&self, kind: &str, data: &T) -> Result<String, CliError> {
        to_json(kind, self.seed, data).map_err(CliError::core)
    }

    /// JSON or text; CSV is refused.
    fn emit<T: serde::Serialize>(
        &self,
        kind: &str,
        data: &T,
        text: impl FnOnce() -> String,
    ) -> Result<String, CliError> {
        match self.format {
            Format::Json => self.json(kind, data),
            Format::Text => Ok(text()),
            Format::Csv => Err(CliError::Usage(format!("csv output is not available for {kind} reports"))),
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    let output = settings.string(cli.output.map(|p| p.display().to_string()), "output").map(PathBuf::from);
    let mut out = dispatch(cli.command, settings, cli.format, cli.seed, &cli.caps)?;
    out.output = output;
    Ok(out)
}

fn dispatch(
    command: Command,
    settings: Settings,
    format: Option<Format>,
    seed: Option<u64>,
    caps: &CapFlags,
) -> Result<Outcome, CliError> {
    let format = match format {
        Some(f) => f,
        None => match settings.string(None, "format") {
            Some(s) => Format::from_str(&s, true).map_err(|_| CliError::Usage(format!("unknown format {s:?}")))?,
            None => Format::Json,
        },
    };
    let seed = settings.seed(seed)?;
    let caps = settings.caps(caps)?;
    carlitz_core::field::set_field_cap(caps.field);
    let ctx = Ctx { settings, format, seed, caps };

    match command {
        Command::Permcheck { input, levels } => {
            let f = ctx.poly(input)?;
            let levels = ctx.settings.number(levels, "levels", DEFAULT_PERMUTATION_LEVELS)?;
            let view = PermcheckView::new(&f, permutation_levels(&f, levels, ctx.caps.level).map_err(CliError::core)?);
            let partial = view
                .levels
                .iter()
                .any(|l| l.permutes.is_none())
                .then(|| "some levels exceed the level cap".to_string());
            let body = ctx.emit("permcheck", &view, || text::permcheck(&view))?;
            Ok(Outcome { body, output: None, failure: None, partial })
        }
        Command::Exceptional { input, levels } => exceptional(&ctx, input, levels, false),
        Command::CohenEvidence { input, levels } => exceptional(&ctx, input, levels, true),
        Command::Curve { field, curve, poly } => {
            if let Some(p) = ctx.settings.string(poly, "poly").filter(|_| curve.is_none()) {
                let f = ctx.poly(PolyArgs { field, poly: Some(p) })?;
                let (c, trace) = construct_auxiliary_curve(&f, ctx.search_opts()).map_err(CliError::core)?;
                let view = AuxiliaryCurveView { curve: CurveView::new(&c), trace: TraceView::new(&trace) };
                let body = ctx.emit("auxiliary-curve", &view, || text::auxiliary_curve(&view))?;
                Ok(Outcome::ok(body))
            } else {
                let c = ctx.curve(CurveArgs { field, curve })?;
                let view = CurveView::new(&c);
                let body = ctx.emit("curve", &view, || text::curve(&view))?;
                Ok(Outcome::ok(body))
            }
        }
        Command::Count { input, nmax, no_split } => {
            let c = ctx.curve(input)?;
            let nmax = ctx.settings.number(nmax, "nmax", 4)?;
            let table = defect_sequence(&c, nmax, !no_split, &ctx.count_opts()).map_err(CliError::core)?;
            let view = CountView::new(&table);
            let failure = (!view.hasse_weil_violations.is_empty())
                .then(|| format!("Hasse-Weil bound fails at n = {:?}", view.hasse_weil_violations));
            let body = match ctx.format {
                Format::Csv => count_table_csv(&view.rows),
                Format::Json => ctx.json("count", &view)?,
                Format::Text => text::count(&view),
            };
            Ok(Outcome { body, output: None, failure, partial: None })
        }
        Command::Zeta { input, extra } => {
            let c = ctx.curve(input)?;
            let opts = ctx.count_opts();
            let (z, counts) = zeta_of_curve(&c, &opts).map_err(CliError::core)?;
            let extra = ctx.settings.number(extra, "extra", 1)?;
            let ver = verify_weil(&c, &z, extra, &opts).map_err(CliError::core)?;
            let failure = ver.ensure().err().map(|e| e.to_string());
            let view = ZetaView::new(&c, &z, &counts, Some(ver));
            let body = ctx.emit("zeta", &view, || text::zeta(&view))?;
            Ok(Outcome { body, output: None, failure, partial: None })
        }
        Command::Growth { input, nmax, permuting, threshold_m, threshold_n } => {
            let c = ctx.curve(input)?;
            let nmax = ctx.settings.number(nmax, "nmax", 8)?;
            let permuting = permuting
                .map(|s| parse_list(&s).map(|v| v.into_iter().map(|n| n as u32).collect::<Vec<_>>()))
                .transpose()?;
            let table = defect_sequence(&c, nmax, false, &ctx.count_opts()).map_err(CliError::core)?;
            let rep = growth_report(&table, permuting.as_deref(), threshold_m, threshold_n);
            let view = GrowthView::new(&c, &rep);
            let body = match ctx.format {
                Format::Csv => text::growth_csv(&view),
                Format::Json => ctx.json("growth", &view)?,
                Format::Text => text::growth(&view),
            };
            Ok(Outcome::ok(body))
        }
        Command::Pipeline { input, nmax } => {
            let f = ctx.poly(input)?;
            let nmax = ctx.settings.number(nmax, "nmax", 6)?;
            let opts =
                PipelineOptions { cohen: ctx.cohen_opts(None)?, search: ctx.search_opts(), count: ctx.count_opts() };
            let rep = run_pipeline(&f, nmax, &opts).map_err(CliError::core)?;
            let view = PipelineView::new(&rep);
            let failure = if !view.identities_hold {
                Some("count identities fail at a permuting level".to_string())
            } else if !view.counts.hasse_weil_violations.is_empty() {
                Some(format!("Hasse-Weil bound fails at n = {:?}", view.counts.hasse_weil_violations))
            } else {
                None
            };
            let body = match ctx.format {
                Format::Csv => count_table_csv(&view.counts.rows),
                Format::Json => ctx.json("pipeline", &view)?,
                Format::Text => text::pipeline(&view),
            };
            Ok(Outcome { body, output: None, failure, partial: None })
        }
        Command::Scan { q, d, audit } => {
            let q_list = parse_list(&ctx.settings.string(q, "q").unwrap_or_else(|| "2,3,4,5,7,8,9".into()))?;
            let d_list = parse_range(&ctx.settings.string(d, "d").unwrap_or_else(|| "2..6".into()))?;
            let opts = ScanOptions {
                budget: ctx.caps.budget,
                audit_samples: ctx.settings.number(audit, "audit", DEFAULT_AUDIT_SAMPLES)?,
                seed: ctx.seed,
                ..ScanOptions::default()
            };
            let start = Instant::now();
            let res = carlitz_wan_scan(&q_list, &d_list, &opts).map_err(CliError::core)?;
            eprintln!("scan: {} candidates in {:.2?}", res.total_tested, start.elapsed());
            let failure = (!res.clean()).then(|| {
                format!(
                    "{} violations, {} audit failures, {} non-monic mismatches",
                    res.violations.len(),
                    res.audit_failures.len(),
                    res.non_monic.iter().map(|c| c.mismatches.len()).sum::<usize>()
                )
            });
            let partial = res.partial.then(|| "scan budget exhausted; results are partial".to_string());
            let body = ctx.emit("scan", &res, || text::scan(&res))?;
            Ok(Outcome { body, output: None, failure, partial })
        }
    }
}

fn exceptional(ctx: &Ctx, input: PolyArgs, levels: Option<u32>, witnesses: bool) -> Result<Outcome, CliError> {
    let kind = if witnesses { "cohen-evidence" } else { "exceptional" };
    let f = ctx.poly(input)?;
    let rep = is_exceptional_cohen(&f, &ctx.cohen_opts(levels)?).map_err(CliError::core)?;
    let view = ExceptionalView::new(&rep, witnesses);
    let failure = (rep.verdict == CohenVerdict::Exceptional && rep.consistent == Some(false))
        .then(|| "exceptional verdict but f does not permute F_q".to_string());
    let body = ctx.emit(kind, &view, || text::exceptional(&view))?;
    Ok(Outcome { body, output: None, failure, partial: None })
}

/// Writes to a sibling temporary file, then renames over `path`.
fn write_atomic(path: &Path, body: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(body.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn main() -> ExitCode {
    let outcome = run(Cli::parse()).and_then(|o| {
        match &o.output {
            Some(path) => write_atomic(path, &o.body)?,
            None => print!("{}", o.body),
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            if let Some(msg) = &o.failure {
                eprintln!("check failed: {msg}");
                ExitCode::from(1)
            } else if let Some(msg) = &o.partial {
                eprintln!("incomplete: {msg}");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
