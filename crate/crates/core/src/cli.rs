//! The `symdyn` command line.
//!
//! Exit codes: 0 success, 1 not found within budget or failing evidence,
//! 2 usage or source-spec error, 3 tainted by ambiguous evaluations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classify::{classify, BudgetProfile};
use crate::entropy::{sequence_entropy, EntropySequence};
use crate::indep::{free_density_profile, is_free, max_free_size, SymbolPair};
use crate::lang::{complexity_table, CoordinateSet, LatticeBox, ShiftBudget};
use crate::manifest::{to_sorted_json, with_manifest, RunManifest};
use crate::sources::{
    choose_safe_radius, reduced_words, Index, IndexDomain, IntegerSet, SourceError, SymbolicSource,
};
use crate::spec::SourceDocument;
use crate::torus::{Constant, ConstantKind, FixedPointFrac, SqFrac, TorusPoint, DEFAULT_BITS};
use crate::wapset::{ruppert_test, wap_countability_note, RuppertOutcome, RuppertProbe};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_FOUND: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_TAINTED: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "symdyn",
    version,
    about = "Symbolic sequences from coding functions and their finite-scale signatures"
)]
pub struct Cli {
    /// Worker threads; never changes output bytes.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Record wall time in the manifest (outputs then differ between runs).
    #[arg(long, global = true)]
    pub record_time: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize symbols of a source.
    Generate(GenerateArgs),
    /// Word-complexity table p(n).
    Complexity(ComplexityArgs),
    /// Freeness of a coordinate set, or the largest free subset of a window.
    Free(FreeArgs),
    /// Sequence entropy estimate.
    Entropy(EntropyArgs),
    /// Finite-horizon WAP-set probe.
    Wap(WapArgs),
    /// Positive entropy / non-null / tame-consistent verdicts.
    Classify(ClassifyArgs),
    /// Radius of a sphere coding that keeps an orbit segment clear.
    SafeRadius(SafeRadiusArgs),
}

#[derive(Debug, Args)]
pub struct SourceArg {
    /// Source document (JSON).
    #[arg(long)]
    pub source: PathBuf,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Number of shifts scanned (mandatory).
    #[arg(long)]
    pub shifts: u64,
    /// First shift of the range.
    #[arg(
        long,
        default_value_t = 0,
        allow_negative_numbers = true,
        conflicts_with = "centered"
    )]
    pub shift_start: i64,
    /// Center the shift range on the origin.
    #[arg(long)]
    pub centered: bool,
}

impl BudgetArgs {
    fn budget(&self, workers: usize) -> ShiftBudget {
        let b = if self.centered {
            ShiftBudget::centered(self.shifts)
        } else {
            ShiftBudget::first(self.shifts).starting_at(self.shift_start)
        };
        b.with_workers(workers)
    }
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub source: SourceArg,
    /// Inclusive index range `A..B`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["lattice_box", "words"])]
    pub range: Option<String>,
    /// Per-axis radii of a centered box of lattice indices, e.g. `3,3`.
    #[arg(long = "box")]
    pub lattice_box: Option<String>,
    /// All reduced free-group words up to this length.
    #[arg(long)]
    pub words: Option<usize>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[command(flatten)]
    pub source: SourceArg,
    #[arg(long)]
    pub n_max: usize,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct FreeArgs {
    #[command(flatten)]
    pub source: SourceArg,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Decide freeness of these coordinates, e.g. `0,2`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["window", "lengths"])]
    pub coords: Option<String>,
    /// Search the largest free subset of `{0..L-1}`.
    #[arg(long, conflicts_with = "lengths")]
    pub window: Option<usize>,
    /// Free-density profile over these window lengths, e.g. `4,8,12`.
    #[arg(long)]
    pub lengths: Option<String>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Freeness checks allowed per search.
    #[arg(long, default_value_t = 1 << 22)]
    pub nodes: u64,
    /// Symbol pair, e.g. `0,1`.
    #[arg(long, default_value = "0,1")]
    pub pair: String,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub source: SourceArg,
    #[arg(long)]
    pub n_max: usize,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// `identity`, `geometric`, `kerr-li-blocks[:LEVEL]` or `explicit:a0,a1,…`.
    #[arg(long, default_value = "identity")]
    pub sequence: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct WapArgs {
    /// The set D: an integer-set JSON object or a file holding one.
    #[arg(long)]
    pub d: String,
    /// The candidate set B, same forms as `--d`.
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub f_max: usize,
    /// Increasing horizons, e.g. `1000,10000,100000`.
    #[arg(long)]
    pub horizons: String,
    /// Also report complexity and free-set size of the indicator subshift of D.
    #[arg(long, requires = "note_shifts")]
    pub note_n_max: Option<usize>,
    #[arg(long)]
    pub note_shifts: Option<u64>,
    #[arg(long, default_value_t = 12)]
    pub note_window: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: SourceArg,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Increasing window lengths, e.g. `8,16,32`.
    #[arg(long)]
    pub windows: String,
    #[arg(long)]
    pub k_target: usize,
    #[arg(long, default_value_t = 1 << 22)]
    pub nodes: u64,
    #[arg(long, default_value_t = 12)]
    pub prefix_len: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct SafeRadiusArgs {
    /// Rotation vector, comma-separated constants.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y0: String,
    #[arg(long, allow_hyphen_values = true)]
    pub center: String,
    /// Orbit points with |n| <= N are kept clear.
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub r_min: String,
    #[arg(long)]
    pub r_max: String,
    /// Margin 2^-delta_bits on squared distances.
    #[arg(long)]
    pub delta_bits: u32,
    #[arg(long, default_value_t = DEFAULT_BITS)]
    pub bits: u32,
    #[command(flatten)]
    pub out: OutArg,
}

/// A failure mapped to an exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        Self::usage(e.to_string())
    }
}

type CliResult = Result<u8, CliError>;

/// Parses a constant: `golden`, `rational:P/Q`, `sqrt:P/Q`, `hex:MANTISSA`,
/// optionally prefixed by `-` for negation mod 1. Hex mantissas are read at `bits`.
pub fn parse_constant(text: &str, bits: u32) -> Result<Constant, String> {
    let (negate, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let ratio = |s: &str| -> Result<(u64, u64), String> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| format!("expected P/Q, got `{s}`"))?;
        Ok((
            p.trim().parse().map_err(|e| format!("`{p}`: {e}"))?,
            q.trim().parse().map_err(|e| format!("`{q}`: {e}"))?,
        ))
    };
    let kind = match body.split_once(':') {
        None if body == "golden" => ConstantKind::Golden,
        Some(("rational", r)) => {
            let (p, q) = ratio(r)?;
            ConstantKind::Rational { p, q }
        }
        Some(("sqrt", r)) => {
            let (p, q) = ratio(r)?;
            ConstantKind::SqrtRational { p, q }
        }
        Some(("hex", h)) => ConstantKind::Hex {
            hex: h.into(),
            bits,
        },
        _ => return Err(format!("unknown constant `{text}`")),
    };
    let c = Constant { kind, negate };
    Ok(c)
}

fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| CliError::usage(format!("`{s}`: {e}")))
        })
        .collect()
}

fn parse_range(text: &str) -> Result<(i64, i64), CliError> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| CliError::usage(format!("expected A..B, got `{text}`")))?;
    let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
    if b < a {
        return Err(CliError::usage(format!("empty range {text}")));
    }
    Ok((a, b))
}

fn load_source(path: &Path) -> Result<(SymbolicSource, SourceDocument), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let doc = SourceDocument::from_json(&text)
        .map_err(|e| CliError::usage(format!("{}: malformed source spec: {e}", path.display())))?;
    let source = doc
        .build()
        .map_err(|e| CliError::usage(format!("{}: invalid source: {e}", path.display())))?;
    Ok((source, doc))
}

fn load_set(arg: &str) -> Result<IntegerSet, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::usage(format!("{arg}: {e}")))?
    };
    // an indicator source document names its set too
    if let Ok(SourceDocument::Indicator { set, reflect }) = SourceDocument::from_json(&text) {
        return Ok(IntegerSet::new(set, reflect)?);
    }
    let set: IntegerSet =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("integer set: {e}")))?;
    Ok(IntegerSet::new(set.kind().clone(), set.reflect())?)
}

fn emit(out: &OutArg, body: &str, manifest: Option<&RunManifest>) -> Result<(), CliError> {
    match &out.out {
        Some(path) => {
            fs::write(path, body)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            if let Some(m) = manifest {
                let mut side = path.as_os_str().to_owned();
                side.push(".manifest.json");
                fs::write(PathBuf::from(side), to_sorted_json(m))?;
            }
        }
        None => print!("{body}"),
    }
    Ok(())
}

struct Ctx {
    workers: usize,
    started: Option<Instant>,
}

fn symbol_char(cell: Result<u8, SourceError>) -> Result<(char, bool), CliError> {
    match cell {
        Ok(s) => Ok((char::from_digit(u32::from(s), 36).unwrap_or('?'), false)),
        Err(e) if e.is_ambiguous() => Ok(('?', true)),
        Err(e) => Err(e.into()),
    }
}

fn cmd_generate(args: &GenerateArgs, ctx: &Ctx) -> CliResult {
    let (source, doc) = load_source(&args.source.source)?;
    let mut tainted = false;
    let (body, budgets) = match (&args.range, &args.lattice_box, args.words) {
        (Some(range), None, None) => {
            if source.domain() != IndexDomain::Integers {
                return Err(CliError::usage("--range needs an integer-indexed source"));
            }
            let (a, b) = parse_range(range)?;
            let cells = source.materialize(a..b + 1, ctx.workers)?;
            let mut line: String = cells
                .iter()
                .map(|c| match c {
                    Some(s) => char::from_digit(u32::from(*s), 36).unwrap_or('?'),
                    None => {
                        tainted = true;
                        '?'
                    }
                })
                .collect();
            line.push('\n');
            (line, json!({"range": [a, b]}))
        }
        (None, Some(radii), None) => {
            let lb = LatticeBox {
                radii: parse_list(radii)?,
            };
            let k = match source.domain() {
                IndexDomain::Lattice(k) => k,
                IndexDomain::Integers => 1,
                IndexDomain::FreeGroup => {
                    return Err(CliError::usage("--box needs a lattice-indexed source"))
                }
            };
            if lb.dim() != k {
                return Err(CliError::usage(format!("--box needs {k} radii")));
            }
            let mut body = String::from("index\tsymbol\n");
            for p in lb.points() {
                let g = if k == 1 && source.domain() == IndexDomain::Integers {
                    Index::Z(p[0])
                } else {
                    Index::Lattice(p.clone())
                };
                let (c, amb) = symbol_char(source.eval(&g))?;
                tainted |= amb;
                let idx: Vec<String> = p.iter().map(i64::to_string).collect();
                body.push_str(&format!("{}\t{c}\n", idx.join(",")));
            }
            (body, json!({"box": lb.radii}))
        }
        (None, None, Some(len)) => {
            if source.domain() != IndexDomain::FreeGroup {
                return Err(CliError::usage("--words needs a free-group source"));
            }
            let mut body = String::from("word\tsymbol\n");
            for w in reduced_words(len) {
                let (c, amb) = symbol_char(source.eval(&Index::Word(w.clone())))?;
                tainted |= amb;
                body.push_str(&format!("{w}\t{c}\n"));
            }
            (body, json!({"words": len}))
        }
        _ => {
            return Err(CliError::usage(
                "exactly one of --range, --box, --words is required",
            ))
        }
    };
    let mut m = RunManifest::new("generate", Some(doc.digest()), budgets);
    m.finish(ctx.started, tainted);
    emit(&args.out, &body, Some(&m))?;
    Ok(if tainted { EXIT_TAINTED } else { EXIT_OK })
}

fn budget_json(b: &ShiftBudget) -> Value {
    json!({"start": b.start, "end": b.end})
}

fn cmd_complexity(args: &ComplexityArgs, ctx: &Ctx) -> CliResult {
    let (source, doc) = load_source(&args.source.source)?;
    let shifts = args.budget.budget(ctx.workers);
    let table = complexity_table(&source, args.n_max, &shifts)?;
    let mut m = RunManifest::new(
        "complexity",
        Some(doc.digest()),
        json!({"n_max": args.n_max, "shifts": budget_json(&shifts)}),
    );
    m.finish(ctx.started, table.tainted);
    match args.format {
        Format::Csv => emit(&args.out, &table.to_csv(), Some(&m))?,
        Format::Json => emit(&args.out, &with_manifest(&m, &table), None)?,
    }
    Ok(if table.tainted { EXIT_TAINTED } else { EXIT_OK })
}

fn cmd_free(args: &FreeArgs, ctx: &Ctx) -> CliResult {
    let (source, doc) = load_source(&args.source.source)?;
    let shifts = args.budget.budget(ctx.workers);
    let pair_list: Vec<u8> = parse_list(&args.pair)?;
    let [s0, s1] = pair_list[..] else {
        return Err(CliError::usage("--pair takes two symbols"));
    };
    let pair = SymbolPair::new(s0, s1)?;
    let mut budgets = json!({"shifts": budget_json(&shifts), "pair": [s0, s1]});
    let (result, tainted, found) = if let Some(coords) = &args.coords {
        let coords = CoordinateSet::new(parse_list(coords)?)?;
        budgets["coords"] = json!(coords);
        let out = is_free(&source, &coords, pair, &shifts)?;
        let found = out.is_free() && out.certificate().is_some_and(|c| c.verified);
        (serde_json::to_value(&out)?, out.tainted(), found)
    } else if let Some(l) = args.window {
        let window = CoordinateSet::contiguous(l)?;
        let k_max = args.k_max.unwrap_or(l);
        budgets["window"] = json!(l);
        budgets["k_max"] = json!(k_max);
        budgets["nodes"] = json!(args.nodes);
        let report = max_free_size(&source, &window, pair, &shifts, k_max, args.nodes)?;
        (
            serde_json::to_value(&report)?,
            report.tainted,
            report.best.verified,
        )
    } else if let Some(lengths) = &args.lengths {
        let lengths: Vec<usize> = parse_list(lengths)?;
        budgets["lengths"] = json!(lengths);
        budgets["nodes"] = json!(args.nodes);
        let profile = free_density_profile(&source, &lengths, pair, &shifts, args.nodes)?;
        (serde_json::to_value(&profile)?, profile.tainted, true)
    } else {
        return Err(CliError::usage(
            "one of --coords, --window, --lengths is required",
        ));
    };
    let mut m = RunManifest::new("free", Some(doc.digest()), budgets);
    m.finish(ctx.started, tainted);
    emit(&args.out, &with_manifest(&m, &result), None)?;
    Ok(if tainted {
        EXIT_TAINTED
    } else if found {
        EXIT_OK
    } else {
        EXIT_NOT_FOUND
    })
}

fn parse_sequence(text: &str) -> Result<EntropySequence, CliError> {
    Ok(match text.split_once(':') {
        None if text == "identity" => EntropySequence::Identity,
        None if text == "geometric" => EntropySequence::Geometric,
        None if text == "kerr-li-blocks" => EntropySequence::kerr_li_blocks(),
        Some(("kerr-li-blocks", level)) => EntropySequence::KerrLiBlocks {
            level: level.parse()?,
        },
        Some(("explicit", terms)) => EntropySequence::Explicit {
            terms: parse_list(terms)?,
        },
        _ => return Err(CliError::usage(format!("unknown sequence `{text}`"))),
    })
}

fn cmd_entropy(args: &EntropyArgs, ctx: &Ctx) -> CliResult {
    let (source, doc) = load_source(&args.source.source)?;
    let shifts = args.budget.budget(ctx.workers);
    let sequence = parse_sequence(&args.sequence)?;
    let est = sequence_entropy(&source, &sequence, args.n_max, &shifts)?;
    let mut m = RunManifest::new(
        "entropy",
        Some(doc.digest()),
        json!({"n_max": args.n_max, "shifts": budget_json(&shifts), "sequence": sequence}),
    );
    m.finish(ctx.started, est.tainted);
    match args.format {
        Format::Csv => emit(&args.out, &est.to_csv(), Some(&m))?,
        Format::Json => emit(&args.out, &with_manifest(&m, &est), None)?,
    }
    Ok(if est.tainted { EXIT_TAINTED } else { EXIT_OK })
}

fn cmd_wap(args: &WapArgs, ctx: &Ctx) -> CliResult {
    let d = load_set(&args.d)?;
    let b = load_set(&args.b)?;
    let probe = RuppertProbe::new(d.clone(), b, args.f_max, parse_list(&args.horizons)?)?;
    let verdict = ruppert_test(&probe)?;
    let mut budgets = serde_json::to_value(&probe)?;
    let mut result = json!({"verdict": verdict});
    let mut tainted = false;
    if let (Some(n_max), Some(m)) = (args.note_n_max, args.note_shifts) {
        let shifts = ShiftBudget::centered(m).with_workers(ctx.workers);
        let note = wap_countability_note(&d, n_max, args.note_window, &shifts, 1 << 22)?;
        tainted = note.tainted;
        budgets["note"] =
            json!({"n_max": n_max, "shifts": budget_json(&shifts), "window": args.note_window});
        result["countability_note"] = serde_json::to_value(&note)?;
    }
    let mut m = RunManifest::new("wap", None, budgets);
    m.finish(ctx.started, tainted);
    emit(&args.out, &with_manifest(&m, &result), None)?;
    Ok(match verdict.outcome {
        _ if tainted => EXIT_TAINTED,
        RuppertOutcome::Pass => EXIT_OK,
        RuppertOutcome::FailEvidence => EXIT_NOT_FOUND,
    })
}

fn cmd_classify(args: &ClassifyArgs, ctx: &Ctx) -> CliResult {
    let (source, doc) = load_source(&args.source.source)?;
    let shifts = args.budget.budget(ctx.workers);
    let mut profile = BudgetProfile::new(shifts, parse_list(&args.windows)?, args.k_target);
    profile.node_budget = args.nodes;
    profile.prefix_len = args.prefix_len;
    let report = classify(&source, &profile)?;
    let mut m = RunManifest::new(
        "classify",
        Some(doc.digest()),
        serde_json::to_value(&profile)?,
    );
    m.finish(ctx.started, report.tainted);
    emit(&args.out, &with_manifest(&m, &report), None)?;
    Ok(if report.tainted {
        EXIT_TAINTED
    } else {
        EXIT_OK
    })
}

fn parse_point(text: &str, bits: u32) -> Result<TorusPoint, CliError> {
    let coords = text
        .split(',')
        .map(|c| {
            parse_constant(c.trim(), bits)
                .map_err(CliError::usage)?
                .resolve(bits)
                .map_err(CliError::from)
        })
        .collect::<Result<Vec<FixedPointFrac>, _>>()?;
    Ok(TorusPoint::new(coords)?)
}

fn cmd_safe_radius(args: &SafeRadiusArgs, ctx: &Ctx) -> CliResult {
    let b = args.bits;
    let alpha = parse_point(&args.alpha, b)?;
    let y0 = parse_point(&args.y0, b)?;
    let center = parse_point(&args.center, b)?;
    let r_min = parse_constant(&args.r_min, b)
        .map_err(CliError::usage)?
        .resolve(b)?;
    let r_max = parse_constant(&args.r_max, b)
        .map_err(CliError::usage)?
        .resolve(b)?;
    let delta = SqFrac::pow2_neg(args.delta_bits, 2 * b);
    let budgets = json!({
        "alpha": args.alpha, "y0": args.y0, "center": args.center, "n": args.n,
        "r_min": args.r_min, "r_max": args.r_max, "delta_bits": args.delta_bits, "bits": b,
    });
    let mut m = RunManifest::new("safe-radius", None, budgets);
    match choose_safe_radius(&alpha, &y0, &center, args.n, &r_min, &r_max, &delta) {
        Ok(safe) => {
            m.finish(ctx.started, false);
            let result = json!({
                "sq_radius": safe.sq_radius.to_hex(),
                "margin": safe.margin.to_hex(),
                "sq_radius_approx": safe.sq_radius.to_f64(),
                "margin_approx": safe.margin.to_f64(),
                "obstructions": safe.obstructions,
                "frac_bits": 2 * b,
            });
            emit(&args.out, &with_manifest(&m, &result), None)?;
            Ok(EXIT_OK)
        }
        Err(e @ SourceError::NoSafeRadius { .. }) => {
            m.finish(ctx.started, false);
            emit(
                &args.out,
                &with_manifest(&m, &json!({"error": e.to_string()})),
                None,
            )?;
            Ok(EXIT_NOT_FOUND)
        }
        Err(e) => Err(e.into()),
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> u8 {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // a second initialization (e.g. in tests) keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let ctx = Ctx {
        workers: cli.threads.unwrap_or_else(rayon::current_num_threads),
        started: cli.record_time.then(Instant::now),
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, &ctx),
        Command::Complexity(a) => cmd_complexity(a, &ctx),
        Command::Free(a) => cmd_free(a, &ctx),
        Command::Entropy(a) => cmd_entropy(a, &ctx),
        Command::Wap(a) => cmd_wap(a, &ctx),
        Command::Classify(a) => cmd_classify(a, &ctx),
        Command::SafeRadius(a) => cmd_safe_radius(a, &ctx),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_syntax() {
        assert_eq!(parse_constant("golden", 64).unwrap(), Constant::golden());
        assert_eq!(
            parse_constant("-golden", 64).unwrap(),
            Constant::golden().negated()
        );
        assert_eq!(
            parse_constant("rational:1/10", 64).unwrap(),
            Constant::rational(1, 10)
        );
        assert_eq!(
            parse_constant("sqrt:2/1", 64).unwrap(),
            Constant::sqrt_rational(2, 1)
        );
        assert!(parse_constant("pi", 64).is_err());
        assert!(parse_constant("rational:1", 64).is_err());
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("0..5").unwrap(), (0, 5));
        assert_eq!(parse_range("-3..-1").unwrap(), (-3, -1));
        assert!(parse_range("5..0").is_err());
        assert_eq!(parse_list::<i64>("0, 2,-4").unwrap(), vec![0, 2, -4]);
        assert!(matches!(
            parse_sequence("explicit:1,3").unwrap(),
            EntropySequence::Explicit { .. }
        ));
        assert!(parse_sequence("primes").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
