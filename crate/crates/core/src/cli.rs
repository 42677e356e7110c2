//! The `specforge` command line.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::catalog::{
    catalog_stats, filter_tables, load_catalog_set, CatalogSet, FilterCriteria, IntervalKey, KipClass, KipQuery,
};
use crate::collation::{anomaly_hints, sort_designations, structure_frequencies, AnomalyThresholds};
use crate::drawing::{document_from_str, load_document, save_document, Document};
use crate::geom::{Mm, Point};
use crate::pipeline::{attach_table_module, autofill};
use crate::po::{check_duplicates_files, list_designations, DuplicateScope, ObjectType};
use crate::rules::{run_session, Answer, ScriptedAnswers, SelectionSession};
use crate::service::{ServiceConfig, DEFAULT_SESSION_TTL};
use crate::table::{layout, load_table_kind, paginate, Direction, GoodsBuffer, HeadMode, TableInstance, TableKind, TableOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "specforge", version, about = "Specifications, table documents and catalogs for drawings")]
pub struct Cli {
    /// Catalog directory.
    #[arg(long, global = true, env = "SPECFORGE_CATALOG_DIR")]
    pub catalog: Option<PathBuf>,
    /// Directory of table kind files.
    #[arg(long, global = true, env = "SPECFORGE_KINDS_DIR")]
    pub kinds: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Catalog checks and queries.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Position designations.
    #[command(subcommand)]
    Po(PoCmd),
    /// Table files.
    #[command(subcommand)]
    Table(TableCmd),
    /// Specification tables from drawings.
    #[command(subcommand)]
    Spec(SpecCmd),
    /// Selection sessions.
    #[command(subcommand)]
    Session(SessionCmd),
    /// Runs the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
pub enum CatalogCmd {
    /// Loads and cross-checks the catalog directory.
    Validate,
    /// Counts per profile.
    Stats {
        /// Profiles to report even when they have no tables.
        #[arg(long = "profile")]
        profiles: Vec<String>,
    },
    /// Tables matching all given criteria.
    Filter(FilterArgs),
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, value_parser = serde_enum::<ObjectType>)]
    object_type: Option<ObjectType>,
    /// Keyword in the group path.
    #[arg(long)]
    group: Option<String>,
    #[arg(long, value_parser = serde_enum::<KipClass>)]
    kip_class: Option<KipClass>,
    #[arg(long)]
    kip_letter: Option<char>,
    #[arg(long)]
    dn: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    thread: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum PoCmd {
    /// Prints the designations in collation order.
    Sort { files: Vec<PathBuf> },
    /// Structure signatures with their counts.
    Structures { files: Vec<PathBuf> },
    /// Designations whose structure looks like a typing error.
    Lint { files: Vec<PathBuf> },
    /// Designations used more than once across drawing files.
    Dedupe {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Comma list of po, axono, vk.
        #[arg(long, default_value = "po,axono,vk")]
        scope: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum TableCmd {
    /// Writes an empty table of a kind.
    New {
        /// Kind name in the kinds directory, or a kind file.
        #[arg(long)]
        kind: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Applies operations to a table file, in place unless --out is given.
    Op {
        table: PathBuf,
        /// Operations as JSON: one object or an array.
        #[arg(long, conflicts_with = "ops_file")]
        ops: Option<String>,
        /// File holding the operations.
        #[arg(long)]
        ops_file: Option<PathBuf>,
        /// Goods buffer file, read before and written after.
        #[arg(long)]
        buffer: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Splits a table into pieces no taller than --max-height millimetres.
    Paginate {
        table: PathBuf,
        #[arg(long)]
        max_height: f64,
        #[arg(long, value_parser = serde_enum::<Direction>, default_value = "right")]
        direction: Direction,
        #[arg(long, value_parser = serde_enum::<HeadMode>, default_value = "repeat_header")]
        mode: HeadMode,
    },
    /// Prints the rows as text, or the layout in JSON mode.
    Render { table: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum SpecCmd {
    /// Fills a table of a kind from the PO modules of a drawing.
    Autofill {
        document: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "po,axono,vk")]
        scope: String,
        /// Writes the table file here.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Places the table on the drawing at X,Y and saves the drawing.
        #[arg(long, value_parser = parse_point)]
        attach: Option<Point>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SessionCmd {
    /// Runs a selection headlessly with scripted answers.
    Run {
        #[arg(long)]
        table: String,
        #[arg(long)]
        row: usize,
        /// JSON array of answers: option indices, numbers or texts.
        #[arg(long)]
        answers: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    /// Idle seconds before a session expires.
    #[arg(long, default_value_t = DEFAULT_SESSION_TTL.as_secs())]
    session_ttl: u64,
    /// Fixes the id generator.
    #[arg(long)]
    seed: Option<u64>,
}

fn serde_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected X,Y")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| e.to_string());
    Ok(Point::mm(num(x)?, num(y)?))
}

/// A failed command: usage errors exit with 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

type CliResult = Result<(), CliError>;

struct Ctx<'a> {
    cli: &'a Cli,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn json<T: Serialize + ?Sized>(&mut self, v: &T) -> CliResult {
        let s = serde_json::to_string_pretty(v).map_err(domain)?;
        writeln!(self.out, "{s}").map_err(domain)
    }

    fn line(&mut self, s: impl std::fmt::Display) -> CliResult {
        writeln!(self.out, "{s}").map_err(domain)
    }

    fn is_json(&self) -> bool {
        self.cli.format == Format::Json
    }

    fn catalog(&self) -> Result<CatalogSet, CliError> {
        let dir = self
            .cli
            .catalog
            .as_ref()
            .ok_or_else(|| CliError::Usage("no catalog: pass --catalog or set SPECFORGE_CATALOG_DIR".into()))?;
        load_catalog_set(dir).map_err(domain)
    }

    fn kind(&self, name: &str) -> Result<TableKind, CliError> {
        let direct = Path::new(name);
        let path = if direct.is_file() {
            direct.to_path_buf()
        } else {
            let dir = self
                .cli
                .kinds
                .as_ref()
                .ok_or_else(|| CliError::Usage(format!("kind {name:?} is not a file and no --kinds directory is set")))?;
            dir.join(format!("{name}.json"))
        };
        load_table_kind(&path).map_err(domain)
    }
}

/// Parses `argv` and runs the command. Returns the exit code.
pub fn main_with(argv: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return e.exit_code();
        }
    };
    match run(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let mut ctx = Ctx { cli, out };
    match &cli.command {
        Command::Catalog(c) => catalog_cmd(&mut ctx, c),
        Command::Po(c) => po_cmd(&mut ctx, c),
        Command::Table(c) => table_cmd(&mut ctx, c),
        Command::Spec(c) => spec_cmd(&mut ctx, c),
        Command::Session(c) => session_cmd(&mut ctx, c),
        Command::Serve(a) => serve_cmd(&mut ctx, a),
    }
}

fn catalog_cmd(ctx: &mut Ctx, c: &CatalogCmd) -> CliResult {
    let set = ctx.catalog()?;
    match c {
        CatalogCmd::Validate => {
            let profiles = set.profiles().len();
            let tables = set.registry().len();
            if ctx.is_json() {
                ctx.json(&serde_json::json!({ "valid": true, "tables": tables, "profiles": profiles }))
            } else {
                ctx.line(format!("catalog ok: {tables} tables, {profiles} profiles"))
            }
        }
        CatalogCmd::Stats { profiles } => {
            let extra: Vec<&str> = profiles.iter().map(String::as_str).collect();
            let stats = catalog_stats(&set, &extra);
            if ctx.is_json() {
                return ctx.json(&stats);
            }
            ctx.line("profile\tcatalogs\ttables\tproperties\tmm\tunnamed_mm\trows\tmin\tmax")?;
            for s in stats {
                ctx.line(format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    s.profile,
                    s.catalogs,
                    s.tables,
                    s.property_names,
                    s.mm_properties,
                    s.unnamed_mm_properties,
                    s.rows_total,
                    s.rows_min,
                    s.rows_max
                ))?;
            }
            Ok(())
        }
        CatalogCmd::Filter(a) => {
            let kip = (a.kip_class.is_some() || a.kip_letter.is_some())
                .then_some(KipQuery { class: a.kip_class, letter: a.kip_letter });
            let intervals = [
                (IntervalKey::Dn, a.dn),
                (IntervalKey::P, a.p),
                (IntervalKey::T, a.t),
                (IntervalKey::D, a.d),
                (IntervalKey::Thread, a.thread),
            ]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .collect();
            let criteria = FilterCriteria {
                profile: a.profile.clone(),
                object_type: a.object_type,
                group_keyword: a.group.clone(),
                kip,
                intervals,
            };
            let hits = filter_tables(&set, &criteria);
            if ctx.is_json() {
                return ctx.json(&hits);
            }
            for e in hits {
                ctx.line(format!("{}\t{}\t{}", e.table, e.profile, e.title))?;
            }
            Ok(())
        }
    }
}

/// Designations from drawing files (JSON) or plain lists, one per line.
fn read_designations(files: &[PathBuf]) -> Result<Vec<String>, CliError> {
    if files.is_empty() {
        return Err(CliError::Usage("no input files".into()));
    }
    let mut out = Vec::new();
    for f in files {
        let text = fs::read_to_string(f).map_err(|e| domain(format!("{}: {e}", f.display())))?;
        if text.trim_start().starts_with('{') {
            let (doc, _) = document_from_str(&text, &f.display().to_string()).map_err(domain)?;
            out.extend(list_designations(&doc).into_iter().map(|d| d.designation));
        } else {
            out.extend(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string));
        }
    }
    Ok(out)
}

fn po_cmd(ctx: &mut Ctx, c: &PoCmd) -> CliResult {
    match c {
        PoCmd::Sort { files } => {
            let mut ds = read_designations(files)?;
            sort_designations(&mut ds);
            if ctx.is_json() {
                return ctx.json(&ds);
            }
            ds.iter().try_for_each(|d| ctx.line(d))
        }
        PoCmd::Structures { files } => {
            let ds = read_designations(files)?;
            let freq = structure_frequencies(&ds);
            if ctx.is_json() {
                let v: Vec<Value> = freq.iter().map(|(s, n)| serde_json::json!({ "signature": s, "count": n })).collect();
                return ctx.json(&v);
            }
            freq.iter().try_for_each(|(s, n)| ctx.line(format!("{n}\t{s}")))
        }
        PoCmd::Lint { files } => {
            let ds = read_designations(files)?;
            let hints = anomaly_hints(&ds, AnomalyThresholds::default());
            if ctx.is_json() {
                return ctx.json(&hints);
            }
            hints.iter().try_for_each(|h| ctx.line(format!("{}\t{:?}\t{}", h.designation, h.kind, h.evidence)))
        }
        PoCmd::Dedupe { files, scope } => {
            let scope = DuplicateScope::parse_list(scope).map_err(|e| CliError::Usage(e.to_string()))?;
            let report = check_duplicates_files(files, &scope).map_err(domain)?;
            if ctx.is_json() {
                return ctx.json(&report);
            }
            write!(ctx.out, "{}", report.to_text()).map_err(domain)
        }
    }
}

fn read_table(path: &Path) -> Result<TableInstance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))?;
    TableInstance::from_json(&text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

/// Tab-separated field texts: titles first, then one line per row.
fn render_text(t: &TableInstance) -> String {
    let kind = t.kind();
    let leaves = kind.block.leaves();
    let flat = |s: String| s.replace('\n', " / ");
    let mut s = leaves.iter().map(|l| flat(kind.title_of(l).to_string())).collect::<Vec<_>>().join("\t");
    s.push('\n');
    for r in t.rows() {
        s.push_str(&leaves.iter().map(|l| flat(t.field_text(r, &l.field).unwrap_or_default())).collect::<Vec<_>>().join("\t"));
        s.push('\n');
    }
    s
}

fn parse_ops(text: &str) -> Result<Vec<TableOp>, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("operations: {e}")))?;
    let items = match v {
        Value::Array(a) => a,
        other => vec![other],
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| serde_json::from_value(v).map_err(|e| CliError::Usage(format!("operation {i}: {e}"))))
        .collect()
}

fn table_cmd(ctx: &mut Ctx, c: &TableCmd) -> CliResult {
    match c {
        TableCmd::New { kind, out } => {
            let t = TableInstance::new(ctx.kind(kind)?);
            match out {
                Some(p) => write_file(p, &t.to_json()),
                None => ctx.line(t.to_json().trim_end()),
            }
        }
        TableCmd::Op { table, ops, ops_file, buffer, out } => {
            let text = match (ops, ops_file) {
                (Some(s), None) => s.clone(),
                (None, Some(p)) => fs::read_to_string(p).map_err(|e| domain(format!("{}: {e}", p.display())))?,
                _ => return Err(CliError::Usage("give --ops or --ops-file".into())),
            };
            let ops = parse_ops(&text)?;
            let mut t = read_table(table)?;
            let mut buf = match buffer {
                Some(p) if p.exists() => {
                    let s = fs::read_to_string(p).map_err(|e| domain(format!("{}: {e}", p.display())))?;
                    serde_json::from_str(&s).map_err(|e| domain(format!("{}: {e}", p.display())))?
                }
                _ => GoodsBuffer::default(),
            };
            let n = ops.len();
            for (i, op) in ops.into_iter().enumerate() {
                t.apply(op, &mut buf).map_err(|e| domain(format!("operation {i}: {e}")))?;
            }
            write_file(out.as_ref().unwrap_or(table), &t.to_json())?;
            if let Some(p) = buffer {
                write_file(p, &serde_json::to_string_pretty(&buf).map_err(domain)?)?;
            }
            if ctx.is_json() {
                ctx.json(&serde_json::json!({ "applied": n, "rows": t.len(), "marks": t.marks(), "buffer_rows": buf.rows.len() }))
            } else {
                ctx.line(format!("{n} operations applied, {} rows", t.len()))
            }
        }
        TableCmd::Paginate { table, max_height, direction, mode } => {
            let t = read_table(table)?;
            let chunks = paginate(&t, Mm::from_f64(*max_height), *direction, *mode).map_err(domain)?;
            if ctx.is_json() {
                return ctx.json(&chunks);
            }
            for (i, ch) in chunks.iter().enumerate() {
                let rows: Vec<String> = ch
                    .body
                    .iter()
                    .filter_map(|b| match b {
                        crate::table::BandKind::Data(r) => Some(r.to_string()),
                        _ => None,
                    })
                    .collect();
                ctx.line(format!("piece {}\theight {}\tx {}\trows {}", i + 1, ch.height, ch.x_offset, rows.join(",")))?;
            }
            Ok(())
        }
        TableCmd::Render { table } => {
            let t = read_table(table)?;
            if ctx.is_json() {
                ctx.json(&layout(&t))
            } else {
                write!(ctx.out, "{}", render_text(&t)).map_err(domain)
            }
        }
    }
}

fn spec_cmd(ctx: &mut Ctx, c: &SpecCmd) -> CliResult {
    let SpecCmd::Autofill { document, kind, scope, out, attach } = c;
    let scope = DuplicateScope::parse_list(scope).map_err(|e| CliError::Usage(e.to_string()))?;
    let kind = ctx.kind(kind)?;
    let mut doc: Document = load_document(document).map_err(domain)?;
    let t = autofill(&doc, &kind, &scope).map_err(domain)?;
    if let Some(p) = out {
        write_file(p, &t.to_json())?;
    }
    if ctx.is_json() {
        ctx.json(&t)?;
    } else {
        write!(ctx.out, "{}", render_text(&t)).map_err(domain)?;
    }
    if let Some(at) = attach {
        attach_table_module(&mut doc, t, *at);
        save_document(&doc, document).map_err(domain)?;
    }
    Ok(())
}

fn session_cmd(ctx: &mut Ctx, c: &SessionCmd) -> CliResult {
    let SessionCmd::Run { table, row, answers } = c;
    let set = ctx.catalog()?;
    let script: Vec<Answer> = match answers {
        Some(p) => {
            let s = fs::read_to_string(p).map_err(|e| domain(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&s).map_err(|e| domain(format!("{}: {e}", p.display())))?
        }
        None => Vec::new(),
    };
    let mut session: SelectionSession = crate::rules::start_session(&set, table, *row).map_err(domain)?;
    let fields = run_session(&mut session, &mut ScriptedAnswers(script.into())).map_err(domain)?;
    if ctx.is_json() {
        return ctx.json(&fields);
    }
    for (k, v) in &fields.fields {
        ctx.line(format!("{k}\t{v}"))?;
    }
    Ok(())
}

fn serve_cmd(ctx: &mut Ctx, a: &ServeArgs) -> CliResult {
    let catalog = match &ctx.cli.catalog {
        Some(_) => Some(Arc::new(ctx.catalog()?)),
        None => None,
    };
    let config = ServiceConfig {
        catalog,
        kinds_dir: ctx.cli.kinds.clone(),
        session_ttl: Duration::from_secs(a.session_ttl),
        seed: a.seed,
    };
    let addr = SocketAddr::new(a.host, a.port);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(domain)?;
    rt.block_on(crate::service::serve(config, addr)).map_err(domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_and_enums() {
        assert_eq!(parse_point("10, 20.5").unwrap(), Point::mm(10.0, 20.5));
        assert!(parse_point("10").is_err());
        assert_eq!(serde_enum::<HeadMode>("graph-numbers").unwrap(), HeadMode::GraphNumbers);
        assert!(serde_enum::<Direction>("up").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(main_with(["specforge".to_string(), "bogus".into()], &mut o, &mut e), 2);
        assert_eq!(main_with(["specforge".into(), "po".into(), "sort".into()], &mut o, &mut e), 2);
        assert_eq!(main_with(["specforge".into(), "--help".into()], &mut o, &mut e), 0);
    }
}
