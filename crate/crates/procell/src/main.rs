//! Command-line front end: load or build cell data, verify the axioms, run
//! classifications, and experiment with quotients and completions.
//!
//! Exit status contract (stable for CI): 0 success, 1 axiom or verification
//! failure, 2 usage or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use procell::cell::{BasisIndex, CellDatum};
use procell::completion::{smooth_classify, Completion, CompletionElement};
use procell::datum_json;
use procell::field::{Field, Scalar};
use procell::instances::poly::{monomial, poly_completion, POLY_TAB};
use procell::instances::ssyt::Partition;
use procell::instances::tl::tl_datum;
use procell::instances::tower::{tableau_tower, ColumnRemoval, TableauTower};
use procell::poset::{Coideal, Label, DEFAULT_UPSET_CAP};
use procell::rep::{classify, gram};
use procell::report::{
    aligned_table, axiom_json as axiom_report_json, axiom_text as axiom_report_text, Report,
};

#[derive(Parser)]
#[command(
    name = "procell",
    version,
    about = "Exact-arithmetic cellular algebras, their representation theory, and procellular completions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the JSON report instead of the text table.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled checks on lazily-enumerated posets.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for per-cell computations.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Builtin {
    Poly,
    Tl,
    Tower,
}

#[derive(Args)]
struct SpecArgs {
    /// Built-in instance.
    #[arg(long, value_enum, conflicts_with = "path")]
    builtin: Option<Builtin>,
    /// Datum file in the JSON interchange format.
    #[arg(long)]
    path: Option<PathBuf>,
    /// Strand count (tl) or entry bound (tower).
    #[arg(long)]
    n: Option<usize>,
    /// Loop parameter for the tl builtin, as an exact scalar string.
    #[arg(long)]
    delta: Option<String>,
    /// Truncate the poly builtin to the finite quotient at ⟨k⟩.
    #[arg(long)]
    truncate: Option<u64>,
    /// Ground field: q (rationals) or gf:p.
    #[arg(long, default_value = "q")]
    field: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check the cell-datum axioms exhaustively; nonzero exit on failure.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Per-cell table of dim W, dim L and membership in Λ₀.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Gram matrices, for one cell or all of them.
    Gram {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        cell: Option<String>,
    },
    /// Quotient by the coideal generated by --gens; emits the quotient
    /// datum and its axiom report.
    Quotient {
        #[command(flatten)]
        spec: SpecArgs,
        /// Comma-separated generator labels; empty for the zero algebra.
        #[arg(long, value_delimiter = ',', num_args = 0.., default_missing_value = "")]
        gens: Vec<String>,
        /// Write the quotient datum file here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smooth-simple classification within a working window.
    Smooth {
        #[command(flatten)]
        spec: SpecArgs,
        /// Window: a number k (poly: ⟨k⟩), a partition label (tower), or
        /// comma-separated cell labels (finite data; default whole poset).
        #[arg(long)]
        bound: Option<String>,
    },
    /// Multiply two completion elements and print the truncated product.
    CompleteMul {
        #[command(flatten)]
        spec: SpecArgs,
        /// Named generator (geometric, delta) or a polynomial expression.
        e1: String,
        e2: String,
        /// Print product coefficients for cells 0..=k.
        #[arg(long)]
        bound: u64,
    },
    /// Export a finite datum (or truncation) to the JSON format.
    Export {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Errors are split by exit status: usage/parse problems exit 2,
/// verification failures exit 1.
enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> CliError {
        CliError::Usage(e.to_string())
    }

    fn failure(e: impl std::fmt::Display) -> CliError {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_field(spec: &SpecArgs) -> CliResult<Field> {
    Field::parse(&spec.field).map_err(CliError::usage)
}

fn parse_delta(spec: &SpecArgs, field: Field) -> CliResult<Scalar> {
    let text = spec.delta.as_deref().unwrap_or("1");
    field.parse_scalar(text).map_err(CliError::usage)
}

/// A finite datum for verify/classify/gram/export: a file, the tl builtin,
/// or a poly truncation.
fn finite_datum(spec: &SpecArgs, seed: u64) -> CliResult<CellDatum> {
    if let Some(path) = &spec.path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        return datum_json::load_str(&text).map_err(CliError::usage);
    }
    match spec.builtin {
        Some(Builtin::Tl) => {
            let field = parse_field(spec)?;
            let n = spec.n.ok_or_else(|| CliError::Usage("tl builtin needs --n".into()))?;
            let delta = parse_delta(spec, field)?;
            tl_datum(n, &delta).map_err(CliError::usage)
        }
        Some(Builtin::Poly) => {
            let k = spec
                .truncate
                .ok_or_else(|| CliError::Usage("poly builtin needs --truncate k".into()))?;
            let completion = poly_completion_for(spec, seed)?;
            let p = completion
                .datum()
                .poset()
                .coideal(&[Label::new(k.to_string())], DEFAULT_UPSET_CAP)
                .map_err(CliError::usage)?;
            let q = completion.quotient_at(&p).map_err(CliError::usage)?;
            Ok(q.datum().clone())
        }
        Some(Builtin::Tower) => Err(CliError::Usage(
            "the tower builtin ships labels only (no multiplication); use smooth".into(),
        )),
        None => Err(CliError::Usage("give --builtin or --path".into())),
    }
}

fn poly_completion_for(spec: &SpecArgs, seed: u64) -> CliResult<Completion> {
    let field = parse_field(spec)?;
    poly_completion(field, seed).map_err(CliError::usage)
}

fn cmd_verify(spec: &SpecArgs, seed: u64, json_mode: bool) -> CliResult<()> {
    let d = finite_datum(spec, seed)?;
    let report = d.verify().map_err(CliError::failure)?;
    let out = Report::new(
        json!({
            "command": "verify",
            "datum": d.name(),
            "dimension": d.dimension().map_err(CliError::failure)?,
            "report": axiom_report_json(&report),
        }),
        axiom_report_text(d.name(), &report),
    );
    println!("{}", out.render(json_mode));
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Failure("axiom verification failed".into()))
    }
}

fn cmd_classify(spec: &SpecArgs, seed: u64, json_mode: bool) -> CliResult<()> {
    let d = finite_datum(spec, seed)?;
    let report = d.verify().map_err(CliError::failure)?;
    if !report.passed() {
        println!("{}", axiom_report_text(d.name(), &report));
        return Err(CliError::Failure("datum fails verification".into()));
    }
    let c = classify(&d).map_err(CliError::failure)?;
    let mut json = procell::report::classification_json(&c);
    if let serde_json::Value::Object(map) = &mut json {
        map.insert("command".into(), json!("classify"));
        map.insert("datum".into(), json!(d.name()));
    }
    let out = Report::new(json, procell::report::classification_text(d.name(), &c));
    println!("{}", out.render(json_mode));
    Ok(())
}

fn cmd_gram(spec: &SpecArgs, cell: Option<&str>, seed: u64, json_mode: bool) -> CliResult<()> {
    let d = finite_datum(spec, seed)?;
    let cells = match cell {
        Some(c) => vec![Label::new(c)],
        None => d.cells().map_err(CliError::failure)?,
    };
    let mut text = format!("Gram forms of {}\n", d.name());
    let mut cells_json = Vec::new();
    for cell in &cells {
        let g = gram(&d, cell).map_err(CliError::usage)?;
        let n = g.matrix.rows();
        text.push_str(&format!("cell {cell} ({n}x{n}), rank {}\n", g.matrix.rank()));
        let mut rows_json = Vec::new();
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|c| g.matrix.at(r, c).to_string()).collect();
            text.push_str(&format!("  [{}]\n", row.join(", ")));
            rows_json.push(row);
        }
        cells_json.push(json!({
            "cell": cell.to_string(),
            "rank": g.matrix.rank(),
            "matrix": rows_json,
        }));
    }
    let out = Report::new(
        json!({ "command": "gram", "datum": d.name(), "cells": cells_json }),
        text,
    );
    println!("{}", out.render(json_mode));
    Ok(())
}

fn cmd_quotient(
    spec: &SpecArgs,
    gens: &[String],
    out_path: Option<&PathBuf>,
    seed: u64,
    json_mode: bool,
) -> CliResult<()> {
    let gens: Vec<Label> = gens
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| Label::new(g.clone()))
        .collect();
    // build the parent: poly stays infinite here, with the coideal doing
    // the truncation
    let (parent, completion) = match spec.builtin {
        Some(Builtin::Poly) => {
            let c = poly_completion_for(spec, seed)?;
            (c.datum().clone(), Some(c))
        }
        _ => (finite_datum(spec, seed)?, None),
    };
    let p = parent
        .poset()
        .coideal(&gens, DEFAULT_UPSET_CAP)
        .map_err(CliError::usage)?;
    let q = match &completion {
        Some(c) => c.quotient_at(&p).map_err(CliError::usage)?,
        None => procell::completion::quotient(&parent, &p).map_err(CliError::usage)?,
    };
    let d = q.datum();
    let report = d.verify().map_err(CliError::failure)?;
    let file = datum_json::save(d).map_err(CliError::failure)?;
    let file_json = file.to_json();
    let mut text = String::new();
    if p.is_empty() {
        text.push_str("empty generator set: the quotient is the zero algebra\n");
    }
    text.push_str(&format!(
        "quotient of {} at coideal {{{}}} ({} cells, dimension {})\n",
        parent.name(),
        p.members_in_order()
            .map_err(CliError::failure)?
            .iter()
            .map(Label::to_string)
            .collect::<Vec<_>>()
            .join(", "),
        p.len(),
        d.dimension().map_err(CliError::failure)?,
    ));
    text.push_str(&axiom_report_text(d.name(), &report));
    match out_path {
        Some(path) => {
            std::fs::write(path, &file_json)
                .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?;
            text.push_str(&format!("datum written to {}\n", path.display()));
        }
        None => {
            text.push_str(&file_json);
            text.push('\n');
        }
    }
    let out = Report::new(
        json!({
            "command": "quotient",
            "parent": parent.name(),
            "coideal": p.members_in_order().map_err(CliError::failure)?
                .iter().map(Label::to_string).collect::<Vec<_>>(),
            "dimension": d.dimension().map_err(CliError::failure)?,
            "report": axiom_report_json(&report),
            "datum": serde_json::from_str::<serde_json::Value>(&file_json).expect("datum json"),
        }),
        text,
    );
    println!("{}", out.render(json_mode));
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Failure("quotient datum fails verification".into()))
    }
}

fn tower_bound(tower: &TableauTower, bound: Option<&str>) -> CliResult<Coideal> {
    let bound = bound.ok_or_else(|| CliError::Usage("tower smooth needs --bound".into()))?;
    let shape = Partition::parse(bound).map_err(CliError::usage)?;
    tower
        .poset()
        .coideal(&[shape.label()], DEFAULT_UPSET_CAP)
        .map_err(CliError::usage)
}

fn cmd_smooth_tower(spec: &SpecArgs, bound: Option<&str>, json_mode: bool) -> CliResult<()> {
    let n = spec.n.ok_or_else(|| CliError::Usage("tower builtin needs --n".into()))? as u32;
    let tower = tableau_tower(n).map_err(CliError::usage)?;
    let p = tower_bound(&tower, bound)?;
    let mut rows = Vec::new();
    let mut cells_json = Vec::new();
    let mut coherent = true;
    for cell in p.members_in_order().map_err(CliError::failure)? {
        let shape = Partition::parse(cell.as_str()).map_err(CliError::failure)?;
        let tabs = tower.tableaux(&shape).map_err(CliError::failure)?;
        // the label-level connecting map treats all basis pairs of a cell
        // alike: all zero, or all removed onto one smaller shape
        let mut statuses = std::collections::BTreeSet::new();
        for s in &tabs {
            for t in &tabs {
                let status = match tower.connecting_label_map(s, t).map_err(CliError::failure)? {
                    ColumnRemoval::Zero => "zero".to_string(),
                    ColumnRemoval::Removed(sp, _) => format!("removes to {}", sp.shape().label()),
                };
                statuses.insert(status);
            }
        }
        if statuses.len() > 1 {
            coherent = false;
        }
        let status = statuses
            .into_iter()
            .collect::<Vec<_>>()
            .join(" / ");
        rows.push(vec![cell.to_string(), tabs.len().to_string(), status.clone()]);
        cells_json.push(json!({
            "cell": cell.to_string(),
            "tableaux": tabs.len(),
            "label_map": status,
        }));
    }
    let mut text = format!(
        "tableau tower n = {n}: coideal window with {} shapes\n",
        p.len()
    );
    text.push_str(&aligned_table(&["shape", "|M|", "connecting map"], &rows));
    text.push_str("note: the tower ships basis labels only (no multiplication, no Gram data)\n");
    text.push_str(&format!(
        "label-map coherence within each cell: {}\n",
        if coherent { "pass" } else { "FAIL" }
    ));
    let out = Report::new(
        json!({
            "command": "smooth",
            "builtin": "tower",
            "n": n,
            "bound": p.members_in_order().map_err(CliError::failure)?
                .iter().map(Label::to_string).collect::<Vec<_>>(),
            "cells": cells_json,
            "coherent": coherent,
            "gram_data": false,
        }),
        text,
    );
    println!("{}", out.render(json_mode));
    if coherent {
        Ok(())
    } else {
        Err(CliError::Failure("label-map coherence failed".into()))
    }
}

fn cmd_smooth(spec: &SpecArgs, bound: Option<&str>, seed: u64, json_mode: bool) -> CliResult<()> {
    if spec.builtin == Some(Builtin::Tower) {
        return cmd_smooth_tower(spec, bound, json_mode);
    }
    let (completion, p) = match spec.builtin {
        Some(Builtin::Poly) => {
            let c = poly_completion_for(spec, seed)?;
            let k: u64 = bound
                .ok_or_else(|| CliError::Usage("poly smooth needs --bound k".into()))?
                .parse()
                .map_err(|_| CliError::Usage("poly bound must be a natural number".into()))?;
            let p = c
                .datum()
                .poset()
                .coideal(&[Label::new(k.to_string())], DEFAULT_UPSET_CAP)
                .map_err(CliError::usage)?;
            (c, p)
        }
        _ => {
            let d = finite_datum(spec, seed)?;
            let c = Completion::new_seeded(&d, 16, DEFAULT_UPSET_CAP, seed)
                .map_err(CliError::usage)?;
            let gens: Vec<Label> = match bound {
                None => d.cells().map_err(CliError::failure)?,
                Some(b) => b.split(',').map(|s| Label::new(s.trim())).collect(),
            };
            let p = d
                .poset()
                .coideal(&gens, DEFAULT_UPSET_CAP)
                .map_err(CliError::usage)?;
            (c, p)
        }
    };
    let simples = smooth_classify(&completion, &p).map_err(CliError::failure)?;
    let rows: Vec<Vec<String>> = simples
        .iter()
        .map(|(cell, dim)| vec![cell.to_string(), dim.to_string()])
        .collect();
    let mut text = format!(
        "smooth simples of {} within window of {} cells\n",
        completion.datum().name(),
        p.len()
    );
    text.push_str(&aligned_table(&["cell", "dim_L"], &rows));
    let out = Report::new(
        json!({
            "command": "smooth",
            "datum": completion.datum().name(),
            "window": p.members_in_order().map_err(CliError::failure)?
                .iter().map(Label::to_string).collect::<Vec<_>>(),
            "simples": simples.iter().map(|(c, d)| json!({
                "cell": c.to_string(), "dim_l": d,
            })).collect::<Vec<_>>(),
        }),
        text,
    );
    println!("{}", out.render(json_mode));
    Ok(())
}

/// Parses a completion element: a named generator or, over the poly datum,
/// a polynomial expression such as `1 - x` or `2/3 x^4 + x`.
fn parse_element(c: &Completion, field: Field, s: &str) -> CliResult<CompletionElement> {
    if let Ok(e) = c.generator(s.trim()) {
        return Ok(e);
    }
    let terms = parse_poly_expr(field, s)?;
    let support: Vec<(BasisIndex, Scalar)> = terms
        .into_iter()
        .map(|(k, coeff)| (monomial(k), coeff))
        .collect();
    c.embed(&support).map_err(CliError::usage)
}

fn parse_poly_expr(field: Field, s: &str) -> CliResult<Vec<(u64, Scalar)>> {
    let bad = |msg: &str| CliError::Usage(format!("cannot parse element {s:?}: {msg}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty expression"));
    }
    let mut terms = Vec::new();
    let bytes = compact.as_bytes();
    let mut pos = 0usize;
    let mut sign = 1i64;
    // leading sign
    if bytes[pos] == b'+' || bytes[pos] == b'-' {
        sign = if bytes[pos] == b'-' { -1 } else { 1 };
        pos += 1;
    }
    loop {
        // coefficient literal: digits with optional /digits
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'/' && pos > start {
            pos += 1;
            let den_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == den_start {
                return Err(bad("missing denominator"));
            }
        }
        let coeff_text = &compact[start..pos];
        if pos < bytes.len() && bytes[pos] == b'*' {
            pos += 1;
        }
        // monomial part
        let mut exponent = 0u64;
        let mut has_x = false;
        if pos < bytes.len() && bytes[pos] == b'x' {
            has_x = true;
            pos += 1;
            exponent = 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let e_start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos == e_start {
                    return Err(bad("missing exponent"));
                }
                exponent = compact[e_start..pos].parse().map_err(|_| bad("exponent"))?;
            }
        }
        if coeff_text.is_empty() && !has_x {
            return Err(bad("expected a term"));
        }
        let mut coeff = if coeff_text.is_empty() {
            field.one()
        } else {
            field.parse_scalar(coeff_text).map_err(CliError::usage)?
        };
        if sign < 0 {
            coeff = coeff.neg();
        }
        terms.push((exponent, coeff));
        if pos == bytes.len() {
            break;
        }
        sign = match bytes[pos] {
            b'+' => 1,
            b'-' => -1,
            _ => return Err(bad("expected + or -")),
        };
        pos += 1;
        if pos == bytes.len() {
            return Err(bad("trailing sign"));
        }
    }
    Ok(terms)
}

fn cmd_complete_mul(
    spec: &SpecArgs,
    e1: &str,
    e2: &str,
    bound: u64,
    seed: u64,
    json_mode: bool,
) -> CliResult<()> {
    if spec.path.is_some() || (spec.builtin.is_some() && spec.builtin != Some(Builtin::Poly)) {
        return Err(CliError::Usage(
            "complete-mul is wired to the poly builtin (named generators: geometric, delta)".into(),
        ));
    }
    let field = parse_field(spec)?;
    let c = poly_completion_for(spec, seed)?;
    let x = parse_element(&c, field, e1)?;
    let y = parse_element(&c, field, e2)?;
    let prod = x.mul(&y);
    let mut coeffs = Vec::new();
    for k in 0..=bound {
        let v = prod
            .coeff(&BasisIndex::new(k.to_string(), POLY_TAB, POLY_TAB))
            .map_err(CliError::failure)?;
        coeffs.push(v.to_string());
    }
    let text = format!(
        "product coefficients at cells 0..={bound}\n({})\n",
        coeffs.join(", ")
    );
    let out = Report::new(
        json!({
            "command": "complete-mul",
            "bound": bound,
            "coefficients": coeffs,
        }),
        text,
    );
    println!("{}", out.render(json_mode));
    Ok(())
}

fn cmd_export(spec: &SpecArgs, out_path: Option<&PathBuf>, seed: u64) -> CliResult<()> {
    let d = finite_datum(spec, seed)?;
    let file = datum_json::save(&d).map_err(CliError::failure)?;
    let text = file.to_json();
    match out_path {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    // single-threaded unless --jobs raises it
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build_global()
        .ok(); // a second configuration attempt is harmless

    match &cli.command {
        Command::Verify { spec } => cmd_verify(spec, cli.seed, cli.json),
        Command::Classify { spec } => cmd_classify(spec, cli.seed, cli.json),
        Command::Gram { spec, cell } => cmd_gram(spec, cell.as_deref(), cli.seed, cli.json),
        Command::Quotient { spec, gens, out } => {
            cmd_quotient(spec, gens, out.as_ref(), cli.seed, cli.json)
        }
        Command::Smooth { spec, bound } => cmd_smooth(spec, bound.as_deref(), cli.seed, cli.json),
        Command::CompleteMul { spec, e1, e2, bound } => {
            cmd_complete_mul(spec, e1, e2, *bound, cli.seed, cli.json)
        }
        Command::Export { spec, out } => cmd_export(spec, out.as_ref(), cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
