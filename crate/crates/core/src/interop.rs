//! File formats: Gambit payoff-list `.nfg`, native `.game.json`, the
//! `MLIR-NASH v1` model text and JSON-lines result records.
//!
//! Grammars are given in `docs/formats.md`. Every writer is canonical, so
//! writing the value read from a canonical file reproduces it byte for byte.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulations::{
    Constraint, ConstraintFamily, Expr, FormulationId, Metadata, Monomial, MultilinearProgram, Objective, Relation,
    Sense, VarKind, Variable,
};
use crate::game::{Game, MixedProfile};
use crate::report::SolveReport;

pub const MODEL_MAGIC: &str = "MLIR-NASH v1";

/// Shortest decimal that parses back to `v`; integral values carry no
/// fraction and `-0` is written as `0`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

// ---------------------------------------------------------------- nfg

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Open,
    Close,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize_nfg(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (l, line) in text.lines().enumerate() {
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut k = 0;
        while k < chars.len() {
            let (_, c) = chars[k];
            let column = k + 1;
            if c.is_whitespace() {
                k += 1;
            } else if c == '{' || c == '}' {
                let tok = if c == '{' { Tok::Open } else { Tok::Close };
                out.push(Spanned { tok, line: l + 1, column });
                k += 1;
            } else if c == '"' {
                let mut s = String::new();
                k += 1;
                loop {
                    match chars.get(k) {
                        None => return Err(parse_error(l + 1, column, "unterminated string")),
                        Some(&(_, '\\')) => {
                            if let Some(&(_, e)) = chars.get(k + 1) {
                                s.push(e);
                            }
                            k += 2;
                        }
                        Some(&(_, '"')) => {
                            k += 1;
                            break;
                        }
                        Some(&(_, ch)) => {
                            s.push(ch);
                            k += 1;
                        }
                    }
                }
                out.push(Spanned {
                    tok: Tok::Quoted(s),
                    line: l + 1,
                    column,
                });
            } else {
                let start = k;
                while k < chars.len() && !chars[k].1.is_whitespace() && !matches!(chars[k].1, '{' | '}' | '"') {
                    k += 1;
                }
                let word: String = chars[start..k].iter().map(|&(_, ch)| ch).collect();
                out.push(Spanned {
                    tok: Tok::Word(word),
                    line: l + 1,
                    column,
                });
            }
        }
    }
    Ok(out)
}

/// Decimal, exponent or `a/b` rational payoff.
fn parse_payoff(word: &str) -> Option<f64> {
    if let Some((a, b)) = word.split_once('/') {
        let (a, b) = (a.parse::<f64>().ok()?, b.parse::<f64>().ok()?);
        return (b != 0.0).then(|| a / b);
    }
    word.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads the payoff-list variant of the Gambit `.nfg` format. Player names
/// are not kept; the title becomes the game name.
pub fn read_nfg(text: &str) -> Result<Game> {
    let toks = tokenize_nfg(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.column));
    let mut it = toks.into_iter();
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| parse_error(end.0, end.1, format!("unexpected end of input, expected {what}")))
    };
    for expected in ["NFG", "1", "R"] {
        let t = next(expected)?;
        if t.tok != Tok::Word(expected.to_string()) {
            return Err(parse_error(t.line, t.column, format!("expected '{expected}' in header")));
        }
    }
    let t = next("a quoted title")?;
    let Tok::Quoted(title) = t.tok else {
        return Err(parse_error(t.line, t.column, "expected a quoted title"));
    };
    let t = next("'{'")?;
    if t.tok != Tok::Open {
        return Err(parse_error(t.line, t.column, "expected '{' before player names"));
    }
    let mut players = 0;
    loop {
        let t = next("a player name or '}'")?;
        match t.tok {
            Tok::Quoted(_) => players += 1,
            Tok::Close => break,
            _ => return Err(parse_error(t.line, t.column, "expected a quoted player name")),
        }
    }
    let t = next("'{'")?;
    if t.tok != Tok::Open {
        return Err(parse_error(t.line, t.column, "expected '{' before strategy counts"));
    }
    let mut counts = Vec::new();
    loop {
        let t = next("a strategy count or '}'")?;
        match t.tok {
            Tok::Close => break,
            Tok::Word(w) => match w.parse::<usize>() {
                Ok(c) if c > 0 => counts.push(c),
                _ => return Err(parse_error(t.line, t.column, format!("bad strategy count '{w}'"))),
            },
            _ => return Err(parse_error(t.line, t.column, "expected a strategy count")),
        }
    }
    if counts.len() != players {
        return Err(parse_error(
            end.0,
            end.1,
            format!("{players} player names but {} strategy counts", counts.len()),
        ));
    }
    let mut payoffs_seen: Vec<(f64, usize, usize)> = Vec::new();
    for t in it {
        match t.tok {
            // An optional comment string may follow the header.
            Tok::Quoted(_) if payoffs_seen.is_empty() => {}
            Tok::Word(w) => match parse_payoff(&w) {
                Some(v) => payoffs_seen.push((v, t.line, t.column)),
                None => return Err(parse_error(t.line, t.column, format!("non-numeric payoff '{w}'"))),
            },
            _ => return Err(parse_error(t.line, t.column, "unexpected token among payoffs")),
        }
    }
    let n = counts.len();
    let profiles = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
    let expected = profiles.and_then(|p| p.checked_mul(n));
    if expected != Some(payoffs_seen.len()) {
        let (line, column) = payoffs_seen.last().map_or(end, |&(_, l, c)| (l, c));
        let want = expected.map_or("too many".to_string(), |e| e.to_string());
        return Err(parse_error(
            line,
            column,
            format!("wrong payoff count: expected {want}, found {}", payoffs_seen.len()),
        ));
    }
    let profiles = profiles.unwrap_or(0);
    let strides = row_major_strides(&counts);
    let mut payoffs = vec![vec![0.0; profiles]; n];
    let mut digits = vec![0usize; n];
    for chunk in payoffs_seen.chunks(n) {
        let flat: usize = digits.iter().zip(&strides).map(|(d, s)| d * s).sum();
        for (i, &(v, _, _)) in chunk.iter().enumerate() {
            payoffs[i][flat] = v;
        }
        advance_first_fastest(&mut digits, &counts);
    }
    let game = Game::new(counts, payoffs).map_err(|e| parse_error(end.0, end.1, e.to_string()))?;
    Ok(if title.is_empty() { game } else { game.with_name(title) })
}

fn row_major_strides(counts: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; counts.len()];
    for i in (0..counts.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * counts[i + 1];
    }
    strides
}

fn advance_first_fastest(digits: &mut [usize], counts: &[usize]) {
    for (d, &c) in digits.iter_mut().zip(counts) {
        *d += 1;
        if *d < c {
            return;
        }
        *d = 0;
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Canonical `.nfg` text: players are named `Player 1..n`, one profile of
/// payoffs per line with player 1's strategy varying fastest.
pub fn write_nfg(game: &Game) -> String {
    let counts = game.strategy_counts();
    let mut out = String::new();
    let names: Vec<String> = (1..=counts.len()).map(|i| quote(&format!("Player {i}"))).collect();
    let counts_text: Vec<String> = counts.iter().map(usize::to_string).collect();
    let _ = writeln!(
        out,
        "NFG 1 R {} {{ {} }} {{ {} }}\n",
        quote(game.name.as_deref().unwrap_or("")),
        names.join(" "),
        counts_text.join(" ")
    );
    let strides = game.strides();
    let mut digits = vec![0usize; counts.len()];
    for _ in 0..game.num_profiles() {
        let flat: usize = digits.iter().zip(&strides).map(|(d, s)| d * s).sum();
        let row: Vec<String> = (0..counts.len()).map(|i| format_number(game.payoffs(i)[flat])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
        advance_first_fastest(&mut digits, counts);
    }
    out
}

// --------------------------------------------------------------- json

pub fn write_game_json(game: &Game) -> String {
    let mut s = serde_json::to_string_pretty(game).expect("games serialise");
    s.push('\n');
    s
}

pub fn read_game_json(text: &str) -> Result<Game> {
    serde_json::from_str(text).map_err(|e| parse_error(e.line(), e.column(), e.to_string()))
}

pub fn read_profile_json(text: &str) -> Result<MixedProfile> {
    serde_json::from_str(text).map_err(|e| parse_error(e.line(), e.column(), e.to_string()))
}

pub fn write_profile_json(profile: &MixedProfile) -> String {
    let mut s = serde_json::to_string(profile).expect("profiles serialise");
    s.push('\n');
    s
}

/// Reads a game from `.nfg` or JSON text, chosen by the file extension.
pub fn load_game(path: &Path) -> Result<Game> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "nfg") {
        read_nfg(&text)
    } else {
        read_game_json(&text)
    }
}

// --------------------------------------------------------- model text

fn relation_symbol(r: Relation) -> &'static str {
    match r {
        Relation::Le => "<=",
        Relation::Eq => "=",
        Relation::Ge => ">=",
    }
}

fn sense_word(s: Sense) -> &'static str {
    match s {
        Sense::Max => "max",
        Sense::Min => "min",
        Sense::Feasibility => "feasibility",
    }
}

/// Canonical model text. Monomials are numbered in order of appearance,
/// constraints first, then the objective; identical programs give
/// identical text.
pub fn export_model(program: &MultilinearProgram) -> String {
    let names: Vec<String> = program.variables.iter().map(|v| v.kind.to_string()).collect();
    let meta = &program.metadata;
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC}");
    let _ = writeln!(out, "META");
    let _ = writeln!(out, "formulation {}", meta.formulation);
    let _ = writeln!(out, "game_hash {}", meta.game_hash);
    let counts: Vec<String> = meta.strategy_counts.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "strategy_counts {}", counts.join(" "));
    match meta.target_value {
        Some(t) => {
            let _ = writeln!(out, "target {}", format_number(t));
        }
        None => {
            let _ = writeln!(out, "target none");
        }
    }
    for w in &meta.warnings {
        let _ = writeln!(out, "warning {}", quote(w));
    }
    let _ = writeln!(out, "VARS");
    for (v, name) in program.variables.iter().zip(&names) {
        let _ = write!(out, "{name} {} {}", format_number(v.lower), format_number(v.upper));
        out.push_str(if v.binary { " BIN\n" } else { "\n" });
    }
    let _ = writeln!(out, "MONOMIALS");
    let mut next_id = 0usize;
    let mut ids_for = |expr: &Expr, out: &mut String| -> Vec<String> {
        expr.terms
            .iter()
            .map(|m| {
                let id = format!("m{next_id}");
                next_id += 1;
                let _ = write!(out, "{id} = {}", format_number(m.coeff));
                if !m.vars.is_empty() {
                    let vars: Vec<&str> = m.vars.iter().map(|&k| names[k].as_str()).collect();
                    let _ = write!(out, " * {}", vars.join(" "));
                }
                out.push('\n');
                id
            })
            .collect()
    };
    let constraint_ids: Vec<Vec<String>> = program.constraints.iter().map(|c| ids_for(&c.expr, &mut out)).collect();
    let objective_ids = ids_for(&program.objective.expr, &mut out);
    let sum = |ids: &[String]| if ids.is_empty() { "0".to_string() } else { ids.join(" + ") };
    let _ = writeln!(out, "CONSTRAINTS");
    for (c, ids) in program.constraints.iter().zip(&constraint_ids) {
        let _ = writeln!(
            out,
            "{}: {} {} {}",
            c.family.tag(),
            sum(ids),
            relation_symbol(c.relation),
            format_number(c.rhs)
        );
    }
    let _ = writeln!(out, "OBJECTIVE");
    let _ = writeln!(out, "{} {}", sense_word(program.objective.sense), sum(&objective_ids));
    let _ = writeln!(out, "constant {}", format_number(program.objective.constant));
    let _ = writeln!(out, "END");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Meta,
    Vars,
    Monomials,
    Constraints,
    Objective,
    End,
}

/// Parses model text produced by [`export_model`] (or written by hand to
/// the same grammar) back into a program.
pub fn parse_model(text: &str) -> Result<MultilinearProgram> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == MODEL_MAGIC => {}
        _ => return Err(parse_error(1, 1, format!("expected '{MODEL_MAGIC}'"))),
    }
    let mut section: Option<Section> = None;
    let mut formulation: Option<FormulationId> = None;
    let mut game_hash = None;
    let mut strategy_counts = None;
    let mut target_value = None;
    let mut warnings = Vec::new();
    let mut variables = Vec::new();
    let mut var_index: HashMap<String, usize> = HashMap::new();
    let mut monomials: HashMap<String, Monomial> = HashMap::new();
    let mut constraints = Vec::new();
    let mut objective: Option<(Sense, Expr)> = None;
    let mut constant = None;

    for (l, raw) in lines {
        let line = raw.trim();
        let lineno = l + 1;
        let col = |needle: &str| raw.find(needle).map_or(1, |c| c + 1);
        let err = |column: usize, msg: String| parse_error(lineno, column, msg);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let header = match line {
            "META" => Some(Section::Meta),
            "VARS" => Some(Section::Vars),
            "MONOMIALS" => Some(Section::Monomials),
            "CONSTRAINTS" => Some(Section::Constraints),
            "OBJECTIVE" => Some(Section::Objective),
            "END" => Some(Section::End),
            _ => None,
        };
        if let Some(h) = header {
            section = Some(h);
            continue;
        }
        let num = |word: &str| {
            word.parse::<f64>()
                .map_err(|_| err(col(word), format!("expected a number, got '{word}'")))
        };
        let resolve_sum = |body: &str, monomials: &HashMap<String, Monomial>| -> Result<Expr> {
            let mut expr = Expr::default();
            if body.trim() == "0" {
                return Ok(expr);
            }
            for id in body.split('+').map(str::trim) {
                let m = monomials
                    .get(id)
                    .ok_or_else(|| err(col(id), format!("unknown monomial '{id}'")))?;
                expr.terms.push(m.clone());
            }
            Ok(expr)
        };
        match section {
            None => return Err(err(1, "content before the META section".into())),
            Some(Section::End) => return Err(err(1, "content after END".into())),
            Some(Section::Meta) => {
                let (key, value) = line.split_once(' ').unwrap_or((line, ""));
                match key {
                    "formulation" => formulation = Some(value.parse().map_err(|e: Error| err(col(value), e.to_string()))?),
                    "game_hash" => game_hash = Some(value.to_string()),
                    "strategy_counts" => {
                        let counts: std::result::Result<Vec<usize>, _> = value.split_whitespace().map(str::parse).collect();
                        strategy_counts = Some(counts.map_err(|_| err(col(value), "bad strategy counts".into()))?);
                    }
                    "target" => target_value = if value == "none" { None } else { Some(num(value)?) },
                    "warning" => {
                        let inner = value
                            .strip_prefix('"')
                            .and_then(|v| v.strip_suffix('"'))
                            .ok_or_else(|| err(col(value), "warning must be quoted".into()))?;
                        warnings.push(inner.replace("\\\"", "\"").replace("\\\\", "\\"));
                    }
                    _ => return Err(err(1, format!("unknown META key '{key}'"))),
                }
            }
            Some(Section::Vars) => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let binary = match parts.as_slice() {
                    [_, _, _] => false,
                    [_, _, _, "BIN"] => true,
                    _ => return Err(err(1, "expected 'name lower upper [BIN]'".into())),
                };
                let kind: VarKind = parts[0].parse().map_err(|e: Error| err(col(parts[0]), e.to_string()))?;
                if var_index.insert(parts[0].to_string(), variables.len()).is_some() {
                    return Err(err(1, format!("duplicate variable '{}'", parts[0])));
                }
                variables.push(Variable {
                    kind,
                    lower: num(parts[1])?,
                    upper: num(parts[2])?,
                    binary,
                });
            }
            Some(Section::Monomials) => {
                let (id, body) = line
                    .split_once('=')
                    .ok_or_else(|| err(1, "expected 'id = coeff [* var ...]'".into()))?;
                let (coeff, vars) = body.split_once('*').unwrap_or((body, ""));
                let coeff = num(coeff.trim())?;
                let vars = vars
                    .split_whitespace()
                    .map(|v| {
                        var_index
                            .get(v)
                            .copied()
                            .ok_or_else(|| err(col(v), format!("unknown variable '{v}'")))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                monomials.insert(id.trim().to_string(), Monomial::new(coeff, vars));
            }
            Some(Section::Constraints) => {
                let (tag, body) = line
                    .split_once(':')
                    .ok_or_else(|| err(1, "expected 'family: sum rel rhs'".into()))?;
                let family = ConstraintFamily::from_tag(tag.trim())
                    .ok_or_else(|| err(1, format!("unknown constraint family '{}'", tag.trim())))?;
                let (relation, (lhs, rhs)) = [(">=", Relation::Ge), ("<=", Relation::Le), ("=", Relation::Eq)]
                    .into_iter()
                    .find_map(|(sym, r)| body.split_once(sym).map(|parts| (r, parts)))
                    .ok_or_else(|| err(col(body), "missing relation".into()))?;
                constraints.push(Constraint {
                    family,
                    expr: resolve_sum(lhs, &monomials)?,
                    relation,
                    rhs: num(rhs.trim())?,
                });
            }
            Some(Section::Objective) => {
                let (word, rest) = line.split_once(' ').unwrap_or((line, "0"));
                match word {
                    "constant" => constant = Some(num(rest.trim())?),
                    "max" | "min" | "feasibility" => {
                        let sense = match word {
                            "max" => Sense::Max,
                            "min" => Sense::Min,
                            _ => Sense::Feasibility,
                        };
                        objective = Some((sense, resolve_sum(rest, &monomials)?));
                    }
                    _ => return Err(err(1, format!("unknown objective line '{word}'"))),
                }
            }
        }
    }
    let last = text.lines().count().max(1);
    if section != Some(Section::End) {
        return Err(parse_error(last, 1, "missing END"));
    }
    let missing = |what: &str| parse_error(last, 1, format!("missing {what}"));
    let (sense, expr) = objective.ok_or_else(|| missing("objective"))?;
    let program = MultilinearProgram {
        variables,
        constraints,
        objective: Objective {
            sense,
            expr,
            constant: constant.unwrap_or(0.0),
        },
        metadata: Metadata {
            formulation: formulation.ok_or_else(|| missing("formulation"))?,
            strategy_counts: strategy_counts.ok_or_else(|| missing("strategy_counts"))?,
            game_hash: game_hash.ok_or_else(|| missing("game_hash"))?,
            target_value,
            warnings,
        },
    };
    program.validate()?;
    Ok(program)
}

// ------------------------------------------------------------ results

/// One line of a `.results.jsonl` file. Non-finite numbers are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub instance: String,
    pub formulation: String,
    pub solver: String,
    pub status: String,
    pub max_regret: Option<f64>,
    pub objective: Option<f64>,
    pub wall_time_s: f64,
    pub nodes: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<Vec<f64>>>,
}

impl ReportRecord {
    pub fn new(instance: &str, formulation: &str, solver: &str, seed: u64, report: &SolveReport) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        ReportRecord {
            instance: instance.to_string(),
            formulation: formulation.to_string(),
            solver: solver.to_string(),
            status: report.status.to_string(),
            max_regret: finite(report.max_regret),
            objective: finite(report.objective),
            wall_time_s: report.wall_time,
            nodes: report.nodes_explored,
            seed,
            profile: report.profile.as_ref().map(|p| p.distributions().to_vec()),
        }
    }
}

/// The record as a single JSON line, newline included.
pub fn write_report(record: &ReportRecord) -> String {
    let mut s = serde_json::to_string(record).expect("records serialise");
    s.push('\n');
    s
}

pub fn read_reports(text: &str) -> Result<Vec<ReportRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| serde_json::from_str(l).map_err(|e| parse_error(k + 1, e.column(), e.to_string())))
        .collect()
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::from(e.error))?;
    Ok(())
}
