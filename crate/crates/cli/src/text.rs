//! The line-oriented circuit format.
//!
//! A file starts with `format=1` and holds one directive per line; `#`
//! starts a comment. [`parse`] checks syntax and then every scheduling
//! rule, so a file that parses will also run.

use std::fmt::{self, Write as _};
use std::path::Path;

use qsc_core::qcore::{c, C64};
use qsc_core::seqexec::{Endpoint, InputMode, KindSpec, ReadBasis, Side, StateSpec};
use qsc_core::transistor::BasisState;
use qsc_core::{CircuitIR, Node};
use serde::Serialize;

pub const FORMAT_VERSION: u32 = 1;
const MAX_STATE_FILE: u64 = 1 << 26;

/// A parse or validation failure. Lines and columns count from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub code: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.code, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// A parsed circuit with the source line of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub ir: CircuitIR,
    pub lines: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    no: usize,
    toks: Vec<Tok<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, col: usize, code: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            line: self.no,
            column: col,
            code: code.to_string(),
            message: message.into(),
        }
    }

    fn end_col(&self) -> usize {
        self.toks.last().map(|t| t.col + t.text.chars().count()).unwrap_or(1)
    }
}

fn tokenize(no: usize, raw: &str) -> Line<'_> {
    let body = raw.split('#').next().unwrap_or("");
    let mut toks = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                toks.push(Tok {
                    text: &body[s..i],
                    col: body[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    Line { no, toks }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `key=value` arguments and bare flags after the positional ones.
struct Args<'a> {
    pairs: Vec<(&'a str, usize, &'a str)>,
    flags: Vec<&'a str>,
}

impl<'a> Args<'a> {
    fn collect(line: &Line<'a>, toks: &[Tok<'a>], allowed: &[&str], flags: &[&str]) -> Result<Self, Diagnostic> {
        let mut out = Args {
            pairs: Vec::new(),
            flags: Vec::new(),
        };
        for t in toks {
            match t.text.split_once('=') {
                Some((k, v)) => {
                    if !allowed.contains(&k) {
                        return Err(line.err(t.col, "E005", format!("unknown key '{k}'")));
                    }
                    if out.pairs.iter().any(|p| p.0 == k) {
                        return Err(line.err(t.col, "E005", format!("duplicate key '{k}'")));
                    }
                    out.pairs.push((k, t.col + k.chars().count() + 1, v));
                }
                None if flags.contains(&t.text) => {
                    if out.flags.contains(&t.text) {
                        return Err(line.err(t.col, "E005", format!("duplicate flag '{}'", t.text)));
                    }
                    out.flags.push(t.text);
                }
                None => return Err(line.err(t.col, "E005", format!("unexpected argument '{}'", t.text))),
            }
        }
        Ok(out)
    }

    fn get(&self, key: &str) -> Option<(usize, &'a str)> {
        self.pairs.iter().find(|p| p.0 == key).map(|p| (p.1, p.2))
    }

    fn require(&self, line: &Line<'_>, key: &str) -> Result<(usize, &'a str), Diagnostic> {
        self.get(key)
            .ok_or_else(|| line.err(line.end_col(), "E004", format!("missing {key}=")))
    }

    fn flag(&self, name: &str) -> bool {
        self.flags.contains(&name)
    }
}

fn parse_uint<T: std::str::FromStr>(line: &Line<'_>, col: usize, v: &str, what: &str) -> Result<T, Diagnostic> {
    if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
        return Err(line.err(col, "E006", format!("{what} must be a non-negative integer, got '{v}'")));
    }
    v.parse()
        .map_err(|_| line.err(col, "E006", format!("{what} '{v}' is out of range")))
}

fn parse_endpoint(line: &Line<'_>, col: usize, s: &str) -> Result<Endpoint, Diagnostic> {
    let bad = || line.err(col, "E007", format!("malformed endpoint '{s}'"));
    let Some((id, rest)) = s.split_once('.') else {
        return if is_ident(s) { Ok(Endpoint::Qubit(s.to_string())) } else { Err(bad()) };
    };
    if !is_ident(id) {
        return Err(bad());
    }
    let (side, leg) = match rest.split_once('[') {
        None => (rest, None),
        Some((side, idx)) => {
            let idx = idx.strip_suffix(']').ok_or_else(bad)?;
            if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            (side, Some(idx.parse::<usize>().map_err(|_| bad())?))
        }
    };
    let side = match side {
        "in" => Side::In,
        "out" => Side::Out,
        _ => return Err(bad()),
    };
    Ok(Endpoint::Mode {
        transistor: id.to_string(),
        side,
        leg,
    })
}

fn parse_cycle(line: &Line<'_>, args: &Args<'_>) -> Result<u32, Diagnostic> {
    let (col, v) = args.require(line, "cycle")?;
    parse_uint(line, col, v, "cycle")
}

fn read_state_file(line: &Line<'_>, col: usize, path: &str, base: &Path) -> Result<Vec<C64>, Diagnostic> {
    let full = base.join(path);
    match std::fs::metadata(&full) {
        Ok(m) if m.is_file() && m.len() <= MAX_STATE_FILE => {}
        Ok(_) => return Err(line.err(col, "E008", format!("'{}' is not a regular file of at most {MAX_STATE_FILE} bytes", full.display()))),
        Err(e) => return Err(line.err(col, "E008", format!("cannot read '{}': {e}", full.display()))),
    }
    let text = std::fs::read_to_string(&full)
        .map_err(|e| line.err(col, "E008", format!("cannot read '{}': {e}", full.display())))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| {
        line.err(
            col,
            "E008",
            format!("'{}' is not a JSON array of [re, im] pairs: {e}", full.display()),
        )
    })?;
    Ok(pairs.into_iter().map(|[re, im]| c(re, im)).collect())
}

fn parse_state(line: &Line<'_>, col: usize, v: &str, base: &Path) -> Result<StateSpec, Diagnostic> {
    if let Some(path) = v.strip_prefix("file:") {
        if path.is_empty() {
            return Err(line.err(col, "E006", "empty file path"));
        }
        let amplitudes = read_state_file(line, col, path, base)?;
        return Ok(StateSpec::File {
            path: path.to_string(),
            amplitudes,
        });
    }
    let syms: Option<Vec<BasisState>> = v.chars().map(BasisState::from_symbol).collect();
    match syms {
        Some(s) if !s.is_empty() => Ok(StateSpec::Basis(s)),
        _ => Err(line.err(col, "E006", format!("state must be symbols from 0 1 + - or file:PATH, got '{v}'"))),
    }
}

fn parse_kind(line: &Line<'_>, args: &Args<'_>) -> Result<KindSpec, Diagnostic> {
    let (col, v) = args.require(line, "kind")?;
    let length = args.get("length");
    let kind = match v {
        "wire" => {
            let n = match length {
                Some((lc, lv)) => parse_uint(line, lc, lv, "length")?,
                None => 1,
            };
            return Ok(KindSpec::Wire(n));
        }
        "schain" => KindSpec::SChain,
        "magict" => KindSpec::MagicT,
        _ => match v.strip_prefix("choi:") {
            Some(g) if !g.is_empty() => KindSpec::Choi(g.to_string()),
            _ => return Err(line.err(col, "E006", format!("unknown transistor kind '{v}'"))),
        },
    };
    if let Some((lc, _)) = length {
        return Err(line.err(lc, "E005", "length applies to wire transistors only"));
    }
    Ok(kind)
}

/// The `n` tokens after the directive name, then its keyed arguments.
fn split<'a, 'l>(line: &'l Line<'a>, n: usize, what: &str) -> Result<(&'l [Tok<'a>], &'l [Tok<'a>]), Diagnostic> {
    let head = line.toks[0];
    if line.toks.len() <= n || line.toks[1..=n].iter().any(|t| t.text.contains('=')) {
        return Err(line.err(head.col, "E004", format!("{} expects {what}", head.text)));
    }
    Ok((&line.toks[1..=n], &line.toks[n + 1..]))
}

fn ident(line: &Line<'_>, t: Tok<'_>) -> Result<String, Diagnostic> {
    if is_ident(t.text) {
        Ok(t.text.to_string())
    } else {
        Err(line.err(t.col, "E006", format!("invalid identifier '{}'", t.text)))
    }
}

/// `<id>.<side>` with no leg index.
fn mode_of(line: &Line<'_>, t: Tok<'_>, side: Side) -> Result<String, Diagnostic> {
    match parse_endpoint(line, t.col, t.text)? {
        Endpoint::Mode { transistor, side: s, leg: None } if s == side => Ok(transistor),
        _ => {
            let want = if side == Side::In { "in" } else { "out" };
            Err(line.err(t.col, "E007", format!("expected <id>.{want}, got '{}'", t.text)))
        }
    }
}

fn directive(line: &Line<'_>, base: &Path, budget: &mut Option<usize>) -> Result<Option<Node>, Diagnostic> {
    let head = line.toks[0];
    let node = match head.text {
        "transistor" => {
            let (pos, rest) = split(line, 1, "an id")?;
            let id = ident(line, pos[0])?;
            let args = Args::collect(line, rest, &["kind", "length"], &["backward", "dagger"])?;
            Node::Transistor {
                id,
                kind: parse_kind(line, &args)?,
                backward: args.flag("backward"),
                dagger: args.flag("dagger"),
            }
        }
        "qubit" => {
            let (pos, rest) = split(line, 1, "an id")?;
            let id = ident(line, pos[0])?;
            let args = Args::collect(line, rest, &["state"], &[])?;
            let state = match args.get("state") {
                Some((col, v)) => parse_state(line, col, v, base)?,
                None => StateSpec::Basis(vec![BasisState::Zero]),
            };
            Node::Qubit { id, state }
        }
        "ebit" => {
            let (pos, rest) = split(line, 1, "an id")?;
            let id = ident(line, pos[0])?;
            let args = Args::collect(line, rest, &["a", "b", "cycle"], &[])?;
            let (ac, a) = args.require(line, "a")?;
            let (bc, b) = args.require(line, "b")?;
            let cycle = match args.get("cycle") {
                Some((col, v)) => Some(parse_uint(line, col, v, "cycle")?),
                None => None,
            };
            Node::Ebit {
                id,
                a: parse_endpoint(line, ac, a)?,
                b: parse_endpoint(line, bc, b)?,
                cycle,
            }
        }
        "loop" => {
            if line.toks.len() != 4 || line.toks[2].text != "->" {
                return Err(line.err(head.col, "E004", "expected: loop <id>.out -> <id>.in"));
            }
            Node::Loop {
                from: mode_of(line, line.toks[1], Side::Out)?,
                to: mode_of(line, line.toks[3], Side::In)?,
            }
        }
        "input" => {
            let (pos, rest) = split(line, 1, "<id>.in")?;
            let transistor = mode_of(line, pos[0], Side::In)?;
            let args = Args::collect(line, rest, &["state", "mode"], &[])?;
            let (sc, sv) = args.require(line, "state")?;
            let state = parse_state(line, sc, sv, base)?;
            let mode = match args.get("mode") {
                Some((_, "measure")) => InputMode::Measure,
                Some((_, "teleport")) => InputMode::Teleport,
                Some((col, v)) => return Err(line.err(col, "E006", format!("mode must be measure or teleport, got '{v}'"))),
                None if matches!(state, StateSpec::File { .. }) => InputMode::Teleport,
                None => InputMode::Measure,
            };
            Node::Input { transistor, state, mode }
        }
        "gate" => {
            let (pos, rest) = split(line, 1, "a gate name")?;
            let name = ident(line, pos[0])?;
            let args = Args::collect(line, rest, &["targets", "cycle"], &[])?;
            let (tc, tv) = args.require(line, "targets")?;
            let mut targets = Vec::new();
            let mut col = tc;
            for part in tv.split(',') {
                targets.push(parse_endpoint(line, col, part)?);
                col += part.chars().count() + 1;
            }
            Node::Gate {
                name,
                targets,
                cycle: parse_cycle(line, &args)?,
            }
        }
        "signal" | "refresh" => {
            let (pos, rest) = split(line, 1, "a transistor id")?;
            let target = ident(line, pos[0])?;
            let args = Args::collect(line, rest, &["cycle"], &[])?;
            let cycle = parse_cycle(line, &args)?;
            if head.text == "signal" {
                Node::Signal { target, cycle }
            } else {
                Node::Refresh { target, cycle }
            }
        }
        "readout" => {
            let (pos, rest) = split(line, 1, "an endpoint")?;
            let target = parse_endpoint(line, pos[0].col, pos[0].text)?;
            let args = Args::collect(line, rest, &["basis", "cycle"], &[])?;
            let (bc, bv) = args.require(line, "basis")?;
            let basis = match bv {
                "Z" => ReadBasis::Z,
                "X" => ReadBasis::X,
                _ => return Err(line.err(bc, "E006", format!("basis must be Z or X, got '{bv}'"))),
            };
            Node::Readout {
                target,
                basis,
                cycle: parse_cycle(line, &args)?,
            }
        }
        "budget" => {
            if line.toks.len() != 2 {
                return Err(line.err(head.col, "E004", "expected: budget <N>"));
            }
            if budget.is_some() {
                return Err(line.err(head.col, "E005", "budget declared twice"));
            }
            *budget = Some(parse_uint(line, line.toks[1].col, line.toks[1].text, "budget")?);
            return Ok(None);
        }
        other => return Err(line.err(head.col, "E003", format!("unknown directive '{other}'"))),
    };
    Ok(Some(node))
}

/// Syntax only: builds the IR without checking scheduling rules.
pub fn parse_syntax(text: &str, base: &Path) -> Result<Program, Diagnostic> {
    let mut ir = CircuitIR::new();
    let mut lines = Vec::new();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = tokenize(i + 1, raw);
        if line.toks.is_empty() {
            continue;
        }
        if !header {
            let t = line.toks[0];
            let Some(v) = t.text.strip_prefix("format=") else {
                return Err(line.err(t.col, "E001", "the first directive must be format=1"));
            };
            if v != FORMAT_VERSION.to_string() || line.toks.len() > 1 {
                return Err(line.err(t.col, "E002", format!("unsupported format '{}'", t.text)));
            }
            header = true;
            continue;
        }
        if let Some(node) = directive(&line, base, &mut ir.budget)? {
            ir.nodes.push(node);
            lines.push(line.no);
        }
    }
    if !header {
        return Err(Diagnostic {
            line: text.lines().count().max(1),
            column: 1,
            code: "E001".into(),
            message: "missing format=1 header".into(),
        });
    }
    Ok(Program { ir, lines })
}

/// Parses and validates.
pub fn parse(text: &str, base: &Path) -> Result<Program, Diagnostic> {
    let p = parse_syntax(text, base)?;
    p.ir.validate().map_err(|e| Diagnostic {
        line: e.node.and_then(|n| p.lines.get(n).copied()).unwrap_or(0),
        column: 1,
        code: e.code.to_string(),
        message: e.message,
    })?;
    Ok(p)
}

/// Parses raw bytes, rejecting invalid UTF-8 with a diagnostic.
pub fn parse_bytes(bytes: &[u8], base: &Path) -> Result<Program, Diagnostic> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text, base),
        Err(e) => {
            let before = &bytes[..e.valid_up_to()];
            let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = before.iter().rposition(|&b| b == b'\n').map(|p| p + 1).unwrap_or(0);
            let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
            Err(Diagnostic {
                line,
                column,
                code: "E009".into(),
                message: "input is not valid UTF-8".into(),
            })
        }
    }
}

fn state_text(s: &StateSpec) -> String {
    match s {
        StateSpec::Basis(syms) => syms.iter().map(|b| b.symbol()).collect(),
        StateSpec::File { path, .. } => format!("file:{path}"),
    }
}

/// Canonical text of `ir`. Parsing the result gives `ir` back.
pub fn serialize(ir: &CircuitIR) -> String {
    let mut out = format!("format={FORMAT_VERSION}\n");
    if let Some(b) = ir.budget {
        let _ = writeln!(out, "budget {b}");
    }
    for node in &ir.nodes {
        let _ = match node {
            Node::Transistor { id, kind, backward, dagger } => {
                let k = match kind {
                    KindSpec::Wire(n) => format!("wire length={n}"),
                    KindSpec::SChain => "schain".into(),
                    KindSpec::Choi(g) => format!("choi:{g}"),
                    KindSpec::MagicT => "magict".into(),
                };
                let flags = [(*backward, " backward"), (*dagger, " dagger")]
                    .iter()
                    .filter(|f| f.0)
                    .map(|f| f.1)
                    .collect::<String>();
                writeln!(out, "transistor {id} kind={k}{flags}")
            }
            Node::Qubit { id, state } => writeln!(out, "qubit {id} state={}", state_text(state)),
            Node::Input { transistor, state, mode } => {
                let m = match mode {
                    InputMode::Measure => "measure",
                    InputMode::Teleport => "teleport",
                };
                writeln!(out, "input {transistor}.in state={} mode={m}", state_text(state))
            }
            Node::Ebit { id, a, b, cycle } => match cycle {
                Some(c) => writeln!(out, "ebit {id} a={a} b={b} cycle={c}"),
                None => writeln!(out, "ebit {id} a={a} b={b}"),
            },
            Node::Loop { from, to } => writeln!(out, "loop {from}.out -> {to}.in"),
            Node::Gate { name, targets, cycle } => {
                let t: Vec<String> = targets.iter().map(|e| e.to_string()).collect();
                writeln!(out, "gate {name} targets={} cycle={cycle}", t.join(","))
            }
            Node::Signal { target, cycle } => writeln!(out, "signal {target} cycle={cycle}"),
            Node::Refresh { target, cycle } => writeln!(out, "refresh {target} cycle={cycle}"),
            Node::Readout { target, basis, cycle } => {
                let b = match basis {
                    ReadBasis::Z => "Z",
                    ReadBasis::X => "X",
                };
                writeln!(out, "readout {target} basis={b} cycle={cycle}")
            }
        };
    }
    out
}
