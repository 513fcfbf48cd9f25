use std::collections::{BTreeMap, HashMap};

use super::lexer::{lex, Tok, Token};
use super::{LineIndex, ParseDiagnostic, Severity, MAX_ERRORS};
use crate::graph::catalog::EXEC_PIN_NAMES;
use crate::graph::{DiagCode, Graph, Literal, Node, NodeKind, PinRef, Wire};
use crate::scene::{AXIS_MOVE_FORWARD, AXIS_MOVE_RIGHT};

type Range = (usize, usize);

/// Byte ranges of the statements a graph was parsed from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceMap {
    pub graph_name: Range,
    pub nodes: HashMap<String, Range>,
    pub params: HashMap<(String, String), Range>,
    pub exec_wires: Vec<Range>,
    pub data_wires: Vec<Range>,
}

impl SourceMap {
    pub fn node(&self, id: &str) -> Option<Range> {
        self.nodes.get(id).copied()
    }

    pub fn param(&self, node: &str, pin: &str) -> Option<Range> {
        self.params.get(&(node.to_string(), pin.to_string())).copied()
    }
}

pub(crate) struct ParseOutput {
    pub graph: Graph,
    pub map: SourceMap,
    pub diagnostics: Vec<ParseDiagnostic>,
}

struct TooManyErrors;

/// A wire as written, resolved once every node is declared.
struct PendingWire {
    exec: bool,
    from: (String, Range),
    to: (String, Range),
    from_pin: (String, Range),
    to_pin: (String, Range),
    range: Range,
}

struct Parser<'s> {
    toks: Vec<Token>,
    pos: usize,
    idx: LineIndex<'s>,
    diags: Vec<ParseDiagnostic>,
    errors: usize,
}

type Step<T> = Result<T, Stop>;

enum Stop {
    /// Statement abandoned; the error is already recorded.
    Recover,
    Abort(TooManyErrors),
}

impl From<TooManyErrors> for Stop {
    fn from(t: TooManyErrors) -> Self {
        Stop::Abort(t)
    }
}

impl<'s> Parser<'s> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn report(&mut self, sev: Severity, code: DiagCode, range: Range, msg: impl Into<String>) -> Result<(), TooManyErrors> {
        if sev == Severity::Error {
            if self.errors >= MAX_ERRORS {
                return Err(TooManyErrors);
            }
            self.errors += 1;
        }
        self.diags.push(ParseDiagnostic {
            severity: sev,
            code,
            message: msg.into(),
            span: self.idx.span(range.0, range.1),
        });
        Ok(())
    }

    fn error(&mut self, code: DiagCode, range: Range, msg: impl Into<String>) -> Result<(), TooManyErrors> {
        self.report(Severity::Error, code, range, msg)
    }

    /// Records a syntax error at the current token and abandons the statement.
    fn unexpected<T>(&mut self, wanted: &str) -> Step<T> {
        let t = self.peek().clone();
        self.error(
            DiagCode::SyntaxError,
            (t.start, t.end),
            format!("expected {wanted}, found {}", t.tok.describe()),
        )?;
        Err(Stop::Recover)
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Step<Token> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            self.unexpected(wanted)
        }
    }

    fn ident(&mut self, wanted: &str) -> Step<(String, Range)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let t = self.bump();
                Ok((s, (t.start, t.end)))
            }
            _ => self.unexpected(wanted),
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.bump();
        }
    }

    /// Skips to the start of the next line (or a closing brace).
    fn recover(&mut self) {
        loop {
            match self.peek().tok {
                Tok::Newline => {
                    self.bump();
                    return;
                }
                Tok::Eof | Tok::RBrace => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn end_of_statement(&mut self) -> Step<()> {
        match self.peek().tok {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::RBrace | Tok::Eof => Ok(()),
            _ => self.unexpected("end of line"),
        }
    }

    fn literal(&mut self) -> Step<(Literal, Range)> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Number(n) => {
                self.bump();
                Ok((Literal::Float(*n), (t.start, t.end)))
            }
            Tok::Str(s) => {
                self.bump();
                Ok((Literal::Text(s.clone()), (t.start, t.end)))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok((Literal::Bool(s == "true"), (t.start, t.end)))
            }
            Tok::LParen => {
                self.bump();
                let mut xs = [0.0; 3];
                for (i, x) in xs.iter_mut().enumerate() {
                    if i > 0 {
                        self.expect(Tok::Comma, "`,` between triple components")?;
                    }
                    match self.peek().tok {
                        Tok::Number(n) => {
                            *x = n;
                            self.bump();
                        }
                        _ => return self.unexpected("a number"),
                    }
                }
                let close = self.expect(Tok::RParen, "`)` after three components")?;
                Ok((Literal::Triple(xs), (t.start, close.end)))
            }
            _ => self.unexpected("a literal (number, text, true/false or (x, y, z))"),
        }
    }

    fn pin_ref(&mut self) -> Step<((String, Range), (String, Range))> {
        let node = self.ident("a node id")?;
        self.expect(Tok::Dot, "`.` between node and pin")?;
        let pin = self.ident("a pin name")?;
        Ok((node, pin))
    }

    fn node_stmt(&mut self, g: &mut Graph, map: &mut SourceMap, kw: Range) -> Step<()> {
        let (id, id_range) = self.ident("a node id")?;
        self.expect(Tok::Colon, "`:` after the node id")?;
        let (kind_name, kind_range) = self.ident("a node kind")?;
        let kind = kind_name.parse::<NodeKind>();
        let mut params: BTreeMap<String, Literal> = BTreeMap::new();
        let mut param_ranges = Vec::new();
        let mut end = kind_range.1;
        if self.peek().tok == Tok::LParen {
            self.bump();
            if self.peek().tok != Tok::RParen {
                loop {
                    let (name, name_range) = self.ident("a parameter name")?;
                    self.expect(Tok::Eq, "`=` after the parameter name")?;
                    let (lit, lit_range) = self.literal()?;
                    let range = (name_range.0, lit_range.1);
                    if params.contains_key(&name) {
                        self.error(DiagCode::SyntaxError, range, format!("parameter `{name}` given twice"))?;
                    } else {
                        param_ranges.push((name.clone(), name_range, lit_range, range));
                        params.insert(name, lit);
                    }
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                        continue;
                    }
                    break;
                }
            }
            end = self.expect(Tok::RParen, "`)` or `,` in the parameter list")?.end;
        }
        self.end_of_statement()?;

        let kind = match kind {
            Ok(k) => k,
            Err(_) => {
                self.error(DiagCode::UnknownKind, kind_range, format!("unknown node kind `{kind_name}`"))?;
                return Ok(());
            }
        };
        if map.nodes.contains_key(&id) {
            self.error(DiagCode::DuplicateNodeId, id_range, format!("node id `{id}` declared more than once"))?;
            return Ok(());
        }
        let spec = kind.spec();
        for (name, name_range, lit_range, range) in &param_ranges {
            match spec.input(name) {
                None => self.error(DiagCode::UnknownPin, *name_range, format!("{kind} has no parameter `{name}`"))?,
                Some((_, inp)) => {
                    let lit = &params[name];
                    if lit.to_value(inp.ty).is_none() {
                        self.error(
                            DiagCode::BadLiteral,
                            *lit_range,
                            format!("`{name}` expects a finite {} literal, found {}", inp.ty, lit.describe()),
                        )?;
                    } else if kind == NodeKind::EventInputAxis && name == "axis_name" {
                        if let Literal::Text(axis) = lit {
                            if axis != AXIS_MOVE_RIGHT && axis != AXIS_MOVE_FORWARD {
                                self.report(
                                    Severity::Warning,
                                    DiagCode::UnknownAxis,
                                    *lit_range,
                                    format!(
                                        "axis `{axis}` is never fed; known axes are {AXIS_MOVE_RIGHT} and {AXIS_MOVE_FORWARD}"
                                    ),
                                )?;
                            }
                        }
                    }
                }
            }
            map.params.insert((id.clone(), name.clone()), *range);
        }
        map.nodes.insert(id.clone(), (kw.0, end));
        g.nodes.push(Node { id, kind, params });
        Ok(())
    }

    fn wire_stmt(&mut self, exec: bool, kw: Range, wires: &mut Vec<PendingWire>) -> Step<()> {
        let (from, from_pin) = self.pin_ref()?;
        self.expect(Tok::Arrow, "`->` between wire ends")?;
        let (to, to_pin) = self.pin_ref()?;
        let end = to_pin.1 .1;
        self.end_of_statement()?;
        wires.push(PendingWire {
            exec,
            from,
            to,
            from_pin,
            to_pin,
            range: (kw.0, end),
        });
        Ok(())
    }

    fn statement(&mut self, g: &mut Graph, map: &mut SourceMap, wires: &mut Vec<PendingWire>) -> Step<()> {
        let (kw, range) = self.ident("`node`, `exec`, `data` or `}`")?;
        match kw.as_str() {
            "node" => self.node_stmt(g, map, range),
            "exec" => self.wire_stmt(true, range, wires),
            "data" => self.wire_stmt(false, range, wires),
            _ => {
                self.error(
                    DiagCode::SyntaxError,
                    range,
                    format!("expected `node`, `exec` or `data`, found `{kw}`"),
                )?;
                Err(Stop::Recover)
            }
        }
    }

    fn graph(&mut self, g: &mut Graph, map: &mut SourceMap) -> Result<Vec<PendingWire>, TooManyErrors> {
        let mut wires = Vec::new();
        self.skip_newlines();
        let header = (|| -> Step<()> {
            let (kw, range) = self.ident("`graph`")?;
            if kw != "graph" {
                self.error(DiagCode::SyntaxError, range, format!("expected `graph`, found `{kw}`"))?;
                return Err(Stop::Recover);
            }
            let (name, range) = self.ident("a graph name")?;
            g.name = name;
            map.graph_name = range;
            self.expect(Tok::LBrace, "`{` after the graph name")?;
            Ok(())
        })();
        match header {
            Ok(()) => {}
            Err(Stop::Abort(t)) => return Err(t),
            Err(Stop::Recover) => return Ok(wires),
        }
        loop {
            self.skip_newlines();
            match self.peek().tok {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Eof => {
                    let t = self.peek().clone();
                    self.error(DiagCode::SyntaxError, (t.start, t.end), "missing `}` at end of graph")?;
                    return Ok(wires);
                }
                _ => match self.statement(g, map, &mut wires) {
                    Ok(()) => {}
                    Err(Stop::Recover) => self.recover(),
                    Err(Stop::Abort(t)) => return Err(t),
                },
            }
        }
        self.skip_newlines();
        if self.peek().tok != Tok::Eof {
            let t = self.peek().clone();
            self.error(
                DiagCode::SyntaxError,
                (t.start, t.end),
                format!("unexpected {} after the graph", t.tok.describe()),
            )?;
        }
        Ok(wires)
    }

    fn resolve(&mut self, g: &mut Graph, map: &mut SourceMap, wires: Vec<PendingWire>) -> Result<(), TooManyErrors> {
        let kinds: HashMap<&str, NodeKind> = g.nodes.iter().map(|n| (n.id.as_str(), n.kind)).collect();
        for w in wires {
            let mut ok = true;
            for (node, pin, is_from) in [(&w.from, &w.from_pin, true), (&w.to, &w.to_pin, false)] {
                let Some(kind) = kinds.get(node.0.as_str()) else {
                    self.error(DiagCode::UnknownPin, node.1, format!("no node named `{}`", node.0))?;
                    ok = false;
                    continue;
                };
                if w.exec {
                    if !EXEC_PIN_NAMES.contains(&pin.0.as_str()) {
                        self.error(
                            DiagCode::UnknownPin,
                            (node.1 .0, pin.1 .1),
                            format!("`{}` is not an exec pin (exec pins are in, out, true, false)", pin.0),
                        )?;
                        ok = false;
                    }
                } else {
                    let spec = kind.spec();
                    let found = if is_from {
                        spec.output(&pin.0).is_some()
                    } else {
                        spec.input(&pin.0).is_some_and(|(_, p)| p.wireable)
                    };
                    if !found {
                        let dir = if is_from { "data output" } else { "wireable data input" };
                        self.error(
                            DiagCode::UnknownPin,
                            (node.1 .0, pin.1 .1),
                            format!("{kind} has no {dir} `{}`", pin.0),
                        )?;
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            let wire = Wire {
                from: PinRef::new(w.from.0, w.from_pin.0),
                to: PinRef::new(w.to.0, w.to_pin.0),
            };
            if w.exec {
                g.exec_wires.push(wire);
                map.exec_wires.push(w.range);
            } else {
                g.data_wires.push(wire);
                map.data_wires.push(w.range);
            }
        }
        Ok(())
    }
}

pub(crate) fn parse(source: &str) -> ParseOutput {
    let (toks, lex_errors) = lex(source);
    let mut p = Parser {
        toks,
        pos: 0,
        idx: LineIndex::new(source),
        diags: Vec::new(),
        errors: 0,
    };
    let mut g = Graph::default();
    let mut map = SourceMap::default();
    let _ = (|| -> Result<(), TooManyErrors> {
        for e in &lex_errors {
            p.error(DiagCode::SyntaxError, (e.start, e.end), e.message.clone())?;
        }
        let wires = p.graph(&mut g, &mut map)?;
        p.resolve(&mut g, &mut map, wires)
    })();
    let mut diagnostics = p.diags;
    diagnostics.sort_by_key(|d| (d.span.start, d.span.end));
    ParseOutput {
        graph: g,
        map,
        diagnostics,
    }
}
