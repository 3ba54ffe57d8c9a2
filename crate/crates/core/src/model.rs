//! Truss models and their line-oriented file format.
//!
//! ```text
//! # comment
//! [parameters]
//! EA L P
//! [nodes]
//! 1 0 0
//! 2 L L
//! [elements]
//! 1 1 2 EA          # or: 1 1 2 E A
//! [supports]
//! 1 fixed fixed
//! [loads]
//! 2 0 -P
//! ```
//!
//! Fields are separated by whitespace, so expressions must not contain any.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::kernel::{Expr, ParamEnv};
use crate::parser::parse_expr;

#[derive(Clone, Debug)]
pub struct Node {
    pub id: usize,
    pub x: Expr,
    pub y: Expr,
}

#[derive(Clone, Debug)]
pub enum Stiffness {
    /// The product E*A as one expression.
    Combined(Expr),
    Separate {
        e: Expr,
        a: Expr,
    },
}

impl Stiffness {
    pub fn ea(&self) -> Expr {
        match self {
            Stiffness::Combined(ea) => ea.clone(),
            Stiffness::Separate { e, a } => e * a,
        }
    }

    pub fn area(&self) -> Option<&Expr> {
        match self {
            Stiffness::Combined(_) => None,
            Stiffness::Separate { a, .. } => Some(a),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Element {
    pub id: usize,
    pub i: usize,
    pub j: usize,
    pub stiffness: Stiffness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    X,
    Y,
}

impl Dir {
    pub fn index(self) -> usize {
        match self {
            Dir::X => 0,
            Dir::Y => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Dir::X => "x",
            Dir::Y => "y",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    pub node: usize,
    pub x: bool,
    pub y: bool,
}

#[derive(Clone, Debug)]
pub struct Load {
    pub node: usize,
    pub fx: Expr,
    pub fy: Expr,
}

#[derive(Clone, Debug)]
pub struct TrussModel {
    pub env: ParamEnv,
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
    pub supports: Vec<Support>,
    pub loads: Vec<Load>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("model has no nodes")]
    NoNodes,
    #[error("model has no elements")]
    NoElements,
    #[error("node ids must be consecutive from 1: expected {expected}, found {found}")]
    NodeIds { expected: usize, found: usize },
    #[error("element ids must be consecutive from 1: expected {expected}, found {found}")]
    ElementIds { expected: usize, found: usize },
    #[error("element {element}: zero-length/self-loop element (both ends at node {node})")]
    SelfLoop { element: usize, node: usize },
    #[error("element {element}: node {node} does not exist")]
    ElementNode { element: usize, node: usize },
    #[error("element {element}: zero-length element")]
    ZeroLength { element: usize },
    #[error("supports: node {node} does not exist")]
    SupportNode { node: usize },
    #[error("supports: node {node} listed more than once")]
    DuplicateSupport { node: usize },
    #[error("loads: node {node} does not exist")]
    LoadNode { node: usize },
    #[error("loads: node {node} listed more than once")]
    DuplicateLoad { node: usize },
    #[error("insufficient supports: {count} constrained DOFs, at least 3 required")]
    InsufficientSupports { count: usize },
    #[error("{0} uses symbols from a different parameter set")]
    ForeignExpression(String),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid model:\n{}", list(.0))]
    Invalid(Vec<ValidationError>),
}

fn list(errs: &[ValidationError]) -> String {
    errs.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n")
}

impl TrussModel {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id - 1]
    }

    pub fn element(&self, id: usize) -> &Element {
        &self.elements[id - 1]
    }

    /// Per node, whether the x and y DOFs are constrained.
    pub fn fixity(&self) -> Vec<[bool; 2]> {
        let mut out = vec![[false; 2]; self.nodes.len()];
        for s in &self.supports {
            if let Some(f) = out.get_mut(s.node.wrapping_sub(1)) {
                f[0] |= s.x;
                f[1] |= s.y;
            }
        }
        out
    }

    /// Per node applied loads, zero where none is given.
    pub fn load_table(&self) -> Vec<[Expr; 2]> {
        let zero = Expr::zero(&self.env);
        let mut out = vec![[zero.clone(), zero]; self.nodes.len()];
        for l in &self.loads {
            if let Some(f) = out.get_mut(l.node.wrapping_sub(1)) {
                f[0] = &f[0] + &l.fx;
                f[1] = &f[1] + &l.fy;
            }
        }
        out
    }

    /// True when every element carries E and A separately.
    pub fn has_areas(&self) -> bool {
        self.elements.iter().all(|e| e.stiffness.area().is_some())
    }

    /// Checks every structural invariant and reports all violations.
    pub fn validate(&self) -> Result<(), Vec<ValidationError>> {
        let mut errs = Vec::new();
        let n = self.nodes.len();
        if n == 0 {
            errs.push(ValidationError::NoNodes);
        }
        if self.elements.is_empty() {
            errs.push(ValidationError::NoElements);
        }
        for (k, node) in self.nodes.iter().enumerate() {
            if node.id != k + 1 {
                errs.push(ValidationError::NodeIds { expected: k + 1, found: node.id });
                break;
            }
        }
        for (k, el) in self.elements.iter().enumerate() {
            if el.id != k + 1 {
                errs.push(ValidationError::ElementIds { expected: k + 1, found: el.id });
                break;
            }
        }
        let foreign = |e: &Expr| !e.env().ptr_eq(&self.env);
        for node in &self.nodes {
            if foreign(&node.x) || foreign(&node.y) {
                errs.push(ValidationError::ForeignExpression(format!("node {}", node.id)));
            }
        }
        for el in &self.elements {
            let in_range = |v: usize| (1..=n).contains(&v);
            let mut ends_ok = true;
            for v in [el.i, el.j] {
                if !in_range(v) {
                    errs.push(ValidationError::ElementNode { element: el.id, node: v });
                    ends_ok = false;
                }
            }
            let stiff_foreign = match &el.stiffness {
                Stiffness::Combined(ea) => foreign(ea),
                Stiffness::Separate { e, a } => foreign(e) || foreign(a),
            };
            if stiff_foreign {
                errs.push(ValidationError::ForeignExpression(format!("element {}", el.id)));
                continue;
            }
            if !ends_ok {
                continue;
            }
            if el.i == el.j {
                errs.push(ValidationError::SelfLoop { element: el.id, node: el.i });
                continue;
            }
            let (a, b) = (&self.nodes[el.i - 1], &self.nodes[el.j - 1]);
            if foreign(&a.x) || foreign(&a.y) || foreign(&b.x) || foreign(&b.y) {
                continue;
            }
            let dx = &b.x - &a.x;
            let dy = &b.y - &a.y;
            if (&(&dx * &dx) + &(&dy * &dy)).is_zero() {
                errs.push(ValidationError::ZeroLength { element: el.id });
            }
        }
        let mut seen = vec![false; n];
        let mut constrained = 0;
        for s in &self.supports {
            if !(1..=n).contains(&s.node) {
                errs.push(ValidationError::SupportNode { node: s.node });
                continue;
            }
            if std::mem::replace(&mut seen[s.node - 1], true) {
                errs.push(ValidationError::DuplicateSupport { node: s.node });
            }
            constrained += s.x as usize + s.y as usize;
        }
        if constrained < 3 {
            errs.push(ValidationError::InsufficientSupports { count: constrained });
        }
        let mut seen = vec![false; n];
        for l in &self.loads {
            if !(1..=n).contains(&l.node) {
                errs.push(ValidationError::LoadNode { node: l.node });
                continue;
            }
            if std::mem::replace(&mut seen[l.node - 1], true) {
                errs.push(ValidationError::DuplicateLoad { node: l.node });
            }
            if foreign(&l.fx) || foreign(&l.fy) {
                errs.push(ValidationError::ForeignExpression(format!("load at node {}", l.node)));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Field-by-field equality with a model over a possibly different environment.
    pub fn equivalent(&self, other: &TrussModel) -> bool {
        if self.env.symbol_names() != other.env.symbol_names() {
            return false;
        }
        let same = |a: &Expr, b: &Expr| match parse_expr(&b.to_text(), &self.env) {
            Ok(b) => a.equals(&b).unwrap_or(false),
            Err(_) => false,
        };
        let stiff = |a: &Stiffness, b: &Stiffness| match (a, b) {
            (Stiffness::Combined(x), Stiffness::Combined(y)) => same(x, y),
            (Stiffness::Separate { e: e1, a: a1 }, Stiffness::Separate { e: e2, a: a2 }) => {
                same(e1, e2) && same(a1, a2)
            }
            _ => false,
        };
        self.nodes.len() == other.nodes.len()
            && self.elements.len() == other.elements.len()
            && self.fixity() == other.fixity()
            && self
                .nodes
                .iter()
                .zip(&other.nodes)
                .all(|(a, b)| a.id == b.id && same(&a.x, &b.x) && same(&a.y, &b.y))
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.id == b.id && a.i == b.i && a.j == b.j && stiff(&a.stiffness, &b.stiffness))
            && self
                .load_table()
                .iter()
                .zip(other.load_table().iter())
                .all(|(a, b)| same(&a[0], &b[0]) && same(&a[1], &b[1]))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Parameters,
    Nodes,
    Elements,
    Supports,
    Loads,
}

impl Section {
    fn parse(name: &str) -> Option<Section> {
        Some(match name {
            "parameters" => Section::Parameters,
            "nodes" => Section::Nodes,
            "elements" => Section::Elements,
            "supports" => Section::Supports,
            "loads" => Section::Loads,
            _ => return None,
        })
    }
}

/// Whitespace-separated fields with their one-based start columns.
fn fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (byte, c)) in line.char_indices().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some((col, byte)),
            (true, Some((scol, sbyte))) => {
                out.push((scol + 1, &line[sbyte..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((scol, sbyte)) = start {
        out.push((scol + 1, &line[sbyte..]));
    }
    out
}

/// Parses and validates a model from its text form.
pub fn load_model_str(text: &str) -> Result<TrussModel, ModelError> {
    let env = ParamEnv::new();
    let mut model = TrussModel {
        env: env.clone(),
        nodes: Vec::new(),
        elements: Vec::new(),
        supports: Vec::new(),
        loads: Vec::new(),
    };
    let mut section = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| ModelError::Syntax { line: line_no, message };
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(
                Section::parse(name.trim())
                    .ok_or_else(|| err(format!("unknown section [{}]", name.trim())))?,
            );
            continue;
        }
        let f = fields(content);
        let expr = |k: usize| -> Result<Expr, ModelError> {
            let (col, src) = f[k];
            parse_expr(src, &env).map_err(|e| err(format!("{} at column {}", e.message, col + e.span.start)))
        };
        let id = |k: usize, what: &str| -> Result<usize, ModelError> {
            f[k].1.parse::<usize>().map_err(|_| err(format!("expected a {what} id, found `{}`", f[k].1)))
        };
        let arity = |allowed: &[usize], shape: &str| -> Result<(), ModelError> {
            if allowed.contains(&f.len()) {
                Ok(())
            } else {
                Err(err(format!("expected `{shape}`, found {} fields", f.len())))
            }
        };
        match section {
            None => return Err(err("content before the first [section]".into())),
            Some(Section::Parameters) => {
                for (_, name) in &f {
                    env.declare(name).map_err(|e| err(e.to_string()))?;
                }
            }
            Some(Section::Nodes) => {
                arity(&[3], "id x y")?;
                model.nodes.push(Node { id: id(0, "node")?, x: expr(1)?, y: expr(2)? });
            }
            Some(Section::Elements) => {
                arity(&[4, 5], "id i j EA` or `id i j E A")?;
                let stiffness = if f.len() == 4 {
                    Stiffness::Combined(expr(3)?)
                } else {
                    Stiffness::Separate { e: expr(3)?, a: expr(4)? }
                };
                model.elements.push(Element {
                    id: id(0, "element")?,
                    i: id(1, "node")?,
                    j: id(2, "node")?,
                    stiffness,
                });
            }
            Some(Section::Supports) => {
                arity(&[3], "node x-flag y-flag")?;
                let flag = |k: usize| match f[k].1 {
                    "fixed" => Ok(true),
                    "free" => Ok(false),
                    other => Err(err(format!("support flag must be `fixed` or `free`, found `{other}`"))),
                };
                model.supports.push(Support { node: id(0, "node")?, x: flag(1)?, y: flag(2)? });
            }
            Some(Section::Loads) => {
                arity(&[3], "node Fx Fy")?;
                model.loads.push(Load { node: id(0, "node")?, fx: expr(1)?, fy: expr(2)? });
            }
        }
    }
    model.validate().map_err(ModelError::Invalid)?;
    Ok(model)
}

pub fn load_model(path: &Path) -> Result<TrussModel, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ModelError::NotFound(path.display().to_string()),
        _ => ModelError::Io { path: path.display().to_string(), source: e },
    })?;
    load_model_str(&text)
}

/// Serializes a model; the output loads back to an equivalent model.
pub fn save_model(m: &TrussModel) -> String {
    let mut out = String::new();
    out.push_str("[parameters]\n");
    out.push_str(&m.env.symbol_names().join(" "));
    out.push_str("\n\n[nodes]\n");
    for n in &m.nodes {
        out.push_str(&format!("{} {} {}\n", n.id, n.x.to_text(), n.y.to_text()));
    }
    out.push_str("\n[elements]\n");
    for e in &m.elements {
        let s = match &e.stiffness {
            Stiffness::Combined(ea) => ea.to_text(),
            Stiffness::Separate { e, a } => format!("{} {}", e.to_text(), a.to_text()),
        };
        out.push_str(&format!("{} {} {} {}\n", e.id, e.i, e.j, s));
    }
    out.push_str("\n[supports]\n");
    for (k, f) in m.fixity().iter().enumerate() {
        if f[0] || f[1] {
            let flag = |b: bool| if b { "fixed" } else { "free" };
            out.push_str(&format!("{} {} {}\n", k + 1, flag(f[0]), flag(f[1])));
        }
    }
    out.push_str("\n[loads]\n");
    for (k, l) in m.load_table().iter().enumerate() {
        if !l[0].is_zero() || !l[1].is_zero() {
            out.push_str(&format!("{} {} {}\n", k + 1, l[0].to_text(), l[1].to_text()));
        }
    }
    out
}

impl fmt::Display for TrussModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&save_model(self))
    }
}
