//! Result documents and their text, LaTeX and JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;
use symtruss::engine::AnalysisResult;
use symtruss::kernel::{Expr, RenderStyle};
use symtruss::model::{Dir, TrussModel};
use symtruss::sensitivity::QuantitySelector;

use crate::number::format_significant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

/// A table cell: exact expression or a fully evaluated number.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Expr),
    Number(f64),
}

impl Value {
    fn render(&self, style: RenderStyle, digits: usize) -> String {
        match self {
            Value::Exact(e) => e.render(style),
            Value::Number(x) => format_significant(*x, digits),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Tables {
    pub displacements: Vec<(usize, Value, Value)>,
    pub reactions: Vec<(usize, Dir, Value)>,
    pub axial_forces: Vec<(usize, Value)>,
    pub stresses: Option<Vec<(usize, Value)>>,
}

impl Tables {
    pub fn from_result(r: &AnalysisResult) -> Self {
        Self::try_map(r, |e| Ok::<_, std::convert::Infallible>(Value::Exact(e.clone())))
            .unwrap_or_else(|e| match e {})
    }

    pub fn try_map<E>(r: &AnalysisResult, f: impl Fn(&Expr) -> Result<Value, E>) -> Result<Self, E> {
        let mut displacements = Vec::new();
        for (i, [dx, dy]) in r.displacements.iter().enumerate() {
            displacements.push((i + 1, f(dx)?, f(dy)?));
        }
        let reactions =
            r.reactions.iter().map(|x| Ok((x.node, x.dir, f(&x.value)?))).collect::<Result<_, E>>()?;
        let numbered = |xs: &[Expr]| {
            xs.iter().enumerate().map(|(i, x)| Ok((i + 1, f(x)?))).collect::<Result<Vec<_>, E>>()
        };
        Ok(Tables {
            displacements,
            reactions,
            axial_forces: numbered(&r.axial_forces)?,
            stresses: r.stresses.as_deref().map(numbered).transpose()?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Sensitivity {
    pub quantity: QuantitySelector,
    pub wrt: String,
    pub value: Expr,
}

#[derive(Clone, Debug)]
pub struct Numeric {
    pub bindings: Vec<(String, String)>,
    pub tables: Tables,
}

/// What a verb shows outside JSON, where everything is always emitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Focus {
    Symbolic,
    Sensitivities,
    Numeric,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub nodes: usize,
    pub elements: usize,
    pub parameters: Vec<String>,
    pub symbolic: Tables,
    pub sensitivities: Option<Vec<Sensitivity>>,
    pub numeric: Option<Numeric>,
    pub focus: Focus,
    pub digits: usize,
}

impl Report {
    pub fn new(m: &TrussModel, r: &AnalysisResult, focus: Focus, digits: usize) -> Self {
        Report {
            nodes: m.node_count(),
            elements: m.elements.len(),
            parameters: m.env.symbol_names(),
            symbolic: Tables::from_result(r),
            sensitivities: None,
            numeric: None,
            focus,
            digits,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Latex => self.latex(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    fn header(&self) -> String {
        format!(
            "model: {} nodes, {} elements; parameters: {}",
            self.nodes,
            self.elements,
            self.parameters.join(" ")
        )
    }

    fn text(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        match self.focus {
            Focus::Symbolic => text_tables(&mut out, &self.symbolic, self.digits),
            Focus::Sensitivities => {
                out.push_str("\nsensitivities\n");
                for s in self.sensitivities.iter().flatten() {
                    let _ = writeln!(out, "  d({})/d({}) = {}", s.quantity, s.wrt, s.value);
                }
            }
            Focus::Numeric => {
                if let Some(n) = &self.numeric {
                    let set: Vec<String> = n.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    let _ = writeln!(out, "bindings: {}", set.join(" "));
                    text_tables(&mut out, &n.tables, self.digits);
                }
            }
        }
        out
    }

    fn latex(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "% {}", self.header());
        match self.focus {
            Focus::Symbolic => latex_tables(&mut out, &self.symbolic, self.digits),
            Focus::Sensitivities => {
                let rows: Vec<Vec<String>> = self
                    .sensitivities
                    .iter()
                    .flatten()
                    .map(|s| {
                        vec![
                            latex_quantity(s.quantity),
                            format!("${}$", s.wrt),
                            format!("${}$", s.value.to_latex()),
                        ]
                    })
                    .collect();
                latex_table(&mut out, &["Quantity", "Parameter", "Derivative"], &rows);
            }
            Focus::Numeric => {
                if let Some(n) = &self.numeric {
                    let set: Vec<String> = n.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    let _ = writeln!(out, "% bindings: {}", set.join(" "));
                    latex_tables(&mut out, &n.tables, self.digits);
                }
            }
        }
        out
    }

    fn json(&self) -> JsonDoc {
        let text = |v: &Value| v.render(RenderStyle::Text, self.digits);
        let (displacements, reactions, axial_forces, stresses) = json_tables(&self.symbolic, &text);
        JsonDoc {
            model: JsonModel {
                nodes: self.nodes,
                elements: self.elements,
                parameters: self.parameters.clone(),
            },
            displacements,
            reactions,
            axial_forces,
            stresses,
            sensitivities: self.sensitivities.as_ref().map(|ss| {
                ss.iter()
                    .map(|s| JsonSensitivity {
                        quantity: s.quantity.to_string(),
                        wrt: s.wrt.clone(),
                        expr: s.value.to_text(),
                    })
                    .collect()
            }),
            numeric: self.numeric.as_ref().map(|n| {
                let (displacements, reactions, axial_forces, stresses) = json_tables(&n.tables, &text);
                JsonNumeric {
                    bindings: n.bindings.iter().cloned().collect(),
                    displacements,
                    reactions,
                    axial_forces,
                    stresses,
                }
            }),
        }
    }
}

fn text_tables(out: &mut String, t: &Tables, digits: usize) {
    let r = |v: &Value| v.render(RenderStyle::Text, digits);
    out.push_str("\ndisplacements\n");
    for (node, dx, dy) in &t.displacements {
        let _ = writeln!(out, "  node {node}: dx = {}; dy = {}", r(dx), r(dy));
    }
    out.push_str("\nreactions\n");
    for (node, dir, v) in &t.reactions {
        let _ = writeln!(out, "  node {node} {}: {}", dir.label(), r(v));
    }
    out.push_str("\naxial forces\n");
    for (el, v) in &t.axial_forces {
        let _ = writeln!(out, "  element {el}: {}", r(v));
    }
    if let Some(s) = &t.stresses {
        out.push_str("\nstresses\n");
        for (el, v) in s {
            let _ = writeln!(out, "  element {el}: {}", r(v));
        }
    }
}

fn latex_tables(out: &mut String, t: &Tables, digits: usize) {
    let r = |v: &Value| format!("${}$", v.render(RenderStyle::Latex, digits));
    let rows: Vec<Vec<String>> =
        t.displacements.iter().map(|(n, dx, dy)| vec![n.to_string(), r(dx), r(dy)]).collect();
    latex_table(out, &["Node", "$D_x$", "$D_y$"], &rows);
    let rows: Vec<Vec<String>> = t
        .reactions
        .iter()
        .map(|(n, dir, v)| vec![n.to_string(), format!("${}$", dir.label()), r(v)])
        .collect();
    latex_table(out, &["Node", "Direction", "$R$"], &rows);
    let rows: Vec<Vec<String>> = t.axial_forces.iter().map(|(e, v)| vec![e.to_string(), r(v)]).collect();
    latex_table(out, &["Element", "$N$"], &rows);
    if let Some(s) = &t.stresses {
        let rows: Vec<Vec<String>> = s.iter().map(|(e, v)| vec![e.to_string(), r(v)]).collect();
        latex_table(out, &["Element", "$\\sigma$"], &rows);
    }
}

fn latex_table(out: &mut String, head: &[&str], rows: &[Vec<String>]) {
    let _ = writeln!(out, "\\begin{{tabular}}{{{}}}", "l".repeat(head.len()));
    out.push_str("\\hline\n");
    let _ = writeln!(out, "{} \\\\", head.join(" & "));
    out.push_str("\\hline\n");
    for row in rows {
        let _ = writeln!(out, "{} \\\\", row.join(" & "));
    }
    out.push_str("\\hline\n\\end{tabular}\n");
}

fn latex_quantity(q: QuantitySelector) -> String {
    match q {
        QuantitySelector::Displacement { node, dir } => format!("$D_{{{},{node}}}$", dir.label()),
        QuantitySelector::Reaction { node, dir } => format!("$R_{{{},{node}}}$", dir.label()),
        QuantitySelector::AxialForce { element } => format!("$N_{{{element}}}$"),
    }
}

type JsonTables = (Vec<JsonDisplacement>, Vec<JsonReaction>, Vec<JsonForce>, Option<Vec<JsonForce>>);

fn json_tables(t: &Tables, text: &impl Fn(&Value) -> String) -> JsonTables {
    (
        t.displacements
            .iter()
            .map(|(node, dx, dy)| JsonDisplacement { node: *node, dx: text(dx), dy: text(dy) })
            .collect(),
        t.reactions
            .iter()
            .map(|(node, dir, v)| JsonReaction { node: *node, dof: dir.label(), expr: text(v) })
            .collect(),
        t.axial_forces.iter().map(|(element, v)| JsonForce { element: *element, expr: text(v) }).collect(),
        t.stresses
            .as_ref()
            .map(|s| s.iter().map(|(element, v)| JsonForce { element: *element, expr: text(v) }).collect()),
    )
}

#[derive(Serialize)]
struct JsonDoc {
    model: JsonModel,
    displacements: Vec<JsonDisplacement>,
    reactions: Vec<JsonReaction>,
    axial_forces: Vec<JsonForce>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stresses: Option<Vec<JsonForce>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sensitivities: Option<Vec<JsonSensitivity>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric: Option<JsonNumeric>,
}

#[derive(Serialize)]
struct JsonModel {
    nodes: usize,
    elements: usize,
    parameters: Vec<String>,
}

#[derive(Serialize)]
struct JsonDisplacement {
    node: usize,
    dx: String,
    dy: String,
}

#[derive(Serialize)]
struct JsonReaction {
    node: usize,
    dof: &'static str,
    expr: String,
}

#[derive(Serialize)]
struct JsonForce {
    element: usize,
    expr: String,
}

#[derive(Serialize)]
struct JsonSensitivity {
    quantity: String,
    wrt: String,
    expr: String,
}

#[derive(Serialize)]
struct JsonNumeric {
    bindings: std::collections::BTreeMap<String, String>,
    displacements: Vec<JsonDisplacement>,
    reactions: Vec<JsonReaction>,
    axial_forces: Vec<JsonForce>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stresses: Option<Vec<JsonForce>>,
}
