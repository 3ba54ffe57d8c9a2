//! Design sensitivities: exact partial derivatives of analysis outputs.
//!
//! Outputs are closed-form, so differentiating them directly is exact; there
//! is no need for adjoint or direct differentiation of the stiffness matrix.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::engine::{par_map, AnalysisResult, Parallelism};
use crate::kernel::{Expr, KernelError, ParamEnv, Symbol};
use crate::model::Dir;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuantitySelector {
    Displacement { node: usize, dir: Dir },
    Reaction { node: usize, dir: Dir },
    AxialForce { element: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SensitivityError {
    #[error("bad quantity selector `{0}`: expected dx:N, dy:N, rx:N, ry:N or n:E")]
    Syntax(String),
    #[error("unknown quantity {0}")]
    UnknownQuantity(QuantitySelector),
    #[error("{0} selects a free DOF, which carries no reaction")]
    FreeDof(QuantitySelector),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl fmt::Display for QuantitySelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantitySelector::Displacement { node, dir } => write!(f, "d{}:{node}", dir.label()),
            QuantitySelector::Reaction { node, dir } => write!(f, "r{}:{node}", dir.label()),
            QuantitySelector::AxialForce { element } => write!(f, "n:{element}"),
        }
    }
}

impl FromStr for QuantitySelector {
    type Err = SensitivityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SensitivityError::Syntax(s.to_string());
        let (kind, id) = s.split_once(':').ok_or_else(bad)?;
        let id: usize = id.trim().parse().map_err(|_| bad())?;
        if id == 0 {
            return Err(bad());
        }
        Ok(match kind.trim() {
            "dx" => QuantitySelector::Displacement { node: id, dir: Dir::X },
            "dy" => QuantitySelector::Displacement { node: id, dir: Dir::Y },
            "rx" => QuantitySelector::Reaction { node: id, dir: Dir::X },
            "ry" => QuantitySelector::Reaction { node: id, dir: Dir::Y },
            "n" => QuantitySelector::AxialForce { element: id },
            _ => return Err(bad()),
        })
    }
}

/// Looks up the output a selector refers to.
pub fn select(r: &AnalysisResult, q: QuantitySelector) -> Result<&Expr, SensitivityError> {
    match q {
        QuantitySelector::Displacement { node, dir } => r
            .displacements
            .get(node.wrapping_sub(1))
            .map(|d| &d[dir.index()])
            .ok_or(SensitivityError::UnknownQuantity(q)),
        QuantitySelector::Reaction { node, dir } => {
            if node == 0 || node > r.displacements.len() {
                return Err(SensitivityError::UnknownQuantity(q));
            }
            r.reaction(node, dir).ok_or(SensitivityError::FreeDof(q))
        }
        QuantitySelector::AxialForce { element } => {
            r.axial_forces.get(element.wrapping_sub(1)).ok_or(SensitivityError::UnknownQuantity(q))
        }
    }
}

pub fn sensitivity(r: &AnalysisResult, q: QuantitySelector, s: Symbol) -> Result<Expr, SensitivityError> {
    Ok(select(r, q)?.diff(s)?)
}

#[derive(Clone, Debug)]
pub struct SensitivityEntry {
    pub quantity: QuantitySelector,
    pub symbol: Symbol,
    pub value: Result<Expr, SensitivityError>,
}

#[derive(Clone, Debug, Default)]
pub struct SensitivityReport {
    pub entries: Vec<SensitivityEntry>,
}

impl SensitivityReport {
    pub fn get(&self, q: QuantitySelector, s: Symbol) -> Option<&Result<Expr, SensitivityError>> {
        self.entries.iter().find(|e| e.quantity == q && e.symbol == s).map(|e| &e.value)
    }
}

/// Every requested (quantity, parameter) pair, computed independently.
pub fn sensitivity_report(
    r: &AnalysisResult,
    quantities: &[QuantitySelector],
    params: &[Symbol],
    par: Parallelism,
) -> SensitivityReport {
    let pairs: Vec<(QuantitySelector, Symbol)> =
        quantities.iter().flat_map(|&q| params.iter().map(move |&s| (q, s))).collect();
    let entries = par_map(par, &pairs, |&(quantity, symbol)| SensitivityEntry {
        quantity,
        symbol,
        value: sensitivity(r, quantity, symbol),
    });
    SensitivityReport { entries }
}

/// Resolves parameter names, reporting the first unknown one.
pub fn symbols(env: &ParamEnv, names: &[impl AsRef<str>]) -> Result<Vec<Symbol>, KernelError> {
    names.iter().map(|n| env.symbol(n.as_ref())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::analyze;
    use crate::fixtures;
    use crate::parser::parse_expr;

    #[test]
    fn selectors_round_trip() {
        for s in ["dx:4", "dy:2", "rx:1", "ry:3", "n:5"] {
            assert_eq!(s.parse::<QuantitySelector>().unwrap().to_string(), s);
        }
        for bad in ["dz:1", "dy", "n:x", "n:0", ""] {
            assert!(bad.parse::<QuantitySelector>().is_err(), "{bad}");
        }
    }

    #[test]
    fn example_three_node_two() {
        let m = fixtures::load("ex3").unwrap();
        let r = analyze(&m).unwrap();
        let q: QuantitySelector = "dy:2".parse().unwrap();
        let syms = symbols(&m.env, &["EA", "L", "H"]).unwrap();
        let rep = sensitivity_report(&r, &[q], &syms, Parallelism::default());
        // D = -P*X/(4*EA*H^2), so dD/dEA = +P*X/(4*EA^2*H^2).
        let want = [
            "P*(2*H*L^2+sqrt(4*H^2+L^2)^3/2+L^3)/(4*EA^2*H^2)",
            "-L*P*(8*H+6*L+3*sqrt(4*H^2+L^2))/(8*EA*H^2)",
            "P*(2*H*L^2+sqrt(4*H^2+L^2)^3-6*H^2*sqrt(4*H^2+L^2)+2*L^3)/(4*EA*H^3)",
        ];
        for (s, w) in syms.iter().zip(want) {
            let got = rep.get(q, *s).unwrap().as_ref().unwrap();
            assert_eq!(*got, parse_expr(w, &m.env).unwrap());
        }
        // D is homogeneous of degree -1 in EA.
        let d = select(&r, q).unwrap();
        let ea = parse_expr("EA", &m.env).unwrap();
        assert_eq!(&ea * rep.get(q, syms[0]).unwrap().as_ref().unwrap(), -d);
    }

    #[test]
    fn independent_and_invalid_requests() {
        let m = fixtures::load("ex1").unwrap();
        let r = analyze(&m).unwrap();
        let ea = m.env.symbol("EA").unwrap();
        let p = m.env.symbol("P").unwrap();
        assert!(sensitivity(&r, "n:1".parse().unwrap(), ea).unwrap().is_zero());
        assert!(sensitivity(&r, "dy:1".parse().unwrap(), p).unwrap().is_zero());
        assert!(matches!(sensitivity(&r, "ry:2".parse().unwrap(), p), Err(SensitivityError::FreeDof(_))));
        assert!(matches!(
            sensitivity(&r, "n:9".parse().unwrap(), p),
            Err(SensitivityError::UnknownQuantity(_))
        ));
        assert!(symbols(&m.env, &["E"]).is_err());
        let empty = sensitivity_report(&r, &["dy:2".parse().unwrap()], &[], Parallelism::Sequential);
        assert!(empty.entries.is_empty());
    }
}
