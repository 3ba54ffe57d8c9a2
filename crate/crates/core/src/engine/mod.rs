//! Direct stiffness method over the symbolic field.

mod assemble;
mod audit;
mod element;
mod matrix;
mod par;
mod solve;

pub use assemble::{assemble, assemble_with, Assembly, DofMap, Slot};
pub use audit::{audit, rigid_body_modes, CheckOutcome};
pub use element::{
    element_geometry, global_element_stiffness, local_stiffness, transformation, ElementGeometry,
};
pub use matrix::SymMatrix;
pub(crate) use par::map as par_map;
pub use par::Parallelism;
pub use solve::{solve_linear, SolveMethod};

use thiserror::Error;

use crate::kernel::{Expr, KernelError};
use crate::model::{Dir, TrussModel, ValidationError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("kinematically unstable model: the free-DOF stiffness matrix is singular")]
    Unstable,
    #[error("element {element}: zero-length element")]
    ZeroLength { element: usize },
    #[error("direction cosines do not satisfy c^2 + s^2 = 1")]
    NonUnitDirection,
    #[error("area unknown for element {element}: stiffness was given as a combined EA")]
    AreaUnknown { element: usize },
    #[error("invalid model: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<ValidationError>),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub parallelism: Parallelism,
    pub method: SolveMethod,
}

#[derive(Clone, Debug)]
pub struct Reaction {
    pub node: usize,
    pub dir: Dir,
    pub value: Expr,
}

#[derive(Clone, Debug)]
pub struct AnalysisResult {
    /// Per node `[dx, dy]`; zero at constrained DOFs.
    pub displacements: Vec<[Expr; 2]>,
    /// One entry per constrained DOF, in DOF order.
    pub reactions: Vec<Reaction>,
    /// Tension positive, per element.
    pub axial_forces: Vec<Expr>,
    /// Present when every element has a separate area.
    pub stresses: Option<Vec<Expr>>,
}

impl AnalysisResult {
    pub fn displacement(&self, node: usize, dir: Dir) -> &Expr {
        &self.displacements[node - 1][dir.index()]
    }

    pub fn reaction(&self, node: usize, dir: Dir) -> Option<&Expr> {
        self.reactions.iter().find(|r| r.node == node && r.dir == dir).map(|r| &r.value)
    }

    pub fn axial_force(&self, element: usize) -> &Expr {
        &self.axial_forces[element - 1]
    }

    /// Displacements as a flat global DOF vector.
    pub fn dof_vector(&self) -> Vec<Expr> {
        self.displacements.iter().flatten().cloned().collect()
    }
}

/// Reduced-system solve plus reaction recovery.
pub fn solve(asm: &Assembly, opts: &AnalysisOptions) -> Result<(Vec<[Expr; 2]>, Vec<Reaction>), EngineError> {
    let free = &asm.dofs.free;
    let env = asm.k.get(0, 0).env().clone();
    let kff = SymMatrix::from_rows(
        free.iter().map(|&i| free.iter().map(|&j| asm.k.get(i, j).clone()).collect()).collect(),
    );
    let ff: Vec<Expr> = free.iter().map(|&i| asm.f[i].clone()).collect();
    let df = solve_linear(&kff, &ff, opts.method, opts.parallelism)?;
    let mut d = vec![Expr::zero(&env); asm.dofs.len()];
    for (&g, x) in free.iter().zip(df) {
        d[g] = x;
    }
    let reactions = par_map(opts.parallelism, &asm.dofs.constrained, |&c| {
        let mut r = -&asm.f[c];
        for &j in free {
            let k = asm.k.get(c, j);
            if !k.is_zero() && !d[j].is_zero() {
                r = &r + &(k * &d[j]);
            }
        }
        let (node, dir) = DofMap::node_dir(c);
        Reaction { node, dir, value: r }
    });
    let displacements = d.chunks(2).map(|c| [c[0].clone(), c[1].clone()]).collect();
    Ok((displacements, reactions))
}

/// `N = (EA / L) * [-c, -s, c, s] . d_e`, tension positive.
pub fn axial_forces(
    m: &TrussModel,
    geometry: &[ElementGeometry],
    d: &[[Expr; 2]],
    par: Parallelism,
) -> Result<Vec<Expr>, EngineError> {
    par_map(par, &m.elements, |el| {
        let g = &geometry[el.id - 1];
        let du = &d[el.j - 1][0] - &d[el.i - 1][0];
        let dv = &d[el.j - 1][1] - &d[el.i - 1][1];
        let stretch = &(&g.c * &du) + &(&g.s * &dv);
        Ok(&el.stiffness.ea().checked_div(&g.length)? * &stretch)
    })
    .into_iter()
    .collect()
}

/// Axial stress `N / A`; requires every element to carry its own area.
pub fn element_stress(m: &TrussModel, forces: &[Expr]) -> Result<Vec<Expr>, EngineError> {
    m.elements
        .iter()
        .zip(forces)
        .map(|(el, n)| {
            let a = el.stiffness.area().ok_or(EngineError::AreaUnknown { element: el.id })?;
            Ok(n.checked_div(a)?)
        })
        .collect()
}

pub fn analyze(m: &TrussModel) -> Result<AnalysisResult, EngineError> {
    analyze_with(m, &AnalysisOptions::default())
}

pub fn analyze_with(m: &TrussModel, opts: &AnalysisOptions) -> Result<AnalysisResult, EngineError> {
    m.validate().map_err(EngineError::InvalidModel)?;
    let asm = assemble_with(m, opts.parallelism)?;
    let (displacements, reactions) = solve(&asm, opts)?;
    let axial_forces = axial_forces(m, &asm.geometry, &displacements, opts.parallelism)?;
    let stresses = if m.has_areas() { Some(element_stress(m, &axial_forces)?) } else { None };
    Ok(AnalysisResult { displacements, reactions, axial_forces, stresses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::load_model_str;
    use crate::parser::parse_expr;

    fn e(m: &TrussModel, s: &str) -> Expr {
        parse_expr(s, &m.env).unwrap()
    }

    #[test]
    fn example_one() {
        let m = fixtures::load("ex1").unwrap();
        let r = analyze(&m).unwrap();
        assert_eq!(*r.displacement(2, Dir::X), e(&m, "-P*L*(4*sqrt(2)-5*sqrt(5))/(9*EA)"));
        assert_eq!(*r.displacement(2, Dir::Y), e(&m, "-P*L*(8*sqrt(2)+5*sqrt(5))/(9*EA)"));
        assert_eq!(*r.axial_force(1), e(&m, "-2*sqrt(2)*P/3"));
        assert_eq!(*r.axial_force(2), e(&m, "-sqrt(5)*P/3"));
        assert!(r.stresses.is_none());
        assert!(matches!(element_stress(&m, &r.axial_forces), Err(EngineError::AreaUnknown { element: 1 })));
    }

    #[test]
    fn example_two_reactions() {
        let m = fixtures::load("ex2").unwrap();
        let r = analyze(&m).unwrap();
        assert_eq!(*r.reaction(1, Dir::Y).unwrap(), e(&m, "P/2"));
        assert_eq!(*r.reaction(2, Dir::Y).unwrap(), e(&m, "P/2"));
        assert!(r.reaction(1, Dir::X).unwrap().is_zero());
        assert!(r.reaction(2, Dir::X).is_none());
    }

    #[test]
    fn separate_area_gives_stress() {
        let text = fixtures::EX1.replace("EA L P", "E A L P").replace(" EA\n", " E A\n");
        let m = load_model_str(&text).unwrap();
        let r = analyze(&m).unwrap();
        let s = r.stresses.unwrap();
        assert_eq!(s[0], e(&m, "-2*sqrt(2)*P/(3*A)"));
    }

    #[test]
    fn collinear_chain_is_a_mechanism() {
        let text = "[parameters]\nEA L P\n[nodes]\n1 0 0\n2 L 0\n3 2*L 0\n\
                    [elements]\n1 1 2 EA\n2 2 3 EA\n[supports]\n1 fixed fixed\n2 free fixed\n\
                    [loads]\n3 0 -P\n";
        let m = load_model_str(text).unwrap();
        assert_eq!(analyze(&m).unwrap_err(), EngineError::Unstable);
    }

    #[test]
    fn routes_and_modes_agree() {
        for name in ["ex1", "ex2", "ex3"] {
            let m = fixtures::load(name).unwrap();
            let base = analyze(&m).unwrap();
            for parallelism in [Parallelism::Sequential, Parallelism::Parallel] {
                for method in [SolveMethod::FractionFree, SolveMethod::Field] {
                    let r = analyze_with(&m, &AnalysisOptions { parallelism, method }).unwrap();
                    assert_eq!(r.dof_vector(), base.dof_vector(), "{name}");
                    assert_eq!(r.axial_forces, base.axial_forces, "{name}");
                }
            }
        }
    }
}
