//! Exact self-checks on an assembled system and its solution.
//!
//! Every check is an identity in the symbolic field, so a pass means the
//! residual is exactly zero rather than small.

use crate::kernel::Expr;
use crate::model::{Dir, TrussModel};

use super::{AnalysisResult, Assembly, DofMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// First offending location when the check fails.
    pub detail: Option<String>,
}

impl CheckOutcome {
    fn new(name: &'static str, failure: Option<String>) -> Self {
        CheckOutcome { name, passed: failure.is_none(), detail: failure }
    }
}

/// Runs all checks; never short-circuits so every failure is reported.
pub fn audit(m: &TrussModel, asm: &Assembly, r: &AnalysisResult) -> Vec<CheckOutcome> {
    vec![
        CheckOutcome::new("stiffness symmetry", symmetry(asm)),
        CheckOutcome::new("rigid-body null space", rigid_body(m, asm)),
        CheckOutcome::new("nodal equilibrium", nodal_equilibrium(asm, r)),
        CheckOutcome::new("member equilibrium", member_equilibrium(m, asm, r)),
        CheckOutcome::new("global equilibrium", global_equilibrium(m, asm, r)),
    ]
}

fn symmetry(asm: &Assembly) -> Option<String> {
    let n = asm.k.rows();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| asm.k.get(i, j) != asm.k.get(j, i))
        .map(|(i, j)| format!("K[{i}][{j}] != K[{j}][{i}]"))
}

/// Translations in x and y plus the infinitesimal rotation `(-y, x)`.
pub fn rigid_body_modes(m: &TrussModel) -> [Vec<Expr>; 3] {
    let zero = Expr::zero(&m.env);
    let one = Expr::one(&m.env);
    let mut modes: [Vec<Expr>; 3] = Default::default();
    for node in &m.nodes {
        modes[0].extend([one.clone(), zero.clone()]);
        modes[1].extend([zero.clone(), one.clone()]);
        modes[2].extend([-&node.y, node.x.clone()]);
    }
    modes
}

fn rigid_body(m: &TrussModel, asm: &Assembly) -> Option<String> {
    for (k, mode) in rigid_body_modes(m).iter().enumerate() {
        match asm.k.mul_vec(mode) {
            Ok(v) => {
                if let Some(i) = v.iter().position(|x| !x.is_zero()) {
                    return Some(format!("mode {k}: (K v)[{i}] = {x}", x = v[i]));
                }
            }
            Err(e) => return Some(e.to_string()),
        }
    }
    None
}

/// Nodal force balance `f + R` at every DOF, with reactions on constrained ones.
fn applied_plus_reaction(asm: &Assembly, r: &AnalysisResult) -> Vec<Expr> {
    let mut total = asm.f.clone();
    for reaction in &r.reactions {
        let g = DofMap::dof(reaction.node, reaction.dir);
        total[g] = &total[g] + &reaction.value;
    }
    total
}

fn nodal_equilibrium(asm: &Assembly, r: &AnalysisResult) -> Option<String> {
    let d = r.dof_vector();
    if d.len() != asm.dofs.len() {
        return Some("displacement vector has the wrong length".into());
    }
    let kd = match asm.k.mul_vec(&d) {
        Ok(v) => v,
        Err(e) => return Some(e.to_string()),
    };
    let rhs = applied_plus_reaction(asm, r);
    kd.iter().zip(&rhs).position(|(a, b)| a != b).map(|g| {
        let (node, dir) = DofMap::node_dir(g);
        format!("node {node} {}: K d != f + R", dir.label())
    })
}

/// Member forces, loads and reactions balance at each joint.
fn member_equilibrium(m: &TrussModel, asm: &Assembly, r: &AnalysisResult) -> Option<String> {
    let mut sum = applied_plus_reaction(asm, r);
    for el in &m.elements {
        let g = &asm.geometry[el.id - 1];
        let n = &r.axial_forces[el.id - 1];
        let (fx, fy) = (n * &g.c, n * &g.s);
        // Tension pulls node i toward j and node j toward i.
        let (ix, iy) = (DofMap::dof(el.i, Dir::X), DofMap::dof(el.i, Dir::Y));
        let (jx, jy) = (DofMap::dof(el.j, Dir::X), DofMap::dof(el.j, Dir::Y));
        sum[ix] = &sum[ix] + &fx;
        sum[iy] = &sum[iy] + &fy;
        sum[jx] = &sum[jx] - &fx;
        sum[jy] = &sum[jy] - &fy;
    }
    sum.iter().position(|x| !x.is_zero()).map(|g| {
        let (node, dir) = DofMap::node_dir(g);
        format!("node {node} {}: residual {}", dir.label(), sum[g])
    })
}

fn global_equilibrium(m: &TrussModel, asm: &Assembly, r: &AnalysisResult) -> Option<String> {
    let total = applied_plus_reaction(asm, r);
    let mut fx = Expr::zero(&m.env);
    let mut fy = Expr::zero(&m.env);
    let mut moment = Expr::zero(&m.env);
    for node in &m.nodes {
        let (px, py) = (&total[2 * (node.id - 1)], &total[2 * (node.id - 1) + 1]);
        fx = &fx + px;
        fy = &fy + py;
        moment = &moment + &(&(&node.x * py) - &(&node.y * px));
    }
    [("sum Fx", fx), ("sum Fy", fy), ("sum M", moment)]
        .into_iter()
        .find(|(_, v)| !v.is_zero())
        .map(|(what, v)| format!("{what} = {v}"))
}
