//! Two-node truss element: geometry, local and global stiffness.

use crate::kernel::{Expr, KernelError};
use crate::model::TrussModel;

use super::{EngineError, SymMatrix};

#[derive(Clone, Debug)]
pub struct ElementGeometry {
    pub dx: Expr,
    pub dy: Expr,
    pub length: Expr,
    pub c: Expr,
    pub s: Expr,
}

pub fn element_geometry(m: &TrussModel, id: usize) -> Result<ElementGeometry, EngineError> {
    let el = m.element(id);
    let (a, b) = (m.node(el.i), m.node(el.j));
    geometry_between(&a.x, &a.y, &b.x, &b.y).map_err(|e| match e {
        EngineError::Kernel(KernelError::ZeroRadicand) => EngineError::ZeroLength { element: id },
        other => other,
    })
}

pub(crate) fn geometry_between(
    xi: &Expr,
    yi: &Expr,
    xj: &Expr,
    yj: &Expr,
) -> Result<ElementGeometry, EngineError> {
    let dx = xj - xi;
    let dy = yj - yi;
    let length = (&(&dx * &dx) + &(&dy * &dy)).sqrt()?;
    let c = dx.checked_div(&length)?;
    let s = dy.checked_div(&length)?;
    Ok(ElementGeometry { dx, dy, length, c, s })
}

/// `(EA / length) * [[1, -1], [-1, 1]]`.
pub fn local_stiffness(ea: &Expr, length: &Expr) -> Result<SymMatrix, EngineError> {
    let k = ea.checked_div(length)?;
    let nk = -&k;
    Ok(SymMatrix::from_rows(vec![vec![k.clone(), nk.clone()], vec![nk, k]]))
}

/// Maps the four global DOFs of an element onto its two axial ones.
pub fn transformation(c: &Expr, s: &Expr) -> Result<SymMatrix, EngineError> {
    let unit = &(c * c) + &(s * s);
    if !unit.is_one() {
        return Err(EngineError::NonUnitDirection);
    }
    let z = Expr::zero(c.env());
    Ok(SymMatrix::from_rows(vec![
        vec![c.clone(), s.clone(), z.clone(), z.clone()],
        vec![z.clone(), z, c.clone(), s.clone()],
    ]))
}

fn closed_form(ea: &Expr, g: &ElementGeometry) -> Result<SymMatrix, EngineError> {
    let k = ea.checked_div(&g.length)?;
    let cc = &(&g.c * &g.c) * &k;
    let cs = &(&g.c * &g.s) * &k;
    let ss = &(&g.s * &g.s) * &k;
    let (ncc, ncs, nss) = (-&cc, -&cs, -&ss);
    Ok(SymMatrix::from_rows(vec![
        vec![cc.clone(), cs.clone(), ncc.clone(), ncs.clone()],
        vec![cs.clone(), ss.clone(), ncs.clone(), nss.clone()],
        vec![ncc.clone(), ncs.clone(), cc, cs.clone()],
        vec![ncs, nss, cs, ss],
    ]))
}

/// Global 4x4 element stiffness, built in closed form and cross-checked
/// against `T^T * k * T`.
pub fn global_element_stiffness(ea: &Expr, g: &ElementGeometry) -> Result<SymMatrix, EngineError> {
    let closed = closed_form(ea, g)?;
    let t = transformation(&g.c, &g.s)?;
    let product = t.transpose().mul(&local_stiffness(ea, &g.length)?)?.mul(&t)?;
    if !closed.equals(&product) {
        return Err(EngineError::Invariant(
            "element stiffness: closed form and transformation product disagree".into(),
        ));
    }
    Ok(closed)
}
