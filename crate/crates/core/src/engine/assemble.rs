use crate::kernel::Expr;
use crate::model::{Dir, TrussModel};

use super::element::{element_geometry, global_element_stiffness, ElementGeometry};
use super::par::{map_range, Parallelism};
use super::{EngineError, SymMatrix};

/// Global DOF numbering and the free/constrained partition.
///
/// DOF `2 * (node - 1) + dir` with `x = 0`, `y = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofMap {
    pub free: Vec<usize>,
    pub constrained: Vec<usize>,
    /// For every global DOF, its position within `free` or `constrained`.
    slot: Vec<Slot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Free(usize),
    Constrained(usize),
}

impl DofMap {
    pub fn new(m: &TrussModel) -> Self {
        let mut free = Vec::new();
        let mut constrained = Vec::new();
        let mut slot = Vec::new();
        for f in m.fixity() {
            for fixed in f {
                let g = slot.len();
                if fixed {
                    slot.push(Slot::Constrained(constrained.len()));
                    constrained.push(g);
                } else {
                    slot.push(Slot::Free(free.len()));
                    free.push(g);
                }
            }
        }
        DofMap { free, constrained, slot }
    }

    pub fn dof(node: usize, dir: Dir) -> usize {
        2 * (node - 1) + dir.index()
    }

    /// Inverse of [`DofMap::dof`].
    pub fn node_dir(dof: usize) -> (usize, Dir) {
        (dof / 2 + 1, if dof.is_multiple_of(2) { Dir::X } else { Dir::Y })
    }

    pub fn slot(&self, dof: usize) -> Slot {
        self.slot[dof]
    }

    pub fn len(&self) -> usize {
        self.slot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slot.is_empty()
    }
}

/// Assembled global system.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub k: SymMatrix,
    pub f: Vec<Expr>,
    pub dofs: DofMap,
    pub geometry: Vec<ElementGeometry>,
}

pub fn assemble(m: &TrussModel) -> Result<Assembly, EngineError> {
    assemble_with(m, Parallelism::default())
}

pub fn assemble_with(m: &TrussModel, par: Parallelism) -> Result<Assembly, EngineError> {
    let per_element = map_range(par, 0..m.elements.len(), |k| {
        let el = &m.elements[k];
        let g = element_geometry(m, el.id)?;
        let ke = global_element_stiffness(&el.stiffness.ea(), &g)?;
        Ok::<_, EngineError>((g, ke))
    });
    let n = 2 * m.node_count();
    let mut k = SymMatrix::zeros(&m.env, n, n);
    let mut geometry = Vec::with_capacity(m.elements.len());
    for (el, res) in m.elements.iter().zip(per_element) {
        let (g, ke) = res?;
        let map = [
            DofMap::dof(el.i, Dir::X),
            DofMap::dof(el.i, Dir::Y),
            DofMap::dof(el.j, Dir::X),
            DofMap::dof(el.j, Dir::Y),
        ];
        for (a, &ga) in map.iter().enumerate() {
            for (b, &gb) in map.iter().enumerate() {
                let v = ke.get(a, b);
                if !v.is_zero() {
                    k.add_at(ga, gb, v);
                }
            }
        }
        geometry.push(g);
    }
    let f = m.load_table().into_iter().flatten().collect();
    Ok(Assembly { k, f, dofs: DofMap::new(m), geometry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::parser::parse_expr;

    #[test]
    fn example_one_assembly() {
        let m = fixtures::load("ex1").unwrap();
        let a = assemble(&m).unwrap();
        assert_eq!((a.k.rows(), a.k.cols()), (6, 6));
        assert!(a.k.is_symmetric());
        // Node 2 x-x entry by hand: element 1 has c^2 = 1/2, length L*sqrt(2);
        // element 2 runs (L,L) -> (3L,0), c^2 = 4/5, length L*sqrt(5).
        let by_hand = parse_expr("EA/(2*L*sqrt(2)) + 4*EA/(5*L*sqrt(5))", &m.env).unwrap();
        assert_eq!(*a.k.get(2, 2), by_hand);
        assert_eq!(a.dofs.free, vec![2, 3]);
        assert_eq!(a.dofs.constrained, vec![0, 1, 4, 5]);
        assert_eq!(a.f[3], parse_expr("-P", &m.env).unwrap());
    }

    #[test]
    fn unloaded_model_has_zero_forces() {
        let mut m = fixtures::load("ex2").unwrap();
        m.loads.clear();
        let a = assemble(&m).unwrap();
        assert!(a.f.iter().all(Expr::is_zero));
    }

    #[test]
    fn all_fixtures_symmetric() {
        for (name, _) in fixtures::ALL {
            let m = fixtures::load(name).unwrap();
            assert!(assemble(&m).unwrap().k.is_symmetric(), "{name}");
        }
    }

    #[test]
    fn dof_numbering() {
        assert_eq!(DofMap::dof(3, Dir::Y), 5);
        assert_eq!(DofMap::node_dir(5), (3, Dir::Y));
    }
}
