//! The bundled example models, embedded at compile time.

pub const EX1: &str = include_str!("../../../fixtures/ex1.truss");
pub const EX2: &str = include_str!("../../../fixtures/ex2.truss");
pub const EX3: &str = include_str!("../../../fixtures/ex3.truss");
pub const EX4: &str = include_str!("../../../fixtures/ex4.truss");
pub const EX5: &str = include_str!("../../../fixtures/ex5.truss");

pub const ALL: [(&str, &str); 5] = [("ex1", EX1), ("ex2", EX2), ("ex3", EX3), ("ex4", EX4), ("ex5", EX5)];

/// Loads a bundled model by name (`ex1` .. `ex5`).
pub fn load(name: &str) -> Option<crate::model::TrussModel> {
    let (_, text) = ALL.iter().find(|(n, _)| *n == name)?;
    Some(crate::model::load_model_str(text).expect("bundled fixture is valid"))
}
