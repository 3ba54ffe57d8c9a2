//! Exact computer-algebra kernel.
//!
//! Expressions are rational functions over integer polynomials in the
//! declared symbols, extended by square roots. See [`Expr`] for the normal
//! form and [`ParamEnv`] for how radicals are shared.

mod env;
mod expr;
pub mod gcd;
mod intfactor;
pub mod poly;
mod render;

pub use env::{ParamEnv, Symbol};
pub use expr::{Bindings, Expr};
pub use render::RenderStyle;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of zero")]
    ZeroRadicand,
    #[error("nested radicals are not supported")]
    NestedRadical,
    #[error("square root of a negative quantity")]
    NegativeRadicand,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid symbol name `{0}`")]
    InvalidSymbolName(String),
    #[error("binding for `{symbol}` must be strictly positive, got {value}")]
    NonPositiveBinding { symbol: String, value: String },
    #[error("symbol `{0}` is not bound")]
    UnboundSymbol(String),
    #[error("expressions belong to different parameter environments")]
    EnvMismatch,
}
