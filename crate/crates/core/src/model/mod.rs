//! Equation specifications, the expression grammar for `V`, and structural
//! transforms between equation classes.

mod expr;
mod spec;

pub use expr::{parse_expression, parse_poly, Expr};
pub use spec::{
    compose, numbered, renormalized_name, renormalized_names, LinearPart, ODESystemSpec,
    OscillatorSpec,
};
