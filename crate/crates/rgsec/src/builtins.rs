//! Version-controlled spec documents for the worked examples.

use crate::document::SpecDocument;
use crate::error::{CliError, CliResult};

pub const NAMES: [&str; 6] = ["ex_cd", "ex_oscillators", "ex_bt", "ex_third", "ex_scalar1", "ex_difference"];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "ex_cd" => include_str!("../builtins/ex_cd.toml"),
        "ex_oscillators" => include_str!("../builtins/ex_oscillators.toml"),
        "ex_bt" => include_str!("../builtins/ex_bt.toml"),
        "ex_third" => include_str!("../builtins/ex_third.toml"),
        "ex_scalar1" => include_str!("../builtins/ex_scalar1.toml"),
        "ex_difference" => include_str!("../builtins/ex_difference.toml"),
        _ => return None,
    })
}

pub fn load(name: &str) -> CliResult<SpecDocument> {
    let src = source(name)
        .ok_or_else(|| CliError::Spec(format!("unknown builtin `{name}`; expected one of {}", NAMES.join(", "))))?;
    SpecDocument::from_toml(src)
}
