//! The bundled algebras.

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::format::parse_algebra;

pub const NAMES: [&str; 10] = ["z2", "z3", "z4", "z5", "z2sq", "s3", "m2z2-mod", "m3z2-mod", "m2z3-mod", "lattice2"];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "z2" => include_str!("../corpus/z2.alg"),
        "z3" => include_str!("../corpus/z3.alg"),
        "z4" => include_str!("../corpus/z4.alg"),
        "z5" => include_str!("../corpus/z5.alg"),
        "z2sq" => include_str!("../corpus/z2sq.alg"),
        "s3" => include_str!("../corpus/s3.alg"),
        "m2z2-mod" => include_str!("../corpus/m2z2-mod.alg"),
        "m3z2-mod" => include_str!("../corpus/m3z2-mod.alg"),
        "m2z3-mod" => include_str!("../corpus/m2z3-mod.alg"),
        "lattice2" => include_str!("../corpus/lattice2.alg"),
        _ => return None,
    })
}

pub fn load(name: &str) -> Result<FiniteAlgebra> {
    let src = source(name).ok_or_else(|| Error::usage(format!("no bundled algebra named {name}")))?;
    parse_algebra(src)
}

pub fn all() -> Vec<FiniteAlgebra> {
    NAMES.iter().map(|n| load(n).expect("bundled algebra parses")).collect()
}
