//! Lattice arguments: a JSON file holding a lattice description, or an
//! expression like `U+U+A2(-1)`, `E8(-1)^2+rank1(4)` or `lambda_2d(3)`.

use std::path::Path;

use nlcore::lattice::{IntegerLattice, LatticeSpec};
use sha2::{Digest, Sha256};

use crate::error::CliError;

fn named(name: &str, d: Option<u64>) -> Result<IntegerLattice, CliError> {
    if let Some((head, arg)) = name.strip_suffix(')').and_then(|s| s.split_once('(')) {
        if matches!(head, "lambda_2d" | "hodge_eisenstein") {
            let d: u64 = arg.parse().map_err(|_| CliError::bad_input(format!("bad d in {name:?}")))?;
            return Ok(LatticeSpec::Named { name: head.into(), d: Some(d) }.build()?);
        }
    }
    Ok(LatticeSpec::Named { name: name.into(), d }.build()?)
}

fn part(p: &str, d: Option<u64>) -> Result<Vec<IntegerLattice>, CliError> {
    let (base, reps) = match p.rsplit_once('^') {
        Some((b, n)) => (b, n.parse::<usize>().map_err(|_| CliError::bad_input(format!("bad power in {p:?}")))?),
        None => (p, 1),
    };
    // a trailing (c) rescales, except on names whose argument is a parameter
    let one = match base.strip_suffix(')').and_then(|s| s.rsplit_once('(')) {
        Some((head, c)) if !head.is_empty() && !matches!(head, "rank1" | "lambda_2d" | "hodge_eisenstein") => {
            let c: i64 = c.parse().map_err(|_| CliError::bad_input(format!("bad scale in {p:?}")))?;
            if c == 0 {
                return Err(CliError::bad_input("scale must be nonzero"));
            }
            named(head, d)?.rescale(c)
        }
        _ => named(base, d)?,
    };
    Ok(vec![one; reps])
}

/// Builds the lattice named by `arg`; `d` fills in families like lambda_2d.
pub fn parse_lattice(arg: &str, d: Option<u64>) -> Result<IntegerLattice, CliError> {
    if arg.ends_with(".json") || Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| CliError::bad_input(format!("{arg}: {e}")))?;
        let spec: LatticeSpec =
            serde_json::from_str(&text).map_err(|e| CliError::bad_input(format!("{arg}: {e}")))?;
        return Ok(spec.build()?);
    }
    let parts: Vec<&str> = arg.split('+').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::bad_input(format!("bad lattice expression {arg:?}")));
    }
    if parts.len() == 1 {
        let mut v = part(parts[0], d)?;
        if v.len() == 1 {
            return Ok(v.pop().unwrap());
        }
        return Ok(IntegerLattice::direct_sum(&v));
    }
    let mut all = vec![];
    for p in parts {
        all.extend(part(p, d)?);
    }
    Ok(IntegerLattice::direct_sum(&all))
}

/// sha256 of the Gram matrix, the identity of a lattice for caching.
pub fn lattice_hash(l: &IntegerLattice) -> String {
    let rows = l.gram().to_i64_rows().expect("gram fits i64");
    let bytes = serde_json::to_vec(&(rows, l.hyperbolic_planes())).expect("serializable");
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        let l = parse_lattice("U+U+A2(-1)", None).unwrap();
        assert_eq!(l.rank(), 6);
        assert_eq!(l.hyperbolic_planes(), 2);
        let l = parse_lattice("E8(-1)^2+rank1(4)", None).unwrap();
        assert_eq!(l.rank(), 17);
        assert_eq!(parse_lattice("lambda_2d(3)", None).unwrap().rank(), 21);
        assert_eq!(parse_lattice("lambda_2d", Some(3)).unwrap(), parse_lattice("lambda_2d(3)", None).unwrap());
        assert!(parse_lattice("lambda_2d", None).is_err());
        assert!(parse_lattice("Q7", None).is_err());
        assert!(parse_lattice("U+", None).is_err());
    }
}
