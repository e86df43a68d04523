//! Text and JSON formats for algebras and partial functions.

use crate::algebra::{Elem, FiniteAlgebra, OperationTable};
use crate::error::{Error, Result};
use crate::partial::PartialFunction;
use std::fmt::Write;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with comments removed, paired with 1-based line numbers.
fn lines(src: &str) -> Vec<(usize, Vec<&str>)> {
    src.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("");
            let toks: Vec<&str> = l.split_whitespace().collect();
            (!toks.is_empty()).then_some((i + 1, toks))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| perr(line, format!("expected a non-negative integer, got `{tok}`")))
}

pub fn parse_algebra(src: &str) -> Result<FiniteAlgebra> {
    if src.trim_start().starts_with('{') {
        let alg: FiniteAlgebra = serde_json::from_str(src).map_err(|e| perr(e.line(), e.to_string()))?;
        alg.validate().map_err(|e| perr(1, e.to_string()))?;
        return Ok(alg);
    }
    let ls = lines(src);
    let mut it = ls.into_iter().peekable();
    let (l1, t1) = it.next().ok_or_else(|| perr(1, "empty input"))?;
    if t1.len() != 2 || t1[0] != "algebra" {
        return Err(perr(l1, "expected `algebra <name>`"));
    }
    let name = t1[1].to_string();
    let (l2, t2) = it.next().ok_or_else(|| perr(l1, "missing `size <n>`"))?;
    if t2.len() != 2 || t2[0] != "size" {
        return Err(perr(l2, "expected `size <n>`"));
    }
    let size: usize = parse_num(t2[1], l2)?;
    if size == 0 || size > u32::MAX as usize {
        return Err(perr(l2, "size must be positive"));
    }
    let mut ops = Vec::new();
    while let Some((l, t)) = it.next() {
        if t[0] != "op" || t.len() != 3 {
            return Err(perr(l, "expected `op <name> <arity>`"));
        }
        let arity: usize = parse_num(t[2], l)?;
        let want = crate::algebra::checked_pow(size, arity)
            .filter(|&w| w <= 1 << 28)
            .ok_or_else(|| perr(l, "table too large"))?;
        let mut table = Vec::with_capacity(want);
        let mut last = l;
        while table.len() < want {
            let Some((lx, tx)) = it.peek() else {
                return Err(perr(last, format!("operation {} needs {} entries, found {}", t[1], want, table.len())));
            };
            if tx[0] == "op" {
                return Err(perr(*lx, format!("operation {} needs {} entries, found {}", t[1], want, table.len())));
            }
            let (lx, tx) = it.next().unwrap();
            for tok in tx {
                let v: Elem = parse_num(tok, lx)?;
                if v as usize >= size {
                    return Err(perr(lx, format!("entry {v} outside universe of size {size}")));
                }
                table.push(v);
            }
            if table.len() > want {
                return Err(perr(lx, format!("operation {} has more than {} entries", t[1], want)));
            }
            last = lx;
        }
        ops.push(OperationTable { name: t[1].to_string(), arity, table });
    }
    FiniteAlgebra::new(name, size, ops)
}

pub fn emit_algebra(alg: &FiniteAlgebra) -> String {
    let mut s = String::new();
    writeln!(s, "algebra {}", alg.name).unwrap();
    writeln!(s, "size {}", alg.size).unwrap();
    for op in &alg.ops {
        writeln!(s, "op {} {}", op.name, op.arity).unwrap();
        let width = if op.arity == 0 { 1 } else { alg.size };
        for chunk in op.table.chunks(width) {
            let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            writeln!(s, "{}", line.join(" ")).unwrap();
        }
    }
    s
}

pub fn emit_algebra_json(alg: &FiniteAlgebra) -> String {
    serde_json::to_string(alg).expect("algebra serializes")
}

pub fn parse_function(src: &str, size: Option<usize>) -> Result<PartialFunction> {
    let ls = lines(src);
    let mut it = ls.into_iter();
    let (l1, t1) = it.next().ok_or_else(|| perr(1, "empty input"))?;
    if t1.len() != 2 || t1[0] != "fn" {
        return Err(perr(l1, "expected `fn <k>`"));
    }
    let k: usize = parse_num(t1[1], l1)?;
    let mut domain = Vec::new();
    let mut values = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for (l, t) in it {
        if t.len() != k + 2 || t[k] != "->" {
            return Err(perr(l, format!("expected `x1 .. x{k} -> v`")));
        }
        let mut tup = Vec::with_capacity(k);
        for tok in &t[..k] {
            tup.push(parse_num::<Elem>(tok, l)?);
        }
        let v: Elem = parse_num(t[k + 1], l)?;
        if let Some(n) = size {
            if v as usize >= n || tup.iter().any(|&x| x as usize >= n) {
                return Err(perr(l, format!("entry outside universe of size {n}")));
            }
        }
        match seen.get(&tup) {
            Some(&old) if old != v => return Err(perr(l, "conflicting values for a repeated tuple")),
            Some(_) => continue,
            None => {
                seen.insert(tup.clone(), v);
                domain.push(tup);
                values.push(v);
            }
        }
    }
    PartialFunction::new(k, domain, values)
}

pub fn emit_function(f: &PartialFunction) -> String {
    let mut s = String::new();
    writeln!(s, "fn {}", f.arity).unwrap();
    for (t, v) in f.domain.iter().zip(&f.values) {
        let args: Vec<String> = t.iter().map(|x| x.to_string()).collect();
        writeln!(s, "{} -> {}", args.join(" "), v).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let a = parse_algebra("algebra z2 # cyclic\nsize 2\nop + 2\n0 1\n1 0\n").unwrap();
        assert_eq!(a.size, 2);
        assert_eq!(a.ops[0].table, vec![0, 1, 1, 0]);
        let b = parse_algebra(&emit_algebra(&a)).unwrap();
        assert_eq!(a, b);
        let c = parse_algebra(&emit_algebra_json(&a)).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = parse_algebra("algebra x\nsize 2\nop + 2\n0 1\n1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }), "{e:?}");
        let e = parse_algebra("algebra x\nsize 2\nop + 2\n0 1 2 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e:?}");
        let e = parse_algebra("algebra x\nsiz 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_algebra("algebra x\nsize 2\nop c 0\n1\nop f 1\n0\nop g 1\n0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 7, .. }), "{e:?}");
    }

    #[test]
    fn functions_round_trip_and_reject_conflicts() {
        let f = parse_function("fn 2\n0 0 -> 0\n1 0 -> 0 # c\n0 1 -> 0\n1 1 -> 1\n", Some(4)).unwrap();
        assert_eq!(f.domain.len(), 4);
        assert_eq!(parse_function(&emit_function(&f), Some(4)).unwrap(), f);
        assert!(parse_function("fn 1\n0 -> 0\n0 -> 1\n", None).is_err());
        assert_eq!(parse_function("fn 1\n0 -> 1\n0 -> 1\n", None).unwrap().domain.len(), 1);
        assert!(matches!(parse_function("fn 1\n0 -> 9\n", Some(4)), Err(Error::Parse { line: 2, .. })));
    }
}
