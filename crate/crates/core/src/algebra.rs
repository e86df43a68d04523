//! Finite algebras stored as flat operation tables.

use crate::congruence::Congruence;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationTable {
    pub name: String,
    pub arity: usize,
    pub table: Vec<Elem>,
}

impl OperationTable {
    #[inline]
    pub fn index(&self, size: usize, args: &[Elem]) -> usize {
        args.iter().fold(0, |acc, &a| acc * size + a as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub ops: Vec<OperationTable>,
}

/// A total function A^k -> A, stored like an operation table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunctionTable {
    pub arity: usize,
    pub table: Vec<Elem>,
}

impl FunctionTable {
    pub fn get(&self, size: usize, args: &[Elem]) -> Elem {
        let idx = args.iter().fold(0usize, |acc, &a| acc * size + a as usize);
        self.table[idx]
    }
}

impl FiniteAlgebra {
    pub fn new(name: impl Into<String>, size: usize, ops: Vec<OperationTable>) -> Result<Self> {
        let alg = FiniteAlgebra { name: name.into(), size, ops };
        alg.validate()?;
        Ok(alg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::usage("algebra size must be positive"));
        }
        for op in &self.ops {
            let want = checked_pow(self.size, op.arity)
                .ok_or_else(|| Error::usage(format!("operation {} too large", op.name)))?;
            if op.table.len() != want {
                return Err(Error::usage(format!(
                    "operation {} of arity {} needs {} entries, got {}",
                    op.name,
                    op.arity,
                    want,
                    op.table.len()
                )));
            }
            if let Some(bad) = op.table.iter().find(|&&v| v as usize >= self.size) {
                return Err(Error::usage(format!(
                    "operation {} has entry {} outside universe of size {}",
                    op.name, bad, self.size
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, op_index: usize, args: &[Elem]) -> Result<Elem> {
        let op = self.ops.get(op_index).ok_or_else(|| Error::usage(format!("no operation with index {op_index}")))?;
        if args.len() != op.arity {
            return Err(Error::usage(format!(
                "operation {} has arity {}, got {} arguments",
                op.name,
                op.arity,
                args.len()
            )));
        }
        if let Some(a) = args.iter().find(|&&a| a as usize >= self.size) {
            return Err(Error::usage(format!("argument {a} outside universe")));
        }
        Ok(self.apply(op_index, args))
    }

    /// Unchecked table lookup.
    #[inline]
    pub fn apply(&self, op_index: usize, args: &[Elem]) -> Elem {
        let op = &self.ops[op_index];
        op.table[op.index(self.size, args)]
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|o| o.arity).max().unwrap_or(0)
    }

    /// The algebra A+f: one more table appended.
    pub fn expand(&self, name: &str, f: &FunctionTable) -> Result<FiniteAlgebra> {
        let mut ops = self.ops.clone();
        ops.push(OperationTable { name: name.to_string(), arity: f.arity, table: f.table.clone() });
        FiniteAlgebra::new(format!("{}+{}", self.name, name), self.size, ops)
    }

    /// Quotient by a congruence; returns the algebra and the class map A -> A/θ.
    pub fn quotient(&self, theta: &Congruence) -> Result<(FiniteAlgebra, Vec<Elem>)> {
        if theta.size() != self.size {
            return Err(Error::InvalidCongruence("partition has the wrong size".into()));
        }
        if !theta.is_compatible(self) {
            return Err(Error::InvalidCongruence("partition is not compatible with the operations".into()));
        }
        let n = theta.num_blocks();
        let reps = theta.representatives();
        let mut ops = Vec::with_capacity(self.ops.len());
        for (oi, op) in self.ops.iter().enumerate() {
            let len = n.pow(op.arity as u32);
            let mut table = Vec::with_capacity(len);
            let mut args = vec![0 as Elem; op.arity];
            for idx in 0..len {
                decode_into(idx, n, &mut args);
                let lifted: Vec<Elem> = args.iter().map(|&c| reps[c as usize]).collect();
                table.push(theta.block_of(self.apply(oi, &lifted)));
            }
            ops.push(OperationTable { name: op.name.clone(), arity: op.arity, table });
        }
        let q = FiniteAlgebra { name: format!("{}/θ", self.name), size: n, ops };
        Ok((q, theta.blocks().to_vec()))
    }

    /// Direct product of cyclic groups Z_{n1} x ... with a single binary `+`.
    pub fn abelian_group(orders: &[usize]) -> FiniteAlgebra {
        let size: usize = orders.iter().product();
        let digits = |mut x: usize| {
            let mut d = vec![0usize; orders.len()];
            for i in (0..orders.len()).rev() {
                d[i] = x % orders[i];
                x /= orders[i];
            }
            d
        };
        let mut table = Vec::with_capacity(size * size);
        for a in 0..size {
            let da = digits(a);
            for b in 0..size {
                let db = digits(b);
                let mut v = 0usize;
                for i in 0..orders.len() {
                    v = v * orders[i] + (da[i] + db[i]) % orders[i];
                }
                table.push(v as Elem);
            }
        }
        let name = orders.iter().map(|o| format!("Z{o}")).collect::<Vec<_>>().join("x");
        FiniteAlgebra { name, size, ops: vec![OperationTable { name: "+".into(), arity: 2, table }] }
    }

    pub fn trivial() -> FiniteAlgebra {
        FiniteAlgebra { name: "trivial".into(), size: 1, ops: vec![] }
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Writes the base-`n` digits of `idx` into `out`, most significant first.
#[inline]
pub fn decode_into(mut idx: usize, n: usize, out: &mut [Elem]) {
    for slot in out.iter_mut().rev() {
        *slot = (idx % n) as Elem;
        idx /= n;
    }
}

/// Iterates all tuples of A^k in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = n.pow(k as u32);
    (0..total).map(move |i| {
        let mut t = vec![0; k];
        decode_into(i, n, &mut t);
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_z4() {
        let z4 = FiniteAlgebra::abelian_group(&[4]);
        assert_eq!(z4.evaluate(0, &[1, 3]).unwrap(), 0);
        assert_eq!(z4.evaluate(0, &[0, 0]).unwrap(), 0);
        assert!(z4.evaluate(1, &[0, 0]).is_err());
        assert!(z4.evaluate(0, &[0]).is_err());
        assert!(z4.evaluate(0, &[0, 4]).is_err());
    }

    #[test]
    fn validation_rejects_bad_tables() {
        let op = OperationTable { name: "f".into(), arity: 1, table: vec![0, 2] };
        assert!(FiniteAlgebra::new("bad", 2, vec![op]).is_err());
        let op = OperationTable { name: "f".into(), arity: 2, table: vec![0, 1] };
        assert!(FiniteAlgebra::new("bad", 2, vec![op]).is_err());
        let op = OperationTable { name: "c".into(), arity: 0, table: vec![1] };
        assert!(FiniteAlgebra::new("ok", 2, vec![op]).is_ok());
    }

    #[test]
    fn product_group_is_klein() {
        let k = FiniteAlgebra::abelian_group(&[2, 2]);
        for a in 0..4 {
            assert_eq!(k.apply(0, &[a, a]), 0);
        }
        assert_eq!(k.apply(0, &[1, 2]), 3);
    }
}
