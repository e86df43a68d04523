//! Partitions, congruence generation and Mal'cev polynomial detection.

use crate::algebra::{decode_into, Elem, FiniteAlgebra, FunctionTable};
use crate::closure::{find_row, ClosureConfig, Origin, Term};
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Congruence {
    blocks: Vec<Elem>,
    num_blocks: usize,
}

impl Congruence {
    /// Canonicalizes arbitrary class labels (first-occurrence order).
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> Congruence {
        let mut map = rustc_hash::FxHashMap::default();
        let blocks: Vec<Elem> = labels
            .iter()
            .map(|l| {
                let next = map.len() as Elem;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Congruence { num_blocks: map.len(), blocks }
    }

    pub fn from_classes(size: usize, classes: &[Vec<Elem>]) -> Result<Congruence> {
        let mut labels = vec![usize::MAX; size];
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                let slot = labels.get_mut(x as usize).ok_or_else(|| Error::usage("class element out of range"))?;
                if *slot != usize::MAX {
                    return Err(Error::usage("classes overlap"));
                }
                *slot = i;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::usage("classes do not cover the universe"));
        }
        Ok(Congruence::from_labels(&labels))
    }

    pub fn identity(size: usize) -> Congruence {
        Congruence { blocks: (0..size as Elem).collect(), num_blocks: size }
    }

    pub fn total(size: usize) -> Congruence {
        Congruence { blocks: vec![0; size], num_blocks: 1.min(size) }
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn blocks(&self) -> &[Elem] {
        &self.blocks
    }

    #[inline]
    pub fn block_of(&self, a: Elem) -> Elem {
        self.blocks[a as usize]
    }

    #[inline]
    pub fn related(&self, a: Elem, b: Elem) -> bool {
        self.blocks[a as usize] == self.blocks[b as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.num_blocks == self.blocks.len()
    }

    pub fn is_total(&self) -> bool {
        self.num_blocks <= 1
    }

    /// Least element of each block, indexed by block id.
    pub fn representatives(&self) -> Vec<Elem> {
        let mut reps = vec![Elem::MAX; self.num_blocks];
        for (x, &b) in self.blocks.iter().enumerate() {
            if reps[b as usize] == Elem::MAX {
                reps[b as usize] = x as Elem;
            }
        }
        reps
    }

    pub fn classes(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.num_blocks];
        for (x, &b) in self.blocks.iter().enumerate() {
            out[b as usize].push(x as Elem);
        }
        out
    }

    pub fn class_of(&self, a: Elem) -> Vec<Elem> {
        let b = self.blocks[a as usize];
        (0..self.size() as Elem).filter(|&x| self.blocks[x as usize] == b).collect()
    }

    pub fn leq(&self, other: &Congruence) -> bool {
        let mut img = vec![Elem::MAX; self.num_blocks];
        for (x, &b) in self.blocks.iter().enumerate() {
            let o = other.blocks[x];
            let slot = &mut img[b as usize];
            if *slot == Elem::MAX {
                *slot = o;
            } else if *slot != o {
                return false;
            }
        }
        true
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let pairs: Vec<(Elem, Elem)> = self.blocks.iter().zip(&other.blocks).map(|(&a, &b)| (a, b)).collect();
        Congruence::from_labels(&pairs)
    }

    /// Join as equivalence relations (transitive closure of the union).
    pub fn join_partition(&self, other: &Congruence) -> Congruence {
        let n = self.size();
        let mut uf = UnionFind::new(n);
        let mut first = vec![usize::MAX; self.num_blocks];
        for x in 0..n {
            let b = self.blocks[x] as usize;
            if first[b] == usize::MAX {
                first[b] = x;
            } else {
                uf.union(first[b], x);
            }
        }
        let mut first = vec![usize::MAX; other.num_blocks];
        for x in 0..n {
            let b = other.blocks[x] as usize;
            if first[b] == usize::MAX {
                first[b] = x;
            } else {
                uf.union(first[b], x);
            }
        }
        uf.to_congruence()
    }

    /// Exhaustive compatibility check via basic translations.
    pub fn is_compatible(&self, alg: &FiniteAlgebra) -> bool {
        let n = alg.size;
        if self.size() != n {
            return false;
        }
        let reps = self.representatives();
        for (oi, op) in alg.ops.iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            let total = n.pow(op.arity as u32);
            let mut args = vec![0; op.arity];
            for idx in 0..total {
                decode_into(idx, n, &mut args);
                let v = self.blocks[op.table[idx] as usize];
                for pos in 0..op.arity {
                    let keep = args[pos];
                    args[pos] = reps[self.blocks[keep as usize] as usize];
                    let w = self.blocks[alg.apply(oi, &args) as usize];
                    args[pos] = keep;
                    if v != w {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Relational product self ∘ other contains (a,c) iff ∃b: a self b other c.
    pub fn permutes_with(&self, other: &Congruence) -> bool {
        let n = self.size();
        let compose = |x: &Congruence, y: &Congruence| {
            let mut rel = vec![false; n * n];
            for a in 0..n {
                for b in 0..n {
                    if x.related(a as Elem, b as Elem) {
                        for c in 0..n {
                            if y.related(b as Elem, c as Elem) {
                                rel[a * n + c] = true;
                            }
                        }
                    }
                }
            }
            rel
        };
        compose(self, other) == compose(other, self)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        let n = self.size() as Elem;
        (0..n).flat_map(move |a| (0..n).filter(move |&b| self.related(a, b)).map(move |b| (a, b)))
    }
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two different classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // smaller root wins so labels stay stable
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }

    pub fn to_congruence(&mut self) -> Congruence {
        let roots: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Congruence::from_labels(&roots)
    }
}

/// Anything with finitary operations on {0..size-1}.
pub trait OpStructure {
    fn size(&self) -> usize;
    fn arities(&self) -> Vec<usize>;
    fn apply_op(&self, op: usize, args: &[Elem]) -> Elem;
}

impl OpStructure for FiniteAlgebra {
    fn size(&self) -> usize {
        self.size
    }
    fn arities(&self) -> Vec<usize> {
        self.ops.iter().map(|o| o.arity).collect()
    }
    fn apply_op(&self, op: usize, args: &[Elem]) -> Elem {
        self.apply(op, args)
    }
}

/// Smallest congruence containing the given pairs. Every merged pair is pushed
/// through all basic translations, which generate the unary polynomials.
pub fn generate_congruence<S: OpStructure + ?Sized>(s: &S, pairs: &[(Elem, Elem)]) -> Congruence {
    let n = s.size();
    let mut uf = UnionFind::new(n);
    let mut queue: Vec<(Elem, Elem)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a as usize, b as usize) {
            queue.push((a, b));
        }
    }
    let arities = s.arities();
    let mut args: Vec<Elem> = Vec::new();
    while let Some((x, y)) = queue.pop() {
        for (op, &r) in arities.iter().enumerate() {
            if r == 0 {
                continue;
            }
            let others = n.pow(r as u32 - 1);
            args.resize(r, 0);
            for pos in 0..r {
                for idx in 0..others {
                    let mut rest = idx;
                    for j in (0..r).rev() {
                        if j == pos {
                            continue;
                        }
                        args[j] = (rest % n) as Elem;
                        rest /= n;
                    }
                    args[pos] = x;
                    let u = s.apply_op(op, &args);
                    args[pos] = y;
                    let v = s.apply_op(op, &args);
                    if uf.union(u as usize, v as usize) {
                        queue.push((u, v));
                    }
                }
            }
        }
    }
    uf.to_congruence()
}

pub fn principal_congruence(alg: &FiniteAlgebra, a: Elem, b: Elem) -> Result<Congruence> {
    if a as usize >= alg.size || b as usize >= alg.size {
        return Err(Error::usage("element outside universe"));
    }
    Ok(generate_congruence(alg, &[(a, b)]))
}

/// Join inside Con(A): the partition join, re-closed when it is not compatible.
pub fn join_congruences(alg: &FiniteAlgebra, a: &Congruence, b: &Congruence) -> Congruence {
    let j = a.join_partition(b);
    if j.is_compatible(alg) {
        return j;
    }
    let pairs: Vec<(Elem, Elem)> = j
        .representatives()
        .iter()
        .enumerate()
        .flat_map(|(blk, &r)| {
            j.blocks().iter().enumerate().filter(move |(_, &bb)| bb as usize == blk).map(move |(x, _)| (r, x as Elem))
        })
        .collect();
    generate_congruence(alg, &pairs)
}

/// A Mal'cev polynomial: its values on the pattern set, the total table and
/// a term producing it.
#[derive(Debug, Clone)]
pub struct MalcevWitness {
    pub pattern: Vec<Vec<Elem>>,
    pub row: Vec<Elem>,
    pub table: std::sync::Arc<FunctionTable>,
    pub term: Term,
}

impl MalcevWitness {
    #[inline]
    pub fn d(&self, n: usize, a: Elem, b: Elem, c: Elem) -> Elem {
        self.table.table[(a as usize * n + b as usize) * n + c as usize]
    }
}

/// {(a,b,b)} ∪ {(b,b,a)} with the required values, duplicates removed.
pub fn malcev_pattern(n: usize) -> (Vec<Vec<Elem>>, Vec<Elem>) {
    let mut seen = std::collections::HashSet::new();
    let mut tuples = Vec::new();
    let mut row = Vec::new();
    for a in 0..n as Elem {
        for b in 0..n as Elem {
            if seen.insert((a, b, b)) {
                tuples.push(vec![a, b, b]);
                row.push(a);
            }
        }
    }
    for a in 0..n as Elem {
        for b in 0..n as Elem {
            if seen.insert((b, b, a)) {
                tuples.push(vec![b, b, a]);
                row.push(a);
            }
        }
    }
    (tuples, row)
}

pub fn is_malcev_table(n: usize, t: &FunctionTable) -> bool {
    let d = |a: usize, b: usize, c: usize| t.table[(a * n + b) * n + c] as usize;
    (0..n).all(|a| (0..n).all(|b| d(a, b, b) == a && d(b, b, a) == a))
}

/// x · y^{-1} · z for a group operation, written with the operation only.
fn group_candidate(alg: &FiniteAlgebra) -> Option<Term> {
    let n = alg.size;
    for (oi, op) in alg.ops.iter().enumerate() {
        if op.arity != 2 {
            continue;
        }
        let m = |a: usize, b: usize| op.table[a * n + b] as usize;
        let Some(e) = (0..n).find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a)) else { continue };
        if !(0..n).all(|a| (0..n).any(|b| m(a, b) == e)) {
            continue;
        }
        // exponent of the (putative) group
        let order = |a: usize| {
            let (mut x, mut k) = (a, 1);
            while x != e && k <= n {
                x = m(x, a);
                k += 1;
            }
            k
        };
        let mut exp = 1usize;
        for a in 0..n {
            let o = order(a);
            exp = exp / gcd(exp, o) * o;
        }
        let mut nodes = vec![Origin::Coord(0), Origin::Coord(1), Origin::Coord(2)];
        // inverse of y as y^(exp-1)
        let mut inv = if exp == 1 {
            nodes.push(Origin::Const(e as Elem));
            nodes.len() - 1
        } else {
            1
        };
        for _ in 2..exp {
            nodes.push(Origin::Apply { op: oi, args: vec![inv as u32, 1] });
            inv = nodes.len() - 1;
        }
        nodes.push(Origin::Apply { op: oi, args: vec![0, inv as u32] });
        let xy = nodes.len() - 1;
        nodes.push(Origin::Apply { op: oi, args: vec![xy as u32, 2] });
        let term = Term { arity: 3, nodes };
        if is_malcev_table(n, &term.table(alg)) {
            return Some(term);
        }
    }
    None
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Searches Pol_3(A) restricted to the pattern set for the Mal'cev row.
pub fn find_malcev_polynomial(alg: &FiniteAlgebra, cfg: ClosureConfig) -> Result<Option<MalcevWitness>> {
    let n = alg.size;
    let (pattern, row) = malcev_pattern(n);
    let term = match group_candidate(alg) {
        Some(t) => Some(t),
        None => find_row(alg, &pattern, &row, cfg)?,
    };
    Ok(term.map(|term| {
        let table = term.table(alg);
        debug_assert!(is_malcev_table(n, &table));
        MalcevWitness { pattern, row, table: std::sync::Arc::new(table), term }
    }))
}
