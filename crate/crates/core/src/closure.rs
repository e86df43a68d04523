//! Subuniverse generation in powers of a finite algebra.
//!
//! Rows live in A^T for a fixed list T of k-tuples. The generators are the k
//! coordinate rows and every constant row, so the closure is exactly
//! {p|_T : p ∈ Pol_k(A)}.

use crate::algebra::{decode_into, Elem, FiniteAlgebra, FunctionTable};
use crate::error::{Error, Result};
use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

pub const DEFAULT_CAP: usize = 5_000_000;

type RowSet = IndexSet<Box<[Elem]>, FxBuildHasher>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureConfig {
    pub cap: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig { cap: DEFAULT_CAP }
    }
}

/// How a row entered the closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Const(Elem),
    Coord(usize),
    Apply { op: usize, args: Vec<u32> },
}

/// A straight-line program over the basic operations. Node `i` may only refer
/// to nodes `< i`; the last node is the result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub arity: usize,
    pub nodes: Vec<Origin>,
}

impl Term {
    pub fn eval(&self, alg: &FiniteAlgebra, args: &[Elem]) -> Elem {
        let mut vals: Vec<Elem> = Vec::with_capacity(self.nodes.len());
        let mut buf = Vec::new();
        for node in &self.nodes {
            let v = match node {
                Origin::Const(c) => *c,
                Origin::Coord(i) => args[*i],
                Origin::Apply { op, args: a } => {
                    buf.clear();
                    buf.extend(a.iter().map(|&j| vals[j as usize]));
                    alg.apply(*op, &buf)
                }
            };
            vals.push(v);
        }
        *vals.last().expect("empty term")
    }

    pub fn table(&self, alg: &FiniteAlgebra) -> FunctionTable {
        let n = alg.size;
        let len = n.pow(self.arity as u32);
        let mut t = vec![0; self.arity];
        let table = (0..len)
            .map(|i| {
                decode_into(i, n, &mut t);
                self.eval(alg, &t)
            })
            .collect();
        FunctionTable { arity: self.arity, table }
    }
}

/// A closure, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub width: usize,
    rows: Vec<Box<[Elem]>>,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Box<[Elem]>] {
        &self.rows
    }

    pub fn contains(&self, row: &[Elem]) -> bool {
        self.rows.binary_search_by(|r| r.as_ref().cmp(row)).is_ok()
    }

    /// Whether some row starts with `prefix`.
    pub fn has_prefix(&self, prefix: &[Elem]) -> bool {
        let i = self.rows.partition_point(|r| r[..prefix.len()] < *prefix);
        i < self.rows.len() && self.rows[i][..prefix.len()] == *prefix
    }

    pub fn into_rows(self) -> Vec<Box<[Elem]>> {
        self.rows
    }
}

/// Structure of the algebra that the engine can exploit.
#[derive(Debug, Clone)]
enum Strategy {
    /// An abelian group operation for which every operation is affine.
    Affine {
        plus: usize,
        zero: Elem,
    },
    /// A group operation; the remaining operations are closed semi-naively.
    Group {
        mul: usize,
        one: Elem,
    },
    Plain,
}

const STRUCTURE_LIMIT: usize = 256;

fn detect(alg: &FiniteAlgebra) -> Strategy {
    let n = alg.size;
    if n > STRUCTURE_LIMIT {
        return Strategy::Plain;
    }
    let mut group = None;
    for (oi, op) in alg.ops.iter().enumerate() {
        if op.arity != 2 {
            continue;
        }
        let Some(e) = group_identity(alg, oi) else { continue };
        let abelian = (0..n).all(|a| (0..n).all(|b| mul(alg, oi, a, b) == mul(alg, oi, b, a)));
        if abelian && alg.ops.iter().all(|f| is_affine(alg, oi, e, f.arity, &f.table)) {
            return Strategy::Affine { plus: oi, zero: e as Elem };
        }
        if group.is_none() {
            group = Some(Strategy::Group { mul: oi, one: e as Elem });
        }
    }
    group.unwrap_or(Strategy::Plain)
}

#[inline]
fn mul(alg: &FiniteAlgebra, op: usize, a: usize, b: usize) -> usize {
    alg.ops[op].table[a * alg.size + b] as usize
}

fn group_identity(alg: &FiniteAlgebra, op: usize) -> Option<usize> {
    let n = alg.size;
    let e = (0..n).find(|&e| (0..n).all(|a| mul(alg, op, e, a) == a && mul(alg, op, a, e) == a))?;
    for a in 0..n {
        if !(0..n).any(|b| mul(alg, op, a, b) == e) {
            return None;
        }
        for b in 0..n {
            let ab = mul(alg, op, a, b);
            for c in 0..n {
                if mul(alg, op, ab, c) != mul(alg, op, a, mul(alg, op, b, c)) {
                    return None;
                }
            }
        }
    }
    Some(e)
}

/// f(x) = f(e..e) + Σ φ_i(x_i) with each φ_i an endomorphism of (A,+).
fn is_affine(alg: &FiniteAlgebra, plus: usize, e: usize, arity: usize, table: &[Elem]) -> bool {
    let n = alg.size;
    if arity == 0 {
        return true;
    }
    let neg: Vec<usize> = (0..n).map(|a| (0..n).find(|&b| mul(alg, plus, a, b) == e).unwrap()).collect();
    let index = |args: &[usize]| args.iter().fold(0usize, |acc, &a| acc * n + a);
    let mut args = vec![e; arity];
    let c = table[index(&args)] as usize;
    let mut phi = vec![vec![0usize; n]; arity];
    for i in 0..arity {
        for x in 0..n {
            args[i] = x;
            phi[i][x] = mul(alg, plus, table[index(&args)] as usize, neg[c]);
        }
        args[i] = e;
        for x in 0..n {
            for y in 0..n {
                if phi[i][mul(alg, plus, x, y)] != mul(alg, plus, phi[i][x], phi[i][y]) {
                    return false;
                }
            }
        }
    }
    let total = n.pow(arity as u32);
    let mut t = vec![0 as Elem; arity];
    for idx in 0..total {
        decode_into(idx, n, &mut t);
        let mut v = c;
        for i in 0..arity {
            v = mul(alg, plus, v, phi[i][t[i] as usize]);
        }
        if v != table[idx] as usize {
            return false;
        }
    }
    true
}

struct Engine<'a> {
    alg: &'a FiniteAlgebra,
    width: usize,
    rows: RowSet,
    origins: Option<Vec<Origin>>,
    cap: usize,
    target: Option<&'a [Elem]>,
    found: Option<usize>,
    /// Stop silently once this many rows exist (partial enumeration).
    limit: Option<usize>,
}

enum Flow {
    Continue,
    Stop,
}

impl<'a> Engine<'a> {
    fn insert(&mut self, row: Box<[Elem]>, origin: impl FnOnce() -> Origin) -> Result<(usize, bool, Flow)> {
        if let Some(i) = self.rows.get_index_of(&row) {
            return Ok((i, false, Flow::Continue));
        }
        if self.rows.len() >= self.cap {
            return Err(Error::Resource { what: "closure rows".into(), cap: self.cap });
        }
        let hit = self.target.is_some_and(|t| *t == *row);
        let (id, _) = self.rows.insert_full(row);
        if let Some(o) = self.origins.as_mut() {
            o.push(origin());
        }
        let mut flow = Flow::Continue;
        if hit {
            self.found = Some(id);
            flow = Flow::Stop;
        }
        if self.limit.is_some_and(|l| self.rows.len() >= l) {
            flow = Flow::Stop;
        }
        Ok((id, true, flow))
    }

    fn apply_rows(&self, op: usize, ids: &[u32]) -> Box<[Elem]> {
        let mut args = vec![0 as Elem; ids.len()];
        (0..self.width)
            .map(|c| {
                for (slot, &id) in args.iter_mut().zip(ids) {
                    *slot = self.rows[id as usize][c];
                }
                self.alg.apply(op, &args)
            })
            .collect()
    }

    fn seeds(&self, tuples: &[Vec<Elem>], k: usize) -> Vec<(Box<[Elem]>, Origin)> {
        let mut out = Vec::new();
        for a in 0..self.alg.size as Elem {
            out.push((vec![a; self.width].into_boxed_slice(), Origin::Const(a)));
        }
        for i in 0..k {
            let row: Box<[Elem]> = tuples.iter().map(|t| t[i]).collect();
            out.push((row, Origin::Coord(i)));
        }
        out
    }

    fn run(&mut self, tuples: &[Vec<Elem>], k: usize) -> Result<()> {
        let seeds = self.seeds(tuples, k);
        match detect(self.alg) {
            Strategy::Affine { plus, zero } => self.run_affine(seeds, plus, zero),
            Strategy::Group { mul, one } => self.run_group(seeds, mul, one),
            Strategy::Plain => self.run_plain(seeds),
        }
    }

    fn run_plain(&mut self, seeds: Vec<(Box<[Elem]>, Origin)>) -> Result<()> {
        for (row, o) in seeds {
            if let Flow::Stop = self.insert(row, || o)?.2 {
                return Ok(());
            }
        }
        let ops: Vec<usize> = (0..self.alg.ops.len()).filter(|&i| self.alg.ops[i].arity > 0).collect();
        self.semi_naive(&ops, 0, None).map(|_| ())
    }

    /// Processes elements `from..` against all earlier ones for the given
    /// operations. With `upto` set, only elements below that index are
    /// processed and new rows are handed back instead of being scheduled.
    fn semi_naive(&mut self, ops: &[usize], from: usize, upto: Option<usize>) -> Result<Flow> {
        let mut i = from;
        let mut ids: Vec<u32> = Vec::new();
        loop {
            let end = upto.unwrap_or(self.rows.len());
            if i >= end {
                return Ok(Flow::Continue);
            }
            for &op in ops {
                let r = self.alg.ops[op].arity;
                // all tuples over 0..=i containing i at least once
                let base = i + 1;
                let total = base.pow(r as u32);
                let lower = i.pow(r as u32);
                ids.resize(r, 0);
                for idx in 0..total {
                    let mut x = idx;
                    let mut has = false;
                    for slot in ids.iter_mut().rev() {
                        let d = x % base;
                        x /= base;
                        has |= d == i;
                        *slot = d as u32;
                    }
                    if !has {
                        continue;
                    }
                    let _ = lower;
                    let row = self.apply_rows(op, &ids);
                    let args = ids.clone();
                    if let Flow::Stop = self.insert(row, || Origin::Apply { op, args })?.2 {
                        return Ok(Flow::Stop);
                    }
                }
            }
            i += 1;
        }
    }

    fn run_affine(&mut self, seeds: Vec<(Box<[Elem]>, Origin)>, plus: usize, zero: Elem) -> Result<()> {
        let zero_row: Box<[Elem]> = vec![zero; self.width].into_boxed_slice();
        let (zero_id, _, flow) = self.insert(zero_row, || Origin::Const(zero))?;
        if let Flow::Stop = flow {
            return Ok(());
        }
        let mut pending: std::collections::VecDeque<(Box<[Elem]>, Origin)> = seeds.into();
        let ops: Vec<usize> = (0..self.alg.ops.len()).filter(|&i| i != plus && self.alg.ops[i].arity > 0).collect();
        while let Some((row, origin)) = pending.pop_front() {
            if self.rows.contains(&row) {
                continue;
            }
            let before = self.rows.len();
            let (x_id, _, flow) = self.insert(row, || origin)?;
            if let Flow::Stop = flow {
                return Ok(());
            }
            if let Flow::Stop = self.extend_abelian(plus, zero_id, before, x_id)? {
                return Ok(());
            }
            // Images of the new generator under the linear parts of each operation.
            for &op in &ops {
                let r = self.alg.ops[op].arity;
                for pos in 0..r {
                    let mut args = vec![zero_id as u32; r];
                    args[pos] = x_id as u32;
                    let img = self.apply_rows(op, &args);
                    if !self.rows.contains(&img) {
                        pending.push_back((img, Origin::Apply { op, args }));
                    }
                }
            }
        }
        Ok(())
    }

    /// H = rows[..h_len] is a subgroup; x was just inserted outside it.
    fn extend_abelian(&mut self, plus: usize, zero_id: usize, h_len: usize, x_id: usize) -> Result<Flow> {
        let mut y_id = x_id;
        loop {
            for h in 0..h_len {
                if h == zero_id {
                    continue;
                }
                let args = vec![h as u32, y_id as u32];
                let row = self.apply_rows(plus, &args);
                if let Flow::Stop = self.insert(row, || Origin::Apply { op: plus, args })?.2 {
                    return Ok(Flow::Stop);
                }
            }
            let args = vec![y_id as u32, x_id as u32];
            let next = self.apply_rows(plus, &args);
            if self.rows.contains(&next) {
                return Ok(Flow::Continue);
            }
            let (id, _, flow) = self.insert(next, || Origin::Apply { op: plus, args })?;
            if let Flow::Stop = flow {
                return Ok(Flow::Stop);
            }
            y_id = id;
        }
    }

    fn run_group(&mut self, seeds: Vec<(Box<[Elem]>, Origin)>, mul: usize, one: Elem) -> Result<()> {
        let one_row: Box<[Elem]> = vec![one; self.width].into_boxed_slice();
        let (one_id, _, flow) = self.insert(one_row, || Origin::Const(one))?;
        if let Flow::Stop = flow {
            return Ok(());
        }
        let others: Vec<usize> = (0..self.alg.ops.len()).filter(|&i| i != mul && self.alg.ops[i].arity > 0).collect();
        let mut gens: Vec<usize> = Vec::new();
        let mut pending: std::collections::VecDeque<(Box<[Elem]>, Origin)> = seeds.into();
        let mut processed = 0usize;
        loop {
            while let Some((row, origin)) = pending.pop_front() {
                if self.rows.contains(&row) {
                    continue;
                }
                if let Flow::Stop = self.dimino(mul, one_id, &mut gens, row, origin)? {
                    return Ok(());
                }
            }
            if others.is_empty() || processed == self.rows.len() {
                return Ok(());
            }
            // other operations, semi-naively over the rows added since last time
            let end = self.rows.len();
            let mut fresh = Vec::new();
            for i in processed..end {
                for &op in &others {
                    let r = self.alg.ops[op].arity;
                    let base = i + 1;
                    let total = base.pow(r as u32);
                    let mut ids = vec![0u32; r];
                    for idx in 0..total {
                        let mut x = idx;
                        let mut has = false;
                        for slot in ids.iter_mut().rev() {
                            let d = x % base;
                            x /= base;
                            has |= d == i;
                            *slot = d as u32;
                        }
                        if !has {
                            continue;
                        }
                        let row = self.apply_rows(op, &ids);
                        if !self.rows.contains(&row) {
                            fresh.push((row, Origin::Apply { op, args: ids.clone() }));
                        }
                    }
                }
            }
            processed = end;
            pending.extend(fresh);
        }
    }

    fn dimino(
        &mut self,
        mul: usize,
        one_id: usize,
        gens: &mut Vec<usize>,
        g: Box<[Elem]>,
        origin: Origin,
    ) -> Result<Flow> {
        let h_len = self.rows.len();
        let (g_id, _, flow) = self.insert(g, || origin)?;
        if let Flow::Stop = flow {
            return Ok(Flow::Stop);
        }
        gens.push(g_id);
        let mut reps = vec![one_id, g_id];
        if let Flow::Stop = self.add_coset(mul, one_id, h_len, g_id)? {
            return Ok(Flow::Stop);
        }
        let mut i = 1;
        while i < reps.len() {
            for gi in 0..gens.len() {
                let s = gens[gi];
                let args = vec![reps[i] as u32, s as u32];
                let r = self.apply_rows(mul, &args);
                if self.rows.contains(&r) {
                    continue;
                }
                let (r_id, _, flow) = self.insert(r, || Origin::Apply { op: mul, args })?;
                if let Flow::Stop = flow {
                    return Ok(Flow::Stop);
                }
                reps.push(r_id);
                if let Flow::Stop = self.add_coset(mul, one_id, h_len, r_id)? {
                    return Ok(Flow::Stop);
                }
            }
            i += 1;
        }
        Ok(Flow::Continue)
    }

    /// Adds the right coset H·r where H = rows[..h_len] and r is already stored.
    fn add_coset(&mut self, mul: usize, one_id: usize, h_len: usize, r_id: usize) -> Result<Flow> {
        for h in 0..h_len {
            if h == one_id {
                continue;
            }
            let args = vec![h as u32, r_id as u32];
            let row = self.apply_rows(mul, &args);
            if let Flow::Stop = self.insert(row, || Origin::Apply { op: mul, args })?.2 {
                return Ok(Flow::Stop);
            }
        }
        Ok(Flow::Continue)
    }

    fn term_for(&self, id: usize, arity: usize) -> Term {
        let origins = self.origins.as_ref().expect("provenance not recorded");
        let mut needed = vec![false; id + 1];
        needed[id] = true;
        for j in (0..=id).rev() {
            if !needed[j] {
                continue;
            }
            if let Origin::Apply { args, .. } = &origins[j] {
                for &a in args {
                    needed[a as usize] = true;
                }
            }
        }
        let mut remap = vec![u32::MAX; id + 1];
        let mut nodes = Vec::new();
        for j in 0..=id {
            if !needed[j] {
                continue;
            }
            remap[j] = nodes.len() as u32;
            nodes.push(match &origins[j] {
                Origin::Apply { op, args } => {
                    Origin::Apply { op: *op, args: args.iter().map(|&a| remap[a as usize]).collect() }
                }
                o => o.clone(),
            });
        }
        Term { arity, nodes }
    }
}

fn dedup_tuples(alg: &FiniteAlgebra, tuples: &[Vec<Elem>]) -> Result<(Vec<Vec<Elem>>, usize)> {
    let first = tuples.first().ok_or_else(|| Error::usage("empty domain"))?;
    let k = first.len();
    let mut seen = rustc_hash::FxHashSet::default();
    let mut out = Vec::new();
    for t in tuples {
        if t.len() != k {
            return Err(Error::usage("domain tuples of different arity"));
        }
        if t.iter().any(|&a| a as usize >= alg.size) {
            return Err(Error::usage("domain tuple outside universe"));
        }
        if seen.insert(t.clone()) {
            out.push(t.clone());
        }
    }
    Ok((out, k))
}

fn engine<'a>(alg: &'a FiniteAlgebra, width: usize, cfg: ClosureConfig, provenance: bool) -> Engine<'a> {
    Engine {
        alg,
        width,
        rows: RowSet::default(),
        origins: provenance.then(Vec::new),
        cap: cfg.cap,
        target: None,
        found: None,
        limit: None,
    }
}

fn sorted(rows: RowSet, width: usize) -> Closure {
    let mut rows: Vec<Box<[Elem]>> = rows.into_iter().collect();
    rows.sort_unstable();
    Closure { width, rows }
}

/// {p|_T : p ∈ Pol_k(A)} for the (deduplicated) tuple list T.
pub fn restricted_clone(alg: &FiniteAlgebra, tuples: &[Vec<Elem>], cfg: ClosureConfig) -> Result<Closure> {
    let (tuples, k) = dedup_tuples(alg, tuples)?;
    let mut e = engine(alg, tuples.len(), cfg, false);
    e.run(&tuples, k)?;
    Ok(sorted(e.rows, tuples.len()))
}

/// Generates rows until `limit` distinct rows exist (or the closure is
/// exhausted). The prefix is in generation order, which is deterministic.
pub fn restricted_clone_prefix(
    alg: &FiniteAlgebra,
    tuples: &[Vec<Elem>],
    limit: usize,
    cfg: ClosureConfig,
) -> Result<Vec<Box<[Elem]>>> {
    let (tuples, k) = dedup_tuples(alg, tuples)?;
    let mut e = engine(alg, tuples.len(), cfg, false);
    e.limit = Some(limit.max(1));
    e.run(&tuples, k)?;
    Ok(e.rows.into_iter().collect())
}

/// Searches the closure for `target`. On success returns a term whose
/// restriction to T is `target`.
pub fn find_row(
    alg: &FiniteAlgebra,
    tuples: &[Vec<Elem>],
    target: &[Elem],
    cfg: ClosureConfig,
) -> Result<Option<Term>> {
    let (tuples, k) = dedup_tuples(alg, tuples)?;
    if target.len() != tuples.len() {
        return Err(Error::usage("target row length differs from domain size"));
    }
    let mut e = engine(alg, tuples.len(), cfg, true);
    e.target = Some(target);
    e.run(&tuples, k)?;
    Ok(e.found.map(|id| e.term_for(id, k)))
}

/// Pol_1(A) as function tables in lexicographic order.
pub fn unary_polynomials(alg: &FiniteAlgebra, cfg: ClosureConfig) -> Result<Vec<FunctionTable>> {
    let tuples: Vec<Vec<Elem>> = (0..alg.size as Elem).map(|a| vec![a]).collect();
    let c = restricted_clone(alg, &tuples, cfg)?;
    Ok(c.into_rows().into_iter().map(|r| FunctionTable { arity: 1, table: r.into_vec() }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::OperationTable;

    fn z(n: usize) -> FiniteAlgebra {
        FiniteAlgebra::abelian_group(&[n])
    }

    /// Textbook fixpoint iteration over all tuples; the oracle for the engine.
    pub(crate) fn naive_closure(alg: &FiniteAlgebra, tuples: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
        let w = tuples.len();
        let k = tuples[0].len();
        let mut set: std::collections::BTreeSet<Vec<Elem>> = std::collections::BTreeSet::new();
        for a in 0..alg.size as Elem {
            set.insert(vec![a; w]);
        }
        for i in 0..k {
            set.insert(tuples.iter().map(|t| t[i]).collect());
        }
        loop {
            let cur: Vec<Vec<Elem>> = set.iter().cloned().collect();
            let before = set.len();
            for (oi, op) in alg.ops.iter().enumerate() {
                if op.arity == 0 {
                    continue;
                }
                let total = cur.len().pow(op.arity as u32);
                let mut idx = vec![0 as Elem; op.arity];
                for t in 0..total {
                    decode_into(t, cur.len(), &mut idx);
                    let row: Vec<Elem> = (0..w)
                        .map(|c| {
                            let args: Vec<Elem> = idx.iter().map(|&r| cur[r as usize][c]).collect();
                            alg.apply(oi, &args)
                        })
                        .collect();
                    set.insert(row);
                }
            }
            if set.len() == before {
                return set.into_iter().collect();
            }
        }
    }

    fn s3() -> FiniteAlgebra {
        crate::corpus::load("s3").unwrap()
    }

    #[test]
    fn unary_polynomials_of_small_groups() {
        let p = unary_polynomials(&z(2), ClosureConfig::default()).unwrap();
        assert_eq!(p.len(), 4);
        let p = unary_polynomials(&z(4), ClosureConfig::default()).unwrap();
        assert_eq!(p.len(), 16);
        for f in &p {
            // x ↦ kx + c
            let c = f.table[0];
            let k = (f.table[1] + 4 - c) % 4;
            for x in 0..4 {
                assert_eq!(f.table[x as usize], (k * x + c) % 4);
            }
        }
        assert_eq!(unary_polynomials(&FiniteAlgebra::trivial(), ClosureConfig::default()).unwrap().len(), 1);
    }

    #[test]
    fn z4_misses_the_intro_row() {
        let c = restricted_clone(&z(4), &[vec![0], vec![2]], ClosureConfig::default()).unwrap();
        assert!(!c.contains(&[0, 1]));
        assert!(c.contains(&[0, 2]));
        assert!(c.contains(&[3, 1]));
        for r in c.rows() {
            assert_eq!((r[1] + 4 - r[0]) % 2, 0);
        }
    }

    #[test]
    fn pol2_of_z2_has_eight_rows() {
        let t: Vec<Vec<Elem>> = crate::algebra::all_tuples(2, 2).collect();
        assert_eq!(restricted_clone(&z(2), &t, ClosureConfig::default()).unwrap().len(), 8);
    }

    #[test]
    fn single_tuple_gives_every_value() {
        let c = restricted_clone(&s3(), &[vec![1, 4]], ClosureConfig::default()).unwrap();
        assert_eq!(c.len(), 6);
    }

    #[test]
    fn strategies_agree_with_naive_oracle() {
        let lattice = crate::corpus::load("lattice2").unwrap();
        let algs = vec![z(4), s3(), lattice, FiniteAlgebra::abelian_group(&[2, 2])];
        let doms: Vec<Vec<Vec<Elem>>> =
            vec![vec![vec![0], vec![1]], vec![vec![0, 1], vec![1, 0], vec![1, 1]], vec![vec![1, 0], vec![0, 1]]];
        for alg in &algs {
            for d in &doms {
                let d: Vec<Vec<Elem>> = d.iter().map(|t| t.iter().map(|&x| x % alg.size as Elem).collect()).collect();
                let (d, _) = dedup_tuples(alg, &d).unwrap();
                let fast = restricted_clone(alg, &d, ClosureConfig::default()).unwrap();
                let slow = naive_closure(alg, &d);
                let fast: Vec<Vec<Elem>> = fast.into_rows().into_iter().map(|r| r.into_vec()).collect();
                assert_eq!(fast, slow, "{}", alg.name);
            }
        }
    }

    #[test]
    fn affine_path_handles_unary_operations() {
        // Z3 with x ↦ 2x: still affine, Pol_1 = all maps kx + c.
        let mut a = z(3);
        a.ops.push(OperationTable { name: "neg".into(), arity: 1, table: vec![0, 2, 1] });
        let t: Vec<Vec<Elem>> = vec![vec![0], vec![1], vec![2]];
        let fast = restricted_clone(&a, &t, ClosureConfig::default()).unwrap();
        assert_eq!(fast.len(), 9);
        let slow = naive_closure(&a, &t);
        assert_eq!(fast.into_rows().into_iter().map(|r| r.into_vec()).collect::<Vec<_>>(), slow);
    }

    #[test]
    fn cap_is_reported() {
        let t: Vec<Vec<Elem>> = crate::algebra::all_tuples(4, 2).collect();
        let err = restricted_clone(&z(4), &t, ClosureConfig { cap: 10 }).unwrap_err();
        assert_eq!(err, Error::Resource { what: "closure rows".into(), cap: 10 });
    }

    #[test]
    fn found_terms_replay() {
        let a = s3();
        let t: Vec<Vec<Elem>> = vec![vec![0, 1], vec![2, 3], vec![5, 5]];
        let c = restricted_clone(&a, &t, ClosureConfig::default()).unwrap();
        for (i, row) in c.rows().iter().enumerate().step_by(7) {
            let term = find_row(&a, &t, row, ClosureConfig::default()).unwrap().expect("row is in closure");
            for (j, tup) in t.iter().enumerate() {
                assert_eq!(term.eval(&a, tup), row[j], "row {i}");
            }
        }
        assert!(find_row(&z(4), &[vec![0], vec![2]], &[0, 1], ClosureConfig::default()).unwrap().is_none());
    }

    #[test]
    fn unary_polynomials_closed_under_composition() {
        for alg in [s3(), z(4), crate::corpus::load("m2z2-mod").unwrap()] {
            let p = unary_polynomials(&alg, ClosureConfig::default()).unwrap();
            let set: std::collections::HashSet<Vec<Elem>> = p.iter().map(|f| f.table.clone()).collect();
            for f in &p {
                for g in &p {
                    let comp: Vec<Elem> = (0..alg.size).map(|x| f.table[g.table[x] as usize]).collect();
                    assert!(set.contains(&comp));
                }
            }
        }
    }
}
