//! ρ(α,β), local coordinatization (subtype, dimension, height), (ABp) and
//! the labelled congruence lattice.

use crate::algebra::{all_tuples, Elem, FiniteAlgebra, FunctionTable};
use crate::closure::{restricted_clone, restricted_clone_prefix, Origin, Term};
use crate::commutator::Analysis;
use crate::congruence::{is_malcev_table, Congruence, MalcevWitness};
use crate::error::{Error, Result};
use crate::partial::{Relation, RelationLike};
use serde::Serialize;
use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

/// ρ(α,β) with membership decided from the Mal'cev table.
#[derive(Debug, Clone)]
pub struct Rho {
    pub lower: usize,
    pub upper: usize,
    alpha: Congruence,
    beta: Congruence,
    d: Arc<FunctionTable>,
    n: usize,
}

impl Rho {
    pub fn new(an: &Analysis, a: usize, b: usize) -> Result<Rho> {
        if an.tct_type(a, b)? != 2 {
            return Err(Error::usage("ρ(α,β) is only defined for type 2 quotients"));
        }
        Ok(Rho::with_table(an, a, b, an.require_malcev()?.table.clone()))
    }

    fn with_table(an: &Analysis, a: usize, b: usize, d: Arc<FunctionTable>) -> Rho {
        Rho { lower: a, upper: b, alpha: an.congruence(a).clone(), beta: an.congruence(b).clone(), d, n: an.size() }
    }

    fn d(&self, x: Elem, y: Elem, z: Elem) -> Elem {
        self.d.table[(x as usize * self.n + y as usize) * self.n + z as usize]
    }

    pub fn materialize(&self) -> Relation {
        let mut out = Vec::new();
        for x in 0..self.n as Elem {
            for y in self.beta.class_of(x) {
                for z in self.beta.class_of(y) {
                    for w in self.alpha.class_of(self.d(x, y, z)) {
                        out.push(vec![x, y, z, w]);
                    }
                }
            }
        }
        Relation::new(4, out).expect("4-tuples")
    }
}

impl RelationLike for Rho {
    fn arity(&self) -> usize {
        4
    }
    fn contains(&self, t: &[Elem]) -> bool {
        self.beta.related(t[0], t[1])
            && self.beta.related(t[1], t[2])
            && self.alpha.related(self.d(t[0], t[1], t[2]), t[3])
    }
    fn allows(&self, p: &[Elem], v: Elem) -> bool {
        match p.len() {
            0 => true,
            1 => self.beta.related(p[0], v),
            2 => self.beta.related(p[1], v),
            _ => self.alpha.related(self.d(p[0], p[1], p[2]), v),
        }
    }
}

pub fn rho_relation(an: &Analysis, a: usize, b: usize) -> Result<Relation> {
    Ok(Rho::new(an, a, b)?.materialize())
}

/// Compares ρ(α,β) across the Mal'cev polynomials met among the first
/// `limit` ternary polynomials.
pub fn rho_independence_check(an: &Analysis, a: usize, b: usize, limit: usize) -> Result<bool> {
    let reference = rho_relation(an, a, b)?;
    let n = an.size();
    if n.pow(3) > 4096 {
        return Err(Error::Unsupported("ternary polynomial sampling needs |A| ≤ 16".into()));
    }
    let all: Vec<Vec<Elem>> = all_tuples(n, 3).collect();
    for row in restricted_clone_prefix(&an.alg, &all, limit, an.cfg)? {
        let t = FunctionTable { arity: 3, table: row.to_vec() };
        if is_malcev_table(n, &t) && Rho::with_table(an, a, b, Arc::new(t)).materialize() != reference {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Transports a Mal'cev witness along a surjection onto a quotient.
pub fn induced_witness(w: &MalcevWitness, map: &[Elem], target: &FiniteAlgebra) -> MalcevWitness {
    let nodes = w
        .term
        .nodes
        .iter()
        .map(|o| match o {
            Origin::Const(c) => Origin::Const(map[*c as usize]),
            other => other.clone(),
        })
        .collect();
    let term = Term { arity: 3, nodes };
    let n = target.size;
    let (pattern, row) = crate::congruence::malcev_pattern(n);
    let table = term.table(target);
    debug_assert!(is_malcev_table(n, &table));
    MalcevWitness { pattern, row, table: Arc::new(table), term }
}

/// A/θ together with the class map and the analysis of the quotient.
pub fn quotient_analysis(an: &Analysis, theta: usize) -> Result<(Analysis, Vec<Elem>)> {
    let (q, map) = an.alg.quotient(an.congruence(theta))?;
    let w = an.malcev.as_ref().map(|w| Arc::new(induced_witness(w, &map, &q)));
    Ok((Analysis::with_malcev(q, an.cfg, w)?, map))
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalModule {
    pub o: Elem,
    pub mu: usize,
    pub atom: usize,
    /// o/μ in increasing order; the tables below are indexed by position in it.
    pub class: Vec<Elem>,
    pub add: Vec<Vec<usize>>,
    pub neg: Vec<usize>,
    pub ring: Vec<Vec<usize>>,
    pub q: usize,
    pub n: usize,
    pub h: usize,
}

pub fn local_module(an: &Analysis, o: Elem, mu: usize) -> Result<LocalModule> {
    let w = an.require_malcev()?;
    let size = an.size();
    if o as usize >= size {
        return Err(Error::usage(format!("base point {o} out of range")));
    }
    let l = &an.con.lattice;
    let muc = an.congruence(mu);
    let class = muc.class_of(o);
    if class.len() < 2 {
        return Err(Error::Precondition(format!("the class o/μ of {o} is trivial")));
    }
    if an.commutator(mu, mu) != l.bottom {
        return Err(Error::Precondition("μ is not abelian".into()));
    }
    let (sub, _) = l.interval(l.bottom, mu)?;
    if !sub.is_simple_complemented_modular() {
        return Err(Error::Precondition("I[0,μ] is not a simple complemented modular lattice".into()));
    }
    let pos = |x: Elem| class.binary_search(&x).expect("stays in o/μ");
    let c = class.len();
    let oi = pos(o);
    let add: Vec<Vec<usize>> =
        class.iter().map(|&x| class.iter().map(|&y| pos(w.d(size, x, o, y))).collect()).collect();
    let neg: Vec<usize> = class.iter().map(|&x| pos(w.d(size, o, x, o))).collect();
    for x in 0..c {
        if add[x][oi] != x || add[x][neg[x]] != oi {
            return Err(Error::Precondition("+_o has no neutral element or inverses on o/μ".into()));
        }
        for y in 0..c {
            if add[x][y] != add[y][x] || (0..c).any(|z| add[add[x][y]][z] != add[x][add[y][z]]) {
                return Err(Error::Precondition("+_o is not an abelian group operation on o/μ".into()));
            }
        }
    }
    let t: Vec<Vec<Elem>> = class.iter().map(|&x| vec![x]).collect();
    let ring: Vec<Vec<usize>> = restricted_clone(&an.alg, &t, an.cfg)?
        .rows()
        .iter()
        .filter(|r| r[oi] == o)
        .map(|r| r.iter().map(|&v| pos(v)).collect())
        .collect();

    let atom = (0..l.len())
        .filter(|&a| l.covers(l.bottom, a) && l.leq(a, mu))
        .min_by(|&a, &b| an.congruence(a).blocks().cmp(an.congruence(b).blocks()))
        .expect("μ > 0 has an atom below it");
    let sub_class: Vec<usize> = an.congruence(atom).class_of(o).into_iter().map(pos).collect();
    let q = endomorphism_count(&sub_class, &add, &ring, oi);
    let n = log_exact(sub_class.len(), q)
        .ok_or_else(|| Error::Precondition(format!("|o/α| = {} is not a power of |D| = {q}", sub_class.len())))?;
    let h = l.height_between(l.bottom, mu).expect("0 ≤ μ");
    Ok(LocalModule { o, mu, atom, class, add, neg, ring, q, n, h })
}

fn log_exact(mut x: usize, q: usize) -> Option<usize> {
    if q < 2 {
        return None;
    }
    let mut k = 0;
    while x > 1 {
        if !x.is_multiple_of(q) {
            return None;
        }
        x /= q;
        k += 1;
    }
    Some(k)
}

/// Number of additive maps on the set `s` (closed under `add` and `ring`)
/// that commute with every member of `ring`. Maps are fixed by the images of
/// a generating set of s as a module; the candidate graph is closed under
/// both structures and kept only if it is a function.
fn endomorphism_count(s: &[usize], add: &[Vec<usize>], ring: &[Vec<usize>], zero: usize) -> usize {
    let gens = module_generators(s, add, ring, zero);
    let mut count = 0;
    let mut img = vec![0usize; gens.len()];
    let total = s.len().pow(gens.len() as u32);
    for idx in 0..total {
        let mut k = idx;
        for slot in img.iter_mut().rev() {
            *slot = s[k % s.len()];
            k /= s.len();
        }
        if extends(&gens, &img, add, ring, zero) {
            count += 1;
        }
    }
    count
}

fn module_generators(s: &[usize], add: &[Vec<usize>], ring: &[Vec<usize>], zero: usize) -> Vec<usize> {
    let mut span = BTreeSet::from([zero]);
    let mut gens = Vec::new();
    for &x in s {
        if span.contains(&x) {
            continue;
        }
        gens.push(x);
        let mut queue: VecDeque<usize> = span.iter().copied().chain([x]).collect();
        span.insert(x);
        while let Some(y) = queue.pop_front() {
            let mut fresh = Vec::new();
            for r in ring {
                fresh.push(r[y]);
            }
            for &z in span.iter() {
                fresh.push(add[y][z]);
            }
            for f in fresh {
                if span.insert(f) {
                    queue.push_back(f);
                }
            }
        }
    }
    gens
}

fn extends(gens: &[usize], img: &[usize], add: &[Vec<usize>], ring: &[Vec<usize>], zero: usize) -> bool {
    let mut phi = vec![usize::MAX; add.len()];
    let mut known = Vec::new();
    let mut queue = VecDeque::new();
    let set = |x: usize, y: usize, phi: &mut Vec<usize>, known: &mut Vec<usize>, queue: &mut VecDeque<usize>| {
        if phi[x] == usize::MAX {
            phi[x] = y;
            known.push(x);
            queue.push_back(x);
            true
        } else {
            phi[x] == y
        }
    };
    if !set(zero, zero, &mut phi, &mut known, &mut queue) {
        return false;
    }
    for (&g, &v) in gens.iter().zip(img) {
        if !set(g, v, &mut phi, &mut known, &mut queue) {
            return false;
        }
    }
    while let Some(x) = queue.pop_front() {
        for r in ring {
            if !set(r[x], r[phi[x]], &mut phi, &mut known, &mut queue) {
                return false;
            }
        }
        let mut i = 0;
        while i < known.len() {
            let y = known[i];
            if !set(add[x][y], add[phi[x]][phi[y]], &mut phi, &mut known, &mut queue) {
                return false;
            }
            i += 1;
        }
    }
    true
}

/// (ABp) for (A, γ).
pub fn check_abp(an: &Analysis, gamma: usize, p: usize) -> Result<bool> {
    if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
        return Err(Error::usage(format!("{p} is not prime")));
    }
    let l = &an.con.lattice;
    for (a, b) in l.prime_intervals() {
        if !l.leq(b, gamma) || !l.leq(an.commutator(b, b), a) {
            continue;
        }
        if !class_counts(an.congruence(a), an.congruence(b)).iter().all(|&c| c == 1 || c == p) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The set of |(x/α)/(β/α)| over all x, for α ≤ β.
pub fn class_counts(alpha: &Congruence, beta: &Congruence) -> BTreeSet<usize> {
    beta.classes().iter().map(|cl| cl.iter().map(|&x| alpha.block_of(x)).collect::<BTreeSet<_>>().len()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subtype {
    pub q: usize,
    pub n: usize,
    pub h: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverLabel {
    pub lower: usize,
    pub upper: usize,
    #[serde(rename = "type")]
    pub tct_type: u8,
    pub subtype: Option<Subtype>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LabelledLattice {
    pub lattice: crate::lattice::LatticeReport,
    pub covers: Vec<CoverLabel>,
}

/// Subtype data of ⟨α,β⟩ computed in A/α at the least base point whose
/// β-class splits.
pub fn quotient_subtype(an: &Analysis, a: usize, b: usize) -> Result<Subtype> {
    let (qa, map) = quotient_analysis(an, a)?;
    let beta = an.congruence(b);
    let img: Vec<Elem> = beta.blocks().iter().enumerate().fold(vec![0; qa.size()], |mut acc, (x, &blk)| {
        acc[map[x] as usize] = blk;
        acc
    });
    let mu = qa.index_of(&Congruence::from_labels(&img))?;
    let o = (0..qa.size() as Elem)
        .find(|&x| qa.congruence(mu).class_of(x).len() > 1)
        .ok_or_else(|| Error::Precondition("β/α is trivial".into()))?;
    let lm = local_module(&qa, o, mu)?;
    Ok(Subtype { q: lm.q, n: lm.n, h: lm.h })
}

pub fn labelled_lattice(an: &Analysis) -> Result<LabelledLattice> {
    an.require_malcev()?;
    let mut covers = Vec::new();
    for (a, b) in an.con.lattice.prime_intervals() {
        let t = an.type_unchecked(a, b);
        let subtype = if t == 2 { Some(quotient_subtype(an, a, b)?) } else { None };
        covers.push(CoverLabel { lower: a, upper: b, tct_type: t, subtype });
    }
    Ok(LabelledLattice { lattice: an.con.report(), covers })
}
