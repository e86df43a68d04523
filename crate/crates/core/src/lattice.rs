//! Finite lattices given by tables, and congruence lattices.

use crate::algebra::{Elem, FiniteAlgebra};
use crate::congruence::{join_congruences, principal_congruence, Congruence, UnionFind};
use crate::error::{Error, Result};
use rustc_hash::FxHashMap;
use serde::Serialize;

/// A finite lattice on 0..n with explicit tables.
#[derive(Debug, Clone)]
pub struct Lattice {
    n: usize,
    leq: Vec<bool>,
    join: Vec<u32>,
    meet: Vec<u32>,
    pub bottom: usize,
    pub top: usize,
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
}

impl Lattice {
    /// Builds the lattice from its order and operation tables.
    pub fn from_tables(n: usize, leq: Vec<bool>, join: Vec<u32>, meet: Vec<u32>) -> Lattice {
        assert!(n > 0);
        let bottom = (0..n).find(|&b| (0..n).all(|x| leq[b * n + x])).expect("lattice has a bottom");
        let top = (0..n).find(|&t| (0..n).all(|x| leq[x * n + t])).expect("lattice has a top");
        let mut upper = vec![Vec::new(); n];
        let mut lower = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if a == b || !leq[a * n + b] {
                    continue;
                }
                let between = (0..n).any(|c| c != a && c != b && leq[a * n + c] && leq[c * n + b]);
                if !between {
                    upper[a].push(b);
                    lower[b].push(a);
                }
            }
        }
        Lattice { n, leq, join, meet, bottom, top, upper, lower }
    }

    /// Lattice of a finite poset given by `leq`, computing joins and meets.
    pub fn from_order(n: usize, leq: Vec<bool>) -> Lattice {
        let mut join = vec![0u32; n * n];
        let mut meet = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let ubs: Vec<usize> = (0..n).filter(|&u| leq[a * n + u] && leq[b * n + u]).collect();
                let j = *ubs.iter().find(|&&u| ubs.iter().all(|&v| leq[u * n + v])).expect("joins exist");
                let lbs: Vec<usize> = (0..n).filter(|&l| leq[l * n + a] && leq[l * n + b]).collect();
                let m = *lbs.iter().find(|&&l| lbs.iter().all(|&v| leq[v * n + l])).expect("meets exist");
                join[a * n + b] = j as u32;
                meet[a * n + b] = m as u32;
            }
        }
        Lattice::from_tables(n, leq, join, meet)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n + b]
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b] as usize
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b] as usize
    }

    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.upper[a]
    }

    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.lower[a]
    }

    pub fn covers(&self, a: usize, b: usize) -> bool {
        self.upper[a].contains(&b)
    }

    /// All prime intervals (a, b) with a ≺ b, in index order.
    pub fn prime_intervals(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|a| self.upper[a].iter().map(move |&b| (a, b))).collect()
    }

    pub fn strictly_meet_irreducibles(&self) -> Vec<(usize, usize)> {
        (0..self.n).filter(|&a| self.upper[a].len() == 1).map(|a| (a, self.upper[a][0])).collect()
    }

    pub fn join_irreducibles(&self) -> Vec<(usize, usize)> {
        (0..self.n).filter(|&a| self.lower[a].len() == 1).map(|a| (a, self.lower[a][0])).collect()
    }

    /// Length of a longest chain from a to b (None unless a ≤ b).
    pub fn height_between(&self, a: usize, b: usize) -> Option<usize> {
        if !self.leq(a, b) {
            return None;
        }
        let mut order: Vec<usize> = (0..self.n).filter(|&x| self.leq(a, x) && self.leq(x, b)).collect();
        // a linear extension: fewer elements below first
        let below = |x: usize| (0..self.n).filter(|&y| self.leq(y, x)).count();
        order.sort_by_key(|&x| below(x));
        let mut best: FxHashMap<usize, usize> = FxHashMap::default();
        best.insert(a, 0);
        for &x in &order {
            let Some(&h) = best.get(&x) else { continue };
            for &y in &self.upper[x] {
                if self.leq(y, b) {
                    let e = best.entry(y).or_insert(0);
                    *e = (*e).max(h + 1);
                }
            }
        }
        best.get(&b).copied()
    }

    pub fn height(&self) -> usize {
        self.height_between(self.bottom, self.top).unwrap()
    }

    /// The sublattice I[a,b] with the map back into self.
    pub fn interval(&self, a: usize, b: usize) -> Result<(Lattice, Vec<usize>)> {
        if !self.leq(a, b) {
            return Err(Error::usage("interval bounds are not ordered"));
        }
        let members: Vec<usize> = (0..self.n).filter(|&x| self.leq(a, x) && self.leq(x, b)).collect();
        let pos: FxHashMap<usize, usize> = members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let m = members.len();
        let mut leq = vec![false; m * m];
        let mut join = vec![0u32; m * m];
        let mut meet = vec![0u32; m * m];
        for (i, &x) in members.iter().enumerate() {
            for (j, &y) in members.iter().enumerate() {
                leq[i * m + j] = self.leq(x, y);
                join[i * m + j] = pos[&self.join(x, y)] as u32;
                meet[i * m + j] = pos[&self.meet(x, y)] as u32;
            }
        }
        Ok((Lattice::from_tables(m, leq, join, meet), members))
    }

    pub fn is_modular(&self) -> bool {
        for a in 0..self.n {
            for c in 0..self.n {
                if !self.leq(a, c) {
                    continue;
                }
                for b in 0..self.n {
                    if self.join(a, self.meet(b, c)) != self.meet(self.join(a, b), c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_complemented(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).any(|b| self.join(a, b) == self.top && self.meet(a, b) == self.bottom))
    }

    /// Projectivity classes of prime intervals, generated by transposition:
    /// [a,b] ↗ [c,d] iff b ∨ c = d and b ∧ c = a.
    pub fn projectivity_classes(&self) -> Vec<Vec<(usize, usize)>> {
        let primes = self.prime_intervals();
        let idx: FxHashMap<(usize, usize), usize> = primes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut uf = UnionFind::new(primes.len());
        for (i, &(a, b)) in primes.iter().enumerate() {
            for c in 0..self.n {
                if self.meet(b, c) != a {
                    continue;
                }
                let d = self.join(b, c);
                if let Some(&j) = idx.get(&(c, d)) {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut slot: FxHashMap<usize, usize> = FxHashMap::default();
        for (i, &p) in primes.iter().enumerate() {
            let r = uf.find(i);
            let g = *slot.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(p);
        }
        groups
    }

    /// Class id for every prime interval.
    pub fn projectivity_map(&self) -> FxHashMap<(usize, usize), usize> {
        let mut m = FxHashMap::default();
        for (g, class) in self.projectivity_classes().into_iter().enumerate() {
            for p in class {
                m.insert(p, g);
            }
        }
        m
    }

    /// A finite modular lattice is simple iff it is nontrivial and all its
    /// prime intervals are projective.
    pub fn is_simple_complemented_modular(&self) -> bool {
        self.n >= 2 && self.is_modular() && self.is_complemented() && self.projectivity_classes().len() == 1
    }

    /// Definition of a homogeneous element, applied to this lattice.
    pub fn is_homogeneous(&self, mu: usize) -> bool {
        if mu == self.bottom {
            return false;
        }
        let classes = self.projectivity_map();
        let mut below = None;
        for (&(_, b), &g) in classes.iter() {
            if self.leq(b, mu) {
                match below {
                    None => below = Some(g),
                    Some(h) if h != g => return false,
                    _ => {}
                }
            }
        }
        let Some(g) = below else { return false };
        !classes.iter().any(|(&(c, _), &h)| h == g && self.leq(mu, c))
    }

    /// Φ(μ) = μ ∧ ⋀ lower covers of μ.
    pub fn phi(&self, mu: usize) -> usize {
        self.lower[mu].iter().fold(mu, |acc, &a| self.meet(acc, a))
    }

    /// μ* = ⋁ {a : a ∧ μ = 0}.
    pub fn star(&self, mu: usize) -> usize {
        (0..self.n).filter(|&a| self.meet(a, mu) == self.bottom).fold(self.bottom, |acc, a| self.join(acc, a))
    }
}

#[derive(Debug, Clone)]
pub struct CongruenceLattice {
    pub congruences: Vec<Congruence>,
    pub lattice: Lattice,
    pub modular: bool,
    index: FxHashMap<Congruence, usize>,
}

/// Bottom first; otherwise fewer blocks later, ties by block vector.
fn canonical_order(a: &Congruence, b: &Congruence) -> std::cmp::Ordering {
    b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.blocks().cmp(b.blocks()))
}

impl CongruenceLattice {
    pub fn compute(alg: &FiniteAlgebra) -> Result<CongruenceLattice> {
        let n = alg.size;
        let mut principals: Vec<Congruence> = Vec::new();
        let mut seen: FxHashMap<Congruence, ()> = FxHashMap::default();
        for a in 0..n as Elem {
            for b in a + 1..n as Elem {
                let c = principal_congruence(alg, a, b)?;
                if seen.insert(c.clone(), ()).is_none() {
                    principals.push(c);
                }
            }
        }
        let mut all: Vec<Congruence> = vec![Congruence::identity(n)];
        let mut index: FxHashMap<Congruence, usize> = FxHashMap::default();
        index.insert(all[0].clone(), 0);
        let mut i = 0;
        while i < all.len() {
            let cur = all[i].clone();
            for p in &principals {
                let j = join_congruences(alg, &cur, p);
                if !index.contains_key(&j) {
                    index.insert(j.clone(), all.len());
                    all.push(j);
                }
            }
            i += 1;
        }
        Ok(CongruenceLattice::from_congruences(alg, all))
    }

    fn from_congruences(alg: &FiniteAlgebra, mut all: Vec<Congruence>) -> CongruenceLattice {
        all.sort_by(canonical_order);
        let index: FxHashMap<Congruence, usize> = all.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let m = all.len();
        let mut leq = vec![false; m * m];
        let mut join = vec![0u32; m * m];
        let mut meet = vec![0u32; m * m];
        for a in 0..m {
            for b in a..m {
                let le = all[a].leq(&all[b]);
                leq[a * m + b] = le;
                leq[b * m + a] = all[b].leq(&all[a]);
                let j = if le {
                    b
                } else if leq[b * m + a] {
                    a
                } else {
                    index[&join_congruences(alg, &all[a], &all[b])]
                };
                let mt = index[&all[a].meet(&all[b])];
                join[a * m + b] = j as u32;
                join[b * m + a] = j as u32;
                meet[a * m + b] = mt as u32;
                meet[b * m + a] = mt as u32;
            }
        }
        let lattice = Lattice::from_tables(m, leq, join, meet);
        let modular = lattice.is_modular();
        CongruenceLattice { congruences: all, lattice, modular, index }
    }

    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    pub fn index_of(&self, c: &Congruence) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.congruences[i]
    }

    pub fn bottom(&self) -> usize {
        self.lattice.bottom
    }

    pub fn top(&self) -> usize {
        self.lattice.top
    }

    pub fn report(&self) -> LatticeReport {
        let l = &self.lattice;
        LatticeReport {
            congruences: self.congruences.iter().map(|c| c.classes()).collect(),
            covers: l.prime_intervals(),
            join_irreducibles: l.join_irreducibles(),
            strictly_meet_irreducibles: l.strictly_meet_irreducibles(),
            height: l.height(),
            modular: self.modular,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LatticeReport {
    pub congruences: Vec<Vec<Vec<Elem>>>,
    pub covers: Vec<(usize, usize)>,
    /// (α, α⁻)
    pub join_irreducibles: Vec<(usize, usize)>,
    /// (μ, μ⁺)
    pub strictly_meet_irreducibles: Vec<(usize, usize)>,
    pub height: usize,
    pub modular: bool,
}
