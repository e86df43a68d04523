//! Term-condition commutator via Δ-generation on β ⊆ A², centralizers and
//! the shared analysis context.

use crate::algebra::{Elem, FiniteAlgebra};
use crate::closure::ClosureConfig;
use crate::congruence::{find_malcev_polynomial, generate_congruence, Congruence, MalcevWitness, OpStructure};
use crate::error::{Error, Result};
use crate::lattice::CongruenceLattice;
use std::sync::{Arc, OnceLock};

/// β viewed as a subalgebra of A², elements numbered in lexicographic order.
struct PairAlgebra<'a> {
    alg: &'a FiniteAlgebra,
    pairs: Vec<(Elem, Elem)>,
    index: Vec<u32>,
}

impl<'a> PairAlgebra<'a> {
    fn new(alg: &'a FiniteAlgebra, beta: &Congruence) -> Self {
        let n = alg.size;
        let pairs: Vec<(Elem, Elem)> = beta.pairs().collect();
        let mut index = vec![u32::MAX; n * n];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            index[a as usize * n + b as usize] = i as u32;
        }
        PairAlgebra { alg, pairs, index }
    }

    fn id(&self, a: Elem, b: Elem) -> Elem {
        self.index[a as usize * self.alg.size + b as usize]
    }
}

impl OpStructure for PairAlgebra<'_> {
    fn size(&self) -> usize {
        self.pairs.len()
    }
    fn arities(&self) -> Vec<usize> {
        self.alg.arities()
    }
    fn apply_op(&self, op: usize, args: &[Elem]) -> Elem {
        let mut left = [0 as Elem; 8];
        let mut right = [0 as Elem; 8];
        let (l, r) = if args.len() <= 8 {
            (&mut left[..args.len()], &mut right[..args.len()])
        } else {
            return self.apply_slow(op, args);
        };
        for (i, &x) in args.iter().enumerate() {
            let (a, b) = self.pairs[x as usize];
            l[i] = a;
            r[i] = b;
        }
        self.id(self.alg.apply(op, l), self.alg.apply(op, r))
    }
}

impl PairAlgebra<'_> {
    fn apply_slow(&self, op: usize, args: &[Elem]) -> Elem {
        let l: Vec<Elem> = args.iter().map(|&x| self.pairs[x as usize].0).collect();
        let r: Vec<Elem> = args.iter().map(|&x| self.pairs[x as usize].1).collect();
        self.id(self.alg.apply(op, &l), self.alg.apply(op, &r))
    }
}

/// [α,β] without input checks.
pub(crate) fn commutator_raw(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Congruence {
    let b = PairAlgebra::new(alg, beta);
    let gens: Vec<(Elem, Elem)> =
        alpha.pairs().filter(|&(x, y)| x < y).map(|(x, y)| (b.id(x, x), b.id(y, y))).collect();
    let delta = generate_congruence(&b, &gens);
    let related: Vec<(Elem, Elem)> =
        b.pairs.iter().filter(|&&(x, y)| x != y && delta.related(b.id(x, x), b.id(x, y))).copied().collect();
    generate_congruence(alg, &related)
}

pub fn commutator(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Result<Congruence> {
    for c in [alpha, beta] {
        if !c.is_compatible(alg) {
            return Err(Error::InvalidCongruence("commutator arguments must be congruences".into()));
        }
    }
    Ok(commutator_raw(alg, alpha, beta))
}

/// An algebra with its congruence lattice, Mal'cev witness and a lazily
/// filled commutator table. Shareable across threads.
pub struct Analysis {
    pub alg: FiniteAlgebra,
    pub con: CongruenceLattice,
    pub malcev: Option<Arc<MalcevWitness>>,
    pub cfg: ClosureConfig,
    comm: Vec<OnceLock<u32>>,
}

impl Analysis {
    pub fn new(alg: FiniteAlgebra, cfg: ClosureConfig) -> Result<Analysis> {
        let con = CongruenceLattice::compute(&alg)?;
        let malcev = find_malcev_polynomial(&alg, cfg)?.map(Arc::new);
        let m = con.len();
        Ok(Analysis { alg, con, malcev, cfg, comm: (0..m * m).map(|_| OnceLock::new()).collect() })
    }

    /// Reuses a known Mal'cev polynomial (e.g. one induced on a quotient).
    pub fn with_malcev(alg: FiniteAlgebra, cfg: ClosureConfig, malcev: Option<Arc<MalcevWitness>>) -> Result<Analysis> {
        let con = CongruenceLattice::compute(&alg)?;
        let m = con.len();
        Ok(Analysis { alg, con, malcev, cfg, comm: (0..m * m).map(|_| OnceLock::new()).collect() })
    }

    pub fn size(&self) -> usize {
        self.alg.size
    }

    pub fn require_malcev(&self) -> Result<&MalcevWitness> {
        self.malcev.as_deref().ok_or_else(|| Error::Unsupported(format!("{} has no Mal'cev polynomial", self.alg.name)))
    }

    pub fn congruence(&self, i: usize) -> &Congruence {
        self.con.get(i)
    }

    pub fn index_of(&self, c: &Congruence) -> Result<usize> {
        self.con.index_of(c).ok_or_else(|| Error::InvalidCongruence("not a congruence of this algebra".into()))
    }

    /// Index of [α,β].
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let m = self.con.len();
        *self.comm[a * m + b].get_or_init(|| {
            let c = commutator_raw(&self.alg, self.con.get(a), self.con.get(b));
            self.con.index_of(&c).expect("commutator is a congruence") as u32
        }) as usize
    }

    /// (α:β) as the join of all γ with [γ,β] ≤ α.
    pub fn centralizer(&self, a: usize, b: usize) -> usize {
        let l = &self.con.lattice;
        (0..self.con.len()).filter(|&g| l.leq(self.commutator(g, b), a)).fold(l.bottom, |acc, g| l.join(acc, g))
    }

    pub fn is_abelian(&self) -> bool {
        let t = self.con.top();
        self.commutator(t, t) == self.con.bottom()
    }

    /// 2 iff [β,β] ≤ α.
    pub fn tct_type(&self, a: usize, b: usize) -> Result<u8> {
        self.require_malcev()?;
        if !self.con.lattice.covers(a, b) {
            return Err(Error::usage("type is only defined for covering pairs"));
        }
        Ok(self.type_unchecked(a, b))
    }

    pub(crate) fn type_unchecked(&self, a: usize, b: usize) -> u8 {
        // [β,β] ≤ [1,1]; an abelian algebra needs no further commutators
        if self.is_abelian() || self.con.lattice.leq(self.commutator(b, b), a) {
            2
        } else {
            3
        }
    }

    pub fn type2_covers(&self) -> Result<Vec<(usize, usize)>> {
        self.require_malcev()?;
        Ok(self.con.lattice.prime_intervals().into_iter().filter(|&(a, b)| self.type_unchecked(a, b) == 2).collect())
    }

    pub fn is_congruence_neutral(&self) -> Result<bool> {
        Ok(self.type2_covers()?.is_empty())
    }

    pub fn is_congruence_regular(&self) -> bool {
        let cs = &self.con.congruences;
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                for a in 0..self.size() as Elem {
                    if cs[i].class_of(a) == cs[j].class_of(a) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load;

    fn analysis(name: &str) -> Analysis {
        Analysis::new(load(name).unwrap(), ClosureConfig::default()).unwrap()
    }

    #[test]
    fn examples() {
        let z4 = analysis("z4");
        assert_eq!(z4.commutator(2, 2), 0);
        assert_eq!(z4.commutator(0, 2), 0);
        let s3 = analysis("s3");
        assert_eq!(s3.commutator(2, 2), 1);
        assert_eq!(s3.commutator(1, 1), 0);
        assert_eq!(s3.commutator(2, 1), 1);
        assert_eq!(s3.centralizer(0, 1), 1);
        assert_eq!(s3.centralizer(1, 2), 2);
        assert_eq!(s3.tct_type(0, 1).unwrap(), 2);
        assert_eq!(s3.tct_type(1, 2).unwrap(), 2);
        assert!(s3.tct_type(0, 2).is_err());
        assert_eq!(analysis("m2z2-mod").centralizer(0, 1), 1);
    }

    /// The term condition itself on the binary and ternary polynomials:
    /// C(β,α;δ) holds iff for every p and rows: p(a,b)δp(a,b') ⇒ p(a',b)δp(a',b').
    /// On groups [α,β] is the commutator subgroup of the normal subgroups,
    /// which we check instead for S3 and the abelian groups.
    #[test]
    fn group_commutator_oracle() {
        for name in ["s3", "z4", "z2sq"] {
            let an = analysis(name);
            let alg = &an.alg;
            let n = alg.size;
            let m = |a: usize, b: usize| alg.ops[0].table[a * n + b] as usize;
            let e = (0..n).find(|&e| (0..n).all(|a| m(e, a) == a)).unwrap();
            let inv = |a: usize| (0..n).find(|&b| m(a, b) == e).unwrap();
            for i in 0..an.con.len() {
                for j in 0..an.con.len() {
                    let ni: Vec<usize> = (0..n).filter(|&x| an.congruence(i).related(x as Elem, e as Elem)).collect();
                    let nj: Vec<usize> = (0..n).filter(|&x| an.congruence(j).related(x as Elem, e as Elem)).collect();
                    // subgroup generated by [x,y] = x y x^-1 y^-1
                    let mut h = std::collections::BTreeSet::from([e]);
                    for &x in &ni {
                        for &y in &nj {
                            h.insert(m(m(x, y), m(inv(x), inv(y))));
                        }
                    }
                    loop {
                        let cur: Vec<usize> = h.iter().copied().collect();
                        let before = h.len();
                        for &a in &cur {
                            for &b in &cur {
                                h.insert(m(a, b));
                            }
                        }
                        if h.len() == before {
                            break;
                        }
                    }
                    let c = an.congruence(an.commutator(i, j));
                    for a in 0..n {
                        for b in 0..n {
                            assert_eq!(c.related(a as Elem, b as Elem), h.contains(&m(a, inv(b))), "{name}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn regularity_and_neutrality() {
        assert!(analysis("z4").is_congruence_regular());
        assert!(!analysis("z4").is_congruence_neutral().unwrap());
        assert!(analysis("lattice2").is_congruence_neutral().is_err());
    }
}
