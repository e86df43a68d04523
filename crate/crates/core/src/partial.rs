//! Partial functions, relation preservation, type preservation and
//! interpolation.

use crate::algebra::{Elem, FiniteAlgebra};
use crate::closure::{find_row, ClosureConfig};
use crate::commutator::Analysis;
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::tct::Rho;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialFunction {
    pub arity: usize,
    pub domain: Vec<Vec<Elem>>,
    pub values: Vec<Elem>,
}

impl PartialFunction {
    pub fn new(arity: usize, domain: Vec<Vec<Elem>>, values: Vec<Elem>) -> Result<PartialFunction> {
        if domain.len() != values.len() {
            return Err(Error::usage("domain and values differ in length"));
        }
        if domain.is_empty() {
            return Err(Error::usage("empty domain"));
        }
        let mut seen = std::collections::HashSet::new();
        for t in &domain {
            if t.len() != arity {
                return Err(Error::usage(format!("tuple {t:?} does not have arity {arity}")));
            }
            if !seen.insert(t) {
                return Err(Error::usage(format!("tuple {t:?} occurs twice")));
            }
        }
        Ok(PartialFunction { arity, domain, values })
    }

    pub fn check_range(&self, size: usize) -> Result<()> {
        let bad = self.values.iter().chain(self.domain.iter().flatten()).any(|&x| x as usize >= size);
        if bad {
            return Err(Error::usage(format!("function mentions an element outside universe of size {size}")));
        }
        Ok(())
    }

    pub fn value_at(&self, t: &[Elem]) -> Option<Elem> {
        self.domain.iter().position(|d| d == t).map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }
}

/// A relation queried by membership and by prefix extension.
pub trait RelationLike: Sync {
    fn arity(&self) -> usize;
    fn contains(&self, t: &[Elem]) -> bool;
    /// Whether prefix ++ [next] is a prefix of some member.
    fn allows(&self, prefix: &[Elem], next: Elem) -> bool;
}

/// An explicit, sorted set of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub arity: usize,
    tuples: Vec<Vec<Elem>>,
}

impl Relation {
    pub fn new(arity: usize, mut tuples: Vec<Vec<Elem>>) -> Result<Relation> {
        if tuples.iter().any(|t| t.len() != arity) {
            return Err(Error::usage("relation tuples of mixed arity"));
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Relation { arity, tuples })
    }

    pub fn tuples(&self) -> &[Vec<Elem>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn from_congruence(c: &Congruence) -> Relation {
        Relation { arity: 2, tuples: c.pairs().map(|(a, b)| vec![a, b]).collect() }
    }

    pub fn permuted(&self, perm: &[usize]) -> Relation {
        let t = self.tuples.iter().map(|t| perm.iter().map(|&p| t[p]).collect()).collect();
        Relation::new(self.arity, t).expect("same arity")
    }
}

impl RelationLike for Relation {
    fn arity(&self) -> usize {
        self.arity
    }
    fn contains(&self, t: &[Elem]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }
    fn allows(&self, prefix: &[Elem], next: Elem) -> bool {
        let l = prefix.len();
        let i = self.tuples.partition_point(|t| (&t[..l], t[l]) < (prefix, next));
        i < self.tuples.len() && self.tuples[i][..l] == *prefix && self.tuples[i][l] == next
    }
}

impl RelationLike for Congruence {
    fn arity(&self) -> usize {
        2
    }
    fn contains(&self, t: &[Elem]) -> bool {
        self.related(t[0], t[1])
    }
    fn allows(&self, prefix: &[Elem], next: Elem) -> bool {
        prefix.is_empty() || self.related(prefix[0], next)
    }
}

/// Column trie over the domain of a partial function.
struct Trie {
    nodes: Vec<TrieNode>,
}

#[derive(Default)]
struct TrieNode {
    kids: Vec<(Elem, usize)>,
    col: usize,
}

impl Trie {
    fn new(domain: &[Vec<Elem>]) -> Trie {
        let mut nodes = vec![TrieNode::default()];
        for (c, t) in domain.iter().enumerate() {
            let mut cur = 0;
            for &v in t {
                cur = match nodes[cur].kids.iter().find(|k| k.0 == v) {
                    Some(&(_, nx)) => nx,
                    None => {
                        nodes.push(TrieNode::default());
                        let nx = nodes.len() - 1;
                        nodes[cur].kids.push((v, nx));
                        nx
                    }
                };
            }
            nodes[cur].col = c;
        }
        for n in &mut nodes {
            n.kids.sort_unstable();
        }
        Trie { nodes }
    }
}

struct Search<'a> {
    trie: &'a Trie,
    rel: &'a dyn RelationLike,
    f: &'a PartialFunction,
    rows: Vec<Vec<Elem>>,
    image: Vec<Elem>,
    must: Option<usize>,
    included: usize,
    violation: Option<Vec<usize>>,
    cols: Vec<usize>,
}

impl Search<'_> {
    fn place(&mut self, i: usize) -> bool {
        let n = self.rel.arity();
        if i == n {
            if self.must.is_some() && self.included == 0 {
                return true;
            }
            if !self.rel.contains(&self.image) {
                self.violation = Some(self.cols.clone());
                return false;
            }
            return true;
        }
        if let Some(m) = self.must {
            if self.included == 0 && i == n - 1 {
                return self.force(m, i);
            }
        }
        self.walk(0, 0, i)
    }

    fn force(&mut self, col: usize, i: usize) -> bool {
        let f = self.f;
        let t = &f.domain[col];
        if t.iter().enumerate().any(|(j, &v)| !self.rel.allows(&self.rows[j], v)) {
            return true;
        }
        for (j, &v) in t.iter().enumerate() {
            self.rows[j].push(v);
        }
        let ok = self.enter(col, i);
        for row in self.rows.iter_mut() {
            row.pop();
        }
        ok
    }

    /// Rows already carry the column; record its image and recurse.
    fn enter(&mut self, col: usize, i: usize) -> bool {
        let hit = self.must == Some(col);
        if hit {
            self.included += 1;
        }
        self.image.push(self.f.values[col]);
        self.cols.push(col);
        let ok = self.place(i + 1);
        self.cols.pop();
        self.image.pop();
        if hit {
            self.included -= 1;
        }
        ok
    }

    fn walk(&mut self, node: usize, j: usize, i: usize) -> bool {
        let trie = self.trie;
        if j == self.f.arity {
            return self.enter(trie.nodes[node].col, i);
        }
        for &(v, child) in &trie.nodes[node].kids {
            if self.rel.allows(&self.rows[j], v) {
                self.rows[j].push(v);
                let ok = self.walk(child, j + 1, i);
                self.rows[j].pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

/// Exhaustive check that f preserves B. With `must`, only selections using
/// that domain point at least once are examined. Returns the violating
/// selection of domain indices, if any.
pub fn find_violation(f: &PartialFunction, rel: &dyn RelationLike, must: Option<usize>) -> Option<Vec<usize>> {
    let n = rel.arity();
    if n == 0 {
        return None;
    }
    let trie = Trie::new(&f.domain);
    let mut s = Search {
        trie: &trie,
        rel,
        f,
        rows: vec![Vec::with_capacity(n); f.arity],
        image: Vec::with_capacity(n),
        must,
        included: 0,
        violation: None,
        cols: Vec::new(),
    };
    if f.arity == 0 {
        // one column: the empty tuple
        let v = f.values[0];
        return (!rel.contains(&vec![v; n])).then(|| vec![0; n]);
    }
    s.place(0);
    s.violation
}

pub fn preserves(f: &PartialFunction, rel: &dyn RelationLike) -> bool {
    find_violation(f, rel, None).is_none()
}

/// The relations type preservation refers to, cached per algebra.
pub struct TypeContext<'a> {
    pub an: &'a Analysis,
    pub rhos: Vec<Rho>,
}

impl<'a> TypeContext<'a> {
    pub fn new(an: &'a Analysis) -> Result<TypeContext<'a>> {
        let rhos = an.type2_covers()?.into_iter().map(|(a, b)| Rho::new(an, a, b)).collect::<Result<Vec<_>>>()?;
        Ok(TypeContext { an, rhos })
    }

    pub fn is_congruence_preserving(&self, f: &PartialFunction) -> bool {
        self.an.con.congruences.iter().all(|c| preserves(f, c))
    }

    pub fn is_type_preserving(&self, f: &PartialFunction) -> bool {
        self.violation(f, None).is_none()
    }

    /// First violated relation (as a description) with selections restricted
    /// to those using `must`.
    pub fn violation(&self, f: &PartialFunction, must: Option<usize>) -> Option<String> {
        for (i, c) in self.an.con.congruences.iter().enumerate() {
            if find_violation(f, c, must).is_some() {
                return Some(format!("congruence #{i}"));
            }
        }
        for r in &self.rhos {
            if find_violation(f, r, must).is_some() {
                return Some(format!("rho(#{}, #{})", r.lower, r.upper));
            }
        }
        None
    }
}

pub fn is_congruence_preserving(an: &Analysis, f: &PartialFunction) -> bool {
    an.con.congruences.iter().all(|c| preserves(f, c))
}

pub fn is_type_preserving(an: &Analysis, f: &PartialFunction) -> Result<bool> {
    Ok(TypeContext::new(an)?.is_type_preserving(f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interpolation {
    pub interpolable: bool,
    pub witness: Option<Vec<Elem>>,
}

/// f is interpolable iff its value row lies in the closure over its domain.
pub fn interpolate(alg: &FiniteAlgebra, f: &PartialFunction, cfg: ClosureConfig) -> Result<Interpolation> {
    f.check_range(alg.size)?;
    let found = find_row(alg, &f.domain, &f.values, cfg)?;
    Ok(match found {
        Some(term) => {
            let row: Vec<Elem> = f.domain.iter().map(|t| term.eval(alg, t)).collect();
            debug_assert_eq!(row, f.values);
            Interpolation { interpolable: true, witness: Some(row) }
        }
        None => Interpolation { interpolable: false, witness: None },
    })
}

/// Same verdict as `interpolate`. Abelian algebras are decided by linear
/// algebra, which stays cheap where the clone itself is far too large.
pub fn interpolate_in(an: &Analysis, f: &PartialFunction) -> Result<Interpolation> {
    if an.malcev.is_some() && an.is_abelian() {
        f.check_range(an.size())?;
        let ok = crate::affine::AffineStructure::new(an)?.interpolable(f);
        return Ok(Interpolation { interpolable: ok, witness: ok.then(|| f.values.clone()) });
    }
    interpolate(&an.alg, f, an.cfg)
}

/// u_k on U_k: constant tuples and tuples with exactly one dissenting entry.
pub fn near_unanimity(size: usize, k: usize) -> Result<PartialFunction> {
    if k < 3 {
        return Err(Error::usage("near-unanimity functions need k >= 3"));
    }
    let mut domain = Vec::new();
    let mut values = Vec::new();
    for t in crate::algebra::all_tuples(size, k) {
        let maj = if t.iter().filter(|&&x| x == t[0]).count() >= k - 1 { t[0] } else { t[1] };
        if t.iter().filter(|&&x| x == maj).count() >= k - 1 {
            values.push(maj);
            domain.push(t);
        }
    }
    PartialFunction::new(k, domain, values)
}

pub fn check_nu_preservation(size: usize, k: usize, relations: &[&dyn RelationLike]) -> Result<bool> {
    if let Some(r) = relations.iter().find(|r| r.arity() >= k) {
        return Err(Error::usage(format!("relation of arity {} is not below k = {k}", r.arity())));
    }
    let u = near_unanimity(size, k)?;
    Ok(relations.iter().all(|r| preserves(&u, *r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load;

    fn unary(pairs: &[(Elem, Elem)]) -> PartialFunction {
        PartialFunction::new(1, pairs.iter().map(|p| vec![p.0]).collect(), pairs.iter().map(|p| p.1).collect()).unwrap()
    }

    /// Literal definition: all k-selections of tuples from B.
    fn preserves_naive(f: &PartialFunction, b: &Relation) -> bool {
        let k = f.arity;
        let bt = b.tuples();
        let total = bt.len().pow(k as u32);
        let mut idx = vec![0 as Elem; k];
        for s in 0..total {
            crate::algebra::decode_into(s, bt.len(), &mut idx);
            let mut img = Vec::new();
            let mut ok = true;
            for pos in 0..b.arity {
                let col: Vec<Elem> = idx.iter().map(|&r| bt[r as usize][pos]).collect();
                match f.value_at(&col) {
                    Some(v) => img.push(v),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && !b.contains(&img) {
                return false;
            }
        }
        true
    }

    #[test]
    fn z4_unary_intro_relation() {
        let f = unary(&[(0, 0), (2, 1)]);
        let b = Relation::new(2, (0..4).map(|x| vec![(x + 2) % 4, x]).collect()).unwrap();
        assert!(!preserves(&f, &b));
        assert!(!preserves_naive(&f, &b));
    }

    #[test]
    fn z4_binary_intro_relation() {
        let f =
            PartialFunction::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]], vec![0, 0, 0, 1]).unwrap();
        let mut t = Vec::new();
        for x in crate::algebra::all_tuples(4, 4) {
            if (x[0] + 4 - x[1]) % 4 == (x[2] + 4 - x[3]) % 4 {
                t.push(x);
            }
        }
        let b = Relation::new(4, t).unwrap();
        assert!(!b.contains(&[0, 0, 0, 1]));
        assert!(!preserves(&f, &b));
    }

    #[test]
    fn trie_search_matches_naive_on_random_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(2..4usize);
            let k = rng.gen_range(1..3usize);
            let r = rng.gen_range(1..4usize);
            let mut tuples = Vec::new();
            for t in crate::algebra::all_tuples(n, r) {
                if rng.gen_bool(0.5) {
                    tuples.push(t);
                }
            }
            let b = Relation::new(r, tuples).unwrap();
            let mut dom = Vec::new();
            let mut vals = Vec::new();
            for t in crate::algebra::all_tuples(n, k) {
                if rng.gen_bool(0.6) {
                    dom.push(t);
                    vals.push(rng.gen_range(0..n as Elem));
                }
            }
            if dom.is_empty() {
                continue;
            }
            let f = PartialFunction::new(k, dom, vals).unwrap();
            assert_eq!(preserves(&f, &b), preserves_naive(&f, &b));
            // restricted search agrees with "some violation uses this point"
            for m in 0..f.len() {
                let restricted = find_violation(&f, &b, Some(m));
                if let Some(sel) = &restricted {
                    assert!(sel.contains(&m));
                }
                if restricted.is_none() {
                    if let Some(sel) = find_violation(&f, &b, None) {
                        assert!(!sel.contains(&m) || find_violation(&f, &b, Some(m)).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn congruence_preservation_examples() {
        let an = Analysis::new(load("z4").unwrap(), ClosureConfig::default()).unwrap();
        assert!(!is_congruence_preserving(&an, &unary(&[(0, 0), (2, 1)])));
        assert!(is_congruence_preserving(&an, &unary(&[(0, 3), (1, 3), (2, 3)])));
        assert!(!is_type_preserving(&an, &unary(&[(0, 0), (2, 1)])).unwrap());
    }

    #[test]
    fn interpolation_examples() {
        let z4 = load("z4").unwrap();
        let cfg = ClosureConfig::default();
        assert!(!interpolate(&z4, &unary(&[(0, 0), (2, 1)]), cfg).unwrap().interpolable);
        let f =
            PartialFunction::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]], vec![0, 0, 0, 1]).unwrap();
        assert!(!interpolate(&z4, &f, cfg).unwrap().interpolable);
        let g = unary(&[(0, 1), (1, 3), (3, 3)]);
        // 2x + 1 hits (0,1),(1,3),(3,3)
        let r = interpolate(&z4, &g, cfg).unwrap();
        assert!(r.interpolable);
        assert_eq!(r.witness.unwrap(), vec![1, 3, 3]);
    }

    #[test]
    fn near_unanimity_shape() {
        let u = near_unanimity(2, 3).unwrap();
        assert_eq!(u.len(), 8);
        assert_eq!(u.value_at(&[0, 0, 1]), Some(0));
        let u5 = near_unanimity(3, 5).unwrap();
        assert_eq!(u5.len(), 3 + 5 * 3 * 2);
        for x in 0..3 {
            assert_eq!(u5.value_at(&[x; 5]), Some(x));
        }
        assert!(near_unanimity(3, 2).is_err());
    }

    #[test]
    fn nu_preserves_small_relations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t: Vec<Vec<Elem>> = crate::algebra::all_tuples(3, 2).filter(|_| rng.gen_bool(0.4)).collect();
            let b = Relation::new(2, t).unwrap();
            let u: Vec<Vec<Elem>> = (0..3).filter(|_| rng.gen_bool(0.5)).map(|x| vec![x]).collect();
            let c = Relation::new(1, u).unwrap();
            assert!(check_nu_preservation(3, 3, &[&b, &c]).unwrap());
        }
        let big = Relation::new(3, vec![vec![0, 0, 0]]).unwrap();
        assert!(check_nu_preservation(3, 3, &[&big]).is_err());
    }
}
