//! The M_n(D)-modules D^(n×m) for finite fields D, their richness
//! classification and the counterexamples for the non-rich combinations.
//!
//! Matrices are stored as entry vectors in row-major order. As algebra
//! elements they are encoded base q with the first entry most significant.

use crate::algebra::{Elem, FiniteAlgebra, OperationTable};
use crate::error::{Error, Result};
use crate::field::{prime_power, GaloisField};
use crate::partial::PartialFunction;
use serde::Serialize;

pub const DEFAULT_UNIVERSE_BOUND: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatrixModuleSpec {
    pub q: usize,
    pub n: usize,
    pub m: usize,
}

pub type Mat = Vec<u32>;

/// Arithmetic in D^(n×m) together with the left action of M_n(D).
#[derive(Debug, Clone)]
pub struct MatrixSpace {
    pub field: GaloisField,
    pub n: usize,
    pub m: usize,
}

impl MatrixSpace {
    pub fn new(q: usize, n: usize, m: usize) -> Result<MatrixSpace> {
        if n == 0 || m == 0 {
            return Err(Error::usage("n and m must be positive"));
        }
        Ok(MatrixSpace { field: GaloisField::new(q)?, n, m })
    }

    pub fn q(&self) -> usize {
        self.field.q
    }

    /// Universe size q^(nm), if it fits.
    pub fn universe(&self) -> Option<usize> {
        crate::algebra::checked_pow(self.q(), self.n * self.m)
    }

    pub fn zero(&self) -> Mat {
        vec![0; self.n * self.m]
    }

    /// E_{i,j} with 1-based indices.
    pub fn unit(&self, i: usize, j: usize) -> Mat {
        let mut x = self.zero();
        x[(i - 1) * self.m + (j - 1)] = 1;
        x
    }

    /// E_a^j: column j (1-based) equal to a, zero elsewhere.
    pub fn column(&self, a: &[u32], j: usize) -> Mat {
        let mut x = self.zero();
        for (i, &v) in a.iter().enumerate() {
            x[i * self.m + (j - 1)] = v;
        }
        x
    }

    pub fn ones(&self, b: u32) -> Vec<u32> {
        vec![b; self.n]
    }

    pub fn add(&self, x: &[u32], y: &[u32]) -> Mat {
        x.iter().zip(y).map(|(&a, &b)| self.field.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[u32], y: &[u32]) -> Mat {
        x.iter().zip(y).map(|(&a, &b)| self.field.sub(a, b)).collect()
    }

    pub fn scale(&self, c: u32, x: &[u32]) -> Mat {
        x.iter().map(|&a| self.field.mul(c, a)).collect()
    }

    /// R·x for an n×n matrix R given row-major.
    pub fn lmul(&self, r: &[u32], x: &[u32]) -> Mat {
        let (n, m) = (self.n, self.m);
        let mut out = self.zero();
        for i in 0..n {
            for j in 0..m {
                let mut s = 0;
                for l in 0..n {
                    s = self.field.add(s, self.field.mul(r[i * n + l], x[l * m + j]));
                }
                out[i * m + j] = s;
            }
        }
        out
    }

    pub fn row<'a>(&self, x: &'a [u32], i: usize) -> &'a [u32] {
        &x[i * self.m..(i + 1) * self.m]
    }

    pub fn encode(&self, x: &[u32]) -> Elem {
        let q = self.q() as u64;
        x.iter().fold(0u64, |acc, &v| acc * q + v as u64) as Elem
    }

    pub fn decode(&self, mut e: Elem) -> Mat {
        let q = self.q() as u32;
        let mut x = self.zero();
        for v in x.iter_mut().rev() {
            *v = e % q;
            e /= q;
        }
        x
    }
}

/// Binary + and −, the matrix units M_{i,j} acting from the left, and for
/// q not prime the scalar matrix of the field generator (operation "s").
pub fn build_module_algebra(spec: MatrixModuleSpec) -> Result<FiniteAlgebra> {
    build_module_algebra_bounded(spec, DEFAULT_UNIVERSE_BOUND)
}

pub fn build_module_algebra_bounded(spec: MatrixModuleSpec, bound: usize) -> Result<FiniteAlgebra> {
    let sp = MatrixSpace::new(spec.q, spec.n, spec.m)?;
    let size = match sp.universe() {
        Some(s) if s <= bound => s,
        _ => {
            return Err(Error::Resource { what: format!("module universe {}^{}", spec.q, spec.n * spec.m), cap: bound })
        }
    };
    let elems: Vec<Mat> = (0..size as Elem).map(|e| sp.decode(e)).collect();
    let binary = |name: &str, f: &dyn Fn(&[u32], &[u32]) -> Mat| {
        let mut table = Vec::with_capacity(size * size);
        for x in &elems {
            for y in &elems {
                table.push(sp.encode(&f(x, y)));
            }
        }
        OperationTable { name: name.to_string(), arity: 2, table }
    };
    let mut ops = vec![binary("+", &|x, y| sp.add(x, y)), binary("-", &|x, y| sp.sub(x, y))];
    let n = spec.n;
    let unary = |name: String, r: &[u32]| OperationTable {
        name,
        arity: 1,
        table: elems.iter().map(|x| sp.encode(&sp.lmul(r, x))).collect(),
    };
    for i in 0..n {
        for j in 0..n {
            let mut r = vec![0; n * n];
            r[i * n + j] = 1;
            ops.push(unary(format!("M{}{}", i + 1, j + 1), &r));
        }
    }
    if sp.field.degree > 1 {
        let g = sp.field.generator();
        let mut r = vec![0; n * n];
        for i in 0..n {
            r[i * n + i] = g;
        }
        ops.push(unary("s".to_string(), &r));
    }
    let name = format!("module-q{}-n{}-m{}", spec.q, spec.n, spec.m);
    FiniteAlgebra::new(name, size, ops)
}

/// Whether D^(n×m) is strictly k-polynomially rich.
pub fn decide_module_richness(q: usize, n: usize, m: usize, k: usize) -> Result<bool> {
    if prime_power(q).is_none() {
        return Err(Error::usage(format!("{q} is not a prime power")));
    }
    if n == 0 || m == 0 || k == 0 {
        return Err(Error::usage("n, m and k must be positive"));
    }
    Ok((matches!(q, 2 | 3 | 5) && n == 1 && k == 1)
        || (m == 1 && q == 2 && (n == 2 || n == 3) && k == 1)
        || (m == 1 && q == 3 && n == 2 && k == 1)
        || (m == 1 && q == 2 && n == 1 && (k == 2 || k == 3))
        || (m == 1 && q == 3 && n == 1 && k == 2))
}

/// Which construction refutes richness for a non-rich combination.
pub fn select_case(q: usize, n: usize, m: usize) -> u8 {
    match (q, n) {
        (5, 1) => 8,
        (3, 1) if m == 1 => 7,
        (2, 1) if m == 1 => 6,
        (2 | 3, 1) => 5,
        (2 | 3, 2) if m == 1 => 4,
        (2, 3) if m == 1 => 4,
        (2 | 3, 2) => 2,
        (2, 3) => 3,
        _ => 1,
    }
}

/// The arity the case's function is built at; larger k are reached by padding.
fn base_arity(case: u8, k: usize) -> usize {
    match case {
        1..=3 => 1,
        5 => 2,
        _ => k,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub spec: MatrixModuleSpec,
    pub k: usize,
    pub case_id: u8,
    /// The element b used by Case 1.
    pub b: Option<u32>,
    pub f: PartialFunction,
    pub flags: Vec<String>,
}

/// The scalar b used in Case 1.
pub fn case1_scalar(f: &GaloisField) -> u32 {
    match (f.q, f.degree) {
        (2, _) => 1,
        (3, _) => 2,
        (5, _) => 4,
        (_, 1) => (f.p - 2) as u32,
        // least element outside the prime subfield
        _ => f.p as u32,
    }
}

pub fn counterexample_function(q: usize, n: usize, m: usize, k: usize) -> Result<Counterexample> {
    if decide_module_richness(q, n, m, k)? {
        return Err(Error::usage(format!("D^({n}x{m}) over GF({q}) is strictly {k}-polynomially rich")));
    }
    let sp = MatrixSpace::new(q, n, m)?;
    if sp.universe().is_none_or(|u| u > u32::MAX as usize) {
        return Err(Error::Resource { what: "module universe".into(), cap: u32::MAX as usize });
    }
    let case = select_case(q, n, m);
    let arity = base_arity(case, k);
    let enc = |x: &Mat| sp.encode(x);
    let zero = sp.zero();
    let mut b = None;
    // (tuple of matrices, value)
    let points: Vec<(Vec<Mat>, Mat)> = match case {
        1 => {
            let s = case1_scalar(&sp.field);
            b = Some(s);
            let special = sp.column(&sp.ones(s), 1);
            let mut pts = vec![(vec![zero.clone()], zero.clone())];
            pts.extend((1..=n).map(|i| (vec![sp.unit(i, 1)], zero.clone())));
            pts.push((vec![special.clone()], special));
            pts
        }
        2 | 3 => {
            let j = sp.add(&sp.column(&sp.ones(1), 1), &sp.column(&sp.ones(1), 2));
            let units: &[(usize, usize)] = if case == 2 { &[(1, 1), (2, 2)] } else { &[(1, 1), (2, 1), (3, 2)] };
            let mut pts = vec![(vec![zero.clone()], zero.clone())];
            pts.extend(units.iter().map(|&(r, c)| (vec![sp.unit(r, c)], zero.clone())));
            pts.push((vec![j.clone()], j));
            pts
        }
        4 => {
            let mut pts = vec![(vec![zero.clone(); k], zero.clone())];
            for pos in 0..k {
                for i in 1..=n {
                    let mut t = vec![zero.clone(); k];
                    t[pos] = sp.unit(i, 1);
                    pts.push((t, zero.clone()));
                }
            }
            let one = sp.column(&sp.ones(1), 1);
            pts.push((vec![one.clone(); k], one));
            pts
        }
        5 => {
            let (t0, t1, t2) = (zero.clone(), sp.unit(1, 1), sp.unit(1, 2));
            vec![
                (vec![t0.clone(), t0.clone()], t0.clone()),
                (vec![t1.clone(), t0.clone()], t0.clone()),
                (vec![t2.clone(), t1], t2),
            ]
        }
        _ => {
            let c = match case {
                6 => 1,
                7 => 2,
                _ => 4,
            };
            let e = sp.unit(1, 1);
            let mut pts = vec![(vec![zero.clone(); k], zero.clone())];
            for pos in 0..k {
                let mut t = vec![zero.clone(); k];
                t[pos] = e.clone();
                pts.push((t, zero.clone()));
            }
            let ce = sp.scale(c, &e);
            pts.push((vec![ce.clone(); k], ce));
            pts
        }
    };
    let mut flags = Vec::new();
    if arity < k {
        flags.push(format!("padded from arity {arity} to {k} with constant zero coordinates"));
    }
    let mut domain: Vec<Vec<Elem>> = Vec::with_capacity(points.len());
    let mut values = Vec::with_capacity(points.len());
    for (t, v) in &points {
        let mut row: Vec<Elem> = t.iter().map(enc).collect();
        row.resize(k, enc(&zero));
        domain.push(row);
        values.push(enc(v));
    }
    let f = PartialFunction::new(k, domain, values)?;
    Ok(Counterexample { spec: MatrixModuleSpec { q, n, m }, k, case_id: case, b, f, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutator::Analysis;
    use crate::corpus::load;
    use crate::ClosureConfig;

    #[test]
    fn builder_reproduces_corpus_modules() {
        for (name, q, n) in [("m2z2-mod", 2, 2), ("m3z2-mod", 2, 3), ("m2z3-mod", 3, 2)] {
            let built = build_module_algebra(MatrixModuleSpec { q, n, m: 1 }).unwrap();
            let corpus = load(name).unwrap();
            assert_eq!(built.size, corpus.size);
            assert_eq!(built.ops.len(), corpus.ops.len(), "{name}");
            for (a, b) in built.ops.iter().zip(&corpus.ops) {
                assert_eq!((&a.name, a.arity, &a.table), (&b.name, b.arity, &b.table), "{name}");
            }
        }
    }

    #[test]
    fn small_modules() {
        let z2 = build_module_algebra(MatrixModuleSpec { q: 2, n: 1, m: 1 }).unwrap();
        assert_eq!(z2.size, 2);
        assert_eq!(z2.ops.len(), 3);
        assert_eq!(z2.ops[2].table, vec![0, 1]);

        let an = Analysis::new(
            build_module_algebra(MatrixModuleSpec { q: 2, n: 2, m: 1 }).unwrap(),
            ClosureConfig::default(),
        )
        .unwrap();
        assert_eq!(an.con.congruences.len(), 2);

        // GF(3)^2: zero, four lines, everything
        let an = Analysis::new(
            build_module_algebra(MatrixModuleSpec { q: 3, n: 1, m: 2 }).unwrap(),
            ClosureConfig::default(),
        )
        .unwrap();
        assert_eq!(an.con.congruences.len(), 6);

        let gf4 = build_module_algebra(MatrixModuleSpec { q: 4, n: 1, m: 1 }).unwrap();
        assert_eq!(gf4.ops.last().unwrap().name, "s");
        let an = Analysis::new(gf4, ClosureConfig::default()).unwrap();
        assert_eq!(an.con.congruences.len(), 2);
    }

    #[test]
    fn universe_bound() {
        let e = build_module_algebra(MatrixModuleSpec { q: 2, n: 3, m: 5 }).unwrap_err();
        assert!(matches!(e, Error::Resource { .. }));
    }

    #[test]
    fn encoding_round_trip() {
        let sp = MatrixSpace::new(3, 2, 2).unwrap();
        for e in 0..81 {
            assert_eq!(sp.encode(&sp.decode(e)), e);
        }
        assert_eq!(sp.encode(&sp.unit(1, 1)), 27);
        assert_eq!(sp.encode(&sp.unit(2, 2)), 1);
    }

    #[test]
    fn richness_table() {
        assert!(decide_module_richness(2, 1, 1, 3).unwrap());
        assert!(!decide_module_richness(2, 1, 1, 4).unwrap());
        assert!(decide_module_richness(5, 1, 3, 1).unwrap());
        assert!(!decide_module_richness(7, 1, 1, 1).unwrap());
        assert!(!decide_module_richness(3, 1, 1, 3).unwrap());
        assert!(decide_module_richness(3, 1, 1, 2).unwrap());
        assert!(!decide_module_richness(3, 1, 2, 2).unwrap());
        assert!(decide_module_richness(3, 2, 1, 1).unwrap());
        assert!(!decide_module_richness(4, 1, 1, 1).unwrap());
        assert!(decide_module_richness(6, 1, 1, 1).is_err());
    }

    #[test]
    fn case_selection_matches_tables() {
        let cases = [
            ((5, 1, 1), 8),
            ((5, 2, 1), 1),
            ((3, 1, 1), 7),
            ((3, 1, 2), 5),
            ((3, 2, 1), 4),
            ((3, 2, 2), 2),
            ((3, 3, 1), 1),
            ((2, 1, 1), 6),
            ((2, 1, 3), 5),
            ((2, 2, 1), 4),
            ((2, 3, 1), 4),
            ((2, 2, 2), 2),
            ((2, 3, 2), 3),
            ((2, 4, 1), 1),
            ((7, 1, 1), 1),
            ((4, 1, 1), 1),
        ];
        for ((q, n, m), c) in cases {
            assert_eq!(select_case(q, n, m), c, "{q} {n} {m}");
        }
    }

    #[test]
    fn constructed_functions() {
        let c = counterexample_function(3, 1, 1, 3).unwrap();
        assert_eq!(c.case_id, 7);
        // value 2·e on the dissent point (2,2,2)
        assert_eq!(c.f.value_at(&[2, 2, 2]), Some(2));
        assert_eq!(c.f.len(), 5);

        let c = counterexample_function(5, 1, 1, 2).unwrap();
        assert_eq!(c.case_id, 8);
        assert_eq!(c.f.value_at(&[4, 4]), Some(4));

        let c = counterexample_function(4, 1, 1, 1).unwrap();
        assert_eq!((c.case_id, c.b), (1, Some(2)));
        let c = counterexample_function(7, 1, 1, 1).unwrap();
        assert_eq!(c.b, Some(5));

        let c = counterexample_function(2, 2, 2, 3).unwrap();
        assert_eq!(c.case_id, 2);
        assert_eq!(c.flags.len(), 1);
        assert!(counterexample_function(2, 1, 1, 2).is_err());
    }
}
