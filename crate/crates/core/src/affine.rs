//! Interpolation in abelian Mal'cev algebras without enumerating the clone.
//!
//! An abelian algebra with a Mal'cev polynomial d is affine: with
//! x + y = d(x, 0, y) every k-ary polynomial is λ_1(x_1) + .. + λ_k(x_k) + c,
//! the λ_i lying in the ring generated by the linear parts
//! y ↦ f(0,..,y,..,0) − f(0,..,0) of the basic operations. The restrictions to
//! T ⊆ A^k therefore form the least subgroup of A^T that contains the
//! projections and the constants and is closed under those linear parts.
//! Subgroups are kept in echelon form: level i holds, for every value the
//! subgroup takes at coordinate i among its members vanishing before i, one
//! such member.

use crate::algebra::Elem;
use crate::commutator::Analysis;
use crate::error::{Error, Result};
use crate::partial::PartialFunction;

/// (A, +) with zero 0 and the linear parts of the basic operations.
#[derive(Debug, Clone)]
pub struct AffineStructure {
    pub size: usize,
    add: Vec<Elem>,
    neg: Vec<Elem>,
    /// Unary tables of the linear parts, deduplicated.
    pub linear: Vec<Vec<Elem>>,
}

impl AffineStructure {
    pub fn new(an: &Analysis) -> Result<AffineStructure> {
        let w = an.require_malcev()?;
        if !an.is_abelian() {
            return Err(Error::Precondition(format!("{} is not abelian", an.alg.name)));
        }
        let n = an.size();
        let mut add = vec![0; n * n];
        for x in 0..n as Elem {
            for y in 0..n as Elem {
                add[x as usize * n + y as usize] = w.d(n, x, 0, y);
            }
        }
        let neg: Vec<Elem> = (0..n as Elem).map(|x| w.d(n, 0, x, 0)).collect();
        let mut linear: Vec<Vec<Elem>> = Vec::new();
        for (oi, op) in an.alg.ops.iter().enumerate() {
            let zeros = vec![0; op.arity];
            let base = an.alg.apply(oi, &zeros);
            for j in 0..op.arity {
                let mut args = zeros.clone();
                let table: Vec<Elem> = (0..n as Elem)
                    .map(|y| {
                        args[j] = y;
                        add[an.alg.apply(oi, &args) as usize * n + neg[base as usize] as usize]
                    })
                    .collect();
                if !linear.contains(&table) {
                    linear.push(table);
                }
            }
        }
        Ok(AffineStructure { size: n, add, neg, linear })
    }

    fn plus(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.add[a as usize * self.size + b as usize]).collect()
    }

    fn minus(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.add[a as usize * self.size + self.neg[b as usize] as usize]).collect()
    }

    /// Whether f is the restriction of a polynomial.
    pub fn interpolable(&self, f: &PartialFunction) -> bool {
        let mut sub = Echelon::new(self, f.len());
        for c in 0..self.size as Elem {
            sub.insert(vec![c; f.len()]);
        }
        for i in 0..f.arity {
            sub.insert(f.domain.iter().map(|t| t[i]).collect());
        }
        sub.contains(&f.values)
    }
}

/// A subgroup of A^width closed under the linear parts.
struct Echelon<'a> {
    aff: &'a AffineStructure,
    width: usize,
    reps: Vec<Vec<Option<Vec<Elem>>>>,
    gens: Vec<Vec<Vec<Elem>>>,
}

impl<'a> Echelon<'a> {
    fn new(aff: &'a AffineStructure, width: usize) -> Echelon<'a> {
        let mut reps = vec![vec![None; aff.size]; width];
        for level in &mut reps {
            level[0] = Some(vec![0; width]);
        }
        Echelon { aff, width, reps, gens: vec![Vec::new(); width] }
    }

    /// Reduces x by the representatives; returns the first level where that
    /// fails, with the remainder.
    fn sift(&self, mut x: Vec<Elem>) -> Option<(usize, Vec<Elem>)> {
        for i in 0..self.width {
            if x[i] == 0 {
                continue;
            }
            match &self.reps[i][x[i] as usize] {
                Some(r) => x = self.aff.minus(&x, r),
                None => return Some((i, x)),
            }
        }
        None
    }

    fn contains(&self, x: &[Elem]) -> bool {
        self.sift(x.to_vec()).is_none()
    }

    fn insert(&mut self, x: Vec<Elem>) {
        let mut work = vec![x];
        while let Some(x) = work.pop() {
            if let Some((i, g)) = self.sift(x) {
                self.extend(i, g, &mut work);
            }
        }
    }

    /// Adds a generator at level i and restores the echelon: every sum
    /// rep(u) + g of a representative and a generator either names a new
    /// value or leaves a difference for the deeper levels.
    fn extend(&mut self, i: usize, g: Vec<Elem>, work: &mut Vec<Vec<Elem>>) {
        for l in &self.aff.linear {
            work.push(g.iter().map(|&v| l[v as usize]).collect());
        }
        self.gens[i].push(g.clone());
        let mut fresh: Vec<Elem> = Vec::new();
        let known: Vec<Elem> = (0..self.aff.size as Elem).filter(|&v| self.reps[i][v as usize].is_some()).collect();
        for u in known {
            let s = self.aff.plus(self.reps[i][u as usize].as_ref().expect("known"), &g);
            self.place(i, s, &mut fresh, work);
        }
        while let Some(u) = fresh.pop() {
            for gi in 0..self.gens[i].len() {
                let s = self.aff.plus(self.reps[i][u as usize].as_ref().expect("placed"), &self.gens[i][gi]);
                self.place(i, s, &mut fresh, work);
            }
        }
    }

    fn place(&mut self, i: usize, s: Vec<Elem>, fresh: &mut Vec<Elem>, work: &mut Vec<Vec<Elem>>) {
        let v = s[i] as usize;
        match &self.reps[i][v] {
            Some(r) => {
                let d = self.aff.minus(&s, r);
                if d.iter().any(|&e| e != 0) {
                    work.push(d);
                }
            }
            None => {
                self.reps[i][v] = Some(s);
                fresh.push(v as Elem);
            }
        }
    }
}
