//! Finite fields GF(p^a) as explicit tables.
//!
//! An element c_0 + c_1 x + ... + c_{a-1} x^{a-1} is encoded as
//! c_0 + c_1 p + ... ; the prime subfield is {0, .., p-1}.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisField {
    pub q: usize,
    pub p: usize,
    pub degree: usize,
    /// Coefficients c_0..c_{a-1} of the monic modulus x^a + ..., when a > 1.
    pub modulus: Option<Vec<usize>>,
    #[serde(skip)]
    add: Vec<u32>,
    #[serde(skip)]
    mul: Vec<u32>,
    #[serde(skip)]
    inv: Vec<u32>,
}

/// (p, a) with q = p^a, if q is a prime power.
pub fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut x, mut a) = (q, 0);
    while x % p == 0 {
        x /= p;
        a += 1;
    }
    (x == 1).then_some((p, a))
}

pub fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn digits(x: usize, p: usize, a: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(a);
    let mut x = x;
    for _ in 0..a {
        v.push(x % p);
        x /= p;
    }
    v
}

fn undigits(v: &[usize], p: usize) -> usize {
    v.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of polynomials given by coefficient vectors, reduced modulo the
/// monic polynomial with lower coefficients `m`.
fn poly_mulmod(x: &[usize], y: &[usize], m: &[usize], p: usize) -> Vec<usize> {
    let a = m.len();
    let mut prod = vec![0usize; 2 * a];
    for (i, &u) in x.iter().enumerate() {
        for (j, &v) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + u * v) % p;
        }
    }
    for d in (a..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        // x^d = x^{d-a} * x^a and x^a = -(m_0 + ... + m_{a-1} x^{a-1})
        prod[d] = 0;
        for (i, &mi) in m.iter().enumerate() {
            prod[d - a + i] = (prod[d - a + i] + (p - mi) * c) % p;
        }
    }
    prod.truncate(a);
    prod
}

/// Monic polynomial of degree a is irreducible iff it has no monic factor of
/// degree 1..=a/2; checked by trial division.
fn irreducible(m: &[usize], p: usize) -> bool {
    let a = m.len();
    let mut full = m.to_vec();
    full.push(1);
    for d in 1..=a / 2 {
        for low in 0..p.pow(d as u32) {
            let mut g = digits(low, p, d);
            g.push(1);
            if poly_rem(&full, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(f: &[usize], g: &[usize], p: usize) -> Vec<usize> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (i, &gi) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - gi) * lead) % p;
            }
        }
        r.pop();
    }
    r
}

impl GaloisField {
    pub fn new(q: usize) -> Result<GaloisField> {
        let (p, a) = prime_power(q).ok_or_else(|| Error::usage(format!("{q} is not a prime power")))?;
        let modulus = if a == 1 {
            None
        } else {
            // least monic irreducible in the encoding order
            let low = (0..p.pow(a as u32)).map(|c| digits(c, p, a)).find(|m| irreducible(m, p)).expect("exists");
            Some(low)
        };
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for x in 0..q {
            let dx = digits(x, p, a);
            for y in 0..q {
                let dy = digits(y, p, a);
                let s: Vec<usize> = dx.iter().zip(&dy).map(|(u, v)| (u + v) % p).collect();
                add[x * q + y] = undigits(&s, p) as u32;
                mul[x * q + y] = match &modulus {
                    None => ((x * y) % p) as u32,
                    Some(m) => undigits(&poly_mulmod(&dx, &dy, m, p), p) as u32,
                };
            }
        }
        let mut inv = vec![0u32; q];
        for x in 1..q {
            inv[x] = (1..q).find(|&y| mul[x * q + y] == 1).expect("field") as u32;
        }
        Ok(GaloisField { q, p, degree: a, modulus, add, mul, inv })
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.q + y as usize]
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.q + y as usize]
    }

    pub fn neg(&self, x: u32) -> u32 {
        (0..self.q as u32).find(|&y| self.add(x, y) == 0).expect("group")
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn inv(&self, x: u32) -> Option<u32> {
        (x != 0).then(|| self.inv[x as usize])
    }

    /// The element n·1.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Generator of the field over its prime subfield: x, or 1 if prime.
    pub fn generator(&self) -> u32 {
        if self.degree == 1 {
            1
        } else {
            self.p as u32
        }
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.q as u32
    }

    pub fn modulus_string(&self) -> Option<String> {
        self.modulus.as_ref().map(|m| {
            let mut terms = vec![format!("x^{}", self.degree)];
            for (i, &c) in m.iter().enumerate().rev() {
                if c == 0 {
                    continue;
                }
                let mono = match i {
                    0 => String::new(),
                    1 => "x".to_string(),
                    _ => format!("x^{i}"),
                };
                terms.push(match (c, mono.is_empty()) {
                    (_, true) => c.to_string(),
                    (1, false) => mono,
                    _ => format!("{c}{mono}"),
                });
            }
            terms.join("+")
        })
    }
}
