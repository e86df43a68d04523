//! Homogeneous series, (SC1), completeness types and the decision procedure
//! for hereditary strict k-polynomial richness.

use crate::algebra::Elem;
use crate::commutator::Analysis;
use crate::congruence::principal_congruence;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::partial::PartialFunction;
use crate::tct::{class_counts, quotient_subtype};
use serde::Serialize;
use std::collections::BTreeSet;

pub const DEFAULT_SERIES_CAP: usize = 10_000;

/// Projectivity classes of prime intervals, each sorted, ordered by first member.
pub fn projective_prime_classes(l: &Lattice) -> Vec<Vec<(usize, usize)>> {
    let mut classes = l.projectivity_classes();
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort();
    classes
}

pub fn phi_and_star(l: &Lattice, mu: usize) -> (usize, usize) {
    (l.phi(mu), l.star(mu))
}

#[derive(Debug, Clone, Serialize)]
pub struct Sc1Report {
    pub holds: bool,
    /// (μ, μ⁺) with (μ:μ⁺) ≰ μ⁺.
    pub violations: Vec<(usize, usize)>,
    /// Join irreducible (α, β) with [α,β] ≤ α⁻ ≺ α ≤ β⁻ ≺ β.
    pub failure_pairs: Vec<(usize, usize)>,
    pub criteria_agree: bool,
}

pub fn check_sc1(an: &Analysis) -> Result<Sc1Report> {
    an.require_malcev()?;
    let l = &an.con.lattice;
    let violations: Vec<(usize, usize)> = l
        .strictly_meet_irreducibles()
        .into_iter()
        .filter(|&(mu, plus)| !l.leq(an.centralizer(mu, plus), plus))
        .collect();
    let ji = l.join_irreducibles();
    let mut failure_pairs = Vec::new();
    for &(a, am) in &ji {
        for &(b, bm) in &ji {
            if l.leq(an.commutator(a, b), am) && l.leq(a, bm) {
                failure_pairs.push((a, b));
            }
        }
    }
    let holds = violations.is_empty();
    Ok(Sc1Report { holds, criteria_agree: holds == failure_pairs.is_empty(), violations, failure_pairs })
}

#[derive(Debug, Clone, Serialize)]
pub struct Sc1Witness {
    pub a: Elem,
    pub o: Elem,
    pub b: Elem,
    pub f: PartialFunction,
}

/// Least (o, a, b) with Cg(o,a) = α and Cg(o,b) = β.
pub fn find_witness_elements(an: &Analysis, alpha: usize, beta: usize) -> Result<Option<(Elem, Elem, Elem)>> {
    let n = an.size() as Elem;
    let mut pc = vec![None; (n * n) as usize];
    let mut cg = |x: Elem, y: Elem| -> Result<usize> {
        let slot = &mut pc[(x * n + y) as usize];
        if let Some(i) = *slot {
            return Ok(i);
        }
        let i = an.index_of(&principal_congruence(&an.alg, x, y)?)?;
        *slot = Some(i);
        Ok(i)
    };
    for o in 0..n {
        for a in 0..n {
            if cg(o, a)? != alpha {
                continue;
            }
            for b in 0..n {
                if cg(o, b)? == beta {
                    return Ok(Some((o, a, b)));
                }
            }
        }
    }
    Ok(None)
}

/// The unary partial function {a,o,b} ↦ o, d(a,o,b) ↦ a.
pub fn sc1_failure_witness(an: &Analysis, pair: (usize, usize), elems: (Elem, Elem, Elem)) -> Result<Sc1Witness> {
    let w = an.require_malcev()?;
    let (alpha, beta) = pair;
    let (a, o, b) = elems;
    let n = an.size();
    if [a, o, b].iter().any(|&x| x as usize >= n) {
        return Err(Error::usage("element out of range"));
    }
    if an.index_of(&principal_congruence(&an.alg, o, a)?)? != alpha {
        return Err(Error::Precondition("Cg(o,a) differs from α".into()));
    }
    if an.index_of(&principal_congruence(&an.alg, o, b)?)? != beta {
        return Err(Error::Precondition("Cg(o,b) differs from β".into()));
    }
    if !check_sc1(an)?.failure_pairs.contains(&pair) {
        return Err(Error::Precondition("(α,β) is not a failure of (SC1)".into()));
    }
    let d = w.d(n, a, o, b);
    let mut dom: Vec<Elem> = Vec::new();
    let mut vals = Vec::new();
    for x in [a, o, b] {
        if !dom.contains(&x) {
            dom.push(x);
            vals.push(o);
        }
    }
    match dom.iter().position(|&x| x == d) {
        Some(_) => return Err(Error::Precondition("d(a,o,b) lies in {a,o,b}".into())),
        None => {
            dom.push(d);
            vals.push(a);
        }
    }
    let f = PartialFunction::new(1, dom.into_iter().map(|x| vec![x]).collect(), vals)?;
    Ok(Sc1Witness { a, o, b, f })
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesResult {
    pub series: Vec<Vec<usize>>,
    pub diagnostic: Option<String>,
}

pub fn homogeneous_series(an: &Analysis, cap: usize) -> Result<SeriesResult> {
    if !check_sc1(an)?.holds {
        return Ok(SeriesResult { series: Vec::new(), diagnostic: Some("(SC1) fails".into()) });
    }
    let l = &an.con.lattice;
    let mut out = Vec::new();
    let mut path = vec![l.bottom];
    series_dfs(l, &mut path, &mut out, cap)?;
    Ok(SeriesResult { series: out, diagnostic: None })
}

fn series_dfs(l: &Lattice, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) -> Result<()> {
    let cur = *path.last().expect("nonempty");
    if cur == l.top {
        if out.len() >= cap {
            return Err(Error::Resource { what: "homogeneous series".into(), cap });
        }
        out.push(path.clone());
        return Ok(());
    }
    let (sub, map) = l.interval(cur, l.top)?;
    let mut next: Vec<usize> = (0..sub.len()).filter(|&e| sub.is_homogeneous(e)).map(|e| map[e]).collect();
    next.sort_unstable();
    for g in next {
        path.push(g);
        series_dfs(l, path, out, cap)?;
        path.pop();
    }
    Ok(())
}

/// Checks, in I[μ_{i-1}, 1], that μ_i ∧ μ_i* = 0, Φ(μ_i) = 0 and that
/// I[μ_{i-1}, μ_i] is simple complemented modular.
pub fn series_invariants(l: &Lattice, series: &[usize]) -> Result<Vec<bool>> {
    let mut res = Vec::new();
    for w in series.windows(2) {
        let (sub, map) = l.interval(w[0], l.top)?;
        let mu = map.iter().position(|&g| g == w[1]).ok_or_else(|| Error::usage("series is not a chain"))?;
        let (phi, star) = phi_and_star(&sub, mu);
        let (below, _) = sub.interval(sub.bottom, mu)?;
        res.push(sub.meet(mu, star) == sub.bottom && phi == sub.bottom && below.is_simple_complemented_modular());
    }
    Ok(res)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientReport {
    pub lower: usize,
    pub upper: usize,
    #[serde(rename = "type")]
    pub tct_type: u8,
    pub subtype: Option<usize>,
    pub dimension: Option<usize>,
    pub m: usize,
    pub class_sizes: Vec<usize>,
    pub abp: Vec<(usize, bool)>,
    pub ct1: bool,
    pub ct2: bool,
    pub ct3: bool,
    pub clauses: Vec<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CtReport {
    pub series: Vec<usize>,
    pub quotients: Vec<QuotientReport>,
    pub ct1: bool,
    pub ct2: bool,
    pub ct3: bool,
}

/// (ABp) for (A/α, β/α), evaluated on the covers of I[α,β] in A.
pub fn abp_interval(an: &Analysis, alpha: usize, beta: usize, p: usize) -> bool {
    let l = &an.con.lattice;
    l.prime_intervals().into_iter().filter(|&(g, d)| l.leq(alpha, g) && l.leq(d, beta)).all(|(g, d)| {
        !l.leq(an.commutator(d, d), g)
            || class_counts(an.congruence(g), an.congruence(d)).iter().all(|&c| c == 1 || c == p)
    })
}

pub fn classify_quotient(an: &Analysis, alpha: usize, beta: usize) -> Result<QuotientReport> {
    an.require_malcev()?;
    let l = &an.con.lattice;
    let m = l.height_between(alpha, beta).ok_or_else(|| Error::usage("quotient bounds are not comparable"))?;
    if m == 0 {
        return Err(Error::usage("empty quotient"));
    }
    let (sub, _) = l.interval(alpha, beta)?;
    if !sub.is_simple_complemented_modular() {
        return Err(Error::Precondition("interval is not simple complemented modular".into()));
    }
    // all prime quotients of a simple interval are projective and share the type
    let first = *l.upper_covers(alpha).iter().filter(|&&g| l.leq(g, beta)).min().expect("m > 0");
    let tct_type = an.type_unchecked(alpha, first);
    let sizes: Vec<usize> = class_counts(an.congruence(alpha), an.congruence(beta)).into_iter().collect();
    let abp: Vec<(usize, bool)> = [2, 3, 5].iter().map(|&p| (p, abp_interval(an, alpha, beta, p))).collect();
    let ab = |p: usize| abp.iter().any(|&(x, v)| x == p && v);
    let mut note = None;
    let (subtype, dimension) = if tct_type == 2 {
        match quotient_subtype(an, alpha, beta) {
            Ok(s) => (Some(s.q), Some(s.n)),
            Err(e) => {
                note = Some(format!("subtype undefined: {e}"));
                (None, None)
            }
        }
    } else {
        (None, None)
    };
    let within = |allowed: &[usize]| sizes.iter().all(|s| allowed.contains(s));
    let mut clauses = Vec::new();
    let (ct1, ct2, ct3);
    if tct_type == 3 {
        clauses.extend(["1a", "2a", "3a"].map(String::from));
        (ct1, ct2, ct3) = (true, true, true);
    } else {
        let q = subtype.unwrap_or(0);
        let c1b = q == 2 && m == 1 && within(&[1, 2, 4, 8]);
        let c1c = q == 3 && m == 1 && within(&[1, 3, 9]);
        let c1d = matches!(q, 2 | 3 | 5) && ab(q);
        let c2b = matches!(q, 2 | 3) && m == 1 && ab(q);
        let c3b = q == 2 && m == 1 && ab(2);
        for (hit, name) in [(c1b, "1b"), (c1c, "1c"), (c1d, "1d"), (c2b, "2b"), (c3b, "3b")] {
            if hit {
                clauses.push(name.to_string());
            }
        }
        (ct1, ct2, ct3) = (c1b || c1c || c1d, c2b, c3b);
    }
    Ok(QuotientReport {
        lower: alpha,
        upper: beta,
        tct_type,
        subtype,
        dimension,
        m,
        class_sizes: sizes,
        abp,
        ct1,
        ct2,
        ct3,
        clauses,
        note,
    })
}

pub fn classify_ct(an: &Analysis, series: &[usize]) -> Result<CtReport> {
    let l = &an.con.lattice;
    if series.first() != Some(&l.bottom) || series.last() != Some(&l.top) {
        return Err(Error::usage("a series runs from 0 to 1"));
    }
    let quotients = series.windows(2).map(|w| classify_quotient(an, w[0], w[1])).collect::<Result<Vec<_>>>()?;
    Ok(CtReport {
        series: series.to_vec(),
        ct1: quotients.iter().all(|q| q.ct1),
        ct2: quotients.iter().all(|q| q.ct2),
        ct3: quotients.iter().all(|q| q.ct3),
        quotients,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unsupported,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decision {
    pub k: usize,
    pub verdict: Verdict,
    pub basis: String,
}

pub fn decide_hereditary_richness(an: &Analysis, k: usize) -> Result<Decision> {
    let dec = |verdict, basis: &str| Decision { k, verdict, basis: basis.to_string() };
    if k == 0 {
        return Err(Error::usage("k must be positive"));
    }
    if an.malcev.is_none() {
        return Ok(dec(Verdict::Unsupported, "no Mal'cev polynomial"));
    }
    if k >= 4 {
        return Ok(if an.is_congruence_neutral()? {
            dec(Verdict::Yes, "congruence neutral")
        } else {
            dec(Verdict::No, "not congruence neutral")
        });
    }
    if k == 1 && !an.is_congruence_regular() {
        return Ok(dec(Verdict::Unsupported, "k = 1 requires congruence regularity"));
    }
    if !check_sc1(an)?.holds {
        return Ok(dec(Verdict::No, "(SC1) fails"));
    }
    let series = homogeneous_series(an, DEFAULT_SERIES_CAP)?.series;
    for s in &series {
        let r = classify_ct(an, s)?;
        let ok = match k {
            1 => r.ct1,
            2 => r.ct2,
            _ => r.ct3,
        };
        if !ok {
            return Ok(dec(Verdict::No, &format!("homogeneous series {s:?} is not (CT{k})")));
        }
    }
    Ok(dec(Verdict::Yes, &format!("(SC1) holds and all {} homogeneous series are (CT{k})", series.len())))
}

/// Projectivity class id of each prime interval, for reporting.
pub fn projectivity_labels(l: &Lattice) -> Vec<((usize, usize), usize)> {
    let mut out = Vec::new();
    for (g, c) in projective_prime_classes(l).into_iter().enumerate() {
        out.extend(c.into_iter().map(|p| (p, g)));
    }
    out.sort_unstable();
    out
}

/// Homogeneous elements of the whole lattice.
pub fn homogeneous_elements(l: &Lattice) -> BTreeSet<usize> {
    (0..l.len()).filter(|&m| l.is_homogeneous(m)).collect()
}
