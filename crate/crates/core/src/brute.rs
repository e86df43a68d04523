//! Bounded search for partial type-preserving functions that no polynomial
//! interpolates.
//!
//! Partial functions are grown one point at a time. Type preservation is
//! monotone under restriction, so a violation prunes the whole subtree, and
//! each new point only needs the selections that use it. Interpolability is
//! tracked as the set of polynomial rows still consistent with the function;
//! the first type-preserving function with no consistent row is reported.

use crate::algebra::{all_tuples, checked_pow, Elem};
use crate::closure::{restricted_clone, ClosureConfig};
use crate::commutator::Analysis;
use crate::error::{Error, Result};
use crate::partial::{PartialFunction, TypeContext};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

/// Exhaustive mode is only offered up to this many cells |A|^k.
pub const EXHAUSTIVE_CELLS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainSource {
    Exhaustive,
    Random { seed: u64, count: usize },
    Explicit(Vec<Vec<Vec<Elem>>>),
}

#[derive(Debug, Clone)]
pub struct BruteConfig {
    pub k: usize,
    pub max_domain: usize,
    pub source: DomainSource,
    /// Cap on type-preservation checks; exceeding it yields a partial verdict.
    pub budget: Option<u64>,
    pub closure: ClosureConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BruteVerdict {
    RichUpToBound,
    CounterexampleFound,
    Partial,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub domains_completed: u64,
    pub domains_planned: u64,
    pub checks: u64,
    pub type_preserving: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteReport {
    pub k: usize,
    pub max_domain: usize,
    pub mode: &'static str,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub verdict: BruteVerdict,
    pub counterexample: Option<PartialFunction>,
    pub coverage: Coverage,
}

enum Flow {
    Continue,
    Found(Vec<usize>, Vec<Elem>),
    OutOfBudget,
}

struct Search<'a> {
    ctx: &'a TypeContext<'a>,
    k: usize,
    /// Candidate points, in visiting order.
    points: Vec<Vec<Elem>>,
    /// Polynomial rows indexed like `points`.
    rows: Vec<Box<[Elem]>>,
    size: usize,
    max_domain: usize,
    budget: u64,
    checks: u64,
    tp: u64,
    /// Every point must be used in order (a fixed domain) rather than chosen.
    fixed: bool,
}

impl Search<'_> {
    fn function(&self, dom: &[usize], vals: &[Elem]) -> PartialFunction {
        let domain = dom.iter().map(|&p| self.points[p].clone()).collect();
        PartialFunction::new(self.k, domain, vals.to_vec()).expect("distinct points")
    }

    fn run(&mut self) -> Flow {
        let all: Vec<u32> = (0..self.rows.len() as u32).collect();
        self.go(0, &mut Vec::new(), &mut Vec::new(), &all)
    }

    fn go(&mut self, from: usize, dom: &mut Vec<usize>, vals: &mut Vec<Elem>, consistent: &[u32]) -> Flow {
        if dom.len() == self.max_domain || from == self.points.len() {
            return Flow::Continue;
        }
        let last = if self.fixed { from + 1 } else { self.points.len() };
        for p in from..last {
            for v in 0..self.size as Elem {
                if self.checks >= self.budget {
                    return Flow::OutOfBudget;
                }
                self.checks += 1;
                dom.push(p);
                vals.push(v);
                let f = self.function(dom, vals);
                if self.ctx.violation(&f, Some(dom.len() - 1)).is_none() {
                    self.tp += 1;
                    let next: Vec<u32> =
                        consistent.iter().copied().filter(|&r| self.rows[r as usize][p] == v).collect();
                    if next.is_empty() {
                        return Flow::Found(dom.clone(), vals.clone());
                    }
                    match self.go(p + 1, dom, vals, &next) {
                        Flow::Continue => {}
                        other => return other,
                    }
                }
                dom.pop();
                vals.pop();
            }
        }
        Flow::Continue
    }
}

pub fn brute_force_strictly_k_rich(an: &Analysis, cfg: &BruteConfig) -> Result<BruteReport> {
    if cfg.k == 0 || cfg.max_domain == 0 {
        return Err(Error::usage("k and the maximal domain size must be positive"));
    }
    an.require_malcev()?;
    let ctx = TypeContext::new(an)?;
    let n = an.size();
    let budget = cfg.budget.unwrap_or(u64::MAX);
    let mut report = BruteReport {
        k: cfg.k,
        max_domain: cfg.max_domain,
        mode: "",
        seed: None,
        budget: cfg.budget,
        verdict: BruteVerdict::RichUpToBound,
        counterexample: None,
        coverage: Coverage::default(),
    };
    match &cfg.source {
        DomainSource::Exhaustive => {
            report.mode = "exhaustive";
            let cells = checked_pow(n, cfg.k).filter(|&c| c <= EXHAUSTIVE_CELLS).ok_or_else(|| {
                Error::usage(format!(
                    "exhaustive mode needs |A|^k <= {EXHAUSTIVE_CELLS}; use random or explicit domains"
                ))
            })?;
            let points: Vec<Vec<Elem>> = all_tuples(n, cfg.k).collect();
            debug_assert_eq!(points.len(), cells);
            // full polynomial tables over A^k
            let rows = restricted_clone(&an.alg, &points, cfg.closure)?.into_rows();
            let mut s = Search {
                ctx: &ctx,
                k: cfg.k,
                points,
                rows,
                size: n,
                max_domain: cfg.max_domain,
                budget,
                checks: 0,
                tp: 0,
                fixed: false,
            };
            let flow = s.run();
            report.coverage =
                Coverage { domains_completed: 0, domains_planned: 1, checks: s.checks, type_preserving: s.tp };
            match flow {
                Flow::Continue => report.coverage.domains_completed = 1,
                Flow::Found(d, v) => {
                    report.verdict = BruteVerdict::CounterexampleFound;
                    report.counterexample = Some(s.function(&d, &v));
                }
                Flow::OutOfBudget => report.verdict = BruteVerdict::Partial,
            }
            Ok(report)
        }
        DomainSource::Random { seed, count } => {
            report.mode = "random";
            report.seed = Some(*seed);
            let domains = random_domains(n, cfg.k, cfg.max_domain, *seed, *count)?;
            run_domains(an, &ctx, cfg, domains, budget, report)
        }
        DomainSource::Explicit(domains) => {
            report.mode = "explicit";
            for d in domains {
                if d.is_empty() || d.iter().any(|t| t.len() != cfg.k || t.iter().any(|&x| x as usize >= n)) {
                    return Err(Error::usage("explicit domain has a tuple of the wrong arity or outside the universe"));
                }
                let mut sorted = d.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != d.len() {
                    return Err(Error::usage("explicit domain lists a tuple twice"));
                }
            }
            run_domains(an, &ctx, cfg, domains.clone(), budget, report)
        }
    }
}

/// `count` domains of sizes 1..=max_domain, each a set of distinct k-tuples
/// listed in increasing order.
pub fn random_domains(n: usize, k: usize, max_domain: usize, seed: u64, count: usize) -> Result<Vec<Vec<Vec<Elem>>>> {
    let cells = checked_pow(n, k).ok_or_else(|| Error::usage("A^k too large to sample"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut t = vec![0; k];
    for _ in 0..count {
        let s = rng.gen_range(1..=max_domain.min(cells));
        let mut idx = sample(&mut rng, cells, s).into_vec();
        idx.sort_unstable();
        out.push(
            idx.into_iter()
                .map(|i| {
                    crate::algebra::decode_into(i, n, &mut t);
                    t.clone()
                })
                .collect(),
        );
    }
    Ok(out)
}

struct DomainOutcome {
    checks: u64,
    tp: u64,
    found: Option<PartialFunction>,
    out_of_budget: bool,
}

/// Searches every function on each domain. Domains are claimed in order by
/// worker threads; the reported counterexample is the one on the least
/// domain index and the budget is charged in domain order, so the report
/// does not depend on scheduling.
fn run_domains(
    an: &Analysis,
    ctx: &TypeContext,
    cfg: &BruteConfig,
    domains: Vec<Vec<Vec<Elem>>>,
    budget: u64,
    mut report: BruteReport,
) -> Result<BruteReport> {
    let total = domains.len();
    let next = AtomicUsize::new(0);
    let spent = AtomicU64::new(0);
    let best = AtomicUsize::new(usize::MAX);
    let slots: Vec<Mutex<Option<Result<DomainOutcome>>>> = (0..total).map(|_| Mutex::new(None)).collect();
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get()).min(total.max(1));
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= total || i > best.load(Ordering::SeqCst) || spent.load(Ordering::SeqCst) > budget {
                    break;
                }
                let r = search_domain(an, ctx, cfg, &domains[i], budget);
                if let Ok(o) = &r {
                    spent.fetch_add(o.checks, Ordering::SeqCst);
                    if o.found.is_some() {
                        best.fetch_min(i, Ordering::SeqCst);
                    }
                }
                *slots[i].lock().expect("poisoned") = Some(r);
            });
        }
    });
    report.coverage.domains_planned = total as u64;
    let mut used = 0u64;
    for slot in slots {
        let Some(r) = slot.into_inner().expect("poisoned") else {
            // unclaimed: the budget ran out before this domain
            report.verdict = BruteVerdict::Partial;
            break;
        };
        let o = r?;
        used += o.checks;
        report.coverage.checks = used.min(budget);
        report.coverage.type_preserving += o.tp;
        if let Some(f) = o.found {
            report.verdict = BruteVerdict::CounterexampleFound;
            report.counterexample = Some(f);
            break;
        }
        if o.out_of_budget || used > budget {
            report.verdict = BruteVerdict::Partial;
            break;
        }
        report.coverage.domains_completed += 1;
    }
    Ok(report)
}

fn search_domain(
    an: &Analysis,
    ctx: &TypeContext,
    cfg: &BruteConfig,
    domain: &[Vec<Elem>],
    budget: u64,
) -> Result<DomainOutcome> {
    let rows = restricted_clone(&an.alg, domain, cfg.closure)?.into_rows();
    let mut s = Search {
        ctx,
        k: cfg.k,
        points: domain.to_vec(),
        rows,
        size: an.size(),
        max_domain: domain.len(),
        budget,
        checks: 0,
        tp: 0,
        fixed: true,
    };
    let flow = s.run();
    let (found, out_of_budget) = match flow {
        Flow::Continue => (None, false),
        Flow::Found(d, v) => (Some(s.function(&d, &v)), false),
        Flow::OutOfBudget => (None, true),
    };
    Ok(DomainOutcome { checks: s.checks, tp: s.tp, found, out_of_budget })
}
