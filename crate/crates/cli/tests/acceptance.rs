//! Acceptance criteria 1-10. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.
//! `ACCEPTANCE_ONLY=4,7` restricts the run.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use malcev_core::brute::{brute_force_strictly_k_rich, BruteConfig, BruteVerdict, DomainSource, EXHAUSTIVE_CELLS};
use malcev_core::lemmas::{verify_lemma_corpus, LemmaRanges};
use malcev_core::modules::{build_module_algebra, counterexample_function, decide_module_richness, MatrixModuleSpec};
use malcev_core::partial::{check_nu_preservation, interpolate, interpolate_in, preserves, RelationLike, TypeContext};
use malcev_core::structure::{
    check_sc1, classify_ct, decide_hereditary_richness, homogeneous_series, series_invariants, Verdict,
    DEFAULT_SERIES_CAP,
};
use malcev_core::tct::local_module;
use malcev_core::{corpus, Analysis, ClosureConfig, Elem, FiniteAlgebra, OperationTable, PartialFunction, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn analysis(alg: FiniteAlgebra) -> Analysis {
    Analysis::new(alg, ClosureConfig::default()).expect("analysis")
}

fn bundled(name: &str) -> Analysis {
    analysis(corpus::load(name).expect("bundled"))
}

fn module(q: usize, n: usize, m: usize) -> FiniteAlgebra {
    build_module_algebra(MatrixModuleSpec { q, n, m }).expect("module")
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// B ⊆ A^n is a diagonal subalgebra of (A, +).
fn is_diagonal_subalgebra(alg: &FiniteAlgebra, b: &Relation) -> bool {
    let n = alg.size as Elem;
    (0..n).all(|a| b.contains(&vec![a; b.arity()]))
        && b.tuples().iter().all(|s| {
            b.tuples().iter().all(|t| {
                let sum: Vec<Elem> = s.iter().zip(t).map(|(&x, &y)| alg.apply(0, &[x, y])).collect();
                b.contains(&sum)
            })
        })
}

fn c1() -> Check {
    let start = Instant::now();
    let z4 = corpus::load("z4").unwrap();
    let cfg = ClosureConfig::default();
    let f1 = PartialFunction::new(1, vec![vec![0], vec![2]], vec![0, 1]).unwrap();
    let f2 = PartialFunction::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]], vec![0, 0, 0, 1]).unwrap();
    let sub = |x: Elem, y: Elem| (x + 4 - y) % 4;
    // x - y ∈ {0, 2}: the diagonal closure of {x - y = 2}
    let b1 = Relation::new(
        2,
        (0..4).flat_map(|x| (0..4).map(move |y| vec![x, y])).filter(|t| sub(t[0], t[1]) % 2 == 0).collect(),
    )
    .unwrap();
    let mut t4 = Vec::new();
    for x in 0..4u32 {
        for y in 0..4 {
            for z in 0..4 {
                for w in 0..4 {
                    if sub(x, y) == sub(z, w) {
                        t4.push(vec![x, y, z, w]);
                    }
                }
            }
        }
    }
    let b2 = Relation::new(4, t4).unwrap();
    check(is_diagonal_subalgebra(&z4, &b1) && is_diagonal_subalgebra(&z4, &b2), || {
        "relations are not diagonal subalgebras".into()
    })?;
    check(!interpolate(&z4, &f1, cfg).unwrap().interpolable, || "unary f interpolable".into())?;
    check(!interpolate(&z4, &f2, cfg).unwrap().interpolable, || "binary f interpolable".into())?;
    check(!preserves(&f1, &b1), || "unary f preserves x-y ∈ {0,2}".into())?;
    check(!preserves(&f2, &b2), || "binary f preserves x1-x2 = x3-x4".into())?;
    let el = start.elapsed();
    check(el < Duration::from_secs(1), || format!("took {el:?}"))?;
    Ok(format!("both rejected, both relations violated ({} ms)", el.as_millis()))
}

const RICH: [(usize, usize, usize, usize); 11] = [
    (2, 1, 1, 1),
    (2, 1, 1, 2),
    (2, 1, 1, 3),
    (3, 1, 1, 1),
    (3, 1, 1, 2),
    (5, 1, 1, 1),
    (2, 2, 1, 1),
    (2, 3, 1, 1),
    (3, 2, 1, 1),
    (2, 1, 2, 1),
    (3, 1, 2, 1),
];

fn c2() -> Check {
    let start = Instant::now();
    let mut exhaustive = 0;
    for (q, n, m, k) in RICH {
        check(decide_module_richness(q, n, m, k).unwrap(), || format!("({q},{n},{m},{k}) decided not rich"))?;
        let an = analysis(module(q, n, m));
        let cells = an.size().pow(k as u32);
        let (source, max_domain) = if cells <= EXHAUSTIVE_CELLS {
            exhaustive += 1;
            (DomainSource::Exhaustive, cells)
        } else {
            (DomainSource::Random { seed: 2, count: 10_000 }, 6)
        };
        let cfg = BruteConfig { k, max_domain, source, budget: None, closure: ClosureConfig::default() };
        let rep = brute_force_strictly_k_rich(&an, &cfg).unwrap();
        check(rep.verdict == BruteVerdict::RichUpToBound, || format!("({q},{n},{m},{k}): {:?}", rep.verdict))?;
    }
    let el = start.elapsed();
    check(el < Duration::from_secs(600), || format!("took {el:?}"))?;
    Ok(format!("{} tuples rich, {exhaustive} exhaustive ({:.1} s)", RICH.len(), el.as_secs_f64()))
}

const NON_RICH: [(usize, usize, usize, usize); 13] = [
    (7, 1, 1, 1),
    (4, 1, 1, 1),
    (2, 4, 1, 1),
    (3, 3, 1, 1),
    (5, 2, 1, 1),
    (2, 2, 2, 1),
    (2, 3, 2, 1),
    (3, 1, 2, 2),
    (2, 2, 1, 2),
    (3, 2, 1, 2),
    (2, 1, 1, 4),
    (3, 1, 1, 3),
    (5, 1, 1, 2),
];

fn c3() -> Check {
    let start = Instant::now();
    let mut params: BTreeSet<(usize, usize, usize, usize)> = NON_RICH.into_iter().collect();
    for q in 2..=32usize {
        if malcev_core::field::prime_power(q).is_none() {
            continue;
        }
        for n in 1..=5 {
            for m in 1..=5 {
                if (q as u64).checked_pow((n * m) as u32).is_none_or(|u| u > 32) {
                    continue;
                }
                for k in 1..=4 {
                    if !decide_module_richness(q, n, m, k).unwrap() {
                        params.insert((q, n, m, k));
                    }
                }
            }
        }
    }
    let mut cases = BTreeSet::new();
    let mut cache: Option<((usize, usize, usize), Analysis)> = None;
    for &(q, n, m, k) in &params {
        check(!decide_module_richness(q, n, m, k).unwrap(), || format!("({q},{n},{m},{k}) decided rich"))?;
        let cx = counterexample_function(q, n, m, k).map_err(|e| format!("({q},{n},{m},{k}): {e}"))?;
        cases.insert(cx.case_id);
        if cache.as_ref().map(|c| c.0) != Some((q, n, m)) {
            cache = Some(((q, n, m), analysis(module(q, n, m))));
        }
        let an = &cache.as_ref().unwrap().1;
        let v = TypeContext::new(an).unwrap().violation(&cx.f, None);
        check(v.is_none(), || format!("({q},{n},{m},{k}) case {}: violates {}", cx.case_id, v.clone().unwrap()))?;
        let interp =
            interpolate_in(an, &cx.f).map_err(|e| format!("({q},{n},{m},{k}) case {}: {e}", cx.case_id))?.interpolable;
        check(!interp, || format!("({q},{n},{m},{k}) case {}: interpolable", cx.case_id))?;
    }
    check(cases == (1..=8).collect(), || format!("cases covered {cases:?}"))?;
    let el = start.elapsed();
    check(el < Duration::from_secs(300), || format!("took {el:?}"))?;
    Ok(format!("{} parameter tuples, cases {cases:?} ({:.1} s)", params.len(), el.as_secs_f64()))
}

fn c4() -> Check {
    let start = Instant::now();
    let rep = verify_lemma_corpus(LemmaRanges { max_q: 9, max_n: 4, max_m: 3 }).unwrap();
    let el = start.elapsed();
    let bad: Vec<String> = rep
        .results
        .iter()
        .filter(|r| !r.informational && r.violation_count > 0)
        .map(|r| format!("{}: {} violations, first: {}", r.lemma, r.violation_count, r.violations[0]))
        .collect();
    let checks: u64 = rep.results.iter().map(|r| r.checks).sum();
    check(rep.passed && bad.is_empty(), || bad.join("; "))?;
    check(el < Duration::from_secs(600), || format!("took {el:?}"))?;
    Ok(format!("{} lemmata, {checks} checks, zero violations ({:.1} s)", rep.results.len(), el.as_secs_f64()))
}

fn c5() -> Check {
    let mut checked = 0;
    for name in corpus::NAMES {
        let an = bundled(name);
        let tc = an.malcev.is_some().then(|| TypeContext::new(&an).unwrap());
        let mut rels: Vec<&dyn RelationLike> = an.con.congruences.iter().map(|c| c as &dyn RelationLike).collect();
        if let Some(tc) = &tc {
            rels.extend(tc.rhos.iter().map(|r| r as &dyn RelationLike));
        }
        for k in 3..=5 {
            let below: Vec<&dyn RelationLike> = rels.iter().copied().filter(|r| r.arity() < k).collect();
            checked += below.len();
            check(check_nu_preservation(an.size(), k, &below).unwrap(), || format!("{name}, k = {k}"))?;
        }
    }
    Ok(format!("u_3, u_4, u_5 preserve all {checked} (algebra, k, relation) combinations"))
}

fn c6() -> Check {
    let z3sq = analysis(FiniteAlgebra::abelian_group(&[3, 3]));
    let algebras: Vec<(&str, Analysis, Vec<Verdict>)> = vec![
        ("Z2^2", bundled("z2sq"), vec![Verdict::Yes, Verdict::No, Verdict::No]),
        ("Z3^2", z3sq, vec![Verdict::Yes, Verdict::No]),
        ("Z5", bundled("z5"), vec![Verdict::Yes, Verdict::No]),
        ("S3", bundled("s3"), vec![Verdict::Yes, Verdict::Yes, Verdict::No, Verdict::No]),
        ("Z4", bundled("z4"), vec![Verdict::No; 4]),
    ];
    let mut brute_runs = 0;
    for (name, an, want) in &algebras {
        for (i, &w) in want.iter().enumerate() {
            let k = i + 1;
            let d = decide_hereditary_richness(an, k).unwrap();
            check(d.verdict == w, || format!("{name} k={k}: got {:?}, expected {w:?}", d.verdict))?;
            if k <= 2 && an.size() <= 6 {
                let cfg = BruteConfig {
                    k,
                    max_domain: 5,
                    source: DomainSource::Random { seed: 1, count: 1000 },
                    budget: None,
                    closure: ClosureConfig::default(),
                };
                let rep = brute_force_strictly_k_rich(an, &cfg).unwrap();
                brute_runs += 1;
                let expect =
                    if w == Verdict::No { BruteVerdict::CounterexampleFound } else { BruteVerdict::RichUpToBound };
                check(rep.verdict == expect, || format!("{name} k={k}: brute force {:?}", rep.verdict))?;
            }
        }
    }
    Ok(format!("all verdicts match; {brute_runs} brute-force cross-checks agree"))
}

fn c7() -> Check {
    for name in corpus::NAMES {
        let an = bundled(name);
        let l = &an.con.lattice;
        let c = an.con.len();
        for a in 0..c {
            for b in 0..c {
                let ab = an.commutator(a, b);
                check(l.leq(ab, l.meet(a, b)), || format!("{name}: [#{a},#{b}] not below the meet"))?;
                check(ab == an.commutator(b, a), || format!("{name}: [#{a},#{b}] not symmetric"))?;
                for a2 in (0..c).filter(|&x| l.leq(a, x)) {
                    for b2 in (0..c).filter(|&x| l.leq(b, x)) {
                        check(l.leq(ab, an.commutator(a2, b2)), || format!("{name}: not monotone at #{a},#{b}"))?;
                    }
                }
                let cen = an.centralizer(a, b);
                for g in 0..c {
                    check(l.leq(an.commutator(g, b), a) == l.leq(g, cen), || {
                        format!("{name}: residuation fails for γ=#{g}, β=#{b}, α=#{a}")
                    })?;
                }
            }
        }
    }
    let s3 = bundled("s3");
    for (a, b) in s3.con.lattice.prime_intervals() {
        check(s3.tct_type(a, b).unwrap() == 2, || format!("S3: #{a} < #{b} not type 2"))?;
    }
    for (name, q) in [("m3z2-mod", 2), ("m2z3-mod", 3)] {
        let an = bundled(name);
        check(an.con.len() == 2, || format!("{name} is not simple"))?;
        check(an.tct_type(0, 1).unwrap() == 2, || format!("{name}: top quotient not type 2"))?;
        let lm = local_module(&an, 0, 1).unwrap();
        check(lm.q == q, || format!("{name}: subtype {} instead of {q}", lm.q))?;
    }
    Ok("commutator laws hold on the corpus; S3 type 2/2; subtypes 2 and 3".into())
}

/// (A, +, e_1, .., e_r) for A = Z4 or Z2^2 and random endomorphisms e_i.
fn random_module_algebra(rng: &mut ChaCha8Rng, idx: usize) -> FiniteAlgebra {
    let klein = rng.gen_bool(0.5);
    let mut alg = if klein { FiniteAlgebra::abelian_group(&[2, 2]) } else { FiniteAlgebra::abelian_group(&[4]) };
    alg.name = format!("random-{idx}");
    let r = rng.gen_range(0..=2);
    for i in 0..r {
        let table: Vec<Elem> = if klein {
            // x = 2 x0 + x1 over GF(2); a random 2×2 matrix
            let e: [u32; 4] = [rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2)];
            (0..4u32)
                .map(|x| {
                    let (x0, x1) = (x >> 1, x & 1);
                    (((e[0] * x0 + e[1] * x1) % 2) << 1) | ((e[2] * x0 + e[3] * x1) % 2)
                })
                .collect()
        } else {
            let c: u32 = rng.gen_range(0..4);
            (0..4u32).map(|x| (c * x) % 4).collect()
        };
        alg.ops.push(OperationTable { name: format!("e{i}"), arity: 1, table });
    }
    alg.validate().expect("valid");
    alg
}

fn c8() -> Check {
    let mut n = 0;
    for name in corpus::NAMES {
        let an = bundled(name);
        if an.malcev.is_none() {
            continue;
        }
        let rep = check_sc1(&an).unwrap();
        check(rep.criteria_agree, || format!("{name}: criteria disagree"))?;
        n += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut fails = 0;
    for i in 0..100 {
        let an = analysis(random_module_algebra(&mut rng, i));
        check(an.malcev.is_some(), || format!("random-{i} has no Mal'cev polynomial"))?;
        let rep = check_sc1(&an).unwrap();
        check(rep.criteria_agree, || format!("random-{i}: criteria disagree"))?;
        fails += usize::from(!rep.holds);
    }
    Ok(format!("criteria agree on {n} bundled and 100 random algebras ({fails} of them fail (SC1))"))
}

fn c9() -> Check {
    let mut series_seen = 0;
    for name in corpus::NAMES {
        let an = bundled(name);
        if an.malcev.is_none() {
            continue;
        }
        let res = homogeneous_series(&an, DEFAULT_SERIES_CAP).unwrap();
        for s in &res.series {
            series_seen += 1;
            let inv = series_invariants(&an.con.lattice, s).unwrap();
            check(inv.iter().all(|&b| b), || format!("{name}: series {s:?} violates an invariant"))?;
            let r = classify_ct(&an, s).unwrap();
            let chain = |c1: bool, c2: bool, c3: bool| (!c3 || c2) && (!c2 || c1);
            check(chain(r.ct1, r.ct2, r.ct3), || format!("{name}: series {s:?} breaks CT3 ⇒ CT2 ⇒ CT1"))?;
            for q in &r.quotients {
                check(chain(q.ct1, q.ct2, q.ct3), || {
                    format!("{name}: quotient #{} < #{} breaks the chain", q.lower, q.upper)
                })?;
            }
        }
    }
    Ok(format!("{series_seen} series checked"))
}

fn cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_malcev-lab")).args(args).output().expect("binary runs");
    (out.status.code(), out.stdout)
}

fn c10() -> Check {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let unary = format!("{data}/f01.fn");
    let mut runs: Vec<Vec<String>> = Vec::new();
    for name in corpus::NAMES {
        let per: Vec<Vec<&str>> = vec![
            vec!["lattice"],
            vec!["types"],
            vec!["sc1"],
            vec!["series"],
            vec!["ct"],
            vec!["decide", "--k", "1"],
            vec!["decide", "--k", "2"],
            vec!["interpolate", &unary],
            vec!["check-tp", &unary],
            vec!["brute", "--k", "1", "--max-domain", "3", "--seed", "7", "--count", "40"],
        ];
        for mut a in per {
            a.insert(1, name);
            runs.push(a.into_iter().map(String::from).collect());
        }
    }
    for extra in [
        "module --q 4 --n 1 --m 1",
        "module-decide --q 2 --n 2 --m 2 --k 1",
        "module-counterexample --q 2 --n 2 --m 1 --k 2",
        "verify-lemmas --range 3,2,2",
    ] {
        runs.push(extra.split(' ').map(String::from).collect());
    }
    for r in &runs {
        let mut args: Vec<&str> = r.iter().map(String::as_str).collect();
        args.push("--json");
        let first = cli(&args);
        let second = cli(&args);
        check(first == second, || format!("`{}` differs between runs", args.join(" ")))?;
        check(serde_json::from_slice::<serde_json::Value>(&first.1).is_ok(), || {
            format!("`{}` is not JSON", args.join(" "))
        })?;
    }
    Ok(format!("{} commands byte-identical across two runs", runs.len()))
}

fn main() {
    let only: Option<BTreeSet<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [(u32, &str, fn() -> Check); 10] = [
        (1, "intro witnesses", c1),
        (2, "module classification, rich side", c2),
        (3, "module classification, non-rich side", c3),
        (4, "lemma suite", c4),
        (5, "near-unanimity", c5),
        (6, "structural decisions", c6),
        (7, "commutator laws and type labels", c7),
        (8, "SC1 dual characterization", c8),
        (9, "homogeneous-series invariants", c9),
        (10, "determinism", c10),
    ];
    let mut failed = Vec::new();
    for (id, title, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        match f() {
            Ok(detail) => println!("criterion {id:>2} PASS  {title}: {detail}"),
            Err(detail) => {
                println!("criterion {id:>2} FAIL  {title}: {detail}");
                failed.push(id);
            }
        }
    }
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass");
}
