//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints a single PASS/FAIL line; exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_rational::Rational64;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use indexcoding::catalog::{load_catalog, Catalog, TableClass};
use indexcoding::closure::closure;
use indexcoding::inner::{
    centralized_cc_enhanced, centralized_cc_original, decoding_space, distributed_cc_allserver,
    distributed_cc_fractional, DeltaPlan, DeltaStrategy, GrowthOptions, InnerOptions, Objective,
    ServerGrouping,
};
use indexcoding::outer::{best_outer, thm1_polymatroid, thm2_sum_bound, Grounding};
use indexcoding::problem::{enumerate_nonisomorphic, CapacityProfile, Problem};
use indexcoding::report::{self, BoundReport, ReportOptions};
use indexcoding::subset::Subset;
use indexcoding::SolverOptions;

include!("support/table_groups.rs");

const TOL: f64 = 1e-4;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

fn run(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(_) => (false, "panicked".to_string()),
    };
    let o = Outcome {
        name,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    };
    println!(
        "[{}] {} ({:.1}s): {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.name,
        o.seconds,
        o.detail
    );
    o
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r2f(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn unit(n: usize) -> CapacityProfile {
    CapacityProfile::uniform(n, Rational64::from(1))
}

fn expected_rates() -> BTreeMap<u32, Rational64> {
    TABLE_GROUPS
        .iter()
        .flat_map(|((a, b), nos)| nos.iter().map(move |no| (*no, Rational64::new(*a, *b))))
        .collect()
}

/// Hand-rolled reader for `Problem No K: (i|a,b),...` lines, independent of
/// the library parser.
fn read_catalog_text(text: &str) -> Vec<(u32, Vec<Vec<usize>>)> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let l: String = l.chars().filter(|c| !c.is_whitespace()).collect();
            let rest = l.strip_prefix("ProblemNo").expect("prefix");
            let (no, body) = rest.split_once(':').expect("colon");
            let mut sets = Vec::new();
            for clause in body.trim_matches(|c| c == '(' || c == ')').split("),(") {
                let (i, a) = clause.split_once('|').expect("bar");
                assert_eq!(i.parse::<usize>().unwrap(), sets.len() + 1);
                let members = if a == "-" {
                    Vec::new()
                } else {
                    a.split(',').map(|x| x.parse().unwrap()).collect()
                };
                sets.push(members);
            }
            (no.parse().unwrap(), sets)
        })
        .collect()
}

fn criterion_1(catalog: &Catalog) -> Result<String, String> {
    let raw = read_catalog_text(Catalog::raw_problem_list());
    ensure(raw.len() == 218 && catalog.len() == 218, || {
        format!("{} raw lines, {} entries", raw.len(), catalog.len())
    })?;
    for (entry, (no, sets)) in catalog.iter().zip(&raw) {
        ensure(entry.problem_no == *no, || format!("entry order at {no}"))?;
        for (i, members) in sets.iter().enumerate() {
            let want = Subset::from_indices(members.iter().map(|m| m - 1));
            ensure(entry.problem.side_info(i) == want, || {
                format!("problem {no} receiver {}", i + 1)
            })?;
        }
        let rendered: String = Catalog::render_line(entry)
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let source = Catalog::raw_problem_list()
            .lines()
            .nth(*no as usize - 1)
            .unwrap()
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>();
        ensure(rendered == source, || {
            format!("render of {no}: {rendered} vs {source}")
        })?;
    }
    let expected = expected_rates();
    ensure(expected.len() == 218, || {
        "table transcription incomplete".into()
    })?;
    for e in catalog.iter() {
        ensure(expected[&e.problem_no] == e.table_sum_rate, || {
            format!("bundled rate of {} disagrees", e.problem_no)
        })?;
    }

    let start = Instant::now();
    let classes = enumerate_nonisomorphic(4);
    let elapsed = start.elapsed().as_secs_f64();
    let enumerated: BTreeSet<Problem> = classes.into_iter().collect();
    let bundled: BTreeSet<Problem> = catalog.iter().map(|e| e.problem.canonical_form()).collect();
    ensure(enumerated.len() == 218, || {
        format!("enumerated {} classes", enumerated.len())
    })?;
    ensure(bundled.len() == 218, || {
        "catalog entries are not pairwise non-isomorphic".into()
    })?;
    ensure(enumerated == bundled, || {
        "enumeration and catalog differ".into()
    })?;
    ensure(elapsed < 10.0, || format!("enumeration took {elapsed:.1}s"))?;
    Ok(format!(
        "218 entries, 218 canonical classes, enumeration {elapsed:.2}s"
    ))
}

fn criterion_2(reports: &[BoundReport]) -> Result<String, String> {
    let expected = expected_rates();
    let mut bad = Vec::new();
    for r in reports {
        let no = r.problem_no.unwrap();
        if (r.inner - r2f(expected[&no])).abs() > TOL {
            bad.push(format!("{no}: {:.6} vs {}", r.inner, expected[&no]));
        }
    }
    ensure(reports.len() == 218, || {
        format!("{} reports", reports.len())
    })?;
    ensure(bad.is_empty(), || format!("mismatches: {}", bad.join("; ")))?;
    let spot = [
        (47, Rational64::new(56, 3)),
        (46, Rational64::new(70, 3)),
        (81, Rational64::new(47, 2)),
        (112, Rational64::new(47, 2)),
        (115, Rational64::new(47, 2)),
        (119, Rational64::new(47, 2)),
        (148, Rational64::new(47, 2)),
        (140, Rational64::from(21)),
        (155, Rational64::from(24)),
        (218, Rational64::from(32)),
    ];
    for (no, want) in spot {
        let r = &reports[no as usize - 1];
        ensure(r.inner_rational == Some(want), || {
            format!("problem {no}: {:?} vs {want}", r.inner_rational)
        })?;
    }
    Ok("all 218 inner values within 1e-4".into())
}

fn criterion_3(reports: &[BoundReport], catalog: &Catalog) -> Result<String, String> {
    let p140 = &catalog.get(140).unwrap().problem;
    let solver = SolverOptions::default();
    let t1 =
        thm1_polymatroid(p140, &unit(4), Grounding::Whole, &solver).map_err(|e| e.to_string())?;
    let t2 = thm2_sum_bound(p140, &unit(4)).map_err(|e| e.to_string())?;
    ensure((t1.value - 22.0).abs() <= TOL, || {
        format!("thm1(140) = {}", t1.value)
    })?;
    ensure(t2.value() == Some(Rational64::from(21)), || {
        format!("thm2(140) = {:?}", t2.value())
    })?;

    let thm1_set: BTreeSet<u32> = reports
        .iter()
        .filter(|r| (r.thm1 - r.inner).abs() <= TOL)
        .map(|r| r.problem_no.unwrap())
        .collect();
    let best_set: BTreeSet<u32> = reports
        .iter()
        .filter(|r| (r.best_outer - r.inner).abs() <= TOL)
        .map(|r| r.problem_no.unwrap())
        .collect();
    ensure(thm1_set.len() == 145, || {
        format!("thm1 matches {}", thm1_set.len())
    })?;
    ensure(best_set.len() == 198, || {
        format!("best matches {}", best_set.len())
    })?;
    let rescued: BTreeSet<u32> = best_set.difference(&thm1_set).copied().collect();
    ensure(rescued == RESCUED.iter().copied().collect(), || {
        format!("rescued set differs: {rescued:?}")
    })?;
    let rest: Vec<&BoundReport> = reports
        .iter()
        .filter(|r| !best_set.contains(&r.problem_no.unwrap()))
        .collect();
    let rest_nos: BTreeSet<u32> = rest.iter().map(|r| r.problem_no.unwrap()).collect();
    ensure(rest_nos == UNRESOLVED.iter().copied().collect(), || {
        format!("unresolved set differs: {rest_nos:?}")
    })?;
    ensure(rest.iter().all(|r| r.best_outer > r.inner + TOL), || {
        "unresolved instance with best_outer below inner".into()
    })?;
    let summary = report::summarize(reports);
    ensure(
        summary.thm1_matches == 145 && summary.thm2_rescues == 53 && summary.gaps.len() == 20,
        || format!("summary {summary:?}"),
    )?;
    let stars: Vec<u32> = catalog
        .iter()
        .filter(|e| e.table_class == TableClass::OpenStar)
        .map(|e| e.problem_no)
        .collect();
    ensure(summary.open == stars, || format!("open {:?}", summary.open))?;

    // the per-subset grounding must agree with the default everywhere
    let mut differ = Vec::new();
    for e in catalog.iter() {
        let alt = thm1_polymatroid(&e.problem, &unit(4), Grounding::PerSubset, &solver)
            .map_err(|err| err.to_string())?;
        if (alt.value - reports[e.problem_no as usize - 1].thm1).abs() > 1e-6 {
            differ.push(e.problem_no);
        }
    }
    ensure(differ.is_empty(), || {
        format!("groundings differ on {differ:?}")
    })?;
    Ok("140: thm1=22 thm2=21; 145 thm1 matches, 198 with thm2, 20 gaps; groundings agree".into())
}

fn criterion_4(reports: &[BoundReport]) -> Result<String, String> {
    let sep: Vec<u32> = reports
        .iter()
        .filter(|r| r.enhancement_gain().unwrap() > TOL)
        .map(|r| r.problem_no.unwrap())
        .collect();
    ensure(
        reports
            .iter()
            .all(|r| r.enhancement_gain().unwrap() > -1e-6),
        || "non-enhanced above enhanced".into(),
    )?;
    ensure(sep.len() == 28, || {
        format!("{} separations: {sep:?}", sep.len())
    })?;
    let r155 = &reports[154];
    ensure(
        (r155.inner - 24.0).abs() <= TOL && (r155.inner_nonenhanced.unwrap() - 23.0).abs() <= TOL,
        || format!("155: {} vs {:?}", r155.inner, r155.inner_nonenhanced),
    )?;
    Ok(format!("28 separations incl. 155 (24 vs 23): {sep:?}"))
}

fn random_problem(rng: &mut StdRng, n: usize) -> Problem {
    let side_info = (0..n)
        .map(|i| {
            let others = Subset::full(n).without(i);
            Subset::from_mask(rng.gen_range(0..=others.mask()) & others.mask())
        })
        .collect();
    Problem::new(side_info)
}

fn random_caps(rng: &mut StdRng, n: usize) -> CapacityProfile {
    let caps = (0..(1usize << n) - 1)
        .map(|_| Rational64::from(rng.gen_range(0..=3)))
        .collect();
    CapacityProfile::new(n, caps).unwrap()
}

fn criterion_5() -> Result<String, String> {
    let p: Problem = "(1|3,4),(2|4,5),(3|5,6),(4|2,3,6),(5|1,4,6),(6|1,2)"
        .parse()
        .unwrap();
    let grow = InnerOptions::with_objective(Objective::SymmetricRate)
        .delta(DeltaPlan::Grow(GrowthOptions::default()));
    let c = Rational64::from(1);
    let orig = centralized_cc_original(&p, c, &grow).map_err(|e| e.to_string())?;
    let enh = centralized_cc_enhanced(&p, c, &grow).map_err(|e| e.to_string())?;
    ensure(
        (orig.value - 0.2963).abs() <= 5e-4 && orig.value >= 0.2962,
        || format!("original {}", orig.value),
    )?;
    ensure(enh.value >= 0.2982, || format!("enhanced {}", enh.value))?;
    ensure(enh.value > orig.value + 1e-6, || {
        "no strict improvement".into()
    })?;
    let stretch = if enh.value >= 0.2987 - 5e-5 {
        "reached"
    } else {
        "not reached"
    };

    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    for k in 0..200 {
        let n = rng.gen_range(1..=4);
        let q = random_problem(&mut rng, n);
        let caps = random_caps(&mut rng, n);
        let strategy = if n == 4 {
            DeltaStrategy::MinimalAndMaximal
        } else {
            DeltaStrategy::Full
        };
        let objective = if k % 2 == 0 {
            Objective::SumRate
        } else {
            Objective::SymmetricRate
        };
        let opts = InnerOptions::with_objective(objective).delta(strategy);
        let e = distributed_cc_allserver(&q, &caps, true, &opts).map_err(|e| e.to_string())?;
        let o = distributed_cc_allserver(&q, &caps, false, &opts).map_err(|e| e.to_string())?;
        worst = worst.min(e.value - o.value);
        ensure(e.value >= o.value - 1e-6, || {
            format!(
                "instance {k} {q}: enhanced {} < original {}",
                e.value, o.value
            )
        })?;
    }
    Ok(format!(
        "original {:.6} ({}), enhanced {:.6} ({}), 0.2987 stretch {stretch}; dominance on 200 instances, min gain {worst:.2e}",
        orig.value, orig.delta_used.kind, enh.value, enh.delta_used.kind
    ))
}

/// Closure by brute force: the intersection of all closed supersets of the seed.
fn closure_oracle(p: &Problem, seed: Subset) -> Subset {
    let n = p.n();
    Subset::full(n)
        .subsets()
        .filter(|s| seed.is_subset_of(*s))
        .filter(|s| (0..n).all(|i| s.contains(i) || !p.side_info(i).is_subset_of(*s)))
        .fold(Subset::full(n), |acc, s| acc.intersection(s))
}

fn criterion_6(reports: &[BoundReport], catalog: &Catalog) -> Result<String, String> {
    let solver = SolverOptions::default();
    for e in catalog.iter() {
        for seed in Subset::full(4).subsets() {
            ensure(
                closure(&e.problem, seed).known == closure_oracle(&e.problem, seed),
                || format!("closure of {seed} in {}", e.problem_no),
            )?;
        }
    }

    let mut rng = StdRng::seed_from_u64(6);
    for k in 0..50 {
        let q = random_problem(&mut rng, 3);
        let caps = random_caps(&mut rng, 3);
        let full = decoding_space(&q, &DeltaStrategy::Full).unwrap().tuples;
        let mut subset: Vec<_> = full.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if subset.is_empty() {
            subset.push(full[0].clone());
        }
        for objective in [Objective::SumRate, Objective::SymmetricRate] {
            for enhanced in [true, false] {
                let opts = InnerOptions::with_objective(objective.clone());
                let big = distributed_cc_allserver(
                    &q,
                    &caps,
                    enhanced,
                    &opts.clone().delta(DeltaStrategy::Full),
                )
                .map_err(|e| e.to_string())?;
                let small = distributed_cc_allserver(
                    &q,
                    &caps,
                    enhanced,
                    &opts.delta(DeltaStrategy::Custom(subset.clone())),
                )
                .map_err(|e| e.to_string())?;
                ensure(small.value <= big.value + 1e-6, || {
                    format!("monotonicity {k}: {} > {}", small.value, big.value)
                })?;
            }
        }
    }

    let nos: Vec<u32> = (1..=218).collect();
    let sample: Vec<u32> = nos.choose_multiple(&mut rng, 20).copied().collect();
    let opts = InnerOptions::default();
    for &no in &sample {
        let p = &catalog.get(no).unwrap().problem;
        let one = unit(4);
        let two = one.scaled(Rational64::from(2));
        let a = distributed_cc_allserver(p, &one, true, &opts).map_err(|e| e.to_string())?;
        let b = distributed_cc_allserver(p, &two, true, &opts).map_err(|e| e.to_string())?;
        let oa = best_outer(p, &one, Grounding::Whole, &solver).map_err(|e| e.to_string())?;
        let ob = best_outer(p, &two, Grounding::Whole, &solver).map_err(|e| e.to_string())?;
        let pairs = [
            (a.value, b.value),
            (oa.thm1.value, ob.thm1.value),
            (oa.best, ob.best),
            (
                oa.thm2.value().map_or(0.0, r2f),
                ob.thm2.value().map_or(0.0, r2f),
            ),
        ];
        ensure(
            pairs.iter().all(|(x, y)| (2.0 * x - y).abs() <= 1e-6),
            || format!("homogeneity on {no}: {pairs:?}"),
        )?;

        let f = distributed_cc_fractional(p, &one, &ServerGrouping::single(4), &opts)
            .map_err(|e| e.to_string())?;
        ensure((f.value - a.value).abs() <= 1e-6, || {
            format!(
                "fractional single group on {no}: {} vs {}",
                f.value, a.value
            )
        })?;
    }

    for k in 0..20 {
        let no = *nos.choose(&mut rng).unwrap();
        let p = &catalog.get(no).unwrap().problem;
        let caps = random_caps(&mut rng, 4);
        let mut perm: Vec<usize> = (0..4).collect();
        perm.shuffle(&mut rng);
        let q = p.permuted(&perm);
        let qcaps = caps.permuted(&perm);
        let a = distributed_cc_allserver(p, &caps, true, &opts).map_err(|e| e.to_string())?;
        let b = distributed_cc_allserver(&q, &qcaps, true, &opts).map_err(|e| e.to_string())?;
        let oa = best_outer(p, &caps, Grounding::Whole, &solver).map_err(|e| e.to_string())?;
        let ob = best_outer(&q, &qcaps, Grounding::Whole, &solver).map_err(|e| e.to_string())?;
        ensure(
            (a.value - b.value).abs() <= 1e-6
                && (oa.thm1.value - ob.thm1.value).abs() <= 1e-6
                && oa.thm2.value() == ob.thm2.value(),
            || format!("relabeling {k} of {no} by {perm:?}"),
        )?;
    }

    let violations: Vec<u32> = reports
        .iter()
        .filter(|r| r.inner > r.best_outer + 1e-6)
        .map(|r| r.problem_no.unwrap())
        .collect();
    ensure(violations.is_empty(), || {
        format!("inner above outer on {violations:?}")
    })?;
    Ok("closure oracle 218x16, monotonicity 50, homogeneity 20, fractional 20, relabeling 20, inner <= outer 218".into())
}

fn main() {
    let catalog = load_catalog().expect("bundled catalog");
    let mut outcomes = vec![run("criterion 1: catalog fidelity", || {
        criterion_1(&catalog)
    })];

    let start = Instant::now();
    let entries: Vec<_> = catalog.iter().collect();
    let opts = ReportOptions {
        with_nonenhanced: true,
        ..Default::default()
    };
    let sweep = report::sweep(&entries, &opts, 0).expect("thread pool");
    let failures: Vec<String> = sweep
        .iter()
        .filter_map(|r| r.as_ref().err().map(|e| e.to_string()))
        .collect();
    let reports: Vec<BoundReport> = sweep.into_iter().filter_map(Result::ok).collect();
    println!(
        "catalog sweep: {} reports, {} failures, {:.1}s",
        reports.len(),
        failures.len(),
        start.elapsed().as_secs_f64()
    );
    for f in &failures {
        println!("  sweep failure: {f}");
    }

    outcomes.push(run("criterion 2: inner bounds reproduce the table", || {
        criterion_2(&reports)
    }));
    outcomes.push(run("criterion 3: outer bounds", || {
        criterion_3(&reports, &catalog)
    }));
    outcomes.push(run("criterion 4: enhancement separation", || {
        ensure(failures.is_empty(), || "sweep failures".into())?;
        criterion_4(&reports)
    }));
    outcomes.push(run(
        "criterion 5: six-message centralized example",
        criterion_5,
    ));
    outcomes.push(run("criterion 6: property suites", || {
        criterion_6(&reports, &catalog)
    }));

    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "acceptance: {} passed, {} failed",
        outcomes.len() - failed,
        failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
