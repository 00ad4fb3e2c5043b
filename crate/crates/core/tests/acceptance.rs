//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion (with
//! indented details) and exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use dpqs_core::exactdp::{partition_costs, CostTable};
use dpqs_core::exactnum::Rational;
use dpqs_core::formulas::{known_discrepancy, ExpansionId, FormulaId};
use dpqs_core::gfcatalog::{derive_cj_gf, derive_grand_gf, gf_erratum, stated_gf, NamedGf};
use dpqs_core::harness::{asymptotics, default_grid};
use dpqs_core::series::{l2, l2_by_coefficients, log_one_minus, log_one_plus, TruncSeries};
use dpqs_core::simkit::{
    enumerate_rank_totals, enumerated_value, monte_carlo, randomness_preservation_check, Query,
};
use dpqs_core::strategies::StrategyId;

const SF: StrategyId = StrategyId::SmallerFirst;
const CT: StrategyId = StrategyId::Count;
const CV: StrategyId = StrategyId::Clairvoyant;

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            details: Vec::new(),
        }
    }

    fn fail(&mut self, detail: String) {
        self.pass = false;
        self.details.push(detail);
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }
}

fn coeff(s: &TruncSeries, n: usize) -> Rational {
    s.coeff(n).cloned().unwrap_or_else(|_| Rational::zero())
}

/// Runs of consecutive `n` as `a..b` for compact reporting.
fn ranges(ns: &[usize]) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < ns.len() {
        let mut k = i;
        while k + 1 < ns.len() && ns[k + 1] == ns[k] + 1 {
            k += 1;
        }
        out.push(if k == i {
            ns[i].to_string()
        } else {
            format!("{}..{}", ns[i], ns[k])
        });
        i = k + 1;
    }
    out.join(",")
}

fn stated_rank_gfs(strategy: StrategyId) -> Vec<(usize, NamedGf)> {
    match strategy {
        StrategyId::Count => (1..=4).map(|j| (j, NamedGf::RankCt(j as u8))).collect(),
        StrategyId::Clairvoyant => vec![(1, NamedGf::SmallestCv)],
        StrategyId::SmallerFirst => vec![(1, NamedGf::SmallestSf)],
        _ => Vec::new(),
    }
}

fn stated_grand_gf(strategy: StrategyId) -> NamedGf {
    match strategy {
        StrategyId::Count => NamedGf::GrandCt,
        StrategyId::Clairvoyant => NamedGf::GrandCv,
        _ => NamedGf::GrandSf,
    }
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    const N: usize = 8;
    for s in [SF, CT, CV] {
        let table = CostTable::build(s, N).unwrap();
        let grand_gf = stated_gf(stated_grand_gf(s), N);
        let rank_gfs: Vec<(usize, NamedGf, TruncSeries)> = stated_rank_gfs(s)
            .into_iter()
            .map(|(j, gf)| (j, gf, stated_gf(gf, N)))
            .collect();
        let mut gf_misses: BTreeMap<String, (Vec<usize>, bool)> = BTreeMap::new();
        for n in 1..=N {
            let totals = enumerate_rank_totals(n, s).unwrap();
            for j in 1..=n {
                let e = enumerated_value(&totals, Query::Rank(j));
                let d = table.get(n, j).unwrap();
                if &e != d {
                    o.fail(format!(
                        "{s} n={n} j={j}: enumeration {e} != recurrence {d}"
                    ));
                }
            }
            let e = enumerated_value(&totals, Query::Grand);
            let d = table.grand_average(n).unwrap();
            if e != d {
                o.fail(format!(
                    "{s} n={n} grand: enumeration {e} != recurrence {d}"
                ));
            }
            let g = coeff(&grand_gf, n);
            let sum = table.grand_sum(n).unwrap();
            if g != sum {
                o.fail(format!(
                    "{s} n={n}: [z^n] {} = {g} != n * grand = {sum}",
                    stated_grand_gf(s)
                ));
            }
            for (j, gf, series) in &rank_gfs {
                if *j > n {
                    continue;
                }
                let g = coeff(series, n);
                let d = table.get(n, *j).unwrap();
                if &g != d {
                    let delta = &g - d;
                    let explained = gf_erratum(*gf, N).is_some_and(|e| coeff(&e, n) == delta);
                    let entry = gf_misses.entry(gf.name()).or_insert((Vec::new(), true));
                    entry.0.push(n);
                    entry.1 &= explained;
                }
            }
        }
        for (name, (ns, explained)) in gf_misses {
            o.fail(format!(
                "{s}: [z^n] stated {name} != recurrence at n = {}{}",
                ranges(&ns),
                if explained {
                    "; the difference equals the registered series erratum"
                } else {
                    "; not explained by a registered erratum"
                }
            ));
        }
    }
    o.note(format!(
        "strategies sf, ct, cv; n <= {N}; all ranks; grand and per-rank series for j <= 4"
    ));
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    const N: usize = 64;
    let ct = partition_costs(CT, N).unwrap();
    let sf = partition_costs(SF, N).unwrap();
    let gf = stated_gf(NamedGf::PartitionCt, N);
    for n in 2..=N {
        let g = coeff(&gf, n);
        if g != ct[n] {
            o.fail(format!("ct n={n}: [z^n] P_ct = {g} != {}", ct[n]));
        }
        let closed = Rational::frac(5 * n as i64 - 7, 3);
        if closed != sf[n] {
            o.fail(format!("sf n={n}: (5/3)n - 7/3 = {closed} != {}", sf[n]));
        }
    }
    o.note(format!("2 <= n <= {N}"));
    o
}

fn compare_series(
    o: &mut Outcome,
    label: &str,
    derived: &TruncSeries,
    stated: &TruncSeries,
    erratum: Option<TruncSeries>,
) {
    if derived == stated {
        return;
    }
    let bad: Vec<usize> = (0..=stated.order())
        .filter(|&k| coeff(derived, k) != coeff(stated, k))
        .collect();
    let explained = erratum.is_some_and(|e| stated - derived == e);
    o.fail(format!(
        "{label}: {} of {} coefficients differ (k = {}){}",
        bad.len(),
        stated.order() + 1,
        ranges(&bad),
        if explained {
            "; stated - derived equals the registered series erratum exactly"
        } else {
            ""
        }
    ));
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    const ORDER: usize = 64;
    let p_ct = stated_gf(NamedGf::PartitionCt, ORDER);
    let p_sf = stated_gf(NamedGf::PartitionSf, ORDER);
    compare_series(
        &mut o,
        "C^ct(z,1)",
        &derive_grand_gf(&p_ct).unwrap(),
        &stated_gf(NamedGf::GrandCt, ORDER),
        None,
    );
    compare_series(
        &mut o,
        "C^sf(z,1)",
        &derive_grand_gf(&p_sf).unwrap(),
        &stated_gf(NamedGf::GrandSf, ORDER),
        None,
    );
    let ct_ranks = derive_cj_gf(&p_ct, 4).unwrap();
    for (j, derived) in ct_ranks.iter().enumerate() {
        let gf = NamedGf::RankCt(j as u8 + 1);
        compare_series(
            &mut o,
            &format!("C^ct_{}", j + 1),
            derived,
            &stated_gf(gf, ORDER),
            gf_erratum(gf, ORDER),
        );
    }
    let sf_ranks = derive_cj_gf(&p_sf, 1).unwrap();
    compare_series(
        &mut o,
        "C^sf_1",
        &sf_ranks[0],
        &stated_gf(NamedGf::SmallestSf, ORDER),
        None,
    );
    o.note(format!("all coefficients to order {ORDER}, exact"));
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let formulas = [
        FormulaId::CountGrand,
        FormulaId::CountRank1,
        FormulaId::CountRank2,
        FormulaId::CountRank3,
        FormulaId::CountRank4,
        FormulaId::ClairvoyantGrand,
        FormulaId::ClairvoyantSmallest,
        FormulaId::SmallerFirstSmallest,
        FormulaId::SmallerFirstGrand,
    ];
    let tables: BTreeMap<StrategyId, CostTable> = [SF, CT, CV]
        .into_iter()
        .map(|s| (s, CostTable::build(s, 64).unwrap()))
        .collect();
    for f in formulas {
        let table = &tables[&f.strategy()];
        let range = f.check_range();
        let (mut zero, mut registered) = (Vec::new(), Vec::new());
        for n in range.clone() {
            let truth = match f.rank() {
                Some(j) => table.get(n, j).unwrap().clone(),
                None => table.grand_average(n).unwrap(),
            };
            let value = f.evaluate(n).unwrap();
            let delta = &value - &truth;
            if delta.is_zero() {
                zero.push(n);
            } else if known_discrepancy(f).and_then(|d| d.delta(n)).as_ref() == Some(&delta) {
                registered.push(n);
            } else {
                o.fail(format!(
                    "finding {f} n={n}: formula - recurrence = {delta} (unregistered)"
                ));
            }
        }
        let mut line = format!(
            "{f} on {}..={}: exact at {} n",
            range.start(),
            range.end(),
            zero.len()
        );
        if !registered.is_empty() {
            let d = known_discrepancy(f).unwrap();
            line += &format!(
                "; registered delta at n = {} ({}; delta at n={} is {})",
                ranges(&registered),
                d.note,
                registered[0],
                d.delta(registered[0]).unwrap()
            );
        }
        o.note(line);
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    for n in 2..=8 {
        let totals = enumerate_rank_totals(n, StrategyId::Classical).unwrap();
        for (f, q) in [
            (FormulaId::ClassicalGrand, Query::Grand),
            (FormulaId::ClassicalSmallest, Query::Rank(1)),
        ] {
            let e = enumerated_value(&totals, q);
            let v = f.evaluate(n).unwrap();
            if e != v {
                o.fail(format!("classical n={n} {q}: enumeration {e} != {f} {v}"));
            }
        }
    }
    o.note("classical grand and j=1: exact for 2 <= n <= 8".into());
    let yar: Vec<Vec<u64>> = (1..=9)
        .map(|n| enumerate_rank_totals(n, StrategyId::Yaroslavskiy).unwrap())
        .collect();
    for (f, q) in [
        (FormulaId::YaroslavskiyGrand, Query::Grand),
        (FormulaId::YaroslavskiySmallest, Query::Rank(1)),
    ] {
        let matches = |n: usize| {
            f.evaluate(n)
                .is_ok_and(|v| v == enumerated_value(&yar[n - 1], q))
        };
        // smallest n0 with agreement on n0..=9
        let n0 = (1..=9).find(|&n0| (n0..=9).all(matches));
        match n0 {
            Some(n0) if n0 <= 6 => o.note(format!("{f}: exact for n0 = {n0} <= n <= 9")),
            Some(n0) => o.fail(format!("{f}: threshold n0 = {n0} exceeds 6")),
            None => o.fail(format!("{f}: does not match enumeration at n = 9")),
        }
    }
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let grid = default_grid();
    for id in [
        ExpansionId::CountGrand,
        ExpansionId::CountRank(1),
        ExpansionId::CountRank(2),
        ExpansionId::CountRank(3),
        ExpansionId::CountRank(4),
        ExpansionId::ClairvoyantGrand,
        ExpansionId::CountPartition,
        ExpansionId::ClairvoyantPartition,
    ] {
        let r = asymptotics(id, id.strategy(), &grid).unwrap();
        let line = format!(
            "{}: fitted ln n slope {:+.4}, residual band {:.4} over n = {}..{}",
            r.expansion_id,
            r.slope,
            r.band,
            grid[0],
            grid[grid.len() - 1]
        );
        if r.passed() {
            o.note(line);
        } else {
            o.fail(line);
        }
    }
    o
}

fn criterion_7(tables: &BTreeMap<StrategyId, CostTable>) -> Outcome {
    let mut o = Outcome::new();
    const N: usize = 200;
    let (cv, ct, sf) = (&tables[&CV], &tables[&CT], &tables[&SF]);
    for n in 2..=N {
        let p = |t: &CostTable| t.partition_cost(n).unwrap().clone();
        if !(p(cv) <= p(ct) && p(ct) <= p(sf)) {
            o.fail(format!(
                "n={n}: partition costs cv {} ct {} sf {}",
                p(cv),
                p(ct),
                p(sf)
            ));
        }
        let g = |t: &CostTable| t.grand_average(n).unwrap();
        if !(g(cv) <= g(ct) && g(ct) <= g(sf)) {
            o.fail(format!(
                "n={n}: grand averages cv {} ct {} sf {}",
                g(cv),
                g(ct),
                g(sf)
            ));
        }
    }
    o.note(format!("cv <= ct <= sf, exact, 2 <= n <= {N}"));
    for n in 4..=8 {
        let g = |s| enumerated_value(&enumerate_rank_totals(n, s).unwrap(), Query::Grand);
        let (c, y, s) = (g(CT), g(StrategyId::Yaroslavskiy), g(SF));
        let line = format!(
            "n={n}: ct {c} ({:.4}), yar {y} ({:.4}), sf {s} ({:.4})",
            c.to_f64(),
            y.to_f64(),
            s.to_f64()
        );
        if c <= y && y <= s {
            o.note(line);
        } else {
            o.fail(format!("{line}: ct <= yar <= sf violated"));
        }
    }
    o
}

fn criterion_8(tables: &BTreeMap<StrategyId, CostTable>) -> Outcome {
    let mut o = Outcome::new();
    let mut cells = 0usize;
    for (s, t) in tables {
        for n in 1..=t.n_max() {
            for j in 1..=n {
                cells += 1;
                if t.get(n, j).unwrap() != t.get(n, n - j + 1).unwrap() {
                    o.fail(format!("{s} n={n} j={j}: C(n,j) != C(n,n-j+1)"));
                }
            }
        }
    }
    o.note(format!("symmetry over {cells} exact cells"));
    for s in [SF, CT, CV] {
        for n in 2..=7 {
            let r = randomness_preservation_check(n, s).unwrap();
            if !r.uniform() {
                o.fail(format!("{s} n={n}: sublist orders not uniform"));
            }
        }
    }
    o.note("randomness preservation uniform for sf, ct, cv, 2 <= n <= 7".into());
    const ORDER: usize = 128;
    let l = l2(ORDER);
    if l != l2_by_coefficients(ORDER) {
        o.fail("L2 integral definition != coefficient law".into());
    }
    if l.reflect() != -l.clone() + &log_one_plus(ORDER) * &log_one_minus(ORDER) {
        o.fail("L2(-z) != -L2(z) + log(1+z) log(1-z)".into());
    }
    o.note(format!(
        "L2 coefficient law and reflection to order {ORDER}"
    ));
    let mut checked = 0;
    for (k, s) in [SF, CT, CV, StrategyId::LargerFirst]
        .into_iter()
        .enumerate()
    {
        let t = &tables[&s];
        for n in [5, 12, 30] {
            for q in [Query::Grand, Query::Rank(1), Query::Rank(n / 2)] {
                let exact = match q {
                    Query::Grand => t.grand_average(n).unwrap(),
                    Query::Rank(j) => t.get(n, j).unwrap().clone(),
                };
                let seed = 1000 + 100 * k as u64 + n as u64;
                let est = monte_carlo(n, q, s, 20_000, seed).unwrap();
                checked += 1;
                if !est.within_sigma(&exact, 4.0) {
                    o.fail(format!("{s} n={n} {q}: estimate {est:?} vs exact {exact}"));
                }
            }
        }
    }
    o.note(format!(
        "Monte Carlo within 4 standard errors at {checked} cells (20000 trials, fixed seeds)"
    ));
    o
}

type Criterion<'a> = (usize, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let start = Instant::now();
    let tables: BTreeMap<StrategyId, CostTable> = [SF, StrategyId::LargerFirst, CT, CV]
        .into_iter()
        .map(|s| (s, CostTable::build(s, 200).unwrap()))
        .collect();
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "ground-truth triangle: enumeration = recurrence = stated series",
            Box::new(criterion_1),
        ),
        (2, "partition-cost identities", Box::new(criterion_2)),
        (
            3,
            "series derivation reproduces the stated generating functions",
            Box::new(criterion_3),
        ),
        (
            4,
            "exact closed forms vs recurrence, with registered discrepancies",
            Box::new(criterion_4),
        ),
        (
            5,
            "baseline engines vs their closed forms",
            Box::new(criterion_5),
        ),
        (
            6,
            "asymptotic residuals against stated expansions",
            Box::new(criterion_6),
        ),
        (7, "ordering properties", Box::new(|| criterion_7(&tables))),
        (
            8,
            "structural properties",
            Box::new(|| criterion_8(&tables)),
        ),
    ];
    let mut failed = Vec::new();
    for (id, title, run) in &criteria {
        let t = Instant::now();
        let o = run();
        println!(
            "{} criterion {id}: {title} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        for d in &o.details {
            println!("    {d}");
        }
        if !o.pass {
            failed.push(*id);
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s{}",
        criteria.len() - failed.len(),
        criteria.len(),
        start.elapsed().as_secs_f64(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failed: {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
