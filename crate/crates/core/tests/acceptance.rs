//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use cuspfill::cusped::{build_cusped_space, estimate_delta, CuspedSpace, DeltaMode, PeripheralStructure, Region};
use cuspfill::diagnostics::KernelClosure;
use cuspfill::experiments::{self, run_pipeline, PipelineConfig};
use cuspfill::filling::{bounded_quotient_height, FillingSpec, FreeProductGroup, QuotientPresentation};
use cuspfill::horoball::{ceil_log2, BaseGraph, TruncatedHoroball};
use cuspfill::peripheral::{
    height, induced_filling_kernels, induced_peripheral_structure, malnormal_core, verify_height_certificate,
    HFillingContext, HeightCertificate,
};
use cuspfill::{Exactness, SubgroupGraph, Word};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn w(s: &str) -> Word {
    s.parse().expect("word")
}

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|s| w(s)).collect()
}

fn example_h() -> SubgroupGraph {
    SubgroupGraph::from_generators(2, &words(&["aa", "baaaB"]))
}

fn example_config(extra: &str) -> PipelineConfig {
    PipelineConfig::parse(&format!("rank = 2\nsubgroup = aa, baaaB\nseparate = b\n{extra}")).expect("config")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn golden_example() -> Outcome {
    let start = Instant::now();
    let h = example_h();
    let r = height(&h, 6);
    let core = malnormal_core(&h, 6).map_err(|e| e.to_string())?;
    let induced = induced_peripheral_structure(&h, &core, 6).map_err(|e| e.to_string())?;
    let t = within(Duration::from_secs(10), start)?;

    ensure(r.k == 5, || format!("height {} != 5", r.k))?;
    ensure(r.certificate.witness == w("aaaaaa"), || format!("witness {}", r.certificate.witness))?;
    ensure(verify_height_certificate(&r.certificate).ok, || "certificate rejected".into())?;
    let canon = |gs: &[Word]| {
        let mut v: Vec<Word> = gs.iter().map(|g| h.coset_representative(g)).collect();
        v.sort();
        v
    };
    let expected = words(&["1", "a", "B", "aB", "aaB"]);
    ensure(canon(&r.certificate.conjugators) == canon(&expected), || {
        format!("conjugator cosets {:?}", r.certificate.conjugators)
    })?;
    let core_gens: Vec<Vec<Word>> = core.entries.iter().map(|e| e.generators.clone()).collect();
    ensure(core_gens == vec![words(&["aa"]), words(&["baaaB"])], || format!("core {core_gens:?}"))?;
    ensure(induced.peripherals == vec![words(&["a"])], || format!("induced {:?}", induced.peripherals))?;

    let literal = HeightCertificate {
        rank: 2,
        subgroup: words(&["aa", "baaaB"]),
        conjugators: words(&["1", "a", "b", "aB", "aaB"]),
        witness: w("aaaaaa"),
        k: 5,
    };
    let literal_ok = verify_height_certificate(&literal).ok;
    ensure(!literal_ok, || "conjugator set with b unexpectedly verifies".into())?;
    Ok(format!(
        "k=5, conjugators {:?}, core ⟨aa⟩ ⟨baaaB⟩, induced ⟨a⟩ in {t:.2?}; set with b in place of B is rejected",
        r.certificate.conjugators.iter().map(Word::to_string).collect::<Vec<_>>()
    ))
}

/// Elements of ⟨gens⟩ of length ≤ `radius`, reached by multiplying by
/// generators without leaving the ball of radius `slack`.
fn brute_force_members(gens: &[Word], radius: usize, slack: usize) -> HashSet<Word> {
    let steps: Vec<Word> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut seen = HashSet::from([Word::identity()]);
    let mut frontier = vec![Word::identity()];
    while let Some(x) = frontier.pop() {
        for s in &steps {
            let y = x.mul(s);
            if y.len() <= slack && seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen.retain(|x| x.len() <= radius);
    seen
}

fn stallings_oracle() -> Outcome {
    let short: Vec<Word> = Word::ball(2, 3).into_iter().filter(|x| !x.is_identity()).collect();
    let tests = Word::ball(2, 8);
    let mut sets: Vec<Vec<Word>> = short.iter().map(|g| vec![g.clone()]).collect();
    for (i, u) in short.iter().enumerate() {
        for v in &short[i + 1..] {
            sets.push(vec![u.clone(), v.clone()]);
        }
    }
    let mismatches: Vec<String> = sets
        .par_iter()
        .flat_map_iter(|gens| {
            let graph = SubgroupGraph::from_generators(2, gens);
            let members = brute_force_members(gens, 8, 12);
            tests
                .iter()
                .filter(|t| graph.contains(t) != members.contains(*t))
                .map(|t| format!("{gens:?} ∋? {t}"))
                .collect::<Vec<_>>()
        })
        .collect();
    ensure(mismatches.is_empty(), || {
        format!("{} mismatches, first {:?}", mismatches.len(), mismatches.first())
    })?;
    Ok(format!("{} subgroups × {} words, 0 mismatches", sets.len(), tests.len()))
}

fn horoball_suite() -> Outcome {
    let start = Instant::now();
    let x = TruncatedHoroball::build(BaseGraph::path(16).map_err(|e| e.to_string())?, 6).map_err(|e| e.to_string())?;
    let n = x.vertex_count();
    let table: Vec<Vec<u32>> = (0..n)
        .map(|i| x.distances_from(x.vertex(i)).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut violations = 0usize;
    for i in 0..n {
        for j in 0..n {
            violations += usize::from(table[i][j] != table[j][i]);
            for k in 0..n {
                violations += usize::from(table[i][k] > table[i][j] + table[j][k]);
            }
        }
    }
    ensure(violations == 0, || format!("{violations} metric violations on P16"))?;

    let mut log_checked = 0usize;
    for (len, depth) in [(16, 6), (64, 8)] {
        let base = BaseGraph::path(len).map_err(|e| e.to_string())?;
        let y = TruncatedHoroball::build(base, depth).map_err(|e| e.to_string())?;
        for v in 0..len {
            let d = y.distances_from((v, 0)).map_err(|e| e.to_string())?;
            for u in 0..len {
                let bound = if u == v { 0 } else { 2 * ceil_log2(u.abs_diff(v)) + 3 };
                let got = d[y.index((u, 0)).map_err(|e| e.to_string())?] as usize;
                ensure(got <= bound, || format!("P{len}: d(({v},0),({u},0)) = {got} > {bound}"))?;
                log_checked += 1;
            }
        }
    }

    let mut geodesics = 0usize;
    for len in 1..=64usize {
        let base = BaseGraph::path(len).map_err(|e| e.to_string())?;
        let depth = base.default_depth();
        let y = TruncatedHoroball::build(base, depth).map_err(|e| e.to_string())?;
        for v in 0..len {
            for u in 0..len {
                let r = y.regular_geodesic((v, 0), (u, 0)).map_err(|e| e.to_string())?;
                ensure(r.path.len() - 1 == r.bfs_distance && r.gap.is_none(), || {
                    format!("P{len}: regular geodesic {v}→{u} has length {} vs {}", r.path.len() - 1, r.bfs_distance)
                })?;
                geodesics += 1;
            }
        }
    }
    let t = within(Duration::from_secs(60), start)?;
    Ok(format!(
        "{n} vertices exhaustive metric, {log_checked} log-bound pairs, {geodesics} regular geodesics, 0 violations in {t:.2?}"
    ))
}

fn delta_stability() -> Outcome {
    let rank1 = PeripheralStructure::new(1, vec![words(&["a"])]).map_err(|e| e.to_string())?;
    let mut line = Vec::new();
    let mut free = Vec::new();
    for r in [8, 10] {
        let x = build_cusped_space(1, &rank1, Region::ball(r), 5).map_err(|e| e.to_string())?;
        let e = estimate_delta(&x, DeltaMode::Exhaustive).map_err(|e| e.to_string())?;
        line.push(format!("R={r}: 2δ={} trusted {:?}", e.twice_delta, e.twice_delta_trusted));
        free.push(e.twice_delta_trusted);
    }
    ensure(free[0].is_some() && free[0] == free[1], || format!("F(a) differs: {line:?}"))?;

    let rank2 = PeripheralStructure::new(2, vec![words(&["a"])]).map_err(|e| e.to_string())?;
    let (radius, depth) = (2, 4);
    let mut quotient = Vec::new();
    for n in [6, 12, 18] {
        let fp = FreeProductGroup::cyclic(2, 0, n);
        let x = CuspedSpace::build(&fp, &rank2, Region::ball(radius), depth).map_err(|e| e.to_string())?;
        let e = estimate_delta(&x, DeltaMode::Exhaustive).map_err(|e| e.to_string())?;
        line.push(format!("n={n}: 2δ={} trusted {:?}", e.twice_delta, e.twice_delta_trusted));
        quotient.push((e.twice_delta, e.twice_delta_trusted));
    }
    ensure(quotient[0].1.is_some() && quotient.iter().all(|q| *q == quotient[0]), || {
        format!("quotients differ: {line:?}")
    })?;
    Ok(format!("R,D = {radius},{depth} for quotients; {}", line.join("; ")))
}

fn filling_injectivity() -> Outcome {
    let structure = PeripheralStructure::new(2, vec![words(&["a"])]).map_err(|e| e.to_string())?;
    let balls: Vec<Vec<Word>> = (0..=5).map(|r| Word::ball(2, r)).collect();
    let mut cells = 0;
    for n in 1..=24u64 {
        let q = QuotientPresentation::build(2, &[w("a").pow(n as i64)]).map_err(|e| e.to_string())?;
        for (r, ball) in balls.iter().enumerate() {
            let got = q.ball_injectivity_check(ball).0;
            ensure(got == (n as usize > 2 * r), || format!("n={n}, R={r}: injective={got}"))?;
            cells += 1;
        }
        let kernel = SubgroupGraph::from_generators(2, &[w("a").pow(n as i64)]);
        ensure(q.peripheral_injectivity_check(&structure.peripherals[0], &kernel, 2 * n as usize), || {
            format!("peripheral injectivity fails at n={n}")
        })?;
    }
    Ok(format!("{cells} (n, R) cells match n > 2R; peripheral injectivity at bound 2n for n ≤ 24"))
}

fn h_filling_characterisation() -> Outcome {
    let h = example_h();
    let core = malnormal_core(&h, 6).map_err(|e| e.to_string())?;
    let induced = induced_peripheral_structure(&h, &core, 6).map_err(|e| e.to_string())?;
    let s = &induced.structure;
    let ctx = HFillingContext::new(&h, s, &core, 6);
    let mut passing = Vec::new();
    for n in 1..=36i64 {
        let spec = FillingSpec::cyclic_powers(s, n).map_err(|e| e.to_string())?;
        let ok = ctx.check(&spec, s).map_err(|e| e.to_string())?.ok;
        ensure(ok == (n % 6 == 0), || format!("n={n}: H-filling={ok}"))?;
        if ok {
            passing.push(n);
        }
    }
    Ok(format!("H-filling exactly at n ∈ {passing:?}"))
}

fn separation() -> Outcome {
    let mut parts = Vec::new();
    for k in 1..=3u64 {
        let start = Instant::now();
        let c = example_config(&format!("exponent = {}\nshortening_cases = 0", 6 * k));
        let r = run_pipeline(&c).map_err(|e| e.to_string())?;
        ensure(r.error.is_none(), || format!("k={k}: {:?}", r.error))?;
        let s = r.separation.as_ref().ok_or("no separation stage")?;
        ensure(s.separated && s.collisions.is_empty(), || format!("k={k}: {s:?}"))?;
        ensure(s.image_in_subgroup == Some(false) && s.exactness == Exactness::Exact, || {
            format!("k={k}: verdict not exact: {s:?}")
        })?;
        let t = within(Duration::from_secs(60), start)?;
        parts.push(format!("n={}: exact, 0 collisions among {} elements ({t:.2?})", 6 * k, s.elements_checked));
    }
    Ok(parts.join("; "))
}

fn shortening() -> Outcome {
    let c = example_config("exponent = 6\nshortening_cases = 24");
    let r = run_pipeline(&c).map_err(|e| e.to_string())?;
    ensure(r.error.is_none(), || format!("{:?}", r.error))?;
    let stage = r.shortening.as_ref().ok_or("no shortening stage")?;
    ensure(stage.cases.len() >= 20, || format!("only {} cases", stage.cases.len()))?;

    // Independent minimality check of each end point against the kernel closure.
    let h = example_h();
    let core = malnormal_core(&h, c.conjugator_bound).map_err(|e| e.to_string())?;
    let induced = induced_peripheral_structure(&h, &core, c.conjugator_bound).map_err(|e| e.to_string())?;
    let spec = FillingSpec::cyclic_powers(&induced.structure, 6).map_err(|e| e.to_string())?;
    let verdict = HFillingContext::new(&h, &induced.structure, &core, c.conjugator_bound)
        .check(&spec, &induced.structure)
        .map_err(|e| e.to_string())?;
    let kernels = induced_filling_kernels(&core, &induced, &spec, c.conjugator_bound).map_err(|e| e.to_string())?;
    let closure = KernelClosure::new(&h, &kernels, &verdict, 2).map_err(|e| e.to_string())?;
    let ks = closure.graph.elements_up_to(14);

    let mut steps = 0;
    for case in &stage.cases {
        ensure(case.strictly_decreasing, || format!("{} lengths {:?}", case.start, case.lengths))?;
        ensure(case.lengths.windows(2).all(|p| p[1] < p[0]), || format!("{} lengths {:?}", case.start, case.lengths))?;
        ensure(closure.contains(&case.start.mul(&case.end.inverse())), || {
            format!("{} and {} are not in one coset", case.start, case.end)
        })?;
        let x = build_cusped_space(2, &induced.structure, Region::around(vec![case.end.clone()], 3), 5)
            .map_err(|e| e.to_string())?;
        let d = x.distances_from(x.group_vertex(&Word::identity()).map_err(|e| e.to_string())?);
        let end = d[x.group_vertex(&case.end).map_err(|e| e.to_string())?];
        for k in &ks {
            if let Ok(v) = x.group_vertex(&k.mul(&case.end)) {
                ensure(d[v] >= end, || format!("{}: {}·{} is shorter", case.start, k, case.end))?;
            }
        }
        steps += case.steps.len();
    }
    Ok(format!(
        "{} cases, {steps} shortening steps, every run strictly decreasing to a coset-minimal end",
        stage.cases.len()
    ))
}

fn height_decrease() -> Outcome {
    let fp = FreeProductGroup::cyclic(2, 0, 6);
    let s = bounded_quotient_height(&fp, &words(&["aa", "baaaB"]), 5, 4).map_err(|e| e.to_string())?;
    ensure(!s.found, || format!("found a chain {:?}", s.longest_chain))?;
    ensure(s.exactness == Exactness::Bounded(4), || format!("tagged {:?}", s.exactness))?;
    // positive control: b normalises ⟨bb⟩, so H and bH give two conjugates
    let control = bounded_quotient_height(&fp, &words(&["bb"]), 2, 4).map_err(|e| e.to_string())?;
    ensure(control.found, || "control ⟨bb⟩ should reach 2 conjugates".into())?;
    Ok(format!(
        "no 5 conjugates (longest chain {}, {} candidate cosets); bounded(4); control ⟨bb⟩ reaches 2",
        s.longest_chain.len(),
        s.candidates
    ))
}

fn suite_outputs() -> Result<Vec<String>, String> {
    let c = example_config("shortening_cases = 4");
    let report = run_pipeline(&c).map_err(|e| e.to_string())?.to_json();
    let sweep = experiments::sweep(&c, &[2, 4, 6, 8, 10, 12], &[2, 3]).map_err(|e| e.to_string())?;
    let mut delta_cfg = example_config("radius = 2\ndepth = 3\nexponent = 6\ndelta_mode = sample\ndelta_samples = 2000");
    delta_cfg.peripherals = vec![words(&["a"])];
    let delta = serde_json::to_string(&experiments::delta_run(&delta_cfg, 11).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let cert = serde_json::to_string(&height(&example_h(), 6).certificate).map_err(|e| e.to_string())?;
    Ok(vec![report, experiments::to_csv(&sweep), delta, cert])
}

fn determinism() -> Outcome {
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| e.to_string());
    let one = pool(1)?.install(suite_outputs)?;
    let again = pool(1)?.install(suite_outputs)?;
    let four = pool(4)?.install(suite_outputs)?;
    ensure(one == again, || "two runs differ".into())?;
    ensure(one == four, || "1 and 4 threads differ".into())?;
    let bytes: usize = one.iter().map(String::len).sum();
    Ok(format!("report, sweep, delta and certificate identical over 2 runs and 1/4 threads ({bytes} bytes)"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden example", golden_example),
        ("stallings oracle", stallings_oracle),
        ("horoball metric", horoball_suite),
        ("delta stability", delta_stability),
        ("filling injectivity", filling_injectivity),
        ("h-filling characterisation", h_filling_characterisation),
        ("separation", separation),
        ("shortening", shortening),
        ("height decrease", height_decrease),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2} {name}: {detail} [{:.2?}]", i + 1, start.elapsed());
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
