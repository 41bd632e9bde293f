//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use cclab::builder::{build_protocol, leaf_budget, rank_step_budget, shrink_step_budget, theorem_report, BuildOptions, Strategy};
use cclab::entropy::{chain_rule_terms, extract_rectangle};
use cclab::matrix::{make_family, random_matrix, rank, xor_power, BoolFun, Family};
use cclab::protocol::{balance, depth_bound, exact_cc, random_tree, verify, TreeShape};
use cclab::rect::{check_monochromatic, cover_number, enumerate_maximal_mono, CoverMode};
use cclab::rng::SplitMix64;
use cclab::SearchLimits;

type Outcome = Result<String, String>;

fn all_matrices(rows: usize, cols: usize) -> Vec<BoolFun> {
    let cells = rows * cols;
    (0..1u32 << cells)
        .map(|code| BoolFun::from_bits(rows, cols, (0..cells).map(|i| (code >> i & 1) as u8).collect()).unwrap())
        .collect()
}

fn samples_3x3() -> Vec<BoolFun> {
    (0..500).map(|s| random_matrix(3, 3, 30_000 + s).unwrap()).collect()
}

/// Every 2×2 and 3×3 matrix plus 100 seeded random 4×4 to 8×8 ones.
fn builder_corpus() -> Vec<BoolFun> {
    let mut corpus = all_matrices(2, 2);
    corpus.extend(all_matrices(3, 3));
    corpus.extend((0..100u64).map(|s| {
        let side = 4 + (s % 5) as usize;
        random_matrix(side, side, 5000 + s).unwrap()
    }));
    corpus
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Extraction from every maximal rectangle of small lifts.
fn extraction(chain: &mut Vec<(f64, f64)>) -> Outcome {
    let mut funs = all_matrices(2, 2);
    funs.extend(all_matrices(2, 3));
    funs.extend(samples_3x3());
    let mut checked = 0usize;
    for f in &funs {
        for n in 1..=2 {
            let lift = xor_power(f, n).map_err(|e| e.to_string())?;
            let maximal = enumerate_maximal_mono(&lift.lifted, 1_000_000).map_err(|e| e.to_string())?;
            if maximal.truncated {
                return Err(format!("maximal rectangles truncated for {:?}", f.bits()));
            }
            for r in &maximal.rects {
                let ext = extract_rectangle(&lift, r).map_err(|e| format!("{:?} n={n}: {e}", f.bits()))?;
                if check_monochromatic(f, &ext.t).map_err(|e| e.to_string())?.is_none() {
                    return Err(format!("{:?} n={n}: extracted rectangle is not monochromatic", f.bits()));
                }
                let lhs = BigUint::from(4 * ext.t.area()).pow(n as u32);
                if lhs < BigUint::from(r.area()) {
                    return Err(format!("{:?} n={n}: (4·{})^{n} < {}", f.bits(), ext.t.area(), r.area()));
                }
                let terms = chain_rule_terms(&lift, r).map_err(|e| e.to_string())?;
                chain.push((terms.iter().sum(), (r.area() as f64).log2()));
                checked += 1;
            }
        }
    }
    Ok(format!("{} functions, {checked} lift rectangles", funs.len()))
}

fn chain_identity(chain: &[(f64, f64)]) -> Outcome {
    let worst = chain.iter().map(|(s, l)| (s - l).abs()).fold(0.0f64, f64::max);
    if chain.is_empty() {
        return Err("no rectangles collected".into());
    }
    if worst > 1e-9 {
        return Err(format!("max deviation {worst:e}"));
    }
    Ok(format!("{} rectangles, max deviation {worst:.1e}", chain.len()))
}

struct Exact {
    rank: usize,
    d: Option<usize>,
    c: Option<usize>,
}

fn builder(corpus: &[BoolFun], exact: &mut Vec<Exact>) -> Outcome {
    let exact_limits = SearchLimits::default();
    let lift_limits = SearchLimits::parse("node=20000,ms=600000,rects=20000").unwrap();
    let (mut builds, mut exact_audits) = (0, 0);
    for f in corpus {
        let rk = rank(f);
        let c1 = cover_number(f, CoverMode::Exact, &exact_limits).map_err(|e| e.to_string())?;
        let d = exact_cc(f, &exact_limits).map_err(|e| e.to_string())?;
        exact.push(Exact { rank: rk, d: d.exact(), c: c1.value() });
        let mut runs = vec![(1, Strategy::Direct, c1.value().map(|c| c as u64), c1.value().is_some())];
        let lift = xor_power(f, 2).map_err(|e| e.to_string())?;
        let c2 = cover_number(&lift.lifted, CoverMode::Exact, &lift_limits).map_err(|e| e.to_string())?;
        let c2_hi = Some(c2.bounds().1 as u64);
        runs.push((2, Strategy::Direct, c2_hi, c2.value().is_some()));
        if f.rows() <= 6 {
            runs.push((2, Strategy::Lift, c2_hi, c2.value().is_some()));
        }
        for (n, strategy, cover_value, is_exact) in runs {
            let (tree, trace) = build_protocol(f, n, BuildOptions { strategy, cover_value })
                .map_err(|e| format!("{:?} n={n}: {e}", f.bits()))?;
            if !verify(&tree, f) {
                return Err(format!("{:?} n={n} {strategy:?}: protocol disagrees with f", f.bits()));
            }
            if trace.rank_steps > rank_step_budget(rk) {
                return Err(format!("{:?}: rank steps {} > {}", f.bits(), trace.rank_steps, rank_step_budget(rk)));
            }
            if let Some(c) = cover_value {
                if trace.shrink_steps as u64 > shrink_step_budget(rk, c, n) {
                    return Err(format!("{:?}: shrink steps {} over budget", f.bits(), trace.shrink_steps));
                }
                if BigUint::from(tree.leaf_count()) > leaf_budget(rk, c, n) {
                    return Err(format!("{:?}: {} leaves over budget", f.bits(), tree.leaf_count()));
                }
            }
            trace.audit(tree.leaf_count()).map_err(|e| format!("{:?} n={n}: {e}", f.bits()))?;
            let b = balance(&tree);
            if !verify(&b, f) || b.depth() > depth_bound(tree.leaf_count()) {
                return Err(format!("{:?} n={n}: balanced protocol fails", f.bits()));
            }
            builds += 1;
            if is_exact {
                exact_audits += 1;
            }
        }
    }
    Ok(format!(
        "{} functions, {builds} builds, {exact_audits} audited against an exact cover number, the rest against its upper bound",
        corpus.len()
    ))
}

fn balancing() -> Outcome {
    if depth_bound(9) != 11 {
        return Err(format!("bound for 9 leaves is {}", depth_bound(9)));
    }
    let mut rng = SplitMix64::new(2024);
    let mut max_leaves = 0;
    for k in 0..200u64 {
        let leaves = 1 + rng.below(64) as usize;
        let rows = 4 + rng.below(5) as usize;
        let cols = 4 + rng.below(5) as usize;
        let shape = if k % 2 == 0 { TreeShape::Caterpillar } else { TreeShape::Uniform };
        let t = random_tree(rows, cols, leaves, shape, 77_000 + k);
        let b = balance(&t);
        if b.depth() > depth_bound(leaves) {
            return Err(format!("tree {k}: {leaves} leaves balanced to depth {}", b.depth()));
        }
        for x in 0..rows {
            for y in 0..cols {
                if b.output(x, y).unwrap() != t.output(x, y).unwrap() {
                    return Err(format!("tree {k}: outputs differ at ({x}, {y})"));
                }
            }
        }
        max_leaves = max_leaves.max(leaves);
    }
    Ok(format!("200 trees up to {max_leaves} leaves; 9 leaves -> bound 11"))
}

fn anchors() -> Outcome {
    let lim = SearchLimits::default();
    let xor2 = make_family(Family::Xor, 2, None, None).unwrap();
    let d = exact_cc(&xor2, &lim).unwrap().exact();
    if d != Some(2) {
        return Err(format!("D(XOR_2) = {d:?}"));
    }
    for n in 1..=2 {
        let lifted = xor_power(&xor2, n).unwrap().lifted;
        let d = exact_cc(&lifted, &lim).unwrap().exact();
        if d != Some(2) {
            return Err(format!("D(XOR_2 lifted {n} times) = {d:?}"));
        }
        let rep = theorem_report(&xor2, n, &lim).unwrap();
        if !rep.degenerate {
            return Err(format!("report for n={n} not flagged degenerate"));
        }
    }
    if rank(&xor2) != 1 {
        return Err(format!("rank(XOR_2) = {}", rank(&xor2)));
    }
    Ok("D = 2 for XOR_2 and its lifts n = 1, 2; rank 1; degenerate flag set".into())
}

fn cross_oracle(corpus: &[BoolFun], exact: &[Exact]) -> Outcome {
    let lim = SearchLimits::default();
    let mut compared = 0;
    for (f, e) in corpus.iter().zip(exact) {
        if let (Some(d), Some(c)) = (e.d, e.c) {
            if d < ceil_log2(c) {
                return Err(format!("{:?}: D = {d} < log2 C, C = {c}", f.bits()));
            }
            if ceil_log2(c) < ceil_log2(e.rank) {
                return Err(format!("{:?}: ⌈log2 C⌉ < ⌈log2 rank⌉ with C = {c}, rank = {}", f.bits(), e.rank));
            }
            compared += 1;
        }
    }
    let mut lifts = 0;
    for f in corpus {
        for n in 2..=3 {
            if f.rows().pow(n as u32) > 64 {
                continue;
            }
            let lifted = xor_power(f, n).unwrap().lifted;
            if rank(&lifted) != rank(f).pow(n as u32) {
                return Err(format!("{:?}: rank of lift {n} is {}", f.bits(), rank(&lifted)));
            }
            lifts += 1;
        }
    }
    let mut rng = SplitMix64::new(606);
    let mut restrictions = 0;
    for (k, (f, e)) in corpus.iter().zip(exact).enumerate() {
        let Some(c) = e.c else { continue };
        if k % 4 != 0 {
            continue;
        }
        let pick = |n: usize, rng: &mut SplitMix64| {
            let mut s: Vec<usize> = (0..n).filter(|_| rng.below(2) == 1).collect();
            if s.is_empty() {
                s.push(rng.below(n as u64) as usize);
            }
            s
        };
        let rows = pick(f.rows(), &mut rng);
        let cols = pick(f.cols(), &mut rng);
        let sub = f.restrict(&rows, &cols).unwrap().fun;
        let cs = cover_number(&sub, CoverMode::Exact, &lim).unwrap();
        let Some(cs) = cs.value() else { continue };
        if cs > c {
            return Err(format!("{:?}: restriction to {rows:?}x{cols:?} has cover {cs} > {c}", f.bits()));
        }
        if let (Some(d), Some(ds)) = (e.d, exact_cc(&sub, &lim).unwrap().exact()) {
            if ds > d {
                return Err(format!("{:?}: restriction raises D from {d} to {ds}", f.bits()));
            }
        }
        restrictions += 1;
    }
    Ok(format!("{compared} exact chains, {lifts} lift ranks, {restrictions} restrictions"))
}

fn run_pipeline(steps: &[Vec<&str>], dir: &Path) -> Result<String, String> {
    let mut h = Sha256::new();
    for args in steps {
        let o = Command::new(env!("CARGO_BIN_EXE_cclab"))
            .args(args)
            .current_dir(dir)
            .env_remove("CCLAB_LIMITS")
            .output()
            .map_err(|e| e.to_string())?;
        let code = o.status.code().unwrap_or(-1);
        if code == 1 {
            return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
        h.update(code.to_le_bytes());
        h.update(&o.stdout);
        h.update(&o.stderr);
    }
    let mut files: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for p in files {
        h.update(p.file_name().unwrap().to_string_lossy().as_bytes());
        h.update(std::fs::read(&p).unwrap());
    }
    Ok(format!("{:x}", h.finalize()))
}

fn pipelines() -> Vec<Vec<Vec<&'static str>>> {
    const LIM: &str = "node=50000,ms=3600000,rects=20000";
    let family = |fam: &'static str, m: &'static str, seed: &'static str| {
        vec![
            vec!["gen", "--family", fam, "--m", m, "--seed", seed, "--out", "f.bfn"],
            vec!["measure", "--in", "f.bfn", "--format", "json", "--limits", LIM],
            vec!["build", "--in", "f.bfn", "--n", "2", "--out", "p.json", "--trace", "t.json"],
            vec!["balance", "--proto", "p.json", "--out", "b.json"],
            vec!["verify", "--proto", "b.json", "--in", "f.bfn"],
        ]
    };
    let mut all = vec![
        family("xor", "2", "0"),
        family("xor", "4", "0"),
        family("eq", "4", "0"),
        family("and", "4", "0"),
        family("gt", "5", "0"),
        family("ip", "8", "0"),
        family("random", "6", "7"),
        family("random", "7", "11"),
        family("random", "8", "3"),
    ];
    all.push(vec![
        vec!["gen", "--family", "const", "--m", "3", "--value", "1", "--out", "f.bfn"],
        vec!["build", "--in", "f.bfn", "--out", "p.json"],
        vec!["verify", "--proto", "p.json", "--in", "f.bfn"],
    ]);
    all.push(vec![
        vec!["gen", "--family", "eq", "--m", "2", "--out", "f.bfn"],
        vec!["lift", "--in", "f.bfn", "--n", "2", "--out", "l.bfn"],
        vec!["measure", "--in", "l.bfn", "--format", "csv", "--limits", LIM],
    ]);
    all.push(vec![vec!["extract", "--family", "eq", "--m", "2", "--n", "2", "--format", "json"]]);
    all.push(vec![vec!["extract", "--family", "random", "--m", "3", "--seed", "5", "--n", "2"]]);
    all.push(vec![vec!["report", "--family", "eq", "--m", "2,3,4", "--n", "2", "--format", "csv", "--limits", LIM]]);
    all.push(vec![vec!["report", "--family", "xor", "--m", "2", "--n", "1,2", "--format", "json", "--limits", LIM]]);
    all.push(vec![vec!["report", "--family", "random", "--m", "4,5", "--seed", "9", "--n", "1", "--limits", LIM]]);
    all.push(vec![
        vec!["gen", "--family", "random", "--m", "6", "--seed", "21", "--out", "f.bfn"],
        vec!["build", "--in", "f.bfn", "--n", "2", "--strategy", "lift", "--out", "p.json"],
        vec!["verify", "--proto", "p.json", "--in", "f.bfn"],
    ]);
    all.push(vec![vec!["measure", "--family", "random", "--m", "8", "--seed", "1", "--mode", "greedy", "--format", "text"]]);
    all.push(vec![vec!["measure", "--family", "ip", "--m", "8", "--limits", "node=2000,ms=3600000,rects=20000"]]);
    all.push(vec![vec!["gen", "--family", "random", "--m", "16", "--seed", "123"]]);
    all
}

fn determinism() -> Outcome {
    let all = pipelines();
    for (k, steps) in all.iter().enumerate() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ha = run_pipeline(steps, a.path())?;
        let hb = run_pipeline(steps, b.path())?;
        if ha != hb {
            return Err(format!("pipeline {k} {:?} differs between runs", steps[0]));
        }
    }
    Ok(format!("{} pipelines hashed twice, all identical", all.len()))
}

fn report(k: usize, name: &str, start: Instant, outcome: &Outcome) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => println!("PASS [{k}] {name}: {detail} ({secs:.1}s)"),
        Err(detail) => println!("FAIL [{k}] {name}: {detail} ({secs:.1}s)"),
    }
    outcome.is_ok()
}

fn main() {
    let mut ok = true;
    let mut chain = Vec::new();

    let t = Instant::now();
    let r = extraction(&mut chain);
    ok &= report(1, "extraction from maximal lift rectangles", t, &r);

    let t = Instant::now();
    ok &= report(2, "entropy chain rule sums to log2|R|", t, &chain_identity(&chain));

    let corpus = builder_corpus();
    let mut exact = Vec::new();
    let t = Instant::now();
    ok &= report(3, "rank-splitting builder correctness and budgets", t, &builder(&corpus, &mut exact));

    let t = Instant::now();
    ok &= report(4, "balancing depth and equivalence", t, &balancing());

    let t = Instant::now();
    ok &= report(5, "anchor values for XOR_2", t, &anchors());

    let t = Instant::now();
    let r = if exact.len() == corpus.len() {
        cross_oracle(&corpus, &exact)
    } else {
        Err("builder corpus did not complete".into())
    };
    ok &= report(6, "cross-oracle consistency", t, &r);

    let t = Instant::now();
    ok &= report(7, "byte-identical CLI reruns", t, &determinism());

    if !ok {
        std::process::exit(1);
    }
}
