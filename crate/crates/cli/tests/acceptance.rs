//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zfree_core::pipeline::{instance_from_matrix, perturb_cell, random_anti_ultrametric};
use zfree_core::{
    brute_force_min, certify_completability, check_anti_ultrametric, check_exchange_axiom, check_jwp,
    check_mnatural_quadratic, check_local_exchange, check_zfree, complete, completable_oracle, generate_instance,
    greedy_min_layer, minimize_zfree_with, ArcKind, BitVec, ExtValue, Extended, GenConfig, Instance,
    OracleBudget, PartialMatrix, QuadFn, SignedQuadFn, SolveOptions, Status, Validation, ValueTable,
};

const AC1_GENERATED: u64 = 500;
const AC1_PERTURBED: u64 = 100;
const AC1_TIME_LIMIT: Duration = Duration::from_secs(60);
const AC2_INSTANCES: u64 = 1200;
const AC3_RANDOM: u64 = 10_000;
const AC4_QUADRATICS: u64 = 1000;
const AC5_QUADRATICS: u64 = 1000;
const AC8_SIZES: [usize; 4] = [250, 500, 1000, 2000];
const AC8_REPEATS: usize = 3;
const AC8_SLOPE_LIMIT: f64 = 3.0;

type Verdict = Result<String, String>;

fn v(x: u64) -> ExtValue {
    ExtValue::from_integer(x)
}

fn inf() -> ExtValue {
    ExtValue::infinity()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick(g: &mut impl Rng, palette: &[ExtValue]) -> ExtValue {
    palette[g.random_range(0..palette.len())].clone()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Per-iteration checks on the intersection step of one solve.
#[derive(Default)]
struct SspAudit {
    solves: usize,
    iterations: usize,
    failures: Vec<String>,
}

impl SspAudit {
    fn solve(&mut self, inst: &Instance, validation: Validation) -> zfree_core::SolveReport {
        let r = inst.vars();
        let n = inst.space().len();
        let mut local = Vec::new();
        let report = minimize_zfree_with(inst, &SolveOptions { validation }, &mut |t| {
            if t.min_reduced_length().is_some_and(|m| m.is_negative()) {
                local.push(format!("iteration {}: negative reduced length", t.iteration));
            }
            if t.l1_before != t.l1_after + 2 {
                local.push(format!("iteration {}: distance {} -> {}", t.iteration, t.l1_before, t.l1_after));
            }
            let g = t.graph;
            let counts = [g.count(ArcKind::X), g.count(ArcKind::Y), g.count(ArcKind::Source), g.count(ArcKind::Sink)];
            if counts[0] > r * (n - r) || counts[1] > n || counts[2] > r || counts[3] > r {
                local.push(format!("iteration {}: arc counts {counts:?} exceed bounds", t.iteration));
            }
        })
        .expect("solver error");
        if report.iterations > r {
            local.push(format!("{} iterations for r = {r}", report.iterations));
        }
        self.solves += 1;
        self.iterations += report.iterations;
        self.failures.extend(local);
        report
    }
}

fn gen_config(seed: u64) -> GenConfig {
    let mut g = rng(seed ^ 0x5eed);
    GenConfig {
        r: g.random_range(1..=5),
        dmax: g.random_range(1..=4),
        levels: g.random_range(1..=4),
        seed,
        infinite_top: g.random_bool(0.3),
        ..GenConfig::default()
    }
}

/// Validity-preserving edits: rational unary costs, a strictly monotone
/// relabeling of binary values, and single-cell edits kept only when the
/// instance stays JWP and Z-free.
fn hand_perturbed(seed: u64) -> Instance {
    let mut inst = generate_instance(&gen_config(seed + 10_000)).unwrap();
    let mut g = rng(seed);
    let d = inst.domains().to_vec();
    let r = d.len();
    for (i, &di) in d.iter().enumerate() {
        for a in 0..di {
            inst.set_unary(i, a, ExtValue::ratio(g.random_range(0..=20), g.random_range(1..=4)).unwrap()).unwrap();
        }
    }
    let (num, off) = (g.random_range(1..=5u64), ExtValue::ratio(g.random_range(0..=3), 2).unwrap());
    for i in 0..r {
        for j in i + 1..r {
            for a in 0..d[i] {
                for b in 0..d[j] {
                    let c = inst.binary(i, a, j, b);
                    let mapped: ExtValue = std::iter::repeat_n(c, num as usize).sum::<ExtValue>() + off.clone();
                    inst.set_binary_cell(i, a, j, b, mapped);
                }
            }
        }
    }
    for _ in 0..4 {
        let mut trial = inst.clone();
        if perturb_cell(&mut trial, &mut g) && check_jwp(&trial).is_ok() && check_zfree(&trial).is_ok() {
            inst = trial;
        }
    }
    inst
}

fn ac1_ac6() -> (Verdict, Verdict) {
    let started = Instant::now();
    let budget = OracleBudget::default();
    let mut audit = SspAudit::default();
    let mut mismatches = Vec::new();
    let mut invalid = 0;
    let mut infinite = 0;
    let instances = (0..AC1_GENERATED)
        .map(|s| generate_instance(&gen_config(s)).unwrap())
        .chain((0..AC1_PERTURBED).map(hand_perturbed));
    for (k, inst) in instances.enumerate() {
        if check_jwp(&inst).is_err() || check_zfree(&inst).is_err() {
            invalid += 1;
            continue;
        }
        let report = audit.solve(&inst, Validation::Exhaustive);
        let (_, best) = brute_force_min(&inst, &budget).unwrap();
        let achieved = report.assignment.as_ref().map(|x| inst.evaluate(x).unwrap());
        let ok = report.value == best
            && match report.status {
                Status::Optimal => achieved.as_ref() == Some(&best),
                Status::InfiniteMinimum => best.is_infinite(),
                _ => false,
            };
        if best.is_infinite() {
            infinite += 1;
        }
        if !ok {
            mismatches.push(format!("instance {k}: solve {} vs oracle {best}", report.value));
        }
    }
    let elapsed = started.elapsed();
    let ac1 = (|| {
        ensure(invalid == 0, || format!("{invalid} perturbed instances were not valid"))?;
        ensure(mismatches.is_empty(), || mismatches.join("; "))?;
        ensure(elapsed < AC1_TIME_LIMIT, || format!("took {elapsed:?}"))?;
        Ok(format!(
            "{} generated + {} perturbed instances, exact equality on all ({infinite} with infinite minimum), {:.1}s",
            AC1_GENERATED,
            AC1_PERTURBED,
            elapsed.as_secs_f64()
        ))
    })();
    let ac6 = if audit.failures.is_empty() {
        Ok(format!("{} solves, {} iterations, no invariant violated", audit.solves, audit.iterations))
    } else {
        Err(audit.failures.join("; "))
    };
    (ac1, ac6)
}

fn ac2() -> Verdict {
    let palette = [v(0), v(1), v(2), inf()];
    let budget = OracleBudget::default();
    let (mut yes, mut no) = (0, 0);
    for seed in 0..AC2_INSTANCES {
        let mut g = rng(seed);
        let r = g.random_range(2..=4);
        let domains: Vec<usize> = (0..r).map(|_| g.random_range(1..=3)).collect();
        let n: usize = domains.iter().sum();
        let unary = domains.iter().map(|&d| vec![v(0); d]).collect();
        // Thirds: valid by construction, valid with one cell overwritten, uniform tables.
        let inst = match seed % 3 {
            0 => {
                let mut levels: Vec<ExtValue> = palette.iter().filter(|_| g.random_bool(0.7)).cloned().collect();
                if levels.is_empty() {
                    levels.push(v(1));
                }
                instance_from_matrix(domains, &random_anti_ultrametric(n, &levels, &mut g), unary).unwrap()
            }
            1 => {
                let m = random_anti_ultrametric(n, &palette, &mut g);
                let mut inst = instance_from_matrix(domains.clone(), &m, unary).unwrap();
                let j = g.random_range(1..r);
                let (a, b) = (g.random_range(0..domains[0]), g.random_range(0..domains[j]));
                inst.set_binary_cell(0, a, j, b, pick(&mut g, &palette));
                inst
            }
            _ => {
                let mut inst = Instance::new(domains.clone(), unary).unwrap();
                for i in 0..r {
                    for j in i + 1..r {
                        let t = (0..domains[i]).map(|_| (0..domains[j]).map(|_| pick(&mut g, &palette)).collect());
                        inst.set_binary(i, j, t.collect()).unwrap();
                    }
                }
                inst
            }
        };
        let t = certify_completability(&inst, &budget).unwrap();
        if (t.jwp && t.zfree) != t.completable {
            return Err(format!("seed {seed}: jwp {} zfree {} completable {}", t.jwp, t.zfree, t.completable));
        }
        if t.completable {
            yes += 1;
        } else {
            no += 1;
        }
    }
    ensure(yes > 0 && no > 0, || format!("degenerate sample: {yes} yes, {no} no"))?;
    Ok(format!("{AC2_INSTANCES} instances ({yes} valid, {no} invalid), zero discrepancies"))
}

fn ac3() -> Verdict {
    let budget = OracleBudget::default();
    let agree = |h: &PartialMatrix| -> Result<bool, String> {
        let oracle = completable_oracle(h, &budget).unwrap().is_yes();
        match complete(h) {
            Ok(m) => {
                ensure(oracle, || format!("completed but oracle says no: {h:?}"))?;
                ensure(m.extends(h) && check_anti_ultrametric(&m).is_ok(), || format!("bad completion of {h:?}"))?;
                Ok(true)
            }
            Err(_) => {
                ensure(!oracle, || format!("failed but oracle says yes: {h:?}"))?;
                Ok(false)
            }
        }
    };
    let choices = [Some(v(1)), Some(v(2)), None];
    let mut exhaustive = 0;
    for n in 1..=4usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for code in 0..3usize.pow(pairs.len() as u32) {
            let mut c = code;
            let mut cells = vec![None; n * n];
            for &(i, j) in &pairs {
                cells[i * n + j] = choices[c % 3].clone();
                c /= 3;
            }
            agree(&PartialMatrix::from_fn(n, |i, j| cells[i.min(j) * n + i.max(j)].clone()))?;
            exhaustive += 1;
        }
    }
    let palette = [Some(v(1)), Some(v(2)), Some(inf()), None];
    let mut successes = 0;
    for seed in 0..AC3_RANDOM {
        let mut g = rng(seed);
        let n = g.random_range(2..=6);
        let mut cells = vec![None; n * n];
        for i in 0..n {
            for j in i + 1..n {
                cells[i * n + j] = palette[g.random_range(0..palette.len())].clone();
            }
        }
        if agree(&PartialMatrix::from_fn(n, |i, j| cells[i.min(j) * n + i.max(j)].clone()))? {
            successes += 1;
        }
    }
    Ok(format!(
        "{exhaustive} exhaustive (n <= 4) + {AC3_RANDOM} random (n <= 6, {successes} completable), all agree"
    ))
}

fn ac4() -> Verdict {
    let budget = OracleBudget::default();
    let palette = [v(0), v(1), v(2), inf()];
    let mut convex = 0;
    for seed in 0..AC4_QUADRATICS {
        let mut g = rng(seed);
        let n = g.random_range(1..=5);
        let linear = (0..n).map(|_| Extended::from_integer(g.random_range(0..=2))).collect();
        let mut f = SignedQuadFn::new(linear);
        if seed % 2 == 0 {
            let levels: Vec<ExtValue> = palette.iter().filter(|_| g.random_bool(0.7)).cloned().collect();
            let levels = if levels.is_empty() { vec![v(0)] } else { levels };
            let m = random_anti_ultrametric(n, &levels, &mut g);
            for i in 0..n {
                for j in i + 1..n {
                    f.set_quad(i, j, m.get(i, j).to_extended());
                }
            }
        } else {
            for i in 0..n {
                for j in i + 1..n {
                    f.set_quad(i, j, pick(&mut g, &palette).to_extended());
                }
            }
        }
        let coefficients = check_mnatural_quadratic(&f).unwrap().is_ok();
        let table = ValueTable::of_quadratic(&f, &budget).unwrap();
        let exchange = check_exchange_axiom(&table, &budget).unwrap().is_ok();
        let local = check_local_exchange(&table, &budget).unwrap().is_ok();
        ensure(coefficients == exchange && exchange == local, || {
            format!("seed {seed}: coefficients {coefficients}, exchange {exchange}, local {local}")
        })?;
        convex += usize::from(coefficients);
    }
    Ok(format!("{AC4_QUADRATICS} quadratics ({convex} M-natural-convex), three checks agree on all"))
}

fn ac5() -> Verdict {
    let mut layers = 0;
    for seed in 0..AC5_QUADRATICS {
        let mut g = rng(seed);
        let n = g.random_range(1..=10);
        let mut levels: Vec<ExtValue> = [v(0), v(1), v(2), v(3), inf()].into_iter().filter(|_| g.random_bool(0.6)).collect();
        if levels.is_empty() {
            levels.push(v(2));
        }
        let quad = random_anti_ultrametric(n, &levels, &mut g);
        let linear = (0..n).map(|_| v(g.random_range(0..=4))).collect();
        let f = QuadFn::new(linear, quad).unwrap();
        let mut best = vec![inf(); n + 1];
        for mask in 0..1u64 << n {
            let x = BitVec::from_bits((0..n).map(|i| mask >> i & 1 == 1).collect());
            let k = mask.count_ones() as usize;
            let val = f.eval(&x);
            if val < best[k] {
                best[k] = val;
            }
        }
        for (r, best) in best.iter().enumerate() {
            let greedy = greedy_min_layer(&f, r).map(|o| o.value).unwrap_or_else(|_| inf());
            ensure(&greedy == best, || format!("seed {seed}, r = {r}: greedy {greedy}, exhaustive {best}"))?;
            layers += 1;
        }
    }
    Ok(format!("{AC5_QUADRATICS} anti-ultrametric quadratics, {layers} layers, greedy optimal on all"))
}

fn cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_zfree")).args(args).output().expect("spawn zfree");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn dot_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn ac7() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut compared = 0;
    for seed in [1u64, 7, 42, 2024] {
        let gen_args = ["gen", "--r", "4", "--dmax", "3", "--levels", "3", "--seed"];
        let seed_s = seed.to_string();
        let mut args = gen_args.to_vec();
        args.push(&seed_s);
        let (a, _) = cli(&args);
        let (b, _) = cli(&args);
        ensure(a == b && !a.is_empty(), || format!("gen --seed {seed} differs between runs"))?;
        let file = tmp.path().join(format!("inst-{seed}.json"));
        fs::write(&file, &a).unwrap();
        let f = file.to_str().unwrap();
        for cmd in [
            vec!["solve", f],
            vec!["solve", f, "--json"],
            vec!["solve", f, "--validate", "completion"],
            vec!["check", f],
            vec!["certify", f],
            vec!["oracle-min", f, "--json"],
        ] {
            let first = cli(&cmd);
            let second = cli(&cmd);
            ensure(first == second, || format!("{cmd:?} differs between runs"))?;
            compared += 1;
        }
        let d1 = tmp.path().join(format!("dot-{seed}-a"));
        let d2 = tmp.path().join(format!("dot-{seed}-b"));
        let first = cli(&["solve", f, "--dump-aux", d1.to_str().unwrap()]);
        let second = cli(&["solve", f, "--dump-aux", d2.to_str().unwrap()]);
        ensure(first == second && dot_files(&d1) == dot_files(&d2), || format!("DOT dumps differ for seed {seed}"))?;
        compared += 1;
    }
    let matrix = tmp.path().join("matrix.json");
    fs::write(
        &matrix,
        r#"{"n": 4, "entries": [{"i": 1, "j": 2, "value": 1}, {"i": 2, "j": 3, "value": 2},
            {"i": 3, "j": 4, "value": 2}, {"i": 1, "j": 4, "value": 2}]}"#,
    )
    .unwrap();
    let m = matrix.to_str().unwrap();
    for cmd in [vec!["complete", m], vec!["complete", m, "--cycle"]] {
        let first = cli(&cmd);
        ensure(first.1 == 3, || format!("{cmd:?} exit code {}", first.1))?;
        ensure(first == cli(&cmd), || format!("{cmd:?} differs between runs"))?;
        compared += 1;
    }
    Ok(format!("{compared} command pairs byte-identical across runs"))
}

/// Least-squares slope of `ln t` against `ln n`.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, t)| (n.ln(), t.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn ac8(audit: &mut SspAudit) -> Verdict {
    let mut points = Vec::new();
    let mut detail = Vec::new();
    for &n in &AC8_SIZES {
        let r = ((n as f64).cbrt().round() as usize).max(1);
        let d = n / r;
        let cfg = GenConfig { r, domains: Some(vec![d; r]), levels: 4, seed: n as u64, ..GenConfig::default() };
        let inst = generate_instance(&cfg).unwrap();
        let mut times = Vec::new();
        for _ in 0..AC8_REPEATS {
            let started = Instant::now();
            let report = audit.solve(&inst, Validation::ByCompletion);
            times.push(started.elapsed());
            ensure(report.status == Status::Optimal, || format!("n = {}: status {:?}", r * d, report.status))?;
        }
        times.sort();
        let median = times[times.len() / 2];
        points.push(((r * d) as f64, median.as_secs_f64()));
        detail.push(format!("n={} r={r}: {:.3}s", r * d, median.as_secs_f64()));
    }
    let slope = log_log_slope(&points);
    ensure(slope < AC8_SLOPE_LIMIT, || format!("slope {slope:.2} ({})", detail.join(", ")))?;
    Ok(format!("log-log slope {slope:.2} < {AC8_SLOPE_LIMIT} ({})", detail.join(", ")))
}

fn report(failed: &mut usize, id: usize, name: &str, verdict: Verdict) {
    match verdict {
        Ok(msg) => println!("AC{id} PASS {name}: {msg}"),
        Err(msg) => {
            *failed += 1;
            println!("AC{id} FAIL {name}: {msg}");
        }
    }
}

fn main() {
    let mut failed = 0;
    let (ac1, mut ac6) = ac1_ac6();
    report(&mut failed, 1, "end-to-end correctness", ac1);
    report(&mut failed, 2, "completability equivalence (JWP and Z-free)", ac2());
    report(&mut failed, 3, "completion vs chordless-cycle oracle", ac3());
    report(&mut failed, 4, "quadratic M-natural-convexity triangle", ac4());
    report(&mut failed, 5, "greedy layer optimality", ac5());
    let mut large = SspAudit::default();
    let ac8 = ac8(&mut large);
    if let Ok(msg) = &ac6 {
        ac6 = if large.failures.is_empty() {
            Ok(format!("{msg}; plus {} large solves, {} iterations", large.solves, large.iterations))
        } else {
            Err(large.failures.join("; "))
        };
    }
    report(&mut failed, 6, "SSP invariants", ac6);
    report(&mut failed, 7, "determinism", ac7());
    report(&mut failed, 8, "complexity smoke", ac8);
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
