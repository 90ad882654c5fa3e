//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one `PASS`/`FAIL` line.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ftpid_core::fixtures::{self, RandomSystemSpec};
use ftpid_core::{
    decompose, enumerate_antichains, frank_wolfe_minimize, ft_profile, garble, i_min,
    objective, objective_gradient, oracle_grid_search, redundantly_satisfies, solve_ift,
    EngineOptions, FailurePattern, FailureStrategy, JointSystem, Lattice, Measure, Outcome,
    SolverOptions, SourceAntichain, SourceIndexSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac(text: &str, n: usize) -> SourceAntichain {
    SourceAntichain::parse(text, n).unwrap()
}

fn set(indices: &[usize]) -> SourceIndexSet {
    SourceIndexSet::new(indices).unwrap()
}

/// 60 sparse systems, n alternating between 2 and 3, alphabets up to 3.
fn corpus() -> Vec<JointSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..60)
        .map(|i| fixtures::random_system(&mut rng, &RandomSystemSpec::new(2 + i % 2, 3)))
        .collect()
}

/// `I_ft` of every lattice node of every corpus system.
struct CorpusValues {
    systems: Vec<JointSystem>,
    values: Vec<Vec<(SourceAntichain, f64)>>,
}

fn corpus_values() -> std::result::Result<CorpusValues, String> {
    let systems = corpus();
    let opts = SolverOptions::default();
    let mut values = Vec::new();
    for s in &systems {
        let mut row = Vec::new();
        for alpha in enumerate_antichains(s.n(), 3).map_err(|e| e.to_string())? {
            let v = solve_ift(s, &alpha, &opts).map_err(|e| format!("{alpha}: {e}"))?.value;
            row.push((alpha, v));
        }
        values.push(row);
    }
    Ok(CorpusValues { systems, values })
}

fn motivating_example() -> Check {
    let t0 = Instant::now();
    let s = fixtures::entrance_cameras();
    let i1 = s.mutual_information(set(&[1])).unwrap();
    let i2 = s.mutual_information(set(&[2])).unwrap();
    let i12 = s.total_mutual_information();
    let elapsed = t0.elapsed();
    ensure((i1 - 0.5).abs() <= 1e-9, || format!("I(T;X1) = {i1}"))?;
    ensure((i2 - 0.5).abs() <= 1e-9, || format!("I(T;X2) = {i2}"))?;
    ensure((i12 - 1.0).abs() <= 1e-9, || format!("I(T;X1,X2) = {i12}"))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("I = ({i1}, {i2}, {i12}) in {elapsed:?}"))
}

fn garbling_fixture() -> Check {
    let s = fixtures::entrance_cameras();
    let strategy = FailureStrategy::deterministic(&s, |x, _| {
        FailurePattern::new(&[u8::from(x[0] == 1), u8::from(x[1] == 1)]).unwrap()
    })
    .map_err(|e| e.to_string())?;
    let g = garble(&s, &strategy).map_err(|e| e.to_string())?;
    let expected = fixtures::entrance_cameras_garbled_rows();
    let got: Vec<(Vec<u32>, u32, f64)> = g.support().iter().map(|o| (o.x.clone(), o.t, o.p)).collect();
    ensure(got == expected, || format!("garbled table {got:?}"))?;
    let mi = g.mutual_information();
    ensure(mi.abs() <= 1e-12, || format!("I(T;X~) = {mi}"))?;
    Ok(format!("{} cells match, I(T;X~) = {mi}", got.len()))
}

fn headline_redundancy() -> Check {
    let t0 = Instant::now();
    let s = fixtures::entrance_cameras();
    let cert = solve_ift(&s, &ac("{1}{2}", 2), &SolverOptions::default()).map_err(|e| e.to_string())?;
    let pid = decompose(&s, Measure::Ft, &EngineOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed();
    let atoms = pid.bivariate_atoms().unwrap();
    ensure(cert.value.abs() <= 1e-6, || format!("I_ft = {}", cert.value))?;
    ensure(cert.duality_gap < 1e-7, || format!("gap {}", cert.duality_gap))?;
    let want = [0.0, 0.5, 0.5, 0.0];
    let got = [atoms.redundancy, atoms.unique1, atoms.unique2, atoms.synergy];
    ensure(got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 1e-6), || {
        format!("atoms {got:?}")
    })?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "I_ft = {:.2e}, gap {:.2e}, atoms {got:?} in {elapsed:?}",
        cert.value, cert.duality_gap
    ))
}

fn baseline_contrast() -> Check {
    let s = fixtures::entrance_cameras();
    let r = i_min(&s, &ac("{1}{2}", 2)).map_err(|e| e.to_string())?;
    ensure((r - 0.5).abs() <= 1e-9, || format!("I_min = {r}"))?;
    let pid = decompose(&s, Measure::Min, &EngineOptions::default()).map_err(|e| e.to_string())?;
    let a = pid.bivariate_atoms().unwrap();
    let got = [a.redundancy, a.unique1, a.unique2, a.synergy];
    let want = [0.5, 0.0, 0.0, 0.5];
    ensure(got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 1e-9), || {
        format!("atoms {got:?}")
    })?;
    Ok(format!("I_min = {r}, atoms {got:?}"))
}

fn self_redundancy(c: &CorpusValues, elapsed: Duration) -> Check {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for (s, row) in c.systems.iter().zip(&c.values) {
        for (alpha, v) in row.iter().filter(|(a, _)| a.is_singleton()) {
            let mi = s.mutual_information(alpha.members()[0]).unwrap();
            worst = worst.max((v - mi).abs());
            ensure((v - mi).abs() <= 1e-6, || format!("{alpha}: I_ft {v} vs I {mi}"))?;
            checked += 1;
        }
    }
    ensure(elapsed < Duration::from_secs(60), || format!("corpus solves took {elapsed:?}"))?;
    Ok(format!(
        "{checked} index sets on {} systems, max error {worst:.1e}, all corpus solves in {elapsed:?}",
        c.systems.len()
    ))
}

fn monotonicity(c: &CorpusValues) -> Check {
    let mut pairs = 0;
    for row in &c.values {
        for (a, va) in row {
            for (b, vb) in row {
                if a != b && a.leq(b).unwrap() {
                    ensure(*va <= vb + 1e-6, || format!("{a} <= {b} but {va} > {vb}"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} comparable pairs"))
}

fn anti_isomorphism() -> Check {
    let mut pairs = 0;
    for n in 2..=3usize {
        // a single-point system carries every constant strategy
        let s = JointSystem::new(
            vec![1],
            vec![vec![1]; n],
            vec![Outcome::new(vec![1; n], 1, 1.0)],
        )
        .unwrap();
        let patterns: Vec<FailurePattern> = (0..1u32 << n).map(|m| FailurePattern::from_mask(n, m)).collect();
        let antichains = enumerate_antichains(n, 3).unwrap();
        let members = |alpha: &SourceAntichain| -> Vec<bool> {
            patterns
                .iter()
                .map(|&f| redundantly_satisfies(&FailureStrategy::constant(&s, f).unwrap(), alpha).unwrap())
                .collect()
        };
        let table: Vec<Vec<bool>> = antichains.iter().map(members).collect();
        for (i, a) in antichains.iter().enumerate() {
            for (j, b) in antichains.iter().enumerate() {
                let contained = table[j].iter().zip(&table[i]).all(|(&inb, &ina)| !inb || ina);
                let leq = a.leq(b).unwrap();
                ensure(contained == leq, || format!("{a} vs {b}: containment {contained}, order {leq}"))?;
                if !leq {
                    // some member of b contains no member of a; keeping
                    // exactly that member alive separates them
                    let witness = b
                        .members()
                        .iter()
                        .find(|m| !a.members().iter().any(|x| x.is_subset_of(**m)))
                        .ok_or_else(|| format!("no witness member for {a} vs {b}"))?;
                    let f = FailurePattern::from_mask(n, witness.mask());
                    let st = FailureStrategy::constant(&s, f).unwrap();
                    ensure(
                        redundantly_satisfies(&st, b).unwrap() && !redundantly_satisfies(&st, a).unwrap(),
                        || format!("witness {f} fails for {a} vs {b}"),
                    )?;
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} ordered pairs"))
}

fn reduction_equivalence(c: &CorpusValues) -> Check {
    // agreement to 1e-9 needs certificates tighter than that
    let opts = SolverOptions {
        tolerance: 1e-11,
        max_iterations: 100_000,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    let mut count = 0;
    for s in &c.systems {
        for alpha in enumerate_antichains(s.n(), 3).unwrap() {
            if alpha.union() == SourceIndexSet::full(s.n()).unwrap() {
                continue;
            }
            let reduced = solve_ift(s, &alpha, &opts).map_err(|e| format!("{alpha}: {e}"))?.value;
            let full = frank_wolfe_minimize(s, &alpha, &opts).map_err(|e| format!("{alpha}: {e}"))?.value;
            worst = worst.max((reduced - full).abs());
            ensure((reduced - full).abs() <= 1e-9, || format!("{alpha}: {reduced} vs {full}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} proper reductions, max difference {worst:.1e}"))
}

/// Antichains among all families of nonempty subsets, by brute force.
fn brute_force_antichain_count(n: usize) -> usize {
    let subsets = (1u32 << n) - 1;
    (1u64..1 << subsets)
        .filter(|family| {
            let members: Vec<u32> = (0..subsets).filter(|b| family >> b & 1 == 1).map(|b| b + 1).collect();
            members
                .iter()
                .all(|&a| members.iter().all(|&b| a == b || a & b != a))
        })
        .count()
}

fn moebius_correctness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sizes = Vec::new();
    for n in 2..=4 {
        let lattice = Lattice::new(n, 4).map_err(|e| e.to_string())?;
        let brute = brute_force_antichain_count(n);
        ensure(lattice.len() == brute, || format!("n={n}: {} nodes, brute force {brute}", lattice.len()))?;
        sizes.push(lattice.len());
        for _ in 0..20 {
            let values: Vec<f64> = (0..lattice.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let back = lattice.cumulate(&lattice.moebius_invert(&values));
            let err = values.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            ensure(err <= 1e-9, || format!("n={n}: round trip error {err}"))?;
        }
    }
    ensure(sizes == [4, 18, 166], || format!("sizes {sizes:?}"))?;
    Ok(format!("sizes {sizes:?}, round trips exact"))
}

fn solver_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = 2 + i % 2;
        let s = fixtures::random_system(&mut rng, &RandomSystemSpec::new(n, 3));
        let alpha = ac(if n == 2 { "{1}{2}" } else { "{1}{2,3}" }, n);
        let patterns = ftpid_core::allowed_patterns(&alpha, n).unwrap();
        let k = patterns.len();
        let rows: Vec<Vec<f64>> = s
            .support()
            .iter()
            .map(|_| {
                let raw: Vec<f64> = (0..k).map(|_| 0.2 + rng.random::<f64>()).collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / sum).collect()
            })
            .collect();
        let build = |w: &[Vec<f64>]| {
            let mut r = 0;
            FailureStrategy::from_fn(&s, |_, _| {
                let row = patterns.iter().copied().zip(w[r].iter().copied()).collect();
                r += 1;
                row
            })
            .unwrap()
        };
        let g = objective_gradient(&s, &alpha, &build(&rows)).map_err(|e| e.to_string())?;
        let r = rng.random_range(0..rows.len());
        let (a, b) = (0, k - 1);
        let shifted = |d: f64| {
            let mut w = rows.clone();
            w[r][a] += d;
            w[r][b] -= d;
            objective(&s, &build(&w)).unwrap()
        };
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        let analytic = g.rows[r][a] - g.rows[r][b];
        let rel = (fd - analytic).abs() / analytic.abs().max(1e-6);
        worst = worst.max(rel);
        ensure(rel < 1e-3, || format!("point {i}: finite difference {fd} vs gradient {analytic}"))?;
    }

    let spec = RandomSystemSpec {
        max_support: Some(8),
        ..RandomSystemSpec::new(2, 3)
    };
    let mut below = 0.0f64;
    let mut above = 0.0f64;
    let mut solves = 0;
    for _ in 0..6 {
        let s = fixtures::random_system(&mut rng, &spec);
        for alpha in enumerate_antichains(2, 2).unwrap() {
            let v = solve_ift(&s, &alpha, &SolverOptions::default()).map_err(|e| e.to_string())?.value;
            let grid = oracle_grid_search(&s, &alpha, 0.05).map_err(|e| e.to_string())?;
            below = below.max(v - grid);
            above = above.max(grid - v);
            ensure(grid >= v - 1e-6, || format!("{alpha}: grid {grid} below solver {v}"))?;
            ensure(grid <= v + 0.1, || format!("{alpha}: grid {grid} exceeds solver {v} by > 0.1"))?;
            solves += 1;
        }
    }
    Ok(format!(
        "gradient rel. error <= {worst:.1e}; {solves} grid comparisons, solver above grid by <= {below:.1e}, grid above solver by <= {above:.1e}"
    ))
}

fn profile_chain(c: &CorpusValues) -> Check {
    let opts = SolverOptions::default();
    for (i, s) in c.systems.iter().enumerate() {
        let v = ft_profile(s, &opts).map_err(|e| e.to_string())?.values();
        let total = s.total_mutual_information();
        ensure((v[0] - total).abs() <= 1e-6, || format!("system {i}: first entry {} vs {total}", v[0]))?;
        ensure(*v.last().unwrap() == 0.0, || format!("system {i}: last entry {:?}", v.last()))?;
        ensure(v.windows(2).all(|w| w[1] <= w[0] + 1e-6), || format!("system {i}: profile {v:?}"))?;
    }
    let v = ft_profile(&fixtures::entrance_cameras(), &opts).map_err(|e| e.to_string())?.values();
    ensure(v.len() == 3 && v.iter().zip([1.0, 0.0, 0.0]).all(|(a, b)| (a - b).abs() <= 1e-6), || {
        format!("entrance profile {v:?}")
    })?;
    Ok(format!("{} corpus profiles monotone; motivating example {v:.3?}", c.systems.len()))
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let corpus = corpus_values();
    let corpus_time = t0.elapsed();

    let with_corpus = |f: &dyn Fn(&CorpusValues) -> Check| match &corpus {
        Ok(c) => f(c),
        Err(e) => Err(format!("corpus solve failed: {e}")),
    };

    let criteria: Vec<Criterion<'_>> = vec![
        ("motivating example exactness", Box::new(motivating_example)),
        ("garbling fixture", Box::new(garbling_fixture)),
        ("headline redundancy", Box::new(headline_redundancy)),
        ("baseline contrast", Box::new(baseline_contrast)),
        ("self-redundancy", Box::new(|| with_corpus(&|c| self_redundancy(c, corpus_time)))),
        ("monotonicity", Box::new(|| with_corpus(&monotonicity))),
        ("anti-isomorphism", Box::new(anti_isomorphism)),
        ("reduction equivalence", Box::new(|| with_corpus(&reduction_equivalence))),
        ("moebius correctness", Box::new(moebius_correctness)),
        ("solver soundness", Box::new(solver_soundness)),
        ("profile chain", Box::new(|| with_corpus(&profile_chain))),
    ];

    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} [{took:.2?}]: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} [{took:.2?}]: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
