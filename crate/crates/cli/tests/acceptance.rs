//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mms_core::adapters::{as_budget_instance, solve_budget_adapter, solve_conflicts_adapter, solve_intervals_adapter};
use mms_core::bundles::{audit, make_bundles_two_fifths, BundleRequest, MakerResult};
use mms_core::driver::{
    existence_ratio, solve_alpha, solve_existence, solve_two_fifths, two_fifths_adjustment_bound, Mode, OracleChoice,
    SolveConfig, Solution,
};
use mms_core::generators::{
    gen_asymmetric_half, gen_random_additive, gen_random_budget, gen_random_conflict, gen_random_hereditary,
    gen_random_interval, gen_three_partition, gen_two_thirds_bound, ValueRange,
};
use mms_core::matching::{envy_free_matching, is_envy_free, max_general_matching, BipartiteGraph, Graph};
use mms_core::mms::{all_mms, best_min_ratio, best_min_value, compute_mms_exact, independence_table, verify_with_records, MmsRecord};
use mms_core::rational::{format, int, ratio};
use mms_core::valuation::knapsack::{self, Item};
use mms_core::valuation::{interval, OracleKind, ValuationOracle};
use mms_core::{Bundle, Instance, Job, Rational};

const GATE: usize = 12;

type Outcome = Result<String, String>;

fn corpus() -> Vec<Instance> {
    (0..500u64)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + s);
            let n = 2 + (s % 2) as usize;
            let m = rng.gen_range(n..=10);
            let range = ValueRange { lo: 0, hi: 10 };
            match s % 4 {
                0 => gen_random_additive(m, n, range, s),
                1 => gen_random_hereditary(m, n, 0.4, range, s),
                2 => gen_random_hereditary(m, n, 0.6, range, s),
                _ => gen_random_hereditary(m, n, 0.8, range, s),
            }
        })
        .collect()
}

fn gadgets() -> Vec<Instance> {
    vec![gen_two_thirds_bound(2, 1).unwrap(), gen_two_thirds_bound(3, 1).unwrap(), gen_two_thirds_bound(3, 2).unwrap()]
}

fn records(inst: &Instance) -> Vec<Option<MmsRecord>> {
    all_mms(inst, GATE).expect("corpus within gate").into_iter().map(Some).collect()
}

fn check_ratio(inst: &Instance, sol: &Solution, alpha: &Rational, recs: &[Option<MmsRecord>]) -> Result<(), String> {
    let report = verify_with_records(inst, &sol.allocation, alpha, recs, true).map_err(|e| e.to_string())?;
    if report.pass {
        return Ok(());
    }
    let bad: Vec<String> = report
        .agents
        .iter()
        .filter(|a| !a.pass)
        .map(|a| format!("agent {} value {} mu {}", a.agent + 1, format(&a.value), a.mu.as_ref().map(format).unwrap_or_default()))
        .collect();
    Err(format!("below {}: {}", format(alpha), bad.join("; ")))
}

fn c1_gadget() -> Outcome {
    let two = gen_two_thirds_bound(2, 1).unwrap();
    for i in 0..2 {
        let mu = compute_mms_exact(&two, i, 2, GATE).map_err(|e| e.to_string())?.mu;
        if mu != int(3) {
            return Err(format!("n = 2: agent {} has mu {}", i + 1, format(&mu)));
        }
    }
    let best = best_min_value(&two, GATE).map_err(|e| e.to_string())?.objective;
    let best_ratio = best_min_ratio(&two, GATE).map_err(|e| e.to_string())?.objective;
    if best != int(2) || best_ratio != ratio(2, 3) {
        return Err(format!("n = 2: best min value {}, ratio {}", format(&best), format(&best_ratio)));
    }
    let three = gen_two_thirds_bound(3, 1).unwrap();
    let best3 = best_min_value(&three, GATE).map_err(|e| e.to_string())?.objective;
    if best3 >= int(3) {
        return Err(format!("n = 3: an allocation reaches min value {}", format(&best3)));
    }
    Ok(format!("n=2 mu=3,3 best min value 2 ratio 2/3; n=3 best min value {best3}"))
}

fn c2_asymmetric() -> Outcome {
    let inst = gen_asymmetric_half(2).unwrap();
    for i in 0..2 {
        let mu = compute_mms_exact(&inst, i, 2, GATE).map_err(|e| e.to_string())?.mu;
        if mu != int(2) {
            return Err(format!("agent {} has mu {}", i + 1, format(&mu)));
        }
    }
    let best = best_min_value(&inst, GATE).map_err(|e| e.to_string())?.objective;
    let best_ratio = best_min_ratio(&inst, GATE).map_err(|e| e.to_string())?.objective;
    if best != int(1) || best_ratio != ratio(1, 2) {
        return Err(format!("best min value {}, ratio {}", format(&best), format(&best_ratio)));
    }
    Ok("mu=2,2 best min value 1 ratio 1/2".into())
}

fn c3_existence(corpus: &[Instance]) -> Outcome {
    for (idx, inst) in corpus.iter().enumerate() {
        let sol = solve_existence(inst, GATE).map_err(|e| format!("instance {idx}: {e}"))?;
        check_ratio(inst, &sol, &existence_ratio(inst.n), &records(inst)).map_err(|e| format!("instance {idx}: {e}"))?;
    }
    Ok(format!("{} instances, 0 failures", corpus.len()))
}

fn adjustment_check(sol: &Solution, m: usize) -> Result<usize, String> {
    let Some(est) = &sol.estimates else { return Ok(0) };
    let bound = two_fifths_adjustment_bound(sol.active.len(), m);
    let worst = est.max_adjustments();
    if worst as f64 >= bound {
        return Err(format!("{worst} adjustments, bound {bound:.3}"));
    }
    Ok(worst)
}

fn c4_two_fifths(corpus: &[Instance]) -> Outcome {
    let mut all: Vec<Instance> = corpus.to_vec();
    all.extend(gadgets());
    let mut worst = 0;
    let mut runs = 0;
    for (idx, inst) in all.iter().enumerate() {
        let recs = records(inst);
        for oracle in [OracleChoice::Default, OracleChoice::Adversarial] {
            let cfg = SolveConfig::new(Mode::TwoFifths).with_epsilon(ratio(1, inst.n as i64 + 1)).with_oracle(oracle);
            let sol = solve_two_fifths(inst, &cfg).map_err(|e| format!("instance {idx}: {e}"))?;
            check_ratio(inst, &sol, &ratio(2, 5), &recs).map_err(|e| format!("instance {idx}: {e}"))?;
            worst = worst.max(adjustment_check(&sol, inst.m).map_err(|e| format!("instance {idx}: {e}"))?);
            runs += 1;
        }
    }
    Ok(format!("{runs} solves (default and adversarial oracles), max adjustments per agent {worst}"))
}

fn c5_alpha(corpus: &[Instance]) -> Outcome {
    let mut solves = 0;
    for (idx, inst) in corpus.iter().enumerate() {
        let recs = records(inst);
        for eps in [int(0), ratio(1, 4), ratio(1, 2)] {
            let alpha = mms_core::bundles::alpha_for_epsilon(&eps);
            for oracle in [OracleChoice::Default, OracleChoice::Adversarial] {
                let cfg = SolveConfig::new(Mode::Alpha).with_epsilon(eps.clone()).with_oracle(oracle.clone());
                let sol = solve_alpha(inst, &cfg).map_err(|e| format!("instance {idx}: {e}"))?;
                check_ratio(inst, &sol, &alpha, &recs).map_err(|e| format!("instance {idx} eps {}: {e}", format(&eps)))?;
                solves += 1;
                if eps == int(0) {
                    let reference = solve_two_fifths(inst, &SolveConfig::new(Mode::TwoFifths).with_oracle(oracle))
                        .map_err(|e| e.to_string())?;
                    if reference.allocation.bundles != sol.allocation.bundles {
                        return Err(format!("instance {idx}: eps = 0 differs from the 2/5 solver"));
                    }
                }
            }
        }
    }
    Ok(format!("{solves} solves at eps in {{0, 1/4, 1/2}}; eps = 0 identical to 2/5 solver"))
}

fn c6_bundle_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut trials = 0;
    let mut seed = 0u64;
    while trials < 1000 {
        seed += 1;
        let n = 2 + rng.gen_range(0..2usize);
        let m = rng.gen_range(n..=10);
        let range = ValueRange { lo: 0, hi: 10 };
        let inst = match rng.gen_range(0..3) {
            0 => gen_random_additive(m, n, range, seed),
            1 => gen_random_hereditary(m, n, 0.5, range, seed),
            _ => gen_random_hereditary(m, n, 0.8, range, seed),
        };
        let agent = rng.gen_range(0..n);
        let mu = compute_mms_exact(&inst, agent, n, GATE).map_err(|e| e.to_string())?.mu;
        if mu == int(0) {
            continue;
        }
        let t = [ratio(-1, 1), ratio(-1, 2), int(0), ratio(1, 2), int(1)][rng.gen_range(0..5)].clone();
        let mu_star = &mu * (int(1) + t / int(5 * n as i64 - 1));
        let cap = &mu_star * ratio(3, 5);
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng);
        let ell = rng.gen_range(0..n);
        let mut removed = Bundle::new();
        for _ in 0..ell {
            let mut sum = int(0);
            for &j in &order {
                if removed.contains(j) || rng.gen_bool(0.3) {
                    continue;
                }
                let next = &sum + &inst.values[agent][j];
                if next <= cap {
                    sum = next;
                    removed.insert(j);
                }
            }
        }
        let kind = if trials % 2 == 0 { OracleKind::Exact } else { OracleKind::Adversarial(ratio(1, n as i64 + 1)) };
        let oracle = ValuationOracle::new(&inst, agent, kind);
        let items = Bundle::full(m).difference(&removed);
        let req = BundleRequest { oracle: &oracle, items: &items, k: n - ell, mu_star, alpha: ratio(2, 5) };
        match make_bundles_two_fifths(&req).map_err(|e| e.to_string())? {
            MakerResult::Success(made) => {
                if let Some(problem) = audit(&req, &made).map_err(|e| e.to_string())? {
                    return Err(format!("trial {trials}: {problem}"));
                }
            }
            MakerResult::Failure(made) => {
                return Err(format!("trial {trials} (seed {seed}): {} of {} bundles", made.len(), n - ell));
            }
        }
        trials += 1;
    }
    Ok(format!("{trials} trials, 0 counterexamples"))
}

fn brute_envy_free(g: &BipartiteGraph) -> usize {
    fn go(g: &BipartiteGraph, x: usize, used: &mut Vec<bool>, pairs: &mut Vec<(usize, usize)>, best: &mut usize) {
        if x == g.left() {
            if pairs.len() > *best && is_envy_free(g, pairs) {
                *best = pairs.len();
            }
            return;
        }
        go(g, x + 1, used, pairs, best);
        for &y in &g.adj[x] {
            if !used[y] {
                used[y] = true;
                pairs.push((x, y));
                go(g, x + 1, used, pairs, best);
                pairs.pop();
                used[y] = false;
            }
        }
    }
    let mut best = 0;
    go(g, 0, &mut vec![false; g.right], &mut Vec::new(), &mut best);
    best
}

fn brute_general(g: &Graph) -> usize {
    fn go(g: &Graph, matched: &mut Vec<bool>) -> usize {
        let Some(v) = (0..g.len()).find(|&v| !matched[v]) else { return 0 };
        matched[v] = true;
        let mut best = go(g, matched);
        for &u in &g.adj[v] {
            if !matched[u] {
                matched[u] = true;
                best = best.max(1 + go(g, matched));
                matched[u] = false;
            }
        }
        matched[v] = false;
        best
    }
    go(g, &mut vec![false; g.len()])
}

fn c7_matching() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut hall_cases = 0;
    for t in 0..1000 {
        let left = rng.gen_range(0..=6);
        let right = rng.gen_range(0..=(12 - left).min(8));
        let p = rng.gen_range(0.1..0.7);
        let g = BipartiteGraph::from_predicate(left, right, |_, _| rng.gen_bool(p));
        let got = envy_free_matching(&g);
        if !is_envy_free(&g, &got) {
            return Err(format!("graph {t}: output is not envy-free"));
        }
        let want = brute_envy_free(&g);
        if got.len() != want {
            return Err(format!("graph {t}: size {} vs brute force {want}", got.len()));
        }
        let neighbours = (0..right).filter(|&y| (0..left).any(|x| g.has_edge(x, y))).count();
        if left > 0 && neighbours >= left {
            hall_cases += 1;
            if got.is_empty() {
                return Err(format!("graph {t}: empty although |N(X)| >= |X|"));
            }
        }

        let n = rng.gen_range(0..=12);
        let mut h = Graph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    h.add_edge(a, b);
                }
            }
        }
        let pairs = max_general_matching(&h);
        let mut seen = vec![false; n];
        for &(a, b) in &pairs {
            if !h.has_edge(a, b) || std::mem::replace(&mut seen[a], true) || std::mem::replace(&mut seen[b], true) {
                return Err(format!("graph {t}: invalid general matching"));
            }
        }
        if pairs.len() != brute_general(&h) {
            return Err(format!("graph {t}: general matching not maximum"));
        }
    }
    Ok(format!("1000 bipartite + 1000 general graphs; {hall_cases} nonempty-neighbourhood cases"))
}

fn brute_value(table: &[bool], values: &[Rational], b: &Bundle) -> Rational {
    let items = b.items();
    let mut best = int(0);
    for sub in 0u32..1 << items.len() {
        let mask: usize = (0..items.len()).filter(|p| sub >> p & 1 == 1).map(|p| 1 << items[p]).sum();
        if table[mask] {
            let v = (0..items.len()).filter(|p| sub >> p & 1 == 1).fold(int(0), |acc, p| acc + &values[items[p]]);
            best = best.max(v);
        }
    }
    best
}

fn c8_reduction(corpus: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut instances: Vec<Instance> = corpus.to_vec();
    let range = ValueRange::default();
    for s in 0..50 {
        instances.push(gen_random_budget(8, 2, range, s));
        instances.push(gen_random_conflict(9, 3, range, s));
        instances.push(gen_random_interval(8, 2, range, s));
    }
    let mut queries = 0;
    for (idx, inst) in instances.iter().enumerate() {
        for i in 0..inst.n {
            let table = independence_table(inst.system(i), inst.m);
            let oracle = ValuationOracle::exact(inst, i);
            let mut bundles = vec![Bundle::full(inst.m)];
            bundles.extend((0..5).map(|_| Bundle::from_items((0..inst.m).filter(|_| rng.gen_bool(0.6)))));
            for b in bundles {
                let red = oracle.reduce_counted(&b).map_err(|e| e.to_string())?;
                let s = &red.independent.bundle;
                let mask: usize = s.iter().map(|j| 1 << j).sum();
                let want = brute_value(&table, &inst.values[i], &b);
                let sum = s.iter().fold(int(0), |acc, j| acc + &inst.values[i][j]);
                if !s.is_subset(&b) || !table[mask] || sum != want || red.independent.value != want {
                    return Err(format!("instance {idx} agent {}: bad reduction of {b}", i + 1));
                }
                if red.queries > 2 * b.len() + 1 {
                    return Err(format!("instance {idx}: {} queries for |B| = {}", red.queries, b.len()));
                }
                queries += 1;
            }
        }
    }
    Ok(format!("{queries} reductions, all independent with equal value within 2|B|+1 queries"))
}

fn c9_adapters() -> Outcome {
    let range = ValueRange::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for s in 0..200u64 {
        let n = 2 + (s % 2) as usize;
        let m = rng.gen_range(n..=8);
        let inst = gen_random_budget(m, n, range, s);
        let rep = solve_budget_adapter(&inst).map_err(|e| format!("budget {s}: {e}"))?;
        if !rep.all_feasible() {
            return Err(format!("budget {s}: infeasible bundle"));
        }
        let ent = as_budget_instance(&inst).map_err(|e| e.to_string())?;
        check_ratio(&ent, &rep.solution, &ratio(2, 5), &records(&ent)).map_err(|e| format!("budget {s}: {e}"))?;
    }
    for s in 0..200u64 {
        let n = 2 + (s % 2) as usize;
        let m = rng.gen_range(n..=10);
        let inst = gen_random_conflict(m, n, range, s);
        let rep = solve_conflicts_adapter(&inst, GATE).map_err(|e| format!("conflict {s}: {e}"))?;
        if !rep.all_feasible() || !rep.solution.allocation.complete {
            return Err(format!("conflict {s}: incomplete or infeasible"));
        }
        check_ratio(&inst, &rep.solution, &ratio(1, 2), &records(&inst)).map_err(|e| format!("conflict {s}: {e}"))?;
    }
    for s in 0..200u64 {
        let n = 2 + (s % 2) as usize;
        let m = rng.gen_range(n..=8);
        let inst = gen_random_interval(m, n, range, s);
        let rep = solve_intervals_adapter(&inst).map_err(|e| format!("interval {s}: {e}"))?;
        if !rep.all_feasible() {
            return Err(format!("interval {s}: unschedulable bundle"));
        }
        check_ratio(&inst, &rep.solution, &ratio(2, 7), &records(&inst)).map_err(|e| format!("interval {s}: {e}"))?;
    }
    for t in 0..200 {
        let k = rng.gen_range(1..=12);
        let items: Vec<Item> = (0..k)
            .map(|id| Item { id, value: ratio(rng.gen_range(0..20), rng.gen_range(1..4)), size: int(rng.gen_range(1..10)) })
            .collect();
        let budget = int(rng.gen_range(0..30));
        let eps = [ratio(1, 2), ratio(1, 3), ratio(1, 4), ratio(1, 10)][t % 4].clone();
        let (ids, value) = knapsack::fptas(&items, &budget, &eps);
        let (_, opt) = knapsack::brute_force(&items, &budget);
        let size = ids.iter().fold(int(0), |acc, &id| acc + &items[id].size);
        if size > budget || value < (int(1) - &eps) * &opt {
            return Err(format!("fptas trial {t}: value {} vs optimum {}", format(&value), format(&opt)));
        }
    }
    for t in 0..200 {
        let k = rng.gen_range(1..=10);
        let jobs: Vec<Job> = (0..k)
            .map(|_| {
                let p = rng.gen_range(1..=3);
                let r = rng.gen_range(1..=6);
                Job::new(p, r, r + p - 1 + rng.gen_range(0..=3))
            })
            .collect();
        let values: Vec<Rational> = (0..k).map(|_| int(rng.gen_range(0..10))).collect();
        let items: Vec<usize> = (0..k).collect();
        let schedule = interval::local_ratio(&jobs, &values, &items);
        let got = schedule.iter().fold(int(0), |acc, &(j, _)| acc + &values[j]);
        let (_, opt) = interval::best_subset(&jobs, &values, &items);
        if !interval::verify_schedule(&jobs, &schedule) || got * int(2) < opt {
            return Err(format!("interval oracle trial {t}"));
        }
    }
    Ok("200 budget (>= 2/5), 200 conflict (complete, >= 1/2), 200 interval (>= 2/7); 200 FPTAS and 200 interval-oracle contracts".into())
}

fn three_partition_yes(a: &[u64]) -> bool {
    let n = a.len() / 3;
    let sum: u64 = a.iter().sum();
    if !sum.is_multiple_of(n as u64) {
        return false;
    }
    let t = sum / n as u64;
    fn go(a: &[u64], used: &mut Vec<bool>, t: u64) -> bool {
        let Some(x) = (0..a.len()).find(|&i| !used[i]) else { return true };
        used[x] = true;
        for y in x + 1..a.len() {
            if used[y] {
                continue;
            }
            used[y] = true;
            for z in y + 1..a.len() {
                if !used[z] && a[x] + a[y] + a[z] == t {
                    used[z] = true;
                    if go(a, used, t) {
                        return true;
                    }
                    used[z] = false;
                }
            }
            used[y] = false;
        }
        used[x] = false;
        false
    }
    go(a, &mut vec![false; a.len()], t)
}

fn c10_three_partition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut yes, mut no) = (0, 0);
    for idx in 0..60 {
        let triples = 2 + idx % 3;
        let mut a: Vec<u64> = if idx % 2 == 0 {
            let t = rng.gen_range(6..=12u64);
            (0..triples)
                .flat_map(|_| {
                    let x = rng.gen_range(1..=t - 2);
                    let y = rng.gen_range(1..=t - 1 - x);
                    [x, y, t - x - y]
                })
                .collect()
        } else {
            (0..3 * triples).map(|_| rng.gen_range(1..=9)).collect()
        };
        a.shuffle(&mut rng);
        while a.iter().sum::<u64>() % triples as u64 != 0 {
            *a.last_mut().unwrap() += 1;
        }
        let inst = gen_three_partition(&a).map_err(|e| e.to_string())?;
        let mu = compute_mms_exact(&inst, 0, triples, GATE).map_err(|e| e.to_string())?.mu;
        let direct = three_partition_yes(&a);
        if (mu == int(3)) != direct {
            return Err(format!("{a:?}: mu {} but 3-PARTITION says {direct}", format(&mu)));
        }
        if direct {
            yes += 1;
        } else {
            no += 1;
        }
    }
    Ok(format!("60 inputs ({yes} yes, {no} no), mu = 3 exactly on yes"))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_mms"))
        .current_dir(dir)
        .args(args)
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("mms {} exited with {status}", args.join(" ")));
    }
    Ok(())
}

fn c11_determinism() -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "random", "--m", "8", "--n", "2", "--seed", "7", "--out", "random.json"],
        vec!["gen", "two-thirds", "--n", "2", "--out", "gadget.json"],
        vec!["gen", "entitled", "--m", "7", "--n", "3", "--seed", "3", "--out", "entitled.json"],
        vec!["gen", "budget", "--m", "7", "--n", "3", "--seed", "3", "--out", "budget.json"],
        vec!["gen", "conflict", "--m", "8", "--n", "3", "--seed", "3", "--out", "conflict.json"],
        vec!["gen", "interval", "--m", "7", "--n", "2", "--seed", "3", "--out", "interval.json"],
        vec!["solve", "random.json", "--mode", "two_fifths", "--certify", "--trace", "t1.jsonl", "--out", "a1.json"],
        vec!["solve", "gadget.json", "--mode", "existence", "--certify", "--trace", "t2.jsonl", "--out", "a2.json"],
        vec!["solve", "random.json", "--mode", "alpha", "--epsilon", "1/2", "--oracle", "adversarial", "--out", "a3.json"],
        vec!["solve", "entitled.json", "--mode", "entitled", "--trace", "t4.jsonl", "--out", "a4.json"],
        vec!["solve", "budget.json", "--mode", "budget", "--certify", "--out", "a5.json"],
        vec!["solve", "conflict.json", "--mode", "conflicts", "--certify", "--out", "a6.json"],
        vec!["solve", "interval.json", "--mode", "intervals", "--certify", "--out", "a7.json"],
        vec!["mms", "random.json", "--out", "mms.json"],
        vec!["verify", "random.json", "a1.json", "--out", "v1.json"],
        vec!["verify", "gadget.json", "a2.json", "--out", "v2.json"],
    ];
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    for dir in &dirs {
        for c in &commands {
            run_cli(dir.path(), c)?;
        }
    }
    let mut files: Vec<String> = std::fs::read_dir(dirs[0].path())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    for f in &files {
        let a = std::fs::read(dirs[0].path().join(f)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dirs[1].path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        if a != b {
            return Err(format!("{f} differs between runs"));
        }
    }
    Ok(format!("{} commands run twice, {} output files byte-identical", commands.len(), files.len()))
}

type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        ("gadget tightness", Duration::from_secs(60), Box::new(c1_gadget)),
        ("asymmetric tightness", Duration::from_secs(10), Box::new(c2_asymmetric)),
        ("existence mode", Duration::from_secs(600), Box::new(|| c3_existence(&corpus))),
        ("2/5 algorithm", Duration::MAX, Box::new(|| c4_two_fifths(&corpus))),
        ("alpha mode", Duration::MAX, Box::new(|| c5_alpha(&corpus))),
        ("bundle construction contract", Duration::MAX, Box::new(c6_bundle_contract)),
        ("matching oracles", Duration::MAX, Box::new(c7_matching)),
        ("independent-subset reduction", Duration::MAX, Box::new(|| c8_reduction(&corpus))),
        ("constraint adapters", Duration::MAX, Box::new(c9_adapters)),
        ("3-PARTITION generator", Duration::MAX, Box::new(c10_three_partition)),
        ("determinism", Duration::MAX, Box::new(c11_determinism)),
    ];
    let mut failed = 0;
    for (idx, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({elapsed:.1?})", idx + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({elapsed:.1?})", idx + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
