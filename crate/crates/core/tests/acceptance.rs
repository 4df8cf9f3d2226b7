//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dsum_core::algebra::{
    check_axioms, samplers, Adjoined, CountWeight, CountWeightSemiring, FreeMultiset, MaxWeight,
    MinPlus, Multiset, NatSum, Semigroup, WordBag, WordSum,
};
use dsum_core::apps::featsel::{featsel_precompute, featsel_query, ScoreTable};
use dsum_core::apps::kpath::{kpath_count, oracle_kpath, Graph};
use dsum_core::apps::permanent::{oracle_permanent, permanent, RectMatrix};
use dsum_core::builders::{build_pq, build_valiant, build_yates, predicted_gate_count, BuilderKind};
use dsum_core::circuit::{Circuit, Gate};
use dsum_core::summation::{intersection_sum, oracle_intersection, IntersectionInput, Mode};
use dsum_core::universe::{subsets_up_to, Subset, Universe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{check_baseline, random_graph, random_table, tables_equal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn gate_counts() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for b in 1..=4u8 {
        for p in 0..=3 {
            for q in 0..=3 {
                let c = build_pq(b, p, q).map_err(|e| e.to_string())?;
                let got = c.gate_counts();
                let want = predicted_gate_count(b, p, q).map_err(|e| e.to_string())?;
                if (got.inputs, got.accounted_adds(), got.outputs) != (want.inputs, want.adds, want.outputs) {
                    return Err(format!("b={b} p={p} q={q}: built {got:?}, predicted {want:?}"));
                }
                checked += 1;
            }
        }
    }
    let valiant = build_valiant(3).map_err(|e| e.to_string())?.gate_counts().adds;
    if valiant != 18 {
        return Err(format!("Valiant b=3 has {valiant} adds, expected 18"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?} (limit 60 s)"));
    }
    Ok(format!("{checked} parameter sets exact, Valiant b=3 adds=18, {elapsed:.2?}"))
}

fn size_bound() -> Outcome {
    let ratio = |b: u8, p: usize, q: usize| -> Result<f64, String> {
        let adds = build_pq(b, p, q).map_err(|e| e.to_string())?.gate_counts().accounted_adds();
        let n = (1u64 << b) as f64;
        Ok(adds as f64 / ((n.powi(p as i32) + n.powi(q as i32)) * (1.0 + b as f64)))
    };
    let mut at_three: f64 = 0.0;
    for p in 0..=2 {
        for q in 0..=2 {
            at_three = at_three.max(ratio(3, p, q)?);
        }
    }
    let limit = 1.5 * at_three;
    let mut worst = (0.0, 0, 0, 0);
    for b in 1..=5u8 {
        for p in 0..=2 {
            for q in 0..=2 {
                let r = ratio(b, p, q)?;
                if r > worst.0 {
                    worst = (r, b, p, q);
                }
            }
        }
    }
    let (r, b, p, q) = worst;
    let detail = format!("max ratio {r:.4} at b={b} p={p} q={q}, C={limit:.4}");
    if r <= limit {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Cache {
    circuits: BTreeMap<(u8, usize, usize, u8), Circuit>,
}

impl Cache {
    fn get(&mut self, b: u8, p: usize, q: usize, kind: BuilderKind) -> Result<&Circuit, String> {
        let key = (b, p, q, kind as u8);
        match self.circuits.entry(key) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(kind.build(b, p, q).map_err(|e| e.to_string())?)),
        }
    }
}

fn equivalence_for<S: Semigroup>(
    cache: &mut Cache,
    contract: &S,
    g: &IntersectionInput<S::Value>,
) -> Result<(), String> {
    let (n, p, q) = (g.universe().n(), g.p(), g.q());
    let b = g.universe().height();
    let tag = |what: &str| format!("{} n={n} p={p} q={q} {what}", contract.name());
    let oracle = oracle_intersection(g, contract).map_err(|e| e.to_string())?;
    for mode in [Mode::Circuit, Mode::Direct, Mode::ParallelCircuit] {
        let h = intersection_sum(g, contract, mode).map_err(|e| e.to_string())?;
        tables_equal(&tag(&format!("{mode:?}")), &h, &oracle)?;
    }
    for kind in [BuilderKind::Valiant, BuilderKind::P1, BuilderKind::Q1, BuilderKind::Yates] {
        if kind.supports(b, p, q) {
            let c = cache.get(b, p, q, kind)?;
            check_baseline(c, g, contract).map_err(|e| tag(&format!("{kind}: {e}")))?;
        }
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cache = Cache {
        circuits: BTreeMap::new(),
    };
    let mut instances = 0;
    for n in 2..=8u64 {
        for p in 0..=2 {
            for q in 0..=2 {
                for seed in 0..25u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed * 1000 + n * 100 + p as u64 * 10 + q as u64);
                    let g = random_table(&mut rng, n, p, q, samplers::nat);
                    equivalence_for(&mut cache, &NatSum, &g)?;
                    let g = random_table(&mut rng, n, p, q, samplers::max_weight);
                    equivalence_for(&mut cache, &MaxWeight, &g)?;
                    let g = random_table(&mut rng, n, p, q, samplers::min_plus);
                    equivalence_for(&mut cache, &MinPlus, &g)?;
                    let g = random_table(&mut rng, n, p, q, samplers::count_weight);
                    equivalence_for(&mut cache, &CountWeightSemiring, &g)?;
                    let g = random_table(&mut rng, n, p, q, samplers::multiset);
                    equivalence_for(&mut cache, &FreeMultiset::new(), &g)?;
                    instances += 5;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:?} (limit 5 min)"));
    }
    Ok(format!("{instances} instances agree exactly, {elapsed:.2?}"))
}

type Token = (Subset, Subset);

fn disjointness_of(circuit: &Circuit, intersection_form: bool) -> Result<(), String> {
    let s = FreeMultiset::<Token>::new();
    let values = circuit
        .evaluate_gates(&s, |i, x| Adjoined::Carrier(Multiset::singleton((i.clone(), x.clone()))))
        .map_err(|e| e.to_string())?;
    for (id, v) in values.iter().enumerate() {
        if let Adjoined::Carrier(m) = v {
            if !m.is_set() {
                return Err(format!("gate {id} repeats a token"));
            }
        }
    }
    let inputs: Vec<Token> = circuit
        .gates()
        .iter()
        .filter_map(|g| match g {
            Gate::Input { active, set } => Some((active.clone(), set.clone())),
            Gate::Add { .. } => None,
        })
        .collect();
    for (label, &gate) in circuit.outputs() {
        let have: Vec<Token> = values[gate]
            .carrier()
            .map(|m| m.distinct().cloned().collect())
            .unwrap_or_default();
        let want: Vec<Token> = if intersection_form {
            let ground = Subset::full(circuit.height()).map_err(|e| e.to_string())?;
            let mut w: Vec<Token> = subsets_up_to(&ground, circuit.p())
                .map(|x| (label.intersection(&x), x))
                .collect();
            w.sort();
            w
        } else {
            inputs
                .iter()
                .filter(|(_, x)| x.is_disjoint(label))
                .cloned()
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect()
        };
        if have != want {
            return Err(format!("output {label}: {} tokens, expected {}", have.len(), want.len()));
        }
    }
    Ok(())
}

fn nucleation_disjointness() -> Outcome {
    let mut circuits = 0;
    for b in 1..=3u8 {
        for p in 0..=2 {
            for q in 0..=2 {
                for kind in BuilderKind::ALL {
                    if !kind.supports(b, p, q) {
                        continue;
                    }
                    let c = kind.build(b, p, q).map_err(|e| e.to_string())?;
                    disjointness_of(&c, kind.is_intersection_form()).map_err(|e| format!("{kind} b={b} p={p} q={q}: {e}"))?;
                    circuits += 1;
                }
            }
        }
    }
    Ok(format!("{circuits} circuits, all multiplicities 1, outputs exact"))
}

fn yates_baseline() -> Outcome {
    for (n, b) in [(2u64, 1u8), (4, 2), (8, 3)] {
        let adds = build_yates(b, n as usize, n as usize)
            .map_err(|e| e.to_string())?
            .gate_counts()
            .adds;
        let want = (1u64 << (n - 1)) * n;
        if adds != want {
            return Err(format!("unrestricted n={n}: {adds} unions, expected {want}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for b in 1..=4u8 {
        for p in 0..=2 {
            for q in 0..=2 {
                let y = build_yates(b, p, q).map_err(|e| e.to_string())?;
                let pq = build_pq(b, p, q).map_err(|e| e.to_string())?;
                let n = 1u64 << b;
                let mut g = IntersectionInput::new(n, p, q).map_err(|e| e.to_string())?;
                let ground = Universe::with_height(b).map_err(|e| e.to_string())?.ground();
                for x in subsets_up_to(&ground, p) {
                    g.insert(Subset::empty(b), x, rng.gen_range(0..1000u64))
                        .map_err(|e| e.to_string())?;
                }
                let a = y.evaluate(&NatSum, g.entries()).map_err(|e| e.to_string())?;
                let c = pq.evaluate(&NatSum, g.entries()).map_err(|e| e.to_string())?;
                if a != c {
                    return Err(format!("b={b} p={p} q={q}: outputs differ from build_pq"));
                }
            }
        }
    }
    let y = build_yates(4, 2, 2).map_err(|e| e.to_string())?.gate_counts().adds;
    let pq = build_pq(4, 2, 2).map_err(|e| e.to_string())?.gate_counts().accounted_adds();
    if y <= pq {
        return Err(format!("b=4 p=q=2: yates {y} adds, pq {pq}"));
    }
    Ok(format!("2^(n-1)n exact for n=2,4,8; output-equivalent; b=4 p=q=2 yates {y} > pq {pq}"))
}

fn count_weight_axioms() -> Outcome {
    let report = check_axioms(&CountWeightSemiring, samplers::count_weight, 10_000, 2024);
    if report.all_passed() {
        Ok(format!("{} laws × 10000 trials", report.outcomes.len()))
    } else {
        Err(report.to_string())
    }
}

fn cycle4() -> Graph {
    let mut g = Graph::new(4, false).unwrap();
    for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        g.add_edge(u, v, 1.0).unwrap();
    }
    g
}

fn kpaths() -> Outcome {
    let start = Instant::now();
    let mut graphs = 0;
    for n in 2..=8usize {
        for k in 2..=4usize {
            for seed in 0..50u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 100 + n as u64 * 10 + k as u64);
                let directed = seed % 5 == 4;
                let g = random_graph(&mut rng, n, directed);
                let s = rng.gen_range(0..n);
                let t = (s + rng.gen_range(1..n)) % n;
                let fast = kpath_count(&g, s, t, k, Mode::Circuit).map_err(|e| e.to_string())?;
                let slow = oracle_kpath(&g, s, t, k).map_err(|e| e.to_string())?;
                if fast != slow {
                    return Err(format!("n={n} k={k} seed={seed}: {fast:?} vs oracle {slow:?}"));
                }
                graphs += 1;
            }
        }
    }
    let c4 = kpath_count(&cycle4(), 0, 2, 2, Mode::Circuit).map_err(|e| e.to_string())?;
    if c4 != CountWeight::new(2, 2.0) {
        return Err(format!("4-cycle gave {c4:?}"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:?} (limit 2 min)"));
    }
    Ok(format!("{graphs} graphs match the oracle, 4-cycle (2, 2), {elapsed:.2?}"))
}

fn permanents() -> Outcome {
    let mut matrices = 0;
    let words = WordSum::<char>::new();
    for k in 1..=3usize {
        for n in k..=5usize {
            for seed in 0..10u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 100 + k as u64 * 10 + n as u64);
                let nat: Vec<u64> = (0..k * n).map(|_| rng.gen_range(0..6)).collect();
                let m = RectMatrix::new(k, n, nat).unwrap();
                let fast = permanent(&m, &NatSum, Mode::Circuit).map_err(|e| e.to_string())?;
                let slow = oracle_permanent(&m, &NatSum).map_err(|e| e.to_string())?;
                if fast != slow {
                    return Err(format!("nat k={k} n={n} seed={seed}: {fast} vs {slow}"));
                }
                let sym: Vec<WordBag<char>> = (0..k * n)
                    .map(|_| match rng.gen_range(0..6) {
                        0 => Multiset::default(),
                        5 => Multiset::from_tokens([vec!['a'], vec!['b', 'c']]),
                        i => WordBag::word([(b'a' + i as u8) as char]),
                    })
                    .collect();
                let m = RectMatrix::new(k, n, sym).unwrap();
                let fast = permanent(&m, &words, Mode::Direct).map_err(|e| e.to_string())?;
                let slow = oracle_permanent(&m, &words).map_err(|e| e.to_string())?;
                if fast != slow {
                    return Err(format!("word k={k} n={n} seed={seed}: {fast:?} vs {slow:?}"));
                }
                matrices += 2;
            }
        }
    }
    // order sensitivity: the product must read a_0σ(0) then a_1σ(1)
    let w = |c: char| WordBag::word([c]);
    let m = RectMatrix::from_rows(vec![vec![w('a'), w('b')], vec![w('c'), w('d')]]).unwrap();
    let got = permanent(&m, &words, Mode::Circuit).map_err(|e| e.to_string())?;
    if got != Multiset::from_tokens([vec!['a', 'd'], vec!['b', 'c']]) {
        return Err(format!("symbolic 2×2 gave {got:?}"));
    }
    let m = RectMatrix::from_rows(vec![vec![1u64, 2], vec![3, 4]]).unwrap();
    let ten = permanent(&m, &NatSum, Mode::Circuit).map_err(|e| e.to_string())?;
    if ten != 10 {
        return Err(format!("[[1,2],[3,4]] gave {ten}"));
    }
    Ok(format!("{matrices} matrices match the oracle, row order kept, [[1,2],[3,4]] = 10"))
}

fn feature_selection() -> Outcome {
    let mut detail = String::new();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scores = ScoreTable::new(10).map_err(|e| e.to_string())?;
        let u = scores.universe();
        let ground = u.ground();
        for x in subsets_up_to(&ground, 2) {
            if seed == 0 || rng.gen_ratio(3, 4) {
                scores.insert(x, rng.gen_range(0..20) as f64).map_err(|e| e.to_string())?;
            }
        }
        let table = featsel_precompute(&scores, 2, 2, Mode::Direct).map_err(|e| e.to_string())?;
        let empty = Subset::empty(u.height());
        let mut brute_cost = 0;
        for e in subsets_up_to(&ground, 2) {
            let fast = featsel_query(&table, &e).map_err(|e| e.to_string())?;
            let (slow, ops) = scores.brute_force(2, &empty, &e).map_err(|e| e.to_string())?;
            if fast != slow {
                return Err(format!("seed {seed}, E={e}: {fast:?} vs brute force {slow:?}"));
            }
            if e.len() == 2 {
                brute_cost += ops;
            }
        }
        if table.ops() >= brute_cost {
            return Err(format!(
                "seed {seed}: precompute {} ⊕ vs brute force {brute_cost} ⊕ over 45 queries",
                table.ops()
            ));
        }
        if seed == 0 {
            detail = format!("precompute {} ⊕ < brute force {brute_cost} ⊕ (dense scores)", table.ops());
        }
    }
    Ok(format!("all 56 queries × 5 instances match; {detail}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 exact gate counts", gate_counts),
        ("2 size bound", size_bound),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 nucleation disjointness", nucleation_disjointness),
        ("5 yates baseline", yates_baseline),
        ("6 count-weight axioms", count_weight_axioms),
        ("7 k-path", kpaths),
        ("8 permanent", permanents),
        ("9 feature selection", feature_selection),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
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
