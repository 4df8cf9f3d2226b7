//! Randomised cross-checks of every evaluation path against the oracles.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dsum_core::algebra::{
    samplers, Adjoined, CountWeightSemiring, FreeMultiset, MaxWeight, MinPlus, Multiset, NatSum,
    Semigroup,
};
use dsum_core::builders::BuilderKind;
use dsum_core::circuit::{Circuit, Gate};
use dsum_core::summation::{intersection_sum, oracle_intersection, IntersectionInput, Mode};
use dsum_core::universe::{subsets_up_to, Subset, Universe};

use crate::{Failure, VerifyArgs};

#[derive(Default)]
struct Tally {
    checks: usize,
    failed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, what: impl FnOnce() -> String, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 5 {
                self.failures.push(what());
            }
        }
    }
}

fn random_table<V>(
    rng: &mut ChaCha8Rng,
    n: u64,
    p: usize,
    q: usize,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> V,
) -> Result<IntersectionInput<V>, Failure> {
    let mut g = IntersectionInput::new(n, p, q)?;
    let ground = g.universe().ground();
    for set in subsets_up_to(&ground, p) {
        for active in subsets_up_to(&set, q.min(set.len())) {
            if rng.gen_ratio(4, 5) {
                let v = sample(rng);
                g.insert(active, set.clone(), v)?;
            }
        }
    }
    Ok(g)
}

/// Circuit output `A`, or the identity when the circuit omits it.
fn output_or_identity<V: Clone>(values: &BTreeMap<Subset, Adjoined<V>>, label: &Subset) -> Adjoined<V> {
    values.get(label).cloned().unwrap_or(Adjoined::Identity)
}

fn check_contract<S: Semigroup>(
    contract: &S,
    g: &IntersectionInput<S::Value>,
    circuits: &[(BuilderKind, Circuit)],
    tally: &mut Tally,
) -> Result<(), Failure> {
    let oracle = oracle_intersection(g, contract)?;
    let name = contract.name();
    for (kind, circuit) in circuits {
        if *kind == BuilderKind::Pq {
            for mode in [Mode::Circuit, Mode::Direct] {
                let h = intersection_sum(g, contract, mode)?;
                tally.record(|| format!("{name}: {mode:?} differs from the oracle"), h == oracle);
            }
            continue;
        }
        // baselines read only (∅, X) labels; restrict g and the oracle to them
        let mut restricted = IntersectionInput::new(g.universe().n(), g.p(), g.q())?;
        for gate in circuit.gates() {
            if let Gate::Input { active, set } = gate {
                if let Some(v) = g.get(active, set) {
                    restricted.insert(active.clone(), set.clone(), v.clone())?;
                }
            }
        }
        let want = oracle_intersection(&restricted, contract)?;
        let got = circuit.evaluate(contract, restricted.entries())?;
        let singletons = circuit.outputs().keys().all(|l| l.len() == 1);
        let ok = want
            .iter()
            .filter(|(label, _)| !singletons || label.len() == 1)
            .all(|(label, v)| &output_or_identity(&got, label) == v);
        tally.record(|| format!("{name}: {kind} differs from the oracle"), ok);
    }
    Ok(())
}

/// Every gate carries a token set without repeats, and every output carries
/// exactly the tokens its definition names.
fn check_disjointness(kind: BuilderKind, circuit: &Circuit) -> Result<bool, Failure> {
    type Token = (Subset, Subset);
    let s = FreeMultiset::<Token>::new();
    let values = circuit.evaluate_gates(&s, |i, x| {
        Adjoined::Carrier(Multiset::singleton((i.clone(), x.clone())))
    })?;
    if values
        .iter()
        .any(|v| v.carrier().is_some_and(|m| !m.is_set()))
    {
        return Ok(false);
    }
    let inputs: BTreeSet<Token> = circuit
        .input_labels()
        .map(|(_, i, x)| (i.clone(), x.clone()))
        .collect();
    let ground = Subset::full(circuit.height())?;
    for (label, &gate) in circuit.outputs() {
        let have: BTreeSet<Token> = values[gate]
            .carrier()
            .map(|m| m.distinct().cloned().collect())
            .unwrap_or_default();
        let want: BTreeSet<Token> = if kind.is_intersection_form() {
            subsets_up_to(&ground, circuit.p())
                .map(|x| (label.intersection(&x), x))
                .collect()
        } else {
            inputs
                .iter()
                .filter(|(_, x)| x.is_disjoint(label))
                .cloned()
                .collect()
        };
        if have != want {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn run(args: &VerifyArgs) -> Result<(), Failure> {
    let universe = Universe::new(args.n)?;
    let b = universe.height();
    let (p, q) = (args.p, args.q);
    let kinds: Vec<BuilderKind> = match &args.builder {
        Some(name) => {
            let kind: BuilderKind = name.parse()?;
            if !kind.supports(b, p, q) {
                return Err(Failure::Usage(format!(
                    "builder {kind} does not support b={b}, p={p}, q={q}"
                )));
            }
            vec![kind]
        }
        None => BuilderKind::ALL
            .into_iter()
            .filter(|k| k.supports(b, p, q))
            .collect(),
    };
    let mut circuits = Vec::new();
    for kind in kinds {
        circuits.push((kind, kind.build(b, p, q)?.with_logical_size(args.n)?));
    }
    let names: Vec<String> = circuits.iter().map(|(k, _)| k.to_string()).collect();
    println!(
        "n={} b={b} p={p} q={q} trials={} seed={} builders={}",
        args.n,
        args.trials,
        args.seed,
        names.join(",")
    );

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut failed = 0;
    let mut failures = Vec::new();
    let mut report = |name: &str, tally: Tally| {
        println!("{name}: {}/{} agree", tally.checks - tally.failed, tally.checks);
        failed += tally.failed;
        failures.extend(tally.failures);
    };
    macro_rules! sweep {
        ($contract:expr, $sampler:expr) => {{
            let contract = $contract;
            let mut tally = Tally::default();
            for _ in 0..args.trials {
                let g = random_table(&mut rng, args.n, p, q, $sampler)?;
                check_contract(&contract, &g, &circuits, &mut tally)?;
            }
            report(contract.name(), tally);
        }};
    }
    sweep!(NatSum, samplers::nat);
    sweep!(MaxWeight, samplers::max_weight);
    sweep!(MinPlus, samplers::min_plus);
    sweep!(CountWeightSemiring, samplers::count_weight);
    sweep!(FreeMultiset::<u8>::new(), samplers::multiset);

    let mut disjoint = Tally::default();
    for (kind, circuit) in &circuits {
        let ok = check_disjointness(*kind, circuit)?;
        disjoint.record(|| format!("{kind}: nucleation is not disjoint"), ok);
    }
    report("disjointness", disjoint);

    if failed == 0 {
        println!("PASS");
        Ok(())
    } else {
        for f in &failures {
            println!("  {f}");
        }
        println!("FAIL");
        Err(Failure::Mismatch(format!("{failed} check(s) failed")))
    }
}
