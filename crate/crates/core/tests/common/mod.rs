#![allow(dead_code)]

use std::collections::BTreeMap;

use dsum_core::algebra::{Adjoined, Semigroup};
use dsum_core::apps::Graph;
use dsum_core::circuit::{Circuit, Gate};
use dsum_core::summation::{oracle_intersection, IntersectionInput, OutputTable};
use dsum_core::universe::{subsets_up_to, Subset};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random `g` over the real `[n]`; each valid `(I, X)` is present with
/// probability 4/5.
pub fn random_table<V>(
    rng: &mut ChaCha8Rng,
    n: u64,
    p: usize,
    q: usize,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> V,
) -> IntersectionInput<V> {
    let mut g = IntersectionInput::new(n, p, q).unwrap();
    let ground = g.universe().ground();
    for set in subsets_up_to(&ground, p) {
        for active in subsets_up_to(&set, q.min(set.len())) {
            if rng.gen_ratio(4, 5) {
                let v = sample(rng);
                g.insert(active, set.clone(), v).unwrap();
            }
        }
    }
    g
}

/// Every valid `(I, X)` with a token naming it.
pub fn token_table(n: u64, p: usize, q: usize) -> IntersectionInput<dsum_core::algebra::Multiset<(Subset, Subset)>> {
    let mut g = IntersectionInput::new(n, p, q).unwrap();
    let ground = g.universe().ground();
    for set in subsets_up_to(&ground, p) {
        for active in subsets_up_to(&set, q.min(set.len())) {
            let token = (active.clone(), set.clone());
            g.insert(active, set.clone(), dsum_core::algebra::Multiset::singleton(token))
                .unwrap();
        }
    }
    g
}

/// `g` restricted to the labels a baseline circuit reads.
pub fn restrict_to_inputs<V: Clone>(g: &IntersectionInput<V>, circuit: &Circuit) -> IntersectionInput<V> {
    let mut out = IntersectionInput::new(g.universe().n(), g.p(), g.q()).unwrap();
    for gate in circuit.gates() {
        if let Gate::Input { active, set } = gate {
            if let Some(v) = g.get(active, set) {
                out.insert(active.clone(), set.clone(), v.clone()).unwrap();
            }
        }
    }
    out
}

/// Compares a baseline circuit's outputs with the oracle on the restricted
/// input. Outputs the circuit leaves out must be empty sums.
pub fn check_baseline<S: Semigroup>(
    circuit: &Circuit,
    g: &IntersectionInput<S::Value>,
    contract: &S,
) -> Result<(), String> {
    let restricted = restrict_to_inputs(g, circuit);
    let expected = oracle_intersection(&restricted, contract).map_err(|e| e.to_string())?;
    let got = circuit
        .evaluate(contract, restricted.entries())
        .map_err(|e| e.to_string())?;
    let u = g.universe();
    let singletons_only = circuit
        .outputs()
        .keys()
        .all(|label| label.len() == 1);
    for (label, want) in expected.iter() {
        if singletons_only && label.len() != 1 {
            continue;
        }
        let have = got.get(label).cloned().unwrap_or(Adjoined::Identity);
        if &have != want {
            return Err(format!("output {label}: circuit {have:?}, oracle {want:?}"));
        }
    }
    for label in got.keys() {
        if !u.mentions_phantom(label) && expected.get(label).is_none() {
            return Err(format!("unexpected output {label}"));
        }
    }
    Ok(())
}

pub fn tables_equal<V: PartialEq + std::fmt::Debug>(
    what: &str,
    a: &OutputTable<V>,
    b: &OutputTable<V>,
) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("{what}: {} vs {} outputs", a.len(), b.len()));
    }
    for (label, va) in a.iter() {
        match b.get(label) {
            Some(vb) if vb == va => {}
            other => return Err(format!("{what}: output {label}: {va:?} vs {other:?}")),
        }
    }
    Ok(())
}

/// Random simple graph with small integer weights.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, directed: bool) -> Graph {
    let mut g = Graph::new(n, directed).unwrap();
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if rng.gen_ratio(3, 5) {
                g.add_edge(u, v, rng.gen_range(-3i32..=6) as f64).unwrap();
            }
        }
    }
    g
}

/// Output label → set of tokens, or an error if any token repeats.
pub fn token_sets<T: Ord + Clone>(
    values: &BTreeMap<Subset, Adjoined<dsum_core::algebra::Multiset<T>>>,
) -> BTreeMap<Subset, Vec<T>> {
    values
        .iter()
        .map(|(label, v)| {
            let tokens = v
                .carrier()
                .map(|m| m.distinct().cloned().collect())
                .unwrap_or_default();
            (label.clone(), tokens)
        })
        .collect()
}
