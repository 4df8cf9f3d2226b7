mod common;

use dsum_core::algebra::{samplers, Adjoined, CountWeightSemiring, FreeMultiset, Multiset, NatSum};
use dsum_core::apps::kpath::{half_path_table, Graph};
use dsum_core::builders::{build_pq, predicted_gate_count, BuilderKind};
use dsum_core::circuit::Circuit;
use dsum_core::summation::{
    disjoint_sum, intersection_sum, lift_disjoint, oracle_disjoint, DisjointInput, Mode,
};
use dsum_core::universe::{child_count, child_families, project, span, subsets_up_to, Subset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_graph, random_table, tables_equal};

fn subset_strategy(level: u8, max: usize) -> impl Strategy<Value = Subset> {
    proptest::collection::btree_set(0..1u64 << level, 0..=max)
        .prop_map(move |m| Subset::new(level, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_stays_inside_its_span(set in subset_strategy(5, 4), level in 0u8..=5) {
        let nodes = project(&set, level).unwrap();
        prop_assert!(nodes.len() <= set.len());
        prop_assert!(set.is_subset(&span(&nodes, 5).unwrap()));
        prop_assert_eq!(set.restrict_to_span(&nodes), set.clone());
    }

    #[test]
    fn child_families_match_their_count(parent in subset_strategy(3, 3), extra in 0usize..3) {
        let p = parent.len() + extra;
        let families = child_families(&parent, p).unwrap();
        prop_assert_eq!(families.len() as u64, child_count(parent.len(), p).unwrap());
        for z in &families {
            prop_assert_eq!(&project(z, 3).unwrap(), &parent);
            prop_assert!(z.len() <= p);
        }
    }

    #[test]
    fn set_algebra_is_consistent(a in subset_strategy(4, 6), b in subset_strategy(4, 6)) {
        let i = a.intersection(&b);
        let u = a.union(&b);
        prop_assert_eq!(i.len() + u.len(), a.len() + b.len());
        prop_assert!(i.is_subset(&a) && i.is_subset(&b));
        prop_assert!(a.difference(&b).is_disjoint(&b));
        prop_assert_eq!(Subset::parse(&a.to_string(), 4).unwrap(), a);
    }

    #[test]
    fn circuits_survive_serialization(b in 1u8..=3, p in 0usize..=2, q in 0usize..=2, pick in 0usize..5) {
        let kind = BuilderKind::ALL[pick];
        prop_assume!(kind.supports(b, p, q));
        let c = kind.build(b, p, q).unwrap();
        prop_assert!(c.validate().is_ok());
        let bytes = c.serialize();
        prop_assert_eq!(&Circuit::deserialize(&bytes).unwrap(), &c);
        prop_assert_eq!(kind.build(b, p, q).unwrap().serialize(), bytes);
    }

    #[test]
    fn predicted_counts_match(b in 1u8..=5, p in 0usize..=2, q in 0usize..=2) {
        let got = build_pq(b, p, q).unwrap().gate_counts();
        let want = predicted_gate_count(b, p, q).unwrap();
        prop_assert_eq!((got.inputs, got.accounted_adds(), got.outputs), (want.inputs, want.adds, want.outputs));
    }

    #[test]
    fn modes_agree_with_padding(seed in any::<u64>(), n in 3u64..=7, p in 0usize..=2, q in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_table(&mut rng, n, p, q, samplers::count_weight);
        let circuit = intersection_sum(&g, &CountWeightSemiring, Mode::Circuit).unwrap();
        let direct = intersection_sum(&g, &CountWeightSemiring, Mode::Direct).unwrap();
        let parallel = intersection_sum(&g, &CountWeightSemiring, Mode::ParallelCircuit).unwrap();
        prop_assert!(tables_equal("direct", &circuit, &direct).is_ok());
        prop_assert!(tables_equal("parallel", &circuit, &parallel).is_ok());
        prop_assert!(circuit.iter().all(|(a, _)| a.members().iter().all(|&x| x < n)));
    }

    #[test]
    fn disjoint_matches_its_reduction(seed in any::<u64>(), n in 2u64..=7, p in 0usize..=2, q in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = DisjointInput::new(n, p).unwrap();
        let ground = f.universe().ground();
        for x in subsets_up_to(&ground, p).filter(|x| x.len() == p) {
            if rng.gen_ratio(2, 3) {
                f.insert(x, samplers::nat(&mut rng)).unwrap();
            }
        }
        let e = disjoint_sum(&f, q, &NatSum, Mode::Circuit).unwrap();
        let oracle = oracle_disjoint(&f, q, &NatSum).unwrap();
        prop_assert!(tables_equal("oracle", &e, &oracle).is_ok());
        let h = intersection_sum(&lift_disjoint(&f, q).unwrap(), &NatSum, Mode::Direct).unwrap();
        for (y, v) in e.iter() {
            prop_assert_eq!(h.get(y), Some(v));
        }
        prop_assert!(e.iter().all(|(y, _)| y.len() == q));
    }
}

/// Tags each half path by its vertex set and checks that every combined pair
/// the summation produces is disjoint.
#[test]
fn kpath_halves_never_share_a_vertex() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(5..=8);
        let g: Graph = random_graph(&mut rng, n, false);
        for k in 2..=4 {
            let (p, q) = (k / 2, k - k / 2);
            for v in 2..n {
                let first = half_path_table(&g, 0, v, p).unwrap();
                let second = half_path_table(&g, 1, v, q).unwrap();
                let mut tagged = DisjointInput::new(n as u64, p).unwrap();
                for x in first.entries().keys() {
                    tagged.insert(x.clone(), Multiset::singleton(x.clone())).unwrap();
                }
                let e = disjoint_sum(&tagged, q, &FreeMultiset::new(), Mode::Circuit).unwrap();
                for y in second.entries().keys() {
                    assert!(!y.contains(v as u64));
                    if let Some(Adjoined::Carrier(xs)) = e.get(y) {
                        assert!(xs.is_set());
                        for x in xs.distinct() {
                            assert!(x.is_disjoint(y), "X={x} meets Y={y}");
                            assert!(!x.contains(v as u64));
                        }
                    }
                }
            }
        }
    }
}
