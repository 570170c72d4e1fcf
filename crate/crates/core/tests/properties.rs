use proptest::prelude::*;

use wlab::adversaries::{defeat_linearizer, BuiltinLinearizer};
use wlab::games::{pigeonhole_label, valid_leaf_labels};
use wlab::gen;
use wlab::orders::{bad_sequences, is_bad, trianglelefteq, validate_tree_decomposition, Order};
use wlab::pairing::{checked_pair, code_seq, decode_seq};
use wlab::problems::{sort2, verify_sort2, Domain, Sort2Instance};
use wlab::reductions::choice::{acc_limitavoid, rows_from_specs, stabilization_bound};
use wlab::reductions::labelling::{strings_to_depth, Labelling};
use wlab::stream::StreamSpec;
use wlab::trace::Trace;
use wlab::{pair, unpair};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_a_bijection(n in 0u64..1 << 20, m in 0u64..1 << 20) {
        prop_assert_eq!(unpair(pair(n, m)), (n, m));
    }

    #[test]
    fn sequence_codes_round_trip(seq in prop::collection::vec(0u64..50, 0..6)) {
        match code_seq(&seq) {
            Some(code) => prop_assert_eq!(decode_seq(code), seq),
            None => prop_assert!(seq.len() >= 4, "{:?} should have a code", seq),
        }
    }

    #[test]
    fn checked_pair_agrees_with_pair(n in 0u64..1 << 31, m in 0u64..1 << 31) {
        prop_assert_eq!(checked_pair(n, m), Some(pair(n, m)));
    }

    #[test]
    fn eventually_periodic_streams_repeat(prefix in prop::collection::vec(0u64..3, 0..5), cycle in prop::collection::vec(0u64..3, 1..4)) {
        let spec = StreamSpec::new(prefix.clone(), cycle.clone());
        let s = spec.build();
        let p = prefix.len() as u64;
        for t in 0..20 {
            prop_assert_eq!(s.at(p + t), cycle[t as usize % cycle.len()]);
        }
        let constant = cycle.iter().all(|&c| c == cycle[0]);
        prop_assert_eq!(spec.limit().is_some(), constant);
    }

    #[test]
    fn sorted_output_verifies(prefix in prop::collection::vec(0u64..2, 0..8), cycle in prop::collection::vec(0u64..2, 1..3)) {
        let spec = StreamSpec::new(prefix.clone(), cycle.clone());
        let zeros = if cycle.iter().all(|&b| b == 1) {
            Some(prefix.iter().filter(|&&b| b == 0).count() as u64)
        } else {
            None
        };
        let inst = Sort2Instance { bits: spec.build(), zeros };
        prop_assert!(verify_sort2(&inst, &sort2(&inst), 64).accepts());
    }

    #[test]
    fn comb_extendibility_is_prefix_closed(seed in any::<u64>()) {
        let p = gen::comb_poset(&mut gen::rng(seed));
        let seqs = bad_sequences(&p, &p.elements(2, 1), 3);
        for s in &seqs {
            prop_assert!(is_bad(&p, s));
            if p.extendible(s) {
                prop_assert!(p.extendible(&s[..s.len() - 1]));
            }
        }
    }

    #[test]
    fn trianglelefteq_is_a_preorder(seed in any::<u64>()) {
        let p = gen::comb_poset(&mut gen::rng(seed));
        let seqs = bad_sequences(&p, &p.elements(1, 1), 2);
        let seqs = &seqs[..seqs.len().min(40)];
        for a in seqs {
            prop_assert!(trianglelefteq(&p, a, a));
            for b in seqs {
                for c in seqs {
                    if trianglelefteq(&p, a, b) && trianglelefteq(&p, b, c) {
                        prop_assert!(trianglelefteq(&p, a, c), "{:?} {:?} {:?}", a, b, c);
                    }
                }
            }
        }
    }

    #[test]
    fn generated_decompositions_validate(seed in any::<u64>()) {
        let td = gen::tree_decomposition(&mut gen::rng(seed), None);
        prop_assert!(validate_tree_decomposition(&td).is_ok());
    }

    #[test]
    fn pigeonhole_label_is_reachable(seed in any::<u64>(), k in 1u64..4, depth in 0usize..6) {
        let inst = gen::pigeonhole_instance(&mut gen::rng(seed), k, depth);
        let label = pigeonhole_label(&inst.tree, k).unwrap();
        let invalid = |path: &[usize]| inst.invalid.iter().find(|(p, _)| p == path).map(|&(_, i)| i);
        prop_assert!(valid_leaf_labels(&inst.tree, &invalid).contains(&label));
    }

    #[test]
    fn labelling_is_monotone(seed in any::<u64>(), n in 1usize..6) {
        let p = gen::poset(&mut gen::rng(seed), n, 0.4);
        let lab = Labelling::new(&p, p.labels().to_vec());
        for s in strings_to_depth(7) {
            if let Some((_, parent)) = s.split_last() {
                prop_assert!(p.leq(lab.label(parent), lab.label(&s)));
            }
        }
    }

    #[test]
    fn limit_avoidance_settles(seed in any::<u64>(), k in 1u64..5) {
        let mut rng = gen::rng(seed);
        let m = seed % k;
        let rows: Vec<StreamSpec> = (0..k).map(|n| gen::pi02_row(&mut rng, n == m, 5, 2)).collect();
        let bound = stabilization_bound(&rows, m as usize).unwrap();
        let out = acc_limitavoid(Domain::Finite(k), rows_from_specs(&rows));
        prop_assert!((bound..bound + 100).all(|t| out.at(t) == m));
    }

    #[test]
    fn linearizer_width_tracks_stages(n in 1u64..15, wait in 0u64..4) {
        let run = defeat_linearizer(&BuiltinLinearizer::Delayed { wait }, n, 8).unwrap();
        prop_assert_eq!(run.leaves.len() as u64, n + 1);
        prop_assert!(run.cert.report.passed());
    }

    #[test]
    fn traces_round_trip(values in prop::collection::vec(any::<u32>(), 0..10)) {
        let dir = tempdir();
        let path = dir.join(format!("{}.jsonl", values.len()));
        let mut t = Trace::new();
        for v in &values {
            t.push("value", v);
        }
        t.write_to(&path).unwrap();
        let back = Trace::read_from(&path).unwrap();
        prop_assert_eq!(back.lines(), t.lines());
    }
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("wlab-props-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
