use std::sync::OnceLock;

use cacforge::bus_model::{BusParams, DEFAULT_LAMBDA, DEFAULT_TAU0_PS};
use cacforge::classification::{GoldenTables, WindowClassifier};
use cacforge::codebook::*;
use num_bigint::BigInt;
use proptest::prelude::*;

fn classifier() -> &'static WindowClassifier {
    static WC: OnceLock<WindowClassifier> = OnceLock::new();
    WC.get_or_init(|| {
        let p = BusParams::new(DEFAULT_TAU0_PS, DEFAULT_LAMBDA).unwrap();
        WindowClassifier::build(&p, &GoldenTables::embedded()).unwrap()
    })
}

fn reference(c: ConstraintConfig) -> Seeds {
    Seeds::reference(c).unwrap()
}

fn big(v: u128) -> BigInt {
    BigInt::from(v)
}

/// Plain backtracking over nodes in order, no pivoting or bounds.
fn brute_max_cliques(g: &TransitionGraph) -> Vec<Vec<u64>> {
    fn go(g: &TransitionGraph, start: usize, cur: &mut Vec<usize>, best: &mut Vec<Vec<u64>>) {
        let size = best.first().map_or(0, Vec::len);
        if cur.len() > size {
            best.clear();
        }
        if cur.len() >= size || best.is_empty() {
            let maximal =
                (0..g.nodes()).all(|v| cur.contains(&v) || cur.iter().any(|&u| !g.has_edge(u, v)));
            if maximal && (best.is_empty() || cur.len() == best[0].len()) {
                best.push(cur.iter().map(|&v| v as u64).collect());
            }
        }
        for v in start..g.nodes() {
            if cur.iter().all(|&u| g.has_edge(u, v)) {
                cur.push(v);
                go(g, v + 1, cur, best);
                cur.pop();
            }
        }
    }
    let mut best = Vec::new();
    go(g, 0, &mut Vec::new(), &mut best);
    best.sort();
    best
}

#[test]
fn seed_cliques_match_published_seeds() {
    for c in ConstraintConfig::CONSTRUCTION {
        let graph = build_transition_graph_5(c, classifier());
        let cliques = max_cliques(&graph);
        assert_eq!(cliques, brute_max_cliques(&graph), "{c}");
        let expected_count = if c == ConstraintConfig::C4_2C { 1 } else { 2 };
        assert_eq!(cliques.len(), expected_count, "{c}");
        assert_eq!(
            seed_codebooks(c, classifier()).unwrap(),
            reference(c),
            "{c}"
        );
    }
    let sizes: Vec<usize> = ConstraintConfig::CONSTRUCTION
        .iter()
        .map(|&c| reference(c).size())
        .collect();
    assert_eq!(sizes, [6, 7, 16, 24]);
}

#[test]
fn seed_edge_cases() {
    let trivial = seed_codebooks(ConstraintConfig::C6_4C, classifier()).unwrap();
    assert_eq!(trivial.c0, (0..32).collect::<Vec<u64>>());
    assert_eq!(trivial.c0, trivial.c1);
    let none = ConstraintConfig::new(0, 0).unwrap();
    assert!(matches!(
        seed_codebooks(none, classifier()),
        Err(cacforge::Error::UnsupportedConstraint(_))
    ));
}

#[test]
fn transition_graph_edges() {
    let g21 = build_transition_graph_5(ConstraintConfig::C2_1C, classifier());
    assert!(g21.has_edge(0, 31));
    assert!(!g21.has_edge(0b01010, 0b10101));
    let g31 = build_transition_graph_5(ConstraintConfig::C3_1C, classifier());
    assert!(g31.has_edge(0, 3));
    let g64 = build_transition_graph_5(ConstraintConfig::C6_4C, classifier());
    assert_eq!(g64, TransitionGraph::complete(32));
}

#[test]
fn second_seed_is_complement_image() {
    for c in ConstraintConfig::CONSTRUCTION {
        let s = reference(c);
        let mut comp: Vec<u64> = s.c0.iter().map(|&w| complement5(w)).collect();
        comp.sort();
        assert_eq!(comp, s.c1, "{c}");
    }
}

fn rows(text: &[&str]) -> IntMatrix {
    IntMatrix::from_rows(
        &text
            .iter()
            .map(|r| r.bytes().map(|b| i64::from(b - b'0')).collect())
            .collect::<Vec<_>>(),
    )
}

#[test]
fn expansion_matrices_match_published() {
    let printed = [
        (
            ConstraintConfig::C2_1C,
            rows(&["000011", "000100", "100000", "001000", "010000", "100000"]),
        ),
        (
            ConstraintConfig::C3_1C,
            rows(&[
                "0000011", "0000100", "0100000", "1000000", "0011000", "0100000", "1000000",
            ]),
        ),
        (
            ConstraintConfig::C4_2C,
            rows(&[
                "0000000000000011",
                "0000000000000100",
                "0000000000011000",
                "0000000000100000",
                "0000000011000000",
                "0001100000000000",
                "0010000000000000",
                "1100000000000000",
                "0000000000000011",
                "0000000000000100",
                "0000000000011000",
                "0000001100000000",
                "0000010000000000",
                "0001100000000000",
                "0010000000000000",
                "1100000000000000",
            ]),
        ),
        (
            ConstraintConfig::C5_3C,
            rows(&[
                "000000000000000000000011",
                "000000000000000000000100",
                "000000000000000000011000",
                "000000000000000001100000",
                "000000000000000110000000",
                "000000000000011000000000",
                "000000000001100000000000",
                "000000000010000000000000",
                "000000001100000000000000",
                "000000110000000000000000",
                "000011000000000000000000",
                "001100000000000000000000",
                "110000000000000000000000",
                "000000000000000000000011",
                "000000000000000000000100",
                "000000000000000000011000",
                "000000000000000001100000",
                "000000000001100000000000",
                "000000000010000000000000",
                "000000001100000000000000",
                "000000110000000000000000",
                "000011000000000000000000",
                "001100000000000000000000",
                "110000000000000000000000",
            ]),
        ),
    ];
    for (c, d) in printed {
        let m = ExpansionMatrix::from_seeds(&reference(c));
        assert_eq!(m.d, d, "{c}");
        assert!(m.max_row_sum() <= big(2));
        assert!(m.is_reversal_symmetric(), "{c}");
    }
}

const OLC_SIZES: [u128; 12] = [7, 9, 12, 16, 21, 28, 37, 49, 65, 86, 114, 151];
const C21_SIZES: [u128; 12] = [6, 7, 9, 11, 14, 17, 21, 26, 32, 40, 49, 61];
const IOLC_SIZES: [u128; 12] = [4, 5, 7, 8, 11, 12, 16, 18, 23, 27, 34, 41];

#[test]
fn size_sequences() {
    let c21 = reference(ConstraintConfig::C2_1C);
    let c31 = reference(ConstraintConfig::C3_1C);
    for (i, n) in (5..=16).enumerate() {
        assert_eq!(codebook_size(&c31, n).unwrap(), big(OLC_SIZES[i]), "n={n}");
        assert_eq!(codebook_size(&c21, n).unwrap(), big(C21_SIZES[i]), "n={n}");
        assert_eq!(iolc_size(&c21, n).unwrap(), big(IOLC_SIZES[i]), "n={n}");
        assert_eq!(olc_size(n), OLC_SIZES[i]);
    }
    let c42 = reference(ConstraintConfig::C4_2C);
    let c53 = reference(ConstraintConfig::C5_3C);
    for n in 5..=20 {
        assert_eq!(
            codebook_size(&c42, n).unwrap(),
            big(2 * fibonacci(n + 1)),
            "n={n}"
        );
        assert_eq!(
            codebook_size(&c53, n).unwrap(),
            big(tribonacci(n + 2)),
            "n={n}"
        );
    }
    assert_eq!(codebook_size(&c42, 10).unwrap(), big(178));
}

#[test]
fn counts_agree_with_constructed_codebooks() {
    for c in ConstraintConfig::CONSTRUCTION {
        let s = reference(c);
        for n in 5..=16 {
            let cb = expand_codebook(&s, n).unwrap();
            assert_eq!(
                big(cb.len() as u128),
                codebook_size(&s, n).unwrap(),
                "{c} n={n}"
            );
            assert!(check_alternating_windows(&cb, &s), "{c} n={n}");
        }
    }
    let c21 = reference(ConstraintConfig::C2_1C);
    for n in 5..=16 {
        let pruned = prune_iolc(&expand_codebook(&c21, n).unwrap()).unwrap();
        assert_eq!(big(pruned.len() as u128), iolc_size(&c21, n).unwrap());
        assert!(pruned
            .values()
            .iter()
            .all(|w| IOLC_START.contains(&(w >> (n - 5))) && iolc_end_set(n).contains(&(w & 31))));
    }
}

#[test]
fn pruned_size_formulas() {
    let c21 = reference(ConstraintConfig::C2_1C);
    let m = ExpansionMatrix::from_seeds(&c21);
    let w = |v: [i64; 6]| v.map(BigInt::from).to_vec();
    let (w1, w2) = (w([1, 1, 1, 0, 1, 1]), w([1, 0, 1, 1, 1, 1]));
    for n in (6..=16).step_by(2) {
        assert_eq!(
            m.closed_form_weighted(n, &w1, &w2),
            iolc_size(&c21, n).unwrap(),
            "n={n}"
        );
    }
    // odd widths end in C5^0, where the single weight vector does not apply
    assert_ne!(m.closed_form_weighted(7, &w1, &w2), big(7));

    // The end set as listed drops 11100 and gives 7 words at n = 8, not 8.
    let listed = m.count_with(8, &IOLC_START, &IOLC_END_EVEN_AS_LISTED);
    assert_eq!(listed, big(7));
}

#[test]
fn recursions_and_identities() {
    for c in ConstraintConfig::CONSTRUCTION {
        let report = verify_recursion(&reference(c), 20).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.construction_checked_to, 20);
    }
    let foc = verify_recursion(&reference(ConstraintConfig::C5_3C), 20).unwrap();
    assert!(foc.erratum.as_deref().unwrap().contains("n = 8"));

    // signs as printed in the derivations do not hold
    let d31 = ExpansionMatrix::from_seeds(&reference(ConstraintConfig::C3_1C)).d;
    assert_ne!(d31.pow(7), &d31.pow(5) - &d31.pow(4));
    assert_eq!(d31.pow(7), &d31.pow(5) + &d31.pow(4));
    let d21 = ExpansionMatrix::from_seeds(&reference(ConstraintConfig::C2_1C)).d;
    assert_ne!(d21.pow(6), &d21.pow(4) - &d21);

    // With one seed the step matrix is D0; the reversed form D0·Y has a
    // different spectrum and does not satisfy the identity.
    let m42 = ExpansionMatrix::from_seeds(&reference(ConstraintConfig::C4_2C));
    let (ch, _) = lemma_for(ConstraintConfig::C4_2C)
        .map(|(_, c, p)| (c, p))
        .unwrap();
    assert!(ch.holds(&m42.d0));
    assert!(!ch.holds(&m42.d));
    assert_eq!(m42.transfer(), &m42.d0);
}

#[test]
fn pruned_recursion_breaks_at_twelve() {
    let report = verify_iolc_recursion(&reference(ConstraintConfig::C2_1C), 20).unwrap();
    assert!(report.construction_agrees);
    assert_eq!(report.first_violation, Some(12));
}

#[test]
fn classic_family_sizes() {
    for n in 1..=16 {
        for parity in 0..2 {
            let size = |f| classic_codebook(f, n, parity).unwrap().len() as u128;
            assert_eq!(size(ClassicFamily::Fpc), fpc_size(n), "FPC n={n}");
            assert_eq!(size(ClassicFamily::Ftc), ftc_size(n), "FTC n={n}");
            assert_eq!(size(ClassicFamily::Foc), foc_size(n), "FOC n={n}");
            assert_eq!(size(ClassicFamily::Olc), olc_size(n), "OLC n={n}");
        }
    }
    assert_eq!(
        classic_codebook(ClassicFamily::Fpc, 5, 0).unwrap().len(),
        16
    );
    assert_eq!(
        classic_codebook(ClassicFamily::Foc, 5, 0).unwrap().len(),
        24
    );
    assert_eq!(classic_codebook(ClassicFamily::Olc, 6, 0).unwrap().len(), 9);
}

#[test]
fn foc_never_holds_both_patterns_at_a_centre() {
    for n in 3..=12 {
        let cb = classic_codebook(ClassicFamily::Foc, n, 0).unwrap();
        for centre in 2..n {
            let shift = n - centre - 1;
            let has = |t| cb.values().iter().any(|w| (w >> shift) & 7 == t);
            assert!(!(has(0b010) && has(0b101)), "n={n} centre={centre}");
        }
    }
}

#[test]
fn constructions_equal_classic_families() {
    let report = verify_theorems(Seeds::reference, 12, 16).unwrap();
    assert!(
        report.passed(),
        "{:?}",
        report.failures().collect::<Vec<_>>()
    );
    assert_eq!(report.checks.len(), 3 * 8 * 2 + 12 * 2);
    assert_eq!(
        expand_codebook(&reference(ConstraintConfig::C3_1C), 5).unwrap(),
        Codebook::new(
            5,
            reference(ConstraintConfig::C3_1C).c0,
            Provenance::Constraint(ConstraintConfig::C3_1C),
            0
        )
        .unwrap()
    );
}

#[test]
fn built_codebooks_are_legal() {
    for c in ConstraintConfig::CONSTRUCTION {
        let s = reference(c);
        for n in 5..=10 {
            for parity in 0..2 {
                let cb = expand_from(&s, n, parity).unwrap();
                let bad = codebook_violations(&cb, c, classifier());
                assert!(bad.is_empty(), "{c} n={n}: {:?}", &bad[..bad.len().min(3)]);
            }
        }
    }
}

// Alternating expansion is maximum at six bits except under (C2,1C), where
// an unstructured six-bit clique has one more word.
#[test]
fn six_bit_maximum_cliques() {
    let mut observed = Vec::new();
    for c in ConstraintConfig::CONSTRUCTION {
        let g = build_transition_graph(6, c, classifier());
        let best = max_cliques(&g)[0].len();
        let built = expand_codebook(&reference(c), 6).unwrap();
        assert!(codebook_violations(&built, c, classifier()).is_empty());
        observed.push((best, built.len()));
    }
    assert_eq!(observed, [(8, 7), (9, 9), (26, 26), (44, 44)]);
}

#[test]
fn pruning_examples() {
    let c21 = reference(ConstraintConfig::C2_1C);
    let five = prune_iolc(&expand_codebook(&c21, 5).unwrap()).unwrap();
    assert_eq!(five.values(), [0, 15, 30, 31]);
    let ten = prune_iolc(&expand_codebook(&c21, 10).unwrap()).unwrap();
    assert_eq!(ten.len(), 12);
    assert_eq!(ten.provenance, Provenance::PrunedIolc);
    assert!(prune_iolc(&ten).is_err());
}

proptest! {
    #[test]
    fn codebook_text_round_trip(ci in 0usize..4, n in 5usize..14, parity in 0u8..2) {
        let s = reference(ConstraintConfig::CONSTRUCTION[ci]);
        let cb = expand_from(&s, n, parity).unwrap();
        prop_assert_eq!(Codebook::from_text(&cb.to_text()).unwrap(), cb);
    }

    #[test]
    fn start_parity_does_not_change_size(ci in 0usize..4, n in 5usize..18) {
        let s = reference(ConstraintConfig::CONSTRUCTION[ci]);
        prop_assert_eq!(
            expand_from(&s, n, 0).unwrap().len(),
            expand_from(&s, n, 1).unwrap().len()
        );
    }
}
