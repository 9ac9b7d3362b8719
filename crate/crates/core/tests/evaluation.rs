use std::sync::OnceLock;

use cacforge::bus_model::{pattern_delay, BusParams, TransitionPattern, TransitionSymbol};
use cacforge::classification::{classify_middle, classify_side, ClassificationTable, GoldenTables};
use cacforge::codebook::{
    transition_symbols, ClassicFamily, CodeSpec, Codebook, ConstraintConfig, Provenance,
};
use cacforge::evaluation::*;
use proptest::prelude::*;

fn tables() -> &'static DelayTables {
    static T: OnceLock<DelayTables> = OnceLock::new();
    T.get_or_init(|| DelayTables::build(&BusParams::default()).unwrap())
}

fn spec(s: &str) -> CodeSpec {
    s.parse().unwrap()
}

fn worst(s: &str, n: usize) -> DelayReport {
    codebook_worst_delay(&spec(s).codebook(n).unwrap(), tables()).unwrap()
}

/// Independent per-wire delay: build each window pattern explicitly and
/// solve it, flipping falling wires to rising by complement.
fn oracle_wire_delays(u: u64, v: u64, n: usize, params: &BusParams) -> Vec<f64> {
    let s = transition_symbols(u, v, n);
    let solve = |symbols: Vec<TransitionSymbol>, examined: usize| -> f64 {
        let p = TransitionPattern::new(symbols, examined).unwrap();
        match p.examined_symbol() {
            TransitionSymbol::Hold => 0.0,
            TransitionSymbol::Up => pattern_delay(&p, params).unwrap(),
            TransitionSymbol::Down => pattern_delay(&p.complement(), params).unwrap(),
        }
    };
    let left: Vec<_> = s[..4].to_vec();
    let right: Vec<_> = s[n - 4..].iter().rev().copied().collect();
    (1..=n)
        .map(|k| match k {
            1 => solve(left.clone(), 1),
            2 => solve(left.clone(), 2),
            _ if k == n => solve(right.clone(), 1),
            _ if k == n - 1 => solve(right.clone(), 2),
            _ => solve(s[k - 3..k + 2].to_vec(), 3),
        })
        .collect()
}

#[test]
fn pair_delays_match_direct_solves() {
    let params = BusParams::default();
    for (u, v, n) in [
        (0b01010u64, 0b10101u64, 5),
        (0b0110011, 0b1001100, 7),
        (0b1111000011, 0b0000111100, 10),
        (0b100000, 0b000001, 6),
    ] {
        let got = pair_wire_delays(u, v, n, tables()).unwrap();
        let want = oracle_wire_delays(u, v, n, &params);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{u:b}->{v:b}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn pair_delay_examples() {
    let d = pair_wire_delays(0b01010, 0b10101, 5, tables()).unwrap();
    assert!((d[2] - 58.4526).abs() < 1e-3, "middle {}", d[2]);
    let d = pair_wire_delays(0, 0b11111, 5, tables()).unwrap();
    assert!(d.iter().all(|&x| (1.07..=1.56).contains(&x)), "{d:?}");
    assert_eq!(pair_wire_delays(9, 9, 5, tables()).unwrap(), vec![0.0; 5]);
    assert!(pair_wire_delays(0, 1, 4, tables()).is_err());
}

#[test]
fn two_word_codebook() {
    let cb = Codebook::new(5, [0, 31], Provenance::Classic(ClassicFamily::Olc), 0).unwrap();
    let r = codebook_worst_delay(&cb, tables()).unwrap();
    // wire 1 ↑↑↑↑ and wire 3 ↑↑↑↑↑ are both the fastest class; wire 2 ↑↑↑↑
    // is slightly slower on the four-wire model
    assert!(r.worst_delay_ps < 1.56 && r.worst_delay_ps > 1.07);
    let one = Codebook::new(5, [0], Provenance::Classic(ClassicFamily::Olc), 0).unwrap();
    assert!(codebook_worst_delay(&one, tables()).is_err());
}

#[test]
fn model_ordering() {
    for n in [10, 16] {
        let (i, c, o) = (worst("IOLC", n), worst("C2,1C", n), worst("OLC", n));
        assert!(i.worst_delay_ps < c.worst_delay_ps, "n={n}");
        assert!(c.worst_delay_ps < o.worst_delay_ps, "n={n}");
        assert!(i.side_worst() <= c.side_worst(), "n={n}");
    }
    // frozen model values at the default parameters
    let r = worst("IOLC", 10);
    assert!((r.worst_delay_ps - 9.6669).abs() < 1e-3);
    assert_eq!(r.worst_wire, 1);
    assert!((worst("C2,1C", 10).worst_delay_ps - 13.0952).abs() < 1e-3);
    assert!((worst("OLC", 16).worst_delay_ps - 14.0442).abs() < 1e-3);
}

#[test]
fn reported_pairs_belong_to_codebook() {
    for (s, n) in [("IOLC", 10), ("C2,1C", 16), ("OLC", 12), ("C5,3C", 9)] {
        let cb = spec(s).codebook(n).unwrap();
        let r = codebook_worst_delay(&cb, tables()).unwrap();
        let max = r.wires.iter().map(|w| w.worst_delay_ps).fold(0.0, f64::max);
        assert_eq!(r.worst_delay_ps, max);
        for w in &r.wires {
            let u = u64::from_str_radix(&w.from_word, 2).unwrap();
            let v = u64::from_str_radix(&w.to_word, 2).unwrap();
            assert!(u != v && cb.contains(u) && cb.contains(v));
            let d = pair_wire_delays(u, v, n, tables()).unwrap();
            assert_eq!(d[w.wire_index - 1], w.worst_delay_ps);
        }
    }
}

#[test]
fn slice_evaluation_equals_exhaustive() {
    for (s, n) in [
        ("IOLC", 16),
        ("C2,1C", 12),
        ("OLC", 16),
        ("FPC", 11),
        ("C5,3C", 10),
        ("FTC", 9),
    ] {
        let cb = spec(s).codebook(n).unwrap();
        let a = codebook_worst_delay_exhaustive(&cb, tables()).unwrap();
        let b = codebook_worst_delay_by_slices(&cb, tables()).unwrap();
        assert_eq!(a, b, "{s} n={n}");
    }
}

#[test]
fn worst_within_class_bounds() {
    // A codebook under (Ci,jC) stays below the slowest member of Ci on
    // middle wires and of jC on edge wires.
    let params = BusParams::default();
    let golden = GoldenTables::embedded();
    let middle = classify_middle(&params, &golden).unwrap();
    let (w2, w1) = classify_side(&params, &golden).unwrap();
    let class_max = |t: &ClassificationTable, i: u8| {
        t.class_intervals()
            .into_iter()
            .filter(|(c, _, _)| c.index <= i)
            .map(|(_, _, hi)| hi)
            .fold(0.0, f64::max)
    };
    for c in [
        ConstraintConfig::C2_1C,
        ConstraintConfig::C3_1C,
        ConstraintConfig::C4_2C,
        ConstraintConfig::C5_3C,
    ] {
        for n in [6, 10, 13] {
            let r = worst(&c.to_string(), n);
            let mid = r.worst_over(&(3..=n - 2).collect::<Vec<_>>());
            assert!(mid <= class_max(&middle, c.middle) + 1e-9, "{c} n={n}");
            let side_limit = class_max(&w2, c.side).max(class_max(&w1, c.side));
            assert!(r.side_worst() <= side_limit + 1e-9, "{c} n={n}");
        }
    }
}

#[test]
fn metrics_examples() {
    let olc = |n| spec("OLC").codebook(n).unwrap();
    let m = metrics(&spec("IOLC").codebook(5).unwrap(), &olc(5), tables()).unwrap();
    assert_eq!((m.size, m.bits), (4, 2));
    assert!((m.rate - 0.4).abs() < 1e-12);
    let m = metrics(&spec("C2,1C").codebook(13).unwrap(), &olc(13), tables()).unwrap();
    assert_eq!((m.size, m.bits), (32, 5));
    let m = metrics(&olc(16), &olc(16), tables()).unwrap();
    assert_eq!((m.size, m.bits), (151, 7));
    assert!((m.gain.unwrap() - 1.0).abs() < 1e-12);
    assert!(metrics(&olc(8), &olc(9), tables()).is_err());
}

#[test]
fn model_throughput_gains() {
    // With model delays the pruned code is ahead of OLC except where it
    // carries one bit fewer: gain (k-1)/k · 14.044/9.667.
    let codes: Vec<(CodeSpec, usize)> = (5..=16).map(|n| (CodeSpec::Iolc, n)).collect();
    let r = report(&codes, tables()).unwrap();
    let below: Vec<usize> = r
        .codes
        .iter()
        .filter(|c| c.metrics.gain.unwrap() <= 1.0)
        .map(|c| c.metrics.width)
        .collect();
    assert_eq!(below, [6, 7, 13, 14]);
    let at6 = r.codes[1].metrics.gain.unwrap();
    assert!((at6 - 2.0 / 3.0 * 14.0442 / 9.6669).abs() < 1e-3);
}

#[test]
fn report_shapes() {
    assert_eq!(report(&[], tables()).unwrap(), Report::default());
    let codes: Vec<(CodeSpec, usize)> = ["IOLC", "C2,1C", "OLC"]
        .iter()
        .map(|s| (spec(s), 10))
        .collect();
    let r = report(&codes, tables()).unwrap();
    assert_eq!(r.wires_csv().lines().count(), 1 + 30);
    assert_eq!(r.summary_csv().lines().count(), 1 + 3);
    assert_eq!(r.codes[0].delays.to_csv().lines().count(), 1 + 10);
    let table = r.size_table_csv();
    assert_eq!(table.lines().nth(1).unwrap().split(',').count(), 9);
    assert!(table.lines().nth(1).unwrap().starts_with("10,12,3,"));
    let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(json["codes"].as_array().unwrap().len(), 3);
    // same inputs, same bytes
    assert_eq!(
        report(&codes, tables()).unwrap().to_json().unwrap(),
        r.to_json().unwrap()
    );

    let sizes: Vec<(CodeSpec, usize)> = (5..=16)
        .flat_map(|n| ["IOLC", "C2,1C", "OLC"].map(|s| (spec(s), n)))
        .collect();
    let t = report(&sizes, tables()).unwrap().size_table_csv();
    assert_eq!(t.lines().count(), 1 + 12);
    assert!(t.lines().last().unwrap().starts_with("16,41,5,"));
    assert!(t.lines().last().unwrap().ends_with(",151,7"));
}

#[test]
fn exhaustive_olc16_is_fast() {
    let cb = spec("OLC").codebook(16).unwrap();
    let start = std::time::Instant::now();
    let r = codebook_worst_delay_exhaustive(&cb, tables()).unwrap();
    assert_eq!(r.size, 151);
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

proptest! {
    #[test]
    fn complement_and_reverse_symmetry(u in 0u64..1 << 9, v in 0u64..1 << 9) {
        let n = 9;
        let mask = (1 << n) - 1;
        let d = pair_wire_delays(u, v, n, tables()).unwrap();
        let c = pair_wire_delays(!u & mask, !v & mask, n, tables()).unwrap();
        prop_assert_eq!(&d, &c);
        let rev = |w: u64| w.reverse_bits() >> (64 - n);
        let mut r = pair_wire_delays(rev(u), rev(v), n, tables()).unwrap();
        r.reverse();
        for (a, b) in d.iter().zip(&r) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let back = pair_wire_delays(v, u, n, tables()).unwrap();
        prop_assert_eq!(d.iter().filter(|&&x| x == 0.0).count(), back.iter().filter(|&&x| x == 0.0).count());
    }
}
