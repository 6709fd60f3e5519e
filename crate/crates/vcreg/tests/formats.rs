use proptest::prelude::*;
use vcreg::format::{hypergraph_from_str, hypergraph_to_string, MeasureJson};
use vcreg_core::rational::{self, Rational};
use vcreg_core::{Hypergraph, Measure};

fn relation() -> impl Strategy<Value = Hypergraph> {
    proptest::collection::vec(1usize..=4, 1..=3)
        .prop_flat_map(|sizes| {
            let total: usize = sizes.iter().product();
            (Just(sizes), proptest::collection::vec(any::<bool>(), total))
        })
        .prop_map(|(sizes, keep)| {
            Hypergraph::from_predicate(sizes.clone(), false, |t| {
                let idx = t.iter().zip(&sizes).fold(0, |acc, (&v, &n)| acc * n + v as usize);
                keep[idx]
            })
            .unwrap()
        })
}

proptest! {
    #[test]
    fn rationals_roundtrip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = Rational::new(n.into(), d.into());
        let text = rational::format(&r);
        prop_assert!(text.contains('/'));
        prop_assert_eq!(rational::parse(&text).unwrap(), r);
    }

    #[test]
    fn decimals_are_rejected(a in 0u32..100, b in 0u32..100) {
        let text = format!("{}.{}", a, b);
        prop_assert!(rational::parse(&text).is_err());
    }

    #[test]
    fn relations_roundtrip(h in relation()) {
        let back = hypergraph_from_str(&hypergraph_to_string(&h)).unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn measures_roundtrip(raw in proptest::collection::vec(0i64..20, 1..8)) {
        let total: i64 = raw.iter().sum();
        prop_assume!(total > 0);
        let m = Measure::new(0, raw.iter().map(|&w| rational::frac(w, total)).collect()).unwrap();
        let text = serde_json::to_string(&MeasureJson::from_measure(&m)).unwrap();
        let back: MeasureJson = serde_json::from_str(&text).unwrap();
        let back = back.to_measure().unwrap();
        prop_assert_eq!(back.weights(), m.weights());
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let err = hypergraph_from_str(r#"{"k": 1, "part_sizes": [2], "edges": [], "colour": 3}"#);
    assert!(err.is_err());
}

#[test]
fn weights_must_sum_to_one() {
    let m: MeasureJson = serde_json::from_str(r#"{"part": 0, "weights": ["1/2", "1/3"]}"#).unwrap();
    assert!(m.to_measure().is_err());
}
