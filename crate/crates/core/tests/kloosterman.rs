use gl3gps::kernels::KernelTag;
use gl3gps::kloosterman::{
    kloosterman_bruteforce, kloosterman_fast, CharacterIndex, KloostermanValue, Modulus,
};
use proptest::prelude::*;
use serde::Deserialize;

const CELLS: [KernelTag; 3] = [KernelTag::W4, KernelTag::W5, KernelTag::Wl];

fn ci(m: (i64, i64)) -> CharacterIndex {
    CharacterIndex::new(m.0, m.1).unwrap()
}

/// Sixteen pairs drawn from `{±1, ±2}^2`, covering every sign pattern.
fn character_pairs() -> Vec<(CharacterIndex, CharacterIndex)> {
    let ms = [(1, 1), (-1, 2), (2, -1), (-2, -2)];
    let ns = [(1, 1), (2, 1), (-1, -2), (1, -2)];
    ms.iter().flat_map(|&m| ns.iter().map(move |&n| (ci(m), ci(n)))).collect()
}

fn agree(a: &KloostermanValue, b: &KloostermanValue) -> bool {
    a.terms == b.terms && (a.value - b.value).norm() <= 1e-10
}

#[test]
fn fast_matches_bruteforce() {
    let mut cases = 0;
    for w in CELLS {
        for c1 in 1..=8 {
            for c2 in 1..=8 {
                let c = Modulus::new(c1, c2).unwrap();
                for (m, n) in character_pairs() {
                    let slow = kloosterman_bruteforce(w, m, n, c).unwrap();
                    let fast = kloosterman_fast(w, m, n, c);
                    assert!(agree(&slow, &fast), "{w} {m:?} {n:?} {c:?}: {slow:?} vs {fast:?}");
                    assert!(fast.value.norm() <= fast.terms as f64 + 1e-9);
                    cases += 1;
                }
            }
        }
    }
    assert_eq!(cases, 3 * 64 * 16);
}

#[derive(Deserialize)]
struct FixtureRow {
    w: String,
    m: [i64; 2],
    n: [i64; 2],
    c: [i64; 2],
    re: f64,
    im: f64,
    terms: u64,
}

#[test]
fn recorded_values() {
    let text = include_str!("fixtures/kloosterman.json");
    let rows: Vec<FixtureRow> = serde_json::from_str(text).unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        let w: KernelTag = row.w.parse().unwrap();
        let c = Modulus::new(row.c[0], row.c[1]).unwrap();
        let (m, n) = (ci((row.m[0], row.m[1])), ci((row.n[0], row.n[1])));
        let s = kloosterman_bruteforce(w, m, n, c).unwrap();
        assert_eq!(s.terms, row.terms, "{}", row.w);
        assert!((s.value.re - row.re).abs() < 1e-10 && (s.value.im - row.im).abs() < 1e-10);
    }
}

#[test]
fn coprime_moduli_count() {
    // for coprime c1, c2 the long-element cell has phi(c1) phi(c2) cosets
    let phi = |n: i64| (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count() as u64;
    for (c1, c2) in [(2, 3), (5, 7), (4, 9), (8, 15)] {
        let s = kloosterman_fast(KernelTag::Wl, ci((1, 1)), ci((1, 1)), Modulus::new(c1, c2).unwrap());
        assert_eq!(s.terms, phi(c1) * phi(c2), "c = ({c1}, {c2})");
    }
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-5i64..=-1, 1i64..=5]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn conjugate_characters(w in 0usize..3, m1 in nonzero(), m2 in nonzero(), n1 in nonzero(),
                            n2 in nonzero(), c1 in 1i64..10, c2 in 1i64..10) {
        let (m, n) = (ci((m1, m2)), ci((n1, n2)));
        let c = Modulus::new(c1, c2).unwrap();
        let s = kloosterman_fast(CELLS[w], m, n, c);
        let t = kloosterman_fast(CELLS[w], m.neg(), n.neg(), c);
        prop_assert!((s.value - t.value.conj()).norm() < 1e-10);
        prop_assert!(s.value.norm() <= s.terms as f64 + 1e-9);
    }
}
