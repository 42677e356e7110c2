mod common;

use std::cmp::Ordering;

use common::{designation, oracle, raw_string};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specforge::collation::{compare, signature, sort_designations, structure_frequencies, tokenize, CollationError};

fn gen(seed: u64, n: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| designation(&mut rng)).collect()
}

#[test]
fn rule_examples() {
    assert_eq!(compare("2", "10"), Ordering::Less);
    assert_eq!(compare("5", "IV"), Ordering::Less);
    assert_eq!(compare("Б1", "B1"), Ordering::Less);
    assert_eq!(compare("A", "a"), Ordering::Less);
    assert_eq!(compare("A1", "A1"), Ordering::Equal);
    assert_eq!(compare("IV", "X"), Ordering::Less);
    assert_eq!(compare("Е1", "Ё1"), Ordering::Less);
    assert_eq!(compare("Ё1", "Ж1"), Ordering::Less);
    assert_eq!(compare("2-1", "2/1"), Ordering::Less);
}

#[test]
fn blank_input_does_not_tokenize() {
    assert_eq!(tokenize("  "), Err(CollationError::Empty));
    assert_eq!(tokenize(""), Err(CollationError::Empty));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_the_oracle(seed in any::<u64>()) {
        let items = gen(seed, 3);
        for a in &items {
            for b in &items {
                prop_assert_eq!(compare(a, b), oracle::key(a).cmp(&oracle::key(b)), "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn antisymmetric_and_transitive(seed in any::<u64>()) {
        let v = gen(seed, 3);
        for (x, y, z) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            let (a, b, c) = (&v[x], &v[y], &v[z]);
            prop_assert_eq!(compare(a, b), compare(b, a).reverse());
            prop_assert_eq!(compare(a, b) == Ordering::Equal, a == b);
            if compare(a, b) != Ordering::Greater && compare(b, c) != Ordering::Greater {
                prop_assert_ne!(compare(a, c), Ordering::Greater, "{} {} {}", a, b, c);
            }
        }
    }

    #[test]
    fn sort_agrees_with_oracle(seed in any::<u64>(), n in 0usize..60) {
        let mut got = gen(seed, n);
        let mut want = got.clone();
        sort_designations(&mut got);
        want.sort_by_key(|d| oracle::key(d));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn tokenizer_is_lossless(seed in any::<u64>()) {
        let s = raw_string(&mut ChaCha8Rng::seed_from_u64(seed));
        match tokenize(&s) {
            Ok(t) => {
                prop_assert_eq!(t.reassemble(), s);
                prop_assert!(t.parts.iter().all(|p| !p.is_empty()));
            }
            Err(_) => prop_assert!(s.trim().is_empty()),
        }
    }

    #[test]
    fn frequencies_count_every_designation(seed in any::<u64>(), n in 1usize..40) {
        let items = gen(seed, n);
        let total: usize = structure_frequencies(&items).iter().map(|(_, c)| c).sum();
        prop_assert_eq!(total, items.iter().filter(|d| signature(d).is_ok()).count());
    }
}
