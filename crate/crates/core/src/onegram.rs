//! The classical 1-gram inter-textual distance.
//!
//! For equal-length texts this is the sum of absolute word-frequency
//! differences, normalized by the combined length. For unequal lengths the
//! longer text's frequencies are scaled down by the length ratio and the sum
//! is normalized by twice the shorter length. Both variants lie in [0, 1];
//! the orientation is canonicalized so the operation is symmetric.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::text::{frequency, FrequencyTable, Text};

fn check_non_empty(t: &Text) -> Result<()> {
    if t.is_empty() {
        return Err(Error::EmptyText {
            id: t.id().to_owned(),
        });
    }
    Ok(())
}

/// Iterates the union of both vocabularies exactly once.
fn union_counts<'a>(
    fa: &'a FrequencyTable,
    fb: &'a FrequencyTable,
) -> impl Iterator<Item = (usize, usize)> + 'a {
    let in_a = fa.iter().map(move |(w, ca)| (ca, fb.count(w)));
    let only_b = fb
        .iter()
        .filter(move |(w, _)| !fa.contains(w))
        .map(|(_, cb)| (0, cb));
    in_a.chain(only_b)
}

/// 1-gram distance between two non-empty texts, in [0, 1].
pub fn onegram_distance(a: &Text, b: &Text) -> Result<f64> {
    check_non_empty(a)?;
    check_non_empty(b)?;
    // Canonical orientation: the shorter text provides the normalization.
    let (s, l) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let (fs, fl) = (frequency(s), frequency(l));
    let (ns, nl) = (s.len(), l.len());
    if ns == nl {
        let sum: u64 = union_counts(&fs, &fl)
            .map(|(cs, cl)| (cs as i64 - cl as i64).unsigned_abs())
            .sum();
        Ok(sum as f64 / (ns + nl) as f64)
    } else {
        let ratio = ns as f64 / nl as f64;
        let sum: f64 = union_counts(&fs, &fl)
            .map(|(cs, cl)| (cs as f64 - cl as f64 * ratio).abs())
            .sum();
        // The exact value cannot exceed 1; rounding in the scaled sum can
        // land an ulp above it.
        Ok((sum / (2 * ns) as f64).min(1.0))
    }
}

/// Exact-rational 1-gram distance; the same value as [`onegram_distance`]
/// with no floating-point rounding.
pub fn onegram_distance_exact(a: &Text, b: &Text) -> Result<Ratio<u64>> {
    check_non_empty(a)?;
    check_non_empty(b)?;
    let (s, l) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let (fs, fl) = (frequency(s), frequency(l));
    let (ns, nl) = (s.len() as u64, l.len() as u64);
    if ns == nl {
        let sum: u64 = union_counts(&fs, &fl)
            .map(|(cs, cl)| (cs as i64 - cl as i64).unsigned_abs())
            .sum();
        Ok(Ratio::new(sum, ns + nl))
    } else {
        // |cs - cl * ns/nl| / (2 ns)  ==  |cs*nl - cl*ns| / (2 ns nl)
        let sum: u64 = union_counts(&fs, &fl)
            .map(|(cs, cl)| (cs as i64 * nl as i64 - cl as i64 * ns as i64).unsigned_abs())
            .sum();
        Ok(Ratio::new(sum, 2 * ns * nl))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, TokenizeOptions};
    use proptest::prelude::*;

    fn text(id: &str, raw: &str) -> Text {
        tokenize(id, raw, &TokenizeOptions::default()).unwrap()
    }

    #[test]
    fn identical_texts_are_at_distance_zero() {
        let a = text("a", "man bites dog");
        assert_eq!(onegram_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_equal_length_texts_are_at_distance_one() {
        let a = text("a", "aa bb");
        let b = text("b", "cc dd");
        assert_eq!(onegram_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn scaled_unequal_lengths_proportional_frequencies() {
        // |1 - 2*(2/4)| = 0 for both words.
        let a = text("a", "aa bb");
        let b = text("b", "aa aa bb bb");
        assert_eq!(onegram_distance(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn scaled_unequal_lengths_disjoint() {
        // |1-0| + |0 - 2*(1/2)| = 2, over 2*N_A = 2.
        let a = text("a", "aa");
        let b = text("b", "bb bb");
        assert_eq!(onegram_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn empty_text_is_a_domain_error() {
        let a = text("a", "");
        let b = text("b", "dog");
        assert!(matches!(
            onegram_distance(&a, &b),
            Err(Error::EmptyText { .. })
        ));
        assert!(matches!(
            onegram_distance(&b, &a),
            Err(Error::EmptyText { .. })
        ));
    }

    #[test]
    fn exact_mode_matches_float_mode() {
        let a = text("a", "aa bb cc aa");
        let b = text("b", "bb bb dd");
        let float = onegram_distance(&a, &b).unwrap();
        let exact = onegram_distance_exact(&a, &b).unwrap();
        let as_float = *exact.numer() as f64 / *exact.denom() as f64;
        assert!((float - as_float).abs() < 1e-15);
    }

    fn word() -> impl Strategy<Value = String> {
        "[a-d]{2}"
    }

    fn words(max: usize) -> impl Strategy<Value = Vec<String>> {
        proptest::collection::vec(word(), 1..max)
    }

    fn equal_length_pair(max: usize) -> impl Strategy<Value = (Vec<String>, Vec<String>)> {
        (1..max).prop_flat_map(|n| {
            (
                proptest::collection::vec(word(), n),
                proptest::collection::vec(word(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn symmetric_and_in_range(a in words(30), b in words(30)) {
            let ta = text("a", &a.join(" "));
            let tb = text("b", &b.join(" "));
            let ab = onegram_distance(&ta, &tb).unwrap();
            let ba = onegram_distance(&tb, &ta).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn zero_iff_equal_multisets((a, b) in equal_length_pair(20)) {
            let ta = text("a", &a.join(" "));
            let tb = text("b", &b.join(" "));
            let d = onegram_distance(&ta, &tb).unwrap();
            let mut ma = a.clone();
            let mut mb = b.clone();
            ma.sort();
            mb.sort();
            prop_assert_eq!(d == 0.0, ma == mb);
        }

        #[test]
        fn invariant_under_token_permutation(a in words(20), b in words(20), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = a.clone();
            shuffled.shuffle(&mut rng);
            let ta = text("a", &a.join(" "));
            let ts = text("s", &shuffled.join(" "));
            let tb = text("b", &b.join(" "));
            prop_assert_eq!(
                onegram_distance(&ta, &tb).unwrap(),
                onegram_distance(&ts, &tb).unwrap()
            );
        }
    }
}
