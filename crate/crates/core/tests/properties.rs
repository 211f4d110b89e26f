use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use subshift_core::matrix::{rational_rank, IntegerMatrix};
use subshift_core::seqgen::{keane_product, morse_window};
use subshift_core::snf::smith_normal_form;
use subshift_core::{factors, LanguageTable, MorseSpec, Word};

fn binary_word(max: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(prop_oneof![Just(b'0'), Just(b'1')], 1..=max).prop_map(Word::from)
}

fn morse_block() -> impl Strategy<Value = Word> {
    binary_word(3).prop_map(|tail| Word::from_bytes(b"0").concat(&tail))
}

fn morse_language() -> impl Strategy<Value = LanguageTable> {
    proptest::collection::vec(morse_block(), 1..=3).prop_map(|blocks| {
        let spec = MorseSpec::new(blocks, true).unwrap();
        factors(&morse_window(&spec, 256).unwrap(), 8).unwrap()
    })
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::from(1);
    }
    let mut total = BigInt::zero();
    for (j, x) in m[0].iter().enumerate() {
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect()).collect();
        let term = x * det(&minor);
        total += if j % 2 == 0 { term } else { -term };
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| {
            s.push(last);
            s
        }))
        .collect()
}

/// gcd of all k×k minors.
fn determinantal_divisor(a: &[Vec<i64>], k: usize) -> BigInt {
    let (r, c) = (a.len(), a[0].len());
    let mut g = BigInt::zero();
    for rs in subsets(r, k) {
        for cs in subsets(c, k) {
            let minor: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| BigInt::from(a[i][j])).collect()).collect();
            g = g.gcd(&det(&minor));
        }
    }
    g
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-12i64..=12, c), r))
}

proptest! {
    #[test]
    fn keane_product_is_associative(a in binary_word(4), b in binary_word(4), c in binary_word(4)) {
        let left = keane_product(&keane_product(&a, &b).unwrap(), &c).unwrap();
        let right = keane_product(&a, &keane_product(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn factors_are_closed_and_extendable(lang in morse_language()) {
        for n in 1..lang.max_len() {
            for w in lang.words(n + 1) {
                prop_assert!(lang.contains(&w[1..]) && lang.contains(&w[..n]));
            }
            for w in lang.words(n) {
                prop_assert!(lang.symbols().iter().any(|&a| lang.contains(&w.concat(&[a]))));
                prop_assert!(lang.symbols().iter().any(|&b| lang.contains(&Word::from_bytes(&[b]).concat(&w))));
            }
        }
    }

    #[test]
    fn complexity_is_monotone(lang in morse_language()) {
        for n in 0..lang.max_len() {
            prop_assert!(lang.complexity(n).unwrap() <= lang.complexity(n + 1).unwrap());
        }
    }

    #[test]
    fn smith_divisors_match_determinantal_divisors(a in small_matrix()) {
        let snf = smith_normal_form(&IntegerMatrix::from_rows(a.clone()));
        prop_assert!(snf.verify(&IntegerMatrix::from_rows(a.clone()).to_big()));
        let mut prefix = BigInt::from(1);
        for k in 1..=a.len().min(a[0].len()) {
            let dk = determinantal_divisor(&a, k);
            match snf.divisors.get(k - 1) {
                Some(d) => {
                    prefix *= d;
                    prop_assert_eq!(&prefix, &dk.abs());
                }
                None => prop_assert!(dk.is_zero()),
            }
        }
    }

    #[test]
    fn rank_duality(a in small_matrix()) {
        let m = IntegerMatrix::from_rows(a);
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.rank, rational_rank(&m));
        prop_assert_eq!(snf.rank + snf.kernel_rank, m.cols());
        prop_assert_eq!(snf.rank + snf.cokernel_free_rank, m.rows());
    }
}
