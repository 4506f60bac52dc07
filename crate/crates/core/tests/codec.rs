use std::sync::Arc;

use cwac_core::codec::stream::{decode_stream, encode_stream};
use cwac_core::codec::{ConcatenatedCode, Field, RsCode};
use proptest::prelude::*;

fn rs(bits: u32, n: usize, k: usize) -> RsCode {
    RsCode::new(Arc::new(Field::new(bits).unwrap()), n, k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_inverse_and_distributivity(bits in 1..=16u32, a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
        let f = Field::new(bits).unwrap();
        let mask = (f.size() - 1) as u16;
        let (a, b, c) = (a & mask, b & mask, c & mask);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn rs_corrects_errors_and_erasures(
        msg in proptest::collection::vec(0u16..16, 5),
        seed in any::<u64>(),
    ) {
        // GF(16), n = 15, k = 5: 2e + s <= 10
        let code = rs(4, 15, 5);
        let word = code.encode(&msg).unwrap();
        let mut received = word.clone();
        let erasures: Vec<usize> = (0..4).map(|i| (seed as usize >> (4 * i)) % 15).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let errors: Vec<usize> = (0..15).filter(|i| !erasures.contains(i)).filter(|i| (seed >> (32 + i)) & 1 == 1).take((10 - erasures.len()) / 2).collect();
        for &i in erasures.iter().chain(&errors) {
            received[i] ^= 1 + (i as u16 % 15);
        }
        let out = code.decode(&received, &erasures).unwrap();
        prop_assert_eq!(out.message, msg);
        prop_assert_eq!(out.codeword, word);
    }

    #[test]
    fn stream_round_trip(bytes in proptest::collection::vec(any::<u8>(), 0..40), k in 1..=3usize) {
        let code = ConcatenatedCode::new(6, 3, 2, 3, k).unwrap();
        let s = encode_stream(&code, &bytes).unwrap();
        let d = decode_stream(&code, &s).unwrap();
        prop_assert_eq!(d.bytes, bytes);
    }
}

#[test]
fn code_description_is_stable() {
    let code = ConcatenatedCode::new(8, 4, 2, 7, 3).unwrap();
    let json = serde_json::to_string(&code.description()).unwrap();
    let back: cwac_core::codec::CodeDescription = serde_json::from_str(&json).unwrap();
    let again = ConcatenatedCode::from_description(&back).unwrap();
    assert_eq!(again.encode(&[1, 2, 3]).unwrap(), code.encode(&[1, 2, 3]).unwrap());
}

#[test]
fn lifting_with_unit_weight() {
    // w = 1 columns carry the outer symbols directly as positions
    let code = ConcatenatedCode::new(8, 1, 1, 7, 3).unwrap();
    assert_eq!(code.bits(), 3);
    let word = code.encode(&[5, 0, 7]).unwrap();
    assert!(word.columns().iter().all(|c| c.weight() == 1));
    let out = code.decode(word.columns()).unwrap();
    assert_eq!(out.message, Some(vec![5, 0, 7]));
}
