use mfnear::boolfun::{
    ea_inverse, ea_transform, hamming_distance, is_affine_on, is_bent, walsh_transform, xor_indicator, AffineFunction,
    TruthTable,
};
use mfnear::gf2::{enumerate_subspaces, AffineSubspace, Gf2Matrix};
use proptest::prelude::*;

fn table(vars: usize) -> impl Strategy<Value = TruthTable> {
    prop::collection::vec(any::<bool>(), 1 << vars)
        .prop_map(move |bits| TruthTable::from_fn(vars, |x| bits[x as usize]).unwrap())
}

fn invertible(m: usize) -> impl Strategy<Value = Gf2Matrix> {
    prop::collection::vec(0u32..(1 << m), m)
        .prop_map(move |rows| Gf2Matrix::from_rows(rows, m).unwrap())
        .prop_filter("invertible", |a| a.is_invertible())
}

proptest! {
    #[test]
    fn parseval(f in (1usize..=10).prop_flat_map(table)) {
        let m = f.vars();
        prop_assert_eq!(walsh_transform(&f).parseval_sum(), 1i64 << (2 * m));
    }

    #[test]
    fn hex_round_trip(f in (0usize..=9).prop_flat_map(table)) {
        let hex = f.to_hex();
        prop_assert_eq!(TruthTable::from_hex(f.vars(), &hex).unwrap(), f);
    }

    #[test]
    fn ea_round_trip(f in table(6), a in invertible(6), shift in 0u32..64, lin in 0u32..64, c in any::<bool>()) {
        let h = AffineFunction { linear: lin, constant: c };
        let g = ea_transform(&f, &a, shift, h).unwrap();
        let (ai, si, hi) = ea_inverse(&a, shift, h).unwrap();
        prop_assert_eq!(ea_transform(&g, &ai, si, hi).unwrap(), f.clone());
        prop_assert_eq!(is_bent(&g).unwrap(), is_bent(&f).unwrap());
    }
}

#[test]
fn walsh_examples() {
    let zero = TruthTable::zero(2).unwrap();
    assert_eq!(walsh_transform(&zero).values(), &[4, 0, 0, 0]);
    let xy = TruthTable::from_fn(2, |v| v == 3).unwrap();
    assert!(walsh_transform(&xy).values().iter().all(|w| w.abs() == 2));
    let ip = TruthTable::from_fn(4, |v| ((v & 3) & (v >> 2)).count_ones() % 2 == 1).unwrap();
    assert!(is_bent(&ip).unwrap());
    let affine = TruthTable::from_fn(4, |v| (v & 0b1011).count_ones() % 2 == 0).unwrap();
    assert!(!is_bent(&affine).unwrap());
}

#[test]
fn flipping_flats() {
    let ip = TruthTable::from_fn(4, |v| ((v & 3) & (v >> 2)).count_ones() % 2 == 1).unwrap();
    let whole = AffineSubspace::whole(4).unwrap();
    assert_eq!(xor_indicator(&ip, &whole).unwrap(), ip.complement());
    let (mut good, mut bad) = (0, 0);
    for u in enumerate_subspaces(4, 2, true).unwrap() {
        let g = xor_indicator(&ip, &u).unwrap();
        assert_eq!(hamming_distance(&ip, &g).unwrap(), 4);
        if is_affine_on(&ip, &u).is_some() {
            assert!(is_bent(&g).unwrap());
            good += 1;
        } else {
            assert!(!is_bent(&g).unwrap());
            bad += 1;
        }
    }
    assert_eq!(good, 60);
    assert_eq!(good + bad, 140);
    for u in enumerate_subspaces(4, 1, true).unwrap() {
        assert!(is_affine_on(&ip, &u).is_some());
    }
}
