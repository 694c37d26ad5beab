use mfnear::gf2::{
    affine_hull_or_none, enumerate_subspaces, gaussian_binomial, AffineSubspace, BitVector, Gf2Matrix, IndexSet,
    LinearSubspace,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn subspace(width: usize) -> impl Strategy<Value = LinearSubspace> {
    prop::collection::vec(0u32..(1 << width), 0..=width).prop_map(move |g| LinearSubspace::span(&g, width).unwrap())
}

proptest! {
    #[test]
    fn orthogonal_is_an_involution(l in (1usize..=8).prop_flat_map(subspace)) {
        let perp = l.orthogonal();
        prop_assert_eq!(perp.dim() + l.dim(), l.ambient());
        prop_assert_eq!(perp.orthogonal(), l.clone());
        for a in l.elements() {
            for b in perp.elements() {
                prop_assert_eq!((a & b).count_ones() % 2, 0);
            }
        }
    }

    #[test]
    fn information_set_projects_onto(l in (1usize..=8).prop_flat_map(subspace)) {
        let info = l.information_set();
        prop_assert_eq!(info.len(), l.dim());
        let mut seen: Vec<u32> = l.elements().map(|v| info.project_bits(v)).collect();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), 1 << l.dim());
    }

    #[test]
    fn rref_keeps_the_row_space(rows in prop::collection::vec(0u32..64, 1..6)) {
        let m = Gf2Matrix::from_rows(rows.clone(), 6).unwrap();
        let (r, pivots) = m.rref();
        prop_assert_eq!(r.row_count(), m.rank());
        prop_assert_eq!(pivots.len(), m.rank());
        prop_assert_eq!(LinearSubspace::span(r.rows(), 6).unwrap(), LinearSubspace::span(&rows, 6).unwrap());
    }

    #[test]
    fn cosets_partition_the_space(l in (1usize..=6).prop_flat_map(subspace)) {
        let mut all: Vec<u32> = AffineSubspace::cosets(&l).flat_map(|c| c.points().collect::<Vec<_>>()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..1u32 << l.ambient()).collect::<Vec<_>>());
    }

    #[test]
    fn hull_of_a_flat_is_the_flat(l in (1usize..=6).prop_flat_map(subspace), base in 0u32..64) {
        let u = AffineSubspace::new(base & ((1 << l.ambient()) - 1), l.clone()).unwrap();
        let pts: Vec<BitVector> = u.points().map(|p| BitVector::new(p, l.ambient()).unwrap()).collect();
        prop_assert_eq!(affine_hull_or_none(&pts), Some(u));
    }
}

#[test]
fn gaussian_binomials() {
    assert_eq!(gaussian_binomial(5, 0), BigUint::from(1u32));
    assert_eq!(gaussian_binomial(4, 2), BigUint::from(35u32));
    assert_eq!(gaussian_binomial(2, 3), BigUint::from(0u32));
    assert_eq!(enumerate_subspaces(4, 2, false).unwrap().count(), 35);
    assert_eq!(enumerate_subspaces(3, 3, true).unwrap().count(), 1);
    assert_eq!(enumerate_subspaces(6, 3, true).unwrap().count(), 11160);
}

#[test]
fn small_examples() {
    let l = LinearSubspace::span(&[0b011, 0b101], 3).unwrap();
    assert_eq!(l.dim(), 2);
    assert_eq!(l.elements().count(), 4);
    let l = LinearSubspace::span(&[0b011, 0b100], 3).unwrap();
    assert_eq!(l.information_set().one_based(), vec![1, 3]);
    let perp = LinearSubspace::span(&[0b011], 3).unwrap().orthogonal();
    assert_eq!(perp.dim(), 2);
    assert!(perp.contains(0b100) && perp.contains(0b011));
    let set = IndexSet::from_one_based(&[2, 5], 5).unwrap();
    assert_eq!(set.project_bits(0b01101), 0);
    let set = IndexSet::from_one_based(&[1, 4], 4).unwrap();
    assert_eq!(set.embed_bits(0b11), 0b1001);
    let pts = |v: &[u32]| v.iter().map(|&p| BitVector::new(p, 3).unwrap()).collect::<Vec<_>>();
    assert_eq!(affine_hull_or_none(&pts(&[0, 1, 2, 3])).map(|u| u.dim()), Some(2));
    assert_eq!(affine_hull_or_none(&pts(&[0, 1, 2, 4])), None);
    assert_eq!(affine_hull_or_none(&pts(&[5])).map(|u| (u.dim(), u.base())), Some((0, 5)));
}
