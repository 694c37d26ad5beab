use mfnear::boolfun::{is_bent, is_maiorana_mcfarland, TruthTable};
use mfnear::gf2::{enumerate_subspaces, AffineSubspace, Gf2Matrix, LinearSubspace};
use mfnear::mmf::{
    compose_subspace, decompose_subspace, h_solution_space, image_subspace_count, lambda_count, member_of_mf_u,
    near_count, near_enumerate, realize_all, realize_near, MMFunction, Permutation,
};
use mfnear::oracle::{near_brute, trial_rng};
use proptest::prelude::*;

fn flat(m: usize, k: usize) -> impl Strategy<Value = AffineSubspace> {
    (prop::collection::vec(0u32..(1 << m), k), 0u32..(1 << m))
        .prop_map(move |(g, b)| AffineSubspace::new(b, LinearSubspace::span(&g, m).unwrap()).unwrap())
        .prop_filter("full dimension", move |u| u.dim() == k)
}

proptest! {
    #[test]
    fn decompose_then_compose(u in (1usize..=4).prop_flat_map(|n| flat(2 * n, n))) {
        let t = decompose_subspace(&u).unwrap();
        prop_assert_eq!(t.l.dim() + t.r.dim(), u.dim());
        prop_assert_eq!(compose_subspace(&t).unwrap(), u);
    }

    #[test]
    fn near_count_matches_enumeration(seed in any::<u64>()) {
        let g = MMFunction::random(3, &mut trial_rng(seed, 0)).unwrap();
        let w = near_enumerate(&g).unwrap();
        prop_assert_eq!(near_count(&g).unwrap(), w.len() as u64);
        prop_assert!(w.len() as u64 >= lambda_count(3) + 32 * image_subspace_count(g.pi(), 2).unwrap() as u64);
    }
}

#[test]
fn small_builds() {
    let g = MMFunction::new(Permutation::identity(1).unwrap(), TruthTable::zero(1).unwrap()).unwrap();
    assert_eq!(g.table(), TruthTable::from_fn(2, |v| v == 3).unwrap());
    let x = AffineSubspace::linear(LinearSubspace::span(&[1, 2, 4], 6).unwrap());
    let t = decompose_subspace(&x).unwrap();
    assert_eq!((t.l.dim(), t.r.dim()), (0, 3));
    let mut rng = trial_rng(3, 0);
    for _ in 0..20 {
        let g = MMFunction::random(3, &mut rng).unwrap();
        assert!(is_bent(&g.table()).unwrap());
        assert!(member_of_mf_u(&g, &x).unwrap());
    }
}

#[test]
fn identity_matches_brute_at_six() {
    let g = MMFunction::new(Permutation::identity(3).unwrap(), TruthTable::zero(3).unwrap()).unwrap();
    let mut realized = realize_all(&g, &near_enumerate(&g).unwrap());
    realized.sort();
    assert_eq!(realized, near_brute(&g.table()).unwrap());
    // every affine subspace is in A_k for the identity
    for k in 0..=3 {
        assert_eq!(image_subspace_count(g.pi(), k).unwrap(), enumerate_subspaces(3, k, true).unwrap().count());
    }
}

#[test]
fn solution_space_sizes() {
    let mut rng = trial_rng(5, 0);
    for _ in 0..10 {
        let g = MMFunction::random(3, &mut rng).unwrap();
        for l in enumerate_subspaces(3, 1, true).unwrap() {
            assert_eq!(h_solution_space(&g, &l).unwrap().count(), 4);
        }
    }
    // phi-sum at k = 3 over all 256 restrictions
    let pi = Permutation::identity(3).unwrap();
    let whole = AffineSubspace::whole(3).unwrap();
    let total: u64 = (0u32..256)
        .map(|bits| {
            let phi = TruthTable::from_fn(3, |y| bits >> y & 1 == 1).unwrap();
            h_solution_space(&MMFunction::new(pi.clone(), phi).unwrap(), &whole).unwrap().count()
        })
        .sum();
    assert_eq!(total, 1 << 16);
}

#[test]
fn low_dimension_witnesses_stay_in_mf() {
    let mut rng = trial_rng(9, 0);
    for _ in 0..10 {
        let g = MMFunction::random(3, &mut rng).unwrap();
        for w in near_enumerate(&g).unwrap() {
            let t = realize_near(&g, &w).unwrap();
            assert_eq!(is_maiorana_mcfarland(&t), w.dim() <= 1, "dim {}", w.dim());
        }
    }
}

#[test]
fn linear_pi_bound_at_eight() {
    let a = Gf2Matrix::from_rows(vec![0b0011, 0b0110, 0b1100, 0b1001 ^ 0b0001], 4).unwrap();
    assert!(a.is_invertible());
    let g = MMFunction::new(Permutation::affine(&a, 0).unwrap(), TruthTable::zero(4).unwrap()).unwrap();
    let a2 = image_subspace_count(g.pi(), 2).unwrap() as u64;
    assert_eq!(a2, 140);
    assert!(near_count(&g).unwrap() >= lambda_count(4) + 32 * a2);
}
