//! Fragment enumeration, normal forms and the equality laws over random names.

use bvm_core::balg::{BoolAlg, Elem, Hom, HomSpec, Partition};
use bvm_core::gen;
use bvm_core::hf::HfSet;
use bvm_core::universe::{fragment_size, SetId, Universe, UniverseError};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn universe(n: usize) -> Universe {
    Universe::new(BoolAlg::new(n).unwrap())
}

/// Builds a name from a seed so proptest can shrink over seeds.
fn name(u: &Universe, seed: u64, rank: usize) -> SetId {
    gen::bv_name(&mut ChaCha8Rng::seed_from_u64(seed), u, rank)
}

#[test]
fn fragment_sizes_match_the_stage_count() {
    let u = universe(2);
    let sizes: Vec<usize> = (0..=4).map(|r| u.enumerate(r, 1 << 20).unwrap().len()).collect();
    assert_eq!(sizes, vec![0, 1, 4, 16, 256]);
    assert_eq!(fragment_size(5, 2), 1 << 32);
    assert_eq!(u.enumerate(5, 1 << 20), Err(UniverseError::CapExceeded { count: 1 << 32, cap: 1 << 20 }));
}

#[test]
fn fragment_members_are_pairwise_distinct_modulo_truth() {
    for n in 1..=3 {
        let u = universe(n);
        let v3 = u.enumerate(3, 1000).unwrap();
        for (i, &x) in v3.iter().enumerate() {
            for &y in &v3[i + 1..] {
                assert_ne!(u.truth_eq(x, y).unwrap(), u.algebra().one(), "{} and {} coincide", u.render(x).unwrap(), u.render(y).unwrap());
            }
        }
    }
}

#[test]
fn every_small_name_is_equal_to_exactly_one_fragment_member() {
    let u = universe(2);
    let v3 = u.enumerate(3, 1000).unwrap();
    let mut rng = gen::rng(5);
    for _ in 0..300 {
        let x = gen::bv_name(&mut rng, &u, 2);
        let matches: Vec<SetId> = v3.iter().copied().filter(|&m| u.same(m, x).unwrap()).collect();
        assert_eq!(matches.len(), 1);
        assert_eq!(u.canonical(x).unwrap(), matches[0]);
    }
}

#[test]
fn canonical_names_of_hf_sets_are_fragment_members() {
    let u = universe(2);
    let v4 = u.enumerate(4, 1000).unwrap();
    for h in HfSet::stage(4) {
        let x = u.canonical_name(&h);
        assert!(v4.contains(&x));
        for q in 0..2 {
            assert_eq!(u.collapse_at_atom(q, x).unwrap(), h);
        }
    }
}

#[test]
fn automorphic_images_preserve_truth() {
    let b = BoolAlg::new(2).unwrap();
    let u = Universe::new(b);
    let swap = Hom::new(&b, &b, HomSpec::Permutation(vec![1, 0])).unwrap();
    let v3 = u.enumerate(3, 1000).unwrap();
    for &x in &v3 {
        for &y in &v3 {
            let (sx, sy) = (u.pi_star(&swap, x, &u).unwrap(), u.pi_star(&swap, y, &u).unwrap());
            assert_eq!(u.truth_eq(sx, sy).unwrap(), swap.apply(u.truth_eq(x, y).unwrap()).unwrap());
            assert_eq!(u.truth_mem(sx, sy).unwrap(), swap.apply(u.truth_mem(x, y).unwrap()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent_and_truth_preserving(atoms in 1usize..=3, seed in any::<u64>()) {
        let u = universe(atoms);
        let x = name(&u, seed, 3);
        let nx = u.normalize(x).unwrap();
        prop_assert!(u.is_normalized(nx).unwrap());
        prop_assert_eq!(u.normalize(nx).unwrap(), nx);
        prop_assert!(u.same(x, nx).unwrap());
    }

    #[test]
    fn canonical_ids_decide_truth_equality(atoms in 1usize..=3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let u = universe(atoms);
        let (x, y) = (name(&u, s1, 2), name(&u, s2, 2));
        prop_assert_eq!(u.canonical(x).unwrap() == u.canonical(y).unwrap(), u.same(x, y).unwrap());
    }

    #[test]
    fn equality_laws_hold(atoms in 1usize..=3, s in any::<[u64; 3]>()) {
        let u = universe(atoms);
        let (x, y, z) = (name(&u, s[0], 3), name(&u, s[1], 3), name(&u, s[2], 3));
        let leq = |a: Elem, b: Elem| a.leq(b).unwrap();
        let meet = |a: Elem, b: Elem| a.meet(b).unwrap();
        prop_assert_eq!(u.truth_eq(x, x).unwrap(), u.algebra().one());
        prop_assert_eq!(u.truth_eq(x, y).unwrap(), u.truth_eq(y, x).unwrap());
        prop_assert!(leq(meet(u.truth_eq(x, y).unwrap(), u.truth_eq(y, z).unwrap()), u.truth_eq(x, z).unwrap()));
        prop_assert!(leq(meet(u.truth_eq(x, y).unwrap(), u.truth_mem(z, x).unwrap()), u.truth_mem(z, y).unwrap()));
        prop_assert!(leq(meet(u.truth_eq(x, y).unwrap(), u.truth_mem(x, z).unwrap()), u.truth_mem(y, z).unwrap()));
    }

    #[test]
    fn truth_values_agree_with_fibers(atoms in 1usize..=3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let u = universe(atoms);
        let (x, y) = (name(&u, s1, 3), name(&u, s2, 3));
        for q in 0..atoms {
            let (hx, hy) = (u.collapse_at_atom(q, x).unwrap(), u.collapse_at_atom(q, y).unwrap());
            prop_assert_eq!(u.truth_mem(x, y).unwrap().has_atom(q), hy.contains(&hx));
            prop_assert_eq!(u.truth_eq(x, y).unwrap().has_atom(q), hx == hy);
        }
    }

    #[test]
    fn scaling_identities(atoms in 1usize..=3, s1 in any::<u64>(), s2 in any::<u64>(), mask in any::<u64>()) {
        let u = universe(atoms);
        let b = u.algebra();
        let c = b.elem(mask & b.full_mask()).unwrap();
        let (x, y) = (name(&u, s1, 3), name(&u, s2, 3));
        let (cx, cy) = (u.scale(c, x).unwrap(), u.scale(c, y).unwrap());
        let empty = u.empty();
        prop_assert_eq!(u.truth_mem(x, cy).unwrap(), c.meet(u.truth_mem(x, y).unwrap()).unwrap());
        prop_assert_eq!(u.truth_eq(cx, cy).unwrap(), c.imp(u.truth_eq(x, y).unwrap(), b).unwrap());
        prop_assert_eq!(u.truth_eq(cx, x).unwrap(), c.join(u.truth_eq(x, empty).unwrap()).unwrap());
        prop_assert_eq!(u.truth_eq(cx, empty).unwrap(), c.complement(b).unwrap().join(u.truth_eq(x, empty).unwrap()).unwrap());
    }

    #[test]
    fn mixing_agrees_with_each_part(atoms in 1usize..=3, seeds in prop::collection::vec(any::<u64>(), 1..4), assign in any::<u64>()) {
        let u = universe(atoms);
        let b = u.algebra();
        let k = seeds.len();
        let xs: Vec<SetId> = seeds.iter().map(|&s| name(&u, s, 3)).collect();
        let mut masks = vec![0u64; k];
        for q in 0..atoms {
            masks[(assign >> (2 * q)) as usize % k] |= 1 << q;
        }
        let blocks: Vec<Elem> = masks.iter().map(|&m| b.elem(m).unwrap()).collect();
        let m = u.mix(&Partition::new(b, blocks.clone()).unwrap(), &xs).unwrap();
        for (blk, &x) in blocks.iter().zip(&xs) {
            prop_assert!(blk.leq(u.truth_eq(m, x).unwrap()).unwrap());
        }
    }
}
