//! Descent and ascent: cancellation rules, composition, inverses and modified arrows.

use std::collections::BTreeMap;

use bvm_core::arrows::{self, ExtMap};
use bvm_core::balg::{BoolAlg, Partition};
use bvm_core::gen::{self, GenRng};
use bvm_core::hf::HfSet;
use bvm_core::universe::{SetId, Universe};
use rand::seq::SliceRandom;
use rand::Rng;

struct World {
    u: Universe,
    frag: Vec<SetId>,
}

fn world(n: usize) -> World {
    let u = Universe::new(BoolAlg::new(n).unwrap());
    let frag = u.enumerate(3, 1000).unwrap();
    World { u, frag }
}

/// The set whose fiber at atom `q` is `fibers[q]`.
fn per_atom(u: &Universe, fibers: &[HfSet]) -> SetId {
    let names: Vec<SetId> = fibers.iter().map(|h| u.canonical_name(h)).collect();
    u.canonical(u.mix(&Partition::atoms(u.algebra()), &names).unwrap()).unwrap()
}

/// Internal function whose fiber at `q` is the graph of `maps[q]`, with its codomain.
fn internal(u: &Universe, maps: &[BTreeMap<HfSet, HfSet>]) -> (SetId, SetId) {
    let graphs: Vec<HfSet> = maps.iter().map(|m| HfSet::from_members(m.iter().map(|(a, b)| HfSet::kpair(a, b)))).collect();
    let images: Vec<HfSet> = maps.iter().map(|m| HfSet::from_members(m.values().cloned())).collect();
    (per_atom(u, &graphs), per_atom(u, &images))
}

fn nonempty(w: &World, rng: &mut GenRng) -> SetId {
    loop {
        let x = *w.frag.choose(rng).unwrap();
        if w.u.truth_eq(x, w.u.empty()).unwrap().is_zero() {
            return x;
        }
    }
}

fn random_maps(u: &Universe, x: SetId, rng: &mut GenRng) -> Vec<BTreeMap<HfSet, HfSet>> {
    let targets = HfSet::stage(3);
    (0..u.algebra().atom_count())
        .map(|q| u.collapse_at_atom(q, x).unwrap().members().map(|h| (h.clone(), targets.choose(rng).unwrap().clone())).collect())
        .collect()
}

#[test]
fn ascent_then_descent_is_the_mix_closure() {
    let w = world(2);
    let e = w.u.empty();
    let one = w.u.canonical_name(&HfSet::nat(1));
    let down = arrows::descent(&w.u, arrows::ascent(&w.u, &[e, one]).unwrap(), &w.frag).unwrap();
    assert_eq!(down.len(), 4);
    assert_eq!(down, arrows::mix_closure(&w.u, &[e, one], &w.frag).unwrap());
}

#[test]
fn descent_then_ascent_recovers_nonempty_sets() {
    for n in 1..=3 {
        let w = world(n);
        let mut rng = gen::rng(n as u64);
        for _ in 0..30 {
            let y = nonempty(&w, &mut rng);
            let back = arrows::ascent(&w.u, &arrows::descent(&w.u, y, &w.frag).unwrap()).unwrap();
            assert!(w.u.same(back, y).unwrap());
        }
    }
}

#[test]
fn descent_of_an_ascent_contains_its_members() {
    let w = world(2);
    let mut rng = gen::rng(4);
    for _ in 0..30 {
        let xs: Vec<SetId> = w.frag.choose_multiple(&mut rng, 3).copied().collect();
        let down = arrows::descent(&w.u, arrows::ascent(&w.u, &xs).unwrap(), &w.frag).unwrap();
        assert!(xs.iter().all(|x| down.contains(x)));
    }
}

#[test]
fn internal_functions_survive_descent_and_ascent() {
    let w = world(2);
    let mut rng = gen::rng(2);
    for _ in 0..30 {
        let x = nonempty(&w, &mut rng);
        let (g, cod) = internal(&w.u, &random_maps(&w.u, x, &mut rng));
        assert_eq!(arrows::function_truth(&w.u, g, x, cod).unwrap(), w.u.algebra().one());
        let down = arrows::descend_function(&w.u, g, x, cod, &w.frag).unwrap();
        assert!(arrows::is_extensional(&w.u, &down).unwrap());
        let up = arrows::ascend_function(&w.u, &down).unwrap();
        assert!(w.u.same(up, g).unwrap());
    }
}

#[test]
fn descent_of_a_composite_is_the_composite_of_descents() {
    let w = world(2);
    let mut rng = gen::rng(3);
    for _ in 0..20 {
        let x = nonempty(&w, &mut rng);
        let phi_maps = random_maps(&w.u, x, &mut rng);
        let (phi, y) = internal(&w.u, &phi_maps);
        let psi_maps = random_maps(&w.u, y, &mut rng);
        let (psi, z) = internal(&w.u, &psi_maps);
        let comp_maps: Vec<BTreeMap<HfSet, HfSet>> =
            phi_maps.iter().zip(&psi_maps).map(|(f, g)| f.iter().map(|(a, b)| (a.clone(), g[b].clone())).collect()).collect();
        let (comp, _) = internal(&w.u, &comp_maps);
        let d_phi = arrows::descend_function(&w.u, phi, x, y, &w.frag).unwrap();
        let d_psi = arrows::descend_function(&w.u, psi, y, z, &w.frag).unwrap();
        let d_comp = arrows::descend_function(&w.u, comp, x, z, &w.frag).unwrap();
        for a in d_phi.domain() {
            let via = d_psi.get(d_phi.get(a).unwrap()).unwrap();
            assert!(w.u.same(d_comp.get(a).unwrap(), via).unwrap());
        }
    }
}

#[test]
fn descent_of_an_inverse_is_the_inverse_of_the_descent() {
    let w = world(2);
    let mut rng = gen::rng(6);
    for _ in 0..20 {
        let x = nonempty(&w, &mut rng);
        let maps: Vec<BTreeMap<HfSet, HfSet>> = (0..2)
            .map(|q| {
                let members: Vec<HfSet> = w.u.collapse_at_atom(q, x).unwrap().members().cloned().collect();
                let mut shuffled = members.clone();
                shuffled.shuffle(&mut rng);
                members.into_iter().zip(shuffled).collect()
            })
            .collect();
        let inverse: Vec<BTreeMap<HfSet, HfSet>> = maps.iter().map(|m| m.iter().map(|(a, b)| (b.clone(), a.clone())).collect()).collect();
        let (g, _) = internal(&w.u, &maps);
        let (h, _) = internal(&w.u, &inverse);
        let dg = arrows::descend_function(&w.u, g, x, x, &w.frag).unwrap();
        let dh = arrows::descend_function(&w.u, h, x, x, &w.frag).unwrap();
        for a in dg.domain() {
            assert!(w.u.same(dh.get(dg.get(a).unwrap()).unwrap(), a).unwrap());
        }
    }
}

#[test]
fn extensional_maps_can_have_non_extensional_inverses() {
    let w = world(2);
    let v2 = w.u.enumerate(2, 10).unwrap();
    let mut found = 0;
    for mask in 1u32..1 << v2.len() {
        let dom: Vec<SetId> = (0..v2.len()).filter(|&i| mask >> i & 1 == 1).map(|i| v2[i]).collect();
        for code in 0..v2.len().pow(dom.len() as u32) {
            let image: Vec<SetId> = (0..dom.len()).map(|i| v2[code / v2.len().pow(i as u32) % v2.len()]).collect();
            let f = ExtMap::new(dom.iter().copied().zip(image.iter().copied()).collect());
            if !arrows::is_extensional(&w.u, &f).unwrap() {
                continue;
            }
            let mut inverse: BTreeMap<SetId, Vec<SetId>> = BTreeMap::new();
            for (&x, &y) in dom.iter().zip(&image) {
                inverse.entry(y).or_default().push(x);
            }
            let phi: Vec<(SetId, Vec<SetId>)> = inverse.into_iter().collect();
            if !arrows::is_extensional_correspondence(&w.u, &phi).unwrap() {
                found += 1;
            }
        }
    }
    assert!(found > 0);
    // a constant map identifies internally distinct points
    let e = w.u.empty();
    let one = w.u.canonical_name(&HfSet::nat(1));
    let phi = vec![(e, vec![e, one])];
    assert!(arrows::is_extensional_correspondence(&w.u, &phi).unwrap());
    assert!(!arrows::is_extensional_correspondence(&w.u, &[(e, vec![e]), (e, vec![one])]).unwrap());
}

#[test]
fn modified_arrows_round_trip() {
    let w = world(2);
    let mut rng = gen::rng(8);
    let domain: Vec<HfSet> = HfSet::stage(3);
    for _ in 0..20 {
        let f: Vec<(HfSet, SetId)> = domain.iter().map(|a| (a.clone(), w.frag[rng.gen_range(0..w.frag.len())])).collect();
        let g = arrows::ascend_modified(&w.u, &f).unwrap();
        let back = arrows::descend_modified(&w.u, g, &domain, &w.frag).unwrap();
        assert_eq!(back, f);
    }
}

#[test]
fn two_point_descent_for_small_algebras() {
    for n in 1..=3 {
        let w = world(n);
        let d = arrows::descend_two_point(&w.u, n + 1, 1 << 20).unwrap();
        assert!(d.holds());
        assert_eq!(d.descended.len(), 1 << n);
    }
}
