//! Isometry search and induced actions on discriminant groups.

use k3lat::catalog;
use k3lat::disc::{discriminant_form, isometry_search, orbit_partition, Isometry, OrbitVerdict, SearchConfig, Seed};
use k3lat::lattice::{Lattice, RelativeLattice};
use k3lat::linalg::{ri, QVec};
use k3lat::report::{k12_generators, m_block_swaps, phi_on_k12, sigma_on_k12};
use num_traits::ToPrimitive;
use std::sync::Arc;

fn to_i64(v: &QVec) -> Vec<i64> {
    v.iter().map(|x| x.to_integer().to_i64().unwrap()).collect()
}

#[test]
fn minus_two_has_only_sign_changes() {
    let l = RelativeLattice::whole(Arc::new(Lattice::from_i64("<-2>", &[vec![-2]]).unwrap()));
    let r = isometry_search("<-2>", &l, &SearchConfig::default()).unwrap();
    let mut found: Vec<_> = r.isometries.iter().map(|i| i.to_i64_rows()).collect();
    found.sort();
    found.dedup();
    assert_eq!(found, vec![vec![vec![-1]], vec![vec![1]]]);
}

#[test]
fn phi_is_recovered_from_its_block_structure() {
    let k12 = catalog::k12();
    let phi = Isometry::from_reference_map("phi", "K12", &k12, phi_on_k12).unwrap();
    let probe = isometry_search("K12", &k12, &SearchConfig { node_budget: 1, ..Default::default() }).unwrap();
    let frame = probe.frame;
    // prescribe φ on the first three frame vectors only
    let fixed = (0..3)
        .map(|i| {
            let c: QVec = frame[i].iter().map(|&x| ri(x)).collect();
            (i, to_i64(&phi.apply_coords(&c)))
        })
        .collect();
    let cfg = SearchConfig { seeds: vec![Seed { fixed }], per_seed: 64, frame: Some(frame), ..Default::default() };
    let r = isometry_search("K12", &k12, &cfg).unwrap();
    assert!(r.isometries.iter().any(|i| i.matrix() == phi.matrix()));
}

#[test]
fn sigma_generates_order_three_and_fixes_the_discriminant() {
    let k12 = catalog::k12();
    let s = Isometry::from_reference_map("sigma", "K12", &k12, sigma_on_k12).unwrap();
    let d = discriminant_form(&k12).unwrap();
    let act = d.induced_action(&s).unwrap();
    let f = d.form();
    assert!(f.elements().all(|a| f.apply(&act, &a) == a));
}

#[test]
fn k12_orbits_are_level_sets() {
    let k12 = catalog::k12();
    let d = discriminant_form(&k12).unwrap();
    let (isos, _, _) = k12_generators(&[]).unwrap();
    let gens: Vec<_> = isos.iter().map(|i| d.induced_action(i).unwrap()).collect();
    let p = orbit_partition(d.form(), &gens).unwrap();
    assert_eq!(p.verdict(d.form()), OrbitVerdict::EqualsLevelSets);
    let mut sizes = p.sizes();
    sizes.sort();
    assert_eq!(sizes, vec![224, 252, 252]);
}

#[test]
fn m_orbits_are_level_sets() {
    let m = catalog::m_lattice();
    let d = discriminant_form(&m).unwrap();
    let mut isos = m_block_swaps().unwrap();
    isos.push(Isometry::negation("M", 12));
    let gens: Vec<_> = isos.iter().map(|i| d.induced_action(i).unwrap()).collect();
    let p = orbit_partition(d.form(), &gens).unwrap();
    assert_eq!(p.verdict(d.form()), OrbitVerdict::EqualsLevelSets);
}
