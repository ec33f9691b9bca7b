//! Values stated explicitly for the lattices, families and the example
//! surface.

use k3lat::catalog::{self, Name};
use k3lat::disc::{discriminant_form, fqf_isomorphic};
use k3lat::families::{self, NSDescriptor, Summand, Variant};
use k3lat::lattice::{direct_sum, rescale, RelativeLattice};
use k3lat::linalg::{rat, ri, zero_vec, Rat};
use k3lat::symplectic::{self, GlueChoice, SigmaAction};
use k3lat::surface;
use num_traits::Signed;
use std::sync::Arc;

fn whole(l: k3lat::lattice::Lattice) -> RelativeLattice {
    RelativeLattice::whole(Arc::new(l))
}

#[test]
fn catalog_lattices() {
    let e6 = catalog::build(Name::E6).unwrap().invariants().unwrap();
    assert_eq!((e6.rank, e6.signature, e6.even), (6, (0, 6), true));
    assert_eq!(e6.abs_det, 3.into());
    let m = catalog::build(Name::M).unwrap().invariants().unwrap();
    assert_eq!((m.rank, m.disc_divisors.clone()), (12, vec![3, 3, 3, 3]));
    let k3 = catalog::build(Name::LambdaK3Glued).unwrap().invariants().unwrap();
    assert_eq!((k3.signature, k3.even), ((3, 19), true));
    assert_eq!(k3.abs_det, 1.into());
    let e6d = catalog::build(Name::E6DualScaled).unwrap().invariants().unwrap();
    assert_eq!((e6d.rank, e6d.disc_divisors), (6, vec![3; 5]));
}

#[test]
fn a2_dual_scaled_matches_a2_negative_form() {
    let a = discriminant_form(&whole(rescale(&catalog::scaled_dual(&catalog::a_n(2), 3).unwrap(), -1).unwrap())).unwrap();
    let b = discriminant_form(&whole(catalog::a2_neg())).unwrap();
    assert!(fqf_isomorphic(a.form(), b.form()).unwrap().isomorphic);
}

#[test]
fn m_form_is_opposite_of_its_complement() {
    let comp = direct_sum("U(3)+A2(-1)+E6", &[&rescale(&catalog::u(), 3).unwrap(), &catalog::a2_neg(), &catalog::e6()]);
    let c = discriminant_form(&whole(comp)).unwrap();
    let m = discriminant_form(&catalog::m_lattice()).unwrap();
    assert!(fqf_isomorphic(m.form(), &c.form().opposite()).unwrap().isomorphic);
}

#[test]
fn sigma_invariants_and_coinvariants() {
    let s = SigmaAction::k3().unwrap();
    assert_eq!(s.order(), Some(3));
    let inv = s.invariant_sublattice().unwrap();
    assert_eq!(inv.rank(), 10);
    let coinv = s.coinvariant_sublattice().unwrap();
    assert_eq!(coinv.rank(), 12);
    assert_eq!(coinv.det().abs(), ri(729));
    // z is orthogonal to the invariant lattice
    let z = symplectic::z_vector();
    assert!(inv.basis().iter().all(|b| inv.reference().pair(b, &z) == ri(0)));
}

#[test]
fn push_forward_image() {
    let h = symplectic::build_h2y(GlueChoice::Corrected).unwrap();
    let img = symplectic::push_forward_image(h.lattice.reference()).unwrap();
    assert_eq!(img.rank(), 10);
    assert_eq!(img.signature().unwrap(), (3, 7));
    assert_eq!(discriminant_form(&img).unwrap().form().divisors(), &[3, 3, 3, 3]);
}

#[test]
fn classification_examples() {
    assert!(families::classify_overlattice_x(1).unwrap().is_none());
    let labels = |c: &families::Classified| c.g[1..].to_vec();
    let mut g3 = zero_vec(12);
    for k in [1, 3, 7, 9] {
        g3[k - 1] = ri(1);
    }
    assert_eq!(labels(&families::classify_overlattice_x(3).unwrap().unwrap()), g3);
    let c6 = families::classify_overlattice_x(6).unwrap().unwrap();
    let mut g6 = zero_vec(12);
    g6[0] = ri(1);
    g6[6] = ri(1);
    assert_eq!(labels(&c6), g6);
    assert_eq!(c6.q_glue, rat(2, 3)); // -4/3 mod 2

    assert!(families::classify_overlattice_y(2).unwrap().is_none());
    let c9 = families::classify_overlattice_y(9).unwrap().unwrap();
    let mut g9 = zero_vec(12);
    for j in 1..=3 {
        g9[catalog::m_index(1, j)] = ri(1);
        g9[catalog::m_index(2, j)] = ri(2);
    }
    assert_eq!(labels(&c9), g9);
}

#[test]
fn admissible_glue_values() {
    assert!(families::enumerate_admissible_glues(Summand::K12, 1).unwrap().is_empty());
    let d3 = families::enumerate_admissible_glues(Summand::K12, 3).unwrap();
    assert!(!d3.is_empty());
    assert!(d3.iter().all(|g| g.q == rat(4, 3)));
    let d9 = families::enumerate_admissible_glues(Summand::K12, 9).unwrap();
    assert!(!d9.is_empty());
    assert!(d9.iter().all(|g| g.q == ri(0) && g.element.iter().any(|&x| x != 0)));
}

#[test]
fn descriptors() {
    assert!(NSDescriptor::new(families::Side::X, Variant::Primed, 2).is_err());
    let plain = families::embed_nsx(NSDescriptor::plain_x(1)).unwrap();
    assert_eq!(plain.lattice.reference().norm(&plain.line), ri(2));
    let primed = families::embed_nsx(NSDescriptor::primed_x(3)).unwrap();
    assert_eq!(primed.lattice.reference().norm(&primed.line), ri(6));
}

#[test]
fn quotient_examples() {
    let cases = [
        (NSDescriptor::plain_x(1), NSDescriptor::primed_y(3), 6),
        (NSDescriptor::primed_x(3), NSDescriptor::plain_y(1), 2),
        (NSDescriptor::plain_x(2), NSDescriptor::primed_y(6), 12),
    ];
    for (src, want, h2) in cases {
        let c = families::ns_of_quotient(src).unwrap();
        assert_eq!(c.target, want, "{src}");
        assert_eq!(c.line_square, ri(h2));
        assert!(c.shape_verified);
    }
}

#[test]
fn chi_values() {
    assert_eq!(families::chi(&ri(-2)), ri(1));
    for d in [3, 9, 12] {
        // 3d ≡ 0 mod 9
        assert_eq!(families::expected_chis(d, Variant::Plain)[0], rat(d, 3) + ri(1));
    }
    for d in [2, 5] {
        // 3d ≡ 6 mod 9
        assert_eq!(families::expected_chis(d, Variant::Plain)[0], rat(d, 3) + rat(4, 3));
    }
    for d in 1..=12 {
        let e = families::eigenspace_dimensions(d, Variant::Plain).unwrap();
        assert!(e.sum_ok, "d = {d}");
        let total: Rat = e.chis.iter().sum();
        assert_eq!(total, ri(d + 2));
    }
}

#[test]
fn pullbacks_recover_the_polarization() {
    for e in [1, 2, 3, 9] {
        let r = families::pullback_di(NSDescriptor::plain_y(e)).unwrap();
        assert!(r.polarization_ok && r.divisors_ok.iter().all(|&b| b), "PlainY({e})");
    }
    for e in [3, 6, 9, 18] {
        let r = families::pullback_di(NSDescriptor::primed_y(e)).unwrap();
        assert!(r.polarization_ok && r.divisors_ok.iter().all(|&b| b), "PrimedY({e})");
    }
}

#[test]
fn eigenspace_examples() {
    assert_eq!(families::eigenspace_dimensions(1, Variant::Plain).unwrap().dims(), Some([1, 1, 1]));
    assert_eq!(families::eigenspace_dimensions(2, Variant::Plain).unwrap().dims(), Some([2, 1, 1]));
    assert_eq!(families::eigenspace_dimensions(3, Variant::Primed).unwrap().dims(), Some([3, 1, 1]));
}

#[test]
fn tower_degrees() {
    let t = families::isogeny_tower(1, 3).unwrap();
    assert_eq!(t.iter().map(|r| r.square).collect::<Vec<_>>(), vec![6, 18, 54]);
    assert!(t.iter().all(|r| r.genus_equal && r.cover_ok));
    assert_eq!(families::isogeny_tower(2, 1).unwrap().len(), 1);
}

#[test]
fn example_surface_facts() {
    assert_eq!(surface::build_symbol_gram()[(0, 0)], ri(-2));
    let rel = surface::verify_relations();
    assert_eq!(rel.rank, 20);
    assert!(rel.ok());
    assert!(surface::verify_sigma_permutation().ok());
    let ns = surface::reconstruct_ns().unwrap();
    assert_eq!(ns.abs_det, 3.into());
    assert!(ns.ok());
    // {C2^(3), D} spans U
    let d = surface::d_class();
    let c = surface::CurveSymbol::C(2, 3).vector();
    let g = surface::build_symbol_gram();
    let pair = |a: &[Rat], b: &[Rat]| g.bilinear(a, b);
    assert_eq!([pair(&c, &c), pair(&c, &d), pair(&d, &d)], [ri(-2), ri(1), ri(0)]);
}
