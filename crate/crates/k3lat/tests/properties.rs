use k3lat::catalog;
use k3lat::disc::discriminant_form;
use k3lat::lattice::RelativeLattice;
use k3lat::linalg::{ri, vadd, vscale, QVec, Rat};
use k3lat::report::sigma_on_k12;
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use std::sync::Arc;

fn qv(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| ri(x)).collect()
}

fn int_det(m: &[Vec<i64>]) -> i64 {
    let rows: Vec<QVec> = m.iter().map(|r| qv(r)).collect();
    let d = k3lat::linalg::Matrix::from_rows(rows, m.len()).det();
    d.to_integer().try_into().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hnf_ignores_unimodular_changes(
        gens in prop::collection::vec(prop::collection::vec(-3i64..=3, 8), 3),
        c in -4i64..=4,
        (i, j) in (0usize..3, 0usize..3),
    ) {
        prop_assume!(i != j);
        let e8 = Arc::new(catalog::e8());
        let a: Vec<QVec> = gens.iter().map(|g| qv(g)).collect();
        let mut b = a.clone();
        b[i] = vadd(&b[i], &vscale(&ri(c), &a[j]));
        b.swap(0, 2);
        let la = RelativeLattice::new(e8.clone(), &a).unwrap();
        let lb = RelativeLattice::new(e8, &b).unwrap();
        prop_assert_eq!(la, lb);
    }

    #[test]
    fn sublattice_determinant_scales_by_index_squared(
        m in prop::collection::vec(prop::collection::vec(-2i64..=2, 6), 6),
    ) {
        let det = int_det(&m);
        prop_assume!(det != 0);
        let e6 = Arc::new(catalog::e6());
        let whole = RelativeLattice::whole(e6.clone());
        let sub = RelativeLattice::new(e6, &m.iter().map(|r| qv(r)).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(whole.index_of(&sub), Some(BigInt::from(det.abs())));
        prop_assert_eq!(sub.det(), whole.det() * ri(det * det));
    }

    #[test]
    fn discriminant_form_polarizes(a in prop::collection::vec(0i64..3, 6), b in prop::collection::vec(0i64..3, 6)) {
        let d = discriminant_form(&catalog::k12()).unwrap();
        let f = d.form();
        let lhs = f.q(&f.add(&a, &b)) - f.q(&a) - f.q(&b);
        let diff: Rat = lhs - ri(2) * f.b(&a, &b);
        prop_assert!((diff / ri(2)).is_integer());
    }

    #[test]
    fn sigma_preserves_norms_and_has_order_three(v in prop::collection::vec(-5i64..=5, 12)) {
        let k12 = catalog::k12();
        let x = qv(&v);
        let reference = k12.reference();
        let s = sigma_on_k12(&x);
        prop_assert_eq!(reference.norm(&s), reference.norm(&x));
        prop_assert_eq!(&sigma_on_k12(&sigma_on_k12(&s)), &x);
        prop_assert!(!reference.norm(&x).is_positive());
    }
}
