//! Independent oracles for derived values: floating Gauss sums, Bareiss
//! determinants, modular ranks and direct matrix products.

use k3lat::catalog::{self, Name};
use k3lat::disc::{discriminant_form, fqf_isomorphic, isometry_search, milgram_invariant, FiniteQuadraticForm, SearchConfig, Seed};
use k3lat::lattice::{direct_sum, RelativeLattice};
use k3lat::linalg::Rat;
use k3lat::symplectic::{self, GlueChoice};
use k3lat::surface;
use num_traits::ToPrimitive;
use std::sync::Arc;

fn to_f64(x: &Rat) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

/// `s` with `Σ exp(πi q(x)) = √|A| · exp(πi s/4)`, by direct summation.
fn gauss_residue(f: &FiniteQuadraticForm) -> i64 {
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for x in f.elements() {
        let t = std::f64::consts::PI * to_f64(&f.q(&x));
        re += t.cos();
        im += t.sin();
    }
    let norm = (re * re + im * im).sqrt();
    assert!((norm - (f.order() as f64).sqrt()).abs() < 1e-6, "Gauss sum has the wrong modulus");
    let s = (im.atan2(re) * 4.0 / std::f64::consts::PI).round() as i64;
    s.rem_euclid(8)
}

#[test]
fn gauss_sums_match_milgram() {
    for name in [Name::E6, Name::K12, Name::M, Name::A2Neg, Name::TwoD(1), Name::E6DualScaled, Name::K12Tilde, Name::UPlusA2Neg] {
        let l = catalog::build(name).unwrap().lattice;
        let f = discriminant_form(&l).unwrap();
        let oracle = gauss_residue(f.form());
        assert_eq!(milgram_invariant(f.form()).unwrap() as i64, oracle, "{name}");
        let (p, n) = l.signature().unwrap();
        assert_eq!(oracle, (p as i64 - n as i64).rem_euclid(8), "{name}");
    }
    let e6 = discriminant_form(&catalog::build(Name::E6).unwrap().lattice).unwrap();
    assert_eq!(gauss_residue(e6.form()), 2);
    let k12 = discriminant_form(&catalog::k12()).unwrap();
    assert_eq!(gauss_residue(k12.form()), 4);
}

/// Fraction-free elimination on `i128`.
fn bareiss_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Rank over `F_p` for a large prime `p`.
fn rank_mod_p(m: &[Vec<i64>]) -> usize {
    const P: i128 = 1_000_000_007;
    let inv = |x: i128| {
        let (mut r, mut b, mut e) = (1i128, x.rem_euclid(P), P - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| (x as i128).rem_euclid(P)).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, p);
        let iv = inv(a[rank][c]);
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c] * iv % P;
                for j in 0..cols {
                    a[i][j] = (a[i][j] - f * a[rank][j]).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn block_determinants() {
    let base = catalog::k3_base();
    let g = base.gram().to_i64_rows().unwrap();
    assert_eq!(bareiss_det(&g).abs(), 81);
    let kt = catalog::k12_tilde().gram().to_i64_rows().unwrap();
    assert_eq!(bareiss_det(&kt).abs(), 6561);
}

#[test]
fn symbol_gram_kernel_has_dimension_four() {
    let g = surface::build_symbol_gram().to_i64_rows().unwrap();
    assert_eq!(g.len(), 24);
    assert_eq!(24 - rank_mod_p(&g), 4);
    assert_eq!(surface::verify_relations().kernel_dim, 4);
}

#[test]
fn h2y_index_from_determinants() {
    let base = symplectic::y_base().gram().to_i64_rows().unwrap();
    let d = bareiss_det(&base).abs();
    // A2(-1)+U(3)+E6+A2^6; the sixfold A2 sits in M with index 3
    assert_eq!(d, 3i128.pow(10));
    let h = symplectic::build_h2y(GlueChoice::Corrected).unwrap();
    // over A2(-1)+U(3)+E6+M the determinant drops by 3^2, and a unimodular
    // target forces index^2 = |det|
    assert_eq!(h.index.clone() * &h.index, num_bigint::BigInt::from(d / 9));
    assert_eq!(h.index, num_bigint::BigInt::from(81));
}

fn e6_diagram() -> Vec<Vec<i64>> {
    let p = [4usize, 3, 2, 1, 0, 5];
    let mut m = vec![vec![0i64; 6]; 6];
    for (i, &j) in p.iter().enumerate() {
        m[j][i] = 1;
    }
    m
}

#[test]
fn e6_diagram_automorphism_is_found() {
    let g = catalog::e6().gram().to_i64_rows().unwrap();
    let m = e6_diagram();
    // Mᵀ G M = G by direct multiplication
    for i in 0..6 {
        for j in 0..6 {
            let mut s = 0;
            for a in 0..6 {
                for b in 0..6 {
                    s += m[a][i] * g[a][b] * m[b][j];
                }
            }
            assert_eq!(s, g[i][j]);
        }
    }
    let l = RelativeLattice::whole(Arc::new(catalog::e6()));
    let unit = |i: usize| (0..6).map(|j| i64::from(i == j)).collect::<Vec<_>>();
    let cfg = SearchConfig {
        frame: Some((0..6).map(unit).collect()),
        seeds: vec![Seed { fixed: vec![(0, unit(4)), (1, unit(3))] }],
        per_seed: 200,
        ..Default::default()
    };
    let r = isometry_search("E6", &l, &cfg).unwrap();
    let found: Vec<_> = r.isometries.iter().map(|i| i.to_i64_rows()).collect();
    assert!(found.contains(&m), "{found:?} {}", r.complete);
}

#[test]
fn complementary_discriminant_forms_are_opposite() {
    let inv = direct_sum("A2(-1)+U+E6*(3)", &[&catalog::a2_neg(), &catalog::u(), &catalog::scaled_dual(&catalog::e6(), 3).unwrap()]);
    let a = discriminant_form(&RelativeLattice::whole(Arc::new(inv))).unwrap();
    let k = discriminant_form(&catalog::k12()).unwrap();
    assert!(fqf_isomorphic(k.form(), &a.form().opposite()).unwrap().isomorphic);
}

#[test]
fn plain_y_second_divisor_square() {
    // each block ((2M1+M2)/3)^2 = -2/3 and six blocks contribute -4
    for e in 1..=8 {
        let r = k3lat::families::divisors_di(k3lat::families::NSDescriptor::plain_y(e)).unwrap();
        assert_eq!(r[0].square, Rat::from_integer((2 * e).into()));
        assert_eq!(r[1].square, Rat::from_integer((2 * e - 4).into()));
    }
}
