//! The order-3 isometry of the K3 lattice, its invariant and coinvariant
//! parts, the quotient maps `π_*`, `π^*` and the lattice `H²(Y)`.
//!
//! `H²(Y)` is built on the reference lattice
//! `A2(-1) ⊕ U(3) ⊕ E6 ⊕ A2^6` with coordinates
//! `a1'', a2'' | u1', u2' | e1'..e6' | M1^(1), M2^(1), …, M1^(6), M2^(6)`
//! (see [`yc`]). The `A2(-1)` block uses the standard basis `a1'', a2''`.
//! The image of `π_*` in it is `π_*(y) = a1''` and `π_*(a2) - π_*(y) = -a2''`,
//! so the basis `a1' = a1''`, `a2' = -a2''` has Gram `[[2,1],[1,2]]`.

use crate::catalog::{self, xc};
use crate::disc::{DiscError, Isometry};
use crate::lattice::{
    complement_within, direct_sum, overlattice, rescale, saturation_within, GlueVector, Lattice, LatticeError,
    Overlattice, RelativeLattice,
};
use crate::linalg::{rat, ri, vadd, vscale, vsub, zero_vec, Matrix, QVec, Rat};
use num_bigint::BigInt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("map does not preserve the lattice: {0}")]
    NotIntegral(String),
    #[error("map does not preserve the form")]
    NotIsometry,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

/// A finite-order isometry given on reference coordinates, acting on a
/// lattice it preserves.
#[derive(Debug, Clone)]
pub struct SigmaAction {
    lattice: RelativeLattice,
    /// Row convention: `v ↦ v·map` on reference coordinates.
    map: Matrix,
    isometry: Isometry,
}

/// Permutation matrix sending `e_i^(j)` to `e_i^(j+1)` on consecutive blocks
/// of size `block` starting at `offset`.
pub fn block_cycle(n: usize, offset: usize, block: usize, blocks: usize) -> Matrix {
    let mut r = Matrix::identity(n);
    for j in 0..blocks {
        for i in 0..block {
            let from = offset + j * block + i;
            let to = offset + ((j + 1) % blocks) * block + i;
            r[(from, from)] = ri(0);
            r[(from, to)] = ri(1);
        }
    }
    r
}

impl SigmaAction {
    /// Extends `map` from the reference lattice and checks that it maps
    /// `lattice` onto itself isometrically.
    pub fn new(name: &str, lattice: RelativeLattice, map: Matrix) -> Result<Self, SymplecticError> {
        let g = lattice.reference().gram();
        if &map.mul(g).mul(&map.transpose()) != g {
            return Err(SymplecticError::NotIsometry);
        }
        let label = lattice.reference().label().to_string();
        let m = map.clone();
        let isometry = Isometry::from_reference_map(name, label, &lattice, |v| m.vec_mul(v))
            .map_err(|_| SymplecticError::NotIntegral(name.into()))?;
        Ok(SigmaAction { lattice, map, isometry })
    }

    /// `σ*` on the glued K3 lattice: fixes `A2(-1) ⊕ U`, cycles the `E6` blocks.
    pub fn k3() -> Result<Self, SymplecticError> {
        Self::new("sigma*", catalog::lambda_k3_glued(), block_cycle(xc::RANK, 4, 6, 3))
    }

    pub fn identity(lattice: RelativeLattice) -> Self {
        let n = lattice.reference().rank();
        Self::new("id", lattice, Matrix::identity(n)).expect("identity is an isometry")
    }

    pub fn lattice(&self) -> &RelativeLattice {
        &self.lattice
    }

    pub fn reference_map(&self) -> &Matrix {
        &self.map
    }

    pub fn isometry(&self) -> &Isometry {
        &self.isometry
    }

    pub fn apply(&self, v: &[Rat]) -> QVec {
        self.map.vec_mul(v)
    }

    pub fn order(&self) -> Option<usize> {
        self.isometry.order(64)
    }

    /// Saturated fixed sublattice.
    pub fn invariant_sublattice(&self) -> Result<RelativeLattice, SymplecticError> {
        let n = self.map.nrows();
        let fixed = self.map.sub(&Matrix::identity(n)).transpose().kernel_basis();
        Ok(saturation_within(&self.lattice, &fixed)?)
    }

    /// Orthogonal complement of the invariant sublattice.
    pub fn coinvariant_sublattice(&self) -> Result<RelativeLattice, SymplecticError> {
        let inv = self.invariant_sublattice()?;
        Ok(complement_within(&self.lattice, &inv)?)
    }

    /// Restriction to an invariant sublattice, as an isometry on its basis.
    pub fn restrict(&self, name: &str, sub: &RelativeLattice) -> Result<Isometry, SymplecticError> {
        let label = sub.reference().label().to_string();
        Ok(Isometry::from_reference_map(name, label, sub, |v| self.map.vec_mul(v))?)
    }
}

/// `k_i` in K3 coordinates: `e_i^(1) - e_i^(2)` and `k_{i+6} = e_i^(1) - e_i^(3)`.
pub fn k_vector(i: usize) -> QVec {
    let (idx, other) = if i <= 6 { (i, 2) } else { (i - 6, 3) };
    vsub(&xc::unit(xc::e(idx, 1)), &xc::unit(xc::e(idx, other)))
}

/// Images of `k1..k12` in K3 coordinates, as rows.
pub fn k_embedding() -> Matrix {
    Matrix::from_rows((1..=12).map(k_vector).collect(), xc::RANK)
}

/// Sends a vector in `k`-coordinates to K3 coordinates.
pub fn from_k_coords(c: &[Rat]) -> QVec {
    k_embedding().vec_mul(c)
}

/// `z` in K3 coordinates.
pub fn z_vector() -> QVec {
    from_k_coords(&catalog::z_glue())
}

/// Result of matching the coinvariant lattice with `build(K12)`.
#[derive(Debug, Clone)]
pub struct K12Match {
    /// The basis of `build(K12)` pushed into K3 coordinates.
    pub images: Vec<QVec>,
    pub same_lattice: bool,
    pub same_gram: bool,
}

/// Pushes the HNF basis of `build(K12)` through `k_i ↦ e_i^(1) - e_i^(·)` and
/// compares with the coinvariant lattice.
pub fn match_coinvariant_k12(coinv: &RelativeLattice) -> Result<K12Match, SymplecticError> {
    let k12 = catalog::k12();
    let images: Vec<QVec> = k12.basis().iter().map(|b| from_k_coords(b)).collect();
    let pushed = RelativeLattice::new(coinv.reference().clone(), &images)?;
    let gram = crate::lattice::pairing_matrix(coinv.reference(), &images, &images);
    Ok(K12Match { same_lattice: &pushed == coinv, same_gram: &gram == k12.gram(), images })
}

/// Coordinates on `A2(-1) ⊕ U(3) ⊕ E6 ⊕ A2^6`, the base of `H²(Y)`.
pub mod yc {
    use crate::linalg::{rat, vadd, vneg, zero_vec, QVec};

    pub const RANK: usize = 22;
    pub const A1: usize = 0;
    pub const A2: usize = 1;
    pub const U1: usize = 2;
    pub const U2: usize = 3;

    /// Coordinate of `e_i'`.
    pub fn e(i: usize) -> usize {
        4 + i - 1
    }

    /// Coordinate of `M_i^(j)`.
    pub fn m(i: usize, j: usize) -> usize {
        10 + 2 * (j - 1) + (i - 1)
    }

    pub fn unit(i: usize) -> QVec {
        crate::linalg::unit_vec(RANK, i)
    }

    /// `z_j = (M1^(j) + 2 M2^(j))/3`.
    pub fn z(j: usize) -> QVec {
        let mut v = zero_vec(RANK);
        v[m(1, j)] = rat(1, 3);
        v[m(2, j)] = rat(2, 3);
        v
    }

    pub fn m_hat() -> QVec {
        (1..=6).fold(zero_vec(RANK), |acc, j| vadd(&acc, &z(j)))
    }

    /// Signed sum `Σ s_j z_j`.
    pub fn zsum(signs: &[(usize, i64)]) -> QVec {
        signs.iter().fold(zero_vec(RANK), |acc, &(j, s)| {
            let t = z(j);
            vadd(&acc, &if s > 0 { t } else { vneg(&t) })
        })
    }

    /// `(a1'' + 2a2'')/3`.
    pub fn a_glue() -> QVec {
        let mut v = zero_vec(RANK);
        v[A1] = rat(1, 3);
        v[A2] = rat(2, 3);
        v
    }

    /// `(e1' + 2e2' + e4' + 2e5')/3`.
    pub fn e_glue() -> QVec {
        let mut v = zero_vec(RANK);
        v[e(1)] = rat(1, 3);
        v[e(2)] = rat(2, 3);
        v[e(4)] = rat(1, 3);
        v[e(5)] = rat(2, 3);
        v
    }
}

/// Which `b3`, `b4` to glue `H²(Y)` with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlueChoice {
    /// `b3 = z2 - z3 + z4 - z5`, `b4 = -z1 + z3 - z4 + z5` as printed.
    Printed,
    /// Blocks 4 and 5 swapped: `b3 = z2 - z3 - z4 + z5`, `b4 = -z1 + z3 + z4 - z5`.
    Corrected,
}

/// Generators `b1..b4` of the discriminant group of `M`.
pub fn b_vectors(choice: GlueChoice) -> [QVec; 4] {
    let b1 = yc::zsum(&[(1, 1), (2, 1), (3, 1)]);
    let b2 = yc::zsum(&[(1, 1), (2, 1), (4, 1)]);
    let (b3, b4) = match choice {
        GlueChoice::Printed => (
            yc::zsum(&[(2, 1), (3, -1), (4, 1), (5, -1)]),
            yc::zsum(&[(1, -1), (3, 1), (4, -1), (5, 1)]),
        ),
        GlueChoice::Corrected => (
            yc::zsum(&[(2, 1), (3, -1), (4, -1), (5, 1)]),
            yc::zsum(&[(1, -1), (3, 1), (4, 1), (5, -1)]),
        ),
    };
    [b1, b2, b3, b4]
}

/// Glue classes `n1..n4` in the `b`-basis form.
pub fn n_vectors(choice: GlueChoice) -> [QVec; 4] {
    let [b1, b2, b3, b4] = b_vectors(choice);
    let third = |i: usize| vscale(&rat(1, 3), &yc::unit(i));
    [
        vadd(&yc::a_glue(), &b3),
        vadd(&yc::e_glue(), &b4),
        vadd(&third(yc::U1), &b1),
        vadd(&third(yc::U2), &b2),
    ]
}

/// Glue classes `n1..n4` in the curve-class form, written with `π_*`.
pub fn n_vectors_curve_form() -> [QVec; 4] {
    let push = push_forward();
    let blocks = |pat: &[(usize, i64, i64)]| {
        let mut v = zero_vec(yc::RANK);
        for &(j, c1, c2) in pat {
            v[yc::m(1, j)] = ri(c1);
            v[yc::m(2, j)] = ri(c2);
        }
        v
    };
    let third = |v: QVec| vscale(&rat(1, 3), &v);
    let a2 = push.apply(&xc::unit(xc::A2));
    let y = push.apply(&xc::y());
    let e1 = {
        let mut v = zero_vec(xc::RANK);
        for (i, c) in [(1, 1), (2, 2), (4, 1), (5, 2)] {
            v[xc::e(i, 1)] = ri(c);
        }
        push.apply(&v)
    };
    [
        third(vadd(
            &vsub(&vscale(&ri(2), &a2), &y),
            &blocks(&[(2, 1, 2), (3, 2, 1), (4, 1, 2), (5, 2, 1)]),
        )),
        third(vadd(&e1, &blocks(&[(1, 2, 1), (3, 1, 2), (4, 2, 1), (5, 1, 2)]))),
        third(vadd(&push.apply(&xc::unit(xc::U1)), &blocks(&[(1, 1, 2), (2, 1, 2), (3, 1, 2)]))),
        third(vadd(&push.apply(&xc::unit(xc::U2)), &blocks(&[(1, 1, 2), (2, 1, 2), (4, 1, 2)]))),
    ]
}

pub fn y_base() -> Lattice {
    let a2 = catalog::a_n(2);
    let e6 = catalog::e6();
    let u3 = rescale(&catalog::u(), 3).expect("nonzero");
    let mut parts: Vec<&Lattice> = Vec::new();
    let a2m = catalog::a2_neg();
    parts.push(&a2m);
    parts.push(&u3);
    parts.push(&e6);
    for _ in 0..6 {
        parts.push(&a2);
    }
    let mut names: Vec<String> = vec!["a1''".into(), "a2''".into(), "u1'".into(), "u2'".into()];
    names.extend((1..=6).map(|i| format!("e{i}'")));
    for j in 1..=6 {
        names.push(format!("M1^({j})"));
        names.push(format!("M2^({j})"));
    }
    direct_sum("A2(-1)+U(3)+E6+A2^6", &parts).with_basis_labels(names)
}

/// The pieces of `H²(Y)`.
#[derive(Debug, Clone)]
pub struct H2Y {
    pub lattice: RelativeLattice,
    /// `A2(-1) ⊕ U(3) ⊕ E6 ⊕ M`.
    pub base: RelativeLattice,
    pub m: RelativeLattice,
    pub index: BigInt,
}

/// `M` inside the `H²(Y)` reference lattice.
pub fn m_in_y(reference: &Arc<Lattice>) -> RelativeLattice {
    let mut gens: Vec<QVec> = (1..=6).flat_map(|j| [yc::unit(yc::m(1, j)), yc::unit(yc::m(2, j))]).collect();
    gens.push(yc::m_hat());
    RelativeLattice::new(reference.clone(), &gens).expect("M generators")
}

/// Overlattice of `A2(-1) ⊕ U(3) ⊕ E6 ⊕ M` generated by `n1..n4`.
pub fn build_h2y(choice: GlueChoice) -> Result<H2Y, LatticeError> {
    let reference = Arc::new(y_base());
    let whole = RelativeLattice::whole(reference.clone());
    let base = overlattice(&whole, &[GlueVector::new("M^", yc::m_hat())])?.lattice;
    let n = n_vectors(choice);
    let glues: Vec<GlueVector> = n.iter().enumerate().map(|(i, v)| GlueVector::new(format!("n{}", i + 1), v.clone())).collect();
    let Overlattice { lattice, index } = overlattice(&base, &glues)?;
    Ok(H2Y { m: m_in_y(&reference), lattice, base, index })
}

/// Linear map between reference lattices, row convention `v ↦ v·matrix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeMap {
    pub name: String,
    pub source: String,
    pub target: String,
    pub matrix: Matrix,
}

impl LatticeMap {
    pub fn apply(&self, v: &[Rat]) -> QVec {
        self.matrix.vec_mul(v)
    }

    pub fn compose(&self, then: &LatticeMap) -> LatticeMap {
        LatticeMap {
            name: format!("{}∘{}", then.name, self.name),
            source: self.source.clone(),
            target: then.target.clone(),
            matrix: self.matrix.mul(&then.matrix),
        }
    }
}

/// `π_*`: `(a, u, e, f, g) ↦ (a, u, e+f+g)`, with `a1 ↦ a1'' + 2a2''` and
/// `a2 ↦ a1'' - a2''` on the `A2` block.
pub fn push_forward() -> LatticeMap {
    let mut m = Matrix::zeros(xc::RANK, yc::RANK);
    m[(xc::A1, yc::A1)] = ri(1);
    m[(xc::A1, yc::A2)] = ri(2);
    m[(xc::A2, yc::A1)] = ri(1);
    m[(xc::A2, yc::A2)] = ri(-1);
    m[(xc::U1, yc::U1)] = ri(1);
    m[(xc::U2, yc::U2)] = ri(1);
    for i in 1..=6 {
        for j in 1..=3 {
            m[(xc::e(i, j), yc::e(i))] = ri(1);
        }
    }
    LatticeMap { name: "pi_*".into(), source: "LambdaK3_glued".into(), target: "H2(Y)".into(), matrix: m }
}

/// `π^*`: `(α, μ, e) ↦ (3α, 3μ, e, e, e)` and `M_i^(j) ↦ 0`; on the `A2`
/// block `a1'' ↦ a1 + 2a2`, `a2'' ↦ a1 - a2`.
pub fn pull_back() -> LatticeMap {
    let mut m = Matrix::zeros(yc::RANK, xc::RANK);
    m[(yc::A1, xc::A1)] = ri(1);
    m[(yc::A1, xc::A2)] = ri(2);
    m[(yc::A2, xc::A1)] = ri(1);
    m[(yc::A2, xc::A2)] = ri(-1);
    m[(yc::U1, xc::U1)] = ri(3);
    m[(yc::U2, xc::U2)] = ri(3);
    for i in 1..=6 {
        for j in 1..=3 {
            m[(yc::e(i), xc::e(i, j))] = ri(1);
        }
    }
    LatticeMap { name: "pi^*".into(), source: "H2(Y)".into(), target: "LambdaK3_glued".into(), matrix: m }
}

/// Image `π_*(Λ)` inside the `H²(Y)` reference lattice.
pub fn push_forward_image(reference: &Arc<Lattice>) -> Result<RelativeLattice, LatticeError> {
    let push = push_forward();
    let lk3 = catalog::lambda_k3_glued();
    let gens: Vec<QVec> = lk3.basis().iter().map(|b| push.apply(b)).collect();
    RelativeLattice::new(reference.clone(), &gens)
}

/// Images under `π^*` listed for the glue classes.
pub fn literal_pullbacks() -> Vec<(&'static str, QVec)> {
    let y = xc::y();
    let mut two_a2 = zero_vec(xc::RANK);
    two_a2[xc::A2] = ri(2);
    let mut a1_2a2 = zero_vec(xc::RANK);
    a1_2a2[xc::A1] = ri(1);
    a1_2a2[xc::A2] = ri(2);
    vec![
        ("a1'", a1_2a2),
        ("n1", vsub(&two_a2, &y)),
        ("n2", xc::x()),
        ("n3", xc::unit(xc::U1)),
        ("n4", xc::unit(xc::U2)),
    ]
}

/// `α + σα + σ²α`.
pub fn orbit_sum(s: &SigmaAction, v: &[Rat]) -> QVec {
    let s1 = s.apply(v);
    let s2 = s.apply(&s1);
    vadd(&vadd(v, &s1), &s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_zero_vec;

    #[test]
    fn sigma_fixes_x_and_moves_y() {
        let s = SigmaAction::k3().unwrap();
        assert_eq!(s.order(), Some(3));
        assert_eq!(s.apply(&xc::x()), xc::x());
        let expect = vsub(&vadd(&xc::w(), &xc::v(2)), &xc::v(3));
        assert_eq!(s.apply(&xc::y()), expect);
    }

    #[test]
    fn identity_action_extremes() {
        let l = catalog::lambda_k3_glued();
        let s = SigmaAction::identity(l.clone());
        assert_eq!(s.invariant_sublattice().unwrap(), l);
        assert_eq!(s.coinvariant_sublattice().unwrap().rank(), 0);
    }

    #[test]
    fn e6_cubed_invariants_are_diagonal() {
        let e = catalog::e6();
        let l = RelativeLattice::whole(Arc::new(direct_sum("E6^3", &[&e, &e, &e])));
        let s = SigmaAction::new("cycle", l.clone(), block_cycle(18, 0, 6, 3)).unwrap();
        let inv = s.invariant_sublattice().unwrap();
        let diag: Vec<QVec> = (0..6)
            .map(|i| {
                let mut v = zero_vec(18);
                for j in 0..3 {
                    v[6 * j + i] = ri(1);
                }
                v
            })
            .collect();
        assert_eq!(inv, RelativeLattice::new(l.reference().clone(), &diag).unwrap());
        let e6_3 = rescale(&e, 3).unwrap();
        assert_eq!(inv.gram(), e6_3.gram());
    }

    #[test]
    fn pull_n3_and_m() {
        let pull = pull_back();
        let n = n_vectors(GlueChoice::Corrected);
        assert_eq!(pull.apply(&n[2]), xc::unit(xc::U1));
        assert!(is_zero_vec(&pull.apply(&yc::unit(yc::m(1, 5)))));
        assert_eq!(pull.apply(&n[0]), xc::unit(xc::A1));
    }

    #[test]
    fn printed_glue_fails_with_pairing() {
        match build_h2y(GlueChoice::Printed) {
            Err(LatticeError::NonIntegralPairing { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn corrected_h2y_is_unimodular() {
        let h = build_h2y(GlueChoice::Corrected).unwrap();
        assert!(h.lattice.is_even());
        assert!(h.lattice.is_unimodular());
        assert_eq!(h.lattice.signature().unwrap(), (3, 19));
        assert_eq!(h.index, BigInt::from(81));
    }
}
