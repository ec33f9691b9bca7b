//! Named lattices on fixed, documented bases.
//!
//! Frozen conventions (every glue vector in the crate depends on them):
//!
//! * root lattices are negative definite; `A2 = [[-2,1],[1,-2]]`,
//!   `U = [[0,1],[1,0]]`, `A2(-1) = [[2,-1],[-1,2]]`;
//! * `E6` has basis `e1..e6`, the chain `e1-e2-e3-e4-e5` with `e6` attached
//!   to `e3`; `E8` is the chain `e1-…-e7` with `e8` attached to `e5`;
//! * the K3 lattice is built on `A2(-1) ⊕ U ⊕ E6 ⊕ E6 ⊕ E6` with 22
//!   coordinates `a1, a2 | u1, u2 | e^(1) | e^(2) | e^(3)` (see [`xc`]);
//! * `K12tilde` has basis `k1..k12` with Gram `[[E6(2), E6], [E6, E6(2)]]`;
//! * `M` lives on `A2^6` with coordinates `M1^(1), M2^(1), …, M1^(6), M2^(6)`.

use crate::disc::{discriminant_form, DiscError};
use crate::lattice::{direct_sum, overlattice, rescale, GlueVector, Lattice, LatticeError, RelativeLattice};
use crate::linalg::{rat, ri, zero_vec, Matrix, QVec, Rat};
use num_bigint::BigInt;
use num_traits::Signed;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown lattice name {0:?}")]
    UnknownName(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("scaled dual is not integral")]
    NonIntegralDual,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

/// Every lattice the catalog can build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Name {
    /// Negative definite `A_n`.
    A(usize),
    E6,
    E8,
    U,
    /// Rank-one lattice `⟨2d⟩` for the given `d`.
    TwoD(i64),
    A2Neg,
    A2DualScaled,
    E6DualScaled,
    K12Tilde,
    K12,
    M,
    E6CubedPrime,
    LambdaK3Standard,
    LambdaK3Glued,
    UPlusA2Neg,
}

impl Name {
    /// Names listed by `catalog list`, with `⟨2d⟩` at `d = 1`.
    pub fn listing() -> Vec<Name> {
        vec![
            Name::A(2),
            Name::E6,
            Name::E8,
            Name::U,
            Name::TwoD(1),
            Name::A2Neg,
            Name::A2DualScaled,
            Name::E6DualScaled,
            Name::K12Tilde,
            Name::K12,
            Name::M,
            Name::E6CubedPrime,
            Name::LambdaK3Standard,
            Name::LambdaK3Glued,
            Name::UPlusA2Neg,
        ]
    }

    pub fn parse(s: &str) -> Result<Name, CatalogError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = t.to_ascii_lowercase();
        let n = match lower.as_str() {
            "e6" => Name::E6,
            "e8" => Name::E8,
            "u" => Name::U,
            "a2(-1)" | "a2neg" => Name::A2Neg,
            "a2*(3)" | "a2dual3" => Name::A2DualScaled,
            "e6*(3)" | "e6dual3" => Name::E6DualScaled,
            "k12tilde" | "k12~" => Name::K12Tilde,
            "k12" => Name::K12,
            "m" | "m_z/3z" | "mz3" => Name::M,
            "(e6^3)'" | "e6^3'" | "e6cubedprime" => Name::E6CubedPrime,
            "lambdak3_standard" | "lambdak3standard" => Name::LambdaK3Standard,
            "lambdak3_glued" | "lambdak3glued" | "lambdak3" => Name::LambdaK3Glued,
            "u+a2(-1)" | "u⊕a2(-1)" => Name::UPlusA2Neg,
            _ => {
                if let Some(rest) = lower.strip_prefix('a') {
                    let k: usize = rest.parse().map_err(|_| CatalogError::UnknownName(s.into()))?;
                    if k == 0 {
                        return Err(CatalogError::BadParameter("A_n needs n ≥ 1".into()));
                    }
                    Name::A(k)
                } else if let Some(inner) = lower.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
                    let two_d: i64 = inner.parse().map_err(|_| CatalogError::UnknownName(s.into()))?;
                    if two_d <= 0 || two_d % 2 != 0 {
                        return Err(CatalogError::BadParameter(format!("<{two_d}> is not <2d> with d > 0")));
                    }
                    Name::TwoD(two_d / 2)
                } else {
                    return Err(CatalogError::UnknownName(s.into()));
                }
            }
        };
        Ok(n)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::A(n) => write!(f, "A{n}"),
            Name::E6 => write!(f, "E6"),
            Name::E8 => write!(f, "E8"),
            Name::U => write!(f, "U"),
            Name::TwoD(d) => write!(f, "<{}>", 2 * d),
            Name::A2Neg => write!(f, "A2(-1)"),
            Name::A2DualScaled => write!(f, "A2*(3)"),
            Name::E6DualScaled => write!(f, "E6*(3)"),
            Name::K12Tilde => write!(f, "K12tilde"),
            Name::K12 => write!(f, "K12"),
            Name::M => write!(f, "M"),
            Name::E6CubedPrime => write!(f, "(E6^3)'"),
            Name::LambdaK3Standard => write!(f, "LambdaK3_standard"),
            Name::LambdaK3Glued => write!(f, "LambdaK3_glued"),
            Name::UPlusA2Neg => write!(f, "U+A2(-1)"),
        }
    }
}

/// A catalog lattice: the lattice on its canonical basis.
#[derive(Debug, Clone)]
pub struct NamedLattice {
    pub name: Name,
    pub lattice: RelativeLattice,
}

/// Rank, signature, `|det|` and discriminant group shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub rank: usize,
    pub signature: (usize, usize),
    pub abs_det: BigInt,
    pub disc_divisors: Vec<i64>,
    pub even: bool,
}

impl NamedLattice {
    pub fn invariants(&self) -> Result<Invariants, CatalogError> {
        let l = &self.lattice;
        let disc = discriminant_form(l)?;
        Ok(Invariants {
            rank: l.rank(),
            signature: l.signature()?,
            abs_det: l.det().abs().to_integer(),
            disc_divisors: disc.form().divisors().to_vec(),
            even: l.is_even(),
        })
    }
}

fn sym(n: usize, diag: i64, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = diag;
    }
    for &(a, b) in edges {
        g[a][b] = 1;
        g[b][a] = 1;
    }
    g
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn a_n(n: usize) -> Lattice {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Lattice::from_i64(format!("A{n}"), &sym(n, -2, &edges)).expect("A_n is nondegenerate").with_basis_labels(labels("a", n))
}

pub fn e6() -> Lattice {
    Lattice::from_i64("E6", &sym(6, -2, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]))
        .expect("E6 is nondegenerate")
        .with_basis_labels(labels("e", 6))
}

pub fn e8() -> Lattice {
    Lattice::from_i64("E8", &sym(8, -2, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)]))
        .expect("E8 is nondegenerate")
        .with_basis_labels(labels("e", 8))
}

pub fn u() -> Lattice {
    Lattice::from_i64("U", &[vec![0, 1], vec![1, 0]]).expect("U").with_basis_labels(labels("u", 2))
}

pub fn two_d(d: i64) -> Result<Lattice, CatalogError> {
    if d <= 0 {
        return Err(CatalogError::BadParameter(format!("d = {d} must be positive")));
    }
    Ok(Lattice::from_i64(format!("<{}>", 2 * d), &[vec![2 * d]])?.with_basis_labels(vec!["L".into()]))
}

pub fn a2_neg() -> Lattice {
    rescale(&a_n(2), -1).expect("nonzero").relabel("A2(-1)")
}

/// Dual basis Gram scaled by `n`.
pub fn scaled_dual(l: &Lattice, n: i64) -> Result<Lattice, CatalogError> {
    let inv = l.gram().inverse().ok_or(LatticeError::Degenerate(l.label().into()))?;
    let g = inv.scale(&ri(n));
    if !g.is_integral() {
        return Err(CatalogError::NonIntegralDual);
    }
    Ok(Lattice::new(format!("{}*({})", l.label(), n), g)?)
}

pub fn k12_tilde() -> Lattice {
    let e = e6();
    let e2 = rescale(&e, 2).expect("nonzero");
    let mut m = Matrix::zeros(12, 12);
    for i in 0..6 {
        for j in 0..6 {
            m[(i, j)] = e2.gram()[(i, j)].clone();
            m[(i + 6, j + 6)] = e2.gram()[(i, j)].clone();
            m[(i, j + 6)] = e.gram()[(i, j)].clone();
            m[(i + 6, j)] = e.gram()[(i, j)].clone();
        }
    }
    Lattice::new("K12tilde", m).expect("K12tilde is nondegenerate").with_basis_labels(labels("k", 12))
}

/// `z = (k1+k4+k7+k10 + 2(k2+k5+k8+k11))/3` in `k`-coordinates.
pub fn z_glue() -> QVec {
    let mut z = zero_vec(12);
    for i in [1, 4, 7, 10] {
        z[i - 1] = rat(1, 3);
    }
    for i in [2, 5, 8, 11] {
        z[i - 1] = rat(2, 3);
    }
    z
}

/// `K12 = K12tilde + Z·z`, relative to `K12tilde`.
pub fn k12() -> RelativeLattice {
    let base = RelativeLattice::whole(Arc::new(k12_tilde()));
    overlattice(&base, &[GlueVector::new("z", z_glue())]).expect("z is an admissible glue").lattice
}

pub fn a2_sixfold() -> Lattice {
    let a = a_n(2);
    let parts: Vec<&Lattice> = vec![&a; 6];
    let mut l = direct_sum("A2^6", &parts);
    let mut names = Vec::new();
    for j in 1..=6 {
        names.push(format!("M1^({j})"));
        names.push(format!("M2^({j})"));
    }
    l = l.with_basis_labels(names);
    l
}

/// Coordinate of `M_i^(j)` on `A2^6`, `i ∈ {1,2}`, `j ∈ 1..=6`.
pub fn m_index(i: usize, j: usize) -> usize {
    2 * (j - 1) + (i - 1)
}

/// `M̂ = Σ_j (M1^(j) + 2 M2^(j))/3` on `A2^6`.
pub fn m_hat() -> QVec {
    let mut v = zero_vec(12);
    for j in 1..=6 {
        v[m_index(1, j)] = rat(1, 3);
        v[m_index(2, j)] = rat(2, 3);
    }
    v
}

/// `M = A2^6 + Z·M̂`, relative to `A2^6`.
pub fn m_lattice() -> RelativeLattice {
    let base = RelativeLattice::whole(Arc::new(a2_sixfold()));
    overlattice(&base, &[GlueVector::new("M^", m_hat())]).expect("M^ is an admissible glue").lattice
}

/// Coordinates on `A2(-1) ⊕ U ⊕ E6^3`, the base of the glued K3 lattice.
pub mod xc {
    use crate::linalg::{rat, vadd, vsub, zero_vec, QVec};

    pub const RANK: usize = 22;
    pub const A1: usize = 0;
    pub const A2: usize = 1;
    pub const U1: usize = 2;
    pub const U2: usize = 3;

    /// Coordinate of `e_i^(j)`, `i ∈ 1..=6`, `j ∈ 1..=3`.
    pub fn e(i: usize, j: usize) -> usize {
        4 + 6 * (j - 1) + (i - 1)
    }

    /// `v^(j) = (e1 + 2e2 + e4 + 2e5)^(j)/3`.
    pub fn v(j: usize) -> QVec {
        let mut x = zero_vec(RANK);
        x[e(1, j)] = rat(1, 3);
        x[e(2, j)] = rat(2, 3);
        x[e(4, j)] = rat(1, 3);
        x[e(5, j)] = rat(2, 3);
        x
    }

    /// `w = (a1 + 2a2)/3`.
    pub fn w() -> QVec {
        let mut x = zero_vec(RANK);
        x[A1] = rat(1, 3);
        x[A2] = rat(2, 3);
        x
    }

    /// `x = v^(1) + v^(2) + v^(3)`.
    pub fn x() -> QVec {
        vadd(&vadd(&v(1), &v(2)), &v(3))
    }

    /// `y = w + v^(1) - v^(2)`.
    pub fn y() -> QVec {
        vsub(&vadd(&w(), &v(1)), &v(2))
    }

    pub fn unit(i: usize) -> QVec {
        crate::linalg::unit_vec(RANK, i)
    }
}

pub fn k3_base() -> Lattice {
    let e = e6();
    let mut names = vec!["a1".to_string(), "a2".into(), "u1".into(), "u2".into()];
    for j in 1..=3 {
        for i in 1..=6 {
            names.push(format!("e{i}^({j})"));
        }
    }
    direct_sum("A2(-1)+U+E6^3", &[&a2_neg(), &u(), &e, &e, &e]).with_basis_labels(names)
}

/// The K3 lattice as the overlattice of `A2(-1) ⊕ U ⊕ E6^3` by `x`, `y`.
pub fn lambda_k3_glued() -> RelativeLattice {
    let base = RelativeLattice::whole(Arc::new(k3_base()));
    overlattice(&base, &[GlueVector::new("x", xc::x()), GlueVector::new("y", xc::y())])
        .expect("x and y are admissible glues")
        .lattice
}

/// `(E6^3)' = E6^3 + Z·x`.
pub fn e6_cubed_prime() -> RelativeLattice {
    let e = e6();
    let l = direct_sum("E6^3", &[&e, &e, &e]);
    let x: QVec = xc::x()[4..].to_vec();
    let base = RelativeLattice::whole(Arc::new(l));
    overlattice(&base, &[GlueVector::new("x", x)]).expect("x is an admissible glue").lattice
}

pub fn lambda_k3_standard() -> Lattice {
    let (u, e) = (u(), e8());
    direct_sum("U^3+E8^2", &[&u, &u, &u, &e, &e])
}

pub fn build(name: Name) -> Result<NamedLattice, CatalogError> {
    let whole = |l: Lattice| RelativeLattice::whole(Arc::new(l));
    let lattice = match name {
        Name::A(n) => {
            if n == 0 {
                return Err(CatalogError::BadParameter("A_n needs n ≥ 1".into()));
            }
            whole(a_n(n))
        }
        Name::E6 => whole(e6()),
        Name::E8 => whole(e8()),
        Name::U => whole(u()),
        Name::TwoD(d) => whole(two_d(d)?),
        Name::A2Neg => whole(a2_neg()),
        Name::A2DualScaled => whole(scaled_dual(&a_n(2), 3)?.relabel("A2*(3)")),
        Name::E6DualScaled => whole(scaled_dual(&e6(), 3)?.relabel("E6*(3)")),
        Name::K12Tilde => whole(k12_tilde()),
        Name::K12 => k12(),
        Name::M => m_lattice(),
        Name::E6CubedPrime => e6_cubed_prime(),
        Name::LambdaK3Standard => whole(lambda_k3_standard()),
        Name::LambdaK3Glued => lambda_k3_glued(),
        Name::UPlusA2Neg => whole(direct_sum("U+A2(-1)", &[&u(), &a2_neg()])),
    };
    Ok(NamedLattice { name, lattice })
}

/// Expected invariants of each catalog entry, from the standard tables.
pub fn expected_invariants(name: Name) -> Option<Invariants> {
    let inv = |rank, sig, det: i64, divs: Vec<i64>| Invariants {
        rank,
        signature: sig,
        abs_det: BigInt::from(det),
        disc_divisors: divs,
        even: true,
    };
    Some(match name {
        Name::A(2) => inv(2, (0, 2), 3, vec![3]),
        Name::E6 => inv(6, (0, 6), 3, vec![3]),
        Name::E8 => inv(8, (0, 8), 1, vec![]),
        Name::U => inv(2, (1, 1), 1, vec![]),
        Name::TwoD(d) => inv(1, (1, 0), 2 * d, vec![2 * d]),
        Name::A2Neg => inv(2, (2, 0), 3, vec![3]),
        Name::A2DualScaled => inv(2, (0, 2), 3, vec![3]),
        Name::E6DualScaled => inv(6, (0, 6), 243, vec![3; 5]),
        Name::K12Tilde => inv(12, (0, 12), 6561, vec![3, 3, 3, 3, 3, 3, 9]),
        Name::K12 => inv(12, (0, 12), 729, vec![3; 6]),
        Name::M => inv(12, (0, 12), 81, vec![3; 4]),
        Name::E6CubedPrime => inv(18, (0, 18), 3, vec![3]),
        Name::LambdaK3Standard | Name::LambdaK3Glued => inv(22, (3, 19), 1, vec![]),
        Name::UPlusA2Neg => inv(4, (3, 1), 3, vec![3]),
        Name::A(_) => return None,
    })
}

/// `v·G·w` on the K3 base lattice.
pub fn k3_pair(v: &[Rat], w: &[Rat]) -> Rat {
    k3_base().pair(v, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for n in Name::listing() {
            assert_eq!(Name::parse(&n.to_string()).unwrap(), n);
        }
        assert_eq!(Name::parse("<10>").unwrap(), Name::TwoD(5));
        assert!(Name::parse("<3>").is_err());
        assert!(Name::parse("Leech").is_err());
    }

    #[test]
    fn rescaled_examples() {
        assert_eq!(rescale(&u(), 3).unwrap().gram(), &Matrix::from_i64(&[vec![0, 3], vec![3, 0]]));
        assert_eq!(rescale(&e6(), 2).unwrap().gram()[(0, 0)], ri(-4));
        let a2m3 = rescale(&a2_neg(), 3).unwrap();
        assert_eq!(a2m3.gram(), &Matrix::from_i64(&[vec![6, -3], vec![-3, 6]]));
    }

    #[test]
    fn u_dual_is_u() {
        let d = scaled_dual(&u(), 1).unwrap();
        assert_eq!(d.gram(), u().gram());
        assert!(matches!(scaled_dual(&a_n(2), 1), Err(CatalogError::NonIntegralDual)));
    }
}
