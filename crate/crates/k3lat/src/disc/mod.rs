//! Finite quadratic forms and discriminant forms of even lattices.
//!
//! A form on `A = ⊕ Z/d_i` is stored by its level `N` (the exponent of `A`)
//! through the integers `q(x_i)·N mod 2N` and `b(x_i,x_j)·N mod N`. Group
//! elements are coefficient tuples `a` with `0 ≤ a_i < d_i`; the element
//! index is the mixed-radix number with `a_0` most significant, so index
//! order is lexicographic order.

mod cyclo;
mod iso;
mod isometry;

pub use cyclo::milgram_invariant;
pub use iso::{
    find_isomorphism, fqf_isomorphic, fqf_isomorphic_general, jordan_invariants, FqfIsoResult,
    JordanBlock,
};
pub use isometry::{
    isometry_search, level_sets, orbit_partition, short_vectors, Isometry, OrbitPartition,
    OrbitVerdict, SearchConfig, SearchResult, Seed,
};

use crate::lattice::{LatticeError, RelativeLattice};
use crate::linalg::{rat, rat_string, smith_normal_form, Matrix, QVec, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscError {
    #[error("lattice is odd; discriminant forms need even lattices")]
    Odd,
    #[error("lattice or form is degenerate")]
    Degenerate,
    #[error("form is not on an elementary abelian 3-group")]
    NotThreeElementary,
    #[error("vector {0} is not in the dual lattice")]
    NotInDual(String),
    #[error("map {0} is not an isometry")]
    NotIsometry(String),
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("invalid form data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Group element as coefficients on the form's generators.
pub type Element = Vec<i64>;

/// Finite abelian group with `q: A → Q/2Z` and `b: A×A → Q/Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    divisors: Vec<i64>,
    level: i64,
    q: Vec<i64>,
    b: Vec<Vec<i64>>,
}

fn modp(a: i128, m: i128) -> i128 {
    a.rem_euclid(m)
}

impl FiniteQuadraticForm {
    pub fn trivial() -> Self {
        FiniteQuadraticForm { divisors: Vec::new(), level: 1, q: Vec::new(), b: Vec::new() }
    }

    /// Builds a form from generator orders and rational values; checks that
    /// the values are well defined on the group.
    pub fn from_values(divisors: Vec<i64>, q: &[Rat], b: &[Vec<Rat>]) -> Result<Self, DiscError> {
        let n = divisors.len();
        if q.len() != n || b.len() != n || b.iter().any(|r| r.len() != n) {
            return Err(DiscError::Invalid("value tables do not match the rank".into()));
        }
        if divisors.iter().any(|&d| d < 2) {
            return Err(DiscError::Invalid("elementary divisors must exceed 1".into()));
        }
        let level = divisors.iter().fold(1i64, |a, &d| a.lcm(&d));
        let nl = Rat::from_integer(BigInt::from(level));
        let to_num = |x: &Rat, m: i64| -> Result<i64, DiscError> {
            let y = x * &nl;
            if !y.is_integer() {
                return Err(DiscError::Invalid(format!("value {} has denominator beyond the level", rat_string(x))));
            }
            Ok(y.to_integer().mod_floor(&BigInt::from(m)).to_i64().expect("reduced"))
        };
        let qn = q.iter().map(|x| to_num(x, 2 * level)).collect::<Result<Vec<_>, _>>()?;
        let mut bn = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if b[i][j] != b[j][i] {
                    return Err(DiscError::Invalid("b is not symmetric".into()));
                }
                bn[i][j] = to_num(&b[i][j], level)?;
            }
        }
        for i in 0..n {
            let d = divisors[i] as i128;
            if modp(qn[i] as i128 - bn[i][i] as i128, level as i128) != 0 {
                return Err(DiscError::Invalid(format!("q and b disagree on generator {i}")));
            }
            if modp(d * d * qn[i] as i128, 2 * level as i128) != 0 {
                return Err(DiscError::Invalid(format!("q is not defined modulo the order of generator {i}")));
            }
            for j in 0..n {
                if modp(d * bn[i][j] as i128, level as i128) != 0 {
                    return Err(DiscError::Invalid(format!("b is not defined modulo the order of generator {i}")));
                }
            }
        }
        Ok(FiniteQuadraticForm { divisors, level, q: qn, b: bn })
    }

    pub fn divisors(&self) -> &[i64] {
        &self.divisors
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn order(&self) -> u64 {
        self.divisors.iter().map(|&d| d as u64).product()
    }

    pub fn is_elementary(&self, p: i64) -> bool {
        self.divisors.iter().all(|&d| d == p)
    }

    /// `q(a)·N mod 2N`.
    pub fn q_num(&self, a: &[i64]) -> i64 {
        let m = 2 * self.level as i128;
        let mut s: i128 = 0;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            let ai = a[i] as i128;
            s = modp(s + ai * ai % m * self.q[i] as i128, m);
            for j in i + 1..a.len() {
                if a[j] != 0 {
                    s = modp(s + 2 * (ai * a[j] as i128 % m) * self.b[i][j] as i128, m);
                }
            }
        }
        s as i64
    }

    /// `b(a,c)·N mod N`.
    pub fn b_num(&self, a: &[i64], c: &[i64]) -> i64 {
        let m = self.level as i128;
        let mut s: i128 = 0;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            for j in 0..c.len() {
                if c[j] != 0 {
                    s = modp(s + (a[i] as i128 * c[j] as i128 % m) * self.b[i][j] as i128, m);
                }
            }
        }
        s as i64
    }

    /// `q(a)` in `[0, 2)`.
    pub fn q(&self, a: &[i64]) -> Rat {
        rat(self.q_num(a), self.level)
    }

    /// `b(a,c)` in `[0, 1)`.
    pub fn b(&self, a: &[i64], c: &[i64]) -> Rat {
        rat(self.b_num(a, c), self.level)
    }

    pub fn reduce(&self, a: &[i64]) -> Element {
        a.iter().zip(&self.divisors).map(|(x, d)| x.rem_euclid(*d)).collect()
    }

    pub fn add(&self, a: &[i64], c: &[i64]) -> Element {
        a.iter().zip(c).zip(&self.divisors).map(|((x, y), d)| (x + y).rem_euclid(*d)).collect()
    }

    pub fn scale(&self, n: i64, a: &[i64]) -> Element {
        a.iter().zip(&self.divisors).map(|(x, d)| (n as i128 * *x as i128).rem_euclid(*d as i128) as i64).collect()
    }

    pub fn neg(&self, a: &[i64]) -> Element {
        self.scale(-1, a)
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn element_order(&self, a: &[i64]) -> i64 {
        a.iter()
            .zip(&self.divisors)
            .fold(1i64, |acc, (x, d)| acc.lcm(&(d / x.gcd(d))))
    }

    pub fn index_of(&self, a: &[i64]) -> usize {
        a.iter().zip(&self.divisors).fold(0usize, |acc, (x, d)| acc * *d as usize + *x as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> Element {
        let mut a = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.divisors[i] as usize;
            a[i] = (idx % d) as i64;
            idx /= d;
        }
        a
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// Form with `q ↦ −q`, `b ↦ −b`.
    pub fn opposite(&self) -> Self {
        let n = self.level;
        FiniteQuadraticForm {
            divisors: self.divisors.clone(),
            level: n,
            q: self.q.iter().map(|x| (-x).rem_euclid(2 * n)).collect(),
            b: self.b.iter().map(|r| r.iter().map(|x| (-x).rem_euclid(n)).collect()).collect(),
        }
    }

    pub fn is_nondegenerate(&self) -> bool {
        let gens: Vec<Element> = (0..self.rank()).map(|i| self.unit(i)).collect();
        self.elements()
            .skip(1)
            .all(|a| gens.iter().any(|g| self.b_num(&a, g) != 0))
    }

    pub fn unit(&self, i: usize) -> Element {
        let mut e = self.zero();
        e[i] = 1;
        e
    }

    /// Multiset of q over all elements.
    pub fn value_multiset(&self) -> BTreeMap<Rat, usize> {
        let mut m = BTreeMap::new();
        for a in self.elements() {
            *m.entry(self.q(&a)).or_insert(0) += 1;
        }
        m
    }

    /// Generator values `q(x_i)`.
    pub fn generator_q(&self) -> Vec<Rat> {
        self.q.iter().map(|&x| rat(x, self.level)).collect()
    }

    /// Generator pairings `b(x_i, x_j)`.
    pub fn generator_b(&self) -> Vec<Vec<Rat>> {
        self.b.iter().map(|r| r.iter().map(|&x| rat(x, self.level)).collect()).collect()
    }

    /// Primes dividing the group order.
    pub fn primes(&self) -> Vec<i64> {
        let mut ps = Vec::new();
        for &d in &self.divisors {
            let mut d = d;
            let mut p = 2;
            while p * p <= d {
                if d % p == 0 {
                    if !ps.contains(&p) {
                        ps.push(p);
                    }
                    while d % p == 0 {
                        d /= p;
                    }
                }
                p += 1;
            }
            if d > 1 && !ps.contains(&d) {
                ps.push(d);
            }
        }
        ps.sort_unstable();
        ps
    }

    /// The p-primary part as its own form, with the embedding of its
    /// generators into this group.
    pub fn p_part(&self, p: i64) -> (FiniteQuadraticForm, Vec<Element>) {
        let mut divs = Vec::new();
        let mut gens = Vec::new();
        for (i, &d) in self.divisors.iter().enumerate() {
            let mut pk = 1;
            while d % (pk * p) == 0 {
                pk *= p;
            }
            if pk > 1 {
                let mut g = self.zero();
                g[i] = d / pk;
                divs.push(pk);
                gens.push(g);
            }
        }
        let q: Vec<Rat> = gens.iter().map(|g| self.q(g)).collect();
        let b: Vec<Vec<Rat>> = gens.iter().map(|g| gens.iter().map(|h| self.b(g, h)).collect()).collect();
        if divs.is_empty() {
            return (FiniteQuadraticForm::trivial(), gens);
        }
        let f = FiniteQuadraticForm::from_values(divs, &q, &b).expect("p-part of a valid form");
        (f, gens)
    }

    /// Image of `a` under the homomorphism sending generator `i` to `images[i]`.
    pub fn apply(&self, images: &[Element], a: &[i64]) -> Element {
        let mut out = self.zero();
        for (x, img) in a.iter().zip(images) {
            if *x != 0 {
                out = self.add(&out, &self.scale(*x, img));
            }
        }
        out
    }

    /// Whether generator images define an automorphism of the form.
    pub fn is_automorphism(&self, images: &[Element]) -> bool {
        images.len() == self.rank()
            && images.iter().all(|y| y.len() == self.rank())
            && (0..self.rank()).all(|i| {
                self.scale(self.divisors[i], &images[i]).iter().all(|&x| x == 0)
                    && self.q_num(&images[i]) == self.q[i]
                    && (0..i).all(|j| self.b_num(&images[i], &images[j]) == self.b[i][j])
            })
            && self.is_nondegenerate()
    }
}

/// Discriminant form of an even lattice together with the dual-lattice
/// representatives of its generators.
#[derive(Debug, Clone)]
pub struct DiscriminantForm {
    lattice: RelativeLattice,
    form: FiniteQuadraticForm,
    generators: Vec<QVec>,
    generator_coords: Vec<QVec>,
    gv: Matrix,
}

impl DiscriminantForm {
    pub fn form(&self) -> &FiniteQuadraticForm {
        &self.form
    }

    pub fn lattice(&self) -> &RelativeLattice {
        &self.lattice
    }

    /// Generators as reference-lattice vectors.
    pub fn generators(&self) -> &[QVec] {
        &self.generators
    }

    /// Generators in coordinates of the lattice's own basis.
    pub fn generator_coords(&self) -> &[QVec] {
        &self.generator_coords
    }

    /// Class of a dual vector given in lattice-basis coordinates.
    pub fn element_of_coords(&self, c: &[Rat]) -> Result<Element, DiscError> {
        let y = self.lattice.gram().vec_mul(c);
        if !y.iter().all(|x| x.is_integer()) {
            return Err(DiscError::NotInDual(c.iter().map(rat_string).collect::<Vec<_>>().join(",")));
        }
        let a = self.gv.vec_mul(&y);
        Ok(a.iter()
            .zip(self.form.divisors())
            .map(|(x, d)| x.to_integer().mod_floor(&BigInt::from(*d)).to_i64().expect("reduced"))
            .collect())
    }

    /// Class of a dual vector given in reference coordinates.
    pub fn element_of(&self, v: &[Rat]) -> Result<Element, DiscError> {
        let c = self
            .lattice
            .coords(v)
            .ok_or_else(|| DiscError::NotInDual(v.iter().map(rat_string).collect::<Vec<_>>().join(",")))?;
        self.element_of_coords(&c)
    }

    /// Reference vector representing an element.
    pub fn representative(&self, a: &[i64]) -> QVec {
        let n = self.lattice.reference().rank();
        let mut v = crate::linalg::zero_vec(n);
        for (x, g) in a.iter().zip(&self.generators) {
            if *x != 0 {
                let c = Rat::from_integer(BigInt::from(*x));
                for j in 0..n {
                    v[j] += &c * &g[j];
                }
            }
        }
        v
    }

    /// Automorphism of the form induced by a lattice isometry.
    pub fn induced_action(&self, iso: &Isometry) -> Result<Vec<Element>, DiscError> {
        if iso.matrix().nrows() != self.lattice.rank() {
            return Err(DiscError::NotIsometry(iso.name.clone()));
        }
        self.generator_coords
            .iter()
            .map(|c| self.element_of_coords(&iso.apply_coords(c)))
            .collect()
    }
}

/// Discriminant form `L*/L` of an even nondegenerate lattice.
pub fn discriminant_form(l: &RelativeLattice) -> Result<DiscriminantForm, DiscError> {
    let g = l.gram();
    if !l.is_integral() {
        return Err(DiscError::Invalid("Gram matrix is not integral".into()));
    }
    if !l.is_even() {
        return Err(DiscError::Odd);
    }
    let k = l.rank();
    if k > 0 && g.det().is_zero() {
        return Err(DiscError::Degenerate);
    }
    let s = smith_normal_form(g).map_err(|e| DiscError::Invalid(e.to_string()))?;
    let diag = s.diagonal();
    let kept: Vec<usize> = (0..k).filter(|&i| diag[i] > BigInt::one()).collect();
    let divisors: Vec<i64> = kept
        .iter()
        .map(|&i| diag[i].to_i64().ok_or_else(|| DiscError::Invalid("discriminant too large".into())))
        .collect::<Result<_, _>>()?;
    let urows: Vec<QVec> = kept.iter().map(|&i| s.u.row(i).to_vec()).collect();
    let w = Matrix::from_rows(urows.clone(), k).mul(g).mul(&Matrix::from_rows(urows.clone(), k).transpose());
    let dr: Vec<Rat> = divisors.iter().map(|&d| Rat::from_integer(BigInt::from(d))).collect();
    let m = kept.len();
    let q: Vec<Rat> = (0..m).map(|i| &w[(i, i)] / (&dr[i] * &dr[i])).collect();
    let b: Vec<Vec<Rat>> =
        (0..m).map(|i| (0..m).map(|j| &w[(i, j)] / (&dr[i] * &dr[j])).collect()).collect();
    let form = if m == 0 { FiniteQuadraticForm::trivial() } else { FiniteQuadraticForm::from_values(divisors, &q, &b)? };
    let generator_coords: Vec<QVec> =
        urows.iter().zip(&dr).map(|(u, d)| u.iter().map(|x| x / d).collect()).collect();
    let generators = generator_coords.iter().map(|c| l.from_coords(c)).collect();
    let mut gv = Matrix::zeros(k, m);
    for i in 0..k {
        for (t, &j) in kept.iter().enumerate() {
            gv[(i, t)] = s.v[(i, j)].clone();
        }
    }
    Ok(DiscriminantForm { lattice: l.clone(), form, generators, generator_coords, gv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn e6() -> Lattice {
        let mut g = vec![vec![0i64; 6]; 6];
        for i in 0..6 {
            g[i][i] = -2;
        }
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)] {
            g[a][b] = 1;
            g[b][a] = 1;
        }
        Lattice::from_i64("E6", &g).unwrap()
    }

    #[test]
    fn disc_of_u_is_trivial() {
        let u = Lattice::from_i64("U", &[vec![0, 1], vec![1, 0]]).unwrap().whole();
        let d = discriminant_form(&u).unwrap();
        assert_eq!(d.form().order(), 1);
    }

    #[test]
    fn disc_of_e6() {
        let d = discriminant_form(&e6().whole()).unwrap();
        assert_eq!(d.form().divisors(), &[3]);
        assert_eq!(d.form().q(&[1]), rat(2, 3));
        assert_eq!(d.form().q(&[2]), rat(2, 3));
    }

    #[test]
    fn odd_lattice_rejected() {
        let l = Lattice::from_i64("I", &[vec![1]]).unwrap().whole();
        assert_eq!(discriminant_form(&l).unwrap_err(), DiscError::Odd);
    }

    #[test]
    fn element_of_generators() {
        let d = discriminant_form(&e6().whole()).unwrap();
        for (i, g) in d.generators().iter().enumerate() {
            let mut e = d.form().zero();
            e[i] = 1;
            assert_eq!(d.element_of(g).unwrap(), e);
        }
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(FiniteQuadraticForm::from_values(vec![3], &[rat(1, 2)], &[vec![rat(1, 2)]]).is_err());
    }
}
