//! Integral lattices, sublattices and overlattices given by rational
//! coordinates, glue vectors and orthogonal complements.

use crate::linalg::{
    common_denominator, hermite_normal_form, integer_left_kernel, integral_saturation,
    is_integral_vec, rat_string, ri, Matrix, QVec, Rat,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix of {0} is not square")]
    NotSquare(String),
    #[error("Gram matrix of {0} is not symmetric")]
    NotSymmetric(String),
    #[error("Gram matrix of {label} has non-integer entry {value} at ({i}, {j})")]
    NonIntegral { label: String, i: usize, j: usize, value: String },
    #[error("lattice {0} is degenerate")]
    Degenerate(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("glue {first} · {second} = {value} is not an integer")]
    NonIntegralPairing { first: String, second: String, value: String },
    #[error("glue {name} has odd or fractional norm {value}")]
    OddNorm { name: String, value: String },
    #[error("vector is not in the span of {0}")]
    NotInSpan(String),
    #[error("rescaling factor must be nonzero")]
    ZeroScale,
    #[error("lattices live in different reference lattices ({0} vs {1})")]
    ReferenceMismatch(String, String),
}

/// Finite-rank free module with an integral symmetric bilinear form.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    label: String,
    gram: Matrix,
    basis_labels: Option<Vec<String>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({}, rank {}) {:?}", self.label, self.rank(), self.gram)
    }
}

fn check_gram(label: &str, gram: &Matrix) -> Result<(), LatticeError> {
    if !gram.is_square() {
        return Err(LatticeError::NotSquare(label.to_string()));
    }
    if !gram.is_symmetric() {
        return Err(LatticeError::NotSymmetric(label.to_string()));
    }
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            if !gram[(i, j)].is_integer() {
                return Err(LatticeError::NonIntegral {
                    label: label.to_string(),
                    i,
                    j,
                    value: rat_string(&gram[(i, j)]),
                });
            }
        }
    }
    Ok(())
}

impl Lattice {
    /// Nondegenerate integral lattice.
    pub fn new(label: impl Into<String>, gram: Matrix) -> Result<Self, LatticeError> {
        let label = label.into();
        check_gram(&label, &gram)?;
        if gram.nrows() > 0 && gram.det().is_zero() {
            return Err(LatticeError::Degenerate(label));
        }
        Ok(Lattice { label, gram, basis_labels: None })
    }

    /// Integral form that may be degenerate; only for symbol lattices.
    pub fn new_degenerate(label: impl Into<String>, gram: Matrix) -> Result<Self, LatticeError> {
        let label = label.into();
        check_gram(&label, &gram)?;
        Ok(Lattice { label, gram, basis_labels: None })
    }

    pub fn from_i64(label: impl Into<String>, rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::new(label, Matrix::from_i64(rows))
    }

    pub fn with_basis_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.rank());
        self.basis_labels = Some(labels);
        self
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn basis_labels(&self) -> Option<&[String]> {
        self.basis_labels.as_deref()
    }

    pub fn det(&self) -> BigInt {
        if self.rank() == 0 {
            return BigInt::one();
        }
        self.gram.det().to_integer()
    }

    pub fn is_degenerate(&self) -> bool {
        self.rank() > 0 && self.gram.det().is_zero()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].to_integer() % 2 == BigInt::zero())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn signature(&self) -> Result<(usize, usize), LatticeError> {
        signature_of(&self.gram).ok_or_else(|| LatticeError::Degenerate(self.label.clone()))
    }

    /// Pairing of two coordinate vectors.
    pub fn pair(&self, u: &[Rat], v: &[Rat]) -> Rat {
        self.gram.bilinear(u, v)
    }

    pub fn norm(&self, v: &[Rat]) -> Rat {
        self.pair(v, v)
    }

    /// The lattice as a full-rank sublattice of itself.
    pub fn whole(self) -> RelativeLattice {
        RelativeLattice::whole(Arc::new(self))
    }
}

/// Sylvester signature by symmetric elimination; `None` when degenerate.
pub fn signature_of(gram: &Matrix) -> Option<(usize, usize)> {
    let n = gram.nrows();
    let mut m = gram.clone();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if m[(k, k)].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !m[(j, j)].is_zero()) {
                swap_sym(&mut m, j, k);
            } else if let Some(j) = (k + 1..n).find(|&j| !m[(k, j)].is_zero()) {
                // row/col k += row/col j makes the diagonal 2·m[k][j]
                for t in 0..n {
                    let x = &m[(k, t)] + &m[(j, t)];
                    m[(k, t)] = x;
                }
                for t in 0..n {
                    let x = &m[(t, k)] + &m[(t, j)];
                    m[(t, k)] = x;
                }
            } else {
                return None;
            }
        }
        let p = m[(k, k)].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if m[(i, k)].is_zero() {
                continue;
            }
            let f = &m[(i, k)] / &p;
            for j in k + 1..n {
                if !m[(k, j)].is_zero() {
                    let x = &m[(i, j)] - &f * &m[(k, j)];
                    m[(i, j)] = x;
                }
            }
        }
        for i in k + 1..n {
            m[(i, k)] = Rat::zero();
            m[(k, i)] = Rat::zero();
        }
    }
    Some((pos, neg))
}

fn swap_sym(m: &mut Matrix, a: usize, b: usize) {
    let n = m.nrows();
    for t in 0..n {
        let x = m[(a, t)].clone();
        m[(a, t)] = m[(b, t)].clone();
        m[(b, t)] = x;
    }
    for t in 0..n {
        let x = m[(t, a)].clone();
        m[(t, a)] = m[(t, b)].clone();
        m[(t, b)] = x;
    }
}

/// Orthogonal direct sum with block-diagonal Gram matrix.
pub fn direct_sum(label: impl Into<String>, parts: &[&Lattice]) -> Lattice {
    let grams: Vec<&Matrix> = parts.iter().map(|p| p.gram()).collect();
    let labels: Option<Vec<String>> = parts
        .iter()
        .map(|p| p.basis_labels().map(<[String]>::to_vec))
        .collect::<Option<Vec<_>>>()
        .map(|v| v.concat());
    Lattice { label: label.into(), gram: Matrix::block_diag(&grams), basis_labels: labels }
}

/// `L(n)`: the form multiplied by `n`.
pub fn rescale(l: &Lattice, n: i64) -> Result<Lattice, LatticeError> {
    if n == 0 {
        return Err(LatticeError::ZeroScale);
    }
    Ok(Lattice {
        label: format!("{}({})", l.label, n),
        gram: l.gram.scale(&ri(n)),
        basis_labels: l.basis_labels.clone(),
    })
}

/// Sublattice, overlattice or image given by rational coordinates with
/// respect to a fixed reference lattice; the basis is kept in HNF.
#[derive(Clone)]
pub struct RelativeLattice {
    reference: Arc<Lattice>,
    basis: Vec<QVec>,
    pivots: Vec<usize>,
    pivot_inv: Matrix,
    gram: Matrix,
}

impl fmt::Debug for RelativeLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RelativeLattice(rank {} in {})", self.rank(), self.reference.label())
    }
}

impl PartialEq for RelativeLattice {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.reference.gram() == other.reference.gram()
    }
}

impl Eq for RelativeLattice {}

impl RelativeLattice {
    /// Z-span of `generators`, stored by its HNF basis.
    pub fn new(reference: Arc<Lattice>, generators: &[QVec]) -> Result<Self, LatticeError> {
        let n = reference.rank();
        if let Some(g) = generators.iter().find(|g| g.len() != n) {
            return Err(LatticeError::Dimension(format!(
                "generator of length {} in reference {} of rank {}",
                g.len(),
                reference.label(),
                n
            )));
        }
        let basis = hermite_normal_form(generators);
        Ok(Self::from_hnf(reference, basis))
    }

    fn from_hnf(reference: Arc<Lattice>, basis: Vec<QVec>) -> Self {
        let k = basis.len();
        let pivots: Vec<usize> = basis
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero"))
            .collect();
        let mut bp = Matrix::zeros(k, k);
        for i in 0..k {
            for (j, &p) in pivots.iter().enumerate() {
                bp[(i, j)] = basis[i][p].clone();
            }
        }
        let pivot_inv = bp.inverse().expect("HNF pivot block is triangular");
        let b = Matrix::from_rows(basis.clone(), reference.rank());
        let gram = b.mul(reference.gram()).mul(&b.transpose());
        RelativeLattice { reference, basis, pivots, pivot_inv, gram }
    }

    pub fn whole(reference: Arc<Lattice>) -> Self {
        let n = reference.rank();
        let basis = (0..n).map(|i| crate::linalg::unit_vec(n, i)).collect();
        Self::from_hnf(reference, basis)
    }

    pub fn reference(&self) -> &Arc<Lattice> {
        &self.reference
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_rows(self.basis.clone(), self.reference.rank())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Gram matrix `B·G·Bᵀ` of the HNF basis.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn is_integral(&self) -> bool {
        self.gram.is_integral()
    }

    pub fn is_even(&self) -> bool {
        self.is_integral()
            && (0..self.rank()).all(|i| self.gram[(i, i)].to_integer() % 2 == BigInt::zero())
    }

    pub fn det(&self) -> Rat {
        if self.rank() == 0 {
            return Rat::one();
        }
        self.gram.det()
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn signature(&self) -> Result<(usize, usize), LatticeError> {
        signature_of(&self.gram)
            .ok_or_else(|| LatticeError::Degenerate(format!("sublattice of {}", self.reference.label())))
    }

    /// Standalone lattice on the HNF basis.
    pub fn to_lattice(&self, label: impl Into<String>) -> Result<Lattice, LatticeError> {
        Lattice::new(label, self.gram.clone())
    }

    pub fn pair(&self, u: &[Rat], v: &[Rat]) -> Rat {
        self.reference.pair(u, v)
    }

    /// Coordinates `c` with `c·B = v`, or `None` outside the rational span.
    pub fn coords(&self, v: &[Rat]) -> Option<QVec> {
        let vp: QVec = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let c = self.pivot_inv.vec_mul(&vp);
        (self.from_coords(&c) == v).then_some(c)
    }

    /// Reference vector `c·B`.
    pub fn from_coords(&self, c: &[Rat]) -> QVec {
        let n = self.reference.rank();
        let mut out = crate::linalg::zero_vec(n);
        for (ci, b) in c.iter().zip(&self.basis) {
            if ci.is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[j].is_zero() {
                    out[j] += ci * &b[j];
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coords(v).is_some_and(|c| is_integral_vec(&c))
    }

    pub fn contains_lattice(&self, other: &RelativeLattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// `[self : sub]` when `sub ⊆ self` has full rank in the same span.
    pub fn index_of(&self, sub: &RelativeLattice) -> Option<BigInt> {
        if sub.rank() != self.rank() || !self.contains_lattice(sub) {
            return None;
        }
        let ratio = (sub.det() / self.det()).abs();
        if !ratio.is_integer() {
            return None;
        }
        let r = ratio.to_integer();
        let s = r.sqrt();
        (&s * &s == r).then_some(s)
    }

    fn same_reference(&self, other: &RelativeLattice) -> Result<(), LatticeError> {
        if Arc::ptr_eq(&self.reference, &other.reference)
            || self.reference.gram() == other.reference.gram()
        {
            Ok(())
        } else {
            Err(LatticeError::ReferenceMismatch(
                self.reference.label().to_string(),
                other.reference.label().to_string(),
            ))
        }
    }
}

/// A coset representative adjoined to a lattice to form an overlattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueVector {
    pub label: String,
    pub coords: QVec,
    pub denominator: BigInt,
}

impl GlueVector {
    pub fn new(label: impl Into<String>, coords: QVec) -> Self {
        let denominator = common_denominator(coords.iter());
        GlueVector { label: label.into(), coords, denominator }
    }
}

/// Result of [`overlattice`].
#[derive(Debug, Clone)]
pub struct Overlattice {
    pub lattice: RelativeLattice,
    pub index: BigInt,
}

/// Lattice generated by `base` and the glue vectors, with its index over
/// `base`; glues must pair integrally with everything and have even norm.
pub fn overlattice(base: &RelativeLattice, glues: &[GlueVector]) -> Result<Overlattice, LatticeError> {
    let n = base.reference().rank();
    for g in glues {
        if g.coords.len() != n {
            return Err(LatticeError::Dimension(format!("glue {} has wrong length", g.label)));
        }
    }
    let base_name = |i: usize| format!("{}[{}]", base.reference().label(), i);
    for g in glues {
        for (i, b) in base.basis().iter().enumerate() {
            let p = base.pair(&g.coords, b);
            if !p.is_integer() {
                return Err(LatticeError::NonIntegralPairing {
                    first: g.label.clone(),
                    second: base_name(i),
                    value: rat_string(&p),
                });
            }
        }
    }
    for (a, g) in glues.iter().enumerate() {
        let nn = base.pair(&g.coords, &g.coords);
        if !nn.is_integer() || nn.to_integer() % 2 != BigInt::zero() {
            return Err(LatticeError::OddNorm { name: g.label.clone(), value: rat_string(&nn) });
        }
        for h in &glues[a + 1..] {
            let p = base.pair(&g.coords, &h.coords);
            if !p.is_integer() {
                return Err(LatticeError::NonIntegralPairing {
                    first: g.label.clone(),
                    second: h.label.clone(),
                    value: rat_string(&p),
                });
            }
        }
    }
    let mut gens = base.basis().to_vec();
    gens.extend(glues.iter().map(|g| g.coords.clone()));
    let lattice = RelativeLattice::new(base.reference().clone(), &gens)?;
    let index = lattice
        .index_of(base)
        .ok_or_else(|| LatticeError::Dimension("glue vectors leave the rational span of the base".into()))?;
    Ok(Overlattice { lattice, index })
}

/// Integer matrix obtained by scaling every column to clear denominators.
fn clear_columns(m: &Matrix) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = vec![Vec::with_capacity(m.ncols()); m.nrows()];
    for j in 0..m.ncols() {
        let col = m.col(j);
        let d = Rat::from_integer(common_denominator(col.iter()));
        for (i, x) in col.iter().enumerate() {
            out[i].push((x * &d).to_integer());
        }
    }
    out
}

/// Primitive complement of `sub` in its reference lattice.
pub fn orthogonal_complement(sub: &RelativeLattice) -> RelativeLattice {
    let whole = RelativeLattice::whole(sub.reference().clone());
    complement_within(&whole, sub).expect("same reference by construction")
}

/// `{x ∈ ambient : x·sub = 0}`, automatically primitive in `ambient`.
pub fn complement_within(
    ambient: &RelativeLattice,
    sub: &RelativeLattice,
) -> Result<RelativeLattice, LatticeError> {
    ambient.same_reference(sub)?;
    let reference = ambient.reference().clone();
    if sub.rank() == 0 {
        return Ok(ambient.clone());
    }
    let a = ambient.basis_matrix();
    let s = sub.basis_matrix();
    let p = a.mul(reference.gram()).mul(&s.transpose());
    let ker = integer_left_kernel(&clear_columns(&p), sub.rank());
    let gens: Vec<QVec> = ker
        .iter()
        .map(|c| {
            let c: QVec = c.iter().map(|x| Rat::from_integer(x.clone())).collect();
            ambient.from_coords(&c)
        })
        .collect();
    RelativeLattice::new(reference, &gens)
}

/// `span_Q(vectors) ∩ ambient`.
pub fn saturation_within(
    ambient: &RelativeLattice,
    vectors: &[QVec],
) -> Result<RelativeLattice, LatticeError> {
    let coords = vectors
        .iter()
        .map(|v| ambient.coords(v).ok_or_else(|| LatticeError::NotInSpan("ambient lattice".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let sat = integral_saturation(&coords);
    let gens: Vec<QVec> = sat.iter().map(|c| ambient.from_coords(c)).collect();
    RelativeLattice::new(ambient.reference().clone(), &gens)
}

/// Whether `sub` is primitive (saturated) inside `ambient`.
pub fn is_primitive_in(ambient: &RelativeLattice, sub: &RelativeLattice) -> Result<bool, LatticeError> {
    Ok(&saturation_within(ambient, sub.basis())? == sub)
}

/// Pairing matrix between two families of reference vectors.
pub fn pairing_matrix(reference: &Lattice, left: &[QVec], right: &[QVec]) -> Matrix {
    let n = reference.rank();
    let l = Matrix::from_rows(left.to_vec(), n);
    let r = Matrix::from_rows(right.to_vec(), n);
    l.mul(reference.gram()).mul(&r.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{qvec, rat};

    fn u() -> Lattice {
        Lattice::from_i64("U", &[vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn a2() -> Lattice {
        Lattice::from_i64("A2", &[vec![-2, 1], vec![1, -2]]).unwrap()
    }

    #[test]
    fn rejects_bad_grams() {
        assert!(matches!(
            Lattice::from_i64("x", &[vec![1, 2], vec![3, 1]]),
            Err(LatticeError::NotSymmetric(_))
        ));
        assert!(matches!(
            Lattice::from_i64("x", &[vec![1, 1], vec![1, 1]]),
            Err(LatticeError::Degenerate(_))
        ));
        assert!(Lattice::new_degenerate("x", Matrix::from_i64(&[vec![1, 1], vec![1, 1]])).is_ok());
    }

    #[test]
    fn sums_and_rescale() {
        let uu = direct_sum("UU", &[&u(), &u()]);
        assert_eq!(uu.rank(), 4);
        assert_eq!(uu.det(), BigInt::one());
        let u3 = rescale(&u(), 3).unwrap();
        assert_eq!(u3.gram(), &Matrix::from_i64(&[vec![0, 3], vec![3, 0]]));
        assert_eq!(u3.det(), BigInt::from(-9));
        assert!(rescale(&u(), 0).is_err());
    }

    #[test]
    fn signatures() {
        assert_eq!(u().signature().unwrap(), (1, 1));
        assert_eq!(a2().signature().unwrap(), (0, 2));
        assert!(u().is_even() && u().is_unimodular());
    }

    #[test]
    fn complement_of_u_in_uu() {
        let uu = Arc::new(direct_sum("UU", &[&u(), &u()]));
        let first = RelativeLattice::new(uu.clone(), &[qvec(&[1, 0, 0, 0]), qvec(&[0, 1, 0, 0])]).unwrap();
        let c = orthogonal_complement(&first);
        assert_eq!(c.basis(), &[qvec(&[0, 0, 1, 0]), qvec(&[0, 0, 0, 1])]);
    }

    #[test]
    fn glue_errors_name_pair() {
        let l = Arc::new(a2());
        let base = RelativeLattice::whole(l);
        let bad = GlueVector::new("h", vec![rat(1, 2), ri(0)]);
        match overlattice(&base, &[bad]) {
            Err(LatticeError::NonIntegralPairing { first, .. }) => assert_eq!(first, "h"),
            other => panic!("unexpected {other:?}"),
        }
        let none = overlattice(&base, &[]).unwrap();
        assert_eq!(none.index, BigInt::one());
        assert_eq!(none.lattice, base);
    }
}
