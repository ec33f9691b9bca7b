//! Exact rational matrices and integer normal forms.
//!
//! Echelon convention used everywhere in the crate: row-style Hermite normal
//! form, positive pivots, entries above a pivot reduced into `[0, pivot)`,
//! zero rows dropped. Two lattices given by HNF bases are equal iff their
//! bases are equal.

mod int;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};
use thiserror::Error;

pub(crate) use int::{hnf_big, left_kernel_big, matmul_big, snf_big};

/// Exact rational number.
pub type Rat = BigRational;
/// Row vector of exact rationals.
pub type QVec = Vec<Rat>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix has non-integer entry {0} at ({1}, {2})")]
    NonInteger(String, usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
}

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn ri(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| ri(x)).collect()
}

pub fn zero_vec(n: usize) -> QVec {
    vec![Rat::zero(); n]
}

/// Standard basis vector `e_i` of length `n`.
pub fn unit_vec(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Rat::one();
    v
}

pub fn vadd(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vscale(c: &Rat, a: &[Rat]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn vneg(a: &[Rat]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc + x * y
        }
    })
}

pub fn is_integral_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_integer())
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Formats a rational as `p` or `p/q`.
pub fn rat_string(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// Dense matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(rat_string).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: Vec<QVec>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: r, cols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(rows.iter().map(|r| qvec(r)).collect(), cols)
    }

    pub fn from_bigint(rows: &[Vec<BigInt>], cols: usize) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
                .collect(),
            cols,
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> QVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<QVec> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Integer entries, or the first offending entry.
    pub fn to_bigint_rows(&self) -> Result<Vec<Vec<BigInt>>, LinalgError> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let x = &self[(i, j)];
                        if x.is_integer() {
                            Ok(x.to_integer())
                        } else {
                            Err(LinalgError::NonInteger(rat_string(x), i, j))
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let x = &self[(i, j)];
                        if x.is_integer() {
                            x.to_integer().to_i64()
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Integer matrix `D·self` with the smallest positive `D`.
    fn scaled_integer(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let d = common_denominator(self.data.iter());
        let rows = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| (x * Rat::from_integer(d.clone())).to_integer())
                    .collect()
            })
            .collect();
        (rows, d)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let (a, da) = self.scaled_integer();
        let (b, db) = other.scaled_integer();
        let p = matmul_big(&a, &b, self.cols, other.cols);
        let den = da * db;
        let mut out = Matrix::from_bigint(&p, other.cols);
        if !den.is_one() {
            let den = Rat::from_integer(den);
            for x in out.data.iter_mut() {
                if !x.is_zero() {
                    *x = &*x / &den;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Rat]) -> QVec {
        assert_eq!(v.len(), self.rows);
        let mut out = zero_vec(self.cols);
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let y = &self[(i, j)];
                if !y.is_zero() {
                    out[j] += x * y;
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Rat]) -> QVec {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `u · self · vᵀ` for a symmetric bilinear form.
    pub fn bilinear(&self, u: &[Rat], v: &[Rat]) -> Rat {
        dot(&self.vec_mul(u), v)
    }

    /// Block-diagonal matrix.
    pub fn block_diag(parts: &[&Matrix]) -> Matrix {
        let r: usize = parts.iter().map(|p| p.rows).sum();
        let c: usize = parts.iter().map(|p| p.cols).sum();
        let mut m = Matrix::zeros(r, c);
        let (mut oi, mut oj) = (0, 0);
        for p in parts {
            for i in 0..p.rows {
                for j in 0..p.cols {
                    m[(oi + i, oj + j)] = p[(i, j)].clone();
                }
            }
            oi += p.rows;
            oj += p.cols;
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            if p != r {
                for j in 0..self.cols {
                    m.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = m[(r, c)].recip();
            for j in c..self.cols {
                let x = &m[(r, j)] * &inv;
                m[(r, j)] = x;
            }
            for i in 0..self.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..self.cols {
                        if !m[(r, j)].is_zero() {
                            let x = &m[(i, j)] - &f * &m[(r, j)];
                            m[(i, j)] = x;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : self·x = 0}` over the rationals.
    pub fn kernel_basis(&self) -> Vec<QVec> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = zero_vec(self.cols);
                v[f] = Rat::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Rat {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Rat::zero() };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &piv;
                    for j in c..n {
                        if !m[(c, j)].is_zero() {
                            let x = &m[(i, j)] - &f * &m[(c, j)];
                            m[(i, j)] = x;
                        }
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

/// Smith normal form `U·m·V = D` of an integer matrix.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
}

impl Smith {
    /// Diagonal entries `d_1 | d_2 | …` (zeros last for singular input).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols()))
            .map(|i| self.d[(i, i)].to_integer())
            .collect()
    }
}

pub fn smith_normal_form(m: &Matrix) -> Result<Smith, LinalgError> {
    let rows = m.to_bigint_rows()?;
    let s = snf_big(rows, m.nrows(), m.ncols());
    Ok(Smith {
        u: Matrix::from_bigint(&s.u, m.nrows()),
        d: Matrix::from_bigint(&s.d, m.ncols()),
        v: Matrix::from_bigint(&s.v, m.ncols()),
    })
}

/// Right kernel over the rationals.
pub fn kernel_basis(m: &Matrix) -> Vec<QVec> {
    m.kernel_basis()
}

fn scale_rows(rows: &[QVec]) -> (Vec<Vec<BigInt>>, BigInt) {
    let d = common_denominator(rows.iter().flatten());
    let dr = Rat::from_integer(d.clone());
    let ints = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * &dr).to_integer()).collect())
        .collect();
    (ints, d)
}

fn unscale_rows(rows: Vec<Vec<BigInt>>, d: &BigInt) -> Vec<QVec> {
    rows.into_iter()
        .map(|r| r.into_iter().map(|x| Rat::new(x, d.clone())).collect())
        .collect()
}

fn width(rows: &[QVec]) -> usize {
    rows.first().map_or(0, Vec::len)
}

/// Canonical HNF basis of the Z-span of rational rows.
pub fn hermite_normal_form(rows: &[QVec]) -> Vec<QVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let n = width(rows);
    let (ints, d) = scale_rows(rows);
    unscale_rows(hnf_big(ints, n), &d)
}

/// Integer basis of `{y ∈ Zᵐ : y·m = 0}` for an integer matrix given by rows.
pub fn integer_left_kernel(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    left_kernel_big(&rows.to_vec(), ncols)
}

/// `span_Q(rows) ∩ Zⁿ` in HNF.
pub fn integral_saturation(rows: &[QVec]) -> Vec<QVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let n = width(rows);
    let (ints, _) = scale_rows(rows);
    let transposed: Vec<Vec<BigInt>> =
        (0..n).map(|j| ints.iter().map(|r| r[j].clone()).collect()).collect();
    let right_kernel = integer_left_kernel(&transposed, ints.len());
    let sat = if right_kernel.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect()
    } else {
        let kcols: Vec<Vec<BigInt>> = (0..n)
            .map(|j| right_kernel.iter().map(|k| k[j].clone()).collect())
            .collect();
        integer_left_kernel(&kcols, right_kernel.len())
    };
    let one = BigInt::one();
    unscale_rows(hnf_big(sat, n), &one)
}

/// Smallest lattice containing `rows` and saturated in `Zⁿ` inside the span.
///
/// The output is `(span_Q ∩ Zⁿ) + ⟨rows⟩` in HNF, so it contains the input
/// even when some input rows are fractional.
pub fn hermite_saturate(rows: &[QVec]) -> Vec<QVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut all = integral_saturation(rows);
    all.extend(rows.iter().cloned());
    hermite_normal_form(&all)
}

/// Solves `c·basis = v`; `None` if `v` is outside the span.
pub fn solve_left(basis: &[QVec], v: &[Rat]) -> Option<QVec> {
    let k = basis.len();
    if k == 0 {
        return if is_zero_vec(v) { Some(Vec::new()) } else { None };
    }
    let n = v.len();
    // columns: basis rows transposed, augmented by v
    let mut m = Matrix::zeros(n, k + 1);
    for (i, b) in basis.iter().enumerate() {
        for j in 0..n {
            m[(j, i)] = b[j].clone();
        }
    }
    for j in 0..n {
        m[(j, k)] = v[j].clone();
    }
    let (r, pivots) = m.rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut c = zero_vec(k);
    for (i, &p) in pivots.iter().enumerate() {
        c[p] = r[(i, k)].clone();
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn a2() -> Matrix {
        Matrix::from_i64(&[vec![-2, 1], vec![1, -2]])
    }

    #[test]
    fn snf_identity() {
        let s = smith_normal_form(&Matrix::identity(3)).unwrap();
        assert_eq!(s.d, Matrix::identity(3));
    }

    #[test]
    fn snf_a2() {
        let m = a2();
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(3)]);
        assert_eq!(s.u.mul(&m).mul(&s.v), s.d);
        assert_eq!(s.u.det().abs(), ri(1));
        assert_eq!(s.v.det().abs(), ri(1));
    }

    #[test]
    fn snf_rejects_fractions() {
        let m = Matrix::from_rows(vec![vec![rat(1, 2)]], 1);
        assert!(matches!(smith_normal_form(&m), Err(LinalgError::NonInteger(..))));
    }

    #[test]
    fn kernel_cases() {
        assert!(kernel_basis(&Matrix::identity(3)).is_empty());
        let k = kernel_basis(&Matrix::from_i64(&[vec![1, 1], vec![1, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], -k[0][1].clone());
    }

    #[test]
    fn saturate_cases() {
        let id = vec![qvec(&[1, 0]), qvec(&[0, 1])];
        assert_eq!(hermite_saturate(&id), id);
        let s = hermite_saturate(&[qvec(&[3, 0]), qvec(&[0, 1])]);
        assert_eq!(s, id);
        let s = hermite_saturate(&[qvec(&[2, 4])]);
        assert_eq!(s, vec![qvec(&[1, 2])]);
        // fractional rows survive
        let s = hermite_saturate(&[vec![rat(1, 2), ri(0)]]);
        assert_eq!(s, vec![vec![rat(1, 2), ri(0)]]);
    }

    #[test]
    fn det_and_inverse() {
        let m = a2();
        assert_eq!(m.det(), ri(3));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert!(Matrix::from_i64(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_left_span() {
        let b = vec![qvec(&[1, 1, 0]), qvec(&[0, 1, 1])];
        let c = solve_left(&b, &qvec(&[1, 2, 1])).unwrap();
        assert_eq!(c, qvec(&[1, 1]));
        assert!(solve_left(&b, &qvec(&[1, 0, 0])).is_none());
    }

    #[test]
    fn rat_parse_roundtrip() {
        for s in ["3", "-2/3", "0"] {
            assert_eq!(rat_string(&parse_rat(s).unwrap()), s);
        }
        assert!(parse_rat("1/0").is_none());
    }
}
