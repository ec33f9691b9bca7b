//! Integer row reduction generic over the coefficient ring.
//!
//! Everything here runs first on `i128` with checked arithmetic; a `None`
//! result means an overflow happened and the caller retries on `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

pub(crate) trait Ring:
    Clone + Ord + Debug + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul
{
}

impl Ring for i128 {}
impl Ring for BigInt {}

pub(crate) type IntRows<T> = Vec<Vec<T>>;

/// `dst -= q * src` entrywise.
fn sub_mul<T: Ring>(dst: &mut [T], src: &[T], q: &T) -> Option<()> {
    if q.is_zero() {
        return Some(());
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if s.is_zero() {
            continue;
        }
        let p = s.checked_mul(q)?;
        *d = d.checked_sub(&p)?;
    }
    Some(())
}

/// Applies `row[i] -= q * row[j]` for distinct `i`, `j`.
fn row_sub_mul<T: Ring>(a: &mut [Vec<T>], i: usize, j: usize, q: &T) -> Option<()> {
    if i < j {
        let (lo, hi) = a.split_at_mut(j);
        sub_mul(&mut lo[i], &hi[0], q)
    } else {
        let (lo, hi) = a.split_at_mut(i);
        sub_mul(&mut hi[0], &lo[j], q)
    }
}

fn col_sub_mul<T: Ring>(a: &mut [Vec<T>], i: usize, j: usize, q: &T) -> Option<()> {
    if q.is_zero() {
        return Some(());
    }
    for row in a.iter_mut() {
        if row[j].is_zero() {
            continue;
        }
        let p = row[j].checked_mul(q)?;
        row[i] = row[i].checked_sub(&p)?;
    }
    Some(())
}

fn negate_row<T: Ring>(r: &mut [T]) {
    for x in r.iter_mut() {
        *x = -x.clone();
    }
}

/// Row-style Hermite normal form; zero rows are dropped.
pub(crate) fn hnf<T: Ring>(mut a: IntRows<T>, ncols: usize) -> Option<IntRows<T>> {
    let m = a.len();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        loop {
            let p = (r..m)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(p) = p else { break };
            a.swap(r, p);
            let mut clean = true;
            for i in r + 1..m {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    row_sub_mul(&mut a, i, r, &q)?;
                    if !a[i][c].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            negate_row(&mut a[r]);
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            row_sub_mul(&mut a, i, r, &q)?;
        }
        r += 1;
    }
    a.truncate(r);
    Some(a)
}

/// Integer basis of `{y : y·a = 0}`.
pub(crate) fn left_kernel<T: Ring>(a: &IntRows<T>, ncols: usize) -> Option<IntRows<T>> {
    let m = a.len();
    let aug: IntRows<T> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    let h = hnf(aug, ncols + m)?;
    Some(
        h.into_iter()
            .filter(|r| r[..ncols].iter().all(Zero::is_zero))
            .map(|r| r[ncols..].to_vec())
            .collect(),
    )
}

pub(crate) struct SmithInt<T> {
    pub u: IntRows<T>,
    pub d: IntRows<T>,
    pub v: IntRows<T>,
}

fn identity<T: Ring>(n: usize) -> IntRows<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

/// Smith normal form with `u·m·v = d`.
pub(crate) fn snf<T: Ring>(m: IntRows<T>, rows: usize, cols: usize) -> Option<SmithInt<T>> {
    let mut d = m;
    let mut u = identity::<T>(rows);
    let mut v = identity::<T>(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        for row in d.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut done = true;
            for i in t + 1..rows {
                if !d[i][t].is_zero() {
                    let q = d[i][t].div_floor(&d[t][t]);
                    row_sub_mul(&mut d, i, t, &q)?;
                    row_sub_mul(&mut u, i, t, &q)?;
                    if !d[i][t].is_zero() {
                        done = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !d[t][j].is_zero() {
                    let q = d[t][j].div_floor(&d[t][t]);
                    col_sub_mul(&mut d, j, t, &q)?;
                    col_sub_mul(&mut v, j, t, &q)?;
                    if !d[t][j].is_zero() {
                        done = false;
                    }
                }
            }
            if !done {
                // move the smallest remainder in row/column t onto the pivot
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..rows {
                    if !d[i][t].is_zero() && d[i][t].abs() < d[bi][bj].abs() {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..cols {
                    if !d[t][j].is_zero() && d[t][j].abs() < d[bi][bj].abs() {
                        bi = t;
                        bj = j;
                    }
                }
                if bi != t {
                    d.swap(t, bi);
                    u.swap(t, bi);
                }
                if bj != t {
                    for row in d.iter_mut() {
                        row.swap(t, bj);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, bj);
                    }
                }
                continue;
            }
            let piv = d[t][t].clone();
            let bad = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !d[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    // row t += row i, then reduce again
                    let minus_one = -T::one();
                    row_sub_mul(&mut d, t, i, &minus_one)?;
                    row_sub_mul(&mut u, t, i, &minus_one)?;
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            negate_row(&mut d[t]);
            negate_row(&mut u[t]);
        }
        t += 1;
    }
    Some(SmithInt { u, d, v })
}

/// Checked integer matrix product.
pub(crate) fn matmul<T: Ring>(a: &IntRows<T>, b: &IntRows<T>, inner: usize, cols: usize) -> Option<IntRows<T>> {
    let mut out = Vec::with_capacity(a.len());
    for row in a {
        let mut r = vec![T::zero(); cols];
        for k in 0..inner {
            let x = &row[k];
            if x.is_zero() {
                continue;
            }
            for (j, y) in b[k].iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                r[j] = r[j].checked_add(&x.checked_mul(y)?)?;
            }
        }
        out.push(r);
    }
    Some(out)
}

// Below: conversions and BigInt entry points with the i128 fast path.

const FAST_LIMIT: i128 = 1 << 62;

fn to_fast(rows: &[Vec<BigInt>]) -> Option<IntRows<i128>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_i128().filter(|v| v.abs() < FAST_LIMIT))
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

fn from_fast(rows: IntRows<i128>) -> IntRows<BigInt> {
    rows.into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect()
}

pub(crate) fn hnf_big(rows: IntRows<BigInt>, ncols: usize) -> IntRows<BigInt> {
    if let Some(fast) = to_fast(&rows) {
        if let Some(h) = hnf(fast, ncols) {
            return from_fast(h);
        }
    }
    hnf(rows, ncols).expect("BigInt arithmetic cannot overflow")
}

pub(crate) fn left_kernel_big(rows: &IntRows<BigInt>, ncols: usize) -> IntRows<BigInt> {
    if let Some(fast) = to_fast(rows) {
        if let Some(k) = left_kernel(&fast, ncols) {
            return from_fast(k);
        }
    }
    left_kernel(rows, ncols).expect("BigInt arithmetic cannot overflow")
}

pub(crate) fn snf_big(rows: IntRows<BigInt>, nrows: usize, ncols: usize) -> SmithInt<BigInt> {
    if let Some(fast) = to_fast(&rows) {
        if let Some(s) = snf(fast, nrows, ncols) {
            return SmithInt { u: from_fast(s.u), d: from_fast(s.d), v: from_fast(s.v) };
        }
    }
    snf(rows, nrows, ncols).expect("BigInt arithmetic cannot overflow")
}

pub(crate) fn matmul_big(a: &IntRows<BigInt>, b: &IntRows<BigInt>, inner: usize, cols: usize) -> IntRows<BigInt> {
    if let (Some(fa), Some(fb)) = (to_fast(a), to_fast(b)) {
        if let Some(p) = matmul(&fa, &fb, inner, cols) {
            return from_fast(p);
        }
    }
    matmul(a, b, inner, cols).expect("BigInt arithmetic cannot overflow")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_small() {
        let h = hnf::<i128>(vec![vec![2, 4], vec![3, 5]], 2).unwrap();
        assert_eq!(h, vec![vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn overflow_falls_back() {
        let big = BigInt::from(1i64 << 40);
        let rows = vec![
            vec![big.clone() * &big, BigInt::from(3)],
            vec![BigInt::from(7), big.clone() * &big * &big],
        ];
        let h = hnf_big(rows.clone(), 2);
        let h2 = hnf(rows, 2).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn kernel_of_ones() {
        let k = left_kernel::<i128>(&vec![vec![1], vec![1]], 1).unwrap();
        assert_eq!(k, vec![vec![1, -1]]);
    }
}
