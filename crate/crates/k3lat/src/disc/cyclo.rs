//! Gauss–Milgram sums evaluated exactly in `Z[ζ_m]`.
//!
//! Ring elements are coefficient vectors on `1, ζ, …, ζ^(m-1)`; equality is
//! decided after reduction modulo the cyclotomic polynomial `Φ_m`.

use super::{DiscError, FiniteQuadraticForm};
use num_integer::Integer;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cyc {
    m: usize,
    c: Vec<i128>,
}

impl Cyc {
    fn zero(m: usize) -> Self {
        Cyc { m, c: vec![0; m] }
    }

    fn one(m: usize) -> Self {
        Self::zeta(m, 0)
    }

    fn zeta(m: usize, k: i64) -> Self {
        let mut z = Self::zero(m);
        z.c[k.rem_euclid(m as i64) as usize] = 1;
        z
    }

    fn add(&self, o: &Cyc) -> Cyc {
        Cyc { m: self.m, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    fn mul(&self, o: &Cyc) -> Cyc {
        let mut r = Self::zero(self.m);
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if *b != 0 {
                    r.c[(i + j) % self.m] += a * b;
                }
            }
        }
        r
    }

    fn scale(&self, k: i128) -> Cyc {
        Cyc { m: self.m, c: self.c.iter().map(|a| a * k).collect() }
    }

    /// Zero test modulo `Φ_m`.
    fn is_zero(&self, phi: &[i128]) -> bool {
        let mut r = self.c.clone();
        let deg = phi.len() - 1;
        // Φ_m is monic, so plain long division stays integral
        for top in (deg..r.len()).rev() {
            let coef = r[top];
            if coef != 0 {
                for (k, p) in phi.iter().enumerate() {
                    r[top - deg + k] -= coef * p;
                }
            }
        }
        r.iter().all(|&x| x == 0)
    }
}

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i128; num.len() - dd];
    for top in (dd..r.len()).rev() {
        let coef = r[top] / den[dd];
        q[top - dd] = coef;
        for (k, p) in den.iter().enumerate() {
            r[top - dd + k] -= coef * p;
        }
    }
    q
}

/// Coefficients of the cyclotomic polynomial `Φ_m`, constant term first.
fn cyclotomic(m: usize) -> Vec<i128> {
    let mut num = vec![0i128; m + 1];
    num[0] = -1;
    num[m] = 1;
    let mut p = num;
    for d in 1..m {
        if m % d == 0 {
            p = poly_div_exact(&p, &cyclotomic(d));
        }
    }
    p
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `√p` inside `Z[ζ_m]`, for `p` dividing `m` (and `8 | m` when `p = 2`).
fn sqrt_prime(m: usize, p: u64) -> Cyc {
    if p == 2 {
        let e = (m / 8) as i64;
        return Cyc::zeta(m, e).add(&Cyc::zeta(m, 7 * e));
    }
    let step = (m as u64 / p) as i64;
    let mut g = Cyc::zero(m);
    for a in 0..p as i64 {
        g = g.add(&Cyc::zeta(m, step * (a * a % p as i64)));
    }
    if p % 4 == 1 {
        g
    } else {
        // the Gauss sum equals i·√p here
        g.mul(&Cyc::zeta(m, 3 * (m / 4) as i64))
    }
}

/// Residue `s mod 8` with `Σ_a e^{πi q(a)} = √|A| · e^{2πi s/8}`.
pub fn milgram_invariant(f: &FiniteQuadraticForm) -> Result<u8, DiscError> {
    if !f.is_nondegenerate() {
        return Err(DiscError::Degenerate);
    }
    let n = f.level() as usize;
    let m = (2 * n).lcm(&8);
    let step = (m / (2 * n)) as i64;
    let mut counts = vec![0i128; 2 * n];
    for a in f.elements() {
        counts[f.q_num(&a) as usize] += 1;
    }
    let mut sum = Cyc::zero(m);
    for (k, c) in counts.iter().enumerate() {
        if *c != 0 {
            sum = sum.add(&Cyc::zeta(m, step * k as i64).scale(*c));
        }
    }
    let mut root = Cyc::one(m);
    for (p, e) in factor(f.order()) {
        root = root.scale((p as i128).pow(e / 2));
        if e % 2 == 1 {
            root = root.mul(&sqrt_prime(m, p));
        }
    }
    let phi = cyclotomic(m);
    let eighth = (m / 8) as i64;
    for s in 0..8u8 {
        let diff = sum.add(&root.mul(&Cyc::zeta(m, eighth * s as i64)).scale(-1));
        if diff.is_zero(&phi) {
            return Ok(s);
        }
    }
    Err(DiscError::Invalid("Gauss sum is not an eighth root of unity times sqrt|A|".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn trivial_form() {
        assert_eq!(milgram_invariant(&FiniteQuadraticForm::trivial()).unwrap(), 0);
    }

    #[test]
    fn e6_and_a1() {
        // disc(E6): Z/3 with q = 2/3 (signature -6 ≡ 2)
        let f = FiniteQuadraticForm::from_values(vec![3], &[rat(2, 3)], &[vec![rat(2, 3)]]).unwrap();
        assert_eq!(milgram_invariant(&f).unwrap(), 2);
        // <2>: Z/2 with q = 1/2 (signature 1)
        let f = FiniteQuadraticForm::from_values(vec![2], &[rat(1, 2)], &[vec![rat(1, 2)]]).unwrap();
        assert_eq!(milgram_invariant(&f).unwrap(), 1);
        // <-2>
        let f = FiniteQuadraticForm::from_values(vec![2], &[rat(3, 2)], &[vec![rat(1, 2)]]).unwrap();
        assert_eq!(milgram_invariant(&f).unwrap(), 7);
    }

    #[test]
    fn degenerate_rejected() {
        let f = FiniteQuadraticForm::from_values(vec![2], &[rat(0, 1)], &[vec![rat(0, 1)]]).unwrap();
        assert!(milgram_invariant(&f).is_err());
    }
}
