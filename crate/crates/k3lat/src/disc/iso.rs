//! Isomorphism tests for finite quadratic forms.

use super::{milgram_invariant, DiscError, Element, FiniteQuadraticForm};
use std::collections::BTreeMap;

/// Outcome of [`fqf_isomorphic`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqfIsoResult {
    pub isomorphic: bool,
    /// Images of the generators of the first form in the second.
    pub witness: Option<Vec<Element>>,
    /// `(rank, Legendre symbol of det, Milgram residue)` of each form.
    pub invariants: [(usize, i8, u8); 2],
}

fn legendre(a: i64, p: i64) -> i8 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r: i64 = 1;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Determinant of an integer matrix modulo a prime.
fn det_mod(mut m: Vec<Vec<i64>>, p: i64) -> i64 {
    let n = m.len();
    let mut det = 1i64;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| m[r][c].rem_euclid(p) != 0) else { return 0 };
        if r != c {
            m.swap(r, c);
            det = -det;
        }
        let piv = m[c][c].rem_euclid(p);
        det = det * piv % p;
        let inv = inverse_mod(piv, p);
        for r in c + 1..n {
            let f = m[r][c].rem_euclid(p) * inv % p;
            if f != 0 {
                for k in c..n {
                    m[r][k] = (m[r][k] - f * m[c][k]).rem_euclid(p);
                }
            }
        }
    }
    det.rem_euclid(p)
}

fn inverse_mod(a: i64, m: i64) -> i64 {
    let (mut t, mut nt, mut r, mut nr) = (0i64, 1i64, m, a.rem_euclid(m));
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    t.rem_euclid(m)
}

fn three_invariants(f: &FiniteQuadraticForm) -> Result<(usize, i8, u8), DiscError> {
    if !f.is_elementary(3) {
        return Err(DiscError::NotThreeElementary);
    }
    let bm: Vec<Vec<i64>> = (0..f.rank())
        .map(|i| (0..f.rank()).map(|j| f.b_num(&f.unit(i), &f.unit(j))).collect())
        .collect();
    let det = if f.rank() == 0 { 1 } else { det_mod(bm, 3) };
    if det == 0 {
        return Err(DiscError::Degenerate);
    }
    Ok((f.rank(), legendre(det, 3), milgram_invariant(f)?))
}

/// Isomorphism test for forms on elementary abelian 3-groups.
///
/// The decision uses rank, the square class of the determinant of `b` and
/// the Milgram residue; a generator-image witness is searched for in every
/// case and must exist whenever the invariants agree.
pub fn fqf_isomorphic(f: &FiniteQuadraticForm, g: &FiniteQuadraticForm) -> Result<FqfIsoResult, DiscError> {
    let a = three_invariants(f)?;
    let b = three_invariants(g)?;
    let isomorphic = a == b;
    let witness = if isomorphic { find_isomorphism(f, g) } else { None };
    if isomorphic && witness.is_none() {
        return Err(DiscError::Invalid("invariants agree but no isometry was found".into()));
    }
    Ok(FqfIsoResult { isomorphic, witness, invariants: [a, b] })
}

/// Backtracking search for an isometry `f → g` given by generator images.
pub fn find_isomorphism(f: &FiniteQuadraticForm, g: &FiniteQuadraticForm) -> Option<Vec<Element>> {
    if f.divisors() != g.divisors() {
        return None;
    }
    let n = f.rank();
    let elems: Vec<(Element, i64)> = g.elements().map(|a| {
        let q = g.q_num(&a);
        (a, q)
    }).collect();
    let fq: Vec<i64> = (0..n).map(|i| f.q_num(&f.unit(i))).collect();
    let fb: Vec<Vec<i64>> =
        (0..n).map(|i| (0..n).map(|j| f.b_num(&f.unit(i), &f.unit(j))).collect()).collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let d = f.divisors()[i];
            elems
                .iter()
                .enumerate()
                .filter(|(_, (a, q))| *q == fq[i] && d % g.element_order(a) == 0)
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    fn dfs(
        i: usize,
        n: usize,
        g: &FiniteQuadraticForm,
        elems: &[(Element, i64)],
        candidates: &[Vec<usize>],
        fb: &[Vec<i64>],
        chosen: &mut Vec<usize>,
    ) -> bool {
        if i == n {
            return true;
        }
        for &k in &candidates[i] {
            let a = &elems[k].0;
            if (0..i).all(|j| g.b_num(a, &elems[chosen[j]].0) == fb[i][j]) {
                chosen.push(k);
                if dfs(i + 1, n, g, elems, candidates, fb, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if dfs(0, n, g, &elems, &candidates, &fb, &mut chosen) {
        Some(chosen.iter().map(|&k| elems[k].0.clone()).collect())
    } else {
        None
    }
}

/// Homogeneous Jordan component `(Z/p^k)^rank` with determinant class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct JordanBlock {
    pub exponent: u32,
    pub rank: usize,
    pub det_legendre: i8,
}

/// Jordan decomposition invariants of the p-part of a nondegenerate form,
/// for odd `p`; these classify the p-part up to isometry.
pub fn jordan_invariants(f: &FiniteQuadraticForm, p: i64) -> Result<Vec<JordanBlock>, DiscError> {
    if p == 2 {
        return Err(DiscError::Invalid("Jordan invariants are implemented for odd primes".into()));
    }
    let (pp, _) = f.p_part(p);
    let level = pp.level();
    let mut gens: Vec<Element> = (0..pp.rank()).map(|i| pp.unit(i)).collect();
    let mut blocks: BTreeMap<u32, (usize, i64)> = BTreeMap::new();
    let valuation = |mut x: i64| -> u32 {
        let mut v = 0;
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        v
    };
    let klevel = valuation(level);
    // denominator exponent of b(a, c)
    let den_exp = |a: &[i64], c: &[i64]| -> u32 {
        let x = pp.b_num(a, c);
        if x == 0 {
            0
        } else {
            klevel - valuation(x)
        }
    };
    while !gens.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in 0..gens.len() {
            for j in i..gens.len() {
                let e = den_exp(&gens[i], &gens[j]);
                let better = match best {
                    None => e > 0,
                    Some((be, bi, bj)) => e > be || (e == be && i == j && bi != bj),
                };
                if better {
                    best = Some((e, i, j));
                }
            }
        }
        let Some((e, i, j)) = best else {
            if gens.iter().any(|g| g.iter().any(|&x| x != 0)) {
                return Err(DiscError::Degenerate);
            }
            break;
        };
        if i != j {
            gens[i] = pp.add(&gens[i], &gens[j]);
        }
        let g = gens.remove(i);
        let pe = p.pow(e);
        let scale = level / pe;
        // u = b(g,g)·p^e is a unit modulo p
        let u = pp.b_num(&g, &g) / scale;
        let entry = blocks.entry(e).or_insert((0, 1));
        entry.0 += 1;
        entry.1 = entry.1 * u.rem_euclid(p) % p;
        let uinv = inverse_mod(u, pe);
        gens = gens
            .into_iter()
            .map(|h| {
                let t = pp.b_num(&h, &g) / scale;
                let c = (t as i128 * uinv as i128).rem_euclid(pe as i128) as i64;
                pp.add(&h, &pp.scale(-c, &g))
            })
            .filter(|h| h.iter().any(|&x| x != 0))
            .collect();
    }
    Ok(blocks
        .into_iter()
        .map(|(e, (r, d))| JordanBlock { exponent: e, rank: r, det_legendre: legendre(d, p) })
        .collect())
}

/// Isometry test for arbitrary nondegenerate forms: p-parts are compared by
/// Jordan invariants for odd p and by explicit search for p = 2.
pub fn fqf_isomorphic_general(f: &FiniteQuadraticForm, g: &FiniteQuadraticForm) -> Result<bool, DiscError> {
    if f.order() != g.order() {
        return Ok(false);
    }
    for p in f.primes() {
        let (fp, _) = f.p_part(p);
        let (gp, _) = g.p_part(p);
        if fp.divisors() != gp.divisors() {
            return Ok(false);
        }
        let same = if p == 2 {
            find_isomorphism(&fp, &gp).is_some()
        } else {
            jordan_invariants(f, p)? == jordan_invariants(g, p)?
        };
        if !same {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn cyclic(d: i64, q: crate::linalg::Rat) -> FiniteQuadraticForm {
        let b = q.clone() - q.clone().floor();
        FiniteQuadraticForm::from_values(vec![d], &[q], &[vec![b]]).unwrap()
    }

    #[test]
    fn self_iso_has_witness() {
        let f = cyclic(3, rat(2, 3));
        let r = fqf_isomorphic(&f, &f).unwrap();
        assert!(r.isomorphic);
        assert_eq!(r.witness.unwrap(), vec![vec![1]]);
    }

    #[test]
    fn opposite_differs_in_rank_one() {
        let f = cyclic(3, rat(2, 3));
        let r = fqf_isomorphic(&f, &f.opposite()).unwrap();
        assert!(!r.isomorphic);
    }

    #[test]
    fn rejects_non_three() {
        let f = cyclic(2, rat(1, 2));
        assert_eq!(fqf_isomorphic(&f, &f).unwrap_err(), DiscError::NotThreeElementary);
    }

    #[test]
    fn jordan_of_cyclic_nine() {
        let f = cyclic(9, rat(2, 9));
        let j = jordan_invariants(&f, 3).unwrap();
        assert_eq!(j, vec![JordanBlock { exponent: 2, rank: 1, det_legendre: -1 }]);
        let g = cyclic(9, rat(8, 9));
        assert!(fqf_isomorphic_general(&f, &g).unwrap());
        let h = cyclic(9, rat(-2, 9) + rat(2, 1));
        assert!(!fqf_isomorphic_general(&f, &h).unwrap());
    }

    #[test]
    fn inverse_mod_small() {
        assert_eq!(inverse_mod(2, 9), 5);
        assert_eq!(legendre(2, 3), -1);
    }
}
