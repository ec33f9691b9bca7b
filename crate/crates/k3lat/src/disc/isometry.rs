//! Lattice isometries, backtracking isometry search on definite lattices,
//! and orbit partitions of discriminant groups.

use super::{DiscError, Element, FiniteQuadraticForm};
use crate::lattice::RelativeLattice;
use crate::linalg::{is_integral_vec, Matrix, QVec, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Form-preserving automorphism of a lattice, as an integer matrix acting
/// on columns of basis coordinates: `Mᵀ·G·M = G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isometry {
    pub name: String,
    pub lattice: String,
    matrix: Matrix,
}

impl Isometry {
    pub fn new(
        name: impl Into<String>,
        lattice_name: impl Into<String>,
        gram: &Matrix,
        matrix: Matrix,
    ) -> Result<Self, DiscError> {
        let name = name.into();
        if matrix.nrows() != gram.nrows() || !matrix.is_square() || !matrix.is_integral() {
            return Err(DiscError::NotIsometry(name));
        }
        if &matrix.transpose().mul(gram).mul(&matrix) != gram {
            return Err(DiscError::NotIsometry(name));
        }
        if !matrix.det().abs().is_one() {
            return Err(DiscError::NotIsometry(name));
        }
        Ok(Isometry { name, lattice: lattice_name.into(), matrix })
    }

    pub fn identity(lattice_name: impl Into<String>, rank: usize) -> Self {
        Isometry { name: "id".into(), lattice: lattice_name.into(), matrix: Matrix::identity(rank) }
    }

    pub fn negation(lattice_name: impl Into<String>, rank: usize) -> Self {
        Isometry {
            name: "-id".into(),
            lattice: lattice_name.into(),
            matrix: Matrix::identity(rank).scale(&-Rat::one()),
        }
    }

    /// Isometry of `l` induced by a linear map on reference coordinates.
    pub fn from_reference_map(
        name: impl Into<String>,
        lattice_name: impl Into<String>,
        l: &RelativeLattice,
        f: impl Fn(&[Rat]) -> QVec,
    ) -> Result<Self, DiscError> {
        let name = name.into();
        let k = l.rank();
        let mut m = Matrix::zeros(k, k);
        for (j, b) in l.basis().iter().enumerate() {
            let img = f(b);
            let c = l.coords(&img).ok_or_else(|| DiscError::NotIsometry(name.clone()))?;
            if !is_integral_vec(&c) {
                return Err(DiscError::NotIsometry(name));
            }
            for i in 0..k {
                m[(i, j)] = c[i].clone();
            }
        }
        Self::new(name, lattice_name, l.gram(), m)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    /// Image of a vector in basis coordinates.
    pub fn apply_coords(&self, c: &[Rat]) -> QVec {
        self.matrix.mul_vec(c)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            name: format!("{}*{}", self.name, other.name),
            lattice: self.lattice.clone(),
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    /// Multiplicative order, if at most `max`.
    pub fn order(&self, max: usize) -> Option<usize> {
        let id = Matrix::identity(self.rank());
        let mut p = self.matrix.clone();
        for k in 1..=max {
            if p == id {
                return Some(k);
            }
            p = p.mul(&self.matrix);
        }
        None
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        self.matrix.to_i64_rows().expect("isometry entries are small integers")
    }
}

/// Fixed images for some frame vectors (frame index, image in lattice
/// coordinates).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Seed {
    pub fixed: Vec<(usize, Vec<i64>)>,
}

/// Budget and seeding for [`isometry_search`].
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Maximum number of backtracking nodes over all seeds.
    pub node_budget: u64,
    /// Isometries to collect per seed.
    pub per_seed: usize,
    /// Seeds; an empty list means one unconstrained search.
    pub seeds: Vec<Seed>,
    /// Frame vectors in lattice coordinates; default is a greedy set of
    /// shortest independent vectors.
    pub frame: Option<Vec<Vec<i64>>>,
    /// Extra isometries supplied by the caller, returned after `±id`.
    pub given: Vec<Isometry>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { node_budget: 2_000_000, per_seed: 1, seeds: Vec::new(), frame: None, given: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub isometries: Vec<Isometry>,
    /// False when the node budget ran out before every seed was explored.
    pub complete: bool,
    pub nodes: u64,
    pub frame: Vec<Vec<i64>>,
}

/// All nonzero `x` with `xᵀ·P·x ≤ bound` for positive definite `P`, in
/// lexicographic order; exact Fincke–Pohst enumeration.
pub fn short_vectors(p: &[Vec<i64>], bound: i64) -> Vec<Vec<i64>> {
    let n = p.len();
    let mut q: Vec<Vec<Rat>> =
        p.iter().map(|r| r.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect()).collect();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let x = &q[k][i] * &q[i][l];
                q[k][l] -= x;
            }
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn rec(i: usize, q: &[Vec<Rat>], t: Rat, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = q.len();
        let mut c = Rat::zero();
        for j in i + 1..n {
            if x[j] != 0 {
                c -= &q[i][j] * Rat::from_integer(BigInt::from(x[j]));
            }
        }
        let qi = &q[i][i];
        let cost = |v: i64| -> Rat {
            let d = Rat::from_integer(BigInt::from(v)) - &c;
            qi * &d * &d
        };
        let x0 = (&c + Rat::new(BigInt::one(), BigInt::from(2))).floor().to_integer().to_i64().expect("small");
        let visit = |v: i64, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>| -> bool {
            let k = cost(v);
            if k > t {
                return false;
            }
            x[i] = v;
            if i == 0 {
                if x.iter().any(|&y| y != 0) {
                    out.push(x.clone());
                }
            } else {
                rec(i - 1, q, &t - k, x, out);
            }
            true
        };
        if !visit(x0, x, out) {
            x[i] = 0;
            return;
        }
        let mut v = x0 + 1;
        while visit(v, x, out) {
            v += 1;
        }
        let mut v = x0 - 1;
        while visit(v, x, out) {
            v -= 1;
        }
        x[i] = 0;
    }
    if n > 0 {
        rec(n - 1, &q, Rat::from_integer(BigInt::from(bound)), &mut x, &mut out);
    }
    out.sort();
    out
}

fn pair_i64(p: &[Vec<i64>], u: &[i64], v: &[i64]) -> i64 {
    let mut s = 0i64;
    for i in 0..u.len() {
        if u[i] == 0 {
            continue;
        }
        let mut t = 0i64;
        for j in 0..v.len() {
            t += p[i][j] * v[j];
        }
        s += u[i] * t;
    }
    s
}

fn rank_of(vs: &[Vec<i64>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let n = vs[0].len();
    Matrix::from_rows(
        vs.iter().map(|v| v.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect()).collect(),
        n,
    )
    .rank()
}

/// Backtracking search for isometries of a definite lattice.
///
/// Frame vectors are mapped, in order, to lattice vectors of equal norm
/// whose pairings with earlier images match; candidates are tried in
/// lexicographic order. Each complete assignment yields the rational map
/// `F⁻¹·F'`, kept when integral. The result always starts with `±id`,
/// followed by the caller's `given` isometries and then search results.
pub fn isometry_search(
    lattice_name: &str,
    l: &RelativeLattice,
    config: &SearchConfig,
) -> Result<SearchResult, DiscError> {
    let k = l.rank();
    let (pos, neg) = l.signature()?;
    let sign = if neg == 0 {
        1
    } else if pos == 0 {
        -1
    } else {
        return Err(DiscError::NotDefinite);
    };
    let g = l.gram();
    let p: Vec<Vec<i64>> = g
        .to_i64_rows()
        .ok_or_else(|| DiscError::Invalid("Gram entries too large".into()))?
        .into_iter()
        .map(|r| r.into_iter().map(|x| sign * x).collect())
        .collect();
    let mut found: Vec<Isometry> = vec![Isometry::identity(lattice_name, k), Isometry::negation(lattice_name, k)];
    let mut seen: BTreeSet<Vec<Vec<i64>>> = found.iter().map(Isometry::to_i64_rows).collect();
    for iso in &config.given {
        if seen.insert(iso.to_i64_rows()) {
            found.push(iso.clone());
        }
    }
    let frame = match &config.frame {
        Some(f) => f.clone(),
        None => {
            let maxdiag = (0..k).map(|i| p[i][i]).max().unwrap_or(0);
            let mut cands = short_vectors(&p, maxdiag);
            cands.sort_by_key(|v| (pair_i64(&p, v, v), v.clone()));
            let mut frame: Vec<Vec<i64>> = Vec::new();
            for v in cands {
                let mut trial = frame.clone();
                trial.push(v.clone());
                if rank_of(&trial) == trial.len() {
                    frame = trial;
                    if frame.len() == k {
                        break;
                    }
                }
            }
            frame
        }
    };
    if frame.len() != k || rank_of(&frame) != k {
        return Err(DiscError::Invalid("frame is not a rational basis".into()));
    }
    let norms: BTreeSet<i64> = frame.iter().map(|f| pair_i64(&p, f, f)).collect();
    let maxnorm = norms.iter().copied().max().unwrap_or(0);
    let all = short_vectors(&p, maxnorm);
    let by_norm: BTreeMap<i64, Vec<Vec<i64>>> = norms
        .iter()
        .map(|&nn| (nn, all.iter().filter(|v| pair_i64(&p, v, v) == nn).cloned().collect()))
        .collect();
    let fgram: Vec<Vec<i64>> = frame.iter().map(|a| frame.iter().map(|b| pair_i64(&p, a, b)).collect()).collect();
    let to_q = |vs: &[Vec<i64>]| {
        Matrix::from_rows(
            vs.iter().map(|v| v.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect()).collect(),
            k,
        )
    };
    let finv = to_q(&frame).inverse().expect("frame is independent");
    let seeds = if config.seeds.is_empty() { vec![Seed::default()] } else { config.seeds.clone() };
    let mut nodes: u64 = 0;
    let mut complete = true;

    struct Ctx<'a> {
        p: &'a [Vec<i64>],
        fgram: &'a [Vec<i64>],
        cands: Vec<&'a [Vec<i64>]>,
        fixed: BTreeMap<usize, Vec<i64>>,
        budget: u64,
        want: usize,
    }

    fn dfs(
        i: usize,
        ctx: &Ctx,
        images: &mut Vec<Vec<i64>>,
        nodes: &mut u64,
        out: &mut Vec<Vec<Vec<i64>>>,
        accept: &mut dyn FnMut(&[Vec<i64>]) -> bool,
    ) -> bool {
        // returns false when the budget is exhausted
        if out.len() >= ctx.want {
            return true;
        }
        if i == ctx.fgram.len() {
            if accept(images) {
                out.push(images.clone());
            }
            return true;
        }
        let fixed;
        let list: &[Vec<i64>] = match ctx.fixed.get(&i) {
            Some(v) => {
                fixed = [v.clone()];
                &fixed
            }
            None => ctx.cands[i],
        };
        for c in list {
            *nodes += 1;
            if *nodes > ctx.budget {
                return false;
            }
            if pair_i64(ctx.p, c, c) != ctx.fgram[i][i] {
                continue;
            }
            if (0..i).all(|j| pair_i64(ctx.p, c, &images[j]) == ctx.fgram[i][j]) {
                images.push(c.clone());
                let ok = dfs(i + 1, ctx, images, nodes, out, accept);
                images.pop();
                if !ok {
                    return false;
                }
                if out.len() >= ctx.want {
                    return true;
                }
            }
        }
        true
    }

    for seed in &seeds {
        let ctx = Ctx {
            p: &p,
            fgram: &fgram,
            cands: frame.iter().map(|f| by_norm[&pair_i64(&p, f, f)].as_slice()).collect(),
            fixed: seed.fixed.iter().cloned().collect(),
            budget: config.node_budget,
            want: config.per_seed,
        };
        let mut out = Vec::new();
        let mut accept = |imgs: &[Vec<i64>]| -> bool {
            let a = finv.mul(&to_q(imgs));
            if !a.is_integral() {
                return false;
            }
            let rows = a.transpose().to_i64_rows().expect("small");
            !seen.contains(&rows)
        };
        let ok = dfs(0, &ctx, &mut Vec::new(), &mut nodes, &mut out, &mut accept);
        if !ok {
            complete = false;
        }
        for imgs in out {
            let a = finv.mul(&to_q(&imgs));
            let m = a.transpose();
            let rows = m.to_i64_rows().expect("small");
            if seen.insert(rows) {
                let name = format!("search#{}", found.len() - 1);
                found.push(Isometry::new(name, lattice_name, g, m)?);
            }
        }
        if !ok {
            break;
        }
    }
    Ok(SearchResult { isometries: found, complete, nodes, frame })
}

/// Orbits of a group of form automorphisms on the nonzero elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    /// Parts ordered by `(q value, minimal element)`; elements in index order.
    pub parts: Vec<Vec<Element>>,
    pub values: Vec<Rat>,
}

/// Comparison of an orbit partition with the level sets of `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitVerdict {
    EqualsLevelSets,
    /// Strictly finer than the level sets: more generators might merge parts.
    Finer,
}

impl OrbitPartition {
    pub fn verdict(&self, f: &FiniteQuadraticForm) -> OrbitVerdict {
        if self.parts.len() == level_sets(f).len() {
            OrbitVerdict::EqualsLevelSets
        } else {
            OrbitVerdict::Finer
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }
}

/// Nonzero elements grouped by `q`, in increasing value.
pub fn level_sets(f: &FiniteQuadraticForm) -> BTreeMap<Rat, Vec<Element>> {
    let mut m: BTreeMap<Rat, Vec<Element>> = BTreeMap::new();
    for a in f.elements().skip(1) {
        m.entry(f.q(&a)).or_default().push(a);
    }
    m
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Orbit partition of `A \ {0}` under the group generated by `gens`, each
/// given as images of the form's generators.
pub fn orbit_partition(f: &FiniteQuadraticForm, gens: &[Vec<Element>]) -> Result<OrbitPartition, DiscError> {
    for (i, g) in gens.iter().enumerate() {
        if !f.is_automorphism(g) {
            return Err(DiscError::NotIsometry(format!("generator {i}")));
        }
    }
    let n = f.order() as usize;
    let mut parent: Vec<usize> = (0..n).collect();
    for idx in 1..n {
        let a = f.element_at(idx);
        for g in gens {
            let b = f.index_of(&f.apply(g, &a));
            let (ra, rb) = (find(&mut parent, idx), find(&mut parent, b));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for idx in 1..n {
        let r = find(&mut parent, idx);
        groups.entry(r).or_default().push(idx);
    }
    let mut parts: Vec<(Rat, usize, Vec<Element>)> = groups
        .into_values()
        .map(|ixs| {
            let a0 = f.element_at(ixs[0]);
            (f.q(&a0), ixs[0], ixs.iter().map(|&i| f.element_at(i)).collect())
        })
        .collect();
    parts.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    Ok(OrbitPartition {
        values: parts.iter().map(|p| p.0.clone()).collect(),
        parts: parts.into_iter().map(|p| p.2).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::linalg::rat;

    #[test]
    fn short_vectors_a2() {
        let v = short_vectors(&[vec![2, -1], vec![-1, 2]], 2);
        assert_eq!(v.len(), 6);
    }

    #[test]
    fn minus_two_has_only_sign() {
        let l = Lattice::from_i64("<-2>", &[vec![-2]]).unwrap().whole();
        let r = isometry_search("<-2>", &l, &SearchConfig { per_seed: 10, ..Default::default() }).unwrap();
        assert_eq!(r.isometries.len(), 2);
        assert!(r.complete);
    }

    #[test]
    fn identity_orbits_are_singletons() {
        let f = FiniteQuadraticForm::from_values(
            vec![3, 3],
            &[rat(2, 3), rat(2, 3)],
            &[vec![rat(2, 3), rat(0, 1)], vec![rat(0, 1), rat(2, 3)]],
        )
        .unwrap();
        let id = vec![vec![1, 0], vec![0, 1]];
        let o = orbit_partition(&f, &[id]).unwrap();
        assert_eq!(o.parts.len(), 8);
        assert_eq!(o.verdict(&f), OrbitVerdict::Finer);
        let bad = vec![vec![1, 1], vec![0, 1]];
        assert!(orbit_partition(&f, &[bad]).is_err());
    }

    #[test]
    fn non_isometry_rejected() {
        let g = Matrix::from_i64(&[vec![-2, 1], vec![1, -2]]);
        assert!(Isometry::new("x", "A2", &g, Matrix::from_i64(&[vec![1, 1], vec![0, 1]])).is_err());
    }
}
