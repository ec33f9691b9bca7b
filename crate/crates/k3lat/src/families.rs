//! Néron–Severi lattices of the rank-13 families, their embeddings into the
//! K3 lattice, the correspondence through `π_*`/`π^*`, the divisors `D_i`
//! and the isogeny tower.
//!
//! Abstract lattices `⟨2n⟩ ⊕ K12` and `⟨2n⟩ ⊕ M` live on the reference
//! `⟨2n⟩ ⊕ K12tilde` (coordinates `L | k1..k12`) and `⟨2n⟩ ⊕ A2^6`
//! (coordinates `H | M1^(1), M2^(1), …`).

use crate::catalog::{self, xc};
use crate::disc::{discriminant_form, fqf_isomorphic_general, DiscError, Element};
use crate::lattice::{
    complement_within, direct_sum, overlattice, saturation_within, GlueVector, Lattice, LatticeError,
    RelativeLattice,
};
use crate::linalg::{rat, ri, unit_vec, vadd, vscale, vsub, zero_vec, QVec, Rat};
use crate::symplectic::{self, build_h2y, k_vector, yc, GlueChoice, H2Y};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("unexpected structure: {0}")]
    Structure(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Plain,
    Primed,
}

/// `⟨2n⟩ ⊕ K12` (side X) or `⟨2n⟩ ⊕ M` (side Y), possibly with its index-3
/// overlattice (primed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NSDescriptor {
    pub side: Side,
    pub variant: Variant,
    pub degree: i64,
}

impl NSDescriptor {
    pub fn new(side: Side, variant: Variant, degree: i64) -> Result<Self, FamilyError> {
        if degree < 1 {
            return Err(FamilyError::InvalidDescriptor(format!("degree {degree} must be positive")));
        }
        if variant == Variant::Primed && degree % 3 != 0 {
            return Err(FamilyError::InvalidDescriptor(format!(
                "primed variant needs degree divisible by 3, got {degree}"
            )));
        }
        Ok(NSDescriptor { side, variant, degree })
    }

    pub fn plain_x(d: i64) -> Self {
        Self::new(Side::X, Variant::Plain, d).expect("valid")
    }

    pub fn primed_x(d: i64) -> Self {
        Self::new(Side::X, Variant::Primed, d).expect("valid")
    }

    pub fn plain_y(e: i64) -> Self {
        Self::new(Side::Y, Variant::Plain, e).expect("valid")
    }

    pub fn primed_y(e: i64) -> Self {
        Self::new(Side::Y, Variant::Primed, e).expect("valid")
    }

    /// Self-intersection `2·degree` of the polarization.
    pub fn square(&self) -> i64 {
        2 * self.degree
    }

    /// Target of the quotient correspondence, computed arithmetically.
    pub fn corresponding(&self) -> NSDescriptor {
        let d = self.degree;
        match (self.side, self.variant) {
            (Side::X, Variant::Plain) => Self::primed_y(3 * d),
            (Side::X, Variant::Primed) => Self::plain_y(d / 3),
            (Side::Y, Variant::Primed) => Self::plain_x(d / 3),
            (Side::Y, Variant::Plain) => Self::primed_x(3 * d),
        }
    }
}

impl fmt::Display for NSDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.variant {
            Variant::Plain => "Plain",
            Variant::Primed => "Primed",
        };
        let s = match self.side {
            Side::X => "X",
            Side::Y => "Y",
        };
        write!(f, "{v}{s}({})", self.degree)
    }
}

/// The second summand next to `⟨2n⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summand {
    K12,
    M,
}

impl Summand {
    pub fn of(side: Side) -> Self {
        match side {
            Side::X => Summand::K12,
            Side::Y => Summand::M,
        }
    }
}

/// `⟨2n⟩ ⊕ S` on its reference lattice.
#[derive(Debug, Clone)]
pub struct SplitLattice {
    pub reference: Arc<Lattice>,
    pub base: RelativeLattice,
    pub summand: RelativeLattice,
    /// The generator `L` (or `H`) of `⟨2n⟩`.
    pub line: QVec,
}

fn prefix_zero(v: &[Rat]) -> QVec {
    let mut out = vec![Rat::zero()];
    out.extend_from_slice(v);
    out
}

pub fn split_lattice(summand: Summand, n: i64) -> Result<SplitLattice, FamilyError> {
    let line_lat = catalog::two_d(n).map_err(|e| FamilyError::InvalidDescriptor(e.to_string()))?;
    let (other, inner) = match summand {
        Summand::K12 => (catalog::k12_tilde(), catalog::k12()),
        Summand::M => (catalog::a2_sixfold(), catalog::m_lattice()),
    };
    let mut names = vec![match summand {
        Summand::K12 => "L".to_string(),
        Summand::M => "H".to_string(),
    }];
    names.extend(other.basis_labels().map(<[String]>::to_vec).unwrap_or_default());
    let reference = Arc::new(direct_sum(format!("<{}>+{}", 2 * n, other.label()), &[&line_lat, &other]).with_basis_labels(names));
    let sgens: Vec<QVec> = inner.basis().iter().map(|b| prefix_zero(b)).collect();
    let summand_lat = RelativeLattice::new(reference.clone(), &sgens)?;
    let line = unit_vec(13, 0);
    let mut gens = sgens;
    gens.push(line.clone());
    let base = RelativeLattice::new(reference.clone(), &gens)?;
    Ok(SplitLattice { reference, base, summand: summand_lat, line })
}

/// The glue `g` chosen per residue class, in summand coordinates (without
/// the leading `⟨2n⟩` coordinate).
pub fn standard_glue(summand: Summand, n: i64) -> Option<QVec> {
    if n % 3 != 0 {
        return None;
    }
    let r = n.rem_euclid(9);
    let mut g = zero_vec(12);
    match summand {
        Summand::K12 => {
            let ks: &[usize] = match r {
                0 => &[1, 3, 5, 7, 9, 11],
                3 => &[1, 3, 7, 9],
                _ => &[1, 7],
            };
            for &k in ks {
                g[k - 1] = ri(1);
            }
        }
        Summand::M => {
            // (block, coefficient of M1, coefficient of M2)
            let blocks: &[(usize, i64, i64)] = match r {
                0 => &[(1, 1, 2), (2, 1, 2), (3, 1, 2)],
                3 => &[(1, 2, 1), (2, 2, 1), (3, 1, 2), (4, 1, 2)],
                _ => &[(1, 1, 2), (2, 2, 1)],
            };
            for &(j, c1, c2) in blocks {
                g[catalog::m_index(1, j)] = ri(c1);
                g[catalog::m_index(2, j)] = ri(c2);
            }
        }
    }
    Some(g)
}

/// A classified index-3 overlattice `(⟨2n⟩ ⊕ S)'`.
#[derive(Debug, Clone)]
pub struct Classified {
    /// `g` in reference coordinates.
    pub g: QVec,
    /// `(L + g)/3`.
    pub glue: QVec,
    pub lattice: RelativeLattice,
    /// `q(g/3)` in the discriminant form of the summand, reduced to `[0, 2)`.
    pub q_glue: Rat,
    pub line_primitive: bool,
    pub summand_primitive: bool,
}

pub fn classify_overlattice(summand: Summand, n: i64) -> Result<Option<Classified>, FamilyError> {
    if n < 1 {
        return Err(FamilyError::InvalidDescriptor(format!("degree {n} must be positive")));
    }
    let Some(g) = standard_glue(summand, n) else { return Ok(None) };
    let split = split_lattice(summand, n)?;
    let g = prefix_zero(&g);
    let glue = vscale(&rat(1, 3), &vadd(&split.line, &g));
    let lattice = overlattice(&split.base, &[GlueVector::new("(L+g)/3", glue.clone())])?.lattice;
    let disc = discriminant_form(&split.summand)?;
    let a = disc.element_of(&vscale(&rat(1, 3), &g))?;
    let q_glue = disc.form().q(&a);
    let line_lat = RelativeLattice::new(split.reference.clone(), std::slice::from_ref(&split.line))?;
    let line_primitive = saturation_within(&lattice, line_lat.basis())? == line_lat;
    let summand_primitive = saturation_within(&lattice, split.summand.basis())? == split.summand;
    Ok(Some(Classified { g, glue, lattice, q_glue, line_primitive, summand_primitive }))
}

pub fn classify_overlattice_x(d: i64) -> Result<Option<Classified>, FamilyError> {
    classify_overlattice(Summand::K12, d)
}

pub fn classify_overlattice_y(e: i64) -> Result<Option<Classified>, FamilyError> {
    classify_overlattice(Summand::M, e)
}

/// A glue `(L + g)/3` that survives the brute-force search.
#[derive(Debug, Clone)]
pub struct AdmissibleGlue {
    /// Class of `g/3` in the discriminant group of the summand.
    pub element: Element,
    pub q: Rat,
    pub glue: QVec,
    pub lattice: RelativeLattice,
}

/// All `(L + g)/3` with `g/3` running over the discriminant group of the
/// summand whose extension is even, integral and keeps both summands
/// primitive.
pub fn enumerate_admissible_glues(summand: Summand, n: i64) -> Result<Vec<AdmissibleGlue>, FamilyError> {
    let split = split_lattice(summand, n)?;
    let disc = discriminant_form(&split.summand)?;
    let f = disc.form();
    let third = rat(1, 3);
    let line_third = vscale(&third, &split.line);
    let mut out = Vec::new();
    for a in f.elements() {
        let glue = vadd(&line_third, &disc.representative(&a));
        // f·L and f² decide integrality and evenness; f·S is integral since
        // the representative lies in the dual of S
        if !split.reference.pair(&glue, &split.line).is_integer() {
            continue;
        }
        let norm = split.reference.norm(&glue);
        if !norm.is_integer() || norm.to_integer().is_odd() {
            continue;
        }
        // multiples of f with a trivial summand part would land in ⟨L⟩ ⊗ Q
        let meets_line = (1..3).any(|k| f.scale(k, &a).iter().all(|&x| x == 0));
        if meets_line {
            continue;
        }
        let lattice = overlattice(&split.base, &[GlueVector::new("f", glue.clone())])?.lattice;
        out.push(AdmissibleGlue { q: f.q(&a), element: a, glue, lattice });
    }
    Ok(out)
}

/// Rank, signature, `|det|` and elementary divisors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusSummary {
    pub rank: usize,
    pub signature: (usize, usize),
    pub abs_det: BigInt,
    pub disc_divisors: Vec<i64>,
}

pub fn genus_summary(l: &RelativeLattice) -> Result<GenusSummary, FamilyError> {
    let disc = discriminant_form(l)?;
    Ok(GenusSummary {
        rank: l.rank(),
        signature: l.signature()?,
        abs_det: l.det().abs().to_integer(),
        disc_divisors: disc.form().divisors().to_vec(),
    })
}

/// Same rank, signature, `|det|` and isomorphic discriminant forms.
pub fn genus_equal(a: &RelativeLattice, b: &RelativeLattice) -> Result<bool, FamilyError> {
    if a.rank() != b.rank() || a.signature()? != b.signature()? || a.det().abs() != b.det().abs() {
        return Ok(false);
    }
    let (da, db) = (discriminant_form(a)?, discriminant_form(b)?);
    Ok(fqf_isomorphic_general(da.form(), db.form())?)
}

/// The lattice a descriptor names, on its abstract reference.
pub fn abstract_ns(desc: NSDescriptor) -> Result<RelativeLattice, FamilyError> {
    let summand = Summand::of(desc.side);
    match desc.variant {
        Variant::Plain => Ok(split_lattice(summand, desc.degree)?.base),
        Variant::Primed => classify_overlattice(summand, desc.degree)?
            .map(|c| c.lattice)
            .ok_or_else(|| FamilyError::InvalidDescriptor(desc.to_string())),
    }
}

struct Context {
    lk3: RelativeLattice,
    k12: RelativeLattice,
    h2y: H2Y,
}

fn context() -> &'static Context {
    static CTX: OnceLock<Context> = OnceLock::new();
    CTX.get_or_init(|| {
        let lk3 = catalog::lambda_k3_glued();
        let mut gens: Vec<QVec> = (1..=12).map(k_vector).collect();
        gens.push(symplectic::z_vector());
        let k12 = RelativeLattice::new(lk3.reference().clone(), &gens).expect("k_i and z");
        let h2y = build_h2y(GlueChoice::Corrected).expect("corrected glue gives H2(Y)");
        Context { lk3, k12, h2y }
    })
}

/// `λ(K12)` inside the glued K3 lattice.
pub fn lambda_k12() -> RelativeLattice {
    context().k12.clone()
}

/// `H²(Y)` with the corrected glue.
pub fn h2y() -> H2Y {
    context().h2y.clone()
}

/// `NS(X)` or `NS(Y)` placed in `H²`.
#[derive(Debug, Clone)]
pub struct EmbeddedNS {
    pub desc: NSDescriptor,
    /// Image of `L` (side X) or `H` (side Y).
    pub line: QVec,
    /// Span of `line` and the summand.
    pub raw: RelativeLattice,
    /// Primitive closure in `H²`.
    pub lattice: RelativeLattice,
    pub index: BigInt,
}

fn e_sum(idx: &[usize], block: usize) -> QVec {
    let mut v = zero_vec(xc::RANK);
    for &i in idx {
        v[xc::e(i, block)] = ri(1);
    }
    v
}

/// `j(L) = u1 + d·u2`.
pub fn j_vector(d: i64) -> QVec {
    let mut v = zero_vec(xc::RANK);
    v[xc::U1] = ri(1);
    v[xc::U2] = ri(d);
    v
}

/// `j~(L) = 3u1 + 3k·u2 + Σ_i g^(i)`, for `d ≡ 0 mod 3`.
pub fn j_tilde_vector(d: i64) -> Result<QVec, FamilyError> {
    if d % 3 != 0 || d < 1 {
        return Err(FamilyError::InvalidDescriptor(format!("j~ needs d ≡ 0 mod 3, got {d}")));
    }
    let (idx, k): (&[usize], i64) = match d.rem_euclid(9) {
        0 => (&[1, 3, 5], (d + 9) / 9),
        3 => (&[1, 3], (d + 6) / 9),
        _ => (&[1], (d + 3) / 9),
    };
    let mut v = zero_vec(xc::RANK);
    v[xc::U1] = ri(3);
    v[xc::U2] = ri(3 * k);
    for j in 1..=3 {
        v = vadd(&v, &e_sum(idx, j));
    }
    Ok(v)
}

/// `h(H) = u1' + k·u2' + f`.
pub fn h_vector(e: i64) -> QVec {
    let (idx, k): (&[usize], i64) = match e.rem_euclid(3) {
        0 => (&[1, 3, 5], e / 3 + 1),
        1 => (&[1, 3], (e + 2) / 3),
        _ => (&[1], (e + 1) / 3),
    };
    let mut v = zero_vec(yc::RANK);
    v[yc::U1] = ri(1);
    v[yc::U2] = ri(k);
    for &i in idx {
        v[yc::e(i)] = ri(1);
    }
    v
}

/// `h~(H) = u1' + (e/3)·u2'`.
pub fn h_tilde_vector(e: i64) -> Result<QVec, FamilyError> {
    if e % 3 != 0 || e < 1 {
        return Err(FamilyError::InvalidDescriptor(format!("h~ needs e ≡ 0 mod 3, got {e}")));
    }
    let mut v = zero_vec(yc::RANK);
    v[yc::U1] = ri(1);
    v[yc::U2] = ri(e / 3);
    Ok(v)
}

fn embed(line: QVec, summand: &RelativeLattice, ambient: &RelativeLattice, desc: NSDescriptor) -> Result<EmbeddedNS, FamilyError> {
    let mut gens = summand.basis().to_vec();
    gens.push(line.clone());
    let raw = RelativeLattice::new(ambient.reference().clone(), &gens)?;
    let lattice = saturation_within(ambient, raw.basis())?;
    let index = lattice.index_of(&raw).ok_or_else(|| FamilyError::Structure("closure does not contain span".into()))?;
    Ok(EmbeddedNS { desc, line, raw, lattice, index })
}

/// `NS(X)` in the glued K3 lattice via `(j, λ)` or `(j~, λ)`.
pub fn embed_nsx(desc: NSDescriptor) -> Result<EmbeddedNS, FamilyError> {
    if desc.side != Side::X {
        return Err(FamilyError::InvalidDescriptor(format!("{desc} is not an X-side descriptor")));
    }
    let line = match desc.variant {
        Variant::Plain => j_vector(desc.degree),
        Variant::Primed => j_tilde_vector(desc.degree)?,
    };
    let ctx = context();
    embed(line, &ctx.k12, &ctx.lk3, desc)
}

/// `NS(Y)` in `H²(Y)` via `(h, μ)` or `(h~, μ)`.
pub fn embed_nsy(desc: NSDescriptor) -> Result<EmbeddedNS, FamilyError> {
    if desc.side != Side::Y {
        return Err(FamilyError::InvalidDescriptor(format!("{desc} is not a Y-side descriptor")));
    }
    let line = match desc.variant {
        Variant::Plain => h_vector(desc.degree),
        Variant::Primed => h_tilde_vector(desc.degree)?,
    };
    let ctx = context();
    embed(line, &ctx.h2y.m, &ctx.h2y.lattice, desc)
}

/// A Néron–Severi lattice reconstructed on the other side of `π`.
#[derive(Debug, Clone)]
pub struct Correspondence {
    pub source: NSDescriptor,
    pub target: NSDescriptor,
    /// Primitive generator of the summand's complement.
    pub line: QVec,
    pub line_square: Rat,
    pub lattice: RelativeLattice,
    /// Index of `⟨line⟩ ⊕ summand` in `lattice`.
    pub index: BigInt,
    /// Genus of `lattice` agrees with `abstract_ns(target)`.
    pub shape_verified: bool,
}

fn read_off(
    source: NSDescriptor,
    side: Side,
    lattice: RelativeLattice,
    summand: &RelativeLattice,
) -> Result<Correspondence, FamilyError> {
    let comp = complement_within(&lattice, summand)?;
    if comp.rank() != 1 {
        return Err(FamilyError::Structure(format!("complement of the summand has rank {}", comp.rank())));
    }
    let line = comp.basis()[0].clone();
    let line_square = lattice.reference().norm(&line);
    let two = ri(2);
    let half = &line_square / &two;
    if !half.is_integer() || !half.is_positive() {
        return Err(FamilyError::Structure(format!("polarization square {line_square} is not 2n with n > 0")));
    }
    let degree = half.to_integer().try_into().map_err(|_| FamilyError::Structure("degree too large".into()))?;
    let mut gens = summand.basis().to_vec();
    gens.push(line.clone());
    let split = RelativeLattice::new(lattice.reference().clone(), &gens)?;
    let index = lattice.index_of(&split).ok_or_else(|| FamilyError::Structure("split not contained".into()))?;
    let variant = if index.is_one() {
        Variant::Plain
    } else if index == BigInt::from(3) {
        Variant::Primed
    } else {
        return Err(FamilyError::Structure(format!("index {index} is neither 1 nor 3")));
    };
    let target = NSDescriptor::new(side, variant, degree)?;
    let shape_verified = genus_equal(&lattice, &abstract_ns(target)?)?;
    Ok(Correspondence { source, target, line, line_square, lattice, index, shape_verified })
}

/// `NS(Y)` from `NS(X)`: push through `π_*`, add `M`, saturate in `H²(Y)`.
pub fn ns_of_quotient(desc: NSDescriptor) -> Result<Correspondence, FamilyError> {
    let emb = embed_nsx(desc)?;
    let ctx = context();
    let push = symplectic::push_forward();
    let mut gens: Vec<QVec> = emb.lattice.basis().iter().map(|b| push.apply(b)).collect();
    gens.extend(ctx.h2y.m.basis().iter().cloned());
    let ns_y = saturation_within(&ctx.h2y.lattice, &gens)?;
    read_off(desc, Side::Y, ns_y, &ctx.h2y.m)
}

/// `NS(X)` from `NS(Y)`: pull back through `π^*`, add `λ(K12)`, saturate.
pub fn ns_of_cover(desc: NSDescriptor) -> Result<Correspondence, FamilyError> {
    let emb = embed_nsy(desc)?;
    let ctx = context();
    let pull = symplectic::pull_back();
    let mut gens: Vec<QVec> = emb.lattice.basis().iter().map(|b| pull.apply(b)).collect();
    gens.extend(ctx.k12.basis().iter().cloned());
    let ns_x = saturation_within(&ctx.lk3, &gens)?;
    read_off(desc, Side::X, ns_x, &ctx.k12)
}

/// `χ = 2 + D²/2`.
pub fn chi(square: &Rat) -> Rat {
    ri(2) + square / ri(2)
}

/// `D = (c·H - Σ_j p_j)/3` with `p_j ∈ {0, M1+2M2, 2M1+M2}` coded `0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DivisorPattern {
    pub h_coeff: i64,
    pub blocks: [u8; 6],
}

impl DivisorPattern {
    fn with(h_coeff: i64, ones: &[usize], twos: &[usize]) -> Self {
        let mut blocks = [0u8; 6];
        for &j in ones {
            blocks[j - 1] = 1;
        }
        for &j in twos {
            blocks[j - 1] = 2;
        }
        DivisorPattern { h_coeff, blocks }
    }

    /// Coordinates on `⟨2e⟩ ⊕ A2^6`.
    pub fn abstract_coords(&self) -> QVec {
        let mut v = zero_vec(13);
        v[0] = rat(self.h_coeff, 3);
        for (j, &p) in self.blocks.iter().enumerate() {
            let (c1, c2) = match p {
                0 => continue,
                1 => (1, 2),
                _ => (2, 1),
            };
            v[1 + catalog::m_index(1, j + 1)] = rat(-c1, 3);
            v[1 + catalog::m_index(2, j + 1)] = rat(-c2, 3);
        }
        v
    }

    /// The same class in `H²(Y)` coordinates, with `H` sent to `h_line`.
    pub fn embedded(&self, h_line: &[Rat]) -> QVec {
        let a = self.abstract_coords();
        let mut v = vscale(&a[0], h_line);
        for j in 1..=6 {
            for i in 1..=2 {
                let c = &a[1 + catalog::m_index(i, j)];
                v[yc::m(i, j)] += c;
            }
        }
        v
    }

    /// Exchanges `M1+2M2` and `2M1+M2` in every block, i.e. flips the sign
    /// of the `M`-part modulo `3M`.
    pub fn conjugate(&self) -> Self {
        let mut blocks = self.blocks;
        for b in blocks.iter_mut() {
            *b = (3 - *b) % 3;
        }
        DivisorPattern { h_coeff: self.h_coeff, blocks }
    }

    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        for (j, &p) in self.blocks.iter().enumerate() {
            match p {
                1 => parts.push(format!("(M1+2M2)^({})", j + 1)),
                2 => parts.push(format!("(2M1+M2)^({})", j + 1)),
                _ => {}
            }
        }
        let h = if self.h_coeff == 1 { "H".to_string() } else { format!("{}H", self.h_coeff) };
        if parts.is_empty() {
            format!("{h}/3")
        } else {
            format!("({h} - {})/3", parts.join(" - "))
        }
    }
}

/// The divisors `D1, D2, D3` as written for each case.
pub fn literal_patterns(desc: NSDescriptor) -> Result<[DivisorPattern; 3], FamilyError> {
    if desc.side != Side::Y {
        return Err(FamilyError::InvalidDescriptor(format!("{desc} is not a Y-side descriptor")));
    }
    let p = DivisorPattern::with;
    Ok(match desc.variant {
        Variant::Plain => [p(3, &[], &[]), p(3, &[], &[1, 2, 3, 4, 5, 6]), p(3, &[1, 2, 3, 4, 5, 6], &[])],
        Variant::Primed => match desc.degree.rem_euclid(9) {
            0 => [p(1, &[1, 2, 3], &[]), p(1, &[], &[4, 5, 6]), p(1, &[4, 5, 6], &[1, 2, 3])],
            3 => [p(1, &[3, 4], &[1, 2]), p(1, &[1, 2, 5, 6], &[]), p(1, &[5, 6], &[3, 4])],
            _ => [p(1, &[1], &[2]), p(1, &[2], &[3, 4, 5, 6]), p(1, &[3, 4, 5, 6], &[1])],
        },
    })
}

/// How the class used for `D_i` was obtained from the written one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Literal,
    /// The sign-flipped `M`-part, see [`DivisorPattern::conjugate`].
    Conjugate,
    Nearest,
}

/// One divisor `D_i` with its membership verdict.
#[derive(Debug, Clone)]
pub struct DivisorReport {
    pub label: String,
    pub literal: DivisorPattern,
    pub literal_square: Rat,
    pub literal_integral: bool,
    pub resolution: Resolution,
    pub representative: DivisorPattern,
    pub square: Rat,
    pub chi: Rat,
}

fn square_of(p: &DivisorPattern, reference: &Lattice) -> Rat {
    reference.norm(&p.abstract_coords())
}

/// `D1, D2, D3` in the abstract `NS(Y)` with membership checked. A failing
/// class is replaced by its conjugate when that is integral, and otherwise by
/// the nearest integral pattern (same square, then fewest changed blocks,
/// then lexicographic).
pub fn divisors_di(desc: NSDescriptor) -> Result<[DivisorReport; 3], FamilyError> {
    let ns = abstract_ns(desc)?;
    let reference = ns.reference().clone();
    let lits = literal_patterns(desc)?;
    let mut out = Vec::with_capacity(3);
    for (i, lit) in lits.iter().enumerate() {
        let literal_square = square_of(lit, &reference);
        let literal_integral = ns.contains(&lit.abstract_coords());
        let conj = lit.conjugate();
        let (resolution, representative) = if literal_integral {
            (Resolution::Literal, *lit)
        } else if ns.contains(&conj.abstract_coords()) {
            (Resolution::Conjugate, conj)
        } else {
            let mut best: Option<(bool, usize, DivisorPattern)> = None;
            for code in 0..729u32 {
                let mut blocks = [0u8; 6];
                let mut c = code;
                for b in blocks.iter_mut().rev() {
                    *b = (c % 3) as u8;
                    c /= 3;
                }
                let cand = DivisorPattern { h_coeff: lit.h_coeff, blocks };
                if !ns.contains(&cand.abstract_coords()) {
                    continue;
                }
                let same_square = square_of(&cand, &reference) == literal_square;
                let changes = cand.blocks.iter().zip(&lit.blocks).filter(|(a, b)| a != b).count();
                let key = (!same_square, changes, cand);
                if best.as_ref().map_or(true, |b| key < *b) {
                    best = Some(key);
                }
            }
            let best = best.ok_or_else(|| FamilyError::Structure(format!("no integral pattern near D{}", i + 1)))?;
            (Resolution::Nearest, best.2)
        };
        let square = square_of(&representative, &reference);
        out.push(DivisorReport {
            label: format!("D{}", i + 1),
            literal: *lit,
            literal_integral,
            literal_square,
            resolution,
            chi: chi(&square),
            representative,
            square,
        });
    }
    Ok(out.try_into().expect("three divisors"))
}

/// Exact comparison of `π^*(D_i)` with the embedded polarization of `X`.
#[derive(Debug, Clone)]
pub struct PullbackReport {
    pub desc: NSDescriptor,
    /// `π^*(h(H)) = j~(L)` (plain) or `π^*(h~(H)) = 3 j(L)` (primed).
    pub polarization_ok: bool,
    /// `π^*(D_i)` equals `j~(L)` (plain) or `j(L)` (primed), for each `i`.
    pub divisors_ok: [bool; 3],
    /// Nonzero differences, for reporting.
    pub differences: Vec<(String, QVec)>,
    /// Membership of the literal `D_i` in the embedded `NS(Y)`.
    pub embedded_integral: [bool; 3],
}

pub fn pullback_di(desc: NSDescriptor) -> Result<PullbackReport, FamilyError> {
    let emb = embed_nsy(desc)?;
    let pull = symplectic::pull_back();
    let lits = literal_patterns(desc)?;
    let (h_img, expected_h, expected_d) = match desc.variant {
        Variant::Plain => {
            let jt = j_tilde_vector(3 * desc.degree)?;
            (pull.apply(&emb.line), jt.clone(), jt)
        }
        Variant::Primed => {
            let j = j_vector(desc.degree / 3);
            (pull.apply(&emb.line), vscale(&ri(3), &j), j)
        }
    };
    let mut differences = Vec::new();
    let polarization_ok = h_img == expected_h;
    if !polarization_ok {
        differences.push(("H".to_string(), vsub(&h_img, &expected_h)));
    }
    let mut divisors_ok = [false; 3];
    let mut embedded_integral = [false; 3];
    for (i, lit) in lits.iter().enumerate() {
        let d = lit.embedded(&emb.line);
        embedded_integral[i] = emb.lattice.contains(&d);
        let img = pull.apply(&d);
        divisors_ok[i] = img == expected_d;
        if !divisors_ok[i] {
            differences.push((format!("D{}", i + 1), vsub(&img, &expected_d)));
        }
    }
    Ok(PullbackReport { desc, polarization_ok, divisors_ok, differences, embedded_integral })
}

/// `(χ(D1), χ(D2), χ(D3))` for `NS(X)` given by `(d, variant)`.
#[derive(Debug, Clone)]
pub struct Eigenspaces {
    pub source: NSDescriptor,
    pub quotient: NSDescriptor,
    pub chis: [Rat; 3],
    pub sum_ok: bool,
}

impl Eigenspaces {
    /// The dimensions as integers, when all three are integral.
    pub fn dims(&self) -> Option<[i64; 3]> {
        let mut out = [0i64; 3];
        for (o, c) in out.iter_mut().zip(&self.chis) {
            if !c.is_integer() {
                return None;
            }
            *o = c.to_integer().try_into().ok()?;
        }
        Some(out)
    }
}

pub fn eigenspace_dimensions(d: i64, variant: Variant) -> Result<Eigenspaces, FamilyError> {
    let source = NSDescriptor::new(Side::X, variant, d)?;
    let quotient = ns_of_quotient(source)?.target;
    let reports = divisors_di(quotient)?;
    let chis = [reports[0].chi.clone(), reports[1].chi.clone(), reports[2].chi.clone()];
    let total = chis.iter().fold(Rat::zero(), |a, c| a + c);
    Ok(Eigenspaces { source, quotient, sum_ok: total == ri(d + 2), chis })
}

/// `χ(D1), χ(D2), χ(D3)` as tabulated, for `NS(X)` given by `(d, variant)`.
pub fn expected_chis(d: i64, variant: Variant) -> [Rat; 3] {
    let t = rat(d, 3);
    let f = |a: i64, b: i64| &t + rat(a, b);
    match variant {
        Variant::Primed => [f(2, 1), f(0, 1), f(0, 1)],
        Variant::Plain => match d.rem_euclid(3) {
            0 => [f(1, 1), f(1, 1), f(0, 1)],
            1 => [f(2, 3), f(2, 3), f(2, 3)],
            _ => [f(4, 3), f(1, 3), f(1, 3)],
        },
    }
}

/// One rung `X_{3^k d}` of the isogeny tower.
#[derive(Debug, Clone)]
pub struct TowerRung {
    pub level: usize,
    /// `(⟨6·3^k d⟩ ⊕ K12)'`.
    pub x_shape: NSDescriptor,
    /// `⟨6·3^k d⟩ ⊕ M`.
    pub y_shape: NSDescriptor,
    /// `2e = 6·3^k d`.
    pub square: i64,
    pub genus_equal: bool,
    /// The cover of this rung read as a quotient surface.
    pub cover: NSDescriptor,
    pub cover_ok: bool,
}

pub fn isogeny_tower(d: i64, height: usize) -> Result<Vec<TowerRung>, FamilyError> {
    if height < 1 || d < 1 {
        return Err(FamilyError::InvalidDescriptor("tower needs d ≥ 1 and height ≥ 1".into()));
    }
    let mut out = Vec::with_capacity(height);
    let mut e = 3 * d;
    for level in 0..height {
        let x_shape = NSDescriptor::primed_x(e);
        let y_shape = NSDescriptor::plain_y(e);
        let genus = genus_equal(&abstract_ns(x_shape)?, &abstract_ns(y_shape)?)?;
        let cover = ns_of_cover(y_shape)?;
        let next = NSDescriptor::primed_x(3 * e);
        out.push(TowerRung {
            level,
            x_shape,
            y_shape,
            square: 2 * e,
            genus_equal: genus,
            cover_ok: cover.target == next && cover.shape_verified,
            cover: cover.target,
        });
        e *= 3;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_rules() {
        assert!(NSDescriptor::new(Side::X, Variant::Primed, 2).is_err());
        assert_eq!(NSDescriptor::plain_x(1).corresponding(), NSDescriptor::primed_y(3));
        assert_eq!(NSDescriptor::primed_x(3).to_string(), "PrimedX(3)");
    }

    #[test]
    fn classify_small() {
        assert!(classify_overlattice_x(1).unwrap().is_none());
        let c = classify_overlattice_x(6).unwrap().unwrap();
        assert_eq!(c.q_glue, rat(2, 3));
        assert!(c.line_primitive && c.summand_primitive);
        assert!(c.lattice.is_even());
        let y = classify_overlattice_y(9).unwrap().unwrap();
        assert_eq!(y.lattice.rank(), 13);
    }

    #[test]
    fn embeddings_square() {
        let e = embed_nsx(NSDescriptor::plain_x(1)).unwrap();
        assert!(e.index.is_one());
        let e = embed_nsx(NSDescriptor::primed_x(3)).unwrap();
        assert_eq!(catalog::k3_base().norm(&e.line), ri(6));
        assert_eq!(e.index, BigInt::from(3));
    }

    #[test]
    fn quotient_small() {
        let c = ns_of_quotient(NSDescriptor::plain_x(1)).unwrap();
        assert_eq!(c.target, NSDescriptor::primed_y(3));
        assert_eq!(c.line_square, ri(6));
        assert!(c.shape_verified);
        let back = ns_of_cover(c.target).unwrap();
        assert_eq!(back.target, NSDescriptor::plain_x(1));
    }

    #[test]
    fn plain_y_d2_square() {
        let r = divisors_di(NSDescriptor::plain_y(5)).unwrap();
        assert_eq!(r[0].square, ri(10));
        assert_eq!(r[1].square, ri(6));
        assert!(r.iter().all(|d| d.literal_integral));
    }
}
