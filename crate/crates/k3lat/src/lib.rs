//! Exact integral-lattice toolkit for order-3 symplectic automorphisms of
//! K3 surfaces.
//!
//! The crate is layered: [`linalg`] (exact matrices, HNF/SNF), [`lattice`]
//! (lattices, overlattices, complements), [`disc`] (discriminant forms,
//! isometries, orbits), [`catalog`] (named lattices on frozen bases),
//! [`symplectic`] (the order-3 action and quotient maps), [`families`]
//! (family classification and the Néron–Severi correspondence),
//! [`surface`] (the explicit rank-20 example) and [`report`] (the
//! verification suite).

pub mod linalg;
pub mod lattice;
pub mod disc;
pub mod catalog;
pub mod symplectic;
pub mod families;
pub mod surface;
pub mod serial;
pub mod report;
