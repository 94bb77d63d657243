//! Combinatorics of connected graphs with loose ends.
//!
//! The crate implements graphs in the involutive-arc encoding (arcs paired by
//! a fixpoint-free involution, darts attached to vertices, explicit boundary),
//! the poset of embedding classes `Emb(G)`, graphical maps presented as a pair
//! of functions (an involutive arc map plus a map of embedding classes),
//! active/inert factorization through graph substitution, directed variants
//! via orientations, tree and properadic subcategories, and a finite
//! Segal-presheaf toolkit with restriction and left Kan extension.
//!
//! Everything is exhaustive at desk scale: hom-sets, embedding posets and
//! presheaf limits are enumerated explicitly so that the categorical laws can
//! be checked by brute force.

pub mod category;
pub mod corpus;
pub mod diag;
pub mod directed;
pub mod dot;
pub mod embedding;
pub mod format;
pub mod gmap;
pub mod graph;
pub mod oracle;
pub mod segal;
pub mod tree;

pub use diag::Violation;
pub use embedding::{EmbClass, Embeddings, EtaleMap};
pub use graph::{Graph, GraphData, Mode, StandardGraph};
