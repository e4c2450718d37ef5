//! Finite Boolean-valued models of set theory.

pub mod balg;
pub mod hf;
pub mod universe;
pub mod formula;
pub mod evaluator;
pub mod arrows;
pub mod bsets;
pub mod posets;
pub mod gen;
pub mod suites;

pub use balg::{AlgebraError, BoolAlg, Elem, Hom, HomSpec, Partition};
pub use hf::HfSet;
pub use formula::{Formula, Signature, Term};
pub use universe::{SetId, Universe, UniverseError};
