//! Splitting Gibbs measures of four-state hard-core models on Cayley trees.

pub mod diamond;
pub mod error;
pub mod fertile;
pub mod model;
pub mod oracle;
pub mod recursion;
pub mod roots;
pub mod scan;
pub mod uniqueness;

pub use error::{Error, Result};
pub use model::{
    build_matrix, AdmissibilityGraph, FieldVector, Model, ModelParams, RootBranching,
    TransitionMatrix, TreeShape,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/uniqueness.md")]
    mod uniqueness {}
    #[doc = include_str!("../../../book/src/diamond.md")]
    mod diamond {}
    #[doc = include_str!("../../../book/src/fertile.md")]
    mod fertile {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
