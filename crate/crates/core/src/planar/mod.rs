//! `A`-structures on a vector space, their hulls and the first prolongation
//! `A^(1)` of symmetric tensors `Σ α_i ⊙ F_i`.
//!
//! Normalization: `(α ⊙ F)(X, Y) = ½ (α(X) F(Y) + α(Y) F(X))`, so the
//! diagonal of `Σ α_i ⊙ F_i` is exactly `Σ α_i(X) F_i(X)`. The projective
//! formula `α(X)Y + α(Y)X` corresponds to `2α ⊙ E`. The sum runs over
//! `i = 0..ℓ` with `F_0 = E`.

mod a1;
mod structure;
mod tensor;

pub use a1::{
    decompose_a1, decompose_a1_with, make_a1, polarize, A1Decomposition, DecomposeOptions,
    OneFormList,
};
pub use structure::{
    generic_rank_check, hull, hull_inclusion, AStructure, GenericRankReport, Hull,
    InclusionReport, INCLUSION_TOL,
};
pub use tensor::SymTensor;
