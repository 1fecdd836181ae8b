//! Periodic pseudospectral discretization of `H_{k,l}` and its
//! eigendecomposition.

mod cache;
mod decomposition;
mod field;
mod grid;
mod operator;

pub use cache::{cache_key, read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use decomposition::{eigendecompose, eigenvalue_growth_fit, GrowthFit, SpectralDecomposition};
pub use field::FieldSample;
pub use grid::Grid;
pub(crate) use operator::fft_in_place;
pub use operator::{apply_operator, assemble_from_potential, assemble_operator, laplacian_symbol, OperatorMatrix};
