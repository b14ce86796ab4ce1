//! Random matrix generation: entry laws, diagonal population shapes, the
//! centralized and simplified sample covariance matrices, and F-matrix pairs.

mod dump;
mod law;
mod sample;
mod shape;

pub use dump::{read_rmtm, write_rmtm, RMTM_VERSION_COMPLEX, RMTM_VERSION_REAL};
pub use law::EntryLaw;
pub use sample::{
    build_f_pair, centralized_cov, delta_matrix, draw_entries, hermitian_eigs, is_real, simplified_cov, FPair,
    MatrixSample,
};
pub(crate) use sample::{f_spectrum, hermitian_eigh};
pub use shape::PopulationShape;
