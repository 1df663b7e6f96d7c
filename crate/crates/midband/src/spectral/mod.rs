//! Essential-spectrum machinery: band predictions under disorder, windowed
//! plane-wave witnesses with plateau placement, and eigenvalue histograms.

mod dos;
mod prediction;
mod weyl;

pub use dos::{density_of_states, DosHistogram, DOS_MIN_BINS};
pub use prediction::{predict_essential_spectrum, SpectrumPrediction};
pub use weyl::{
    make_weyl_vector, max_feasible_window, place_weyl_window, weyl_residual_check, WeylVector,
};
