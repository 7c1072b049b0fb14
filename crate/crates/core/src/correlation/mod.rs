//! Exact pair correlations and the spectral classification built on them.
//!
//! Pairs of letters are indexed lexicographically in alphabet order
//! (`AA, AB, …, DD` for `ABCD`), so a pair-indexed vector has `d²` entries
//! and can be read as a `d × d` matrix in row-major order.

mod decomposition;
mod sigma;
mod spectrum;
mod weights;

pub use decomposition::{ergodic_decomposition, BiSubstitution, BisubstDecomposition};
pub use sigma::{renormalize, sigma_hat, CorrVector, CorrelationTable, PairCountOracle};
pub use spectrum::{
    autocorrelation, classify_spectrum, classify_spectrum_weighted, ray_fourier_coeff,
    CorrelationCertificate, RayReport, SpectralReport, Verdict, WeightedReport,
};
pub use weights::{build_v, semipositivity, Endpoint, ExtremeRay, Semipositivity, WeightMatrixV};

use crate::exact::Q;
use num_traits::Zero;

pub(crate) fn dot(a: &[Q], b: &[Q]) -> Q {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Q::zero(), |acc, (x, y)| acc + x * y)
}
