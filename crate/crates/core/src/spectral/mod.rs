//! Real and complex `N×N×C` tensors and the channel-wise orthonormal 2-D DFT.
//!
//! Layout: values are stored channel-outermost, then row-major within each
//! channel, so bin `(i, j)` of channel `k` lives at `(k * N + i) * N + j`.
//! Complex values are interleaved `(re, im)` per bin.
//!
//! The forward and inverse transforms are each scaled by `1/N`, which makes
//! the DFT matrix unitary: Parseval holds without extra factors and the
//! largest singular value of the transform is exactly one.

mod fft;
mod io;
mod tensor;

pub use fft::{fft2_channels, fft2_complex, ifft2_channels, ifft2_complex, IMAG_RESIDUE_LIMIT};
pub use io::{read_tensor, StoredTensor, DCFT_MAGIC, DCFT_VERSION};
pub use tensor::{FeatureTensor, SpectrumTensor};

pub use num_complex::Complex64;
