//! Local structure orientation: Gaussian smoothing, structure tensors and
//! multi-scale stick voting that ignores the false edges of a shadow boundary.
//!
//! Tensors in this module are expressed in the x-right/y-up frame
//! (`x = j`, `y = -i`). [`estimate_directions`] converts its final angle to
//! the image frame (`x = j`, `y = i`).

mod eigen;
mod gaussian;
mod tensor;
mod voting;

pub use eigen::{eigen_decompose_2x2, Eigen2, Sym2};
pub use gaussian::{gaussian_convolve, gaussian_kernel};
pub use tensor::{encode, gradient_xy, structure_tensor, Encoding, TensorField};
pub use voting::{
    estimate_directions, orientation_bin, stick_vote, vote_accumulator, xy_to_ij, StickVoter,
    ORIENTATION_BINS,
};
