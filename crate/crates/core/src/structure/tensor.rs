use std::f64::consts::TAU;

use super::eigen::{eigen_decompose_2x2, Eigen2, Sym2};
use super::gaussian::gaussian_convolve;
use crate::error::Result;
use crate::grid::ScalarField;

/// One symmetric 2x2 tensor per pixel, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    height: usize,
    width: usize,
    data: Vec<Sym2>,
}

impl TensorField {
    pub fn zeros(height: usize, width: usize) -> Self {
        TensorField {
            height,
            width,
            data: vec![Sym2::ZERO; height * width],
        }
    }

    pub fn filled(height: usize, width: usize, t: Sym2) -> Self {
        TensorField {
            height,
            width,
            data: vec![t; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<Sym2>) -> Self {
        assert_eq!(data.len(), height * width, "tensor field size");
        TensorField {
            height,
            width,
            data,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Sym2 {
        self.data[i * self.width + j]
    }

    #[inline]
    pub fn at(&self, k: usize) -> Sym2 {
        self.data[k]
    }

    pub fn set(&mut self, i: usize, j: usize, t: Sym2) {
        self.data[i * self.width + j] = t;
    }

    pub fn as_slice(&self) -> &[Sym2] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Sym2] {
        &mut self.data
    }

    pub fn accumulate(&mut self, other: &TensorField) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
    }

    pub fn eigen(&self) -> Vec<Eigen2> {
        self.data.iter().map(|&t| eigen_decompose_2x2(t)).collect()
    }

    /// Leading eigenvalue per pixel.
    pub fn leading_eigenvalue(&self) -> ScalarField {
        let data = self
            .data
            .iter()
            .map(|&t| eigen_decompose_2x2(t).l1)
            .collect();
        ScalarField::new(self.height, self.width, data).expect("shape")
    }

    fn component(&self, f: impl Fn(&Sym2) -> f64) -> ScalarField {
        ScalarField::new(self.height, self.width, self.data.iter().map(f).collect()).expect("shape")
    }

    fn from_components(a11: ScalarField, a12: ScalarField, a22: ScalarField) -> Self {
        let data = a11
            .as_slice()
            .iter()
            .zip(a12.as_slice())
            .zip(a22.as_slice())
            .map(|((&a, &b), &c)| Sym2::new(a, b, c))
            .collect();
        TensorField {
            height: a11.height(),
            width: a11.width(),
            data,
        }
    }
}

/// Partial derivatives in the x-right/y-up frame: central differences inside,
/// one-sided at the borders.
pub fn gradient_xy(u: &ScalarField) -> (ScalarField, ScalarField) {
    let (h, w) = (u.height(), u.width());
    let gx = ScalarField::from_fn(h, w, |i, j| {
        if j == 0 {
            u.get(i, 1) - u.get(i, 0)
        } else if j == w - 1 {
            u.get(i, w - 1) - u.get(i, w - 2)
        } else {
            0.5 * (u.get(i, j + 1) - u.get(i, j - 1))
        }
    });
    // y points up, rows count down
    let gy = ScalarField::from_fn(h, w, |i, j| {
        if i == 0 {
            u.get(0, j) - u.get(1, j)
        } else if i == h - 1 {
            u.get(h - 2, j) - u.get(h - 1, j)
        } else {
            0.5 * (u.get(i - 1, j) - u.get(i + 1, j))
        }
    });
    (gx, gy)
}

/// `J_rho = K_rho * (grad u_sigma ⊗ grad u_sigma)`, componentwise.
pub fn structure_tensor(channel: &ScalarField, sigma: f64, rho: f64) -> Result<TensorField> {
    let smoothed = gaussian_convolve(channel, sigma)?;
    let (gx, gy) = gradient_xy(&smoothed);
    let j0 = TensorField::from_vec(
        channel.height(),
        channel.width(),
        gx.as_slice()
            .iter()
            .zip(gy.as_slice())
            .map(|(&x, &y)| Sym2::outer([x, y]))
            .collect(),
    );
    let a11 = gaussian_convolve(&j0.component(|t| t.a11), rho)?;
    let a12 = gaussian_convolve(&j0.component(|t| t.a12), rho)?;
    let a22 = gaussian_convolve(&j0.component(|t| t.a22), rho)?;
    Ok(TensorField::from_components(a11, a12, a22))
}

/// Pointwise stick encoding of a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    /// `l1 - l2`
    pub saliency: ScalarField,
    /// `l2`
    pub ballness: ScalarField,
    /// Angle of the structure (tangent) direction `e2`, in `[0, 2π)`, x-right/y-up.
    pub orientation: ScalarField,
}

/// Encodes the pointwise tensor `grad u_sigma ⊗ grad u_sigma`.
///
/// The tensor is rank one, so the ballness is exactly zero and the saliency is
/// the squared gradient norm. Flat pixels get the isotropic fallback axis
/// `e2 = (0, 1)`.
pub fn encode(channel: &ScalarField, sigma: f64) -> Result<Encoding> {
    let smoothed = gaussian_convolve(channel, sigma)?;
    let (gx, gy) = gradient_xy(&smoothed);
    let (h, w) = (channel.height(), channel.width());
    let mut saliency = Vec::with_capacity(h * w);
    let mut orientation = Vec::with_capacity(h * w);
    for (&x, &y) in gx.as_slice().iter().zip(gy.as_slice()) {
        let s = x * x + y * y;
        saliency.push(s);
        let angle = if s > 0.0 {
            x.atan2(-y)
        } else {
            std::f64::consts::FRAC_PI_2
        };
        orientation.push(angle.rem_euclid(TAU));
    }
    Ok(Encoding {
        saliency: ScalarField::new(h, w, saliency)?,
        ballness: ScalarField::filled(h, w, 0.0),
        orientation: ScalarField::new(h, w, orientation)?,
    })
}
