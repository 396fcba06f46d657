//! Per-pixel diffusion tensors and their nonnegative lattice stencils.
//!
//! A stencil is obtained by Selling reduction: the superbase `(e0, e1, e2)`
//! is driven until it is W-obtuse, and its rotated vectors `f_i = e_i^⊥`
//! become the stencil offsets with weights
//! `c_i = -<f_{i+1}^⊥, W f_{i+2}^⊥> = -<e_{i+1}, W e_{i+2}> >= 0`,
//! so that `W = Σ c_i f_i f_iᵀ`.
//!
//! Vectors here live in the image frame: `x` is the column, `y` the row
//! (pointing down). An offset `[dx, dy]` connects pixel `(i, j)` with
//! `(i + dy, j + dx)`.

use crate::error::{OsmoseError, Result};
use crate::grid::{MaskField, ScalarField};
use crate::structure::{eigen_decompose_2x2, Sym2};

/// Iteration guard for the reduction loop.
const MAX_SELLING_STEPS: usize = 1000;

/// Which eigenvector of `W` the orientation angle θ names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleConvention {
    /// `(cos θ, sin θ)` carries the small eigenvalue ε: θ is the normal of the
    /// structure, diffusion runs across θ.
    AngleIsWeak,
    /// `(cos θ, sin θ)` carries the eigenvalue 1: θ is the structure tangent.
    AngleIsStrong,
}

/// Convention fixed by matching the published AD-LBR reference stencils
/// (see the `table_stencils` tests).
pub const CALIBRATED_CONVENTION: AngleConvention = AngleConvention::AngleIsWeak;

/// `W = ε a⊗a + b⊗b` (or with the roles swapped) for the unit vector `a` at angle θ.
pub fn weight_tensor(theta: f64, epsilon: f64, convention: AngleConvention) -> Sym2 {
    let (s, c) = theta.sin_cos();
    let a = [c, s];
    let b = [-s, c];
    match convention {
        AngleConvention::AngleIsWeak => Sym2::outer(a) * epsilon + Sym2::outer(b),
        AngleConvention::AngleIsStrong => Sym2::outer(b) * epsilon + Sym2::outer(a),
    }
}

/// Diffusion tensor per pixel: identity off the mask, anisotropic on it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    height: usize,
    width: usize,
    epsilon: f64,
    data: Vec<Sym2>,
}

impl WeightField {
    pub fn identity(height: usize, width: usize) -> Self {
        WeightField {
            height,
            width,
            epsilon: 1.0,
            data: vec![Sym2::IDENTITY; height * width],
        }
    }

    /// Arbitrary tensors; each must be symmetric positive definite.
    pub fn from_tensors(height: usize, width: usize, data: Vec<Sym2>) -> Result<Self> {
        if data.len() != height * width {
            return Err(OsmoseError::DimensionMismatch {
                expected: format!("{} tensors", height * width),
                actual: format!("{} tensors", data.len()),
            });
        }
        let mut floor = f64::INFINITY;
        for (k, t) in data.iter().enumerate() {
            check_positive_definite(*t).map_err(|e| match e {
                OsmoseError::NotPositiveDefinite(m) => {
                    OsmoseError::NotPositiveDefinite(format!("pixel {k}: {m}"))
                }
                other => other,
            })?;
            floor = floor.min(eigen_decompose_2x2(*t).l2);
        }
        Ok(WeightField {
            height,
            width,
            epsilon: floor,
            data,
        })
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// Smallest eigenvalue used on the mask.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Sym2 {
        self.data[i * self.width + j]
    }

    #[inline]
    pub fn at(&self, k: usize) -> Sym2 {
        self.data[k]
    }

    pub fn as_slice(&self) -> &[Sym2] {
        &self.data
    }
}

/// Builds `W`: identity where the mask is clear, `ε a⊗a + b⊗b` on the mask with
/// `a = (cos θ, sin θ)` in the image frame.
pub fn build_weight_field(
    theta: &ScalarField,
    epsilon: f64,
    mask: &MaskField,
) -> Result<WeightField> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(OsmoseError::invalid(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    mask.check_shape(theta.height(), theta.width())?;
    let data = theta
        .as_slice()
        .iter()
        .zip(mask.as_slice())
        .map(|(&th, &m)| {
            if m {
                weight_tensor(th, epsilon, CALIBRATED_CONVENTION)
            } else {
                Sym2::IDENTITY
            }
        })
        .collect();
    Ok(WeightField {
        height: theta.height(),
        width: theta.width(),
        epsilon,
        data,
    })
}

/// Three integer vectors summing to zero, any two of which form a basis of Z².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Superbase {
    pub e: [[i64; 2]; 3],
}

impl Superbase {
    pub const CANONICAL: Superbase = Superbase {
        e: [[1, 0], [0, 1], [-1, -1]],
    };

    pub fn is_valid(&self) -> bool {
        let [a, b, c] = self.e;
        let sums_to_zero = a[0] + b[0] + c[0] == 0 && a[1] + b[1] + c[1] == 0;
        sums_to_zero && (b[0] * c[1] - b[1] * c[0]).abs() == 1
    }

    #[inline]
    pub fn vector(&self, i: usize) -> [f64; 2] {
        let v = self.e[i % 3];
        [v[0] as f64, v[1] as f64]
    }

    /// Largest `<e_i, W e_j>` over `i != j`.
    pub fn max_cross_product(&self, w: Sym2) -> f64 {
        (0..3)
            .map(|i| w.inner(self.vector(i), self.vector(i + 1)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains_up_to_sign(&self, v: [i64; 2]) -> bool {
        self.e.iter().any(|e| *e == v || *e == [-v[0], -v[1]])
    }
}

fn check_positive_definite(w: Sym2) -> Result<()> {
    if !w.is_finite() {
        return Err(OsmoseError::NotPositiveDefinite(
            "non-finite entries".into(),
        ));
    }
    if !(w.a11 > 0.0 && w.a22 > 0.0 && w.det() > 0.0) {
        return Err(OsmoseError::NotPositiveDefinite(format!(
            "[[{}, {}], [{}, {}]]",
            w.a11, w.a12, w.a12, w.a22
        )));
    }
    Ok(())
}

/// Selling reduction of the canonical superbase to a W-obtuse one.
pub fn selling_superbase(w: Sym2) -> Result<Superbase> {
    check_positive_definite(w)?;
    let tol = 1e-15 * w.trace();
    let mut sb = Superbase::CANONICAL;
    for _ in 0..MAX_SELLING_STEPS {
        let positive = (0..3)
            .flat_map(|i| ((i + 1)..3).map(move |j| (i, j)))
            .find(|&(i, j)| w.inner(sb.vector(i), sb.vector(j)) > tol);
        let Some((i, j)) = positive else {
            return Ok(sb);
        };
        let k = 3 - i - j;
        let (ei, ej) = (sb.e[i], sb.e[j]);
        sb.e[j] = [-ej[0], -ej[1]];
        sb.e[k] = [ej[0] - ei[0], ej[1] - ei[1]];
    }
    Err(OsmoseError::Reduction(format!(
        "no obtuse superbase after {MAX_SELLING_STEPS} steps"
    )))
}

/// Three stencil offsets with their full (undirected edge) weights.
///
/// The six-point stencil `±f_i` has half-weights `c_i / 2` on each direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilWeights {
    pub offsets: [[i64; 2]; 3],
    pub weights: [f64; 3],
}

impl StencilWeights {
    /// `Σ c_i f_i f_iᵀ`
    pub fn reconstruct(&self) -> Sym2 {
        self.offsets
            .iter()
            .zip(&self.weights)
            .fold(Sym2::ZERO, |acc, (f, &c)| {
                acc + Sym2::outer([f[0] as f64, f[1] as f64]) * c
            })
    }

    /// Largest |component| among the offsets.
    pub fn max_offset(&self) -> i64 {
        self.offsets
            .iter()
            .map(|f| f[0].abs().max(f[1].abs()))
            .max()
            .unwrap_or(0)
    }
}

#[inline]
fn perp(v: [i64; 2]) -> [i64; 2] {
    [-v[1], v[0]]
}

/// Nonnegative decomposition `W = Σ c_i f_i f_iᵀ` over a lattice superbase.
pub fn stencil_weights(w: Sym2) -> Result<StencilWeights> {
    let sb = selling_superbase(w)?;
    let clamp = 1e-14 * w.max_abs().max(1.0);
    let mut weights = [0.0; 3];
    for (i, c) in weights.iter_mut().enumerate() {
        let v = -w.inner(sb.vector(i + 1), sb.vector(i + 2));
        *c = if v >= 0.0 {
            v
        } else if v >= -clamp {
            0.0
        } else {
            return Err(OsmoseError::Reduction(format!(
                "negative stencil weight {v}"
            )));
        };
    }
    Ok(StencilWeights {
        offsets: [perp(sb.e[0]), perp(sb.e[1]), perp(sb.e[2])],
        weights,
    })
}

/// `κ = sqrt(λ_max / λ_min)`
pub fn anisotropy_ratio(w: Sym2) -> f64 {
    let e = eigen_decompose_2x2(w);
    (e.l1 / e.l2).sqrt()
}
