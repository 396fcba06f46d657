use crate::error::{OsmoseError, Result};
use crate::grid::ScalarField;

/// Sampled Gaussian truncated at `±ceil(4 sigma)` and normalised to unit mass.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma).ceil() as isize;
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|x| (-(x * x) as f64 * inv).exp())
        .collect();
    let mass: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= mass);
    k
}

/// Half-sample symmetric reflection of `idx` into `[0, n)`.
#[inline]
fn reflect(idx: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut r = idx.rem_euclid(period);
    if r >= n {
        r = period - 1 - r;
    }
    r as usize
}

/// Separable Gaussian blur with reflecting borders. `sigma = 0` is the identity.
pub fn gaussian_convolve(field: &ScalarField, sigma: f64) -> Result<ScalarField> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(OsmoseError::invalid(format!(
            "sigma must be >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(field.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let (h, w) = (field.height(), field.width());
    let src = field.as_slice();

    let mut tmp = vec![0.0; h * w];
    for i in 0..h {
        let row = &src[i * w..(i + 1) * w];
        for j in 0..w {
            let mut acc = 0.0;
            for (t, kv) in kernel.iter().enumerate() {
                acc += kv * row[reflect(j as isize + t as isize - r, w)];
            }
            tmp[i * w + j] = acc;
        }
    }
    let mut out = vec![0.0; h * w];
    for i in 0..h {
        for (t, kv) in kernel.iter().enumerate() {
            let ii = reflect(i as isize + t as isize - r, h);
            let srow = &tmp[ii * w..(ii + 1) * w];
            let orow = &mut out[i * w..(i + 1) * w];
            for (o, s) in orow.iter_mut().zip(srow) {
                *o += kv * s;
            }
        }
    }
    ScalarField::new(h, w, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_indices() {
        assert_eq!(reflect(-1, 5), 0);
        assert_eq!(reflect(-2, 5), 1);
        assert_eq!(reflect(5, 5), 4);
        assert_eq!(reflect(6, 5), 3);
        assert_eq!(reflect(12, 3), 0);
    }

    #[test]
    fn constant_field_is_invariant() {
        let f = ScalarField::filled(7, 9, 0.37);
        for sigma in [0.5, 1.0, 3.0, 10.0] {
            let g = gaussian_convolve(&f, sigma).unwrap();
            assert!(g.as_slice().iter().all(|v| (v - 0.37).abs() < 1e-14));
        }
    }

    #[test]
    fn zero_sigma_is_identity_and_negative_fails() {
        let f = ScalarField::from_fn(4, 5, |i, j| (i * 5 + j) as f64);
        assert_eq!(gaussian_convolve(&f, 0.0).unwrap(), f);
        assert!(gaussian_convolve(&f, -0.1).is_err());
    }

    #[test]
    fn centred_delta_matches_sampled_kernel() {
        let mut f = ScalarField::filled(21, 21, 0.0);
        f.set(10, 10, 1.0);
        let g = gaussian_convolve(&f, 1.0).unwrap();
        // oracle: 1 / (sum_{k=-4..4} exp(-k^2/2))^2
        let z: f64 = (-4..=4).map(|k: i32| (-(k * k) as f64 / 2.0).exp()).sum();
        let expected = 1.0 / (z * z);
        assert!((expected - 0.1592).abs() < 1e-3);
        assert!((g.get(10, 10) - expected).abs() < 1e-15);
        let mass: f64 = g.as_slice().iter().sum();
        assert!((mass - 1.0).abs() < 1e-14);
    }
}
