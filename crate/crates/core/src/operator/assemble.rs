use super::sparse::{SparseOperator, TripletBuilder};
use crate::anisotropy::{stencil_weights, StencilWeights, WeightField};
use crate::error::{OsmoseError, Result};
use crate::grid::{MaskField, ScalarField};
use crate::structure::Sym2;

/// Grid step `h` in pixel units.
pub const GRID_STEP: f64 = 1.0;

/// Drift sample along the edge `x -> x + e`:
/// `δ = 2 (v(x+e) - v(x)) / (h (v(x+e) + v(x)))`, zero when either end is masked.
///
/// `h δ` always lies in `(-2, 2)` for positive `v`.
pub fn edge_drift(
    v: &ScalarField,
    pixel: (usize, usize),
    offset: [i64; 2],
    mask: &MaskField,
) -> Result<f64> {
    let (h, w) = (v.height(), v.width());
    let (i, j) = pixel;
    let target = neighbour(i, j, offset, h, w);
    let Some((ti, tj)) = target.filter(|_| i < h && j < w) else {
        return Err(OsmoseError::invalid(format!(
            "edge from ({i}, {j}) along {offset:?} leaves the {h}x{w} grid"
        )));
    };
    Ok(drift_between(
        v.get(i, j),
        v.get(ti, tj),
        mask.get(i, j) || mask.get(ti, tj),
    ))
}

#[inline]
fn drift_between(vx: f64, vy: f64, masked: bool) -> f64 {
    if masked {
        0.0
    } else {
        2.0 * (vy - vx) / (GRID_STEP * (vy + vx))
    }
}

#[inline]
fn neighbour(i: usize, j: usize, offset: [i64; 2], h: usize, w: usize) -> Option<(usize, usize)> {
    let ti = i as i64 + offset[1];
    let tj = j as i64 + offset[0];
    if ti < 0 || tj < 0 || ti >= h as i64 || tj >= w as i64 {
        None
    } else {
        Some((ti as usize, tj as usize))
    }
}

/// Assembles the generator for guidance channel `v`, diffusion tensors `w`
/// and shadow-boundary mask.
///
/// Every pixel `x` contributes the six edges `x -> y = x ± e` of its stencil,
/// each with half the pair weight `c`, so that a homogeneous tensor gives
/// every undirected edge its full weight. Edges leaving the grid are dropped.
/// With drift `δ` along the edge:
///
/// ```text
/// A[x, y] += c (1/h² - δ/2h)    A[x, x] += c (-1/h² - δ/2h)
/// A[y, x] += c (1/h² + δ/2h)    A[y, y] += c (-1/h² + δ/2h)
/// ```
pub fn assemble(v: &ScalarField, w: &WeightField, mask: &MaskField) -> Result<SparseOperator> {
    let (h, wd) = (v.height(), v.width());
    if w.height() != h || w.width() != wd {
        return Err(OsmoseError::DimensionMismatch {
            expected: format!("{h}x{wd} weight field"),
            actual: format!("{}x{}", w.height(), w.width()),
        });
    }
    mask.check_shape(h, wd)?;
    for (k, &val) in v.as_slice().iter().enumerate() {
        if !val.is_finite() {
            return Err(OsmoseError::NonFinite { index: k });
        }
        if val <= 0.0 {
            return Err(OsmoseError::NonPositive {
                index: k,
                value: val,
            });
        }
    }

    let inv_h2 = 1.0 / (GRID_STEP * GRID_STEP);
    let half_inv_h = 0.5 / GRID_STEP;
    let mut triplets = TripletBuilder::with_capacity(h * wd, 24 * h * wd);
    // most pixels share the identity tensor
    let mut cached: Option<(Sym2, StencilWeights)> = None;
    for i in 0..h {
        for j in 0..wd {
            let tensor = w.get(i, j);
            let stencil = match cached {
                Some((t, s)) if t == tensor => s,
                _ => {
                    let s = stencil_weights(tensor).map_err(|e| e.at_stage("stencil"))?;
                    cached = Some((tensor, s));
                    s
                }
            };
            let x = i * wd + j;
            for (&[a, b], &c) in stencil.offsets.iter().zip(&stencil.weights) {
                if c == 0.0 {
                    continue;
                }
                let c = 0.5 * c;
                for offset in [[a, b], [-a, -b]] {
                    let Some((ti, tj)) = neighbour(i, j, offset, h, wd) else {
                        continue;
                    };
                    let y = ti * wd + tj;
                    let delta = drift_between(
                        v.get(i, j),
                        v.get(ti, tj),
                        mask.get(i, j) || mask.get(ti, tj),
                    );
                    let d = delta * half_inv_h;
                    triplets.push(x, y, c * (inv_h2 - d));
                    triplets.push(x, x, c * (-inv_h2 - d));
                    triplets.push(y, x, c * (inv_h2 + d));
                    triplets.push(y, y, c * (-inv_h2 + d));
                }
            }
        }
    }
    let mut a = triplets.build(h, wd);
    a.set_grid_step(GRID_STEP);
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::{build_weight_field, weight_tensor, CALIBRATED_CONVENTION};
    use crate::operator::validate_generator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn drift_samples() {
        let v = ScalarField::new(1, 2, vec![1.0, 2.0]).unwrap();
        let none = MaskField::empty(1, 2);
        assert!((edge_drift(&v, (0, 0), [1, 0], &none).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((edge_drift(&v, (0, 1), [-1, 0], &none).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        let c = ScalarField::filled(2, 2, 0.3);
        assert_eq!(
            edge_drift(&c, (0, 0), [1, 1], &MaskField::empty(2, 2)).unwrap(),
            0.0
        );
        let mut m = MaskField::empty(1, 2);
        m.set(0, 1, true);
        assert_eq!(edge_drift(&v, (0, 0), [1, 0], &m).unwrap(), 0.0);
        assert!(edge_drift(&v, (0, 1), [1, 0], &none).is_err());
    }

    #[test]
    fn pure_diffusion_on_three_by_three() {
        let v = ScalarField::filled(3, 3, 0.7);
        let a = assemble(&v, &WeightField::identity(3, 3), &MaskField::empty(3, 3)).unwrap();
        let centre = 4;
        assert_eq!(a.get(centre, centre), -4.0);
        for n in [1, 3, 5, 7] {
            assert_eq!(a.get(centre, n), 1.0);
        }
        for n in [0, 2, 6, 8] {
            assert_eq!(a.get(centre, n), 0.0);
        }
        assert_eq!(a.get(0, 0), -2.0);
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(0, 3), 1.0);
        assert_eq!(a.row(0).0.len(), 3);
        assert_eq!(a.get(1, 1), -3.0);
    }

    #[test]
    fn two_by_two_against_hand_assembly() {
        // v = ((1, 2), (1, 2)); pixels 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
        let v = ScalarField::new(2, 2, vec![1.0, 2.0, 1.0, 2.0]).unwrap();
        let a = assemble(&v, &WeightField::identity(2, 2), &MaskField::empty(2, 2)).unwrap();
        // horizontal edges: δ = 2/3 from the value-1 pixel to the value-2 pixel
        let d = (2.0 / 3.0) / 2.0;
        let mut oracle = [[0.0f64; 4]; 4];
        let mut edge = |x: usize, y: usize, delta_half: f64| {
            oracle[x][y] += 1.0 - delta_half;
            oracle[x][x] += -1.0 - delta_half;
            oracle[y][x] += 1.0 + delta_half;
            oracle[y][y] += -1.0 + delta_half;
        };
        edge(0, 1, d);
        edge(2, 3, d);
        edge(0, 2, 0.0);
        edge(1, 3, 0.0);
        for (r, row) in oracle.iter().enumerate() {
            for (c, &val) in row.iter().enumerate() {
                assert!((a.get(r, c) - val).abs() < 1e-15, "({r},{c})");
            }
        }
        assert!((a.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((a.get(1, 0) - 4.0 / 3.0).abs() < 1e-15);
        let av = a.matvec(v.as_slice());
        assert!(av.iter().all(|x| x.abs() < 1e-15));
    }

    fn random_case(
        rng: &mut ChaCha8Rng,
        h: usize,
        w: usize,
        eps: f64,
        masked: bool,
    ) -> (ScalarField, WeightField, MaskField) {
        let v = ScalarField::from_fn(h, w, |_, _| rng.random_range(0.05..1.0));
        let theta = ScalarField::from_fn(h, w, |_, _| rng.random_range(0.0..std::f64::consts::TAU));
        let mask = if masked {
            MaskField::from_fn(h, w, |_, _| rng.random_bool(0.3))
        } else {
            MaskField::empty(h, w)
        };
        let field_mask = MaskField::from_fn(h, w, |_, _| true);
        let wf = build_weight_field(&theta, eps, if masked { &mask } else { &field_mask }).unwrap();
        (v, wf, mask)
    }

    #[test]
    fn generator_properties_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for round in 0..24 {
            let eps = [1.0, 0.5, 0.05][round % 3];
            let masked = round % 2 == 0;
            let (h, w) = (rng.random_range(3..14), rng.random_range(3..14));
            let (v, wf, mask) = random_case(&mut rng, h, w, eps, masked);
            let a = assemble(&v, &wf, &mask).unwrap();
            let rep = validate_generator(&a);
            assert!(rep.max_abs_column_sum <= 1e-12 * rep.max_abs_entry, "{rep}");
            assert!(rep.min_off_diagonal >= 0.0, "{rep}");
            assert_eq!(rep.scc_count, 1, "{rep}");
            assert!(a.is_structurally_symmetric());
            if !masked {
                let av = a.matvec(v.as_slice());
                let norm_v = v.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
                let norm_av = av.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(
                    norm_av <= 1e-12 * a.norm1() * norm_v,
                    "kernel residual {norm_av}"
                );
            }
        }
    }

    #[test]
    fn smooth_strongly_anisotropic_fields_are_irreducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for round in 0..12 {
            let (h, w) = (rng.random_range(4..20), rng.random_range(4..20));
            let phase = rng.random_range(0.0..std::f64::consts::PI);
            let rate = 0.15 * round as f64 / 12.0;
            let theta = ScalarField::from_fn(h, w, |i, j| phase + rate * (i + 2 * j) as f64);
            let v = ScalarField::from_fn(h, w, |_, _| rng.random_range(0.05..1.0));
            let mask = MaskField::from_fn(h, w, |i, _| i >= h / 3 && i < h / 3 + 3);
            for eps in [0.1, 0.05, 0.02] {
                let wf = build_weight_field(&theta, eps, &mask).unwrap();
                let rep = validate_generator(&assemble(&v, &wf, &mask).unwrap());
                assert!(rep.satisfies_hypotheses(), "{rep}");
            }
        }
    }

    #[test]
    fn isotropic_rows_are_classical_osmosis() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = ScalarField::from_fn(5, 5, |_, _| rng.random_range(0.2..1.0));
        let a = assemble(&v, &WeightField::identity(5, 5), &MaskField::empty(5, 5)).unwrap();
        let (i, j) = (2, 2);
        let x = i * 5 + j;
        let mut diag = 0.0;
        for (di, dj) in [(0i64, 1i64), (0, -1), (1, 0), (-1, 0)] {
            let y = ((i as i64 + di) * 5 + j as i64 + dj) as usize;
            let delta =
                2.0 * (v.as_slice()[y] - v.as_slice()[x]) / (v.as_slice()[y] + v.as_slice()[x]);
            assert!((a.get(x, y) - (1.0 - delta / 2.0)).abs() < 1e-14);
            diag += -1.0 - delta / 2.0;
        }
        assert!((a.get(x, x) - diag).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_guidance_is_rejected() {
        let v = ScalarField::new(2, 2, vec![1.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            assemble(&v, &WeightField::identity(2, 2), &MaskField::empty(2, 2)),
            Err(OsmoseError::NonPositive { index: 1, .. })
        ));
        let bad = WeightField::from_tensors(1, 1, vec![Sym2::new(1.0, 2.0, 1.0)]);
        assert!(bad.is_err());
    }

    #[test]
    fn anisotropic_stencil_interior_row() {
        let theta = 4.0 * std::f64::consts::PI / 3.0;
        let t = weight_tensor(theta, 0.5, CALIBRATED_CONVENTION);
        let wf = WeightField::from_tensors(5, 5, vec![t; 25]).unwrap();
        let v = ScalarField::filled(5, 5, 1.0);
        let a = assemble(&v, &wf, &MaskField::empty(5, 5)).unwrap();
        let st = stencil_weights(t).unwrap();
        let centre = 12;
        let total: f64 = st.weights.iter().sum();
        assert!((a.get(centre, centre) + 2.0 * total).abs() < 1e-14);
    }
}
