//! Hypervolume indicator with a shifted reference point.
//!
//! The exact algorithm is a recursive dimension sweep: sort by the last
//! objective, peel slabs, recurse on `q − 1`, with a closed-form strip sum at
//! `q = 2`. Sums are compensated so that trace-level comparisons of nearby
//! hypervolumes stay meaningful. A seeded Monte Carlo estimator serves as an
//! independent cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::ObjectiveVector;

/// The corner `ρ` closing the dominated region; it must be strictly worse
/// than every objective vector it is used with.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint {
    rho: ObjectiveVector,
}

impl ReferencePoint {
    /// Wraps an explicit reference vector.
    pub fn from_vector(rho: ObjectiveVector) -> Self {
        Self { rho }
    }

    pub fn values(&self) -> &[f64] {
        self.rho.values()
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

/// Builds `ρ = observed_max + s·𝟏`; `s` must be strictly positive.
pub fn make_reference(observed_max: &ObjectiveVector, s: f64) -> Result<ReferencePoint> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Config(format!(
            "reference-point offset s must be strictly positive, got {s}"
        )));
    }
    let rho = ObjectiveVector::new(observed_max.values().iter().map(|v| v + s).collect())?;
    Ok(ReferencePoint::from_vector(rho))
}

/// Compensated accumulator for sums of box volumes.
#[derive(Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

fn check_dims(front: &[ObjectiveVector], rho: &ReferencePoint) -> Result<()> {
    for v in front {
        if v.len() != rho.len() {
            return Err(Error::Config(format!(
                "front member has {} objectives, reference point has {}",
                v.len(),
                rho.len()
            )));
        }
    }
    Ok(())
}

/// Volume of `⋃_{a ∈ front} [a, ρ]`; zero for an empty front. Every front
/// member must be strictly below `ρ` in all coordinates.
pub fn hypervolume(front: &[ObjectiveVector], rho: &ReferencePoint) -> Result<f64> {
    check_dims(front, rho)?;
    for v in front {
        if v.values().iter().zip(rho.values()).any(|(a, r)| a >= r) {
            return Err(Error::Reference(format!(
                "front member {:?} is not strictly below the reference point {:?}",
                v.values(),
                rho.values()
            )));
        }
    }
    let pts: Vec<Vec<f64>> = front.iter().map(|v| v.values().to_vec()).collect();
    Ok(hv_rec(pts, rho.values()))
}

/// Like [`hypervolume`] but members at or above `ρ` in some coordinate are
/// clipped to `ρ` (contributing only their remaining box, possibly nothing)
/// instead of erroring. Returns the volume and the number of clipped members.
pub fn hypervolume_clipped(front: &[ObjectiveVector], rho: &ReferencePoint) -> Result<(f64, u64)> {
    check_dims(front, rho)?;
    let mut clipped = 0u64;
    let pts: Vec<Vec<f64>> = front
        .iter()
        .map(|v| {
            let mut p = v.values().to_vec();
            let mut hit = false;
            for (c, r) in p.iter_mut().zip(rho.values()) {
                if *c > *r {
                    *c = *r;
                    hit = true;
                }
            }
            if hit {
                clipped += 1;
            }
            p
        })
        .collect();
    Ok((hv_rec(pts, rho.values()), clipped))
}

/// `HI(front ∪ {y}) − HI(front)`, computed as the exclusive contribution of
/// `y`: the volume of `[y, ρ]` minus the part already covered by the front.
/// Exactly zero when some front member weakly dominates `y`, and strictly
/// positive otherwise.
pub fn hv_increase(
    front: &[ObjectiveVector],
    y: &ObjectiveVector,
    rho: &ReferencePoint,
) -> Result<f64> {
    check_dims(front, rho)?;
    if y.len() != rho.len() {
        return Err(Error::Config(format!(
            "candidate has {} objectives, reference point has {}",
            y.len(),
            rho.len()
        )));
    }
    for v in front.iter().chain(std::iter::once(y)) {
        if v.values().iter().zip(rho.values()).any(|(a, r)| a >= r) {
            return Err(Error::Reference(format!(
                "point {:?} is not strictly below the reference point {:?}",
                v.values(),
                rho.values()
            )));
        }
    }
    let weakly_dominated = front.iter().any(|a| {
        a.values()
            .iter()
            .zip(y.values())
            .all(|(ai, yi)| ai <= yi)
    });
    if weakly_dominated {
        return Ok(0.0);
    }
    let mut own_box = 1.0;
    for (yi, r) in y.values().iter().zip(rho.values()) {
        own_box *= r - yi;
    }
    // [a, ρ] ∩ [y, ρ] = [max(a, y), ρ]
    let limited: Vec<Vec<f64>> = front
        .iter()
        .map(|a| {
            a.values()
                .iter()
                .zip(y.values())
                .map(|(ai, yi)| ai.max(*yi))
                .collect()
        })
        .collect();
    Ok(own_box - hv_rec(limited, rho.values()))
}

fn hv_rec(pts: Vec<Vec<f64>>, rho: &[f64]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    let q = rho.len();
    match q {
        1 => {
            let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            rho[0] - lo
        }
        2 => hv_2d(pts, rho),
        _ => {
            let mut pts = pts;
            pts.sort_by(|a, b| a[q - 1].partial_cmp(&b[q - 1]).unwrap());
            let mut total = KahanSum::default();
            for i in 0..pts.len() {
                let z_lo = pts[i][q - 1];
                let z_hi = if i + 1 < pts.len() {
                    pts[i + 1][q - 1]
                } else {
                    rho[q - 1]
                };
                if z_hi > z_lo {
                    // Every point at or below this slab, projected on q−1 dims.
                    let slab: Vec<Vec<f64>> =
                        pts[..=i].iter().map(|p| p[..q - 1].to_vec()).collect();
                    total.add(hv_rec(slab, &rho[..q - 1]) * (z_hi - z_lo));
                }
            }
            total.value()
        }
    }
}

fn hv_2d(mut pts: Vec<Vec<f64>>, rho: &[f64]) -> f64 {
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap()
            .then(a[1].partial_cmp(&b[1]).unwrap())
    });
    let mut total = KahanSum::default();
    let mut upper = rho[1];
    for p in pts {
        if p[1] < upper {
            total.add((rho[0] - p[0]) * (upper - p[1]));
            upper = p[1];
        }
    }
    total.value()
}

/// Monte Carlo estimate of the hypervolume by uniform sampling in
/// `[lower, ρ]`, counting draws covered by some front member's box.
/// Deterministic for a fixed seed.
pub fn hypervolume_mc(
    front: &[ObjectiveVector],
    rho: &ReferencePoint,
    lower: &ObjectiveVector,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    check_dims(front, rho)?;
    if samples == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    if lower.len() != rho.len() {
        return Err(Error::Config(format!(
            "lower corner has {} objectives, reference point has {}",
            lower.len(),
            rho.len()
        )));
    }
    let mut box_vol = 1.0;
    for (lo, r) in lower.values().iter().zip(rho.values()) {
        if lo >= r {
            return Err(Error::Config(format!(
                "degenerate sampling box: lower {:?} not strictly below rho {:?}",
                lower.values(),
                rho.values()
            )));
        }
        box_vol *= r - lo;
    }
    for v in front {
        if v.values().iter().zip(lower.values()).any(|(a, lo)| a < lo) {
            return Err(Error::Config(format!(
                "front member {:?} lies below the sampling box corner {:?}",
                v.values(),
                lower.values()
            )));
        }
    }
    if front.is_empty() {
        return Ok(0.0);
    }
    let q = rho.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = vec![0.0f64; q];
    let mut hits = 0usize;
    for _ in 0..samples {
        for (w, (lo, r)) in draw
            .iter_mut()
            .zip(lower.values().iter().zip(rho.values()))
        {
            let u: f64 = rng.random();
            *w = lo + u * (r - lo);
        }
        let dominated = front
            .iter()
            .any(|a| a.values().iter().zip(&draw).all(|(ai, wi)| ai <= wi));
        if dominated {
            hits += 1;
        }
    }
    Ok(box_vol * hits as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(values: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(values.to_vec()).unwrap()
    }

    fn rp(values: &[f64]) -> ReferencePoint {
        ReferencePoint::from_vector(obj(values))
    }

    #[test]
    fn unit_box() {
        let hv = hypervolume(&[obj(&[0.0, 0.0])], &rp(&[1.0, 1.0])).unwrap();
        assert_eq!(hv, 1.0);
    }

    #[test]
    fn single_point_golden_value() {
        // HI({(1, 1/2)}) with rho = (49, 25/18) is 48 * 16/18 = 128/3.
        let hv = hypervolume(&[obj(&[1.0, 0.5])], &rp(&[49.0, 25.0 / 18.0])).unwrap();
        assert!((hv - 128.0 / 3.0).abs() < 1e-12, "got {hv}");
    }

    #[test]
    fn two_boxes_inclusion_exclusion() {
        // 0.5 + 0.5 - 0.25
        let front = [obj(&[0.0, 0.5]), obj(&[0.5, 0.0])];
        let hv = hypervolume(&front, &rp(&[1.0, 1.0])).unwrap();
        assert!((hv - 0.75).abs() < 1e-15, "got {hv}");
    }

    #[test]
    fn empty_front_has_zero_volume() {
        assert_eq!(hypervolume(&[], &rp(&[1.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn three_dimensional_union() {
        // [0,1]^2 x [0.5,1] plus [0.5,1]^2 x [0,1]: 0.5 + 0.25 - 0.125
        let front = [obj(&[0.0, 0.0, 0.5]), obj(&[0.5, 0.5, 0.0])];
        let hv = hypervolume(&front, &rp(&[1.0, 1.0, 1.0])).unwrap();
        assert!((hv - 0.625).abs() < 1e-15, "got {hv}");
    }

    #[test]
    fn dominated_members_do_not_change_volume() {
        let rho = rp(&[1.0, 1.0]);
        let base = hypervolume(&[obj(&[0.3, 0.5]), obj(&[0.6, 0.2])], &rho).unwrap();
        let with_dominated = hypervolume(
            &[obj(&[0.3, 0.5]), obj(&[0.6, 0.2]), obj(&[0.8, 0.7])],
            &rho,
        )
        .unwrap();
        assert_eq!(base, with_dominated);
    }

    #[test]
    fn member_at_reference_point_is_an_error() {
        let err = hypervolume(&[obj(&[1.0, 0.5])], &rp(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::Reference(_)));
    }

    #[test]
    fn clipped_variant_counts_and_zeroes_offending_members() {
        let rho = rp(&[1.0, 1.0]);
        let (hv, clips) =
            hypervolume_clipped(&[obj(&[0.0, 0.0]), obj(&[2.0, 0.5])], &rho).unwrap();
        assert_eq!(clips, 1);
        assert_eq!(hv, 1.0);
    }

    #[test]
    fn increase_golden_value() {
        // Adding (0, 16/18) to {(1, 1/2)} gains exactly 1/2.
        let rho = rp(&[49.0, 25.0 / 18.0]);
        let inc = hv_increase(&[obj(&[1.0, 0.5])], &obj(&[0.0, 16.0 / 18.0]), &rho).unwrap();
        assert!((inc - 0.5).abs() < 1e-12, "got {inc}");
    }

    #[test]
    fn duplicate_candidate_adds_nothing() {
        let rho = rp(&[2.0, 2.0]);
        let front = [obj(&[1.0, 0.5]), obj(&[0.2, 1.4])];
        assert_eq!(hv_increase(&front, &obj(&[1.0, 0.5]), &rho).unwrap(), 0.0);
        // Weakly dominated candidates add nothing either.
        assert_eq!(hv_increase(&front, &obj(&[1.5, 0.5]), &rho).unwrap(), 0.0);
    }

    #[test]
    fn increase_matches_difference_of_full_evaluations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = rp(&[2.0, 2.0]);
        for _ in 0..200 {
            let front: Vec<ObjectiveVector> = (0..8)
                .map(|_| obj(&[rng.random::<f64>(), rng.random::<f64>()]))
                .collect();
            let y = obj(&[rng.random::<f64>(), rng.random::<f64>()]);
            let fast = hv_increase(&front, &y, &rho).unwrap();
            let mut extended = front.clone();
            extended.push(y);
            let slow =
                hypervolume(&extended, &rho).unwrap() - hypervolume(&front, &rho).unwrap();
            assert!(
                (fast - slow).abs() < 1e-12,
                "contribution {fast} vs difference {slow}"
            );
        }
    }

    #[test]
    fn monte_carlo_covers_whole_box() {
        let est = hypervolume_mc(
            &[obj(&[0.0, 0.0])],
            &rp(&[1.0, 1.0]),
            &obj(&[0.0, 0.0]),
            1_000_000,
            42,
        )
        .unwrap();
        assert!((est - 1.0).abs() <= 0.005, "got {est}");
    }

    #[test]
    fn monte_carlo_empty_front() {
        let est = hypervolume_mc(&[], &rp(&[1.0, 1.0]), &obj(&[0.0, 0.0]), 10, 0).unwrap();
        assert_eq!(est, 0.0);
    }

    #[test]
    fn monte_carlo_close_to_exact_golden() {
        let rho = rp(&[49.0, 25.0 / 18.0]);
        let est = hypervolume_mc(
            &[obj(&[1.0, 0.5])],
            &rho,
            &obj(&[0.0, 0.0]),
            1_000_000,
            3,
        )
        .unwrap();
        let exact = 128.0 / 3.0;
        assert!(
            (est - exact).abs() / exact <= 0.02,
            "estimate {est} vs exact {exact}"
        );
    }

    #[test]
    fn monte_carlo_is_deterministic_for_a_seed() {
        let rho = rp(&[2.0, 2.0]);
        let front = [obj(&[0.5, 1.0]), obj(&[1.0, 0.5])];
        let lower = obj(&[0.0, 0.0]);
        let a = hypervolume_mc(&front, &rho, &lower, 10_000, 11).unwrap();
        let b = hypervolume_mc(&front, &rho, &lower, 10_000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_sampling_box_is_an_error() {
        let err = hypervolume_mc(&[], &rp(&[1.0, 1.0]), &obj(&[1.0, 0.0]), 10, 0).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn reference_construction() {
        let r = make_reference(&obj(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(r.values(), &[1.0, 1.0]);
        assert!(make_reference(&obj(&[49.0, 25.0 / 18.0]), 0.0).is_err());
        assert!(make_reference(&obj(&[0.0]), -1.0).is_err());
    }

    #[test]
    fn permutation_invariance() {
        let rho = rp(&[2.0, 2.0, 2.0]);
        let a = obj(&[0.1, 1.2, 0.7]);
        let b = obj(&[0.9, 0.3, 1.1]);
        let c = obj(&[1.4, 0.8, 0.2]);
        let orders: [Vec<ObjectiveVector>; 3] = [
            vec![a.clone(), b.clone(), c.clone()],
            vec![c.clone(), a.clone(), b.clone()],
            vec![b, c, a],
        ];
        let values: Vec<f64> = orders
            .iter()
            .map(|f| hypervolume(f, &rho).unwrap())
            .collect();
        assert!((values[0] - values[1]).abs() < 1e-14);
        assert!((values[0] - values[2]).abs() < 1e-14);
    }
}
