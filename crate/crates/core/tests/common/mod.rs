#![allow(dead_code)]

//! Shared instance generators for the integration suites.

use num_traits::{One, Signed, Zero};
use rand::Rng;

use trisum_core::dist::{mix, rat_int, uniform, Dist, Rat};

/// Random distribution on `{0..p-1}` with small-denominator masses.
pub fn random_dist<R: Rng>(rng: &mut R, p: usize) -> Dist {
    let mut weights: Vec<u64> = (0..p).map(|_| rng.random_range(0..=24)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[rng.random_range(0..p)] = 1;
    }
    normalize(p, &weights)
}

/// Random decreasing distribution: sorted rational samples.
pub fn random_decreasing<R: Rng>(rng: &mut R, p: usize) -> Dist {
    let mut weights: Vec<u64> = (0..p).map(|_| rng.random_range(0..=24)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    weights.sort_unstable_by(|a, b| b.cmp(a));
    normalize(p, &weights)
}

fn normalize(p: usize, weights: &[u64]) -> Dist {
    let total: u64 = weights.iter().sum();
    let total = rat_int(total as i64);
    let masses = weights
        .iter()
        .map(|&w| rat_int(w as i64) / &total)
        .collect();
    Dist::new(p, masses).expect("normalised weights form a distribution")
}

/// Adjusts the means of a decreasing triple to sum exactly to `target` by
/// blending components with the full-alphabet uniform (to raise) or the
/// point mass at zero (to lower). Blending preserves monotonicity and is
/// exact.
pub fn repair_mean_sum(ds: [Dist; 3], target: &Rat) -> [Dist; 3] {
    let p = ds[0].p();
    let mut out = ds;
    let mut diff = target - out.iter().map(Dist::mean).sum::<Rat>();
    if diff.is_positive() {
        let cap = rat_int(p as i64 - 1) / rat_int(2);
        for d in out.iter_mut() {
            if diff.is_zero() {
                break;
            }
            let headroom = &cap - d.mean();
            if !headroom.is_positive() {
                continue;
            }
            let delta = if diff < headroom {
                diff.clone()
            } else {
                headroom.clone()
            };
            let w = &delta / &headroom;
            *d = mix(&[(Rat::one() - &w, d.clone()), (w, uniform(p - 1))])
                .expect("blend weights are convex");
            diff -= delta;
        }
    } else if diff.is_negative() {
        let mut excess = -diff.clone();
        for d in out.iter_mut() {
            if excess.is_zero() {
                break;
            }
            let mean = d.mean();
            if !mean.is_positive() {
                continue;
            }
            let delta = if excess < mean {
                excess.clone()
            } else {
                mean.clone()
            };
            let w = &delta / &mean;
            *d = mix(&[(Rat::one() - &w, d.clone()), (w, Dist::point(p, 0))])
                .expect("blend weights are convex");
            excess -= delta;
        }
        diff = Rat::zero();
    }
    assert!(diff.is_zero(), "triple mean repair must land exactly");
    debug_assert_eq!(out.iter().map(Dist::mean).sum::<Rat>(), *target);
    out
}

/// Random decreasing triple with means summing exactly to `p - 1`.
pub fn random_valid_triple<R: Rng>(rng: &mut R, p: usize) -> [Dist; 3] {
    let raw = [
        random_decreasing(rng, p),
        random_decreasing(rng, p),
        random_decreasing(rng, p),
    ];
    repair_mean_sum(raw, &rat_int(p as i64 - 1))
}
