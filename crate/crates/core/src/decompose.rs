//! Simultaneous convex decomposition of a tuple of distributions into
//! "simple" tuples: at least `n-1` components constant, the remaining one
//! supported on at most two values, every term preserving the sum of the
//! component expectations.

use num_traits::{One, Signed, Zero};

use crate::dist::{rat_int, Dist, Rat};

/// A tuple of distributions in which at least `n-1` components are point
/// masses and the remaining component takes at most two values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleTuple {
    dists: Vec<Dist>,
}

impl SimpleTuple {
    pub fn components(&self) -> &[Dist] {
        &self.dists
    }

    /// Sum of the component expectations.
    pub fn mean_sum(&self) -> Rat {
        self.dists.iter().map(Dist::mean).sum()
    }

    fn is_simple(&self) -> bool {
        let mut wide = 0;
        for d in &self.dists {
            match d.support().len() {
                0 | 1 => {}
                2 => wide += 1,
                _ => return false,
            }
        }
        wide <= 1
    }
}

/// Convex combination of simple tuples recombining exactly to the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    terms: Vec<(Rat, SimpleTuple)>,
    expect_sum: Rat,
}

impl Decomposition {
    pub fn terms(&self) -> &[(Rat, SimpleTuple)] {
        &self.terms
    }

    pub fn expect_sum(&self) -> &Rat {
        &self.expect_sum
    }
}

/// Decomposes `dists` into a convex combination of simple tuples, preserving
/// the sum of expectations term by term and recombining exactly.
///
/// Every input decomposes; the term count is at most the total support size
/// of the inputs. Panics if `dists` is empty or the alphabets differ.
pub fn simple_decompose(dists: &[Dist]) -> Decomposition {
    let n = dists.len();
    assert!(n >= 1, "cannot decompose an empty tuple");
    let p = dists[0].p();
    assert!(
        dists.iter().all(|d| d.p() == p),
        "decompose requires a common alphabet"
    );

    let expect_sum: Rat = dists.iter().map(Dist::mean).sum();
    let total_support: usize = dists.iter().map(|d| d.support().len()).sum();

    let mut work: Vec<Vec<Rat>> = dists.iter().map(|d| d.masses().to_vec()).collect();
    let mut remaining = Rat::one();
    let mut terms: Vec<(Rat, SimpleTuple)> = Vec::new();

    for _round in 0..total_support {
        let (tuple, peel) = peel_once(&work, &expect_sum, p);
        if peel.is_one() {
            // The working tuple is itself simple; emit it and stop.
            terms.push((remaining, tuple));
            let dec = Decomposition { terms, expect_sum };
            debug_assert!(verify_decomposition(dists, &dec));
            return dec;
        }
        let keep = Rat::one() - &peel;
        for (row, t) in work.iter_mut().zip(tuple.components()) {
            for (cell, tm) in row.iter_mut().zip(t.masses()) {
                *cell = (&*cell - &peel * tm) / &keep;
            }
        }
        terms.push((&remaining * &peel, tuple));
        remaining *= keep;
    }
    unreachable!("each peel removes a support cell; termination is bounded by total support");
}

/// Builds the next simple tuple: scan for the pivot component whose span
/// brackets the expectation sum, fix every other component at its support
/// max (before the pivot) or min (after), and solve the pivot's two weights
/// from the expectation equation. Returns the tuple and the largest weight
/// it can be peeled with.
fn peel_once(work: &[Vec<Rat>], expect_sum: &Rat, p: usize) -> (SimpleTuple, Rat) {
    let n = work.len();
    let spans: Vec<(usize, usize)> = work
        .iter()
        .map(|row| {
            let lo = row.iter().position(|m| m.is_positive()).expect("mass left");
            let hi = row.iter().rposition(|m| m.is_positive()).unwrap();
            (lo, hi)
        })
        .collect();

    let mut low_sum: Rat = spans.iter().map(|&(lo, _)| rat_int(lo as i64)).sum();
    let mut pivot = None;
    for (k, &(lo, hi)) in spans.iter().enumerate() {
        let high_sum = &low_sum + rat_int((hi - lo) as i64);
        if low_sum <= *expect_sum && *expect_sum <= high_sum {
            pivot = Some((k, expect_sum - &low_sum + rat_int(lo as i64)));
            break;
        }
        low_sum = high_sum;
    }
    let (k, target) = pivot.expect("expectation sum lies within the support hull");

    let mut tuple = Vec::with_capacity(n);
    for (i, &(lo, hi)) in spans.iter().enumerate() {
        if i < k {
            tuple.push(Dist::point(p, hi));
        } else if i > k {
            tuple.push(Dist::point(p, lo));
        } else {
            tuple.push(two_valued(p, lo, hi, &target));
        }
    }

    // Largest weight keeping every residual mass non-negative.
    let mut peel: Option<Rat> = None;
    for (row, t) in work.iter().zip(&tuple) {
        for (cell, tm) in row.iter().zip(t.masses()) {
            if tm.is_positive() {
                let ratio = cell / tm;
                if peel.as_ref().is_none_or(|best| ratio < *best) {
                    peel = Some(ratio);
                }
            }
        }
    }
    let peel = peel.expect("tuple has support");
    debug_assert!(peel.is_positive() && peel <= Rat::one());
    (SimpleTuple { dists: tuple }, peel)
}

/// Point mass when `target` hits an endpoint (or the span is a single cell),
/// otherwise the two-valued distribution on `{lo, hi}` with mean `target`.
fn two_valued(p: usize, lo: usize, hi: usize, target: &Rat) -> Dist {
    if lo == hi {
        return Dist::point(p, lo);
    }
    let (lo_r, hi_r) = (rat_int(lo as i64), rat_int(hi as i64));
    let w_hi = (target - &lo_r) / (&hi_r - &lo_r);
    if w_hi.is_zero() {
        return Dist::point(p, lo);
    }
    if w_hi.is_one() {
        return Dist::point(p, hi);
    }
    let mut mass = vec![Rat::zero(); p];
    mass[lo] = Rat::one() - &w_hi;
    mass[hi] = w_hi;
    Dist::new(p, mass).expect("two-valued masses are a distribution")
}

/// True iff `dec` is a valid decomposition of `dists`: positive weights
/// summing to one, simple terms on the right alphabet, every term's
/// expectation sum equal to the input's, and exact recombination.
pub fn verify_decomposition(dists: &[Dist], dec: &Decomposition) -> bool {
    let n = dists.len();
    if n == 0 || dec.terms.is_empty() {
        return false;
    }
    let p = dists[0].p();
    if dists.iter().any(|d| d.p() != p) {
        return false;
    }
    if dec.expect_sum != dists.iter().map(Dist::mean).sum::<Rat>() {
        return false;
    }
    let mut weight_total = Rat::zero();
    let mut recombined = vec![vec![Rat::zero(); p]; n];
    for (w, tuple) in &dec.terms {
        if !w.is_positive() {
            return false;
        }
        if tuple.dists.len() != n || tuple.dists.iter().any(|d| d.p() != p) {
            return false;
        }
        if !tuple.is_simple() {
            return false;
        }
        if tuple.mean_sum() != dec.expect_sum {
            return false;
        }
        weight_total += w;
        for (acc, d) in recombined.iter_mut().zip(&tuple.dists) {
            for (cell, m) in acc.iter_mut().zip(d.masses()) {
                *cell += w * m;
            }
        }
    }
    if !weight_total.is_one() {
        return false;
    }
    recombined
        .iter()
        .zip(dists)
        .all(|(acc, d)| acc.as_slice() == d.masses())
}
