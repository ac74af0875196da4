//! Probability distributions on `{0..p-1}` with exact rational masses.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::real;

/// Exact rational scalar used for all probability masses and weights.
pub type Rat = BigRational;

/// Shorthand for a rational from two machine integers.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Requested number of correct decimal digits for real-valued outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionParam {
    digits: u32,
}

impl PrecisionParam {
    /// Panics if `digits` is zero.
    pub fn new(digits: u32) -> Self {
        assert!(digits >= 1, "precision must be at least one digit");
        PrecisionParam { digits }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `10^-digits` as an exact rational.
    pub fn tolerance(&self) -> Rat {
        real::pow10(-(self.digits as i64))
    }
}

impl Default for PrecisionParam {
    fn default() -> Self {
        PrecisionParam { digits: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("mass at index {0} is negative")]
    NegativeMass(usize),
    #[error("masses sum to {0}, expected exactly 1")]
    BadTotal(Rat),
    #[error("expected {expected} masses, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("two-uniform blend parameters out of range (need k < l and k <= x <= l)")]
    BadRange,
    #[error("distribution is not decreasing (mass rises at index {0})")]
    NotDecreasing(usize),
    #[error("mixture weights must be non-negative and sum to exactly 1")]
    BadWeights,
    #[error("alphabet mismatch: {0} vs {1}")]
    MixedAlphabets(usize, usize),
}

/// A probability distribution on `{0..p-1}` with exact rational masses.
///
/// Invariants (enforced on construction): every mass is non-negative and the
/// masses sum to exactly 1. Values are immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dist {
    mass: Vec<Rat>,
}

impl Dist {
    /// Validates `values` as a distribution on `{0..p-1}`.
    pub fn new(p: usize, values: Vec<Rat>) -> Result<Self, DistError> {
        if values.len() != p {
            return Err(DistError::BadLength {
                expected: p,
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_negative() {
                return Err(DistError::NegativeMass(i));
            }
        }
        let total: Rat = values.iter().sum();
        if !total.is_one() {
            return Err(DistError::BadTotal(total));
        }
        Ok(Dist { mass: values })
    }

    /// The point mass at `value` on alphabet `{0..p-1}`.
    pub fn point(p: usize, value: usize) -> Self {
        assert!(value < p, "point mass outside alphabet");
        let mut mass = vec![Rat::zero(); p];
        mass[value] = Rat::one();
        Dist { mass }
    }

    /// Alphabet size.
    pub fn p(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self, i: usize) -> &Rat {
        &self.mass[i]
    }

    pub fn masses(&self) -> &[Rat] {
        &self.mass
    }

    /// Exact expectation.
    pub fn mean(&self) -> Rat {
        self.mass
            .iter()
            .enumerate()
            .map(|(i, m)| m * rat_int(i as i64))
            .sum()
    }

    /// True iff `mass(i) >= mass(i+1)` for all `i`.
    pub fn is_decreasing(&self) -> bool {
        self.mass.windows(2).all(|w| w[0] >= w[1])
    }

    /// Support as the set of indices with positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    /// Zero-pads the distribution to a larger alphabet. Padding is the only
    /// sanctioned way to compare or mix distributions of different nominal
    /// alphabet sizes.
    pub fn pad(&self, p: usize) -> Result<Self, DistError> {
        if p < self.p() {
            return Err(DistError::MixedAlphabets(self.p(), p));
        }
        let mut mass = self.mass.clone();
        mass.resize(p, Rat::zero());
        Ok(Dist { mass })
    }

    /// `P(X > t)`.
    pub fn prob_greater(&self, t: usize) -> Rat {
        self.mass.iter().skip(t + 1).sum()
    }

    /// `P(X >= t)`.
    pub fn prob_at_least(&self, t: usize) -> Rat {
        self.mass.iter().skip(t).sum()
    }

    /// Staircase transform: draw `i` from `self`, then a uniform value on
    /// `{0..i}`. The result is decreasing on the same alphabet, its mean is
    /// half the input mean, and the transform is linear in the input.
    pub fn hat(&self) -> Dist {
        let p = self.p();
        let mut mass = vec![Rat::zero(); p];
        // hat(j) = sum_{i >= j} mass(i)/(i+1), accumulated from the top down.
        let mut tail = Rat::zero();
        for i in (0..p).rev() {
            tail += &self.mass[i] / rat_int(i as i64 + 1);
            mass[i] = tail.clone();
        }
        Dist { mass }
    }

    /// Inverse of [`Dist::hat`], defined on decreasing distributions:
    /// `phi(i) = (i+1) * (pi(i) - pi(i+1))` with `pi(p) = 0`.
    pub fn unhat(&self) -> Result<Dist, DistError> {
        let p = self.p();
        if let Some(i) = self.mass.windows(2).position(|w| w[0] < w[1]) {
            return Err(DistError::NotDecreasing(i + 1));
        }
        let mut mass = Vec::with_capacity(p);
        for i in 0..p {
            let next = if i + 1 < p {
                self.mass[i + 1].clone()
            } else {
                Rat::zero()
            };
            mass.push((&self.mass[i] - next) * rat_int(i as i64 + 1));
        }
        Ok(Dist { mass })
    }

    /// Entropy `-sum m_i ln m_i` (natural log), zero-mass terms contributing
    /// zero, as a rational approximation within `10^-digits` of the true
    /// value. This is the module's only non-exact operation.
    pub fn entropy(&self, prec: PrecisionParam) -> Rat {
        // Each log is computed to the full tolerance; since the masses sum
        // to 1 the weighted errors also sum to at most that tolerance.
        let eps = prec.tolerance() / rat_int(2);
        let mut acc = Rat::zero();
        for m in &self.mass {
            if m.is_positive() {
                acc -= m * real::ln_rat(m, &eps);
            }
        }
        acc
    }
}

/// The uniform distribution on `{0..k}` (alphabet size `k+1`).
pub fn uniform(k: usize) -> Dist {
    let w = Rat::new(BigInt::one(), BigInt::from(k as i64 + 1));
    Dist {
        mass: vec![w; k + 1],
    }
}

/// Blend of the uniforms on `{0..k}` and `{0..l}` with weights chosen so the
/// mean is exactly `x/2`; lives on `{0..l}` and is decreasing. At `x = k` or
/// `x = l` this degenerates to the corresponding uniform.
pub fn v_dist(k: usize, l: usize, x: &Rat) -> Result<Dist, DistError> {
    if k >= l {
        return Err(DistError::BadRange);
    }
    let (k_r, l_r) = (rat_int(k as i64), rat_int(l as i64));
    if *x < k_r || *x > l_r {
        return Err(DistError::BadRange);
    }
    let span = &l_r - &k_r;
    let w_low = (&l_r - x) / &span;
    let w_high = (x - &k_r) / &span;
    mix(&[
        (w_low, uniform(k).pad(l + 1).expect("k < l")),
        (w_high, uniform(l)),
    ])
}

/// Pointwise convex combination. Weights must be non-negative and sum to
/// exactly 1; all distributions must share an alphabet.
pub fn mix(terms: &[(Rat, Dist)]) -> Result<Dist, DistError> {
    let Some(((_, first), _)) = terms.split_first() else {
        return Err(DistError::BadWeights);
    };
    let p = first.p();
    let mut total = Rat::zero();
    let mut mass = vec![Rat::zero(); p];
    for (w, d) in terms {
        if w.is_negative() {
            return Err(DistError::BadWeights);
        }
        if d.p() != p {
            return Err(DistError::MixedAlphabets(p, d.p()));
        }
        total += w;
        for (acc, m) in mass.iter_mut().zip(d.masses()) {
            *acc += w * m;
        }
    }
    if !total.is_one() {
        return Err(DistError::BadWeights);
    }
    Ok(Dist { mass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(p: usize, vals: &[(i64, i64)]) -> Dist {
        Dist::new(p, vals.iter().map(|&(n, m)| rat(n, m)).collect()).unwrap()
    }

    #[test]
    fn make_dist_validates() {
        assert!(Dist::new(3, vec![rat(1, 3), rat(1, 3), rat(1, 3)]).is_ok());
        assert!(Dist::new(2, vec![rat(2, 3), rat(1, 3)]).is_ok());
        assert_eq!(
            Dist::new(3, vec![rat(1, 2), rat(1, 4), rat(1, 2)]),
            Err(DistError::BadTotal(rat(5, 4)))
        );
        assert_eq!(
            Dist::new(2, vec![rat(3, 2), rat(-1, 2)]),
            Err(DistError::NegativeMass(1))
        );
        assert!(matches!(
            Dist::new(3, vec![rat(1, 2), rat(1, 2)]),
            Err(DistError::BadLength { .. })
        ));
    }

    #[test]
    fn uniform_cases() {
        assert_eq!(uniform(0), Dist::point(1, 0));
        assert_eq!(uniform(2), d(3, &[(1, 3), (1, 3), (1, 3)]));
        assert_eq!(uniform(3), d(4, &[(1, 4), (1, 4), (1, 4), (1, 4)]));
    }

    #[test]
    fn v_dist_cases() {
        assert_eq!(
            v_dist(0, 2, &rat_int(1)).unwrap(),
            d(3, &[(2, 3), (1, 6), (1, 6)])
        );
        assert_eq!(
            v_dist(1, 3, &rat_int(2)).unwrap(),
            d(4, &[(3, 8), (3, 8), (1, 8), (1, 8)])
        );
        // Boundary weight 0 collapses to the upper uniform.
        assert_eq!(v_dist(0, 2, &rat_int(2)).unwrap(), uniform(2));
        assert_eq!(
            v_dist(0, 2, &rat_int(0)).unwrap(),
            Dist::point(1, 0).pad(3).unwrap()
        );
        assert_eq!(v_dist(2, 1, &rat_int(1)), Err(DistError::BadRange));
        assert_eq!(v_dist(0, 2, &rat(5, 2)), Err(DistError::BadRange));
    }

    #[test]
    fn mean_cases() {
        assert_eq!(uniform(2).mean(), rat_int(1));
        assert_eq!(v_dist(0, 2, &rat_int(1)).unwrap().mean(), rat(1, 2));
        assert_eq!(Dist::point(3, 0).mean(), rat_int(0));
    }

    #[test]
    fn is_decreasing_cases() {
        assert!(uniform(2).is_decreasing());
        assert!(!d(3, &[(1, 4), (1, 2), (1, 4)]).is_decreasing());
        assert!(Dist::point(3, 0).is_decreasing());
    }

    #[test]
    fn hat_cases() {
        assert_eq!(Dist::point(3, 2).hat(), uniform(2));
        assert_eq!(
            d(3, &[(1, 2), (0, 1), (1, 2)]).hat(),
            d(3, &[(2, 3), (1, 6), (1, 6)])
        );
        assert_eq!(Dist::point(1, 0).hat(), Dist::point(1, 0));
    }

    #[test]
    fn unhat_cases() {
        assert_eq!(uniform(2).unhat().unwrap(), Dist::point(3, 2));
        assert_eq!(
            d(3, &[(2, 3), (1, 6), (1, 6)]).unhat().unwrap(),
            d(3, &[(1, 2), (0, 1), (1, 2)])
        );
        assert_eq!(
            d(3, &[(1, 4), (1, 2), (1, 4)]).unhat(),
            Err(DistError::NotDecreasing(1))
        );
    }

    #[test]
    fn mix_cases() {
        let v = d(3, &[(2, 3), (1, 6), (1, 6)]);
        assert_eq!(mix(&[(rat_int(1), v.clone())]).unwrap(), v);
        assert_eq!(
            mix(&[
                (rat(1, 2), Dist::point(1, 0).pad(3).unwrap()),
                (rat(1, 2), uniform(2)),
            ])
            .unwrap(),
            v
        );
        assert_eq!(
            mix(&[
                (rat(1, 2), Dist::point(3, 0)),
                (rat(1, 2), Dist::point(3, 2))
            ])
            .unwrap(),
            d(3, &[(1, 2), (0, 1), (1, 2)])
        );
        assert_eq!(
            mix(&[(rat(1, 3), uniform(2)), (rat(1, 3), uniform(2))]),
            Err(DistError::BadWeights)
        );
        assert_eq!(
            mix(&[(rat(1, 2), uniform(2)), (rat(1, 2), uniform(1))]),
            Err(DistError::MixedAlphabets(3, 2))
        );
    }

    #[test]
    fn entropy_cases() {
        let prec = PrecisionParam::new(12);
        let tol = prec.tolerance();
        // ln 3
        let h = uniform(2).entropy(prec);
        let expect = real::ln_rat(&rat_int(3), &(tol.clone() / rat_int(4)));
        assert!((h - expect).abs() <= tol);
        // Point mass: exactly zero.
        assert_eq!(Dist::point(4, 1).entropy(prec), Rat::zero());
        // ln 3 - (2/3) ln 2 = 0.636514168294813...
        let h = d(2, &[(2, 3), (1, 3)]).entropy(prec);
        let expect = rat(636514168295i64, 1_000_000_000_000i64);
        assert!((h - expect).abs() <= rat(1, 1_000_000_000));
    }

    #[test]
    fn pad_rejects_shrinking() {
        assert!(uniform(2).pad(2).is_err());
        assert_eq!(uniform(1).pad(3).unwrap().masses()[2], Rat::zero());
    }
}
