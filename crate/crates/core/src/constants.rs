//! Scalar quantities attached to alphabet size `p`: the growth constant
//! `theta_p` (the minimum of `(1 + b + ... + b^(p-1)) / b^((p-1)/3)` over
//! `b > 0`), the geometric parameter `rho` making the truncated geometric
//! distribution have mean `(p-1)/3`, that distribution itself (`psi`), and
//! the maximal entropy `lambda'_p = eta(psi)`, which equals `ln(theta_p)`.
//!
//! Both `theta` and `rho` come from sign bisection on the same integer
//! polynomial `P(b) = sum_j (3j - (p-1)) b^j`: the stationarity condition of
//! the objective is exactly the mean condition on the geometric weights. All
//! root-finding is exact-rational; real values are rational enclosures.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::dist::{mix, rat_int, Dist, PrecisionParam, Rat};
use crate::real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ConstError {
    #[error("p must be at least 2 for geometric-weight quantities")]
    BadP,
}

/// Minimiser bracket and value enclosure for `theta_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaResult {
    pub p: usize,
    pub digits: u32,
    /// Bracket for the minimising `b`; width at most `10^-digits`
    /// (collapsed when the minimiser is rational).
    pub beta_bracket: (Rat, Rat),
    /// Enclosure of the minimum value; width at most `10^-digits`.
    pub theta_bracket: (Rat, Rat),
}

impl ThetaResult {
    pub fn beta_star(&self) -> Rat {
        midpoint(&self.beta_bracket)
    }

    pub fn theta(&self) -> Rat {
        midpoint(&self.theta_bracket)
    }
}

/// Bracket for the geometric parameter with mean `(p-1)/3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoResult {
    pub p: usize,
    pub digits: u32,
    pub bracket: (Rat, Rat),
}

impl RhoResult {
    pub fn rho(&self) -> Rat {
        midpoint(&self.bracket)
    }
}

fn midpoint(bracket: &(Rat, Rat)) -> Rat {
    (&bracket.0 + &bracket.1) / rat_int(2)
}

/// Coefficients (ascending) of `P(b) = sum_{j<p} (3j - (p-1)) b^j`, whose
/// unique positive root is both the objective minimiser and the geometric
/// parameter. The coefficients rise from negative to positive, so the sign
/// changes exactly once; this is asserted.
fn stationarity_poly(p: usize) -> Vec<Rat> {
    assert!(p >= 2);
    let coeffs: Vec<Rat> = (0..p)
        .map(|j| rat_int(3 * j as i64 - (p as i64 - 1)))
        .collect();
    assert!(
        coeffs[0].is_negative()
            && coeffs[p - 1].is_positive()
            && coeffs.windows(2).all(|w| w[0] <= w[1]),
        "stationarity polynomial must have exactly one sign change"
    );
    coeffs
}

/// Brackets the unique positive root of the stationarity polynomial, which
/// lies in `(0, 1)`, to the given width.
fn bracket_root(p: usize, width: &Rat) -> (Rat, Rat) {
    let coeffs = stationarity_poly(p);
    real::bisect(
        |x| real::eval_poly(&coeffs, x),
        Rat::zero(),
        Rat::one(),
        width,
    )
}

/// `sum_{j<p} b^j` evaluated exactly.
fn power_sum(b: &Rat, p: usize) -> Rat {
    let mut acc = Rat::zero();
    let mut pw = Rat::one();
    for _ in 0..p {
        acc += &pw;
        pw *= b;
    }
    acc
}

/// Computes `theta_p` with a proven enclosure: the minimiser is bracketed by
/// bisection and the objective `S(b) / (b^(p-1))^(1/3)` is enclosed through
/// monotone interval bounds plus a rational cube-root bracket. For `p = 1`
/// the objective is constantly 1.
pub fn theta(p: usize, prec: PrecisionParam) -> ThetaResult {
    assert!(p >= 1);
    let digits = prec.digits();
    if p == 1 {
        return ThetaResult {
            p,
            digits,
            beta_bracket: (Rat::one(), Rat::one()),
            theta_bracket: (Rat::one(), Rat::one()),
        };
    }
    let tol = prec.tolerance();
    let mut width = tol.clone();
    loop {
        let (lo, hi) = bracket_root(p, &width);
        if lo.is_positive() {
            // S and b^(p-1) are increasing on (0, 1), so the objective over
            // [lo, hi] is enclosed by mixing opposite endpoints.
            let cw = &width / rat_int(4);
            let (c_lo, _) = real::cbrt_bracket(&pow(&lo, p - 1), &cw);
            let (_, c_hi) = real::cbrt_bracket(&pow(&hi, p - 1), &cw);
            if c_lo.is_positive() {
                let t_lo = power_sum(&lo, p) / c_hi;
                let t_hi = power_sum(&hi, p) / c_lo;
                if &t_hi - &t_lo <= tol && &hi - &lo <= tol {
                    debug_assert!(t_lo >= Rat::one(), "theta is at least 1");
                    return ThetaResult {
                        p,
                        digits,
                        beta_bracket: (lo, hi),
                        theta_bracket: (t_lo, t_hi),
                    };
                }
            }
        }
        width /= rat_int(1024);
    }
}

fn pow(b: &Rat, e: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

/// Brackets the unique positive `rho` for which the geometric weights
/// `rho^j` on `{0..p-1}` have mean exactly `(p-1)/3`.
pub fn rho(p: usize, prec: PrecisionParam) -> Result<RhoResult, ConstError> {
    if p < 2 {
        return Err(ConstError::BadP);
    }
    let bracket = bracket_root(p, &prec.tolerance());
    Ok(RhoResult {
        p,
        digits: prec.digits(),
        bracket,
    })
}

/// The exact geometric distribution with ratio `r` on `{0..p-1}`.
fn geometric(r: &Rat, p: usize) -> Dist {
    let total = power_sum(r, p);
    let mut masses = Vec::with_capacity(p);
    let mut pw = Rat::one();
    for _ in 0..p {
        masses.push(&pw / &total);
        pw *= r;
    }
    Dist::new(p, masses).expect("geometric weights normalise to 1")
}

/// Componentwise enclosure of the distribution `psi` over a parameter
/// bracket: `psi_j in [lo^j/S(hi), hi^j/S(lo)]`.
fn psi_enclosure(lo: &Rat, hi: &Rat, p: usize) -> Vec<(Rat, Rat)> {
    let s_lo = power_sum(lo, p);
    let s_hi = power_sum(hi, p);
    let mut out = Vec::with_capacity(p);
    let (mut pw_lo, mut pw_hi) = (Rat::one(), Rat::one());
    for _ in 0..p {
        out.push((&pw_lo / &s_hi, &pw_hi / &s_lo));
        pw_lo *= lo;
        pw_hi *= hi;
    }
    out
}

/// Widens the root bracket until every component enclosure of `psi` is
/// within `tol`, returning the bracket and the enclosures.
fn psi_brackets(p: usize, tol: &Rat) -> ((Rat, Rat), Vec<(Rat, Rat)>) {
    let mut width = tol.clone();
    loop {
        let (lo, hi) = bracket_root(p, &width);
        let enclosures = psi_enclosure(&lo, &hi, p);
        if enclosures.iter().all(|(a, b)| &(b - a) <= tol) {
            return ((lo, hi), enclosures);
        }
        width /= rat_int(1024);
    }
}

/// Componentwise rational approximations of `psi`, each within
/// `10^-digits` of the true value. The approximants need not sum to
/// exactly 1; use [`psi_rational`] for an exact surrogate.
pub fn psi(p: usize, prec: PrecisionParam) -> Result<Vec<Rat>, ConstError> {
    if p < 2 {
        return Err(ConstError::BadP);
    }
    let (_, enclosures) = psi_brackets(p, &prec.tolerance());
    Ok(enclosures.iter().map(midpoint).collect())
}

/// Exact-rational surrogate for `psi`: a genuine distribution, decreasing,
/// with mean exactly `(p-1)/3`, within `10^-digits` of `psi` in sup norm.
///
/// Built by blending the exact geometric distributions at the two bracket
/// endpoints with the unique weight fixing the mean; when the bracket
/// collapses to a rational root no blending is needed.
pub fn psi_rational(p: usize, prec: PrecisionParam) -> Result<Dist, ConstError> {
    if p < 2 {
        return Err(ConstError::BadP);
    }
    let ((lo, hi), _) = psi_brackets(p, &prec.tolerance());
    let target = rat_int(p as i64 - 1) / rat_int(3);
    let out = if lo == hi {
        geometric(&lo, p)
    } else {
        let low = geometric(&lo, p);
        let high = geometric(&hi, p);
        let (m_low, m_high) = (low.mean(), high.mean());
        debug_assert!(m_low < target && target < m_high);
        let w_low = (&m_high - &target) / (&m_high - &m_low);
        let w_high = Rat::one() - &w_low;
        mix(&[(w_low, low), (w_high, high)]).expect("blend weights are convex")
    };
    debug_assert!(out.is_decreasing());
    debug_assert_eq!(out.mean(), target);
    Ok(out)
}

/// The maximal entropy `lambda'_p` over distributions on `{0..p-1}` with
/// mean `(p-1)/3`, attained by `psi`; equals `ln(theta_p)` within the
/// requested precision. Computed as the entropy of the exact surrogate at a
/// few guard digits.
pub fn lambda_prime(p: usize, prec: PrecisionParam) -> Rat {
    assert!(p >= 1);
    if p == 1 {
        return Rat::zero();
    }
    let guarded = PrecisionParam::new(prec.digits() + 6);
    let surrogate = psi_rational(p, guarded).expect("p >= 2");
    surrogate.entropy(guarded)
}

/// `ln(theta_p)` within `10^-digits`, computed independently of
/// [`lambda_prime`] from the theta enclosure.
pub fn ln_theta(p: usize, prec: PrecisionParam) -> Rat {
    assert!(p >= 1);
    if p == 1 {
        return Rat::zero();
    }
    let guarded = PrecisionParam::new(prec.digits() + 2);
    let t = theta(p, guarded);
    real::ln_rat(&t.theta(), &guarded.tolerance())
}
