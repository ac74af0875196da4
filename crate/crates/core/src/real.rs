//! Real-valued outputs from exact rational arithmetic.
//!
//! Every approximation here carries a proven error bound: logarithms come
//! from the atanh series with an explicit geometric tail estimate, roots from
//! sign bisection on rational polynomials. No floating point enters any
//! computation; `f64` views are derived from the rational results at the very
//! end, for display only.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dist::{rat_int, Rat};

/// `10^exp` as an exact rational (negative exponents allowed).
pub fn pow10(exp: i64) -> Rat {
    let base = BigInt::from(10).pow(exp.unsigned_abs() as u32);
    if exp >= 0 {
        Rat::from_integer(base)
    } else {
        Rat::new(BigInt::one(), base)
    }
}

/// `2 * atanh(z) = ln((1+z)/(1-z))` within `eps`, for `|z| <= 1/2`.
fn atanh2(z: &Rat, eps: &Rat) -> Rat {
    debug_assert!(z.abs() <= rat(1, 2));
    let z2 = z * z;
    // 1/(1-z^2) <= 4/3 for |z| <= 1/2; the tail after the degree-k term is
    // bounded by 2|z|^(k+2)/(k+2) * 4/3.
    let mut acc = Rat::zero();
    let mut power = z.clone(); // z^k for odd k
    let mut k: i64 = 1;
    loop {
        acc += &power * rat_int(2) / rat_int(k);
        power *= &z2;
        k += 2;
        let tail = power.abs() * rat(8, 3) / rat_int(k);
        if tail <= *eps {
            return acc;
        }
    }
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `ln 2` within `eps`.
pub fn ln2(eps: &Rat) -> Rat {
    atanh2(&rat(1, 3), eps)
}

/// Natural logarithm of a positive rational, within `eps`.
///
/// The argument is first rounded to a dyadic value of controlled relative
/// error (wide exact rationals would otherwise drag their full numerators
/// through the series), then range-reduced to `[2/3, 4/3]` by powers of two
/// and fed to the atanh series; the power-of-two part uses a
/// correspondingly tightened `ln 2`.
pub fn ln_rat(q: &Rat, eps: &Rat) -> Rat {
    assert!(q.is_positive(), "ln of a non-positive rational");
    // |ln q - ln q~| <= |q - q~| / min(q, q~) <= eps/4 for a dyadic q~ with
    // 2^-bits <= q * eps/8.
    let scale = (BigInt::from(8) * q.denom() * eps.denom()).div_floor(&(q.numer() * eps.numer()));
    let bits = scale.bits() + 1;
    let pow = BigInt::one() << bits;
    let rounded =
        (q.numer() * &pow * BigInt::from(2) + q.denom()).div_floor(&(q.denom() * BigInt::from(2)));
    let mut m = Rat::new(rounded, pow);
    let eps = eps * rat(3, 4);
    let mut e: i64 = 0;
    // Jump near 1 using bit lengths, then settle with exact comparisons.
    let approx = m.numer().bits() as i64 - m.denom().bits() as i64;
    if approx != 0 {
        m /= pow2(approx);
        e = approx;
    }
    let (lo, hi) = (rat(2, 3), rat(4, 3));
    while m > hi {
        m /= rat_int(2);
        e += 1;
    }
    while m < lo {
        m *= rat_int(2);
        e -= 1;
    }
    let half = eps / rat_int(2);
    let z = (&m - Rat::one()) / (&m + Rat::one());
    let ln_m = atanh2(&z, &half);
    if e == 0 {
        return ln_m;
    }
    let ln2_eps = half / rat_int(e.abs());
    ln_m + ln2(&ln2_eps) * rat_int(e)
}

fn pow2(e: i64) -> Rat {
    let base = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rat::from_integer(base)
    } else {
        Rat::new(BigInt::one(), base)
    }
}

/// Exact-sign bisection for a root of `f` in `[lo, hi]`, where
/// `f(lo) <= 0 <= f(hi)`. Shrinks the bracket until its width is at most
/// `width`; a midpoint where `f` vanishes exactly collapses the bracket.
pub fn bisect<F: Fn(&Rat) -> Rat>(f: F, mut lo: Rat, mut hi: Rat, width: &Rat) -> (Rat, Rat) {
    let flo = f(&lo);
    if flo.is_zero() {
        return (lo.clone(), lo);
    }
    let fhi = f(&hi);
    if fhi.is_zero() {
        return (hi.clone(), hi);
    }
    assert!(
        flo.is_negative() && fhi.is_positive(),
        "bisection requires f(lo) < 0 < f(hi)"
    );
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / rat_int(2);
        let fm = f(&mid);
        if fm.is_zero() {
            return (mid.clone(), mid);
        }
        if fm.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Horner evaluation of a polynomial given by ascending coefficients.
pub fn eval_poly(coeffs: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Bracket of the real cube root of a non-negative rational, of width at
/// most `width` (collapsed when the root is rational).
pub fn cbrt_bracket(t: &Rat, width: &Rat) -> (Rat, Rat) {
    assert!(!t.is_negative());
    if t.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let hi = if *t > Rat::one() {
        t.clone()
    } else {
        Rat::one()
    };
    bisect(|y| y * y * y - t, Rat::zero(), hi, width)
}

/// Renders a rational in fixed-point decimal with `digits` fractional
/// digits, rounding half away from zero.
pub fn decimal_string(q: &Rat, digits: u32) -> String {
    let scale = BigInt::from(10).pow(digits);
    let scaled = q * Rat::from_integer(scale.clone());
    // round(x) = floor(|x| + 1/2) with the sign reattached
    let (num, den) = (scaled.numer().abs(), scaled.denom().clone());
    let rounded = (num * 2i32 + &den).div_floor(&(den * 2i32));
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if q.is_negative() && !rounded.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{:0>width$}",
            frac_part.to_string(),
            width = digits as usize
        )
    }
}

/// Nearest `f64`, suitable for display of moderately sized values.
pub fn to_f64(q: &Rat) -> f64 {
    q.to_f64()
        .unwrap_or_else(|| decimal_string(q, 17).parse().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Rat, b: f64, tol: f64) -> bool {
        (to_f64(a) - b).abs() <= tol
    }

    #[test]
    fn ln_known_values() {
        let eps = pow10(-15);
        assert!(close(
            &ln_rat(&rat_int(2), &eps),
            std::f64::consts::LN_2,
            1e-14
        ));
        assert!(close(&ln_rat(&rat_int(3), &eps), 1.0986122886681098, 1e-14));
        assert!(close(
            &ln_rat(&rat(1, 2), &eps),
            -std::f64::consts::LN_2,
            1e-14
        ));
        assert!(close(&ln_rat(&Rat::one(), &eps), 0.0, 1e-15));
        // A value with a large denominator still range-reduces fine.
        assert!(close(
            &ln_rat(&rat(1, 1_000_000_007), &eps),
            -20.72326584394641,
            1e-13
        ));
    }

    #[test]
    fn ln_error_bound_tightens() {
        // ln(10) to 30 digits against a frozen reference.
        let eps = pow10(-30);
        let v = ln_rat(&rat_int(10), &eps);
        // 2.302585092994045684017991454684 (first 31 significant digits)
        let reference = Rat::new(
            "2302585092994045684017991454684".parse().unwrap(),
            "1000000000000000000000000000000".parse().unwrap(),
        );
        assert!((v - reference).abs() <= pow10(-29));
    }

    #[test]
    fn bisect_finds_exact_rational_roots() {
        // 2x - 1 has the exact root 1/2, hit by the first midpoint.
        let (lo, hi) = bisect(
            |x| x * rat_int(2) - Rat::one(),
            Rat::zero(),
            Rat::one(),
            &pow10(-10),
        );
        assert_eq!(lo, rat(1, 2));
        assert_eq!(hi, rat(1, 2));
    }

    #[test]
    fn cbrt_brackets() {
        let w = pow10(-12);
        let (lo, hi) = cbrt_bracket(&rat_int(2), &w);
        assert!(&hi - &lo <= w);
        assert!(lo.clone() * lo.clone() * lo.clone() <= rat_int(2));
        assert!(hi.clone() * hi.clone() * hi.clone() >= rat_int(2));
        // Perfect cube collapses.
        let (lo, hi) = cbrt_bracket(&rat(1, 8), &w);
        assert_eq!(lo, rat(1, 2));
        assert_eq!(hi, rat(1, 2));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&rat(1, 3), 6), "0.333333");
        assert_eq!(decimal_string(&rat(2, 3), 6), "0.666667");
        assert_eq!(decimal_string(&rat(-1, 8), 3), "-0.125");
        assert_eq!(decimal_string(&rat(5, 2), 0), "3");
        assert_eq!(decimal_string(&rat_int(7), 2), "7.00");
    }
}
