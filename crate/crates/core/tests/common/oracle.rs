//! Arbitrary-precision reference for the standard normal, independent of the
//! production kernel: fixed-point big-integer arithmetic with 320 fractional
//! bits, the all-positive series
//! `Phi(x) = 1/2 + phi(x) * sum x^(2n+1) / (1*3*...*(2n+1))`
//! and a Taylor series for the exponential.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

const FRAC: u32 = 320;

// 100 decimals of pi.
const PI_DIGITS: &str = "31415926535897932384626433832795028841971693993751\
05820974944592307816406286208998628034825342117067";

#[derive(Clone, Debug)]
struct Fixed(BigInt);

impl Fixed {
    fn one() -> Self {
        Fixed(BigInt::from(1) << FRAC)
    }

    /// Exact conversion of a double.
    fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Fixed(BigInt::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { Sign::Minus } else { Sign::Plus };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        let m = BigInt::from_biguint(sign, BigUint::from(mantissa));
        let shift = exp + i64::from(FRAC);
        Fixed(if shift >= 0 {
            m << shift as usize
        } else {
            m >> (-shift) as usize
        })
    }

    fn mul(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> FRAC)
    }

    fn div(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 << FRAC) / &o.0)
    }

    fn div_int(&self, k: u64) -> Fixed {
        Fixed(&self.0 / BigInt::from(k))
    }

    fn add(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }

    fn sqrt(&self) -> Fixed {
        let (_, mag) = self.0.clone().into_parts();
        Fixed(BigInt::from((mag << FRAC).sqrt()))
    }

    fn to_f64(&self) -> f64 {
        // Keep 80 significant bits before the final rounding to double.
        let bits = self.0.bits() as i64;
        let drop = (bits - 80).max(0);
        let head = (&self.0 >> drop as usize).to_f64().unwrap();
        head * 2f64.powi((drop - i64::from(FRAC)) as i32)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

fn pi() -> Fixed {
    let digits: BigInt = PI_DIGITS.parse().unwrap();
    let scale = BigInt::from(10).pow((PI_DIGITS.len() - 1) as u32);
    Fixed((digits << FRAC) / scale)
}

/// `e^w` for `w >= 0`.
fn exp_pos(w: &Fixed) -> Fixed {
    let mut sum = Fixed::one();
    let mut term = Fixed::one();
    let mut k = 1u64;
    loop {
        term = term.mul(w).div_int(k);
        if term.is_zero() {
            return sum;
        }
        sum = sum.add(&term);
        k += 1;
    }
}

fn density_fixed(x: &Fixed) -> Fixed {
    let half_sq = x.mul(x).div_int(2);
    let two_pi = pi().add(&pi());
    Fixed::one().div(&exp_pos(&half_sq)).div(&two_pi.sqrt())
}

/// Reference density at an exactly representable `x`.
pub fn phi(x: f64) -> f64 {
    density_fixed(&Fixed::from_f64(x)).to_f64()
}

fn cdf_fixed(x: f64) -> Fixed {
    let xf = Fixed::from_f64(x);
    let sq = xf.mul(&xf);
    let mut term = xf.clone();
    let mut sum = xf.clone();
    let mut odd = 1u64;
    loop {
        odd += 2;
        term = term.mul(&sq).div_int(odd);
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
    }
    Fixed::one().div_int(2).add(&density_fixed(&xf).mul(&sum))
}

/// Reference `Phi(x)`, good to far below double precision for `|x| <= 10`.
pub fn cdf(x: f64) -> f64 {
    cdf_fixed(x).to_f64()
}

/// Reference upper tail `1 - Phi(x)`.
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// Reference quantile by bisection on the reference cdf.
pub fn quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    let (mut lo, mut hi) = (-10.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
