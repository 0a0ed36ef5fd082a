//! Integer semantics shared by the encoder and the interpreter.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

pub const MIN32: i64 = -2_147_483_648;
pub const MAX32: i64 = 2_147_483_647;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    /// 32-bit two's-complement wraparound.
    Java,
    /// Mathematical integers; leaving the 32-bit range is a verification error.
    #[default]
    Safe,
    /// Unbounded mathematical integers.
    Bigint,
}

impl ArithmeticMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ArithmeticMode::Java => "java",
            ArithmeticMode::Safe => "safe",
            ArithmeticMode::Bigint => "bigint",
        }
    }

    /// Whether program inputs are confined to the 32-bit range.
    pub fn bounded(self) -> bool {
        !matches!(self, ArithmeticMode::Bigint)
    }
}

impl fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArithmeticMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "java" => Ok(ArithmeticMode::Java),
            "safe" => Ok(ArithmeticMode::Safe),
            "bigint" => Ok(ArithmeticMode::Bigint),
            other => Err(format!(
                "unknown arithmetic mode `{other}` (expected java, safe or bigint)"
            )),
        }
    }
}

pub fn min32() -> BigInt {
    BigInt::from(MIN32)
}

pub fn max32() -> BigInt {
    BigInt::from(MAX32)
}

pub fn in_range(v: &BigInt) -> bool {
    *v >= min32() && *v <= max32()
}

/// `((v + 2^31) mod 2^32) - 2^31` with mathematical (non-negative) mod.
pub fn wrap32(v: &BigInt) -> BigInt {
    let two31 = BigInt::from(1u64 << 31);
    let two32 = BigInt::from(1u64 << 32);
    (v + &two31).mod_floor(&two32) - two31
}

/// Division truncating toward zero. `None` when `b` is zero.
pub fn jdiv(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    if b.is_zero() {
        return None;
    }
    // Same construction as the emitted SMT definition.
    let q = a.abs().div_floor(&b.abs());
    Some(if a.is_negative() == b.is_negative() { q } else { -q })
}

/// Remainder with the sign of the dividend. `None` when `b` is zero.
pub fn jmod(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    if b.is_zero() {
        return None;
    }
    let r = a.abs().mod_floor(&b.abs());
    Some(if a.is_negative() { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn wrap_boundaries() {
        assert_eq!(wrap32(&b(1 << 31)), b(MIN32));
        assert_eq!(wrap32(&b(MIN32 - 1)), b(MAX32));
        assert_eq!(wrap32(&b(-1)), b(-1));
    }

    #[test]
    fn truncating_division() {
        assert_eq!(jdiv(&b(-7), &b(2)), Some(b(-3)));
        assert_eq!(jmod(&b(-7), &b(2)), Some(b(-1)));
        assert_eq!(jdiv(&b(7), &b(-2)), Some(b(-3)));
        assert_eq!(jmod(&b(7), &b(-2)), Some(b(1)));
        assert_eq!(jdiv(&b(1), &b(0)), None);
    }

    proptest! {
        #[test]
        fn wrap_matches_i32(v in any::<i64>()) {
            prop_assert_eq!(wrap32(&b(v)), b(v as i32 as i64));
        }

        #[test]
        fn division_matches_native(a in -10_000i64..10_000, d in -100i64..100) {
            prop_assume!(d != 0);
            prop_assert_eq!(jdiv(&b(a), &b(d)), Some(b(a / d)));
            prop_assert_eq!(jmod(&b(a), &b(d)), Some(b(a % d)));
        }

        #[test]
        fn java_ops_wrap_bigint(x in any::<i32>(), y in any::<i32>()) {
            let (bx, by) = (b(x as i64), b(y as i64));
            prop_assert_eq!(wrap32(&(&bx + &by)), b(x.wrapping_add(y) as i64));
            prop_assert_eq!(wrap32(&(&bx * &by)), b(x.wrapping_mul(y) as i64));
            prop_assert_eq!(wrap32(&(&bx - &by)), b(x.wrapping_sub(y) as i64));
            if y != 0 {
                prop_assert_eq!(wrap32(&jdiv(&bx, &by).unwrap()), b(x.wrapping_div(y) as i64));
                prop_assert_eq!(wrap32(&jmod(&bx, &by).unwrap()), b(x.wrapping_rem(y) as i64));
            }
        }
    }
}
