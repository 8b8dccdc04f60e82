//! Exact elements of `Q/Z`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A residue `num/den mod 1`, always reduced with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    num: u64,
    den: u64,
}

impl Residue {
    pub const ZERO: Residue = Residue { num: 0, den: 1 };

    /// `num/den mod 1`; `den` must be positive.
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let r = num.rem_euclid(den as i128) as u64;
        let g = r.gcd(&den);
        Residue { num: r / g, den: den / g }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    /// The additive order of the residue.
    pub fn den(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// `k · self`.
    pub fn scale(self, k: i128) -> Self {
        let den = self.den as i128;
        Residue::new((self.num as i128 * k.rem_euclid(den)) % den, self.den)
    }

    /// `self · den` as an integer modulo `den`, provided `self` lies in `(1/den)Z/Z`.
    pub fn numerator_over(self, den: u64) -> Option<u64> {
        if !den.is_multiple_of(self.den) {
            return None;
        }
        Some(self.num * (den / self.den))
    }
}

impl Default for Residue {
    fn default() -> Self {
        Residue::ZERO
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        let den = self.den.lcm(&rhs.den);
        let a = self.num as i128 * (den / self.den) as i128;
        let b = rhs.num as i128 * (den / rhs.den) as i128;
        Residue::new(a + b, den)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::new(-(self.num as i128), self.den)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self + (-rhs)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduction_and_arithmetic() {
        assert_eq!(Residue::new(3, 6), Residue::new(1, 2));
        assert_eq!(Residue::new(-1, 4), Residue::new(3, 4));
        assert_eq!(Residue::new(1, 2) + Residue::new(1, 2), Residue::ZERO);
        assert_eq!(Residue::new(1, 3) + Residue::new(1, 2), Residue::new(5, 6));
        assert_eq!(Residue::new(1, 6).scale(4), Residue::new(2, 3));
        assert_eq!(Residue::new(1, 3).numerator_over(6), Some(2));
        assert_eq!(Residue::new(1, 4).numerator_over(6), None);
        assert_eq!(Residue::new(5, 6).to_string(), "5/6");
    }

    proptest! {
        #[test]
        fn addition_is_a_group_law(a in -50i128..50, b in -50i128..50, c in -50i128..50, d in 1u64..30) {
            let (x, y, z) = (Residue::new(a, d), Residue::new(b, d + 1), Residue::new(c, 2 * d));
            prop_assert_eq!((x + y) + z, x + (y + z));
            prop_assert_eq!(x + y, y + x);
            prop_assert_eq!(x - x, Residue::ZERO);
            prop_assert!(x.num() < x.den());
        }
    }
}
