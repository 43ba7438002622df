use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the two primes the engine works at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u8);

impl Prime {
    pub const TWO: Prime = Prime(2);
    pub const THREE: Prime = Prime(3);

    pub fn new(p: u32) -> Result<Prime> {
        match p {
            2 => Ok(Prime::TWO),
            3 => Ok(Prime::THREE),
            _ => Err(Error::Config(format!("unsupported prime {p}; only 2 and 3 are implemented"))),
        }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn as_u8(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_two(self) -> bool {
        self.0 == 2
    }

    /// Multiplicative inverse of a nonzero residue.
    #[inline]
    pub fn inverse(self, a: u8) -> u8 {
        debug_assert!(a % self.0 != 0);
        // both fields are tiny: every unit is its own inverse mod 2 and mod 3
        a % self.0
    }

    #[inline]
    pub fn reduce(self, a: i64) -> u8 {
        a.rem_euclid(self.0 as i64) as u8
    }

    /// `C(n, k) mod p` by Lucas' theorem. Negative arguments give zero.
    pub fn binomial(self, n: i64, k: i64) -> u8 {
        if n < 0 || k < 0 || k > n {
            return 0;
        }
        let p = self.0 as i64;
        let (mut n, mut k) = (n, k);
        let mut acc: i64 = 1;
        while n > 0 || k > 0 {
            let (nd, kd) = (n % p, k % p);
            if kd > nd {
                return 0;
            }
            acc = acc * small_binomial(nd, kd) % p;
            n /= p;
            k /= p;
        }
        acc as u8
    }
}

fn small_binomial(n: i64, k: i64) -> i64 {
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Prime> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.value()
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
