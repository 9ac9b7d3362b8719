//! Earlier code families defined by forbidden bit patterns, built by
//! filtering all `2^n` words.
//!
//! Boundary `i` sits between bits `i` and `i+1`. With parity 0 odd
//! boundaries are 01-type (no `10` across them) and even ones 10-type.
//! Centre `i` is bit `i` with both neighbours; with parity 0 even centres
//! forbid `101` and odd centres forbid `010`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Codebook, Provenance};
use crate::error::{Error, Result};

/// Widest classic codebook built by exhaustive filtering.
pub const MAX_CLASSIC_WIDTH: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassicFamily {
    /// Alternating boundaries and no 010/101.
    Olc,
    /// Alternating boundaries only.
    Ftc,
    /// No 010/101 anywhere.
    Fpc,
    /// Per centre, either 010 or 101 is forbidden, alternating.
    Foc,
}

impl fmt::Display for ClassicFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Olc => "OLC",
            Self::Ftc => "FTC",
            Self::Fpc => "FPC",
            Self::Foc => "FOC",
        })
    }
}

impl FromStr for ClassicFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "OLC" => Ok(Self::Olc),
            "FTC" => Ok(Self::Ftc),
            "FPC" => Ok(Self::Fpc),
            "FOC" => Ok(Self::Foc),
            _ => Err(Error::UnsupportedConstraint(s.to_string())),
        }
    }
}

fn bit(w: u64, n: usize, i: usize) -> u64 {
    (w >> (n - i)) & 1
}

fn boundaries_ok(w: u64, n: usize, parity: u8) -> bool {
    (1..n).all(|i| {
        let pair = (bit(w, n, i), bit(w, n, i + 1));
        if (i + parity as usize) % 2 == 1 {
            pair != (1, 0)
        } else {
            pair != (0, 1)
        }
    })
}

fn no_isolated_bits(w: u64, n: usize) -> bool {
    (2..n).all(|i| bit(w, n, i - 1) == bit(w, n, i) || bit(w, n, i) == bit(w, n, i + 1))
}

fn overlap_ok(w: u64, n: usize, parity: u8) -> bool {
    (2..n).all(|i| {
        let t = (bit(w, n, i - 1), bit(w, n, i), bit(w, n, i + 1));
        if (i + parity as usize) % 2 == 0 {
            t != (1, 0, 1)
        } else {
            t != (0, 1, 0)
        }
    })
}

/// Whether the `n`-bit word `w` meets the family's conditions.
pub fn satisfies(family: ClassicFamily, w: u64, n: usize, parity: u8) -> bool {
    match family {
        ClassicFamily::Olc => boundaries_ok(w, n, parity) && no_isolated_bits(w, n),
        ClassicFamily::Ftc => boundaries_ok(w, n, parity),
        ClassicFamily::Fpc => no_isolated_bits(w, n),
        ClassicFamily::Foc => overlap_ok(w, n, parity),
    }
}

pub fn classic_codebook(family: ClassicFamily, n: usize, parity: u8) -> Result<Codebook> {
    if n == 0 || n > MAX_CLASSIC_WIDTH {
        return Err(Error::Width { width: n, min: 1 });
    }
    let parity = parity % 2;
    let words = (0..1u64 << n).filter(|&w| satisfies(family, w, n, parity));
    let parity = if family == ClassicFamily::Fpc {
        0
    } else {
        parity
    };
    Codebook::new(n, words, Provenance::Classic(family), parity)
}

/// `F_1 = F_2 = 1`.
pub fn fibonacci(k: usize) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    a
}

/// `T_1 = T_2 = 1, T_3 = 2`.
pub fn tribonacci(k: usize) -> u128 {
    let mut t = [0u128, 1, 1, 2];
    if k < 4 {
        return t[k];
    }
    for _ in 4..=k {
        t = [t[1], t[2], t[3], t[1] + t[2] + t[3]];
    }
    t[3]
}

/// `G_n = G_{n−1} + G_{n−5}` from `G_1..G_5 = 2, 3, 4, 5, 7`.
pub fn olc_size(n: usize) -> u128 {
    let mut g = vec![0u128, 2, 3, 4, 5, 7];
    for k in 6..=n {
        g.push(g[k - 1] + g[k - 5]);
    }
    g[n]
}

pub fn ftc_size(n: usize) -> u128 {
    fibonacci(n + 2)
}

pub fn fpc_size(n: usize) -> u128 {
    2 * fibonacci(n + 1)
}

pub fn foc_size(n: usize) -> u128 {
    tribonacci(n + 2)
}
