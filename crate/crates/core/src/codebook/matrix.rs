//! Integer matrices and the expansion matrix of a seed pair.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Seeds, SEED_WIDTH};

/// Dense square matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Anti-diagonal permutation.
    pub fn reversal(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + (n - 1 - i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * &k).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|j| (0..self.n).map(|i| &v[i] * self.get(i, j)).sum())
            .collect()
    }

    /// Rows as small integers, for display and CSV export.
    pub fn to_rows(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.to_string()).collect())
            .collect()
    }

    pub fn to_csv(&self) -> String {
        self.to_rows()
            .into_iter()
            .map(|r| r.join(",") + "\n")
            .collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.to_rows() {
            writeln!(f, "{}", r.join(" "))?;
        }
        Ok(())
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        IntMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        IntMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Valid one-bit expansions between the two seeds.
///
/// `d0[i][j] = 1` when the last four bits of the i-th word of C5^0 equal the
/// first four bits of the j-th word of C5^1; `d1` is the same from C5^1 back
/// to C5^0. With `Y` the reversal, `D = D0·Y` counts two-step growth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionMatrix {
    pub seeds: Seeds,
    pub d0: IntMatrix,
    pub d1: IntMatrix,
    pub d: IntMatrix,
    pub y: IntMatrix,
}

fn adjacency(from: &[u64], to: &[u64]) -> IntMatrix {
    assert_eq!(from.len(), to.len(), "seed sizes differ");
    let rows: Vec<Vec<i64>> = from
        .iter()
        .map(|&u| {
            to.iter()
                .map(|&v| i64::from((u & 0xf) == (v >> 1)))
                .collect()
        })
        .collect();
    IntMatrix::from_rows(&rows)
}

impl ExpansionMatrix {
    pub fn from_seeds(seeds: &Seeds) -> Self {
        let d0 = adjacency(&seeds.c0, &seeds.c1);
        let d1 = adjacency(&seeds.c1, &seeds.c0);
        let y = IntMatrix::reversal(seeds.size());
        let d = &d0 * &y;
        Self {
            seeds: seeds.clone(),
            d0,
            d1,
            d,
            y,
        }
    }

    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    /// `V·D^(n−5)·Y·Vᵀ`.
    pub fn closed_form_size(&self, n: usize) -> BigInt {
        let ones = vec![BigInt::one(); self.dim()];
        self.closed_form_weighted(n, &ones, &ones)
    }

    /// `W1·D^(n−5)·Y·W2ᵀ` with 0/1 weight vectors.
    pub fn closed_form_weighted(&self, n: usize, w1: &[BigInt], w2: &[BigInt]) -> BigInt {
        assert!(n >= SEED_WIDTH);
        let m = &self.d.pow((n - SEED_WIDTH) as u32) * &self.y;
        m.left_apply(w1).iter().zip(w2).map(|(a, b)| a * b).sum()
    }

    /// Number of `n`-bit codewords whose first window lies in `start` and
    /// last window in `end`, following the alternating seeds step by step.
    pub fn count_with(&self, n: usize, start: &[u64], end: &[u64]) -> BigInt {
        assert!(n >= SEED_WIDTH);
        let indicator = |seed: &[u64], set: &[u64]| -> Vec<BigInt> {
            seed.iter()
                .map(|w| BigInt::from(u8::from(set.contains(w))))
                .collect()
        };
        let mut v = indicator(&self.seeds.c0, start);
        for step in 0..n - SEED_WIDTH {
            let m = if step % 2 == 0 { &self.d0 } else { &self.d1 };
            v = m.left_apply(&v);
        }
        let last = if (n - SEED_WIDTH) % 2 == 0 {
            &self.seeds.c0
        } else {
            &self.seeds.c1
        };
        v.iter().zip(indicator(last, end)).map(|(a, b)| a * b).sum()
    }

    /// Matrix whose powers drive the size recursion: `D0` when both seeds
    /// are the same set (each step maps the seed to itself), `D` otherwise.
    pub fn transfer(&self) -> &IntMatrix {
        if self.seeds.c0 == self.seeds.c1 {
            &self.d0
        } else {
            &self.d
        }
    }

    /// Largest row sum of D0 and D1.
    pub fn max_row_sum(&self) -> BigInt {
        [&self.d0, &self.d1]
            .iter()
            .flat_map(|m| (0..m.dim()).map(|i| m.row(i).iter().sum::<BigInt>()))
            .max()
            .unwrap_or_default()
    }

    /// `D1 = Y·D0·Y`.
    pub fn is_reversal_symmetric(&self) -> bool {
        self.d1 == &(&self.y * &self.d0) * &self.y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers() {
        let fib = IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]);
        assert_eq!(fib.pow(10).get(0, 1), &BigInt::from(55));
        assert_eq!(fib.pow(0), IntMatrix::identity(2));
        let big = fib.pow(200);
        assert_eq!(
            big.get(0, 1).to_string(),
            "280571172992510140037611932413038677189525"
        );
    }

    #[test]
    fn reversal_is_involution() {
        let y = IntMatrix::reversal(5);
        assert_eq!(&y * &y, IntMatrix::identity(5));
    }
}
