//! Enumerative encoder and decoder.
//!
//! Every code built here is the set of `n`-bit words whose `j`-th five-bit
//! window (counted from the left) lies in an allowed set `S_j`. Counting
//! completions per four-bit state gives a rank table; unranking walks the
//! word bit by bit, skipping the 0-branch count whenever a 1 is chosen.

use crate::codebook::{
    iolc_end_set, satisfies, ClassicFamily, CodeSpec, Codeword, ConstraintConfig, Seeds,
    IOLC_START, MAX_WIDTH, SEED_WIDTH,
};
use crate::error::{Error, Result};

const WINDOW_MASK: u64 = 0x1f;
const STATE_MASK: u64 = 0xf;

fn bitset(words: impl IntoIterator<Item = u64>) -> u32 {
    words
        .into_iter()
        .fold(0, |acc, w| acc | 1 << (w & WINDOW_MASK))
}

fn allows(set: u32, window: u64) -> bool {
    set >> window & 1 == 1
}

/// Completion counts for one code at one width. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    width: usize,
    /// Allowed five-bit windows per window index, as 32-bit sets.
    windows: Vec<u32>,
    /// `completions[j][s]`: words finishing from state `s` after window `j`.
    completions: Vec<[u128; 16]>,
    total: u128,
}

impl RankTable {
    /// Table over the given per-window sets; `windows.len()` must be `n − 4`.
    pub fn from_windows(width: usize, windows: Vec<u32>) -> Result<Self> {
        if width < SEED_WIDTH || width > MAX_WIDTH {
            return Err(Error::Width {
                width,
                min: SEED_WIDTH,
            });
        }
        assert_eq!(windows.len(), width - SEED_WIDTH + 1, "one set per window");
        let last = windows.len() - 1;
        let mut completions = vec![[0u128; 16]; windows.len()];
        completions[last] = [1; 16];
        for j in (0..last).rev() {
            for s in 0..16u64 {
                completions[j][s as usize] = (0..2u64)
                    .map(|x| (s << 1) | x)
                    .filter(|&w| allows(windows[j + 1], w))
                    .map(|w| completions[j + 1][(w & STATE_MASK) as usize])
                    .sum();
            }
        }
        let total = (0..32u64)
            .filter(|&w| allows(windows[0], w))
            .map(|w| completions[0][(w & STATE_MASK) as usize])
            .sum();
        Ok(Self {
            width,
            windows,
            completions,
            total,
        })
    }

    /// Alternating-seed construction starting from C5^`parity`.
    pub fn from_seeds(seeds: &Seeds, width: usize, parity: u8) -> Result<Self> {
        let sets = [
            bitset(seeds.seed(parity).iter().copied()),
            bitset(seeds.seed(parity + 1).iter().copied()),
        ];
        let count = width.saturating_sub(SEED_WIDTH - 1);
        Self::from_windows(width, (0..count).map(|j| sets[j % 2]).collect())
    }

    /// Pruned (C2,1C) code.
    pub fn iolc(seeds: &Seeds, width: usize) -> Result<Self> {
        if seeds.constraint != ConstraintConfig::C2_1C {
            return Err(Error::Provenance {
                expected: ConstraintConfig::C2_1C.to_string(),
                found: seeds.constraint.to_string(),
            });
        }
        let mut t = Self::from_seeds(seeds, width, 0)?;
        let last = t.windows.len() - 1;
        t.windows[0] &= bitset(IOLC_START);
        t.windows[last] &= bitset(iolc_end_set(width).iter().copied());
        Self::from_windows(width, t.windows)
    }

    /// Classic family; every condition spans at most three bits, so it is
    /// captured by the five-bit windows.
    pub fn classic(family: ClassicFamily, width: usize, parity: u8) -> Result<Self> {
        let count = width.saturating_sub(SEED_WIDTH - 1);
        let windows = (0..count)
            .map(|j| {
                let p = ((parity as usize + j) % 2) as u8;
                bitset((0..32).filter(|&w| satisfies(family, w, SEED_WIDTH, p)))
            })
            .collect();
        Self::from_windows(width, windows)
    }

    /// Table for a named code at width `n`, parity 0, reference seeds.
    pub fn for_spec(spec: CodeSpec, width: usize) -> Result<Self> {
        match spec {
            CodeSpec::Constraint(c) => Self::from_seeds(&Seeds::reference(c)?, width, 0),
            CodeSpec::Iolc => Self::iolc(&Seeds::reference(ConstraintConfig::C2_1C)?, width),
            CodeSpec::Classic(f) => Self::classic(f, width, 0),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of codewords.
    pub fn total(&self) -> u128 {
        self.total
    }

    /// Data bits carried, `floor(log2 total)`.
    pub fn bits(&self) -> u32 {
        if self.total == 0 {
            0
        } else {
            127 - self.total.leading_zeros()
        }
    }

    /// Completions after window `j` from four-bit state `s`.
    pub fn completions(&self, j: usize, s: usize) -> u128 {
        self.completions[j][s]
    }

    pub fn contains(&self, word: u64) -> bool {
        self.rank(word).is_some()
    }

    /// The `index`-th codeword in increasing order, for any index below the
    /// total (not only the data range).
    pub fn unrank(&self, mut index: u128) -> Option<u64> {
        if index >= self.total {
            return None;
        }
        let mut word = None;
        for w in (0..32u64).filter(|&w| allows(self.windows[0], w)) {
            let c = self.completions[0][(w & STATE_MASK) as usize];
            if index < c {
                word = Some(w);
                break;
            }
            index -= c;
        }
        let mut word = word?;
        for j in 1..self.windows.len() {
            let zero = (word << 1) & WINDOW_MASK;
            let c0 = if allows(self.windows[j], zero) {
                self.completions[j][(zero & STATE_MASK) as usize]
            } else {
                0
            };
            word <<= 1;
            if index >= c0 {
                index -= c0;
                word |= 1;
            }
        }
        Some(word)
    }

    /// Position of `word` in increasing order, `None` if not a codeword.
    pub fn rank(&self, word: u64) -> Option<u128> {
        if self.width < MAX_WIDTH && word >> self.width != 0 {
            return None;
        }
        let windows = self.windows.len();
        let window_at = |j: usize| (word >> (windows - 1 - j)) & WINDOW_MASK;
        let first = window_at(0);
        if !allows(self.windows[0], first) {
            return None;
        }
        let mut rank: u128 = (0..first)
            .filter(|&w| allows(self.windows[0], w))
            .map(|w| self.completions[0][(w & STATE_MASK) as usize])
            .sum();
        for j in 1..windows {
            let w = window_at(j);
            if !allows(self.windows[j], w) {
                return None;
            }
            let zero = w & !1;
            if w & 1 == 1 && allows(self.windows[j], zero) {
                rank += self.completions[j][(zero & STATE_MASK) as usize];
            }
        }
        Some(rank)
    }

    /// Codeword for `data`, which must be below `2^bits`.
    pub fn encode(&self, data: u128) -> Result<Codeword> {
        let bits = self.bits();
        if bits < 128 && data >> bits != 0 {
            return Err(Error::DataRange { data, bits });
        }
        let word = self.unrank(data).ok_or(Error::DataRange { data, bits })?;
        Codeword::new(self.width, word)
    }

    /// Data word for a codeword. Surplus codewords beyond `2^bits` decode to
    /// their rank, which `encode` never produces.
    pub fn decode(&self, word: &Codeword) -> Result<u128> {
        let not_member = || Error::NotMember {
            word: word.to_string(),
        };
        if word.width() != self.width {
            return Err(not_member());
        }
        self.rank(word.value()).ok_or_else(not_member)
    }
}

/// Shortcut for [`RankTable::for_spec`].
pub fn build_rank_table(spec: CodeSpec, width: usize) -> Result<RankTable> {
    RankTable::for_spec(spec, width)
}
