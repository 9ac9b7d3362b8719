//! Crosstalk avoidance codebooks.
//!
//! Five-bit seed codebooks come from maximum cliques of the transition
//! graph. Wider codebooks are grown one bit at a time so that every
//! five-bit window alternates between the two seeds, and counted with
//! powers of the expansion matrix.

mod classic;
mod graph;
mod matrix;
mod verify;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bus_model::TransitionSymbol;
use crate::error::{Error, Result};

pub use classic::{
    classic_codebook, fibonacci, foc_size, fpc_size, ftc_size, olc_size, satisfies, tribonacci,
    ClassicFamily,
};
pub use graph::{
    build_transition_graph, build_transition_graph_5, codebook_violations, max_cliques, pair_legal,
    transition_symbols, TransitionGraph,
};
pub use matrix::{ExpansionMatrix, IntMatrix};
pub use verify::{
    check_alternating_windows, iolc_lemma, lemma_for, verify_iolc_recursion, verify_recursion,
    verify_theorems, CayleyHamilton, Lemma, RecursionReport, SetCheck, TheoremReport,
};

/// Largest supported codeword width.
pub const MAX_WIDTH: usize = 64;
/// Width of the seed codebooks.
pub const SEED_WIDTH: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword {
    width: usize,
    value: u64,
}

impl Codeword {
    pub fn new(width: usize, value: u64) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::Width { width, min: 1 });
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::Format(format!(
                "{value} does not fit in {width} bits"
            )));
        }
        Ok(Self { width, value })
    }

    /// Parse a binary string, leftmost character is c1.
    pub fn parse_binary(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || !text.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Format(format!("not a binary word: {text:?}")));
        }
        let value = u64::from_str_radix(text, 2)
            .map_err(|_| Error::Format(format!("word too wide: {text}")))?;
        Self::new(text.len(), value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Decimal value Σ c_i·2^(n−i).
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit `i`, 1-based from the left.
    pub fn bit(&self, i: usize) -> bool {
        assert!((1..=self.width).contains(&i), "bit {i} out of range");
        (self.value >> (self.width - i)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (1..=self.width).map(|i| self.bit(i)).collect()
    }

    /// Per-wire transitions from `self` to `next`.
    pub fn transition_to(&self, next: &Codeword) -> Vec<TransitionSymbol> {
        assert_eq!(self.width, next.width, "width mismatch");
        transition_symbols(self.value, next.value, self.width)
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width)
    }
}

/// `(Ci, jC)`: middle windows limited to class Ci, side windows to jC.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConstraintConfig {
    pub middle: u8,
    pub side: u8,
}

impl ConstraintConfig {
    pub const C2_1C: Self = Self { middle: 2, side: 1 };
    pub const C3_1C: Self = Self { middle: 3, side: 1 };
    pub const C4_2C: Self = Self { middle: 4, side: 2 };
    pub const C5_3C: Self = Self { middle: 5, side: 3 };
    pub const C6_4C: Self = Self { middle: 6, side: 4 };
    pub const CONSTRUCTION: [Self; 4] = [Self::C2_1C, Self::C3_1C, Self::C4_2C, Self::C5_3C];

    pub fn new(middle: u8, side: u8) -> Result<Self> {
        if middle > 6 || side > 4 {
            return Err(Error::UnsupportedConstraint(format!("(C{middle},{side}C)")));
        }
        Ok(Self { middle, side })
    }

    /// No constraint at all: every transition is allowed.
    pub fn is_trivial(&self) -> bool {
        self.middle >= 6 && self.side >= 4
    }

    /// Constraints that can seed a construction.
    pub fn check_supported(&self) -> Result<()> {
        if Self::CONSTRUCTION.contains(self) || self.is_trivial() {
            Ok(())
        } else {
            Err(Error::UnsupportedConstraint(self.to_string()))
        }
    }
}

impl fmt::Display for ConstraintConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(C{},{}C)", self.middle, self.side)
    }
}

impl FromStr for ConstraintConfig {
    type Err = Error;

    /// Accepts `C2,1C`, `(C2,1C)` and `c2,1c`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnsupportedConstraint(s.to_string());
        let t = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .to_ascii_uppercase();
        let (m, j) = t.split_once(',').ok_or_else(bad)?;
        let middle = m.trim().strip_prefix('C').ok_or_else(bad)?;
        let side = j.trim().strip_suffix('C').ok_or_else(bad)?;
        Self::new(
            middle.parse().map_err(|_| bad())?,
            side.parse().map_err(|_| bad())?,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Constraint(ConstraintConfig),
    Classic(ClassicFamily),
    PrunedIolc,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constraint(c) => write!(f, "C{},{}C", c.middle, c.side),
            Self::Classic(k) => write!(f, "{k}"),
            Self::PrunedIolc => f.write_str("IOLC"),
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("IOLC") {
            return Ok(Self::PrunedIolc);
        }
        if let Ok(k) = s.parse::<ClassicFamily>() {
            return Ok(Self::Classic(k));
        }
        s.parse().map(Self::Constraint)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    width: usize,
    words: Vec<u64>,
    pub provenance: Provenance,
    /// 0 when the first window lies in C5^0, 1 when it lies in C5^1.
    pub seed_parity: u8,
}

impl Codebook {
    /// Words are sorted and deduplicated.
    pub fn new(
        width: usize,
        words: impl IntoIterator<Item = u64>,
        provenance: Provenance,
        seed_parity: u8,
    ) -> Result<Self> {
        let set: BTreeSet<u64> = words.into_iter().collect();
        for &w in &set {
            Codeword::new(width, w)?;
        }
        Ok(Self {
            width,
            words: set.into_iter().collect(),
            provenance,
            seed_parity,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Decimal values in increasing order.
    pub fn values(&self) -> &[u64] {
        &self.words
    }

    pub fn words(&self) -> impl Iterator<Item = Codeword> + '_ {
        self.words.iter().map(move |&value| Codeword {
            width: self.width,
            value,
        })
    }

    pub fn contains(&self, value: u64) -> bool {
        self.words.binary_search(&value).is_ok()
    }

    pub fn index_of(&self, value: u64) -> Option<usize> {
        self.words.binary_search(&value).ok()
    }

    pub fn is_subset_of(&self, other: &Codebook) -> bool {
        self.width == other.width && self.words.iter().all(|&w| other.contains(w))
    }

    /// Text form: one header line, then `binary decimal` per word.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# width={} size={} provenance={} seed_parity={}\n",
            self.width,
            self.len(),
            self.provenance,
            self.seed_parity
        );
        for w in self.words() {
            out.push_str(&format!("{w} {}\n", w.value()));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .ok_or_else(|| Error::Format("missing header".into()))?;
        let mut width = None;
        let mut size = None;
        let mut provenance = None;
        let mut parity = 0u8;
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad header field {field}")))?;
            let num = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| Error::Format(format!("bad {k}: {v}")))
            };
            match k {
                "width" => width = Some(num(v)?),
                "size" => size = Some(num(v)?),
                "provenance" => provenance = Some(v.parse::<Provenance>()?),
                "seed_parity" => parity = num(v)? as u8,
                _ => return Err(Error::Format(format!("unknown header field {k}"))),
            }
        }
        let width = width.ok_or_else(|| Error::Format("header lacks width".into()))?;
        let provenance =
            provenance.ok_or_else(|| Error::Format("header lacks provenance".into()))?;
        let mut words = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let bin = parts.next().unwrap_or_default();
            let w = Codeword::parse_binary(bin)?;
            if w.width() != width {
                return Err(Error::Format(format!("{bin} is not {width} bits wide")));
            }
            if let Some(dec) = parts.next() {
                if dec.parse::<u64>().ok() != Some(w.value()) {
                    return Err(Error::Format(format!("{bin} does not match decimal {dec}")));
                }
            }
            words.push(w.value());
        }
        let cb = Self::new(width, words, provenance, parity)?;
        if let Some(size) = size {
            if size != cb.len() {
                return Err(Error::Format(format!(
                    "header size {size}, found {} words",
                    cb.len()
                )));
            }
        }
        Ok(cb)
    }
}

/// The pair of five-bit seed codebooks for one constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seeds {
    pub constraint: ConstraintConfig,
    pub c0: Vec<u64>,
    pub c1: Vec<u64>,
}

const ALL_FIVE_BIT: [u64; 32] = {
    let mut a = [0u64; 32];
    let mut i = 0;
    while i < 32 {
        a[i] = i as u64;
        i += 1;
    }
    a
};

impl Seeds {
    /// The published seed pairs.
    pub fn reference(constraint: ConstraintConfig) -> Result<Self> {
        let (c0, c1): (&[u64], &[u64]) = match (constraint.middle, constraint.side) {
            (2, 1) => (&[0, 3, 15, 24, 30, 31], &[0, 1, 7, 16, 28, 31]),
            (3, 1) => (&[0, 3, 14, 15, 24, 30, 31], &[0, 1, 7, 16, 17, 28, 31]),
            (4, 2) => {
                const S: [u64; 16] = [0, 1, 3, 6, 7, 12, 14, 15, 16, 17, 19, 24, 25, 28, 30, 31];
                (&S, &S)
            }
            (5, 3) => (
                &[
                    0, 1, 2, 3, 6, 7, 8, 9, 10, 11, 12, 14, 15, 16, 17, 18, 19, 24, 25, 26, 27, 28,
                    30, 31,
                ],
                &[
                    0, 1, 3, 4, 5, 6, 7, 12, 13, 14, 15, 16, 17, 19, 20, 21, 22, 23, 24, 25, 28,
                    29, 30, 31,
                ],
            ),
            _ if constraint.is_trivial() => (&ALL_FIVE_BIT, &ALL_FIVE_BIT),
            _ => return Err(Error::UnsupportedConstraint(constraint.to_string())),
        };
        Ok(Self {
            constraint,
            c0: c0.to_vec(),
            c1: c1.to_vec(),
        })
    }

    /// Seeds in the other order, so expansion starts from C5^1.
    pub fn swapped(&self) -> Self {
        Self {
            constraint: self.constraint,
            c0: self.c1.clone(),
            c1: self.c0.clone(),
        }
    }

    pub fn size(&self) -> usize {
        self.c0.len()
    }

    pub fn seed(&self, parity: u8) -> &[u64] {
        if parity % 2 == 0 {
            &self.c0
        } else {
            &self.c1
        }
    }
}

/// Complement within five bits.
pub fn complement5(w: u64) -> u64 {
    !w & 0x1f
}

/// Seed pair from the maximum cliques of the five-bit transition graph.
///
/// With two cliques, C5^0 is the one holding 00011 but not 00101 (the other
/// one is its complement image). A single clique serves as both seeds.
pub fn seed_codebooks(
    constraint: ConstraintConfig,
    classifier: &crate::classification::WindowClassifier,
) -> Result<Seeds> {
    if constraint.middle == 0 && constraint.side == 0 {
        return Err(Error::UnsupportedConstraint(format!(
            "{constraint} is too restrictive"
        )));
    }
    constraint.check_supported()?;
    let graph = build_transition_graph_5(constraint, classifier);
    let cliques = max_cliques(&graph);
    match cliques.as_slice() {
        [only] => Ok(Seeds {
            constraint,
            c0: only.clone(),
            c1: only.clone(),
        }),
        [a, b] => {
            let is_c0 = |c: &Vec<u64>| c.contains(&3) && !c.contains(&5);
            let (c0, c1) = if is_c0(a) { (a, b) } else { (b, a) };
            if !is_c0(c0) || is_c0(c1) {
                return Err(Error::Golden(format!(
                    "cannot orient seed cliques for {constraint}"
                )));
            }
            Ok(Seeds {
                constraint,
                c0: c0.clone(),
                c1: c1.clone(),
            })
        }
        other => Err(Error::Golden(format!(
            "{constraint}: expected one or two maximum cliques, found {}",
            other.len()
        ))),
    }
}

/// Grow an `n`-bit codebook: each appended bit must make the last five bits a
/// word of the seed for that step, the seeds alternating from C5^0.
pub fn expand_codebook(seeds: &Seeds, n: usize) -> Result<Codebook> {
    expand_from(seeds, n, 0)
}

/// Same as [`expand_codebook`] but starting from C5^`parity`.
pub fn expand_from(seeds: &Seeds, n: usize, parity: u8) -> Result<Codebook> {
    if n < SEED_WIDTH {
        return Err(Error::Width {
            width: n,
            min: SEED_WIDTH,
        });
    }
    if n > MAX_WIDTH {
        return Err(Error::Width {
            width: n,
            min: SEED_WIDTH,
        });
    }
    let sets = [
        seeds
            .seed(parity)
            .iter()
            .copied()
            .collect::<BTreeSet<u64>>(),
        seeds
            .seed(parity + 1)
            .iter()
            .copied()
            .collect::<BTreeSet<u64>>(),
    ];
    let mut words: Vec<u64> = seeds.seed(parity).to_vec();
    let mut s = 1;
    for _ in SEED_WIDTH..n {
        let mut next = Vec::with_capacity(words.len() * 2);
        for &w in &words {
            for x in 0..2u64 {
                let grown = (w << 1) | x;
                if sets[s].contains(&(grown & 0x1f)) {
                    next.push(grown);
                }
            }
        }
        words = next;
        s = 1 - s;
    }
    Codebook::new(
        n,
        words,
        Provenance::Constraint(seeds.constraint),
        parity % 2,
    )
}

/// Exact size of the `n`-bit codebook, `V·D^(n−5)·Y·Vᵀ`.
pub fn codebook_size(seeds: &Seeds, n: usize) -> Result<num_bigint::BigInt> {
    if n < SEED_WIDTH {
        return Err(Error::Width {
            width: n,
            min: SEED_WIDTH,
        });
    }
    Ok(ExpansionMatrix::from_seeds(seeds).closed_form_size(n))
}

/// Five-bit words allowed at the left edge of a pruned (C2,1C) code.
pub const IOLC_START: [u64; 5] = [0, 3, 15, 30, 31];
/// Right-edge words for odd widths.
pub const IOLC_END_ODD: [u64; 5] = [0, 15, 24, 30, 31];
/// Right-edge words for even widths; these reproduce the published size table.
pub const IOLC_END_EVEN: [u64; 5] = [0, 7, 16, 28, 31];
/// Right-edge set as printed in the pruning listing. It drops 11100 instead
/// of 00001 and does not reproduce the published sizes.
pub const IOLC_END_EVEN_AS_LISTED: [u64; 5] = [0, 1, 7, 16, 31];

pub fn iolc_end_set(n: usize) -> &'static [u64; 5] {
    if n % 2 == 1 {
        &IOLC_END_ODD
    } else {
        &IOLC_END_EVEN
    }
}

/// Keep words whose leftmost five bits are in [`IOLC_START`] and whose
/// rightmost five bits are in the parity's end set.
pub fn prune_iolc(cb: &Codebook) -> Result<Codebook> {
    prune_with(cb, &IOLC_START, iolc_end_set(cb.width()))
}

/// Pruning with explicit edge sets.
pub fn prune_with(cb: &Codebook, start: &[u64], end: &[u64]) -> Result<Codebook> {
    let expected = Provenance::Constraint(ConstraintConfig::C2_1C);
    if cb.provenance != expected || cb.seed_parity != 0 {
        return Err(Error::Provenance {
            expected: format!("{expected} seed_parity=0"),
            found: format!("{} seed_parity={}", cb.provenance, cb.seed_parity),
        });
    }
    let n = cb.width();
    let kept = cb
        .values()
        .iter()
        .copied()
        .filter(|&w| start.contains(&(w >> (n - SEED_WIDTH))) && end.contains(&(w & 0x1f)));
    Codebook::new(n, kept, Provenance::PrunedIolc, 0)
}

/// Exact size of the pruned code at width `n`.
pub fn iolc_size(seeds: &Seeds, n: usize) -> Result<num_bigint::BigInt> {
    if n < SEED_WIDTH {
        return Err(Error::Width {
            width: n,
            min: SEED_WIDTH,
        });
    }
    Ok(ExpansionMatrix::from_seeds(seeds).count_with(n, &IOLC_START, iolc_end_set(n)))
}

/// A named code: a constraint construction, its pruned form, or a classic
/// family. Parsed from `C3,1C`, `IOLC`, `OLC`, `FPC`, …
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeSpec {
    Constraint(ConstraintConfig),
    Iolc,
    Classic(ClassicFamily),
}

impl CodeSpec {
    /// Codebook at width `n`, starting from C5^0 / parity 0.
    pub fn codebook(&self, n: usize) -> Result<Codebook> {
        match *self {
            Self::Constraint(c) => expand_codebook(&Seeds::reference(c)?, n),
            Self::Iolc => prune_iolc(&expand_codebook(
                &Seeds::reference(ConstraintConfig::C2_1C)?,
                n,
            )?),
            Self::Classic(f) => classic_codebook(f, n, 0),
        }
    }

    /// Constraint the code is meant to satisfy, if any.
    pub fn constraint(&self) -> Option<ConstraintConfig> {
        match *self {
            Self::Constraint(c) => Some(c),
            Self::Iolc => Some(ConstraintConfig::C2_1C),
            Self::Classic(ClassicFamily::Olc) => Some(ConstraintConfig::C3_1C),
            Self::Classic(ClassicFamily::Fpc) => Some(ConstraintConfig::C4_2C),
            Self::Classic(ClassicFamily::Foc) => Some(ConstraintConfig::C5_3C),
            Self::Classic(ClassicFamily::Ftc) => None,
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constraint(c) => write!(f, "{c}"),
            Self::Iolc => f.write_str("IOLC"),
            Self::Classic(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for CodeSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.parse::<Provenance>()? {
            Provenance::Constraint(c) => {
                c.check_supported()?;
                Self::Constraint(c)
            }
            Provenance::Classic(k) => Self::Classic(k),
            Provenance::PrunedIolc => Self::Iolc,
        })
    }
}
