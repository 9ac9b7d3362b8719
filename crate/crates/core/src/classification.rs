//! Transition-pattern classification.
//!
//! Every window pattern whose examined wire switches is mapped to a
//! subclass (identical exact closed form) and a delay class. Memberships
//! come from the shipped reference tables; the closed forms and delays are
//! recomputed from the bus model.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bus_model::{
    eigensystem_for, modal_coefficients, pattern_code, solve_half_delay, synth_response, BusParams,
    ClosedFormResponse, TransitionPattern, TransitionSymbol,
};
use crate::error::{Error, Result};
use crate::surd::QuadSurd;

/// Smallest λ for which the middle-wire classes are claimed to be disjoint.
pub const MIDDLE_MIN_LAMBDA: f64 = 3.0;
/// Smallest λ for which the side-wire classes are claimed to be disjoint.
pub const SIDE_MIN_LAMBDA: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Taxonomy {
    /// Middle wire of a five-wire window, classes C0..C6.
    Middle,
    /// Wire 2 of a four-wire edge window, classes 0C..4C.
    SideWire2,
    /// Wire 1 of a four-wire edge window, classes 0C..2C.
    SideWire1,
    /// Three-wire classes D0..D4.
    Legacy,
}

impl Taxonomy {
    pub fn class_count(self) -> u8 {
        match self {
            Self::Middle => 7,
            Self::SideWire2 => 5,
            Self::SideWire1 => 3,
            Self::Legacy => 5,
        }
    }

    pub fn min_lambda(self) -> f64 {
        match self {
            Self::Middle => MIDDLE_MIN_LAMBDA,
            Self::SideWire2 | Self::SideWire1 => SIDE_MIN_LAMBDA,
            Self::Legacy => 0.0,
        }
    }

    fn window(self) -> (usize, usize) {
        match self {
            Self::Middle => (5, 3),
            Self::SideWire2 => (4, 2),
            Self::SideWire1 => (4, 1),
            Self::Legacy => (3, 2),
        }
    }
}

impl fmt::Display for Taxonomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Middle => "middle",
            Self::SideWire2 => "wire2",
            Self::SideWire1 => "wire1",
            Self::Legacy => "legacy",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DelayClass {
    pub taxonomy: Taxonomy,
    pub index: u8,
}

impl DelayClass {
    pub fn new(taxonomy: Taxonomy, index: u8) -> Result<Self> {
        if index >= taxonomy.class_count() {
            return Err(Error::Golden(format!(
                "class {index} out of range for {taxonomy}"
            )));
        }
        Ok(Self { taxonomy, index })
    }
}

impl fmt::Display for DelayClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.taxonomy {
            Taxonomy::Middle => write!(f, "C{}", self.index),
            Taxonomy::SideWire2 | Taxonomy::SideWire1 => write!(f, "{}C", self.index),
            Taxonomy::Legacy => write!(f, "D{}", self.index),
        }
    }
}

/// Result of classifying one window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowClass {
    Class(DelayClass),
    /// The examined wire does not switch, so it carries no delay constraint.
    Unconstrained,
}

impl WindowClass {
    /// Index used when comparing against a constraint; `None` when free.
    pub fn index(self) -> Option<u8> {
        match self {
            Self::Class(c) => Some(c.index),
            Self::Unconstrained => None,
        }
    }

    pub fn within(self, limit: u8) -> bool {
        self.index().map_or(true, |i| i <= limit)
    }
}

// ---------------------------------------------------------------------------
// Reference tables

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceParams {
    pub tau0_ps: f64,
    pub lambda: f64,
}

/// One printed row: a subclass with its members and printed closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub subclass: usize,
    pub class: u8,
    pub patterns: Vec<String>,
    /// `[a, b, d]` meaning `(a + b·√radicand) / (d·π)`, in printed column order.
    pub printed_coeffs: Vec<[i64; 3]>,
    pub evaluated_delay_ps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulated_delay_ps: Option<f64>,
}

impl GoldenRow {
    pub fn printed(&self, radicand: u32) -> Vec<QuadSurd> {
        self.printed_coeffs
            .iter()
            .map(|&[a, b, d]| QuadSurd::from_parts(a, b, d, radicand))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenTable {
    pub taxonomy: String,
    pub width: usize,
    pub examined: usize,
    pub radicand: u32,
    /// Eigensystem mode index of each printed coefficient column.
    pub columns: Vec<usize>,
    pub reference: ReferenceParams,
    pub rows: Vec<GoldenRow>,
}

impl GoldenTable {
    pub fn row_of(&self, pattern: &str) -> Option<&GoldenRow> {
        self.rows
            .iter()
            .find(|r| r.patterns.iter().any(|p| p == pattern))
    }

    fn validate(&self, taxonomy: Taxonomy) -> Result<()> {
        let (width, examined) = taxonomy.window();
        if self.width != width || self.examined != examined {
            return Err(Error::Golden(format!(
                "{taxonomy} table has window {}/{}, expected {width}/{examined}",
                self.width, self.examined
            )));
        }
        let mut seen = BTreeMap::new();
        for row in &self.rows {
            DelayClass::new(taxonomy, row.class)?;
            if row.printed_coeffs.len() != self.columns.len() {
                return Err(Error::Golden(format!(
                    "{taxonomy} subclass {} has {} coefficients",
                    row.subclass,
                    row.printed_coeffs.len()
                )));
            }
            for p in &row.patterns {
                let pat = TransitionPattern::parse(p, examined)?;
                if pat.examined_symbol() != TransitionSymbol::Up {
                    return Err(Error::Golden(format!("{p}: examined wire must rise")));
                }
                if seen.insert(pat.code(), row.subclass).is_some() {
                    return Err(Error::Golden(format!("{p} listed twice")));
                }
            }
        }
        let expected = 3usize.pow(width as u32 - 1);
        if seen.len() != expected {
            return Err(Error::Golden(format!(
                "{taxonomy} table covers {} patterns, expected {expected}",
                seen.len()
            )));
        }
        Ok(())
    }
}

/// Tables I–III memberships, printed closed forms and delays.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldenTables {
    pub middle: GoldenTable,
    pub wire2: GoldenTable,
    pub wire1: GoldenTable,
}

pub const MIDDLE_FILE: &str = "middle.json";
pub const WIRE2_FILE: &str = "side_wire2.json";
pub const WIRE1_FILE: &str = "side_wire1.json";

impl GoldenTables {
    pub fn embedded() -> Self {
        Self::from_json(
            include_str!("../data/middle.json"),
            include_str!("../data/side_wire2.json"),
            include_str!("../data/side_wire1.json"),
        )
        .expect("embedded reference tables are valid")
    }

    pub fn from_json(middle: &str, wire2: &str, wire1: &str) -> Result<Self> {
        let tables = Self {
            middle: serde_json::from_str(middle)?,
            wire2: serde_json::from_str(wire2)?,
            wire1: serde_json::from_str(wire1)?,
        };
        tables.middle.validate(Taxonomy::Middle)?;
        tables.wire2.validate(Taxonomy::SideWire2)?;
        tables.wire1.validate(Taxonomy::SideWire1)?;
        Ok(tables)
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| Error::Io { path, source })
        };
        Self::from_json(&read(MIDDLE_FILE)?, &read(WIRE2_FILE)?, &read(WIRE1_FILE)?)
    }

    pub fn table(&self, taxonomy: Taxonomy) -> Option<&GoldenTable> {
        match taxonomy {
            Taxonomy::Middle => Some(&self.middle),
            Taxonomy::SideWire2 => Some(&self.wire2),
            Taxonomy::SideWire1 => Some(&self.wire1),
            Taxonomy::Legacy => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Enumeration and subclasses

/// All windows of `width` wires with the examined wire fixed, in
/// lexicographic order of symbols (Up < Hold < Down).
pub fn enumerate_patterns(
    width: usize,
    examined: usize,
    examined_symbol: TransitionSymbol,
) -> Result<Vec<TransitionPattern>> {
    let free = width
        .checked_sub(1)
        .ok_or(Error::Pattern("empty window".into()))?;
    (0..3usize.pow(free as u32))
        .map(|code| {
            let mut digits = Vec::with_capacity(width);
            let mut c = code;
            for _ in 0..free {
                digits.push(TransitionSymbol::from_digit(c % 3));
                c /= 3;
            }
            digits.reverse();
            digits.insert(examined.saturating_sub(1).min(free), examined_symbol);
            TransitionPattern::new(digits, examined)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subclass {
    /// 1-based, in ascending delay order.
    pub id: usize,
    /// Exact per-mode coefficients times π, eigensystem order.
    pub coefficients: Vec<QuadSurd>,
    pub members: Vec<TransitionPattern>,
    pub delay_ps: f64,
    pub response: ClosedFormResponse,
}

/// Group patterns by identical exact closed form, ordered by delay.
pub fn build_subclasses(
    patterns: &[TransitionPattern],
    params: &BusParams,
) -> Result<Vec<Subclass>> {
    let Some(first) = patterns.first() else {
        return Ok(Vec::new());
    };
    let system = eigensystem_for(first)?;
    let mut groups: Vec<(Vec<QuadSurd>, Vec<TransitionPattern>)> = Vec::new();
    for p in patterns {
        if p.width() != first.width()
            || p.examined() != first.examined()
            || p.examined_symbol() != first.examined_symbol()
        {
            return Err(Error::Pattern(format!("{p} does not match {first}")));
        }
        let key = modal_coefficients(p, &system);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(p.clone()),
            None => groups.push((key, vec![p.clone()])),
        }
    }
    let mut subclasses = groups
        .into_iter()
        .map(|(coefficients, members)| {
            let response = synth_response(&members[0], params)?;
            let delay_ps = solve_half_delay(&response)?;
            Ok(Subclass {
                id: 0,
                coefficients,
                members,
                delay_ps,
                response,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    subclasses.sort_by(|a, b| {
        a.delay_ps
            .total_cmp(&b.delay_ps)
            .then_with(|| a.members[0].code().cmp(&b.members[0].code()))
    });
    for (i, s) in subclasses.iter_mut().enumerate() {
        s.id = i + 1;
    }
    Ok(subclasses)
}

/// Single-linkage grouping of sorted delays: a new group starts wherever
/// the step to the next delay exceeds `threshold` times that delay.
pub fn cluster_by_gap(sorted_delays: &[f64], threshold: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(sorted_delays.len());
    let mut class = 0u8;
    for (i, d) in sorted_delays.iter().enumerate() {
        if i > 0 && d - sorted_delays[i - 1] >= threshold * d {
            class += 1;
        }
        out.push(class);
    }
    out
}

// ---------------------------------------------------------------------------
// Classification tables

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub pattern: TransitionPattern,
    pub subclass: usize,
    pub class: DelayClass,
    pub delay_ps: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationTable {
    pub taxonomy: Taxonomy,
    pub params: BusParams,
    pub subclasses: Vec<Subclass>,
    /// Subclass id → class.
    pub subclass_class: BTreeMap<usize, DelayClass>,
    /// Pattern code → entry, for every pattern with a rising examined wire.
    pub entries: BTreeMap<usize, Entry>,
}

impl ClassificationTable {
    pub fn get(&self, pattern: &TransitionPattern) -> Option<&Entry> {
        self.entries.get(&pattern.code())
    }

    /// (class, min delay, max delay) in class order.
    pub fn class_intervals(&self) -> Vec<(DelayClass, f64, f64)> {
        intervals(self.entries.values().map(|e| (e.class, e.delay_ps)))
    }

    pub fn class_sizes(&self) -> BTreeMap<DelayClass, usize> {
        let mut sizes = BTreeMap::new();
        for e in self.entries.values() {
            *sizes.entry(e.class).or_insert(0) += 1;
        }
        sizes
    }
}

fn intervals(items: impl Iterator<Item = (DelayClass, f64)>) -> Vec<(DelayClass, f64, f64)> {
    let mut map: BTreeMap<DelayClass, (f64, f64)> = BTreeMap::new();
    for (c, d) in items {
        let e = map.entry(c).or_insert((d, d));
        e.0 = e.0.min(d);
        e.1 = e.1.max(d);
    }
    map.into_iter().map(|(c, (lo, hi))| (c, lo, hi)).collect()
}

/// True when no two class intervals intersect.
pub fn pairwise_disjoint(intervals: &[(DelayClass, f64, f64)]) -> bool {
    intervals
        .iter()
        .enumerate()
        .all(|(i, a)| intervals[i + 1..].iter().all(|b| a.2 < b.1 || b.2 < a.1))
}

fn classify_with(
    taxonomy: Taxonomy,
    params: &BusParams,
    golden: &GoldenTable,
) -> Result<ClassificationTable> {
    let (width, examined) = taxonomy.window();
    let patterns = enumerate_patterns(width, examined, TransitionSymbol::Up)?;
    let subclasses = build_subclasses(&patterns, params)?;
    let mut membership = BTreeMap::new();
    for row in &golden.rows {
        for p in &row.patterns {
            let code = TransitionPattern::parse(p, examined)?.code();
            membership.insert(code, DelayClass::new(taxonomy, row.class)?);
        }
    }
    let mut subclass_class = BTreeMap::new();
    let mut entries = BTreeMap::new();
    for s in &subclasses {
        let mut class = None;
        for m in &s.members {
            let c = *membership
                .get(&m.code())
                .ok_or_else(|| Error::Golden(format!("{m} missing from {taxonomy} table")))?;
            if class.is_some_and(|k| k != c) {
                return Err(Error::Golden(format!(
                    "subclass of {m} is split across classes in the {taxonomy} table"
                )));
            }
            class = Some(c);
            entries.insert(
                m.code(),
                Entry {
                    pattern: m.clone(),
                    subclass: s.id,
                    class: c,
                    delay_ps: s.delay_ps,
                },
            );
        }
        if let Some(c) = class {
            subclass_class.insert(s.id, c);
        }
    }
    Ok(ClassificationTable {
        taxonomy,
        params: *params,
        subclasses,
        subclass_class,
        entries,
    })
}

fn check_lambda(taxonomy: Taxonomy, params: &BusParams) -> Result<()> {
    let min = taxonomy.min_lambda();
    if params.lambda() < min {
        return Err(Error::Classification {
            lambda: params.lambda(),
            min,
        });
    }
    Ok(())
}

pub fn classify_middle(params: &BusParams, golden: &GoldenTables) -> Result<ClassificationTable> {
    check_lambda(Taxonomy::Middle, params)?;
    classify_with(Taxonomy::Middle, params, &golden.middle)
}

/// Wire-2 and wire-1 tables of a four-wire edge window.
pub fn classify_side(
    params: &BusParams,
    golden: &GoldenTables,
) -> Result<(ClassificationTable, ClassificationTable)> {
    check_lambda(Taxonomy::SideWire2, params)?;
    Ok((
        classify_with(Taxonomy::SideWire2, params, &golden.wire2)?,
        classify_with(Taxonomy::SideWire1, params, &golden.wire1)?,
    ))
}

/// Three-wire class and its delay bound `(1 + i·λ)·τ0`.
pub fn classify_legacy(
    pattern: &TransitionPattern,
    params: &BusParams,
) -> Result<(DelayClass, f64)> {
    if pattern.width() != 3 || pattern.examined() != 2 {
        return Err(Error::Pattern(format!(
            "{pattern} is not a three-wire window"
        )));
    }
    let d = pattern.deltas();
    let index = if d[1] == 0 {
        0
    } else {
        2 - d[1] * (d[0] + d[2])
    };
    let class = DelayClass::new(Taxonomy::Legacy, index as u8)?;
    Ok((
        class,
        (1.0 + index as f64 * params.lambda()) * params.tau0_ps(),
    ))
}

/// Three middle wires of a five-wire window.
pub fn legacy_projection(pattern: &TransitionPattern) -> Result<TransitionPattern> {
    let s = pattern.symbols();
    if s.len() != 5 {
        return Err(Error::Pattern(format!(
            "{pattern} is not a five-wire window"
        )));
    }
    TransitionPattern::new(s[1..4].to_vec(), 2)
}

// ---------------------------------------------------------------------------
// Comparison with the reference tables

/// Differences between a computed table and its reference table.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GoldenDiff {
    /// Reference rows whose members do not form one computed subclass.
    pub partition: Vec<String>,
    /// Patterns assigned to a different class.
    pub classes: Vec<String>,
    /// Rows whose printed closed form differs from the exact one.
    pub coefficients: Vec<String>,
    /// `(first pattern, computed, printed)` outside the delay tolerance.
    pub delays: Vec<(String, f64, f64)>,
    /// Largest `|computed − printed|` over all rows.
    pub max_delay_dev: f64,
    pub delay_tol: f64,
}

impl GoldenDiff {
    pub fn is_clean(&self) -> bool {
        self.partition.is_empty()
            && self.classes.is_empty()
            && self.coefficients.is_empty()
            && self.delays.is_empty()
    }

    /// Membership and class assignment agree, whatever the delays.
    pub fn structure_matches(&self) -> bool {
        self.partition.is_empty() && self.classes.is_empty()
    }
}

/// Compare `table` with `golden` row by row.
pub fn golden_diff(
    table: &ClassificationTable,
    golden: &GoldenTable,
    delay_tol: f64,
) -> Result<GoldenDiff> {
    let mut diff = GoldenDiff {
        delay_tol,
        ..GoldenDiff::default()
    };
    for row in &golden.rows {
        let members = row
            .patterns
            .iter()
            .map(|p| TransitionPattern::parse(p, golden.examined))
            .collect::<Result<Vec<_>>>()?;
        let label = &row.patterns[0];
        let entries: Vec<&Entry> = members.iter().filter_map(|m| table.get(m)).collect();
        if entries.len() != members.len() {
            return Err(Error::Golden(format!(
                "{label}: pattern missing from table"
            )));
        }
        let id = entries[0].subclass;
        let computed_size = table.entries.values().filter(|e| e.subclass == id).count();
        if entries.iter().any(|e| e.subclass != id) || computed_size != members.len() {
            diff.partition.push(label.clone());
        }
        for e in &entries {
            if e.class.index != row.class {
                diff.classes.push(e.pattern.to_string());
            }
        }
        let system = eigensystem_for(&members[0])?;
        let exact = modal_coefficients(&members[0], &system);
        let in_columns: Vec<QuadSurd> = golden.columns.iter().map(|&i| exact[i]).collect();
        if in_columns != row.printed(golden.radicand) {
            diff.coefficients.push(label.clone());
        }
        let dev = (entries[0].delay_ps - row.evaluated_delay_ps).abs();
        diff.max_delay_dev = diff.max_delay_dev.max(dev);
        if dev > delay_tol {
            diff.delays
                .push((label.clone(), entries[0].delay_ps, row.evaluated_delay_ps));
        }
    }
    Ok(diff)
}

// ---------------------------------------------------------------------------
// Window dispatch

/// Class lookup for every 5-wire and 4-wire window at one parameter set.
#[derive(Clone, Debug)]
pub struct WindowClassifier {
    middle: Vec<WindowClass>,
    wire2: Vec<WindowClass>,
    wire1: Vec<WindowClass>,
}

fn lookup_array(table: &ClassificationTable, width: usize, examined: usize) -> Vec<WindowClass> {
    (0..3usize.pow(width as u32))
        .map(|code| {
            let p = TransitionPattern::from_code(width, examined, code).expect("valid window");
            let q = match p.examined_symbol() {
                TransitionSymbol::Hold => return WindowClass::Unconstrained,
                TransitionSymbol::Up => p,
                TransitionSymbol::Down => p.complement(),
            };
            table
                .get(&q)
                .map_or(WindowClass::Unconstrained, |e| WindowClass::Class(e.class))
        })
        .collect()
}

impl WindowClassifier {
    pub fn new(
        middle: &ClassificationTable,
        wire2: &ClassificationTable,
        wire1: &ClassificationTable,
    ) -> Result<Self> {
        let same = middle.params == wire2.params && wire2.params == wire1.params;
        if !same {
            return Err(Error::Params("tables built at different parameters".into()));
        }
        Ok(Self {
            middle: lookup_array(middle, 5, 3),
            wire2: lookup_array(wire2, 4, 2),
            wire1: lookup_array(wire1, 4, 1),
        })
    }

    pub fn build(params: &BusParams, golden: &GoldenTables) -> Result<Self> {
        let middle = classify_middle(params, golden)?;
        let (w2, w1) = classify_side(params, golden)?;
        Self::new(&middle, &w2, &w1)
    }

    /// Dispatch on window width and examined wire. A falling examined wire
    /// is classified through its complement; a holding one is unconstrained.
    pub fn window_class(&self, window: &TransitionPattern) -> Result<WindowClass> {
        match (window.width(), window.examined()) {
            (5, 3) => Ok(self.middle[window.code()]),
            (4, 2) => Ok(self.wire2[window.code()]),
            (4, 1) => Ok(self.wire1[window.code()]),
            (w, _) => Err(Error::Pattern(format!("no window classes for width {w}"))),
        }
    }

    pub fn middle(&self, symbols: &[TransitionSymbol; 5]) -> WindowClass {
        self.middle[pattern_code(symbols)]
    }

    /// Edge window listed from the bus edge inwards. Wire 2 decides when it
    /// switches, otherwise wire 1.
    pub fn side(&self, symbols: &[TransitionSymbol; 4]) -> WindowClass {
        let code = pattern_code(symbols);
        if symbols[1] != TransitionSymbol::Hold {
            self.wire2[code]
        } else {
            self.wire1[code]
        }
    }
}

// ---------------------------------------------------------------------------
// Coupling sweeps

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub intervals: Vec<(DelayClass, f64, f64)>,
    pub non_overlap: bool,
}

/// Per-class delay ranges across λ with memberships frozen from the tables.
/// The legacy taxonomy regroups the five-wire middle delays by the class of
/// their three middle wires.
pub fn sweep_lambda(
    lambdas: &[f64],
    taxonomy: Taxonomy,
    tau0_ps: f64,
    golden: &GoldenTables,
) -> Result<Vec<SweepPoint>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let params = BusParams::new(tau0_ps, lambda)?;
            let intervals = match taxonomy {
                Taxonomy::Legacy => {
                    let table = classify_with(Taxonomy::Middle, &params, &golden.middle)?;
                    let items = table
                        .entries
                        .values()
                        .map(|e| {
                            let proj = legacy_projection(&e.pattern)?;
                            Ok((classify_legacy(&proj, &params)?.0, e.delay_ps))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    intervals(items.into_iter())
                }
                t => {
                    let g = golden.table(t).expect("non-legacy taxonomy");
                    classify_with(t, &params, g)?.class_intervals()
                }
            };
            Ok(SweepPoint {
                lambda,
                non_overlap: pairwise_disjoint(&intervals),
                intervals,
            })
        })
        .collect()
}
