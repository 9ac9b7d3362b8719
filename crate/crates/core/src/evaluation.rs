//! Whole-bus worst-case delay of a codebook under the windowed model,
//! plus rate and throughput figures.
//!
//! Wire `k` in `3..=n−2` is evaluated on the five-wire window centred on it.
//! Wires 1 and 2 use the four-wire edge window, wires `n` and `n−1` the same
//! window mirrored. A wire that does not switch has delay 0.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bus_model::{pattern_delay, BusParams, TransitionPattern, TransitionSymbol};
use crate::codebook::{transition_symbols, ClassicFamily, CodeSpec, Codebook};
use crate::error::{Error, Result};

/// Codebooks up to this size are evaluated pair by pair; larger ones by
/// combining the slices seen at each wire, which gives the same maximum.
pub const EXHAUSTIVE_LIMIT: usize = 2000;

/// Evaluated delay of every window code, indexed like
/// [`TransitionPattern::code`].
#[derive(Clone, Debug, PartialEq)]
pub struct DelayTables {
    pub params: BusParams,
    middle: Vec<f64>,
    wire2: Vec<f64>,
    wire1: Vec<f64>,
}

fn window_delays(width: usize, examined: usize, params: &BusParams) -> Result<Vec<f64>> {
    let count = 3usize.pow(width as u32);
    (0..count)
        .map(|code| {
            let p = TransitionPattern::from_code(width, examined, code)?;
            match p.examined_symbol() {
                TransitionSymbol::Hold => Ok(0.0),
                TransitionSymbol::Up => pattern_delay(&p, params),
                TransitionSymbol::Down => pattern_delay(&p.complement(), params),
            }
        })
        .collect()
}

impl DelayTables {
    pub fn build(params: &BusParams) -> Result<Self> {
        Ok(Self {
            params: params.clone(),
            middle: window_delays(5, 3, params)?,
            wire2: window_delays(4, 2, params)?,
            wire1: window_delays(4, 1, params)?,
        })
    }

    pub fn middle(&self, code: usize) -> f64 {
        self.middle[code]
    }

    pub fn wire2(&self, code: usize) -> f64 {
        self.wire2[code]
    }

    pub fn wire1(&self, code: usize) -> f64 {
        self.wire1[code]
    }
}

/// Base-3 code of the transition between two `len`-bit slices.
fn slice_code(a: u64, b: u64, len: usize, reversed: bool) -> usize {
    let mut code = 0;
    for i in 0..len {
        let shift = if reversed { i } else { len - 1 - i };
        let s = TransitionSymbol::from_bits(a >> shift & 1 == 1, b >> shift & 1 == 1);
        code = code * 3 + s.digit();
    }
    code
}

/// How wire `k` (1-based) of an `n`-wire bus is evaluated: which slice of
/// the word it reads and which table it looks up.
#[derive(Clone, Copy, Debug)]
struct WireProbe {
    shift: usize,
    len: usize,
    reversed: bool,
    table: Which,
}

#[derive(Clone, Copy, Debug)]
enum Which {
    Middle,
    Wire2,
    Wire1,
}

impl WireProbe {
    fn for_wire(k: usize, n: usize) -> Self {
        let (shift, len, reversed, table) = match k {
            1 => (n - 4, 4, false, Which::Wire1),
            2 => (n - 4, 4, false, Which::Wire2),
            _ if k == n => (0, 4, true, Which::Wire1),
            _ if k == n - 1 => (0, 4, true, Which::Wire2),
            _ => (n - k - 2, 5, false, Which::Middle),
        };
        Self {
            shift,
            len,
            reversed,
            table,
        }
    }

    fn slice(&self, w: u64) -> u64 {
        (w >> self.shift) & ((1 << self.len) - 1)
    }

    fn delay(&self, a: u64, b: u64, tables: &DelayTables) -> f64 {
        let code = slice_code(a, b, self.len, self.reversed);
        match self.table {
            Which::Middle => tables.middle(code),
            Which::Wire2 => tables.wire2(code),
            Which::Wire1 => tables.wire1(code),
        }
    }
}

fn probes(n: usize) -> Vec<WireProbe> {
    (1..=n).map(|k| WireProbe::for_wire(k, n)).collect()
}

fn check_width(n: usize) -> Result<()> {
    if n < 5 {
        return Err(Error::Width { width: n, min: 5 });
    }
    Ok(())
}

/// Delay of each wire, wire 1 first, for the transition `u → v`.
pub fn pair_wire_delays(u: u64, v: u64, width: usize, tables: &DelayTables) -> Result<Vec<f64>> {
    check_width(width)?;
    Ok(probes(width)
        .iter()
        .map(|p| p.delay(p.slice(u), p.slice(v), tables))
        .collect())
}

/// Per-wire symbols, handy for printing a worst pair.
pub fn pair_symbols(u: u64, v: u64, width: usize) -> String {
    transition_symbols(u, v, width)
        .iter()
        .map(|s| s.ascii())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WireWorst {
    pub wire_index: usize,
    pub worst_delay_ps: f64,
    pub from_word: String,
    pub to_word: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelayReport {
    pub width: usize,
    pub size: usize,
    pub wires: Vec<WireWorst>,
    pub worst_delay_ps: f64,
    /// 1-based wire carrying the overall worst delay (lowest index on ties).
    pub worst_wire: usize,
    pub tau0_ps: f64,
    pub lambda: f64,
}

impl DelayReport {
    /// Largest delay over the given 1-based wires.
    pub fn worst_over(&self, wires: &[usize]) -> f64 {
        wires
            .iter()
            .map(|&k| self.wires[k - 1].worst_delay_ps)
            .fold(0.0, f64::max)
    }

    /// Wires 1, 2, n−1 and n.
    pub fn side_worst(&self) -> f64 {
        let n = self.width;
        self.worst_over(&[1, 2, n - 1, n])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("wire_index,worst_delay_ps,from_word,to_word\n");
        for w in &self.wires {
            out += &format!(
                "{},{:.4},{},{}\n",
                w.wire_index, w.worst_delay_ps, w.from_word, w.to_word
            );
        }
        out
    }
}

/// Best `(delay, u, v)` per wire: larger delay wins, then smaller `(u, v)`.
type Best = (f64, u64, u64);

fn better(candidate: Best, current: Option<Best>) -> bool {
    match current {
        None => true,
        Some((d, u, v)) => {
            candidate.0 > d || (candidate.0 == d && (candidate.1, candidate.2) < (u, v))
        }
    }
}

fn exhaustive(words: &[u64], n: usize, tables: &DelayTables) -> Vec<Best> {
    let probes = probes(n);
    let mut best: Vec<Option<Best>> = vec![None; n];
    for &u in words {
        for &v in words {
            if u == v {
                continue;
            }
            for (k, p) in probes.iter().enumerate() {
                let d = p.delay(p.slice(u), p.slice(v), tables);
                if better((d, u, v), best[k]) {
                    best[k] = Some((d, u, v));
                }
            }
        }
    }
    best.into_iter().map(|b| b.expect("two words")).collect()
}

/// Same maxima as [`exhaustive`] from the distinct slices at each wire.
/// Two different slices always come from two different words, and the
/// smallest word showing each slice settles the tie-break.
fn by_slices(words: &[u64], n: usize, tables: &DelayTables) -> Vec<Best> {
    probes(n)
        .iter()
        .map(|p| {
            let mut first: BTreeMap<u64, u64> = BTreeMap::new();
            for &w in words {
                first.entry(p.slice(w)).or_insert(w);
            }
            let mut best: Option<Best> = None;
            for (&a, &u) in &first {
                for (&b, &v) in &first {
                    if a != b {
                        let d = p.delay(a, b, tables);
                        if better((d, u, v), best) {
                            best = Some((d, u, v));
                        }
                    }
                }
            }
            // A wire that never switches ties at 0 over every pair.
            match best {
                Some(b) if b.0 > 0.0 => b,
                _ => (0.0, words[0], words[1]),
            }
        })
        .collect()
}

fn assemble(cb: &Codebook, best: Vec<Best>, tables: &DelayTables) -> DelayReport {
    let n = cb.width();
    let wires: Vec<WireWorst> = best
        .iter()
        .enumerate()
        .map(|(k, &(d, u, v))| WireWorst {
            wire_index: k + 1,
            worst_delay_ps: d,
            from_word: format!("{u:0n$b}"),
            to_word: format!("{v:0n$b}"),
        })
        .collect();
    let (worst_wire, worst) = wires.iter().map(|w| (w.wire_index, w.worst_delay_ps)).fold(
        (1, f64::NEG_INFINITY),
        |acc, x| if x.1 > acc.1 { x } else { acc },
    );
    DelayReport {
        width: n,
        size: cb.len(),
        wires,
        worst_delay_ps: worst,
        worst_wire,
        tau0_ps: tables.params.tau0_ps(),
        lambda: tables.params.lambda(),
    }
}

fn check_codebook(cb: &Codebook) -> Result<()> {
    check_width(cb.width())?;
    if cb.len() < 2 {
        return Err(Error::TooFewWords {
            size: cb.len(),
            min: 2,
        });
    }
    Ok(())
}

/// Per-wire worst delay over every ordered pair of distinct codewords.
pub fn codebook_worst_delay(cb: &Codebook, tables: &DelayTables) -> Result<DelayReport> {
    check_codebook(cb)?;
    let best = if cb.len() <= EXHAUSTIVE_LIMIT {
        exhaustive(cb.values(), cb.width(), tables)
    } else {
        by_slices(cb.values(), cb.width(), tables)
    };
    Ok(assemble(cb, best, tables))
}

/// Pair-by-pair evaluation regardless of size.
pub fn codebook_worst_delay_exhaustive(cb: &Codebook, tables: &DelayTables) -> Result<DelayReport> {
    check_codebook(cb)?;
    Ok(assemble(
        cb,
        exhaustive(cb.values(), cb.width(), tables),
        tables,
    ))
}

/// Slice-combination evaluation regardless of size.
pub fn codebook_worst_delay_by_slices(cb: &Codebook, tables: &DelayTables) -> Result<DelayReport> {
    check_codebook(cb)?;
    Ok(assemble(
        cb,
        by_slices(cb.values(), cb.width(), tables),
        tables,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub width: usize,
    pub size: usize,
    pub bits: u32,
    pub rate: f64,
    pub worst_delay_ps: f64,
    /// Rate over worst delay, per ps.
    pub throughput: f64,
    pub gain: Option<f64>,
}

/// `floor(log2 m)` for `m ≥ 1`.
pub fn data_bits(m: usize) -> u32 {
    usize::BITS - 1 - m.leading_zeros()
}

fn base_metrics(report: &DelayReport) -> Metrics {
    let bits = data_bits(report.size);
    let rate = f64::from(bits) / report.width as f64;
    Metrics {
        width: report.width,
        size: report.size,
        bits,
        rate,
        worst_delay_ps: report.worst_delay_ps,
        throughput: rate / report.worst_delay_ps,
        gain: None,
    }
}

/// Rate, throughput and the throughput ratio against `baseline`.
pub fn metrics(cb: &Codebook, baseline: &Codebook, tables: &DelayTables) -> Result<Metrics> {
    if cb.width() != baseline.width() {
        return Err(Error::Width {
            width: cb.width(),
            min: baseline.width(),
        });
    }
    let mut m = base_metrics(&codebook_worst_delay(cb, tables)?);
    let b = base_metrics(&codebook_worst_delay(baseline, tables)?);
    m.gain = Some(m.throughput / b.throughput);
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeReport {
    pub code: String,
    pub delays: DelayReport,
    pub metrics: Metrics,
}

/// Per-code delay reports and metrics; gains are against OLC at the same
/// width.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub tau0_ps: Option<f64>,
    pub lambda: Option<f64>,
    pub codes: Vec<CodeReport>,
}

pub const BASELINE: CodeSpec = CodeSpec::Classic(ClassicFamily::Olc);

pub fn report(codes: &[(CodeSpec, usize)], tables: &DelayTables) -> Result<Report> {
    let mut baselines: BTreeMap<usize, Metrics> = BTreeMap::new();
    let mut out = Report::default();
    if codes.is_empty() {
        return Ok(out);
    }
    out.tau0_ps = Some(tables.params.tau0_ps());
    out.lambda = Some(tables.params.lambda());
    for &(spec, n) in codes {
        let cb = spec.codebook(n)?;
        let delays = codebook_worst_delay(&cb, tables)?;
        let mut m = base_metrics(&delays);
        if !baselines.contains_key(&n) {
            let b = codebook_worst_delay(&BASELINE.codebook(n)?, tables)?;
            baselines.insert(n, base_metrics(&b));
        }
        m.gain = Some(m.throughput / baselines[&n].throughput);
        out.codes.push(CodeReport {
            code: format!("{spec}"),
            delays,
            metrics: m,
        });
    }
    Ok(out)
}

impl Report {
    /// Per-wire rows for every code.
    pub fn wires_csv(&self) -> String {
        let mut out = String::from("code,n,wire_index,worst_delay_ps,from_word,to_word\n");
        for c in &self.codes {
            for w in &c.delays.wires {
                out += &format!(
                    "{},{},{},{:.4},{},{}\n",
                    c.code, c.delays.width, w.wire_index, w.worst_delay_ps, w.from_word, w.to_word
                );
            }
        }
        out
    }

    /// One row per code.
    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("code,n,words,bits,rate,worst_delay_ps,worst_wire,throughput,gain\n");
        for c in &self.codes {
            let m = &c.metrics;
            out += &format!(
                "{},{},{},{},{:.4},{:.4},{},{:.6},{:.4}\n",
                c.code,
                m.width,
                m.size,
                m.bits,
                m.rate,
                m.worst_delay_ps,
                c.delays.worst_wire,
                m.throughput,
                m.gain.unwrap_or(f64::NAN)
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Size, bits and gain per width for the pruned code, the unpruned
    /// (C2,1C) code and OLC.
    pub fn size_table_csv(&self) -> String {
        let mut rows: BTreeMap<usize, BTreeMap<String, &Metrics>> = BTreeMap::new();
        for c in &self.codes {
            rows.entry(c.metrics.width)
                .or_default()
                .insert(c.code.clone(), &c.metrics);
        }
        let mut out = String::from(
            "n,iolc_words,iolc_bits,iolc_gain,c21_words,c21_bits,c21_gain,olc_words,olc_bits\n",
        );
        let cell = |m: Option<&&Metrics>, gain: bool| -> String {
            match m {
                None => ",,".into(),
                Some(m) if gain => {
                    format!("{},{},{:.2}", m.size, m.bits, m.gain.unwrap_or(f64::NAN))
                }
                Some(m) => format!("{},{}", m.size, m.bits),
            }
        };
        for (n, codes) in rows {
            out += &format!(
                "{n},{},{},{}\n",
                cell(codes.get("IOLC"), true),
                cell(codes.get("(C2,1C)"), true),
                cell(codes.get("OLC"), false)
            );
        }
        out
    }
}
