//! Windowed distributed-RC bus model.
//!
//! A transition on a window of 4 or 5 adjacent wires is decoupled into the
//! normal modes of the coupling matrix `C/c = I + λ·L`, where `L` is the
//! free-end path Laplacian. Each mode contributes one exponential (the
//! dominant term of its series solution), and the examined wire's far-end
//! response is the weighted sum of the modes it participates in.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surd::QuadSurd;

pub const DEFAULT_TAU0_PS: f64 = 1.42;
pub const DEFAULT_LAMBDA: f64 = 12.24;

/// Delay of a crosstalk-free wire and the coupling ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BusParams {
    tau0_ps: f64,
    lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parasitics: Option<Parasitics>,
}

/// Per-unit-length line parasitics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parasitics {
    pub r_ohm_per_um: f64,
    /// Capacitance to ground.
    pub c_f_per_um: f64,
    /// Capacitance to each neighbour. When absent, `lambda` must be given.
    #[serde(default)]
    pub c_couple_f_per_um: Option<f64>,
    pub length_um: f64,
}

impl Parasitics {
    /// `0.5·R·C_gnd` for the whole line, in picoseconds.
    pub fn tau0_ps(&self) -> f64 {
        let r = self.r_ohm_per_um * self.length_um;
        let c = self.c_f_per_um * self.length_um;
        0.5 * r * c * 1e12
    }

    pub fn lambda(&self) -> Option<f64> {
        self.c_couple_f_per_um.map(|cc| cc / self.c_f_per_um)
    }
}

impl Default for BusParams {
    fn default() -> Self {
        Self {
            tau0_ps: DEFAULT_TAU0_PS,
            lambda: DEFAULT_LAMBDA,
            parasitics: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsConfig {
    tau0_ps: Option<f64>,
    lambda: Option<f64>,
    r_ohm_per_um: Option<f64>,
    c_f_per_um: Option<f64>,
    c_couple_f_per_um: Option<f64>,
    length_um: Option<f64>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

impl BusParams {
    pub fn new(tau0_ps: f64, lambda: f64) -> Result<Self> {
        if !(tau0_ps.is_finite() && tau0_ps > 0.0) {
            return Err(Error::Params(format!(
                "tau0 must be positive, got {tau0_ps}"
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Params(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            tau0_ps,
            lambda,
            parasitics: None,
        })
    }

    /// Derive τ0 (and λ when the coupling capacitance is known) from line
    /// parasitics. Explicit values, when also given, must agree.
    pub fn from_parasitics(
        p: Parasitics,
        tau0_ps: Option<f64>,
        lambda: Option<f64>,
    ) -> Result<Self> {
        let tau0 = p.tau0_ps();
        if let Some(t) = tau0_ps {
            if !close(t, tau0) {
                return Err(Error::Params(format!(
                    "tau0 {t} ps disagrees with parasitics ({tau0} ps)"
                )));
            }
        }
        let lam = match (p.lambda(), lambda) {
            (Some(d), Some(l)) if !close(d, l) => {
                return Err(Error::Params(format!(
                    "lambda {l} disagrees with parasitics ({d})"
                )))
            }
            (Some(d), _) => d,
            (None, Some(l)) => l,
            (None, None) => {
                return Err(Error::Params(
                    "lambda needs either `lambda` or `c_couple_f_per_um`".into(),
                ))
            }
        };
        let mut params = Self::new(tau0, lam)?;
        params.parasitics = Some(p);
        Ok(params)
    }

    /// Parse a flat `key = value` config. Missing keys fall back to defaults.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let cfg: ParamsConfig =
            toml::from_str(text).map_err(|e| Error::Params(e.message().to_string()))?;
        match (cfg.r_ohm_per_um, cfg.c_f_per_um, cfg.length_um) {
            (Some(r), Some(c), Some(len)) => Self::from_parasitics(
                Parasitics {
                    r_ohm_per_um: r,
                    c_f_per_um: c,
                    c_couple_f_per_um: cfg.c_couple_f_per_um,
                    length_um: len,
                },
                cfg.tau0_ps,
                cfg.lambda
                    .or(cfg.c_couple_f_per_um.is_none().then_some(DEFAULT_LAMBDA)),
            ),
            (None, None, None) if cfg.c_couple_f_per_um.is_none() => Self::new(
                cfg.tau0_ps.unwrap_or(DEFAULT_TAU0_PS),
                cfg.lambda.unwrap_or(DEFAULT_LAMBDA),
            ),
            _ => Err(Error::Params(
                "r_ohm_per_um, c_f_per_um and length_um must be given together".into(),
            )),
        }
    }

    pub fn tau0_ps(&self) -> f64 {
        self.tau0_ps
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn parasitics(&self) -> Option<&Parasitics> {
        self.parasitics.as_ref()
    }

    /// Time constant of the dominant mode term, `(8/π²)·τ0`.
    pub fn tau_ps(&self) -> f64 {
        8.0 / (PI * PI) * self.tau0_ps
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.tau0_ps, lambda)
    }

    pub fn with_tau0(&self, tau0_ps: f64) -> Result<Self> {
        Self::new(tau0_ps, self.lambda)
    }
}

/// Per-wire transition between two consecutive bus states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TransitionSymbol {
    Up,
    Hold,
    Down,
}

impl TransitionSymbol {
    pub const ALL: [TransitionSymbol; 3] = [Self::Up, Self::Hold, Self::Down];

    pub fn value(self) -> i64 {
        match self {
            Self::Up => 1,
            Self::Hold => 0,
            Self::Down => -1,
        }
    }

    pub fn from_bits(from: bool, to: bool) -> Self {
        match (from, to) {
            (false, true) => Self::Up,
            (true, false) => Self::Down,
            _ => Self::Hold,
        }
    }

    pub fn complement(self) -> Self {
        match self {
            Self::Up => Self::Down,
            Self::Hold => Self::Hold,
            Self::Down => Self::Up,
        }
    }

    /// Digit used for base-3 pattern codes (Up < Hold < Down).
    pub fn digit(self) -> usize {
        self as usize
    }

    pub fn from_digit(d: usize) -> Self {
        Self::ALL[d]
    }

    pub fn ascii(self) -> char {
        match self {
            Self::Up => 'u',
            Self::Hold => '-',
            Self::Down => 'd',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'u' | 'U' | '↑' | '+' => Some(Self::Up),
            '-' | '0' | '−' | '=' => Some(Self::Hold),
            'd' | 'D' | '↓' => Some(Self::Down),
            _ => None,
        }
    }
}

/// Symbols of a 3-, 4- or 5-wire window plus the wire whose delay is wanted.
///
/// Wires are numbered from 1 at the left edge. A 5-wire window examines its
/// middle wire, a 4-wire window one of the two leftmost (edge) wires, and a
/// 3-wire window its middle wire (legacy three-wire model only).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionPattern {
    symbols: Vec<TransitionSymbol>,
    examined: usize,
}

impl TransitionPattern {
    pub fn new(symbols: Vec<TransitionSymbol>, examined: usize) -> Result<Self> {
        let width = symbols.len();
        let ok = match width {
            5 => examined == 3,
            4 => examined == 1 || examined == 2,
            3 => examined == 2,
            _ => return Err(Error::Pattern(format!("unsupported window width {width}"))),
        };
        if !ok {
            return Err(Error::ExaminedWire {
                wire: examined,
                width,
            });
        }
        Ok(Self { symbols, examined })
    }

    pub fn parse(text: &str, examined: usize) -> Result<Self> {
        let symbols = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                TransitionSymbol::from_char(c)
                    .ok_or_else(|| Error::Pattern(format!("bad symbol {c:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols, examined)
    }

    /// Five-wire pattern examined on its middle wire.
    pub fn middle(text: &str) -> Result<Self> {
        Self::parse(text, 3)
    }

    pub fn from_code(width: usize, examined: usize, mut code: usize) -> Result<Self> {
        let mut symbols = vec![TransitionSymbol::Hold; width];
        for slot in symbols.iter_mut().rev() {
            *slot = TransitionSymbol::from_digit(code % 3);
            code /= 3;
        }
        Self::new(symbols, examined)
    }

    pub fn symbols(&self) -> &[TransitionSymbol] {
        &self.symbols
    }

    pub fn width(&self) -> usize {
        self.symbols.len()
    }

    pub fn examined(&self) -> usize {
        self.examined
    }

    pub fn examined_symbol(&self) -> TransitionSymbol {
        self.symbols[self.examined - 1]
    }

    pub fn deltas(&self) -> Vec<i64> {
        self.symbols.iter().map(|s| s.value()).collect()
    }

    /// Base-3 index with the leftmost wire most significant.
    pub fn code(&self) -> usize {
        pattern_code(&self.symbols)
    }

    pub fn complement(&self) -> Self {
        Self {
            symbols: self.symbols.iter().map(|s| s.complement()).collect(),
            examined: self.examined,
        }
    }

    /// Left-right mirror image; only meaningful for windows examined in the middle.
    pub fn mirrored(&self) -> Option<Self> {
        let w = self.width();
        (2 * self.examined == w + 1).then(|| Self {
            symbols: self.symbols.iter().rev().copied().collect(),
            examined: self.examined,
        })
    }
}

pub fn pattern_code(symbols: &[TransitionSymbol]) -> usize {
    symbols.iter().fold(0, |acc, s| acc * 3 + s.digit())
}

impl fmt::Display for TransitionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.ascii())?;
        }
        Ok(())
    }
}

impl FromStr for TransitionPattern {
    type Err = Error;

    /// Five-symbol strings examine the middle wire, four-symbol strings wire 2,
    /// three-symbol strings the middle wire.
    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().filter(|c| !c.is_whitespace()).count();
        let examined = match n {
            5 => 3,
            4 | 3 => 2,
            _ => return Err(Error::Pattern(format!("unsupported window width {n}"))),
        };
        Self::parse(s, examined)
    }
}

/// One normal mode of the coupled window.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    /// `μ` in the multiplier `p = 1 + μ·λ`.
    pub rate: QuadSurd,
    pub vector: Vec<QuadSurd>,
    /// Contribution of this mode to the examined wire, `e[k] / ‖e‖²`.
    pub weight: QuadSurd,
}

impl Mode {
    pub fn multiplier(&self, lambda: f64) -> f64 {
        1.0 + self.rate.to_f64() * lambda
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub examined: usize,
    pub modes: Vec<Mode>,
}

/// Free-end path Laplacian of the coupling capacitances.
pub fn coupling_laplacian(width: usize) -> Vec<Vec<i64>> {
    (0..width)
        .map(|i| {
            (0..width)
                .map(|j| {
                    if i == j {
                        if i == 0 || i + 1 == width {
                            1
                        } else {
                            2
                        }
                    } else if i.abs_diff(j) == 1 {
                        -1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

fn dot(a: &[QuadSurd], b: &[QuadSurd]) -> QuadSurd {
    a.iter()
        .zip(b)
        .fold(QuadSurd::int(0), |acc, (x, y)| acc + *x * *y)
}

fn build_system(examined: usize, raw: Vec<(QuadSurd, Vec<QuadSurd>)>) -> EigenSystem {
    let modes = raw
        .into_iter()
        .map(|(rate, vector)| {
            let weight = vector[examined - 1] / dot(&vector, &vector);
            Mode {
                rate,
                vector,
                weight,
            }
        })
        .collect();
    EigenSystem { examined, modes }
}

/// Modes of a five-wire window, examined on the middle wire.
pub fn five_wire_eigensystem() -> EigenSystem {
    let q = |a, b, d| QuadSurd::from_parts(a, b, d, 5);
    let one = QuadSurd::int(1);
    let zero = QuadSurd::int(0);
    build_system(
        3,
        vec![
            (zero, vec![one; 5]),
            (
                q(5, 1, 2),
                vec![q(-1, 1, 4), q(-1, -1, 4), one, q(-1, -1, 4), q(-1, 1, 4)],
            ),
            (
                q(5, -1, 2),
                vec![q(-1, -1, 4), q(-1, 1, 4), one, q(-1, 1, 4), q(-1, -1, 4)],
            ),
            (q(3, 1, 2), vec![-one, q(1, 1, 2), zero, q(-1, -1, 2), one]),
            (q(3, -1, 2), vec![-one, q(1, -1, 2), zero, q(-1, 1, 2), one]),
        ],
    )
}

/// Modes of a four-wire edge window, examined on wire 1 or 2.
pub fn four_wire_eigensystem(examined: usize) -> Result<EigenSystem> {
    if examined != 1 && examined != 2 {
        return Err(Error::ExaminedWire {
            wire: examined,
            width: 4,
        });
    }
    let q = |a, b| QuadSurd::from_parts(a, b, 1, 2);
    let one = QuadSurd::int(1);
    Ok(build_system(
        examined,
        vec![
            (QuadSurd::int(0), vec![one; 4]),
            (q(2, -1), vec![-one, q(1, -1), q(-1, 1), one]),
            (QuadSurd::int(2), vec![one, -one, -one, one]),
            (q(2, 1), vec![-one, q(1, 1), q(-1, -1), one]),
        ],
    ))
}

pub fn eigensystem_for(pattern: &TransitionPattern) -> Result<EigenSystem> {
    match pattern.width() {
        5 => Ok(five_wire_eigensystem()),
        4 => four_wire_eigensystem(pattern.examined()),
        w => Err(Error::Pattern(format!(
            "width-{w} windows have no modal model (use the legacy classifier)"
        ))),
    }
}

/// Exact per-mode coefficients scaled by π (the coefficient is `k/π`), in
/// eigensystem order. Zero entries are kept.
pub fn modal_coefficients(pattern: &TransitionPattern, system: &EigenSystem) -> Vec<QuadSurd> {
    let deltas: Vec<QuadSurd> = pattern.deltas().into_iter().map(QuadSurd::int).collect();
    system
        .modes
        .iter()
        .map(|m| QuadSurd::int(4) * m.weight * dot(&deltas, &m.vector))
        .collect()
}

/// One exponential term `coeff·e^{−t/(a·τ)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    /// Exact coefficient times π.
    pub exact: QuadSurd,
    pub rate: QuadSurd,
    pub coeff: f64,
    pub a: f64,
}

/// `V(t) = final − Σ coeff_i·e^{−t/(a_i·τ)}` in units of the supply voltage.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormResponse {
    pub final_level: i64,
    pub terms: Vec<Term>,
    pub tau_ps: f64,
}

impl ClosedFormResponse {
    pub fn value_at(&self, t_ps: f64) -> f64 {
        let u = t_ps / self.tau_ps;
        self.final_level as f64
            - self
                .terms
                .iter()
                .map(|t| t.coeff * (-u / t.a).exp())
                .sum::<f64>()
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff).sum()
    }
}

pub fn synth_response(
    pattern: &TransitionPattern,
    params: &BusParams,
) -> Result<ClosedFormResponse> {
    let system = eigensystem_for(pattern)?;
    let exact = modal_coefficients(pattern, &system);
    let terms = exact
        .into_iter()
        .zip(&system.modes)
        .filter(|(k, _)| !k.is_zero())
        .map(|(k, m)| Term {
            exact: k,
            rate: m.rate,
            coeff: k.to_f64() / PI,
            a: m.multiplier(params.lambda()),
        })
        .collect();
    Ok(ClosedFormResponse {
        final_level: pattern.examined_symbol().value(),
        terms,
        tau_ps: params.tau_ps(),
    })
}

/// Root-finder settings for the 50% crossing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// First scan point as a fraction of τ.
    pub scan_start: f64,
    pub scan_factor: f64,
    pub tolerance_ps: f64,
    /// Give up beyond this many τ.
    pub horizon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            scan_start: 0.01,
            scan_factor: 1.2,
            tolerance_ps: 1e-5,
            horizon: 1e4,
        }
    }
}

pub fn solve_half_delay(resp: &ClosedFormResponse) -> Result<f64> {
    solve_half_delay_with(resp, &SolverConfig::default())
}

/// Last time the normalized response crosses one half.
///
/// The scan advances geometrically and remembers the last sample still at
/// or below 0.5. Once `Σ|c_i|·e^{−u/a_i} < 0.5` the response can no longer
/// return below one half, so the final crossing is bracketed.
pub fn solve_half_delay_with(resp: &ClosedFormResponse, cfg: &SolverConfig) -> Result<f64> {
    if resp.final_level == 0 {
        return Err(Error::NoTransition);
    }
    let sign = resp.final_level as f64;
    let terms: Vec<(f64, f64)> = resp.terms.iter().map(|t| (t.coeff / sign, t.a)).collect();
    let g = |u: f64| 0.5 - terms.iter().map(|(c, a)| c * (-u / a).exp()).sum::<f64>();
    let tail = |u: f64| {
        terms
            .iter()
            .map(|(c, a)| c.abs() * (-u / a).exp())
            .sum::<f64>()
    };

    // last sample at or below one half, and the sample right after it
    let mut bracket = (g(0.0) <= 0.0).then_some((0.0, cfg.scan_start));
    let mut u = cfg.scan_start;
    loop {
        if u > cfg.horizon {
            return Err(Error::Divergence {
                limit_ps: cfg.horizon * resp.tau_ps,
            });
        }
        if g(u) <= 0.0 {
            bracket = Some((u, u * cfg.scan_factor));
        } else if tail(u) < 0.5 {
            break;
        }
        u *= cfg.scan_factor;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(0.0);
    };
    let tol = cfg.tolerance_ps / resp.tau_ps;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi * resp.tau_ps)
}

/// Evaluated 50% delay of the examined wire.
pub fn pattern_delay(pattern: &TransitionPattern, params: &BusParams) -> Result<f64> {
    solve_half_delay(&synth_response(pattern, params)?)
}
