//! Configuration, residual suites and report emission for the `qalg` binary.

use crate::error::{QalgError, Result};
use crate::evalrep::{
    build_module, coproduct_residuals, ev_generator, gauss_decompose, gauss_relation_residuals, h_plus_closed_form,
    loperator_shift_residual_n, pi1_l, qdet, rll_residual, scalar_part, sklyanin_residuals, Generator,
};
use crate::freefield as ff;
use crate::mat::{eye, max_abs, rel_diff};
use crate::rmatrix::{check_crossing, check_quasiperiodicity, check_unitarity, check_ybe, AlgebraParams, Sign};
use crate::specfun::{
    bernoulli22, gamma, hankel_log_integral, l1, log_gamma, log_gamma2, log_gamma2_continued, HankelContour,
};
use crate::strip_riemann::{
    self as sr, Channel, OrderingGrid, OrderingKind, OrderingProbe, TestCurrent,
};
use crate::{C64, EULER_GAMMA};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = QalgError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(QalgError::Config(format!("unknown format '{s}' (json or csv)"))),
        }
    }
}

/// `A:B:N`, N points from A to B inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { lo: -2.0, hi: 2.0, count: 10 }
    }
}

impl std::str::FromStr for GridSpec {
    type Err = QalgError;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || QalgError::Config(format!("grid '{s}' is not of the form A:B:N"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(GridSpec { lo, hi, count })
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        self.resampled(self.count)
    }

    pub fn resampled(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (self.lo + self.hi)];
        }
        (0..n).map(|k| self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Specfun,
    Rmatrix,
    Evalrep,
    Riemann,
    Freefield,
    Ordering,
    All,
}

impl SuiteName {
    pub const EACH: [SuiteName; 6] = [
        SuiteName::Specfun,
        SuiteName::Rmatrix,
        SuiteName::Evalrep,
        SuiteName::Riemann,
        SuiteName::Freefield,
        SuiteName::Ordering,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Specfun => "specfun",
            SuiteName::Rmatrix => "rmatrix",
            SuiteName::Evalrep => "evalrep",
            SuiteName::Riemann => "riemann",
            SuiteName::Freefield => "freefield",
            SuiteName::Ordering => "ordering",
            SuiteName::All => "all",
        }
    }

    /// Central charge used when the config does not fix one.
    pub fn default_c(&self) -> f64 {
        match self {
            SuiteName::Riemann | SuiteName::Freefield | SuiteName::Ordering => 1.0,
            _ => 0.0,
        }
    }
}

impl std::str::FromStr for SuiteName {
    type Err = QalgError;
    fn from_str(s: &str) -> Result<Self> {
        SuiteName::EACH
            .iter()
            .chain([SuiteName::All].iter())
            .find(|n| n.as_str() == s)
            .copied()
            .ok_or_else(|| QalgError::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToolkitConfig {
    pub hbar: f64,
    pub eta: f64,
    /// None: per-suite default
    pub c: Option<f64>,
    pub trunc: usize,
    pub tol_map: BTreeMap<String, f64>,
    pub grid: GridSpec,
    pub out_path: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
}

impl Default for ToolkitConfig {
    fn default() -> Self {
        ToolkitConfig {
            hbar: 0.3,
            eta: 0.7,
            c: None,
            trunc: crate::rmatrix::DEFAULT_TRUNC,
            tol_map: BTreeMap::new(),
            grid: GridSpec::default(),
            out_path: None,
            format: Format::Json,
            timing: false,
        }
    }
}

impl ToolkitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(QalgError::Config(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(QalgError::Config(format!("eta must be positive, got {}", self.eta)));
        }
        if let Some(c) = self.c {
            if !(c.is_finite() && self.hbar * c >= 0.0) {
                return Err(QalgError::Config(format!("constraint violated: hbar*c must be >= 0, got c = {c}")));
            }
        }
        if self.trunc == 0 {
            return Err(QalgError::Config("trunc must be a positive integer".into()));
        }
        for (k, v) in &self.tol_map {
            if !(*v > 0.0) {
                return Err(QalgError::Config(format!("tolerance {k} must be positive, got {v}")));
            }
        }
        if self.grid.count == 0 || !(self.grid.lo.is_finite() && self.grid.hi.is_finite()) {
            return Err(QalgError::Config("grid must be nonempty".into()));
        }
        Ok(())
    }

    pub fn params_for(&self, suite: SuiteName) -> Result<AlgebraParams> {
        AlgebraParams::new(self.hbar, self.eta, self.c.unwrap_or(suite.default_c()))
            .map_err(|e| QalgError::Config(e.to_string()))
    }

    /// Apply one `key=value` setting. Keys: hbar, eta, c, trunc, grid, out,
    /// format, timing, tol.NAME.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.trim().parse::<f64>().map_err(|_| QalgError::Config(format!("{key}: '{v}' is not a number")))
        };
        match key.trim() {
            "hbar" => self.hbar = num(value)?,
            "eta" => self.eta = num(value)?,
            "c" => self.c = Some(num(value)?),
            "trunc" => {
                self.trunc = value
                    .trim()
                    .parse()
                    .map_err(|_| QalgError::Config(format!("trunc: '{value}' is not a positive integer")))?
            }
            "grid" => self.grid = value.trim().parse()?,
            "out" => self.out_path = Some(PathBuf::from(value.trim())),
            "format" => self.format = value.trim().parse()?,
            "timing" => self.timing = matches!(value.trim(), "1" | "true" | "yes"),
            k if k.starts_with("tol.") => {
                self.tol_map.insert(k[4..].to_string(), num(value)?);
            }
            k => return Err(QalgError::Config(format!("unknown key '{k}'"))),
        }
        Ok(())
    }

    /// `NAME=F` as given to --tol.
    pub fn set_tol(&mut self, spec: &str) -> Result<()> {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| QalgError::Config(format!("--tol expects NAME=F, got '{spec}'")))?;
        self.set(&format!("tol.{}", k.trim()), v)
    }
}

/// Parse a key=value file; `#` starts a comment. Errors name the line.
pub fn parse_config_str(text: &str) -> Result<ToolkitConfig> {
    let mut cfg = ToolkitConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| QalgError::Config(format!("line {}: expected key=value", i + 1)))?;
        cfg.set(k, v).map_err(|e| QalgError::Config(format!("line {}: {e}", i + 1)))?;
    }
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ToolkitConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| QalgError::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, Serialize)]
pub struct ParamsEcho {
    pub hbar: f64,
    pub eta: f64,
    pub eta_prime: f64,
    pub c: f64,
    pub trunc: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// null when the check could not be evaluated
    pub max_residual: Option<f64>,
    pub gate: f64,
    pub pass: bool,
    pub runtime_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfoItem {
    pub name: String,
    pub value: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: ParamsEcho,
    pub checks: Vec<CheckResult>,
    pub info: Vec<InfoItem>,
    pub overall_pass: bool,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// One evaluated point of a sweep.
type Point = (f64, Result<f64>);

struct Collector<'a> {
    cfg: &'a ToolkitConfig,
    checks: Vec<CheckResult>,
    info: Vec<InfoItem>,
}

impl<'a> Collector<'a> {
    fn new(cfg: &'a ToolkitConfig) -> Self {
        Collector { cfg, checks: Vec::new(), info: Vec::new() }
    }

    fn gate(&self, name: &str, default: f64) -> f64 {
        self.cfg.tol_map.get(name).copied().unwrap_or(default)
    }

    // residual must stay below the gate; pole errors skip a point
    fn sweep<F: FnOnce() -> Vec<Point>>(&mut self, name: &str, default_gate: f64, f: F) {
        self.run(name, default_gate, false, f)
    }

    // residual must reach the gate (negative controls)
    fn sweep_above<F: FnOnce() -> Vec<Point>>(&mut self, name: &str, default_gate: f64, f: F) {
        self.run(name, default_gate, true, f)
    }

    fn single<F: FnOnce() -> Result<f64>>(&mut self, name: &str, default_gate: f64, f: F) {
        self.sweep(name, default_gate, || vec![(0.0, f())])
    }

    fn run<F: FnOnce() -> Vec<Point>>(&mut self, name: &str, default_gate: f64, above: bool, f: F) {
        let gate = self.gate(name, default_gate);
        let t0 = Instant::now();
        let pts = f();
        let ms = if self.cfg.timing { t0.elapsed().as_millis() as u64 } else { 0 };
        let mut worst: Option<f64> = None;
        let mut skipped = Vec::new();
        let mut error = None;
        let mut curve = Vec::new();
        for (x, r) in pts {
            match r {
                Ok(v) => {
                    let v = if v.is_nan() { f64::INFINITY } else { v };
                    worst = Some(worst.map_or(v, |w: f64| if above { w.min(v) } else { w.max(v) }));
                    curve.push((x, v));
                }
                Err(QalgError::Pole(_)) => skipped.push(format!("skipped:pole at {x}")),
                Err(e) => {
                    error.get_or_insert_with(|| format!("at {x}: {e}"));
                }
            }
        }
        let pass = error.is_none()
            && worst.map_or(false, |w| w.is_finite() && if above { w >= gate } else { w < gate });
        let mut notes: Vec<String> = Vec::new();
        if let Some(e) = error {
            notes.push(e);
        }
        notes.extend(skipped);
        let max_residual = worst.filter(|w| w.is_finite());
        self.checks.push(CheckResult {
            name: name.to_string(),
            max_residual,
            gate,
            pass,
            runtime_ms: ms,
            note: if notes.is_empty() { None } else { Some(notes.join("; ")) },
            curve,
        });
    }

    fn info(&mut self, name: &str, value: Option<f64>, note: impl Into<String>) {
        self.info.push(InfoItem { name: name.to_string(), value, note: note.into() });
    }

    fn finish(mut self, suite: SuiteName, p: &AlgebraParams) -> SuiteReport {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.info.sort_by(|a, b| a.name.cmp(&b.name));
        let overall_pass = !self.checks.is_empty() && self.checks.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.as_str().to_string(),
            params: ParamsEcho { hbar: p.hbar, eta: p.eta, eta_prime: p.eta_prime, c: p.c, trunc: self.cfg.trunc },
            checks: self.checks,
            info: self.info,
            overall_pass,
        }
    }
}

fn c(a: f64, b: f64) -> C64 {
    C64::new(a, b)
}

/// Run one suite (not `all`; see `run_suites`).
pub fn run_suite(name: SuiteName, cfg: &ToolkitConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let p = cfg.params_for(name)?;
    let mut col = Collector::new(cfg);
    match name {
        SuiteName::Specfun => suite_specfun(&mut col),
        SuiteName::Rmatrix => suite_rmatrix(&mut col, &p),
        SuiteName::Evalrep => suite_evalrep(&mut col, &p),
        SuiteName::Riemann => suite_riemann(&mut col, &p),
        SuiteName::Freefield => suite_freefield(&mut col, &p),
        SuiteName::Ordering => suite_ordering(&mut col, &p),
        SuiteName::All => return Err(QalgError::Config("use run_suites for 'all'".into())),
    }
    Ok(col.finish(name, &p))
}

pub fn run_suites(name: SuiteName, cfg: &ToolkitConfig) -> Result<Vec<SuiteReport>> {
    if name == SuiteName::All {
        SuiteName::EACH.iter().map(|&s| run_suite(s, cfg)).collect()
    } else {
        Ok(vec![run_suite(name, cfg)?])
    }
}

// ---------------------------------------------------------------------------
// suites

pub const GAMMA_IDENTITY_X: [f64; 3] = [0.5, 1.3, 2.7];
pub const GAMMA_IDENTITY_ETA: [f64; 3] = [0.5, 0.7, 1.0];

/// |∫ ln(−λ)/(2πiλ) e^{−xλ}/(1 − e^{−λ/η}) − closed Γ form|.
pub fn gamma_identity_residual(x: f64, eta: f64) -> Result<f64> {
    let k = HankelContour::for_periods(&[1.0 / eta])?.with_truncation(40.0 / x);
    let ker = |l: C64| 1.0 / (1.0 - (-l / eta).exp());
    let v = hankel_log_integral(&ker, c(x, 0.0), &k)?;
    let ex = log_gamma(c(eta * x, 0.0))? + (eta * x - 0.5) * (EULER_GAMMA - eta.ln()) - 0.5 * (2.0 * PI).ln();
    Ok((v.value - ex).norm())
}

fn suite_specfun(col: &mut Collector) {
    col.sweep("hankel_gamma_identity", 1e-8, || {
        let mut out = Vec::new();
        for &eta in &GAMMA_IDENTITY_ETA {
            for &x in &GAMMA_IDENTITY_X {
                out.push((x, gamma_identity_residual(x, eta)));
            }
        }
        out
    });
    let zs = [c(0.3, 0.2), c(2.5, -1.0), c(-1.7, 0.4), c(7.0, 3.0), c(0.01, -0.02)];
    col.sweep("gamma_recurrence", 1e-12, || {
        zs.iter()
            .map(|&z| (z.re, (|| Ok(((log_gamma(z + 1.0)? - log_gamma(z)?).exp() / z - 1.0).norm()))()))
            .collect()
    });
    col.sweep("gamma_reflection", 1e-11, || {
        zs.iter()
            .map(|&z| {
                let r = (|| {
                    let lhs = gamma(z)? * gamma(1.0 - z)?;
                    let rhs = PI / (PI * z).sin();
                    Ok((lhs - rhs).norm() / rhs.norm())
                })();
                (z.re, r)
            })
            .collect()
    });
    // Γ₂ continuation against direct quadrature, and the period shift
    // ln Γ₂(x) − ln Γ₂(x + ω₁) = L1(x | ω₂) + (γ/2)(B₂₂(x) − B₂₂(x + ω₁))
    let (w1, w2) = (0.6, 1.1);
    let xs = [c(0.35, 0.2), c(0.2, -0.4), c(0.5, 1.5), c(1.3, 0.0)];
    col.sweep("gamma2_continuation", 1e-9, || {
        xs.iter()
            .map(|&x| {
                let r = (|| {
                    let k = HankelContour::for_periods(&[w1, w2])?;
                    let d = log_gamma2(x, w1, w2, &k)?.value;
                    let e = log_gamma2_continued(x, w1, w2)?.value;
                    Ok((d - e).norm())
                })();
                (x.re, r)
            })
            .collect()
    });
    col.sweep("gamma2_period_shift", 1e-9, || {
        xs.iter()
            .map(|&x| {
                let r = (|| {
                    let k = HankelContour::for_periods(&[w1, w2])?;
                    let a = log_gamma2(x, w1, w2, &k)?.value;
                    let b = log_gamma2(x + w1, w1, w2, &k)?.value;
                    let (cw1, cw2) = (c(w1, 0.0), c(w2, 0.0));
                    let rhs = l1(x, w2)? + 0.5 * EULER_GAMMA * (bernoulli22(x, cw1, cw2)? - bernoulli22(x + w1, cw1, cw2)?);
                    Ok((a - b - rhs).norm())
                })();
                (x.re, r)
            })
            .collect()
    });
}

fn suite_rmatrix(col: &mut Collector, p: &AlgebraParams) {
    let trunc = col.cfg.trunc;
    let grid = col.cfg.grid;
    col.sweep("unitarity", 1e-8, || {
        grid.resampled(2 * grid.count)
            .into_iter()
            .map(|x| (x, check_unitarity(c(x, 0.0), Sign::Bare, p, trunc)))
            .collect()
    });
    col.sweep("crossing_hbar_pi", 1e-8, || {
        let q = match AlgebraParams::new(PI, p.eta, 0.0) {
            Ok(q) => q,
            Err(e) => return vec![(0.0, Err(e))],
        };
        grid.points().into_iter().map(|x| (x, check_crossing(c(x, 0.3), &q, trunc))).collect()
    });
    let general: f64 = grid
        .points()
        .into_iter()
        .filter_map(|x| check_crossing(c(x, 0.3), p, trunc).ok())
        .fold(0.0, f64::max);
    col.info("crossing_general_hbar", Some(general), "crossing with the same C̃ at the configured ℏ");
    col.sweep("yang_baxter", 1e-8, || {
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
        (0..10)
            .map(|k| {
                let mut u = || c(rng.gen_range(-1.5..1.5), rng.gen_range(-0.3..0.3));
                let (a, b, d) = (u(), u(), u());
                (k as f64, check_ybe(a, b, d, p, trunc))
            })
            .collect()
    });
    col.sweep("quasiperiodicity", 1e-7, || {
        grid.points().into_iter().map(|x| (x, check_quasiperiodicity(c(x, -0.2), p, trunc))).collect()
    });
}

fn suite_evalrep(col: &mut Collector, p: &AlgebraParams) {
    let trunc = col.cfg.trunc;
    let grid = col.cfg.grid;
    let p = p.at_level_zero();
    let z = c(0.1, 0.0);
    let offs: Vec<C64> = grid.points().into_iter().map(|x| c(x, -0.35)).collect();
    col.sweep("gauss_coordinates_v1", 1e-10, || {
        offs.iter()
            .map(|&u| {
                let r = (|| {
                    let m = build_module(1, &p)?;
                    let g = gauss_decompose(&pi1_l(z, u, Sign::Plus, &p, trunc)?, &p)?;
                    let e = ev_generator(Generator::EPlus, u, z, &m)?.mat;
                    let f = ev_generator(Generator::FPlus, u, z, &m)?.mat;
                    let h = ev_generator(Generator::HPlus, u, z, &m)?.mat;
                    Ok(rel_diff(&g.e_coord, &e).max(rel_diff(&g.f_coord, &f)).max(rel_diff(&g.h_coord, &h)))
                })();
                (u.re, r)
            })
            .collect()
    });
    col.sweep("h_plus_vs_closed_form_v2", 1e-10, || {
        offs.iter()
            .map(|&u| {
                let r = (|| {
                    let m = build_module(2, &p)?;
                    let a = ev_generator(Generator::HPlus, u, z, &m)?.mat;
                    Ok(rel_diff(&a, &h_plus_closed_form(u, z, &m)?))
                })();
                (u.re, r)
            })
            .collect()
    });
    let mut scalars = Vec::new();
    col.sweep("qdet_identity", 1e-6, || {
        offs.iter()
            .map(|&u| {
                let r = (|| {
                    let q = qdet(|v| pi1_l(z, v, Sign::Plus, &p, trunc), u, p.hbar)?;
                    scalars.push(scalar_part(&q));
                    Ok(max_abs(&(q - eye(2))))
                })();
                (u.re, r)
            })
            .collect()
    });
    if let Some(s) = scalars.first() {
        let spread = scalars.iter().map(|t| (t - s).norm()).fold(0.0, f64::max);
        col.info(
            "qdet_scalar",
            Some(s.re),
            format!("qdet is {:+.10} + {:+.3e}i times Id (spread {:.1e} over the grid)", s.re, s.im, spread),
        );
    }
    let pairs = [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Minus), (Sign::Plus, Sign::Minus)];
    for (n, name, gate) in [(1usize, "rll_v1", 1e-8), (2, "rll_v2", 1e-7)] {
        col.sweep(name, gate, || {
            let mut out = Vec::new();
            for &x in &grid.points() {
                for s in pairs {
                    out.push((x, rll_residual(n, z, c(x, -0.1), c(0.5 * x - 0.3, -0.3), s, &p, trunc)));
                }
            }
            out
        });
    }
    let cop: Vec<_> = [c(-0.25, 0.0), c(0.3, 0.0)]
        .iter()
        .map(|&z2| coproduct_residuals(c(0.3, 0.0), z2, c(0.9, 0.0), c(0.2, 0.0), &p, trunc))
        .collect();
    for key in ["coproduct_rll", "coproduct_qdet_primitive", "coproduct_coassociative"] {
        col.sweep(key, 1e-6, || {
            cop.iter()
                .enumerate()
                .map(|(i, r)| {
                    let v = r
                        .as_ref()
                        .map_err(|e| e.clone())
                        .map(|v| v.iter().find(|x| x.name == key).map_or(f64::INFINITY, |x| x.value));
                    (i as f64, v)
                })
                .collect()
        });
    }
    col.sweep("loperator_shift", 1e-7, || {
        let mut out = Vec::new();
        for n in 1..=2 {
            out.push((n as f64, loperator_shift_residual_n(n, c(0.4, 0.2), c(0.0, 0.0), &p, trunc)));
        }
        out
    });
    let mut skl: BTreeMap<String, Vec<(f64, Result<f64>)>> = BTreeMap::new();
    for n in 1..=4usize {
        match sklyanin_residuals(n, c(0.2, 0.0), &p) {
            Ok((printed, corrected)) => {
                for r in printed.iter().chain(corrected.iter()) {
                    skl.entry(r.name.clone()).or_default().push((n as f64, Ok(r.value)));
                }
            }
            Err(e) => {
                skl.entry("ef_h0".into()).or_default().push((n as f64, Err(e)));
            }
        }
    }
    for (name, pts) in skl {
        if name.ends_with("_sign_corrected") {
            let v = pts.iter().filter_map(|(_, r)| r.as_ref().ok().copied()).fold(0.0, f64::max);
            col.info(&format!("sklyanin_{name}"), Some(v), "with the [S0, .] coefficient sign flipped");
            continue;
        }
        let gate = if name == "casimir" { 1e-12 } else { 1e-11 };
        col.sweep(&format!("sklyanin_{name}"), gate, || pts);
    }
    col.sweep("gauss_relations", 1e-9, || {
        let mut out = Vec::new();
        for n in 1..=3usize {
            let r = gauss_relation_residuals(n, c(0.1, 0.0), c(0.7, -0.3), c(0.1, -0.5), &p)
                .map(|v| v.iter().map(|x| x.value).fold(0.0, f64::max));
            out.push((n as f64, r));
        }
        out
    });
}

fn mid_strip(ch: Channel, sign: Sign, p: &AlgebraParams) -> Result<f64> {
    let (a, b) = sr::strip(ch, sign, p)?;
    Ok(0.5 * (a + b))
}

fn riemann_fixtures(p: &AlgebraParams) -> Vec<TestCurrent> {
    let mut v = Vec::new();
    for ch in [Channel::E, Channel::F] {
        v.push(TestCurrent::gaussian(ch));
        v.push(TestCurrent::sech(p.eta, ch));
    }
    v
}

/// Quasi-periodicity defect relative to |x⁻(u)| over u = x + i·(strip middle).
pub fn riemann_quasiperiodicity_relative(p: &AlgebraParams, xs: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for cur in riemann_fixtures(p) {
        let y = mid_strip(cur.channel, Sign::Minus, p)?;
        for &x in xs {
            let u = c(x, y);
            let r = sr::quasiperiodicity_residual(&cur, u, p)?;
            let s = sr::laplace_half_current(&cur, u, Sign::Minus, p)?.value.norm();
            worst = worst.max(r / s.max(1e-300));
        }
    }
    Ok(worst)
}

pub const NEGATIVE_CONTROL_FACTOR: f64 = 1.01;
const NEGATIVE_CONTROL_XS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

fn suite_riemann(col: &mut Collector, p: &AlgebraParams) {
    let grid = col.cfg.grid;
    let xs: Vec<f64> = grid.resampled(3.min(grid.count));
    col.sweep("laplace_vs_cauchy", 1e-8, || {
        let mut out = Vec::new();
        for cur in riemann_fixtures(p) {
            for sign in [Sign::Plus, Sign::Minus] {
                for &x in &xs {
                    let r = (|| {
                        let u = c(x, mid_strip(cur.channel, sign, p)? + 0.15);
                        let a = sr::laplace_half_current(&cur, u, sign, p)?.value;
                        let b = sr::cauchy_half_current(&cur, u, sign, p)?.value;
                        Ok((a - b).norm())
                    })();
                    out.push((x, r));
                }
            }
        }
        out
    });
    let p0 = p.at_level_zero();
    col.sweep("laplace_vs_cauchy_h_level0", 1e-8, || {
        let cur = TestCurrent::odd_gaussian(Channel::H);
        let mut out = Vec::new();
        for sign in [Sign::Plus, Sign::Minus] {
            for &x in &xs {
                let r = (|| {
                    let u = c(x, mid_strip(Channel::H, sign, &p0)?);
                    let a = sr::laplace_half_current(&cur, u, sign, &p0)?.value;
                    let b = sr::cauchy_half_current(&cur, u, sign, &p0)?.value;
                    Ok((a - b).norm())
                })();
                out.push((x, r));
            }
        }
        out
    });
    let eps = sr::default_eps_seq(p);
    let ur = [-0.6, 0.5];
    col.sweep("ding_frenkel_jump", 1e-6, || {
        let mut out = Vec::new();
        for cur in riemann_fixtures(p) {
            for &x in &ur {
                out.push((x, sr::ding_frenkel_residual(&cur, x, p, &eps)));
            }
        }
        out
    });
    let mut sums = Vec::new();
    let mut diffs = Vec::new();
    for cur in riemann_fixtures(p) {
        for &x in &ur {
            match sr::plemelj_average_residuals(&cur, x, p, &eps) {
                Ok((s, d)) => {
                    sums.push((x, Ok(s)));
                    diffs.push((x, Ok(d)));
                }
                Err(e) => {
                    sums.push((x, Err(e.clone())));
                    diffs.push((x, Err(e)));
                }
            }
        }
    }
    col.sweep("plemelj_sum", 1e-6, || sums);
    col.sweep("plemelj_difference", 1e-6, || diffs);
    col.sweep("quasiperiodicity", 1e-7, || {
        let mut out = Vec::new();
        for cur in riemann_fixtures(p) {
            for &x in &xs {
                let r = mid_strip(cur.channel, Sign::Minus, p)
                    .and_then(|y| sr::quasiperiodicity_residual(&cur, c(x, y), p));
                out.push((x, r));
            }
        }
        out
    });
    let taus = [0.5, 1.0, 2.0];
    col.sweep("kappa_odd", 1e-10, || {
        taus.iter()
            .map(|&t| {
                let r = (|| Ok((sr::kappa_kernel_complex(t, p)? + sr::kappa_kernel_complex(-t, p)?).norm()))();
                (t, r)
            })
            .collect()
    });
    col.sweep("kappa_real", 1e-10, || {
        taus.iter()
            .map(|&t| (t, sr::kappa_kernel_complex(t, p).map(|k| k.im.abs())))
            .collect()
    });
    let q = p.perturbed_eta_prime(NEGATIVE_CONTROL_FACTOR);
    col.sweep_above("negative_control_eta_prime", 1e-2, || {
        vec![(NEGATIVE_CONTROL_FACTOR, riemann_quasiperiodicity_relative(&q, &NEGATIVE_CONTROL_XS))]
    });
    if let Ok(v) = riemann_quasiperiodicity_relative(p, &NEGATIVE_CONTROL_XS) {
        col.info("quasiperiodicity_relative_unperturbed", Some(v), "baseline for the η′ control");
    }
}

/// max relative exchange-ratio residual over all relations and the grid.
pub fn freefield_exchange_max(p: &AlgebraParams, xs: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for rel in ff::ExchangeRelation::ALL {
        for &x in xs {
            let w = c(x, 0.0);
            let r = ff::exchange_ratio_residual(rel, w, p)?;
            worst = worst.max(r / rel.printed_ratio(w, p).norm().max(1.0));
        }
    }
    Ok(worst)
}

fn suite_freefield(col: &mut Collector, p: &AlgebraParams) {
    let grid = col.cfg.grid;
    let xs = grid.points();
    let depth = 0.35;
    for pair in ff::PairTag::TABLE.iter().chain([ff::PairTag::ZZ, ff::PairTag::ZpZp].iter()) {
        col.sweep(&format!("contraction_{}", pair.name()), 1e-6, || {
            [-0.4, 0.3]
                .iter()
                .map(|&x| (x, ff::closed_form_vs_quadrature(*pair, c(x, pair.strip_bound(p) + depth), p)))
                .collect()
        });
    }
    let mut fam: BTreeMap<&'static str, Vec<Point>> = BTreeMap::new();
    for rel in ff::ExchangeRelation::ALL {
        for &x in &xs {
            fam.entry(rel.family()).or_default().push((x, ff::exchange_ratio_residual(rel, c(x, 0.0), p)));
        }
    }
    for (name, pts) in fam {
        col.sweep(&format!("exchange_{name}"), 1e-6, || pts);
    }
    let poles = ff::ef_pole_check(p);
    col.single("ef_pole_positions", 1e-8, || {
        poles.as_ref().map_err(|e| e.clone()).map(|v| v.iter().map(|q| q.error).fold(0.0, f64::max))
    });
    col.single("ef_residue_channels", 1e-12, || {
        poles.as_ref().map_err(|e| e.clone()).map(|v| v.iter().map(|q| q.channel_residual).fold(0.0, f64::max))
    });
    for (plus, name) in [(true, "intertwiner_h_plus"), (false, "intertwiner_h_minus")] {
        col.sweep(name, 1e-6, || {
            std::iter::once(0.7)
                .chain(xs.iter().copied())
                .map(|x| (x, ff::intertwiner_ratio_residual(plus, c(x, 0.0), p)))
                .collect()
        });
    }
    col.sweep("fz_anticommutation", 1e-6, || {
        xs.iter().map(|&x| (x, ff::fz_anticommutation_residual(c(x, 0.1), p))).collect()
    });
    col.sweep("zf_tangent_ratio", 1e-6, || {
        xs.iter().map(|&x| (x, ff::zz_prime_tangent_residual(c(x, 0.0), p))).collect()
    });
    let consts = ff::zf_constants(p);
    if let Ok((g, gp)) = &consts {
        col.info("g_printed_im", Some(g.im), format!("g = {:.10} {:+.10}i", g.re, g.im));
        col.info("g_prime_printed_im", Some(gp.im), format!("g' = {:.10} {:+.10}i", gp.re, gp.im));
    }
    col.single("zf_constant_g", 1e-5, || {
        let (g, _) = consts.clone()?;
        let o = ff::g_limit_oracle(p)?;
        Ok((o.value - g).norm())
    });
    let gpo = ff::g_prime_limit_oracle(p);
    col.single("zf_constant_g_prime", 1e-5, || {
        let (_, gp) = consts.clone()?;
        let o = gpo.clone()?;
        Ok((o.value - gp).norm())
    });
    if let (Ok((_, gp)), Ok(o)) = (&consts, &gpo) {
        let r = o.value / gp;
        col.info(
            "g_prime_limit_over_printed",
            Some(r.norm()),
            format!(
                "contraction limit {:.8} {:+.8}i, ratio to printed {:.6} {:+.6}i (2π/η′ = {:.6})",
                o.value.re,
                o.value.im,
                r.re,
                r.im,
                2.0 * PI / p.eta_prime
            ),
        );
    }
    col.sweep("luk_exponent_e", 1e-12, || xs.iter().map(|&x| (x, Ok(ff::luk_exponent_residual(c(x, 0.0), p).0))).collect());
    col.sweep("luk_exponent_f", 1e-12, || xs.iter().map(|&x| (x, Ok(ff::luk_exponent_residual(c(x, 0.0), p).1))).collect());
    col.single("luk_scalar_e_gamma", 1e-5, || {
        let (a, b) = ff::luk_scalar_check(c(0.2, 0.3), p)?;
        Ok(a.max(b))
    });
    col.sweep("miki_diagonal", 1e-12, || xs.iter().map(|&x| (x, Ok(ff::miki_diagonal_residual(c(x, 0.0), p)))).collect());
    col.single("miki_prefactor", 1e-6, || {
        let (a, b) = ff::miki_prefactor_residual(p)?;
        Ok(a.max(b))
    });
    let (same, flipped) = ff::miki_field_sign(c(0.3, 0.0), p);
    col.info(
        "miki_field_exponent_sign",
        Some(same),
        format!("Z(u−iℏ/4)Z′(u−3iℏ/4) exponent minus printed L+ exponent: {same:.3e}; plus: {flipped:.3e}"),
    );
    col.sweep_above("miki_negative_control_eta_swap", 1e-2, || {
        vec![(0.0, Ok(ff::miki_diagonal_residual_with_shift(c(0.3, 0.0), 1.0 / p.eta_prime, p)))]
    });
    let q = p.perturbed_eta_prime(NEGATIVE_CONTROL_FACTOR);
    col.sweep_above("negative_control_eta_prime", 1e-2, || {
        vec![(NEGATIVE_CONTROL_FACTOR, freefield_exchange_max(&q, &xs))]
    });
}

fn suite_ordering(col: &mut Collector, p: &AlgebraParams) {
    for kind in OrderingKind::ALL {
        let probe = match OrderingProbe::new(kind, p, OrderingGrid::default()) {
            Ok(x) => x,
            Err(e) => {
                col.info(&format!("ordering_{}", kind.name()), None, format!("not evaluated: {e}"));
                continue;
            }
        };
        let sup = probe.sup_phi_hat();
        if sup >= 1.0 {
            col.info(
                &format!("ordering_{}_sup_phi_hat", kind.name()),
                Some(sup),
                "resummation diverges at this parameter point (reported, not failed)",
            );
            continue;
        }
        col.single(&format!("ordering_{}_sup_phi_hat", kind.name()), 1.0, || Ok(sup));
        col.single(&format!("ordering_{}_series20_vs_resummed", kind.name()), 1e-6, || probe.series_vs_resummed(20));
    }
}

// ---------------------------------------------------------------------------
// probes and output

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub hbar: f64,
    pub eta: f64,
    pub kind: String,
    pub sup_phi_hat: Option<f64>,
    pub series_vs_resummed: Option<f64>,
    pub status: String,
}

/// sup|φ̂| and series-vs-resummed agreement over an (ℏ, η) grid at c = 1.
pub fn probe_ordering(hbar: GridSpec, eta: GridSpec) -> Vec<ProbeRow> {
    let mut rows = Vec::new();
    for h in hbar.points() {
        for e in eta.points() {
            for kind in OrderingKind::ALL {
                let base = |status: String, sup: Option<f64>, d: Option<f64>| ProbeRow {
                    hbar: h,
                    eta: e,
                    kind: kind.name().to_string(),
                    sup_phi_hat: sup,
                    series_vs_resummed: d,
                    status,
                };
                let p = match AlgebraParams::new(h, e, 1.0) {
                    Ok(p) => p,
                    Err(err) => {
                        rows.push(base(format!("skipped:{err}"), None, None));
                        continue;
                    }
                };
                match OrderingProbe::new(kind, &p, OrderingGrid::default()) {
                    Ok(pr) => {
                        let sup = pr.sup_phi_hat();
                        if sup >= 1.0 {
                            rows.push(base("divergent".into(), Some(sup), None));
                        } else {
                            match pr.series_vs_resummed(20) {
                                Ok(d) => rows.push(base("convergent".into(), Some(sup), Some(d))),
                                Err(err) => rows.push(base(format!("error:{err}"), Some(sup), None)),
                            }
                        }
                    }
                    Err(err) => rows.push(base(format!("skipped:{err}"), None, None)),
                }
            }
        }
    }
    rows
}

pub fn probe_rows_csv(rows: &[ProbeRow]) -> String {
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
    let mut s = String::from("hbar,eta,kind,sup_phi_hat,series_vs_resummed,status\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.hbar,
            r.eta,
            r.kind,
            opt(r.sup_phi_hat),
            opt(r.series_vs_resummed),
            r.status
        ));
    }
    s
}

/// JSON text for one or more suite reports.
pub fn report_json(reports: &[SuiteReport]) -> Result<String> {
    let s = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        #[derive(Serialize)]
        struct All<'a> {
            suites: &'a [SuiteReport],
            overall_pass: bool,
        }
        serde_json::to_string_pretty(&All { suites: reports, overall_pass: reports.iter().all(|r| r.overall_pass) })
    };
    s.map(|mut t| {
        t.push('\n');
        t
    })
    .map_err(|e| QalgError::Io(e.to_string()))
}

fn sanitize(name: &str) -> String {
    name.chars().map(|ch| if ch.is_ascii_alphanumeric() || ch == '_' { ch } else { '_' }).collect()
}

/// Writes the report. JSON goes to `out_path` (stdout when unset); CSV
/// writes one `param,residual` file per check into the `out_path`
/// directory. Returns the files written.
pub fn emit_report(reports: &[SuiteReport], cfg: &ToolkitConfig) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| QalgError::Io(e.to_string());
    match cfg.format {
        Format::Json => {
            let text = report_json(reports)?;
            match &cfg.out_path {
                Some(path) => {
                    std::fs::write(path, text).map_err(io)?;
                    Ok(vec![path.clone()])
                }
                None => {
                    print!("{text}");
                    Ok(Vec::new())
                }
            }
        }
        Format::Csv => {
            let dir = cfg.out_path.clone().unwrap_or_else(|| PathBuf::from("qalg_csv"));
            std::fs::create_dir_all(&dir).map_err(io)?;
            let mut written = Vec::new();
            for r in reports {
                for ch in &r.checks {
                    let path = dir.join(format!("{}_{}.csv", r.suite, sanitize(&ch.name)));
                    let cerr = |e: csv::Error| QalgError::Io(e.to_string());
                    let mut w = csv::Writer::from_path(&path).map_err(cerr)?;
                    w.write_record(["param", "residual"]).map_err(cerr)?;
                    for (x, v) in &ch.curve {
                        w.write_record([x.to_string(), format!("{v:e}")]).map_err(cerr)?;
                    }
                    w.flush().map_err(io)?;
                    written.push(path);
                }
            }
            Ok(written)
        }
    }
}

/// `qalg specfun eval`: gamma (re [im]), gamma2 (x_re x_im w1 w2),
/// b22 (x w1 w2).
pub fn specfun_eval(func: &str, args: &[f64]) -> Result<C64> {
    let need = |n: usize| {
        if args.len() < n {
            Err(QalgError::Config(format!("{func} needs {n} arguments, got {}", args.len())))
        } else {
            Ok(())
        }
    };
    match func {
        "gamma" => {
            need(1)?;
            gamma(c(args[0], args.get(1).copied().unwrap_or(0.0)))
        }
        "gamma2" => {
            need(4)?;
            Ok(log_gamma2_continued(c(args[0], args[1]), args[2], args[3])?.value.exp())
        }
        "b22" => {
            need(3)?;
            bernoulli22(c(args[0], 0.0), c(args[1], 0.0), c(args[2], 0.0))
        }
        _ => Err(QalgError::Config(format!("unknown function '{func}' (gamma, gamma2, b22)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg, ToolkitConfig::default());
        let p = cfg.params_for(SuiteName::Freefield).unwrap();
        assert_eq!((p.hbar, p.eta, p.c), (0.3, 0.7, 1.0));
        assert_eq!(cfg.params_for(SuiteName::Evalrep).unwrap().c, 0.0);
    }

    #[test]
    fn config_file_and_errors() {
        let cfg = parse_config_str("# comment\nhbar = 0.25\ntol.unitarity=1e-9\ngrid=-1:1:4\nformat=csv\n").unwrap();
        assert_eq!(cfg.hbar, 0.25);
        assert_eq!(cfg.tol_map["unitarity"], 1e-9);
        let g = cfg.grid.points();
        for (a, b) in g.iter().zip([-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(cfg.format, Format::Csv);
        let e = parse_config_str("hbar=0.3\nbogus\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let mut cfg = ToolkitConfig::default();
        cfg.set("c", "-1").unwrap();
        assert!(matches!(cfg.validate(), Err(QalgError::Config(_))));
        cfg.set("c", "1").unwrap();
        let p = cfg.params_for(SuiteName::Rmatrix).unwrap();
        assert!((p.eta_prime - 0.7 / 1.21).abs() < 1e-15);
        assert!("nope".parse::<SuiteName>().is_err());
        assert!(cfg.set_tol("x=0").is_ok() && cfg.validate().is_err());
    }

    #[test]
    fn specfun_suite_and_determinism() {
        let cfg = ToolkitConfig::default();
        let a = report_json(&[run_suite(SuiteName::Specfun, &cfg).unwrap()]).unwrap();
        let b = report_json(&[run_suite(SuiteName::Specfun, &cfg).unwrap()]).unwrap();
        assert_eq!(a, b);
        let r = run_suite(SuiteName::Specfun, &cfg).unwrap();
        assert!(r.overall_pass, "{a}");
        assert!(r.checks.windows(2).all(|w| w[0].name < w[1].name));
        assert!(r.checks.iter().all(|c| c.runtime_ms == 0));
    }

    #[test]
    fn specfun_eval_values() {
        let g = specfun_eval("gamma", &[5.0]).unwrap();
        assert!((g.re - 24.0).abs() < 1e-10);
        let b = specfun_eval("b22", &[0.0, 1.0, 1.0]).unwrap();
        assert!((b.re - 5.0 / 6.0).abs() < 1e-14);
        assert!(specfun_eval("zeta", &[1.0]).is_err());
    }
}
