//! Scalar test currents E(v) together with their spectra
//! ê_λ, normalised so that E(v) = ∫ e^{iλv} ê_λ dλ.

use crate::error::{QalgError, Result};
use crate::C64;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    E,
    F,
    H,
}

type Scalar = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A scalar stand-in for one of the total currents E, F, H.
#[derive(Clone)]
pub struct TestCurrent {
    pub name: String,
    values: Scalar,
    spectrum: Scalar,
    /// α with |E(v)| ≤ C e^{−α|v|}; infinite for super-exponential decay.
    pub decay_rate: f64,
    pub channel: Channel,
    zero: bool,
}

impl std::fmt::Debug for TestCurrent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestCurrent")
            .field("name", &self.name)
            .field("decay_rate", &self.decay_rate)
            .field("channel", &self.channel)
            .finish()
    }
}

impl TestCurrent {
    pub fn from_fns<V, S>(name: &str, values: V, spectrum: S, decay_rate: f64, channel: Channel) -> Self
    where
        V: Fn(f64) -> C64 + Send + Sync + 'static,
        S: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        TestCurrent {
            name: name.to_string(),
            values: Arc::new(values),
            spectrum: Arc::new(spectrum),
            decay_rate,
            channel,
            zero: false,
        }
    }

    /// E(v) = e^{−v²}.
    pub fn gaussian(channel: Channel) -> Self {
        Self::from_fns(
            "gaussian",
            |v| C64::new((-v * v).exp(), 0.0),
            |l| C64::new((-l * l / 4.0).exp() / (2.0 * PI.sqrt()), 0.0),
            f64::INFINITY,
            channel,
        )
    }

    /// E(v) = v e^{−v²}; odd, so ê_0 = 0. Used for the c = 0 h channel.
    pub fn odd_gaussian(channel: Channel) -> Self {
        Self::from_fns(
            "odd_gaussian",
            |v| C64::new(v * (-v * v).exp(), 0.0),
            |l| C64::new(0.0, -l * PI.sqrt() / 2.0 * (-l * l / 4.0).exp() / (2.0 * PI)),
            f64::INFINITY,
            channel,
        )
    }

    /// E(v) = sech(πηv).
    pub fn sech(eta: f64, channel: Channel) -> Self {
        Self::from_fns(
            "sech",
            move |v| C64::new(1.0 / (PI * eta * v).cosh(), 0.0),
            move |l| C64::new(1.0 / (l / (2.0 * eta)).cosh() / (2.0 * PI * eta), 0.0),
            PI * eta,
            channel,
        )
    }

    /// E(v) = 1/(1+v²): only algebraic decay, fails the precondition.
    pub fn rational(channel: Channel) -> Self {
        Self::from_fns(
            "rational",
            |v| C64::new(1.0 / (1.0 + v * v), 0.0),
            |l: f64| C64::new((-l.abs()).exp() / 2.0, 0.0),
            0.0,
            channel,
        )
    }

    pub fn zero(channel: Channel) -> Self {
        let mut c = Self::from_fns("zero", |_| C64::new(0.0, 0.0), |_| C64::new(0.0, 0.0), f64::INFINITY, channel);
        c.zero = true;
        c
    }

    /// Uniformly sampled current. Values between samples use 4-point
    /// Lagrange interpolation, the spectrum a trapezoid sum.
    pub fn from_samples(name: &str, v0: f64, dv: f64, samples: Vec<C64>, channel: Channel) -> Result<Self> {
        if samples.len() < 8 || !(dv > 0.0) {
            return Err(QalgError::Precondition("need at least 8 uniformly spaced samples".into()));
        }
        let decay = estimate_decay(v0, dv, &samples);
        if !(decay > 0.0) {
            return Err(QalgError::Precondition(format!(
                "sampled current '{name}' does not decay inside its window"
            )));
        }
        let s = Arc::new(samples);
        let sv = s.clone();
        let values = move |v: f64| interp4(v0, dv, &sv, v);
        let spectrum = move |l: f64| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, e) in s.iter().enumerate() {
                let v = v0 + j as f64 * dv;
                acc += e * C64::from_polar(1.0, -l * v);
            }
            acc * dv / (2.0 * PI)
        };
        Ok(Self::from_fns(name, values, spectrum, decay, channel))
    }

    /// Load a fixture with columns v, Re E, Im E (header optional).
    pub fn from_csv(path: &Path, channel: Channel) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| QalgError::Io(e.to_string()))?;
        let mut vs = Vec::new();
        let mut es = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| QalgError::Io(e.to_string()))?;
            let parsed: Vec<Option<f64>> = rec.iter().map(|s| s.parse::<f64>().ok()).collect();
            if parsed.len() < 3 || parsed.iter().take(3).any(|x| x.is_none()) {
                if vs.is_empty() {
                    continue; // header
                }
                return Err(QalgError::Io(format!("bad row in {}", path.display())));
            }
            vs.push(parsed[0].unwrap());
            es.push(C64::new(parsed[1].unwrap(), parsed[2].unwrap()));
        }
        if vs.len() < 8 {
            return Err(QalgError::Io(format!("{}: too few rows", path.display())));
        }
        let dv = (vs[vs.len() - 1] - vs[0]) / (vs.len() - 1) as f64;
        for (j, v) in vs.iter().enumerate() {
            if (v - (vs[0] + j as f64 * dv)).abs() > 1e-9 * dv.abs().max(1.0) {
                return Err(QalgError::Io(format!("{}: samples are not uniformly spaced", path.display())));
            }
        }
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::from_samples(&name, vs[0], dv, es, channel)
    }

    pub fn with_channel(mut self, channel: Channel) -> Self {
        self.channel = channel;
        self
    }

    pub fn value(&self, v: f64) -> C64 {
        (self.values)(v)
    }

    pub fn spectrum(&self, lambda: f64) -> C64 {
        (self.spectrum)(lambda)
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn validate(&self) -> Result<()> {
        if self.decay_rate > 0.0 {
            Ok(())
        } else {
            Err(QalgError::Precondition(format!(
                "current '{}' lacks exponential decay (rate {})",
                self.name, self.decay_rate
            )))
        }
    }
}

fn interp4(v0: f64, dv: f64, s: &[C64], v: f64) -> C64 {
    let x = (v - v0) / dv;
    let n = s.len();
    if x < 0.0 || x > (n - 1) as f64 {
        return C64::new(0.0, 0.0);
    }
    let j = (x.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = x - j as f64;
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (t - b as f64) / (a as f64 - b as f64);
            }
        }
        acc += s[j + a] * w;
    }
    acc
}

// decay rate from the peak-to-tail drop; the outer tenth of the window on
// each side must be below 1e-10 of the peak for the truncation to be sound
fn estimate_decay(v0: f64, dv: f64, s: &[C64]) -> f64 {
    let n = s.len();
    let (jp, peak) = s
        .iter()
        .enumerate()
        .map(|(j, e)| (j, e.norm()))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    if peak == 0.0 {
        return f64::INFINITY;
    }
    let m = (n / 10).max(1);
    let tail = s[..m].iter().chain(s[n - m..].iter()).map(|e| e.norm()).fold(0.0, f64::max);
    if tail > 1e-10 * peak {
        return 0.0;
    }
    if tail == 0.0 {
        return f64::INFINITY;
    }
    let vp = v0 + jp as f64 * dv;
    let inner_lo = v0 + m as f64 * dv;
    let inner_hi = v0 + (n - m) as f64 * dv;
    let d = (vp - inner_lo).min(inner_hi - vp).max(dv);
    (peak / tail).ln() / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;

    fn inverse_fourier(c: &TestCurrent, v: f64) -> C64 {
        let f = |l: f64| c.spectrum(l) * C64::from_polar(1.0, l * v);
        adaptive(&f, -60.0, 60.0, &[0.0], 1e-15, 1e-13, 4000).value
    }

    #[test]
    fn spectra_match_their_currents() {
        for c in [TestCurrent::gaussian(Channel::E), TestCurrent::odd_gaussian(Channel::H), TestCurrent::sech(0.7, Channel::F)] {
            for &v in &[-0.8, 0.0, 0.4, 1.7] {
                assert!((inverse_fourier(&c, v) - c.value(v)).norm() < 1e-11, "{} at {v}", c.name);
            }
        }
    }

    #[test]
    fn sampled_current_interpolates_and_transforms() {
        let dv = 0.01;
        let v0 = -10.0;
        let s: Vec<C64> = (0..2001).map(|j| C64::new((-(v0 + j as f64 * dv).powi(2)).exp(), 0.0)).collect();
        let c = TestCurrent::from_samples("g", v0, dv, s, Channel::E).unwrap();
        let g = TestCurrent::gaussian(Channel::E);
        assert!((c.value(0.3333) - g.value(0.3333)).norm() < 1e-8);
        assert!((c.spectrum(1.3) - g.spectrum(1.3)).norm() < 1e-12);
        assert!(c.decay_rate > 0.0);
    }

    #[test]
    fn rational_current_is_rejected() {
        assert!(matches!(TestCurrent::rational(Channel::E).validate(), Err(QalgError::Precondition(_))));
        let s: Vec<C64> = (0..401).map(|j| C64::new(1.0 / (1.0 + (-20.0 + 0.1 * j as f64).powi(2)), 0.0)).collect();
        assert!(TestCurrent::from_samples("r", -20.0, 0.1, s, Channel::E).is_err());
    }
}
