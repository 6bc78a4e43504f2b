//! Gaussian smoothing `ψ_F(t, x) = E[F(x + √t·Y)]`, `Y ~ N(0, 1)`, and the
//! test functions it is applied to.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss-Hermite rule for the weight `e^{-z²}`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub const DEFAULT_NODES: usize = 64;

    /// Computes the `n`-point rule by Newton iteration on the orthonormal
    /// Hermite recurrence.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("Gauss-Hermite rule needs n >= 1".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let pim4 = PI.powf(-0.25);
        let m = n.div_ceil(2);
        let mut z: f64 = 0.0;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NotConverged {
                    what: "Gauss-Hermite node",
                    estimate: z,
                    error: f64::NAN,
                });
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[m - 1] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// The shared 64-point rule.
    pub fn default_rule() -> &'static GaussHermite {
        static RULE: OnceLock<GaussHermite> = OnceLock::new();
        RULE.get_or_init(|| GaussHermite::new(Self::DEFAULT_NODES).expect("64-point rule"))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f(x + √t·y) φ(y) dy` for the standard normal density `φ`.
    pub fn smooth<F: Fn(f64) -> f64>(&self, f: F, t: f64, x: f64) -> f64 {
        if t == 0.0 {
            return f(x);
        }
        let scale = (2.0 * t).sqrt();
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * f(x + scale * z))
            .sum();
        sum / PI.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// Coefficients in ascending order.
    Polynomial(Vec<f64>),
    /// `amp · sin(freq·x + phase)`
    Sine { amp: f64, freq: f64, phase: f64 },
    /// `amp · e^{rate·x}`
    Exponential { amp: f64, rate: f64 },
}

/// Growth constants asserting `|F^{(k)}(x)| ≤ C·e^{a·x²}` for `k = 0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Growth {
    pub c: f64,
    pub a: f64,
}

/// A `C²` test function closed under differentiation.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    shape: Shape,
    growth_rate: f64,
}

/// Growth exponent used for polynomials unless overridden.
pub const POLYNOMIAL_GROWTH_RATE: f64 = 0.01;

impl TestFunction {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidFunction("non-finite polynomial coefficient".into()));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        let growth_rate = if coeffs.len() <= 1 { 0.0 } else { POLYNOMIAL_GROWTH_RATE };
        Ok(Self {
            shape: Shape::Polynomial(coeffs),
            growth_rate,
        })
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Self::polynomial(c).expect("finite coefficients")
    }

    pub fn sine(amp: f64, freq: f64, phase: f64) -> Result<Self> {
        if !(amp.is_finite() && freq.is_finite() && phase.is_finite()) {
            return Err(Error::InvalidFunction("non-finite sine parameter".into()));
        }
        Ok(Self {
            shape: Shape::Sine { amp, freq, phase },
            growth_rate: 0.0,
        })
    }

    /// `amp·e^{rate·x}` with growth exponent `a > 0`; the matching constant
    /// is `C = |amp|·max(1, |rate|, rate²)·e^{rate²/(4a)}`.
    pub fn exponential(amp: f64, rate: f64, a: f64) -> Result<Self> {
        if !(amp.is_finite() && rate.is_finite()) {
            return Err(Error::InvalidFunction("non-finite exponential parameter".into()));
        }
        if !(a > 0.0 && a.is_finite()) && rate != 0.0 {
            return Err(Error::InvalidFunction(
                "an exponential needs a positive growth exponent".into(),
            ));
        }
        Ok(Self {
            shape: Shape::Exponential { amp, rate },
            growth_rate: a,
        })
    }

    /// Overrides the growth exponent `a`.
    pub fn with_growth_rate(mut self, a: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::InvalidFunction(format!("growth exponent {a} must be >= 0")));
        }
        let needs_positive = match &self.shape {
            Shape::Polynomial(c) => c.len() > 1,
            Shape::Sine { .. } => false,
            Shape::Exponential { rate, .. } => *rate != 0.0,
        };
        if needs_positive && a == 0.0 {
            return Err(Error::InvalidFunction(
                "an unbounded function needs a positive growth exponent".into(),
            ));
        }
        self.growth_rate = a;
        Ok(self)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci),
            Shape::Sine { amp, freq, phase } => amp * (freq * x + phase).sin(),
            Shape::Exponential { amp, rate } => amp * (rate * x).exp(),
        }
    }

    /// The `k`-th derivative.
    pub fn derivative(&self, k: usize) -> Self {
        let shape = match &self.shape {
            Shape::Polynomial(c) => {
                let mut c = c.clone();
                for _ in 0..k {
                    if c.len() <= 1 {
                        c = vec![0.0];
                        break;
                    }
                    c = c.iter().enumerate().skip(1).map(|(i, ci)| i as f64 * ci).collect();
                }
                Shape::Polynomial(c)
            }
            Shape::Sine { amp, freq, phase } => Shape::Sine {
                amp: amp * freq.powi(k as i32),
                freq: *freq,
                phase: phase + k as f64 * FRAC_PI_2,
            },
            Shape::Exponential { amp, rate } => Shape::Exponential {
                amp: amp * rate.powi(k as i32),
                rate: *rate,
            },
        };
        Self {
            shape,
            growth_rate: self.growth_rate,
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        self.eval(x)
    }

    pub fn f1(&self, x: f64) -> f64 {
        self.derivative(1).eval(x)
    }

    pub fn f2(&self, x: f64) -> f64 {
        self.derivative(2).eval(x)
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.shape, Shape::Polynomial(_))
    }

    pub fn growth_rate(&self) -> f64 {
        self.growth_rate
    }

    /// Growth constants for `F`, `F'` and `F''` at the configured exponent.
    pub fn growth(&self) -> Growth {
        let a = self.growth_rate;
        let c = match &self.shape {
            Shape::Sine { amp, freq, .. } => amp.abs() * 1f64.max(freq.abs()).max(freq * freq),
            Shape::Exponential { amp, rate } => {
                let scale = amp.abs() * 1f64.max(rate.abs()).max(rate * rate);
                if *rate == 0.0 {
                    scale
                } else {
                    scale * (rate * rate / (4.0 * a)).exp()
                }
            }
            Shape::Polynomial(c) if c.len() <= 1 => c[0].abs(),
            Shape::Polynomial(c) => {
                // |p(x)|e^{-ax²} peaks within a few multiples of √(deg/a)
                let reach = 3.0 * ((c.len() as f64) / a).sqrt() + 1.0;
                let n = 20_000;
                (0..3)
                    .map(|k| {
                        let d = self.derivative(k);
                        (0..=n)
                            .map(|i| {
                                let x = -reach + 2.0 * reach * i as f64 / n as f64;
                                d.eval(x).abs() * (-a * x * x).exp()
                            })
                            .fold(0.0, f64::max)
                    })
                    .fold(0.0, f64::max)
                    * 1.01
            }
        };
        Growth { c, a }
    }

    /// Checks `a < 1/(4λ)`.
    pub fn check_growth(&self, lambda: f64) -> Result<()> {
        let bound = 1.0 / (4.0 * lambda);
        if self.growth_rate < bound {
            Ok(())
        } else {
            Err(Error::GrowthViolation {
                a: self.growth_rate,
                bound,
            })
        }
    }

    /// `ψ_F(t, x)` with the shared 64-point rule and no domain check.
    #[inline]
    pub fn psi_unchecked(&self, t: f64, x: f64) -> f64 {
        GaussHermite::default_rule().smooth(|y| self.eval(y), t, x)
    }

    /// Closed form of `ψ_F(t, x)`, used as an independent reference.
    pub fn psi_closed_form(&self, t: f64, x: f64) -> f64 {
        match &self.shape {
            Shape::Sine { amp, freq, phase } => {
                amp * (-freq * freq * t / 2.0).exp() * (freq * x + phase).sin()
            }
            Shape::Exponential { amp, rate } => amp * (rate * x + rate * rate * t / 2.0).exp(),
            Shape::Polynomial(c) => {
                // E[(x + √t Y)^k] = Σ_j C(k, 2j) x^{k-2j} t^j (2j-1)!!
                let mut total = 0.0;
                for (k, ck) in c.iter().enumerate() {
                    if *ck == 0.0 {
                        continue;
                    }
                    let mut moment = 0.0;
                    let mut binom = 1.0;
                    let mut dfact = 1.0;
                    for j in 0..=k / 2 {
                        if j > 0 {
                            let (kf, jf) = (k as f64, j as f64);
                            binom *= (kf - 2.0 * jf + 2.0) * (kf - 2.0 * jf + 1.0)
                                / ((2.0 * jf - 1.0) * (2.0 * jf));
                            dfact *= 2.0 * jf - 1.0;
                        }
                        moment += binom * x.powi((k - 2 * j) as i32) * t.powi(j as i32) * dfact;
                    }
                    total += ck * moment;
                }
                total
            }
        }
    }

    /// Human-readable label such as `x^2` or `sin`.
    pub fn label(&self) -> String {
        match &self.shape {
            Shape::Polynomial(c) => {
                let nz: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0.0).collect();
                if nz.len() == 1 && c[nz[0]] == 1.0 {
                    match nz[0] {
                        0 => "1".into(),
                        1 => "x".into(),
                        k => format!("x^{k}"),
                    }
                } else {
                    format!("poly{c:?}")
                }
            }
            Shape::Sine { amp, freq, phase } => {
                if (*amp, *freq, *phase) == (1.0, 1.0, 0.0) {
                    "sin".into()
                } else {
                    format!("{amp}*sin({freq}x+{phase})")
                }
            }
            Shape::Exponential { amp, rate } => {
                if (*amp, *rate) == (1.0, 1.0) {
                    "exp".into()
                } else {
                    format!("{amp}*exp({rate}x)")
                }
            }
        }
    }
}

/// `ψ_F(t, x)`; `t = 0` returns `F(x)` exactly.
pub fn psi(f: &TestFunction, t: f64, x: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            domain: "[0, ∞)".into(),
        });
    }
    Ok(f.psi_unchecked(t, x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatResidual {
    /// `|∂ₜψ_F - ½ψ_{F''}|` with a central difference for `∂ₜ`.
    pub dt_residual: f64,
    /// `|∂ₓψ_F - ψ_{F'}|` with a central difference for `∂ₓ`.
    pub dx_residual: f64,
}

/// Checks the heat identities `∂ₓψ_F = ψ_{F'}` and `∂ₜψ_F = ½ψ_{F''}` with
/// central differences of step `fd_step`.
pub fn heat_identity_residual(f: &TestFunction, t: f64, x: f64, fd_step: f64) -> Result<HeatResidual> {
    if !(fd_step > 0.0) || !(t > fd_step) {
        return Err(Error::Precondition(format!(
            "need t > fd_step > 0 (t = {t}, fd_step = {fd_step})"
        )));
    }
    let h = fd_step;
    let dt = (f.psi_unchecked(t + h, x) - f.psi_unchecked(t - h, x)) / (2.0 * h);
    let dx = (f.psi_unchecked(t, x + h) - f.psi_unchecked(t, x - h)) / (2.0 * h);
    Ok(HeatResidual {
        dt_residual: (dt - 0.5 * f.derivative(2).psi_unchecked(t, x)).abs(),
        dx_residual: (dx - f.derivative(1).psi_unchecked(t, x)).abs(),
    })
}
