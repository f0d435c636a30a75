//! Radial trial functions and the extremal families.
//!
//! A [`RadialProfile`] is a base [`Shape`] plus two modifiers: `eval(r) =
//! scale · shape(dilation · r)`. Radial shapes live on `(0, ∞)`; the line
//! shapes ([`Shape::CoshPower`], [`Shape::LineGrid`]) are defined on all of
//! `R` and feed the convolution functional.
//!
//! Grid shapes interpolate `ln f` with a monotone cubic Hermite spline, in
//! `ln r` for radial grids (so power tails are straight lines) and in `x`
//! for line grids (so exponential tails are straight lines).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Power-law behaviour of a radial function: `f(r) ~ r^origin` as `r → 0`
/// and `f(r) ~ r^tail` as `r → ∞`. `+∞` at the origin (or `−∞` in the tail)
/// means faster than any power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    pub origin: f64,
    pub tail: f64,
}

/// A function on `(0, ∞)` with a known derivative and known power-law ends.
pub trait RadialFunction {
    fn value(&self, r: f64) -> f64;
    fn slope(&self, r: f64) -> f64;
    fn asymptotics(&self) -> Asymptotics;
    /// Power-law ends of the derivative. The default `r^{e−1}` is exact for
    /// non-constant power ends and a lower bound at the origin otherwise.
    fn slope_asymptotics(&self) -> Asymptotics {
        let a = self.asymptotics();
        Asymptotics {
            origin: a.origin - 1.0,
            tail: a.tail - 1.0,
        }
    }
    /// `(ln|f(r)|, sign f(r))`, finite wherever the magnitude is
    /// representable in log form even if `f(r)` itself overflows.
    fn ln_abs_value(&self, r: f64) -> (f64, f64) {
        let v = self.value(r);
        (v.abs().ln(), v.signum())
    }
    /// Points where the function is only piecewise smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// True when the function vanishes identically.
    fn is_zero(&self) -> bool {
        false
    }
}

/// A function on `R` with exponential decay `e^{left·x}` as `x → −∞` and
/// `e^{−right·x}` as `x → ∞`.
pub trait LineFunction {
    fn value(&self, x: f64) -> f64;
    /// `(left_rate, right_rate)`, both positive.
    fn rates(&self) -> (f64, f64);
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    fn is_zero(&self) -> bool {
        false
    }
}

impl<T: RadialFunction + ?Sized> RadialFunction for &T {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn slope(&self, r: f64) -> f64 {
        (**self).slope(r)
    }
    fn asymptotics(&self) -> Asymptotics {
        (**self).asymptotics()
    }
    fn slope_asymptotics(&self) -> Asymptotics {
        (**self).slope_asymptotics()
    }
    fn ln_abs_value(&self, r: f64) -> (f64, f64) {
        (**self).ln_abs_value(r)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
    fn is_zero(&self) -> bool {
        (**self).is_zero()
    }
}

impl<T: LineFunction + ?Sized> LineFunction for &T {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
    fn rates(&self) -> (f64, f64) {
        (**self).rates()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
    fn is_zero(&self) -> bool {
        (**self).is_zero()
    }
}

#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[inline]
fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Piecewise cubic Hermite interpolant with linear extension past both ends.
#[derive(Debug, Clone, PartialEq)]
struct Hermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl Hermite {
    fn new(xs: Vec<f64>, ys: Vec<f64>, left_slope: f64, right_slope: f64) -> Self {
        let n = xs.len();
        let mut ds = vec![0.0; n];
        // fourth-order derivative estimates from the local 5-point interpolant
        for i in 1..n - 1 {
            let lo = i.saturating_sub(2).min(n.saturating_sub(5));
            let hi = (lo + 5).min(n);
            ds[i] = lagrange_derivative(&xs[lo..hi], &ys[lo..hi], xs[i]);
        }
        ds[0] = left_slope;
        ds[n - 1] = right_slope;
        // Fritsch–Carlson limiter; end slopes are pinned to the tails
        for k in 0..n - 1 {
            let h = xs[k + 1] - xs[k];
            let delta = (ys[k + 1] - ys[k]) / h;
            if delta == 0.0 {
                if k > 0 {
                    ds[k] = 0.0;
                }
                if k + 1 < n - 1 {
                    ds[k + 1] = 0.0;
                }
                continue;
            }
            if k > 0 && ds[k] * delta < 0.0 {
                ds[k] = 0.0;
            }
            if k + 1 < n - 1 && ds[k + 1] * delta < 0.0 {
                ds[k + 1] = 0.0;
            }
            let alpha = ds[k] / delta;
            let beta = ds[k + 1] / delta;
            let s = alpha * alpha + beta * beta;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                if k > 0 {
                    ds[k] = tau * alpha * delta;
                }
                if k + 1 < n - 1 {
                    ds[k + 1] = tau * beta * delta;
                }
            }
        }
        Self { xs, ys, ds }
    }

    /// (value, derivative) at `x`.
    fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return (self.ys[0] + self.ds[0] * (x - self.xs[0]), self.ds[0]);
        }
        if x >= self.xs[n - 1] {
            return (
                self.ys[n - 1] + self.ds[n - 1] * (x - self.xs[n - 1]),
                self.ds[n - 1],
            );
        }
        let k = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return (self.ys[i], self.ds[i]),
            Err(i) => i - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.ds[k] * h, self.ds[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let y = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        let dy = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
        (y, dy)
    }
}

/// Derivative at `x` of the polynomial interpolating `(xs, ys)`.
fn lagrange_derivative(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let m = xs.len();
    let mut total = 0.0;
    for j in 0..m {
        // d/dx of the j-th basis polynomial
        let mut denom = 1.0;
        for k in 0..m {
            if k != j {
                denom *= xs[j] - xs[k];
            }
        }
        let mut numer = 0.0;
        for i in 0..m {
            if i == j {
                continue;
            }
            let mut prod = 1.0;
            for k in 0..m {
                if k != j && k != i {
                    prod *= x - xs[k];
                }
            }
            numer += prod;
        }
        total += ys[j] * numer / denom;
    }
    total
}

/// Positive samples on increasing nodes in `(0, ∞)` with power-law tails:
/// `f(r) ∝ r^left_exponent` below the first node, `∝ r^right_exponent` above
/// the last.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpline {
    nodes: Vec<f64>,
    values: Vec<f64>,
    left_exponent: f64,
    right_exponent: f64,
    spline: Hermite,
}

impl GridSpline {
    pub fn new(
        nodes: Vec<f64>,
        values: Vec<f64>,
        left_exponent: f64,
        right_exponent: f64,
    ) -> Result<Self> {
        validate_grid(&nodes, &values)?;
        if nodes[0] <= 0.0 {
            return domain("radial grid nodes must be positive");
        }
        if !left_exponent.is_finite() || !right_exponent.is_finite() {
            return domain("grid tail exponents must be finite");
        }
        let xs = nodes.iter().map(|r| r.ln()).collect();
        let ys = values.iter().map(|v| v.ln()).collect();
        let spline = Hermite::new(xs, ys, left_exponent, right_exponent);
        Ok(Self {
            nodes,
            values,
            left_exponent,
            right_exponent,
            spline,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn left_exponent(&self) -> f64 {
        self.left_exponent
    }
    pub fn right_exponent(&self) -> f64 {
        self.right_exponent
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        let (l, dl) = self.spline.eval(r.ln());
        let v = l.exp();
        (v, v * dl / r)
    }
}

/// Positive samples on increasing nodes in `R` with exponential tails.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGrid {
    nodes: Vec<f64>,
    values: Vec<f64>,
    left_rate: f64,
    right_rate: f64,
    spline: Hermite,
}

impl LineGrid {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, left_rate: f64, right_rate: f64) -> Result<Self> {
        validate_grid(&nodes, &values)?;
        if !(left_rate > 0.0 && right_rate > 0.0) || !left_rate.is_finite() || !right_rate.is_finite() {
            return domain("line grid tail rates must be positive");
        }
        let ys = values.iter().map(|v| v.ln()).collect();
        let spline = Hermite::new(nodes.clone(), ys, left_rate, -right_rate);
        Ok(Self {
            nodes,
            values,
            left_rate,
            right_rate,
            spline,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let (l, dl) = self.spline.eval(x);
        let v = l.exp();
        (v, v * dl)
    }
}

fn validate_grid(nodes: &[f64], values: &[f64]) -> Result<()> {
    if nodes.len() < 8 {
        return domain(format!("grid needs at least 8 nodes, got {}", nodes.len()));
    }
    if nodes.len() != values.len() {
        return domain("grid nodes and values differ in length");
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|x| !x.is_finite()) {
        return domain("grid nodes must be finite and strictly increasing");
    }
    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return domain("grid values must be finite and positive");
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `r^{−a} (1 + r^k)^{−1/β}`
    PowerCkn { a: f64, k: f64, beta: f64 },
    /// `A (c s^{r} + 1)^{−(r+1)/r}`
    Bliss { amplitude: f64, c: f64, r_exp: f64 },
    /// `cosh(γ x)^{−δ}` on the whole line
    CoshPower { gamma: f64, delta: f64 },
    GridSpline(GridSpline),
    LineGrid(LineGrid),
}

/// A trial or extremal profile: `scale · shape(dilation · r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub shape: Shape,
    pub scale: f64,
    pub dilation: f64,
}

impl From<Shape> for RadialProfile {
    fn from(shape: Shape) -> Self {
        Self {
            shape,
            scale: 1.0,
            dilation: 1.0,
        }
    }
}

impl RadialProfile {
    pub fn power_ckn(a: f64, k: f64, beta: f64) -> Result<Self> {
        if !(k > 0.0 && beta > 0.0) || !a.is_finite() || !k.is_finite() || !beta.is_finite() {
            return domain(format!("PowerCKN needs k > 0, β > 0 (got a={a}, k={k}, β={beta})"));
        }
        Ok(Shape::PowerCkn { a, k, beta }.into())
    }

    pub fn bliss(amplitude: f64, c: f64, r_exp: f64) -> Result<Self> {
        if !(c > 0.0 && r_exp > 0.0) || !amplitude.is_finite() || !c.is_finite() || !r_exp.is_finite() {
            return domain(format!("Bliss family needs c > 0, r > 0 (got c={c}, r={r_exp})"));
        }
        Ok(Shape::Bliss { amplitude, c, r_exp }.into())
    }

    pub fn cosh_power(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0 && delta > 0.0) || !gamma.is_finite() || !delta.is_finite() {
            return domain(format!("CoshPower needs γ > 0, δ > 0 (got γ={gamma}, δ={delta})"));
        }
        Ok(Shape::CoshPower { gamma, delta }.into())
    }

    pub fn grid(nodes: Vec<f64>, values: Vec<f64>, left_exponent: f64, right_exponent: f64) -> Result<Self> {
        Ok(Shape::GridSpline(GridSpline::new(nodes, values, left_exponent, right_exponent)?).into())
    }

    pub fn line_grid(nodes: Vec<f64>, values: Vec<f64>, left_rate: f64, right_rate: f64) -> Result<Self> {
        Ok(Shape::LineGrid(LineGrid::new(nodes, values, left_rate, right_rate)?).into())
    }

    /// True for shapes defined on the whole real line.
    pub fn is_line(&self) -> bool {
        matches!(self.shape, Shape::CoshPower { .. } | Shape::LineGrid(_))
    }

    pub fn variant_name(&self) -> &'static str {
        match self.shape {
            Shape::PowerCkn { .. } => "power_ckn",
            Shape::Bliss { .. } => "bliss",
            Shape::CoshPower { .. } => "cosh_power",
            Shape::GridSpline(_) => "grid_spline",
            Shape::LineGrid(_) => "line_grid",
        }
    }

    fn check_point(&self, r: f64) -> Result<()> {
        if !r.is_finite() {
            return domain(format!("evaluation point must be finite, got {r}"));
        }
        if !self.is_line() && r <= 0.0 {
            return domain(format!("radial profiles are defined for r > 0, got {r}"));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        self.check_point(r)?;
        Ok(self.raw(r).0)
    }

    pub fn deriv(&self, r: f64) -> Result<f64> {
        self.check_point(r)?;
        Ok(self.raw(r).1)
    }

    /// (value, derivative) without argument checks.
    #[inline]
    pub(crate) fn raw(&self, r: f64) -> (f64, f64) {
        if self.scale == 0.0 {
            return (0.0, 0.0);
        }
        let rho = self.dilation * r;
        let (v, d) = match &self.shape {
            Shape::PowerCkn { a, k, beta } => {
                let lr = rho.ln();
                let v = (-a * lr - softplus(k * lr) / beta).exp();
                (v, v * (-a - (k / beta) * logistic(k * lr)) / rho)
            }
            Shape::Bliss { amplitude, c, r_exp } => {
                let z = c.ln() + r_exp * rho.ln();
                let v = amplitude * (-(r_exp + 1.0) / r_exp * softplus(z)).exp();
                (v, -v * (r_exp + 1.0) * logistic(z) / rho)
            }
            Shape::CoshPower { gamma, delta } => {
                let v = (-delta * ln_cosh(gamma * rho)).exp();
                (v, -delta * gamma * (gamma * rho).tanh() * v)
            }
            Shape::GridSpline(g) => g.eval(rho),
            Shape::LineGrid(g) => g.eval(rho),
        };
        (self.scale * v, self.scale * self.dilation * d)
    }

    /// `eval(dilate(p, λ), r) = eval(p, λ r)`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("dilation must be positive, got {lambda}"));
        }
        let mut p = self.clone();
        p.dilation *= lambda;
        Ok(p)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return domain("scale factor must be finite");
        }
        let mut p = self.clone();
        p.scale *= c;
        Ok(p)
    }

    pub fn descriptor(&self) -> ProfileDescriptor {
        let mut params = BTreeMap::new();
        let (mut nodes, mut values) = (None, None);
        match &self.shape {
            Shape::PowerCkn { a, k, beta } => {
                params.insert("a".into(), *a);
                params.insert("k".into(), *k);
                params.insert("beta".into(), *beta);
            }
            Shape::Bliss { amplitude, c, r_exp } => {
                params.insert("amplitude".into(), *amplitude);
                params.insert("c".into(), *c);
                params.insert("r_exp".into(), *r_exp);
            }
            Shape::CoshPower { gamma, delta } => {
                params.insert("gamma".into(), *gamma);
                params.insert("delta".into(), *delta);
            }
            Shape::GridSpline(g) => {
                params.insert("left_exponent".into(), g.left_exponent);
                params.insert("right_exponent".into(), g.right_exponent);
                nodes = Some(g.nodes.clone());
                values = Some(g.values.clone());
            }
            Shape::LineGrid(g) => {
                params.insert("left_rate".into(), g.left_rate);
                params.insert("right_rate".into(), g.right_rate);
                nodes = Some(g.nodes.clone());
                values = Some(g.values.clone());
            }
        }
        ProfileDescriptor {
            variant: self.variant_name().to_string(),
            params,
            scale: self.scale,
            dilation: self.dilation,
            nodes,
            values,
        }
    }

    pub fn from_descriptor(d: &ProfileDescriptor) -> Result<Self> {
        let get = |k: &str| -> Result<f64> {
            d.params
                .get(k)
                .copied()
                .ok_or_else(|| Error::Domain(format!("profile descriptor lacks parameter {k}")))
        };
        let grid = || -> Result<(Vec<f64>, Vec<f64>)> {
            match (&d.nodes, &d.values) {
                (Some(n), Some(v)) => Ok((n.clone(), v.clone())),
                _ => domain("grid descriptor lacks nodes or values"),
            }
        };
        let base = match d.variant.as_str() {
            "power_ckn" => Self::power_ckn(get("a")?, get("k")?, get("beta")?)?,
            "bliss" => Self::bliss(get("amplitude")?, get("c")?, get("r_exp")?)?,
            "cosh_power" => Self::cosh_power(get("gamma")?, get("delta")?)?,
            "grid_spline" => {
                let (n, v) = grid()?;
                Self::grid(n, v, get("left_exponent")?, get("right_exponent")?)?
            }
            "line_grid" => {
                let (n, v) = grid()?;
                Self::line_grid(n, v, get("left_rate")?, get("right_rate")?)?
            }
            other => return domain(format!("unknown profile variant {other}")),
        };
        if !(d.dilation > 0.0) || !d.scale.is_finite() {
            return domain("descriptor has invalid scale or dilation");
        }
        Ok(Self {
            scale: d.scale,
            dilation: d.dilation,
            ..base
        })
    }
}

/// JSON form of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDescriptor {
    pub variant: String,
    pub params: BTreeMap<String, f64>,
    pub scale: f64,
    pub dilation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Serialize for RadialProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.descriptor().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let desc = ProfileDescriptor::deserialize(d)?;
        RadialProfile::from_descriptor(&desc).map_err(serde::de::Error::custom)
    }
}

impl RadialFunction for RadialProfile {
    #[inline]
    fn value(&self, r: f64) -> f64 {
        self.raw(r).0
    }
    #[inline]
    fn slope(&self, r: f64) -> f64 {
        self.raw(r).1
    }
    fn ln_abs_value(&self, r: f64) -> (f64, f64) {
        if self.scale == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        let rho = self.dilation * r;
        let ln = match &self.shape {
            Shape::PowerCkn { a, k, beta } => {
                let lr = rho.ln();
                -a * lr - softplus(k * lr) / beta
            }
            Shape::GridSpline(g) => g.spline.eval(rho.ln()).0,
            _ => {
                let v = self.raw(r).0;
                return (v.abs().ln(), v.signum());
            }
        };
        (ln + self.scale.abs().ln(), self.scale.signum())
    }
    fn asymptotics(&self) -> Asymptotics {
        if self.scale == 0.0 {
            return Asymptotics {
                origin: f64::INFINITY,
                tail: f64::NEG_INFINITY,
            };
        }
        match &self.shape {
            Shape::PowerCkn { a, k, beta } => Asymptotics {
                origin: -a,
                tail: -a - k / beta,
            },
            Shape::Bliss { r_exp, .. } => Asymptotics {
                origin: 0.0,
                tail: -(r_exp + 1.0),
            },
            Shape::GridSpline(g) => Asymptotics {
                origin: g.left_exponent,
                tail: g.right_exponent,
            },
            Shape::CoshPower { .. } | Shape::LineGrid(_) => Asymptotics {
                origin: 0.0,
                tail: f64::NEG_INFINITY,
            },
        }
    }
    fn slope_asymptotics(&self) -> Asymptotics {
        if self.scale == 0.0 {
            return self.asymptotics();
        }
        let flat = |e: f64, inf: f64| if e == 0.0 { inf } else { e - 1.0 };
        match &self.shape {
            Shape::PowerCkn { a, k, beta } => Asymptotics {
                origin: if *a == 0.0 { k - 1.0 } else { -a - 1.0 },
                tail: -a - k / beta - 1.0,
            },
            Shape::Bliss { r_exp, .. } => Asymptotics {
                origin: r_exp - 1.0,
                tail: -r_exp - 2.0,
            },
            Shape::GridSpline(g) => Asymptotics {
                origin: flat(g.left_exponent, f64::INFINITY),
                tail: flat(g.right_exponent, f64::NEG_INFINITY),
            },
            Shape::CoshPower { .. } | Shape::LineGrid(_) => Asymptotics {
                origin: 0.0,
                tail: f64::NEG_INFINITY,
            },
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::GridSpline(g) => g.nodes.iter().map(|r| r / self.dilation).collect(),
            Shape::LineGrid(g) => g
                .nodes
                .iter()
                .filter(|x| **x > 0.0)
                .map(|x| x / self.dilation)
                .collect(),
            _ => Vec::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.scale == 0.0
    }
}

impl LineFunction for RadialProfile {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        self.raw(x).0
    }
    fn rates(&self) -> (f64, f64) {
        match &self.shape {
            Shape::CoshPower { gamma, delta } => {
                let r = gamma * delta * self.dilation;
                (r, r)
            }
            Shape::LineGrid(g) => (g.left_rate * self.dilation, g.right_rate * self.dilation),
            // radial shapes are not line functions; callers check is_line first
            _ => (f64::NAN, f64::NAN),
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::LineGrid(g) => g.nodes.iter().map(|x| x / self.dilation).collect(),
            _ => Vec::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.scale == 0.0
    }
}

/// `r^m · f(r)`.
#[derive(Debug, Clone)]
pub struct PowerWeighted<F> {
    pub inner: F,
    pub power: f64,
}

impl<F: RadialFunction> PowerWeighted<F> {
    pub fn new(inner: F, power: f64) -> Self {
        Self { inner, power }
    }
}

impl<F: RadialFunction> RadialFunction for PowerWeighted<F> {
    fn value(&self, r: f64) -> f64 {
        let (ln, sign) = self.ln_abs_value(r);
        sign * ln.exp()
    }
    fn ln_abs_value(&self, r: f64) -> (f64, f64) {
        let (ln, sign) = self.inner.ln_abs_value(r);
        if sign == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        (self.power * r.ln() + ln, sign)
    }
    fn slope(&self, r: f64) -> f64 {
        let w = r.powf(self.power);
        w * (self.inner.slope(r) + self.power * self.inner.value(r) / r)
    }
    fn asymptotics(&self) -> Asymptotics {
        let a = self.inner.asymptotics();
        Asymptotics {
            origin: a.origin + self.power,
            tail: a.tail + self.power,
        }
    }
    fn slope_asymptotics(&self) -> Asymptotics {
        let a = self.inner.asymptotics();
        let d = self.inner.slope_asymptotics();
        if self.power == 0.0 {
            return d;
        }
        Asymptotics {
            origin: (d.origin + self.power).min(a.origin + self.power - 1.0),
            tail: (d.tail + self.power).max(a.tail + self.power - 1.0),
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

/// A radial function given by closures.
pub struct FnRadial<V, D> {
    pub value: V,
    pub slope: D,
    pub asymptotics: Asymptotics,
    pub slope_asymptotics: Option<Asymptotics>,
}

impl<V: Fn(f64) -> f64, D: Fn(f64) -> f64> FnRadial<V, D> {
    pub fn new(value: V, slope: D, asymptotics: Asymptotics) -> Self {
        Self {
            value,
            slope,
            asymptotics,
            slope_asymptotics: None,
        }
    }

    pub fn with_slope_asymptotics(mut self, a: Asymptotics) -> Self {
        self.slope_asymptotics = Some(a);
        self
    }
}

impl<V: Fn(f64) -> f64, D: Fn(f64) -> f64> RadialFunction for FnRadial<V, D> {
    fn value(&self, r: f64) -> f64 {
        (self.value)(r)
    }
    fn slope(&self, r: f64) -> f64 {
        (self.slope)(r)
    }
    fn asymptotics(&self) -> Asymptotics {
        self.asymptotics
    }
    fn slope_asymptotics(&self) -> Asymptotics {
        self.slope_asymptotics.unwrap_or(Asymptotics {
            origin: self.asymptotics.origin - 1.0,
            tail: self.asymptotics.tail - 1.0,
        })
    }
}

/// `|x|^{−a}(1 + |x|^{β(n−2−2a)})^{−1/β}`, `β = q/2 − 1`.
///
/// The family is admissible for any `q > 2`; the theorem-level restriction
/// `q ≤ 2n/(n−2)` is enforced by [`crate::constants::EmbeddingCase`].
pub fn extremal_ckn(n: u32, q: f64, a: f64) -> Result<RadialProfile> {
    let nf = n as f64;
    if n < 3 {
        return domain(format!("extremal_ckn needs n >= 3, got {n}"));
    }
    if !(q > 2.0) || !q.is_finite() {
        return domain(format!("extremal_ckn needs q > 2, got {q}"));
    }
    if !(a >= 0.0 && a < (nf - 2.0) / 2.0) {
        return domain(format!("extremal_ckn needs 0 <= a < (n-2)/2, got a = {a}"));
    }
    let beta = q / 2.0 - 1.0;
    RadialProfile::power_ckn(a, beta * (nf - 2.0 - 2.0 * a), beta)
}

/// `s ↦ (c s^r + 1)^{−(r+1)/r}`, `r = q/p − 1`.
pub fn extremal_bliss(p: f64, q: f64, c: f64) -> Result<RadialProfile> {
    if !(p > 1.0 && q > p) || !q.is_finite() {
        return domain(format!("extremal_bliss needs q > p > 1, got p={p}, q={q}"));
    }
    RadialProfile::bliss(1.0, c, q / p - 1.0)
}

/// `[1 + r^{β(n−p(a+1))/(p−1)}]^{−1/β}`, `β = q/p − 1`.
pub fn extremal_radial_p(n: u32, p: f64, q: f64, a: f64) -> Result<RadialProfile> {
    let nf = n as f64;
    if !(p > 1.0 && q > p && nf > p) || !q.is_finite() {
        return domain(format!("extremal_radial_p needs 1 < p < q and n > p (n={n}, p={p}, q={q})"));
    }
    if !(a >= 0.0 && a < (nf - p) / p) {
        return domain(format!("extremal_radial_p needs 0 <= a < (n-p)/p, got a = {a}"));
    }
    let beta = q / p - 1.0;
    let k = beta * (nf - p * (a + 1.0)) / (p - 1.0);
    RadialProfile::power_ckn(0.0, k, beta)
}

/// `h = (r^{−α} f*)^{q−1}` with `q = p'` and `f*` the unweighted extremal,
/// the profile attaining the radial Newtonian bilinear bound.
pub fn extremal_stein_weiss(n: u32, p: f64) -> Result<RadialProfile> {
    if !(p > 1.0 && p < 2.0) {
        return domain(format!("extremal_stein_weiss needs 1 < p < 2, got {p}"));
    }
    let q = p / (p - 1.0);
    let f = extremal_ckn(n, q, 0.0)?;
    let Shape::PowerCkn { k, beta, .. } = f.shape else {
        unreachable!()
    };
    let alpha = crate::constants::stein_weiss_alpha(n, p);
    RadialProfile::power_ckn(alpha * (q - 1.0), k, beta / (q - 1.0))
}

/// The convolution extremal with the printed argument: `cosh(p'x/(4pδ))^{−δ}`,
/// `δ = 2/(2−p)`. See [`extremal_young_derived`] for the argument that
/// actually maximizes the ratio.
pub fn extremal_young(p: f64) -> Result<RadialProfile> {
    let (pp, delta) = young_exponents(p)?;
    RadialProfile::cosh_power(pp / (4.0 * p * delta), delta)
}

/// `cosh(p'x/(pδ))^{−δ}`, obtained by pushing the Bliss equality family
/// through `t = e^x` and the rescaling to the unit kernel.
pub fn extremal_young_derived(p: f64) -> Result<RadialProfile> {
    let (pp, delta) = young_exponents(p)?;
    RadialProfile::cosh_power(pp / (p * delta), delta)
}

fn young_exponents(p: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p < 2.0) {
        return domain(format!("Young extremal needs 1 < p < 2, got {p}"));
    }
    Ok((p / (p - 1.0), 2.0 / (2.0 - p)))
}

const RANDOM_NODES: usize = 40;

/// Smooth random log-slope: interpolates from `start` to `end` through a
/// logistic step and adds a few Gaussian bumps.
fn random_slope_field(rng: &mut ChaCha8Rng, start: f64, end: f64, span: f64) -> impl Fn(f64) -> f64 {
    let centre = rng.gen_range(-0.35..0.35) * span;
    let width = rng.gen_range(0.03..0.2) * span;
    let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(0..4))
        .map(|_| {
            let amp = rng.gen_range(-1.0..1.0) * (0.5 * (end - start).abs() + 0.5);
            (amp, rng.gen_range(-0.4..0.4) * span, rng.gen_range(0.03..0.15) * span)
        })
        .collect();
    move |x: f64| {
        let mut s = start + (end - start) * logistic((x - centre) / width);
        for (amp, c, w) in &bumps {
            let z = (x - c) / w;
            s += amp * (-z * z).exp();
        }
        s
    }
}

fn integrate_slope(xs: &[f64], slope: impl Fn(f64) -> f64, offset: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = offset;
    out.push(acc);
    for w in xs.windows(2) {
        // Simpson on each cell
        let (a, b) = (w[0], w[1]);
        acc += (b - a) / 6.0 * (slope(a) + 4.0 * slope(0.5 * (a + b)) + slope(b));
        out.push(acc);
    }
    out
}

/// A positive, eventually decreasing grid profile on log-spaced nodes over
/// `[1e−4, 1e4]` with `f ~ r^left_exponent` at the origin and
/// `f ~ r^right_exponent` at infinity. Deterministic in `seed`.
pub fn random_profile(seed: u64, left_exponent: f64, right_exponent: f64) -> Result<RadialProfile> {
    if !(right_exponent < 0.0) {
        return domain("random profiles need a decaying right tail");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (1e-4f64.ln(), 1e4f64.ln());
    let xs: Vec<f64> = (0..RANDOM_NODES)
        .map(|i| lo + (hi - lo) * i as f64 / (RANDOM_NODES - 1) as f64)
        .collect();
    let slope = random_slope_field(&mut rng, left_exponent, right_exponent, hi - lo);
    let offset = rng.gen_range(-1.0..1.0);
    let logs = integrate_slope(&xs, slope, offset);
    // re-centre so the largest value is O(1)
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let values = logs.iter().map(|l| (l - peak + offset).exp()).collect();
    let nodes = xs.iter().map(|x| x.exp()).collect();
    RadialProfile::grid(nodes, values, left_exponent, right_exponent)
}

/// A positive line profile on `[−8, 8]` with `e^{left_rate·x}` and
/// `e^{−right_rate·x}` tails. Deterministic in `seed`.
pub fn random_line_profile(seed: u64, left_rate: f64, right_rate: f64) -> Result<RadialProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 8.0;
    let xs: Vec<f64> = (0..RANDOM_NODES)
        .map(|i| -half + 2.0 * half * i as f64 / (RANDOM_NODES - 1) as f64)
        .collect();
    let slope = random_slope_field(&mut rng, left_rate, -right_rate, 2.0 * half);
    let logs = integrate_slope(&xs, slope, 0.0);
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let values = logs.iter().map(|l| (l - peak).exp()).collect();
    RadialProfile::line_grid(xs, values, left_rate, right_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn central_difference(p: &RadialProfile, r: f64) -> f64 {
        let h = 1e-5 * r.abs().max(1e-3);
        (p.eval(r + h).unwrap() - p.eval(r - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn eval_examples() {
        let p = RadialProfile::power_ckn(0.0, 2.0, 1.0).unwrap();
        assert!(rel(p.eval(1.0).unwrap(), 0.5) < 1e-15);
        let b = RadialProfile::bliss(1.0, 1.0, 1.0).unwrap();
        assert!(rel(b.eval(1.0).unwrap(), 0.25) < 1e-15);
        assert!(p.eval(0.0).is_err());
        assert!(p.eval(-1.0).is_err());
        let c = RadialProfile::cosh_power(1.0, 2.0).unwrap();
        assert!(c.eval(-3.0).is_ok());
    }

    #[test]
    fn grid_spline_reproduces_smooth_data() {
        let nodes: Vec<f64> = (0..200).map(|i| 1e-3 * (2e4f64).powf(i as f64 / 199.0)).collect();
        let values = nodes.iter().map(|r| (-r).exp()).collect();
        let right = -nodes[199];
        let p = RadialProfile::grid(nodes, values, 0.0, right).unwrap();
        let got = p.eval(0.5).unwrap();
        assert!((got - (-0.5f64).exp()).abs() < 1e-6, "{got}");
    }

    #[test]
    fn derivatives() {
        let p = RadialProfile::power_ckn(0.0, 2.0, 1.0).unwrap();
        assert!(rel(p.deriv(1.0).unwrap(), -0.5) < 1e-15);
        let zero = p.scale(0.0).unwrap();
        assert_eq!(zero.deriv(0.7).unwrap(), 0.0);
        assert_eq!(zero.eval(0.7).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let profiles = [
                RadialProfile::power_ckn(rng.gen_range(0.0..1.0), rng.gen_range(0.3..4.0), rng.gen_range(0.2..3.0)).unwrap(),
                RadialProfile::bliss(rng.gen_range(0.5..2.0), rng.gen_range(0.2..5.0), rng.gen_range(0.3..3.0)).unwrap(),
                RadialProfile::cosh_power(rng.gen_range(0.1..2.0), rng.gen_range(0.5..5.0)).unwrap(),
            ];
            let r: f64 = rng.gen_range(0.05..5.0);
            for p in &profiles {
                let fd = central_difference(p, r);
                let an = p.deriv(r).unwrap();
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-3), "{p:?} at {r}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn extremal_constructors() {
        assert_eq!(extremal_ckn(3, 6.0, 0.0).unwrap().shape, Shape::PowerCkn { a: 0.0, k: 2.0, beta: 2.0 });
        assert_eq!(extremal_ckn(5, 4.0, 1.0).unwrap().shape, Shape::PowerCkn { a: 1.0, k: 1.0, beta: 1.0 });
        // a = (n−3)/2 gives |x|^{−(n−3)/2}(1+|x|^β)^{−1/β}
        let f = extremal_ckn(5, 3.0, 1.0).unwrap();
        assert_eq!(f.shape, Shape::PowerCkn { a: 1.0, k: 0.5, beta: 0.5 });
        assert!(extremal_ckn(3, 6.0, 0.5).is_err());
        assert!(extremal_ckn(2, 6.0, 0.0).is_err());

        assert_eq!(extremal_bliss(2.0, 4.0, 1.0).unwrap().shape, Shape::Bliss { amplitude: 1.0, c: 1.0, r_exp: 1.0 });
        let b = extremal_bliss(2.0, 6.0, 1.0).unwrap();
        assert!(rel(b.eval(2.0).unwrap(), 5f64.powf(-1.5)) < 1e-14);
        assert!(extremal_bliss(2.0, 2.0, 1.0).is_err());

        let u = extremal_radial_p(4, 3.0, 6.0, 0.0).unwrap();
        assert_eq!(u.shape, Shape::PowerCkn { a: 0.0, k: 0.5, beta: 1.0 });
        let u = extremal_radial_p(3, 2.0, 6.0, 0.0).unwrap();
        assert_eq!(u.shape, extremal_ckn(3, 6.0, 0.0).unwrap().shape);
        let u = extremal_radial_p(5, 2.0, 4.0, 1.0).unwrap();
        assert_eq!(u.shape, Shape::PowerCkn { a: 0.0, k: 1.0, beta: 1.0 });

        let y = extremal_young(4.0 / 3.0).unwrap();
        match y.shape {
            Shape::CoshPower { gamma, delta } => {
                assert!((delta - 3.0).abs() < 1e-14);
                assert!((gamma - 0.25).abs() < 1e-14);
            }
            _ => unreachable!(),
        }
        match extremal_young(1.0 + 1e-9).unwrap().shape {
            Shape::CoshPower { delta, .. } => assert!((delta - 2.0).abs() < 1e-8),
            _ => unreachable!(),
        }
        assert!(extremal_young(2.0).is_err());
        assert!(extremal_young(1.0).is_err());
    }

    #[test]
    fn dilation_and_scale() {
        let p = RadialProfile::power_ckn(0.0, 2.0, 1.0).unwrap();
        let d = p.dilate(2.0).unwrap();
        assert!(rel(d.eval(1.0).unwrap(), 0.2) < 1e-15);
        let same = p.dilate(1.0).unwrap();
        for r in [0.1, 1.0, 7.0] {
            assert_eq!(same.eval(r).unwrap(), p.eval(r).unwrap());
        }
        assert!(p.dilate(0.0).is_err());
        assert!(p.dilate(-1.0).is_err());
        let rp = random_profile(3, 0.0, -2.0).unwrap();
        for lambda in [0.1, 3.0, 10.0] {
            let d = rp.dilate(lambda).unwrap();
            for r in [1e-5, 0.3, 2.0, 5e4] {
                assert_eq!(d.eval(r).unwrap(), rp.eval(lambda * r).unwrap());
            }
        }
    }

    #[test]
    fn random_profiles_are_deterministic_and_distinct() {
        let a = random_profile(42, 0.0, -1.5).unwrap();
        let b = random_profile(42, 0.0, -1.5).unwrap();
        assert_eq!(a, b);
        let mut seen = std::collections::HashSet::new();
        for seed in 0..100 {
            let p = random_profile(seed, -0.3, -2.0).unwrap();
            let Shape::GridSpline(g) = &p.shape else { unreachable!() };
            assert!(g.values().iter().all(|v| *v > 0.0));
            let key: Vec<u64> = g.values().iter().map(|v| v.to_bits()).collect();
            assert!(seen.insert(key));
        }
    }

    #[test]
    fn weighted_values_survive_overflowing_factors() {
        let f = random_profile(3, -1.6, -2.5).unwrap();
        let r = 1e-250;
        assert!(RadialFunction::value(&f, r).is_infinite());
        let w = PowerWeighted::new(&f, 1.5);
        let v = w.value(r);
        assert!(v.is_finite() && v > 0.0);
        let (ln, sign) = RadialFunction::ln_abs_value(&f, 1.0);
        assert!((sign * ln.exp() - RadialFunction::value(&f, 1.0)).abs() < 1e-14);
    }

    #[test]
    fn grid_tails_follow_declared_powers() {
        let p = random_profile(9, -0.4, -2.5).unwrap();
        let r0 = 1e-6;
        let ratio = p.eval(r0 / 10.0).unwrap() / p.eval(r0).unwrap();
        assert!(rel(ratio, 10f64.powf(0.4)) < 1e-12);
        let r1 = 1e6;
        let ratio = p.eval(10.0 * r1).unwrap() / p.eval(r1).unwrap();
        assert!(rel(ratio, 10f64.powf(-2.5)) < 1e-12);
    }

    #[test]
    fn grid_derivative_matches_finite_differences() {
        let p = random_profile(17, 0.0, -1.5).unwrap();
        let Shape::GridSpline(g) = &p.shape else { unreachable!() };
        let nodes = g.nodes().to_vec();
        for w in nodes.windows(2).step_by(3) {
            let r = (w[0] * w[1]).sqrt();
            let fd = central_difference(&p, r);
            let an = p.deriv(r).unwrap();
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-8), "{r}: {fd} vs {an}");
        }
    }

    #[test]
    fn line_profiles() {
        let p = random_line_profile(1, 0.7, 1.3).unwrap();
        assert!(p.is_line());
        let far = p.eval(20.0).unwrap() / p.eval(19.0).unwrap();
        assert!(rel(far, (-1.3f64).exp()) < 1e-12);
        let far = p.eval(-20.0).unwrap() / p.eval(-19.0).unwrap();
        assert!(rel(far, (-0.7f64).exp()) < 1e-12);
        assert_eq!(LineFunction::rates(&p.dilate(2.0).unwrap()), (1.4, 2.6));
    }

    #[test]
    fn descriptor_round_trip() {
        let profiles = vec![
            RadialProfile::power_ckn(0.3, 1.2, 0.7).unwrap().dilate(2.5).unwrap(),
            extremal_bliss(1.5, 3.0, 2.0).unwrap().scale(-0.5).unwrap(),
            extremal_young(1.5).unwrap(),
            random_profile(4, 0.0, -1.0).unwrap(),
            random_line_profile(4, 1.0, 2.0).unwrap(),
        ];
        for p in profiles {
            let json = serde_json::to_string(&p).unwrap();
            let back: RadialProfile = serde_json::from_str(&json).unwrap();
            assert_eq!(back, p);
        }
        let bad = r#"{"variant":"grid_spline","params":{"left_exponent":0,"right_exponent":-1},"scale":1,"dilation":1,"nodes":[1,2,3],"values":[1,1,1]}"#;
        assert!(serde_json::from_str::<RadialProfile>(bad).is_err());
    }
}
