//! Numerical replay of the substitutions that carry the weighted inequalities
//! down to the one-dimensional Bliss and Young problems.
//!
//! Each check evaluates both sides of an exact identity by independent
//! quadrature. The adapters below build the transformed functions lazily, so
//! the chain `f → u = r^a f → U(s) = u(s^{1/k}) → h = U' → g(r) = r^{−2}h(1/r)`
//! never samples or re-interpolates anything.

use serde::{Deserialize, Serialize};

use crate::constants::EmbeddingCase;
use crate::error::{domain, Result};
use crate::functionals::{
    self, bliss_lhs_integral, line_bilinear, line_square, radial_integral, Precision,
};
use crate::profiles::{Asymptotics, LineFunction, PowerWeighted, RadialFunction};
use crate::quad::{self, Decay, QuadratureSpec};
use crate::specfn::surface_area;

/// Tolerance for the single-step identities.
pub const STEP_TOLERANCE: f64 = 1e-8;
/// Tolerance for the `L²` inversion identity.
pub const INVERSION_TOLERANCE: f64 = 1e-10;
/// Tolerance for the composed replay.
pub const REPLAY_TOLERANCE: f64 = 1e-7;

const TIGHT: f64 = 1e-12;
const RATE_CAP: f64 = 50.0;

/// Both sides of one identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformCheck {
    pub identity_name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
    pub tolerance: f64,
    /// False when a hypothesis of the identity (a vanishing boundary term)
    /// fails numerically; the sides are then not compared.
    pub applicable: bool,
    /// Reported for comparison only and never counted as a failure.
    #[serde(default)]
    pub informational: bool,
}

impl TransformCheck {
    pub fn new(identity_name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            identity_name: identity_name.into(),
            lhs,
            rhs,
            rel_gap: (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE),
            tolerance,
            applicable: true,
            informational: false,
        }
    }

    fn not_applicable(identity_name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            identity_name: identity_name.into(),
            lhs: 0.0,
            rhs: 0.0,
            rel_gap: 0.0,
            tolerance,
            applicable: false,
            informational: false,
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    /// Within tolerance, or exempt from comparison.
    pub fn passed(&self) -> bool {
        self.informational || !self.applicable || self.rel_gap <= self.tolerance
    }
}

/// `U(s) = u(s^{1/k})`.
#[derive(Debug, Clone)]
pub struct PowerArgument<F> {
    pub inner: F,
    pub k: f64,
}

impl<F: RadialFunction> PowerArgument<F> {
    pub fn new(inner: F, k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return domain(format!("rescaling exponent must be positive, got {k}"));
        }
        Ok(Self { inner, k })
    }
}

impl<F: RadialFunction> RadialFunction for PowerArgument<F> {
    fn value(&self, s: f64) -> f64 {
        self.inner.value(s.powf(1.0 / self.k))
    }
    fn slope(&self, s: f64) -> f64 {
        let r = s.powf(1.0 / self.k);
        self.inner.slope(r) * r / (self.k * s)
    }
    fn asymptotics(&self) -> Asymptotics {
        let a = self.inner.asymptotics();
        Asymptotics {
            origin: a.origin / self.k,
            tail: a.tail / self.k,
        }
    }
    fn slope_asymptotics(&self) -> Asymptotics {
        let d = self.inner.slope_asymptotics();
        Asymptotics {
            origin: (d.origin + 1.0) / self.k - 1.0,
            tail: (d.tail + 1.0) / self.k - 1.0,
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().iter().map(|b| b.powf(self.k)).collect()
    }
    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

/// The derivative of a radial function, viewed as a radial function.
///
/// Its own slope is a central difference and is only approximate; none of
/// the identities in this module evaluate it.
#[derive(Debug, Clone)]
pub struct Derivative<F> {
    pub inner: F,
}

impl<F: RadialFunction> Derivative<F> {
    pub fn new(inner: F) -> Self {
        Self { inner }
    }
}

impl<F: RadialFunction> RadialFunction for Derivative<F> {
    fn value(&self, r: f64) -> f64 {
        self.inner.slope(r)
    }
    fn slope(&self, r: f64) -> f64 {
        let h = 1e-5 * r;
        (self.inner.slope(r + h) - self.inner.slope(r - h)) / (2.0 * h)
    }
    fn asymptotics(&self) -> Asymptotics {
        self.inner.slope_asymptotics()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

/// `g(r) = r^{−2} h(1/r)`. Inverting twice gives back `h`.
#[derive(Debug, Clone)]
pub struct Inverted<F> {
    pub inner: F,
}

impl<F: RadialFunction> Inverted<F> {
    pub fn new(inner: F) -> Self {
        Self { inner }
    }

    pub fn invert(self) -> F {
        self.inner
    }
}

impl<F: RadialFunction> RadialFunction for Inverted<F> {
    fn value(&self, r: f64) -> f64 {
        let t = 1.0 / r;
        t * t * self.inner.value(t)
    }
    fn slope(&self, r: f64) -> f64 {
        let t = 1.0 / r;
        -2.0 * t * t * t * self.inner.value(t) - t * t * t * t * self.inner.slope(t)
    }
    fn asymptotics(&self) -> Asymptotics {
        let a = self.inner.asymptotics();
        Asymptotics {
            origin: -2.0 - a.tail,
            tail: -2.0 - a.origin,
        }
    }
    fn slope_asymptotics(&self) -> Asymptotics {
        let a = self.inner.asymptotics();
        let d = self.inner.slope_asymptotics();
        Asymptotics {
            origin: (-3.0 - a.tail).min(-4.0 - d.tail),
            tail: (-3.0 - a.origin).max(-4.0 - d.origin),
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.inner.breakpoints().iter().map(|x| 1.0 / x).collect();
        b.reverse();
        b
    }
    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

/// `H(x) = g(e^x) e^{x/p}` on the line.
#[derive(Debug, Clone)]
pub struct LogLine<F> {
    pub inner: F,
    pub p: f64,
}

impl<F: RadialFunction> LogLine<F> {
    pub fn new(inner: F, p: f64) -> Result<Self> {
        let a = inner.asymptotics();
        if !(a.origin + 1.0 / p > 0.0) || !(a.tail + 1.0 / p < 0.0) {
            return domain(format!(
                "g is not in L^{p}(0,∞): ends r^{} and r^{}",
                a.origin, a.tail
            ));
        }
        Ok(Self { inner, p })
    }
}

impl<F: RadialFunction> LineFunction for LogLine<F> {
    fn value(&self, x: f64) -> f64 {
        let g = self.inner.value(x.exp());
        if g == 0.0 {
            return 0.0;
        }
        g.signum() * (g.abs().ln() + x / self.p).exp()
    }
    fn rates(&self) -> (f64, f64) {
        let a = self.inner.asymptotics();
        ((a.origin + 1.0 / self.p).min(RATE_CAP), (-a.tail - 1.0 / self.p).min(RATE_CAP))
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().iter().map(|b| b.ln()).collect()
    }
    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

fn integral<F: RadialFunction>(f: &F, m: f64, k: f64, derivative: bool, what: &str) -> Result<f64> {
    Ok(radial_integral(f, m, k, derivative, TIGHT, what)?.value)
}

/// `E(f) − a(n−2−a)H(f) = ω ∫ r^{n−1−2a} (u')² dr` with `u = r^a f`.
///
/// The integration by parts behind it drops `r^{n−2} f(r)²` at the origin;
/// when that term does not visibly decay between `r = 1e−4` and `r = 1e−6`
/// the check is returned as not applicable.
pub fn check_power_substitution<F: RadialFunction>(f: &F, n: u32, a: f64, q: f64) -> Result<TransformCheck> {
    const NAME: &str = "power_substitution";
    EmbeddingCase::thm2(n, q, a)?;
    let nf = n as f64;
    let boundary = |r: f64| r.powf(nf - 2.0) * f.value(r).powi(2);
    let (b4, b6) = (boundary(1e-4), boundary(1e-6));
    if !b4.is_finite() || !b6.is_finite() || !(b6 <= 0.5 * b4 || b6 == 0.0) {
        return Ok(TransformCheck::not_applicable(NAME, STEP_TOLERANCE));
    }
    if f.is_zero() {
        return Ok(TransformCheck::new(NAME, 0.0, 0.0, STEP_TOLERANCE));
    }
    let omega = surface_area(n)?;
    let e = integral(f, nf - 1.0, 2.0, true, "gradient energy")?;
    let hardy = if a != 0.0 { integral(f, nf - 3.0, 2.0, false, "Hardy term")? } else { 0.0 };
    let lhs = omega * (e - a * (nf - 2.0 - a) * hardy);
    let rhs = if a == 0.0 {
        omega * e
    } else {
        let u = PowerWeighted::new(f, a);
        omega * integral(&u, nf - 1.0 - 2.0 * a, 2.0, true, "substituted energy")?
    };
    Ok(TransformCheck::new(NAME, lhs, rhs, STEP_TOLERANCE))
}

struct Side {
    r_exp: f64,
    s_exp: f64,
    power: f64,
    derivative: bool,
    factor: f64,
}

fn rescale_side<F: RadialFunction>(u: &F, k: f64, name: &str, side: Side) -> Result<TransformCheck> {
    if u.is_zero() {
        return Ok(TransformCheck::new(name, 0.0, 0.0, STEP_TOLERANCE));
    }
    let big_u = PowerArgument::new(u, k)?;
    let lhs = integral(u, side.r_exp, side.power, side.derivative, name)?;
    let rhs = side.factor * integral(&big_u, side.s_exp, side.power, side.derivative, name)?;
    Ok(TransformCheck::new(name, lhs, rhs, STEP_TOLERANCE))
}

/// Under `s = r^k`, `U(s) = u(r)`:
/// `∫ r^{k+1} u'² dr = k ∫ s² U'² ds` and
/// `∫ r^{qk/2−1} |u|^q dr = k^{−1} ∫ s^{q/2−1} |U|^q ds`.
pub fn check_rescale<F: RadialFunction>(u: &F, k: f64, q: f64) -> Result<Vec<TransformCheck>> {
    if !(k > 0.0) {
        return domain(format!("rescaling exponent must be positive, got {k}"));
    }
    Ok(vec![
        rescale_side(
            u,
            k,
            "rescale_energy",
            Side {
                r_exp: k + 1.0,
                s_exp: 2.0,
                power: 2.0,
                derivative: true,
                factor: k,
            },
        )?,
        rescale_side(
            u,
            k,
            "rescale_norm",
            Side {
                r_exp: q * k / 2.0 - 1.0,
                s_exp: q / 2.0 - 1.0,
                power: q,
                derivative: false,
                factor: 1.0 / k,
            },
        )?,
    ])
}

/// The `L^p` version of [`check_rescale`], with `s = r^k`,
/// `k = (n − p(a+1))/(p − 1)`.
pub fn check_rescale_lp<F: RadialFunction>(u: &F, n: u32, p: f64, q: f64, a: f64) -> Result<Vec<TransformCheck>> {
    let nf = n as f64;
    if !(p > 1.0 && q > p) {
        return domain(format!("rescale needs 1 < p < q, got p={p}, q={q}"));
    }
    let k = (nf - p * (a + 1.0)) / (p - 1.0);
    if !(k > 0.0) {
        return domain(format!("n − p(a+1) must be positive, got k={k}"));
    }
    let n_over_qstar = nf / p - 1.0;
    Ok(vec![
        rescale_side(
            u,
            k,
            "rescale_lp_energy",
            Side {
                r_exp: nf - 1.0 - p * a,
                s_exp: 2.0 * p - 2.0,
                power: p,
                derivative: true,
                factor: k.powf(p - 1.0),
            },
        )?,
        rescale_side(
            u,
            k,
            "rescale_lp_norm",
            Side {
                r_exp: q * (n_over_qstar - a) - 1.0,
                s_exp: q * (p - 1.0) / p - 1.0,
                power: q,
                derivative: false,
                factor: 1.0 / k,
            },
        )?,
    ])
}

fn tail_spec(tail: f64) -> QuadratureSpec {
    let rate = if tail > -50.0 { -tail } else { 3.0 };
    QuadratureSpec {
        rel_tol: TIGHT,
        abs_tol: 1e-300,
        decay: Decay::Algebraic(rate),
        ..QuadratureSpec::default()
    }
}

/// `∫_0^∞ r² h² dr = ∫_0^∞ g² dr` for `g(r) = r^{−2}h(1/r)`, together with
/// `∫_r^∞ h = ∫_0^{1/r} g` at `r = 1/2, 1, 2`.
pub fn check_inversion<F: RadialFunction>(h: &F) -> Result<Vec<TransformCheck>> {
    let radii = [0.5, 1.0, 2.0];
    if h.is_zero() {
        let mut v = vec![TransformCheck::new("inversion_l2", 0.0, 0.0, INVERSION_TOLERANCE)];
        v.extend(
            radii
                .iter()
                .map(|r| TransformCheck::new(format!("inversion_primitive(r={r})"), 0.0, 0.0, STEP_TOLERANCE)),
        );
        return Ok(v);
    }
    let g = Inverted::new(h);
    let lhs = integral(h, 2.0, 2.0, false, "∫ r²h²")?;
    let rhs = integral(&g, 0.0, 2.0, false, "∫ g²")?;
    let mut out = vec![TransformCheck::new("inversion_l2", lhs, rhs, INVERSION_TOLERANCE)];

    let ha = h.asymptotics();
    let ga = g.asymptotics();
    if !(ha.tail < -1.0) {
        return domain(format!("∫_r^∞ h diverges (h ~ r^{})", ha.tail));
    }
    let sigma = if ga.origin < 50.0 { ga.origin } else { 0.0 };
    let from_zero = QuadratureSpec {
        rel_tol: TIGHT,
        abs_tol: 1e-300,
        ..QuadratureSpec::default()
    }
    .with_sigma(sigma);
    for r in radii {
        let tail = quad::integrate_to_infinity(|t| h.value(t), r, &tail_spec(ha.tail))?;
        let head = quad::integrate_from_zero(|t| g.value(t), 1.0 / r, &from_zero)?;
        out.push(TransformCheck::new(
            format!("inversion_primitive(r={r})"),
            tail.value,
            head.value,
            STEP_TOLERANCE,
        ));
    }
    Ok(out)
}

/// The logarithmic change of variables `t = e^x`, `H(x) = g(e^x)e^{x/p}`,
/// applied to the Bliss problem with exponents `(p, 2)`:
///
/// * `∫_0^∞ |g|^p dt = ∫ |H|^p dx`;
/// * `∫_0^∞ (∫_0^s g)² s^{2/p−3} ds = ∫ |∫_{−∞}^x H(y)e^{−(x−y)/p'} dy|² dx`;
/// * the latter equals `(p'/2) ∫∫ H(u)H(v)e^{−|u−v|/p'} du dv`.
///
/// A fourth, informational entry repeats the last identity with the kernel
/// `e^{−2|u−v|/p'}`, which does not satisfy it.
pub fn check_young_chain<F: RadialFunction>(g: &F, p: f64) -> Result<Vec<TransformCheck>> {
    if !(p > 1.0 && p < 2.0) {
        return domain(format!("the Young chain needs 1 < p < 2, got {p}"));
    }
    let names = [
        "young_chain_norm",
        "young_chain_line_square",
        "young_chain_bilinear",
        "young_chain_bilinear_doubled_kernel",
    ];
    if g.is_zero() {
        let mut v: Vec<_> = names.iter().map(|n| TransformCheck::new(*n, 0.0, 0.0, STEP_TOLERANCE)).collect();
        v[3].informational = true;
        return Ok(v);
    }
    let pp = p / (p - 1.0);
    let line = LogLine::new(g, p)?;
    let (ll, lr) = line.rates();
    let breaks = line.breakpoints();

    let lp = integral(g, 0.0, p, false, "∫ |g|^p")?;
    let spec = QuadratureSpec {
        rel_tol: TIGHT,
        abs_tol: 1e-300,
        decay: Decay::Exponential(p * ll.min(lr)),
        ..QuadratureSpec::default()
    };
    let line_lp = quad::integrate_line_with_breaks(|x| line.value(x).abs().powf(p), &spec, &breaks)?.value;

    let tol = Precision::default().single;
    let bliss = bliss_lhs_integral(g, p, 2.0, tol)?;
    let square = line_square(&line, 1.0 / pp, tol)?;
    let bilinear = line_bilinear(&line, 1.0 / pp, tol)?;
    let doubled = line_bilinear(&line, 2.0 / pp, tol)?;

    Ok(vec![
        TransformCheck::new(names[0], lp, line_lp, STEP_TOLERANCE),
        TransformCheck::new(names[1], bliss.value, square.value, STEP_TOLERANCE),
        TransformCheck::new(names[2], square.value, 0.5 * pp * bilinear.value, STEP_TOLERANCE),
        TransformCheck::new(names[3], square.value, 0.5 * pp * doubled.value, STEP_TOLERANCE).informational(),
    ])
}

/// The full chain `f → u = r^a f → U(s) = u(s^{1/k}) → h = U' → g`, with
/// `k = n − 2 − 2a`, as a single identity between the weighted quotient of
/// `f` and `ω^{1−2/q} k^{1+2/q}` divided by the Bliss quotient of `g` with
/// exponents `(2, q)`.
pub fn check_end_to_end<F: RadialFunction>(f: &F, n: u32, q: f64, a: f64) -> Result<TransformCheck> {
    let case = EmbeddingCase::thm2(n, q, a)?;
    if case.is_hardy_endpoint() {
        return domain("the chain degenerates at the Hardy endpoint a = (n−2)/2");
    }
    let k = n as f64 - 2.0 - 2.0 * a;
    let prec = Precision {
        single: 1e-11,
        double: 1e-9,
    };
    let direct = functionals::ckn_quotient_with(f, n, q, a, &prec)?.quotient;
    let g = Inverted::new(Derivative::new(PowerArgument::new(PowerWeighted::new(f, a), k)?));
    let bliss = functionals::bliss_quotient_with(&g, 2.0, q, &prec)?.value;
    let omega = surface_area(n)?;
    let replayed = omega.powf(1.0 - 2.0 / q) * k.powf(1.0 + 2.0 / q) / bliss;
    Ok(TransformCheck::new("end_to_end", direct, replayed, REPLAY_TOLERANCE))
}

/// Every step of the reduction for one profile, in order: power
/// substitution, rescaling, inversion of `h = U'`, and the composed chain.
pub fn replay_ckn<F: RadialFunction>(f: &F, n: u32, q: f64, a: f64) -> Result<Vec<TransformCheck>> {
    let k = n as f64 - 2.0 - 2.0 * a;
    let mut out = vec![check_power_substitution(f, n, a, q)?];
    let u = PowerWeighted::new(f, a);
    out.extend(check_rescale(&u, k, q)?);
    let h = Derivative::new(PowerArgument::new(&u, k)?);
    out.extend(check_inversion(&h)?);
    out.push(check_end_to_end(f, n, q, a)?);
    Ok(out)
}
