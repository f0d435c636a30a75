//! Quadrature-backed functionals and variational quotients.
//!
//! Every integral is of the form `∫ r^m |f|^k` (or with `f'`), and its
//! convergence is decided before any quadrature from the power-law ends of
//! the profile ([`Asymptotics`]). Divergent integrals are domain errors.

use std::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{self, EmbeddingCase};
use crate::error::{domain, Error, Result};
use crate::profiles::{Asymptotics, LineFunction, PowerWeighted, ProfileDescriptor, RadialFunction};
use crate::quad::{self, Decay, QuadResult, QuadratureSpec};
use crate::specfn::surface_area;

/// Relative tolerances used by the functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    /// Single integrals.
    pub single: f64,
    /// The triangular double integral.
    pub double: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            single: 1e-10,
            double: 1e-8,
        }
    }
}

impl Precision {
    /// Looser settings for optimizer inner loops.
    pub fn fast() -> Self {
        Self {
            single: 1e-9,
            double: 1e-7,
        }
    }
}

/// Both sides of a quadratic or `L^p` inequality for one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub case: EmbeddingCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileDescriptor>,
    /// Gradient energy, weighted for the `L^p` family.
    pub lhs_energy: f64,
    /// `∫|f|²/|x|²`; zero when the Hardy coefficient vanishes and it is not needed.
    pub hardy_value: f64,
    pub weighted_norm: f64,
    pub quotient: f64,
    pub sharp_constant: f64,
    /// `quotient/sharp − 1`; the plain quotient when the sharp constant is zero.
    pub relative_deficit: f64,
    /// Absolute error estimate on `quotient`.
    pub quad_error: f64,
}

impl QuotientReport {
    pub fn with_profile(mut self, d: ProfileDescriptor) -> Self {
        self.profile = Some(d);
        self
    }

    /// Relative error budget of the quotient.
    pub fn relative_error(&self) -> f64 {
        self.quad_error / self.quotient.abs()
    }
}

/// A ratio `numerator/denominator` with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub error_estimate: f64,
}

impl Ratio {
    fn new(numerator: f64, num_rel: f64, denominator: f64, den_rel: f64) -> Result<Self> {
        if denominator == 0.0 {
            return domain("zero denominator: the profile vanishes");
        }
        let value = numerator / denominator;
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("ratio {numerator}/{denominator}")));
        }
        Ok(Self {
            value,
            numerator,
            denominator,
            error_estimate: value.abs() * (num_rel + den_rel),
        })
    }
}

pub(crate) fn rel_err(r: &QuadResult) -> f64 {
    if r.value == 0.0 {
        0.0
    } else {
        r.error_estimate / r.value.abs()
    }
}

const ZERO: QuadResult = QuadResult {
    value: 0.0,
    error_estimate: 0.0,
    subdivisions_used: 0,
    converged: true,
};

/// Quadrature settings for an integrand `~ r^origin` at 0 and `~ r^tail` at ∞.
pub(crate) fn power_spec(origin: f64, tail: f64, rel_tol: f64, what: &str) -> Result<QuadratureSpec> {
    if !(origin > -1.0) {
        return domain(format!("{what} diverges at the origin (integrand ~ r^{origin})"));
    }
    if !(tail < -1.0) {
        return domain(format!("{what} diverges at infinity (integrand ~ r^{tail})"));
    }
    let sigma = if origin < 50.0 { origin } else { 0.0 };
    // exponential ends look like a steep algebraic tail to the map
    let decay = if tail > -50.0 { Decay::Algebraic(-tail) } else { Decay::Algebraic(3.0) };
    Ok(QuadratureSpec {
        rel_tol,
        abs_tol: 1e-300,
        singularity_exponent_at_zero: sigma,
        decay,
        max_subdivisions: 4000,
    })
}

/// `r^m |x|^k`, evaluated in log space so that huge and tiny factors cancel.
#[inline]
pub(crate) fn weighted_power(r: f64, m: f64, x: f64, k: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (m * r.ln() + k * x.abs().ln()).exp()
}

/// `r^m |f(r)|^k` from the log magnitude of `f`.
#[inline]
fn weighted_value<F: RadialFunction>(f: &F, r: f64, m: f64, k: f64) -> f64 {
    let (ln, sign) = f.ln_abs_value(r);
    if sign == 0.0 {
        return 0.0;
    }
    (m * r.ln() + k * ln).exp()
}

/// `∫_0^∞ r^m |f(r)|^k dr`, or with `f'` in place of `f`.
pub(crate) fn radial_integral<F: RadialFunction>(
    f: &F,
    m: f64,
    k: f64,
    derivative: bool,
    rel_tol: f64,
    what: &str,
) -> Result<QuadResult> {
    if f.is_zero() {
        return Ok(ZERO);
    }
    let Asymptotics { origin: o, tail: t } = if derivative { f.slope_asymptotics() } else { f.asymptotics() };
    let spec = power_spec(m + k * o, m + k * t, rel_tol, what)?;
    let breaks = f.breakpoints();
    if derivative {
        quad::integrate_halfline_with_breaks(|r| weighted_power(r, m, f.slope(r), k), &spec, &breaks)
    } else {
        quad::integrate_halfline_with_breaks(|r| weighted_value(f, r, m, k), &spec, &breaks)
    }
}

fn check_dimension(n: u32) -> Result<f64> {
    if n < 2 {
        return domain(format!("dimension must be at least 2, got {n}"));
    }
    surface_area(n)
}

/// `ω_{n−1} ∫_0^∞ r^{n−1−pa} |u'(r)|^p dr`.
pub fn weighted_grad_energy<F: RadialFunction>(u: &F, n: u32, p: f64, a: f64) -> Result<f64> {
    Ok(grad_energy(u, n, p, a, Precision::default().single)?.0)
}

fn grad_energy<F: RadialFunction>(u: &F, n: u32, p: f64, a: f64, tol: f64) -> Result<(f64, f64)> {
    let omega = check_dimension(n)?;
    if !(p >= 1.0) {
        return domain(format!("gradient exponent must be at least 1, got {p}"));
    }
    let r = radial_integral(u, n as f64 - 1.0 - p * a, p, true, tol, "gradient energy")?;
    Ok((omega * r.value, rel_err(&r)))
}

/// `ω_{n−1} ∫_0^∞ r^{n−3} f(r)² dr`.
pub fn hardy_term<F: RadialFunction>(f: &F, n: u32) -> Result<f64> {
    Ok(hardy(f, n, Precision::default().single)?.0)
}

fn hardy<F: RadialFunction>(f: &F, n: u32, tol: f64) -> Result<(f64, f64)> {
    let omega = check_dimension(n)?;
    let r = radial_integral(f, n as f64 - 3.0, 2.0, false, tol, "Hardy term")?;
    Ok((omega * r.value, rel_err(&r)))
}

/// `[ω_{n−1} ∫_0^∞ r^{n−1−w} |f|^q dr]^{1/q}`.
pub fn weighted_lq_norm<F: RadialFunction>(f: &F, n: u32, q: f64, w: f64) -> Result<f64> {
    Ok(lq_norm(f, n, q, w, Precision::default().single)?.0)
}

/// (norm, relative error of the norm)
fn lq_norm<F: RadialFunction>(f: &F, n: u32, q: f64, w: f64, tol: f64) -> Result<(f64, f64)> {
    let omega = check_dimension(n)?;
    if !(q >= 1.0) || !q.is_finite() {
        return domain(format!("norm exponent must be at least 1, got {q}"));
    }
    let r = radial_integral(f, n as f64 - 1.0 - w, q, false, tol, "weighted norm")?;
    Ok(((omega * r.value).powf(1.0 / q), rel_err(&r) / q))
}

/// `E(f) − a(n−2−a) H(f)` with `E(f) = ω ∫ r^{n−1} f'²`.
pub fn hardy_gap<F: RadialFunction>(f: &F, n: u32, a: f64) -> Result<f64> {
    let tol = Precision::default().single;
    let (e, _) = grad_energy(f, n, 2.0, 0.0, tol)?;
    let (h, _) = hardy(f, n, tol)?;
    Ok(e - a * (n as f64 - 2.0 - a) * h)
}

fn deficit(quotient: f64, sharp: f64) -> f64 {
    if sharp > 0.0 {
        quotient / sharp - 1.0
    } else {
        quotient
    }
}

/// `[E(f) − a(n−2−a)H(f)] / ‖f‖²`, with the norm weight `w = n − q(n−2)/2`.
pub fn ckn_quotient<F: RadialFunction>(f: &F, n: u32, q: f64, a: f64) -> Result<QuotientReport> {
    ckn_quotient_with(f, n, q, a, &Precision::default())
}

pub fn ckn_quotient_with<F: RadialFunction>(
    f: &F,
    n: u32,
    q: f64,
    a: f64,
    prec: &Precision,
) -> Result<QuotientReport> {
    let case = EmbeddingCase::thm2(n, q, a)?;
    let sharp = constants::d_qa(n, q, a)?;
    let coeff = a * (n as f64 - 2.0 - a);
    let (e, e_rel) = grad_energy(f, n, 2.0, 0.0, prec.single)?;
    let (h, h_rel) = if coeff != 0.0 { hardy(f, n, prec.single)? } else { (0.0, 0.0) };
    let (norm, norm_rel) = lq_norm(f, n, q, case.norm_weight(), prec.single)?;
    let num = e - coeff * h;
    let num_rel = (e * e_rel + coeff * h * h_rel) / num.abs().max(f64::MIN_POSITIVE);
    let ratio = Ratio::new(num, num_rel, norm * norm, 2.0 * norm_rel)?;
    Ok(QuotientReport {
        case,
        profile: None,
        lhs_energy: e,
        hardy_value: h,
        weighted_norm: norm,
        quotient: ratio.value,
        sharp_constant: sharp,
        relative_deficit: deficit(ratio.value, sharp),
        quad_error: ratio.error_estimate,
    })
}

/// `ω∫ r^{n−1−pa}|u'|^p / [ω∫ r^{q(n/q*−a)−1}|u|^q]^{p/q}`.
pub fn lp_quotient<F: RadialFunction>(u: &F, n: u32, p: f64, q: f64, a: f64) -> Result<QuotientReport> {
    lp_quotient_with(u, n, p, q, a, &Precision::default())
}

pub fn lp_quotient_with<F: RadialFunction>(
    u: &F,
    n: u32,
    p: f64,
    q: f64,
    a: f64,
    prec: &Precision,
) -> Result<QuotientReport> {
    let case = EmbeddingCase::thm4(n, p, q, a)?;
    let sharp = constants::d_pqa(n, p, q, a)?;
    let (e, e_rel) = grad_energy(u, n, p, a, prec.single)?;
    let (norm, norm_rel) = lq_norm(u, n, q, case.norm_weight(), prec.single)?;
    let ratio = Ratio::new(e, e_rel, norm.powf(p), p * norm_rel)?;
    Ok(QuotientReport {
        case,
        profile: None,
        lhs_energy: e,
        hardy_value: 0.0,
        weighted_norm: norm,
        quotient: ratio.value,
        sharp_constant: sharp,
        relative_deficit: deficit(ratio.value, sharp),
        quad_error: ratio.error_estimate,
    })
}

/// Log-spaced anchors holding the cumulative integral `∫_0^{s_j} g`.
struct Primitive<'a, F> {
    g: &'a F,
    ln_anchors: Vec<f64>,
    cumulative: Vec<f64>,
    /// `∫_0^∞ g` when `g` is integrable at infinity.
    total: Option<f64>,
    origin_spec: QuadratureSpec,
    tail_spec: Option<QuadratureSpec>,
    local_tol: f64,
    abs_tol: f64,
    failure: RefCell<Option<Error>>,
}

fn log_interval<F: RadialFunction>(g: &F, x0: f64, x1: f64, tol: f64, abs_tol: f64) -> Result<QuadResult> {
    let spec = QuadratureSpec {
        rel_tol: tol,
        abs_tol,
        ..QuadratureSpec::default()
    };
    quad::integrate_interval(|x| {
        let s = x.exp();
        g.value(s) * s
    }, x0, x1, &spec)
}

impl<'a, F: RadialFunction> Primitive<'a, F> {
    fn new(g: &'a F, tol: f64) -> Result<Self> {
        let Asymptotics { origin, tail } = g.asymptotics();
        let breaks = g.breakpoints();
        let lo = breaks.first().map_or(1e-6, |b| b.min(1.0) * 1e-2).min(1e-6).ln();
        let hi = breaks.last().map_or(1e6, |b| b.max(1.0) * 1e2).max(1e6).ln();
        let count = ((hi - lo) / 0.5).ceil() as usize;
        let ln_anchors: Vec<f64> = (0..=count).map(|j| lo + (hi - lo) * j as f64 / count as f64).collect();
        // roundoff in g (cancellation inside chained adapters) must not stall
        // pieces that are negligible next to the whole primitive
        let peak = ln_anchors.iter().map(|&x| (x.exp() * g.value(x.exp())).abs()).fold(0.0, f64::max);
        let abs_tol = (1e-3 * tol * peak).max(1e-300);
        let mut origin_spec = power_spec(origin, -2.0, tol, "primitive")?;
        origin_spec.abs_tol = abs_tol;
        let tail_spec = if tail < -1.0 {
            let mut spec = power_spec(0.0, tail, tol, "primitive")?;
            spec.abs_tol = abs_tol;
            Some(spec)
        } else {
            None
        };
        let mut cumulative = Vec::with_capacity(ln_anchors.len());
        cumulative.push(quad::integrate_from_zero(|s| g.value(s), ln_anchors[0].exp(), &origin_spec)?.value);
        for w in ln_anchors.windows(2) {
            let step = log_interval(g, w[0], w[1], tol, abs_tol)?.value;
            cumulative.push(cumulative.last().unwrap() + step);
        }
        let total = match &tail_spec {
            Some(spec) => {
                let last = *ln_anchors.last().unwrap();
                Some(cumulative.last().unwrap() + quad::integrate_to_infinity(|s| g.value(s), last.exp(), spec)?.value)
            }
            None => None,
        };
        Ok(Self {
            g,
            ln_anchors,
            cumulative,
            total,
            origin_spec,
            tail_spec,
            local_tol: tol,
            abs_tol,
            failure: RefCell::new(None),
        })
    }

    fn record<T>(&self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                let mut slot = self.failure.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                None
            }
        }
    }

    /// `∫_0^s g`.
    fn eval(&self, s: f64) -> f64 {
        let x = s.ln();
        let first = self.ln_anchors[0];
        let last = *self.ln_anchors.last().unwrap();
        let g = |t: f64| self.g.value(t);
        if x <= first {
            return self
                .record(quad::integrate_from_zero(g, s, &self.origin_spec))
                .map_or(f64::NAN, |r| r.value);
        }
        if x >= last {
            if let (Some(total), Some(spec)) = (self.total, &self.tail_spec) {
                return self
                    .record(quad::integrate_to_infinity(g, s, spec))
                    .map_or(f64::NAN, |r| total - r.value);
            }
            let base = *self.cumulative.last().unwrap();
            return self
                .record(log_interval(self.g, last, x, self.local_tol, self.abs_tol))
                .map_or(f64::NAN, |r| base + r.value);
        }
        let j = match self.ln_anchors.binary_search_by(|a| a.total_cmp(&x)) {
            Ok(j) => return self.cumulative[j],
            Err(j) => j - 1,
        };
        self.record(log_interval(self.g, self.ln_anchors[j], x, self.local_tol, self.abs_tol))
            .map_or(f64::NAN, |r| self.cumulative[j] + r.value)
    }

    fn take_failure(&self) -> Option<Error> {
        self.failure.borrow_mut().take()
    }
}

/// `[∫_0^∞ (∫_0^s g)^q s^{r−q} ds]^{p/q} / ∫_0^∞ |g|^p`, `r = q/p − 1`, for
/// nonnegative `g`.
pub fn bliss_quotient<F: RadialFunction>(g: &F, p: f64, q: f64) -> Result<Ratio> {
    bliss_quotient_with(g, p, q, &Precision::default())
}

pub fn bliss_quotient_with<F: RadialFunction>(g: &F, p: f64, q: f64, prec: &Precision) -> Result<Ratio> {
    if !(p > 1.0 && q > p) || !q.is_finite() {
        return domain(format!("Bliss quotient needs q > p > 1, got p={p}, q={q}"));
    }
    if g.is_zero() {
        return domain("zero denominator: the profile vanishes");
    }
    let den = radial_integral(g, 0.0, p, false, prec.single, "Bliss right side")?;
    let outer = bliss_lhs_integral(g, p, q, prec.single)?;
    let num = outer.value.powf(p / q);
    Ratio::new(num, (p / q) * rel_err(&outer), den.value, rel_err(&den))
}

/// `∫_0^∞ |∫_0^s g|^q s^{q/p−1−q} ds`; the error estimate includes the
/// tolerance of the inner primitive.
pub(crate) fn bliss_lhs_integral<F: RadialFunction>(g: &F, p: f64, q: f64, tol: f64) -> Result<QuadResult> {
    let r = q / p - 1.0;
    let Asymptotics { origin, tail } = g.asymptotics();
    let out_origin = q * (origin + 1.0) + r - q;
    let out_tail = if tail < -1.0 { r - q } else { q * (tail + 1.0) + r - q };
    let spec = power_spec(out_origin, out_tail, tol, "Bliss left side")?;
    let inner_tol = (tol * 1e-2).max(1e-12);
    let prim = Primitive::new(g, inner_tol)?;
    let outer = quad::integrate_halfline_with_breaks(
        |s| weighted_power(s, r - q, prim.eval(s), q),
        &spec,
        &g.breakpoints(),
    );
    if let Some(e) = prim.take_failure() {
        return Err(e);
    }
    let mut outer = outer?;
    outer.error_estimate += q * inner_tol * outer.value.abs();
    Ok(outer)
}

/// Anchored evaluation of `∫ e^{−κ|x−y|} f(y) dy`, split into the parts
/// with `y < x` and `y > x`.
struct Convolution<'a, F> {
    f: &'a F,
    kappa: f64,
    anchors: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    tol: f64,
    abs_tol: f64,
    failure: RefCell<Option<Error>>,
}

impl<'a, F: LineFunction> Convolution<'a, F> {
    fn direct(f: &'a F, kappa: f64, tol: f64) -> Self {
        Self {
            f,
            kappa,
            anchors: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
            tol,
            abs_tol: 1e-300,
            failure: RefCell::new(None),
        }
    }

    fn new(f: &'a F, kappa: f64, tol: f64) -> Result<Self> {
        let (ll, lr) = f.rates();
        let breaks = f.breakpoints();
        let lo = breaks.first().copied().unwrap_or(0.0).min(0.0) - 40.0 / ll;
        let hi = breaks.last().copied().unwrap_or(0.0).max(0.0) + 40.0 / lr;
        let h = ((hi - lo) / 4000.0).max(0.25);
        let count = ((hi - lo) / h).ceil() as usize;
        let mut conv = Self::direct(f, kappa, tol);
        conv.anchors = (0..=count).map(|j| lo + (hi - lo) * j as f64 / count as f64).collect();
        let peak = conv.anchors.iter().map(|&x| f.value(x).abs()).fold(0.0, f64::max);
        conv.abs_tol = (1e-4 * tol * peak).max(1e-300);
        let m = conv.anchors.len();
        let mut left = vec![0.0; m];
        left[0] = conv.far_left(conv.anchors[0])?;
        for j in 0..m - 1 {
            let (a, b) = (conv.anchors[j], conv.anchors[j + 1]);
            left[j + 1] = (kappa * (a - b)).exp() * left[j] + conv.piece_left(a, b, b)?;
        }
        let mut right = vec![0.0; m];
        right[m - 1] = conv.far_right(conv.anchors[m - 1])?;
        for j in (0..m - 1).rev() {
            let (a, b) = (conv.anchors[j], conv.anchors[j + 1]);
            right[j] = (kappa * (a - b)).exp() * right[j + 1] + conv.piece_right(a, b, a)?;
        }
        conv.left = left;
        conv.right = right;
        Ok(conv)
    }

    fn local_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.tol,
            abs_tol: self.abs_tol,
            ..QuadratureSpec::default()
        }
    }

    /// `∫_a^b e^{−κ(x−y)} f(y) dy`
    fn piece_left(&self, a: f64, b: f64, x: f64) -> Result<f64> {
        let k = self.kappa;
        Ok(quad::integrate_interval(|y| (k * (y - x)).exp() * self.f.value(y), a, b, &self.local_spec())?.value)
    }

    /// `∫_a^b e^{−κ(y−x)} f(y) dy`
    fn piece_right(&self, a: f64, b: f64, x: f64) -> Result<f64> {
        let k = self.kappa;
        Ok(quad::integrate_interval(|y| (k * (x - y)).exp() * self.f.value(y), a, b, &self.local_spec())?.value)
    }

    /// `∫_0^∞ e^{−κτ} f(x − τ) dτ`
    fn far_left(&self, x: f64) -> Result<f64> {
        let k = self.kappa;
        let spec = QuadratureSpec {
            decay: Decay::Exponential(k),
            abs_tol: 1e-300,
            ..self.local_spec()
        };
        let breaks: Vec<f64> = self.f.breakpoints().iter().map(|b| x - b).collect();
        Ok(quad::integrate_halfline_with_breaks(|t| (-k * t).exp() * self.f.value(x - t), &spec, &breaks)?.value)
    }

    fn far_right(&self, x: f64) -> Result<f64> {
        let k = self.kappa;
        let spec = QuadratureSpec {
            decay: Decay::Exponential(k),
            abs_tol: 1e-300,
            ..self.local_spec()
        };
        let breaks: Vec<f64> = self.f.breakpoints().iter().map(|b| b - x).collect();
        Ok(quad::integrate_halfline_with_breaks(|t| (-k * t).exp() * self.f.value(x + t), &spec, &breaks)?.value)
    }

    fn try_parts(&self, x: f64) -> Result<(f64, f64)> {
        if self.anchors.len() < 2 || x <= self.anchors[0] || x >= *self.anchors.last().unwrap() {
            return Ok((self.far_left(x)?, self.far_right(x)?));
        }
        let first = self.anchors[0];
        let h = self.anchors[1] - first;
        let j = (((x - first) / h).floor() as usize).min(self.anchors.len() - 2);
        let (a, b) = (self.anchors[j], self.anchors[j + 1]);
        let k = self.kappa;
        let l = (k * (a - x)).exp() * self.left[j] + self.piece_left(a, x, x)?;
        let r = (k * (x - b)).exp() * self.right[j + 1] + self.piece_right(x, b, x)?;
        Ok((l, r))
    }

    /// `(y < x part, y > x part)`, NaN after a recorded failure.
    fn parts(&self, x: f64) -> (f64, f64) {
        match self.try_parts(x) {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.failure.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                (f64::NAN, f64::NAN)
            }
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let (l, r) = self.parts(x);
        l + r
    }

    fn take_failure(&self) -> Option<Error> {
        self.failure.borrow_mut().take()
    }
}

/// `(e^{−|·|} ∗ f)(x) = ∫ e^{−|x−y|} f(y) dy` by direct quadrature.
pub fn young_convolution<F: LineFunction>(f: &F, x: f64) -> Result<f64> {
    check_line(f)?;
    let c = Convolution::direct(f, 1.0, Precision::default().single);
    Ok(c.far_left(x)? + c.far_right(x)?)
}

fn line_spec(rate: f64, tol: f64) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: tol,
        abs_tol: 1e-300,
        decay: Decay::Exponential(rate),
        ..QuadratureSpec::default()
    }
}

/// `∫ |∫_{−∞}^x e^{−κ(x−y)} h(y) dy|² dx`.
pub(crate) fn line_square<F: LineFunction>(h: &F, kappa: f64, tol: f64) -> Result<QuadResult> {
    let (ll, lr) = check_line(h)?;
    let inner_tol = (tol * 1e-2).max(1e-12);
    let conv = Convolution::new(h, kappa, inner_tol)?;
    let spec = line_spec(2.0 * ll.min(lr).min(kappa), tol);
    let r = quad::integrate_line_with_breaks(|x| conv.parts(x).0.powi(2), &spec, &h.breakpoints());
    if let Some(e) = conv.take_failure() {
        return Err(e);
    }
    r
}

/// `∫∫ h(u) e^{−κ|u−v|} h(v) du dv`.
pub(crate) fn line_bilinear<F: LineFunction>(h: &F, kappa: f64, tol: f64) -> Result<QuadResult> {
    let (ll, lr) = check_line(h)?;
    let inner_tol = (tol * 1e-2).max(1e-12);
    let conv = Convolution::new(h, kappa, inner_tol)?;
    let spec = line_spec(ll.min(lr), tol);
    let r = quad::integrate_line_with_breaks(|x| h.value(x) * conv.eval(x), &spec, &h.breakpoints());
    if let Some(e) = conv.take_failure() {
        return Err(e);
    }
    r
}

fn check_line<F: LineFunction>(f: &F) -> Result<(f64, f64)> {
    let (l, r) = f.rates();
    if !(l > 0.0 && r > 0.0) || !l.is_finite() || !r.is_finite() {
        return domain("line functionals need a profile with exponential tails on both sides");
    }
    Ok((l, r))
}

/// `‖f‖_{L^p(R)}`.
pub fn line_lp_norm<F: LineFunction>(f: &F, p: f64) -> Result<f64> {
    Ok(line_norm(f, p, Precision::default().single)?.0)
}

fn line_norm<F: LineFunction>(f: &F, p: f64, tol: f64) -> Result<(f64, f64)> {
    let (l, r) = check_line(f)?;
    if f.is_zero() {
        return Ok((0.0, 0.0));
    }
    let spec = QuadratureSpec {
        rel_tol: tol,
        abs_tol: 1e-300,
        decay: Decay::Exponential(p * l.min(r)),
        ..QuadratureSpec::default()
    };
    let res = quad::integrate_line_with_breaks(|x| f.value(x).abs().powf(p), &spec, &f.breakpoints())?;
    Ok((res.value.powf(1.0 / p), rel_err(&res) / p))
}

/// `‖e^{−|·|} ∗ f‖_{p'} / ‖f‖_p`.
pub fn young_ratio<F: LineFunction>(f: &F, p: f64) -> Result<Ratio> {
    young_ratio_with(f, p, &Precision::default())
}

pub fn young_ratio_with<F: LineFunction>(f: &F, p: f64, prec: &Precision) -> Result<Ratio> {
    if !(p > 1.0 && p < 2.0) {
        return domain(format!("Young ratio needs 1 < p < 2, got {p}"));
    }
    check_line(f)?;
    if f.is_zero() {
        return domain("zero denominator: the profile vanishes");
    }
    let pp = p / (p - 1.0);
    let (den, den_rel) = line_norm(f, p, prec.single)?;
    let inner_tol = (prec.single * 1e-2).max(1e-12);
    let (ll, lr) = f.rates();
    let conv = Convolution::new(f, 1.0, inner_tol)?;
    let spec = line_spec(pp * ll.min(lr).min(1.0), prec.single);
    let outer = quad::integrate_line_with_breaks(|x| conv.eval(x).abs().powf(pp), &spec, &f.breakpoints());
    if let Some(e) = conv.take_failure() {
        return Err(e);
    }
    let outer = outer?;
    Ratio::new(outer.value.powf(1.0 / pp), rel_err(&outer) / pp + inner_tol, den, den_rel)
}

/// Radial Stein–Weiss form over `‖h‖_p²`:
/// `ω² ∫∫ h(s)s^{n−1−α} max(s,t)^{−(n−2)} t^{n−1−α} h(t) ds dt / (ω∫ s^{n−1}|h|^p)^{2/p}`,
/// `α = n/p' − (n−2)/2`.
pub fn stein_weiss_radial_ratio<F: RadialFunction>(h: &F, n: u32, p: f64) -> Result<Ratio> {
    stein_weiss_radial_ratio_with(h, n, p, &Precision::default())
}

pub fn stein_weiss_radial_ratio_with<F: RadialFunction>(h: &F, n: u32, p: f64, prec: &Precision) -> Result<Ratio> {
    EmbeddingCase::stein_weiss(n, p)?;
    if h.is_zero() {
        return domain("zero denominator: the profile vanishes");
    }
    let omega = surface_area(n)?;
    let nf = n as f64;
    let alpha = constants::stein_weiss_alpha(n, p);
    let den = radial_integral(h, nf - 1.0, p, false, prec.single, "Stein–Weiss norm")?;
    let norm_sq = (omega * den.value).powf(2.0 / p);

    let Asymptotics { origin, tail } = h.asymptotics();
    let w = nf - 1.0 - alpha;
    let m = w - (nf - 2.0);
    let outer_origin = 2.0 * origin + nf + 1.0 - 2.0 * alpha;
    let outer_tail = if tail + w < -1.0 { 1.0 - alpha + tail } else { 2.0 * tail + nf + 1.0 - 2.0 * alpha };
    let outer = power_spec(outer_origin, outer_tail, prec.double, "Stein–Weiss form")?;
    // for s ≤ t the kernel splits as s^w h(s) · t^{w−(n−2)} h(t), so the
    // symmetric double integral is 2∫ t^{w−(n−2)} h(t) ∫_0^t s^w h(s) ds dt
    let weighted = PowerWeighted::new(h, w);
    let inner_tol = (prec.double * 1e-2).max(1e-12);
    let prim = Primitive::new(&weighted, inner_tol)?;
    let form = quad::integrate_halfline_with_breaks(
        |t| {
            let ((ln_h, sign_h), gt) = (h.ln_abs_value(t), prim.eval(t));
            if sign_h == 0.0 || gt == 0.0 {
                return 0.0;
            }
            sign_h * gt.signum() * (m * t.ln() + ln_h + gt.abs().ln()).exp()
        },
        &outer,
        &h.breakpoints(),
    );
    if let Some(e) = prim.take_failure() {
        return Err(e);
    }
    let form = form?;
    let form_rel = rel_err(&form) + inner_tol;
    Ratio::new(2.0 * omega * omega * form.value, form_rel, norm_sq, (2.0 / p) * rel_err(&den))
}

/// Monte-Carlo estimate of the sphere average of `|x−y|^{−(n−2)}` over
/// `|y| = t` at `|x| = s`; returns `(mean, standard error)`.
pub fn newtonian_sphere_mean_mc(n: u32, s: f64, t: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if n < 3 || samples < 2 || !(s > 0.0 && t > 0.0) {
        return domain("sphere mean needs n >= 3, s, t > 0 and at least 2 samples");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        // Box–Muller
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut y = vec![0.0; n as usize];
    for _ in 0..samples {
        for c in y.iter_mut() {
            *c = normal(&mut rng);
        }
        let norm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        // x = s e_1
        let mut d2 = 0.0;
        for (i, c) in y.iter().enumerate() {
            let yi = t * c / norm;
            let xi = if i == 0 { s } else { 0.0 };
            d2 += (xi - yi) * (xi - yi);
        }
        let v = d2.powf(-(n as f64 - 2.0) / 2.0);
        sum += v;
        sum_sq += v * v;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    Ok((mean, (var / m).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{extremal_bliss, extremal_ckn, extremal_radial_p, random_profile, FnRadial, RadialProfile};
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn gaussian() -> impl RadialFunction {
        FnRadial::new(
            |r: f64| (-r * r / 2.0).exp(),
            |r: f64| -r * (-r * r / 2.0).exp(),
            Asymptotics {
                origin: 0.0,
                tail: f64::NEG_INFINITY,
            },
        )
    }

    #[test]
    fn grad_energy_of_gaussian() {
        // independent composite Simpson oracle on [0, 40]
        let m = 400_000;
        let hstep = 40.0 / m as f64;
        let g = |r: f64| r.powi(4) * (-r * r).exp();
        let mut s = g(0.0) + g(40.0);
        for i in 1..m {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * hstep);
        }
        let oracle = 4.0 * PI * s * hstep / 3.0;
        let got = weighted_grad_energy(&gaussian(), 3, 2.0, 0.0).unwrap();
        assert!((got - oracle).abs() < 1e-8 * oracle);
        // closed form 3π^{3/2}/2
        assert!(rel(got, 1.5 * PI.powf(1.5)) < 1e-10);
    }

    #[test]
    fn zero_profiles() {
        let z = RadialProfile::power_ckn(0.0, 2.0, 1.0).unwrap().scale(0.0).unwrap();
        assert_eq!(weighted_grad_energy(&z, 3, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(hardy_term(&z, 3).unwrap(), 0.0);
        assert!(ckn_quotient(&z, 3, 6.0, 0.0).is_err());
        assert!(bliss_quotient(&z, 2.0, 4.0).is_err());
        assert!(stein_weiss_radial_ratio(&z, 3, 1.5).is_err());
        let zl = RadialProfile::cosh_power(1.0, 3.0).unwrap().scale(0.0).unwrap();
        assert!(young_ratio(&zl, 1.5).is_err());
    }

    #[test]
    fn hardy_examples() {
        let f = extremal_ckn(3, 6.0, 0.0).unwrap();
        assert!(rel(hardy_term(&f, 3).unwrap(), 2.0 * PI * PI) < 1e-10);
        let g = f.scale(3.0).unwrap();
        assert!(rel(hardy_term(&g, 3).unwrap(), 9.0 * 2.0 * PI * PI) < 1e-10);
    }

    #[test]
    fn norm_examples() {
        let e = FnRadial::new(|r: f64| (-r).exp(), |r: f64| -(-r).exp(), Asymptotics { origin: 0.0, tail: f64::NEG_INFINITY });
        assert!(rel(weighted_lq_norm(&e, 3, 2.0, 0.0).unwrap(), PI.sqrt()) < 1e-10);
        let f = extremal_ckn(4, 3.0, 0.5).unwrap();
        let c = f.scale(-2.5).unwrap();
        assert!(rel(weighted_lq_norm(&c, 4, 3.0, 1.0).unwrap(), 2.5 * weighted_lq_norm(&f, 4, 3.0, 1.0).unwrap()) < 1e-12);
    }

    #[test]
    fn energy_dilation_law() {
        let u = extremal_radial_p(4, 3.0, 6.0, 0.0).unwrap();
        let (n, p, a) = (4u32, 3.0, 0.4);
        let e = weighted_grad_energy(&u, n, p, a).unwrap();
        for lambda in [0.1, 2.0, 10.0] {
            let d = u.dilate(lambda).unwrap();
            let want = lambda.powf(p * (1.0 + a) - n as f64) * e;
            assert!(rel(weighted_grad_energy(&d, n, p, a).unwrap(), want) < 1e-9);
        }
    }

    #[test]
    fn divergent_weights_are_rejected() {
        // a ≥ (n−2)/2 makes the gradient energy diverge at the origin
        let f = RadialProfile::power_ckn(0.5, 1.0, 1.0).unwrap();
        assert!(matches!(weighted_grad_energy(&f, 3, 2.0, 0.0), Err(Error::Domain(_))));
        let slow = RadialProfile::power_ckn(0.0, 1.0, 2.0).unwrap();
        assert!(matches!(hardy_term(&slow, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn ckn_extremals_attain() {
        for (n, q, a) in [(3, 6.0, 0.0), (4, 4.0, 0.5), (5, 3.0, 1.0), (4, 3.0, 0.25), (5, 4.0, 1.0)] {
            let f = extremal_ckn(n, q, a).unwrap();
            let r = ckn_quotient(&f, n, q, a).unwrap();
            assert!(r.relative_deficit.abs() < 1e-8, "({n},{q},{a}): {r:?}");
        }
    }

    #[test]
    fn ckn_dilation_and_scale_invariance() {
        let f = random_profile(11, 0.0, -2.0).unwrap();
        let base = ckn_quotient(&f, 4, 3.0, 0.5).unwrap().quotient;
        for lambda in [0.1, 10.0] {
            let d = f.dilate(lambda).unwrap();
            assert!(rel(ckn_quotient(&d, 4, 3.0, 0.5).unwrap().quotient, base) < 1e-9);
        }
        let s = f.scale(-7.0).unwrap();
        assert!(rel(ckn_quotient(&s, 4, 3.0, 0.5).unwrap().quotient, base) < 1e-12);
    }

    #[test]
    fn bliss_examples() {
        let k = constants::bliss_k(2.0, 4.0).unwrap();
        for c in [0.5, 1.0, 2.0] {
            let g = extremal_bliss(2.0, 4.0, c).unwrap();
            assert!(rel(bliss_quotient(&g, 2.0, 4.0).unwrap().value, k) < 1e-8);
        }
        let g = extremal_bliss(1.5, 3.0, 1.0).unwrap();
        assert!(rel(bliss_quotient(&g, 1.5, 3.0).unwrap().value, 2f64.sqrt()) < 1e-8);
    }

    #[test]
    fn lp_extremals_attain() {
        for (n, p, q, a) in [(4, 3.0, 6.0, 0.0), (3, 1.5, 3.0, 0.5), (5, 2.0, 4.0, 1.0)] {
            let u = extremal_radial_p(n, p, q, a).unwrap();
            let r = lp_quotient(&u, n, p, q, a).unwrap();
            assert!(r.relative_deficit.abs() < 1e-8, "({n},{p},{q},{a}): {r:?}");
        }
    }

    #[test]
    fn lp_matches_ckn_at_p_two() {
        let f = random_profile(5, 0.0, -1.8).unwrap();
        let (n, q, a) = (5u32, 3.0, 1.0);
        let ckn = ckn_quotient(&f, n, q, a).unwrap().quotient;
        let u = crate::profiles::PowerWeighted::new(&f, a);
        let lp = lp_quotient(&u, n, 2.0, q, a).unwrap().quotient;
        assert!(rel(lp, ckn) < 1e-9, "{lp} vs {ckn}");
    }

    #[test]
    fn young_extremal_and_bump() {
        let p: f64 = 4.0 / 3.0;
        let best = constants::young_a(p).unwrap();
        let f = crate::profiles::extremal_young_derived(p).unwrap();
        let r = young_ratio(&f, p).unwrap();
        assert!(rel(r.value, best) < 1e-8, "{r:?}");
        let printed = crate::profiles::extremal_young(p).unwrap();
        let r = young_ratio(&printed, p).unwrap();
        assert!(r.value < best);
        assert!((r.value - 0.67787).abs() < 1e-4);
        let c = printed.scale(3.0).unwrap();
        assert!(rel(young_ratio(&c, p).unwrap().value, r.value) < 1e-12);
    }

    #[test]
    fn convolution_examples() {
        // e^{−|·|} ∗ sech² at 0: 2∫_0^∞ e^{−y} sech²y dy = π − 2
        let s = RadialProfile::cosh_power(1.0, 2.0).unwrap();
        assert!((young_convolution(&s, 0.0).unwrap() - (PI - 2.0)).abs() < 1e-10);
        let f = crate::profiles::random_line_profile(8, 0.6, 2.5).unwrap();
        let conv = Convolution::new(&f, 1.0, 1e-12).unwrap();
        for x in [-30.0, -3.3, 0.0, 0.7, 12.0, 60.0] {
            let direct = young_convolution(&f, x).unwrap();
            assert!(rel(conv.eval(x), direct) < 1e-10, "x={x}");
        }
    }

    #[test]
    fn stein_weiss_candidate_attains() {
        for (n, p) in [(3u32, 1.5), (4, 1.75)] {
            let q = p / (p - 1.0);
            let alpha = constants::stein_weiss_alpha(n, p);
            let f = extremal_ckn(n, q, 0.0).unwrap();
            let h = crate::profiles::FnRadial::new(
                |s: f64| (s.powf(-alpha) * f.eval(s).unwrap()).powf(q - 1.0),
                |_s: f64| 0.0,
                Asymptotics {
                    origin: -(alpha) * (q - 1.0),
                    tail: (-alpha - (n as f64 - 2.0)) * (q - 1.0),
                },
            );
            let r = stein_weiss_radial_ratio(&h, n, p).unwrap();
            let a = constants::stein_weiss_a(n, p).unwrap();
            assert!(rel(r.value, a) < 1e-6, "({n},{p}) {} vs {a}", r.value);
        }
    }

    #[test]
    fn stein_weiss_factorization_matches_triangle_quadrature() {
        let (n, p) = (3u32, 1.5);
        let nf = n as f64;
        let w = nf - 1.0 - constants::stein_weiss_alpha(n, p);
        let h = crate::profiles::random_profile(5, -0.5, -2.5).unwrap();
        let omega = surface_area(n).unwrap();
        let Asymptotics { origin, tail } = h.asymptotics();
        let alpha = constants::stein_weiss_alpha(n, p);
        let inner = power_spec(origin + w, -2.0, 1e-11, "inner").unwrap();
        let outer = power_spec(2.0 * origin + nf + 1.0 - 2.0 * alpha, 1.0 - alpha + tail, 1e-9, "outer").unwrap();
        let kernel = |s: f64, t: f64| {
            let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
            lo.powf(w) * hi.powf(w - (nf - 2.0)) * h.eval(lo).unwrap() * h.eval(hi).unwrap()
        };
        let form = quad::integrate_triangle_symmetric_with_breaks(kernel, &inner, &outer, &RadialFunction::breakpoints(&h)).unwrap();
        let den = radial_integral(&h, nf - 1.0, p, false, 1e-12, "norm").unwrap().value;
        let triangle = omega * omega * form.value / (omega * den).powf(2.0 / p);
        let r = stein_weiss_radial_ratio(&h, n, p).unwrap();
        assert!(rel(r.value, triangle) < 1e-7, "{} vs {triangle}", r.value);
    }

    #[test]
    fn sphere_mean_monte_carlo() {
        for (t, want) in [(0.5, 1.0), (2.0, 0.5)] {
            let (m, se) = newtonian_sphere_mean_mc(3, 1.0, t, 200_000, 1).unwrap();
            assert!((m - want).abs() < 3.0 * se + 1e-12, "{m} ± {se}");
        }
    }
}
