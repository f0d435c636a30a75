//! Adaptive Gauss–Kronrod quadrature on finite intervals, the half-line and
//! the real line, plus the symmetric double integral over the positive quadrant.
//!
//! Half-line integrals are split at `r = 1`. The piece on `(0, 1)` is mapped
//! by `r = u^{1/(1+σ)}`, which turns an endpoint behaviour `r^σ` into a
//! bounded integrand. The piece on `(1, ∞)` is mapped by
//! `r = u^{-1/(m-1)}` for algebraic decay `r^{-m}` and by `r = 1 − 2 ln(u)/c`
//! for exponential decay `e^{-c r}`; the factor 2 makes the mapped integrand
//! vanish linearly at `u = 0` instead of approaching a constant. All pieces share one adaptive heap, so
//! the tolerance is global rather than per piece.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

// Kronrod abscissae (QUADPACK qk21); odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_386_080,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Asymptotic behaviour of an integrand as `r → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    /// `|f(r)| ~ r^{-rate}` with `rate > 1`.
    Algebraic(f64),
    /// `|f(r)| ~ e^{-rate·r}` (times at most a power of `r`).
    Exponential(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `σ` in `f(r) ~ r^σ` as `r → 0`; must exceed `−1`.
    pub singularity_exponent_at_zero: f64,
    pub decay: Decay,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            singularity_exponent_at_zero: 0.0,
            decay: Decay::Exponential(1.0),
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.singularity_exponent_at_zero = sigma;
        self
    }

    pub fn with_decay(mut self, decay: Decay) -> Self {
        self.decay = decay;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) {
            return domain("quadrature tolerances must be positive");
        }
        Ok(())
    }

    fn validate_sigma(&self) -> Result<()> {
        let s = self.singularity_exponent_at_zero;
        if !(s > -1.0) || !s.is_finite() {
            return domain(format!(
                "integrand ~ r^{s} at the origin is not integrable (need σ > −1)"
            ));
        }
        Ok(())
    }

    fn validate_decay(&self) -> Result<()> {
        match self.decay {
            Decay::Algebraic(m) if !(m > 1.0) || !m.is_finite() => domain(format!(
                "integrand ~ r^-{m} at infinity is not integrable (need rate > 1)"
            )),
            Decay::Exponential(c) if !(c > 0.0) || !c.is_finite() => {
                domain(format!("exponential decay rate must be positive, got {c}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

/// One GK21 application on `[a, b]`: (Kronrod value, |Kronrod − Gauss|).
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let value = resk * half;
    let err = ((resk - resg) * half).abs();
    if !value.is_finite() || !err.is_finite() {
        return Err(Error::NonFinite(format!(
            "integrand is not finite on [{a:e}, {b:e}]"
        )));
    }
    Ok((value, err))
}

/// Coordinate change applied to one panel of the integration domain.
#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// `r = b·u^s`, `s = 1/(1+σ)`, `u ∈ (0, 1)`.
    FromZero { b: f64, s: f64 },
    /// `r = a·u^{−e}`, `e = 1/(m−1)`, `u ∈ (0, 1)`.
    AlgebraicTail { a: f64, e: f64 },
    /// `r = a − ln(u)/c`, `u ∈ (0, 1)`; `c` is half the declared decay rate.
    ExpTail { a: f64, c: f64 },
}

impl Map {
    #[inline]
    fn apply<F: Fn(f64) -> f64>(&self, f: &F, u: f64) -> f64 {
        match *self {
            Map::Identity => f(u),
            Map::FromZero { b, s } => {
                let r = b * u.powf(s);
                if r <= 0.0 {
                    return 0.0;
                }
                f(r) * s * r / u
            }
            Map::AlgebraicTail { a, e } => {
                let r = a * u.powf(-e);
                if !r.is_finite() {
                    return 0.0;
                }
                f(r) * e * r / u
            }
            Map::ExpTail { a, c } => {
                let r = a - u.ln() / c;
                if !r.is_finite() {
                    return 0.0;
                }
                f(r) / (c * u)
            }
        }
    }

    /// Pre-image of a physical point, when it lies inside the panel.
    fn inverse(&self, r: f64) -> Option<f64> {
        let u = match *self {
            Map::Identity => r,
            Map::FromZero { b, s } => (r / b).powf(1.0 / s),
            Map::AlgebraicTail { a, e } => (r / a).powf(-1.0 / e),
            Map::ExpTail { a, c } => (-(r - a) * c).exp(),
        };
        u.is_finite().then_some(u)
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    map: Map,
    /// Physical point is `sign · r` where `r` is produced by `map`.
    sign: f64,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    panel: usize,
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    panels: &[Panel],
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    let eval = |seg_panel: usize, a: f64, b: f64| -> Result<(f64, f64)> {
        let p = panels[seg_panel];
        let g = |u: f64| {
            let sign = p.sign;
            p.map.apply(&|r: f64| f(sign * r), u)
        };
        gk21(&g, a, b)
    };

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    for (idx, p) in panels.iter().enumerate() {
        // physical break points mapped into this panel
        let mut cuts = vec![p.lo, p.hi];
        for &x in breaks {
            if x * p.sign <= 0.0 && !matches!(p.map, Map::Identity) {
                continue;
            }
            let r = if matches!(p.map, Map::Identity) { x } else { x * p.sign };
            if let Some(u) = p.map.inverse(r) {
                if u > p.lo && u < p.hi {
                    cuts.push(u);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(b.abs()));
        for w in cuts.windows(2) {
            let (value, err) = eval(idx, w[0], w[1])?;
            heap.push(Segment {
                panel: idx,
                a: w[0],
                b: w[1],
                value,
                err,
            });
        }
    }

    let totals = |heap: &BinaryHeap<Segment>, frozen: &[Segment]| {
        let mut v = 0.0;
        let mut e = 0.0;
        for s in heap.iter().chain(frozen.iter()) {
            v += s.value;
            e += s.err;
        }
        (v, e)
    };

    let (mut value, mut err) = totals(&heap, &frozen);
    let mut subdivisions = 0usize;
    let mut since_resum = 0usize;
    loop {
        let tol = (spec.rel_tol * value.abs()).max(spec.abs_tol);
        if err <= tol {
            let (v, e) = totals(&heap, &frozen);
            value = v;
            err = e;
            if err <= (spec.rel_tol * value.abs()).max(spec.abs_tol) {
                return Ok(QuadResult {
                    value,
                    error_estimate: err,
                    subdivisions_used: subdivisions,
                    converged: true,
                });
            }
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        if subdivisions >= spec.max_subdivisions {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = eval(worst.panel, worst.a, mid)?;
        let (v2, e2) = eval(worst.panel, mid, worst.b)?;
        subdivisions += 1;
        value += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        heap.push(Segment {
            panel: worst.panel,
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            panel: worst.panel,
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        since_resum += 1;
        if since_resum == 64 {
            since_resum = 0;
            (value, err) = totals(&heap, &frozen);
        }
    }
    let (value, err) = totals(&heap, &frozen);
    let best = QuadResult {
        value,
        error_estimate: err,
        subdivisions_used: subdivisions,
        converged: err <= (spec.rel_tol * value.abs()).max(spec.abs_tol),
    };
    if best.converged {
        Ok(best)
    } else {
        Err(Error::NotConverged { best })
    }
}

fn origin_map(b: f64, spec: &QuadratureSpec) -> Map {
    Map::FromZero {
        b,
        s: 1.0 / (1.0 + spec.singularity_exponent_at_zero),
    }
}

fn tail_map(a: f64, spec: &QuadratureSpec) -> Map {
    match spec.decay {
        Decay::Algebraic(m) => Map::AlgebraicTail {
            a,
            e: 1.0 / (m - 1.0),
        },
        Decay::Exponential(c) => Map::ExpTail { a, c: 0.5 * c },
    }
}

/// `∫_a^b f` on a finite interval. Only the tolerances of `spec` are used.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    if !a.is_finite() || !b.is_finite() {
        return domain("integrate_interval needs finite limits");
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let panel = Panel {
        map: Map::Identity,
        sign: 1.0,
        lo,
        hi,
    };
    let mut r = adaptive(&f, &[panel], &[], spec)?;
    r.value *= sign;
    Ok(r)
}

/// `∫_0^b f` where `f(r) ~ r^σ` at the origin.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(
    f: F,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate_sigma()?;
    if !(b > 0.0) || !b.is_finite() {
        return domain(format!("upper limit must be positive and finite, got {b}"));
    }
    let panel = Panel {
        map: origin_map(b, spec),
        sign: 1.0,
        lo: 0.0,
        hi: 1.0,
    };
    adaptive(&f, &[panel], &[], spec)
}

/// `∫_a^∞ f` under the decay hint of `spec`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate_decay()?;
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("lower limit must be positive and finite, got {a}"));
    }
    let panel = Panel {
        map: tail_map(a, spec),
        sign: 1.0,
        lo: 0.0,
        hi: 1.0,
    };
    adaptive(&f, &[panel], &[], spec)
}

pub fn integrate_halfline<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<QuadResult> {
    integrate_halfline_with_breaks(f, spec, &[])
}

/// `∫_0^∞ f`, with optional physical break points (kinks, spline knots) that
/// become initial segment boundaries.
pub fn integrate_halfline_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
    breaks: &[f64],
) -> Result<QuadResult> {
    spec.validate_sigma()?;
    spec.validate_decay()?;
    let panels = [
        Panel {
            map: origin_map(1.0, spec),
            sign: 1.0,
            lo: 0.0,
            hi: 1.0,
        },
        Panel {
            map: tail_map(1.0, spec),
            sign: 1.0,
            lo: 0.0,
            hi: 1.0,
        },
    ];
    let breaks: Vec<f64> = breaks.iter().copied().filter(|&x| x > 0.0).collect();
    adaptive(&f, &panels, &breaks, spec)
}

pub fn integrate_line<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<QuadResult> {
    integrate_line_with_breaks(f, spec, &[])
}

/// `∫_{−∞}^{∞} f`. The decay hint applies to both tails; the singularity
/// exponent is ignored (the integrand must be bounded near the origin).
pub fn integrate_line_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
    breaks: &[f64],
) -> Result<QuadResult> {
    spec.validate_decay()?;
    let mut panels = Vec::with_capacity(4);
    for sign in [1.0, -1.0] {
        panels.push(Panel {
            map: Map::FromZero { b: 1.0, s: 1.0 },
            sign,
            lo: 0.0,
            hi: 1.0,
        });
        panels.push(Panel {
            map: tail_map(1.0, spec),
            sign,
            lo: 0.0,
            hi: 1.0,
        });
    }
    adaptive(&f, &panels, breaks, spec)
}

/// `∫∫_{(0,∞)²} k(s, t) ds dt` for symmetric `k`, computed as twice the
/// integral over `{0 < s ≤ t}`.
///
/// `inner` carries the exponent of `k(s, t) ~ s^σ` as `s → 0` at fixed `t`;
/// `outer` describes `F(t) = ∫_0^t k(s, t) ds` on the half-line. The
/// returned error estimate adds the worst relative inner error, scaled by
/// the value, to the outer estimate.
pub fn integrate_triangle_symmetric<K: Fn(f64, f64) -> f64>(
    k: K,
    inner: &QuadratureSpec,
    outer: &QuadratureSpec,
) -> Result<QuadResult> {
    integrate_triangle_symmetric_with_breaks(k, inner, outer, &[])
}

pub fn integrate_triangle_symmetric_with_breaks<K: Fn(f64, f64) -> f64>(
    k: K,
    inner: &QuadratureSpec,
    outer: &QuadratureSpec,
    breaks: &[f64],
) -> Result<QuadResult> {
    inner.validate_sigma()?;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let worst_inner = RefCell::new(0.0f64);
    let column = |t: f64| -> f64 {
        if failure.borrow().is_some() {
            return f64::NAN;
        }
        match integrate_from_zero(|v| t * k(t * v, t), 1.0, inner) {
            Ok(r) => {
                if r.value != 0.0 {
                    let rel = r.error_estimate / r.value.abs();
                    let mut w = worst_inner.borrow_mut();
                    if rel > *w {
                        *w = rel;
                    }
                }
                r.value
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    };
    let outer_result = integrate_halfline_with_breaks(column, outer, breaks);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let r = outer_result?;
    let value = 2.0 * r.value;
    Ok(QuadResult {
        value,
        error_estimate: 2.0 * r.error_estimate + worst_inner.into_inner() * value.abs(),
        subdivisions_used: r.subdivisions_used,
        converged: true,
    })
}
