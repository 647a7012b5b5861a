//! Seminorm families, the translation-invariant metrics they induce, and
//! derived constructions (renorming, graph seminorms, product metrics).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::element::{Element, SpectralVector};
use crate::error::{Error, Result};
use crate::quad::simpson_adaptive;

/// Positive even weight on the line used by the weighted L^p norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    /// w(x) = exp(-a |x|), a > 0.
    ExpDecay { a: f64 },
    /// w(x) = 1 / (x^{2n} + 1), n >= 1.
    Rational { n: u32 },
}

impl Weight {
    pub fn validate(&self) -> Result<()> {
        match self {
            Weight::ExpDecay { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::parameter("a", "exponential weight rate must be positive"));
                }
            }
            Weight::Rational { n } => {
                if *n == 0 {
                    return Err(Error::parameter("n", "rational weight degree must be >= 1"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Weight::ExpDecay { a } => (-a * x.abs()).exp(),
            Weight::Rational { n } => 1.0 / (x.abs().powi(2 * *n as i32) + 1.0),
        }
    }

    /// Exact or high-accuracy integral of the weight over [a, b].
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match self {
            Weight::ExpDecay { a } => exp_decay_integral(*a, lo, hi),
            Weight::Rational { n } => rational_antiderivative(*n, hi) - rational_antiderivative(*n, lo),
        }
    }

    /// Integral of the weight over [lo, hi] intersected with [-n, n].
    pub fn integral_clipped(&self, lo: f64, hi: f64, n: f64) -> f64 {
        self.integral(lo.max(-n), hi.min(n))
    }
}

/// Piecewise closed form of int_lo^hi exp(-a|x|) dx.
fn exp_decay_integral(a: f64, lo: f64, hi: f64) -> f64 {
    if hi <= 0.0 {
        ((a * hi).exp() - (a * lo).exp()) / a
    } else if lo >= 0.0 {
        ((-a * lo).exp() - (-a * hi).exp()) / a
    } else {
        (2.0 - (a * lo).exp() - (-a * hi).exp()) / a
    }
}

/// Odd antiderivative F(x) = int_0^x dt/(t^{2n}+1), accurate to ~1e-12.
fn rational_antiderivative(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        return -rational_antiderivative(n, -x);
    }
    if n == 1 {
        return x.atan();
    }
    let p = 2 * n as i32;
    let f = move |t: f64| 1.0 / (t.powi(p) + 1.0);
    // Split at 4: adaptive Simpson inside, alternating tail series outside.
    // For t >= 4 the series 1/(t^p+1) = sum (-1)^j t^{-p(j+1)} converges with
    // ratio <= 4^{-p} <= 2^{-8}, so ten terms reach machine precision.
    let tail = |t: f64| -> f64 {
        let mut s = 0.0;
        for j in 0..10 {
            let e = p * (j + 1) - 1;
            let term = t.powi(-e) / e as f64;
            s += if j % 2 == 0 { term } else { -term };
        }
        s
    };
    if x <= 4.0 {
        simpson_adaptive(&f, 0.0, x, 1e-13)
    } else {
        simpson_adaptive(&f, 0.0, 4.0, 1e-13) + tail(4.0) - tail(x)
    }
}

/// Whether the space carries a single norm or a graded seminorm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Banach,
    Frechet,
}

type EvalFn = dyn Fn(u32, &Element) -> Result<f64> + Send + Sync;

/// A graded family of seminorms p_1 <= p_2 <= ... (Frechet) or a single norm
/// evaluated identically for every index (Banach).
#[derive(Clone)]
pub struct SeminormFamily {
    kind: SpaceKind,
    n_max: u32,
    descriptor: String,
    eval: Arc<EvalFn>,
}

impl std::fmt::Debug for SeminormFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeminormFamily")
            .field("kind", &self.kind)
            .field("n_max", &self.n_max)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

fn check_n_max(n_max: u32) -> Result<()> {
    if !(1..=64).contains(&n_max) {
        return Err(Error::parameter("n_max", "seminorm count must be in 1..=64"));
    }
    Ok(())
}

impl SeminormFamily {
    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Evaluates p_n. For Banach families every index returns the norm.
    pub fn seminorm(&self, n: u32, x: &Element) -> Result<f64> {
        if n == 0 || n > self.n_max {
            return Err(Error::parameter("n", format!("seminorm index {n} outside 1..={}", self.n_max)));
        }
        (self.eval)(n, x)
    }

    pub fn norm(&self, x: &Element) -> Result<f64> {
        self.seminorm(1, x)
    }

    /// Weighted L^p norm for block and grid functions; Frechet grading
    /// restricts the integral to [-n, n].
    pub fn weighted_lp(kind: SpaceKind, weight: Weight, p: f64, n_max: u32) -> Result<Self> {
        weight.validate()?;
        check_n_max(n_max)?;
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::parameter("p", "exponent must be finite and >= 1"));
        }
        let descriptor = format!("weighted_lp(p={p}, {weight:?}, {kind:?})");
        let eval = move |n: u32, x: &Element| -> Result<f64> {
            let clip = match kind {
                SpaceKind::Banach => f64::INFINITY,
                SpaceKind::Frechet => n as f64,
            };
            match x {
                Element::Block(f) => {
                    let mut acc = 0.0;
                    for blk in f.blocks() {
                        acc += blk.c.abs().powf(p) * weight.integral_clipped(blk.a, blk.b, clip);
                    }
                    Ok(acc.powf(1.0 / p))
                }
                Element::Grid(g) => {
                    let lo = (-clip).max(-g.x_max);
                    let hi = clip.min(g.x_max);
                    let i_lo = ((lo + g.x_max) / g.h - 1e-9).ceil().max(0.0) as usize;
                    let i_hi = (((hi + g.x_max) / g.h + 1e-9).floor() as usize).min(g.len() - 1);
                    if i_hi <= i_lo {
                        return Ok(0.0);
                    }
                    let mut acc = 0.0;
                    for i in i_lo..=i_hi {
                        let t = g.values[i].abs().powf(p) * weight.eval(g.x(i));
                        let coef = if i == i_lo || i == i_hi { 0.5 } else { 1.0 };
                        acc += coef * t;
                    }
                    Ok((acc * g.h).powf(1.0 / p))
                }
                other => Err(Error::Unsupported(format!(
                    "weighted L^p norm is undefined for {} elements",
                    other.repr()
                ))),
            }
        };
        Ok(SeminormFamily { kind, n_max, descriptor, eval: Arc::new(eval) })
    }

    pub fn weighted_l2(kind: SpaceKind, weight: Weight, n_max: u32) -> Result<Self> {
        Self::weighted_lp(kind, weight, 2.0, n_max)
    }

    /// Coefficient-sum norm on spectral vectors; the Frechet grading scales
    /// the sum by the index, giving a strictly increasing family.
    pub fn spectral_l1(kind: SpaceKind, n_max: u32) -> Result<Self> {
        check_n_max(n_max)?;
        let descriptor = format!("spectral_l1({kind:?})");
        let eval = move |n: u32, x: &Element| -> Result<f64> {
            match x {
                Element::Spectral(v) => {
                    let s = v.l1();
                    Ok(match kind {
                        SpaceKind::Banach => s,
                        SpaceKind::Frechet => n as f64 * s,
                    })
                }
                other => Err(Error::Unsupported(format!(
                    "spectral l1 norm is undefined for {} elements",
                    other.repr()
                ))),
            }
        };
        Ok(SeminormFamily { kind, n_max, descriptor, eval: Arc::new(eval) })
    }

    /// L^2(exp(-a|x|)) norm of spectral combinations of the modes
    /// x |-> exp(mu x), computed from the exact pairwise mode integrals.
    /// Pairs take the Euclidean combination of their component norms.
    pub fn exp_mode_l2(kind: SpaceKind, a: f64, n_max: u32) -> Result<Self> {
        check_n_max(n_max)?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::parameter("a", "weight rate must be positive"));
        }
        let descriptor = format!("exp_mode_l2(a={a}, {kind:?})");
        let eval = move |n: u32, x: &Element| -> Result<f64> {
            let clip = match kind {
                SpaceKind::Banach => None,
                SpaceKind::Frechet => Some(n as f64),
            };
            match x {
                Element::Spectral(v) => Ok(exp_mode_norm_sqr(v, a, clip)?.sqrt()),
                Element::Pair(p) => {
                    let s = exp_mode_norm_sqr(&p.first, a, clip)?
                        + exp_mode_norm_sqr(&p.second, a, clip)?;
                    Ok(s.sqrt())
                }
                other => Err(Error::Unsupported(format!(
                    "exponential-mode norm is undefined for {} elements",
                    other.repr()
                ))),
            }
        };
        Ok(SeminormFamily { kind, n_max, descriptor, eval: Arc::new(eval) })
    }

    /// Arbitrary user-supplied seminorm family.
    pub fn from_fn(
        kind: SpaceKind,
        n_max: u32,
        descriptor: impl Into<String>,
        eval: Arc<EvalFn>,
    ) -> Result<Self> {
        check_n_max(n_max)?;
        Ok(SeminormFamily { kind, n_max, descriptor: descriptor.into(), eval })
    }
}

/// int e^{wx} e^{-a|x|} dx over [-n, n] (clip = Some(n)) or the whole line.
fn mode_pair_integral(w: Complex64, a: f64, clip: Option<f64>) -> Result<Complex64> {
    let wp = w + a; // exponent rate on x < 0
    let wm = w - a; // exponent rate on x > 0
    match clip {
        None => {
            if wp.re <= 1e-12 || (-wm.re) <= 1e-12 {
                return Err(Error::Domain(format!(
                    "mode pair with Re(w) = {} is not integrable against exp(-{a}|x|)",
                    w.re
                )));
            }
            Ok(wp.inv() - wm.inv())
        }
        Some(n) => {
            // (1 - e^{-n s})/s, stable at s -> 0 via its Taylor polynomial.
            let seg = |s: Complex64| -> Complex64 {
                if s.norm() < 1e-8 {
                    let ns = n * s;
                    n * (Complex64::ONE - ns / 2.0 + ns * ns / 6.0)
                } else {
                    (Complex64::ONE - (-n * s).exp()) / s
                }
            };
            Ok(seg(wp) + seg(-wm))
        }
    }
}

fn exp_mode_norm_sqr(v: &SpectralVector, a: f64, clip: Option<f64>) -> Result<f64> {
    let modes: Vec<(Complex64, Complex64)> = v.modes().collect();
    let mut acc = Complex64::ZERO;
    for &(mi, ci) in &modes {
        for &(mj, cj) in &modes {
            let w = mi + mj.conj();
            acc += ci * cj.conj() * mode_pair_integral(w, a, clip)?;
        }
    }
    Ok(acc.re.max(0.0))
}

/// Bounded remetrization t -> t/(1+t) used inside the Frechet metric.
fn truncate(t: f64) -> f64 {
    t / (1.0 + t)
}

/// Translation-invariant metric of the space: the norm of the difference for
/// Banach families, sum_n 2^{-n} p_n(x-y)/(1+p_n(x-y)) for Frechet families.
pub fn frechet_metric(family: &SeminormFamily, x: &Element, y: &Element) -> Result<f64> {
    let d = x.sub(y)?;
    match family.kind {
        SpaceKind::Banach => family.seminorm(1, &d),
        SpaceKind::Frechet => {
            let mut acc = 0.0;
            let mut w = 1.0;
            for n in 1..=family.n_max {
                w *= 0.5;
                acc += w * truncate(family.seminorm(n, &d)?);
            }
            Ok(acc)
        }
    }
}

/// Metric of a finite product space from the factor distances.
pub fn product_metric(factor_distances: &[f64]) -> Result<f64> {
    if factor_distances.is_empty() {
        return Err(Error::parameter("factor_distances", "product of zero factors"));
    }
    let mut acc = 0.0;
    let mut w = 1.0;
    for &d in factor_distances {
        if !(d >= 0.0) {
            return Err(Error::parameter("factor_distances", format!("negative distance {d}")));
        }
        w *= 0.5;
        acc += w * truncate(d);
    }
    Ok(acc)
}

/// Replaces the grading by the monotone hull
///   q_1 = p_1,
///   q_k = q_{k-1} + sum_{l+m=k} c_{l,m} p_{a_{l,m}} + p_k,
/// where `constants` maps (l, m) to (c_{l,m}, a_{l,m}). With no constants this
/// is the running-sum renorming q_n = p_1 + ... + p_n.
pub fn renorm(
    family: &SeminormFamily,
    constants: &BTreeMap<(u32, u32), (f64, u32)>,
) -> Result<SeminormFamily> {
    if family.kind != SpaceKind::Frechet {
        return Err(Error::Kind { expected: "frechet", got: "banach" });
    }
    let n_max = family.n_max;
    for (&(l, m), &(c, a)) in constants {
        if l == 0 || m == 0 || l + m > n_max {
            return Err(Error::parameter(
                "constants",
                format!("index pair ({l}, {m}) outside the grading range"),
            ));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::parameter("constants", format!("c[{l},{m}] must be positive")));
        }
        if a == 0 || a > n_max {
            return Err(Error::parameter(
                "constants",
                format!("target index a[{l},{m}] = {a} outside 1..={n_max}"),
            ));
        }
    }
    let base = family.clone();
    let table = constants.clone();
    let descriptor = format!("renorm({})", family.descriptor);
    let eval = move |n: u32, x: &Element| -> Result<f64> {
        let mut q = base.seminorm(1, x)?;
        for k in 2..=n {
            let mut extra = base.seminorm(k, x)?;
            for (&(l, m), &(c, a)) in table.range((1, 1)..=(k, n)) {
                if l + m == k {
                    extra += c * base.seminorm(a, x)?;
                }
            }
            q += extra;
        }
        Ok(q)
    };
    Ok(SeminormFamily {
        kind: SpaceKind::Frechet,
        n_max,
        descriptor,
        eval: Arc::new(eval),
    })
}

/// Graph seminorm sum_{i=0..m} p_n(A^i x) for the diagonal operator whose
/// eigenvalue at mu is `symbol(mu)`. Defined for spectral elements only.
pub fn graph_seminorm(
    family: &SeminormFamily,
    symbol: &dyn Fn(Complex64) -> Complex64,
    m: u32,
    n: u32,
    x: &Element,
) -> Result<f64> {
    let Element::Spectral(v) = x else {
        return Err(Error::Unsupported(
            "graph seminorm needs a spectral element".into(),
        ));
    };
    let mut total = 0.0;
    let mut cur = v.clone();
    for i in 0..=m {
        total += family.seminorm(n, &Element::Spectral(cur.clone()))?;
        if i < m {
            cur = cur.map_modes(&mut |mu, c| Ok(c * symbol(mu)))?;
        }
    }
    Ok(total)
}
