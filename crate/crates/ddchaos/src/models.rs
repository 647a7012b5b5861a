//! Concrete orbit engines: spectral eigen-mode families (first-order and
//! fractional), weighted translation groups with closed-form norms, cosine
//! orbits on grids, and the 2x2 companion-form block family, together with
//! residual checks of their defining identities.

use num_complex::Complex64;

use crate::element::{BlockFunction, Element, GridFunction, SpectralPair, SpectralVector};
use crate::error::{Error, Result};
use crate::frechet::{SeminormFamily, SpaceKind, Weight};
use crate::ml::{ml_eval, reciprocal_gamma, MlParams};
use crate::quad::{conv_g_product, simpson_adaptive, trapezoid_complex};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
/// exp overflows f64 past this argument.
const EXP_ARG_MAX: f64 = 709.0;

/// Eigenvalue map mu -> factor * sum_k coeffs[k] mu^k.
///
/// The factor slot carries rotations like -e^{i theta} that several models
/// apply in front of a plain polynomial; it defaults to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub factor: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl Symbol {
    pub fn poly(coeffs: Vec<Complex64>) -> Self {
        Symbol { factor: ONE, coeffs }
    }

    /// Polynomial prefixed by -e^{i theta}.
    pub fn rotated_poly(theta: f64, coeffs: Vec<Complex64>) -> Self {
        Symbol {
            factor: -Complex64::new(0.0, theta).exp(),
            coeffs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.factor.is_finite() {
            return Err(Error::parameter("factor", "symbol factor must be finite"));
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::parameter("coeffs", format!("coefficient {k} is not finite")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, mu: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * mu + c;
        }
        self.factor * acc
    }

    /// Highest nonzero coefficient, viewed as (degree, coefficient).
    pub fn leading(&self) -> Option<(usize, Complex64)> {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(k, c)| (k, *c))
    }
}

/// Multiplier map mu -> c(mu) attached to a family; the regularized orbit
/// carries this factor in front of the scalar solution multiplier.
#[derive(Debug, Clone, PartialEq)]
pub enum Regularizer {
    Identity,
    /// c(mu) = exp(-(-mu^2)^l).
    ExpPoly { l: u32 },
    /// Pointwise product of the parts.
    Product(Vec<Regularizer>),
}

impl Regularizer {
    pub fn validate(&self) -> Result<()> {
        match self {
            Regularizer::Identity => Ok(()),
            Regularizer::ExpPoly { l } => {
                if !(1..=64).contains(l) {
                    return Err(Error::parameter("l", "regularizer exponent must lie in 1..=64"));
                }
                Ok(())
            }
            Regularizer::Product(parts) => {
                if parts.is_empty() {
                    return Err(Error::parameter("parts", "empty regularizer product"));
                }
                parts.iter().try_for_each(Regularizer::validate)
            }
        }
    }

    pub fn multiplier(&self, mu: Complex64) -> Result<Complex64> {
        match self {
            Regularizer::Identity => Ok(ONE),
            Regularizer::ExpPoly { l } => exp_poly_multiplier(mu, *l),
            Regularizer::Product(parts) => {
                let mut acc = ONE;
                for part in parts {
                    acc *= part.multiplier(mu)?;
                }
                Ok(acc)
            }
        }
    }
}

/// The multiplier exp(-(-mu^2)^l). Magnitudes past the f64 exponential range
/// are reported as overflow errors instead of silently becoming infinite;
/// underflow to zero is fine (the mode is damped away).
pub fn exp_poly_multiplier(mu: Complex64, l: u32) -> Result<Complex64> {
    if !(1..=64).contains(&l) {
        return Err(Error::parameter("l", "regularizer exponent must lie in 1..=64"));
    }
    if !mu.is_finite() {
        return Err(Error::parameter("mu", "mode must be finite"));
    }
    let w = -(-mu * mu).powu(l);
    if w.re > EXP_ARG_MAX {
        return Err(Error::Overflow(format!(
            "regularizer multiplier exp({w}) at mu = {mu}"
        )));
    }
    Ok(w.exp())
}

/// Which orbit engine a family runs on.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// u(t) = c(mu) e^{lambda(mu) t} per eigen-mode.
    SpectralFirstOrder,
    /// u(t) = c(mu) E_zeta(lambda(mu) t^zeta) per eigen-mode.
    SpectralFractional { zeta: f64, theta: f64 },
    /// (T(t) f)(x) = f(x + speed t) on a weighted L^p space.
    Translation { speed: f64, weight: Weight, p: f64 },
    /// (C(t) f)(x) = (f(x + t) + f(x - t)) / 2.
    Cosine,
    /// The 2x2 block S_{k+1}(t) built from the cosine orbit; only k = 0 is
    /// implemented.
    IntegratedBlock { zeta_index: u32 },
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::SpectralFirstOrder => "spectral_first_order",
            FamilyKind::SpectralFractional { .. } => "spectral_fractional",
            FamilyKind::Translation { .. } => "translation",
            FamilyKind::Cosine => "cosine",
            FamilyKind::IntegratedBlock { .. } => "integrated_block",
        }
    }
}

/// One operator family: the orbit kind, its eigenvalue symbol (spectral
/// kinds), the regularizing multiplier, and the period for discrete traces.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub label: String,
    pub kind: FamilyKind,
    pub symbol: Symbol,
    pub regularizer: Regularizer,
    /// Sampling period for discrete power traces.
    pub t_j: f64,
}

impl FamilySpec {
    pub fn first_order(label: impl Into<String>, coeffs: Vec<Complex64>) -> Self {
        FamilySpec {
            label: label.into(),
            kind: FamilyKind::SpectralFirstOrder,
            symbol: Symbol::poly(coeffs),
            regularizer: Regularizer::Identity,
            t_j: 1.0,
        }
    }

    /// Fractional family with symbol -e^{i theta} P(mu).
    pub fn fractional(label: impl Into<String>, zeta: f64, theta: f64, coeffs: Vec<Complex64>) -> Self {
        FamilySpec {
            label: label.into(),
            kind: FamilyKind::SpectralFractional { zeta, theta },
            symbol: Symbol::rotated_poly(theta, coeffs),
            regularizer: Regularizer::Identity,
            t_j: 1.0,
        }
    }

    pub fn translation(label: impl Into<String>, speed: f64, weight: Weight, p: f64) -> Self {
        FamilySpec {
            label: label.into(),
            kind: FamilyKind::Translation { speed, weight, p },
            symbol: Symbol::poly(vec![]),
            regularizer: Regularizer::Identity,
            t_j: 1.0,
        }
    }

    pub fn cosine(label: impl Into<String>) -> Self {
        FamilySpec {
            label: label.into(),
            kind: FamilyKind::Cosine,
            symbol: Symbol::poly(vec![]),
            regularizer: Regularizer::Identity,
            t_j: 1.0,
        }
    }

    pub fn integrated_block(label: impl Into<String>) -> Self {
        FamilySpec {
            label: label.into(),
            kind: FamilyKind::IntegratedBlock { zeta_index: 0 },
            symbol: Symbol::poly(vec![]),
            regularizer: Regularizer::Identity,
            t_j: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.symbol.validate()?;
        self.regularizer.validate()?;
        if !(self.t_j.is_finite() && self.t_j > 0.0) {
            return Err(Error::parameter("t_j", "discrete sampling period must be positive"));
        }
        match &self.kind {
            FamilyKind::SpectralFirstOrder => Ok(()),
            FamilyKind::SpectralFractional { zeta, theta } => {
                if !(zeta.is_finite() && *zeta > 0.0 && *zeta < 2.0) {
                    return Err(Error::parameter("zeta", "fractional order must lie in (0, 2)"));
                }
                if (zeta - 1.0).abs() <= 1e-9 {
                    return Err(Error::parameter(
                        "zeta",
                        "order 1 is the first-order family; use spectral_first_order",
                    ));
                }
                if !theta.is_finite() {
                    return Err(Error::parameter("theta", "rotation angle must be finite"));
                }
                Ok(())
            }
            FamilyKind::Translation { speed, weight, p } => {
                weight.validate()?;
                if !speed.is_finite() {
                    return Err(Error::parameter("speed", "translation speed must be finite"));
                }
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::parameter("p", "exponent must be finite and >= 1"));
                }
                Ok(())
            }
            FamilyKind::Cosine => Ok(()),
            FamilyKind::IntegratedBlock { zeta_index } => {
                if *zeta_index != 0 {
                    return Err(Error::Unsupported(format!(
                        "integrated block order {zeta_index} (only the once-integrated block is implemented)"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::parameter("t", format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn wrong_kind(expected: &'static str, spec: &FamilySpec) -> Error {
    Error::Kind {
        expected,
        got: spec.kind.name(),
    }
}

/// First-order orbit on eigen-modes: coefficient times c(mu) e^{lambda(mu) t}.
pub fn eigen_orbit_first_order(spec: &FamilySpec, x: &SpectralVector, t: f64) -> Result<SpectralVector> {
    if spec.kind != FamilyKind::SpectralFirstOrder {
        return Err(wrong_kind("spectral_first_order", spec));
    }
    check_time(t)?;
    x.map_modes(&mut |mu, c| {
        let w = spec.symbol.eval(mu) * t;
        if w.re > EXP_ARG_MAX {
            return Err(Error::Overflow(format!("orbit multiplier exp({w}) at mu = {mu}")));
        }
        Ok(c * spec.regularizer.multiplier(mu)? * w.exp())
    })
}

/// Fractional orbit on eigen-modes: coefficient times
/// c(mu) E_zeta(lambda(mu) t^zeta).
pub fn eigen_orbit_fractional(spec: &FamilySpec, x: &SpectralVector, t: f64) -> Result<SpectralVector> {
    let FamilyKind::SpectralFractional { zeta, .. } = spec.kind else {
        return Err(wrong_kind("spectral_fractional", spec));
    };
    check_time(t)?;
    spec.validate()?;
    let params = MlParams::new(zeta);
    x.map_modes(&mut |mu, c| {
        let z = spec.symbol.eval(mu) * t.powf(zeta);
        let v = ml_eval(&params, z)?;
        Ok(c * spec.regularizer.multiplier(mu)? * v.value)
    })
}

/// Weighted L^p norm of the translated block function x -> f(x + speed t),
/// evaluated per block from the weight's antiderivative.
pub fn translate_orbit_norm(f: &BlockFunction, weight: &Weight, speed: f64, t: f64, p: f64) -> Result<f64> {
    weight.validate()?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::parameter("p", "exponent must be finite and >= 1"));
    }
    if !speed.is_finite() || !t.is_finite() {
        return Err(Error::parameter("t", "speed and time must be finite"));
    }
    let shift = speed * t;
    let mut acc = 0.0;
    for blk in f.blocks() {
        acc += blk.c.abs().powf(p) * weight.integral(blk.a - shift, blk.b - shift);
    }
    Ok(acc.powf(p.recip()))
}

/// The same norm by adaptive quadrature of the weight over each translated
/// block; the independent cross-check route for the closed form. Implemented
/// for the exponential weight (the rational weight's "closed form" already is
/// quadrature, so a second pass would check nothing).
pub fn translate_orbit_norm_quadrature(
    f: &BlockFunction,
    weight: &Weight,
    speed: f64,
    t: f64,
    p: f64,
) -> Result<f64> {
    let Weight::ExpDecay { a } = *weight else {
        return Err(Error::Unsupported(
            "quadrature cross-check is implemented for exp_decay weights only".into(),
        ));
    };
    weight.validate()?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::parameter("p", "exponent must be finite and >= 1"));
    }
    let shift = speed * t;
    // Past |x| = 745/a the weight underflows f64 entirely, so clipping there
    // loses nothing; splitting at the kink x = 0 keeps Simpson second-order.
    let reach = 745.0 / a;
    let g = move |x: f64| (-a * x.abs()).exp();
    let mut acc = 0.0;
    for blk in f.blocks() {
        let lo = (blk.a - shift).max(-reach);
        let hi = (blk.b - shift).min(reach);
        if lo >= hi {
            continue;
        }
        // Simpson's stopping rule is absolute, so the tolerance is scaled to
        // the block's own integral size (peak times effective width) to keep
        // the result relatively accurate even for far-out blocks whose
        // contribution is many orders below 1.
        let peak = if lo <= 0.0 && hi >= 0.0 {
            1.0
        } else {
            (-a * lo.abs().min(hi.abs())).exp()
        };
        // Below the normal f64 range neither route carries relative meaning;
        // the floor keeps the recursion from chasing subnormal noise.
        let tol = (1e-13 * peak * (hi - lo).min(a.recip())).max(1e-305);
        let piece = if lo < 0.0 && hi > 0.0 {
            simpson_adaptive(&g, lo, 0.0, tol) + simpson_adaptive(&g, 0.0, hi, tol)
        } else {
            simpson_adaptive(&g, lo, hi, tol)
        };
        acc += blk.c.abs().powf(p) * piece;
    }
    Ok(acc.powf(p.recip()))
}

/// Translation orbit on grids: exact index shift by speed*t/h. Times that do
/// not land on the grid are rejected rather than interpolated, and nonzero
/// samples may not leave the window.
pub fn grid_orbit(f: &GridFunction, speed: f64, t: f64) -> Result<GridFunction> {
    if !speed.is_finite() || !t.is_finite() {
        return Err(Error::parameter("t", "speed and time must be finite"));
    }
    let raw = speed * t / f.h;
    let k = raw.round();
    if (raw - k).abs() > 1e-9 {
        return Err(Error::TimeGrid { t, h: f.h });
    }
    let n = f.values.len() as i64;
    if k.abs() >= n as f64 + 1.0 && f.values.iter().any(|v| *v != 0.0) {
        return Err(Error::Window { t });
    }
    let k = k as i64;
    for (j, v) in f.values.iter().enumerate() {
        if *v != 0.0 && !(0..n).contains(&(j as i64 - k)) {
            return Err(Error::Window { t });
        }
    }
    let mut out = vec![0.0; f.values.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        let j = i as i64 + k;
        if (0..n).contains(&j) {
            *slot = f.values[j as usize];
        }
    }
    Ok(GridFunction {
        h: f.h,
        x_max: f.x_max,
        values: out,
    })
}

/// Cosine orbit on grids: the average of the two opposite unit-speed shifts.
pub fn cosine_orbit(f: &GridFunction, t: f64) -> Result<GridFunction> {
    let plus = grid_orbit(f, 1.0, t)?;
    let minus = grid_orbit(f, -1.0, t)?;
    Ok(plus.add(&minus)?.scale(0.5))
}

fn grid_zero_like(f: &GridFunction) -> GridFunction {
    GridFunction {
        h: f.h,
        x_max: f.x_max,
        values: vec![0.0; f.values.len()],
    }
}

fn block_steps(t: f64, quad_step: f64) -> Result<usize> {
    check_time(t)?;
    if !(quad_step.is_finite() && quad_step > 0.0) {
        return Err(Error::parameter("quad_step", "quadrature step must be positive"));
    }
    let m_f = t / quad_step;
    let m = m_f.round();
    if (m_f - m).abs() > 1e-9 * m_f.max(1.0) {
        return Err(Error::parameter(
            "quad_step",
            format!("step {quad_step} does not divide t = {t}"),
        ));
    }
    Ok(m as usize)
}

/// Applies the once-integrated 2x2 block
/// [[P(t), Q(t)], [C(t) - I, P(t)]] with P(t) = int_0^t C(s) ds and
/// Q(t) = int_0^t (t - s) C(s) ds, by trapezoidal quadrature at `quad_step`.
pub fn integrated_block(
    pair: (&GridFunction, &GridFunction),
    t: f64,
    quad_step: f64,
) -> Result<(GridFunction, GridFunction)> {
    let (v1, v2) = pair;
    let zero = v1.sub(v1)?.add(&v2.sub(v2)?)?; // also checks the grids agree
    let m = block_steps(t, quad_step)?;
    if m == 0 {
        return Ok((zero.clone(), zero));
    }
    let n = v1.values.len();
    let q = quad_step;
    let mut p1 = vec![0.0; n]; // int C(s) v1
    let mut p2 = vec![0.0; n]; // int C(s) v2
    let mut qd2 = vec![0.0; n]; // int (t - s) C(s) v2
    let mut c1 = v1.values.clone();
    let mut c2 = v2.values.clone();
    for j in 1..=m {
        let s = j as f64 * q;
        let n1 = cosine_orbit(v1, s)?;
        let n2 = cosine_orbit(v2, s)?;
        let w_prev = t - (j - 1) as f64 * q;
        let w_cur = t - s;
        for i in 0..n {
            p1[i] += 0.5 * q * (c1[i] + n1.values[i]);
            p2[i] += 0.5 * q * (c2[i] + n2.values[i]);
            qd2[i] += 0.5 * q * (w_prev * c2[i] + w_cur * n2.values[i]);
        }
        c1 = n1.values;
        c2 = n2.values;
    }
    let out1 = (0..n).map(|i| p1[i] + qd2[i]).collect();
    let out2 = (0..n).map(|i| c1[i] - v1.values[i] + p2[i]).collect();
    Ok((
        GridFunction { h: v1.h, x_max: v1.x_max, values: out1 },
        GridFunction { h: v1.h, x_max: v1.x_max, values: out2 },
    ))
}

/// Residual of the once-integrated identity for the block family: with the
/// companion block generator [[0, I], [D, 0]] (D the central second
/// difference), returns the max-abs over interior nodes of
/// A int_0^t S1(s) v ds - S1(t) v + t v.
///
/// The left side nests running trapezoid cumulants; the right side calls
/// `integrated_block`, whose Q-part discretizes (t - s) C(s) directly, so the
/// two sides do not share a discretization and the residual honestly tracks
/// the quadrature plus finite-difference error, O(quad_step^2 + h^2).
pub fn check_block_identity(
    pair: (&GridFunction, &GridFunction),
    t: f64,
    quad_step: f64,
) -> Result<f64> {
    let (v1, v2) = pair;
    let m = block_steps(t, quad_step)?;
    if m == 0 {
        return Ok(0.0);
    }
    let n = v1.values.len();
    let q = quad_step;
    let h = v1.h;

    // Level 1: P1 = int C v1, P2 = int C v2. Level 2: Q2 = int P2 (equals the
    // (t - s)-weighted integral), S1 components. Level 3: W1, W2 = int of the
    // S1 components.
    let mut p1 = vec![0.0; n];
    let mut p2 = vec![0.0; n];
    let mut q2 = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut c1 = v1.values.clone();
    let mut c2 = v2.values.clone();
    // S1(0) = 0, so the running first/second components start at zero.
    let mut s1_first = vec![0.0; n];
    let mut s1_second = vec![0.0; n];
    for j in 1..=m {
        let s = j as f64 * q;
        let n1 = cosine_orbit(v1, s)?;
        let n2 = cosine_orbit(v2, s)?;
        for i in 0..n {
            let p1_new = p1[i] + 0.5 * q * (c1[i] + n1.values[i]);
            let p2_new = p2[i] + 0.5 * q * (c2[i] + n2.values[i]);
            let q2_new = q2[i] + 0.5 * q * (p2[i] + p2_new);
            let first_new = p1_new + q2_new;
            let second_new = n1.values[i] - v1.values[i] + p2_new;
            w1[i] += 0.5 * q * (s1_first[i] + first_new);
            w2[i] += 0.5 * q * (s1_second[i] + second_new);
            p1[i] = p1_new;
            p2[i] = p2_new;
            q2[i] = q2_new;
            s1_first[i] = first_new;
            s1_second[i] = second_new;
        }
        c1 = n1.values;
        c2 = n2.values;
    }

    let (b1, b2) = integrated_block((v1, v2), t, quad_step)?;
    let mut worst = 0.0_f64;
    for i in 1..n - 1 {
        let d_w1 = (w1[i - 1] - 2.0 * w1[i] + w1[i + 1]) / (h * h);
        let r1 = w2[i] - (b1.values[i] - t * v1.values[i]);
        let r2 = d_w1 - (b2.values[i] - t * v2.values[i]);
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    Ok(worst)
}

/// Residual norm of the alpha-times integrated identity
/// A int_0^t S_alpha(s) x ds = S_alpha(t) x - g_{alpha+1}(t) C x,
/// with S_alpha = g_alpha * orbit built by quadrature at `step`.
///
/// Spectral first-order families reduce to per-mode scalars (any alpha >= 0);
/// the translation family supports alpha = 1 with the generator applied by
/// central differences. Fractional families are checked through
/// `check_resolvent_identity` instead.
pub fn check_integrated_identity(
    spec: &FamilySpec,
    x: &Element,
    alpha: f64,
    t: f64,
    step: f64,
) -> Result<f64> {
    spec.validate()?;
    if !(alpha.is_finite() && (0.0..=4.0).contains(&alpha)) {
        return Err(Error::parameter("alpha", "integration order must lie in [0, 4]"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::parameter("t", "horizon must be positive"));
    }
    if !(step.is_finite() && step > 0.0 && step <= t) {
        return Err(Error::parameter("step", "quadrature step must lie in (0, t]"));
    }
    match (&spec.kind, x) {
        (FamilyKind::SpectralFirstOrder, Element::Spectral(v)) => {
            // Uniform grid of m cells over [0, t]; the step is snapped to an
            // exact divisor of t.
            let m = (t / step).round().max(2.0) as usize;
            let h = t / m as f64;
            let mut total = 0.0;
            for (mu, c) in v.modes() {
                let lam = spec.symbol.eval(mu);
                let reg = spec.regularizer.multiplier(mu)?;
                let u: Vec<Complex64> = (0..=m).map(|j| (lam * (j as f64 * h)).exp()).collect();
                let (s_alpha_t, int_s_alpha) = if alpha == 0.0 {
                    (u[m], trapezoid_complex(&u, h))
                } else {
                    let samples: Vec<Complex64> = (0..=m)
                        .map(|j| conv_g_product(&u[..=j], h, alpha))
                        .collect();
                    (samples[m], trapezoid_complex(&samples, h))
                };
                let g_next = reciprocal_gamma(alpha + 1.0) * t.powf(alpha);
                let resid = (lam * int_s_alpha - (s_alpha_t - g_next)).norm();
                total += resid * c.norm() * reg.norm();
            }
            Ok(total)
        }
        (FamilyKind::Translation { speed, weight, p }, Element::Grid(g)) => {
            if (alpha - 1.0).abs() > 1e-12 {
                return Err(Error::Unsupported(format!(
                    "translation identity check supports alpha = 1 only, got {alpha}"
                )));
            }
            let m = block_steps(t, step)?;
            if m < 2 {
                return Err(Error::parameter("step", "need at least two quadrature cells"));
            }
            let n = g.values.len();
            let mut s1 = vec![0.0; n]; // S_1(s) x = int_0^s u
            let mut int_s1 = vec![0.0; n]; // int_0^t S_1(s) ds
            let mut u_prev = g.values.clone();
            for j in 1..=m {
                let u = grid_orbit(g, *speed, j as f64 * step)?;
                for i in 0..n {
                    let s1_new = s1[i] + 0.5 * step * (u_prev[i] + u.values[i]);
                    int_s1[i] += 0.5 * step * (s1[i] + s1_new);
                    s1[i] = s1_new;
                }
                u_prev = u.values;
            }
            let mut resid = grid_zero_like(g);
            for i in 1..n - 1 {
                let lhs = speed * (int_s1[i + 1] - int_s1[i - 1]) / (2.0 * g.h);
                resid.values[i] = lhs - (s1[i] - t * g.values[i]);
            }
            let family = SeminormFamily::weighted_lp(SpaceKind::Banach, *weight, *p, 1)?;
            family.norm(&Element::Grid(resid))
        }
        (FamilyKind::SpectralFractional { .. }, _) => Err(Error::Unsupported(
            "fractional families are checked via the resolvent identity".into(),
        )),
        (_, other) => Err(Error::Representation(spec.kind.name(), other.repr())),
    }
}

/// Residual norm of the fractional resolvent identity
/// R(t) x = C x + lambda int_0^t g_zeta(t - s) R(s) x ds
/// on eigen-modes: per mode |E_zeta(lambda t^zeta) - 1 - lambda (g_zeta * E)(t)|
/// weighted by |c_mu| |c(mu)| and summed. The convolution uses product
/// integration with exact kernel moments, so the weakly singular endpoint of
/// zeta < 1 needs no special casing.
pub fn check_resolvent_identity(spec: &FamilySpec, x: &SpectralVector, t: f64, step: f64) -> Result<f64> {
    let FamilyKind::SpectralFractional { zeta, .. } = spec.kind else {
        return Err(wrong_kind("spectral_fractional", spec));
    };
    spec.validate()?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::parameter("t", "horizon must be positive"));
    }
    if !(step.is_finite() && step > 0.0 && step <= t) {
        return Err(Error::parameter("step", "quadrature step must lie in (0, t]"));
    }
    let m = (t / step).round().max(2.0) as usize;
    let h = t / m as f64;
    let params = MlParams::new(zeta);
    let mut total = 0.0;
    for (mu, c) in x.modes() {
        let lam = spec.symbol.eval(mu);
        let reg = spec.regularizer.multiplier(mu)?;
        let mut u = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let s = j as f64 * h;
            u.push(ml_eval(&params, lam * s.powf(zeta))?.value);
        }
        let conv = conv_g_product(&u, h, zeta);
        let resid = (u[m] - ONE - lam * conv).norm();
        if !resid.is_finite() {
            return Err(Error::Quadrature(format!(
                "resolvent residual is not finite at mu = {mu}"
            )));
        }
        total += resid * c.norm() * reg.norm();
    }
    Ok(total)
}

/// Rebuilds N spectral families as one regularized product family: every
/// output keeps its own orbit symbol but carries the product of all input
/// multipliers as its regularizer.
pub fn product_family(specs: &[FamilySpec]) -> Result<Vec<FamilySpec>> {
    if specs.is_empty() {
        return Err(Error::parameter("specs", "empty family list"));
    }
    for spec in specs {
        spec.validate()?;
        if !matches!(
            spec.kind,
            FamilyKind::SpectralFirstOrder | FamilyKind::SpectralFractional { .. }
        ) {
            return Err(wrong_kind("spectral", spec));
        }
    }
    let first_discriminant = std::mem::discriminant(&specs[0].kind);
    if specs
        .iter()
        .any(|s| std::mem::discriminant(&s.kind) != first_discriminant)
    {
        return Err(Error::Unsupported(
            "product family requires all inputs to share the orbit kind".into(),
        ));
    }
    if specs.len() == 1 {
        return Ok(specs.to_vec());
    }
    let combined = Regularizer::Product(specs.iter().map(|s| s.regularizer.clone()).collect());
    Ok(specs
        .iter()
        .map(|s| FamilySpec {
            regularizer: combined.clone(),
            ..s.clone()
        })
        .collect())
}

/// Eigen-pair of the companion block generator: the mode pair
/// (e^{lambda x}, lambda e^{lambda x}), admissible while |Re lambda| < a/2
/// so that the mode stays in L^2(e^{-a|x|}).
pub fn matrix_eigenvector(lambda: Complex64, a: f64) -> Result<SpectralPair> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::parameter("a", "weight rate must be positive"));
    }
    if !lambda.is_finite() {
        return Err(Error::parameter("lambda", "eigenvalue must be finite"));
    }
    if lambda.re.abs() >= 0.5 * a {
        return Err(Error::Domain(format!(
            "lambda = {lambda} has |Re lambda| >= a/2 = {}; the mode e^(lambda x) leaves the weighted space",
            0.5 * a
        )));
    }
    Ok(SpectralPair::new(
        SpectralVector::single(lambda, ONE),
        SpectralVector::single(lambda, lambda),
    ))
}

fn pair_mode_keys(x: &SpectralPair) -> Vec<Complex64> {
    let mut keys: Vec<Complex64> = x.first.modes().map(|(mu, _)| mu).collect();
    for (mu, _) in x.second.modes() {
        if !keys.iter().any(|k| *k == mu) {
            keys.push(mu);
        }
    }
    keys
}

/// First-order orbit of the companion block generator on spectral pairs. On
/// the mode-mu subspace the generator acts as [[0, 1], [mu^2, 0]], whose
/// exponential is [[cosh(mu t), sinh(mu t)/mu], [mu sinh(mu t), cosh(mu t)]].
pub fn pair_orbit(x: &SpectralPair, t: f64) -> Result<SpectralPair> {
    check_time(t)?;
    let mut firsts = Vec::new();
    let mut seconds = Vec::new();
    for mu in pair_mode_keys(x) {
        let f = x.first.coeff(mu);
        let g = x.second.coeff(mu);
        let w = mu * t;
        if w.re.abs() > EXP_ARG_MAX {
            return Err(Error::Overflow(format!("pair orbit multiplier cosh({w})")));
        }
        let ch = w.cosh();
        let sh = w.sinh();
        let sh_over_mu = if mu == Complex64::ZERO {
            Complex64::new(t, 0.0)
        } else {
            sh / mu
        };
        firsts.push((mu, ch * f + sh_over_mu * g));
        seconds.push((mu, mu * sh * f + ch * g));
    }
    Ok(SpectralPair::new(
        SpectralVector::from_modes(firsts),
        SpectralVector::from_modes(seconds),
    ))
}

/// Once-integrated orbit of the companion block generator on spectral pairs:
/// S1(t) = int_0^t e^{sA} ds =
/// [[sinh(mu t)/mu, (cosh(mu t) - 1)/mu^2], [cosh(mu t) - 1, sinh(mu t)/mu]].
pub fn pair_integrated_orbit(x: &SpectralPair, t: f64) -> Result<SpectralPair> {
    check_time(t)?;
    let mut firsts = Vec::new();
    let mut seconds = Vec::new();
    for mu in pair_mode_keys(x) {
        let f = x.first.coeff(mu);
        let g = x.second.coeff(mu);
        let w = mu * t;
        if w.re.abs() > EXP_ARG_MAX {
            return Err(Error::Overflow(format!("pair orbit multiplier cosh({w})")));
        }
        // Small |w| hits cancellation in cosh - 1 and sinh/mu; switch to the
        // truncated series there (relative error ~ |w|^4 / 360 at the cut).
        let (sh_over_mu, chm1, chm1_over_mu2) = if w.norm() < 1e-3 {
            let w2 = w * w;
            let t2 = t * t;
            (
                t * (ONE + w2 / 6.0 + w2 * w2 / 120.0),
                w2 * (0.5 + w2 / 24.0 + w2 * w2 / 720.0),
                0.5 * t2 * (ONE + w2 / 12.0 + w2 * w2 / 360.0),
            )
        } else {
            let ch = w.cosh();
            let sh = w.sinh();
            (sh / mu, ch - ONE, (ch - ONE) / (mu * mu))
        };
        firsts.push((mu, sh_over_mu * f + chm1_over_mu2 * g));
        seconds.push((mu, chm1 * f + sh_over_mu * g));
    }
    Ok(SpectralPair::new(
        SpectralVector::from_modes(firsts),
        SpectralVector::from_modes(seconds),
    ))
}

/// Applies the multiplier exp(-(-mu^2)^L) to every mode.
pub fn apply_regularizer(x: &SpectralVector, l: u32) -> Result<SpectralVector> {
    x.map_modes(&mut |mu, c| Ok(c * exp_poly_multiplier(mu, l)?))
}

/// Runs the family orbit on whichever representation it acts on. Pairs under
/// a first-order spectral kind use the companion block generator (the scalar
/// symbol applies to plain spectral vectors only).
pub fn orbit_element(spec: &FamilySpec, x: &Element, t: f64) -> Result<Element> {
    match (&spec.kind, x) {
        (FamilyKind::SpectralFirstOrder, Element::Spectral(v)) => {
            Ok(Element::Spectral(eigen_orbit_first_order(spec, v, t)?))
        }
        (FamilyKind::SpectralFirstOrder, Element::Pair(p)) => Ok(Element::Pair(pair_orbit(p, t)?)),
        (FamilyKind::SpectralFractional { .. }, Element::Spectral(v)) => {
            Ok(Element::Spectral(eigen_orbit_fractional(spec, v, t)?))
        }
        (FamilyKind::Translation { speed, .. }, Element::Block(f)) => {
            check_time(t)?;
            Ok(Element::Block(f.translate(-speed * t)))
        }
        (FamilyKind::Translation { speed, .. }, Element::Grid(g)) => {
            check_time(t)?;
            Ok(Element::Grid(grid_orbit(g, *speed, t)?))
        }
        (FamilyKind::Cosine, Element::Grid(g)) => {
            check_time(t)?;
            Ok(Element::Grid(cosine_orbit(g, t)?))
        }
        (FamilyKind::IntegratedBlock { .. }, Element::Pair(p)) => {
            Ok(Element::Pair(pair_integrated_orbit(p, t)?))
        }
        (kind, other) => Err(Error::Representation(kind.name(), other.repr())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Block;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use statrs::function::erf::erf;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mode(mu: Complex64) -> SpectralVector {
        SpectralVector::single(mu, ONE)
    }

    #[test]
    fn symbol_horner_matches_direct_evaluation() {
        let s = Symbol::poly(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let mu = c(2.0, 1.0);
        let direct = c(1.0, 0.0) + 2.0 * mu + 3.0 * mu * mu;
        assert_relative_eq!((s.eval(mu) - direct).norm(), 0.0, epsilon = 1e-14);
        assert_eq!(s.leading(), Some((2, c(3.0, 0.0))));

        let rotated = Symbol::rotated_poly(0.0, vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_relative_eq!((rotated.eval(c(2.0, 0.0)) + c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn first_order_orbit_basics() {
        let spec = FamilySpec::first_order("f", vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let x = mode(c(-1.0, 0.0));

        let same = eigen_orbit_first_order(&spec, &x, 0.0).unwrap();
        assert_eq!(same, x);

        let halved = eigen_orbit_first_order(&spec, &x, 2.0_f64.ln()).unwrap();
        assert_relative_eq!(halved.coeff(c(-1.0, 0.0)).re, 0.5, max_relative = 1e-14);

        let frac = FamilySpec::fractional("g", 1.5, 0.0, vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            eigen_orbit_first_order(&frac, &x, 1.0),
            Err(Error::Kind { .. })
        ));
    }

    #[test]
    fn first_order_imaginary_eigenvalue_preserves_magnitude() {
        let spec = FamilySpec::first_order("rot", vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let x = mode(c(0.0, 1.0));
        for k in 0..=10 {
            let t = 10.0 * k as f64;
            let y = eigen_orbit_first_order(&spec, &x, t).unwrap();
            assert_relative_eq!(y.coeff(c(0.0, 1.0)).norm(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn first_order_semigroup_law() {
        let spec = FamilySpec::first_order("sg", vec![c(0.3, 0.0), c(0.0, 0.0), c(-0.5, 0.2)]);
        let x = SpectralVector::from_modes([
            (c(1.0, 0.5), c(2.0, -1.0)),
            (c(-0.7, 0.1), c(0.5, 0.5)),
        ]);
        let step_then_step = eigen_orbit_first_order(
            &spec,
            &eigen_orbit_first_order(&spec, &x, 0.7).unwrap(),
            1.1,
        )
        .unwrap();
        let direct = eigen_orbit_first_order(&spec, &x, 1.8).unwrap();
        for (mu, v) in step_then_step.modes() {
            assert_relative_eq!((v - direct.coeff(mu)).norm(), 0.0, epsilon = 1e-12 * v.norm());
        }
    }

    #[test]
    fn first_order_derivative_matches_eigenvalue() {
        let spec = FamilySpec::first_order("d", vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let mu = c(-1.0, 0.4);
        let x = mode(mu);
        let t = 1.0;
        let dt = 1e-4;
        let up = eigen_orbit_first_order(&spec, &x, t + dt).unwrap().coeff(mu);
        let dn = eigen_orbit_first_order(&spec, &x, t - dt).unwrap().coeff(mu);
        let fd = (up - dn) / (2.0 * dt);
        let expected = mu * eigen_orbit_first_order(&spec, &x, t).unwrap().coeff(mu);
        assert_relative_eq!((fd - expected).norm() / expected.norm(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn fractional_orbit_decay_tracks_leading_algebraic_term() {
        let spec = FamilySpec::fractional("dec", 1.5, 0.0, vec![c(0.0, 0.0), c(1.0, 0.0)]);
        // symbol -e^{i 0} mu at mu = 1 gives lambda = -1
        let x = mode(c(1.0, 0.0));
        assert_eq!(eigen_orbit_fractional(&spec, &x, 0.0).unwrap(), x);

        let mut prev = f64::INFINITY;
        for t in [10.0, 20.0, 40.0] {
            let v = eigen_orbit_fractional(&spec, &x, t).unwrap().coeff(c(1.0, 0.0));
            assert!(v.norm() < prev, "magnitude must decay");
            prev = v.norm();
        }
        // |E_zeta(-t^zeta)| ~ t^{-zeta} / |Gamma(1 - zeta)| far out
        let t: f64 = 40.0;
        let v = eigen_orbit_fractional(&spec, &x, t).unwrap().coeff(c(1.0, 0.0));
        let leading = 1.0 / (t.powf(1.5) * 2.0 * std::f64::consts::PI.sqrt());
        assert_relative_eq!(v.norm(), leading, max_relative = 1e-3);
    }

    #[test]
    fn fractional_orbit_growth_has_unit_log_slope() {
        let spec = FamilySpec::fractional("grow", 1.5, 0.0, vec![c(0.0, 0.0), c(-1.0, 0.0)]);
        // lambda = -e^{i0} * (-mu) = mu = 1: growth like e^t / zeta
        let x = mode(c(1.0, 0.0));
        let v12 = eigen_orbit_fractional(&spec, &x, 12.0).unwrap().coeff(c(1.0, 0.0));
        let v16 = eigen_orbit_fractional(&spec, &x, 16.0).unwrap().coeff(c(1.0, 0.0));
        let slope = (v16.norm().ln() - v12.norm().ln()) / 4.0;
        assert!((0.9..1.1).contains(&slope), "log slope {slope} should approach 1");
    }

    #[test]
    fn translate_norm_closed_forms() {
        let f = BlockFunction::new(vec![Block { a: 0.0, b: 1.0, c: 1.0 }]).unwrap();
        let w = Weight::ExpDecay { a: 1.0 };

        let at0 = translate_orbit_norm(&f, &w, 1.0, 0.0, 2.0).unwrap();
        assert_relative_eq!(at0, (1.0 - (-1.0_f64).exp()).sqrt(), max_relative = 1e-14);

        // Past t = 1 the whole block sits left of the origin.
        let mut prev = f64::INFINITY;
        for t in [2.0, 3.0, 4.0] {
            let v = translate_orbit_norm(&f, &w, 1.0, t, 2.0).unwrap();
            let expected = ((-t).exp() * (1.0_f64.exp() - 1.0)).sqrt();
            assert_relative_eq!(v, expected, max_relative = 1e-13);
            assert!(v < prev);
            prev = v;
        }

        // A block [s, s+1] straddles the origin at t = s.
        let g = BlockFunction::new(vec![Block { a: 7.0, b: 8.0, c: 1.0 }]).unwrap();
        let spike = translate_orbit_norm(&g, &w, 1.0, 7.0, 2.0).unwrap();
        assert!(spike * spike >= 1.0 - (-1.0_f64).exp());
    }

    #[test]
    fn translate_norm_quadrature_cross_check() {
        let f = BlockFunction::new(vec![
            Block { a: 1.0, b: 2.0, c: 1.0 },
            Block { a: 4.0, b: 8.0, c: 2.0 },
            Block { a: 16.0, b: 33.0, c: 3.0 },
        ])
        .unwrap();
        let w = Weight::ExpDecay { a: 0.7 };
        for t in [0.0, 1.5, 5.0, 17.0, 40.0] {
            let closed = translate_orbit_norm(&f, &w, 1.0, t, 2.0).unwrap();
            let quad = translate_orbit_norm_quadrature(&f, &w, 1.0, t, 2.0).unwrap();
            assert_relative_eq!(closed, quad, max_relative = 1e-10);
        }
        assert!(matches!(
            translate_orbit_norm_quadrature(&f, &Weight::Rational { n: 2 }, 1.0, 1.0, 2.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn grid_orbit_shifts_and_guards() {
        let f = GridFunction::from_fn(0.5, 4.0, |x| if (0.0..1.0).contains(&x) { 2.0 } else { 0.0 })
            .unwrap();
        assert_eq!(grid_orbit(&f, 1.0, 0.0).unwrap(), f);

        // group law: shift 1.0 then 0.5 equals shift 1.5
        let ab = grid_orbit(&grid_orbit(&f, 1.0, 1.0).unwrap(), 1.0, 0.5).unwrap();
        let direct = grid_orbit(&f, 1.0, 1.5).unwrap();
        assert_eq!(ab, direct);

        // shift forward then back restores the input exactly
        let back = grid_orbit(&grid_orbit(&f, 1.0, 1.5).unwrap(), -1.0, 1.5).unwrap();
        assert_eq!(back, f);

        assert!(matches!(grid_orbit(&f, 1.0, 0.3), Err(Error::TimeGrid { .. })));
        // support [0, 1) shifted by 4.5 pushes the sample at x = 0 off the grid
        assert!(matches!(grid_orbit(&f, 1.0, 4.5), Err(Error::Window { .. })));
    }

    #[test]
    fn cosine_orbit_symmetry_and_dalembert() {
        let f = GridFunction::from_fn(0.1, 6.0, |x| if x.abs() < 1.0 { 1.0 - x.abs() } else { 0.0 })
            .unwrap();
        let c0 = cosine_orbit(&f, 0.0).unwrap();
        assert_eq!(c0, f);

        // even input stays even
        let ct = cosine_orbit(&f, 1.2).unwrap();
        let n = ct.len();
        for i in 0..n {
            assert_abs_diff_eq!(ct.values[i], ct.values[n - 1 - i], epsilon = 1e-15);
        }

        // 2 C(t) C(s) = C(t+s) + C(|t-s|)
        let t = 1.3;
        let s = 0.4;
        let lhs = cosine_orbit(&cosine_orbit(&f, s).unwrap(), t).unwrap().scale(2.0);
        let rhs = cosine_orbit(&f, t + s)
            .unwrap()
            .add(&cosine_orbit(&f, (t - s).abs()).unwrap())
            .unwrap();
        for i in 0..n {
            assert_abs_diff_eq!(lhs.values[i], rhs.values[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn integrated_block_zero_time_is_zero() {
        let f = GridFunction::from_fn(0.25, 4.0, |x| (-x * x).exp() * 0.5).unwrap();
        let g = GridFunction::from_fn(0.25, 4.0, |_| 0.0).unwrap();
        let (o1, o2) = integrated_block((&f, &g), 0.0, 0.25).unwrap();
        assert!(o1.values.iter().all(|v| *v == 0.0));
        assert!(o2.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn integrated_block_first_component_matches_error_function_form() {
        // With v = (gaussian, 0) the first output is int_0^t C(s) v ds, whose
        // exact value is (sqrt(pi)/4) (erf(x+t) - erf(x-t)).
        let h = 2.5e-4;
        let t = 0.5;
        let cut = 8.0;
        let f = GridFunction::from_fn(h, 10.0, |x| if x.abs() <= cut { (-x * x).exp() } else { 0.0 })
            .unwrap();
        let zero = GridFunction::from_fn(h, 10.0, |_| 0.0).unwrap();
        let (o1, _) = integrated_block((&f, &zero), t, h).unwrap();
        let half_sqrt_pi = 0.5 * std::f64::consts::PI.sqrt();
        let mut worst = 0.0_f64;
        for i in 0..o1.len() {
            let x = o1.x(i);
            let exact = 0.5 * half_sqrt_pi * (erf(x + t) - erf(x - t));
            worst = worst.max((o1.values[i] - exact).abs());
        }
        assert!(worst <= 1e-8, "sup deviation {worst} exceeds 1e-8");
    }

    #[test]
    fn block_identity_residual_refines_at_second_order() {
        let t = 1.0;
        let make = |h: f64| {
            (
                GridFunction::from_fn(h, 12.0, |x| if x.abs() <= 8.0 { (-x * x).exp() } else { 0.0 })
                    .unwrap(),
                GridFunction::from_fn(h, 12.0, |x| {
                    if x.abs() <= 8.0 {
                        x * (-x * x).exp()
                    } else {
                        0.0
                    }
                })
                .unwrap(),
            )
        };
        let mut resids = Vec::new();
        for h in [0.02, 0.01, 0.005] {
            let (v1, v2) = make(h);
            resids.push(check_block_identity((&v1, &v2), t, h).unwrap());
        }
        assert!(resids[0] / resids[1] >= 1.8, "ratio {} too small", resids[0] / resids[1]);
        assert!(resids[1] / resids[2] >= 1.8, "ratio {} too small", resids[1] / resids[2]);
    }

    #[test]
    fn integrated_identity_spectral_alpha_zero_is_quadrature_exact() {
        let spec = FamilySpec::first_order("id", vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let x = Element::Spectral(mode(c(-1.0, 0.0)));
        let r = check_integrated_identity(&spec, &x, 0.0, 2.0, 1e-3).unwrap();
        assert!(r <= 1e-6, "residual {r}");

        let zero = Element::Spectral(SpectralVector::new());
        assert_eq!(check_integrated_identity(&spec, &zero, 0.0, 2.0, 1e-3).unwrap(), 0.0);

        // alpha = 1 per-mode convolution route
        let r1 = check_integrated_identity(&spec, &x, 1.0, 2.0, 1e-3).unwrap();
        assert!(r1 <= 1e-5, "residual {r1}");
    }

    #[test]
    fn integrated_identity_translation_refines_and_guards() {
        let make = |h: f64| {
            Element::Grid(
                GridFunction::from_fn(h, 12.0, |x| if x.abs() <= 8.0 { (-x * x).exp() } else { 0.0 })
                    .unwrap(),
            )
        };
        let spec = FamilySpec::translation("tr", 1.0, Weight::ExpDecay { a: 1.0 }, 2.0);
        let coarse = check_integrated_identity(&spec, &make(0.02), 1.0, 1.0, 0.02).unwrap();
        let fine = check_integrated_identity(&spec, &make(0.01), 1.0, 1.0, 0.01).unwrap();
        assert!(coarse / fine >= 1.8, "refinement ratio {} too small", coarse / fine);

        assert!(matches!(
            check_integrated_identity(&spec, &make(0.02), 2.0, 1.0, 0.02),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn resolvent_identity_residuals() {
        let spec = FamilySpec::fractional("r", 1.5, 0.0, vec![c(0.0, 0.0), c(-1.0, 0.0)]);
        // lambda = mu: pick the eigen-modes directly
        for lam in [c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)] {
            let x = mode(lam);
            let r = check_resolvent_identity(&spec, &x, 2.0, 1e-3).unwrap();
            assert!(r <= 1e-6, "residual {r} at lambda = {lam}");
        }

        // lambda = 0 is exact: both sides equal 1
        let zero_sym = FamilySpec::fractional("z", 1.5, 0.0, vec![c(0.0, 0.0)]);
        let r0 = check_resolvent_identity(&zero_sym, &mode(c(3.0, 0.0)), 2.0, 1e-2).unwrap();
        assert!(r0 <= 1e-14, "residual {r0}");

        // homogeneity in the coefficient
        let x = mode(c(-1.0, 0.0));
        let r1 = check_resolvent_identity(&spec, &x, 2.0, 1e-2).unwrap();
        let r3 = check_resolvent_identity(&spec, &x.scale(c(3.0, 0.0)), 2.0, 1e-2).unwrap();
        assert_relative_eq!(r3, 3.0 * r1, max_relative = 1e-12);

        // zeta < 1 endpoint singularity is handled by the product rule
        let half = FamilySpec::fractional("h", 0.5, 0.0, vec![c(0.0, 0.0), c(-1.0, 0.0)]);
        let rh = check_resolvent_identity(&half, &mode(c(1.0, 0.0)), 2.0, 1e-3).unwrap();
        assert!(rh <= 1e-5, "residual {rh}");
    }

    #[test]
    fn product_family_combines_regularizers() {
        let mut f1 = FamilySpec::fractional("a", 1.5, 0.0, vec![c(0.0, 0.0), c(1.0, 0.0)]);
        f1.regularizer = Regularizer::ExpPoly { l: 1 };
        let mut f2 = FamilySpec::fractional("b", 1.5, 0.0, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        f2.regularizer = Regularizer::ExpPoly { l: 2 };

        let out = product_family(&[f1.clone(), f2.clone()]).unwrap();
        assert_eq!(out.len(), 2);
        for mu in [c(0.5, 0.3), c(-0.2, 0.9), c(0.0, 1.4)] {
            let expect = f1.regularizer.multiplier(mu).unwrap() * f2.regularizer.multiplier(mu).unwrap();
            for spec in &out {
                let got = spec.regularizer.multiplier(mu).unwrap();
                assert_relative_eq!((got - expect).norm(), 0.0, epsilon = 1e-14 * expect.norm());
            }
        }

        // single family passes through unchanged
        let solo = product_family(std::slice::from_ref(&f1)).unwrap();
        assert_eq!(solo[0], f1);

        // mixed kinds are rejected
        let fo = FamilySpec::first_order("c", vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(product_family(&[f1.clone(), fo]).is_err());
        let tr = FamilySpec::translation("t", 1.0, Weight::ExpDecay { a: 1.0 }, 2.0);
        assert!(matches!(
            product_family(&[f1, tr]),
            Err(Error::Kind { .. })
        ));
    }

    #[test]
    fn matrix_eigenvector_satisfies_eigen_relation() {
        let lam = c(0.3, 0.2);
        let pair = matrix_eigenvector(lam, 1.0).unwrap();
        // A(f, g) = (g, mu^2 f) = lambda (f, g) in the mode representation
        assert_relative_eq!(
            (pair.second.coeff(lam) - lam * pair.first.coeff(lam)).norm(),
            0.0,
            epsilon = 1e-15
        );

        // first-order orbit is e^{lambda t} times the eigenvector
        let t = 1.7;
        let moved = pair_orbit(&pair, t).unwrap();
        let scale = (lam * t).exp();
        assert_relative_eq!(
            (moved.first.coeff(lam) - scale * pair.first.coeff(lam)).norm(),
            0.0,
            epsilon = 1e-12 * scale.norm()
        );
        assert_relative_eq!(
            (moved.second.coeff(lam) - scale * pair.second.coeff(lam)).norm(),
            0.0,
            epsilon = 1e-12 * scale.norm()
        );

        // decay for Re lambda < 0
        let dec = matrix_eigenvector(c(-0.3, 0.8), 1.0).unwrap();
        let n0 = pair_orbit(&dec, 0.0).unwrap().first.coeff(c(-0.3, 0.8)).norm();
        let n10 = pair_orbit(&dec, 10.0).unwrap().first.coeff(c(-0.3, 0.8)).norm();
        assert!(n10 < 0.1 * n0);

        assert!(matches!(matrix_eigenvector(c(0.6, 0.0), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn pair_integrated_orbit_matches_quadrature_of_the_group() {
        let pair = SpectralPair::new(
            SpectralVector::from_modes([(c(0.3, 0.4), c(1.0, -0.5)), (c(0.0, 0.0), c(2.0, 0.0))]),
            SpectralVector::from_modes([(c(0.3, 0.4), c(0.2, 0.1))]),
        );
        let t = 1.25;
        let m = 2000;
        let h = t / m as f64;
        let integrated = pair_integrated_orbit(&pair, t).unwrap();
        for mu in [c(0.3, 0.4), c(0.0, 0.0)] {
            let mut first = Vec::with_capacity(m + 1);
            let mut second = Vec::with_capacity(m + 1);
            for j in 0..=m {
                let moved = pair_orbit(&pair, j as f64 * h).unwrap();
                first.push(moved.first.coeff(mu));
                second.push(moved.second.coeff(mu));
            }
            let q1 = trapezoid_complex(&first, h);
            let q2 = trapezoid_complex(&second, h);
            assert_relative_eq!((integrated.first.coeff(mu) - q1).norm(), 0.0, epsilon = 1e-6);
            assert_relative_eq!((integrated.second.coeff(mu) - q2).norm(), 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn regularizer_multiplier_cases() {
        assert_relative_eq!(
            (exp_poly_multiplier(Complex64::ZERO, 1).unwrap() - ONE).norm(),
            0.0,
            epsilon = 1e-15
        );
        // real mu: exp(+mu^2) grows
        assert_relative_eq!(
            exp_poly_multiplier(c(2.0, 0.0), 1).unwrap().re,
            4.0_f64.exp(),
            max_relative = 1e-14
        );
        // imaginary mu: exp(-y^2) damps
        assert_relative_eq!(
            exp_poly_multiplier(c(0.0, 2.0), 1).unwrap().re,
            (-4.0_f64).exp(),
            max_relative = 1e-14
        );
        assert!(matches!(
            exp_poly_multiplier(c(40.0, 0.0), 1),
            Err(Error::Overflow(_))
        ));

        let x = SpectralVector::from_modes([(c(0.0, 2.0), c(3.0, 0.0))]);
        let y = apply_regularizer(&x, 1).unwrap();
        assert_relative_eq!(y.coeff(c(0.0, 2.0)).re, 3.0 * (-4.0_f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn orbit_element_dispatch() {
        let tr = FamilySpec::translation("t", 2.0, Weight::ExpDecay { a: 1.0 }, 2.0);
        let f = BlockFunction::new(vec![Block { a: 4.0, b: 6.0, c: 1.0 }]).unwrap();
        let moved = orbit_element(&tr, &Element::Block(f.clone()), 1.0).unwrap();
        let Element::Block(g) = moved else { panic!("expected block") };
        assert_eq!(g.blocks()[0].a, 2.0);

        let sp = FamilySpec::first_order("s", vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            orbit_element(&sp, &Element::Block(f), 1.0),
            Err(Error::Representation(_, _))
        ));
    }
}
