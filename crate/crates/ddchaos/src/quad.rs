//! Small deterministic quadrature helpers shared across modules.

use num_complex::Complex64;

/// Adaptive Simpson integration with absolute tolerance `tol`.
pub fn simpson_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Trapezoid rule over uniformly spaced complex samples with step `h`.
pub fn trapezoid_complex(values: &[Complex64], h: f64) -> Complex64 {
    match values.len() {
        0 | 1 => Complex64::ZERO,
        _ => {
            let mut acc = 0.5 * (values[0] + values[values.len() - 1]);
            for v in &values[1..values.len() - 1] {
                acc += v;
            }
            acc * h
        }
    }
}

/// Convolution value int_0^t (t-s)^{zeta-1}/Gamma(zeta) u(s) ds for samples
/// u(s_i) on the uniform grid s_i = i h, t = (len-1) h.
///
/// Product integration: u is taken piecewise linear on each cell while the
/// weakly singular kernel factor is integrated in closed form, so the rule
/// keeps second-order accuracy up to the singular endpoint.
pub fn conv_g_product(u: &[Complex64], h: f64, zeta: f64) -> Complex64 {
    let n = u.len();
    if n < 2 {
        return Complex64::ZERO;
    }
    let t = (n - 1) as f64 * h;
    let inv_gamma = crate::ml::reciprocal_gamma(zeta);
    let mut acc = Complex64::ZERO;
    let mut tau_pow_lo = t.powf(zeta); // (t - s_i)^zeta at i = 0
    let mut tau_pow1_lo = t.powf(zeta + 1.0);
    for i in 0..n - 1 {
        let tau_lo = t - i as f64 * h;
        let tau_hi = t - (i + 1) as f64 * h;
        let tau_pow_hi = if i + 1 == n - 1 { 0.0 } else { tau_hi.powf(zeta) };
        let tau_pow1_hi = if i + 1 == n - 1 { 0.0 } else { tau_hi.powf(zeta + 1.0) };
        let m0 = (tau_pow_lo - tau_pow_hi) / zeta;
        let m1 = tau_lo * m0 - (tau_pow1_lo - tau_pow1_hi) / (zeta + 1.0);
        let slope = (u[i + 1] - u[i]) / h;
        acc += u[i] * m0 + slope * m1;
        tau_pow_lo = tau_pow_hi;
        tau_pow1_lo = tau_pow1_hi;
    }
    acc * inv_gamma
}
