//! Exact power-series summation for half-integer 2*beta in big-integer
//! fixed point.
//!
//! For beta in {1/2, 1, 3/2, 2} the series splits by term parity into a part
//! whose Gamma denominators are plain factorials and a part whose
//! half-integer Gamma values share one common factor 1/sqrt(pi). Each part
//! has an exactly rational term ratio, so both partial sums can be carried
//! in fixed point and the only inexact inputs are the argument itself and
//! the final multiplication by 1/sqrt(pi).
//!
//! The working precision must grow with the cancellation scale
//! exp(|z|^{1/beta}): an alternating series whose largest term is e^x needs
//! about x*log2(e) guard bits before the O(1)-sized result emerges. The
//! shift below provides those bits plus an 800-bit floor, and 1/sqrt(pi) is
//! rebuilt at full working precision by a Newton iteration from pi, since a
//! constant of any fixed precision would poison the large-|z| cases.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// 2240 fractional digits: enough for the worst shift reached at |z| = 64.
const PI_DIGITS: &str = concat!(
    "3.",
    "14159265358979323846264338327950288419716939937510582097494459230781640628620899",
    "86280348253421170679821480865132823066470938446095505822317253594081284811174502",
    "84102701938521105559644622948954930381964428810975665933446128475648233786783165",
    "27120190914564856692346034861045432664821339360726024914127372458700660631558817",
    "48815209209628292540917153643678925903600113305305488204665213841469519415116094",
    "33057270365759591953092186117381932611793105118548074462379962749567351885752724",
    "89122793818301194912983367336244065664308602139494639522473719070217986094370277",
    "05392171762931767523846748184676694051320005681271452635608277857713427577896091",
    "73637178721468440901224953430146549585371050792279689258923542019956112129021960",
    "86403441815981362977477130996051870721134999999837297804995105973173281609631859",
    "50244594553469083026425223082533446850352619311881710100031378387528865875332083",
    "81420617177669147303598253490428755468731159562863882353787593751957781857780532",
    "17122680661300192787661119590921642019893809525720106548586327886593615338182796",
    "82303019520353018529689957736225994138912497217752834791315155748572424541506959",
    "50829533116861727855889075098381754637464939319255060400927701671139009848824012",
    "85836160356370766010471018194295559619894676783744944825537977472684710404753464",
    "62080466842590694912933136770289891521047521620569660240580381501935112533824300",
    "35587640247496473263914199272604269922796782354781636009341721641219924586315030",
    "28618297455570674983850549458858692699569092721079750930295532116534498720275596",
    "02364806654991198818347977535663698074265425278625518184175746728909777727938000",
    "81647060016145249192173217214772350141441973568548161361157352552133475741849468",
    "43852332390739414333454776241686251898356948556209921922218427255025425688767179",
    "04946016534668049886272327917860857843838279679766814541009538837863609506800642",
    "25125205117392984896084128488626945604241965285022210661186306744278622039194945",
    "04712371378696095636437191728746776465757396241389086583264599581339047802759009",
    "94657640789512694683983525957098258226205224894077267194782684826014769909026401",
    "36394437455305068203496252451749399651431429809190659250937221696461515709858387",
    "41059788595977297549893016175392846813826868386894277415599185592524595395943105",
);

/// Independent 240-digit reference used only by the self-check tests.
#[cfg(test)]
const INV_SQRT_PI_DIGITS: &str = concat!(
    "0.",
    "56418958354775628694807945156077258584405062932899885684408572171064246844149341",
    "44867436602021073634430283479063617073516899314948261628663654895200177689932928",
    "37637059598439760352464350217972571211580245772820220554508527173216622208463308",
);

const BASE_SHIFT: u64 = 800;
/// A term whose magnitude drops below 2^-TAIL_BITS counts as negligible.
const TAIL_BITS: u64 = 700;

/// Exact conversion of a finite f64 into fixed point at scale 2^shift.
fn fix_from_f64(x: f64, shift: u64) -> BigInt {
    debug_assert!(x.is_finite());
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let neg = bits >> 63 == 1;
    let exp_raw = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp_raw == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1 << 52), exp_raw - 1075)
    };
    let mut v = BigInt::from(m);
    let sh = e + shift as i64;
    if sh >= 0 {
        v <<= sh as u64;
    } else {
        v >>= (-sh) as u64;
    }
    if neg {
        -v
    } else {
        v
    }
}

/// Parses "d.ddd..." into fixed point; exact up to the digits given.
fn fix_from_decimal(s: &str, shift: u64) -> BigInt {
    let (int_part, frac_part) = s.split_once('.').expect("decimal literal");
    let digits: String = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().expect("decimal digits");
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    (num << shift) / den
}

fn fix_to_f64(v: &BigInt, shift: u64) -> Result<f64> {
    let overflow = || Error::Overflow("exact series value exceeds the f64 range".into());
    let bits = v.bits();
    if bits == 0 {
        return Ok(0.0);
    }
    if bits as i64 - shift as i64 > 1024 {
        return Err(overflow());
    }
    let (mant, exp) = if bits > 64 {
        let m: BigInt = v >> (bits - 64);
        (m.to_f64().unwrap_or(0.0), bits as i64 - 64 - shift as i64)
    } else {
        (v.to_f64().unwrap_or(0.0), -(shift as i64))
    };
    // powi underflows to 0 for very negative exponents, which is correct here.
    let val = mant * 2f64.powi(exp.clamp(-2200, 2000) as i32);
    if val.is_finite() {
        Ok(val)
    } else {
        Err(overflow())
    }
}

#[derive(Clone)]
struct CFix {
    re: BigInt,
    im: BigInt,
}

impl CFix {
    fn zero() -> Self {
        CFix { re: BigInt::zero(), im: BigInt::zero() }
    }

    fn from_complex(z: Complex64, shift: u64) -> Self {
        CFix { re: fix_from_f64(z.re, shift), im: fix_from_f64(z.im, shift) }
    }

    fn one(shift: u64) -> Self {
        CFix { re: BigInt::from(1u8) << shift, im: BigInt::zero() }
    }

    fn bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }

    fn add_assign(&mut self, o: &CFix) {
        self.re += &o.re;
        self.im += &o.im;
    }

    fn mul(&self, o: &CFix, shift: u64) -> CFix {
        CFix {
            re: (&self.re * &o.re - &self.im * &o.im) >> shift,
            im: (&self.re * &o.im + &self.im * &o.re) >> shift,
        }
    }

    fn mul_real(&self, r: &BigInt, shift: u64) -> CFix {
        CFix { re: (&self.re * r) >> shift, im: (&self.im * r) >> shift }
    }

    fn mul_small(&self, k: u64) -> CFix {
        let k = BigInt::from(k);
        CFix { re: &self.re * &k, im: &self.im * &k }
    }

    fn div_small(&self, k: u64) -> CFix {
        let k = BigInt::from(k);
        CFix { re: &self.re / &k, im: &self.im / &k }
    }

    fn to_complex(&self, shift: u64) -> Result<Complex64> {
        Ok(Complex64::new(fix_to_f64(&self.re, shift)?, fix_to_f64(&self.im, shift)?))
    }
}

/// floor(2^shift / sqrt(pi)) via Newton iteration y <- y (3 - pi y^2) / 2,
/// seeded from the f64 value; quadratic convergence reaches the full shift
/// precision in well under the fixed 12 rounds.
fn inv_sqrt_pi_fix(shift: u64) -> BigInt {
    let pi = fix_from_decimal(PI_DIGITS, shift);
    let mut y = fix_from_f64(1.0 / std::f64::consts::PI.sqrt(), shift);
    let three = BigInt::from(3u8) << shift;
    for _ in 0..12 {
        let y2: BigInt = (&y * &y) >> shift;
        let t: BigInt = (&pi * &y2) >> shift;
        let r: BigInt = &three - &t;
        y = (&y * &r) >> (shift + 1);
    }
    y
}

pub(crate) fn shift_for(two_beta: u32, abs_z: f64) -> u64 {
    let beta = f64::from(two_beta) / 2.0;
    let x = abs_z.powf(1.0 / beta);
    BASE_SHIFT + (1.5 * x).ceil() as u64
}

/// Sums the defining series exactly. Supported: two_beta in 1..=4 and
/// |z| <= 64 (the precision of the embedded pi constant caps the shift).
/// Returns the value and a conservative absolute error estimate.
pub(crate) fn exact_ml_series(two_beta: u32, z: Complex64) -> Result<(Complex64, f64)> {
    if !(1..=4).contains(&two_beta) {
        return Err(Error::parameter("two_beta", "exact summation needs 2*beta in 1..=4"));
    }
    let r = z.norm();
    if !(r <= 64.0) {
        return Err(Error::Unsupported(format!(
            "exact series summation is capped at |z| <= 64, got {r}"
        )));
    }
    let shift = shift_for(two_beta, r);
    let zf = CFix::from_complex(z, shift);
    let z2 = zf.mul(&zf, shift);

    // A: parity class with factorial denominators; B: the other class, whose
    // shared 1/sqrt(pi) is factored out and applied once at the end.
    let mut a_term = CFix::one(shift);
    let mut a_sum = CFix::zero();
    let mut b_term = match two_beta {
        1 => Some(zf.mul_small(2)),
        3 => Some(zf.mul_small(4).div_small(3)),
        _ => None,
    };
    let mut b_sum = CFix::zero();

    let tail_cut = shift - TAIL_BITS;
    let mut quiet = 0u32;
    let mut converged = false;
    for m in 0..200_000u64 {
        a_sum.add_assign(&a_term);
        if let Some(bt) = &b_term {
            b_sum.add_assign(bt);
        }
        let live = a_term.bits().max(b_term.as_ref().map_or(0, CFix::bits));
        if live < tail_cut {
            quiet += 1;
            if quiet >= 8 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        match two_beta {
            1 => {
                a_term = a_term.mul(&z2, shift).div_small(m + 1);
                let bt = b_term.take().expect("odd part present");
                b_term = Some(bt.mul(&z2, shift).mul_small(2).div_small(2 * m + 3));
            }
            2 => {
                a_term = a_term.mul(&zf, shift).div_small(m + 1);
            }
            3 => {
                a_term = a_term
                    .mul(&z2, shift)
                    .div_small(3 * m + 1)
                    .div_small(3 * m + 2)
                    .div_small(3 * m + 3);
                let bt = b_term.take().expect("odd part present");
                b_term = Some(
                    bt.mul(&z2, shift)
                        .mul_small(8)
                        .div_small(6 * m + 5)
                        .div_small(6 * m + 7)
                        .div_small(6 * m + 9),
                );
            }
            4 => {
                a_term = a_term.mul(&zf, shift).div_small(2 * m + 1).div_small(2 * m + 2);
            }
            _ => unreachable!(),
        }
    }
    if !converged {
        return Err(Error::Quadrature("exact series summation did not converge".into()));
    }

    let total = if matches!(two_beta, 1 | 3) {
        let c = inv_sqrt_pi_fix(shift);
        let mut t = b_sum.mul_real(&c, shift);
        t.add_assign(&a_sum);
        t
    } else {
        a_sum
    };
    let value = total.to_complex(shift)?;
    // Truncation sits 700 bits down and rounding noise deeper still; the f64
    // conversion dominates.
    let err = value.norm() * 1e-15 + 1e-180;
    Ok((value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fix_round_trips_f64() {
        let shift = 900;
        for x in [0.0, 1.0, -1.0, 0.3333333333333333, 1e-200, -2.5e200, 6.02e23] {
            let v = fix_from_f64(x, shift);
            assert_eq!(fix_to_f64(&v, shift).unwrap(), x);
        }
        // Magnitudes below 2^-shift quantize to zero by design.
        assert_eq!(fix_from_f64(1e-300, shift), BigInt::from(0u8));
    }

    #[test]
    fn fix_overflow_detected() {
        let shift = 100;
        let huge = BigInt::from(1u8) << (shift + 1100);
        assert!(matches!(fix_to_f64(&huge, shift), Err(Error::Overflow(_))));
    }

    #[test]
    fn newton_inverse_sqrt_pi_matches_reference_digits() {
        // Cross-validates the embedded pi digits against the independent
        // 240-digit 1/sqrt(pi) literal.
        let shift = 790; // just inside the reference literal's precision
        let computed = inv_sqrt_pi_fix(shift);
        let reference = fix_from_decimal(INV_SQRT_PI_DIGITS, shift);
        let diff: BigInt = &computed - &reference;
        assert!(diff.bits() <= 4, "differ by {} bits", diff.bits());
    }

    #[test]
    fn newton_self_consistency_at_large_shift() {
        let shift = 6000;
        let y = inv_sqrt_pi_fix(shift);
        let pi = fix_from_decimal(PI_DIGITS, shift);
        let y2: BigInt = (&y * &y) >> shift;
        let prod: BigInt = (&pi * &y2) >> shift;
        let one = BigInt::from(1u8) << shift;
        let diff: BigInt = &prod - &one;
        assert!(diff.bits() <= 16, "pi * y^2 off by {} bits", diff.bits());
    }

    #[test]
    fn matches_elementary_functions() {
        // two_beta = 2: E(z) = e^z; two_beta = 4: E(z) = cosh(sqrt z).
        let (v, _) = exact_ml_series(2, c(-50.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, (-50.0f64).exp(), max_relative = 1e-13);
        let (v, _) = exact_ml_series(4, c(4.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 2.0f64.cosh(), max_relative = 1e-14);
        let (v, _) = exact_ml_series(4, c(-36.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 6.0f64.cos(), max_relative = 1e-14);
    }

    #[test]
    fn half_integer_reference_values() {
        // Independently computed reference points, strongest cancellation
        // first: at z = -30, two_beta = 1 the largest term is e^900 while
        // the sum is 0.0188.
        let cases: [(u32, Complex64, Complex64); 6] = [
            (1, c(-30.0, 0.0), c(0.01879588886141675, 0.0)),
            (1, c(-12.0, 0.0), c(0.04685422101489376, 0.0)),
            (1, c(10.0, 0.0), c(5.376234283632271e43, 0.0)),
            (3, c(-12.0, 0.0), c(-0.03886332326744097, 0.0)),
            (3, c(-50.0, 0.0), c(-0.004578385105839278, 0.0)),
            (1, c(-11.412678195541843, 3.7082039324993683), c(0.044618742814902954, 0.014398286178915599)),
        ];
        for (tb, z, want) in cases {
            let (v, _) = exact_ml_series(tb, z).unwrap();
            assert_relative_eq!(v.re, want.re, max_relative = 1e-12);
            if want.im == 0.0 {
                assert!(v.im.abs() <= 1e-12 * want.re.abs().max(1.0));
            } else {
                assert_relative_eq!(v.im, want.im, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn overflowing_value_reports_overflow() {
        // two_beta = 1 at z = +30: the sum is ~1.5e391, beyond f64.
        assert!(matches!(
            exact_ml_series(1, c(30.0, 0.0)),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn radius_cap_enforced() {
        assert!(exact_ml_series(1, c(65.0, 0.0)).is_err());
    }
}
