//! Upper-density estimation for time sets sampled by membership traces.
//!
//! A trace samples a measurable set D of times: sample (t_i, b_i) asserts
//! that membership is constant on the whole interval (t_{i-1}, t_i] with
//! value b_i (t_0 = 0). The estimated upper density of D is the largest
//! ratio |D intersect [0, t]| / t seen over the tail of the observation
//! window; sets of upper density one are the interesting case, so the
//! estimator is exact (returns 1.0 bit for bit) on all-member traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membership samples at strictly increasing positive times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, bool)>", into = "Vec<(f64, bool)>")]
pub struct MembershipTrace {
    samples: Vec<(f64, bool)>,
}

impl TryFrom<Vec<(f64, bool)>> for MembershipTrace {
    type Error = Error;
    fn try_from(samples: Vec<(f64, bool)>) -> Result<Self> {
        MembershipTrace::new(samples)
    }
}

impl From<MembershipTrace> for Vec<(f64, bool)> {
    fn from(t: MembershipTrace) -> Self {
        t.samples
    }
}

impl MembershipTrace {
    pub fn new(samples: Vec<(f64, bool)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::parameter("samples", "trace must contain at least one sample"));
        }
        let mut prev = 0.0;
        for &(t, _) in &samples {
            if !t.is_finite() || t <= prev {
                return Err(Error::parameter(
                    "samples",
                    format!("sample times must be finite and strictly increasing from > 0; got {t} after {prev}"),
                ));
            }
            prev = t;
        }
        Ok(MembershipTrace { samples })
    }

    /// Evaluates a membership predicate on a prescribed time grid.
    pub fn from_fn(times: &[f64], member: impl Fn(f64) -> bool) -> Result<Self> {
        Self::new(times.iter().map(|&t| (t, member(t))).collect())
    }

    pub fn samples(&self) -> &[(f64, bool)] {
        &self.samples
    }

    pub fn last_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Pointwise boolean combination used when merging traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceOp {
    And,
    Or,
}

/// Combines two traces sampled on the identical time grid. Differing grids
/// are an error; nothing is resampled behind the caller's back.
pub fn intersect_traces(a: &MembershipTrace, b: &MembershipTrace, op: TraceOp) -> Result<MembershipTrace> {
    if a.len() != b.len() {
        return Err(Error::SampleTimes);
    }
    let mut out = Vec::with_capacity(a.len());
    for (&(ta, ba), &(tb, bb)) in a.samples().iter().zip(b.samples()) {
        if ta != tb {
            return Err(Error::SampleTimes);
        }
        let v = match op {
            TraceOp::And => ba && bb,
            TraceOp::Or => ba || bb,
        };
        out.push((ta, v));
    }
    MembershipTrace::new(out)
}

/// Running ratios |D intersect [0, t_i]| / t_i at every sample time.
///
/// The member measure is tracked as t minus the accumulated non-member
/// measure, so traces that are all-member give exactly 1.0 and all
/// non-member exactly 0.0, with no float drift.
pub fn density_profile(trace: &MembershipTrace) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(trace.len());
    let mut missed = 0.0;
    let mut any_member = false;
    let mut prev = 0.0;
    for &(t, b) in trace.samples() {
        if b {
            any_member = true;
        } else {
            missed += t - prev;
        }
        let ratio = if !any_member {
            0.0
        } else {
            ((t - missed) / t).clamp(0.0, 1.0)
        };
        out.push((t, ratio));
        prev = t;
    }
    out
}

/// Largest profile ratio over the tail window: sample times
/// t >= (1 - tail_window) * T with T the final sample time.
pub fn upper_density_estimate(trace: &MembershipTrace, tail_window: f64) -> Result<f64> {
    if !(tail_window > 0.0 && tail_window <= 1.0) {
        return Err(Error::parameter("tail_window", "must lie in (0, 1]"));
    }
    let cutoff = (1.0 - tail_window) * trace.last_time();
    let best = density_profile(trace)
        .into_iter()
        .filter(|&(t, _)| t >= cutoff)
        .map(|(_, r)| r)
        .fold(f64::NEG_INFINITY, f64::max);
    if best < 0.0 {
        return Err(Error::Domain("no profile samples inside the tail window".into()));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_validation() {
        assert!(MembershipTrace::new(vec![]).is_err());
        assert!(MembershipTrace::new(vec![(0.0, true)]).is_err());
        assert!(MembershipTrace::new(vec![(1.0, true), (1.0, false)]).is_err());
        assert!(MembershipTrace::new(vec![(2.0, true), (1.0, false)]).is_err());
        assert!(MembershipTrace::new(vec![(1.0, true), (2.0, false)]).is_ok());
    }

    #[test]
    fn all_member_trace_is_exactly_one() {
        // Awkward times on purpose: the ratio must still be bit-exact 1.0.
        let times = [0.1, 0.30000000000000004, 1.7e3, 3.1e7, 7.77e11];
        let trace = MembershipTrace::from_fn(&times, |_| true).unwrap();
        for (_, r) in density_profile(&trace) {
            assert_eq!(r, 1.0);
        }
        assert_eq!(upper_density_estimate(&trace, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn all_nonmember_trace_is_exactly_zero() {
        let times = [0.3, 2.0, 5.0];
        let trace = MembershipTrace::from_fn(&times, |_| false).unwrap();
        assert_eq!(upper_density_estimate(&trace, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn interval_family_profile() {
        // D = union over k = 0..6 of [4^k, 2*4^k], encoded by boundary samples.
        let mut samples = Vec::new();
        for k in 0..=6 {
            let a = 4f64.powi(k);
            samples.push((a, false));
            samples.push((2.0 * a, true));
        }
        let trace = MembershipTrace::new(samples).unwrap();
        let expect = 5461.0 / 8192.0;
        let got = upper_density_estimate(&trace, 0.5).unwrap();
        assert!((got - expect).abs() < 1e-12, "got {got}");
        // Early profile point: at t = 2 the set covered [1, 2], ratio 1/2.
        let profile = density_profile(&trace);
        let at2 = profile.iter().find(|&&(t, _)| t == 2.0).unwrap().1;
        assert!((at2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tail_window_restricts_the_maximum() {
        // Ratio peaks early then decays; a narrow tail window must miss the peak.
        let trace = MembershipTrace::new(vec![
            (1.0, true),
            (2.0, true),
            (100.0, false),
        ])
        .unwrap();
        let full = upper_density_estimate(&trace, 1.0).unwrap();
        assert_eq!(full, 1.0);
        let tail = upper_density_estimate(&trace, 0.5).unwrap();
        assert!((tail - 0.02).abs() < 1e-15, "got {tail}");
    }

    #[test]
    fn intersect_demands_identical_grids() {
        let a = MembershipTrace::new(vec![(1.0, true), (2.0, true)]).unwrap();
        let b = MembershipTrace::new(vec![(1.0, true), (2.5, true)]).unwrap();
        assert_eq!(intersect_traces(&a, &b, TraceOp::And), Err(Error::SampleTimes));
        let c = MembershipTrace::new(vec![(1.0, false), (2.0, true)]).unwrap();
        let and = intersect_traces(&a, &c, TraceOp::And).unwrap();
        assert_eq!(and.samples(), &[(1.0, false), (2.0, true)]);
        let or = intersect_traces(&a, &c, TraceOp::Or).unwrap();
        assert_eq!(or.samples(), &[(1.0, true), (2.0, true)]);
    }

    #[test]
    fn serde_rejects_bad_wire_data() {
        let ok: std::result::Result<MembershipTrace, _> =
            serde_json::from_str("[[1.0, true], [2.0, false]]");
        assert!(ok.is_ok());
        let bad: std::result::Result<MembershipTrace, _> =
            serde_json::from_str("[[2.0, true], [1.0, false]]");
        assert!(bad.is_err());
    }
}
