//! Trace CSV parser plus the density pipeline behind it: no panics, and any
//! trace that validates yields an estimate inside [0, 1].

#![no_main]

use ddchaos::density::{upper_density_estimate, MembershipTrace};
use ddchaos::textio::parse_trace_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_trace_csv(s) {
            let samples: Vec<(f64, bool)> =
                rows.into_iter().map(|(t, v)| (t, v != 0.0)).collect();
            if let Ok(trace) = MembershipTrace::new(samples) {
                let est = upper_density_estimate(&trace, 0.5).expect("tail holds the last sample");
                assert!((0.0..=1.0).contains(&est), "estimate {est} out of range");
            }
        }
    }
});
