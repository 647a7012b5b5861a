//! Scenario config decoding and compilation: arbitrary JSON must be either
//! rejected with an error or compiled, never panic or blow up allocation.

#![no_main]

use ddchaos::scenario::{compile, load_config};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = load_config(s) {
            let _ = compile(&cfg);
        }
    }
});
