//! Complex-literal parser: must never panic, and whatever parses must
//! survive a format/parse round trip exactly.

#![no_main]

use ddchaos::textio::{format_complex, parse_complex};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(z) = parse_complex(s) {
            assert!(z.re.is_finite() && z.im.is_finite());
            let back = parse_complex(&format_complex(z)).expect("formatted literal reparses");
            assert_eq!(back, z);
        }
    }
});
