#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(hbars) = berezin::parse_hbars(s) {
            // accepted lists are nonempty, in (0, 1], strictly decreasing
            assert!(!hbars.is_empty());
            assert!(hbars.iter().all(|h| h.is_finite() && *h > 0.0 && *h <= 1.0));
            assert!(hbars.windows(2).all(|w| w[1] < w[0]));
        }
    }
});
