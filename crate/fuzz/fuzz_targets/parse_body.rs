#![no_main]

use libfuzzer_sys::fuzz_target;
use radon_center::bodies::{parse_body, Separation};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(body) = parse_body(text) else { return };
    let q = vec![0.25; body.dim()];
    if let Ok(Separation::Separated(h)) = body.separate(&q) {
        assert!(!h.contains(&q));
    }
});
