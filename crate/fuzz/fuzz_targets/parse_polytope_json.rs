#![no_main]

use libfuzzer_sys::fuzz_target;
use radon_center::bodies::parse_polytope_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(body) = parse_polytope_json(text) {
        let _ = body.contains(&vec![0.0; body.dim()]);
    }
});
