#![no_main]

use libfuzzer_sys::fuzz_target;
use radon_center::convex_opt::parse_function;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_function(text) {
        let x = vec![0.5; f.dim()];
        let (v, g) = f.value_and_subgradient(&x);
        assert_eq!(g.len(), f.dim());
        assert_eq!(v.to_bits(), f.value(&x).to_bits());
    }
});
