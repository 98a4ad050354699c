#![no_main]

use libfuzzer_sys::fuzz_target;
use radon_center::io::{parse_csv, parse_json, parse_points, to_csv_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_json(text);
    let _ = parse_points(text);
    if let Ok(points) = parse_csv(text) {
        assert!(!points.is_empty());
        let again = parse_csv(&to_csv_string(&points)).expect("written CSV parses");
        assert_eq!(again, points);
    }
});
