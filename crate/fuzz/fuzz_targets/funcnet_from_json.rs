#![no_main]

use libfuzzer_sys::fuzz_target;
use radon_center::funcnet::FuncNet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = FuncNet::from_json(text) {
        let again = FuncNet::from_json(&net.to_json()).expect("written net parses");
        assert_eq!(again, net);
    }
});
