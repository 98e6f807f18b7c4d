#![no_main]

use bitflip::repcode::DecodeTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = DecodeTable::from_csv(text) {
        let back = DecodeTable::from_csv(&t.to_csv()).expect("own CSV parses");
        assert_eq!(back, t);
    }
});
