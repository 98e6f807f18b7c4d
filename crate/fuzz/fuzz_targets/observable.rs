#![no_main]

use bitflip::experiments::vqe::Observable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(obs) = text.parse::<Observable>() {
        let back: Observable = obs.to_string().parse().expect("display output parses");
        assert_eq!(back, obs);
    }
});
