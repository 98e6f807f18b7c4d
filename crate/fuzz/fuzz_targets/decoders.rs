#![no_main]

use bitflip::repcode::{decode_double, decode_single, DecodeTable, Feedback, Syndrome};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let bits: Vec<bool> = data.iter().take(64).flat_map(|b| (0..8).map(move |i| b >> i & 1 == 1)).collect();
    let hist: Vec<Syndrome> = bits.chunks_exact(2).map(|c| Syndrome::from_bits(c[0], c[1])).collect();
    if let [s0, s1, ..] = hist[..] {
        let f = decode_double(s0, s1);
        assert_eq!(f, DecodeTable::double().lookup(&[s0, s1]));
        // a repeated syndrome is decoded as in a single round
        if s0 == s1 {
            assert_eq!(f, decode_single(s0));
        }
    }
    for s in &hist {
        let f = decode_single(*s);
        assert_eq!(f == Feedback::I, s.is_trivial());
    }
    // longer histories are not in the double table and decode to I
    if hist.len() > 2 {
        assert_eq!(DecodeTable::double().lookup(&hist), Feedback::I);
    }
});
