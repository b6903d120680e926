#![no_main]

use circint::gamma::{format_term_set, parse_term_set};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(terms) = parse_term_set(text) {
        // Anything accepted must survive a text round trip unchanged.
        let again = parse_term_set(&format_term_set(&terms)).expect("formatted set parses");
        assert_eq!(again, terms);
    }
});
