#![no_main]

use circint::circular::CircularScenario;
use libfuzzer_sys::fuzz_target;

// First byte picks the decoder, the rest is the document.
fuzz_target!(|data: &[u8]| {
    let Some((&which, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let parsed = if which & 1 == 0 { CircularScenario::from_toml(text) } else { CircularScenario::from_json(text) };
    if let Ok(s) = parsed {
        assert_eq!(CircularScenario::from_json(&s.to_json().unwrap()).unwrap(), s);
        let _ = s.interferers();
    }
});
