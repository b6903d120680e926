#![no_main]

use circint::deployment::Deployment;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(dep) = Deployment::from_text(text) {
        let again = Deployment::from_text(&dep.to_text().unwrap()).expect("written deployment parses");
        assert_eq!(again.stations(), dep.stations());
    }
});
