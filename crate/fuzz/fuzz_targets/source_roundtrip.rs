#![no_main]

use libfuzzer_sys::fuzz_target;
use qforge_core::{parse_source, print_source};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(circuit) = parse_source(text) else {
        return;
    };
    let printed = print_source(&circuit);
    let reparsed = parse_source(&printed).expect("printed source parses");
    assert_eq!(reparsed, circuit);
    assert_eq!(print_source(&reparsed), printed);
});
