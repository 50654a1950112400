#![no_main]

use libfuzzer_sys::fuzz_target;
use qforge_core::{emit_qp, parse_qp};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(program) = parse_qp(text) else { return };
    // anything accepted must re-emit and decode to the same program
    let emitted = emit_qp(&program).expect("parsed program emits");
    assert_eq!(parse_qp(&emitted).expect("emitted text parses"), program);
});
