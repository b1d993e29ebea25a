//! Instance files are untrusted input; parsing must never panic, and
//! anything that parses must satisfy the instance invariants well enough to
//! round-trip through the canonical writer.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(inst) = popmatch::io::parse_instance(text) {
        let canonical = popmatch::io::write_instance(&inst);
        let reparsed = popmatch::io::parse_instance(&canonical)
            .expect("canonical instance output must reparse");
        assert_eq!(popmatch::io::write_instance(&reparsed), canonical);
    }
});
