//! Witness files: exact rational parsing must never panic or divide by zero,
//! and resolved witnesses feed straight into verification.

#![no_main]

use libfuzzer_sys::fuzz_target;
use std::sync::OnceLock;

use popmatch::instance::{Instance, Matching};

fn fixture() -> &'static (Instance, Matching) {
    static FIXTURE: OnceLock<(Instance, Matching)> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let inst = popmatch::io::parse_instance(
            "popmatch v1 roommates\nnode d0\nnode d1\nnode d2\nnode d3\n\
             pref d0: d1 d2 d3\npref d1: d2 d3 d0\npref d2: d3 d1 d0\npref d3: d1 d2 d0\n",
        )
        .expect("fixed instance");
        let m = Matching::from_names(&inst, &[("d0", "d1"), ("d2", "d3")]).expect("matching");
        (inst, m)
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = popmatch::io::parse_witness_file(text) {
        let (inst, m) = fixture();
        if let Ok(w) = popmatch::io::resolve_witness(inst, &map) {
            let _ = popmatch::verify::verify_witness(inst, m, &w);
        }
    }
});
