//! Matching files: the line parser must never panic, and resolution against
//! a fixed instance must reject anything that is not a matching of it.

#![no_main]

use libfuzzer_sys::fuzz_target;
use std::sync::OnceLock;

use popmatch::instance::Instance;

fn fixed_instance() -> &'static Instance {
    static INSTANCE: OnceLock<Instance> = OnceLock::new();
    INSTANCE.get_or_init(|| {
        popmatch::io::parse_instance(
            "popmatch v1 roommates\nnode d0\nnode d1\nnode d2\nnode d3\n\
             pref d0: d1 d2 d3\npref d1: d2 d3 d0\npref d2: d3 d1 d0\npref d3: d1 d2 d0\n",
        )
        .expect("fixed instance")
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(pairs) = popmatch::io::parse_matching_file(text) {
        if let Ok(m) = popmatch::io::resolve_matching(fixed_instance(), &pairs) {
            // Resolved matchings satisfy the matching invariants.
            let inst = fixed_instance();
            for &(u, v) in m.edges() {
                assert!(inst.is_edge(u, v));
            }
        }
    }
});
