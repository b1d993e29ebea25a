//! Tree decomposition files: parsing and validation against a fixed instance
//! must never panic; anything accepted must be a valid decomposition.

#![no_main]

use libfuzzer_sys::fuzz_target;
use std::sync::OnceLock;

use popmatch::instance::Instance;

fn fixed_instance() -> &'static Instance {
    static INSTANCE: OnceLock<Instance> = OnceLock::new();
    INSTANCE.get_or_init(|| {
        popmatch::io::parse_instance(
            "popmatch v1 roommates\nnode a\nnode b\nnode c\nnode d\nnode e\n\
             pref a: b\npref b: a c\npref c: b d\npref d: c e\npref e: d\n",
        )
        .expect("fixed instance")
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let inst = fixed_instance();
    if let Ok(td) = popmatch::io::parse_td_file(text, inst) {
        // Accepted decompositions can be rooted and split without panicking.
        let d = popmatch::treewidth::make_dichotomic(&td);
        assert!(d.predecessors.iter().all(|p| p.len() <= 2));
    }
});
