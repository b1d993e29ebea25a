//! Formula files: the DIMACS-style parser must never panic, and parsed
//! formulas must satisfy the positive-3-CNF invariants the generators rely
//! on (three distinct in-range positive literals per clause).

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(phi) = popmatch::gadgets::parse_cnf(text) {
        for clause in &phi.clauses {
            assert!(clause.iter().all(|&v| v >= 1 && v <= phi.num_vars));
            assert!(clause[0] != clause[1] && clause[0] != clause[2] && clause[1] != clause[2]);
        }
        // Small parsed formulas must build into valid gadget instances.
        if phi.num_vars <= 6 && phi.clauses.len() <= 2 {
            let _ = popmatch::gadgets::build_gadget(&phi, popmatch::gadgets::GadgetVariant::G);
        }
    }
});
