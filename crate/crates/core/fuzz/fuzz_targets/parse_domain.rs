#![no_main]

use libfuzzer_sys::fuzz_target;
use robofoil_core::wire::{domain_from_json, domain_to_json, load_domain};

fuzz_target!(|data: &[u8]| {
    if let Ok(d) = domain_from_json(data) {
        let again = domain_from_json(domain_to_json(&d).as_bytes()).expect("serialized domain parses");
        assert_eq!(domain_to_json(&again), domain_to_json(&d));
    }
    let _ = load_domain(data);
});
