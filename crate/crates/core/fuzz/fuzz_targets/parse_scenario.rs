#![no_main]

use libfuzzer_sys::fuzz_target;
use robofoil_core::wire::{scenario_from_json, scenario_to_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = scenario_from_json(data) {
        let text = scenario_to_json(&s);
        assert_eq!(scenario_from_json(text.as_bytes()).expect("serialized scenario parses"), s);
    }
});
