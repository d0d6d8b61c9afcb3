#![no_main]

use libfuzzer_sys::fuzz_target;
use robofoil_core::fixtures::{model_error, ModelError};
use robofoil_core::foil::check_feasibility;
use robofoil_core::wire::{solution_from_json, solution_to_json};

fuzz_target!(|data: &[u8]| {
    let d = model_error(ModelError::SpeedError);
    if let Ok(s) = solution_from_json(&d, data) {
        let text = solution_to_json(&d, &s);
        assert_eq!(solution_from_json(&d, text.as_bytes()).expect("serialized solution parses"), s);
        let _ = check_feasibility(&d, &s);
    }
});
