#![no_main]

use libfuzzer_sys::fuzz_target;
use robofoil_core::fixtures::emergency_response;
use robofoil_core::scenario::apply_repair;
use robofoil_core::wire::edit_from_json;

fuzz_target!(|data: &[u8]| {
    let d = emergency_response(0);
    if let Ok(edit) = edit_from_json(&d, data) {
        let _ = apply_repair(&d, edit);
    }
});
