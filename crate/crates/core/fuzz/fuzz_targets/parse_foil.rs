#![no_main]

use libfuzzer_sys::fuzz_target;
use robofoil_core::fixtures::{model_error, ModelError};
use robofoil_core::foil::build_foil;
use robofoil_core::planner::solve;
use robofoil_core::wire::foil_from_json;

fuzz_target!(|data: &[u8]| {
    let d = model_error(ModelError::SpeedError);
    if let Ok(q) = foil_from_json(&d, data) {
        let s = solve(&d).expect("fixture solves");
        build_foil(&d, &s, &q).expect("parsed foils reference known robots and tasks");
    }
});
