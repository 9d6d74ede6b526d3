#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(artifact) = berezin::FieldArtifact::from_csv(s) {
            // accepted inputs must survive a write/read round trip
            let again = artifact.to_csv().expect("parsed artifact re-serializes");
            let _ = berezin::FieldArtifact::from_csv(&again).expect("round trip parses");
        }
    }
});
