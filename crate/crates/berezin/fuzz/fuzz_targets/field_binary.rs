#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(artifact) = berezin::FieldArtifact::from_binary(data) {
        let again = artifact.to_binary();
        let _ = berezin::FieldArtifact::from_binary(&again).expect("round trip parses");
    }
});
