#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_srg::Graph;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = Graph::from_dimacs(text) {
        assert_eq!(Graph::from_dimacs(&g.to_dimacs()).expect("round trip"), g);
    }
});
