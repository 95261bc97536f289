#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_srg::Graph;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = Graph::from_graph6(data) {
        let bytes = g.to_graph6().expect("decoded graphs re-encode");
        assert_eq!(Graph::from_graph6(&bytes).expect("round trip"), g);
    }
});
