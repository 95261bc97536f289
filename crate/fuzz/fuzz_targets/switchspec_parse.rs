#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_srg::specfile::parse_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(syntax) = parse_spec(text) else { return };
    // resolving builds the geometry, so only try small spaces
    if syntax.q <= 4 && syntax.d <= 3 {
        if let Ok(ctx) = syntax.context() {
            let _ = syntax.to_spec(&ctx);
        }
    }
});
