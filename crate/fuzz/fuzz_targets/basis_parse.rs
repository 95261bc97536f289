#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_srg::specfile::{parse_basis, rows_to_subspace};
use polar_srg::Field;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = parse_basis(text) else { return };
    let field = Field::with_order(4).unwrap();
    if let Some(n) = rows.first().map(Vec::len) {
        if n <= 16 && rows.len() <= 16 {
            let _ = rows_to_subspace(&field, n, &rows);
        }
    }
});
