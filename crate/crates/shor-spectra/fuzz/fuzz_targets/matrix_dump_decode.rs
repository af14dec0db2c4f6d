#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // must reject or decode without panicking or over-allocating
    let _ = shor_spectra::io::decode_matrix_dump(data);
});
