#![no_main]

use libfuzzer_sys::fuzz_target;
use zhelo_core::rootsys::{CartanType, RootData};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = s.parse::<CartanType>() {
        let again: CartanType = t.to_string().parse().expect("display output parses");
        assert_eq!(again, t);
        // building the root data is cheap for small ranks and must not panic
        if t.rank <= 6 {
            let rd = RootData::from_type(t);
            assert_eq!(rd.rank(), t.rank);
        }
    }
});
