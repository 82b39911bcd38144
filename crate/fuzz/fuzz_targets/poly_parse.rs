#![no_main]

use libfuzzer_sys::fuzz_target;
use zhelo_core::poly::Poly;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = s.parse::<Poly>() {
        let text = p.to_string();
        let back = Poly::parse(&text, p.nvars()).expect("display output parses");
        assert_eq!(back, p);
    }
    let _ = Poly::parse(s, 4);
});
