//! Replays the fuzz corpus seeds through the same assertions as the fuzz
//! targets, so the seeds are exercised without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

use zhelo_core::poly::Poly;
use zhelo_core::rootsys::{CartanType, RootData};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .filter_map(|b| String::from_utf8(b).ok())
        .collect();
    out.sort();
    out
}

#[test]
fn type_tag_seeds() {
    let seeds = seeds("type_tag");
    assert!(!seeds.is_empty());
    let mut accepted = 0;
    for s in &seeds {
        if let Ok(t) = s.parse::<CartanType>() {
            accepted += 1;
            assert_eq!(t.to_string().parse::<CartanType>().unwrap(), t);
            if t.rank <= 6 {
                assert_eq!(RootData::from_type(t).rank(), t.rank);
            }
        }
    }
    assert!(accepted > 0 && accepted < seeds.len());
}

#[test]
fn poly_parse_seeds() {
    let seeds = seeds("poly_parse");
    assert!(!seeds.is_empty());
    for s in &seeds {
        if let Ok(p) = s.parse::<Poly>() {
            assert_eq!(
                Poly::parse(&p.to_string(), p.nvars()).unwrap(),
                p,
                "seed {s:?}"
            );
        }
        let _ = Poly::parse(s, 4);
    }
}
