//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line followed by
//! indented details. The process fails if any criterion fails other than in
//! the way recorded in `KNOWN_FAILURES`, so a regression and a silently
//! "fixed" known failure are both caught.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zhelo_core::bgg::bgg_apply;
use zhelo_core::chevalley::verify_identities;
use zhelo_core::context::Context;
use zhelo_core::monoid::{
    check_pmap, check_recurrences, propagate_p, MonoidGraph, MonoidWord, Normalization,
};
use zhelo_core::poly::{Monomial, Poly};
use zhelo_core::rational::{frac, rat};
use zhelo_core::upoly::{RatFunc, UPoly};
use zhelo_core::verify::{
    adjust_and_check_eq24, check_analogue_kostant, check_level_ranks, check_symmetric_kostant,
};
use zhelo_core::zhelobenko::check_invariant;

const ALL: [&str; 12] = [
    "A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "F4", "G2",
];

/// Criteria expected to fail, with the reason printed alongside.
const KNOWN_FAILURES: [(u32, &str); 1] = [(
    7,
    "the sum recurrence with raw Chevalley constants fails in non-simply-laced types; \
     it holds once each constant N_{x,y} is weighted by |y|^2/|x+y|^2",
)];

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

fn ctx(tag: &str) -> Context {
    Context::from_tag(tag).expect("known type")
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: u32) -> Poly {
    let mut p = Poly::zero(n);
    for _ in 0..rng.gen_range(1..=6) {
        let d = rng.gen_range(0..=max_deg);
        let mut exps = vec![0u16; n];
        for _ in 0..d {
            exps[rng.gen_range(0..n)] += 1;
        }
        p.add_term(
            Monomial::from_exps(&exps),
            frac(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
        );
    }
    p
}

fn criterion_1() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for tag in ALL {
        let c = ctx(tag);
        let a = &c.rd.datum.cartan;
        let n = c.rd.rank();
        let w1 = c.rd.longest_word(false);
        let w2 = c.rd.longest_word(true);
        let mut bad = 0;
        for _ in 0..50 {
            let f = random_poly(&mut rng, n, 6);
            let g = random_poly(&mut rng, n, 3);
            for i in 0..n {
                if !bgg_apply(a, i, &bgg_apply(a, i, &f)).is_zero() {
                    bad += 1;
                }
                let lhs = bgg_apply(a, i, &(&f * &g));
                let rhs = &(&bgg_apply(a, i, &f) * &g)
                    + &(&f.reflect_simple(a, i) * &bgg_apply(a, i, &g));
                if lhs != rhs {
                    bad += 1;
                }
            }
            let apply = |w: &[usize]| {
                w.iter()
                    .rev()
                    .fold(f.clone(), |acc, &i| bgg_apply(a, i, &acc))
            };
            if apply(&w1) != apply(&w2) {
                bad += 1;
            }
        }
        pass &= bad == 0 && w1 != w2 || n == 1 && bad == 0;
        details.push(format!(
            "{tag}: {bad} violations over 50 samples (longest words {w1:?} / {w2:?})"
        ));
    }
    Outcome { pass, details }
}

fn criterion_2() -> Outcome {
    let expected: [&[usize]; 12] = [
        &[1],
        &[1, 2],
        &[1, 2, 3],
        &[1, 2, 3, 4],
        &[1, 3],
        &[1, 3, 5],
        &[1, 3, 5, 7],
        &[1, 3, 5],
        &[1, 3, 5, 7],
        &[1, 3, 3, 5],
        &[1, 5, 7, 11],
        &[1, 5],
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (tag, want) in ALL.iter().zip(expected) {
        let c = ctx(tag);
        let exps = c.rd.exponents();
        let degrees: Vec<usize> = c
            .invariants()
            .unwrap()
            .iter()
            .map(|q| q.degree().unwrap() as usize - 1)
            .collect();
        let ok = exps == want && degrees == want;
        pass &= ok;
        details.push(format!(
            "{tag}: exponents {exps:?}, invariant degrees - 1 {degrees:?}"
        ));
    }
    Outcome { pass, details }
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for tag in ALL {
        let t = Instant::now();
        let c = ctx(tag);
        let gens = c.generators().unwrap();
        let exps = c.rd.exponents();
        let degrees: Vec<usize> = gens
            .iter()
            .map(|g| {
                g.invariant
                    .big_p
                    .iter()
                    .filter_map(Poly::degree)
                    .max()
                    .unwrap_or(0) as usize
            })
            .collect();
        let want: Vec<usize> = exps.iter().map(|m| m - 1).collect();
        let invariant = gens.iter().all(|g| {
            check_invariant(&c.rd.datum, &g.invariant.q)
                .map(|r| r.invariant())
                .unwrap_or(false)
        });
        let ok = gens.len() == c.rd.rank() && degrees == want && invariant;
        pass &= ok;
        details.push(format!(
            "{tag}: {} generators, P degrees {degrees:?}, all fixed by every xi_i: {invariant} ({:.1?})",
            gens.len(),
            t.elapsed()
        ));
    }
    Outcome { pass, details }
}

fn word(s: &str) -> MonoidWord {
    let (letters, g) = s.trim_end_matches(')').split_once('(').unwrap();
    MonoidWord {
        letters: letters
            .chars()
            .map(|c| c.to_digit(10).unwrap() as usize - 1)
            .collect(),
        generator: g.parse::<usize>().unwrap() - 1,
    }
}

/// Each listed group of words must name one vertex of the given length, and
/// the groups must exhaust that level.
fn matches_listing(g: &MonoidGraph, listing: &[(usize, Vec<Vec<&str>>)]) -> bool {
    listing.iter().all(|(len, groups)| {
        let mut seen = BTreeSet::new();
        let located = groups.iter().all(|group| {
            let vs: BTreeSet<Option<usize>> = group.iter().map(|w| g.locate(&word(w))).collect();
            match vs.into_iter().collect::<Vec<_>>().as_slice() {
                [Some(v)] => g.vertices[*v].length == *len && seen.insert(*v),
                _ => false,
            }
        });
        located && g.levels[len - 1].len() == groups.len()
    })
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let f4 = ctx("F4");
    let g = f4.monoid().unwrap();
    let terminal = g.terminal_vertices();
    let top_ok =
        terminal.len() == 1 && g.vertices[terminal[0]].length == 11 && g.levels[10].len() == 1;
    let ok = g.len() == 42 && g.level_counts() == [4, 4, 5, 6, 5, 4, 4, 4, 3, 2, 1] && top_ok;
    pass &= ok;
    details.push(format!(
        "F4: {} elements, levels {:?}, unique killed maximal element: {top_ok}",
        g.len(),
        g.level_counts()
    ));
    let b3 = ctx("B3");
    let gb = b3.monoid().unwrap();
    let listing = vec![
        (5, vec![vec!["1232(1)"]]),
        (4, vec![vec!["123(2)"], vec!["232(1)"]]),
        (3, vec![vec!["12(3)"], vec!["23(2)"], vec!["32(1)"]]),
        (2, vec![vec!["1(2)", "2(1)"], vec!["2(3)"], vec!["3(2)"]]),
        (1, vec![vec!["(1)"], vec!["(2)"], vec!["(3)"]]),
    ];
    let b3_ok = matches_listing(gb, &listing) && gb.levels.len() == 5;
    pass &= b3_ok;
    details.push(format!(
        "B3: listing matched word by word: {b3_ok} ({} elements)",
        gb.len()
    ));
    for (tag, want) in [
        ("A4", vec![4, 3, 2, 1]),
        ("D4", vec![4, 3, 3, 1, 1]),
        ("B4", vec![4, 4, 4, 4, 3, 2, 1]),
        ("C4", vec![4, 4, 4, 4, 3, 2, 1]),
    ] {
        let counts = ctx(tag).monoid().unwrap().level_counts();
        pass &= counts == want;
        details.push(format!("{tag}: levels {counts:?}"));
    }
    Outcome { pass, details }
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for tag in ["A1", "A2", "A3", "A4", "B3", "B4", "C3", "C4", "D4", "F4"] {
        let c = ctx(tag);
        let g = c.monoid().unwrap();
        let map = c.pmap().unwrap();
        let report = check_pmap(&c.rd, g, map).unwrap();
        let lengths_ok =
            c.rd.positive_coroots()
                .iter()
                .zip(&map.vertex)
                .all(|(gamma, &v)| g.vertices[v].length as i64 == c.rd.rho_pairing(gamma));
        let ok = report.passed() && lengths_ok;
        pass &= ok;
        details.push(format!(
            "{tag}: injective {}, lengths equal heights {lengths_ok}, transport checked at {} edges with {} failures",
            report.injective,
            report.transport_checked,
            report.transport_failures.len()
        ));
    }
    Outcome { pass, details }
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for tag in ["A1", "A2", "A3", "B2", "B3", "C3", "G2", "F4"] {
        let c = ctx(tag);
        let cb = c.chevalley().unwrap();
        let report = verify_identities(cb);
        let jacobi = if c.rd.rank() <= 3 {
            Some(cb.jacobi_failures().len())
        } else {
            None
        };
        let jacobi_text = jacobi.map_or("not run".into(), |j| j.to_string());
        pass &= jacobi.unwrap_or(0) == 0;
        if c.ty.is_g2() {
            // the identities assume root strings of length at most 3; G2 has
            // strings of length 4, where the lowering identity picks up p + 1
            let kinds: BTreeSet<String> = report
                .failures
                .iter()
                .map(|f| format!("{:?}", f.kind))
                .collect();
            details.push(format!(
                "{tag}: identities not applicable ({} instances differ: {kinds:?}), Jacobi failures {jacobi_text}",
                report.failures.len()
            ));
            continue;
        }
        pass &= report.passed();
        details.push(format!(
            "{tag}: identity failures {}, Jacobi failures {jacobi_text}",
            report.failures.len()
        ));
    }
    Outcome { pass, details }
}

/// Literal verdict, plus the facts the analysis of the failure rests on.
fn criterion_7() -> (Outcome, bool) {
    let mut literal = true;
    let mut analysis = true;
    let mut details = Vec::new();
    for tag in ["A2", "A3", "B3", "C3", "D4", "B4", "C4", "F4"] {
        let t = Instant::now();
        let c = ctx(tag);
        let cb = c.chevalley().unwrap();
        let top = c.generators().unwrap().last().unwrap();
        let mut line = format!("{tag} (m = {}):", top.m);
        for norm in [Normalization::Chevalley, Normalization::LengthWeighted] {
            let full = propagate_p(&c.rd, cb, norm, &top.invariant.big_p);
            let lead = propagate_p(&c.rd, cb, norm, &top.leading);
            let (Ok(full), Ok(lead)) = (full, lead) else {
                line.push_str(&format!(" {norm:?}: paths disagree"));
                literal = false;
                analysis = false;
                continue;
            };
            let r1 = check_recurrences(&c.rd, cb, norm, &full, 1);
            let r0 = check_recurrences(&c.rd, cb, norm, &lead, 0);
            let sum_ok = r1.sum_failures.is_empty() && r0.sum_failures.is_empty();
            let vanish_ok = r1.vanishing_failures.is_empty() && r0.vanishing_failures.is_empty();
            match norm {
                Normalization::Chevalley => {
                    literal &= sum_ok && vanish_ok;
                    // vanishing parts do not involve the constants and must hold
                    analysis &= vanish_ok;
                    analysis &= sum_ok == c.ty.is_simply_laced();
                    line.push_str(&format!(
                        " raw constants: paths agree, vanishing {}, sum {} {:?};",
                        ok(vanish_ok),
                        ok(sum_ok),
                        r1.sum_failures
                    ));
                }
                Normalization::LengthWeighted => {
                    analysis &= sum_ok && vanish_ok;
                    line.push_str(&format!(
                        " weighted constants: paths agree, vanishing {}, sum {}",
                        ok(vanish_ok),
                        ok(sum_ok)
                    ));
                }
            }
        }
        line.push_str(&format!(" ({:.1?})", t.elapsed()));
        details.push(line);
    }
    (
        Outcome {
            pass: literal,
            details,
        },
        analysis,
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for tag in ALL {
        let c = ctx(tag);
        let ranks = check_level_ranks(&c.rd, c.chevalley().unwrap());
        let good = ranks.iter().all(|l| l.rank == l.n_r);
        pass &= good;
        let shown: Vec<String> = ranks
            .iter()
            .map(|l| format!("{}/{}", l.rank, l.n_r))
            .collect();
        details.push(format!(
            "{tag}: rank/n_r by height from 2: {}",
            shown.join(" ")
        ));
    }
    Outcome { pass, details }
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for tag in ALL {
        let t = Instant::now();
        let c = ctx(tag);
        let cb = c.chevalley().unwrap();
        let analogue = check_analogue_kostant(cb, c.generators().unwrap());
        let symmetric = check_symmetric_kostant(&c.rd, cb, c.invariants().unwrap());
        let ok =
            analogue.iter().all(|a| a.invariant.vanishes) && symmetric.iter().all(|s| s.vanishes);
        pass &= ok;
        let powers: Vec<String> = analogue
            .iter()
            .map(|a| {
                format!(
                    "m={}:{}",
                    a.m,
                    a.invariant
                        .minimal_power
                        .map_or("-".into(), |k| k.to_string())
                )
            })
            .collect();
        details.push(format!(
            "{tag}: invariant vectors {}, gradient vectors {}, minimal powers {} ({:.1?})",
            ok_all(analogue.iter().map(|a| a.invariant.vanishes)),
            ok_all(symmetric.iter().map(|s| s.vanishes)),
            powers.join(" "),
            t.elapsed()
        ));
    }
    Outcome { pass, details }
}

fn ok_all(mut it: impl Iterator<Item = bool>) -> &'static str {
    if it.all(|b| b) {
        "vanish"
    } else {
        "DO NOT vanish"
    }
}

/// `Π_{r=2}^{m} (1 + sr) / (sr)`, built independently of the descent.
fn expected_ratio(m: i64) -> RatFunc {
    (2..=m).fold(RatFunc::one(), |acc, r| {
        acc.mul(&RatFunc::new(
            UPoly::from_coeffs(vec![rat(1), rat(r)]),
            UPoly::from_coeffs(vec![rat(0), rat(r)]),
        ))
    })
}

fn criterion_10() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (tag, m) in [("B3", 5), ("A3", 3), ("C4", 7), ("F4", 11), ("D4", 5)] {
        let c = ctx(tag);
        let gens = c.generators().unwrap();
        let (full, lead) = c.tables().unwrap();
        let k = gens.iter().position(|g| g.m == m).unwrap();
        let adj = adjust_and_check_eq24(gens, full, lead, k).unwrap();
        let ratio_ok = adj.ratio == expected_ratio(m as i64).to_string();
        let ok = adj.passed() && ratio_ok;
        pass &= ok;
        let adjusted: Vec<String> = adj
            .levels
            .iter()
            .filter(|l| l.kernel_dim > 0)
            .map(|l| format!("r={}", l.r))
            .collect();
        details.push(format!(
            "{tag} m = {m}: every level holds {}, corrections at {}, ratio {} matches the product: {ratio_ok}",
            adj.passed(),
            adjusted.join(","),
            adj.ratio
        ));
    }
    Outcome { pass, details }
}

fn report(n: u32, title: &str, o: &Outcome) {
    println!(
        "[{}] criterion {n}: {title}",
        if o.pass { "PASS" } else { "FAIL" }
    );
    for d in &o.details {
        println!("    {d}");
    }
}

fn main() {
    let start = Instant::now();
    let mut unexpected = Vec::new();
    let mut record = |n: u32, title: &str, o: Outcome| {
        report(n, title, &o);
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == n);
        match (o.pass, known) {
            (true, None) | (false, Some(_)) => {}
            (false, None) => unexpected.push(format!("criterion {n} failed")),
            (true, Some(_)) => {
                unexpected.push(format!("criterion {n} passed but is recorded as failing"))
            }
        }
        if let (false, Some((_, why))) = (o.pass, known) {
            println!("    known failure: {why}");
        }
    };
    let t = Instant::now();
    record(1, "BGG laws on random polynomials", criterion_1());
    println!("    time {:.1?}", t.elapsed());
    record(
        2,
        "exponents as dual partition and invariant degrees",
        criterion_2(),
    );
    record(3, "Zhelobenko generators and xi-invariance", criterion_3());
    record(4, "monoid census", criterion_4());
    record(5, "coroot map into the monoid", criterion_5());
    record(6, "structure constant identities and Jacobi", criterion_6());
    let (c7, analysis_holds) = criterion_7();
    record(
        7,
        "coroot recurrences, divisibility and path independence",
        c7,
    );
    record(8, "level map ranks", criterion_8());
    record(
        9,
        "nilpotency of invariant and gradient vectors along s*rho",
        criterion_9(),
    );
    record(10, "ratio descent", criterion_10());
    println!("acceptance finished in {:.1?}", start.elapsed());
    if !analysis_holds {
        unexpected.push("criterion 7: weighted recurrences or vanishing parts failed".into());
    }
    if !unexpected.is_empty() {
        for u in &unexpected {
            eprintln!("unexpected: {u}");
        }
        std::process::exit(1);
    }
}
