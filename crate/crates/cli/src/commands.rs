use std::fmt::Write as _;

use serde_json::{json, Value};
use zhelo_core::context::Context;
use zhelo_core::error::Result;
use zhelo_core::monoid::{census, export_dot};
use zhelo_core::verify::{verify_type, VerifyReport};

use crate::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Roots,
    Exponents,
    Invariants,
    Monoid,
    Verify,
}

pub fn check_format(kind: Kind, format: Format) -> std::result::Result<(), String> {
    if format == Format::Dot && kind != Kind::Monoid {
        return Err("--format dot is only available for the monoid command".into());
    }
    Ok(())
}

/// Rendered output for one type.
pub struct Outcome {
    pub tag: String,
    pub text: Option<String>,
    pub json: Option<Value>,
    pub passed: bool,
    pub error: Option<String>,
}

pub fn run(kind: Kind, ctx: &Context, format: Format) -> Outcome {
    let tag = ctx.ty.to_string();
    let result = match kind {
        Kind::Roots => roots(ctx, format),
        Kind::Exponents => exponents(ctx, format),
        Kind::Invariants => invariants(ctx, format),
        Kind::Monoid => monoid(ctx, format),
        Kind::Verify => verify(ctx, format),
    };
    match result {
        Ok((rendered, passed)) => {
            let (text, json) = match rendered {
                Rendered::Text(t) => (Some(t), None),
                Rendered::Json(v) => (None, Some(v)),
            };
            Outcome {
                tag,
                text,
                json,
                passed,
                error: None,
            }
        }
        Err(e) => Outcome {
            tag,
            text: None,
            json: None,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

/// One JSON value per type, or an array for several; text blocks are
/// concatenated.
pub fn join(format: Format, outcomes: &[Outcome]) -> String {
    if format == Format::Json {
        let values: Vec<&Value> = outcomes.iter().filter_map(|o| o.json.as_ref()).collect();
        let doc = match values.as_slice() {
            [single] => (*single).clone(),
            many => Value::Array(many.iter().map(|v| (*v).clone()).collect()),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("values serialize");
        s.push('\n');
        s
    } else {
        outcomes
            .iter()
            .filter_map(|o| o.text.as_deref())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

enum Rendered {
    Text(String),
    Json(Value),
}

fn coords(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn roots(ctx: &Context, format: Format) -> Result<(Rendered, bool)> {
    let rd = &ctx.rd;
    let cartan = &rd.datum.cartan;
    let positive_roots = rd.roots.positive();
    let positive_coroots = rd.positive_coroots();
    if format == Format::Json {
        let v = json!({
            "type": ctx.ty.to_string(),
            "rank": rd.rank(),
            "cartan": cartan,
            "weyl_order": rd.weyl_order(),
            "positive_roots": positive_roots,
            "positive_coroots": positive_coroots,
            "highest_coroot": rd.highest_coroot(),
            "coroot_height_counts": rd.coroot_height_counts(),
        });
        return Ok((Rendered::Json(v), true));
    }
    let mut s = String::new();
    let _ = writeln!(s, "type {} (rank {})", ctx.ty, rd.rank());
    let _ = writeln!(s, "cartan matrix (row i holds alpha_j(h_i)):");
    for row in cartan {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>3}")).collect();
        let _ = writeln!(s, "  {}", cells.join(""));
    }
    let _ = writeln!(s, "weyl group order: {}", rd.weyl_order());
    for (name, list) in [
        ("positive roots", positive_roots),
        ("positive coroots", positive_coroots),
    ] {
        let _ = writeln!(s, "{name} ({}):", list.len());
        let top = list
            .iter()
            .map(|v| v.iter().sum::<i64>())
            .max()
            .unwrap_or(0);
        for h in 1..=top {
            let at: Vec<String> = list
                .iter()
                .filter(|v| v.iter().sum::<i64>() == h)
                .map(|v| coords(v))
                .collect();
            let _ = writeln!(s, "  height {h}: {}", at.join(" "));
        }
    }
    let _ = writeln!(s, "highest coroot: {}", coords(rd.highest_coroot()));
    Ok((Rendered::Text(s), true))
}

fn list(xs: &[usize]) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn exponents(ctx: &Context, format: Format) -> Result<(Rendered, bool)> {
    let exps = ctx.rd.exponents();
    let counts = ctx.rd.coroot_height_counts();
    let degrees: Vec<usize> = ctx
        .invariants()?
        .iter()
        .map(|q| q.degree().unwrap_or(0) as usize)
        .collect();
    let pass = degrees.iter().map(|d| d - 1).eq(exps.iter().copied());
    if format == Format::Json {
        let v = json!({
            "type": ctx.ty.to_string(),
            "exponents": exps,
            "coroot_height_counts": counts,
            "invariant_degrees": degrees,
            "consistent": pass,
        });
        return Ok((Rendered::Json(v), pass));
    }
    let mut s = String::new();
    let _ = writeln!(s, "type {}", ctx.ty);
    let _ = writeln!(s, "exponents: {}", list(&exps));
    let _ = writeln!(s, "coroots per height: {}", list(&counts));
    let _ = writeln!(s, "invariant degrees: {}", list(&degrees));
    let _ = writeln!(
        s,
        "degrees minus one match exponents: {}",
        if pass { "yes" } else { "no" }
    );
    Ok((Rendered::Text(s), pass))
}

fn invariants(ctx: &Context, format: Format) -> Result<(Rendered, bool)> {
    let tag = ctx.ty.to_string();
    let generators = ctx.generators()?;
    if format == Format::Json {
        let v = serde_json::to_value(
            generators
                .iter()
                .map(|g| g.export(&tag))
                .collect::<Vec<_>>(),
        )
        .expect("exports serialize");
        return Ok((Rendered::Json(v), true));
    }
    let mut s = String::new();
    let _ = writeln!(s, "type {tag}");
    for (k, q) in ctx.invariants()?.iter().enumerate() {
        let _ = writeln!(
            s,
            "invariant {} (degree {}): {q}",
            k + 1,
            q.degree().unwrap_or(0)
        );
    }
    for g in generators {
        let _ = writeln!(s, "generator m = {} (from invariant {})", g.m, g.source + 1);
        for (i, (q, p)) in g.invariant.q.0.iter().zip(&g.invariant.big_p).enumerate() {
            let _ = writeln!(s, "  q_{} = {q}", i + 1);
            let _ = writeln!(s, "  P_{} = {p}", i + 1);
        }
    }
    Ok((Rendered::Text(s), true))
}

fn monoid(ctx: &Context, format: Format) -> Result<(Rendered, bool)> {
    let graph = ctx.monoid()?;
    // the coroot map is undefined in type G2; the graph is still drawn
    let map = if ctx.ty.is_g2() {
        None
    } else {
        Some(ctx.pmap()?)
    };
    match format {
        Format::Dot => Ok((Rendered::Text(export_dot(graph, map)), true)),
        Format::Json => Ok((
            Rendered::Json(serde_json::to_value(census(graph, map)).expect("census serializes")),
            true,
        )),
        Format::Text => {
            let c = census(graph, map);
            let mut s = String::new();
            let _ = writeln!(
                s,
                "type {}: {} elements, levels {}",
                c.ty,
                c.vertices.len(),
                list(&c.levels)
            );
            for (k, _) in c.levels.iter().enumerate() {
                let words: Vec<String> = c
                    .vertices
                    .iter()
                    .filter(|v| v.length == k + 1)
                    .map(|v| {
                        if v.in_p_image {
                            format!("{}*", v.witness)
                        } else {
                            v.witness.clone()
                        }
                    })
                    .collect();
                let _ = writeln!(s, "  length {}: {}", k + 1, words.join(" "));
            }
            if map.is_some() {
                let _ = writeln!(s, "  (* marks images of positive coroots)");
            }
            Ok((Rendered::Text(s), true))
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn opt_verdict(v: Option<bool>) -> &'static str {
    v.map_or("n/a", verdict)
}

fn render_report(r: &VerifyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "type {}: {}",
        r.ty,
        if r.passed() {
            "all checks pass"
        } else {
            "FAILED"
        }
    );
    let _ = writeln!(
        s,
        "  exponents {} (invariant degrees - 1: {}): {}",
        list(&r.exponent_check.exponents),
        list(&r.exponent_check.invariant_degrees_minus_one),
        verdict(r.exponent_check.pass)
    );
    let _ = writeln!(s, "  monoid levels: {}", list(&r.monoid_census));
    for n in &r.symmetric {
        let power = n.minimal_power.map_or("none".into(), |k| k.to_string());
        let _ = writeln!(
            s,
            "  gradient m = {}: power {} kills it (minimal {power}): {}",
            n.m,
            n.m + 1,
            verdict(n.vanishes)
        );
    }
    for g in &r.generators {
        let power = g.minimal_power.map_or("none".into(), |k| k.to_string());
        let _ = writeln!(
            s,
            "  generator m = {}: nilpotency {} (minimal power {power}), leading {}, shifted {}, descent {}, recurrences {}",
            g.m,
            verdict(g.theorem85),
            verdict(g.leading),
            verdict(g.shifted),
            opt_verdict(g.eq24),
            opt_verdict(g.recurrences),
        );
        if let Some(ratio) = &g.eq24_ratio {
            let _ = writeln!(s, "    descent ratio: {ratio}");
        }
        if let Some(f) = &g.chevalley_sum_failures {
            if !f.is_empty() {
                let at: Vec<String> = f.iter().map(|v| coords(v)).collect();
                let _ = writeln!(
                    s,
                    "    note: with raw Chevalley constants the sum recurrence fails at {}",
                    at.join(" ")
                );
            }
        }
    }
    let ranks_ok = r.level_ranks.iter().all(|l| l.rank == l.n_r);
    let _ = writeln!(s, "  level map ranks equal n_r: {}", verdict(ranks_ok));
    let counting_ok = r.counting.iter().all(|c| c.passed());
    let _ = writeln!(
        s,
        "  generator counts equal n_(r-1) - n_r: {}",
        verdict(counting_ok)
    );
    for f in r.failures() {
        let _ = writeln!(s, "  failed: {f}");
    }
    s
}

fn verify(ctx: &Context, format: Format) -> Result<(Rendered, bool)> {
    let report = verify_type(ctx)?;
    let passed = report.passed();
    if format == Format::Json {
        return Ok((
            Rendered::Json(serde_json::to_value(&report).expect("report serializes")),
            passed,
        ));
    }
    Ok((Rendered::Text(render_report(&report)), passed))
}
