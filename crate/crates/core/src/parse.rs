//! Weight DSL parser.
//!
//! Grammar accepted by `--weight` and the library API:
//!
//! ```text
//! std:alpha=<a>[,norm]
//! exp:c=<c>,gamma=<g>
//! logpow:a=<a>,b=<b>
//! osc:base=<spec>,amp=<a>,period=<T>
//! table:<path.csv>                  two columns r,value; header optional
//! derived:<kind>:<params>:base=<spec>
//!   kinds: tailshift:beta=<b> | powershift:beta=<b> | dualw:p=<p>
//!        | tailprod (no params) | hconv:p=<p>
//! ```
//!
//! `base=` always consumes the remainder of its segment, so nested specs keep
//! their own commas and colons; for `osc`, `amp=` and `period=` are split off
//! from the right first.

use crate::error::{Error, Result};
use crate::weight::{DerivedKind, RadialWeight, Tabulated, WeightKind};

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn parse_num(s: &str, pos: usize, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| err(pos, format!("expected a number for {what}, got `{s}`")))
}

/// Parse key=value out of a comma-separated parameter list.
fn take_kv<'a>(params: &'a str, key: &str, base_pos: usize) -> Result<(&'a str, usize)> {
    for (off, part) in split_with_offsets(params, ',') {
        if let Some(v) = part.strip_prefix(key) {
            if let Some(v) = v.strip_prefix('=') {
                return Ok((v, base_pos + off));
            }
        }
    }
    Err(err(
        base_pos,
        format!("missing `{key}=` parameter in `{params}`"),
    ))
}

fn split_with_offsets(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == sep {
            out.push((start, &s[start..i]));
            start = i + 1;
        }
    }
    out.push((start, &s[start..]));
    out
}

pub fn parse_weight(spec: &str) -> Result<RadialWeight> {
    let spec = spec.trim();
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| err(0, "expected `<kind>:<params>`"))?;
    let body_pos = head.len() + 1;
    let kind = match head {
        "std" => {
            let mut alpha = None;
            let mut normalized = false;
            for (off, part) in split_with_offsets(rest, ',') {
                let part = part.trim();
                if part == "norm" {
                    normalized = true;
                } else if let Some(v) = part.strip_prefix("alpha=") {
                    alpha = Some(parse_num(v, body_pos + off, "alpha")?);
                } else {
                    return Err(err(
                        body_pos + off,
                        format!("unknown std parameter `{part}`"),
                    ));
                }
            }
            let alpha = alpha.ok_or_else(|| err(body_pos, "std requires alpha="))?;
            WeightKind::Standard { alpha, normalized }
        }
        "exp" => {
            let (c, p1) = take_kv(rest, "c", body_pos)?;
            let (g, p2) = take_kv(rest, "gamma", body_pos)?;
            WeightKind::Exponential {
                c: parse_num(c, p1, "c")?,
                gamma: parse_num(g, p2, "gamma")?,
            }
        }
        "logpow" => {
            let (a, p1) = take_kv(rest, "a", body_pos)?;
            let (b, p2) = take_kv(rest, "b", body_pos)?;
            WeightKind::LogPower {
                a: parse_num(a, p1, "a")?,
                b: parse_num(b, p2, "b")?,
            }
        }
        "osc" => {
            // strip ,period= and ,amp= from the right; base= keeps the rest
            let (rest2, period_str) = rest
                .rsplit_once(",period=")
                .ok_or_else(|| err(body_pos, "osc requires `,period=`"))?;
            let (rest3, amp_str) = rest2
                .rsplit_once(",amp=")
                .ok_or_else(|| err(body_pos, "osc requires `,amp=`"))?;
            let base_spec = rest3
                .strip_prefix("base=")
                .ok_or_else(|| err(body_pos, "osc requires `base=<spec>` first"))?;
            WeightKind::Oscillating {
                base: parse_weight(base_spec)?,
                amplitude: parse_num(amp_str, body_pos, "amp")?,
                period: parse_num(period_str, body_pos, "period")?,
            }
        }
        "table" => {
            let text = std::fs::read_to_string(rest)
                .map_err(|e| err(body_pos, format!("cannot read table file `{rest}`: {e}")))?;
            WeightKind::Tabulated(parse_table(&text)?)
        }
        "derived" => {
            let (kind_name, tail) = rest
                .split_once(':')
                .ok_or_else(|| err(body_pos, "derived requires `<kind>:...`"))?;
            let after_kind = body_pos + kind_name.len() + 1;
            let (params, base_spec) = if kind_name == "tailprod" {
                ("", tail)
            } else {
                tail.split_once(':')
                    .ok_or_else(|| err(after_kind, "derived requires `<params>:base=<spec>`"))?
            };
            let base_spec = base_spec
                .strip_prefix("base=")
                .ok_or_else(|| err(after_kind, "derived requires `base=<spec>`"))?;
            let base = parse_weight(base_spec)?;
            let transform = match kind_name {
                "tailshift" => DerivedKind::TailQuotientShift {
                    beta: parse_num(take_kv(params, "beta", after_kind)?.0, after_kind, "beta")?,
                },
                "powershift" => DerivedKind::PowerShift {
                    beta: parse_num(take_kv(params, "beta", after_kind)?.0, after_kind, "beta")?,
                },
                "dualw" => DerivedKind::DualW {
                    p: parse_num(take_kv(params, "p", after_kind)?.0, after_kind, "p")?,
                },
                "tailprod" => DerivedKind::TailProduct,
                "hconv" => DerivedKind::HConvolve {
                    p: parse_num(take_kv(params, "p", after_kind)?.0, after_kind, "p")?,
                },
                other => return Err(err(body_pos, format!("unknown derived kind `{other}`"))),
            };
            WeightKind::Derived { base, transform }
        }
        other => {
            return Err(err(
                0,
                format!(
                "unknown weight kind `{other}` (expected std, exp, logpow, osc, table, derived)"
            ),
            ))
        }
    };
    RadialWeight::new(kind)
}

/// Parse a two-column r,value CSV (header optional).
pub fn parse_table(text: &str) -> Result<Tabulated> {
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let a = cols.next().unwrap_or("").trim();
        let b = cols.next().unwrap_or("").trim();
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(r), Ok(v)) => samples.push((r, v)),
            _ if lineno == 0 => continue, // header
            _ => {
                return Err(err(
                    0,
                    format!("table line {} is not `r,value`: `{line}`", lineno + 1),
                ))
            }
        }
    }
    Tabulated::from_samples(samples)
}

impl RadialWeight {
    pub fn parse(spec: &str) -> Result<Self> {
        parse_weight(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_kinds() {
        let w = parse_weight("std:alpha=1").unwrap();
        assert_eq!(w.spec(), "std:alpha=1");
        let w = parse_weight("std:alpha=-0.5,norm").unwrap();
        assert_eq!(w.spec(), "std:alpha=-0.5,norm");
        let w = parse_weight("exp:c=1,gamma=1").unwrap();
        assert_eq!(w.spec(), "exp:c=1,gamma=1");
        let w = parse_weight("logpow:a=-1,b=-2").unwrap();
        assert_eq!(w.spec(), "logpow:a=-1,b=-2");
    }

    #[test]
    fn parses_nested_specs() {
        let w = parse_weight("osc:base=std:alpha=1,amp=0.5,period=2").unwrap();
        assert_eq!(w.spec(), "osc:base=std:alpha=1,amp=0.5,period=2");
        let w = parse_weight("derived:dualw:p=0.75:base=std:alpha=0").unwrap();
        assert_eq!(w.spec(), "derived:dualw:p=0.75:base=std:alpha=0");
        let w = parse_weight("derived:tailprod:base=derived:powershift:beta=1:base=std:alpha=0")
            .unwrap();
        assert!(w
            .spec()
            .starts_with("derived:tailprod:base=derived:powershift"));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_weight("std:alpha=abc") {
            Err(Error::Parse { pos, .. }) => assert!(pos >= 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_weight("nope:x=1").is_err());
        assert!(parse_weight("exp:c=1").is_err());
    }

    #[test]
    fn parse_table_text() {
        let t = parse_table("r,value\n0.0,1.0\n0.5,0.5\n0.9,0.1\n").unwrap();
        let w = RadialWeight::new(WeightKind::Tabulated(t)).unwrap();
        assert!((w.eval(0.5).unwrap() - 0.5).abs() < 1e-12);
    }
}
