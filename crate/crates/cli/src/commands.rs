//! Command implementations: deterministic report assembly and moment-cache
//! persistence via VOLTERRA_CACHE_DIR.

use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::Serialize;

use volterra_core::classify::{self, GridSpec};
use volterra_core::criteria::{self, TgOptions};
use volterra_core::poly::CoefficientSeries;
use volterra_core::report::Verdict;
use volterra_core::spaces;
use volterra_core::weight::{CacheSnapshot, RadialWeight};

use crate::json::{csv_f64, csv_opt, to_string};
use crate::verify;
use crate::{Format, Outcome};

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: u32,
    command: String,
    seed: u64,
    report: T,
}

fn envelope<T: Serialize>(command: &str, seed: u64, report: T) -> anyhow::Result<String> {
    to_string(&Envelope {
        schema: SCHEMA,
        command: command.to_string(),
        seed,
        report,
    })
}

// ---------------------------------------------------------------------------
// moment-cache persistence
// ---------------------------------------------------------------------------

fn cache_path(w: &RadialWeight) -> Option<PathBuf> {
    let dir = std::env::var_os("VOLTERRA_CACHE_DIR")?;
    Some(PathBuf::from(dir).join(format!("{:016x}.json", w.spec_hash())))
}

/// Restore the weight's moment table from the cache dir, when present.
pub fn cache_load(w: &RadialWeight) {
    if let Some(path) = cache_path(w) {
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(snap) = serde_json::from_str::<CacheSnapshot>(&text) {
                w.cache_restore(&snap);
            }
        }
    }
}

/// Persist the weight's moment table; silently skipped without the env var.
pub fn cache_store(w: &RadialWeight) {
    if let Some(path) = cache_path(w) {
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        if let Ok(text) = serde_json::to_string(&w.cache_snapshot()) {
            let _ = std::fs::write(path, text);
        }
    }
}

fn load_weight(spec: &str) -> anyhow::Result<RadialWeight> {
    let w = RadialWeight::parse(spec).with_context(|| format!("parsing weight `{spec}`"))?;
    cache_load(&w);
    Ok(w)
}

fn parse_symbol(spec: &str) -> anyhow::Result<CoefficientSeries> {
    if let Some(list) = spec.strip_prefix("poly:") {
        return Ok(CoefficientSeries::from_list(list)?);
    }
    if let Some(path) = spec.strip_prefix("csv:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return Ok(CoefficientSeries::from_csv(&text)?);
    }
    if let Some(path) = spec.strip_prefix("json:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return parse_json_poly(&text);
    }
    if spec.ends_with(".csv") {
        let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        return Ok(CoefficientSeries::from_csv(&text)?);
    }
    if spec.ends_with(".json") {
        let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        return parse_json_poly(&text);
    }
    Ok(CoefficientSeries::from_list(spec)?)
}

/// Compact JSON array form: `[c0, c1, ...]` with entries either numbers or
/// `[re, im]` pairs.
fn parse_json_poly(text: &str) -> anyhow::Result<CoefficientSeries> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(text)?;
    let mut coeffs = Vec::with_capacity(raw.len());
    for v in raw {
        let c = match &v {
            serde_json::Value::Number(n) => {
                num_complex::Complex64::new(n.as_f64().context("bad number")?, 0.0)
            }
            serde_json::Value::Array(pair) if pair.len() == 2 => num_complex::Complex64::new(
                pair[0].as_f64().context("bad re")?,
                pair[1].as_f64().context("bad im")?,
            ),
            _ => bail!("polynomial JSON entries must be numbers or [re, im] pairs"),
        };
        coeffs.push(c);
    }
    Ok(CoefficientSeries::new(coeffs))
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

pub fn cmd_classify(
    weight: &str,
    grid_depth: Option<u32>,
    grid_refine: Option<u32>,
    format: Format,
    seed: u64,
) -> anyhow::Result<(String, Outcome)> {
    let w = load_weight(weight)?;
    let mut grid = GridSpec::default_for(&w);
    if let Some(d) = grid_depth {
        grid.depth = d;
    }
    if let Some(q) = grid_refine {
        grid.refinement = q;
    }
    let report = classify::classify(&w, &grid)?;
    cache_store(&w);
    let inconclusive = report.dhat.verdict == volterra_core::report::Membership::Inconclusive
        && report.dcheck.verdict == volterra_core::report::Membership::Inconclusive;
    let text = match format {
        Format::Json => envelope("classify", seed, &report)?,
        Format::Csv => {
            let mut s = String::from(
                "weight,dhat_verdict,dhat_c,dhat_slope,dcheck_verdict,dcheck_c,dcheck_k,d_member,beta,eta\n",
            );
            s.push_str(&format!(
                "{},{:?},{},{},{:?},{},{},{},{},{}\n",
                report.weight,
                report.dhat.verdict,
                csv_f64(report.dhat.best_c),
                csv_f64(report.dhat.growth_slope),
                report.dcheck.verdict,
                csv_opt(report.dcheck.best_c),
                csv_opt(report.dcheck.best_k),
                report.d_member.map(|b| b.to_string()).unwrap_or_default(),
                csv_opt(report.beta),
                csv_opt(report.eta),
            ));
            s
        }
    };
    Ok((
        text,
        Outcome {
            inconclusive_only: inconclusive,
            failed: false,
        },
    ))
}

// ---------------------------------------------------------------------------
// norm
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct NormRow {
    kind: String,
    value: f64,
    err: f64,
}

pub fn cmd_norm(
    symbol: &str,
    weight: &str,
    p: f64,
    format: Format,
    seed: u64,
) -> anyhow::Result<(String, Outcome)> {
    let f = parse_symbol(symbol)?;
    let w = load_weight(weight)?;
    let mut rows = Vec::new();
    for nv in [
        spaces::norm_hp(&f, p)?,
        spaces::norm_apw(&f, p, &w)?,
        spaces::norm_dpw(&f, p, &w)?,
        spaces::norm_hlpw(&f, p, &w)?,
        spaces::norm_zygmund(&f),
        spaces::norm_bloch(&f),
        spaces::norm_bmoa(&f),
        spaces::norm_bmoa_inf(&f, &w)?,
        spaces::norm_bmoa_prime_inf(&f, &w)?,
    ] {
        rows.push(NormRow {
            kind: nv.kind,
            value: nv.value,
            err: nv.err,
        });
    }
    rows.push(NormRow {
        kind: "Hinf".into(),
        value: volterra_core::volterra::hinf_norm(&f),
        err: 0.0,
    });
    cache_store(&w);
    let text = match format {
        Format::Json => envelope("norm", seed, &rows)?,
        Format::Csv => {
            let mut s = String::from("kind,value,err\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{}\n",
                    r.kind,
                    csv_f64(r.value),
                    csv_f64(r.err)
                ));
            }
            s
        }
    };
    Ok((
        text,
        Outcome {
            inconclusive_only: false,
            failed: false,
        },
    ))
}

// ---------------------------------------------------------------------------
// criterion
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(untagged)]
pub enum CriterionOut {
    Report(volterra_core::report::CriterionReport),
    Series(criteria::SeriesFormReport),
    Embedding(criteria::EmbeddingReport),
}

pub fn run_criterion(
    p: f64,
    w: &RadialWeight,
    symbol: Option<&CoefficientSeries>,
    which: &str,
    grid_depth: Option<u32>,
    trunc: Option<usize>,
) -> anyhow::Result<(CriterionOut, Option<Verdict>)> {
    let mut opts = TgOptions::default();
    if let Some(t) = trunc {
        opts.truncation = t;
    }
    opts.octaves = grid_depth;
    let need_symbol = || -> anyhow::Result<&CoefficientSeries> {
        symbol.ok_or_else(|| anyhow::anyhow!("criterion `{which}` needs --symbol"))
    };
    Ok(match which {
        "trivial-dirichlet" => {
            let rep = if p <= 1.0 {
                criteria::triviality_p_le_1(p, w, grid_depth)?
            } else {
                criteria::triviality_p_gt_1(p, w)?
            };
            let v = rep.verdict;
            (CriterionOut::Report(rep), Some(v))
        }
        "trivial-bergman" => {
            let rep = criteria::bergman_triviality(p, w)?;
            let v = rep.verdict;
            (CriterionOut::Report(rep), Some(v))
        }
        "tg" => {
            let rep = criteria::bounded_tg(p, w, need_symbol()?, &opts)?;
            let v = rep.verdict;
            (CriterionOut::Report(rep), Some(v))
        }
        "tg-xspaces" => {
            let rep = criteria::bounded_tg_xspaces(p, w, need_symbol()?)?;
            let v = rep.verdict;
            (CriterionOut::Report(rep), Some(v))
        }
        "pililo" => {
            let rep = criteria::series_form_p_le_1(p, w, &[0.9, 0.99, 0.999, 0.9999])?;
            let v = rep.verdict;
            (CriterionOut::Series(rep), Some(v))
        }
        "embedding" => {
            let rep = criteria::embedding_integrals(p, w)?;
            (CriterionOut::Embedding(rep), None)
        }
        other => bail!("unknown criterion `{other}` (expected trivial-dirichlet, trivial-bergman, tg, tg-xspaces, pililo, embedding)"),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_criterion(
    p: f64,
    weight: &str,
    symbol: Option<&str>,
    which: &str,
    grid_depth: Option<u32>,
    trunc: Option<usize>,
    format: Format,
    seed: u64,
) -> anyhow::Result<(String, Outcome)> {
    let w = load_weight(weight)?;
    let sym = symbol.map(parse_symbol).transpose()?;
    let (out, verdict) = run_criterion(p, &w, sym.as_ref(), which, grid_depth, trunc)?;
    cache_store(&w);
    let inconclusive = matches!(verdict, Some(Verdict::Inconclusive));
    let text = match format {
        Format::Json => envelope("criterion", seed, &out)?,
        Format::Csv => match &out {
            CriterionOut::Report(r) => {
                let mut s = String::from(
                    "criterion,p,weight,verdict,compact_verdict,sup_estimate,limsup_estimate,value,divergence_slope\n",
                );
                s.push_str(&format!(
                    "{},{},{},{:?},{},{},{},{},{}\n",
                    r.criterion,
                    csv_opt(r.params.p),
                    r.params.weight.clone().unwrap_or_default(),
                    r.verdict,
                    r.compact_verdict
                        .map(|v| format!("{v:?}"))
                        .unwrap_or_default(),
                    csv_opt(r.summary.sup_estimate),
                    csv_opt(r.summary.limsup_estimate),
                    csv_opt(r.summary.value),
                    csv_opt(r.summary.divergence_slope),
                ));
                s
            }
            CriterionOut::Series(r) => {
                let mut s = String::from("r,series,closed,ratio\n");
                for pair in &r.sweep.pairs {
                    s.push_str(&format!(
                        "{},{},{},{}\n",
                        csv_f64(pair.at),
                        csv_f64(pair.lhs),
                        csv_f64(pair.rhs),
                        csv_f64(pair.ratio)
                    ));
                }
                s
            }
            CriterionOut::Embedding(r) => {
                let mut s = String::from("p,weight,thm_integral,lower_bound,b_norm\n");
                s.push_str(&format!(
                    "{},{},{:?},{:?},{:?}\n",
                    csv_f64(r.p),
                    r.weight,
                    r.thm_integral,
                    r.lower_bound,
                    r.b_norm
                ));
                s
            }
        },
    };
    Ok((
        text,
        Outcome {
            inconclusive_only: inconclusive,
            failed: false,
        },
    ))
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn parse_range(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => Ok(vec![parts[0].parse()?]),
        3 => {
            let (a, b, step): (f64, f64, f64) =
                (parts[0].parse()?, parts[1].parse()?, parts[2].parse()?);
            if !(step > 0.0) {
                bail!("range step must be positive in `{s}`");
            }
            let mut out = Vec::new();
            let n = ((b - a) / step + 1e-9).floor() as usize;
            for i in 0..=n {
                out.push(a + step * i as f64);
            }
            Ok(out)
        }
        _ => bail!("range must be `value` or `start:end:step`, got `{s}`"),
    }
}

/// Evaluate a linear expression in p: `2p-2`, `-0.5`, `p`, `0.5p+1`.
fn eval_p_expr(s: &str, p: f64) -> anyhow::Result<f64> {
    let t = s.trim();
    match t.find('p') {
        None => Ok(t.parse()?),
        Some(i) => {
            let coef = match &t[..i] {
                "" => 1.0,
                "-" => -1.0,
                other => other.parse()?,
            };
            let rest = &t[i + 1..];
            let offset: f64 = if rest.is_empty() { 0.0 } else { rest.parse()? };
            Ok(coef * p + offset)
        }
    }
}

/// Substitute p into every `key=value` value region that mentions it.
pub fn substitute_p(spec: &str, p: f64) -> anyhow::Result<String> {
    let mut out = String::with_capacity(spec.len());
    let bytes = spec.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        out.push(bytes[i] as char);
        if bytes[i] == b'=' {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end] != b',' && bytes[end] != b':' {
                end += 1;
            }
            let value = &spec[start..end];
            if value.contains('p') {
                let v = eval_p_expr(value, p)?;
                out.push_str(&format!("{v}"));
            } else {
                out.push_str(value);
            }
            i = end;
        } else {
            i += 1;
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct SweepRow {
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    weight: String,
    criterion: String,
    verdict: String,
    compact_verdict: String,
    sup_estimate: Option<f64>,
    limsup_estimate: Option<f64>,
    value: Option<f64>,
    divergence_slope: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    p_range: &str,
    weight: Option<&str>,
    alpha_range: Option<&str>,
    symbol: Option<&str>,
    which: &str,
    grid_depth: Option<u32>,
    trunc: Option<usize>,
    format: Format,
    seed: u64,
) -> anyhow::Result<(String, Outcome)> {
    let ps = parse_range(p_range)?;
    let alphas = alpha_range.map(parse_range).transpose()?;
    let sym = symbol.map(parse_symbol).transpose()?;
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut all_inconclusive = true;

    let mut run_cell = |p: f64, alpha: Option<f64>, spec: String| -> anyhow::Result<()> {
        let w = load_weight(&spec)?;
        let (out, verdict) = run_criterion(p, &w, sym.as_ref(), which, grid_depth, trunc)?;
        cache_store(&w);
        let (verdict_s, compact_s, sup, limsup, value, slope) = match &out {
            CriterionOut::Report(r) => (
                format!("{:?}", r.verdict),
                r.compact_verdict
                    .map(|v| format!("{v:?}"))
                    .unwrap_or_default(),
                r.summary.sup_estimate,
                r.summary.limsup_estimate,
                r.summary.value,
                r.summary.divergence_slope,
            ),
            CriterionOut::Series(r) => (
                format!("{:?}", r.verdict),
                String::new(),
                r.sup_estimate,
                None,
                Some(r.sweep.max_ratio),
                None,
            ),
            CriterionOut::Embedding(r) => (
                format!("{:?}", r.thm_integral),
                format!("{:?}", r.lower_bound),
                None,
                None,
                None,
                None,
            ),
        };
        if !matches!(verdict, Some(Verdict::Inconclusive)) {
            all_inconclusive = false;
        }
        rows.push(SweepRow {
            p,
            alpha,
            weight: w.spec().to_string(),
            criterion: which.to_string(),
            verdict: verdict_s,
            compact_verdict: compact_s,
            sup_estimate: sup,
            limsup_estimate: limsup,
            value,
            divergence_slope: slope,
        });
        Ok(())
    };

    for &p in &ps {
        match (&alphas, weight) {
            (Some(al), _) => {
                for &a in al {
                    run_cell(p, Some(a), format!("std:alpha={a}"))?;
                }
            }
            (None, Some(spec)) => run_cell(p, None, substitute_p(spec, p)?)?,
            (None, None) => bail!("sweep needs --weight or --alpha"),
        }
    }

    let text = match format {
        Format::Json => envelope("sweep", seed, &rows)?,
        Format::Csv => {
            let mut s = String::from(
                "p,alpha,weight,criterion,verdict,compact_verdict,sup_estimate,limsup_estimate,value,divergence_slope\n",
            );
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    csv_f64(r.p),
                    csv_opt(r.alpha),
                    r.weight,
                    r.criterion,
                    r.verdict,
                    r.compact_verdict,
                    csv_opt(r.sup_estimate),
                    csv_opt(r.limsup_estimate),
                    csv_opt(r.value),
                    csv_opt(r.divergence_slope),
                ));
            }
            s
        }
    };
    Ok((
        text,
        Outcome {
            inconclusive_only: all_inconclusive,
            failed: false,
        },
    ))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub fn cmd_verify(suite: &str, seed: u64, format: Format) -> anyhow::Result<(String, Outcome)> {
    let report = verify::run(suite, seed)?;
    let failed = report.failed > 0;
    let text = match format {
        Format::Json => envelope("verify", seed, &report)?,
        Format::Csv => {
            let mut s = String::from("check,pass,detail\n");
            for c in &report.checks {
                s.push_str(&format!(
                    "{},{},{}\n",
                    c.name,
                    c.pass,
                    c.detail.replace(',', ";")
                ));
            }
            s
        }
    };
    Ok((
        text,
        Outcome {
            inconclusive_only: false,
            failed,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_expressions() {
        assert_eq!(eval_p_expr("2p-2", 0.75).unwrap(), -0.5);
        assert_eq!(eval_p_expr("p", 0.6).unwrap(), 0.6);
        assert_eq!(eval_p_expr("-p+1", 0.25).unwrap(), 0.75);
        assert_eq!(eval_p_expr("0.5", 0.9).unwrap(), 0.5);
        assert!(eval_p_expr("2q", 1.0).is_err());
    }

    #[test]
    fn p_substitution_only_touches_values() {
        let spec = substitute_p("std:alpha=2p-2", 0.75).unwrap();
        assert_eq!(spec, "std:alpha=-0.5");
        // keys containing the letter p stay intact
        let spec = substitute_p("osc:base=std:alpha=p,amp=0.5,period=2", 0.5).unwrap();
        assert_eq!(spec, "osc:base=std:alpha=0.5,amp=0.5,period=2");
        let spec = substitute_p("derived:powershift:beta=p:base=std:alpha=1", 2.0).unwrap();
        assert_eq!(spec, "derived:powershift:beta=2:base=std:alpha=1");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1.5").unwrap(), vec![1.5]);
        let r = parse_range("0.5:1.0:0.25").unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[2] - 1.0).abs() < 1e-12);
        assert!(parse_range("1:2").is_err());
    }
}
