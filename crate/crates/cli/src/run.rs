//! Dispatch of a [`RunConfig`] to the library and rendering of the results.

use serde::Serialize;
use serde_json::{json, Value};

use fqhyper_core::character::MultChar;
use fqhyper_core::charsum::{gauss_table_twisted, jacobi_direct, jacobi_via_gauss};
use fqhyper_core::cyclotomic::CycloNumber;
use fqhyper_core::error::{Error, Result};
use fqhyper_core::field::{make_field, FqField};
use fqhyper_core::hypergeometric::{Hypergeometric, LauricellaKind, LauricellaParams};
use fqhyper_core::identities::{default_size, space_size, sweep, IdentityId, SweepOptions};
use fqhyper_core::lseries::{artin_l, chi_counts, detect_polynomial, weil_check};
use fqhyper_core::varieties::{brute_count, chi_count, sum_over_m, Limits, Route, VarietySpec};

use crate::config::{Command, Format, HgfKind, RunConfig, DEFAULT_SAMPLE};

use std::sync::Arc;

/// Tolerance of the Weil check on reciprocal-root moduli.
pub const WEIL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Every requested check passed.
    Pass,
    /// Some check whose hypotheses hold failed.
    Fail,
    /// Invalid parameters or an exceeded budget.
    Invalid,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Invalid => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub stdout: String,
    pub stderr: String,
}

/// One row of a CSV table of N_r(V; χ^m).
#[derive(Clone, Debug, Serialize)]
pub struct CsvRow {
    pub r: u32,
    pub m: i64,
    pub route: String,
    pub value_coeffs: String,
    pub complex_approx: String,
}

struct Report {
    records: Vec<Value>,
    rows: Option<Vec<CsvRow>>,
    pass: bool,
}

fn approx(x: &CycloNumber) -> [f64; 2] {
    let z = x.complex_value(15);
    [z.re, z.im]
}

fn value(x: &CycloNumber) -> Value {
    json!({ "exact": x, "approx": approx(x) })
}

fn csv_row(r: u32, m: i64, route: Route, x: &CycloNumber) -> CsvRow {
    let [re, im] = approx(x);
    CsvRow {
        r,
        m,
        route: route.name().to_string(),
        value_coeffs: x
            .coeffs()
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect::<Vec<_>>()
            .join(" "),
        complex_approx: format!("{re:.12}{im:+.12}i"),
    }
}

/// Runs one configuration and renders its output.
pub fn run(cfg: &RunConfig) -> Outcome {
    let echo = json!({ "kind": "config", "config": cfg });
    match execute(cfg) {
        Err(e) => Outcome {
            status: Status::Invalid,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Ok(report) => {
            let status = if report.pass { Status::Pass } else { Status::Fail };
            match cfg.format {
                Format::Json => {
                    let mut out = String::new();
                    for rec in std::iter::once(&echo).chain(&report.records) {
                        out.push_str(&serde_json::to_string(rec).expect("serializable"));
                        out.push('\n');
                    }
                    Outcome {
                        status,
                        stdout: out,
                        stderr: String::new(),
                    }
                }
                Format::Csv => match report.rows {
                    Some(rows) => Outcome {
                        status,
                        stdout: render_csv(&rows),
                        stderr: format!("{echo}\n"),
                    },
                    None => Outcome {
                        status: Status::Invalid,
                        stdout: String::new(),
                        stderr: format!(
                            "error: csv output is available for count and lpoly, not {}\n",
                            cfg.command.name()
                        ),
                    },
                },
            }
        }
    }
}

fn render_csv(rows: &[CsvRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("utf-8")
}

fn execute(cfg: &RunConfig) -> Result<Report> {
    let k = make_field(cfg.p, cfg.f)?;
    if k.p() as u64 != cfg.p {
        return Err(Error::NotPrime(cfg.p));
    }
    match cfg.command {
        Command::Gauss => gauss(cfg, &k),
        Command::Jacobi => jacobi(cfg, &k),
        Command::Hgf => hgf(cfg, &k),
        Command::Verify => verify(cfg, &k),
        Command::Sweep => sweep_all(cfg, &k),
        Command::Count => count(cfg, &k),
        Command::Lpoly => lpoly(cfg, &k),
    }
}

fn plain(records: Vec<Value>, pass: bool) -> Report {
    Report {
        records,
        rows: None,
        pass,
    }
}

fn gauss(cfg: &RunConfig, k: &Arc<FqField>) -> Result<Report> {
    let t = gauss_table_twisted(k, cfg.twist)?;
    let chars: Vec<i64> = if cfg.chars.is_empty() {
        (0..k.order() as i64).collect()
    } else {
        cfg.chars.clone()
    };
    let records = chars
        .iter()
        .map(|&e| {
            json!({
                "kind": "gauss",
                "char": e,
                "g": value(t.g(e)),
                "g_circ": value(&t.g_circ(e)),
            })
        })
        .collect();
    Ok(plain(records, true))
}

fn jacobi(cfg: &RunConfig, k: &Arc<FqField>) -> Result<Report> {
    if cfg.chars.len() < 2 {
        return Err(Error::Arity {
            expected: 2,
            got: cfg.chars.len(),
        });
    }
    let chars: Vec<MultChar> = cfg.chars.iter().map(|&e| MultChar::new(k, e)).collect();
    let direct = jacobi_direct(&chars)?;
    let via = jacobi_via_gauss(&chars)?;
    let equal = direct == via;
    let rec = json!({
        "kind": "jacobi",
        "chars": cfg.chars,
        "direct": value(&direct),
        "via_gauss": value(&via),
        "equal": equal,
    });
    Ok(plain(vec![rec], equal))
}

fn hgf(cfg: &RunConfig, k: &Arc<FqField>) -> Result<Report> {
    let kind = cfg
        .kind
        .ok_or_else(|| Error::Invalid("hgf needs kind".into()))?;
    let h = Hypergeometric::with_twist(k, cfg.twist)?;
    let lauricella = |kind| LauricellaParams::new(kind, cfg.a.clone(), cfg.b.clone(), cfg.c.clone());
    let two = || -> Result<(u32, u32)> {
        match cfg.lambda[..] {
            [x, y] => Ok((x, y)),
            _ => Err(Error::Arity {
                expected: 2,
                got: cfg.lambda.len(),
            }),
        }
    };
    let v = match kind {
        HgfKind::NFn => match cfg.lambda[..] {
            [x] => h.hgf(&cfg.a, &cfg.b, x)?,
            _ => {
                return Err(Error::Arity {
                    expected: 1,
                    got: cfg.lambda.len(),
                })
            }
        },
        HgfKind::A => h.lauricella(&lauricella(LauricellaKind::A)?, &cfg.lambda)?,
        HgfKind::B => h.lauricella(&lauricella(LauricellaKind::B)?, &cfg.lambda)?,
        HgfKind::C => h.lauricella(&lauricella(LauricellaKind::C)?, &cfg.lambda)?,
        HgfKind::D => h.lauricella(&lauricella(LauricellaKind::D)?, &cfg.lambda)?,
        HgfKind::F1 | HgfKind::F2 | HgfKind::F3 | HgfKind::F4 => {
            let (i, lk) = match kind {
                HgfKind::F1 => (1, LauricellaKind::D),
                HgfKind::F2 => (2, LauricellaKind::A),
                HgfKind::F3 => (3, LauricellaKind::B),
                _ => (4, LauricellaKind::C),
            };
            let (x, y) = two()?;
            h.appell(i, &lauricella(lk)?, x, y)?
        }
    };
    let rec = json!({
        "kind": "hgf",
        "function": kind,
        "a": cfg.a,
        "b": cfg.b,
        "c": cfg.c,
        "lambda": cfg.lambda,
        "value": value(&v),
    });
    Ok(plain(vec![rec], true))
}

struct SweepTally {
    instances: usize,
    hypotheses_met: usize,
    failures: usize,
}

fn run_sweep(
    cfg: &RunConfig,
    k: &Arc<FqField>,
    id: IdentityId,
    n: usize,
    sample: Option<usize>,
    records: &mut Vec<Value>,
    verdicts: bool,
) -> Result<SweepTally> {
    let opts = SweepOptions {
        n,
        hypotheses_only: cfg.hypotheses_only,
        cap: cfg.cap,
        sample,
        seed: cfg.seed,
    };
    let all = sweep(id, k, &opts)?;
    let mut tally = SweepTally {
        instances: all.len(),
        hypotheses_met: 0,
        failures: 0,
    };
    for v in &all {
        tally.hypotheses_met += v.hypotheses_met as usize;
        tally.failures += !v.ok() as usize;
        if verdicts || !v.ok() {
            let mut rec = serde_json::to_value(v).expect("serializable");
            rec["kind"] = json!("verdict");
            records.push(rec);
        }
    }
    Ok(tally)
}

fn verify(cfg: &RunConfig, k: &Arc<FqField>) -> Result<Report> {
    let [name] = &cfg.id[..] else {
        return Err(Error::Invalid("verify needs exactly one id".into()));
    };
    let id: IdentityId = name.parse()?;
    let n = cfg.n.unwrap_or_else(|| default_size(id, k.order() as u64));
    if cfg.sample.is_none() {
        let size = space_size(id, k, n)?;
        if size > cfg.cap as u128 {
            return Err(Error::Budget {
                needed: size,
                budget: cfg.cap as u128,
            });
        }
    }
    let mut records = Vec::new();
    let t = run_sweep(cfg, k, id, n, cfg.sample, &mut records, true)?;
    records.push(json!({
        "kind": "summary",
        "identity": id,
        "n": n,
        "instances": t.instances,
        "hypotheses_met": t.hypotheses_met,
        "failures": t.failures,
    }));
    Ok(plain(records, t.failures == 0))
}

fn sweep_all(cfg: &RunConfig, k: &Arc<FqField>) -> Result<Report> {
    let ids: Vec<IdentityId> = if cfg.id.is_empty() {
        IdentityId::ALL.to_vec()
    } else {
        cfg.id.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };
    let mut records = Vec::new();
    let mut failures = 0;
    for id in ids {
        let n = cfg.n.unwrap_or_else(|| default_size(id, k.order() as u64));
        let size = match space_size(id, k, n) {
            Ok(s) => s,
            Err(e) => {
                records.push(json!({
                    "kind": "identity_summary",
                    "identity": id,
                    "n": n,
                    "skipped": e.to_string(),
                }));
                continue;
            }
        };
        let exhaustive = cfg.exhaustive || (cfg.sample.is_none() && size <= cfg.cap as u128);
        if cfg.exhaustive && size > cfg.cap as u128 {
            return Err(Error::Budget {
                needed: size,
                budget: cfg.cap as u128,
            });
        }
        let sample = (!exhaustive).then(|| cfg.sample.unwrap_or(DEFAULT_SAMPLE));
        let t = run_sweep(cfg, k, id, n, sample, &mut records, false)?;
        failures += t.failures;
        records.push(json!({
            "kind": "identity_summary",
            "identity": id,
            "n": n,
            "mode": if exhaustive { "exhaustive" } else { "sampled" },
            "instances": t.instances,
            "hypotheses_met": t.hypotheses_met,
            "failures": t.failures,
        }));
    }
    records.push(json!({ "kind": "summary", "failures": failures }));
    Ok(plain(records, failures == 0))
}

fn limits(cfg: &RunConfig) -> Limits {
    Limits {
        enumeration: cfg.enumeration as u128,
        field_bound: cfg.field_bound,
    }
}

fn variety(cfg: &RunConfig, k: &Arc<FqField>) -> Result<VarietySpec> {
    let family = cfg
        .family
        .ok_or_else(|| Error::Invalid("family is required".into()))?;
    let d = cfg.d.ok_or_else(|| Error::Invalid("d is required".into()))?;
    VarietySpec::new(k, family, d, cfg.exponents.clone(), cfg.lambda.clone())
}

fn count(cfg: &RunConfig, k: &Arc<FqField>) -> Result<Report> {
    let v = variety(cfg, k)?;
    let lim = limits(cfg);
    let formula_gap = v.formula_hypothesis_failure();
    let mut records = vec![json!({ "kind": "variety", "variety": v.descriptor() })];
    let mut rows = Vec::new();
    let mut pass = true;
    for &r in &cfg.r {
        let mut per_route = Vec::new();
        for &route in &cfg.route {
            if route == Route::Formula {
                if let Some(reason) = &formula_gap {
                    records.push(json!({
                        "kind": "skipped",
                        "r": r,
                        "route": route,
                        "reason": reason,
                    }));
                    continue;
                }
            }
            let counts = (0..v.d() as i64)
                .map(|m| chi_count(&v, m, r, route, &lim))
                .collect::<Result<Vec<_>>>()?;
            for c in &counts {
                records.push(json!({
                    "kind": "count",
                    "r": r,
                    "m": c.m,
                    "route": route,
                    "value": value(&c.value),
                }));
                rows.push(csv_row(r, c.m as i64, route, &c.value));
            }
            per_route.push((route, counts));
        }
        let agree = per_route
            .windows(2)
            .all(|w| w[0].1.iter().zip(&w[1].1).all(|(x, y)| x.value == y.value));
        let brute = match brute_count(&v, r, &lim) {
            Ok(n) => Some(n),
            Err(Error::Budget { .. }) | Err(Error::FieldTooLarge { .. }) => None,
            Err(e) => return Err(e),
        };
        let mut totals_ok = true;
        for (route, counts) in &per_route {
            let total = sum_over_m(counts);
            let ok = match (&total, brute) {
                (Some(t), Some(b)) => *t == b.into(),
                (Some(_), None) => true,
                (None, _) => false,
            };
            totals_ok &= ok;
            records.push(json!({
                "kind": "total",
                "r": r,
                "route": route,
                "sum": total.map(|t| t.to_string()),
                "brute": brute,
                "equal": ok,
            }));
        }
        records.push(json!({ "kind": "agreement", "r": r, "routes_agree": agree }));
        pass &= agree && totals_ok;
    }
    Ok(Report {
        records,
        rows: Some(rows),
        pass,
    })
}

fn lpoly(cfg: &RunConfig, k: &Arc<FqField>) -> Result<Report> {
    let v = variety(cfg, k)?;
    let lim = limits(cfg);
    let route = match cfg.route[..] {
        [route] => route,
        _ => return Err(Error::Invalid("lpoly takes one route".into())),
    };
    let big_r = cfg.big_r.unwrap_or(v.n() as u32 + 4);
    if big_r < 3 {
        return Err(Error::Invalid("R must be at least 3".into()));
    }
    let ms: Vec<i64> = if cfg.m.is_empty() {
        (1..v.d() as i64).collect()
    } else {
        cfg.m.clone()
    };
    let mut records = vec![json!({ "kind": "variety", "variety": v.descriptor() })];
    let mut rows = Vec::new();
    let mut pass = true;
    for m in ms {
        let counts = chi_counts(&v, m, big_r, route, &lim)?;
        for (i, c) in counts.iter().enumerate() {
            rows.push(csv_row(i as u32 + 1, m, route, c));
        }
        let series = artin_l(&v, m, big_r, route, &lim)?;
        let poly = detect_polynomial(&series, big_r as usize - 3)?.map(|mut p| {
            p.variety = Some(v.descriptor());
            p.m = Some(m.rem_euclid(v.d() as i64) as u64);
            p
        });
        let weil = poly
            .as_ref()
            .map(|p| weil_check(p, k.q() as u64, cfg.weight, WEIL_TOLERANCE))
            .transpose()?;
        let ok = weil.as_ref().is_some_and(|w| w.pass);
        pass &= ok;
        records.push(json!({
            "kind": "lpoly",
            "m": m,
            "route": route,
            "R": big_r,
            "series": series.coeffs,
            "polynomial": poly,
            "weil": weil,
        }));
    }
    Ok(Report {
        records,
        rows: Some(rows),
        pass,
    })
}
