//! Run configuration: command-line flags, key-value files and the
//! normalized [`RunConfig`] both resolve to.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use serde::{Deserialize, Serialize};

use fqhyper_core::arith::factorize;
use fqhyper_core::character::parse_char;
use fqhyper_core::error::{Error, Result};
use fqhyper_core::identities::IdentityId;
use fqhyper_core::varieties::{Family, Route};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Gauss,
    Jacobi,
    Hgf,
    Verify,
    Count,
    Lpoly,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Gauss,
        Command::Jacobi,
        Command::Hgf,
        Command::Verify,
        Command::Count,
        Command::Lpoly,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Gauss => "gauss",
            Command::Jacobi => "jacobi",
            Command::Hgf => "hgf",
            Command::Verify => "verify",
            Command::Count => "count",
            Command::Lpoly => "lpoly",
            Command::Sweep => "sweep",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown command {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Invalid(format!("unknown format {s:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// The function evaluated by `hgf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HgfKind {
    #[serde(rename = "nFn")]
    NFn,
    A,
    B,
    C,
    D,
    F1,
    F2,
    F3,
    F4,
}

impl HgfKind {
    const ALL: [HgfKind; 9] = [
        HgfKind::NFn,
        HgfKind::A,
        HgfKind::B,
        HgfKind::C,
        HgfKind::D,
        HgfKind::F1,
        HgfKind::F2,
        HgfKind::F3,
        HgfKind::F4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HgfKind::NFn => "nFn",
            HgfKind::A => "A",
            HgfKind::B => "B",
            HgfKind::C => "C",
            HgfKind::D => "D",
            HgfKind::F1 => "F1",
            HgfKind::F2 => "F2",
            HgfKind::F3 => "F3",
            HgfKind::F4 => "F4",
        }
    }
}

impl FromStr for HgfKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        HgfKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown hgf kind {s:?}")))
    }
}

pub const DEFAULT_CAP: u64 = 100_000;
pub const DEFAULT_ENUMERATION: u64 = 50_000_000;
pub const DEFAULT_FIELD_BOUND: u64 = 10_000_000;
pub const DEFAULT_SAMPLE: usize = 200;

/// A fully resolved run. Characters are stored as exponents k of φ in
/// 0..q−1 whichever way they were written.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub p: u64,
    pub f: u32,
    /// Extension degrees for `count`.
    pub r: Vec<u32>,
    pub twist: u32,
    pub chars: Vec<i64>,
    pub kind: Option<HgfKind>,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    pub lambda: Vec<u32>,
    pub id: Vec<String>,
    pub n: Option<usize>,
    pub exhaustive: bool,
    pub sample: Option<usize>,
    pub hypotheses_only: bool,
    pub family: Option<Family>,
    pub d: Option<u64>,
    pub exponents: Vec<i64>,
    pub m: Vec<i64>,
    pub route: Vec<Route>,
    #[serde(rename = "R")]
    pub big_r: Option<u32>,
    pub weight: u32,
    pub format: Format,
    pub cap: u64,
    pub enumeration: u64,
    pub field_bound: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Keys accepted in configuration files, in the order they are written.
pub const KEYS: &[&str] = &[
    "command",
    "q",
    "p",
    "f",
    "r",
    "twist",
    "chars",
    "kind",
    "a",
    "b",
    "c",
    "lambda",
    "id",
    "n",
    "exhaustive",
    "sample",
    "hypotheses-only",
    "family",
    "d",
    "exponents",
    "m",
    "route",
    "R",
    "weight",
    "format",
    "cap",
    "enumeration",
    "field-bound",
    "seed",
    "workers",
];

/// Command-line flags. Every value may also come from `--config`; flags win.
#[derive(Parser, Debug, Default)]
#[command(
    name = "fqhyper",
    version,
    about = "Exact Gauss sums, hypergeometric functions, identity checks, point counts and L-functions over finite fields"
)]
pub struct Flags {
    /// gauss, jacobi, hgf, verify, count, lpoly or sweep
    pub command: Option<String>,
    /// Key-value file (`key = value` per line, `#` comments)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration as key-value text and exit
    #[arg(long)]
    pub dump_config: bool,
    /// Field size, a prime power
    #[arg(long)]
    pub q: Option<String>,
    /// Field characteristic (with --f instead of --q)
    #[arg(long)]
    pub p: Option<String>,
    /// Degree of k over F_p
    #[arg(long)]
    pub f: Option<String>,
    /// Extension degrees r for `count`, comma separated
    #[arg(long)]
    pub r: Option<String>,
    /// Additive character ψ(x) = ζ_p^{Tr(t x)} for this t
    #[arg(long)]
    pub twist: Option<String>,
    /// Characters as exponents k of φ or as phi_d^m, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub chars: Option<String>,
    /// nFn, A, B, C, D or F1..F4
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Field elements as integer encodings, comma separated
    #[arg(long)]
    pub lambda: Option<String>,
    /// Identity names, comma separated (`all` for every identity)
    #[arg(long)]
    pub id: Option<String>,
    /// Size parameter of the identity
    #[arg(long)]
    pub n: Option<String>,
    /// Enumerate every instance (fails if the space exceeds --cap)
    #[arg(long)]
    pub exhaustive: bool,
    /// Draw this many seeded instances instead
    #[arg(long)]
    pub sample: Option<String>,
    /// Keep only instances whose hypotheses hold
    #[arg(long)]
    pub hypotheses_only: bool,
    /// CD, SD, SA, SB, SC, S4 or XD
    #[arg(long)]
    pub family: Option<String>,
    /// Order of the character χ
    #[arg(long)]
    pub d: Option<String>,
    /// Exponents of the defining equation, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub exponents: Option<String>,
    /// Powers m of χ, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// fixed, charsum, formula or all
    #[arg(long)]
    pub route: Option<String>,
    /// Truncation order of the L-series
    #[arg(long = "R")]
    pub big_r: Option<String>,
    /// Expected weight w: reciprocal roots of modulus q^{w/2}
    #[arg(long)]
    pub weight: Option<String>,
    /// json or csv
    #[arg(long)]
    pub format: Option<String>,
    /// Largest instance space enumerated exhaustively
    #[arg(long)]
    pub cap: Option<String>,
    /// Largest number of loop iterations in a point count
    #[arg(long)]
    pub enumeration: Option<String>,
    /// Largest finite field that may be built
    #[arg(long)]
    pub field_bound: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads
    #[arg(long)]
    pub workers: Option<String>,
}

impl Flags {
    /// The values given on the command line, keyed like a config file.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let opts: [(&str, &Option<String>); 27] = [
            ("command", &self.command),
            ("q", &self.q),
            ("p", &self.p),
            ("f", &self.f),
            ("r", &self.r),
            ("twist", &self.twist),
            ("chars", &self.chars),
            ("kind", &self.kind),
            ("a", &self.a),
            ("b", &self.b),
            ("c", &self.c),
            ("lambda", &self.lambda),
            ("id", &self.id),
            ("n", &self.n),
            ("sample", &self.sample),
            ("family", &self.family),
            ("d", &self.d),
            ("exponents", &self.exponents),
            ("m", &self.m),
            ("route", &self.route),
            ("R", &self.big_r),
            ("weight", &self.weight),
            ("format", &self.format),
            ("cap", &self.cap),
            ("enumeration", &self.enumeration),
            ("field-bound", &self.field_bound),
            ("seed", &self.seed),
        ];
        let mut map: BTreeMap<String, String> = opts
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        if let Some(w) = &self.workers {
            map.insert("workers".into(), w.clone());
        }
        if self.exhaustive {
            map.insert("exhaustive".into(), "true".into());
        }
        if self.hypotheses_only {
            map.insert("hypotheses-only".into(), "true".into());
        }
        map
    }
}

fn canonical_key(k: &str) -> Result<String> {
    let k = k.trim().replace('_', "-");
    KEYS.iter()
        .find(|&&key| key == k || (k.len() > 1 && key.eq_ignore_ascii_case(&k)))
        .map(|s| s.to_string())
        .ok_or_else(|| Error::Invalid(format!("unknown configuration key {k:?}")))
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("line {}: expected key = value", i + 1)))?;
        map.insert(canonical_key(k)?, v.trim().to_string());
    }
    Ok(map)
}

/// Merges the config file named by the flags (if any) with the flags.
pub fn load(flags: &Flags) -> Result<RunConfig> {
    let mut map = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
            parse_kv(&text)?
        }
        None => BTreeMap::new(),
    };
    let given = flags.to_map();
    // a field given on the command line replaces one from the file
    if given.contains_key("q") {
        map.remove("p");
        map.remove("f");
    }
    if given.contains_key("p") || given.contains_key("f") {
        map.remove("q");
    }
    map.extend(given);
    RunConfig::resolve(&map)
}

fn list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn num<T: FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("{key}: cannot parse {s:?}")))
}

fn nums<T: FromStr>(key: &str, s: Option<&String>) -> Result<Vec<T>> {
    s.map_or(Ok(Vec::new()), |s| list(s).map(|t| num(key, t)).collect())
}

fn flag(key: &str, s: Option<&String>) -> Result<bool> {
    match s.map(|s| s.trim().to_ascii_lowercase()) {
        None => Ok(false),
        Some(v) if v == "true" || v == "1" || v == "yes" => Ok(true),
        Some(v) if v == "false" || v == "0" || v == "no" => Ok(false),
        Some(v) => Err(Error::Invalid(format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn field_params(map: &BTreeMap<String, String>) -> Result<(u64, u32)> {
    let from_q = match map.get("q") {
        Some(q) => {
            let q: u64 = num("q", q)?;
            match factorize(q).as_slice() {
                [(p, f)] => Some((*p, *f)),
                _ => return Err(Error::Invalid(format!("q = {q} is not a prime power"))),
            }
        }
        None => None,
    };
    let p: Option<u64> = map.get("p").map(|s| num("p", s)).transpose()?;
    let f: Option<u32> = map.get("f").map(|s| num("f", s)).transpose()?;
    match (from_q, p) {
        (Some((qp, qf)), None) => {
            if f.is_some_and(|f| f != qf) {
                return Err(Error::Invalid("q and f disagree".into()));
            }
            Ok((qp, qf))
        }
        (Some((qp, qf)), Some(p)) => {
            if p != qp || f.unwrap_or(1) != qf {
                return Err(Error::Invalid("q disagrees with p and f".into()));
            }
            Ok((p, qf))
        }
        (None, Some(p)) => Ok((p, f.unwrap_or(1))),
        (None, None) => Err(Error::Invalid("the field is not given (use q, or p and f)".into())),
    }
}

impl RunConfig {
    /// Builds a configuration from `key → value` strings.
    pub fn resolve(map: &BTreeMap<String, String>) -> Result<RunConfig> {
        for k in map.keys() {
            canonical_key(k)?;
        }
        let command: Command = map
            .get("command")
            .ok_or_else(|| Error::Invalid("no command given".into()))?
            .parse()?;
        let (p, f) = field_params(map)?;
        let q = p
            .checked_pow(f)
            .filter(|&q| q < u32::MAX as u64)
            .ok_or_else(|| Error::Invalid(format!("{p}^{f} is too large")))?;
        let q1 = q - 1;
        let chars_of = |key: &str| -> Result<Vec<i64>> {
            map.get(key)
                .map_or(Ok(Vec::new()), |s| list(s).map(|t| parse_char(t, q1)).collect())
        };
        let id = match map.get("id") {
            Some(s) if s.trim().eq_ignore_ascii_case("all") => {
                IdentityId::ALL.iter().map(|i| i.name().to_string()).collect()
            }
            Some(s) => list(s)
                .map(|t| t.parse::<IdentityId>().map(|i| i.name().to_string()))
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let route = match map.get("route") {
            Some(s) if s.trim().eq_ignore_ascii_case("all") => Route::ALL.to_vec(),
            Some(s) => list(s).map(str::parse).collect::<Result<_>>()?,
            None if command == Command::Count => Route::ALL.to_vec(),
            None => vec![Route::CharSum],
        };
        let r = match map.get("r") {
            Some(_) => nums("r", map.get("r"))?,
            None => vec![1],
        };
        if r.iter().any(|&r| r == 0) {
            return Err(Error::Invalid("r must be positive".into()));
        }
        let workers = map.get("workers").map_or(Ok(1), |s| num("workers", s))?;
        if workers == 0 {
            return Err(Error::Invalid("workers must be positive".into()));
        }
        let cfg = RunConfig {
            command,
            p,
            f,
            r,
            twist: map.get("twist").map_or(Ok(1), |s| num("twist", s))?,
            chars: chars_of("chars")?,
            kind: map.get("kind").map(|s| s.parse()).transpose()?,
            a: chars_of("a")?,
            b: chars_of("b")?,
            c: chars_of("c")?,
            lambda: nums("lambda", map.get("lambda"))?,
            id,
            n: map.get("n").map(|s| num("n", s)).transpose()?,
            exhaustive: flag("exhaustive", map.get("exhaustive"))?,
            sample: map.get("sample").map(|s| num("sample", s)).transpose()?,
            hypotheses_only: flag("hypotheses-only", map.get("hypotheses-only"))?,
            family: map.get("family").map(|s| s.parse()).transpose()?,
            d: map.get("d").map(|s| num("d", s)).transpose()?,
            exponents: nums("exponents", map.get("exponents"))?,
            m: nums("m", map.get("m"))?,
            route,
            big_r: map.get("R").map(|s| num("R", s)).transpose()?,
            weight: map.get("weight").map_or(Ok(1), |s| num("weight", s))?,
            format: map.get("format").map_or(Ok(Format::Json), |s| s.parse())?,
            cap: map.get("cap").map_or(Ok(DEFAULT_CAP), |s| num("cap", s))?,
            enumeration: map
                .get("enumeration")
                .map_or(Ok(DEFAULT_ENUMERATION), |s| num("enumeration", s))?,
            field_bound: map
                .get("field-bound")
                .map_or(Ok(DEFAULT_FIELD_BOUND), |s| num("field-bound", s))?,
            seed: map.get("seed").map_or(Ok(0), |s| num("seed", s))?,
            workers,
        };
        if cfg.exhaustive && cfg.sample.is_some() {
            return Err(Error::Invalid("exhaustive and sample exclude each other".into()));
        }
        if cfg.lambda.iter().any(|&x| x as u64 >= q) {
            return Err(Error::Invalid(format!("lambda values must lie in 0..{q}")));
        }
        if cfg.twist == 0 || cfg.twist as u64 >= q {
            return Err(Error::Invalid(format!("twist must lie in 1..{q}")));
        }
        Ok(cfg)
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    /// Key-value text that [`parse_kv`] and [`RunConfig::resolve`] map back
    /// to `self`.
    pub fn to_kv(&self) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        let mut lines: Vec<(&str, String)> = vec![
            ("command", self.command.name().into()),
            ("p", self.p.to_string()),
            ("f", self.f.to_string()),
            ("r", join(&self.r)),
            ("twist", self.twist.to_string()),
            ("chars", join(&self.chars)),
            ("kind", self.kind.map(|k| k.name().to_string()).unwrap_or_default()),
            ("a", join(&self.a)),
            ("b", join(&self.b)),
            ("c", join(&self.c)),
            ("lambda", join(&self.lambda)),
            ("id", self.id.join(",")),
            ("n", self.n.map(|n| n.to_string()).unwrap_or_default()),
            ("exhaustive", self.exhaustive.to_string()),
            ("sample", self.sample.map(|n| n.to_string()).unwrap_or_default()),
            ("hypotheses-only", self.hypotheses_only.to_string()),
            ("family", self.family.map(|f| f.name().to_string()).unwrap_or_default()),
            ("d", self.d.map(|d| d.to_string()).unwrap_or_default()),
            ("exponents", join(&self.exponents)),
            ("m", join(&self.m)),
            ("route", join(&self.route)),
            ("R", self.big_r.map(|r| r.to_string()).unwrap_or_default()),
            ("weight", self.weight.to_string()),
            ("format", self.format.to_string()),
            ("cap", self.cap.to_string()),
            ("enumeration", self.enumeration.to_string()),
            ("field-bound", self.field_bound.to_string()),
            ("seed", self.seed.to_string()),
            ("workers", self.workers.to_string()),
        ];
        // unset options and empty lists are omitted
        lines.retain(|(_, v)| !v.is_empty());
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_canonicalized() {
        assert_eq!(canonical_key("field_bound").unwrap(), "field-bound");
        assert_eq!(canonical_key("R").unwrap(), "R");
        assert_eq!(canonical_key("r").unwrap(), "r");
        assert!(canonical_key("colour").is_err());
    }

    #[test]
    fn q_and_p_f_agree() {
        let mut map = BTreeMap::new();
        map.insert("command".to_string(), "gauss".to_string());
        map.insert("q".to_string(), "9".to_string());
        let c = RunConfig::resolve(&map).unwrap();
        assert_eq!((c.p, c.f), (3, 2));
        map.insert("p".to_string(), "5".to_string());
        assert!(RunConfig::resolve(&map).is_err());
        map.insert("q".to_string(), "12".to_string());
        map.remove("p");
        assert!(RunConfig::resolve(&map).is_err());
    }
}
