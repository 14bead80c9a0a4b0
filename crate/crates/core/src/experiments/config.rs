//! Experiment kinds and their flat `key = value` configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentKind {
    EnemyScan,
    CollinearScan,
    GenericScan,
    TupleBound,
    Multiplicity,
    Cardinality,
    BucketAudit,
    MaximalNorm,
    FocusingSweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::EnemyScan,
        ExperimentKind::CollinearScan,
        ExperimentKind::GenericScan,
        ExperimentKind::TupleBound,
        ExperimentKind::Multiplicity,
        ExperimentKind::Cardinality,
        ExperimentKind::BucketAudit,
        ExperimentKind::MaximalNorm,
        ExperimentKind::FocusingSweep,
    ];

    /// Subcommand name.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::EnemyScan => "enemy-scan",
            ExperimentKind::CollinearScan => "collinear-scan",
            ExperimentKind::GenericScan => "generic-scan",
            ExperimentKind::TupleBound => "tuple-bound",
            ExperimentKind::Multiplicity => "multiplicity",
            ExperimentKind::Cardinality => "cardinality",
            ExperimentKind::BucketAudit => "bucket-audit",
            ExperimentKind::MaximalNorm => "maximal-norm",
            ExperimentKind::FocusingSweep => "focusing-sweep",
        }
    }

    /// The claim the experiment tests, written into every summary.
    pub fn anchor(self) -> &'static str {
        match self {
            ExperimentKind::EnemyScan => {
                "three annuli whose pairwise circles are tangent on the first sphere meet in volume ~ delta^(5/2)"
            }
            ExperimentKind::CollinearScan => "three annuli with collinear centres sharing a circle meet in volume ~ delta^2",
            ExperimentKind::GenericScan => "three transversal annuli meet in volume ~ delta^3",
            ExperimentKind::TupleBound => {
                "polar-cap tuples obey |C1* n .. n Cm*| <= K delta^m / (prod t_j prod theta_j) with delta-stable K, enemy tangencies included"
            }
            ExperimentKind::Multiplicity => {
                "integral (sum_C chi_C*)^n <= K log(1/delta) delta^(n-(n-1)^2) #C with delta-stable K"
            }
            ExperimentKind::Cardinality => {
                "#{C: dist ~ t, angle ~ theta} <= K theta^(n-j+1) t^(n-1) / delta^(n-1), degenerate sectors <= K (t/delta)^(i_j-1)"
            }
            ExperimentKind::BucketAudit => {
                "dyadic (J, t, theta) buckets partition the 2delta-separated tuples; the coincident term is <= K delta #C"
            }
            ExperimentKind::MaximalNorm => {
                "||M^(delta,*) f||_(L^p_n(slice)) <= K log(1/delta) ||f||_(p_n) with delta-stable K"
            }
            ExperimentKind::FocusingSweep => {
                "||M^delta 1_B(0,delta)||_p / ||1_B(0,delta)||_p grows like delta^-(n/p-(n-1)): polynomially below p_n"
            }
        }
    }

    fn default_n(self) -> usize {
        3
    }

    fn default_deltas(self) -> Vec<f64> {
        let range = |a: i32, b: i32| (a..=b).map(|k| 2f64.powi(-k)).collect();
        match self {
            ExperimentKind::EnemyScan | ExperimentKind::CollinearScan | ExperimentKind::GenericScan => range(5, 11),
            ExperimentKind::TupleBound => range(8, 12),
            ExperimentKind::Multiplicity | ExperimentKind::Cardinality => range(4, 7),
            ExperimentKind::BucketAudit => vec![2f64.powi(-5)],
            ExperimentKind::MaximalNorm => range(3, 6),
            ExperimentKind::FocusingSweep => range(5, 10),
        }
    }

    fn default_samples(self) -> u64 {
        match self {
            ExperimentKind::EnemyScan | ExperimentKind::CollinearScan | ExperimentKind::GenericScan => 2_000_000,
            ExperimentKind::TupleBound => 200_000,
            ExperimentKind::Multiplicity | ExperimentKind::BucketAudit => 1_000_000,
            _ => 10_000,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == key || k.name().replace('-', "") == key)
            .ok_or_else(|| invalid(format!("unknown experiment `{s}`")))
    }
}

pub const MIN_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub deltas: Vec<f64>,
    pub seed: u64,
    pub samples: u64,
    pub out: PathBuf,
    pub quiet: bool,
    /// Per-experiment parameters, kept as text.
    pub extra: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            n: kind.default_n(),
            deltas: kind.default_deltas(),
            seed: 1,
            samples: kind.default_samples(),
            out: PathBuf::from(format!("out/{}", kind.name())),
            quiet: false,
            extra: BTreeMap::new(),
        }
    }

    /// Set one key. `dim`, `delta`, `seed`, `samples` and `out` are typed;
    /// anything else lands in `extra`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "experiment" => {
                let kind: ExperimentKind = value.parse()?;
                if kind != self.kind {
                    return Err(invalid(format!("config is for `{kind}`, running `{}`", self.kind)));
                }
            }
            "dim" | "n" => self.n = parse_num(key, value)?,
            "delta" | "deltas" => self.deltas = parse_deltas(value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "samples" => self.samples = parse_num::<f64>(key, value).and_then(|v| whole(key, v))?,
            "out" => self.out = PathBuf::from(value),
            "quiet" => self.quiet = parse_num(key, value)?,
            other => {
                self.extra.insert(other.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    /// Apply every `key = value` line of a config file.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (line, key, value) in parse_config_text(text)? {
            self.set(&key, &value).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid(format!("dimension {} < 2", self.n)));
        }
        if self.deltas.is_empty() {
            return Err(invalid("delta list is empty"));
        }
        for &d in &self.deltas {
            if !(d > 0.0 && d < 0.5) {
                return Err(invalid(format!("delta {d} outside (0, 1/2)")));
            }
            if d.log2().fract() != 0.0 {
                return Err(invalid(format!("delta {d} is not a power of two")));
            }
        }
        if self.samples < MIN_SAMPLES {
            return Err(invalid(format!("samples {} < {MIN_SAMPLES}", self.samples)));
        }
        Ok(())
    }

    pub fn extra_f64(&self, key: &str, default: f64) -> Result<f64> {
        self.extra.get(key).map_or(Ok(default), |v| parse_num(key, v))
    }

    pub fn extra_usize(&self, key: &str, default: usize) -> Result<usize> {
        self.extra.get(key).map_or(Ok(default), |v| parse_num(key, v))
    }

    pub fn extra_str<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.extra.get(key).map_or(default, |v| v.as_str())
    }

    pub fn extra_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.extra.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => split_list(v).map(|t| parse_num(key, t)).collect(),
        }
    }

    /// The resolved configuration, one `key = value` per line, sorted by key
    /// after the fixed fields. Reals are printed in shortest round-trip form.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("experiment = {}\n", self.kind));
        s.push_str(&format!("dim = {}\n", self.n));
        let ds: Vec<String> = self.deltas.iter().map(|d| format!("{d:e}")).collect();
        s.push_str(&format!("delta = {}\n", ds.join(",")));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("samples = {}\n", self.samples));
        s.push_str(&format!("out = {}\n", self.out.display()));
        for (k, v) in &self.extra {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

/// `(line, key, value)` triples of a flat config text; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        if k.trim().is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| invalid(format!("cannot parse `{v}` for `{key}`")))
}

fn whole(key: &str, v: f64) -> Result<u64> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 {
        Ok(v as u64)
    } else {
        Err(invalid(format!("`{key}` must be a whole number, got {v}")))
    }
}

/// One delta: `2^-k` or a decimal.
pub fn parse_delta(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("2^") {
        let k: i32 = exp
            .trim_matches(|c| c == '(' || c == ')')
            .parse()
            .map_err(|_| invalid(format!("bad dyadic `{s}`")))?;
        return Ok(2f64.powi(k));
    }
    parse_num("delta", s)
}

/// Comma or space separated deltas; `a..b` expands to every power of two
/// between the two ends.
pub fn parse_deltas(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for tok in split_list(s) {
        if let Some((a, b)) = tok.split_once("..") {
            let (a, b) = (parse_delta(a)?.log2(), parse_delta(b)?.log2());
            if a.fract() != 0.0 || b.fract() != 0.0 {
                return Err(invalid(format!("range `{tok}` needs powers of two")));
            }
            let (lo, hi) = (a.min(b) as i32, a.max(b) as i32);
            out.extend((lo..=hi).rev().map(|k| 2f64.powi(k)));
        } else {
            out.push(parse_delta(tok)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert_eq!("EnemyScan".parse::<ExperimentKind>().unwrap(), ExperimentKind::EnemyScan);
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn deltas_parse() {
        assert_eq!(parse_deltas("2^-5, 0.125").unwrap(), vec![1.0 / 32.0, 0.125]);
        assert_eq!(parse_deltas("2^-3..2^-5").unwrap(), vec![0.125, 0.0625, 0.03125]);
        assert_eq!(parse_deltas("2^-5..2^-3").unwrap(), vec![0.125, 0.0625, 0.03125]);
        assert!(parse_deltas("2^x").is_err());
    }

    #[test]
    fn config_text_and_validation() {
        let mut c = ExperimentConfig::new(ExperimentKind::EnemyScan);
        c.apply_text("# comment\ndim = 3\ndelta = 2^-5..2^-7  # trailing\nseed=9\nsamples = 1e5\ncentre2 = -0.3,0.4\n")
            .unwrap();
        assert_eq!(c.deltas.len(), 3);
        assert_eq!(c.seed, 9);
        assert_eq!(c.samples, 100_000);
        assert_eq!(c.extra_list("centre2", &[]).unwrap(), vec![-0.3, 0.4]);
        c.validate().unwrap();
        assert!(c.apply_text("experiment = multiplicity").is_err());
        assert!(c.apply_text("novalue").is_err());
        c.samples = 10;
        assert!(c.validate().is_err());
        c.samples = 10_000;
        c.deltas = vec![0.5];
        assert!(c.validate().is_err());
        c.deltas = vec![0.1];
        assert!(c.validate().is_err());
        c.deltas.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn echo_reparses_to_same_config() {
        let mut c = ExperimentConfig::new(ExperimentKind::FocusingSweep);
        c.set("p", "1.2,2").unwrap();
        let mut d = ExperimentConfig::new(ExperimentKind::FocusingSweep);
        d.deltas.clear();
        d.apply_text(&c.echo()).unwrap();
        assert_eq!(c, d);
    }
}
