//! Flat `key = value` configuration files merged with command-line flags
//! (flags win).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::ansatz::Partition;
use crate::error::{Error, Result};

/// Keys accepted in configuration files. `-` and `_` are interchangeable.
pub const CONFIG_KEYS: &[&str] = &[
    "model",
    "d",
    "n",
    "n_a",
    "n_b",
    "J",
    "U",
    "gamma",
    "gamma_grid",
    "targets",
    "out",
    "jobs",
    "tol",
    "tol_deg",
];

/// Parsed configuration file: normalized key → raw value.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn normalize_key(key: &str) -> String {
    let k = key.trim().replace('-', "_");
    match k.as_str() {
        "j" => "J".into(),
        "u" => "U".into(),
        _ => k,
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        text.parse()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Typed lookup; a present but unparsable value is an error.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("cannot parse {key} = {v:?}"))),
        }
    }
}

impl FromStr for ConfigFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = normalize_key(key);
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelKind {
    /// Two fermion species with on-site and nearest-neighbour attraction.
    Full,
    /// Hard-core pairs with the strong-coupling effective Hamiltonian.
    Effective,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(Self::Full),
            "effective" => Ok(Self::Effective),
            other => Err(Error::Config(format!("unknown model {other:?}"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::Effective => "effective",
        })
    }
}

/// Linear grid `min:max:points`, both ends included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("grid {s:?} is not min:max:points"));
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, points] = parts.as_slice() else {
            return Err(bad());
        };
        let grid = Grid {
            min: min.trim().parse().map_err(|_| bad())?,
            max: max.trim().parse().map_err(|_| bad())?,
            points: points.trim().parse().map_err(|_| bad())?,
        };
        if grid.points < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 points, got {}",
                grid.points
            )));
        }
        if !(grid.min.is_finite() && grid.max.is_finite()) || grid.max < grid.min {
            return Err(Error::Config(format!(
                "grid bounds must be finite with min ≤ max: {s:?}"
            )));
        }
        Ok(grid)
    }
}

/// Inclusive integer range `a:b` (or a single value).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub lo: usize,
    pub hi: usize,
}

impl IntRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl FromStr for IntRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("range {s:?} is not a:b"));
        let (lo, hi) = match s.split_once(':') {
            Some((a, b)) => (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => {
                let v = s.trim().parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if hi < lo {
            return Err(bad());
        }
        Ok(IntRange { lo, hi })
    }
}

/// A state whose overlap with the ground space is tracked.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    /// `c†_{s,r}²|0⟩` normalized.
    CSquared { s: usize, r: usize },
    /// `q†_{s,r}|0⟩`.
    Q { s: usize, r: usize },
    /// Single block `q†_{(M)}|0⟩`.
    Block(usize),
    /// Partition state `|M₁+…+M_k⟩`.
    Partition(Partition),
}

impl Target {
    /// Column name without separators.
    pub fn column(&self) -> String {
        match self {
            Self::CSquared { s, r } => format!("fid_c2_s{s}_r{r}"),
            Self::Q { s, r } => format!("fid_q_s{s}_r{r}"),
            Self::Block(m) => format!("fid_block_{m}"),
            Self::Partition(p) => format!("fid_{p}"),
        }
    }
}

fn call_args(s: &str, name: &str) -> Option<Vec<String>> {
    let rest = s.strip_prefix(name)?.trim();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(|a| a.trim().to_string()).collect())
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("bad number {v:?} in target {s:?}")))
        };
        let two = |args: Vec<String>| -> Result<(usize, usize)> {
            match args.as_slice() {
                [a, b] => Ok((num(a)?, num(b)?)),
                _ => Err(Error::Config(format!("target {s:?} needs two arguments"))),
            }
        };
        if let Some(args) = call_args(s, "c2") {
            let (s, r) = two(args)?;
            return Ok(Self::CSquared { s, r });
        }
        if let Some(args) = call_args(s, "q") {
            let (s, r) = two(args)?;
            return Ok(Self::Q { s, r });
        }
        if let Some(args) = call_args(s, "block") {
            return match args.as_slice() {
                [m] => Ok(Self::Block(num(m)?)),
                _ => Err(Error::Config(format!("target {s:?} needs one argument"))),
            };
        }
        Ok(Self::Partition(s.parse()?))
    }
}

/// Splits a comma-separated target list, ignoring commas nested inside
/// `()` or `[]`.
pub fn parse_targets(list: &str) -> Result<Vec<Target>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for ch in list.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(current.parse()?);
            current.clear();
        } else {
            current.push(ch);
        }
        if depth < 0 {
            return Err(Error::Config(format!("unbalanced brackets in {list:?}")));
        }
    }
    if depth != 0 {
        return Err(Error::Config(format!("unbalanced brackets in {list:?}")));
    }
    if !current.trim().is_empty() {
        out.push(current.parse()?);
    }
    Ok(out)
}

/// Fully resolved parameters of a sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub d: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub hopping: f64,
    pub onsite: f64,
    /// Single `γU/J²` value (ground-state).
    pub gamma_scaled: f64,
    pub grid: Grid,
    pub targets: Option<Vec<Target>>,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub tol_res: f64,
    pub tol_deg: f64,
}

impl SweepConfig {
    /// Number of pairs; requires equal species.
    pub fn pairs(&self) -> Result<usize> {
        if self.n_a != self.n_b {
            return Err(Error::Config(format!(
                "this command needs equal species, got n_a={}, n_b={}",
                self.n_a, self.n_b
            )));
        }
        Ok(self.n_a)
    }
}

/// Command-line values, all optional so that config files can fill gaps.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct SweepArgs {
    /// Flat `key = value` file; keys: model, d, n, n_a, n_b, J, U, gamma,
    /// gamma_grid, targets, out, jobs, tol, tol_deg. Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Hamiltonian [default: effective].
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Number of sites [default: 10].
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of pairs, i.e. fermions of each species [default: 2].
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of A fermions (full model; overrides --n).
    #[arg(long = "n-a")]
    pub n_a: Option<usize>,
    /// Number of B fermions (full model; overrides --n).
    #[arg(long = "n-b")]
    pub n_b: Option<usize>,
    /// Hopping energy J [default: 1].
    #[arg(long = "J")]
    pub j: Option<f64>,
    /// On-site attraction U [default: 1000].
    #[arg(long = "U")]
    pub u: Option<f64>,
    /// Nearest-neighbour attraction as γU/J² (ground-state) [default: 0].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Sweep of γU/J² as min:max:points [default: 0:20:41].
    #[arg(long = "gamma-grid")]
    pub gamma_grid: Option<String>,
    /// Comma-separated targets: c2(s,r), q(s,r), block(M), partitions such
    /// as 2+1 or [2,1] [default: every partition of N].
    #[arg(long)]
    pub targets: Option<String>,
    /// Output CSV path [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid points evaluated concurrently [default: 1].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Eigenvector residual tolerance, relative to max(1, ‖H‖) [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Degeneracy tolerance, relative to max(1, |E₀|) [default: 1e-9].
    #[arg(long = "tol-deg")]
    pub tol_deg: Option<f64>,
}

impl SweepArgs {
    pub fn resolve(&self) -> Result<SweepConfig> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let n: usize = pick(self.n, file.get("n")?, 2);
        let grid_text: String = pick(
            self.gamma_grid.clone(),
            file.get("gamma_grid")?,
            "0:20:41".into(),
        );
        let targets = match self.targets.clone().or(file.get("targets")?) {
            Some(t) => Some(parse_targets(&t)?),
            None => None,
        };
        let cfg = SweepConfig {
            model: pick(self.model, file.get("model")?, ModelKind::Effective),
            d: pick(self.d, file.get("d")?, 10),
            n_a: pick(self.n_a, file.get("n_a")?, n),
            n_b: pick(self.n_b, file.get("n_b")?, n),
            hopping: pick(self.j, file.get("J")?, 1.0),
            onsite: pick(self.u, file.get("U")?, 1000.0),
            gamma_scaled: pick(self.gamma, file.get("gamma")?, 0.0),
            grid: grid_text.parse()?,
            targets,
            out: self.out.clone().or(file.get("out")?),
            jobs: pick(self.jobs, file.get("jobs")?, 1),
            tol_res: pick(self.tol, file.get("tol")?, 1e-10),
            tol_deg: pick(self.tol_deg, file.get("tol_deg")?, 1e-9),
        };
        if !(cfg.tol_res > 0.0 && cfg.tol_deg > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if cfg.jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        if !(cfg.hopping >= 0.0 && cfg.onsite > 0.0) {
            return Err(Error::Config(
                "need J ≥ 0 and U > 0 (γ is given as γU/J²)".into(),
            ));
        }
        Ok(cfg)
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
