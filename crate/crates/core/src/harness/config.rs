//! Flat `key = value` experiment files. `#` starts a comment; blank lines are
//! ignored; every key may appear once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::baselines::ScanOrder;
use crate::error::{Error, Result};
use crate::field::{sqrt_prime_coefficients, Coefficients};
use crate::targets::{Binarization, Floor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Validate,
    Image,
    Ising,
    Denoise,
    Logreg,
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "validate" => Self::Validate,
            "image" => Self::Image,
            "ising" => Self::Ising,
            "denoise" => Self::Denoise,
            "logreg" => Self::Logreg,
            _ => return Err(Error::Config(format!("unknown experiment kind {s:?}"))),
        })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Validate => "validate",
            Self::Image => "image",
            Self::Ising => "ising",
            Self::Denoise => "denoise",
            Self::Logreg => "logreg",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    /// Event-driven dynamical Gibbs with the configured coefficients.
    DGibbs,
    /// Dynamical Gibbs with every coefficient equal to one.
    Suzuki,
    Gibbs,
    Independent,
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dgibbs" => Self::DGibbs,
            "suzuki" => Self::Suzuki,
            "gibbs" => Self::Gibbs,
            "independent" => Self::Independent,
            _ => return Err(Error::Config(format!("unknown sampler {s:?}"))),
        })
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DGibbs => "dgibbs",
            Self::Suzuki => "suzuki",
            Self::Gibbs => "gibbs",
            Self::Independent => "independent",
        })
    }
}

impl SamplerKind {
    pub fn is_deterministic(self) -> bool {
        matches!(self, Self::DGibbs | Self::Suzuki)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub enum CoefficientMode {
    #[default]
    SqrtPrimes,
    Ones,
    Explicit(Vec<f64>),
}

impl FromStr for CoefficientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt-primes" => Ok(Self::SqrtPrimes),
            "ones" => Ok(Self::Ones),
            _ => s
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Self::Explicit)
                .map_err(|_| Error::Config(format!("coefficients must be sqrt-primes, ones or a list, got {s:?}"))),
        }
    }
}

impl CoefficientMode {
    pub fn build(&self, n: usize) -> Result<Coefficients> {
        match self {
            Self::SqrtPrimes => sqrt_prime_coefficients(n),
            Self::Ones => Coefficients::ones(n),
            Self::Explicit(v) if v.len() == n => Coefficients::new(v.clone()),
            Self::Explicit(v) => Err(Error::Config(format!("{} coefficients for {n} axes", v.len()))),
        }
    }
}

/// Where the reference means come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReferenceMode {
    /// Checkerboard for `ising`, exact enumeration when feasible otherwise.
    #[default]
    Auto,
    Exact,
    /// Systematic-scan Gibbs for `5000 n` axis updates.
    LongRun,
    /// The nearer of the two checkerboards (`ising` only).
    Checkerboard,
}

impl FromStr for ReferenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Self::Auto,
            "exact" => Self::Exact,
            "long-run" => Self::LongRun,
            "checkerboard" => Self::Checkerboard,
            _ => return Err(Error::Config(format!("unknown reference mode {s:?}"))),
        })
    }
}

/// How the `image` experiment gets its picture.
#[derive(Clone, Debug, PartialEq)]
pub enum ImageSource {
    Pgm(PathBuf),
    /// Constant positive image.
    Uniform {
        height: usize,
        width: usize,
    },
    /// Constant background plus a Gaussian bump.
    Blob {
        height: usize,
        width: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpec {
    /// Random positive table.
    Validate {
        dims: Vec<usize>,
        low: f64,
        high: f64,
        seed: u64,
    },
    Image {
        source: ImageSource,
        floor: Floor,
    },
    Ising {
        side: usize,
    },
    Denoise {
        side: usize,
        beta: f64,
        eta: f64,
        noise: f64,
        image_seed: u64,
        /// Clean picture; a synthetic shape when absent.
        image: Option<PathBuf>,
    },
    Logreg {
        dataset: PathBuf,
        label: String,
        rule: Binarization,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub target: TargetSpec,
    pub samplers: Vec<SamplerKind>,
    pub coefficients: CoefficientMode,
    /// Iterations per replicate: events for the dynamical samplers, axis
    /// updates for Gibbs, full draws for independent sampling.
    pub budget: usize,
    pub replicates: usize,
    pub seed: u64,
    pub scan: ScanOrder,
    /// Record every `k` iterations; `None` records 20 points per decade.
    pub record_stride: Option<usize>,
    pub reference: ReferenceMode,
    pub out: Option<PathBuf>,
}

/// Parsed but unvalidated key/value pairs with their line numbers.
struct Pairs {
    map: BTreeMap<String, (usize, String)>,
    base: PathBuf,
}

impl Pairs {
    fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", k + 1)))?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), (k + 1, value.trim().to_string())).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", k + 1)));
            }
        }
        Ok(Self {
            map,
            base: base.to_path_buf(),
        })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("line {line}: bad value {v:?} for {key}"))),
        }
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&mut self, key: &str, kind: ExperimentKind) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::Config(format!("{kind} experiments need {key}")))
    }

    fn path(&mut self, key: &str) -> Option<PathBuf> {
        self.take(key).map(|(_, v)| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                self.base.join(p)
            }
        })
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(Error::Config(format!("line {line}: unknown key {key:?}"))),
        }
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(['x', 'X', ','])
        .map(|d| d.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .ok()
        .filter(|d| !d.is_empty() && d.iter().all(|&v| v > 0))
        .ok_or_else(|| Error::Config(format!("dims must look like 4x4, got {s:?}")))
}

impl ExperimentConfig {
    /// Reads a config file; relative paths inside it resolve against its
    /// directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")), None)
    }

    /// Parses config text. `kind` (from a subcommand) must agree with a
    /// `kind` key when both are given.
    pub fn parse(text: &str, base: &Path, kind: Option<ExperimentKind>) -> Result<Self> {
        let mut p = Pairs::parse(text, base)?;
        let declared: Option<ExperimentKind> = p.get("kind")?;
        let kind = match (declared, kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config declares kind {a} but {b} was requested")))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(Error::Config("missing kind".into())),
        };

        let target = match kind {
            ExperimentKind::Validate => TargetSpec::Validate {
                dims: parse_dims(&p.or("dims", "4x4".to_string())?)?,
                low: p.or("low", 0.1)?,
                high: p.or("high", 1.0)?,
                seed: p.or("target_seed", 1)?,
            },
            ExperimentKind::Image => {
                let source = match (p.path("image"), p.take("synthetic")) {
                    (Some(_), Some(_)) => return Err(Error::Config("give either image or synthetic, not both".into())),
                    (Some(path), None) => ImageSource::Pgm(path),
                    (None, Some((line, s))) => {
                        let height = p.or("height", 32)?;
                        let width = p.or("width", 32)?;
                        match s.as_str() {
                            "uniform" => ImageSource::Uniform { height, width },
                            "blob" => ImageSource::Blob { height, width },
                            _ => return Err(Error::Config(format!("line {line}: unknown synthetic image {s:?}"))),
                        }
                    }
                    (None, None) => return Err(Error::Config("image experiments need image or synthetic".into())),
                };
                let floor = match p.get::<f64>("floor")? {
                    None => Floor::Relative,
                    Some(v) => Floor::Absolute(v),
                };
                TargetSpec::Image { source, floor }
            }
            ExperimentKind::Ising => TargetSpec::Ising {
                side: p.or("side", 28)?,
            },
            ExperimentKind::Denoise => TargetSpec::Denoise {
                side: p.or("side", 64)?,
                beta: p.or("beta", 1.0)?,
                eta: p.or("eta", 2.1)?,
                noise: p.or("noise", 0.1)?,
                image_seed: p.or("image_seed", 1)?,
                image: p.path("image"),
            },
            ExperimentKind::Logreg => TargetSpec::Logreg {
                dataset: p
                    .path("dataset")
                    .ok_or_else(|| Error::Config("logreg experiments need dataset".into()))?,
                label: p.required("label", kind)?,
                rule: p.or("binarize", Binarization::default())?,
            },
        };

        let samplers = p
            .take("sampler")
            .map(|(_, v)| parse_samplers(&v))
            .transpose()?
            .unwrap_or_else(|| vec![SamplerKind::DGibbs]);
        let scan = match p.take("scan") {
            None => ScanOrder::Systematic,
            Some((_, v)) if v == "systematic" => ScanOrder::Systematic,
            Some((_, v)) if v == "random" => ScanOrder::Random,
            Some((line, v)) => return Err(Error::Config(format!("line {line}: unknown scan order {v:?}"))),
        };
        let stride: usize = p.or("record_stride", 0)?;
        let config = Self {
            kind,
            target,
            samplers,
            coefficients: p.or("coefficients", CoefficientMode::default())?,
            budget: p.required("events", kind)?,
            replicates: p.or("replicates", 1)?,
            seed: p.or("seed", 0)?,
            scan,
            record_stride: (stride > 0).then_some(stride),
            reference: p.or("reference", ReferenceMode::default())?,
            out: p.path("out"),
        };
        p.finish()?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("events must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.samplers.is_empty() {
            return Err(Error::Config("no sampler selected".into()));
        }
        if self.reference == ReferenceMode::Checkerboard && self.kind != ExperimentKind::Ising {
            return Err(Error::Config("checkerboard reference only applies to ising".into()));
        }
        if let TargetSpec::Denoise { noise, .. } = self.target {
            if !(0.0..=1.0).contains(&noise) {
                return Err(Error::Config(format!("noise must be in [0, 1], got {noise}")));
            }
        }
        Ok(())
    }
}

pub fn parse_samplers(s: &str) -> Result<Vec<SamplerKind>> {
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim) {
        let k: SamplerKind = name.parse()?;
        if out.contains(&k) {
            return Err(Error::Config(format!("sampler {k} listed twice")));
        }
        out.push(k);
    }
    Ok(out)
}
