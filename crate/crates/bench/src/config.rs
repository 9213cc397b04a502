//! Flat `key=value` experiment settings, shared by config files and flags.

use std::fs;
use std::path::PathBuf;

use boolprop::testers::JuntaRoute;
use boolprop::ExplicitFunction;

use crate::experiment::{certify_given, ExperimentConfig, Instances};
use crate::instance::ClassSpec;
use crate::BenchError;

/// Every field is optional so that a config file and command-line flags
/// can be layered with [`Settings::merge`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub class: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub d: Option<usize>,
    pub eps: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// `Some(None)` asks for ε-far instances, `Some(Some(γ))` for γ-far.
    pub far: Option<Option<f64>>,
    pub eta: Option<f64>,
    pub route: Option<String>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub transcripts: Option<PathBuf>,
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, BenchError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| BenchError::Config(format!("bad value for {key}: {v:?} ({e})")))
}

/// Comma-separated list of probabilities.
pub fn parse_grid(v: &str) -> Result<Vec<f64>, BenchError> {
    v.split(',').map(|e| num("eps", e.trim())).collect()
}

/// `""` or `true` means ε-far, `false` means in-class, a number is a
/// margin.
pub fn parse_far(v: &str) -> Result<Option<Option<f64>>, BenchError> {
    match v {
        "" | "true" => Ok(Some(None)),
        "false" => Ok(None),
        g => Ok(Some(Some(num("far", g)?))),
    }
}

impl Settings {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut s = Settings::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, v) = (key.trim(), value.trim());
            match key {
                "class" => s.class = Some(v.into()),
                "n" => s.n = Some(num(key, v)?),
                "k" => s.k = Some(num(key, v)?),
                "s" => s.s = Some(num(key, v)?),
                "d" => s.d = Some(num(key, v)?),
                "eps" => s.eps = Some(parse_grid(v)?),
                "trials" => s.trials = Some(num(key, v)?),
                "seed" => s.seed = Some(num(key, v)?),
                "far" => s.far = parse_far(v)?,
                "eta" => s.eta = Some(num(key, v)?),
                "route" => s.route = Some(v.into()),
                "input" => s.input = Some(v.into()),
                "out" => s.out = Some(v.into()),
                "transcripts" => s.transcripts = Some(v.into()),
                other => return Err(BenchError::Config(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, BenchError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Values set in `over` win.
    pub fn merge(self, over: Settings) -> Settings {
        Settings {
            class: over.class.or(self.class),
            n: over.n.or(self.n),
            k: over.k.or(self.k),
            s: over.s.or(self.s),
            d: over.d.or(self.d),
            eps: over.eps.or(self.eps),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            far: over.far.or(self.far),
            eta: over.eta.or(self.eta),
            route: over.route.or(self.route),
            input: over.input.or(self.input),
            out: over.out.or(self.out),
            transcripts: over.transcripts.or(self.transcripts),
        }
    }

    pub fn class_spec(&self) -> Result<ClassSpec, BenchError> {
        let name = self.class.as_deref().ok_or_else(|| BenchError::Config("no class given".into()))?;
        ClassSpec::from_parts(name, self.k, self.s, self.d)
    }

    pub fn into_config(self) -> Result<ExperimentConfig, BenchError> {
        let class = self.class_spec()?;
        let eps_grid = self.eps.clone().unwrap_or_else(|| vec![0.1]);
        let input = match &self.input {
            Some(p) => Some(ExplicitFunction::parse(&fs::read_to_string(p)?)?),
            None => None,
        };
        let n = match (&input, self.n) {
            (Some(f), _) => f.arity(),
            (None, Some(n)) => n,
            (None, None) => return Err(BenchError::Config("no arity given (--n or --input)".into())),
        };
        let instances = match (input, self.far) {
            (Some(function), Some(_)) => {
                let top = eps_grid.iter().copied().fold(0.0, f64::max);
                let distance = Some(certify_given(class, &function, top)?);
                Instances::Given { function, distance }
            }
            (Some(function), None) => Instances::Given { function, distance: None },
            (None, Some(gamma)) => Instances::Far { gamma },
            (None, None) => Instances::InClass,
        };
        let mut cfg = ExperimentConfig::new(class, n, eps_grid);
        cfg.instances = instances;
        cfg.trials = self.trials.unwrap_or(cfg.trials);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.eta = self.eta.unwrap_or(cfg.eta);
        if let Some(r) = &self.route {
            cfg.junta_route = r.parse::<JuntaRoute>()?;
        }
        cfg.transcripts = self.transcripts;
        cfg.out = self.out;
        cfg.validate()?;
        Ok(cfg)
    }
}
