//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use radproj::generators::{CmsSpec, SubstitutionRule};
use radproj::pipeline::{GeneratorConfig, PipelineConfig};
use radproj::visibility::VisibilityMethod;
use radproj::{Error, PlanarPoint};

pub const SETS: [&str; 8] = ["z2", "poisson", "ab", "tt", "gs", "lb", "chair", "rule"];
pub const VISIBILITY: [&str; 5] = ["auto", "brute_force", "gcd_z2", "cms_local", "norm_class_gs"];
pub const REFERENCES: [&str; 2] = ["z2", "exp"];

/// Everything that determines the content of a run's outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub set: String,
    pub radius: f64,
    pub seed: u64,
    pub intensity: f64,
    pub steps: u32,
    pub rule_file: Option<PathBuf>,
    /// Window shift in units of the window edge; `None` keeps the preset.
    pub epsilon: Option<(f64, f64)>,
    /// Window rotation in radians; `None` keeps the preset.
    pub window_rotation: Option<f64>,
    pub visibility: String,
    pub angular_tolerance: f64,
    pub wraparound: bool,
    pub bin_width: f64,
    pub t_max: f64,
    pub fit_lo: f64,
    pub fit_hi: f64,
    pub fit_min_bin_count: usize,
    pub fit_extra_terms: usize,
    pub reference: String,
    pub lambda: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            set: "z2".into(),
            radius: 10.0,
            seed: 0,
            intensity: 1.0,
            steps: 8,
            rule_file: None,
            epsilon: None,
            window_rotation: None,
            visibility: "auto".into(),
            angular_tolerance: radproj::visibility::ANGULAR_TOLERANCE,
            wraparound: false,
            bin_width: 0.01,
            t_max: 4.0,
            fit_lo: 5.0,
            fit_hi: 50.0,
            fit_min_bin_count: 50,
            fit_extra_terms: 0,
            reference: "z2".into(),
            lambda: 1.0,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("{key}: cannot parse {v:?}: {e}"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("{key}: expected true or false, got {v:?}")),
    }
}

fn parse_optional<T>(v: &str, f: impl FnOnce(&str) -> Result<T, String>) -> Result<Option<T>, String> {
    if v == "default" {
        Ok(None)
    } else {
        f(v).map(Some)
    }
}

fn parse_pair(key: &str, v: &str) -> Result<(f64, f64), String> {
    let (a, b) = v
        .split_once(',')
        .ok_or_else(|| format!("{key}: expected two comma-separated numbers, got {v:?}"))?;
    Ok((parse_num(key, a.trim())?, parse_num(key, b.trim())?))
}

impl RunConfig {
    pub const KEYS: [&'static str; 19] = [
        "set",
        "radius",
        "seed",
        "intensity",
        "steps",
        "rule_file",
        "epsilon",
        "window_rotation",
        "visibility",
        "angular_tolerance",
        "wraparound",
        "bin_width",
        "t_max",
        "fit_lo",
        "fit_hi",
        "fit_min_bin_count",
        "fit_extra_terms",
        "reference",
        "lambda",
    ];

    /// Sets one key; values are validated later by [`RunConfig::validate`].
    pub fn set_key(&mut self, key: &str, v: &str) -> Result<(), String> {
        let v = v.trim();
        match key {
            "set" => self.set = v.to_string(),
            "radius" => self.radius = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "intensity" => self.intensity = parse_num(key, v)?,
            "steps" => self.steps = parse_num(key, v)?,
            "rule_file" => self.rule_file = parse_optional(v, |s| Ok(PathBuf::from(s)))?,
            "epsilon" => self.epsilon = parse_optional(v, |s| parse_pair(key, s))?,
            "window_rotation" => self.window_rotation = parse_optional(v, |s| parse_num(key, s))?,
            "visibility" => self.visibility = v.to_string(),
            "angular_tolerance" => self.angular_tolerance = parse_num(key, v)?,
            "wraparound" => self.wraparound = parse_bool(key, v)?,
            "bin_width" => self.bin_width = parse_num(key, v)?,
            "t_max" => self.t_max = parse_num(key, v)?,
            "fit_lo" => self.fit_lo = parse_num(key, v)?,
            "fit_hi" => self.fit_hi = parse_num(key, v)?,
            "fit_min_bin_count" => self.fit_min_bin_count = parse_num(key, v)?,
            "fit_extra_terms" => self.fit_extra_terms = parse_num(key, v)?,
            "reference" => self.reference = v.to_string(),
            "lambda" => self.lambda = parse_num(key, v)?,
            _ => return Err(format!("unknown key {key:?}; valid keys: {}", Self::KEYS.join(", "))),
        }
        Ok(())
    }

    /// Key/value pairs in a fixed order. Floats use the shortest
    /// representation that reads back to the same value.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let opt = |o: Option<String>| o.unwrap_or_else(|| "default".into());
        vec![
            ("set", self.set.clone()),
            ("radius", format!("{:?}", self.radius)),
            ("seed", self.seed.to_string()),
            ("intensity", format!("{:?}", self.intensity)),
            ("steps", self.steps.to_string()),
            ("rule_file", opt(self.rule_file.as_ref().map(|p| p.display().to_string()))),
            ("epsilon", opt(self.epsilon.map(|(a, b)| format!("{a:?},{b:?}")))),
            ("window_rotation", opt(self.window_rotation.map(|r| format!("{r:?}")))),
            ("visibility", self.visibility.clone()),
            ("angular_tolerance", format!("{:?}", self.angular_tolerance)),
            ("wraparound", self.wraparound.to_string()),
            ("bin_width", format!("{:?}", self.bin_width)),
            ("t_max", format!("{:?}", self.t_max)),
            ("fit_lo", format!("{:?}", self.fit_lo)),
            ("fit_hi", format!("{:?}", self.fit_hi)),
            ("fit_min_bin_count", self.fit_min_bin_count.to_string()),
            ("fit_extra_terms", self.fit_extra_terms.to_string()),
            ("reference", self.reference.clone()),
            ("lambda", format!("{:?}", self.lambda)),
        ]
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Applies a `key = value` file on top of `self`. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), Error> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            self.set_key(k.trim(), v).map_err(|msg| Error::Parse { line: i + 1, msg })?;
        }
        Ok(())
    }

    #[cfg(test)]
    pub fn from_text(text: &str) -> Result<RunConfig, Error> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Comment lines embedded in every output.
    pub fn header_lines(&self) -> Vec<String> {
        let mut out = vec![format!("radproj {}", env!("CARGO_PKG_VERSION"))];
        out.extend(self.entries().into_iter().map(|(k, v)| format!("config.{k}={v}")));
        out
    }

    fn usage(msg: String) -> Error {
        Error::Usage(msg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !SETS.contains(&self.set.as_str()) {
            return Err(Self::usage(format!(
                "unknown point set {:?}; valid sets: {}",
                self.set,
                SETS.join(", ")
            )));
        }
        if !VISIBILITY.contains(&self.visibility.as_str()) {
            return Err(Self::usage(format!(
                "unknown visibility method {:?}; valid methods: {}",
                self.visibility,
                VISIBILITY.join(", ")
            )));
        }
        if !REFERENCES.contains(&self.reference.as_str()) {
            return Err(Self::usage(format!(
                "unknown reference density {:?}; valid references: {}",
                self.reference,
                REFERENCES.join(", ")
            )));
        }
        if self.set == "rule" && self.rule_file.is_none() {
            return Err(Self::usage("set = rule needs rule_file".into()));
        }
        if (self.epsilon.is_some() || self.window_rotation.is_some()) && !self.is_cms() {
            return Err(Self::usage(format!("epsilon and window_rotation only apply to ab, tt and gs, not {}", self.set)));
        }
        Ok(())
    }

    pub fn is_cms(&self) -> bool {
        CmsSpec::NAMES.contains(&self.set.as_str())
    }

    pub fn cms_spec(&self) -> Result<CmsSpec, Error> {
        let mut spec = CmsSpec::by_name(&self.set)?;
        if let Some(rot) = self.window_rotation {
            spec = spec.with_rotation(rot)?;
        }
        if let Some((a, b)) = self.epsilon {
            let e = spec.window.edge_length();
            spec = spec.with_shift(PlanarPoint::new(a * e, b * e))?;
        }
        Ok(spec)
    }

    pub fn generator(&self) -> Result<GeneratorConfig, Error> {
        self.validate()?;
        Ok(match self.set.as_str() {
            "z2" => GeneratorConfig::Lattice,
            "poisson" => GeneratorConfig::Poisson {
                intensity: self.intensity,
                seed: self.seed,
            },
            "lb" => GeneratorConfig::Substitution {
                rule: SubstitutionRule::lancon_billard(),
                steps: self.steps,
            },
            "chair" => GeneratorConfig::Substitution {
                rule: SubstitutionRule::chair(),
                steps: self.steps,
            },
            "rule" => {
                let path = self.rule_file.as_ref().expect("validated");
                let text = std::fs::read_to_string(path)?;
                GeneratorConfig::Substitution {
                    rule: SubstitutionRule::parse(&text)?,
                    steps: self.steps,
                }
            }
            _ => GeneratorConfig::Cms(self.cms_spec()?),
        })
    }

    pub fn visibility_method(&self, generator: &GeneratorConfig) -> Result<VisibilityMethod, Error> {
        let method = match self.visibility.as_str() {
            "auto" => generator.default_visibility(),
            "brute_force" => VisibilityMethod::BruteForce {
                angular_tolerance: self.angular_tolerance,
            },
            "gcd_z2" => VisibilityMethod::GcdZ2,
            name => match generator {
                GeneratorConfig::Cms(spec) => {
                    let m = VisibilityMethod::for_cms(spec);
                    if m.name() != name {
                        return Err(Self::usage(format!("{name} does not apply to {}; use {}", self.set, m.name())));
                    }
                    m
                }
                _ => return Err(Self::usage(format!("{name} needs one of the sets ab, tt, gs"))),
            },
        };
        if let (VisibilityMethod::GcdZ2, false) = (&method, self.set == "z2") {
            return Err(Self::usage(format!("gcd_z2 needs set z2, not {}", self.set)));
        }
        Ok(method)
    }

    pub fn pipeline(&self) -> Result<PipelineConfig, Error> {
        let generator = self.generator()?;
        let visibility = Some(self.visibility_method(&generator)?);
        Ok(PipelineConfig {
            generator,
            radius: self.radius,
            visibility,
            include_wraparound: self.wraparound,
            bin_width: self.bin_width,
            t_max: self.t_max,
        })
    }
}
