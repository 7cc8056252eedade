//! Finite circular patches of the point sets under study.

mod cms;
mod lattice;
mod poisson;
mod rulefile;
mod substitution;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::cyclo::{CycloTag, ModulePoint, PlanarPoint};
use crate::error::{Error, Result};

pub use cms::{cms_member, gen_cms, CmsSpec, ScaleFactor, DEFAULT_EPSILON};
pub use lattice::gen_lattice;
pub use poisson::gen_poisson;
pub use substitution::{
    gen_substitution, substitution_patch, Affine, Child, Patch, Prototile, SubstitutionRule, Tile,
};

/// Upper bound on the number of points any generator will materialise.
pub const POINT_BUDGET: u64 = 60_000_000;

/// Tolerance below which two float vertices are the same point.
pub const DEDUP_TOLERANCE: f64 = 1e-6;

/// The points of a patch, in one of three representations.
#[derive(Clone, Debug, PartialEq)]
pub enum Points {
    Exact { tag: CycloTag, points: Vec<ModulePoint> },
    Lattice(Vec<(i64, i64)>),
    Float(Vec<PlanarPoint>),
}

impl Points {
    pub fn len(&self) -> usize {
        match self {
            Points::Exact { points, .. } => points.len(),
            Points::Lattice(p) => p.len(),
            Points::Float(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Points::Exact { .. } => "exact",
            Points::Lattice(_) => "lattice",
            Points::Float(_) => "float",
        }
    }

    /// Planar position of point `i` (direct embedding for module points).
    pub fn position(&self, i: usize) -> PlanarPoint {
        match self {
            Points::Exact { points, .. } => points[i].embed_direct(),
            Points::Lattice(p) => PlanarPoint::new(p[i].0 as f64, p[i].1 as f64),
            Points::Float(p) => p[i],
        }
    }

    pub fn positions(&self) -> Vec<PlanarPoint> {
        (0..self.len()).map(|i| self.position(i)).collect()
    }

    fn select(&self, keep: &[bool]) -> Points {
        fn pick<T: Copy>(v: &[T], keep: &[bool]) -> Vec<T> {
            v.iter().zip(keep).filter(|(_, &k)| k).map(|(p, _)| *p).collect()
        }
        match self {
            Points::Exact { tag, points } => Points::Exact {
                tag: *tag,
                points: pick(points, keep),
            },
            Points::Lattice(p) => Points::Lattice(pick(p, keep)),
            Points::Float(p) => Points::Float(pick(p, keep)),
        }
    }
}

/// Where a point set came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub generator: String,
    pub radius: f64,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(generator: impl Into<String>, radius: f64) -> Self {
        Provenance {
            generator: generator.into(),
            radius,
            seed: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// A finite patch with its provenance and reference point `x₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    pub points: Points,
    pub provenance: Provenance,
    pub reference: PlanarPoint,
}

impl PointSet {
    pub fn new(points: Points, provenance: Provenance) -> Self {
        PointSet {
            points,
            provenance,
            reference: PlanarPoint::ORIGIN,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Moves the reference point to `p`, which must be a member of the set.
    pub fn with_reference(mut self, p: PlanarPoint) -> Result<Self> {
        self.reference = p;
        self.reference_index()
            .map(|_| self)
            .ok_or_else(|| Error::usage(format!("reference point ({}, {}) is not in the set", p.x, p.y)))
    }

    /// Index of the member that coincides with the reference point.
    pub fn reference_index(&self) -> Option<usize> {
        let r = self.reference;
        match &self.points {
            Points::Lattice(p) => {
                if r.x.fract() != 0.0 || r.y.fract() != 0.0 {
                    return None;
                }
                let key = (r.x as i64, r.y as i64);
                p.iter().position(|&q| q == key)
            }
            _ => (0..self.len()).find(|&i| (self.points.position(i) - r).norm() <= 1e-9),
        }
    }

    /// Keeps the points whose mask entry is `true`.
    pub fn select(&self, keep: &[bool]) -> Result<PointSet> {
        if keep.len() != self.len() {
            return Err(Error::usage(format!(
                "mask has {} entries for {} points",
                keep.len(),
                self.len()
            )));
        }
        Ok(PointSet {
            points: self.points.select(keep),
            provenance: self.provenance.clone(),
            reference: self.reference,
        })
    }

    /// Restriction to the closed ball of radius `r` around the reference point.
    pub fn crop(&self, r: f64) -> PointSet {
        let r2 = r * r;
        let keep: Vec<bool> = (0..self.len())
            .map(|i| (self.points.position(i) - self.reference).norm_sq() <= r2)
            .collect();
        let mut out = self.select(&keep).expect("mask length matches");
        out.provenance.radius = r.min(self.provenance.radius);
        out
    }

    /// Provenance lines written ahead of CSV data.
    pub fn header_lines(&self) -> Vec<String> {
        let p = &self.provenance;
        let mut out = vec![
            format!("generator={}", p.generator),
            format!("kind={}", self.points.kind_name()),
            format!("radius={}", p.radius),
            format!("reference={},{}", self.reference.x, self.reference.y),
            format!("count={}", self.len()),
        ];
        if let Some(s) = p.seed {
            out.push(format!("seed={s}"));
        }
        for (k, v) in &p.params {
            out.push(format!("param.{k}={v}"));
        }
        out
    }

    /// Writes the set as CSV with `#` provenance lines. `extra` adds
    /// leading comment lines; `flags` adds a boolean `visible` column.
    pub fn write_csv<W: Write>(&self, mut w: W, extra: &[String], flags: Option<&[bool]>) -> Result<()> {
        if let Some(f) = flags {
            if f.len() != self.len() {
                return Err(Error::usage("flag column length does not match the point count"));
            }
        }
        let mut buf = String::new();
        for line in extra.iter().chain(self.header_lines().iter()) {
            let _ = writeln!(buf, "# {line}");
        }
        let tail = if flags.is_some() { ",visible" } else { "" };
        match &self.points {
            Points::Exact { .. } => {
                let _ = writeln!(buf, "x1_a,x1_b,x2_a,x2_b,module{tail}");
            }
            _ => {
                let _ = writeln!(buf, "x,y{tail}");
            }
        }
        for i in 0..self.len() {
            match &self.points {
                Points::Exact { tag, points } => {
                    let c = points[i].coeffs();
                    let _ = write!(buf, "{},{},{},{},{}", c[0], c[1], c[2], c[3], tag.n());
                }
                Points::Lattice(p) => {
                    let _ = write!(buf, "{},{}", p[i].0, p[i].1);
                }
                Points::Float(p) => {
                    let _ = write!(buf, "{:?},{:?}", p[i].x, p[i].y);
                }
            }
            if let Some(f) = flags {
                let _ = write!(buf, ",{}", f[i]);
            }
            buf.push('\n');
        }
        w.write_all(buf.as_bytes())?;
        Ok(())
    }

    /// Parses the CSV layout produced by [`PointSet::write_csv`].
    pub fn read_csv(text: &str) -> Result<PointSet> {
        let mut meta = BTreeMap::new();
        let mut header: Option<(usize, Vec<String>)> = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if let Some((k, v)) = c.trim().split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if header.is_none() {
                header = Some((lineno, line.split(',').map(|s| s.trim().to_string()).collect()));
                continue;
            }
            rows.push((lineno, line));
        }
        let (hline, cols) = header.ok_or_else(|| Error::parse(1, "missing CSV header row"))?;
        let exact = cols.first().map(|c| c == "x1_a").unwrap_or(false);
        let ncols = if exact { 5 } else { 2 };
        let expected: &[&str] = if exact {
            &["x1_a", "x1_b", "x2_a", "x2_b", "module"]
        } else {
            &["x", "y"]
        };
        if cols.len() < ncols || cols[..ncols] != *expected {
            return Err(Error::parse(hline, format!("unexpected header {:?}", cols)));
        }
        let kind = meta.get("kind").map(String::as_str).unwrap_or(if exact { "exact" } else { "float" });
        let field = |lineno: usize, s: &str| -> Result<i64> {
            s.trim()
                .parse::<i64>()
                .map_err(|e| Error::parse(lineno, format!("bad integer {s:?}: {e}")))
        };
        let points = match kind {
            "exact" => {
                let mut tag = None;
                let mut pts = Vec::with_capacity(rows.len());
                for &(lineno, line) in &rows {
                    let f: Vec<&str> = line.split(',').collect();
                    if f.len() < 5 {
                        return Err(Error::parse(lineno, "expected 5 columns"));
                    }
                    let n = field(lineno, f[4])?;
                    let t = CycloTag::from_order(n as u32).map_err(|e| Error::parse(lineno, e.to_string()))?;
                    if *tag.get_or_insert(t) != t {
                        return Err(Error::parse(lineno, "mixed module tags"));
                    }
                    let c = [field(lineno, f[0])?, field(lineno, f[1])?, field(lineno, f[2])?, field(lineno, f[3])?];
                    pts.push(ModulePoint::from_coeffs(t, c));
                }
                let tag = match (tag, meta.get("param.module")) {
                    (Some(t), _) => t,
                    (None, Some(n)) => CycloTag::from_order(n.parse().unwrap_or(0))?,
                    (None, None) => CycloTag::Eight,
                };
                Points::Exact { tag, points: pts }
            }
            "lattice" => {
                let mut pts = Vec::with_capacity(rows.len());
                for &(lineno, line) in &rows {
                    let f: Vec<&str> = line.split(',').collect();
                    if f.len() < 2 {
                        return Err(Error::parse(lineno, "expected 2 columns"));
                    }
                    pts.push((field(lineno, f[0])?, field(lineno, f[1])?));
                }
                Points::Lattice(pts)
            }
            "float" => {
                let mut pts = Vec::with_capacity(rows.len());
                for &(lineno, line) in &rows {
                    let f: Vec<&str> = line.split(',').collect();
                    if f.len() < 2 {
                        return Err(Error::parse(lineno, "expected 2 columns"));
                    }
                    let g = |s: &str| -> Result<f64> {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::parse(lineno, format!("bad number {s:?}: {e}")))
                    };
                    pts.push(PlanarPoint::new(g(f[0])?, g(f[1])?));
                }
                Points::Float(pts)
            }
            other => return Err(Error::parse(1, format!("unknown point kind {other:?}"))),
        };
        let mut prov = Provenance::new(
            meta.get("generator").cloned().unwrap_or_else(|| "file".into()),
            meta.get("radius").and_then(|r| r.parse().ok()).unwrap_or(f64::INFINITY),
        );
        prov.seed = meta.get("seed").and_then(|s| s.parse().ok());
        for (k, v) in &meta {
            if let Some(key) = k.strip_prefix("param.") {
                prov.params.insert(key.to_string(), v.clone());
            }
        }
        let reference = match meta.get("reference") {
            Some(r) => {
                let (a, b) = r
                    .split_once(',')
                    .ok_or_else(|| Error::parse(1, format!("bad reference {r:?}")))?;
                let a: f64 = a.trim().parse().map_err(|_| Error::parse(1, "bad reference x"))?;
                let b: f64 = b.trim().parse().map_err(|_| Error::parse(1, "bad reference y"))?;
                PlanarPoint::new(a, b)
            }
            None => PlanarPoint::ORIGIN,
        };
        Ok(PointSet {
            points,
            provenance: prov,
            reference,
        })
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::usage(format!("radius must be positive and finite, got {r}")))
    }
}

pub(crate) fn check_budget(what: &str, estimate: f64) -> Result<()> {
    if estimate > POINT_BUDGET as f64 {
        Err(Error::Resource {
            what: what.to_string(),
            estimate: estimate.min(u64::MAX as f64) as u64,
            budget: POINT_BUDGET,
        })
    } else {
        Ok(())
    }
}
