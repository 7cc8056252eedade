//! Visible points → sorted angles → normalised gaps → histogram.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::cyclo::PlanarPoint;
use crate::error::{Error, Result};
use crate::generators::{
    gen_cms, gen_lattice, gen_poisson, gen_substitution, CmsSpec, PointSet, Points, SubstitutionRule,
};
use crate::visibility::{visible, VisibilityMethod};

/// Two angles closer than this signal a visibility failure.
pub const DUPLICATE_ANGLE: f64 = 1e-12;

/// Sorted directions of the visible points, in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularProfile {
    pub angles: Vec<f64>,
    pub radius: f64,
}

impl AngularProfile {
    pub fn n(&self) -> usize {
        self.angles.len()
    }
}

/// Consecutive angle differences scaled by `n/(2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapList {
    pub gaps: Vec<f64>,
    pub normalization: f64,
    pub include_wraparound: bool,
}

fn full_angle(y: f64, x: f64) -> f64 {
    let a = y.atan2(x);
    if a < 0.0 {
        let b = a + TAU;
        if b >= TAU {
            0.0
        } else {
            b
        }
    } else {
        a
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Directions of all points except the reference, sorted ascending.
///
/// Lattice offsets are reduced to primitive vectors first, so the result
/// depends only on the rays and not on the lengths.
pub fn project_angles(ps: &PointSet) -> Result<AngularProfile> {
    let c = ps.reference;
    let mut angles: Vec<f64> = match &ps.points {
        Points::Lattice(p) => {
            if c.x.fract() != 0.0 || c.y.fract() != 0.0 {
                return Err(Error::usage("lattice reference point must be an integer pair"));
            }
            let (x0, y0) = (c.x as i64, c.y as i64);
            p.par_iter()
                .filter_map(|&(a, b)| {
                    let (da, db) = (a - x0, b - y0);
                    if da == 0 && db == 0 {
                        return None;
                    }
                    let g = gcd_u64(da.unsigned_abs(), db.unsigned_abs()) as i64;
                    Some(full_angle((db / g) as f64, (da / g) as f64))
                })
                .collect()
        }
        points => (0..points.len())
            .into_par_iter()
            .filter_map(|i| {
                let d: PlanarPoint = points.position(i) - c;
                if d.x == 0.0 && d.y == 0.0 {
                    None
                } else {
                    Some(full_angle(d.y, d.x))
                }
            })
            .collect(),
    };
    angles.par_sort_unstable_by(f64::total_cmp);
    for w in angles.windows(2) {
        if w[1] - w[0] <= DUPLICATE_ANGLE {
            return Err(Error::Integrity(format!(
                "two visible points share the direction {:.15} (difference {:.3e})",
                w[0],
                w[1] - w[0]
            )));
        }
    }
    if angles.len() > 1 && angles[0] + TAU - angles[angles.len() - 1] <= DUPLICATE_ANGLE {
        return Err(Error::Integrity("two visible points share the direction 0".into()));
    }
    Ok(AngularProfile {
        angles,
        radius: ps.provenance.radius,
    })
}

/// `d_i = (φ_{i+1} - φ_i)·n/(2π)`, optionally closing the circle.
pub fn normalized_gaps(ap: &AngularProfile, include_wraparound: bool) -> Result<GapList> {
    let n = ap.n();
    if n < 2 {
        return Err(Error::usage(format!("need at least 2 angles for gaps, got {n}")));
    }
    let k = n as f64 / TAU;
    let mut gaps: Vec<f64> = ap.angles.windows(2).map(|w| (w[1] - w[0]) * k).collect();
    if include_wraparound {
        gaps.push((ap.angles[0] + TAU - ap.angles[n - 1]) * k);
    }
    Ok(GapList {
        gaps,
        normalization: k,
        include_wraparound,
    })
}

/// Fixed-width histogram of gaps on `[0, t_max)` with an overflow count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpacingHistogram {
    pub bin_width: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub counts: Vec<u64>,
    pub overflow: u64,
    pub total: u64,
    pub metadata: BTreeMap<String, String>,
}

impl SpacingHistogram {
    pub fn empty(bin_width: f64, t_max: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) || !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::usage(format!(
                "histogram needs positive bin width and range, got {bin_width} and {t_max}"
            )));
        }
        let ratio = t_max / bin_width;
        let bins = if (ratio - ratio.round()).abs() < 1e-9 {
            ratio.round()
        } else {
            ratio.ceil()
        } as usize;
        Ok(SpacingHistogram {
            bin_width,
            t_min: 0.0,
            t_max,
            counts: vec![0; bins],
            overflow: 0,
            total: 0,
            metadata: BTreeMap::new(),
        })
    }

    pub fn add(&mut self, g: f64) {
        self.total += 1;
        if g >= self.t_max || !(g >= 0.0) {
            self.overflow += 1;
            return;
        }
        let k = ((g / self.bin_width) as usize).min(self.counts.len() - 1);
        self.counts[k] += 1;
    }

    pub fn bin_left(&self, k: usize) -> f64 {
        k as f64 * self.bin_width
    }

    pub fn bin_right(&self, k: usize) -> f64 {
        ((k + 1) as f64 * self.bin_width).min(self.t_max)
    }

    /// `count / (total · bin width)` per bin.
    pub fn density(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        (0..self.counts.len())
            .map(|k| self.counts[k] as f64 / (t * (self.bin_right(k) - self.bin_left(k))))
            .collect()
    }

    pub fn in_range_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            (self.total - self.overflow) as f64 / self.total as f64
        }
    }

    /// Sum of two histograms with identical binning.
    pub fn merge(&self, other: &SpacingHistogram) -> Result<SpacingHistogram> {
        if self.bin_width != other.bin_width || self.t_max != other.t_max {
            return Err(Error::usage("cannot merge histograms with different binning"));
        }
        let mut out = self.clone();
        for (a, b) in out.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        out.overflow += other.overflow;
        out.total += other.total;
        Ok(out)
    }

    /// CSV with columns `bin_left,bin_right,count,density`.
    pub fn to_csv(&self, header: &[String]) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        for line in header {
            let _ = writeln!(s, "# {line}");
        }
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "# total={}", self.total);
        let _ = writeln!(s, "# overflow={}", self.overflow);
        let _ = writeln!(s, "bin_left,bin_right,count,density");
        let d = self.density();
        for (k, (&c, dk)) in self.counts.iter().zip(d).enumerate() {
            let _ = writeln!(s, "{:?},{:?},{},{:?}", self.bin_left(k), self.bin_right(k), c, dk);
        }
        s
    }

    /// Parses [`SpacingHistogram::to_csv`] output.
    pub fn from_csv(text: &str) -> Result<SpacingHistogram> {
        let mut meta = BTreeMap::new();
        let mut rows = Vec::new();
        let mut seen_header = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if let Some((k, v)) = c.trim().split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if !seen_header {
                if line != "bin_left,bin_right,count,density" {
                    return Err(Error::parse(i + 1, format!("unexpected header {line:?}")));
                }
                seen_header = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(Error::parse(i + 1, "expected 4 columns"));
            }
            let l: f64 = f[0].parse().map_err(|_| Error::parse(i + 1, "bad bin_left"))?;
            let r: f64 = f[1].parse().map_err(|_| Error::parse(i + 1, "bad bin_right"))?;
            let c: u64 = f[2].parse().map_err(|_| Error::parse(i + 1, "bad count"))?;
            rows.push((l, r, c));
        }
        if rows.is_empty() {
            return Err(Error::parse(1, "histogram has no bins"));
        }
        let width = rows[0].1 - rows[0].0;
        let t_max = rows[rows.len() - 1].1;
        let mut h = SpacingHistogram::empty(width, t_max)?;
        if h.counts.len() != rows.len() {
            return Err(Error::parse(1, "bins are not evenly spaced"));
        }
        for (k, &(_, _, c)) in rows.iter().enumerate() {
            h.counts[k] = c;
        }
        let get = |k: &str| -> Result<u64> {
            meta.get(k)
                .ok_or_else(|| Error::parse(1, format!("missing `# {k}=` line")))?
                .parse()
                .map_err(|_| Error::parse(1, format!("bad {k}")))
        };
        h.total = get("total")?;
        h.overflow = get("overflow")?;
        meta.remove("total");
        meta.remove("overflow");
        h.metadata = meta;
        Ok(h)
    }
}

pub fn histogram(gl: &GapList, bin_width: f64, t_max: f64) -> Result<SpacingHistogram> {
    let mut h = SpacingHistogram::empty(bin_width, t_max)?;
    for &g in &gl.gaps {
        h.add(g);
    }
    h.metadata
        .insert("include_wraparound".into(), gl.include_wraparound.to_string());
    Ok(h)
}

/// Which point set to generate.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorConfig {
    Lattice,
    Poisson { intensity: f64, seed: u64 },
    Cms(CmsSpec),
    Substitution { rule: SubstitutionRule, steps: u32 },
}

impl GeneratorConfig {
    pub fn generate(&self, r: f64) -> Result<PointSet> {
        match self {
            GeneratorConfig::Lattice => gen_lattice(r),
            GeneratorConfig::Poisson { intensity, seed } => gen_poisson(r, *intensity, *seed),
            GeneratorConfig::Cms(spec) => gen_cms(spec, r),
            GeneratorConfig::Substitution { rule, steps } => gen_substitution(rule, *steps, r),
        }
    }

    /// The fast visibility test for this set, or the brute-force oracle.
    pub fn default_visibility(&self) -> VisibilityMethod {
        match self {
            GeneratorConfig::Lattice => VisibilityMethod::GcdZ2,
            GeneratorConfig::Cms(spec) => VisibilityMethod::for_cms(spec),
            _ => VisibilityMethod::brute_force(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub generator: GeneratorConfig,
    pub radius: f64,
    pub visibility: Option<VisibilityMethod>,
    pub include_wraparound: bool,
    pub bin_width: f64,
    pub t_max: f64,
}

impl PipelineConfig {
    pub fn new(generator: GeneratorConfig, radius: f64) -> Self {
        PipelineConfig {
            generator,
            radius,
            visibility: None,
            include_wraparound: false,
            bin_width: 0.01,
            t_max: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub points: usize,
    pub visible: usize,
    pub gaps: usize,
    pub min_gap: f64,
    pub max_gap: f64,
    pub mean_gap: f64,
    pub in_range_fraction: f64,
}

impl Summary {
    pub fn of(points: usize, visible: usize, gl: &GapList, h: &SpacingHistogram) -> Summary {
        let g = &gl.gaps;
        Summary {
            points,
            visible,
            gaps: g.len(),
            min_gap: g.iter().copied().fold(f64::INFINITY, f64::min),
            max_gap: g.iter().copied().fold(0.0, f64::max),
            mean_gap: g.iter().sum::<f64>() / g.len() as f64,
            in_range_fraction: h.in_range_fraction(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub visible: PointSet,
    pub gaps: GapList,
    pub histogram: SpacingHistogram,
    pub summary: Summary,
}

/// generate → visible → project → normalise → histogram.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let ps = cfg.generator.generate(cfg.radius)?;
    let method = cfg
        .visibility
        .clone()
        .unwrap_or_else(|| cfg.generator.default_visibility());
    let vis = visible(&ps, &method)?;
    let ap = project_angles(&vis)?;
    let gaps = normalized_gaps(&ap, cfg.include_wraparound)?;
    let mut h = histogram(&gaps, cfg.bin_width, cfg.t_max)?;
    h.metadata.insert("generator".into(), ps.provenance.generator.clone());
    h.metadata.insert("radius".into(), cfg.radius.to_string());
    h.metadata.insert("visibility".into(), method.name().into());
    h.metadata.insert("visible".into(), vis.len().to_string());
    let summary = Summary::of(ps.len(), vis.len(), &gaps, &h);
    Ok(PipelineOutput {
        visible: vis,
        gaps,
        histogram: h,
        summary,
    })
}
