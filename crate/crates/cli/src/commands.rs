use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use radproj::analysis::{
    compare as compare_histogram, density_exp, density_z2_tail, equal_count_bins, ks_distance, tail_fit_bins,
    Comparison, ExpDensity, ReferenceDensity, TailBin, TailFit, TailFitOptions, Z2Density, MIN_TAIL_SAMPLES,
};
use radproj::generators::{PointSet, Points};
use radproj::pipeline::{histogram, normalized_gaps, project_angles, GapList, SpacingHistogram, Summary};
use radproj::visibility::{visibility_mask, visible as visible_points, VisibilityMethod};
use radproj::Error;

use crate::config::RunConfig;
use crate::svg::histogram_svg;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        None => std::io::stdout().write_all(bytes).context("writing to standard output"),
        Some(p) if p.as_os_str() == "-" => std::io::stdout().write_all(bytes).context("writing to standard output"),
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(Error::from)
        .with_context(|| format!("reading {}", path.display()))
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value).context("serialising JSON")?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn reference_density(cfg: &RunConfig) -> Result<Box<dyn ReferenceDensity>> {
    Ok(match cfg.reference.as_str() {
        "exp" => Box::new(ExpDensity::new(cfg.lambda)?),
        _ => Box::new(Z2Density),
    })
}

fn fit_options(cfg: &RunConfig) -> TailFitOptions {
    TailFitOptions {
        min_bin_count: cfg.fit_min_bin_count,
        extra_terms: cfg.fit_extra_terms,
        ..TailFitOptions::default()
    }
}

pub fn generate(cfg: &RunConfig, output: Option<&Path>) -> Result<()> {
    let generator = cfg.generator().context("configuration")?;
    let ps = generator.generate(cfg.radius).context("generate")?;
    let mut buf = Vec::new();
    ps.write_csv(&mut buf, &cfg.header_lines(), None)?;
    write_output(output, &buf)
}

/// Visibility method for points read from a file.
fn method_for_input(cfg: &RunConfig, ps: &PointSet) -> Result<VisibilityMethod> {
    if cfg.visibility != "auto" {
        let generator = cfg.generator().context("configuration")?;
        return Ok(cfg.visibility_method(&generator)?);
    }
    Ok(match &ps.points {
        Points::Lattice(_) if cfg.set == "z2" => VisibilityMethod::GcdZ2,
        Points::Exact { tag, .. } if cfg.is_cms() => {
            let spec = cfg.cms_spec()?;
            if spec.tag != *tag {
                return Err(Error::Usage(format!("input points are not in the module of {}", cfg.set)).into());
            }
            VisibilityMethod::for_cms(&spec)
        }
        _ => VisibilityMethod::BruteForce {
            angular_tolerance: cfg.angular_tolerance,
        },
    })
}

pub fn visible(cfg: &RunConfig, input: Option<&Path>, flags: bool, output: Option<&Path>) -> Result<()> {
    let (ps, method) = match input {
        Some(path) => {
            let ps = PointSet::read_csv(&read_input(path)?).with_context(|| format!("parsing {}", path.display()))?;
            let m = method_for_input(cfg, &ps)?;
            (ps, m)
        }
        None => {
            let generator = cfg.generator().context("configuration")?;
            let m = cfg.visibility_method(&generator)?;
            (generator.generate(cfg.radius).context("generate")?, m)
        }
    };
    let mut header = cfg.header_lines();
    header.push(format!("visibility={}", method.name()));
    let mut buf = Vec::new();
    if flags {
        let mask = visibility_mask(&ps, &method).context("visibility")?;
        ps.write_csv(&mut buf, &header, Some(&mask))?;
    } else {
        visible_points(&ps, &method).context("visibility")?.write_csv(&mut buf, &header, None)?;
    }
    write_output(output, &buf)
}

pub struct PipelineOutputs {
    pub prefix: PathBuf,
    pub gaps: bool,
    pub svg: bool,
    pub timestamp: bool,
}

impl PipelineOutputs {
    fn path(&self, suffix: &str) -> PathBuf {
        let mut s = self.prefix.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    }
}

#[derive(Serialize, Debug)]
struct PipelineReport {
    version: String,
    config: BTreeMap<String, String>,
    visibility: String,
    summary: Summary,
    comparison: Comparison,
    /// KS distance of the raw gaps against the reference.
    ks_gaps: f64,
    tail_fit: Option<TailFit>,
    tail_fit_error: Option<String>,
}

fn gaps_csv(gl: &GapList, header: &[String]) -> String {
    let mut s = String::new();
    for line in header {
        let _ = writeln!(s, "# {line}");
    }
    let _ = writeln!(s, "# normalization={:?}", gl.normalization);
    let _ = writeln!(s, "# include_wraparound={}", gl.include_wraparound);
    let _ = writeln!(s, "# count={}", gl.gaps.len());
    s.push_str("gap\n");
    for g in &gl.gaps {
        let _ = writeln!(s, "{g:?}");
    }
    s
}

fn parse_gaps(text: &str) -> Result<(GapList, Vec<String>), Error> {
    let mut header = Vec::new();
    let mut gaps = Vec::new();
    let mut seen = false;
    let mut normalization = 1.0;
    let mut wrap = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if let Some(v) = c.strip_prefix("normalization=") {
                normalization = v.parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("bad normalization {v:?}"),
                })?;
            } else if let Some(v) = c.strip_prefix("include_wraparound=") {
                wrap = v == "true";
            }
            header.push(c.to_string());
            continue;
        }
        if !seen {
            if line != "gap" {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected header \"gap\", got {line:?}"),
                });
            }
            seen = true;
            continue;
        }
        let g: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("bad gap value {line:?}"),
        })?;
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("gap must be a finite non-negative number, got {line}"),
            });
        }
        gaps.push(g);
    }
    if !seen {
        return Err(Error::Parse {
            line: 1,
            msg: "missing \"gap\" header row".into(),
        });
    }
    Ok((
        GapList {
            gaps,
            normalization,
            include_wraparound: wrap,
        },
        header,
    ))
}

pub fn pipeline(cfg: &RunConfig, out: &PipelineOutputs) -> Result<()> {
    let pc = cfg.pipeline().context("configuration")?;
    let method = pc.visibility.clone().unwrap_or_else(|| pc.generator.default_visibility());
    let ps = pc.generator.generate(pc.radius).context("stage generate")?;
    let vis = visible_points(&ps, &method).context("stage visibility")?;
    let ap = project_angles(&vis).context("stage projection")?;
    let gl = normalized_gaps(&ap, pc.include_wraparound).context("stage gaps")?;
    let mut h = histogram(&gl, pc.bin_width, pc.t_max).context("stage histogram")?;
    h.metadata.insert("generator".into(), ps.provenance.generator.clone());
    h.metadata.insert("visibility".into(), method.name().into());
    h.metadata.insert("visible".into(), vis.len().to_string());
    let summary = Summary::of(ps.len(), vis.len(), &gl, &h);

    let reference = reference_density(cfg)?;
    let comparison = compare_histogram(&h, reference.as_ref());
    let ks_gaps = ks_distance(&gl.gaps, reference.as_ref());
    let (tail_fit, tail_fit_error) = match radproj::analysis::tail_fit_with(&gl.gaps, cfg.fit_lo, cfg.fit_hi, &fit_options(cfg)) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let header = cfg.header_lines();
    let report = PipelineReport {
        version: VERSION.into(),
        config: cfg.to_map(),
        visibility: method.name().into(),
        summary,
        comparison,
        ks_gaps,
        tail_fit,
        tail_fit_error,
    };

    write_output(Some(&out.path(".config")), cfg.to_text().as_bytes())?;
    write_output(Some(&out.path(".hist.csv")), h.to_csv(&header).as_bytes())?;
    write_output(Some(&out.path(".summary.json")), &json(&report)?)?;
    if out.gaps {
        write_output(Some(&out.path(".gaps.csv")), gaps_csv(&gl, &header).as_bytes())?;
    }
    if out.svg {
        let mut comments = header.clone();
        if out.timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            comments.push(format!("generated at unix time {secs}"));
        }
        write_output(
            Some(&out.path(".svg")),
            histogram_svg(&h, reference.as_ref(), &comments).as_bytes(),
        )?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct InputInfo {
    kind: String,
    header: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct FitReport {
    version: String,
    config: BTreeMap<String, String>,
    input: InputInfo,
    fit: TailFit,
}

/// Merges consecutive histogram bins inside `[lo, hi)` until each holds at least `min_count` gaps.
fn histogram_tail_bins(h: &SpacingHistogram, lo: f64, hi: f64, min_count: usize) -> Result<Vec<TailBin>, Error> {
    let total = h.total as f64;
    let mut bins: Vec<TailBin> = Vec::new();
    let mut open: Option<(f64, f64, u64)> = None;
    let mut in_range = 0u64;
    for k in 0..h.counts.len() {
        let (l, r) = (h.bin_left(k), h.bin_right(k));
        if l < lo - 1e-12 || r > hi + 1e-12 {
            continue;
        }
        in_range += h.counts[k];
        let (start, _, c) = open.unwrap_or((l, r, 0));
        let c = c + h.counts[k];
        if c as usize >= min_count {
            bins.push(TailBin {
                lo: start,
                hi: r,
                count: c,
                density: c as f64 / (total * (r - start)),
            });
            open = None;
        } else {
            open = Some((start, r, c));
        }
    }
    if let (Some((_, r, c)), Some(last)) = (open, bins.last_mut()) {
        last.count += c;
        last.hi = r;
        last.density = last.count as f64 / (total * (last.hi - last.lo));
    }
    if (in_range as usize) < MIN_TAIL_SAMPLES {
        return Err(Error::Usage(format!(
            "only {in_range} gaps in [{lo}, {hi}) of the histogram, need at least {MIN_TAIL_SAMPLES}"
        )));
    }
    Ok(bins)
}

pub fn fit(cfg: &RunConfig, input: &Path, output: Option<&Path>) -> Result<()> {
    let text = read_input(input)?;
    if text.trim_start().starts_with('{') {
        let report: FitReport = serde_json::from_str(&text)
            .map_err(|e| Error::Parse {
                line: e.line(),
                msg: e.to_string(),
            })
            .with_context(|| format!("parsing {}", input.display()))?;
        return write_output(output, &json(&report)?);
    }
    if !(cfg.fit_lo > 0.0 && cfg.fit_hi > cfg.fit_lo) {
        return Err(Error::Usage(format!("empty fit range [{}, {}]", cfg.fit_lo, cfg.fit_hi)).into());
    }
    let opts = fit_options(cfg);
    let is_histogram = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.starts_with("bin_left"))
        .unwrap_or(false);
    let (kind, header, bins) = if is_histogram {
        let h = SpacingHistogram::from_csv(&text).with_context(|| format!("parsing {}", input.display()))?;
        let header = h.metadata.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let bins = histogram_tail_bins(&h, cfg.fit_lo, cfg.fit_hi, cfg.fit_min_bin_count)?;
        ("histogram", header, bins)
    } else {
        let (gl, header) = parse_gaps(&text).with_context(|| format!("parsing {}", input.display()))?;
        let bins = equal_count_bins(&gl.gaps, cfg.fit_lo, cfg.fit_hi, cfg.fit_min_bin_count)?;
        ("gaps", header, bins)
    };
    let fit = tail_fit_bins(&bins, &opts)?;
    let report = FitReport {
        version: VERSION.into(),
        config: cfg.to_map(),
        input: InputInfo {
            kind: kind.into(),
            header,
        },
        fit,
    };
    write_output(output, &json(&report)?)
}

#[derive(Serialize, Debug)]
struct ComparisonReport {
    version: String,
    config: BTreeMap<String, String>,
    input: InputInfo,
    comparison: Comparison,
    /// KS distance of the raw gaps, when the input holds gaps.
    ks_gaps: Option<f64>,
}

pub fn compare(cfg: &RunConfig, input: &Path, output: Option<&Path>) -> Result<()> {
    let text = read_input(input)?;
    let reference = reference_density(cfg)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    let report = if first.starts_with("bin_left") {
        let h = SpacingHistogram::from_csv(&text).with_context(|| format!("parsing {}", input.display()))?;
        ComparisonReport {
            version: VERSION.into(),
            config: cfg.to_map(),
            input: InputInfo {
                kind: "histogram".into(),
                header: h.metadata.iter().map(|(k, v)| format!("{k}={v}")).collect(),
            },
            comparison: compare_histogram(&h, reference.as_ref()),
            ks_gaps: None,
        }
    } else {
        let (gl, header) = parse_gaps(&text).with_context(|| format!("parsing {}", input.display()))?;
        let h = histogram(&gl, cfg.bin_width, cfg.t_max)?;
        ComparisonReport {
            version: VERSION.into(),
            config: cfg.to_map(),
            input: InputInfo {
                kind: "gaps".into(),
                header,
            },
            comparison: compare_histogram(&h, reference.as_ref()),
            ks_gaps: Some(ks_distance(&gl.gaps, reference.as_ref())),
        }
    };
    write_output(output, &json(&report)?)
}

pub fn density(cfg: &RunConfig, from: f64, to: f64, step: f64, output: Option<&Path>) -> Result<()> {
    if !(step > 0.0 && to >= from && from >= 0.0 && from.is_finite() && to.is_finite()) {
        return Err(Error::Usage(format!("invalid grid from {from} to {to} step {step}")).into());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(Error::Usage(format!("grid of {n} points is too large")).into());
    }
    let mut s = String::new();
    for line in cfg.header_lines() {
        let _ = writeln!(s, "# {line}");
    }
    s.push_str("# g: limiting gap density of the visible points of Z2\n");
    s.push_str("# tail: 36/(pi^4 t^3) + 162/(pi^6 t^4)\n");
    let _ = writeln!(s, "# exp: lambda exp(-lambda t) with lambda={:?}", cfg.lambda);
    s.push_str("t,g,tail,exp\n");
    for i in 0..=n {
        let t = from + step * i as f64;
        let g = Z2Density.pdf(t);
        let tail = if t > 0.0 { density_z2_tail(1.0 / t) } else { f64::INFINITY };
        let e = density_exp(cfg.lambda, t)?;
        let _ = writeln!(s, "{t:?},{g:?},{tail:?},{e:?}");
    }
    write_output(output, s.as_bytes())
}
