use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::cyclo::{CycloTag, ModulePoint, PlanarPoint, Window};
use crate::error::{Error, Result};
use crate::ring::{QuadInt, RingTag};

use super::{check_budget, check_radius, PointSet, Points, Provenance};

/// Default window shift for the 10- and 12-fold sets, in units of the
/// window edge length. It moves the window off the singular position.
pub const DEFAULT_EPSILON: (f64, f64) = (1e-4, 2e-4);

/// A rescaling factor used by the visibility tests, with its exact form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleFactor {
    pub symbol: &'static str,
    pub exact: &'static str,
    pub value: f64,
}

/// A cyclotomic model set: module points whose star image lies in `window`.
#[derive(Clone, Debug, PartialEq)]
pub struct CmsSpec {
    pub name: String,
    pub tag: CycloTag,
    pub window: Window,
    pub scale_factors: Vec<ScaleFactor>,
}

impl CmsSpec {
    /// Ammann–Beenker: octagon with unit edge, unshifted.
    pub fn ammann_beenker() -> CmsSpec {
        CmsSpec {
            name: "ab".into(),
            tag: CycloTag::Eight,
            window: Window::with_params(8, 1.0, PI / 8.0, PlanarPoint::ORIGIN).expect("valid window"),
            scale_factors: vec![ScaleFactor {
                symbol: "λ_sm",
                exact: "1+√2",
                value: 1.0 + 2f64.sqrt(),
            }],
        }
    }

    /// Tübingen triangle: decagon with edge `√((τ+2)/5)`, shifted by ε.
    pub fn tubingen_triangle() -> CmsSpec {
        let tau = RingTag::GoldenTau.omega();
        let edge = ((tau + 2.0) / 5.0).sqrt();
        CmsSpec {
            name: "tt".into(),
            tag: CycloTag::Five,
            window: Window::with_params(10, edge, PI / 10.0, default_shift(edge)).expect("valid window"),
            scale_factors: vec![ScaleFactor {
                symbol: "τ",
                exact: "(1+√5)/2",
                value: tau,
            }],
        }
    }

    /// Gähler's shield: dodecagon with unit edge, shifted by ε.
    pub fn gahler_shield() -> CmsSpec {
        let s3 = 3f64.sqrt();
        CmsSpec {
            name: "gs".into(),
            tag: CycloTag::Twelve,
            window: Window::with_params(12, 1.0, PI / 12.0, default_shift(1.0)).expect("valid window"),
            scale_factors: vec![
                ScaleFactor {
                    symbol: "λ₁",
                    exact: "1+√3",
                    value: 1.0 + s3,
                },
                ScaleFactor {
                    symbol: "λ₂",
                    exact: "(1+√3)/2",
                    value: (1.0 + s3) / 2.0,
                },
            ],
        }
    }

    pub const NAMES: [&'static str; 3] = ["ab", "tt", "gs"];

    pub fn by_name(name: &str) -> Result<CmsSpec> {
        match name.to_ascii_lowercase().as_str() {
            "ab" => Ok(CmsSpec::ammann_beenker()),
            "tt" => Ok(CmsSpec::tubingen_triangle()),
            "gs" => Ok(CmsSpec::gahler_shield()),
            _ => Err(Error::usage(format!(
                "unknown model set {name:?}; expected one of {}",
                CmsSpec::NAMES.join(", ")
            ))),
        }
    }

    /// Same set with the window shifted by `shift` (absolute, not scaled).
    pub fn with_shift(mut self, shift: PlanarPoint) -> Result<CmsSpec> {
        let w = &self.window;
        self.window = Window::with_params(w.sides(), w.edge_length(), w.rotation(), shift)?;
        Ok(self)
    }

    /// Same set with the window rotated to `rotation` radians.
    pub fn with_rotation(mut self, rotation: f64) -> Result<CmsSpec> {
        let w = &self.window;
        self.window = Window::with_params(w.sides(), w.edge_length(), rotation, w.shift())?;
        Ok(self)
    }

    /// Expected number of points per unit area of direct space.
    pub fn density(&self) -> f64 {
        self.window.area() / covolume(self.tag)
    }
}

fn default_shift(edge: f64) -> PlanarPoint {
    PlanarPoint::new(DEFAULT_EPSILON.0 * edge, DEFAULT_EPSILON.1 * edge)
}

/// Volume of a fundamental cell of the module embedded in direct ⊕ internal space.
fn covolume(tag: CycloTag) -> f64 {
    let cols: Vec<[f64; 4]> = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        .iter()
        .map(|&c| {
            let x = ModulePoint::from_coeffs(tag, c);
            let (p, q) = (x.embed_direct(), x.embed_internal());
            [p.x, p.y, q.x, q.y]
        })
        .collect();
    let mut m = [[0.0; 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..4 {
            m[i][j] = col[i];
        }
    }
    det4(m).abs()
}

fn det4(mut m: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..4 {
            let f = m[r][c] / m[c][c];
            let pivot = m[c];
            for (v, p) in m[r].iter_mut().zip(pivot).skip(c) {
                *v -= f * p;
            }
        }
    }
    det
}

/// Membership test shared by the enumerator and its brute-force check.
#[inline]
pub fn cms_member(spec: &CmsSpec, x: &ModulePoint, r: f64) -> bool {
    x.embed_direct().norm_sq() <= r * r && spec.window.contains_finite(x.embed_internal())
}

/// Ring elements `q` with `q` in `[lo, hi]` and `q'` in `[clo, chi]`
/// (a superset; callers filter exactly).
fn interval_points(ring: RingTag, lo: f64, hi: f64, clo: f64, chi: f64) -> Vec<QuadInt> {
    let pad = |v: f64| 1e-9 * (1.0 + v.abs());
    let (lo, hi) = (lo - pad(lo), hi + pad(hi));
    let (clo, chi) = (clo - pad(clo), chi + pad(chi));
    if lo > hi || clo > chi {
        return Vec::new();
    }
    let (w, wc) = (ring.omega(), ring.omega_conj());
    let sd = w - wc;
    let bmin = ((lo - chi) / sd).floor() as i64;
    let bmax = ((hi - clo) / sd).ceil() as i64;
    let mut out = Vec::new();
    for b in bmin..=bmax {
        let bf = b as f64;
        let amin = (lo - bf * w).max(clo - bf * wc).ceil() as i64;
        let amax = (hi - bf * w).min(chi - bf * wc).floor() as i64;
        out.extend((amin..=amax).map(|a| QuadInt::new(a, b, ring)));
    }
    out
}

/// All points of the model set within distance `r` of the origin,
/// sorted by coefficient vector.
///
/// Enumerates the second coordinate `x₂` as a one-dimensional model set
/// (its direct and internal y-ranges are fixed by the disc and the window),
/// then for each `x₂` the admissible `x₁` in the same way, and keeps the
/// exact members.
pub fn gen_cms(spec: &CmsSpec, r: f64) -> Result<PointSet> {
    check_radius(r)?;
    let estimate = spec.density() * PI * r * r;
    check_budget(&format!("model set {}", spec.name), estimate)?;

    let tag = spec.tag;
    let ring = tag.ring();
    let (z, zs) = (tag.zeta(), tag.star_zeta());
    let (wx0, wx1, wy0, wy1) = spec.window.bounding_box();

    let x2s = interval_points(ring, -r / z.y, r / z.y, wy0 / zs.y, wy1 / zs.y);
    let mut pts: Vec<ModulePoint> = x2s
        .par_iter()
        .flat_map_iter(|&x2| {
            let (e, ec) = (x2.embed(), x2.embed_conj());
            let h2 = r * r - (e * z.y) * (e * z.y);
            let cands = if h2 < 0.0 {
                Vec::new()
            } else {
                let h = h2.sqrt();
                interval_points(ring, -h - e * z.x, h - e * z.x, wx0 - ec * zs.x, wx1 - ec * zs.x)
            };
            cands
                .into_iter()
                .map(move |x1| ModulePoint { x1, x2, tag })
                .filter(|x| cms_member(spec, x, r))
        })
        .collect();
    pts.sort_unstable_by_key(|p| p.coeffs());

    let w = &spec.window;
    let prov = Provenance::new(spec.name.clone(), r)
        .with_param("module", tag.n())
        .with_param("window_sides", w.sides())
        .with_param("window_edge", w.edge_length())
        .with_param("window_rotation", w.rotation())
        .with_param("window_shift", format!("{},{}", w.shift().x, w.shift().y));
    Ok(PointSet::new(Points::Exact { tag, points: pts }, prov))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_stored_constants() {
        let ab = CmsSpec::ammann_beenker();
        assert!((ab.window.circumradius() - 1.306562964876377).abs() < 1e-12);
        let tt = CmsSpec::tubingen_triangle();
        assert!((tt.window.circumradius() - 1.376381920471173).abs() < 1e-12);
        let gs = CmsSpec::gahler_shield();
        assert!((gs.window.circumradius() - 1.931851652578137).abs() < 1e-12);
        let l = &gs.scale_factors;
        assert!((l[0].value * l[1].value - (2.0 + 3f64.sqrt())).abs() < 1e-12);
        assert!(CmsSpec::by_name("xx").is_err());
    }

    #[test]
    fn origin_and_one_in_ab() {
        let ps = gen_cms(&CmsSpec::ammann_beenker(), 2.0).unwrap();
        let Points::Exact { points, .. } = &ps.points else { unreachable!() };
        assert!(points.contains(&ModulePoint::zero(CycloTag::Eight)));
        assert!(points.contains(&ModulePoint::one(CycloTag::Eight)));
    }

    #[test]
    fn interval_points_exhaustive() {
        for ring in RingTag::ALL {
            let got = interval_points(ring, -3.3, 4.1, -1.7, 2.2);
            for a in -40..=40 {
                for b in -40..=40 {
                    let q = QuadInt::new(a, b, ring);
                    let inside = (-3.3..=4.1).contains(&q.embed()) && (-1.7..=2.2).contains(&q.embed_conj());
                    if inside {
                        assert!(got.contains(&q), "{q}");
                    }
                }
            }
        }
    }

    #[test]
    fn density_doubles_squared() {
        for spec in [CmsSpec::ammann_beenker(), CmsSpec::tubingen_triangle(), CmsSpec::gahler_shield()] {
            let a = gen_cms(&spec, 40.0).unwrap().len() as f64;
            let b = gen_cms(&spec, 80.0).unwrap().len() as f64;
            assert!((b / a / 4.0 - 1.0).abs() < 0.02, "{} {a} {b}", spec.name);
            let expected = spec.density() * PI * 80.0 * 80.0;
            assert!((b / expected - 1.0).abs() < 0.02, "{} {b} {expected}", spec.name);
        }
    }
}
