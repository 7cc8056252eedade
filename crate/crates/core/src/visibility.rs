//! Points visible from the reference point: no other point of the set lies
//! strictly between them and the reference.
//!
//! [`visible_brute_force`] groups points by exact (or, for float data,
//! tolerance-based) direction and keeps the nearest in each group. The fast
//! tests replace the search for a blocker by number theory: a coprime module
//! point `x` is blocked iff its nearest candidate `t·x` (with `t` the largest
//! admissible ring element below 1) is in the set, which happens iff
//! `-λ·x*` lies in the window for the set's rescaling factor `λ`.

use std::collections::HashMap;
use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::cyclo::{CycloTag, ModulePoint, PlanarPoint};
use crate::error::{Error, Result};
use crate::generators::{CmsSpec, PointSet, Points};

/// Default angular tolerance for float point sets, in radians.
pub const ANGULAR_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum VisibilityMethod {
    BruteForce { angular_tolerance: f64 },
    GcdZ2,
    /// Coprimality plus a rescaled window test (8- and 5-fold sets).
    CmsLocal(CmsSpec),
    /// Norm-class test for the 12-fold set.
    NormClassGs(CmsSpec),
}

impl VisibilityMethod {
    pub fn brute_force() -> Self {
        VisibilityMethod::BruteForce {
            angular_tolerance: ANGULAR_TOLERANCE,
        }
    }

    /// The fast test matching a model set.
    pub fn for_cms(spec: &CmsSpec) -> Self {
        match spec.tag {
            CycloTag::Twelve => VisibilityMethod::NormClassGs(spec.clone()),
            _ => VisibilityMethod::CmsLocal(spec.clone()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            VisibilityMethod::BruteForce { .. } => "brute_force",
            VisibilityMethod::GcdZ2 => "gcd_z2",
            VisibilityMethod::CmsLocal(_) => "cms_local",
            VisibilityMethod::NormClassGs(_) => "norm_class_gs",
        }
    }
}

/// One flag per point of `ps`; the reference point is never visible.
pub fn visibility_mask(ps: &PointSet, method: &VisibilityMethod) -> Result<Vec<bool>> {
    match method {
        VisibilityMethod::BruteForce { angular_tolerance } => brute_force_mask(ps, *angular_tolerance),
        VisibilityMethod::GcdZ2 => z2_mask(ps),
        VisibilityMethod::CmsLocal(spec) | VisibilityMethod::NormClassGs(spec) => cms_mask(ps, spec),
    }
}

/// The visible subset, reference point excluded.
pub fn visible(ps: &PointSet, method: &VisibilityMethod) -> Result<PointSet> {
    let mask = visibility_mask(ps, method)?;
    let mut out = ps.select(&mask)?;
    out.provenance.params.insert("visibility".into(), method.name().into());
    Ok(out)
}

pub fn visible_brute_force(ps: &PointSet) -> Result<PointSet> {
    visible(ps, &VisibilityMethod::brute_force())
}

pub fn visible_z2(ps: &PointSet) -> Result<PointSet> {
    visible(ps, &VisibilityMethod::GcdZ2)
}

pub fn visible_ab(ps: &PointSet) -> Result<PointSet> {
    visible(ps, &VisibilityMethod::CmsLocal(CmsSpec::ammann_beenker()))
}

pub fn visible_tt(ps: &PointSet) -> Result<PointSet> {
    visible(ps, &VisibilityMethod::CmsLocal(CmsSpec::tubingen_triangle()))
}

pub fn visible_gs(ps: &PointSet) -> Result<PointSet> {
    visible(ps, &VisibilityMethod::NormClassGs(CmsSpec::gahler_shield()))
}

fn require_origin(ps: &PointSet, what: &str) -> Result<()> {
    if ps.reference == PlanarPoint::ORIGIN {
        Ok(())
    } else {
        Err(Error::usage(format!("{what} requires the reference point at the origin")))
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn z2_mask(ps: &PointSet) -> Result<Vec<bool>> {
    let Points::Lattice(p) = &ps.points else {
        return Err(Error::usage(format!(
            "gcd test needs a lattice point set, got {}",
            ps.points.kind_name()
        )));
    };
    require_origin(ps, "gcd test")?;
    Ok(p.par_iter()
        .map(|&(a, b)| gcd_u64(a.unsigned_abs(), b.unsigned_abs()) == 1)
        .collect())
}

/// Absolute norm of the gcd of the coordinates, or `None` for the origin.
pub fn norm_class(x: &ModulePoint) -> Result<Option<u64>> {
    if x.is_zero() {
        return Ok(None);
    }
    Ok(Some(x.content()?.norm()?.unsigned_abs()))
}

fn cms_mask(ps: &PointSet, spec: &CmsSpec) -> Result<Vec<bool>> {
    let Points::Exact { tag, points } = &ps.points else {
        return Err(Error::usage(format!(
            "model-set test needs exact module points, got {}",
            ps.points.kind_name()
        )));
    };
    if *tag != spec.tag {
        return Err(Error::usage(format!(
            "point set is {}-fold but the test is for {} ({}-fold)",
            tag.n(),
            spec.name,
            spec.tag.n()
        )));
    }
    require_origin(ps, "model-set test")?;
    let w = &spec.window;
    let lambdas: Vec<f64> = spec.scale_factors.iter().map(|s| s.value).collect();
    points
        .par_iter()
        .map(|x| -> Result<bool> {
            let Some(n) = norm_class(x)? else {
                return Ok(false);
            };
            let lambda = match (spec.tag, n) {
                (CycloTag::Twelve, 1) => lambdas[0],
                (CycloTag::Twelve, 2) => lambdas[1],
                (CycloTag::Twelve, _) => return Ok(false),
                (_, 1) => lambdas[0],
                _ => return Ok(false),
            };
            Ok(!w.contains_finite(x.embed_internal().scale(-lambda)))
        })
        .collect()
}

fn reference_or_err(ps: &PointSet) -> Result<usize> {
    ps.reference_index().ok_or_else(|| {
        Error::usage(format!(
            "reference point ({}, {}) is not a member of the point set",
            ps.reference.x, ps.reference.y
        ))
    })
}

/// Keeps the nearest point of each direction group.
fn nearest_per_key<K: std::hash::Hash + Eq>(keys: Vec<Option<(K, f64)>>) -> Vec<bool> {
    let mut best: HashMap<K, (f64, usize)> = HashMap::with_capacity(keys.len());
    let n = keys.len();
    for (i, k) in keys.into_iter().enumerate() {
        if let Some((key, d)) = k {
            best.entry(key)
                .and_modify(|e| {
                    if d < e.0 {
                        *e = (d, i);
                    }
                })
                .or_insert((d, i));
        }
    }
    let mut mask = vec![false; n];
    for (_, (_, i)) in best {
        mask[i] = true;
    }
    mask
}

/// Exact ray key of a nonzero module element: the class of `x₁/x₂` in the
/// real subfield plus the side of the line it lies on.
fn module_direction(x: &ModulePoint) -> Result<(i64, i64, i64, i32)> {
    if x.x2.is_zero() {
        return Ok((1, 0, 0, x.x1.signum()));
    }
    // x₁/x₂ = x₁·conj(x₂) / N(x₂)
    let num = x.x1.checked_mul(x.x2.conj())?;
    let mut den = x.x2.norm()?;
    let (mut u, mut v) = (num.a(), num.b());
    let g = gcd_u64(gcd_u64(u.unsigned_abs(), v.unsigned_abs()), den.unsigned_abs()) as i64;
    u /= g;
    v /= g;
    den /= g;
    if den < 0 {
        (u, v, den) = (-u, -v, -den);
    }
    Ok((u, v, den, x.x2.signum()))
}

fn brute_force_mask(ps: &PointSet, angular_tolerance: f64) -> Result<Vec<bool>> {
    let r = reference_or_err(ps)?;
    match &ps.points {
        Points::Lattice(p) => {
            let (x0, y0) = p[r];
            let keys = p
                .par_iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    if i == r {
                        return None;
                    }
                    let (da, db) = (a - x0, b - y0);
                    let g = gcd_u64(da.unsigned_abs(), db.unsigned_abs()) as i64;
                    Some(((da / g, db / g), (da * da + db * db) as f64))
                })
                .collect();
            Ok(nearest_per_key(keys))
        }
        Points::Exact { points, .. } => {
            let x0 = points[r];
            let keys = points
                .par_iter()
                .enumerate()
                .map(|(i, x)| -> Result<Option<_>> {
                    if i == r {
                        return Ok(None);
                    }
                    let d = x.checked_sub(&x0)?;
                    Ok(Some((module_direction(&d)?, d.embed_direct().norm_sq())))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(nearest_per_key(keys))
        }
        Points::Float(p) => {
            if !(angular_tolerance >= 0.0) {
                return Err(Error::usage("angular tolerance must be non-negative"));
            }
            let c = p[r];
            let mut order: Vec<(f64, f64, usize)> = p
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != r)
                .map(|(i, q)| {
                    let d = *q - c;
                    (d.y.atan2(d.x).rem_euclid(TAU), d.norm_sq(), i)
                })
                .collect();
            order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
            let mut group = vec![0usize; order.len()];
            let mut g = 0;
            for k in 1..order.len() {
                if order[k].0 - order[k - 1].0 > angular_tolerance {
                    g += 1;
                }
                group[k] = g;
            }
            if order.len() > 1 && order[0].0 + TAU - order[order.len() - 1].0 <= angular_tolerance {
                for k in (0..order.len()).rev() {
                    if group[k] != g {
                        break;
                    }
                    group[k] = 0;
                }
            }
            let keys: Vec<Option<(usize, f64)>> = {
                let mut v = vec![None; p.len()];
                for (k, &(_, d, i)) in order.iter().enumerate() {
                    v[i] = Some((group[k], d));
                }
                v
            };
            Ok(nearest_per_key(keys))
        }
    }
}
