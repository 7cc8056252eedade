use std::collections::HashMap;
use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::cyclo::PlanarPoint;
use crate::error::{Error, Result};

use super::{check_budget, check_radius, rulefile, PointSet, Points, Provenance, DEDUP_TOLERANCE};

const LANCON_BILLARD: &str = include_str!("../../rules/lancon_billard.rule");
const CHAIR: &str = include_str!("../../rules/chair.rule");

/// Relative tolerance for the area identity and the eigenvalue check.
const RULE_TOLERANCE: f64 = 1e-9;

/// Planar affine map `p ↦ m·p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub m: [[f64; 2]; 2],
    pub t: PlanarPoint,
}

impl Affine {
    pub const IDENTITY: Affine = Affine {
        m: [[1.0, 0.0], [0.0, 1.0]],
        t: PlanarPoint::ORIGIN,
    };

    #[inline]
    pub fn apply(&self, p: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(
            self.m[0][0] * p.x + self.m[0][1] * p.y + self.t.x,
            self.m[1][0] * p.x + self.m[1][1] * p.y + self.t.y,
        )
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Affine) -> Affine {
        let a = &self.m;
        let b = &inner.m;
        let m = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        Affine { m, t: self.apply(inner.t) }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prototile {
    pub name: String,
    pub vertices: Vec<PlanarPoint>,
}

impl Prototile {
    /// Unsigned polygon area.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let s: f64 = (0..v.len())
            .map(|i| {
                let (p, q) = (v[i], v[(i + 1) % v.len()]);
                p.x * q.y - q.x * p.y
            })
            .sum();
        0.5 * s.abs()
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        v.iter()
            .flat_map(|p| v.iter().map(move |q| (*p - *q).norm()))
            .fold(0.0, f64::max)
    }
}

/// A prototile index with its placement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Child {
    pub prototile: usize,
    pub map: Affine,
}

/// A placed tile of a patch.
pub type Tile = Child;

/// A substitution rule: prototiles, one production per prototile, a seed
/// patch and a reference point.
#[derive(Clone, Debug, PartialEq)]
pub struct SubstitutionRule {
    pub name: String,
    pub multiplier: f64,
    pub prototiles: Vec<Prototile>,
    pub productions: Vec<Vec<Child>>,
    pub seed: Vec<Child>,
    pub reference: PlanarPoint,
}

impl SubstitutionRule {
    pub const BUILTIN: [&'static str; 2] = ["lancon_billard", "chair"];

    /// Parses and validates a rule file.
    pub fn parse(text: &str) -> Result<SubstitutionRule> {
        let rule = rulefile::parse(text)?;
        rule.validate()?;
        Ok(rule)
    }

    pub fn to_text(&self) -> String {
        rulefile::render(self)
    }

    pub fn lancon_billard() -> SubstitutionRule {
        SubstitutionRule::parse(LANCON_BILLARD).expect("shipped rule file is valid")
    }

    pub fn chair() -> SubstitutionRule {
        SubstitutionRule::parse(CHAIR).expect("shipped rule file is valid")
    }

    pub fn builtin(name: &str) -> Result<SubstitutionRule> {
        match name {
            "lancon_billard" | "lb" => Ok(SubstitutionRule::lancon_billard()),
            "chair" => Ok(SubstitutionRule::chair()),
            _ => Err(Error::usage(format!(
                "unknown rule {name:?}; built-in rules are {}",
                SubstitutionRule::BUILTIN.join(", ")
            ))),
        }
    }

    /// `(Σ child areas) / (λ²·parent area) - 1` for each production.
    pub fn area_defects(&self) -> Vec<f64> {
        let l2 = self.multiplier * self.multiplier;
        self.productions
            .iter()
            .enumerate()
            .map(|(k, prod)| {
                let kids: f64 = prod
                    .iter()
                    .map(|c| c.map.det().abs() * self.prototiles[c.prototile].area())
                    .sum();
                kids / (l2 * self.prototiles[k].area()) - 1.0
            })
            .collect()
    }

    /// `M[i][j]` = number of type-`i` children in the production of type `j`.
    pub fn count_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.prototiles.len();
        let mut m = vec![vec![0u64; n]; n];
        for (j, prod) in self.productions.iter().enumerate() {
            for c in prod {
                m[c.prototile][j] += 1;
            }
        }
        m
    }

    /// Perron eigenvalue of the count matrix by power iteration.
    pub fn dominant_eigenvalue(&self) -> f64 {
        let m = self.count_matrix();
        let n = m.len();
        let mut v = vec![1.0; n];
        let mut lambda = 0.0;
        for _ in 0..500 {
            let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] as f64 * v[j]).sum()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let vv: f64 = v.iter().map(|x| x * x).sum();
            lambda = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / vv;
            v = w.into_iter().map(|x| x / norm).collect();
        }
        lambda
    }

    /// Checks the area identity of every production and that the count
    /// matrix grows like the squared multiplier.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (k, d) in self.area_defects().iter().enumerate() {
            if !(d.abs() <= RULE_TOLERANCE) {
                problems.push(format!(
                    "production {:?} violates the area identity (relative defect {d:.3e})",
                    self.prototiles[k].name
                ));
            }
        }
        let l2 = self.multiplier * self.multiplier;
        let ev = self.dominant_eigenvalue();
        if !((ev / l2 - 1.0).abs() <= RULE_TOLERANCE) {
            problems.push(format!(
                "count matrix has dominant eigenvalue {ev} but the squared multiplier is {l2}"
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::usage(format!("rule {:?} is invalid: {}", self.name, problems.join("; "))))
        }
    }

    /// One substitution step with tile size held fixed: each tile's
    /// position scales by the multiplier and it is replaced by its children.
    pub fn inflate(&self, tiles: &[Tile]) -> Vec<Tile> {
        let l = self.multiplier;
        tiles
            .par_iter()
            .flat_map_iter(|t| {
                let frame = Affine {
                    m: t.map.m,
                    t: t.map.t.scale(l),
                };
                self.productions[t.prototile].iter().map(move |c| Child {
                    prototile: c.prototile,
                    map: frame.compose(&c.map),
                })
            })
            .collect()
    }

    fn count_after(&self, steps: u32) -> Vec<f64> {
        let m = self.count_matrix();
        let n = m.len();
        let mut v = vec![0.0; n];
        for c in &self.seed {
            v[c.prototile] += 1.0;
        }
        for _ in 0..steps {
            v = (0..n).map(|i| (0..n).map(|j| m[i][j] as f64 * v[j]).sum()).collect();
        }
        v
    }
}

/// The full vertex cloud after a number of substitution steps.
#[derive(Clone, Debug)]
pub struct Patch {
    pub steps: u32,
    pub tile_counts: Vec<u64>,
    pub vertices: Vec<PlanarPoint>,
    pub reference: PlanarPoint,
    /// Estimated radius around the reference that the patch covers.
    pub coverage_radius: f64,
}

pub fn substitution_patch(rule: &SubstitutionRule, steps: u32) -> Result<Patch> {
    let tiles_est: f64 = rule.count_after(steps).iter().sum();
    let max_vertices = rule.prototiles.iter().map(|p| p.vertices.len()).max().unwrap_or(0) as f64;
    check_budget(&format!("{} after {steps} steps", rule.name), tiles_est * max_vertices)?;

    let mut tiles = rule.seed.clone();
    for _ in 0..steps {
        tiles = rule.inflate(&tiles);
    }
    let mut tile_counts = vec![0u64; rule.prototiles.len()];
    for t in &tiles {
        tile_counts[t.prototile] += 1;
    }
    let raw: Vec<PlanarPoint> = tiles
        .par_iter()
        .flat_map_iter(|t| rule.prototiles[t.prototile].vertices.iter().map(move |v| t.map.apply(*v)))
        .collect();
    drop(tiles);
    let vertices = dedup(&raw, DEDUP_TOLERANCE);
    let reference = rule.reference.scale(rule.multiplier.powi(steps as i32));
    let margin = 2.0 * rule.prototiles.iter().map(Prototile::diameter).fold(0.0, f64::max);
    let coverage_radius = (coverage(&vertices, reference) - margin).max(0.0);
    Ok(Patch {
        steps,
        tile_counts,
        vertices,
        reference,
        coverage_radius,
    })
}

/// Merges points closer than `tol` and sorts the result by `(x, y)`.
fn dedup(points: &[PlanarPoint], tol: f64) -> Vec<PlanarPoint> {
    let key = |p: PlanarPoint| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
    let mut grid: HashMap<(i64, i64), usize> = HashMap::with_capacity(points.len() / 2);
    let mut out: Vec<PlanarPoint> = Vec::with_capacity(points.len() / 2);
    'outer: for &p in points {
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(&i) = grid.get(&(kx + dx, ky + dy)) {
                    if (out[i] - p).norm() <= tol {
                        continue 'outer;
                    }
                }
            }
        }
        grid.insert((kx, ky), out.len());
        out.push(p);
    }
    out.sort_unstable_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    out
}

/// Smallest, over angular sectors around `c`, of the largest vertex
/// distance in that sector.
fn coverage(vertices: &[PlanarPoint], c: PlanarPoint) -> f64 {
    let sectors = (vertices.len() / 64).clamp(8, 1024);
    let mut far = vec![0.0f64; sectors];
    for &v in vertices {
        let d = v - c;
        let r = d.norm();
        if r == 0.0 {
            continue;
        }
        let a = d.y.atan2(d.x).rem_euclid(TAU);
        let s = ((a / TAU * sectors as f64) as usize).min(sectors - 1);
        far[s] = far[s].max(r);
    }
    far.into_iter().fold(f64::INFINITY, f64::min)
}

/// Vertices of the substituted patch within distance `r` of the reference.
///
/// Fails if `r` exceeds the radius the patch covers. Patches whose vertices
/// are all integer points come back as [`Points::Lattice`].
pub fn gen_substitution(rule: &SubstitutionRule, steps: u32, r: f64) -> Result<PointSet> {
    check_radius(r)?;
    let patch = substitution_patch(rule, steps)?;
    if r > patch.coverage_radius {
        return Err(Error::usage(format!(
            "radius {r} exceeds the {:.3} covered by {} after {steps} steps",
            patch.coverage_radius, rule.name
        )));
    }
    let c = patch.reference;
    let pts: Vec<PlanarPoint> = patch
        .vertices
        .into_iter()
        .filter(|p| (*p - c).norm_sq() <= r * r)
        .collect();

    let integral = |v: f64| (v - v.round()).abs() <= 1e-9;
    let points = if pts.iter().all(|p| integral(p.x) && integral(p.y)) && integral(c.x) && integral(c.y) {
        let mut l: Vec<(i64, i64)> = pts.iter().map(|p| (p.x.round() as i64, p.y.round() as i64)).collect();
        l.sort_unstable();
        Points::Lattice(l)
    } else {
        Points::Float(pts)
    };
    let reference = if matches!(points, Points::Lattice(_)) {
        PlanarPoint::new(c.x.round(), c.y.round())
    } else {
        c
    };
    let prov = Provenance::new(rule.name.clone(), r)
        .with_param("steps", steps)
        .with_param("multiplier", rule.multiplier)
        .with_param("coverage_radius", patch.coverage_radius);
    PointSet::new(points, prov).with_reference(reference).map_err(|_| {
        Error::usage(format!(
            "reference point of {} is not a vertex after {steps} steps",
            rule.name
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_rules_validate() {
        let lb = SubstitutionRule::lancon_billard();
        assert_eq!(lb.count_matrix(), vec![vec![3, 1], vec![1, 2]]);
        let ev = lb.dominant_eigenvalue();
        assert!((ev - (5.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let ch = SubstitutionRule::chair();
        assert_eq!(ch.count_matrix(), vec![vec![4]]);
        assert!(lb.area_defects().iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn text_round_trip() {
        for rule in [SubstitutionRule::lancon_billard(), SubstitutionRule::chair()] {
            let back = SubstitutionRule::parse(&rule.to_text()).unwrap();
            assert_eq!(back, rule);
        }
    }

    #[test]
    fn area_violation_names_production() {
        let text = SubstitutionRule::chair().to_text().replace("child C 1.0 0.0 0.0 1.0 1.0 1.0\n", "");
        match SubstitutionRule::parse(&text) {
            Err(Error::Usage(msg)) => assert!(msg.contains("production \"C\""), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "multiplier 2\nprototile C\n  vertex 0 zero\nend\n";
        assert!(matches!(SubstitutionRule::parse(bad), Err(Error::Parse { line: 3, .. })));
        let unknown = "multiplier 2\nprototile C\nvertex 0 0\nvertex 1 0\nvertex 0 1\nend\nproduction D\nend\n";
        assert!(matches!(SubstitutionRule::parse(unknown), Err(Error::Parse { line: 7, .. })));
    }

    #[test]
    fn zero_steps_gives_seed_vertices() {
        let lb = SubstitutionRule::lancon_billard();
        let p = substitution_patch(&lb, 0).unwrap();
        // five thick rhombi around the origin share the centre and five spokes
        assert_eq!(p.vertices.len(), 11);
        assert_eq!(p.tile_counts, vec![5, 0]);
    }

    #[test]
    fn counts_follow_matrix() {
        let lb = SubstitutionRule::lancon_billard();
        let mut v = [1u64, 0];
        let mut tiles = vec![Child {
            prototile: 0,
            map: Affine::IDENTITY,
        }];
        for _ in 0..6 {
            tiles = lb.inflate(&tiles);
            v = [3 * v[0] + v[1], v[0] + 2 * v[1]];
            let a = tiles.iter().filter(|t| t.prototile == 0).count() as u64;
            assert_eq!([a, tiles.len() as u64 - a], v);
        }
    }

    #[test]
    fn chair_vertices_are_integral() {
        let ps = gen_substitution(&SubstitutionRule::chair(), 6, 20.0).unwrap();
        assert!(matches!(ps.points, Points::Lattice(_)));
        assert_eq!(ps.reference, PlanarPoint::new(32.0, 32.0));
        assert!(gen_substitution(&SubstitutionRule::chair(), 6, 40.0).is_err());
    }

    #[test]
    fn dedup_merges_close_points() {
        let p = PlanarPoint::new(0.3, 0.7);
        let q = PlanarPoint::new(0.3 + 4e-7, 0.7 - 4e-7);
        let far = PlanarPoint::new(0.3 + 3e-6, 0.7);
        assert_eq!(dedup(&[p, q, far, p], DEDUP_TOLERANCE).len(), 2);
    }
}
