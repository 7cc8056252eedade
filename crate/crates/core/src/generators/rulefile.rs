//! Text format for substitution rules.
//!
//! ```text
//! # comment
//! name chair
//! multiplier 2
//! prototile C
//!   vertex 0 0
//!   ...
//! end
//! production C
//!   child C a b c d e f
//! end
//! seed
//!   tile C a b c d e f
//! end
//! reference 0.5 0.5
//! ```
//!
//! An affine map `a b c d e f` sends `(x, y)` to
//! `(a·x + b·y + e, c·x + d·y + f)`. Child maps are expressed in the frame of
//! the parent prototile inflated by the multiplier; the reference point is
//! given in seed coordinates and scales with the multiplier.

use std::fmt::Write as _;

use crate::cyclo::PlanarPoint;
use crate::error::{Error, Result};

use super::substitution::{Affine, Child, Prototile, SubstitutionRule};

enum Block {
    None,
    Prototile(String, Vec<PlanarPoint>, usize),
    Production(String, Vec<(String, Affine, usize)>, usize),
    Seed(Vec<(String, Affine, usize)>, usize),
}

fn numbers(lineno: usize, fields: &[&str], n: usize) -> Result<Vec<f64>> {
    if fields.len() != n {
        return Err(Error::parse(lineno, format!("expected {n} numbers, found {}", fields.len())));
    }
    fields
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(lineno, format!("bad number {s:?}")))
        })
        .collect()
}

fn affine(lineno: usize, fields: &[&str]) -> Result<Affine> {
    let v = numbers(lineno, fields, 6)?;
    Ok(Affine {
        m: [[v[0], v[1]], [v[2], v[3]]],
        t: PlanarPoint::new(v[4], v[5]),
    })
}

/// Tile name, its children as (name, placement, line), and the defining line.
type Production = (String, Vec<(String, Affine, usize)>, usize);

pub(super) fn parse(text: &str) -> Result<SubstitutionRule> {
    let mut name = String::from("unnamed");
    let mut multiplier = None;
    let mut reference = PlanarPoint::ORIGIN;
    let mut prototiles: Vec<(Prototile, usize)> = Vec::new();
    let mut productions: Vec<Production> = Vec::new();
    let mut seed = None;
    let mut block = Block::None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (key, rest) = (fields[0], &fields[1..]);
        block = match (block, key) {
            (Block::None, "name") => {
                name = rest.join(" ");
                Block::None
            }
            (Block::None, "multiplier") => {
                multiplier = Some((numbers(lineno, rest, 1)?[0], lineno));
                Block::None
            }
            (Block::None, "reference") => {
                let v = numbers(lineno, rest, 2)?;
                reference = PlanarPoint::new(v[0], v[1]);
                Block::None
            }
            (Block::None, "prototile") if rest.len() == 1 => Block::Prototile(rest[0].to_string(), Vec::new(), lineno),
            (Block::None, "production") if rest.len() == 1 => Block::Production(rest[0].to_string(), Vec::new(), lineno),
            (Block::None, "seed") if rest.is_empty() => {
                if seed.is_some() {
                    return Err(Error::parse(lineno, "duplicate seed block"));
                }
                Block::Seed(Vec::new(), lineno)
            }
            (Block::Prototile(n, mut v, l), "vertex") => {
                let p = numbers(lineno, rest, 2)?;
                v.push(PlanarPoint::new(p[0], p[1]));
                Block::Prototile(n, v, l)
            }
            (Block::Production(n, mut c, l), "child") if !rest.is_empty() => {
                c.push((rest[0].to_string(), affine(lineno, &rest[1..])?, lineno));
                Block::Production(n, c, l)
            }
            (Block::Seed(mut c, l), "tile") if !rest.is_empty() => {
                c.push((rest[0].to_string(), affine(lineno, &rest[1..])?, lineno));
                Block::Seed(c, l)
            }
            (Block::Prototile(n, v, l), "end") => {
                if prototiles.iter().any(|(p, _)| p.name == n) {
                    return Err(Error::parse(l, format!("duplicate prototile {n:?}")));
                }
                prototiles.push((Prototile { name: n, vertices: v }, l));
                Block::None
            }
            (Block::Production(n, c, l), "end") => {
                if productions.iter().any(|(p, _, _)| *p == n) {
                    return Err(Error::parse(l, format!("duplicate production for {n:?}")));
                }
                productions.push((n, c, l));
                Block::None
            }
            (Block::Seed(c, _), "end") => {
                seed = Some(c);
                Block::None
            }
            (_, other) => return Err(Error::parse(lineno, format!("unexpected {other:?}"))),
        };
    }
    if !matches!(block, Block::None) {
        return Err(Error::parse(text.lines().count(), "unterminated block"));
    }

    let (multiplier, mline) = multiplier.ok_or_else(|| Error::parse(1, "missing multiplier"))?;
    if multiplier <= 1.0 {
        return Err(Error::parse(mline, format!("multiplier must exceed 1, got {multiplier}")));
    }
    for (p, l) in &prototiles {
        if p.vertices.len() < 3 {
            return Err(Error::parse(*l, format!("prototile {:?} needs at least 3 vertices", p.name)));
        }
    }
    let index = |n: &str, l: usize| -> Result<usize> {
        prototiles
            .iter()
            .position(|(p, _)| p.name == n)
            .ok_or_else(|| Error::parse(l, format!("unknown prototile {n:?}")))
    };
    let resolve = |list: Vec<(String, Affine, usize)>| -> Result<Vec<Child>> {
        list.into_iter()
            .map(|(n, map, l)| Ok(Child { prototile: index(&n, l)?, map }))
            .collect()
    };
    let mut prods = vec![None; prototiles.len()];
    for (n, c, l) in productions {
        let k = index(&n, l)?;
        prods[k] = Some(resolve(c)?);
    }
    let productions = prods
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.ok_or_else(|| Error::parse(prototiles[k].1, format!("prototile {:?} has no production", prototiles[k].0.name))))
        .collect::<Result<Vec<_>>>()?;
    let seed = resolve(seed.ok_or_else(|| Error::parse(1, "missing seed block"))?)?;

    Ok(SubstitutionRule {
        name,
        multiplier,
        prototiles: prototiles.into_iter().map(|(p, _)| p).collect(),
        productions,
        seed,
        reference,
    })
}

pub(super) fn render(rule: &SubstitutionRule) -> String {
    let mut s = String::new();
    let map = |a: &Affine| {
        format!(
            "{:?} {:?} {:?} {:?} {:?} {:?}",
            a.m[0][0], a.m[0][1], a.m[1][0], a.m[1][1], a.t.x, a.t.y
        )
    };
    let _ = writeln!(s, "name {}", rule.name);
    let _ = writeln!(s, "multiplier {:?}", rule.multiplier);
    for p in &rule.prototiles {
        let _ = writeln!(s, "prototile {}", p.name);
        for v in &p.vertices {
            let _ = writeln!(s, "  vertex {:?} {:?}", v.x, v.y);
        }
        let _ = writeln!(s, "end");
    }
    for (k, prod) in rule.productions.iter().enumerate() {
        let _ = writeln!(s, "production {}", rule.prototiles[k].name);
        for c in prod {
            let _ = writeln!(s, "  child {} {}", rule.prototiles[c.prototile].name, map(&c.map));
        }
        let _ = writeln!(s, "end");
    }
    let _ = writeln!(s, "seed");
    for c in &rule.seed {
        let _ = writeln!(s, "  tile {} {}", rule.prototiles[c.prototile].name, map(&c.map));
    }
    let _ = writeln!(s, "end");
    let _ = writeln!(s, "reference {:?} {:?}", rule.reference.x, rule.reference.y);
    s
}
