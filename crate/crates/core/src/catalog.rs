//! Deterministic constructions of the test groups.
//!
//! Indexing conventions (fixed, relied upon by the tests):
//!
//! * `cyclic:n`: `g^i` at index `i`.
//! * `abelian:p:[k1,...]`: `C_{p^k1} × ...` with the last factor varying fastest.
//! * `dihedral:N`, `quaternion:N`, `semidihedral:N`, `modular:N`: `r^i` at
//!   index `i` and `r^i s` at index `N/2 + i`.
//! * `heisenberg:p`: the unitriangular matrix with entries `(a, b, c)` above the
//!   diagonal (`c` in the corner) at index `a + p b + p^2 c`.
//! * `product:A×B`: `(a, b)` at index `a |B| + b`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::is_prime;
use crate::group::{validate_group, Group};

/// Largest order `sweep` will produce.
pub const SWEEP_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Cyclic(usize),
    /// Direct product of cyclic groups of orders `p^e` for each exponent.
    Abelian { p: u32, exponents: Vec<u32> },
    Dihedral(usize),
    Quaternion(usize),
    Semidihedral(usize),
    Modular(usize),
    Heisenberg(u32),
    Product(Vec<Family>),
}

/// Values known independently of any computation here.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExpectedFacts {
    /// `|G{2}|`
    pub involution_solutions: Option<usize>,
    /// `Θ` over fields of characteristic 2 for the canonical involution.
    pub theta: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub family: Family,
    pub expected: ExpectedFacts,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<Group> {
        Ok(self.family.build()?.with_id(self.name.clone()))
    }

    pub fn order(&self) -> usize {
        self.family.order()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cyclic(n) => write!(f, "cyclic:{n}"),
            Family::Abelian { p, exponents } => {
                if exponents.len() > 1 && exponents.iter().all(|&e| e == 1) {
                    write!(f, "elementary_abelian:{p}:{}", exponents.len())
                } else {
                    let parts: Vec<String> = exponents.iter().map(|e| e.to_string()).collect();
                    write!(f, "abelian:{p}:[{}]", parts.join(","))
                }
            }
            Family::Dihedral(n) => write!(f, "dihedral:{n}"),
            Family::Quaternion(n) => write!(f, "quaternion:{n}"),
            Family::Semidihedral(n) => write!(f, "semidihedral:{n}"),
            Family::Modular(n) => write!(f, "modular:{n}"),
            Family::Heisenberg(p) => write!(f, "heisenberg:{p}"),
            Family::Product(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "product:{}", names.join("×"))
            }
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParameter(msg.into())
}

fn parse_usize(s: &str, name: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| bad(format!("{name}: {s:?} is not an integer")))
}

fn two_power_at_least(n: usize, min_exp: u32, name: &str) -> Result<usize> {
    if n.is_power_of_two() && n >= 1 << min_exp {
        Ok(n)
    } else {
        Err(bad(format!("{name}: order must be 2^n with n >= {min_exp}")))
    }
}

fn parse_prime(s: &str, name: &str) -> Result<u32> {
    let p = parse_usize(s, name)?;
    match u32::try_from(p) {
        Ok(p) if is_prime(p) => Ok(p),
        _ => Err(bad(format!("{name}: {s} is not prime"))),
    }
}

/// Parses a catalog name into its family.
pub fn parse_family(name: &str) -> Result<Family> {
    let name = name.trim();
    if let Some(rest) = name.strip_prefix("product:") {
        let parts = rest
            .split(['×', '*'])
            .map(parse_family)
            .collect::<Result<Vec<_>>>()?;
        if parts.len() < 2 {
            return Err(bad("product: needs at least two factors"));
        }
        return Ok(Family::Product(parts));
    }
    let (kind, args) = name.split_once(':').ok_or_else(|| Error::UnknownName(name.into()))?;
    match kind {
        "cyclic" => {
            let n = parse_usize(args, kind)?;
            if n == 0 {
                return Err(bad("cyclic: order must be positive"));
            }
            Ok(Family::Cyclic(n))
        }
        "elementary_abelian" => {
            let (p, k) = args.split_once(':').ok_or_else(|| bad("elementary_abelian:p:k"))?;
            let p = parse_prime(p, kind)?;
            let k = parse_usize(k, kind)?;
            if k == 0 {
                return Err(bad("elementary_abelian: rank must be positive"));
            }
            Ok(Family::Abelian { p, exponents: vec![1; k] })
        }
        "abelian" => {
            let (p, list) = args.split_once(':').ok_or_else(|| bad("abelian:p:[k1,...]"))?;
            let p = parse_prime(p, kind)?;
            let inner = list
                .trim()
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| bad("abelian: exponent list must be bracketed"))?;
            let exponents = inner
                .split(',')
                .map(|e| {
                    let e = parse_usize(e, kind)?;
                    u32::try_from(e).ok().filter(|&e| e > 0).ok_or_else(|| bad("abelian: exponents must be positive"))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Family::Abelian { p, exponents })
        }
        "dihedral" => Ok(Family::Dihedral(two_power_at_least(parse_usize(args, kind)?, 3, kind)?)),
        "quaternion" => Ok(Family::Quaternion(two_power_at_least(parse_usize(args, kind)?, 3, kind)?)),
        "semidihedral" => Ok(Family::Semidihedral(two_power_at_least(parse_usize(args, kind)?, 4, kind)?)),
        "modular" => Ok(Family::Modular(two_power_at_least(parse_usize(args, kind)?, 4, kind)?)),
        "heisenberg" => {
            let p = parse_prime(args, kind)?;
            if p == 2 {
                return Err(bad("heisenberg: p must be odd"));
            }
            Ok(Family::Heisenberg(p))
        }
        _ => Err(Error::UnknownName(name.into())),
    }
}

pub fn entry(name: &str) -> Result<CatalogEntry> {
    let family = parse_family(name)?;
    Ok(CatalogEntry { name: family.to_string(), expected: family.expected(), family })
}

/// Builds a catalog group; its id is the normalized name.
pub fn build(name: &str) -> Result<Group> {
    entry(name)?.build()
}

impl Family {
    pub fn order(&self) -> usize {
        match self {
            Family::Cyclic(n) => *n,
            Family::Abelian { p, exponents } => exponents.iter().map(|&e| (*p as usize).pow(e)).product(),
            Family::Dihedral(n) | Family::Quaternion(n) | Family::Semidihedral(n) | Family::Modular(n) => *n,
            Family::Heisenberg(p) => (*p as usize).pow(3),
            Family::Product(parts) => parts.iter().map(Family::order).product(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            Family::Cyclic(_) | Family::Abelian { .. } => true,
            Family::Product(parts) => parts.iter().all(Family::is_abelian),
            _ => false,
        }
    }

    fn expected(&self) -> ExpectedFacts {
        let order = self.order();
        let two_group = order.is_power_of_two();
        let involution_solutions = match self {
            Family::Cyclic(n) => Some(if n % 2 == 0 { 2 } else { 1 }),
            Family::Abelian { p: 2, exponents } => Some(1 << exponents.len()),
            Family::Abelian { .. } | Family::Heisenberg(_) => Some(1),
            Family::Dihedral(n) => Some(n / 2 + 2),
            Family::Quaternion(_) => Some(2),
            Family::Semidihedral(n) => Some(n / 4 + 2),
            Family::Modular(_) => Some(4),
            Family::Product(parts) => parts.iter().map(|f| f.expected().involution_solutions).product(),
        };
        // Θ = |G^2{2}| for abelian 2-groups: one factor of 2 per cyclic factor of order >= 4.
        let theta = match self {
            Family::Cyclic(n) if two_group => Some(if *n >= 4 { 2 } else { 1 }),
            Family::Abelian { p: 2, exponents } => Some(1 << exponents.iter().filter(|&&e| e >= 2).count()),
            Family::Dihedral(_) => Some(1),
            Family::Quaternion(_) => Some(4),
            Family::Semidihedral(16) => Some(2),
            _ => None,
        };
        ExpectedFacts { involution_solutions, theta }
    }

    pub fn build(&self) -> Result<Group> {
        match self {
            Family::Cyclic(n) => Ok(cyclic(*n)),
            Family::Abelian { p, exponents } => {
                let parts: Vec<Group> = exponents.iter().map(|&e| cyclic((*p as usize).pow(e))).collect();
                Ok(direct_product(&parts))
            }
            Family::Dihedral(n) => metacyclic(*n, n / 2 - 1, 0, "dihedral"),
            Family::Quaternion(n) => metacyclic(*n, n / 2 - 1, n / 4, "quaternion"),
            Family::Semidihedral(n) => metacyclic(*n, n / 4 - 1, 0, "semidihedral"),
            Family::Modular(n) => metacyclic(*n, n / 4 + 1, 0, "modular"),
            Family::Heisenberg(p) => heisenberg(*p as usize),
            Family::Product(parts) => {
                let groups = parts.iter().map(Family::build).collect::<Result<Vec<_>>>()?;
                Ok(direct_product(&groups))
            }
        }
    }
}

fn cyclic(n: usize) -> Group {
    let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    let labels = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "g".to_string(),
            _ => format!("g^{i}"),
        })
        .collect();
    validate_group(format!("cyclic:{n}"), table).expect("cyclic table is a group").with_labels(labels)
}

fn direct_product(parts: &[Group]) -> Group {
    let mut iter = parts.iter();
    let first = iter.next().expect("at least one factor").clone();
    iter.fold(first, |acc, g| product2(&acc, g))
}

fn product2(a: &Group, b: &Group) -> Group {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a.mul(i / nb, j / nb) * nb + b.mul(i % nb, j % nb))
                .collect()
        })
        .collect();
    let labels = (0..n).map(|i| format!("({}, {})", a.label(i / nb), b.label(i % nb))).collect();
    validate_group(format!("{}×{}", a.id(), b.id()), table)
        .expect("direct product of groups is a group")
        .with_labels(labels)
}

/// `<r, s | r^{n/2} = 1, s r s^-1 = r^k, s^2 = r^t>` of order `n`.
fn metacyclic(n: usize, k: usize, t: usize, name: &str) -> Result<Group> {
    let m = n / 2;
    let index = |a: usize, x: usize| a % m + m * x;
    let mul = |i: usize, j: usize| {
        let (a, x) = (i % m, i / m);
        let (b, y) = (j % m, j / m);
        let b = if x == 1 { (k * b) % m } else { b };
        let shift = if x == 1 && y == 1 { t } else { 0 };
        index(a + b + shift, (x + y) % 2)
    };
    let table = (0..n).map(|i| (0..n).map(|j| mul(i, j)).collect()).collect();
    let labels = (0..n)
        .map(|i| {
            let (a, x) = (i % m, i / m);
            let r = match a {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r^{a}"),
            };
            match (r.is_empty(), x) {
                (true, 0) => "1".to_string(),
                (true, _) => "s".to_string(),
                (false, 0) => r,
                (false, _) => format!("{r} s"),
            }
        })
        .collect();
    let group = validate_group(format!("{name}:{n}"), table)
        .map_err(|e| Error::InternalInconsistency(format!("{name}:{n} table invalid: {e}")))?
        .with_labels(labels);

    // presentation relations, read back from the emitted table
    let (r, s) = (index(1, 0), index(0, 1));
    let conj = group.mul(group.mul(s, r), group.inverse(s));
    let relations_hold = group.element_order(r) == m
        && conj == group.pow(r, k)
        && group.mul(s, s) == group.pow(r, t);
    if !relations_hold {
        return Err(Error::InternalInconsistency(format!("{name}:{n} relations fail")));
    }
    Ok(group)
}

fn heisenberg(p: usize) -> Result<Group> {
    let n = p * p * p;
    let decode = |i: usize| (i % p, (i / p) % p, i / (p * p));
    let table = (0..n)
        .map(|i| {
            let (a, b, c) = decode(i);
            (0..n)
                .map(|j| {
                    let (a2, b2, c2) = decode(j);
                    (a + a2) % p + p * ((b + b2) % p) + p * p * ((c + c2 + a * b2) % p)
                })
                .collect()
        })
        .collect();
    let labels = (0..n)
        .map(|i| {
            let (a, b, c) = decode(i);
            format!("({a},{b},{c})")
        })
        .collect();
    let group = validate_group(format!("heisenberg:{p}"), table)?.with_labels(labels);
    if group.center().len() != p || (1..n).any(|g| group.element_order(g) != p) {
        return Err(Error::InternalInconsistency(format!("heisenberg:{p} structure wrong")));
    }
    Ok(group)
}

/// Exponent partitions of `k` in descending order, each partition descending.
fn partitions(k: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, k, &mut Vec::new(), &mut out);
    out
}

/// Catalog entries of characteristic `p` with order at most
/// `min(max_order, SWEEP_LIMIT)`, in increasing order. The trivial group is
/// not included.
pub fn sweep_entries(max_order: usize, p: u32) -> Vec<CatalogEntry> {
    let limit = max_order.min(SWEEP_LIMIT);
    let mut families = Vec::new();
    let mut order = p as usize;
    let mut k = 1;
    while order <= limit {
        for exponents in partitions(k) {
            if exponents.len() == 1 {
                families.push(Family::Cyclic(order));
            } else {
                families.push(Family::Abelian { p, exponents });
            }
        }
        if p == 2 {
            if order >= 8 {
                families.push(Family::Dihedral(order));
                families.push(Family::Quaternion(order));
            }
            if order >= 16 {
                families.push(Family::Semidihedral(order));
                families.push(Family::Modular(order));
                for half in [Family::Dihedral(order / 2), Family::Quaternion(order / 2)] {
                    families.push(Family::Product(vec![half, Family::Cyclic(2)]));
                }
            }
        } else if k == 3 {
            families.push(Family::Heisenberg(p));
        }
        order *= p as usize;
        k += 1;
    }
    let mut seen = std::collections::BTreeSet::new();
    families
        .into_iter()
        .filter_map(|family| {
            let name = family.to_string();
            seen.insert(name.clone()).then(|| CatalogEntry { name, expected: family.expected(), family })
        })
        .collect()
}

pub fn sweep(max_order: usize, p: u32) -> Vec<Arc<Group>> {
    sweep_entries(max_order, p)
        .iter()
        .map(|e| Arc::new(e.build().expect("catalog entries build")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(max: usize, p: u32) -> Vec<String> {
        let mut v: Vec<String> = sweep_entries(max, p).into_iter().map(|e| e.name).collect();
        v.sort();
        v
    }

    #[test]
    fn dihedral_eight() {
        let d8 = build("dihedral:8").unwrap();
        assert_eq!(d8.order(), 8);
        assert_eq!(d8.involution_solutions().len(), 6);
        assert_eq!(d8.label(5), "r s");
        // reflection s at index 4
        assert_eq!(d8.element_queries(4).unwrap(), (4, 2));
    }

    #[test]
    fn semidihedral_sixteen() {
        let sd = build("semidihedral:16").unwrap();
        assert_eq!(sd.order(), 16);
        let sols = sd.involution_solutions();
        assert_eq!(sols, vec![0, 4, 8, 10, 12, 14]);
    }

    #[test]
    fn heisenberg_three() {
        let h = build("heisenberg:3").unwrap();
        assert_eq!(h.order(), 27);
        assert_eq!(h.center().len(), 3);
        assert!((1..27).all(|g| h.element_order(g) == 3));
        assert!(!h.is_abelian());
    }

    #[test]
    fn quaternion_relations() {
        let q = build("quaternion:16").unwrap();
        assert_eq!(q.involution_solutions(), vec![0, 4]);
        assert_eq!(q.mul(8, 8), 4);
    }

    #[test]
    fn errors() {
        assert_eq!(build("dihedral:6").unwrap_err(), Error::BadParameter("dihedral: order must be 2^n with n >= 3".into()));
        assert!(matches!(build("dihedral:4"), Err(Error::BadParameter(_))));
        assert!(matches!(build("semidihedral:8"), Err(Error::BadParameter(_))));
        assert!(matches!(build("heisenberg:2"), Err(Error::BadParameter(_))));
        assert!(matches!(build("abelian:4:[1]"), Err(Error::BadParameter(_))));
        assert_eq!(build("klein"), Err(Error::UnknownName("klein".into())));
        assert_eq!(build("torus:3"), Err(Error::UnknownName("torus:3".into())));
    }

    #[test]
    fn normalized_names() {
        assert_eq!(entry("abelian:2:[1,1]").unwrap().name, "elementary_abelian:2:2");
        assert_eq!(entry("product:dihedral:8*cyclic:2").unwrap().name, "product:dihedral:8×cyclic:2");
        let p = build("product:dihedral:8×cyclic:2").unwrap();
        assert_eq!(p.order(), 16);
        assert_eq!(p.involution_solutions().len(), 12);
    }

    #[test]
    fn sweep_contents() {
        let mut expected: Vec<String> = [
            "cyclic:2", "cyclic:4", "cyclic:8", "elementary_abelian:2:2", "elementary_abelian:2:3",
            "abelian:2:[2,1]", "dihedral:8", "quaternion:8",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        expected.sort();
        assert_eq!(names(8, 2), expected);

        let sixteen = names(16, 2);
        assert!(sixteen.contains(&"semidihedral:16".to_string()));
        assert!(sixteen.contains(&"modular:16".to_string()));

        let mut expected3: Vec<String> = [
            "cyclic:3", "cyclic:9", "cyclic:27", "elementary_abelian:3:2", "elementary_abelian:3:3",
            "abelian:3:[2,1]", "heisenberg:3",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        expected3.sort();
        assert_eq!(names(27, 3), expected3);
    }

    #[test]
    fn sweep_is_p_groups_with_expected_facts() {
        for p in [2u32, 3, 5] {
            for entry in sweep_entries(64, p) {
                let g = entry.build().unwrap();
                assert_eq!(g.order(), entry.order());
                assert!((0..g.order()).all(|x| g.element_order(x).is_power_of_two() || p != 2));
                assert!((0..g.order()).all(|x| {
                    let mut o = g.element_order(x);
                    while o % p as usize == 0 {
                        o /= p as usize;
                    }
                    o == 1
                }));
                if let Some(count) = entry.expected.involution_solutions {
                    assert_eq!(g.involution_solutions().len(), count, "{}", entry.name);
                }
            }
        }
    }

    #[test]
    fn builds_are_deterministic() {
        for name in ["dihedral:16", "heisenberg:5", "product:quaternion:8×cyclic:2"] {
            assert_eq!(build(name).unwrap(), build(name).unwrap());
        }
    }
}
