//! Finite groups given by Cayley tables.
//!
//! Elements are indices `0..n` with `0` the identity. The structural queries
//! here (center, solutions of `g^2 = 1`, squares, square roots of a central
//! involution, quotients) are the inputs to every order formula in
//! [`crate::unitary`].

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Associativity is checked on every triple up to this order, sampled above.
pub const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 64;
const SAMPLED_TRIPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    id: String,
    n: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
    labels: Option<Vec<String>>,
}

/// On-disk form read by `--group-file`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub id: String,
    pub n: usize,
    pub table: Vec<Vec<usize>>,
}

/// Validates a Cayley table and returns the group. The first failing
/// witness is reported.
pub fn validate_group(id: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Group> {
    let n = table.len();
    if n == 0 || table.iter().any(|row| row.len() != n) {
        return Err(Error::TableShape);
    }
    if let Some(&bad) = table.iter().flatten().find(|&&e| e >= n) {
        return Err(Error::EntryOutOfRange(bad));
    }
    let flat: Vec<u32> = table.iter().flatten().map(|&e| e as u32).collect();
    let at = |i: usize, j: usize| flat[i * n + j] as usize;

    if (0..n).any(|j| at(0, j) != j || at(j, 0) != j) {
        return Err(Error::NoIdentity);
    }
    let mut seen = vec![false; n];
    for i in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for j in 0..n {
            let e = at(i, j);
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::NotLatin(i));
            }
        }
    }
    for j in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for i in 0..n {
            let e = at(i, j);
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::NotLatin(j));
            }
        }
    }
    if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
        for i in 0..n {
            for j in 0..n {
                let ij = at(i, j);
                for k in 0..n {
                    if at(ij, k) != at(i, at(j, k)) {
                        return Err(Error::NotAssociative(i, j, k));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..SAMPLED_TRIPLES {
            let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if at(at(i, j), k) != at(i, at(j, k)) {
                return Err(Error::NotAssociative(i, j, k));
            }
        }
    }

    let inverses = (0..n)
        .map(|i| (0..n).find(|&j| at(i, j) == 0).expect("latin row contains identity") as u32)
        .collect();
    Ok(Group { id: id.into(), n, table: flat, inverses, labels: None })
}

impl Group {
    pub fn from_file(file: GroupFile) -> Result<Group> {
        if file.table.len() != file.n {
            return Err(Error::TableShape);
        }
        validate_group(file.id, file.table)
    }

    pub fn from_json(text: &str) -> Result<Group> {
        let file: GroupFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("group file: {e}")))?;
        Group::from_file(file)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            id: self.id.clone(),
            n: self.n,
            table: (0..self.n)
                .map(|i| (0..self.n).map(|j| self.mul(i, j)).collect())
                .collect(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n, "one label per element");
        self.labels = Some(labels);
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn label(&self, g: usize) -> String {
        match &self.labels {
            Some(labels) => labels[g].clone(),
            None => format!("g{g}"),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.n + h] as usize
    }

    /// Row `g` of the Cayley table.
    #[inline]
    pub fn row(&self, g: usize) -> &[u32] {
        &self.table[g * self.n..(g + 1) * self.n]
    }

    #[inline]
    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g] as usize
    }

    pub fn pow(&self, g: usize, e: usize) -> usize {
        (0..e).fold(0, |acc, _| self.mul(acc, g))
    }

    /// Least `k >= 1` with `g^k = 1`.
    pub fn element_order(&self, g: usize) -> usize {
        let mut acc = g;
        let mut k = 1;
        while acc != 0 {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    /// `(inverse, order)` with range checking.
    pub fn element_queries(&self, g: usize) -> Result<(usize, usize)> {
        if g >= self.n {
            return Err(Error::IndexOutOfRange(g));
        }
        Ok((self.inverse(g), self.element_order(g)))
    }

    pub fn commute(&self, g: usize, h: usize) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|g| (g + 1..self.n).all(|h| self.commute(g, h)))
    }

    /// The prime `p` with `|G| = p^k`, or `None` for composite non-prime-power
    /// orders. The trivial group reports `None`.
    pub fn prime_of_order(&self) -> Option<u32> {
        prime_power_base(self.n)
    }

    pub fn is_p_group(&self, p: u32) -> bool {
        self.n == 1 || self.prime_of_order() == Some(p)
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.n).filter(|&g| (0..self.n).all(|h| self.commute(g, h))).collect()
    }

    /// `G{2}`: solutions of `g^2 = 1`, identity included.
    pub fn involution_solutions(&self) -> Vec<usize> {
        (0..self.n).filter(|&g| self.mul(g, g) == 0).collect()
    }

    /// `G^2`: the set of squares.
    pub fn squares(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = (0..self.n).map(|g| self.mul(g, g)).collect();
        set.into_iter().collect()
    }

    /// `G^2{2}`: squares that also solve `g^2 = 1`.
    pub fn squares_of_exponent_two(&self) -> Vec<usize> {
        self.squares().into_iter().filter(|&g| self.mul(g, g) == 0).collect()
    }

    /// Nonidentity central elements of order two.
    pub fn central_involutions(&self) -> Vec<usize> {
        self.center().into_iter().filter(|&g| g != 0 && self.mul(g, g) == 0).collect()
    }

    pub fn special_sets(&self) -> SpecialSets {
        SpecialSets {
            center: self.center(),
            involution_solutions: self.involution_solutions(),
            squares: self.squares(),
            squares_of_exponent_two: self.squares_of_exponent_two(),
            central_involutions: self.central_involutions(),
        }
    }

    /// Square roots of the central involution `c`.
    pub fn t_c(&self, c: usize) -> Result<Vec<usize>> {
        if c >= self.n {
            return Err(Error::IndexOutOfRange(c));
        }
        if c == 0 || self.mul(c, c) != 0 || !(0..self.n).all(|h| self.commute(c, h)) {
            return Err(Error::NotCentralInvolution(c));
        }
        Ok((0..self.n).filter(|&g| self.mul(g, g) == c).collect())
    }

    pub fn is_pairwise_commuting(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &g)| set[i + 1..].iter().all(|&h| self.commute(g, h)))
    }

    /// Closure of `gens` under multiplication (and therefore inversion).
    pub fn subgroup_generated(self: &Arc<Self>, gens: &[usize]) -> Result<SubgroupHandle> {
        if let Some(&bad) = gens.iter().find(|&&g| g >= self.n) {
            return Err(Error::IndexOutOfRange(bad));
        }
        let mut member = vec![false; self.n];
        member[0] = true;
        let mut members = vec![0usize];
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
        members.sort_unstable();
        Ok(SubgroupHandle { parent: Arc::clone(self), members })
    }

    /// Smallest subset of elements whose closure is the whole group, chosen
    /// greedily by index.
    pub fn generating_set(self: &Arc<Self>) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut covered = vec![false; self.n];
        covered[0] = true;
        for g in 0..self.n {
            if !covered[g] {
                gens.push(g);
                let sub = self.subgroup_generated(&gens).expect("indices in range");
                for &m in sub.members() {
                    covered[m] = true;
                }
            }
        }
        gens
    }

    /// Checks `g H g^-1 = H` for all `g`, reporting the first failing `g`.
    pub fn check_normal(&self, h: &SubgroupHandle) -> Result<()> {
        let mut member = vec![false; self.n];
        for &x in &h.members {
            member[x] = true;
        }
        for g in 0..self.n {
            let gi = self.inverse(g);
            if h.members.iter().any(|&x| !member[self.mul(self.mul(g, x), gi)]) {
                return Err(Error::NotNormal(g));
            }
        }
        Ok(())
    }

    /// `G/H` with cosets ordered by their least element. Those least elements
    /// are the lift section used throughout.
    pub fn quotient(self: &Arc<Self>, h: &SubgroupHandle) -> Result<Quotient> {
        if h.parent.as_ref() != self.as_ref() {
            return Err(Error::SpecMismatch);
        }
        self.check_normal(h)?;
        let mut projection = vec![usize::MAX; self.n];
        let mut representatives = Vec::new();
        for g in 0..self.n {
            if projection[g] != usize::MAX {
                continue;
            }
            let coset = representatives.len();
            representatives.push(g);
            for &x in &h.members {
                projection[self.mul(g, x)] = coset;
            }
        }
        let k = representatives.len();
        let table: Vec<Vec<usize>> = representatives
            .iter()
            .map(|&a| representatives.iter().map(|&b| projection[self.mul(a, b)]).collect())
            .collect();
        let id = format!("{}/<{}>", self.id, join_indices(&h.members));
        let mut group = validate_group(id, table)?;
        if let Some(labels) = &self.labels {
            group = group.with_labels(representatives.iter().map(|&r| format!("[{}]", labels[r])).collect());
        }
        debug_assert_eq!(k * h.members.len(), self.n);
        Ok(Quotient { group: Arc::new(group), projection, representatives })
    }
}

fn join_indices(items: &[usize]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn prime_power_base(n: usize) -> Option<u32> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|&d| n.is_multiple_of(d))?;
    let mut rest = n;
    while rest.is_multiple_of(p) {
        rest /= p;
    }
    (rest == 1).then_some(p as u32)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialSets {
    pub center: Vec<usize>,
    pub involution_solutions: Vec<usize>,
    pub squares: Vec<usize>,
    pub squares_of_exponent_two: Vec<usize>,
    pub central_involutions: Vec<usize>,
}

/// A subgroup as a sorted member list of its parent.
#[derive(Debug, Clone)]
pub struct SubgroupHandle {
    parent: Arc<Group>,
    members: Vec<usize>,
}

impl SubgroupHandle {
    pub fn parent(&self) -> &Arc<Group> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }
}

/// `G/H` together with the projection and the least-index section.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: Arc<Group>,
    /// Element of `G` to coset index.
    pub projection: Vec<usize>,
    /// Coset index to its least element in `G`.
    pub representatives: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> Arc<Group> {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Arc::new(validate_group(format!("c{n}"), table).unwrap())
    }

    #[test]
    fn validation() {
        assert_eq!(validate_group("t", vec![vec![0]]).unwrap().order(), 1);
        assert_eq!(validate_group("c2", vec![vec![0, 1], vec![1, 0]]).unwrap().order(), 2);
        assert_eq!(validate_group("x", vec![vec![0, 1], vec![1, 1]]).unwrap_err(), Error::NotLatin(1));
        assert_eq!(validate_group("x", vec![vec![1, 0], vec![0, 1]]).unwrap_err(), Error::NoIdentity);
        assert_eq!(validate_group("x", vec![vec![0, 2], vec![1, 0]]).unwrap_err(), Error::EntryOutOfRange(2));
        assert_eq!(validate_group("x", vec![]).unwrap_err(), Error::TableShape);
        // a Latin square with identity that is not associative (order 5 loop)
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(validate_group("loop", loop5), Err(Error::NotAssociative(..))));
    }

    #[test]
    fn cyclic_queries() {
        let c4 = cyclic(4);
        assert_eq!(c4.element_queries(0).unwrap(), (0, 1));
        assert_eq!(c4.element_queries(1).unwrap(), (3, 4));
        assert_eq!(c4.element_queries(4).unwrap_err(), Error::IndexOutOfRange(4));
        assert_eq!(c4.squares(), vec![0, 2]);
        assert_eq!(c4.squares_of_exponent_two(), vec![0, 2]);
        assert_eq!(c4.t_c(2).unwrap(), vec![1, 3]);
        assert!(c4.is_pairwise_commuting(&[1, 3]));
        assert_eq!(c4.t_c(1).unwrap_err(), Error::NotCentralInvolution(1));
        assert_eq!(c4.prime_of_order(), Some(2));
    }

    #[test]
    fn quotients_of_cyclic() {
        let c4 = cyclic(4);
        let h = c4.subgroup_generated(&[2]).unwrap();
        assert_eq!(h.members(), &[0, 2]);
        let q = c4.quotient(&h).unwrap();
        assert_eq!(q.group.order(), 2);
        assert_eq!(q.representatives, vec![0, 1]);
        assert_eq!(q.projection, vec![0, 1, 0, 1]);

        let trivial = c4.subgroup_generated(&[0]).unwrap();
        assert_eq!(trivial.members(), &[0]);
        let same = c4.quotient(&trivial).unwrap();
        assert_eq!(same.group.to_file().table, c4.to_file().table);
    }

    #[test]
    fn json_round_trip() {
        let c4 = cyclic(4);
        let text = serde_json::to_string(&c4.to_file()).unwrap();
        let back = Group::from_json(&text).unwrap();
        assert_eq!(&back, c4.as_ref());
        assert!(Group::from_json(r#"{"id":"x","n":3,"table":[[0]]}"#).is_err());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_base(1), None);
        assert_eq!(prime_power_base(8), Some(2));
        assert_eq!(prime_power_base(27), Some(3));
        assert_eq!(prime_power_base(12), None);
    }
}
