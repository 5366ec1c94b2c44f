//! The group algebra `FG` of a finite p-group over a field of characteristic p.
//!
//! Elements are dense coefficient vectors indexed by group elements. Besides
//! the ring operations this module holds involutions arising from the group,
//! the kernel ideal `I(H)` of the natural map `FG -> F[G/H]`, that map itself
//! and its least-index lift.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::group::{Group, Quotient, SubgroupHandle};
use crate::linalg;

/// `FG` as a pair of shared specs. [`GroupAlgebra::new`] refuses groups whose
/// order is not a power of `char(F)`; [`GroupAlgebra::new_any`] accepts them for
/// plain arithmetic, and unit inversion then falls back to linear algebra.
#[derive(Debug, PartialEq, Eq)]
pub struct GroupAlgebra {
    field: Arc<FieldSpec>,
    group: Arc<Group>,
}

impl GroupAlgebra {
    pub fn new(field: Arc<FieldSpec>, group: Arc<Group>) -> Result<Arc<Self>> {
        if !group.is_p_group(field.characteristic()) {
            return Err(Error::NotPGroupOverField { order: group.order(), p: field.characteristic() });
        }
        Ok(Arc::new(GroupAlgebra { field, group }))
    }

    pub fn new_any(field: Arc<FieldSpec>, group: Arc<Group>) -> Arc<Self> {
        Arc::new(GroupAlgebra { field, group })
    }

    /// `|G|` is a power of `char(F)`.
    pub fn is_modular(&self) -> bool {
        self.group.is_p_group(self.field.characteristic())
    }

    pub(crate) fn require_modular(&self) -> Result<()> {
        if self.is_modular() {
            Ok(())
        } else {
            Err(Error::NotPGroupOverField { order: self.group.order(), p: self.field.characteristic() })
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    /// Dimension over `F`, i.e. `|G|`.
    pub fn dim(&self) -> usize {
        self.group.order()
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement { algebra: Arc::clone(self), coeffs: vec![FieldElement::ZERO; self.dim()] }
    }

    pub fn one(self: &Arc<Self>) -> AlgebraElement {
        self.basis(0)
    }

    pub fn basis(self: &Arc<Self>, g: usize) -> AlgebraElement {
        let mut x = self.zero();
        x.coeffs[g] = FieldElement::ONE;
        x
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<FieldElement>) -> Result<AlgebraElement> {
        if coeffs.len() != self.dim() {
            return Err(Error::LengthMismatch { got: coeffs.len(), expected: self.dim() });
        }
        if let Some(bad) = coeffs.iter().find(|&&c| !self.field.contains(c)) {
            return Err(Error::NotInField(bad.raw() as u64));
        }
        Ok(AlgebraElement { algebra: Arc::clone(self), coeffs })
    }

    /// Sum of the elements of `H`: `Ĥ`.
    pub fn subgroup_sum(self: &Arc<Self>, h: &SubgroupHandle) -> AlgebraElement {
        let mut x = self.zero();
        for &g in h.members() {
            x.coeffs[g] = FieldElement::ONE;
        }
        x
    }

    /// `out = a * b` on raw coefficient slices.
    #[inline]
    pub fn mul_into(&self, a: &[FieldElement], b: &[FieldElement], out: &mut [FieldElement]) {
        let f = &*self.field;
        out.iter_mut().for_each(|c| *c = FieldElement::ZERO);
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let row = self.group.row(i);
            for (&bj, &k) in b.iter().zip(row) {
                if !bj.is_zero() {
                    let k = k as usize;
                    out[k] = f.add(out[k], f.mul(ai, bj));
                }
            }
        }
    }

    /// `a * b == 1`, computed one coefficient at a time so most candidates are
    /// rejected after a single pass over `a`.
    pub fn product_is_one(&self, a: &[FieldElement], b: &[FieldElement]) -> bool {
        let f = &*self.field;
        let n = self.dim();
        (1..n).chain(std::iter::once(0)).all(|k| {
            let mut c = FieldElement::ZERO;
            for (i, &ai) in a.iter().enumerate() {
                if !ai.is_zero() {
                    let j = self.group.mul(self.group.inverse(i), k);
                    c = f.add(c, f.mul(ai, b[j]));
                }
            }
            c == if k == 0 { FieldElement::ONE } else { FieldElement::ZERO }
        })
    }

    /// Parses `"a0*g0 + a1*g1 + ..."`. A bare `gI` has coefficient one and a
    /// bare coefficient multiplies the identity.
    pub fn parse(self: &Arc<Self>, literal: &str) -> Result<AlgebraElement> {
        let mut x = self.zero();
        let literal = literal.trim();
        if literal == "0" {
            return Ok(x);
        }
        for term in literal.split('+') {
            let term = term.trim();
            let (coeff, index) = match term.split_once('*') {
                Some((c, g)) => (self.field.parse_element(c)?, parse_basis(g)?),
                None if term.starts_with('g') => (FieldElement::ONE, parse_basis(term)?),
                None => (self.field.parse_element(term)?, 0),
            };
            if index >= self.dim() {
                return Err(Error::IndexOutOfRange(index));
            }
            x.coeffs[index] = self.field.add(x.coeffs[index], coeff);
        }
        Ok(x)
    }
}

fn parse_basis(s: &str) -> Result<usize> {
    s.trim()
        .strip_prefix('g')
        .and_then(|i| i.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad basis element {s:?}")))
}

/// `Σ α_g g` over a shared algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    algebra: Arc<GroupAlgebra>,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({self})")
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = self.algebra.field();
        let terms: Vec<String> = self
            .support()
            .into_iter()
            .map(|g| format!("{}*g{g}", field.format_element(self.coeffs[g])))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &Arc<GroupAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElement> {
        self.coeffs
    }

    pub fn coeff(&self, g: usize) -> FieldElement {
        self.coeffs[g]
    }

    pub fn set_coeff(&mut self, g: usize, value: FieldElement) {
        self.coeffs[g] = value;
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&g| !self.coeffs[g].is_zero()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == FieldElement::ONE && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &AlgebraElement) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    fn zip_with(&self, other: &AlgebraElement, op: impl Fn(FieldElement, FieldElement) -> FieldElement) -> Result<AlgebraElement> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| op(a, b)).collect();
        Ok(AlgebraElement { algebra: Arc::clone(&self.algebra), coeffs })
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        let f = Arc::clone(self.algebra.field());
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        let f = Arc::clone(self.algebra.field());
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn neg(&self) -> AlgebraElement {
        self.scale(self.algebra.field().from_int(-1))
    }

    pub fn scale(&self, s: FieldElement) -> AlgebraElement {
        let f = self.algebra.field();
        let coeffs = self.coeffs.iter().map(|&a| f.mul(s, a)).collect();
        AlgebraElement { algebra: Arc::clone(&self.algebra), coeffs }
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(other)?;
        let mut out = vec![FieldElement::ZERO; self.coeffs.len()];
        self.algebra.mul_into(&self.coeffs, &other.coeffs, &mut out);
        Ok(AlgebraElement { algebra: Arc::clone(&self.algebra), coeffs: out })
    }

    pub fn pow(&self, e: u64) -> AlgebraElement {
        let mut acc = self.algebra.one();
        for _ in 0..e {
            acc = acc.mul(self).expect("same algebra");
        }
        acc
    }

    /// The augmentation `χ(x) = Σ α_g`.
    pub fn augmentation(&self) -> FieldElement {
        let f = self.algebra.field();
        self.coeffs.iter().fold(FieldElement::ZERO, |acc, &c| f.add(acc, c))
    }

    pub fn is_normalized_unit(&self) -> bool {
        self.augmentation() == FieldElement::ONE
    }

    /// Inverse via `x = χ(x)(1 + ν)` and the terminating series `Σ (-ν)^k`,
    /// checked by multiplication on both sides.
    pub fn invert(&self) -> Result<AlgebraElement> {
        let field = Arc::clone(self.algebra.field());
        let aug = self.augmentation();
        if aug.is_zero() {
            return Err(Error::NotAUnit);
        }
        if !self.algebra.is_modular() {
            return self.invert_by_solving();
        }
        let aug_inv = field.inv(aug)?;
        let one = self.algebra.one();
        let neg_nu = one.sub(&self.scale(aug_inv))?;
        let cap = self.algebra.dim() * field.characteristic() as usize;
        let mut term = one.clone();
        let mut acc = one.clone();
        let mut terminated = false;
        for _ in 0..cap {
            term = term.mul(&neg_nu)?;
            if term.is_zero() {
                terminated = true;
                break;
            }
            acc = acc.add(&term)?;
        }
        if !terminated {
            return Err(Error::NilpotencyCapExceeded(cap));
        }
        let inverse = acc.scale(aug_inv);
        if !self.mul(&inverse)?.is_one() || !inverse.mul(self)?.is_one() {
            return Err(Error::InternalInconsistency("series inverse failed verification".into()));
        }
        Ok(inverse)
    }

    /// Solves `x y = 1` through the left multiplication matrix of `x`.
    fn invert_by_solving(&self) -> Result<AlgebraElement> {
        let field = self.algebra.field();
        let n = self.algebra.dim();
        let g = self.algebra.group();
        // row i: coefficient of g_i in x * g_j for each j, then the target entry
        let mut rows = vec![vec![FieldElement::ZERO; n + 1]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, entry) in row[..n].iter_mut().enumerate() {
                *entry = self.coeffs[g.mul(i, g.inverse(j))];
            }
        }
        rows[0][n] = FieldElement::ONE;
        let pivots = linalg::row_reduce(field, &mut rows);
        if pivots.len() != n || pivots.contains(&n) {
            return Err(Error::NotAUnit);
        }
        let coeffs = rows.iter().map(|r| r[n]).collect();
        let inverse = AlgebraElement { algebra: Arc::clone(&self.algebra), coeffs };
        if !inverse.mul(self)?.is_one() {
            return Err(Error::NotAUnit);
        }
        Ok(inverse)
    }

    pub fn involute(&self, inv: &GroupInvolution) -> Result<AlgebraElement> {
        if inv.group.as_ref() != self.algebra.group().as_ref() {
            return Err(Error::SpecMismatch);
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len()];
        inv.apply_into(&self.coeffs, &mut out);
        Ok(AlgebraElement { algebra: Arc::clone(&self.algebra), coeffs: out })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvolutionKind {
    /// `g -> g^-1`
    Canonical,
    Custom,
}

/// A permutation `σ` of the group that reverses products and squares to the
/// identity; its linear extension is an involution of `FG`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupInvolution {
    group: Arc<Group>,
    sigma: Vec<usize>,
    kind: InvolutionKind,
}

impl GroupInvolution {
    /// The canonical involution `*`.
    pub fn canonical_star(group: &Arc<Group>) -> GroupInvolution {
        let sigma = (0..group.order()).map(|g| group.inverse(g)).collect();
        GroupInvolution { group: Arc::clone(group), sigma, kind: InvolutionKind::Canonical }
    }

    /// Validates `sigma` and wraps it.
    pub fn from_map(group: &Arc<Group>, sigma: Vec<usize>) -> Result<GroupInvolution> {
        let n = group.order();
        if sigma.len() != n {
            return Err(Error::NotPermutation);
        }
        let mut hit = vec![false; n];
        for &s in &sigma {
            if s >= n || std::mem::replace(&mut hit[s], true) {
                return Err(Error::NotPermutation);
            }
        }
        if let Some(g) = (0..n).find(|&g| sigma[sigma[g]] != g) {
            return Err(Error::NotOrderTwo(g));
        }
        for g in 0..n {
            for h in 0..n {
                if sigma[group.mul(g, h)] != group.mul(sigma[h], sigma[g]) {
                    return Err(Error::NotAntiAutomorphism(g, h));
                }
            }
        }
        let kind = if (0..n).all(|g| sigma[g] == group.inverse(g)) {
            InvolutionKind::Canonical
        } else {
            InvolutionKind::Custom
        };
        Ok(GroupInvolution { group: Arc::clone(group), sigma, kind })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn kind(&self) -> InvolutionKind {
        self.kind
    }

    #[inline]
    pub fn image(&self, g: usize) -> usize {
        self.sigma[g]
    }

    /// `G_⋄`, the elements fixed by `σ`.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.sigma.len()).filter(|&g| self.sigma[g] == g).collect()
    }

    /// Short text form: `"canonical"` or the permutation.
    pub fn descriptor(&self) -> String {
        match self.kind {
            InvolutionKind::Canonical => "canonical".to_string(),
            InvolutionKind::Custom => {
                let parts: Vec<String> = self.sigma.iter().map(|s| s.to_string()).collect();
                format!("custom:[{}]", parts.join(","))
            }
        }
    }

    #[inline]
    pub fn apply_into(&self, a: &[FieldElement], out: &mut [FieldElement]) {
        for (g, &c) in a.iter().enumerate() {
            out[self.sigma[g]] = c;
        }
    }
}

/// Every involution of `FG` arising from `G`: `σ = inversion ∘ α` for each
/// automorphism `α` with `α^2 = 1`. Automorphisms are searched through images
/// of a generating set, so this is only meant for small groups.
pub fn involutions_arising(group: &Arc<Group>) -> Vec<GroupInvolution> {
    let n = group.order();
    let gens = group.generating_set();
    // spanning tree: element -> (parent element, generator slot)
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order_seen = vec![0usize];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut head = 0;
    while head < order_seen.len() {
        let x = order_seen[head];
        head += 1;
        for (slot, &g) in gens.iter().enumerate() {
            let y = group.mul(x, g);
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, slot));
                order_seen.push(y);
            }
        }
    }
    let gen_orders: Vec<usize> = gens.iter().map(|&g| group.element_order(g)).collect();
    let candidates: Vec<Vec<usize>> = gen_orders
        .iter()
        .map(|&o| (0..n).filter(|&x| group.element_order(x) == o).collect())
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    if candidates.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&c, cs)| cs[c]).collect();
        let mut alpha = vec![0usize; n];
        for &x in &order_seen[1..] {
            let (p, slot) = parent[x].expect("reached by search");
            alpha[x] = group.mul(alpha[p], images[slot]);
        }
        let is_auto = (0..n).all(|a| (0..n).all(|b| alpha[group.mul(a, b)] == group.mul(alpha[a], alpha[b])))
            && {
                let mut hit = vec![false; n];
                alpha.iter().all(|&a| !std::mem::replace(&mut hit[a], true))
            };
        if is_auto && (0..n).all(|g| alpha[alpha[g]] == g) {
            let sigma = (0..n).map(|g| group.inverse(alpha[g])).collect();
            if let Ok(inv) = GroupInvolution::from_map(group, sigma) {
                out.push(inv);
            }
        }
        // advance mixed-radix counter
        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// A basis of the skew-symmetric elements `x^⋄ = -x`: one `g - σ(g)` per
/// unordered pair `{g, σ(g)}` with `g ≠ σ(g)`.
pub fn skew_symmetric_basis(algebra: &Arc<GroupAlgebra>, inv: &GroupInvolution) -> Result<Vec<AlgebraElement>> {
    if algebra.field().characteristic() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if inv.group().as_ref() != algebra.group().as_ref() {
        return Err(Error::SpecMismatch);
    }
    let minus_one = algebra.field().from_int(-1);
    Ok((0..algebra.dim())
        .filter(|&g| g < inv.image(g))
        .map(|g| {
            let mut x = algebra.basis(g);
            x.set_coeff(inv.image(g), minus_one);
            x
        })
        .collect())
}

/// The ideal `I(H) = ker Ψ` with an explicit basis.
#[derive(Debug, Clone)]
pub struct IdealHandle {
    pub subgroup: SubgroupHandle,
    /// `t(1 - h)` for least-index coset representatives `t` and nonidentity `h ∈ H`.
    pub kernel_basis: Vec<AlgebraElement>,
}

impl IdealHandle {
    pub fn dim(&self) -> usize {
        self.kernel_basis.len()
    }
}

/// `Ψ: FG -> F[G/H]` and its least-index section.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub source: Arc<GroupAlgebra>,
    pub target: Arc<GroupAlgebra>,
    pub quotient: Quotient,
}

impl QuotientMap {
    /// Pushes coefficients through the projection, summing collisions.
    pub fn psi(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if x.algebra().as_ref() != self.source.as_ref() {
            return Err(Error::SpecMismatch);
        }
        let mut coeffs = vec![FieldElement::ZERO; self.target.dim()];
        self.psi_into(x.coeffs(), &mut coeffs);
        self.target.element(coeffs)
    }

    pub fn psi_into(&self, x: &[FieldElement], out: &mut [FieldElement]) {
        let f = self.source.field();
        out.iter_mut().for_each(|c| *c = FieldElement::ZERO);
        for (g, &c) in x.iter().enumerate() {
            let k = self.quotient.projection[g];
            out[k] = f.add(out[k], c);
        }
    }

    /// Places each coefficient of `u` on the least element of its coset.
    pub fn lift(&self, u: &AlgebraElement) -> Result<AlgebraElement> {
        if u.algebra().as_ref() != self.target.as_ref() {
            return Err(Error::SpecMismatch);
        }
        let mut coeffs = vec![FieldElement::ZERO; self.source.dim()];
        self.lift_into(u.coeffs(), &mut coeffs);
        self.source.element(coeffs)
    }

    pub fn lift_into(&self, u: &[FieldElement], out: &mut [FieldElement]) {
        out.iter_mut().for_each(|c| *c = FieldElement::ZERO);
        for (k, &c) in u.iter().enumerate() {
            out[self.quotient.representatives[k]] = c;
        }
    }
}

/// Builds `I(H)`, `Ψ` and its lift for a normal subgroup `H`.
pub fn ideal_and_quotient(algebra: &Arc<GroupAlgebra>, h: &SubgroupHandle) -> Result<(IdealHandle, QuotientMap)> {
    let group = algebra.group();
    let quotient = group.quotient(h)?;
    let target = GroupAlgebra::new(Arc::clone(algebra.field()), Arc::clone(&quotient.group))?;
    let map = QuotientMap { source: Arc::clone(algebra), target, quotient };

    let minus_one = algebra.field().from_int(-1);
    let mut kernel_basis = Vec::new();
    for &t in &map.quotient.representatives {
        for &x in h.members().iter().filter(|&&x| x != 0) {
            let mut b = algebra.basis(t);
            b.set_coeff(group.mul(t, x), minus_one);
            kernel_basis.push(b);
        }
    }
    let expected = group.order() - map.quotient.group.order();
    let rows: Vec<Vec<FieldElement>> = kernel_basis.iter().map(|b| b.coeffs().to_vec()).collect();
    if linalg::rank(algebra.field(), &rows) != expected || kernel_basis.len() != expected {
        return Err(Error::InternalInconsistency("kernel basis is not independent".into()));
    }
    for b in &kernel_basis {
        if !map.psi(b)?.is_zero() {
            return Err(Error::InternalInconsistency("kernel basis element survives Ψ".into()));
        }
    }
    Ok((IdealHandle { subgroup: h.clone(), kernel_basis }, map))
}
