//! Orders and element sets of unitary subgroups `V_⋄(FG)`.
//!
//! Three independent routes are provided:
//!
//! * the closed formula `|F|^{(|G|-|G_⋄|)/2}` in odd characteristic,
//! * a brute-force oracle that scans every normalized unit,
//! * in characteristic 2, the recursion through `G/⟨c⟩` for a central
//!   involution `c`: `|V_*(FG)| = |F|^{|G|/2} |V_*(F[G/⟨c⟩])| / |S_H|`, where
//!   `S_H = { x x^* : Ψ(x) ∈ V_*(F[G/⟨c⟩]) }` is enumerated fiber by fiber.
//!
//! All orders are exact big integers and `Θ` is an exact rational.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebra::{ideal_and_quotient, AlgebraElement, GroupAlgebra, GroupInvolution};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::group::Group;

pub const DEFAULT_SEARCH_CAP: u64 = 1 << 24;
pub const DEFAULT_BASE_ORDER: usize = 8;

const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Recursive,
    Oracle,
}

/// A sorted, duplicate-free set of algebra elements stored as flat
/// coefficient rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSet {
    dim: usize,
    data: Vec<FieldElement>,
}

impl ElementSet {
    pub fn from_rows(dim: usize, mut rows: Vec<Vec<FieldElement>>) -> ElementSet {
        rows.par_sort_unstable();
        rows.dedup();
        let data = rows.into_iter().flatten().collect();
        ElementSet { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[FieldElement]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn contains(&self, x: &[FieldElement]) -> bool {
        self.index_of(x).is_some()
    }

    pub fn index_of(&self, x: &[FieldElement]) -> Option<usize> {
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.row(mid).cmp(x) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn to_elements(&self, algebra: &Arc<GroupAlgebra>) -> Vec<AlgebraElement> {
        self.rows()
            .map(|r| algebra.element(r.to_vec()).expect("rows have the algebra's dimension"))
            .collect()
    }
}

fn decimal<S: Serializer>(value: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_str_radix(10))
}

fn rational<S: Serializer>(value: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Bookkeeping for one recursion step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subsidiary {
    pub central_involution: usize,
    pub t_c_size: usize,
    pub t_c_commuting: bool,
    #[serde(serialize_with = "decimal")]
    pub quotient_order: BigUint,
    #[serde(serialize_with = "decimal")]
    pub s_h_size: BigUint,
    /// Unitary elements counted directly while traversing the fibers.
    #[serde(serialize_with = "decimal")]
    pub direct_count: BigUint,
    #[serde(serialize_with = "decimal")]
    pub upper_bound: BigUint,
    #[serde(serialize_with = "rational")]
    pub lower_bound: Option<BigRational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitaryResult {
    pub group: String,
    pub field: String,
    pub involution: String,
    pub method: Method,
    #[serde(serialize_with = "decimal")]
    pub order: BigUint,
    #[serde(serialize_with = "rational")]
    pub theta: Option<BigRational>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsidiary: Option<Subsidiary>,
    #[serde(skip)]
    pub elements: Option<ElementSet>,
}

impl UnitaryResult {
    /// Fills `witnesses` with the first `max` elements in sorted order.
    pub fn with_witnesses(mut self, algebra: &Arc<GroupAlgebra>, max: usize) -> Self {
        if let Some(set) = &self.elements {
            self.witnesses = set
                .rows()
                .take(max)
                .map(|r| algebra.element(r.to_vec()).expect("set rows fit").to_string())
                .collect();
        }
        self
    }
}

fn field_pow(field: &FieldSpec, e: usize) -> BigUint {
    BigUint::from(field.order()).pow(e as u32)
}

fn too_large(size: &BigUint, cap: u64, level: &str) -> Error {
    Error::SearchSpaceTooLarge { size: size.to_string(), cap, level: level.to_string() }
}

fn require_unit_normalized(x: &AlgebraElement) -> Result<()> {
    if x.is_normalized_unit() {
        Ok(())
    } else {
        Err(Error::NotNormalized)
    }
}

/// `x x^⋄ = 1` for a normalized unit `x`.
pub fn is_unitary(x: &AlgebraElement, inv: &GroupInvolution) -> Result<bool> {
    require_unit_normalized(x)?;
    Ok(x.mul(&x.involute(inv)?)?.is_one())
}

/// The Cayley transform `f(x) = (1 - x)(1 + x)^{-1}`, odd characteristic only.
pub fn cayley(x: &AlgebraElement) -> Result<AlgebraElement> {
    let algebra = x.algebra();
    if algebra.field().characteristic() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let one = algebra.one();
    let plus = one.add(x)?;
    if plus.augmentation().is_zero() {
        return Err(Error::NotInvertible);
    }
    one.sub(x)?.mul(&plus.invert()?)
}

/// `|F|^{(|G| - |G_⋄|)/2}`.
pub fn unitary_order_odd(algebra: &Arc<GroupAlgebra>, inv: &GroupInvolution) -> Result<BigUint> {
    if algebra.field().characteristic() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    algebra.require_modular()?;
    if inv.group().as_ref() != algebra.group().as_ref() {
        return Err(Error::SpecMismatch);
    }
    let moved = algebra.dim() - inv.fixed_points().len();
    Ok(field_pow(algebra.field(), moved / 2))
}

/// The exponent `(|G| + |G{2}|)/2 - 1` that `Θ` is measured against.
pub fn theta_exponent(group: &Group) -> usize {
    (group.order() + group.involution_solutions().len()) / 2 - 1
}

/// Digit vector of `index` in base `q`, least significant first.
fn decode_digits(mut index: u64, q: u64, digits: &mut [FieldElement]) {
    for d in digits.iter_mut() {
        *d = FieldElement::from_raw((index % q) as u32);
        index /= q;
    }
}

fn increment_digits(q: u32, digits: &mut [FieldElement]) -> bool {
    for d in digits.iter_mut() {
        let next = d.raw() + 1;
        if next < q {
            *d = FieldElement::from_raw(next);
            return false;
        }
        *d = FieldElement::ZERO;
    }
    true
}

/// Every normalized unit `x` with `x x^⋄ = 1`, found by scanning all
/// `|F|^{|G|-1}` normalized units. The result is checked to be a subgroup.
pub fn oracle_unitary_set(algebra: &Arc<GroupAlgebra>, inv: &GroupInvolution, cap: u64) -> Result<ElementSet> {
    algebra.require_modular()?;
    if inv.group().as_ref() != algebra.group().as_ref() {
        return Err(Error::SpecMismatch);
    }
    let field = algebra.field();
    let n = algebra.dim();
    let q = field.order();
    let total = field_pow(field, n - 1);
    if total > BigUint::from(cap) {
        return Err(too_large(&total, cap, &format!("oracle on {} over {}", algebra.group().id(), field)));
    }
    let total = total.to_u64().expect("bounded by cap");
    let chunks = total.div_ceil(CHUNK);
    let rows: Vec<Vec<FieldElement>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut x = vec![FieldElement::ZERO; n];
            let mut xs = vec![FieldElement::ZERO; n];
            decode_digits(start, q as u64, &mut x[1..]);
            let mut hits = Vec::new();
            for _ in start..end {
                let rest = x[1..].iter().fold(FieldElement::ZERO, |acc, &c| field.add(acc, c));
                x[0] = field.sub(FieldElement::ONE, rest);
                inv.apply_into(&x, &mut xs);
                if algebra.product_is_one(&x, &xs) {
                    hits.extend_from_slice(&x);
                }
                increment_digits(q, &mut x[1..]);
            }
            hits
        })
        .collect();
    let rows: Vec<Vec<FieldElement>> = rows
        .into_iter()
        .flat_map(|flat| flat.chunks_exact(n).map(<[FieldElement]>::to_vec).collect::<Vec<_>>())
        .collect();
    let set = ElementSet::from_rows(n, rows);
    verify_subgroup(algebra, &set)?;
    Ok(set)
}

/// Right multiplication of set members by chosen generators, by index.
trait IndexedProduct {
    fn add_generator(&mut self, member: usize);
    /// Index of `member * generators[gen]`, or `None` when it leaves the set.
    fn times(&mut self, member: usize, gen: usize) -> Option<usize>;
}

struct RowProduct<'a> {
    algebra: &'a GroupAlgebra,
    set: &'a ElementSet,
    gens: Vec<usize>,
    prod: Vec<FieldElement>,
}

impl IndexedProduct for RowProduct<'_> {
    fn add_generator(&mut self, member: usize) {
        self.gens.push(member);
    }

    fn times(&mut self, member: usize, gen: usize) -> Option<usize> {
        self.algebra.mul_into(self.set.row(member), self.set.row(self.gens[gen]), &mut self.prod);
        self.set.index_of(&self.prod)
    }
}

/// Characteristic 2 with `|G| m <= 64`: an element is a `u64` of `m`-bit
/// digits, addition is xor, and `x * y` is the xor over `i` of a table entry
/// for `(i, x_i)`.
struct PackedProduct<'a> {
    bits: u32,
    mask: u64,
    keys: Vec<u64>,
    index: KeyIndex,
    tables: Vec<Vec<u64>>,
    q: usize,
    n: usize,
    set: &'a ElementSet,
    field: &'a FieldSpec,
    group: &'a Group,
}

impl<'a> PackedProduct<'a> {
    fn new(algebra: &'a GroupAlgebra, set: &'a ElementSet) -> Option<PackedProduct<'a>> {
        let field = algebra.field();
        let (n, bits) = (algebra.dim(), field.degree());
        if field.characteristic() != 2 || n as u32 * bits > 64 {
            return None;
        }
        let pack = |row: &[FieldElement]| {
            row.iter().enumerate().fold(0u64, |acc, (i, c)| acc | (u64::from(c.raw()) << (i as u32 * bits)))
        };
        let keys: Vec<u64> = set.rows().map(pack).collect();
        let index = KeyIndex::new(&keys, bits, n as u32 - 1);
        Some(PackedProduct {
            bits,
            mask: u64::MAX >> (64 - bits),
            keys,
            index,
            tables: Vec::new(),
            q: field.order() as usize,
            n,
            set,
            field,
            group: algebra.group(),
        })
    }
}

impl IndexedProduct for PackedProduct<'_> {
    fn add_generator(&mut self, member: usize) {
        let y = self.set.row(member);
        let mut table = vec![0u64; self.n * self.q];
        for i in 0..self.n {
            for v in 0..self.q {
                let v_el = FieldElement::from_raw(v as u32);
                // (v e_i) y = sum_j v y_j e_{ij}
                let mut key = 0u64;
                for (j, &yj) in y.iter().enumerate() {
                    let c = self.field.mul(v_el, yj);
                    key ^= u64::from(c.raw()) << (self.group.mul(i, j) as u32 * self.bits);
                }
                table[i * self.q + v] = key;
            }
        }
        self.tables.push(table);
    }

    fn times(&mut self, member: usize, gen: usize) -> Option<usize> {
        let x = self.keys[member];
        let table = &self.tables[gen];
        let mut key = 0u64;
        for i in 0..self.n {
            let digit = ((x >> (i as u32 * self.bits)) & self.mask) as usize;
            key ^= table[i * self.q + digit];
        }
        self.index.get(key).filter(|&i| self.keys[i] == key)
    }
}

/// Members of a set of normalized units by packed key. Digits `1..n`
/// determine such an element, so when `q^{n-1}` is small they address a
/// dense table directly.
enum KeyIndex {
    Dense { shift: u32, slots: Vec<u32> },
    Sorted(Vec<(u64, usize)>),
}

const DENSE_INDEX_LIMIT: u64 = 1 << 24;

impl KeyIndex {
    fn new(keys: &[u64], bits: u32, free_digits: u32) -> KeyIndex {
        let span_bits = bits * free_digits;
        if span_bits < 63 && (1u64 << span_bits) <= DENSE_INDEX_LIMIT && keys.len() < u32::MAX as usize {
            let mut slots = vec![u32::MAX; 1usize << span_bits];
            for (i, &k) in keys.iter().enumerate() {
                slots[(k >> bits) as usize] = i as u32;
            }
            KeyIndex::Dense { shift: bits, slots }
        } else {
            let mut sorted: Vec<(u64, usize)> = keys.iter().copied().zip(0..).collect();
            sorted.sort_unstable();
            KeyIndex::Sorted(sorted)
        }
    }

    fn get(&self, key: u64) -> Option<usize> {
        match self {
            KeyIndex::Dense { shift, slots } => {
                let slot = *slots.get((key >> shift) as usize)?;
                (slot != u32::MAX).then_some(slot as usize)
            }
            KeyIndex::Sorted(sorted) => sorted.binary_search_by_key(&key, |&(k, _)| k).ok().map(|p| sorted[p].1),
        }
    }
}

fn closure_check(len: usize, one_idx: usize, product: &mut dyn IndexedProduct) -> Result<()> {
    let not_closed = || Error::InternalInconsistency("unitary set is not closed under multiplication".into());
    let mut member = vec![false; len];
    member[one_idx] = true;
    let mut members = vec![one_idx];
    let mut gen_count = 0;
    let mut queue: Vec<usize> = Vec::new();
    for candidate in 0..len {
        if member[candidate] {
            continue;
        }
        product.add_generator(candidate);
        gen_count += 1;
        // existing members times the new generator, then new members times all generators
        for &k in &members {
            let idx = product.times(k, gen_count - 1).ok_or_else(not_closed)?;
            if !member[idx] {
                member[idx] = true;
                queue.push(idx);
            }
        }
        while let Some(k) = queue.pop() {
            members.push(k);
            for g in 0..gen_count {
                let idx = product.times(k, g).ok_or_else(not_closed)?;
                if !member[idx] {
                    member[idx] = true;
                    queue.push(idx);
                }
            }
        }
    }
    Ok(())
}

/// Checks that `set` contains 1 and is closed under multiplication, which for
/// a finite subset of a group makes it a subgroup. Elements are absorbed by
/// growing the subgroup generated by a greedily chosen generating set, so the
/// cost is `|set|` times the number of generators.
pub fn verify_subgroup(algebra: &GroupAlgebra, set: &ElementSet) -> Result<()> {
    let n = algebra.dim();
    let mut one = vec![FieldElement::ZERO; n];
    one[0] = FieldElement::ONE;
    let Some(one_idx) = set.index_of(&one) else {
        return Err(Error::InternalInconsistency("unitary set lacks the identity".into()));
    };
    match PackedProduct::new(algebra, set) {
        Some(mut packed) => closure_check(set.len(), one_idx, &mut packed),
        None => {
            let mut rows = RowProduct { algebra, set, gens: Vec::new(), prod: vec![FieldElement::ZERO; n] };
            closure_check(set.len(), one_idx, &mut rows)
        }
    }
}

fn theta_of(order: &BigUint, algebra: &GroupAlgebra) -> Option<BigRational> {
    if algebra.field().characteristic() != 2 {
        return None;
    }
    let denom = field_pow(algebra.field(), theta_exponent(algebra.group()));
    Some(BigRational::new(BigInt::from(order.clone()), BigInt::from(denom)))
}

fn is_integer_theta(theta: &BigRational) -> bool {
    theta.is_integer() && theta >= &BigRational::one()
}

/// Brute-force result: the whole unitary set and its size.
pub fn unitary_enumerate_oracle(algebra: &Arc<GroupAlgebra>, inv: &GroupInvolution, cap: u64) -> Result<UnitaryResult> {
    let set = oracle_unitary_set(algebra, inv, cap)?;
    let order = BigUint::from(set.len());
    Ok(UnitaryResult {
        group: algebra.group().id().to_string(),
        field: algebra.field().literal(),
        involution: inv.descriptor(),
        method: Method::Oracle,
        theta: if inv.kind() == crate::algebra::InvolutionKind::Canonical { theta_of(&order, algebra) } else { None },
        order,
        witnesses: Vec::new(),
        subsidiary: None,
        elements: Some(set),
    })
}

/// Outcome of traversing `N*_Ψ` fiber by fiber.
#[derive(Debug, Clone)]
pub struct ShEnumeration {
    pub central_involution: usize,
    /// `S_H` as a sorted set.
    pub s_h: ElementSet,
    /// `|N*_Ψ| = |F|^{dim I(H)} |V_*(F[G/H])|`.
    pub fiber_size: BigUint,
    /// Elements of `N*_Ψ` with `x x^* = 1`.
    pub unitary_count: u64,
    pub unitaries: Option<ElementSet>,
}

#[derive(Default)]
struct FiberAccumulator {
    products: HashSet<Vec<FieldElement>>,
    unitary_count: u64,
    unitaries: Vec<FieldElement>,
}

impl FiberAccumulator {
    fn merge(mut self, other: FiberAccumulator) -> FiberAccumulator {
        if self.products.len() < other.products.len() {
            return other.merge(self);
        }
        self.products.extend(other.products);
        self.unitary_count += other.unitary_count;
        self.unitaries.extend(other.unitaries);
        self
    }
}

/// Enumerates `S_H = { x x^* : x = lift(u) + w }` over `u ∈ V_*(F[G/⟨c⟩])`
/// (supplied as `quotient_set`) and `w ∈ I(⟨c⟩)`. Each collected product is
/// checked to be symmetric, to lie in `I(H)^+`, and to avoid nonidentity
/// solutions of `g^2 = 1` in its support.
pub fn s_h_from_quotient_set(
    algebra: &Arc<GroupAlgebra>,
    c: usize,
    quotient_set: &ElementSet,
    cap: u64,
    collect_unitaries: bool,
) -> Result<ShEnumeration> {
    let field = Arc::clone(algebra.field());
    if field.characteristic() != 2 {
        return Err(Error::OddCharacteristic);
    }
    let group = Arc::clone(algebra.group());
    group.t_c(c)?;
    let h = group.subgroup_generated(&[c])?;
    let (ideal, map) = ideal_and_quotient(algebra, &h)?;
    if quotient_set.dim() != map.target.dim() {
        return Err(Error::LengthMismatch { got: quotient_set.dim(), expected: map.target.dim() });
    }
    let n = algebra.dim();
    let q = field.order();
    let k = ideal.dim();
    let kernel_size = field_pow(&field, k);
    let fiber_size = &kernel_size * BigUint::from(quotient_set.len());
    if fiber_size > BigUint::from(cap) {
        return Err(too_large(&fiber_size, cap, &format!("S_H over {} / <{c}> over {field}", group.id())));
    }
    let kernel_size = kernel_size.to_u64().expect("bounded by cap");
    let total = fiber_size.to_u64().expect("bounded by cap");
    let sparse_basis: Vec<Vec<(usize, FieldElement)>> = ideal
        .kernel_basis
        .iter()
        .map(|b| b.support().into_iter().map(|g| (g, b.coeff(g))).collect())
        .collect();
    let star = GroupInvolution::canonical_star(&group);

    let chunks = total.div_ceil(CHUNK);
    let acc = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut acc = FiberAccumulator::default();
            let mut u_idx = (start / kernel_size) as usize;
            let mut beta = vec![FieldElement::ZERO; k];
            decode_digits(start % kernel_size, q as u64, &mut beta);
            let mut lifted = vec![FieldElement::ZERO; n];
            map.lift_into(quotient_set.row(u_idx), &mut lifted);
            let mut x = vec![FieldElement::ZERO; n];
            let mut xs = vec![FieldElement::ZERO; n];
            let mut prod = vec![FieldElement::ZERO; n];
            for _ in start..end {
                x.copy_from_slice(&lifted);
                for (b, basis) in beta.iter().zip(&sparse_basis) {
                    if b.is_zero() {
                        continue;
                    }
                    for &(g, coeff) in basis {
                        x[g] = field.add(x[g], field.mul(*b, coeff));
                    }
                }
                star.apply_into(&x, &mut xs);
                algebra.mul_into(&x, &xs, &mut prod);
                if prod[0] == FieldElement::ONE && prod[1..].iter().all(|c| c.is_zero()) {
                    acc.unitary_count += 1;
                    if collect_unitaries {
                        acc.unitaries.extend_from_slice(&x);
                    }
                }
                if !acc.products.contains(&prod) {
                    acc.products.insert(prod.clone());
                }
                if increment_digits(q, &mut beta) {
                    u_idx += 1;
                    if u_idx < quotient_set.len() {
                        map.lift_into(quotient_set.row(u_idx), &mut lifted);
                    }
                }
            }
            acc
        })
        .reduce(FiberAccumulator::default, FiberAccumulator::merge);

    let s_h = ElementSet::from_rows(n, acc.products.into_iter().collect());
    check_s_h_members(algebra, &map, &s_h)?;
    let unitaries = collect_unitaries.then(|| {
        let rows = acc.unitaries.chunks_exact(n).map(<[FieldElement]>::to_vec).collect();
        ElementSet::from_rows(n, rows)
    });
    Ok(ShEnumeration { central_involution: c, s_h, fiber_size, unitary_count: acc.unitary_count, unitaries })
}

fn check_s_h_members(algebra: &Arc<GroupAlgebra>, map: &crate::algebra::QuotientMap, s_h: &ElementSet) -> Result<()> {
    let group = algebra.group();
    let star = GroupInvolution::canonical_star(group);
    let order_two: Vec<usize> = group.involution_solutions().into_iter().filter(|&g| g != 0).collect();
    let mut ys = vec![FieldElement::ZERO; algebra.dim()];
    let mut image = vec![FieldElement::ZERO; map.target.dim()];
    for y in s_h.rows() {
        star.apply_into(y, &mut ys);
        if ys != y {
            return Err(Error::InternalInconsistency("element of S_H is not symmetric".into()));
        }
        if order_two.iter().any(|&g| !y[g].is_zero()) {
            return Err(Error::InternalInconsistency("element of S_H has an involution in its support".into()));
        }
        map.psi_into(y, &mut image);
        if image[0] != FieldElement::ONE || image[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::InternalInconsistency("element of S_H is not in I(H)^+".into()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Char2Options {
    /// Groups of at most this order are handed to the oracle.
    pub base_order: usize,
    pub search_cap: u64,
    /// Central involution used at the top level; least index when `None`.
    pub central_choice: Option<usize>,
}

impl Default for Char2Options {
    fn default() -> Self {
        Char2Options { base_order: DEFAULT_BASE_ORDER, search_cap: DEFAULT_SEARCH_CAP, central_choice: None }
    }
}

fn require_char2(algebra: &GroupAlgebra) -> Result<()> {
    algebra.require_modular()?;
    if algebra.field().characteristic() == 2 {
        Ok(())
    } else {
        Err(Error::OddCharacteristic)
    }
}

fn pick_central(group: &Group, choice: Option<usize>) -> Result<usize> {
    match choice {
        Some(c) => {
            group.t_c(c)?;
            Ok(c)
        }
        None => group.central_involutions().first().copied().ok_or(Error::NoCentralInvolution),
    }
}

/// `F[G/⟨c⟩]`, refused up front when the fibers over it cannot fit the cap:
/// `|V_*(F[G/⟨c⟩])|` is at least `|F|^{(|Ḡ|+|Ḡ{2}|)/2-1}`, so the traversal
/// visits at least that many times `|F|^{|G|/2}` elements.
fn step_quotient(algebra: &Arc<GroupAlgebra>, c: usize, cap: u64) -> Result<Arc<GroupAlgebra>> {
    let h = algebra.group().subgroup_generated(&[c])?;
    let quotient = algebra.group().quotient(&h)?;
    let field = algebra.field();
    let least = field_pow(field, algebra.dim() / 2 + theta_exponent(&quotient.group));
    if least > BigUint::from(cap) {
        return Err(Error::SearchSpaceTooLarge {
            size: format!("at least {least}"),
            cap,
            level: format!("S_H over {} / <{c}> over {field}", algebra.group().id()),
        });
    }
    GroupAlgebra::new(Arc::clone(field), quotient.group)
}

/// The element set of `V_*(FG)` in characteristic 2: oracle at or below the
/// base order, otherwise the unitary elements of each fiber over the
/// recursively computed `V_*(F[G/⟨c⟩])`.
pub fn unitary_set_char2(algebra: &Arc<GroupAlgebra>, opts: &Char2Options) -> Result<ElementSet> {
    require_char2(algebra)?;
    let group = algebra.group();
    if group.order() <= opts.base_order.max(1) {
        return oracle_unitary_set(algebra, &GroupInvolution::canonical_star(group), opts.search_cap);
    }
    let c = pick_central(group, opts.central_choice)?;
    let sub_opts = Char2Options { central_choice: None, ..*opts };
    let quotient_set = unitary_set_char2(&step_quotient(algebra, c, opts.search_cap)?, &sub_opts)?;
    let fibers = s_h_from_quotient_set(algebra, c, &quotient_set, opts.search_cap, true)?;
    let set = fibers.unitaries.expect("collected");
    verify_subgroup(algebra, &set)?;
    Ok(set)
}

/// `|S_H|` for `H = ⟨c⟩`, with the quotient's unitary set produced by the
/// char-2 recursion.
pub fn s_h_enumerate(algebra: &Arc<GroupAlgebra>, c: usize, opts: &Char2Options) -> Result<ShEnumeration> {
    require_char2(algebra)?;
    if !algebra.group().central_involutions().contains(&c) {
        return Err(Error::NotCentralInvolution(c));
    }
    let sub_opts = Char2Options { central_choice: None, ..*opts };
    let quotient_set = unitary_set_char2(&step_quotient(algebra, c, opts.search_cap)?, &sub_opts)?;
    s_h_from_quotient_set(algebra, c, &quotient_set, opts.search_cap, false)
}

/// Upper bound `|F|^{(|G|-|G{2}|+|T_c|)/4}` on `|S_H|`.
pub fn s_h_upper_bound(group: &Group, field: &FieldSpec, t_c_size: usize) -> BigUint {
    let e = (group.order() - group.involution_solutions().len() + t_c_size) / 4;
    field_pow(field, e)
}

/// Lower bound `upper · 2^{-|T_c|/2}`, valid when `T_c` commutes.
pub fn s_h_lower_bound(group: &Group, field: &FieldSpec, t_c_size: usize) -> BigRational {
    let upper = BigInt::from(s_h_upper_bound(group, field, t_c_size));
    BigRational::new(upper, BigInt::from(2u32).pow((t_c_size / 2) as u32))
}

/// `|V_*(FG)|` in characteristic 2 by the recursion. Strictly above the base
/// order one step is taken at the top level and the order is computed as
/// `|F|^{|G|/2} |V_*(F[G/⟨c⟩])| / |S_H|`; the division must be exact and must
/// agree with the direct count of unitary elements met in the fibers.
pub fn unitary_order_char2(algebra: &Arc<GroupAlgebra>, opts: &Char2Options) -> Result<UnitaryResult> {
    require_char2(algebra)?;
    let group = Arc::clone(algebra.group());
    let field = Arc::clone(algebra.field());
    let star = GroupInvolution::canonical_star(&group);
    if group.order() <= opts.base_order.max(1) {
        let mut result = unitary_enumerate_oracle(algebra, &star, opts.search_cap)?;
        result.method = Method::Recursive;
        check_theta(&result)?;
        return Ok(result);
    }
    let c = pick_central(&group, opts.central_choice)?;
    let sub_opts = Char2Options { central_choice: None, ..*opts };
    let quotient_set = unitary_set_char2(&step_quotient(algebra, c, opts.search_cap)?, &sub_opts)?;
    let fibers = s_h_from_quotient_set(algebra, c, &quotient_set, opts.search_cap, false)?;

    let s_h_size = BigUint::from(fibers.s_h.len());
    let (order, rem) = fibers.fiber_size.div_rem(&s_h_size);
    if !rem.is_zero() {
        return Err(Error::InternalInconsistency(format!(
            "|N| = {} not divisible by |S_H| = {s_h_size} for {} over {field}",
            fibers.fiber_size,
            group.id()
        )));
    }
    let direct_count = BigUint::from(fibers.unitary_count);
    if direct_count != order {
        return Err(Error::InternalInconsistency(format!(
            "index formula gives {order} but fibers hold {direct_count} unitary elements"
        )));
    }
    let t_c = group.t_c(c)?;
    let t_c_commuting = group.is_pairwise_commuting(&t_c);
    let subsidiary = Subsidiary {
        central_involution: c,
        t_c_size: t_c.len(),
        t_c_commuting,
        quotient_order: BigUint::from(quotient_set.len()),
        s_h_size,
        direct_count,
        upper_bound: s_h_upper_bound(&group, &field, t_c.len()),
        lower_bound: t_c_commuting.then(|| s_h_lower_bound(&group, &field, t_c.len())),
    };
    let result = UnitaryResult {
        group: group.id().to_string(),
        field: field.literal(),
        involution: star.descriptor(),
        method: Method::Recursive,
        theta: theta_of(&order, algebra),
        order,
        witnesses: Vec::new(),
        subsidiary: Some(subsidiary),
        elements: None,
    };
    check_theta(&result)?;
    Ok(result)
}

fn check_theta(result: &UnitaryResult) -> Result<()> {
    match &result.theta {
        Some(theta) if !is_integer_theta(theta) => Err(Error::InternalInconsistency(format!(
            "Θ = {theta} is not a positive integer for {} over {}",
            result.group, result.field
        ))),
        _ => Ok(()),
    }
}

/// `Θ = |V_*(FG)| / |F|^{(|G|+|G{2}|)/2-1}`, asserted integral.
pub fn theta(algebra: &Arc<GroupAlgebra>, opts: &Char2Options) -> Result<BigRational> {
    let result = unitary_order_char2(algebra, opts)?;
    Ok(result.theta.expect("characteristic 2"))
}

/// Whether some central involution has a pairwise commuting set of square roots.
pub fn has_commuting_t_c(group: &Group) -> bool {
    group
        .central_involutions()
        .into_iter()
        .any(|c| group.t_c(c).map(|t| group.is_pairwise_commuting(&t)).unwrap_or(false))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaProbe {
    pub values: Vec<(String, BigRational)>,
    pub t_c_commuting: bool,
    pub agree: bool,
}

/// `Θ` over several fields of characteristic 2. When some `T_c` commutes the
/// values must coincide; otherwise disagreement is only reported.
pub fn theta_across_fields(group: &Arc<Group>, fields: &[Arc<FieldSpec>], opts: &Char2Options) -> Result<ThetaProbe> {
    let mut values = Vec::new();
    for field in fields {
        let algebra = GroupAlgebra::new(Arc::clone(field), Arc::clone(group))?;
        values.push((field.literal(), theta(&algebra, opts)?));
    }
    let agree = values.windows(2).all(|w| w[0].1 == w[1].1);
    let t_c_commuting = has_commuting_t_c(group);
    if t_c_commuting && !agree {
        return Err(Error::InternalInconsistency(format!("Θ depends on the field for {}", group.id())));
    }
    Ok(ThetaProbe { values, t_c_commuting, agree })
}

/// Sizes and containments around `S_H` for `H = ⟨c⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub central_involution: usize,
    pub t_c_size: usize,
    pub t_c_commuting: bool,
    #[serde(serialize_with = "decimal")]
    pub s_h_size: BigUint,
    #[serde(serialize_with = "decimal")]
    pub upper_bound: BigUint,
    #[serde(serialize_with = "rational")]
    pub lower_bound: Option<BigRational>,
    #[serde(serialize_with = "decimal")]
    pub n1_size: BigUint,
    #[serde(serialize_with = "decimal")]
    pub n1_expected: BigUint,
    pub n1_in_s_h: bool,
    pub n1_generators_are_norms: bool,
    pub n2_size: Option<String>,
    pub n2_expected: Option<String>,
    pub n1_n2_in_s_h: Option<bool>,
    /// `(1 + ωg + ωg^2)(1 + ωg + ωg^2)^* = 1 + (ω+ω^2) g Ĥ` for all `g ∈ T_c`, `ω ∈ F`.
    pub tau_identity_holds: bool,
}

impl BoundsReport {
    pub fn within_bounds(&self) -> bool {
        let upper_ok = self.s_h_size <= self.upper_bound;
        let lower_ok = match &self.lower_bound {
            Some(lower) => &BigRational::from(BigInt::from(self.s_h_size.clone())) >= lower,
            None => true,
        };
        upper_ok && lower_ok
    }

    /// Every size and containment claim holds.
    pub fn all_hold(&self) -> bool {
        let n2_ok = match (&self.n2_size, &self.n2_expected, self.n1_n2_in_s_h) {
            (Some(a), Some(b), Some(inside)) => a == b && inside,
            (None, None, None) => !self.t_c_commuting,
            _ => false,
        };
        self.within_bounds()
            && self.n1_size == self.n1_expected
            && self.n1_in_s_h
            && self.n1_generators_are_norms
            && n2_ok
            && self.tau_identity_holds
    }
}

fn closure(algebra: &GroupAlgebra, gens: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
    let n = algebra.dim();
    let mut one = vec![FieldElement::ZERO; n];
    one[0] = FieldElement::ONE;
    let mut seen: HashSet<Vec<FieldElement>> = HashSet::from([one.clone()]);
    let mut members = vec![one];
    let mut head = 0;
    let mut prod = vec![FieldElement::ZERO; n];
    while head < members.len() {
        for g in gens {
            algebra.mul_into(&members[head], g, &mut prod);
            if seen.insert(prod.clone()) {
                members.push(prod.clone());
            }
        }
        head += 1;
    }
    members.sort_unstable();
    members
}

/// Builds `N₁` (and `N₂` when `T_c` commutes), checks their sizes and that
/// they and `N₁ N₂` sit inside the measured `S_H`, and evaluates both bounds.
pub fn bounds_and_constructions(algebra: &Arc<GroupAlgebra>, c: usize, s_h: &ElementSet) -> Result<BoundsReport> {
    require_char2(algebra)?;
    let group = Arc::clone(algebra.group());
    let field = Arc::clone(algebra.field());
    let t_c = group.t_c(c)?;
    let t_c_commuting = group.is_pairwise_commuting(&t_c);
    let star = GroupInvolution::canonical_star(&group);
    let h = group.subgroup_generated(&[c])?;
    let hat = algebra.subgroup_sum(&h);
    let one = algebra.one();

    // g ∉ G{2} ∪ T_c, grouped into orbits {g, g^-1, gc, g^-1 c}
    let mut used = vec![false; group.order()];
    let mut orbit_reps = Vec::new();
    for g in 0..group.order() {
        let sq = group.mul(g, g);
        if used[g] || sq == 0 || sq == c {
            continue;
        }
        orbit_reps.push(g);
        let gi = group.inverse(g);
        for x in [g, gi, group.mul(g, c), group.mul(gi, c)] {
            used[x] = true;
        }
    }
    let mut n1_gens = Vec::new();
    let mut norms_ok = true;
    for &g in &orbit_reps {
        let pair = algebra.basis(g).add(&algebra.basis(group.inverse(g)))?;
        for alpha in field.elements().filter(|a| !a.is_zero()) {
            let generator = one.add(&pair.mul(&hat)?.scale(alpha))?;
            let half = one.add(&algebra.basis(g).mul(&hat)?.scale(alpha))?;
            norms_ok &= half.mul(&half.involute(&star)?)? == generator;
            if field.additive_basis().contains(&alpha) {
                n1_gens.push(generator.coeffs().to_vec());
            }
        }
    }
    let n1 = closure(algebra, &n1_gens);
    let n1_expected = field_pow(&field, (group.order() - group.involution_solutions().len() - t_c.len()) / 4);
    let n1_in_s_h = n1.iter().all(|y| s_h.contains(y));

    let mut tau_identity_holds = true;
    for &g in &t_c {
        for omega in field.elements() {
            let w = |x: usize| algebra.basis(x).scale(omega);
            let x = one.add(&w(g))?.add(&w(group.mul(g, g)))?;
            let lhs = x.mul(&x.involute(&star)?)?;
            let rhs = one.add(&algebra.basis(g).mul(&hat)?.scale(field.add(omega, field.mul(omega, omega))))?;
            tau_identity_holds &= lhs == rhs;
        }
    }

    let (n2_size, n2_expected, n1_n2_in_s_h) = if t_c_commuting {
        let image = field.tau_image()?;
        let mut n2_gens = Vec::new();
        for &g in &t_c {
            let gh = algebra.basis(g).mul(&hat)?;
            for &alpha in image.iter().filter(|a| !a.is_zero()) {
                n2_gens.push(one.add(&gh.scale(alpha))?.coeffs().to_vec());
            }
        }
        let n2 = closure(algebra, &n2_gens);
        let expected = BigUint::from(field.order() / 2).pow((t_c.len() / 2) as u32);
        let mut products = HashSet::new();
        let mut prod = vec![FieldElement::ZERO; algebra.dim()];
        let mut inside = true;
        for a in &n1 {
            for b in &n2 {
                algebra.mul_into(a, b, &mut prod);
                inside &= s_h.contains(&prod);
                products.insert(prod.clone());
            }
        }
        let direct = products.len() == n1.len() * n2.len();
        (Some(n2.len().to_string()), Some(expected.to_string()), Some(inside && direct))
    } else {
        (None, None, None)
    };

    Ok(BoundsReport {
        central_involution: c,
        t_c_size: t_c.len(),
        t_c_commuting,
        s_h_size: BigUint::from(s_h.len()),
        upper_bound: s_h_upper_bound(&group, &field, t_c.len()),
        lower_bound: t_c_commuting.then(|| s_h_lower_bound(&group, &field, t_c.len())),
        n1_size: BigUint::from(n1.len()),
        n1_expected,
        n1_in_s_h,
        n1_generators_are_norms: norms_ok,
        n2_size,
        n2_expected,
        n1_n2_in_s_h,
        tau_identity_holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Formula in odd characteristic, the recursion in characteristic 2, each
    /// cross-checked against the oracle when its search space fits the cap.
    #[default]
    Auto,
    Formula,
    Recursive,
    Oracle,
}

fn formula_result(algebra: &Arc<GroupAlgebra>, inv: &GroupInvolution) -> Result<UnitaryResult> {
    Ok(UnitaryResult {
        group: algebra.group().id().to_string(),
        field: algebra.field().literal(),
        involution: inv.descriptor(),
        method: Method::Formula,
        order: unitary_order_odd(algebra, inv)?,
        theta: None,
        witnesses: Vec::new(),
        subsidiary: None,
        elements: None,
    })
}

fn oracle_fits(algebra: &GroupAlgebra, cap: u64) -> bool {
    field_pow(algebra.field(), algebra.dim() - 1) <= BigUint::from(cap)
}

/// One unitary-subgroup computation with the requested method.
pub fn compute(
    algebra: &Arc<GroupAlgebra>,
    inv: &GroupInvolution,
    choice: MethodChoice,
    opts: &Char2Options,
) -> Result<UnitaryResult> {
    let even = algebra.field().characteristic() == 2;
    let canonical = inv.kind() == crate::algebra::InvolutionKind::Canonical;
    match choice {
        MethodChoice::Formula => formula_result(algebra, inv),
        MethodChoice::Oracle => unitary_enumerate_oracle(algebra, inv, opts.search_cap),
        MethodChoice::Recursive => {
            if !canonical {
                return Err(Error::MethodUnavailable("the recursion needs the canonical involution".into()));
            }
            unitary_order_char2(algebra, opts)
        }
        MethodChoice::Auto => {
            algebra.require_modular()?;
            if inv.group().as_ref() != algebra.group().as_ref() {
                return Err(Error::SpecMismatch);
            }
            let primary = if !even {
                Some(formula_result(algebra, inv)?)
            } else if canonical {
                let base = opts.base_order.min(algebra.dim() / 2).max(1);
                Some(unitary_order_char2(algebra, &Char2Options { base_order: base, ..*opts })?)
            } else {
                None
            };
            if !oracle_fits(algebra, opts.search_cap) {
                return primary.ok_or_else(|| {
                    too_large(&field_pow(algebra.field(), algebra.dim() - 1), opts.search_cap, "oracle")
                });
            }
            let oracle = unitary_enumerate_oracle(algebra, inv, opts.search_cap)?;
            match primary {
                None => Ok(oracle),
                Some(mut result) => {
                    if result.order != oracle.order {
                        return Err(Error::InternalInconsistency(format!(
                            "{:?} gives {} but the oracle finds {} for {} over {}",
                            result.method, result.order, oracle.order, result.group, result.field
                        )));
                    }
                    result.elements = oracle.elements;
                    Ok(result)
                }
            }
        }
    }
}

fn exact_log(value: &BigUint, base: u64) -> Option<u64> {
    if value.is_zero() || base < 2 {
        return None;
    }
    let base = BigUint::from(base);
    let mut rest = value.clone();
    let mut e = 0;
    while !rest.is_one() {
        let (quot, rem) = rest.div_rem(&base);
        if !rem.is_zero() {
            return None;
        }
        rest = quot;
        e += 1;
    }
    Some(e)
}

/// Recovers `|G|` from `|V_*(FG)|` for the canonical involution.
///
/// In odd characteristic `|G| = 2 log_{|F|} |V_*| + 1`. In characteristic 2
/// the candidates are the powers of two `n` with
/// `|F|^{n/2-1} <= |V_*| <= |F|^{n-1}` whose order is also of the form
/// `Θ |F|^{(n+|G{2}|)/2-1}` with `Θ >= 1` and `|G{2}| >= 2`.
pub fn recover_group_order(order_v: &BigUint, field: &FieldSpec) -> Result<u64> {
    let q = field.order() as u64;
    if order_v.is_one() {
        return Ok(1);
    }
    let p = field.characteristic();
    if p != 2 {
        let e = exact_log(order_v, q)
            .ok_or_else(|| Error::NotRecoverable(format!("{order_v} is not a power of {q}")))?;
        return Ok(2 * e + 1);
    }
    let bits = exact_log(order_v, 2)
        .ok_or_else(|| Error::NotRecoverable(format!("{order_v} is not a power of 2")))?;
    let m = field.degree() as u64;
    let mut candidates = Vec::new();
    let mut n = 2u64;
    while m * (n / 2 - 1) <= bits {
        let bracket = m * (n / 2 - 1) <= bits && bits <= m * (n - 1);
        // Θ >= 1 and |G{2}| >= 2 push the lower end up to |F|^{n/2}
        let refined = bits >= m * (n / 2);
        if bracket && refined {
            candidates.push(n);
        }
        n *= 2;
    }
    match candidates.as_slice() {
        [] => Err(Error::NotRecoverable(format!("order {order_v} over {field}"))),
        [n] => Ok(*n),
        _ => Err(Error::Ambiguous(candidates)),
    }
}
