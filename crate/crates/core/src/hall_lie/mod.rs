//! Free Lie rings over the integers or a prime field, truncated at a degree
//! cap, with Hall-basis arithmetic, graded ideals and finitely presented
//! graded quotients.

mod basis;
mod ideal;
mod quotient;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use basis::{witt_dimension, GeneratorId, HallBasis, HallWord, Node, Sparse};
pub use ideal::{ideal_closure, quotient_dims, reduce, FreeQuotient, LieIdeal};
pub use quotient::{Extension, Homog, LieQuotient, QElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("elements belong to different Lie ring contexts")]
    ContextMismatch,
    #[error("left-normed product of an empty list")]
    EmptyList,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("degree cap {cap} is too small: checking {what} needs degree {needed}")]
    CapTooSmall { cap: usize, needed: usize, what: &'static str },
    #[error("rank and degree cap must both be at least 1")]
    BadParameters,
    #[error("witness index {n} needs degree {needed}, above the cap {cap}")]
    WitnessTooLarge { n: usize, needed: usize, cap: usize },
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientRing {
    Integers,
    Prime(u64),
}

impl CoefficientRing {
    pub fn prime(p: u64) -> Result<Self, LieError> {
        if is_prime(p) {
            Ok(CoefficientRing::Prime(p))
        } else {
            Err(LieError::NotPrime(p))
        }
    }

    pub fn normalize(&self, x: BigInt) -> BigInt {
        match self {
            CoefficientRing::Integers => x,
            CoefficientRing::Prime(p) => x.mod_floor(&BigInt::from(*p)),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoefficientRing::Integers => 0,
            CoefficientRing::Prime(p) => *p,
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Integers => write!(f, "Z"),
            CoefficientRing::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// Rank, degree cap and coefficient ring of a truncated free Lie ring.
#[derive(Debug)]
pub struct LieContext {
    basis: HallBasis,
    ring: CoefficientRing,
}

impl LieContext {
    pub fn new(rank: usize, cap: usize, ring: CoefficientRing) -> Result<Arc<Self>, LieError> {
        if rank == 0 || cap == 0 {
            return Err(LieError::BadParameters);
        }
        if let CoefficientRing::Prime(p) = ring {
            if !is_prime(p) {
                return Err(LieError::NotPrime(p));
            }
        }
        Ok(Arc::new(LieContext { basis: HallBasis::new(rank, cap), ring }))
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn cap(&self) -> usize {
        self.basis.cap()
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn hall(&self) -> &HallBasis {
        &self.basis
    }

    fn same(&self, other: &LieContext) -> bool {
        std::ptr::eq(self, other)
            || (self.rank() == other.rank() && self.cap() == other.cap() && self.ring == other.ring)
    }

    pub fn zero(self: &Arc<Self>) -> LieElement {
        LieElement { ctx: self.clone(), coords: BTreeMap::new() }
    }

    /// The `i`-th free generator, 1-based.
    pub fn generator(self: &Arc<Self>, i: usize) -> LieElement {
        assert!((1..=self.rank()).contains(&i), "generator x{i} out of range");
        self.basis_element(i - 1)
    }

    pub fn basis_element(self: &Arc<Self>, idx: usize) -> LieElement {
        let mut coords = BTreeMap::new();
        coords.insert(idx, BigInt::from(1));
        LieElement { ctx: self.clone(), coords }
    }

    pub fn from_coords(self: &Arc<Self>, it: impl IntoIterator<Item = (usize, BigInt)>) -> LieElement {
        let mut e = self.zero();
        for (k, c) in it {
            e.add_term(k, c);
        }
        e
    }

    /// Hall basis elements of the given weight as ring elements.
    pub fn layer_elements(self: &Arc<Self>, w: usize) -> Vec<LieElement> {
        self.basis.layer(w).map(|i| self.basis_element(i)).collect()
    }
}

/// Element of a truncated free Lie ring in Hall coordinates.
#[derive(Clone)]
pub struct LieElement {
    ctx: Arc<LieContext>,
    coords: BTreeMap<usize, BigInt>,
}

impl PartialEq for LieElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.coords == other.coords
    }
}

impl Eq for LieElement {}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coords {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*{}", self.ctx.basis.word(*k))?;
        }
        Ok(())
    }
}

impl LieElement {
    pub fn context(&self) -> &Arc<LieContext> {
        &self.ctx
    }

    pub fn coords(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coords.iter().map(|(k, c)| (*k, c))
    }

    pub fn coefficient(&self, idx: usize) -> BigInt {
        self.coords.get(&idx).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn add_term(&mut self, k: usize, c: BigInt) {
        let entry = self.coords.entry(k).or_default();
        *entry = self.ctx.ring.normalize(&*entry + c);
        if entry.is_zero() {
            self.coords.remove(&k);
        }
    }

    fn check(&self, other: &LieElement) -> Result<(), LieError> {
        if self.ctx.same(&other.ctx) {
            Ok(())
        } else {
            Err(LieError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &LieElement) -> Result<LieElement, LieError> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coords {
            out.add_term(*k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LieElement) -> Result<LieElement, LieError> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> LieElement {
        self.ctx.from_coords(self.coords.iter().map(|(k, x)| (*k, x * c)))
    }

    pub fn neg(&self) -> LieElement {
        self.scale(&BigInt::from(-1))
    }

    /// Weights that carry a nonzero coefficient.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.coords.keys().map(|&k| self.ctx.basis.weight(k)).collect();
        d.dedup();
        d
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    pub fn homogeneous_part(&self, w: usize) -> LieElement {
        let range = self.ctx.basis.layer(w);
        self.ctx.from_coords(self.coords.range(range).map(|(k, c)| (*k, c.clone())))
    }

    /// Lie bracket, truncated at the degree cap.
    pub fn bracket(&self, other: &LieElement) -> Result<LieElement, LieError> {
        self.check(other)?;
        let basis = &self.ctx.basis;
        let mut out = self.ctx.zero();
        for (i, a) in &self.coords {
            for (j, b) in &other.coords {
                let prod = basis.bracket_basis(*i, *j);
                if prod.is_empty() {
                    continue;
                }
                let ab = a * b;
                for &(k, c) in prod.iter() {
                    out.add_term(k, &ab * c);
                }
            }
        }
        Ok(out)
    }

    /// Coefficients of the weight-`w` part as a dense vector over GF(p).
    pub(crate) fn layer_vector_mod(&self, w: usize, p: u64) -> Vec<u64> {
        let range = self.ctx.basis.layer(w);
        let mut v = vec![0u64; range.len()];
        let pb = BigInt::from(p);
        for (k, c) in self.coords.range(range.clone()) {
            v[k - range.start] = c.mod_floor(&pb).to_u64().unwrap();
        }
        v
    }

    pub(crate) fn layer_vector_int(&self, w: usize) -> Vec<BigInt> {
        let range = self.ctx.basis.layer(w);
        let mut v = vec![BigInt::zero(); range.len()];
        for (k, c) in self.coords.range(range.clone()) {
            v[k - range.start] = c.clone();
        }
        v
    }
}

/// Left-normed product `((x1·x2)·x3)·…`.
pub fn left_normed(xs: &[LieElement]) -> Result<LieElement, LieError> {
    let (first, rest) = xs.split_first().ok_or(LieError::EmptyList)?;
    rest.iter().try_fold(first.clone(), |acc, x| acc.bracket(x))
}

/// A graded Lie algebra generated in degree one and truncated at a cap.
pub trait GradedLie {
    type Elem: Clone + fmt::Debug;

    fn cap(&self) -> usize;
    /// Spanning set of the degree-`d` layer (a basis where available).
    fn basis(&self, d: usize) -> Vec<Self::Elem>;
    fn bracket(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    /// Lowest degree carrying a nonzero component, if any.
    fn min_degree(&self, x: &Self::Elem) -> Option<usize>;

    fn left_normed(&self, xs: &[Self::Elem]) -> Result<Self::Elem, LieError> {
        let (first, rest) = xs.split_first().ok_or(LieError::EmptyList)?;
        Ok(rest.iter().fold(first.clone(), |acc, x| self.bracket(&acc, x)))
    }

    fn dims(&self) -> Vec<usize> {
        (1..=self.cap()).map(|d| self.basis(d).len()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SandwichMode {
    /// `a h a = 0` for every `h`.
    Condition1,
    /// Additionally `a h k a = 0` for every `h, k`.
    Full,
}

#[derive(Clone, Debug)]
pub struct SandwichWitness<E> {
    pub x: E,
    pub y: Option<E>,
    pub value: E,
}

#[derive(Clone, Debug)]
pub struct SandwichReport<E> {
    pub holds: bool,
    pub instances_checked: usize,
    pub witness: Option<SandwichWitness<E>>,
}

/// Checks the sandwich conditions for `a` on basis instances up to the cap.
pub fn is_sandwich<L: GradedLie>(
    alg: &L,
    a: &L::Elem,
    mode: SandwichMode,
) -> Result<SandwichReport<L::Elem>, LieError> {
    let cap = alg.cap();
    let Some(da) = alg.min_degree(a) else {
        return Ok(SandwichReport { holds: true, instances_checked: 0, witness: None });
    };
    let need1 = 2 * da + 1;
    if cap < need1 {
        return Err(LieError::CapTooSmall { cap, needed: need1, what: "a·x·a" });
    }
    let need2 = 2 * da + 2;
    if mode == SandwichMode::Full && cap < need2 {
        return Err(LieError::CapTooSmall { cap, needed: need2, what: "a·x·y·a" });
    }
    let mut checked = 0;
    for d in 1..=cap - 2 * da {
        for h in alg.basis(d) {
            let v = alg.left_normed(&[a.clone(), h.clone(), a.clone()])?;
            checked += 1;
            if !alg.is_zero(&v) {
                let witness = Some(SandwichWitness { x: h, y: None, value: v });
                return Ok(SandwichReport { holds: false, instances_checked: checked, witness });
            }
        }
    }
    if mode == SandwichMode::Full {
        for d1 in 1..=cap - 2 * da - 1 {
            for h in alg.basis(d1) {
                for d2 in 1..=cap - 2 * da - d1 {
                    for k in alg.basis(d2) {
                        let v = alg.left_normed(&[a.clone(), h.clone(), k.clone(), a.clone()])?;
                        checked += 1;
                        if !alg.is_zero(&v) {
                            let witness = Some(SandwichWitness { x: h, y: Some(k), value: v });
                            return Ok(SandwichReport { holds: false, instances_checked: checked, witness });
                        }
                    }
                }
            }
        }
    }
    Ok(SandwichReport { holds: true, instances_checked: checked, witness: None })
}

/// The free Lie ring itself, viewed as a graded algebra.
impl GradedLie for Arc<LieContext> {
    type Elem = LieElement;

    fn cap(&self) -> usize {
        LieContext::cap(self)
    }

    fn basis(&self, d: usize) -> Vec<LieElement> {
        self.layer_elements(d)
    }

    fn bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        x.bracket(y).expect("elements of one context")
    }

    fn is_zero(&self, x: &LieElement) -> bool {
        x.is_zero()
    }

    fn min_degree(&self, x: &LieElement) -> Option<usize> {
        x.degrees().first().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(r: usize, d: usize, ring: CoefficientRing) -> Arc<LieContext> {
        LieContext::new(r, d, ring).unwrap()
    }

    #[test]
    fn bracket_alternating_and_basis_convention() {
        let c = ctx(2, 3, CoefficientRing::Integers);
        let (a, b) = (c.generator(1), c.generator(2));
        assert!(a.bracket(&a).unwrap().is_zero());
        let ba = b.bracket(&a).unwrap();
        let k = c.hall().pair_index(1, 0).unwrap();
        assert_eq!(ba, c.basis_element(k));
        assert_eq!(a.bracket(&b).unwrap(), ba.neg());
    }

    #[test]
    fn left_normed_basics() {
        let c = ctx(2, 4, CoefficientRing::Integers);
        let (a, b) = (c.generator(1), c.generator(2));
        assert_eq!(left_normed(&[a.clone()]).unwrap(), a);
        assert_eq!(left_normed(&[]), Err(LieError::EmptyList));
        let aba = left_normed(&[a.clone(), b.clone(), a.clone()]).unwrap();
        assert!(!aba.is_zero());
        assert_eq!(aba.degrees(), vec![3]);
    }

    #[test]
    fn context_mismatch_is_reported() {
        let c1 = ctx(2, 3, CoefficientRing::Integers);
        let c2 = ctx(2, 3, CoefficientRing::Prime(3));
        assert_eq!(c1.generator(1).bracket(&c2.generator(2)), Err(LieError::ContextMismatch));
    }

    #[test]
    fn odd_char_expansion_identity() {
        // x(yaa) = xyaa - 2 xaya + xaay, an identity in any Lie ring
        let c = ctx(3, 4, CoefficientRing::Integers);
        let (a, x, y) = (c.generator(1), c.generator(2), c.generator(3));
        let yaa = left_normed(&[y.clone(), a.clone(), a.clone()]).unwrap();
        let lhs = x.bracket(&yaa).unwrap();
        let t1 = left_normed(&[x.clone(), y.clone(), a.clone(), a.clone()]).unwrap();
        let t2 = left_normed(&[x.clone(), a.clone(), y.clone(), a.clone()]).unwrap();
        let t3 = left_normed(&[x.clone(), a.clone(), a.clone(), y.clone()]).unwrap();
        let rhs = t1.sub(&t2.scale(&BigInt::from(2))).unwrap().add(&t3).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gf2_bracket_symmetric() {
        let c = ctx(2, 5, CoefficientRing::Prime(2));
        let a = c.generator(1);
        let b = c.generator(2);
        let x = a.bracket(&b).unwrap().add(&a).unwrap();
        let y = b.add(&left_normed(&[b.clone(), a.clone(), a.clone()]).unwrap()).unwrap();
        assert_eq!(x.bracket(&y).unwrap(), y.bracket(&x).unwrap());
    }

    #[test]
    fn sandwich_zero_element_and_cap_errors() {
        let c = ctx(2, 2, CoefficientRing::Prime(2));
        let r = is_sandwich(&c, &c.zero(), SandwichMode::Full).unwrap();
        assert!(r.holds);
        assert!(matches!(
            is_sandwich(&c, &c.generator(1), SandwichMode::Condition1),
            Err(LieError::CapTooSmall { .. })
        ));
    }

    #[test]
    fn free_generators_are_not_sandwich() {
        let c = ctx(2, 3, CoefficientRing::Integers);
        let r = is_sandwich(&c, &c.generator(1), SandwichMode::Condition1).unwrap();
        assert!(!r.holds);
        assert!(r.witness.is_some());
    }
}
