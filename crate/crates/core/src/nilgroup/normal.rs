use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::{Exp, GroupElement, GroupError, PcPresentation};
use crate::lattice::smith_invariants;

/// Nilpotency class of a (possibly truncated) quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassBound {
    Exact(usize),
    /// The term of the lower central series at the ambient cap is
    /// nontrivial, so only a lower bound is visible.
    AtLeast(usize),
}

impl ClassBound {
    /// True when the class is known to be at most `k`.
    pub fn at_most(self, k: usize) -> bool {
        matches!(self, ClassBound::Exact(c) if c <= k)
    }
}

impl fmt::Display for ClassBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassBound::Exact(c) => write!(f, "{c}"),
            ClassBound::AtLeast(c) => write!(f, "≥ {c} (truncated at class cap {c})"),
        }
    }
}

/// A normal subgroup of a free nilpotent group, held as an induced
/// polycyclic sequence: at most one element per leading position, with a
/// positive leading exponent.
#[derive(Clone, Debug)]
pub struct NormalSubgroup {
    pres: Arc<PcPresentation>,
    pivots: Vec<Option<Vec<Exp>>>,
    /// Every position from here on carries a pivot with leading exponent 1,
    /// so the subgroup contains the tail of the pc series.
    full_from: usize,
}

fn lead(v: &[Exp]) -> Option<usize> {
    v.iter().position(|&e| e != 0)
}

impl NormalSubgroup {
    pub fn trivial(pres: &Arc<PcPresentation>) -> Self {
        NormalSubgroup { pres: pres.clone(), pivots: vec![None; pres.len()], full_from: pres.len() }
    }

    /// Normal closure of `relators`.
    pub fn closure(pres: &Arc<PcPresentation>, relators: &[GroupElement]) -> Result<Self, GroupError> {
        let mut n = Self::trivial(pres);
        n.extend(relators.iter().cloned())?;
        Ok(n)
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.pres
    }

    /// Adds the normal closure of further elements; true if the subgroup grew.
    pub fn extend(&mut self, elems: impl IntoIterator<Item = GroupElement>) -> Result<bool, GroupError> {
        let mut queue = VecDeque::new();
        for g in elems {
            if !Arc::ptr_eq(g.presentation(), &self.pres) && **g.presentation() != *self.pres {
                return Err(GroupError::Mismatch);
            }
            queue.push_back(g.exps);
        }
        self.run(queue)
    }

    /// True when `γ_k` of the ambient group is contained in the subgroup.
    pub fn contains_term(&self, k: usize) -> bool {
        self.full_from <= self.pres.layer(k).start
    }

    fn truncate(&self, x: &mut [Exp]) {
        for e in &mut x[self.full_from..] {
            *e = 0;
        }
    }

    /// Remainder of `x` after dividing out pivots; zero iff `x` is a member.
    fn sift(&self, mut x: Vec<Exp>) -> Result<Vec<Exp>, GroupError> {
        loop {
            self.truncate(&mut x);
            let Some(p) = lead(&x) else { return Ok(x) };
            let Some(h) = &self.pivots[p] else { return Ok(x) };
            if x[p] % h[p] != 0 {
                return Ok(x);
            }
            let hq = self.pres.power_vec(h, -(x[p] / h[p]))?;
            self.pres.mul_into(&mut x, &hq)?;
        }
    }

    fn run(&mut self, queue: VecDeque<Vec<Exp>>) -> Result<bool, GroupError> {
        let mut grew = false;
        let class = self.pres.class_cap();
        let m = self.pres.len();
        let gens: Vec<Vec<Exp>> = (0..self.pres.rank())
            .map(|i| {
                let mut v = vec![0; m];
                v[i] = 1;
                v
            })
            .collect();
        // Pending elements bucketed by leading position, lowest first.
        let mut buckets: Vec<Vec<Vec<Exp>>> = vec![Vec::new(); m];
        let push = |buckets: &mut Vec<Vec<Vec<Exp>>>, x: Vec<Exp>| {
            if let Some(p) = lead(&x) {
                buckets[p].push(x);
            }
        };
        for x in queue {
            push(&mut buckets, x);
        }
        let mut cursor = 0;
        while cursor < m {
            if buckets[cursor].is_empty() {
                cursor += 1;
                continue;
            }
            let p = cursor;
            if p >= self.full_from {
                buckets[p].clear();
                cursor += 1;
                continue;
            }
            let old = self.pivots[p].take();
            let mut rows: Vec<Vec<Exp>> = std::mem::take(&mut buckets[p]);
            rows.extend(old.iter().cloned());
            // Joint Euclid on the leading exponents, always dividing by the
            // smallest one; rows leaving position `p` go back to the queue.
            let pivot = loop {
                let mut i = 0;
                while i < rows.len() {
                    self.truncate(&mut rows[i]);
                    if lead(&rows[i]) == Some(p) {
                        i += 1;
                    } else {
                        push(&mut buckets, rows.swap_remove(i));
                    }
                }
                if rows.len() <= 1 {
                    break rows.pop();
                }
                let k = (0..rows.len()).min_by_key(|&i| rows[i][p].unsigned_abs()).expect("nonempty");
                let a = rows.swap_remove(k);
                for x in rows.iter_mut() {
                    let q = x[p] / a[p];
                    if q != 0 {
                        let aq = self.pres.power_vec(&a, -q)?;
                        self.pres.mul_into(x, &aq)?;
                        self.reduce_tail(x, p + 1)?;
                    }
                }
                rows.push(a);
            };
            let Some(mut new) = pivot else {
                // A zero row cannot arise while `old` sits at `p`.
                debug_assert!(old.is_none());
                continue;
            };
            if new[p] < 0 {
                new = self.pres.inverse_vec(&new)?;
            }
            self.reduce_tail(&mut new, p + 1)?;
            if old.as_ref() == Some(&new) {
                self.pivots[p] = old;
                continue;
            }
            grew = true;
            let wp = self.pres.weight(p);
            if wp < class {
                for g in &gens {
                    push(&mut buckets, self.pres.commutator_vec(&new, g)?);
                }
            }
            for (q, other) in self.pivots.iter().enumerate() {
                if let Some(o) = other {
                    if wp + self.pres.weight(q) <= class {
                        push(&mut buckets, self.pres.commutator_vec(&new, o)?);
                    }
                }
            }
            self.pivots[p] = Some(new);
            self.update_full_from();
        }
        if grew {
            for p in 0..self.full_from {
                if let Some(mut h) = self.pivots[p].take() {
                    self.reduce_tail(&mut h, p + 1)?;
                    self.pivots[p] = Some(h);
                }
            }
        }
        Ok(grew)
    }

    /// Reduces the exponents of `x` at pivot positions `>= from` into
    /// `[0, lead)` by right multiplication with pivot powers.
    fn reduce_tail(&self, x: &mut Vec<Exp>, from: usize) -> Result<(), GroupError> {
        self.truncate(x);
        for q in from..self.full_from {
            if let Some(h) = &self.pivots[q] {
                let c = x[q].div_euclid(h[q]);
                if c != 0 {
                    let hc = self.pres.power_vec(h, -c)?;
                    self.pres.mul_into(x, &hc)?;
                }
            }
        }
        self.truncate(x);
        Ok(())
    }

    fn update_full_from(&mut self) {
        let old = self.full_from;
        while self.full_from > 0 && matches!(&self.pivots[self.full_from - 1], Some(h) if h[self.full_from - 1] == 1) {
            self.full_from -= 1;
        }
        if self.full_from < old {
            let f = self.full_from;
            for h in self.pivots.iter_mut().take(f).flatten() {
                for e in &mut h[f..] {
                    *e = 0;
                }
            }
        }
    }

    pub fn contains(&self, g: &GroupElement) -> Result<bool, GroupError> {
        Ok(lead(&self.sift(g.exps.clone())?).is_none())
    }

    /// Canonical representative of the coset `gN`: at each pivot position the
    /// exponent is reduced into `[0, lead)`, and positions covered by the
    /// subgroup's full tail are zero.
    pub fn canonical(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        let mut x = g.exps.clone();
        self.reduce_tail(&mut x, 0)?;
        GroupElement::from_exponents(&self.pres, x)
    }

    /// Pivot rows with leading position in weight layer `w`, restricted to
    /// that layer's coordinates.
    pub fn layer_lattice(&self, w: usize) -> Vec<Vec<Exp>> {
        let range = self.pres.layer(w);
        range
            .clone()
            .filter_map(|p| {
                if p >= self.full_from {
                    let mut v = vec![0; range.len()];
                    v[p - range.start] = 1;
                    return Some(v);
                }
                self.pivots[p].as_ref().map(|h| h[range.clone()].to_vec())
            })
            .collect()
    }

    /// Elements of the induced sequence, by leading position.
    pub fn pivots(&self) -> impl Iterator<Item = (usize, &[Exp])> + '_ {
        self.pivots.iter().enumerate().filter_map(|(p, h)| h.as_ref().map(|h| (p, h.as_slice())))
    }

    pub fn full_from(&self) -> usize {
        self.full_from
    }
}

/// Invariants of one lower central factor `γ_w(Q)/γ_{w+1}(Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerInvariants {
    pub weight: usize,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl LayerInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for LayerInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "γ{}/γ{}: {}", self.weight, self.weight + 1, parts.join(" × "))
    }
}

/// A free nilpotent group modulo the normal closure of a relator set.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    normal: NormalSubgroup,
    /// The represented group is known to have class at most the parent's
    /// cap, so results at the cap carry no truncation marker.
    untruncated: bool,
}

impl QuotientPresentation {
    pub fn new(parent: &Arc<PcPresentation>, relators: &[GroupElement]) -> Result<Self, GroupError> {
        Ok(QuotientPresentation { normal: NormalSubgroup::closure(parent, relators)?, untruncated: false })
    }

    pub fn from_normal(normal: NormalSubgroup) -> Self {
        QuotientPresentation { normal, untruncated: false }
    }

    pub fn parent(&self) -> &Arc<PcPresentation> {
        &self.normal.pres
    }

    pub fn normal_subgroup(&self) -> &NormalSubgroup {
        &self.normal
    }

    pub fn add_relators(&mut self, relators: impl IntoIterator<Item = GroupElement>) -> Result<bool, GroupError> {
        self.normal.extend(relators)
    }

    /// The same group over the free nilpotent group of class `k`, available
    /// when `γ_{k+1}` of the parent lies in the normal subgroup.
    pub fn with_class_cap(&self, k: usize) -> Result<Option<QuotientPresentation>, GroupError> {
        let parent = self.parent();
        if k >= parent.class_cap() || !self.normal.contains_term(k + 1) {
            return Ok(None);
        }
        let small = super::free_nilpotent(parent.rank(), k)?;
        debug_assert_eq!(small.weights(), &parent.weights()[..small.len()]);
        let rels = self
            .normal
            .pivots()
            .filter(|(p, _)| *p < small.len())
            .map(|(_, h)| GroupElement::from_exponents(&small, h[..small.len()].to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        let normal = NormalSubgroup::closure(&small, &rels)?;
        Ok(Some(QuotientPresentation { normal, untruncated: true }))
    }

    /// Image of a parent element in the presentation returned by
    /// [`with_class_cap`](Self::with_class_cap).
    pub fn project(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        let m = self.parent().len();
        if g.exps.len() < m {
            return Err(GroupError::Mismatch);
        }
        GroupElement::from_exponents(self.parent(), g.exps[..m].to_vec())
    }

    /// Canonical image of a parent element.
    pub fn image(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.normal.canonical(g)
    }

    pub fn is_trivial(&self, g: &GroupElement) -> Result<bool, GroupError> {
        self.normal.contains(g)
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.image(&a.mul(b)?)
    }

    pub fn layer(&self, w: usize) -> LayerInvariants {
        let n = self.parent().layer(w).len();
        let rows: Vec<Vec<BigInt>> =
            self.normal.layer_lattice(w).iter().map(|r| r.iter().map(|&e| BigInt::from(e)).collect()).collect();
        let (free_rank, torsion) = smith_invariants(&rows, n);
        LayerInvariants { weight: w, free_rank, torsion }
    }

    /// Lower central factors of weights `1..=cap`.
    pub fn lower_central_series(&self) -> Vec<LayerInvariants> {
        (1..=self.parent().class_cap()).map(|w| self.layer(w)).collect()
    }

    pub fn class(&self) -> ClassBound {
        let cap = self.parent().class_cap();
        match (1..=cap).find(|&k| self.normal.contains_term(k)) {
            Some(k) => ClassBound::Exact(k - 1),
            None if self.untruncated => ClassBound::Exact(cap),
            None => ClassBound::AtLeast(cap),
        }
    }

    /// Class of the subgroup generated by `gens` inside the quotient.
    pub fn subgroup_class(&self, gens: &[GroupElement]) -> Result<ClassBound, GroupError> {
        let cap = self.parent().class_cap();
        let mut level: Vec<GroupElement> = Vec::new();
        let mut seen = HashSet::new();
        for g in gens {
            let c = self.image(g)?;
            if !c.is_identity() && seen.insert(c.exps.clone()) {
                level.push(c);
            }
        }
        let gens = level.clone();
        let mut k = 1;
        while !level.is_empty() {
            if k == cap {
                return Ok(if self.untruncated { ClassBound::Exact(cap) } else { ClassBound::AtLeast(cap) });
            }
            let mut next = Vec::new();
            let mut seen = HashSet::new();
            for u in &level {
                for s in &gens {
                    let c = self.image(&u.commutator(s)?)?;
                    if !c.is_identity() && seen.insert(c.exps.clone()) {
                        next.push(c);
                    }
                }
            }
            level = next;
            k += 1;
        }
        Ok(ClassBound::Exact(k - 1))
    }

    /// Parent dump followed by the induced sequence of the normal subgroup.
    pub fn dump(&self) -> String {
        let mut s = self.parent().dump();
        s += &format!("normal full_from {}\n", self.normal.full_from + 1);
        for (p, h) in self.normal.pivots() {
            if p >= self.normal.full_from {
                continue;
            }
            s += &format!("pivot {}", p + 1);
            for (k, e) in h.iter().enumerate().filter(|(_, e)| **e != 0) {
                s += &format!(" {}:{}", k + 1, e);
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::super::{free_nilpotent, normal_form};
    use super::*;

    #[test]
    fn lowering_the_cap_keeps_the_group() {
        let p = free_nilpotent(3, 5).unwrap();
        let gamma4: Vec<GroupElement> = p.layer(4).map(|k| GroupElement::pc_generator(&p, k + 1).unwrap()).collect();
        let sq = normal_form(&p, &[1, 1, 2, -3]).unwrap();
        let mut rels = gamma4;
        rels.push(sq);
        let q = QuotientPresentation::new(&p, &rels).unwrap();
        assert!(q.with_class_cap(2).unwrap().is_none());
        let small = q.with_class_cap(3).unwrap().unwrap();
        assert_eq!(small.parent().class_cap(), 3);
        assert_eq!((q.class(), small.class()), (ClassBound::Exact(3), ClassBound::Exact(3)));
        let gens: Vec<GroupElement> = (1..=3).map(|i| GroupElement::generator(&p, i).unwrap()).collect();
        let small_gens: Vec<GroupElement> = gens.iter().map(|g| small.project(g).unwrap()).collect();
        assert_eq!(q.subgroup_class(&gens).unwrap(), small.subgroup_class(&small_gens).unwrap());
        assert_eq!(q.lower_central_series()[..3], small.lower_central_series()[..]);
        let words: [&[i64]; 4] = [&[1, 2, -1, -2, 3], &[2, 2, 3, 1], &[-3, 1, 2], &[1, 3, 3, -2, -1]];
        for u in words {
            for v in words {
                let (a, b) = (normal_form(&p, u).unwrap(), normal_form(&p, v).unwrap());
                let c = a.commutator(&b).unwrap();
                let same = q.is_trivial(&c).unwrap();
                let pc = small.project(&c).unwrap();
                assert_eq!(same, small.is_trivial(&pc).unwrap());
                let direct = small.project(&a).unwrap().commutator(&small.project(&b).unwrap()).unwrap();
                assert_eq!(small.image(&pc).unwrap(), small.image(&direct).unwrap());
            }
        }
    }

    fn gen(p: &Arc<PcPresentation>, k: usize) -> GroupElement {
        GroupElement::pc_generator(p, k).unwrap()
    }

    #[test]
    fn heisenberg_quotients() {
        let p = free_nilpotent(2, 2).unwrap();
        let q = QuotientPresentation::new(&p, &[gen(&p, 3)]).unwrap();
        assert_eq!(q.class(), ClassBound::Exact(1));
        let c = gen(&p, 2).commutator(&gen(&p, 1)).unwrap();
        let q2 = QuotientPresentation::new(&p, &[c]).unwrap();
        assert_eq!(q2.class(), ClassBound::Exact(1));
        assert_eq!(q2.layer(1).free_rank, 2);
        let q3 = QuotientPresentation::new(&p, &[gen(&p, 1).pow(2).unwrap()]).unwrap();
        assert_eq!(q3.class(), ClassBound::AtLeast(2));
        let l2 = q3.layer(2);
        assert_eq!((l2.free_rank, l2.torsion.clone()), (0, vec![BigInt::from(2)]));
        assert_eq!(q3.layer(1).torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn class_of_free_groups_and_truncation() {
        let p = free_nilpotent(2, 3).unwrap();
        let q = QuotientPresentation::new(&p, &[]).unwrap();
        assert_eq!(q.class(), ClassBound::AtLeast(3));
        assert!(!q.class().at_most(3));
        let all: Vec<_> = (1..=p.len()).map(|k| gen(&p, k)).collect();
        assert_eq!(q.subgroup_class(&all).unwrap(), ClassBound::AtLeast(3));
        assert_eq!(q.subgroup_class(&[GroupElement::identity(&p)]).unwrap(), ClassBound::Exact(0));
        assert_eq!(q.subgroup_class(&[gen(&p, 1)]).unwrap(), ClassBound::Exact(1));
        let abel = QuotientPresentation::new(&p, &[gen(&p, 3)]).unwrap();
        assert_eq!(abel.class(), ClassBound::Exact(1));
        assert_eq!(abel.lower_central_series()[0].to_string(), "γ1/γ2: Z^2");
    }

    #[test]
    fn canonical_images_respect_products() {
        let p = free_nilpotent(2, 3).unwrap();
        let rel = gen(&p, 1).pow(3).unwrap().mul(&gen(&p, 2).pow(-2).unwrap()).unwrap();
        let q = QuotientPresentation::new(&p, &[rel.clone()]).unwrap();
        assert!(q.is_trivial(&rel).unwrap());
        let xs: Vec<GroupElement> = (0..6).map(|i| gen(&p, 1 + i % 2).pow(i as Exp - 2).unwrap()).collect();
        for a in &xs {
            for b in &xs {
                let lhs = q.image(&a.mul(b).unwrap()).unwrap();
                let rhs = q.mul(&q.image(a).unwrap(), &q.image(b).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
