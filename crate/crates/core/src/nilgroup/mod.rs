//! Free nilpotent groups as weighted polycyclic presentations, collection
//! from the left, and quotients by normal closures.

pub(crate) mod magnus;
mod normal;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hall_lie::{HallBasis, Node};
use magnus::MagnusModel;

pub use normal::{ClassBound, LayerInvariants, NormalSubgroup, QuotientPresentation};

/// Largest supported rank and class.
pub const MAX_RANK: usize = 4;
pub const MAX_CLASS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("rank {rank} and class {class} must be positive")]
    BadParameters { rank: usize, class: usize },
    #[error("rank {rank}, class {class} exceeds the supported envelope (rank ≤ {MAX_RANK}, class ≤ {MAX_CLASS})")]
    TooLarge { rank: usize, class: usize },
    #[error("elements belong to different presentations")]
    Mismatch,
    #[error("letter {0} is not a pc generator or inverse")]
    BadLetter(i64),
    #[error("exponent overflow during collection")]
    Overflow,
    #[error("Hall leading terms are not unimodular in weight {0}")]
    Construction(usize),
    #[error("presentation text, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty commutator list")]
    EmptyList,
}

/// How a pc generator is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Definition {
    /// The `i`-th free generator (1-based).
    Generator(usize),
    /// `[g_j, g_i]` with `j > i` (0-based positions).
    Commutator(usize, usize),
}

type Tail = Vec<(usize, i64)>;

/// Exponent type of collected words.
pub type Exp = i128;

/// Consistent weighted polycyclic presentation of a free nilpotent group.
/// Pc generators are the Hall basic commutators of weight at most the class,
/// ordered by weight; `g_[u,v]` is the group commutator `[g_u, g_v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcPresentation {
    rank: usize,
    class: usize,
    weights: Vec<usize>,
    defs: Vec<Definition>,
    /// `conj[j][i]` for `i < j` and `w_i + w_j ≤ class`: the tails `t` with
    /// `g_j^{g_i} = g_j t` and `g_j^{g_i⁻¹} = g_j t'`.
    conj: Vec<Vec<[Tail; 2]>>,
}

fn cache() -> &'static Mutex<HashMap<(usize, usize), Arc<PcPresentation>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<PcPresentation>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The free nilpotent group of the given rank and class. Presentations are
/// built once per process and shared.
pub fn free_nilpotent(rank: usize, class: usize) -> Result<Arc<PcPresentation>, GroupError> {
    if rank == 0 || class == 0 {
        return Err(GroupError::BadParameters { rank, class });
    }
    if rank > MAX_RANK || class > MAX_CLASS {
        return Err(GroupError::TooLarge { rank, class });
    }
    let mut guard = cache().lock().expect("presentation cache");
    if let Some(p) = guard.get(&(rank, class)) {
        return Ok(p.clone());
    }
    let p = Arc::new(PcPresentation::build(rank, class)?);
    guard.insert((rank, class), p.clone());
    Ok(p)
}

fn sparse(v: &[i64], from: usize) -> Tail {
    v.iter().enumerate().skip(from).filter(|(_, e)| **e != 0).map(|(k, e)| (k, *e)).collect()
}

impl PcPresentation {
    fn build(rank: usize, class: usize) -> Result<Self, GroupError> {
        let basis = HallBasis::new(rank, class);
        let model = MagnusModel::new(&basis).map_err(|e| GroupError::Construction(e.0))?;
        let m = basis.len();
        let weights: Vec<usize> = (0..m).map(|k| basis.weight(k)).collect();
        let defs = (0..m)
            .map(|k| match basis.node(k) {
                Node::Leaf(g) => Definition::Generator(g.0),
                Node::Pair(u, v) => Definition::Commutator(u, v),
            })
            .collect();
        let sp = &model.space;
        let mut conj = Vec::with_capacity(m);
        for j in 0..m {
            let mut row = Vec::new();
            let limit = class.saturating_sub(weights[j]);
            for i in 0..j {
                if weights[i] > limit {
                    break;
                }
                let mut pair: [Tail; 2] = Default::default();
                for (slot, inv) in pair.iter_mut().zip([false, true]) {
                    let (a, b) = if inv { (model.image(i), model.inverse_image(i)) } else { (model.inverse_image(i), model.image(i)) };
                    let s = sp.mul(&sp.mul(a, model.image(j)), b);
                    let e = model.decompose(&s).ok_or(GroupError::Construction(weights[j]))?;
                    debug_assert_eq!(e[j], 1);
                    *slot = sparse(&e, j + 1);
                }
                row.push(pair);
            }
            conj.push(row);
        }
        Ok(PcPresentation { rank, class, weights, defs, conj })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn class_cap(&self) -> usize {
        self.class
    }

    /// Nilpotency class of the presented group itself.
    pub fn class(&self) -> usize {
        if self.rank == 1 {
            1
        } else {
            self.class
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, k: usize) -> usize {
        self.weights[k]
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn definition(&self, k: usize) -> Definition {
        self.defs[k]
    }

    /// Positions of the pc generators of weight `w`.
    pub fn layer(&self, w: usize) -> std::ops::Range<usize> {
        let start = self.weights.partition_point(|&x| x < w);
        let end = self.weights.partition_point(|&x| x <= w);
        start..end
    }

    /// Stored tail of `g_j^{g_i}` (or of `g_j^{g_i⁻¹}`), if the pair is
    /// within the class.
    pub fn conjugation_tail(&self, j: usize, i: usize, inverse: bool) -> Option<&[(usize, i64)]> {
        self.conj.get(j)?.get(i).map(|p| p[usize::from(inverse)].as_slice())
    }

    fn min_weight(&self, v: &[Exp]) -> Option<usize> {
        v.iter().position(|&e| e != 0).map(|k| self.weights[k])
    }

    /// Multiplies `x` on the right by `g_k^e`, in place.
    pub(crate) fn mul_gen_power(&self, x: &mut [Exp], k: usize, e: Exp) -> Result<(), GroupError> {
        if e == 0 {
            return Ok(());
        }
        let first = x[k + 1..].iter().position(|&v| v != 0).map(|p| p + k + 1);
        let commutes = match first {
            None => true,
            Some(f) => self.weights[f] + self.weights[k] > self.class,
        };
        if commutes {
            x[k] = x[k].checked_add(e).ok_or(GroupError::Overflow)?;
            return Ok(());
        }
        let mut s = vec![0 as Exp; x.len()];
        s[k + 1..].copy_from_slice(&x[k + 1..]);
        for _ in 0..e.unsigned_abs() {
            s = self.conjugate_by_gen(&s, k, e < 0)?;
        }
        x[k] = x[k].checked_add(e).ok_or(GroupError::Overflow)?;
        x[k + 1..].copy_from_slice(&s[k + 1..]);
        Ok(())
    }

    /// `g_k^{-1} s g_k` (or `g_k s g_k^{-1}`) for `s` supported after `k`.
    fn conjugate_by_gen(&self, s: &[Exp], k: usize, inverse: bool) -> Result<Vec<Exp>, GroupError> {
        let mut out = vec![0 as Exp; s.len()];
        for (j, &ej) in s.iter().enumerate().skip(k + 1) {
            if ej == 0 {
                continue;
            }
            match self.conjugation_tail(j, k, inverse) {
                None => self.mul_gen_power(&mut out, j, ej)?,
                Some(tail) => {
                    let mut h = vec![0 as Exp; s.len()];
                    h[j] = 1;
                    for &(p, e) in tail {
                        h[p] = Exp::from(e);
                    }
                    let hp = self.power_vec(&h, ej)?;
                    self.mul_into(&mut out, &hp)?;
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn mul_into(&self, x: &mut [Exp], y: &[Exp]) -> Result<(), GroupError> {
        let (Some(wx), Some(wy)) = (self.min_weight(x), self.min_weight(y)) else {
            if self.min_weight(x).is_none() {
                x.copy_from_slice(y);
            }
            return Ok(());
        };
        if wx + wy > self.class {
            for (a, b) in x.iter_mut().zip(y) {
                *a = a.checked_add(*b).ok_or(GroupError::Overflow)?;
            }
            return Ok(());
        }
        for (k, &e) in y.iter().enumerate() {
            if e != 0 {
                self.mul_gen_power(x, k, e)?;
            }
        }
        Ok(())
    }

    pub(crate) fn inverse_vec(&self, x: &[Exp]) -> Result<Vec<Exp>, GroupError> {
        let mut out = vec![0 as Exp; x.len()];
        match self.min_weight(x) {
            None => return Ok(out),
            Some(w) if 2 * w > self.class => {
                for (o, e) in out.iter_mut().zip(x) {
                    *o = e.checked_neg().ok_or(GroupError::Overflow)?;
                }
                return Ok(out);
            }
            Some(_) => {}
        }
        for (k, &e) in x.iter().enumerate().rev() {
            if e != 0 {
                self.mul_gen_power(&mut out, k, e.checked_neg().ok_or(GroupError::Overflow)?)?;
            }
        }
        Ok(out)
    }

    pub(crate) fn power_vec(&self, x: &[Exp], n: Exp) -> Result<Vec<Exp>, GroupError> {
        match self.min_weight(x) {
            None => return Ok(x.to_vec()),
            Some(w) if 2 * w > self.class => {
                return x.iter().map(|e| e.checked_mul(n).ok_or(GroupError::Overflow)).collect();
            }
            Some(_) => {}
        }
        let mut base = if n < 0 { self.inverse_vec(x)? } else { x.to_vec() };
        let mut m = n.unsigned_abs();
        let mut acc = vec![0 as Exp; x.len()];
        while m > 0 {
            if m & 1 == 1 {
                self.mul_into(&mut acc, &base)?;
            }
            m >>= 1;
            if m > 0 {
                let b2 = base.clone();
                self.mul_into(&mut base, &b2)?;
            }
        }
        Ok(acc)
    }

    pub(crate) fn commutator_vec(&self, x: &[Exp], y: &[Exp]) -> Result<Vec<Exp>, GroupError> {
        if let (Some(wx), Some(wy)) = (self.min_weight(x), self.min_weight(y)) {
            if wx + wy > self.class {
                return Ok(vec![0; x.len()]);
            }
        } else {
            return Ok(vec![0; x.len()]);
        }
        // [x,y] = (y x)^{-1} (x y)
        let mut xy = x.to_vec();
        self.mul_into(&mut xy, y)?;
        let mut yx = y.to_vec();
        self.mul_into(&mut yx, x)?;
        let mut out = self.inverse_vec(&yx)?;
        self.mul_into(&mut out, &xy)?;
        Ok(out)
    }

    /// Checks associativity of all pc generator triples (and inverses)
    /// whose weights sum to at most the class; with `sample`, only every
    /// `sample`-th triple is checked.
    pub fn check_consistency(&self, sample: Option<usize>) -> Result<bool, GroupError> {
        let m = self.len();
        let step = sample.unwrap_or(1).max(1);
        let mut count = 0usize;
        let unit = |k: usize, e: Exp| {
            let mut v = vec![0 as Exp; m];
            v[k] = e;
            v
        };
        for k in 0..m {
            for j in k..m {
                if self.weights[k] + self.weights[j] > self.class {
                    break;
                }
                for i in j..m {
                    if self.weights[k] + self.weights[j] + self.weights[i] > self.class {
                        break;
                    }
                    count += 1;
                    if count % step != 0 {
                        continue;
                    }
                    for (a, b, c) in [(1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1), (-1, -1, -1)] {
                        let (x, y, z) = (unit(i, a), unit(j, b), unit(k, c));
                        let mut left = x.clone();
                        self.mul_into(&mut left, &y)?;
                        self.mul_into(&mut left, &z)?;
                        let mut yz = y.clone();
                        self.mul_into(&mut yz, &z)?;
                        let mut right = x.clone();
                        self.mul_into(&mut right, &yz)?;
                        if left != right {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Text dump: a header, one line per pc generator, one line per stored
    /// conjugation tail.
    pub fn dump(&self) -> String {
        let mut s = format!("pcp rank {} class {} gens {}\n", self.rank, self.class, self.len());
        for (k, (w, d)) in self.weights.iter().zip(&self.defs).enumerate() {
            match d {
                Definition::Generator(i) => s += &format!("gen {} {} x {}\n", k + 1, w, i),
                Definition::Commutator(j, i) => s += &format!("gen {} {} comm {} {}\n", k + 1, w, j + 1, i + 1),
            }
        }
        for (j, row) in self.conj.iter().enumerate() {
            for (i, pair) in row.iter().enumerate() {
                for (sign, tail) in ["+", "-"].iter().zip(pair) {
                    s += &format!("conj {} {} {}", j + 1, i + 1, sign);
                    for (p, e) in tail {
                        s += &format!(" {}:{}", p + 1, e);
                    }
                    s.push('\n');
                }
            }
        }
        s
    }

    pub fn read(text: &str) -> Result<PcPresentation, GroupError> {
        let err = |line: usize, msg: &str| GroupError::Parse { line, msg: msg.to_string() };
        let num = |line: usize, t: Option<&str>| -> Result<usize, GroupError> {
            t.and_then(|t| t.parse().ok()).ok_or_else(|| err(line, "expected a number"))
        };
        let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
        let (n0, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 7 || h[0] != "pcp" || h[1] != "rank" || h[3] != "class" || h[5] != "gens" {
            return Err(err(n0, "bad header"));
        }
        let rank = num(n0, Some(h[2]))?;
        let class = num(n0, Some(h[4]))?;
        let m = num(n0, Some(h[6]))?;
        let mut weights = Vec::with_capacity(m);
        let mut defs = Vec::with_capacity(m);
        let mut conj: Vec<Vec<[Tail; 2]>> = vec![Vec::new(); m];
        for (n, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            match t.first().copied() {
                None => continue,
                Some("gen") => {
                    let k = num(n, t.get(1).copied())?;
                    if k != weights.len() + 1 {
                        return Err(err(n, "generators out of order"));
                    }
                    weights.push(num(n, t.get(2).copied())?);
                    match t.get(3).copied() {
                        Some("x") => defs.push(Definition::Generator(num(n, t.get(4).copied())?)),
                        Some("comm") => {
                            let j = num(n, t.get(4).copied())?;
                            let i = num(n, t.get(5).copied())?;
                            if i == 0 || j <= i || j >= k {
                                return Err(err(n, "bad commutator definition"));
                            }
                            defs.push(Definition::Commutator(j - 1, i - 1));
                        }
                        _ => return Err(err(n, "bad definition")),
                    }
                }
                Some("conj") => {
                    let j = num(n, t.get(1).copied())?;
                    let i = num(n, t.get(2).copied())?;
                    if j == 0 || j > m || i == 0 || i >= j {
                        return Err(err(n, "conjugation indices out of range"));
                    }
                    let slot = match t.get(3).copied() {
                        Some("+") => 0,
                        Some("-") => 1,
                        _ => return Err(err(n, "expected + or -")),
                    };
                    let row = &mut conj[j - 1];
                    if slot == 0 {
                        if row.len() != i - 1 {
                            return Err(err(n, "conjugation rows out of order"));
                        }
                        row.push(Default::default());
                    } else if row.len() != i {
                        return Err(err(n, "conjugation rows out of order"));
                    }
                    let mut tail = Vec::new();
                    for entry in &t[4..] {
                        let (p, e) = entry.split_once(':').ok_or_else(|| err(n, "expected pos:exp"))?;
                        let p: usize = p.parse().map_err(|_| err(n, "bad position"))?;
                        let e: i64 = e.parse().map_err(|_| err(n, "bad exponent"))?;
                        if p <= j || p > m {
                            return Err(err(n, "tail position out of range"));
                        }
                        tail.push((p - 1, e));
                    }
                    row[i - 1][slot] = tail;
                }
                Some(_) => return Err(err(n, "unknown record")),
            }
        }
        if weights.len() != m {
            return Err(err(0, "generator count mismatch"));
        }
        Ok(PcPresentation { rank, class, weights, defs, conj })
    }

    /// SHA-256 of the dump, hex encoded.
    pub fn content_hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.dump().as_bytes()))
    }
}

/// An element of a [`PcPresentation`], stored as its collected exponent
/// vector.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    pres: Arc<PcPresentation>,
    exps: Vec<Exp>,
}

impl std::hash::Hash for GroupElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.exps.hash(state);
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({self})")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != 0)
            .map(|(k, e)| if *e == 1 { format!("g{}", k + 1) } else { format!("g{}^{}", k + 1, e) })
            .collect();
        if terms.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&terms.join("·"))
        }
    }
}

impl GroupElement {
    pub fn identity(pres: &Arc<PcPresentation>) -> Self {
        GroupElement { pres: pres.clone(), exps: vec![0; pres.len()] }
    }

    /// The `k`-th pc generator (1-based).
    pub fn pc_generator(pres: &Arc<PcPresentation>, k: usize) -> Result<Self, GroupError> {
        if k == 0 || k > pres.len() {
            return Err(GroupError::BadLetter(k as i64));
        }
        let mut e = Self::identity(pres);
        e.exps[k - 1] = 1;
        Ok(e)
    }

    /// The `i`-th free generator (1-based).
    pub fn generator(pres: &Arc<PcPresentation>, i: usize) -> Result<Self, GroupError> {
        if i == 0 || i > pres.rank {
            return Err(GroupError::BadLetter(i as i64));
        }
        Self::pc_generator(pres, i)
    }

    pub fn from_exponents(pres: &Arc<PcPresentation>, exps: Vec<Exp>) -> Result<Self, GroupError> {
        if exps.len() != pres.len() {
            return Err(GroupError::Mismatch);
        }
        Ok(GroupElement { pres: pres.clone(), exps })
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.pres
    }

    pub fn exponents(&self) -> &[Exp] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    fn check(&self, other: &GroupElement) -> Result<(), GroupError> {
        if Arc::ptr_eq(&self.pres, &other.pres) || self.pres == other.pres {
            Ok(())
        } else {
            Err(GroupError::Mismatch)
        }
    }

    fn wrap(&self, exps: Vec<Exp>) -> GroupElement {
        GroupElement { pres: self.pres.clone(), exps }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(other)?;
        let mut x = self.exps.clone();
        self.pres.mul_into(&mut x, &other.exps)?;
        Ok(self.wrap(x))
    }

    pub fn inverse(&self) -> Result<GroupElement, GroupError> {
        Ok(self.wrap(self.pres.inverse_vec(&self.exps)?))
    }

    pub fn pow(&self, n: Exp) -> Result<GroupElement, GroupError> {
        Ok(self.wrap(self.pres.power_vec(&self.exps, n)?))
    }

    /// `g⁻¹ self g`.
    pub fn conjugate(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        let mut x = self.pres.inverse_vec(&g.exps)?;
        self.pres.mul_into(&mut x, &self.exps)?;
        self.pres.mul_into(&mut x, &g.exps)?;
        Ok(self.wrap(x))
    }

    /// `self⁻¹ other⁻¹ self other`.
    pub fn commutator(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(other)?;
        Ok(self.wrap(self.pres.commutator_vec(&self.exps, &other.exps)?))
    }
}

/// `[[x1, x2], x3], …`.
pub fn left_normed_commutator(xs: &[GroupElement]) -> Result<GroupElement, GroupError> {
    let (first, rest) = xs.split_first().ok_or(GroupError::EmptyList)?;
    rest.iter().try_fold(first.clone(), |acc, x| acc.commutator(x))
}

/// Collected normal form of a word; letter `k` is the `k`-th pc generator
/// (1-based) and `-k` its inverse.
pub fn normal_form(pres: &Arc<PcPresentation>, word: &[i64]) -> Result<GroupElement, GroupError> {
    let mut x = vec![0 as Exp; pres.len()];
    for &l in word {
        let k = l.unsigned_abs() as usize;
        if k == 0 || k > pres.len() {
            return Err(GroupError::BadLetter(l));
        }
        pres.mul_gen_power(&mut x, k - 1, Exp::from(l.signum()))?;
    }
    Ok(GroupElement { pres: pres.clone(), exps: x })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis() -> Arc<PcPresentation> {
        free_nilpotent(2, 2).unwrap()
    }

    #[test]
    fn generator_counts() {
        assert_eq!(heis().len(), 3);
        assert_eq!(free_nilpotent(1, 5).unwrap().len(), 1);
        assert_eq!(free_nilpotent(2, 3).unwrap().len(), 5);
        assert!(matches!(free_nilpotent(5, 2), Err(GroupError::TooLarge { .. })));
        assert!(matches!(free_nilpotent(2, 0), Err(GroupError::BadParameters { .. })));
    }

    #[test]
    fn heisenberg_collection() {
        let p = heis();
        assert!(normal_form(&p, &[]).unwrap().is_identity());
        assert_eq!(normal_form(&p, &[2, 1]).unwrap().exponents(), &[1, 1, 1]);
        let (g1, g2) = (GroupElement::generator(&p, 1).unwrap(), GroupElement::generator(&p, 2).unwrap());
        assert_eq!(g1.commutator(&g2).unwrap().exponents(), &[0, 0, -1]);
        assert_eq!(g2.commutator(&g1).unwrap().exponents(), &[0, 0, 1]);
        assert!(g1.commutator(&g1).unwrap().is_identity());
        assert_eq!(p.definition(2), Definition::Commutator(1, 0));
    }

    #[test]
    fn consistency_small() {
        for (r, c) in [(2, 2), (2, 4), (3, 4)] {
            assert!(free_nilpotent(r, c).unwrap().check_consistency(None).unwrap(), "({r},{c})");
        }
    }

    #[test]
    fn dump_round_trip() {
        let p = free_nilpotent(3, 4).unwrap();
        let text = p.dump();
        let q = PcPresentation::read(&text).unwrap();
        assert_eq!(*p, q);
        assert_eq!(q.dump(), text);
        assert!(PcPresentation::read("pcp rank 1").is_err());
    }

    #[test]
    fn collection_agrees_with_magnus_series() {
        for (r, c, seed) in [(3u64, 5usize, 1u64), (4, 6, 2)] {
            let p = free_nilpotent(r as usize, c).unwrap();
            let model = MagnusModel::new(&HallBasis::new(r as usize, c)).unwrap();
            let sp = &model.space;
            let mut state = seed;
            for _ in 0..40 {
                let word: Vec<i64> = (0..16)
                    .map(|_| {
                        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        let l = ((state >> 33) % r) as i64 + 1;
                        if (state >> 20) & 1 == 0 { l } else { -l }
                    })
                    .collect();
                let series = word.iter().fold(sp.one(), |acc, &l| {
                    let k = l.unsigned_abs() as usize - 1;
                    let g = if l < 0 { model.inverse_image(k) } else { model.image(k) };
                    sp.mul(&acc, g)
                });
                let expect: Vec<Exp> = model.decompose(&series).unwrap().into_iter().map(Exp::from).collect();
                assert_eq!(normal_form(&p, &word).unwrap().exponents(), expect.as_slice());
            }
        }
    }
}
