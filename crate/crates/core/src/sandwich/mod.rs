//! Sandwich relator families over free nilpotent groups, their quotients,
//! and certificates for the class bounds and closure properties.

mod certificate;
mod claims;
mod engel;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::hall_lie::LieError;
use crate::nilgroup::{ClassBound, Exp, GroupElement, GroupError, NormalSubgroup, PcPresentation, QuotientPresentation};

pub use certificate::{Certificate, Status, SCHEMA_VERSION};
pub use claims::*;
pub use engel::{engel_power_identity, FreeProductWord, Syllable};

#[derive(Debug, Error)]
pub enum SandwichError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("a family needs at least two labels, got {0}")]
    TooFewLabels(usize),
    #[error("labels {0} and {1} coincide")]
    DuplicateLabels(usize, usize),
    #[error("relator count {count} exceeds the configured bound {limit}")]
    TooManyRelators { count: usize, limit: usize },
    #[error(transparent)]
    Words(#[from] crate::words::WordsError),
    #[error("unknown claim id {0:?}")]
    UnknownClaim(String),
    #[error("engel exponent bound exceeded: n = {n} > {limit}")]
    EngelBound { n: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SandwichKind {
    /// Pair conditions for all labels.
    Sandwich,
    /// Pair and triple conditions for all labels.
    Strong,
    /// Pair and triple conditions for distinct labels only.
    PartialStrong,
}

impl fmt::Display for SandwichKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SandwichKind::Sandwich => "sandwich",
            SandwichKind::Strong => "strong",
            SandwichKind::PartialStrong => "partial_strong",
        })
    }
}

/// Which left-normed commutators a class condition is imposed through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelatorMode {
    /// Only weight `k` (3 for pairs, 4 for triples): these normally generate
    /// `γ_k` of the subgroup.
    Minimal,
    /// Every weight from `k` up to the ambient class.
    Full,
}

impl fmt::Display for RelatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelatorMode::Minimal => "minimal",
            RelatorMode::Full => "full",
        })
    }
}

/// Labels inside an ambient free nilpotent group.
#[derive(Clone, Debug)]
pub struct SandwichFamily {
    pres: Arc<PcPresentation>,
    labels: Vec<GroupElement>,
    kind: SandwichKind,
    pairs_only: bool,
}

impl SandwichFamily {
    pub fn new(pres: &Arc<PcPresentation>, labels: Vec<GroupElement>, kind: SandwichKind) -> Result<Self, SandwichError> {
        if labels.len() < 2 {
            return Err(SandwichError::TooFewLabels(labels.len()));
        }
        for i in 0..labels.len() {
            for j in i + 1..labels.len() {
                if labels[i] == labels[j] {
                    return Err(SandwichError::DuplicateLabels(i + 1, j + 1));
                }
            }
        }
        Ok(SandwichFamily { pres: pres.clone(), labels, kind, pairs_only: false })
    }

    /// The free generators of the ambient group as labels.
    pub fn on_generators(pres: &Arc<PcPresentation>, kind: SandwichKind) -> Result<Self, SandwichError> {
        let labels = (1..=pres.rank()).map(|i| GroupElement::generator(pres, i)).collect::<Result<_, _>>()?;
        Self::new(pres, labels, kind)
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.pres
    }

    pub fn labels(&self) -> &[GroupElement] {
        &self.labels
    }

    pub fn kind(&self) -> SandwichKind {
        self.kind
    }

    pub fn with_kind(&self, kind: SandwichKind) -> Self {
        SandwichFamily { kind, ..self.clone() }
    }

    /// The same family with its triple conditions dropped.
    pub fn pairs_only(&self) -> Self {
        SandwichFamily { pairs_only: true, ..self.clone() }
    }
}

/// Radius of the conjugator ball: products of at most `radius` labels and
/// label inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InstantiationBall {
    pub radius: usize,
}

impl InstantiationBall {
    pub fn new(radius: usize) -> Self {
        InstantiationBall { radius }
    }

    /// Ball elements, deduplicated by normal form, in order of first
    /// appearance (identity first).
    pub fn elements(&self, family: &SandwichFamily) -> Result<Vec<GroupElement>, GroupError> {
        let mut letters = Vec::new();
        for l in &family.labels {
            letters.push(l.clone());
            letters.push(l.inverse()?);
        }
        let id = GroupElement::identity(&family.pres);
        let mut seen: HashSet<GroupElement> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut frontier = vec![id];
        for _ in 0..self.radius {
            let mut next = Vec::new();
            for g in &frontier {
                for l in &letters {
                    let h = g.mul(l)?;
                    if seen.insert(h.clone()) {
                        out.push(h.clone());
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }
}

/// Generating sets of the subgroups whose class a family constrains, with
/// the class bound each must satisfy.
pub fn instantiations(
    family: &SandwichFamily,
    ball: &[GroupElement],
) -> Result<Vec<(Vec<GroupElement>, usize)>, GroupError> {
    let k = family.labels.len();
    let distinct = family.kind == SandwichKind::PartialStrong;
    let conj: Vec<Vec<GroupElement>> =
        family.labels.iter().map(|l| ball.iter().map(|g| l.conjugate(g)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut emit = |gens: Vec<GroupElement>, bound: usize, out: &mut Vec<(Vec<GroupElement>, usize)>| {
        let mut key: Vec<Vec<Exp>> = gens.iter().map(|g| g.exponents().to_vec()).collect();
        key[1..].sort();
        if seen.insert(key) {
            out.push((gens, bound));
        }
    };
    for a in 0..k {
        for b in 0..k {
            if distinct && a == b {
                continue;
            }
            for bg in &conj[b] {
                if *bg != family.labels[a] {
                    emit(vec![family.labels[a].clone(), bg.clone()], 2, &mut out);
                }
            }
        }
    }
    if family.kind == SandwichKind::Sandwich || family.pairs_only {
        return Ok(out);
    }
    for a in 0..k {
        for b in 0..k {
            for c in b..k {
                if distinct && (a == b || a == c || b == c) {
                    continue;
                }
                for (i, bf) in conj[b].iter().enumerate() {
                    let start = if b == c { i } else { 0 };
                    for cg in &conj[c][start..] {
                        emit(vec![family.labels[a].clone(), bf.clone(), cg.clone()], 3, &mut out);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Left-normed commutators in `gens` of weights `bound+1 ..= top`, passed to
/// `sink`. Prefixes already trivial modulo `modulo` are not extended.
pub fn subgroup_relators(
    gens: &[GroupElement],
    bound: usize,
    top: usize,
    modulo: Option<&NormalSubgroup>,
    sink: &mut dyn FnMut(GroupElement) -> Result<(), GroupError>,
) -> Result<(), GroupError> {
    fn walk(
        prefix: &GroupElement,
        weight: usize,
        gens: &[GroupElement],
        lo: usize,
        top: usize,
        modulo: Option<&NormalSubgroup>,
        sink: &mut dyn FnMut(GroupElement) -> Result<(), GroupError>,
    ) -> Result<(), GroupError> {
        if prefix.is_identity() {
            return Ok(());
        }
        if weight >= lo {
            sink(prefix.clone())?;
        }
        if weight == top {
            return Ok(());
        }
        if let Some(n) = modulo {
            if weight >= 2 && n.contains(prefix)? {
                return Ok(());
            }
        }
        for s in gens {
            walk(&prefix.commutator(s)?, weight + 1, gens, lo, top, modulo, sink)?;
        }
        Ok(())
    }
    let lo = bound + 1;
    if top < lo {
        return Ok(());
    }
    for s in gens {
        walk(s, 1, gens, lo, top, modulo, sink)?;
    }
    Ok(())
}

/// Relators imposing the family's conditions with conjugators from the ball.
pub fn relators_for(
    family: &SandwichFamily,
    ball: InstantiationBall,
    mode: RelatorMode,
    limit: usize,
) -> Result<Vec<GroupElement>, SandwichError> {
    let elems = ball.elements(family)?;
    let cap = family.pres.class_cap();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (gens, bound) in instantiations(family, &elems)? {
        let top = match mode {
            RelatorMode::Minimal => bound + 1,
            RelatorMode::Full => cap,
        };
        let mut over = false;
        subgroup_relators(&gens, bound, top, None, &mut |r| {
            if seen.insert(r.clone()) {
                out.push(r);
                over |= out.len() > limit;
            }
            Ok(())
        })?;
        if over {
            return Err(SandwichError::TooManyRelators { count: out.len(), limit });
        }
    }
    Ok(out)
}

/// Normal subgroup generated by the family's relators at the given radius,
/// optionally grown from an earlier (smaller) one. Relators are streamed in
/// chunks and pruned against the subgroup built so far.
pub fn sandwich_normal_subgroup(
    family: &SandwichFamily,
    ball: InstantiationBall,
    mode: RelatorMode,
    start: Option<NormalSubgroup>,
) -> Result<NormalSubgroup, SandwichError> {
    const CHUNK: usize = 256;
    let elems = ball.elements(family)?;
    let cap = family.pres.class_cap();
    let mut n = start.unwrap_or_else(|| NormalSubgroup::trivial(&family.pres));
    let mut pending: Vec<GroupElement> = Vec::new();
    for (gens, bound) in instantiations(family, &elems)? {
        let top = match mode {
            RelatorMode::Minimal => bound + 1,
            RelatorMode::Full => cap,
        };
        let mut batch = Vec::new();
        subgroup_relators(&gens, bound, top, Some(&n), &mut |r| {
            batch.push(r);
            Ok(())
        })?;
        for r in batch {
            if !n.contains(&r)? {
                pending.push(r);
            }
        }
        if pending.len() >= CHUNK {
            n.extend(pending.drain(..))?;
        }
    }
    n.extend(pending)?;
    Ok(n)
}

/// Class of the quotient at one radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusStep {
    pub radius: usize,
    pub class: ClassBound,
}

/// Escalates the ball radius `1, 2, …, max_radius`, reusing the normal
/// subgroup between steps, until `stop` accepts the step or the radius runs
/// out.
pub fn escalate(
    family: &SandwichFamily,
    mode: RelatorMode,
    max_radius: usize,
    mut stop: impl FnMut(&[RadiusStep]) -> bool,
) -> Result<(Vec<RadiusStep>, QuotientPresentation), SandwichError> {
    let mut steps = Vec::new();
    let mut n: Option<NormalSubgroup> = None;
    for radius in 1..=max_radius.max(1) {
        let next = sandwich_normal_subgroup(family, InstantiationBall::new(radius), mode, n.take())?;
        let q = QuotientPresentation::from_normal(next.clone());
        steps.push(RadiusStep { radius, class: q.class() });
        n = Some(next);
        if stop(&steps) {
            break;
        }
    }
    let q = QuotientPresentation::from_normal(n.expect("at least one radius"));
    Ok((steps, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nilgroup::free_nilpotent;

    fn family(r: usize, c: usize, kind: SandwichKind) -> SandwichFamily {
        SandwichFamily::on_generators(&free_nilpotent(r, c).unwrap(), kind).unwrap()
    }

    #[test]
    fn ball_sizes() {
        let f = family(2, 3, SandwichKind::Sandwich);
        assert_eq!(InstantiationBall::new(0).elements(&f).unwrap().len(), 1);
        assert_eq!(InstantiationBall::new(1).elements(&f).unwrap().len(), 5);
        assert_eq!(InstantiationBall::new(2).elements(&f).unwrap().len(), 17);
        let f3 = family(3, 3, SandwichKind::Strong);
        assert_eq!(InstantiationBall::new(1).elements(&f3).unwrap().len(), 7);
    }

    #[test]
    fn family_validation() {
        let p = free_nilpotent(2, 3).unwrap();
        let a = GroupElement::generator(&p, 1).unwrap();
        assert!(matches!(SandwichFamily::new(&p, vec![a.clone()], SandwichKind::Sandwich), Err(SandwichError::TooFewLabels(1))));
        assert!(matches!(
            SandwichFamily::new(&p, vec![a.clone(), a], SandwichKind::Sandwich),
            Err(SandwichError::DuplicateLabels(1, 2))
        ));
    }

    #[test]
    fn pair_relators_at_radius_zero() {
        let f = family(2, 5, SandwichKind::Sandwich);
        let p = f.presentation().clone();
        let (a, b) = (f.labels()[0].clone(), f.labels()[1].clone());
        let rels = relators_for(&f, InstantiationBall::new(0), RelatorMode::Full, 10_000).unwrap();
        let lnc = |xs: &[&GroupElement]| {
            crate::nilgroup::left_normed_commutator(&xs.iter().map(|x| (*x).clone()).collect::<Vec<_>>()).unwrap()
        };
        for r in [lnc(&[&b, &a, &a]), lnc(&[&b, &a, &b]), lnc(&[&b, &a, &a, &b]), lnc(&[&a, &b, &a, &a, &b])] {
            assert!(rels.contains(&r), "{r}");
        }
        assert!(rels.iter().all(|r| !r.is_identity() && r.presentation() == &p));
        let minimal = relators_for(&f, InstantiationBall::new(0), RelatorMode::Minimal, 10_000).unwrap();
        assert!(minimal.iter().all(|r| rels.contains(r)));
    }

    #[test]
    fn partial_strong_with_two_labels_has_no_triples() {
        let f = family(2, 4, SandwichKind::PartialStrong);
        let ball = InstantiationBall::new(1).elements(&f).unwrap();
        assert!(instantiations(&f, &ball).unwrap().iter().all(|(g, _)| g.len() == 2));
    }

    #[test]
    fn strong_triples_cover_the_ball() {
        let f = family(3, 4, SandwichKind::Strong);
        let ball = InstantiationBall::new(1).elements(&f).unwrap();
        assert_eq!(ball.len(), 7);
        let inst = instantiations(&f, &ball).unwrap();
        let (a, b, c) = (&f.labels()[0], &f.labels()[1], &f.labels()[2]);
        for fc in &ball {
            for gc in &ball {
                let want = [a.clone(), b.conjugate(fc).unwrap(), c.conjugate(gc).unwrap()];
                let found = inst.iter().any(|(g, _)| {
                    g.len() == 3 && g[0] == want[0] && ((g[1] == want[1] && g[2] == want[2]) || (g[1] == want[2] && g[2] == want[1]))
                });
                assert!(found);
            }
        }
    }

    #[test]
    fn minimal_and_full_modes_give_the_same_quotient() {
        for kind in [SandwichKind::Sandwich, SandwichKind::Strong] {
            let f = family(2, 5, kind);
            let b = InstantiationBall::new(1);
            let n1 = sandwich_normal_subgroup(&f, b, RelatorMode::Minimal, None).unwrap();
            let n2 = sandwich_normal_subgroup(&f, b, RelatorMode::Full, None).unwrap();
            let (q1, q2) = (QuotientPresentation::from_normal(n1), QuotientPresentation::from_normal(n2));
            assert_eq!(q1.lower_central_series(), q2.lower_central_series());
            for (_, h) in q2.normal_subgroup().pivots() {
                let g = GroupElement::from_exponents(f.presentation(), h.to_vec()).unwrap();
                assert!(q1.is_trivial(&g).unwrap());
            }
        }
    }

    #[test]
    fn relators_vanish_in_abelian_quotients() {
        let f = family(3, 4, SandwichKind::Strong);
        let p = f.presentation();
        let gamma2: Vec<GroupElement> = p.layer(2).map(|k| GroupElement::pc_generator(p, k + 1).unwrap()).collect();
        let abelian = QuotientPresentation::new(p, &gamma2).unwrap();
        for r in relators_for(&f, InstantiationBall::new(1), RelatorMode::Full, 100_000).unwrap() {
            assert!(abelian.is_trivial(&r).unwrap());
        }
    }

    #[test]
    fn relator_limit_is_enforced() {
        let f = family(3, 4, SandwichKind::Strong);
        assert!(matches!(
            relators_for(&f, InstantiationBall::new(1), RelatorMode::Full, 5),
            Err(SandwichError::TooManyRelators { .. })
        ));
    }
}
