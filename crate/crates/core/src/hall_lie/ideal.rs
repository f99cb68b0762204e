use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{CoefficientRing, GradedLie, LieContext, LieElement, LieError};
use crate::lattice::{FieldEchelon, IntEchelon};

#[derive(Clone, Debug)]
enum Layer {
    Field(FieldEchelon),
    Int(IntEchelon),
}

/// Graded ideal of a truncated free Lie ring, stored as one reduced echelon
/// form per degree.
#[derive(Clone, Debug)]
pub struct LieIdeal {
    ctx: Arc<LieContext>,
    layers: Vec<Layer>,
}

impl LieIdeal {
    pub fn zero(ctx: &Arc<LieContext>) -> Self {
        let layers = (1..=ctx.cap())
            .map(|w| {
                let n = ctx.hall().layer(w).len();
                match ctx.ring() {
                    CoefficientRing::Prime(p) => Layer::Field(FieldEchelon::new(p, n)),
                    CoefficientRing::Integers => Layer::Int(IntEchelon::new(n)),
                }
            })
            .collect();
        LieIdeal { ctx: ctx.clone(), layers }
    }

    pub fn context(&self) -> &Arc<LieContext> {
        &self.ctx
    }

    /// Rank of the degree-`w` layer of the ideal.
    pub fn layer_rank(&self, w: usize) -> usize {
        match &self.layers[w - 1] {
            Layer::Field(e) => e.rank(),
            Layer::Int(e) => e.rank(),
        }
    }

    /// Inserts a homogeneous vector into layer `w`; true if it grew.
    fn insert(&mut self, w: usize, x: &LieElement) -> bool {
        match &mut self.layers[w - 1] {
            Layer::Field(e) => {
                let p = self.ctx.ring().characteristic();
                e.insert(&x.layer_vector_mod(w, p))
            }
            Layer::Int(e) => e.insert(&x.layer_vector_int(w)),
        }
    }

    /// Elements spanning the degree-`w` layer of the ideal.
    pub fn layer_generators(&self, w: usize) -> Vec<LieElement> {
        let start = self.ctx.hall().layer(w).start;
        match &self.layers[w - 1] {
            Layer::Field(e) => e
                .rows()
                .map(|row| {
                    self.ctx.from_coords(
                        row.iter().enumerate().filter(|(_, c)| **c != 0).map(|(k, c)| (start + k, BigInt::from(*c))),
                    )
                })
                .collect(),
            Layer::Int(e) => e
                .rows()
                .map(|(_, row)| {
                    self.ctx.from_coords(
                        row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (start + k, c.clone())),
                    )
                })
                .collect(),
        }
    }

    pub fn contains(&self, x: &LieElement) -> Result<bool, LieError> {
        Ok(reduce(x, self)?.is_zero())
    }

    /// Membership of a homogeneous element decided by comparing echelon ranks
    /// before and after insertion.
    pub fn contains_by_rank(&self, x: &LieElement) -> bool {
        x.degrees().into_iter().all(|w| {
            let mut probe = self.clone();
            !probe.insert(w, &x.homogeneous_part(w))
        })
    }
}

/// Smallest graded ideal containing `gens` (their homogeneous components),
/// closed under bracketing with the free generators up to the cap.
pub fn ideal_closure(gens: &[LieElement], ctx: &Arc<LieContext>) -> Result<LieIdeal, LieError> {
    let mut ideal = LieIdeal::zero(ctx);
    let probe = ctx.zero();
    let mut by_degree: Vec<Vec<LieElement>> = vec![Vec::new(); ctx.cap() + 1];
    for g in gens {
        probe.check(g)?;
        for w in g.degrees() {
            by_degree[w].push(g.homogeneous_part(w));
        }
    }
    let generators: Vec<LieElement> = (1..=ctx.rank()).map(|i| ctx.generator(i)).collect();
    for w in 1..=ctx.cap() {
        for g in &by_degree[w] {
            ideal.insert(w, g);
        }
        if w > 1 {
            let below = ideal.layer_generators(w - 1);
            for v in &below {
                for x in &generators {
                    let y = v.bracket(x)?;
                    if !y.is_zero() {
                        ideal.insert(w, &y);
                    }
                }
            }
        }
    }
    Ok(ideal)
}

/// Canonical representative of `x` modulo `ideal`.
pub fn reduce(x: &LieElement, ideal: &LieIdeal) -> Result<LieElement, LieError> {
    x.check(&ideal.ctx.zero())?;
    let ctx = &ideal.ctx;
    let mut out = ctx.zero();
    for w in x.degrees() {
        let start = ctx.hall().layer(w).start;
        match &ideal.layers[w - 1] {
            Layer::Field(e) => {
                let p = ctx.ring().characteristic();
                let v = e.reduce(&x.layer_vector_mod(w, p));
                for (k, c) in v.iter().enumerate().filter(|(_, c)| **c != 0) {
                    out.add_term(start + k, BigInt::from(*c));
                }
            }
            Layer::Int(e) => {
                let v = e.reduce(&x.layer_vector_int(w));
                for (k, c) in v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    out.add_term(start + k, c);
                }
            }
        }
    }
    Ok(out)
}

/// Per-degree dimension (free rank over the integers) of the quotient ring.
pub fn quotient_dims(ideal: &LieIdeal) -> Vec<usize> {
    (1..=ideal.ctx.cap()).map(|w| ideal.ctx.hall().layer(w).len() - ideal.layer_rank(w)).collect()
}

/// A free Lie ring modulo an explicit graded ideal.
#[derive(Clone, Debug)]
pub struct FreeQuotient {
    pub ideal: LieIdeal,
}

impl FreeQuotient {
    pub fn new(ideal: LieIdeal) -> Self {
        FreeQuotient { ideal }
    }

    pub fn context(&self) -> &Arc<LieContext> {
        &self.ideal.ctx
    }

    pub fn project(&self, x: &LieElement) -> LieElement {
        reduce(x, &self.ideal).expect("element of the quotient's context")
    }

    pub fn generator(&self, i: usize) -> LieElement {
        self.project(&self.ideal.ctx.generator(i))
    }
}

impl GradedLie for FreeQuotient {
    type Elem = LieElement;

    fn cap(&self) -> usize {
        self.ideal.ctx.cap()
    }

    fn basis(&self, d: usize) -> Vec<LieElement> {
        let ctx = &self.ideal.ctx;
        match &self.ideal.layers[d - 1] {
            Layer::Field(e) => {
                let start = ctx.hall().layer(d).start;
                let pivots: std::collections::HashSet<usize> = e.pivots().collect();
                (0..e.ncols()).filter(|k| !pivots.contains(k)).map(|k| ctx.basis_element(start + k)).collect()
            }
            Layer::Int(_) => {
                ctx.layer_elements(d).iter().map(|x| self.project(x)).filter(|x| !x.is_zero()).collect()
            }
        }
    }

    fn bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        self.project(&x.bracket(y).expect("elements of one context"))
    }

    fn is_zero(&self, x: &LieElement) -> bool {
        self.project(x).is_zero()
    }

    fn min_degree(&self, x: &LieElement) -> Option<usize> {
        self.project(x).degrees().first().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hall_lie::left_normed;

    #[test]
    fn generator_of_rank_one_fills_everything() {
        let c = LieContext::new(1, 3, CoefficientRing::Integers).unwrap();
        let i = ideal_closure(&[c.generator(1)], &c).unwrap();
        assert_eq!(quotient_dims(&i), vec![0, 0, 0]);
    }

    #[test]
    fn empty_generators_give_zero_ideal() {
        let c = LieContext::new(2, 4, CoefficientRing::Prime(3)).unwrap();
        let i = ideal_closure(&[], &c).unwrap();
        assert_eq!(quotient_dims(&i), c.hall().layer_sizes());
        assert!(reduce(&c.zero(), &i).unwrap().is_zero());
    }

    #[test]
    fn element_reduces_to_zero_modulo_its_own_ideal() {
        for ring in [CoefficientRing::Integers, CoefficientRing::Prime(2), CoefficientRing::Prime(5)] {
            let c = LieContext::new(3, 4, ring).unwrap();
            let (a, b) = (c.generator(1), c.generator(2));
            let g = left_normed(&[a.clone(), b.clone(), a.clone()]).unwrap().add(&b.bracket(&c.generator(3)).unwrap()).unwrap();
            let i = ideal_closure(&[g.clone()], &c).unwrap();
            assert!(reduce(&g, &i).unwrap().is_zero());
            assert!(i.contains_by_rank(&g));
        }
    }

    #[test]
    fn integer_ideal_keeps_torsion() {
        let c = LieContext::new(2, 2, CoefficientRing::Integers).unwrap();
        let two_ab = c.generator(2).bracket(&c.generator(1)).unwrap().scale(&BigInt::from(2));
        let i = ideal_closure(&[two_ab.clone()], &c).unwrap();
        let ab = c.generator(2).bracket(&c.generator(1)).unwrap();
        assert!(!i.contains(&ab).unwrap());
        assert!(i.contains(&two_ab).unwrap());
        assert_eq!(quotient_dims(&i), vec![2, 0]);
    }
}
