//! The three-generator GF(2) algebra whose generators satisfy only `axa = 0`
//! and is not nilpotent, and the check that `axya = 0` follows from `axa = 0`
//! in odd characteristic.

use std::sync::Arc;

use crate::hall_lie::{
    ideal_closure, left_normed, reduce, CoefficientRing, Extension, FreeQuotient, GradedLie, Homog,
    LieContext, LieElement, LieError, LieIdeal, LieQuotient, QElem,
};
use crate::lattice::FieldEchelon;

/// Generator labels of the example: `a = x1`, `b = x2`, `c = x3`.
pub const A: usize = 1;
pub const B: usize = 2;
pub const C: usize = 3;

/// Largest GF(2) Lie algebra on `a, b, c` with `Id(c)` abelian, `bc = 0` and
/// `gxg = 0` for `g` in `{a, b, c}`, truncated at a degree cap.
#[derive(Clone, Debug)]
pub struct ExampleAlgebra {
    pub algebra: LieQuotient,
}

fn example_relators(ext: &Extension<'_>) -> Vec<Vec<u64>> {
    let n = ext.degree();
    let alg = ext.algebra();
    let mut rels = Vec::new();
    if n == 1 {
        return rels;
    }
    if n == 2 {
        rels.push(ext.formal(&alg.generator_h(B), &alg.generator_h(C)));
    }
    if n >= 3 {
        for g in [A, B, C] {
            let gh = alg.generator_h(g);
            for h in alg.basis_h(n - 2) {
                if let Some(x) = alg.bracket_h(&gh, &h) {
                    rels.push(ext.formal(&x, &gh));
                }
            }
        }
    }
    let ideal = alg.ideal_layers(&[alg.generator_h(C)]);
    for s in 1..n {
        let t = n - s;
        if s > t {
            break;
        }
        for u in &ideal[s - 1] {
            for v in &ideal[t - 1] {
                rels.push(ext.formal(u, v));
            }
        }
    }
    rels
}

/// Builds the example algebra up to degree `cap` (at least 4).
pub fn build_gf2_example(cap: usize) -> Result<ExampleAlgebra, LieError> {
    if cap < 4 {
        return Err(LieError::CapTooSmall { cap, needed: 4, what: "the GF(2) example" });
    }
    Ok(ExampleAlgebra { algebra: LieQuotient::build(2, 3, cap, example_relators)? })
}

impl ExampleAlgebra {
    pub fn cap(&self) -> usize {
        self.algebra.cap()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.algebra.dims()
    }

    pub fn generator(&self, i: usize) -> QElem {
        self.algebra.generator(i)
    }

    /// Left-normed product of generator labels, e.g. `[C, A, B]` for `cab`.
    pub fn monomial(&self, labels: &[usize]) -> Result<QElem, LieError> {
        let xs: Vec<QElem> = labels.iter().map(|&i| self.generator(i)).collect();
        self.algebra.left_normed(&xs)
    }

    /// Every defining relation, instantiated over basis elements up to the cap.
    pub fn defining_relations(&self) -> Vec<(String, QElem)> {
        let alg = &self.algebra;
        let mut out = Vec::new();
        let (b, c) = (self.generator(B), self.generator(C));
        out.push(("bc".to_string(), alg.bracket(&b, &c)));
        for g in [A, B, C] {
            let gx = self.generator(g);
            for d in 1..=self.cap() - 2 {
                for (k, h) in alg.basis(d).into_iter().enumerate() {
                    let v = alg.left_normed(&[gx.clone(), h, gx.clone()]).expect("nonempty");
                    out.push((format!("{}·h{d}.{k}·{}", label(g), label(g)), v));
                }
            }
        }
        let ideal = alg.ideal_layers(&[alg.generator_h(C)]);
        for s in 1..self.cap() {
            for t in s..=self.cap() - s {
                for u in &ideal[s - 1] {
                    for v in &ideal[t - 1] {
                        let val = alg.bracket(&alg.from_homog(u), &alg.from_homog(v));
                        out.push((format!("[Id(c)_{s}, Id(c)_{t}]"), val));
                    }
                }
            }
        }
        out
    }
}

fn label(g: usize) -> &'static str {
    ["a", "b", "c"][g - 1]
}

/// The element `c(ab)^n`, bracketed left-normed as `c,a,b,a,b,…`, and
/// whether it is nonzero.
pub fn nonnilpotence_witness(example: &ExampleAlgebra, n: usize) -> Result<(QElem, bool), LieError> {
    let needed = 1 + 2 * n;
    if needed > example.cap() {
        return Err(LieError::WitnessTooLarge { n, needed, cap: example.cap() });
    }
    let mut labels = vec![C];
    for _ in 0..n {
        labels.extend([A, B]);
    }
    let w = example.monomial(&labels)?;
    let nonzero = !w.is_zero();
    Ok((w, nonzero))
}

/// The same algebra computed as an explicit quotient of the free Lie ring
/// over GF(2). Feasible for moderate caps only (the free layers grow like
/// `3^d / d`); used to cross-check [`build_gf2_example`].
pub fn build_gf2_example_explicit(cap: usize) -> Result<FreeQuotient, LieError> {
    let ctx = LieContext::new(3, cap, CoefficientRing::Prime(2))?;
    let (a, b, c) = (ctx.generator(A), ctx.generator(B), ctx.generator(C));
    let mut gens = vec![b.bracket(&c)?];
    for g in [&a, &b, &c] {
        for w in 1..=cap.saturating_sub(2) {
            for h in ctx.layer_elements(w) {
                gens.push(left_normed(&[g.clone(), h, g.clone()])?);
            }
        }
    }
    let mut ideal = ideal_closure(&gens, &ctx)?;
    loop {
        let layers = ideal_of_element_mod(&ctx, &c, &ideal)?;
        let before: Vec<usize> = (1..=cap).map(|w| ideal.layer_rank(w)).collect();
        for s in 1..cap {
            for t in s..=cap - s {
                for u in &layers[s - 1] {
                    for v in &layers[t - 1] {
                        let x = u.bracket(v)?;
                        if !x.is_zero() {
                            gens.push(x);
                        }
                    }
                }
            }
        }
        ideal = ideal_closure(&gens, &ctx)?;
        let after: Vec<usize> = (1..=cap).map(|w| ideal.layer_rank(w)).collect();
        if before == after {
            return Ok(FreeQuotient::new(ideal));
        }
    }
}

/// Spanning sets, per degree, of the ideal generated by `x` modulo `ideal`.
fn ideal_of_element_mod(
    ctx: &Arc<LieContext>,
    x: &LieElement,
    ideal: &LieIdeal,
) -> Result<Vec<Vec<LieElement>>, LieError> {
    let p = ctx.ring().characteristic();
    let mut layers: Vec<Vec<LieElement>> = Vec::new();
    let generators: Vec<LieElement> = (1..=ctx.rank()).map(|i| ctx.generator(i)).collect();
    for w in 1..=ctx.cap() {
        let mut cands = vec![x.homogeneous_part(w)];
        if w > 1 {
            for u in &layers[w - 2] {
                for g in &generators {
                    cands.push(u.bracket(g)?);
                }
            }
        }
        let mut ech = FieldEchelon::new(p, ctx.hall().layer(w).len());
        let mut kept = Vec::new();
        for y in cands {
            let r = reduce(&y, ideal)?;
            if !r.is_zero() && ech.insert(&r.layer_vector_mod(w, p)) {
                kept.push(r);
            }
        }
        layers.push(kept);
    }
    Ok(layers)
}

/// Whether `a·x·y·a` lies in the ideal generated by every `a·h·a` in the
/// free GF(p) Lie algebra on `a, x, y`, truncated at degree 4.
pub fn odd_char_check(p: u64) -> Result<bool, LieError> {
    let ring = CoefficientRing::prime(p)?;
    let ctx = LieContext::new(3, 4, ring)?;
    let (a, x, y) = (ctx.generator(1), ctx.generator(2), ctx.generator(3));
    let mut gens = Vec::new();
    for w in 1..=2 {
        for h in ctx.layer_elements(w) {
            gens.push(left_normed(&[a.clone(), h, a.clone()])?);
        }
    }
    let ideal = ideal_closure(&gens, &ctx)?;
    let axya = left_normed(&[a.clone(), x, y, a])?;
    ideal.contains(&axya)
}

/// [`odd_char_check`] recomputed through the degree-by-degree quotient
/// builder instead of an explicit ideal in the free ring.
pub fn odd_char_check_layered(p: u64) -> Result<bool, LieError> {
    let q = LieQuotient::build(p, 3, 4, |ext| {
        let n = ext.degree();
        let alg = ext.algebra();
        if n < 3 {
            return Vec::new();
        }
        let a = alg.generator_h(1);
        alg.basis_h(n - 2)
            .iter()
            .filter_map(|h| alg.bracket_h(&a, h))
            .map(|ah: Homog| ext.formal(&ah, &a))
            .collect()
    })?;
    let xs: Vec<QElem> = [1, 2, 3, 1].iter().map(|&i| q.generator(i)).collect();
    Ok(q.left_normed(&xs)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hall_lie::{is_sandwich, SandwichMode};

    #[test]
    fn example_dims_at_cap_eight() {
        let ex = build_gf2_example(8).unwrap();
        assert_eq!(ex.dims(), vec![3, 2, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn bc_vanishes_and_cabab_survives() {
        let ex = build_gf2_example(8).unwrap();
        assert!(ex.monomial(&[B, C]).unwrap().is_zero());
        assert!(!ex.monomial(&[C, A, B, A, B]).unwrap().is_zero());
    }

    #[test]
    fn witnesses_and_cap_error() {
        let ex = build_gf2_example(8).unwrap();
        for n in 0..=3 {
            assert!(nonnilpotence_witness(&ex, n).unwrap().1, "n={n}");
        }
        assert!(matches!(nonnilpotence_witness(&ex, 4), Err(LieError::WitnessTooLarge { .. })));
        assert!(build_gf2_example(3).is_err());
    }

    #[test]
    fn sandwich_modes_on_example() {
        let ex = build_gf2_example(8).unwrap();
        for g in [A, B, C] {
            let r = is_sandwich(&ex.algebra, &ex.generator(g), SandwichMode::Condition1).unwrap();
            assert!(r.holds, "generator {g}");
        }
        let r = is_sandwich(&ex.algebra, &ex.generator(A), SandwichMode::Full).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.x, ex.generator(B));
        assert_eq!(w.y, Some(ex.generator(C)));
    }

    #[test]
    fn odd_characteristic_remark() {
        assert!(!odd_char_check(2).unwrap());
        assert!(odd_char_check(3).unwrap());
        assert!(odd_char_check(5).unwrap());
        assert!(odd_char_check(4).is_err());
    }

    #[test]
    fn explicit_route_agrees_at_cap_eight() {
        let ex = build_gf2_example(8).unwrap();
        let explicit = build_gf2_example_explicit(8).unwrap();
        assert_eq!(explicit.dims(), ex.dims());
        let g = |i| explicit.generator(i);
        let w = explicit.left_normed(&[g(C), g(A), g(B), g(A), g(B), g(A), g(B)]).unwrap();
        assert!(!w.is_zero());
    }

    #[test]
    fn layered_odd_char_check_matches() {
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(odd_char_check_layered(p).unwrap(), p != 2, "p={p}");
            assert_eq!(odd_char_check(p).unwrap(), p != 2, "p={p}");
        }
    }

    #[test]
    fn relations_hold_and_layers_stay_one_dimensional_at_cap_twelve() {
        let ex = build_gf2_example(12).unwrap();
        assert_eq!(ex.dims(), [vec![3, 2], vec![1; 10]].concat());
        for (name, v) in ex.defining_relations() {
            assert!(v.is_zero(), "{name}");
        }
        assert!(nonnilpotence_witness(&ex, 5).unwrap().1);
    }
}
