//! Finitely presented graded Lie algebras over GF(p), built one degree at a
//! time.
//!
//! Degree `n` of the quotient is spanned by the formal products `[b, y]` of
//! degree-`(n-1)` basis elements `b` with degree-one basis elements `y`. Every
//! other product landing in degree `n` is rewritten into these symbols through
//! the definitions of lower basis elements and the Jacobi identity. The symbols
//! are then cut down by antisymmetry, by Jacobi on all basis triples, and by
//! the relators the caller supplies for that degree. What survives is exactly
//! the degree-`n` layer of the largest algebra satisfying the relators.

use std::cell::RefCell;
use std::collections::HashMap;

use super::{GradedLie, LieError};
use crate::lattice::FieldEchelon;

/// A homogeneous element of degree `deg`, in basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homog {
    pub deg: usize,
    pub v: Vec<u64>,
}

impl Homog {
    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|&x| x == 0)
    }
}

/// A (possibly inhomogeneous) element: one coordinate vector per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QElem {
    parts: Vec<Vec<u64>>,
}

impl QElem {
    pub fn part(&self, d: usize) -> &[u64] {
        &self.parts[d - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|v| v.iter().all(|&x| x == 0))
    }
}

#[derive(Clone, Debug)]
pub struct LieQuotient {
    p: u64,
    rank: usize,
    cap: usize,
    dims: Vec<usize>,
    gen_images: Vec<Vec<u64>>,
    /// For degree `d >= 2`, basis element `k` is the product `[defs[d-1][k].0, defs[d-1][k].1]`
    /// of a degree-`(d-1)` basis element with a degree-one basis element.
    defs: Vec<Vec<(usize, usize)>>,
    /// `prod[(s,t)][a * dims[t] + b]` is the product of basis elements `a` (degree s) and `b` (degree t).
    prod: HashMap<(usize, usize), Vec<Vec<u64>>>,
}

/// View of a partially built quotient while degree `n` is being added.
pub struct Extension<'a> {
    alg: &'a LieQuotient,
    n: usize,
    memo: RefCell<HashMap<(usize, usize, usize, usize), Vec<u64>>>,
}

impl LieQuotient {
    /// Builds the quotient of the free Lie algebra of the given rank over
    /// GF(p) by the relators produced degree by degree by `relators`.
    pub fn build<F>(p: u64, rank: usize, cap: usize, relators: F) -> Result<Self, LieError>
    where
        F: Fn(&Extension<'_>) -> Vec<Vec<u64>>,
    {
        if !super::is_prime(p) {
            return Err(LieError::NotPrime(p));
        }
        if rank == 0 || cap == 0 {
            return Err(LieError::BadParameters);
        }
        let mut alg = LieQuotient {
            p,
            rank,
            cap: 0,
            dims: Vec::new(),
            gen_images: Vec::new(),
            defs: Vec::new(),
            prod: HashMap::new(),
        };
        for n in 1..=cap {
            alg.extend(n, &relators);
        }
        Ok(alg)
    }

    fn extend<F>(&mut self, n: usize, relators: &F)
    where
        F: Fn(&Extension<'_>) -> Vec<Vec<u64>>,
    {
        let p = self.p;
        let nsym = if n == 1 { self.rank } else { self.dims[n - 2] * self.dims[0] };
        let mut ech = FieldEchelon::new(p, nsym);
        let products: Vec<((usize, usize), Vec<Vec<u64>>)>;
        let defs: Vec<(usize, usize)>;
        let new_dim;
        let mut gen_images = Vec::new();
        {
            let ext = Extension { alg: self, n, memo: RefCell::new(HashMap::new()) };
            if n >= 2 {
                for rel in ext.structural_relations() {
                    ech.insert(&rel);
                }
            }
            for rel in relators(&ext) {
                assert_eq!(rel.len(), nsym, "relator has the wrong length for degree {n}");
                ech.insert(&rel);
            }
            let pivots: std::collections::HashSet<usize> = ech.pivots().collect();
            let free: Vec<usize> = (0..nsym).filter(|c| !pivots.contains(c)).collect();
            let project = |sym: &[u64]| -> Vec<u64> {
                let r = ech.reduce(sym);
                free.iter().map(|&c| r[c]).collect()
            };
            if n == 1 {
                gen_images = (0..self.rank)
                    .map(|i| {
                        let mut e = vec![0; nsym];
                        e[i] = 1;
                        project(&e)
                    })
                    .collect();
                defs = free.iter().map(|&g| (g, g)).collect();
                products = Vec::new();
            } else {
                let r1 = self.dims[0];
                defs = free.iter().map(|&c| (c / r1, c % r1)).collect();
                let mut out = Vec::new();
                for s in 1..n {
                    let t = n - s;
                    let mut table = Vec::with_capacity(self.dims[s - 1] * self.dims[t - 1]);
                    for a in 0..self.dims[s - 1] {
                        for b in 0..self.dims[t - 1] {
                            table.push(project(&ext.fp(s, a, t, b)));
                        }
                    }
                    out.push(((s, t), table));
                }
                products = out;
            }
            new_dim = free.len();
        }
        if n == 1 {
            self.gen_images = gen_images;
        }
        self.defs.push(defs);
        self.dims.push(new_dim);
        self.prod.extend(products);
        self.cap = n;
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dims_vec(&self) -> &[usize] {
        &self.dims
    }

    fn dim(&self, d: usize) -> usize {
        self.dims[d - 1]
    }

    pub fn zero(&self) -> QElem {
        QElem { parts: self.dims.iter().map(|&n| vec![0; n]).collect() }
    }

    pub fn from_homog(&self, h: &Homog) -> QElem {
        let mut z = self.zero();
        z.parts[h.deg - 1] = h.v.clone();
        z
    }

    /// Image of the `i`-th free generator (1-based).
    pub fn generator(&self, i: usize) -> QElem {
        self.from_homog(&self.generator_h(i))
    }

    pub fn generator_h(&self, i: usize) -> Homog {
        Homog { deg: 1, v: self.gen_images[i - 1].clone() }
    }

    pub fn basis_h(&self, d: usize) -> Vec<Homog> {
        (0..self.dim(d))
            .map(|k| {
                let mut v = vec![0; self.dim(d)];
                v[k] = 1;
                Homog { deg: d, v }
            })
            .collect()
    }

    /// Product of two homogeneous elements; `None` beyond the cap.
    pub fn bracket_h(&self, x: &Homog, y: &Homog) -> Option<Homog> {
        let (s, t) = (x.deg, y.deg);
        if s + t > self.cap {
            return None;
        }
        let p = self.p;
        let dt = self.dim(t);
        let table = &self.prod[&(s, t)];
        let mut out = vec![0u64; self.dim(s + t)];
        for (a, xa) in x.v.iter().enumerate().filter(|(_, c)| **c != 0) {
            for (b, yb) in y.v.iter().enumerate().filter(|(_, c)| **c != 0) {
                let f = xa * yb % p;
                for (o, c) in out.iter_mut().zip(&table[a * dt + b]) {
                    *o = (*o + f * c) % p;
                }
            }
        }
        Some(Homog { deg: s + t, v: out })
    }

    /// Ideal generated by `x` (homogeneous), as spanning echelon rows per degree.
    pub fn ideal_layers(&self, seeds: &[Homog]) -> Vec<Vec<Homog>> {
        let mut layers: Vec<FieldEchelon> = self.dims.iter().map(|&n| FieldEchelon::new(self.p, n)).collect();
        for d in 1..=self.cap {
            for s in seeds.iter().filter(|s| s.deg == d) {
                layers[d - 1].insert(&s.v);
            }
            if d > 1 {
                let below: Vec<Vec<u64>> = layers[d - 2].rows().map(|r| r.to_vec()).collect();
                for v in below {
                    let h = Homog { deg: d - 1, v };
                    for i in 1..=self.rank {
                        if let Some(y) = self.bracket_h(&h, &self.generator_h(i)) {
                            layers[d - 1].insert(&y.v);
                        }
                    }
                }
            }
        }
        layers
            .iter()
            .enumerate()
            .map(|(k, e)| e.rows().map(|r| Homog { deg: k + 1, v: r.to_vec() }).collect())
            .collect()
    }

    pub fn add(&self, x: &QElem, y: &QElem) -> QElem {
        let p = self.p;
        QElem {
            parts: x
                .parts
                .iter()
                .zip(&y.parts)
                .map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u + v) % p).collect())
                .collect(),
        }
    }
}

impl GradedLie for LieQuotient {
    type Elem = QElem;

    fn cap(&self) -> usize {
        self.cap
    }

    fn basis(&self, d: usize) -> Vec<QElem> {
        self.basis_h(d).iter().map(|h| self.from_homog(h)).collect()
    }

    fn bracket(&self, x: &QElem, y: &QElem) -> QElem {
        let mut out = self.zero();
        for s in 1..=self.cap {
            for t in 1..=self.cap - s {
                let hx = Homog { deg: s, v: x.parts[s - 1].clone() };
                let hy = Homog { deg: t, v: y.parts[t - 1].clone() };
                if hx.is_zero() || hy.is_zero() {
                    continue;
                }
                let z = self.bracket_h(&hx, &hy).expect("within cap");
                let slot = &mut out.parts[s + t - 1];
                for (o, c) in slot.iter_mut().zip(z.v) {
                    *o = (*o + c) % self.p;
                }
            }
        }
        out
    }

    fn is_zero(&self, x: &QElem) -> bool {
        x.is_zero()
    }

    fn min_degree(&self, x: &QElem) -> Option<usize> {
        x.parts.iter().position(|v| v.iter().any(|&c| c != 0)).map(|k| k + 1)
    }

    fn dims(&self) -> Vec<usize> {
        self.dims.clone()
    }
}

impl Extension<'_> {
    /// The algebra built so far (degrees below `degree()`).
    pub fn algebra(&self) -> &LieQuotient {
        self.alg
    }

    /// The degree being added.
    pub fn degree(&self) -> usize {
        self.n
    }

    fn nsym(&self) -> usize {
        if self.n == 1 {
            self.alg.rank
        } else {
            self.alg.dims[self.n - 2] * self.alg.dims[0]
        }
    }

    /// Formal symbol of the `i`-th free generator; only meaningful in degree one.
    pub fn generator_symbol(&self, i: usize) -> Vec<u64> {
        assert_eq!(self.n, 1);
        let mut v = vec![0; self.nsym()];
        v[i - 1] = 1;
        v
    }

    fn unit(&self, a: usize, y: usize) -> Vec<u64> {
        let mut v = vec![0; self.nsym()];
        v[a * self.alg.dims[0] + y] = 1;
        v
    }

    fn axpy(&self, dst: &mut [u64], f: u64, src: &[u64]) {
        if f == 0 {
            return;
        }
        let p = self.alg.p;
        for (d, s) in dst.iter_mut().zip(src) {
            *d = (*d + f * s) % p;
        }
    }

    /// Formal product of basis element `a` (degree s) with basis element `b`
    /// (degree t), where `s + t` is the degree being added.
    fn fp(&self, s: usize, a: usize, t: usize, b: usize) -> Vec<u64> {
        debug_assert_eq!(s + t, self.n);
        if let Some(v) = self.memo.borrow().get(&(s, a, t, b)) {
            return v.clone();
        }
        let p = self.alg.p;
        let v = if t == 1 {
            self.unit(a, b)
        } else {
            // [u,[v',y]] = [[u,v'],y] - [[u,y],v']
            let (vp, y) = self.alg.defs[t - 1][b];
            let mut out = vec![0; self.nsym()];
            let uv = &self.alg.prod[&(s, t - 1)][a * self.alg.dim(t - 1) + vp];
            for (k, &c) in uv.iter().enumerate() {
                if c != 0 {
                    out[k * self.alg.dims[0] + y] = (out[k * self.alg.dims[0] + y] + c) % p;
                }
            }
            let uy = &self.alg.prod[&(s, 1)][a * self.alg.dim(1) + y];
            for (k, &c) in uy.iter().enumerate() {
                if c != 0 {
                    let inner = self.fp(s + 1, k, t - 1, vp);
                    self.axpy(&mut out, p - c, &inner);
                }
            }
            out
        };
        self.memo.borrow_mut().insert((s, a, t, b), v.clone());
        v
    }

    /// Formal product of two homogeneous elements whose degrees add up to the
    /// degree being added.
    pub fn formal(&self, x: &Homog, y: &Homog) -> Vec<u64> {
        assert_eq!(x.deg + y.deg, self.n, "formal product must land in the new degree");
        let p = self.alg.p;
        let mut out = vec![0; self.nsym()];
        for (a, xa) in x.v.iter().enumerate().filter(|(_, c)| **c != 0) {
            for (b, yb) in y.v.iter().enumerate().filter(|(_, c)| **c != 0) {
                let f = xa * yb % p;
                let sym = self.fp(x.deg, a, y.deg, b);
                self.axpy(&mut out, f, &sym);
            }
        }
        out
    }

    fn structural_relations(&self) -> Vec<Vec<u64>> {
        let n = self.n;
        let alg = self.alg;
        let mut rels = Vec::new();
        for s in 1..n {
            let t = n - s;
            if s > t {
                continue;
            }
            for a in 0..alg.dim(s) {
                for b in 0..alg.dim(t) {
                    if s == t && b < a {
                        continue;
                    }
                    let mut r = self.fp(s, a, t, b);
                    if !(s == t && a == b) {
                        let q = self.fp(t, b, s, a);
                        self.axpy(&mut r, 1, &q);
                    }
                    rels.push(r);
                }
            }
        }
        // Jacobi on sorted basis triples.
        let basis: Vec<Homog> = (1..n).flat_map(|d| alg.basis_h(d)).collect();
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate().skip(i) {
                if u.deg + v.deg >= n {
                    continue;
                }
                for w in basis.iter().skip(j) {
                    if u.deg + v.deg + w.deg != n {
                        continue;
                    }
                    let mut r = vec![0; self.nsym()];
                    for (x, y, z) in [(u, v, w), (v, w, u), (w, u, v)] {
                        let xy = alg.bracket_h(x, y).expect("below the new degree");
                        let term = self.formal(&xy, z);
                        self.axpy(&mut r, 1, &term);
                    }
                    rels.push(r);
                }
            }
        }
        rels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_algebra_has_witt_dimensions() {
        for (p, r, d) in [(2, 2, 6), (3, 3, 4), (5, 2, 5)] {
            let q = LieQuotient::build(p, r, d, |_| Vec::new()).unwrap();
            let expected: Vec<usize> = (1..=d).map(|w| super::super::witt_dimension(r, w)).collect();
            assert_eq!(q.dims(), expected, "p={p} r={r}");
        }
    }

    #[test]
    fn abelian_relator_kills_everything_above_degree_one() {
        let q = LieQuotient::build(3, 2, 4, |ext| {
            if ext.degree() == 2 {
                let a = ext.algebra().generator_h(1);
                let b = ext.algebra().generator_h(2);
                vec![ext.formal(&b, &a)]
            } else {
                Vec::new()
            }
        })
        .unwrap();
        assert_eq!(q.dims(), vec![2, 0, 0, 0]);
    }

    #[test]
    fn degree_one_relators_identify_generators() {
        let q = LieQuotient::build(2, 3, 2, |ext| {
            if ext.degree() == 1 {
                let mut v = ext.generator_symbol(1);
                v[2] = 1;
                vec![v]
            } else {
                Vec::new()
            }
        })
        .unwrap();
        assert_eq!(q.dims(), vec![2, 1]);
        assert_eq!(q.generator(1), q.generator(3));
    }
}
