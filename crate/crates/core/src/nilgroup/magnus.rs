//! Truncated Magnus embedding `x_i ↦ 1 + X_i` into noncommuting power
//! series, with coefficients in wrapping `i64` (exact modulo 2^64).

use crate::hall_lie::{HallBasis, Node};

/// Dense truncated series: one coefficient per word of length `0..=cap`,
/// words of a fixed length indexed in base `rank` (first letter most
/// significant).
pub(crate) type Series = Vec<i64>;

#[derive(Clone, Debug)]
pub(crate) struct SeriesSpace {
    cap: usize,
    offsets: Vec<usize>,
    pows: Vec<usize>,
}

impl SeriesSpace {
    pub fn new(rank: usize, cap: usize) -> Self {
        let mut pows = vec![1usize];
        for _ in 0..cap {
            pows.push(pows.last().unwrap() * rank);
        }
        let mut offsets = vec![0usize];
        for d in 0..=cap {
            offsets.push(offsets[d] + pows[d]);
        }
        SeriesSpace { cap, offsets, pows }
    }

    pub fn len(&self) -> usize {
        self.offsets[self.cap + 1]
    }

    pub fn one(&self) -> Series {
        let mut s = vec![0; self.len()];
        s[0] = 1;
        s
    }

    pub fn generator(&self, i: usize) -> Series {
        let mut s = self.one();
        if self.cap >= 1 {
            s[self.offsets[1] + i] = 1;
        }
        s
    }

    pub fn part<'a>(&self, s: &'a [i64], d: usize) -> &'a [i64] {
        &s[self.offsets[d]..self.offsets[d + 1]]
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Series {
        let mut out = vec![0i64; self.len()];
        for da in 0..=self.cap {
            for ia in 0..self.pows[da] {
                let ca = a[self.offsets[da] + ia];
                if ca == 0 {
                    continue;
                }
                for db in 0..=self.cap - da {
                    let base = self.offsets[da + db] + ia * self.pows[db];
                    let src = &b[self.offsets[db]..self.offsets[db + 1]];
                    let dst = &mut out[base..base + self.pows[db]];
                    for (o, &cb) in dst.iter_mut().zip(src) {
                        *o = o.wrapping_add(ca.wrapping_mul(cb));
                    }
                }
            }
        }
        out
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(&self, a: &[i64]) -> Series {
        let mut y: Series = a.iter().map(|c| c.wrapping_neg()).collect();
        y[0] = 0;
        let mut r = self.one();
        for _ in 0..self.cap {
            let mut t = self.mul(&y, &r);
            t[0] = t[0].wrapping_add(1);
            r = t;
        }
        r
    }

    pub fn pow(&self, a: &[i64], e: i64) -> Series {
        let mut base = if e < 0 { self.inverse(a) } else { a.to_vec() };
        let mut n = e.unsigned_abs();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: &[i64], b: &[i64]) -> Series {
        let ai = self.inverse(a);
        let bi = self.inverse(b);
        self.mul(&self.mul(&ai, &bi), &self.mul(a, b))
    }
}

/// Lyndon words of length `n` over `rank` letters, as base-`rank` indices.
pub(crate) fn lyndon_indices(rank: usize, n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if n == 0 || rank == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    while !w.is_empty() {
        if w.len() == n {
            out.push(w.iter().fold(0, |acc, &l| acc * rank + l));
        }
        let m = w.len();
        while w.len() < n {
            w.push(w[w.len() - m]);
        }
        while let Some(&last) = w.last() {
            if last + 1 == rank {
                w.pop();
            } else {
                break;
            }
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

/// Inverse of an odd-determinant square matrix modulo 2^64, or `None` when
/// the determinant is even.
fn inverse_mod_2_64(mut a: Vec<Vec<i64>>) -> Option<Vec<Vec<i64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] & 1 == 1)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let u = odd_inverse(a[col][col]);
        for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *x = x.wrapping_mul(u);
        }
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let f = a[r][col];
            let (src_a, src_i) = (a[col].clone(), inv[col].clone());
            for (x, s) in a[r].iter_mut().zip(&src_a) {
                *x = x.wrapping_sub(f.wrapping_mul(*s));
            }
            for (x, s) in inv[r].iter_mut().zip(&src_i) {
                *x = x.wrapping_sub(f.wrapping_mul(*s));
            }
        }
    }
    Some(inv)
}

fn odd_inverse(a: i64) -> i64 {
    let mut x = a;
    for _ in 0..6 {
        x = x.wrapping_mul(2i64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

/// Images of the Hall basic commutators (as group commutators
/// `[u,v] = u⁻¹v⁻¹uv`) and the linear data needed to read exponent vectors
/// back off a series.
pub(crate) struct MagnusModel {
    pub space: SeriesSpace,
    layers: Vec<std::ops::Range<usize>>,
    images: Vec<Series>,
    inverses: Vec<Series>,
    /// Per weight: Lyndon word columns and the inverse of the leading-term
    /// matrix restricted to them.
    solvers: Vec<(Vec<usize>, Vec<Vec<i64>>)>,
}

#[derive(Debug)]
pub(crate) struct NotUnimodular(pub usize);

impl MagnusModel {
    pub fn new(basis: &HallBasis) -> Result<Self, NotUnimodular> {
        let (rank, cap) = (basis.rank(), basis.cap());
        let space = SeriesSpace::new(rank, cap);
        let mut images: Vec<Series> = Vec::with_capacity(basis.len());
        for k in 0..basis.len() {
            let s = match basis.node(k) {
                Node::Leaf(g) => space.generator(g.0 - 1),
                Node::Pair(u, v) => space.commutator(&images[u], &images[v]),
            };
            images.push(s);
        }
        let inverses = images.iter().map(|s| space.inverse(s)).collect();
        let layers: Vec<_> = (1..=cap).map(|w| basis.layer(w)).collect();
        let mut solvers = Vec::with_capacity(cap);
        for w in 1..=cap {
            let cols = lyndon_indices(rank, w);
            let rows: Vec<Vec<i64>> = layers[w - 1]
                .clone()
                .map(|k| {
                    let p = space.part(&images[k], w);
                    cols.iter().map(|&c| p[c]).collect()
                })
                .collect();
            let inv = inverse_mod_2_64(rows).ok_or(NotUnimodular(w))?;
            solvers.push((cols, inv));
        }
        Ok(MagnusModel { space, layers, images, inverses, solvers })
    }

    pub fn image(&self, k: usize) -> &Series {
        &self.images[k]
    }

    #[cfg(test)]
    pub fn image_of(&self, exps: &[i64]) -> Series {
        let mut s = self.space.one();
        for (k, &e) in exps.iter().enumerate() {
            if e != 0 {
                s = self.space.mul(&s, &self.space.pow(&self.images[k], e));
            }
        }
        s
    }

    fn solve_layer(&self, s: &[i64], w: usize) -> Vec<i64> {
        let (cols, inv) = &self.solvers[w - 1];
        let part = self.space.part(s, w);
        let v: Vec<i64> = cols.iter().map(|&c| part[c]).collect();
        let n = v.len();
        let mut e = vec![0i64; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for (ej, &a) in e.iter_mut().zip(&inv[i]) {
                *ej = ej.wrapping_add(vi.wrapping_mul(a));
            }
        }
        debug_assert_eq!(e.len(), n);
        e
    }

    /// Exponent vector of the element whose image is `s`, or `None` if `s`
    /// is not the image of a group element.
    pub fn decompose(&self, s: &[i64]) -> Option<Vec<i64>> {
        let cap = self.space.cap;
        let mut s = s.to_vec();
        let mut exps = vec![0i64; self.images.len()];
        for w in 1..=cap {
            let e = self.solve_layer(&s, w);
            let range = self.layers[w - 1].clone();
            if 2 * w > cap {
                for (k, &ek) in range.clone().zip(&e) {
                    exps[k] = ek;
                    if ek == 0 {
                        continue;
                    }
                    for (x, &m) in s.iter_mut().zip(&self.images[k]).skip(1) {
                        *x = x.wrapping_sub(ek.wrapping_mul(m));
                    }
                }
            } else {
                let mut peel = self.space.one();
                for (k, &ek) in range.clone().zip(&e).rev() {
                    exps[k] = ek;
                    if ek != 0 {
                        peel = self.space.mul(&peel, &self.space.pow(&self.images[k], -ek));
                    }
                }
                s = self.space.mul(&peel, &s);
            }
            if self.space.part(&s, w).iter().any(|&c| c != 0) {
                return None;
            }
        }
        (s[0] == 1 && s[1..].iter().all(|&c| c == 0)).then_some(exps)
    }

    pub fn inverse_image(&self, k: usize) -> &Series {
        &self.inverses[k]
    }
}
