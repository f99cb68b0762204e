//! Row echelon forms over prime fields and over the integers.
//!
//! Both echelon types are incremental: rows are inserted one at a time and
//! the form is kept fully reduced, so `reduce` yields a canonical
//! representative of a vector modulo the row space (resp. row lattice).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} is not invertible modulo {p}");
    t.rem_euclid(p as i128) as u64
}

/// Reduced row echelon form over GF(p).
#[derive(Clone, Debug)]
pub struct FieldEchelon {
    p: u64,
    ncols: usize,
    /// Rows sorted by pivot column; each row has a 1 at its pivot and zeros
    /// at every other pivot column.
    rows: Vec<(usize, Vec<u64>)>,
}

impl FieldEchelon {
    pub fn new(p: u64, ncols: usize) -> Self {
        FieldEchelon { p, ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|(c, _)| *c)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.rows.iter().map(|(_, r)| r.as_slice())
    }

    /// Reduces `v` against the stored rows in place.
    pub fn reduce_in_place(&self, v: &mut [u64]) {
        let p = self.p;
        for (pc, row) in &self.rows {
            let f = v[*pc];
            if f == 0 {
                continue;
            }
            let m = p - f;
            for (x, r) in v.iter_mut().zip(row.iter()) {
                if *r != 0 {
                    *x = (*x + m * r) % p;
                }
            }
        }
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut w = v.to_vec();
        self.reduce_in_place(&mut w);
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Inserts a row; returns `true` if the row space grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|x| x % p).collect();
        self.reduce_in_place(&mut w);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inverse(w[pc], p);
        for x in w.iter_mut() {
            *x = *x * inv % p;
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[pc];
            if f != 0 {
                let m = p - f;
                for (x, r) in row.iter_mut().zip(w.iter()) {
                    if *r != 0 {
                        *x = (*x + m * r) % p;
                    }
                }
            }
        }
        let at = self.rows.partition_point(|(c, _)| *c < pc);
        self.rows.insert(at, (pc, w));
        true
    }
}

/// Hermite normal form of an integer row lattice, kept reduced: pivots are
/// positive and entries above each pivot lie in `[0, pivot)`.
#[derive(Clone, Debug)]
pub struct IntEchelon {
    ncols: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl IntEchelon {
    pub fn new(ncols: usize) -> Self {
        IntEchelon { ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[BigInt])> {
        self.rows.iter().map(|(c, r)| (*c, r.as_slice()))
    }

    fn axpy(dst: &mut [BigInt], f: &BigInt, src: &[BigInt]) {
        for (d, s) in dst.iter_mut().zip(src) {
            if !s.is_zero() {
                *d -= f * s;
            }
        }
    }

    /// Canonical representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut w = v.to_vec();
        for (pc, row) in &self.rows {
            if w[*pc].is_zero() {
                continue;
            }
            let q = w[*pc].div_floor(&row[*pc]);
            if !q.is_zero() {
                Self::axpy(&mut w, &q, row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Inserts a row; returns `true` if the lattice grew.
    pub fn insert(&mut self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let mut w = v.to_vec();
        let mut grew = false;
        let mut i = 0;
        loop {
            let Some(pc) = w.iter().position(|x| !x.is_zero()) else {
                break;
            };
            while i < self.rows.len() && self.rows[i].0 < pc {
                i += 1;
            }
            if i < self.rows.len() && self.rows[i].0 == pc {
                // Combine the two rows with a unimodular transform on the pivot column.
                let row = std::mem::take(&mut self.rows[i].1);
                let (a, b) = (row[pc].clone(), w[pc].clone());
                let eg = a.extended_gcd(&b);
                let g = eg.gcd;
                if (&b % &a).is_zero() {
                    let q = &b / &a;
                    Self::axpy(&mut w, &q, &row);
                    self.rows[i].1 = row;
                } else {
                    let (x, y) = (eg.x, eg.y);
                    let new_row: Vec<BigInt> =
                        row.iter().zip(&w).map(|(r, s)| &x * r + &y * s).collect();
                    let (ag, bg) = (&a / &g, &b / &g);
                    let rest: Vec<BigInt> =
                        row.iter().zip(&w).map(|(r, s)| &ag * s - &bg * r).collect();
                    self.rows[i].1 = new_row;
                    w = rest;
                    grew = true;
                }
                continue;
            }
            self.rows.insert(i, (pc, w));
            grew = true;
            break;
        }
        if grew {
            self.normalize();
        }
        grew
    }

    fn normalize(&mut self) {
        for k in 0..self.rows.len() {
            let pc = self.rows[k].0;
            if self.rows[k].1[pc].is_negative() {
                for x in self.rows[k].1.iter_mut() {
                    *x = -&*x;
                }
            }
        }
        for k in (0..self.rows.len()).rev() {
            let (pc, row) = (self.rows[k].0, self.rows[k].1.clone());
            for j in 0..k {
                let q = self.rows[j].1[pc].div_floor(&row[pc]);
                if !q.is_zero() {
                    Self::axpy(&mut self.rows[j].1, &q, &row);
                }
            }
        }
    }

    /// Product of the absolute pivot values, i.e. the index of the lattice in
    /// the coordinate sublattice spanned by its pivot columns.
    pub fn pivot_product(&self) -> BigInt {
        self.rows.iter().fold(BigInt::one(), |acc, (c, r)| acc * r[*c].abs())
    }
}

/// Invariant factors of the abelian group `Z^ncols / rowspan(rows)`.
///
/// Returns `(free_rank, torsion)` where `torsion` lists the invariant factors
/// greater than one in divisibility order.
pub fn smith_invariants(rows: &[Vec<BigInt>], ncols: usize) -> (usize, Vec<BigInt>) {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // Pick the nonzero entry of least absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let piv = m[t][t].clone();
            let mut done = true;
            for i in t + 1..m.len() {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&piv);
                let src = m[t].clone();
                IntEchelon::axpy(&mut m[i], &q, &src);
                if !m[i][t].is_zero() {
                    done = false;
                }
            }
            for j in t + 1..ncols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&piv);
                for row in m.iter_mut() {
                    let s = row[t].clone();
                    row[j] -= &q * s;
                }
                if !m[t][j].is_zero() {
                    done = false;
                }
            }
            if done {
                // Enforce divisibility of the remaining block by the pivot.
                let bad = (t + 1..m.len()).find_map(|i| {
                    (t + 1..ncols).find(|&j| !(&m[i][j] % &piv).is_zero()).map(|_| i)
                });
                match bad {
                    Some(i) => {
                        let src = m[i].clone();
                        for (d, s) in m[t].iter_mut().zip(src) {
                            *d += s;
                        }
                    }
                    None => break,
                }
            } else {
                // Move the smallest entry of the pivot row/column into place.
                let mut best = (t, t);
                for i in t..m.len() {
                    if !m[i][t].is_zero() && m[i][t].abs() < m[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..ncols {
                    if !m[t][j].is_zero() && m[t][j].abs() < m[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                m.swap(t, best.0);
                for row in m.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    let torsion = diag.iter().filter(|d| !d.is_one()).cloned().collect();
    (ncols - diag.len(), torsion)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn field_echelon_rank_and_membership() {
        let mut e = FieldEchelon::new(3, 3);
        assert!(e.insert(&[1, 2, 0]));
        assert!(e.insert(&[0, 1, 1]));
        assert!(!e.insert(&[1, 0, 1]));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&[2, 1, 0]));
        assert!(!e.contains(&[0, 0, 1]));
    }

    #[test]
    fn int_echelon_gcd_merge() {
        let mut e = IntEchelon::new(2);
        e.insert(&bi(&[4, 1]));
        e.insert(&bi(&[6, 0]));
        // lattice spanned by (4,1),(6,0): det 6
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivot_product(), BigInt::from(6));
        assert!(e.contains(&bi(&[2, -1])));
        assert!(!e.contains(&bi(&[1, 0])));
        let r = e.reduce(&bi(&[5, 7]));
        assert_eq!(e.reduce(&r), r);
    }

    #[test]
    fn smith_of_simple_lattices() {
        assert_eq!(smith_invariants(&[bi(&[2, 0]), bi(&[0, 3])], 2), (0, vec![BigInt::from(6)]));
        assert_eq!(smith_invariants(&[bi(&[2, 4, 0])], 3), (2, vec![BigInt::from(2)]));
        assert_eq!(smith_invariants(&[], 2), (2, vec![]));
        assert_eq!(smith_invariants(&[bi(&[1, 1])], 2), (1, vec![]));
    }
}
