use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

/// 1-based index of a free generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId(pub usize);

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A bracketed basic commutator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HallWord {
    Leaf(GeneratorId),
    Pair(Box<HallWord>, Box<HallWord>),
}

impl HallWord {
    pub fn weight(&self) -> usize {
        match self {
            HallWord::Leaf(_) => 1,
            HallWord::Pair(l, r) => l.weight() + r.weight(),
        }
    }

    /// Generator indices read left to right.
    pub fn leaves(&self) -> Vec<GeneratorId> {
        match self {
            HallWord::Leaf(g) => vec![*g],
            HallWord::Pair(l, r) => {
                let mut v = l.leaves();
                v.extend(r.leaves());
                v
            }
        }
    }
}

impl fmt::Display for HallWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HallWord::Leaf(g) => write!(f, "{g}"),
            HallWord::Pair(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(GeneratorId),
    /// Indices of the left and right factors.
    Pair(usize, usize),
}

/// Sparse integer vector over basis indices, sorted by index.
pub type Sparse = Vec<(usize, i64)>;

/// Hall basis of the free Lie ring of rank `r`, truncated at weight `cap`.
///
/// Elements are stored in one flat table sorted by weight; within a weight
/// they appear in generation order. The table index is the total order used
/// by the Hall condition: `[u,v]` is basic iff `u > v` and, when
/// `u = [u1,u2]`, `u2 <= v`.
pub struct HallBasis {
    rank: usize,
    cap: usize,
    nodes: Vec<Node>,
    weights: Vec<usize>,
    /// `layer_start[w]` is the first index of weight `w` (1-based weights).
    layer_start: Vec<usize>,
    index: HashMap<(usize, usize), usize>,
    memo: RwLock<HashMap<(usize, usize), Arc<Sparse>>>,
}

impl fmt::Debug for HallBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HallBasis")
            .field("rank", &self.rank)
            .field("cap", &self.cap)
            .field("len", &self.nodes.len())
            .finish()
    }
}

impl HallBasis {
    pub fn new(rank: usize, cap: usize) -> Self {
        assert!(rank >= 1 && cap >= 1, "rank and degree cap must be positive");
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut layer_start = vec![0, 0];
        let mut index = HashMap::new();
        for g in 1..=rank {
            nodes.push(Node::Leaf(GeneratorId(g)));
            weights.push(1);
        }
        for w in 2..=cap {
            layer_start.push(nodes.len());
            let end = nodes.len();
            for u in 0..end {
                let wu = weights[u];
                if wu >= w {
                    continue;
                }
                let wv = w - wu;
                let (vs, ve) = (layer_start[wv], if wv + 1 < layer_start.len() { layer_start[wv + 1] } else { end });
                for v in vs..ve {
                    if u <= v {
                        continue;
                    }
                    if let Node::Pair(_, u2) = nodes[u] {
                        if u2 > v {
                            continue;
                        }
                    }
                    index.insert((u, v), nodes.len());
                    nodes.push(Node::Pair(u, v));
                    weights.push(w);
                }
            }
        }
        layer_start.push(nodes.len());
        HallBasis { rank, cap, nodes, weights, layer_start, index, memo: RwLock::new(HashMap::new()) }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> Node {
        self.nodes[i]
    }

    pub fn weight(&self, i: usize) -> usize {
        self.weights[i]
    }

    /// Index range of the weight-`w` layer.
    pub fn layer(&self, w: usize) -> std::ops::Range<usize> {
        assert!((1..=self.cap).contains(&w));
        self.layer_start[w]..self.layer_start[w + 1]
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        (1..=self.cap).map(|w| self.layer(w).len()).collect()
    }

    pub fn pair_index(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u, v)).copied()
    }

    pub fn word(&self, i: usize) -> HallWord {
        match self.nodes[i] {
            Node::Leaf(g) => HallWord::Leaf(g),
            Node::Pair(u, v) => HallWord::Pair(Box::new(self.word(u)), Box::new(self.word(v))),
        }
    }

    /// Basis elements grouped by weight.
    pub fn words_by_weight(&self) -> Vec<Vec<HallWord>> {
        (1..=self.cap).map(|w| self.layer(w).map(|i| self.word(i)).collect()).collect()
    }

    /// Hall-basis expansion of the bracket of two basis elements; empty when
    /// the weight exceeds the cap.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Arc<Sparse> {
        if self.weights[i] + self.weights[j] > self.cap || i == j {
            return Arc::new(Vec::new());
        }
        if let Some(hit) = self.memo.read().unwrap().get(&(i, j)) {
            return hit.clone();
        }
        let value = Arc::new(self.compute_bracket(i, j));
        self.memo.write().unwrap().entry((i, j)).or_insert(value).clone()
    }

    fn compute_bracket(&self, i: usize, j: usize) -> Sparse {
        if i < j {
            return self.bracket_basis(j, i).iter().map(|&(k, c)| (k, -c)).collect();
        }
        if let Some(k) = self.pair_index(i, j) {
            return vec![(k, 1)];
        }
        let Node::Pair(i1, i2) = self.nodes[i] else {
            unreachable!("a leaf above a smaller element always forms a basic pair")
        };
        // [[i1,i2],j] = [[i1,j],i2] + [i1,[i2,j]]
        let mut acc = Accumulator::default();
        for &(k, c) in self.bracket_basis(i1, j).iter() {
            acc.add_scaled(&self.bracket_basis(k, i2), c);
        }
        for &(k, c) in self.bracket_basis(i2, j).iter() {
            acc.add_scaled(&self.bracket_basis(i1, k), c);
        }
        acc.finish()
    }

    /// Bracket of two integer combinations of basis elements.
    pub fn bracket_sparse(&self, x: &[(usize, i64)], y: &[(usize, i64)]) -> Sparse {
        let mut acc = Accumulator::default();
        for &(i, a) in x {
            for &(j, b) in y {
                acc.add_scaled(&self.bracket_basis(i, j), a * b);
            }
        }
        acc.finish()
    }
}

#[derive(Default)]
pub(crate) struct Accumulator(HashMap<usize, i64>);

impl Accumulator {
    pub(crate) fn add_scaled(&mut self, v: &[(usize, i64)], c: i64) {
        if c == 0 {
            return;
        }
        for &(k, x) in v {
            *self.0.entry(k).or_insert(0) += c * x;
        }
    }

    pub(crate) fn finish(self) -> Sparse {
        let mut out: Sparse = self.0.into_iter().filter(|&(_, c)| c != 0).collect();
        out.sort_unstable();
        out
    }
}

/// Number of weight-`w` basis elements of the free Lie ring of rank `r`.
pub fn witt_dimension(r: usize, w: usize) -> usize {
    fn mobius(mut n: usize) -> i64 {
        let mut m = 1;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    }
    let total: i64 = (1..=w)
        .filter(|d| w % d == 0)
        .map(|d| mobius(d) * (r as i64).pow((w / d) as u32))
        .sum();
    (total / w as i64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_layer_sizes() {
        assert_eq!(HallBasis::new(1, 3).layer_sizes(), vec![1, 0, 0]);
        assert_eq!(HallBasis::new(2, 3).layer_sizes(), vec![2, 1, 2]);
        assert_eq!(HallBasis::new(3, 2).layer_sizes(), vec![3, 3]);
    }

    #[test]
    fn weight_two_is_ordered_pair() {
        let b = HallBasis::new(2, 2);
        // x2 > x1 so [x2,x1] is basic and [x1,x2] = -[x2,x1]
        let k = b.pair_index(1, 0).unwrap();
        assert_eq!(b.word(k).to_string(), "[x2,x1]");
        assert_eq!(*b.bracket_basis(0, 1), vec![(k, -1)]);
        assert!(b.bracket_basis(0, 0).is_empty());
    }

    #[test]
    fn truncation_drops_heavy_products() {
        let b = HallBasis::new(2, 2);
        let k = b.pair_index(1, 0).unwrap();
        assert!(b.bracket_basis(k, 0).is_empty());
    }
}
