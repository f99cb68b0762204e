//! Standard words: the order on words, standardness, standard bracketing
//! and the search for long words avoiding `cc`, `c·x·c` and `x·c·x`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hall_lie::GeneratorId;
use crate::nilgroup::{GroupElement, GroupError};

#[derive(Debug, Error)]
pub enum WordsError {
    #[error("words are nonempty")]
    Empty,
    #[error("bad letter {0:?}: letters are the digits 1-9")]
    BadLetter(char),
    #[error("{0} is not standard")]
    NotStandard(Word),
    #[error("{0} has no standard decomposition (length 1)")]
    TooShort(Word),
    #[error("no element assigned to x{0}")]
    MissingAssignment(usize),
    #[error("assigned elements live in different presentations")]
    Mismatch,
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A nonempty word in `x1, …, xr`, stored as letter indices starting at 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self, WordsError> {
        if letters.is_empty() {
            return Err(WordsError::Empty);
        }
        if let Some(&l) = letters.iter().find(|&&l| l == 0) {
            return Err(WordsError::BadLetter(char::from(b'0' + l)));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rotation starting at position `t` (0-based).
    pub fn rotation(&self, t: usize) -> Word {
        let mut v = self.0[t..].to_vec();
        v.extend_from_slice(&self.0[..t]);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }
}

impl FromStr for Word {
    type Err = WordsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '1'..='9' => Ok(ch as u8 - b'0'),
                _ => Err(WordsError::BadLetter(ch)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Word::new(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            if l <= 9 {
                write!(f, "{l}")?;
            } else {
                write!(f, "({l})")?;
            }
        }
        Ok(())
    }
}

/// Lexicographic on the first difference; a proper prefix is *larger*
/// than the word it starts.
pub fn compare_letters(u: &[u8], v: &[u8]) -> Ordering {
    for (a, b) in u.iter().zip(v) {
        match a.cmp(b) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    v.len().cmp(&u.len())
}

pub fn compare(u: &Word, v: &Word) -> Ordering {
    compare_letters(&u.0, &v.0)
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn standard_letters(w: &[u8]) -> bool {
    let n = w.len();
    let mut rot = Vec::with_capacity(n);
    (1..n).all(|t| {
        rot.clear();
        rot.extend_from_slice(&w[t..]);
        rot.extend_from_slice(&w[..t]);
        compare_letters(&rot, w) == Ordering::Less
    })
}

/// Every proper rotation is strictly smaller.
pub fn is_standard(w: &Word) -> bool {
    standard_letters(&w.0)
}

/// The split `c = ab` into standard words with `a > b` and `a` largest.
pub fn standard_decomposition(c: &Word) -> Result<(Word, Word), WordsError> {
    if !is_standard(c) {
        return Err(WordsError::NotStandard(c.clone()));
    }
    if c.len() < 2 {
        return Err(WordsError::TooShort(c.clone()));
    }
    (1..c.len())
        .map(|k| (c.slice(0, k), c.slice(k, c.len())))
        .filter(|(a, b)| is_standard(a) && is_standard(b) && a > b)
        .max_by(|x, y| x.0.cmp(&y.0))
        .ok_or_else(|| WordsError::NotStandard(c.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CommutatorTree {
    Leaf(GeneratorId),
    Pair(Box<CommutatorTree>, Box<CommutatorTree>),
}

impl CommutatorTree {
    pub fn leaf(letter: u8) -> Self {
        CommutatorTree::Leaf(GeneratorId(letter as usize))
    }

    pub fn pair(l: CommutatorTree, r: CommutatorTree) -> Self {
        CommutatorTree::Pair(Box::new(l), Box::new(r))
    }

    pub fn leaves(&self) -> Vec<u8> {
        match self {
            CommutatorTree::Leaf(g) => vec![g.0 as u8],
            CommutatorTree::Pair(l, r) => {
                let mut v = l.leaves();
                v.extend(r.leaves());
                v
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            CommutatorTree::Leaf(_) => 0,
            CommutatorTree::Pair(l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

impl fmt::Display for CommutatorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommutatorTree::Leaf(g) => write!(f, "x{}", g.0),
            CommutatorTree::Pair(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

/// `[c] = [[a],[b]]` along standard decompositions.
pub fn bracketing(c: &Word) -> Result<CommutatorTree, WordsError> {
    if !is_standard(c) {
        return Err(WordsError::NotStandard(c.clone()));
    }
    if c.len() == 1 {
        return Ok(CommutatorTree::leaf(c.0[0]));
    }
    let (a, b) = standard_decomposition(c)?;
    Ok(CommutatorTree::pair(bracketing(&a)?, bracketing(&b)?))
}

/// Left-normed comb `[x_{i1}, …, x_{in}]`.
pub fn com(c: &Word) -> CommutatorTree {
    let mut t = CommutatorTree::leaf(c.0[0]);
    for &l in &c.0[1..] {
        t = CommutatorTree::pair(t, CommutatorTree::leaf(l));
    }
    t
}

/// Evaluates a tree with `assignment[i - 1]` substituted for `x_i`.
pub fn eval_tree(t: &CommutatorTree, assignment: &[GroupElement]) -> Result<GroupElement, WordsError> {
    if let Some(first) = assignment.first() {
        if assignment.iter().any(|g| g.presentation() != first.presentation()) {
            return Err(WordsError::Mismatch);
        }
    }
    fn go(t: &CommutatorTree, assignment: &[GroupElement]) -> Result<GroupElement, WordsError> {
        match t {
            CommutatorTree::Leaf(g) => {
                assignment.get(g.0.wrapping_sub(1)).cloned().ok_or(WordsError::MissingAssignment(g.0))
            }
            CommutatorTree::Pair(l, r) => Ok(go(l, assignment)?.commutator(&go(r, assignment)?)?),
        }
    }
    go(t, assignment)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// `c c`
    Square,
    /// `c x c`
    Split,
    /// `x c x`
    Sandwich,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Square => "cc",
            Pattern::Split => "c·x·c",
            Pattern::Sandwich => "x·c·x",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenMatch {
    /// 1-based start of the occurrence.
    pub position: usize,
    pub pattern: Pattern,
    pub c: Word,
    /// The middle or outer letter for `c·x·c` and `x·c·x`.
    pub letter: Option<u8>,
}

/// Pattern occurring at `w[s..e]`, if any.
fn match_at(w: &[u8], s: usize, e: usize) -> Option<ForbiddenMatch> {
    let len = e - s;
    let sub = &w[s..e];
    let found = |pattern, c: &[u8], letter| ForbiddenMatch { position: s + 1, pattern, c: Word(c.to_vec()), letter };
    if len % 2 == 0 {
        let (x, y) = sub.split_at(len / 2);
        if x == y && standard_letters(x) {
            return Some(found(Pattern::Square, x, None));
        }
    }
    if len >= 3 && sub[0] == sub[len - 1] && standard_letters(&sub[1..len - 1]) {
        return Some(found(Pattern::Sandwich, &sub[1..len - 1], Some(sub[0])));
    }
    if len >= 3 && len % 2 == 1 {
        let m = len / 2;
        let (x, y) = (&sub[..m], &sub[m + 1..]);
        if x == y && standard_letters(x) {
            return Some(found(Pattern::Split, x, Some(sub[m])));
        }
    }
    None
}

/// Leftmost (then shortest) occurrence of `cc`, `c·x·c` or `x·c·x` with `c`
/// standard.
pub fn find_forbidden(w: &Word) -> Option<ForbiddenMatch> {
    let n = w.len();
    (0..n).find_map(|s| (s + 2..=n).find_map(|e| match_at(&w.0, s, e)))
}

/// Whether some forbidden occurrence ends at the last letter.
fn forbidden_suffix(w: &[u8]) -> bool {
    let n = w.len();
    (0..n.saturating_sub(1)).any(|s| match_at(w, s, n).is_some())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvoidanceResult {
    pub rank: usize,
    /// Longest length of a word avoiding all three patterns.
    pub bound: usize,
    pub witness: Word,
    /// True when the search finished below the length cap.
    pub exhaustive: bool,
    /// True when an independent level-by-level enumeration agreed.
    pub cross_checked: bool,
}

pub const DEFAULT_LENGTH_CAP: usize = 256;
/// Largest alphabet for which the breadth-first cross-check is run.
pub const CROSS_CHECK_RANK: usize = 4;

pub fn longest_avoiding(r: usize) -> Result<AvoidanceResult, WordsError> {
    longest_avoiding_capped(r, DEFAULT_LENGTH_CAP)
}

/// Depth-first search over avoiding words, extending by one letter and
/// testing only the occurrences that end at the new letter.
pub fn longest_avoiding_capped(r: usize, cap: usize) -> Result<AvoidanceResult, WordsError> {
    if r == 0 {
        return Err(WordsError::EmptyAlphabet);
    }
    let r = r.min(u8::MAX as usize) as u8;
    let mut best: Vec<u8> = vec![1];
    let mut hit_cap = false;
    let mut stack: Vec<u8> = Vec::new();
    fn dfs(stack: &mut Vec<u8>, r: u8, cap: usize, best: &mut Vec<u8>, hit_cap: &mut bool) {
        if stack.len() > best.len() {
            *best = stack.clone();
        }
        if stack.len() == cap {
            *hit_cap = true;
            return;
        }
        for l in 1..=r {
            stack.push(l);
            if !forbidden_suffix(stack) {
                dfs(stack, r, cap, best, hit_cap);
            }
            stack.pop();
        }
    }
    dfs(&mut stack, r, cap, &mut best, &mut hit_cap);
    let bound = best.len();
    let cross_checked = (r as usize) <= CROSS_CHECK_RANK && !hit_cap && breadth_first_bound(r as usize, bound + 1) == bound;
    Ok(AvoidanceResult { rank: r as usize, bound, witness: Word(best), exhaustive: !hit_cap, cross_checked })
}

/// Length of the longest avoiding word found by extending every avoiding
/// word level by level, each candidate checked with a full scan. Stops at
/// `limit`.
pub fn breadth_first_bound(r: usize, limit: usize) -> usize {
    let mut level: HashSet<Vec<u8>> = (1..=r as u8).map(|l| vec![l]).collect();
    let mut len = 1;
    while len < limit {
        let mut next = HashSet::new();
        for w in &level {
            for l in 1..=r as u8 {
                let mut v = w.clone();
                v.push(l);
                if find_forbidden(&Word(v.clone())).is_none() {
                    next.insert(v);
                }
            }
        }
        if next.is_empty() {
            return len;
        }
        level = next;
        len += 1;
    }
    len
}

/// All words of length `n` over `r` letters.
pub fn all_words(r: usize, n: usize) -> impl Iterator<Item = Word> {
    let total = (r as u64).pow(n as u32);
    (0..total).map(move |mut k| {
        let mut v = vec![0u8; n];
        for slot in v.iter_mut().rev() {
            *slot = (k % r as u64) as u8 + 1;
            k /= r as u64;
        }
        Word(v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nilgroup::free_nilpotent;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(compare(&w("12"), &w("21")), Ordering::Less);
        assert_eq!(compare(&w("12"), &w("1")), Ordering::Less);
        assert_eq!(compare(&w("121"), &w("121")), Ordering::Equal);
        assert!(w("211") < w("21"));
    }

    #[test]
    fn order_is_total_on_short_words() {
        let words: Vec<Word> = (1..=4).flat_map(|n| all_words(2, n)).collect();
        for u in &words {
            for v in &words {
                assert_eq!(compare(u, v), compare(v, u).reverse());
                assert_eq!(compare(u, v) == Ordering::Equal, u == v);
                for x in &words {
                    if u < v && v < x {
                        assert!(u < x);
                    }
                }
            }
        }
    }

    #[test]
    fn standardness() {
        assert!(is_standard(&w("1")));
        assert!(is_standard(&w("21")));
        assert!(!is_standard(&w("12")));
        assert!(!is_standard(&w("2121")));
        assert!(is_standard(&w("211")));
    }

    #[test]
    fn decompositions() {
        assert_eq!(standard_decomposition(&w("21")).unwrap(), (w("2"), w("1")));
        assert_eq!(standard_decomposition(&w("211")).unwrap(), (w("21"), w("1")));
        assert!(matches!(standard_decomposition(&w("12")), Err(WordsError::NotStandard(_))));
        assert!(matches!(standard_decomposition(&w("2")), Err(WordsError::TooShort(_))));
    }

    #[test]
    fn standard_words_split_and_bracket() {
        for n in 2..=6 {
            for c in all_words(2, n).filter(is_standard) {
                let (a, b) = standard_decomposition(&c).unwrap();
                assert!(is_standard(&a) && is_standard(&b) && a > b);
                assert_eq!(a.concat(&b), c);
                assert_eq!(bracketing(&c).unwrap().leaves(), c.letters());
            }
        }
    }

    #[test]
    fn standard_words_are_not_rotations_of_each_other() {
        for n in 1..=6 {
            let std: Vec<Word> = all_words(2, n).filter(is_standard).collect();
            for c in &std {
                for t in 1..n {
                    let rot = c.rotation(t);
                    assert!(rot == *c || !std.contains(&rot));
                    assert_ne!(rot, *c);
                }
            }
        }
    }

    #[test]
    fn trees() {
        assert_eq!(bracketing(&w("211")).unwrap().to_string(), "[[x2,x1],x1]");
        assert_eq!(com(&w("123")).to_string(), "[[x1,x2],x3]");
        assert!(bracketing(&w("12")).is_err());
    }

    #[test]
    fn forbidden_patterns() {
        let m = find_forbidden(&w("11")).unwrap();
        assert_eq!((m.position, m.pattern, m.c.clone()), (1, Pattern::Square, w("1")));
        let m = find_forbidden(&w("121")).unwrap();
        assert_eq!((m.pattern, m.c.clone(), m.letter), (Pattern::Sandwich, w("2"), Some(1)));
        assert!(find_forbidden(&w("12")).is_none());
        let m = find_forbidden(&w("2122")).unwrap();
        assert_eq!(m.position, 1);
    }

    #[test]
    fn avoidance_bounds() {
        let one = longest_avoiding(1).unwrap();
        assert_eq!((one.bound, one.exhaustive), (1, true));
        let two = longest_avoiding(2).unwrap();
        assert!(two.exhaustive && two.cross_checked);
        assert!(find_forbidden(&two.witness).is_none());
        assert!(all_words(2, two.bound + 1).all(|u| find_forbidden(&u).is_some()));
    }

    #[test]
    fn evaluation() {
        let p = free_nilpotent(3, 3).unwrap();
        let gens: Vec<GroupElement> = (1..=3).map(|i| GroupElement::generator(&p, i).unwrap()).collect();
        assert_eq!(eval_tree(&CommutatorTree::leaf(1), &gens).unwrap(), gens[0]);
        let same = vec![gens[0].clone(); 2];
        assert!(eval_tree(&bracketing(&w("211")).unwrap(), &same).unwrap().is_identity());
        let c = w("321");
        let br = eval_tree(&bracketing(&c).unwrap(), &gens).unwrap();
        let cm = eval_tree(&com(&c), &gens).unwrap();
        assert!(!br.is_identity() && !cm.is_identity());
        assert!(matches!(eval_tree(&CommutatorTree::leaf(4), &gens), Err(WordsError::MissingAssignment(4))));
    }
}
