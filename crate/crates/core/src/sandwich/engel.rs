//! Reduced words in the free product of a group of order two `⟨a⟩` with an
//! infinite cyclic group `⟨x⟩`.

use std::fmt;
use std::time::Instant;

use serde_json::json;

use super::certificate::{Certificate, Status};
use super::SandwichError;

pub const ENGEL_BOUND: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Syllable {
    A,
    /// `x^k` with `k ≠ 0`.
    X(i64),
}

/// Alternating normal form: no two adjacent syllables of the same factor,
/// no zero powers of `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeProductWord(Vec<Syllable>);

impl FreeProductWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn a() -> Self {
        FreeProductWord(vec![Syllable::A])
    }

    pub fn x() -> Self {
        FreeProductWord(vec![Syllable::X(1)])
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    fn push(&mut self, s: Syllable) {
        match (self.0.last().copied(), s) {
            (Some(Syllable::A), Syllable::A) => {
                self.0.pop();
            }
            (Some(Syllable::X(k)), Syllable::X(l)) => {
                self.0.pop();
                if k + l != 0 {
                    self.0.push(Syllable::X(k + l));
                }
            }
            (_, Syllable::X(0)) => {}
            _ => self.0.push(s),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &s in &other.0 {
            out.push(s);
        }
        out
    }

    pub fn inverse(&self) -> Self {
        let mut out = Self::identity();
        for &s in self.0.iter().rev() {
            out.push(match s {
                Syllable::A => Syllable::A,
                Syllable::X(k) => Syllable::X(-k),
            });
        }
        out
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(Self::identity(), |acc, _| acc.mul(&base))
    }

    /// `[u, v] = u⁻¹ v⁻¹ u v`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }
}

impl fmt::Display for FreeProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for s in &self.0 {
            match s {
                Syllable::A => f.write_str("a")?,
                Syllable::X(1) => f.write_str("x")?,
                Syllable::X(k) => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Checks `[x, a, …, a] = [x, a]^((-2)^n)` with `n + 1` copies of `a`.
pub fn engel_power_identity(n: usize) -> Result<Certificate, SandwichError> {
    if n > ENGEL_BOUND {
        return Err(SandwichError::EngelBound { n, limit: ENGEL_BOUND });
    }
    let start = Instant::now();
    let (x, a) = (FreeProductWord::x(), FreeProductWord::a());
    let base = x.commutator(&a);
    let lhs = (0..n).fold(base.clone(), |acc, _| acc.commutator(&a));
    let exponent = (-2i64).pow(n as u32);
    let rhs = base.pow(exponent);
    let status = if lhs == rhs { Status::Verified } else { Status::Refuted };
    let mut cert = Certificate::new(
        "engel-power",
        "In the free product of a group of order two ⟨a⟩ and an infinite cyclic group ⟨x⟩, \
         the (n+1)-fold commutator [x, a, …, a] equals [x, a]^((-2)^n).",
    );
    cert.param("n", json!(n));
    cert.status = status;
    cert.witness("exponent", json!(exponent));
    cert.witness("lhs_length", json!(lhs.syllables().len()));
    cert.witness("rhs_length", json!(rhs.syllables().len()));
    if n <= 2 {
        cert.witness("lhs", json!(lhs.to_string()));
    }
    cert.finish(start);
    Ok(cert)
}
