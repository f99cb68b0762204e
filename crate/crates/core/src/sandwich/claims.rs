//! Certificate builders for the individual claims and a small job runner.

use std::collections::HashSet;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::certificate::{Certificate, Status};
use super::engel::{engel_power_identity, ENGEL_BOUND};
use super::{escalate, InstantiationBall, RadiusStep, RelatorMode, SandwichError, SandwichFamily, SandwichKind};
use crate::lie_examples::{build_gf2_example, nonnilpotence_witness, odd_char_check};
use crate::nilgroup::{
    free_nilpotent, left_normed_commutator, normal_form, ClassBound, Exp, GroupElement, QuotientPresentation,
};
use crate::words::{longest_avoiding, AvoidanceResult};

pub const NILPOTENT_IMAGE_CAVEAT: &str =
    "every nilpotent image of the universal partial-strong-sandwich group of rank 4 has class ≤ 5";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierConfig {
    /// Class cap of the ambient free nilpotent groups.
    pub class_cap: usize,
    /// Largest conjugator radius tried during escalation.
    pub max_radius: usize,
    /// Conjugator radius for the closure checks.
    pub closure_radius: usize,
    pub mode: RelatorMode,
    /// Wall-clock budget for one escalation; checked between radii.
    pub budget: Option<Duration>,
    /// Degree cap of the GF(2) Lie example.
    pub lie_degree: usize,
    /// Largest `n` of the Engel power identity.
    pub engel_max: usize,
    /// Alphabet sizes for the avoidance bound.
    pub word_ranks: Vec<usize>,
    pub seed: u64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            class_cap: 6,
            max_radius: 3,
            closure_radius: 2,
            mode: RelatorMode::Full,
            budget: Some(Duration::from_secs(2 * 3600)),
            lie_degree: 12,
            engel_max: ENGEL_BOUND,
            word_ranks: vec![1, 2, 3, 4],
            seed: 0x5eed,
        }
    }
}

/// Every claim id, in report order, with a plain statement of the claim.
pub const CLAIMS: &[(&str, &str)] = &[
    (
        "gf2-example",
        "The three-generator sandwich Lie algebra over GF(2) with bc = 0 and Id(c) abelian has layer dimensions \
         3,2,1,1,… and the elements c(ab)^n are nonzero, so it is not nilpotent.",
    ),
    (
        "odd-characteristic",
        "In the free Lie algebra on a,x,y, the element axya lies in the ideal generated by the elements a·h·a \
         exactly when the characteristic is odd.",
    ),
    ("rank3-sandwich-class", "The free sandwich group of rank 3 is nilpotent of class 5."),
    ("rank3-strong-class", "The free strong sandwich group of rank 3 is nilpotent of class at most 3."),
    ("rank2-sandwich-class", "Class of the free sandwich group of rank 2 (recorded value)."),
    ("rank4-partial-strong-class", "A group generated by a partial strong sandwich set of size 4 is nilpotent of class at most 5."),
    (
        "subgroup-class-four",
        "In a group generated by a partial strong sandwich set {a,b,c,d}, the subgroup ⟨a, a^b, c, d⟩ is nilpotent of class at most 4.",
    ),
    ("partial-strong-closure", "If X is a partial strong sandwich set and a,b ∈ X, then X ∪ {[a,b]} is again a partial strong sandwich set."),
    ("strong-closure", "If X is a strong sandwich set and a,b ∈ X, then X ∪ {[a,b]} is again a strong sandwich set."),
    ("commutator-identity", "In a group of class at most 3, [u,[v,w]] = [u,v,w][u,w,v]^(-1)."),
    ("engel-power", "In the free product of a group of order two ⟨a⟩ and an infinite cyclic group ⟨x⟩, [x, a, …, a] (n+1 copies of a) equals [x,a]^((-2)^n)."),
    ("avoidance-bound", "Over r letters every sufficiently long word contains a forbidden subword; the bound N(r) is computed exhaustively."),
];

fn statement(id: &str) -> &'static str {
    CLAIMS.iter().find(|(c, _)| *c == id).map(|(_, s)| *s).expect("registered claim")
}

fn new_cert(id: &str) -> Certificate {
    Certificate::new(id, statement(id))
}

fn class_json(c: ClassBound) -> Value {
    json!(c.to_string())
}

/// Total order used for the monotonicity check: a truncated class sits
/// above every exact one.
fn class_rank(c: ClassBound) -> usize {
    match c {
        ClassBound::Exact(k) => k,
        ClassBound::AtLeast(k) => k + 1,
    }
}

fn steps_json(steps: &[RadiusStep]) -> Value {
    Value::Array(steps.iter().map(|s| json!({"radius": s.radius, "class": s.class.to_string()})).collect())
}

fn exps_json(g: &GroupElement) -> Value {
    json!(g.exponents().iter().map(|e| e.to_string()).collect::<Vec<_>>())
}

fn series_json(q: &QuotientPresentation) -> Value {
    json!(q.lower_central_series().iter().map(|l| l.to_string()).collect::<Vec<_>>())
}

fn group_params(cert: &mut Certificate, rank: usize, cfg: &VerifierConfig, kind: SandwichKind) {
    cert.param("rank", json!(rank));
    cert.param("class_cap", json!(cfg.class_cap));
    cert.param("max_radius", json!(cfg.max_radius));
    cert.param("kind", json!(kind.to_string()));
    cert.param("relator_mode", json!(cfg.mode.to_string()));
}

/// Escalation with the monotonicity check and the wall-clock budget.
fn run_escalation(
    family: &SandwichFamily,
    cfg: &VerifierConfig,
    mut stop: impl FnMut(&[RadiusStep]) -> bool,
) -> Result<(Vec<RadiusStep>, QuotientPresentation, bool), SandwichError> {
    let start = Instant::now();
    let mut over_budget = false;
    let (steps, q) = escalate(family, cfg.mode, cfg.max_radius, |steps| {
        if let [.., prev, last] = steps {
            assert!(class_rank(last.class) <= class_rank(prev.class), "class grew under more relators: {steps:?}");
        }
        if stop(steps) {
            return true;
        }
        over_budget = cfg.budget.is_some_and(|b| start.elapsed() > b);
        over_budget
    })?;
    Ok((steps, q, over_budget))
}

fn stabilized(steps: &[RadiusStep]) -> Option<ClassBound> {
    match steps {
        [.., prev, last] if prev.class == last.class => Some(last.class),
        _ => None,
    }
}

fn sandwich_class_cert(id: &str, rank: usize, expected: Option<usize>, cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let pres = free_nilpotent(rank, cfg.class_cap)?;
    let family = SandwichFamily::on_generators(&pres, SandwichKind::Sandwich)?;
    let (steps, q, _) = run_escalation(&family, cfg, |s| stabilized(s).is_some())?;
    let mut cert = new_cert(id);
    group_params(&mut cert, rank, cfg, SandwichKind::Sandwich);
    cert.presentation_hash = Some(pres.content_hash());
    cert.witness("steps", steps_json(&steps));
    cert.witness("lower_central_series", series_json(&q));
    cert.status = match stabilized(&steps) {
        Some(ClassBound::Exact(k)) => {
            cert.witness("stabilized_class", json!(k));
            match expected {
                Some(e) if e != k => Status::Refuted,
                _ => Status::Verified,
            }
        }
        _ => Status::InconclusiveAtCap,
    };
    cert.finish(start);
    Ok(cert)
}

/// Class of the rank-3 sandwich quotient, escalating the radius until two
/// consecutive radii agree.
pub fn certify_rank3_sandwich_class(cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    sandwich_class_cert("rank3-sandwich-class", 3, Some(5), cfg)
}

/// The rank-2 value is recorded; the certificate only asserts that it
/// stabilized below the cap.
pub fn certify_rank2_sandwich_class(cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    sandwich_class_cert("rank2-sandwich-class", 2, None, cfg)
}

/// The strong rank-3 quotient, kept for the closure checks.
pub fn strong_rank3_quotient(cfg: &VerifierConfig) -> Result<(SandwichFamily, Vec<RadiusStep>, QuotientPresentation), SandwichError> {
    let pres = free_nilpotent(3, cfg.class_cap)?;
    let family = SandwichFamily::on_generators(&pres, SandwichKind::Strong)?;
    let (steps, q, _) = run_escalation(&family, cfg, |s| s.last().is_some_and(|l| l.class.at_most(3)))?;
    Ok((family, steps, q))
}

pub fn certify_rank3_strong_class(cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let (family, steps, q) = strong_rank3_quotient(cfg)?;
    Ok(strong_class_cert(&family, &steps, &q, cfg, start))
}

fn strong_class_cert(
    family: &SandwichFamily,
    steps: &[RadiusStep],
    q: &QuotientPresentation,
    cfg: &VerifierConfig,
    start: Instant,
) -> Certificate {
    let mut cert = new_cert("rank3-strong-class");
    group_params(&mut cert, 3, cfg, SandwichKind::Strong);
    cert.presentation_hash = Some(family.presentation().content_hash());
    cert.witness("steps", steps_json(steps));
    cert.witness("lower_central_series", series_json(q));
    cert.status = if q.class().at_most(3) { Status::Verified } else { Status::InconclusiveAtCap };
    cert.finish(start);
    cert
}

/// The rank-4 partial strong quotient: escalation stops as soon as the class
/// drops to 5. The third component is true when the budget ran out first.
pub fn partial_strong_rank4_quotient(
    cfg: &VerifierConfig,
) -> Result<(SandwichFamily, Vec<RadiusStep>, QuotientPresentation, bool), SandwichError> {
    let pres = free_nilpotent(4, cfg.class_cap)?;
    let family = SandwichFamily::on_generators(&pres, SandwichKind::PartialStrong)?;
    let (steps, q, over) = run_escalation(&family, cfg, |s| s.last().is_some_and(|l| l.class.at_most(5)))?;
    Ok((family, steps, q, over))
}

pub fn certify_partial_strong_rank4(cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let (family, steps, q, over) = partial_strong_rank4_quotient(cfg)?;
    partial_strong_class_cert(&family, &steps, &q, over, cfg, start)
}

fn partial_strong_class_cert(
    family: &SandwichFamily,
    steps: &[RadiusStep],
    q: &QuotientPresentation,
    over_budget: bool,
    cfg: &VerifierConfig,
    start: Instant,
) -> Result<Certificate, SandwichError> {
    let mut cert = new_cert("rank4-partial-strong-class");
    group_params(&mut cert, 4, cfg, SandwichKind::PartialStrong);
    cert.presentation_hash = Some(family.presentation().content_hash());
    cert.caveat = Some(NILPOTENT_IMAGE_CAVEAT.to_owned());
    cert.witness("steps", steps_json(steps));
    cert.witness("lower_central_series", series_json(q));
    let top = q.layer(cfg.class_cap);
    cert.witness("top_layer_trivial", json!(top.is_trivial()));
    let pairs = family.pairs_only();
    let n = super::sandwich_normal_subgroup(&pairs, InstantiationBall::new(1), cfg.mode, None)?;
    cert.witness("pairs_only_class_radius_1", class_json(QuotientPresentation::from_normal(n).class()));
    cert.status = if q.class().at_most(5) {
        Status::Verified
    } else {
        if over_budget {
            cert.witness("budget_exhausted", json!(true));
        }
        Status::InconclusiveAtCap
    };
    cert.finish(start);
    Ok(cert)
}

/// Subgroup classes inside the rank-4 partial strong quotient. `None` means
/// the quotient did not reach class 5 and nothing can be concluded.
pub fn certify_subgroup_class_four(
    family: &SandwichFamily,
    q: Option<&QuotientPresentation>,
    cfg: &VerifierConfig,
) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let mut cert = new_cert("subgroup-class-four");
    group_params(&mut cert, family.labels().len(), cfg, family.kind());
    cert.presentation_hash = Some(family.presentation().content_hash());
    cert.caveat = Some(NILPOTENT_IMAGE_CAVEAT.to_owned());
    let Some(q) = q else {
        cert.status = Status::InconclusiveAtCap;
        cert.finish(start);
        return Ok(cert);
    };
    let [a, b, c, d] = match family.labels() {
        [a, b, c, d] => [a, b, c, d],
        _ => return Err(SandwichError::TooFewLabels(family.labels().len())),
    };
    let main = q.subgroup_class(&[a.clone(), a.conjugate(b)?, c.clone(), d.clone()])?;
    let degenerate = q.subgroup_class(&[a.clone(), a.clone(), c.clone(), d.clone()])?;
    let single = q.subgroup_class(std::slice::from_ref(a))?;
    cert.witness("class_a_ab_c_d", class_json(main));
    cert.witness("class_a_a_c_d", class_json(degenerate));
    cert.witness("class_a", class_json(single));
    let ok = main.at_most(4) && degenerate.at_most(3) && single.at_most(1);
    let exact = [main, degenerate, single].iter().all(|c| matches!(c, ClassBound::Exact(_)));
    cert.status = match (ok, exact) {
        (true, _) => Status::Verified,
        (false, true) => Status::Refuted,
        (false, false) => Status::InconclusiveAtCap,
    };
    cert.finish(start);
    Ok(cert)
}

/// One failed closure check.
#[derive(Clone, Debug)]
pub struct ClosureFailure {
    pub generators: Vec<GroupElement>,
    pub bound: usize,
    pub class: ClassBound,
}

/// Result of checking that `X ∪ {[a,b]}` satisfies the family's conditions
/// inside `q`, with conjugators from the ball of the given radius.
#[derive(Clone, Debug)]
pub struct ClosureReport {
    pub subgroups_checked: usize,
    pub failure: Option<ClosureFailure>,
}

pub fn check_closure(
    family: &SandwichFamily,
    q: &QuotientPresentation,
    pair: (usize, usize),
    radius: usize,
) -> Result<ClosureReport, SandwichError> {
    let labels = family.labels();
    let t = labels[pair.0].commutator(&labels[pair.1])?;
    let ball = InstantiationBall::new(radius).elements(family)?;
    let strong = family.kind() == SandwichKind::Strong;
    let conj = |x: &GroupElement| ball.iter().map(|g| x.conjugate(g)).collect::<Result<Vec<_>, _>>();
    let t_conj = conj(&t)?;
    let label_conj: Vec<Vec<GroupElement>> = labels.iter().map(conj).collect::<Result<_, _>>()?;

    let mut seen = HashSet::new();
    let mut checked = 0;
    let mut check = |gens: Vec<GroupElement>, bound: usize| -> Result<Option<ClosureFailure>, SandwichError> {
        let mut key: Vec<Vec<Exp>> =
            gens.iter().map(|g| q.image(g).map(|x| x.exponents().to_vec())).collect::<Result<_, _>>()?;
        key.sort();
        key.dedup();
        if !seen.insert(key) {
            return Ok(None);
        }
        checked += 1;
        let class = q.subgroup_class(&gens)?;
        Ok((!class.at_most(bound)).then_some(ClosureFailure { generators: gens, bound, class }))
    };

    macro_rules! try_check {
        ($gens:expr, $bound:expr) => {
            if let Some(f) = check($gens, $bound)? {
                return Ok(ClosureReport { subgroups_checked: checked, failure: Some(f) });
            }
        };
    }

    let k = labels.len();
    for c in 0..k {
        for g in 0..ball.len() {
            try_check!(vec![t.clone(), label_conj[c][g].clone()], 2);
            try_check!(vec![labels[c].clone(), t_conj[g].clone()], 2);
        }
    }
    for c in 0..k {
        for d in 0..k {
            if c == d && !strong {
                continue;
            }
            for f in 0..ball.len() {
                for g in 0..ball.len() {
                    try_check!(vec![t.clone(), label_conj[c][f].clone(), label_conj[d][g].clone()], 3);
                    try_check!(vec![labels[c].clone(), t_conj[f].clone(), label_conj[d][g].clone()], 3);
                }
            }
        }
    }
    if strong {
        for f in 0..ball.len() {
            try_check!(vec![t.clone(), t_conj[f].clone()], 2);
            for g in 0..ball.len() {
                try_check!(vec![t.clone(), t_conj[f].clone(), t_conj[g].clone()], 3);
                for c in 0..k {
                    try_check!(vec![t.clone(), t_conj[f].clone(), label_conj[c][g].clone()], 3);
                    try_check!(vec![labels[c].clone(), t_conj[f].clone(), t_conj[g].clone()], 3);
                }
            }
        }
    }
    Ok(ClosureReport { subgroups_checked: checked, failure: None })
}

/// Closure checks for the pair `(a, b)`. A failure inside a finite-radius
/// quotient is not a refutation, so it is reported as inconclusive.
pub fn certify_closure(
    id: &str,
    family: &SandwichFamily,
    q: Option<&QuotientPresentation>,
    pair: (usize, usize),
    cfg: &VerifierConfig,
) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let mut cert = new_cert(id);
    group_params(&mut cert, family.labels().len(), cfg, family.kind());
    cert.param("closure_radius", json!(cfg.closure_radius));
    cert.param("pair", json!([pair.0 + 1, pair.1 + 1]));
    cert.presentation_hash = Some(family.presentation().content_hash());
    if family.kind() == SandwichKind::PartialStrong {
        cert.caveat = Some(NILPOTENT_IMAGE_CAVEAT.to_owned());
    }
    let Some(q) = q else {
        cert.status = Status::InconclusiveAtCap;
        cert.finish(start);
        return Ok(cert);
    };
    let compact = match q.class() {
        ClassBound::Exact(k) if k < q.parent().class_cap() => q.with_class_cap(k)?,
        _ => None,
    };
    let report = match &compact {
        Some(small) => {
            let labels = family.labels().iter().map(|l| small.project(l)).collect::<Result<Vec<_>, _>>()?;
            let small_family = SandwichFamily::new(small.parent(), labels, family.kind())?;
            check_closure(&small_family, small, pair, cfg.closure_radius)?
        }
        None => check_closure(family, q, pair, cfg.closure_radius)?,
    };
    cert.witness("subgroups_checked", json!(report.subgroups_checked));
    cert.status = match &report.failure {
        None => Status::Verified,
        Some(f) => {
            cert.witness("failing_generators", json!(f.generators.iter().map(exps_json).collect::<Vec<_>>()));
            cert.witness("failing_bound", json!(f.bound));
            cert.witness("failing_class", class_json(f.class));
            Status::InconclusiveAtCap
        }
    };
    cert.finish(start);
    Ok(cert)
}

fn identity_sides(u: &GroupElement, v: &GroupElement, w: &GroupElement) -> Result<(GroupElement, GroupElement), SandwichError> {
    let lhs = u.commutator(&v.commutator(w)?)?;
    let uvw = left_normed_commutator(&[u.clone(), v.clone(), w.clone()])?;
    let uwv = left_normed_commutator(&[u.clone(), w.clone(), v.clone()])?;
    Ok((lhs, uvw.mul(&uwv.inverse()?)?))
}

fn random_element(pres: &Arc<crate::nilgroup::PcPresentation>, rng: &mut ChaCha8Rng) -> Result<GroupElement, SandwichError> {
    let len = rng.gen_range(1..=8);
    let r = pres.rank() as i64;
    let word: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=r) * if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    Ok(normal_form(pres, &word)?)
}

/// `[u,[v,w]] = [u,v,w][u,w,v]⁻¹` on the generators and 100 random triples
/// of the free nilpotent group of rank 3 and class 3, with a class-4 triple
/// where it fails.
pub fn certify_commutator_identity(cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    const RANDOM_TRIPLES: usize = 100;
    let start = Instant::now();
    let pres = free_nilpotent(3, 3)?;
    let gens: Vec<GroupElement> = (1..=3).map(|i| GroupElement::generator(&pres, i)).collect::<Result<_, _>>()?;
    let mut holds = true;
    for u in &gens {
        for v in &gens {
            for w in &gens {
                let (l, r) = identity_sides(u, v, w)?;
                holds &= l == r;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..RANDOM_TRIPLES {
        let (u, v, w) = (random_element(&pres, &mut rng)?, random_element(&pres, &mut rng)?, random_element(&pres, &mut rng)?);
        let (l, r) = identity_sides(&u, &v, &w)?;
        holds &= l == r;
    }
    let mut cert = new_cert("commutator-identity");
    cert.param("rank", json!(3));
    cert.param("class", json!(3));
    cert.param("random_triples", json!(RANDOM_TRIPLES));
    cert.param("seed", json!(cfg.seed));
    cert.presentation_hash = Some(pres.content_hash());

    let wider = free_nilpotent(3, 4)?;
    let mut witness = None;
    for _ in 0..1000 {
        let triple = [random_element(&wider, &mut rng)?, random_element(&wider, &mut rng)?, random_element(&wider, &mut rng)?];
        let (l, r) = identity_sides(&triple[0], &triple[1], &triple[2])?;
        if l != r {
            witness = Some((triple, l, r));
            break;
        }
    }
    if let Some((triple, l, r)) = &witness {
        cert.witness(
            "class4_counter_witness",
            json!({
                "class_cap": 4,
                "u": exps_json(&triple[0]),
                "v": exps_json(&triple[1]),
                "w": exps_json(&triple[2]),
                "lhs": exps_json(l),
                "rhs": exps_json(r),
            }),
        );
    }
    cert.status = if holds { Status::Verified } else { Status::Refuted };
    cert.finish(start);
    Ok(cert)
}

pub fn certify_engel_power(cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let mut cert = new_cert("engel-power");
    cert.param("n_max", json!(cfg.engel_max));
    let mut exps = Vec::new();
    let mut ok = true;
    for n in 0..=cfg.engel_max {
        let c = engel_power_identity(n)?;
        ok &= c.is_verified();
        exps.push(c.witnesses["exponent"].clone());
    }
    cert.witness("exponents", Value::Array(exps));
    cert.status = if ok { Status::Verified } else { Status::Refuted };
    cert.finish(start);
    Ok(cert)
}

pub fn certify_gf2_example(cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let cap = cfg.lie_degree;
    let ex = build_gf2_example(cap)?;
    let dims = ex.dims();
    let relations_vanish = ex.defining_relations().iter().all(|(_, v)| v.is_zero());
    let max_n = (cap - 1) / 2;
    let mut nonzero = Vec::new();
    for n in 0..=max_n {
        nonzero.push(nonnilpotence_witness(&ex, n)?.1);
    }
    let mut cert = new_cert("gf2-example");
    cert.param("degree_cap", json!(cap));
    cert.param("prime", json!(2));
    cert.witness("dims", json!(dims));
    cert.witness("relations_vanish", json!(relations_vanish));
    cert.witness("witness_nonzero", json!(nonzero));
    let mut expected = vec![3, 2];
    expected.resize(cap, 1);
    expected.truncate(cap);
    let ok = dims == expected && relations_vanish && nonzero.iter().all(|&b| b);
    cert.status = if ok { Status::Verified } else { Status::Refuted };
    cert.finish(start);
    Ok(cert)
}

pub fn certify_odd_characteristic(_cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let mut cert = new_cert("odd-characteristic");
    let primes = [2u64, 3, 5, 7];
    let mut ok = true;
    for p in primes {
        let member = odd_char_check(p)?;
        cert.witness(&format!("p{p}"), json!(member));
        ok &= member == (p % 2 == 1);
    }
    cert.param("primes", json!(primes));
    cert.status = if ok { Status::Verified } else { Status::Refuted };
    cert.finish(start);
    Ok(cert)
}

pub fn certify_avoidance_bound(cfg: &VerifierConfig) -> Result<Certificate, SandwichError> {
    let start = Instant::now();
    let mut cert = new_cert("avoidance-bound");
    cert.param("ranks", json!(cfg.word_ranks));
    let mut ok = true;
    for &r in &cfg.word_ranks {
        let AvoidanceResult { bound, witness, cross_checked, .. } = longest_avoiding(r)?;
        cert.witness(&format!("r{r}"), json!({"bound": bound, "witness": witness.to_string(), "cross_checked": cross_checked}));
        ok &= cross_checked && (r != 1 || bound == 1);
    }
    cert.status = if ok { Status::Verified } else { Status::Refuted };
    cert.finish(start);
    Ok(cert)
}

/// Certifies the given claims (all of them when `ids` is empty), running up
/// to `jobs` independent groups concurrently. Claims sharing a quotient run
/// in the same group. Output follows registry order.
pub fn certify_claims(ids: &[&str], cfg: &VerifierConfig, jobs: usize) -> Result<Vec<Certificate>, SandwichError> {
    for id in ids {
        if !CLAIMS.iter().any(|(c, _)| c == id) {
            return Err(SandwichError::UnknownClaim((*id).to_owned()));
        }
    }
    let wanted = |id: &str| ids.is_empty() || ids.contains(&id);
    type Group = Vec<&'static str>;
    let groups: Vec<Group> = vec![
        vec!["rank4-partial-strong-class", "subgroup-class-four", "partial-strong-closure"],
        vec!["rank3-strong-class", "strong-closure"],
        vec!["rank3-sandwich-class"],
        vec!["rank2-sandwich-class"],
        vec!["gf2-example"],
        vec!["avoidance-bound"],
        vec!["odd-characteristic"],
        vec!["commutator-identity"],
        vec!["engel-power"],
    ]
    .into_iter()
    .map(|g| g.into_iter().filter(|id| wanted(id)).collect::<Group>())
    .filter(|g| !g.is_empty())
    .collect();

    let queue = Mutex::new(groups.into_iter());
    let results: Mutex<Vec<Result<Certificate, SandwichError>>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1) {
            s.spawn(|| loop {
                let Some(group) = queue.lock().expect("queue lock").next() else { break };
                let out = run_group(&group, cfg);
                results.lock().expect("results lock").extend(out);
            });
        }
    });
    let mut certs = results.into_inner().expect("results lock").into_iter().collect::<Result<Vec<_>, _>>()?;
    let order = |id: &str| CLAIMS.iter().position(|(c, _)| *c == id).unwrap_or(usize::MAX);
    certs.sort_by_key(|c| order(&c.claim_id));
    Ok(certs)
}

fn run_group(group: &[&str], cfg: &VerifierConfig) -> Vec<Result<Certificate, SandwichError>> {
    let wants = |id: &str| group.contains(&id);
    match group[0] {
        "rank4-partial-strong-class" | "subgroup-class-four" | "partial-strong-closure" => {
            let start = Instant::now();
            let (family, steps, q, over) = match partial_strong_rank4_quotient(cfg) {
                Ok(x) => x,
                Err(e) => return vec![Err(e)],
            };
            let reached = q.class().at_most(5).then_some(&q);
            let mut out = Vec::new();
            if wants("rank4-partial-strong-class") {
                out.push(partial_strong_class_cert(&family, &steps, &q, over, cfg, start));
            }
            if wants("subgroup-class-four") {
                out.push(certify_subgroup_class_four(&family, reached, cfg));
            }
            if wants("partial-strong-closure") {
                out.push(certify_closure("partial-strong-closure", &family, reached, (0, 1), cfg));
            }
            out
        }
        "rank3-strong-class" | "strong-closure" => {
            let start = Instant::now();
            let (family, steps, q) = match strong_rank3_quotient(cfg) {
                Ok(x) => x,
                Err(e) => return vec![Err(e)],
            };
            let mut out = Vec::new();
            if wants("rank3-strong-class") {
                out.push(Ok(strong_class_cert(&family, &steps, &q, cfg, start)));
            }
            if wants("strong-closure") {
                let reached = q.class().at_most(3).then_some(&q);
                out.push(certify_closure("strong-closure", &family, reached, (0, 1), cfg));
            }
            out
        }
        "rank3-sandwich-class" => vec![certify_rank3_sandwich_class(cfg)],
        "rank2-sandwich-class" => vec![certify_rank2_sandwich_class(cfg)],
        "gf2-example" => vec![certify_gf2_example(cfg)],
        "avoidance-bound" => vec![certify_avoidance_bound(cfg)],
        "odd-characteristic" => vec![certify_odd_characteristic(cfg)],
        "commutator-identity" => vec![certify_commutator_identity(cfg)],
        "engel-power" => vec![certify_engel_power(cfg)],
        other => vec![Err(SandwichError::UnknownClaim(other.to_owned()))],
    }
}
