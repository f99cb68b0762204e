use std::sync::Arc;

use engelkit::nilgroup::{
    free_nilpotent, left_normed_commutator, normal_form, ClassBound, Definition, GroupElement, PcPresentation,
    QuotientPresentation,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Mat = Vec<Vec<i128>>;

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

/// Inverse of a unitriangular matrix by back substitution.
fn mat_inv(a: &Mat) -> Mat {
    let n = a.len();
    let mut x = identity(n);
    for col in 0..n {
        for i in (0..col).rev() {
            x[i][col] = -(i + 1..=col).map(|k| a[i][k] * x[k][col]).sum::<i128>();
        }
    }
    x
}

fn mat_pow(a: &Mat, e: i128) -> Mat {
    let base = if e < 0 { mat_inv(a) } else { a.clone() };
    (0..e.unsigned_abs()).fold(identity(a.len()), |acc, _| mat_mul(&acc, &base))
}

fn mat_comm(a: &Mat, b: &Mat) -> Mat {
    mat_mul(&mat_mul(&mat_inv(a), &mat_inv(b)), &mat_mul(a, b))
}

/// Images of the pc generators under the homomorphism sending the free
/// generators to `gens`, computed from the definitions alone.
fn pc_images(p: &PcPresentation, gens: &[Mat]) -> Vec<Mat> {
    let mut out: Vec<Mat> = Vec::new();
    for k in 0..p.len() {
        let m = match p.definition(k) {
            Definition::Generator(i) => gens[i - 1].clone(),
            Definition::Commutator(j, i) => mat_comm(&out[j], &out[i]),
        };
        out.push(m);
    }
    out
}

fn image_of(imgs: &[Mat], g: &GroupElement) -> Mat {
    g.exponents().iter().zip(imgs).fold(identity(imgs[0].len()), |acc, (&e, m)| mat_mul(&acc, &mat_pow(m, e)))
}

fn random_word(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> Vec<i64> {
    (0..len).map(|_| {
        let l = rng.gen_range(1..=rank as i64);
        if rng.gen_bool(0.5) { l } else { -l }
    }).collect()
}

fn word_image(gens: &[Mat], w: &[i64]) -> Mat {
    w.iter().fold(identity(gens[0].len()), |acc, &l| {
        let m = &gens[l.unsigned_abs() as usize - 1];
        mat_mul(&acc, &if l < 0 { mat_inv(m) } else { m.clone() })
    })
}

fn elem(p: &Arc<PcPresentation>, rng: &mut ChaCha8Rng, len: usize) -> GroupElement {
    normal_form(p, &random_word(rng, p.rank(), len)).unwrap()
}

#[test]
fn heisenberg_agrees_with_unitriangular_matrices() {
    let p = free_nilpotent(2, 2).unwrap();
    let a = vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let b = vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]];
    let gens = vec![a, b];
    let imgs = pc_images(&p, &gens);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let len = rng.gen_range(0..30);
        let w = random_word(&mut rng, 2, len);
        let g = normal_form(&p, &w).unwrap();
        assert_eq!(image_of(&imgs, &g), word_image(&gens, &w), "word {w:?}");
    }
    // The matrix model is faithful here, so the normal form is determined.
    let g = normal_form(&p, &[2, 1]).unwrap();
    assert_eq!(g.exponents(), &[1, 1, 1]);
}

#[test]
fn class_three_agrees_with_four_by_four_model() {
    let p = free_nilpotent(2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let gens: Vec<Mat> = (0..2)
            .map(|_| {
                let mut m = identity(4);
                for i in 0..4 {
                    for j in i + 1..4 {
                        m[i][j] = rng.gen_range(-3..=3);
                    }
                }
                m
            })
            .collect();
        let imgs = pc_images(&p, &gens);
        for _ in 0..200 {
            let len = rng.gen_range(0..20);
            let w = random_word(&mut rng, 2, len);
            assert_eq!(image_of(&imgs, &normal_form(&p, &w).unwrap()), word_image(&gens, &w));
        }
    }
}

#[test]
fn hall_witt_identity_in_rank_three_class_five() {
    let p = free_nilpotent(3, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let (x, y, z) = (elem(&p, &mut rng, 6), elem(&p, &mut rng, 6), elem(&p, &mut rng, 6));
        let term = |a: &GroupElement, b: &GroupElement, c: &GroupElement| {
            left_normed_commutator(&[a.clone(), b.inverse().unwrap(), c.clone()]).unwrap().conjugate(b).unwrap()
        };
        let prod = term(&x, &y, &z).mul(&term(&y, &z, &x)).unwrap().mul(&term(&z, &x, &y)).unwrap();
        assert!(prod.is_identity());
    }
}

#[test]
fn presentations_are_consistent() {
    for (r, c) in [(1, 5), (2, 6), (3, 5), (3, 6), (4, 6)] {
        assert!(free_nilpotent(r, c).unwrap().check_consistency(None).unwrap(), "({r},{c})");
    }
}

#[test]
fn generator_counts_follow_witt() {
    let expect = [((2, 2), 3), ((1, 5), 1), ((2, 3), 5), ((3, 6), 196), ((4, 6), 964)];
    for ((r, c), n) in expect {
        assert_eq!(free_nilpotent(r, c).unwrap().len(), n);
    }
}

#[test]
fn free_groups_have_full_class() {
    for (r, c) in [(2, 3), (3, 4), (2, 6)] {
        let p = free_nilpotent(r, c).unwrap();
        assert_eq!(p.class(), c);
        let q = QuotientPresentation::new(&p, &[]).unwrap();
        assert_eq!(q.class(), ClassBound::AtLeast(c));
    }
    assert_eq!(free_nilpotent(1, 4).unwrap().class(), 1);
}

#[test]
fn quotient_map_is_a_homomorphism() {
    for (r, c, seed) in [(3, 4, 5), (3, 5, 2), (2, 6, 4), (4, 4, 16)] {
        let p = free_nilpotent(r, c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let relators: Vec<GroupElement> = (0..2).map(|_| elem(&p, &mut rng, 4).pow(2).unwrap()).collect();
        let q = QuotientPresentation::new(&p, &relators).unwrap();
        for rel in &relators {
            assert!(q.image(rel).unwrap().is_identity());
        }
        for _ in 0..50 {
            let (a, b) = (elem(&p, &mut rng, 8), elem(&p, &mut rng, 8));
            let lhs = q.image(&a.mul(&b).unwrap()).unwrap();
            let rhs = q.mul(&q.image(&a).unwrap(), &q.image(&b).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn dump_round_trips_bit_exactly() {
    for (r, c) in [(2, 2), (3, 5), (4, 6)] {
        let p = free_nilpotent(r, c).unwrap();
        let text = p.dump();
        let back = PcPresentation::read(&text).unwrap();
        assert_eq!(*p, back);
        assert_eq!(back.dump(), text);
        assert_eq!(back.content_hash(), p.content_hash());
    }
}

fn arb_word() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_reverses_products(u in arb_word(), v in arb_word()) {
        let p = free_nilpotent(3, 4).unwrap();
        let (a, b) = (normal_form(&p, &u).unwrap(), normal_form(&p, &v).unwrap());
        let lhs = a.mul(&b).unwrap().inverse().unwrap();
        let rhs = b.inverse().unwrap().mul(&a.inverse().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.commutator(&a).unwrap().is_identity());
    }

    #[test]
    fn normal_form_is_a_monoid_homomorphism(u in arb_word(), v in arb_word(), w in arb_word()) {
        let p = free_nilpotent(3, 5).unwrap();
        let nf = |x: &[i64]| normal_form(&p, x).unwrap();
        let uv: Vec<i64> = u.iter().chain(&v).copied().collect();
        prop_assert_eq!(nf(&uv), nf(&u).mul(&nf(&v)).unwrap());
        let (a, b, c) = (nf(&u), nf(&v), nf(&w));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn commutator_matches_its_definition(u in arb_word(), v in arb_word()) {
        let p = free_nilpotent(3, 4).unwrap();
        let (a, b) = (normal_form(&p, &u).unwrap(), normal_form(&p, &v).unwrap());
        let direct = a.inverse().unwrap().mul(&b.inverse().unwrap()).unwrap().mul(&a).unwrap().mul(&b).unwrap();
        prop_assert_eq!(a.commutator(&b).unwrap(), direct);
    }
}
