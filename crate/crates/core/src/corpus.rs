//! Seeded generators shared by tests and the acceptance run. All randomness
//! flows from one `u64` seed, read from `SRPB_SEED` when set.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::polycore::{Ctx, Monomial, PolyMatrix, Polynomial, Scalar};
use crate::simplicial::{SimplicialComplex, VertexSet};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// `SRPB_SEED` as decimal or `0x` hex, else [`DEFAULT_SEED`].
pub fn seed() -> u64 {
    std::env::var("SRPB_SEED")
        .ok()
        .and_then(|s| {
            let s = s.trim();
            match s.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16).ok(),
                None => s.parse().ok(),
            }
        })
        .unwrap_or(DEFAULT_SEED)
}

/// Independent streams per consumer so adding draws in one test does not
/// shift another.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Every complex on the ambient set `0..n` (the void complex excluded).
/// There are 1, 2, 5, 19, 167, 7580 of them for n = 0..=5.
pub fn all_complexes(n: usize) -> Vec<SimplicialComplex> {
    assert!((1..=5).contains(&n), "exhaustive enumeration is limited to 1..=5 vertices");
    let mut masks: Vec<VertexSet> = (1..1u64 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut out = Vec::new();
    let mut chosen = vec![0u64];
    fn rec(i: usize, masks: &[VertexSet], chosen: &mut Vec<VertexSet>, n: usize, out: &mut Vec<SimplicialComplex>) {
        if i == masks.len() {
            out.push(SimplicialComplex::from_sets(n, chosen.iter().copied()).expect("sets inside the ambient range"));
            return;
        }
        let s = masks[i];
        let closed = (0..n).filter(|v| s >> v & 1 == 1).all(|v| chosen.contains(&(s & !(1 << v))));
        if closed {
            chosen.push(s);
            rec(i + 1, masks, chosen, n, out);
            chosen.pop();
        }
        rec(i + 1, masks, chosen, n, out);
    }
    rec(0, &masks, &mut chosen, n, &mut out);
    out
}

/// A complex generated by one to four random vertex sets.
pub fn random_complex<R: Rng>(rng: &mut R, n: usize) -> SimplicialComplex {
    let k = rng.gen_range(1..=4);
    let sets: Vec<VertexSet> = (0..k).map(|_| rng.gen_range(0..1u64 << n)).collect();
    SimplicialComplex::from_sets(n, sets).expect("sets inside the ambient range")
}

pub fn named_complexes() -> Vec<(&'static str, SimplicialComplex)> {
    let c = |n: usize, f: &[&[usize]]| {
        SimplicialComplex::new(n, &f.iter().map(|s| s.to_vec()).collect::<Vec<_>>()).expect("valid facets")
    };
    vec![
        ("two-points", c(2, &[&[0], &[1]])),
        ("hollow-triangle", c(3, &[&[0, 1], &[1, 2], &[0, 2]])),
        ("three-points", c(3, &[&[0], &[1], &[2]])),
        ("path", c(3, &[&[0, 1], &[1, 2]])),
        ("square", c(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])),
        ("two-edges", c(4, &[&[0, 1], &[2, 3]])),
        ("triangle-and-point", c(4, &[&[0, 1, 2], &[3]])),
        ("bowtie", c(5, &[&[0, 1, 2], &[2, 3, 4]])),
        ("hollow-tetrahedron", c(4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]])),
        ("pentagon-with-ghost", c(6, &[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[0, 4]])),
    ]
}

/// The named complexes followed by `extra` random non-simplices on 4 to 6
/// vertices.
pub fn corpus(seed: u64, extra: usize) -> Vec<SimplicialComplex> {
    let mut out: Vec<_> = named_complexes().into_iter().map(|(_, c)| c).collect();
    let mut r = rng(seed, 1);
    while out.len() < named_complexes().len() + extra {
        let n = r.gen_range(4..=6);
        let c = random_complex(&mut r, n);
        if !c.is_simplex() && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// A nonzero small integer, nonzero in every field of characteristic ≥ 5.
pub fn small_scalar<R: Rng>(rng: &mut R, ctx: &Ctx) -> Scalar {
    Scalar::from_i64(ctx.field(), *[1i64, -1, 2, -2, 3].choose(rng).expect("nonempty"))
}

/// At most `terms` terms of total degree in `1..=degree` (or 0..=degree
/// when `constant` is set).
pub fn random_poly<R: Rng>(rng: &mut R, ctx: &Ctx, degree: u32, terms: usize, constant: bool) -> Polynomial {
    let n = ctx.nvars();
    let k = rng.gen_range(1..=terms.max(1));
    let parts = (0..k).map(|_| {
        let d = rng.gen_range(if constant { 0 } else { 1 }..=degree);
        let mut exps = vec![0u32; n];
        for _ in 0..d {
            exps[rng.gen_range(0..n)] += 1;
        }
        (Monomial::from_exponents(exps), small_scalar(rng, ctx))
    });
    Polynomial::from_terms(ctx, parts.collect::<Vec<_>>())
}

/// `E_ij(f)` and its inverse `E_ij(-f)` with `i ≠ j`.
pub fn random_elementary<R: Rng>(rng: &mut R, ctx: &Ctx, r: usize, degree: u32) -> (PolyMatrix, PolyMatrix) {
    assert!(r >= 2);
    let i = rng.gen_range(0..r);
    let j = (i + rng.gen_range(1..r)) % r;
    let f = random_poly(rng, ctx, degree, 2, false);
    let mut e = PolyMatrix::identity(ctx, r);
    let mut e_inv = PolyMatrix::identity(ctx, r);
    e_inv.set(i, j, f.neg());
    e.set(i, j, f);
    (e, e_inv)
}

/// `σ = D·E₁⋯E_k` with `D` a constant diagonal unit and `k ≤ factors`
/// random elementaries, together with `σ⁻¹`. Over the polynomial ring.
pub fn random_gl<R: Rng>(rng: &mut R, ctx: &Ctx, r: usize, factors: usize, degree: u32) -> (PolyMatrix, PolyMatrix) {
    let mut diag = PolyMatrix::identity(ctx, r);
    let mut diag_inv = PolyMatrix::identity(ctx, r);
    for i in 0..r {
        let c = small_scalar(rng, ctx);
        diag_inv.set(i, i, Polynomial::constant(ctx, c.inv().expect("nonzero")));
        diag.set(i, i, Polynomial::constant(ctx, c));
    }
    let (mut s, mut s_inv) = (diag, diag_inv);
    if r >= 2 {
        for _ in 0..rng.gen_range(0..=factors) {
            let (e, e_inv) = random_elementary(rng, ctx, r, degree);
            s = s.mul(&e);
            s_inv = e_inv.mul(&s_inv);
        }
    }
    (s, s_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{Field, PolyContext};

    #[test]
    fn complex_counts_match_dedekind_numbers() {
        // Dedekind numbers minus the void complex
        let counts: Vec<usize> = (1..=4).map(|n| all_complexes(n).len()).collect();
        assert_eq!(counts, [2, 5, 19, 167]);
    }

    #[test]
    fn streams_are_reproducible() {
        let ctx = PolyContext::new(2, Field::Rational);
        let a = random_gl(&mut rng(7, 3), &ctx, 3, 4, 2);
        let b = random_gl(&mut rng(7, 3), &ctx, 3, 4, 2);
        assert_eq!(a, b);
        assert!(a.0.mul(&a.1).is_identity());
    }

    #[test]
    fn corpus_is_non_simplicial() {
        assert!(corpus(DEFAULT_SEED, 8).iter().all(|c| !c.is_simplex()));
    }
}
