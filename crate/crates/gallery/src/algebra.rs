//! Exact pointwise algebra checks. The cross product is read from a table
//! that can be swapped for a corrupted one to exercise the failure path.

use crate::report::Check;
use assoc_core::g2::decompose::lambda7_basis;
use assoc_core::g2::{
    cross_table, decompose3, joyce_involutions, p_operator, projector_matrices, pullback, reconstruct_section, Form,
    G2Structure, Plane,
};
use assoc_core::scalar::{dot, rank, sub, unit_vec, Exact, Scalar, Vec7};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `e_i × e_j` for the basis of ℝ⁷, extended bilinearly.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossTable {
    entries: Vec<Vec<Vec7<Exact>>>,
}

impl CrossTable {
    pub fn standard() -> Self {
        Self { entries: cross_table(&G2Structure::<Exact>::standard()) }
    }

    /// Negates `e₁ × e₂` without touching `e₂ × e₁`.
    pub fn corrupted() -> Self {
        let mut t = Self::standard();
        t.entries[0][1] = t.entries[0][1].clone().map(|x| -x);
        t
    }

    pub fn cross(&self, u: &Vec7<Exact>, v: &Vec7<Exact>) -> Vec7<Exact> {
        let zero = Exact::from_int(0);
        let mut out: Vec7<Exact> = std::array::from_fn(|_| zero.clone());
        for (i, ui) in u.iter().enumerate() {
            if *ui == zero {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if *vj == zero {
                    continue;
                }
                let c = ui.clone() * vj.clone();
                for (o, t) in out.iter_mut().zip(&self.entries[i][j]) {
                    *o += c.clone() * t.clone();
                }
            }
        }
        out
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Vec7<Exact> {
    std::array::from_fn(|_| Exact::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
}

fn lin(a: &Exact, u: &Vec7<Exact>, b: &Exact, v: &Vec7<Exact>) -> Vec7<Exact> {
    std::array::from_fn(|i| a.clone() * u[i].clone() + b.clone() * v[i].clone())
}

fn neg(u: &Vec7<Exact>) -> Vec7<Exact> {
    u.clone().map(|x| -x)
}

/// Cross product, `χ` and involution identities in exact rationals. Each
/// check counts violations over all basis combinations plus `samples`
/// random rational vectors.
pub fn exact_suite(table: &CrossTable, samples: usize, seed: u64) -> Vec<Check> {
    let st = G2Structure::<Exact>::standard();
    let e = |i: usize| -> Vec7<Exact> { unit_vec(i) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<[Vec7<Exact>; 3]> = (0..samples).map(|_| std::array::from_fn(|_| random_rational(&mut rng))).collect();

    let mut antisym = 0usize;
    let mut compat = 0usize;
    for i in 0..7 {
        for j in 0..7 {
            if table.cross(&e(i), &e(j)) != neg(&table.cross(&e(j), &e(i))) {
                antisym += 1;
            }
            for k in 0..7 {
                if dot(&table.cross(&e(i), &e(j)), &e(k)) != st.phi().evaluate(&[e(i), e(j), e(k)]) {
                    compat += 1;
                }
            }
        }
    }
    let mut assoc = 0usize;
    let mut chi_alt = 0usize;
    let mut chi_orth = 0usize;
    let mut chi_formula = 0usize;
    for [u, v, w] in &triples {
        let uv = table.cross(u, v);
        if uv != neg(&table.cross(v, u)) {
            antisym += 1;
        }
        if dot(&uv, w) != st.phi().evaluate(&[u.clone(), v.clone(), w.clone()])
            || dot(&uv, &uv) != dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v)
        {
            compat += 1;
        }
        // w' ranges over the associative plane span(u, v, u×v).
        let wa: Vec7<Exact> = std::array::from_fn(|i| w[0].clone() * u[i].clone() + w[1].clone() * v[i].clone() + w[2].clone() * uv[i].clone());
        let lhs = table.cross(&table.cross(v, &wa), u);
        if lhs != lin(&dot(u, v), &wa, &-dot(u, &wa), v) {
            assoc += 1;
        }
        let c = st.chi(u, v, w);
        if st.chi(v, u, w) != neg(&c) || st.chi(u, w, v) != neg(&c) || st.chi(w, v, u) != neg(&c) {
            chi_alt += 1;
        }
        let z = Exact::from_int(0);
        if dot(&c, u) != z || dot(&c, v) != z || dot(&c, w) != z {
            chi_orth += 1;
        }
        let t = table.cross(u, &table.cross(v, w));
        let r = lin(&-dot(u, v), w, &dot(u, w), v);
        if sub(&r, &t) != c {
            chi_formula += 1;
        }
    }

    let mut checks = vec![
        Check::equals("cross-antisymmetry", "u×v = −v×u", antisym as f64, 0.0),
        Check::equals("cross-compatibility", "⟨u×v, w⟩ = φ(u,v,w) and |u×v|² = |u|²|v|² − ⟨u,v⟩²", compat as f64, 0.0),
        Check::equals("associative-identity", "(v×w)×u = ⟨u,v⟩w − ⟨u,w⟩v on associative planes", assoc as f64, 0.0),
        Check::equals("chi-antisymmetry", "χ is alternating", chi_alt as f64, 0.0),
        Check::equals("chi-orthogonality", "χ(u,v,w) ⟂ u, v, w", chi_orth as f64, 0.0),
        Check::equals("chi-formula", "χ = −u×(v×w) − ⟨u,v⟩w + ⟨u,w⟩v", chi_formula as f64, 0.0),
    ];
    checks.extend(involution_checks());
    checks
}

/// `f*φ₀ = ±φ₀` and `f∘f = id` for the five involutions of T⁷.
pub fn involution_checks() -> Vec<Check> {
    let st = G2Structure::<Exact>::standard();
    joyce_involutions::<Exact>()
        .into_iter()
        .map(|(name, map, sign)| {
            let pulled = pullback(st.phi(), &map);
            let ok = pulled == st.phi().scale(&Exact::from_int(sign)) && map.compose(&map).is_identity();
            let claim = if sign > 0 { format!("{name} preserves φ₀") } else { format!("{name} reverses φ₀") };
            Check::holds(&format!("pullback-{name}"), &claim, ok)
        })
        .collect()
}

/// Projector ranks, exactly, and the eigenvalues of `P` on each summand.
pub fn decomposition_suite(samples: usize, seed: u64, tolerance: f64) -> Vec<Check> {
    let ranks: Vec<usize> = projector_matrices(&G2Structure::<Exact>::standard()).iter().map(|m| rank(m, 0.0)).collect();
    let st = G2Structure::<f64>::standard();
    let phi = st.phi();
    let r1 = p_operator(phi, &st).sub(&phi.scale(&(4.0 / 3.0))).max_abs();
    let r7 = lambda7_basis(&st).iter().map(|x| p_operator(x, &st).sub(x).max_abs() / x.max_abs()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r27: f64 = 0.0;
    let mut split: f64 = 0.0;
    for _ in 0..samples {
        let psi = Form::from_coefficients(3, (0..35).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let d = decompose3(&psi, &st);
        r27 = r27.max(p_operator(&d.pi27, &st).add(&d.pi27).max_abs() / d.pi27.max_abs());
        split = split.max(d.sum().sub(&psi).max_abs());
    }
    vec![
        Check::holds("projector-ranks", &format!("Λ³ projector ranks (1, 7, 27); found {ranks:?}"), ranks == [1, 7, 27]),
        Check::at_most("p-on-phi", "P(φ₀) = (4/3)φ₀", r1, tolerance),
        Check::at_most("p-on-lambda7", "P = id on Λ³₇", r7, tolerance),
        Check::at_most("p-on-lambda27", "P = −id on Λ³₂₇", r27, tolerance),
        Check::at_most("decomposition-sum", "π₁ + π₇ + π₂₇ = id", split, tolerance),
    ]
}

/// Largest relative error of the reconstruction map on random associative
/// planes and normal vectors.
pub fn reconstruction_error(pairs: usize, seed: u64) -> assoc_core::Result<f64> {
    let st = G2Structure::<f64>::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let r = |rng: &mut ChaCha8Rng| -> [f64; 7] { std::array::from_fn(|_| rng.gen_range(-1.0..1.0)) };
        let p = Plane::orthonormalize(&[r(&mut rng), r(&mut rng), r(&mut rng)], &st)?;
        let w = st.cross(&p.basis()[0], &p.basis()[1]);
        let plane = Plane::orthonormalize(&[p.basis()[0], p.basis()[1], w], &st)?;
        let s = plane.project_normal(&r(&mut rng), &st);
        let back = reconstruct_section(&s, &plane, &st, 1e-10)?;
        worst = worst.max(st.norm(&sub(&back, &s)) / st.norm(&s));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_table_passes_and_corrupted_fails_antisymmetry() {
        assert!(exact_suite(&CrossTable::standard(), 20, 1).iter().all(|c| c.pass));
        let bad = exact_suite(&CrossTable::corrupted(), 20, 1);
        assert!(!bad.iter().find(|c| c.name == "cross-antisymmetry").unwrap().pass);
    }

    #[test]
    fn table_agrees_with_structure() {
        let st = G2Structure::<Exact>::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (u, v) = (random_rational(&mut rng), random_rational(&mut rng));
        assert_eq!(CrossTable::standard().cross(&u, &v), st.cross(&u, &v));
    }
}
