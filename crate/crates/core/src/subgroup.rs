//! Which positive-dimensional proper Lie subgroup of PSL(2,R) (up to conjugacy)
//! contains a finitely generated group.
//!
//! The classes, as literal matrix shapes:
//!
//! | class    | shape                                             |
//! |----------|---------------------------------------------------|
//! | `L`      | `(a, b; 0, 1/a)`, `a > 0`                         |
//! | `H1c(c)` | `(cⁿ, t; 0, c⁻ⁿ)`, `n ∈ Z`                        |
//! | `L0`     | `(1, t; 0, 1)`                                    |
//! | `H2`     | `(a, 0; 0, 1/a)`                                  |
//! | `H2'`    | `H2 ∪ {(0, b; −1/b, 0)}`                          |
//! | `H3`     | `(cos t, sin t; −sin t, cos t)`                   |
//!
//! Groups that fit none of these are reported as Zariski dense.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::moebius::{ElementType, MoebiusMap, Point};

/// Classification verdict, ordered by the decision tree rather than by inclusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Trivial,
    H3,
    H2,
    H2Prime,
    L0,
    /// Carries the lattice constant `c > 1`.
    H1c(f64),
    L,
    ZariskiDense,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Trivial => "Trivial",
            Verdict::H3 => "H3",
            Verdict::H2 => "H2",
            Verdict::H2Prime => "H2prime",
            Verdict::L0 => "L0",
            Verdict::H1c(_) => "H1c",
            Verdict::L => "L",
            Verdict::ZariskiDense => "ZariskiDense",
        }
    }

    /// Same class, ignoring the `H1c` constant.
    pub fn same_class(&self, other: &Verdict) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::H1c(c) => write!(f, "H1c({c})"),
            v => f.write_str(v.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgroupClassification {
    pub verdict: Verdict,
    /// `W` such that `W⁻¹ g W` has the literal shape of the verdict's class.
    pub conjugator: MoebiusMap,
}

/// Numerical knobs of the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    pub trace_tol: f64,
    /// Chordal tolerance for coincidence of fixed points.
    pub fix_tol: f64,
    /// Entry tolerance for literal shape matching.
    pub shape_tol: f64,
    /// Largest denominator tried in the integer-relation search.
    pub max_denominator: u64,
    /// Relative residual `|q·xᵢ − p·x₀| / max|x|` accepted as an integer relation.
    pub relation_tol: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            trace_tol: crate::moebius::TRACE_TOL,
            fix_tol: 1e-9,
            shape_tol: 1e-8,
            max_denominator: 1_000_000,
            relation_tol: 1e-9,
        }
    }
}

pub fn classify_subgroup(gens: &[MoebiusMap]) -> Result<SubgroupClassification> {
    classify_subgroup_with(gens, &ClassifierConfig::default())
}

pub fn classify_subgroup_with(gens: &[MoebiusMap], cfg: &ClassifierConfig) -> Result<SubgroupClassification> {
    if gens.is_empty() {
        return Err(Error::EmptyGeneratorList);
    }
    let active: Vec<MoebiusMap> = gens
        .iter()
        .copied()
        .filter(|g| g.classify_with(cfg.trace_tol) != ElementType::Identity)
        .collect();
    let trivial = SubgroupClassification { verdict: Verdict::Trivial, conjugator: MoebiusMap::IDENTITY };
    if active.is_empty() {
        return Ok(trivial);
    }
    let fixed: Vec<_> = active
        .iter()
        .map(|g| g.fixed_points_with(cfg.trace_tol))
        .collect::<Result<_>>()?;

    // Common interior fixed point.
    if let Some(p) = fixed[0].interior {
        let shared = fixed.iter().all(|fs| {
            fs.interior
                .map(|q| Point::Finite(q).coincides(&Point::Finite(p), cfg.fix_tol))
                .unwrap_or(false)
        });
        if shared {
            return Ok(SubgroupClassification { verdict: Verdict::H3, conjugator: MoebiusMap::moving_i_to(p)? });
        }
    }

    let candidates = candidate_points(&active, &fixed, cfg);
    let fixes = |k: usize, p: &Point| fixed[k].boundary.iter().any(|q| q.coincides(p, cfg.fix_tol));

    // Boundary pair fixed pointwise, then setwise with a swap.
    for (i, p) in candidates.iter().enumerate() {
        for q in &candidates[i + 1..] {
            if (0..active.len()).all(|k| fixes(k, p) && fixes(k, q)) {
                return Ok(SubgroupClassification {
                    verdict: Verdict::H2,
                    conjugator: MoebiusMap::moving_zero_infinity_to(*p, *q),
                });
            }
        }
    }
    for (i, p) in candidates.iter().enumerate() {
        for q in &candidates[i + 1..] {
            let mut swapped = false;
            let preserved = active.iter().enumerate().all(|(k, g)| {
                if fixes(k, p) && fixes(k, q) {
                    true
                } else if g.apply(*p).coincides(q, cfg.fix_tol) && g.apply(*q).coincides(p, cfg.fix_tol) {
                    swapped = true;
                    true
                } else {
                    false
                }
            });
            if preserved && swapped {
                return Ok(SubgroupClassification {
                    verdict: Verdict::H2Prime,
                    conjugator: MoebiusMap::moving_zero_infinity_to(*p, *q),
                });
            }
        }
    }

    // Common boundary fixed point: conjugate it to ∞ and read off the diagonal.
    for p in &candidates {
        if !(0..active.len()).all(|k| fixes(k, p)) {
            continue;
        }
        let w = MoebiusMap::moving_infinity_to(*p);
        let w_inv = w.inverse();
        let logs: Vec<f64> = active
            .iter()
            .map(|g| {
                let t = w_inv * *g * w;
                2.0 * t.entries()[0].abs().ln()
            })
            .collect();
        let verdict = if logs.iter().all(|x| x.abs() <= cfg.shape_tol) {
            Verdict::L0
        } else {
            match lattice_generator(&logs, cfg) {
                Some(lambda) => Verdict::H1c((0.5 * lambda).exp()),
                None => Verdict::L,
            }
        };
        return Ok(SubgroupClassification { verdict, conjugator: w });
    }

    Ok(SubgroupClassification { verdict: Verdict::ZariskiDense, conjugator: MoebiusMap::IDENTITY })
}

/// Boundary fixed points of the generators and of their pairwise products.
/// Products catch invariant pairs swapped by every generator (two involutions).
fn candidate_points(active: &[MoebiusMap], fixed: &[crate::moebius::FixedSet], cfg: &ClassifierConfig) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::new();
    let mut push = |p: Point| {
        // A point this far out is ∞ up to roundoff; keep the exact representative
        // so the witness does not blow up.
        let p = if p.coincides(&Point::Infinity, cfg.fix_tol) { Point::Infinity } else { p };
        if !pts.iter().any(|q| q.coincides(&p, cfg.fix_tol)) {
            pts.push(p);
        }
    };
    for fs in fixed {
        fs.boundary.iter().copied().for_each(&mut push);
    }
    for (i, g) in active.iter().enumerate() {
        for h in &active[i + 1..] {
            let prod = *g * *h;
            if let Ok(fs) = prod.fixed_points_with(cfg.trace_tol) {
                fs.boundary.iter().copied().for_each(&mut push);
            }
        }
    }
    pts
}

/// Positive generator `λ` of the additive group spanned by `values`, if that
/// group is a lattice within the configured search bounds.
pub fn lattice_generator(values: &[f64], cfg: &ClassifierConfig) -> Option<f64> {
    let nonzero: Vec<f64> = values.iter().copied().filter(|x| x.abs() > cfg.shape_tol).collect();
    let x0 = *nonzero.first()?;
    // xᵢ = (pᵢ/qᵢ)·x₀
    let mut fracs = Vec::with_capacity(nonzero.len());
    for &x in &nonzero {
        fracs.push(integer_relation(x, x0, cfg)?);
    }
    let mut common: u128 = 1;
    for &(_, q) in &fracs {
        common = lcm(common, q as u128);
        if common > u64::MAX as u128 {
            return None;
        }
    }
    let mut g: u128 = 0;
    for &(p, q) in &fracs {
        let n = p.unsigned_abs() as u128 * (common / q as u128);
        g = gcd(g, n);
    }
    if g == 0 {
        return None;
    }
    Some(g as f64 * x0.abs() / common as f64)
}

/// Finds `(p, q)` with `q ≥ 1` and `q·x ≈ p·x0` via continued-fraction convergents of `x/x0`.
fn integer_relation(x: f64, x0: f64, cfg: &ClassifierConfig) -> Option<(i64, u64)> {
    let scale = x.abs().max(x0.abs());
    let ratio = x / x0;
    let (mut h_prev, mut h) = (1i128, ratio.floor() as i128);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut rest = ratio - ratio.floor();
    loop {
        if ((k as f64) * x - (h as f64) * x0).abs() <= cfg.relation_tol * scale {
            return Some((h as i64, k as u64));
        }
        if rest.abs() < f64::EPSILON {
            return None;
        }
        let inv = rest.recip();
        let term = inv.floor();
        rest = inv - term;
        let term = term as i128;
        let h_next = term.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = term.checked_mul(k)?.checked_add(k_prev)?;
        if k_next as u64 > cfg.max_denominator {
            return None;
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

/// Whether `conjugator⁻¹ · g · conjugator` has the literal shape of `verdict`'s class.
/// Every element lies in PSL(2,R), so `ZariskiDense` accepts anything.
pub fn is_in_class(g: &MoebiusMap, verdict: &Verdict, conjugator: &MoebiusMap) -> bool {
    is_in_class_with(g, verdict, conjugator, 1e-8)
}

pub fn is_in_class_with(g: &MoebiusMap, verdict: &Verdict, conjugator: &MoebiusMap, tol: f64) -> bool {
    let h = conjugator.inverse() * *g * *conjugator;
    let [a, b, c, d] = h.entries();
    let tol = tol * a.abs().max(b.abs()).max(c.abs()).max(d.abs()).max(1.0);
    let near = |x: f64, y: f64| (x - y).abs() <= tol;
    match verdict {
        Verdict::Trivial => h.distance_to_identity() <= tol,
        Verdict::H3 => near(a, d) && near(b, -c),
        Verdict::H2 => near(b, 0.0) && near(c, 0.0),
        Verdict::H2Prime => (near(b, 0.0) && near(c, 0.0)) || (near(a, 0.0) && near(d, 0.0)),
        Verdict::L => near(c, 0.0),
        Verdict::L0 => near(c, 0.0) && near(a.abs(), 1.0) && near(d.abs(), 1.0),
        Verdict::H1c(base) => {
            if !near(c, 0.0) || !(*base > 1.0) {
                return false;
            }
            let n = (a.abs().ln() / base.ln()).round();
            n.abs() <= 64.0 && (a.abs() - base.powf(n)).abs() <= tol * a.abs().max(1.0)
        }
        Verdict::ZariskiDense => true,
    }
}

/// The conjugator used by [`random_conjugate`]: `U · R` with
/// `U = (e^{u₁}, u₂; 0, e^{−u₁})`, `R` the rotation block of angle `π·u₃`,
/// and `uᵢ` uniform in `[−1, 1]`.
pub fn random_conjugator(seed: u64) -> MoebiusMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u1: f64 = rng.gen_range(-1.0..=1.0);
    let u2: f64 = rng.gen_range(-1.0..=1.0);
    let u3: f64 = rng.gen_range(-1.0..=1.0);
    let upper = MoebiusMap::new(u1.exp(), u2, 0.0, (-u1).exp()).expect("positive determinant");
    upper * MoebiusMap::rotation(std::f64::consts::PI * u3)
}

/// Conjugates every generator by the same seeded random map.
pub fn random_conjugate(gens: &[MoebiusMap], seed: u64) -> Vec<MoebiusMap> {
    let h = random_conjugator(seed);
    gens.iter().map(|g| g.conjugate_by(&h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn m(a: f64, b: f64, c: f64, d: f64) -> MoebiusMap {
        MoebiusMap::new(a, b, c, d).unwrap()
    }

    #[test]
    fn empty_list_is_an_error() {
        assert_eq!(classify_subgroup(&[]), Err(Error::EmptyGeneratorList));
    }

    #[test]
    fn worked_examples() {
        let r = classify_subgroup(&[MoebiusMap::rotation(PI / 3.0)]).unwrap();
        assert_eq!(r.verdict, Verdict::H3);
        assert!(r.conjugator.is_identity(1e-12));

        let v = classify_subgroup(&[MoebiusMap::translation(1.0), MoebiusMap::translation(2f64.sqrt())]).unwrap();
        assert_eq!(v.verdict, Verdict::L0);

        let v = classify_subgroup(&[m(2.0, 0.0, 0.0, 0.5), m(0.0, 1.0, -1.0, 0.0)]).unwrap();
        assert_eq!(v.verdict, Verdict::H2Prime);

        let v = classify_subgroup(&[m(2.0, 0.0, 0.0, 0.5), m(3.0, 1.0, 0.0, 1.0 / 3.0)]).unwrap();
        assert_eq!(v.verdict, Verdict::L);

        let v = classify_subgroup(&[MoebiusMap::translation(1.0), m(1.0, 0.0, 1.0, 1.0)]).unwrap();
        assert_eq!(v.verdict, Verdict::ZariskiDense);

        assert_eq!(classify_subgroup(&[MoebiusMap::IDENTITY]).unwrap().verdict, Verdict::Trivial);
    }

    #[test]
    fn h1c_constant() {
        let v = classify_subgroup(&[m(2.0, 0.0, 0.0, 0.5), MoebiusMap::translation(1.0)]).unwrap();
        match v.verdict {
            Verdict::H1c(c) => assert!((c - 2.0).abs() < 1e-12),
            other => panic!("expected H1c, got {other}"),
        }
        // a = 4 and a = 8 generate the lattice of a = 2.
        let v = classify_subgroup(&[m(4.0, 1.0, 0.0, 0.25), m(8.0, 0.0, 0.0, 0.125)]).unwrap();
        match v.verdict {
            Verdict::H1c(c) => assert!((c - 2.0).abs() < 1e-9),
            other => panic!("expected H1c, got {other}"),
        }
    }

    #[test]
    fn two_involutions_preserve_a_pair() {
        // Half-turns about i and 2i both swap 0 and ∞.
        let s1 = m(0.0, 1.0, -1.0, 0.0);
        let s2 = m(0.0, 2.0, -0.5, 0.0);
        let v = classify_subgroup(&[s1, s2]).unwrap();
        assert_eq!(v.verdict, Verdict::H2Prime);
        assert!(is_in_class(&s1, &v.verdict, &v.conjugator));
        assert!(is_in_class(&s2, &v.verdict, &v.conjugator));
    }

    #[test]
    fn log_two_and_log_three_have_no_relation() {
        let cfg = ClassifierConfig::default();
        assert_eq!(lattice_generator(&[4f64.ln(), 9f64.ln()], &cfg), None);
        let lam = lattice_generator(&[2.0 * 2f64.ln(), 6.0 * 2f64.ln()], &cfg).unwrap();
        assert!((lam - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn shape_membership() {
        let d = m(2.0, 0.0, 0.0, 0.5);
        assert!(is_in_class(&MoebiusMap::IDENTITY, &Verdict::H2, &MoebiusMap::IDENTITY));
        assert!(is_in_class(&MoebiusMap::IDENTITY, &Verdict::H3, &MoebiusMap::IDENTITY));
        assert!(is_in_class(&MoebiusMap::IDENTITY, &Verdict::H1c(2.0), &MoebiusMap::IDENTITY));
        assert!(is_in_class(&d, &Verdict::H2, &MoebiusMap::IDENTITY));
        assert!(!is_in_class(&MoebiusMap::translation(1.0), &Verdict::H2, &MoebiusMap::IDENTITY));
        assert!(is_in_class(&d, &Verdict::H1c(2.0), &MoebiusMap::IDENTITY));
        assert!(!is_in_class(&m(3.0, 0.0, 0.0, 1.0 / 3.0), &Verdict::H1c(2.0), &MoebiusMap::IDENTITY));
    }

    #[test]
    fn random_conjugate_is_deterministic() {
        let gens = [MoebiusMap::translation(1.0), m(2.0, 0.0, 0.0, 0.5)];
        assert_eq!(random_conjugate(&gens, 7), random_conjugate(&gens, 7));
        assert_ne!(random_conjugate(&gens, 7), random_conjugate(&gens, 8));
        let id = random_conjugate(&[MoebiusMap::IDENTITY], 3);
        assert!(id[0].is_identity(1e-12));
    }
}
