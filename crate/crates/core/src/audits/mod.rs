//! Global identities: the residue theorem for the affine connection `f″/f′`
//! of a rational map on the sphere, the Heins admissibility inequality, and
//! the local order tables of the character objects of a developing map.

mod qpoly;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use qpoly::{format_rational, parse_rational, QPoly};

use crate::developing::{DevelopingMap, SingularityKind, SingularitySource, Variant};
use crate::error::{Error, Result};
use crate::metriclab::linear_fit;
use crate::moebius::Point;
use crate::poly::ComplexPoly;

/// Sample count of the trapezoid rule used for contour residues.
pub const CONTOUR_SAMPLES: usize = 128;

/// Agreement required between order-rule and contour residues.
pub const CONTOUR_TOL: f64 = 1e-9;

/// Largest gap between a measured local order and its prediction.
pub const ORDER_TOL: f64 = 0.1;

/// `P/Q` with coprime exact rational polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMap {
    numerator: QPoly,
    denominator: QPoly,
}

impl RationalMap {
    pub fn new(numerator: QPoly, denominator: QPoly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidParameter("denominator is identically zero".into()));
        }
        if !numerator.is_zero() && !numerator.gcd(&denominator).is_constant() {
            return Err(Error::NotCoprime);
        }
        let f = RationalMap { numerator, denominator };
        if f.degree() == 0 {
            return Err(Error::ConstantMap);
        }
        Ok(f)
    }

    pub fn polynomial(p: QPoly) -> Result<Self> {
        Self::new(p, QPoly::one())
    }

    pub fn numerator(&self) -> &QPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &QPoly {
        &self.denominator
    }

    /// `max(deg P, deg Q)`.
    pub fn degree(&self) -> usize {
        self.numerator.deg().max(self.denominator.deg())
    }

    /// `P′Q − PQ′`, so that `f′ = W/Q²`.
    pub fn wronskian(&self) -> QPoly {
        wronskian(&self.numerator, &self.denominator)
    }

    /// `g(w) = f(1/w)` as `rev_d(P)/rev_d(Q)`.
    pub fn at_infinity(&self) -> (QPoly, QPoly) {
        let d = self.degree();
        (self.numerator.reversed(d), self.denominator.reversed(d))
    }
}

fn wronskian(p: &QPoly, q: &QPoly) -> QPoly {
    p.derivative().mul(q).sub(&p.mul(&q.derivative()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueSource {
    /// Zero of `f′` away from the poles of `f`.
    CriticalZero,
    /// Pole of `f`.
    PoleOfF,
}

impl ResidueSource {
    pub fn name(&self) -> &'static str {
        match self {
            ResidueSource::CriticalZero => "critical_zero",
            ResidueSource::PoleOfF => "pole_of_f",
        }
    }
}

/// Residue of `f″/f′ dz` at one point, exact from the order rules and
/// numeric from a contour integral.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionResidue {
    pub point: Point,
    pub residue: i64,
    pub source: ResidueSource,
    pub contour: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueAuditReport {
    pub finite_residues: Vec<ConnectionResidue>,
    /// Contribution of the `w = 1/z` chart, if any.
    pub infinity_residue: Option<ConnectionResidue>,
    pub total: i64,
    pub numeric_total: Complex64,
    /// Largest gap between an order-rule residue and its contour integral.
    pub max_contour_error: f64,
    pub pass: bool,
}

impl ResidueAuditReport {
    pub fn infinity_value(&self) -> i64 {
        self.infinity_residue.as_ref().map_or(0, |r| r.residue)
    }
}

struct LocalRule {
    /// Squarefree factor whose roots share the residue.
    factor: QPoly,
    residue: i64,
    source: ResidueSource,
}

/// Order rules at finite points: each root of a squarefree factor of `W` of
/// multiplicity `m` that is not a pole contributes `m`; each pole of order `k`
/// contributes `−(k+1)`.
fn finite_rules(p: &QPoly, q: &QPoly) -> Vec<LocalRule> {
    let w = wronskian(p, q);
    let mut rules = Vec::new();
    for (factor, m) in w.squarefree() {
        let away = factor.div_exact(&factor.gcd(q));
        if !away.is_constant() {
            rules.push(LocalRule { factor: away, residue: m as i64, source: ResidueSource::CriticalZero });
        }
    }
    for (factor, k) in q.squarefree() {
        rules.push(LocalRule { factor, residue: -(k as i64 + 1), source: ResidueSource::PoleOfF });
    }
    rules
}

/// The same rules at `w = 0` only.
fn rule_at_zero(p: &QPoly, q: &QPoly) -> Option<(i64, ResidueSource)> {
    let k = q.order_at_zero();
    if k > 0 {
        return Some((-(k as i64 + 1), ResidueSource::PoleOfF));
    }
    let m = wronskian(p, q).order_at_zero();
    (m > 0).then_some((m as i64, ResidueSource::CriticalZero))
}

/// `(1/2πi) ∮ (W′/W − 2Q′/Q) dz` on a circle, trapezoid rule.
fn contour_residue(w: &ComplexPoly, q: &ComplexPoly, center: Complex64, radius: f64) -> Complex64 {
    let (dw, dq) = (w.derivative(), q.derivative());
    let sum: Complex64 = (0..CONTOUR_SAMPLES)
        .map(|k| {
            let e = Complex64::from_polar(radius, 2.0 * PI * k as f64 / CONTOUR_SAMPLES as f64);
            let z = center + e;
            (dw.eval(z) / w.eval(z) - 2.0 * dq.eval(z) / q.eval(z)) * e
        })
        .sum();
    sum / CONTOUR_SAMPLES as f64
}

/// Residues of `f″/f′ dz` at every finite point and in the chart at infinity.
pub fn affine_connection_of(f: &RationalMap) -> Result<Vec<ConnectionResidue>> {
    let report = residue_audit(f)?;
    let mut out = report.finite_residues;
    out.extend(report.infinity_residue);
    Ok(out)
}

/// Checks that the residues of `f″/f′` sum to `−2` over the sphere.
pub fn residue_audit(f: &RationalMap) -> Result<ResidueAuditReport> {
    let (p, q) = (f.numerator(), f.denominator());
    let w = f.wronskian();
    if w.is_zero() || f.degree() == 0 {
        return Err(Error::ConstantMap);
    }

    let mut located: Vec<(Complex64, i64, ResidueSource)> = Vec::new();
    for rule in finite_rules(p, q) {
        for z in rule.factor.to_complex().roots() {
            located.push((z, rule.residue, rule.source));
        }
    }
    located.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let (wc, qc) = (w.to_complex(), q.to_complex());
    let mut finite = Vec::with_capacity(located.len());
    for (i, &(z, residue, source)) in located.iter().enumerate() {
        let gap = located
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, o)| (o.0 - z).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = (0.5 * gap).min(1e-2);
        finite.push(ConnectionResidue { point: Point::Finite(z), residue, source, contour: contour_residue(&wc, &qc, z, radius) });
    }

    let (pi, qi) = f.at_infinity();
    let infinity = rule_at_zero(&pi, &qi).map(|(residue, source)| {
        let far = located.iter().map(|o| o.0.norm()).fold(0.0, f64::max);
        let radius = if far > 0.0 { (0.5 / far).min(1e-2) } else { 1e-2 };
        let contour = contour_residue(&wronskian(&pi, &qi).to_complex(), &qi.to_complex(), Complex64::zero(), radius);
        ConnectionResidue { point: Point::Infinity, residue, source, contour }
    });

    let total: i64 = finite.iter().map(|r| r.residue).sum::<i64>() + infinity.as_ref().map_or(0, |r| r.residue);
    let numeric_total: Complex64 =
        finite.iter().map(|r| r.contour).sum::<Complex64>() + infinity.as_ref().map_or(Complex64::zero(), |r| r.contour);
    let max_contour_error = finite
        .iter()
        .chain(infinity.iter())
        .map(|r| (r.contour - r.residue as f64).norm())
        .fold(0.0, f64::max);
    let pass = total == -2 && max_contour_error <= CONTOUR_TOL && (numeric_total + 2.0).norm() <= CONTOUR_TOL;
    Ok(ResidueAuditReport { finite_residues: finite, infinity_residue: infinity, total, numeric_total, max_contour_error, pass })
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let den: i64 = rng.gen_range(1..=4);
    let num: i64 = rng.gen_range(-5 * den..=5 * den);
    BigRational::new(num.into(), den.into())
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> QPoly {
    let mut c: Vec<BigRational> = (0..=degree).map(|_| random_rational(rng)).collect();
    while c[degree].is_zero() {
        c[degree] = random_rational(rng);
    }
    QPoly::new(c)
}

/// A random non-constant rational map of degree `1..=max_degree` with
/// coefficients in `[−5, 5]` and denominators up to 4, reproducible from `seed`.
pub fn random_rational_map(seed: u64, max_degree: usize) -> RationalMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let dp = rng.gen_range(0..=max_degree);
        let dq = rng.gen_range(0..=max_degree);
        if dp.max(dq) == 0 {
            continue;
        }
        if let Ok(f) = RationalMap::new(random_poly(&mut rng, dp), random_poly(&mut rng, dq)) {
            return f;
        }
    }
}

/// `Σ (θᵢ − 1) pᵢ` with `θ = 0` for cusps.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisor {
    entries: Vec<(String, f64)>,
}

impl Divisor {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        for (i, (label, theta)) in entries.iter().enumerate() {
            if !(*theta >= 0.0) || !theta.is_finite() || *theta == 1.0 {
                return Err(Error::InvalidParameter(format!("angle {theta} at {label} must be ≥ 0 and ≠ 1")));
            }
            if entries[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::InvalidParameter(format!("duplicate label {label}")));
            }
        }
        Ok(Divisor { entries })
    }

    pub fn empty() -> Self {
        Divisor { entries: vec![] }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    /// `Σ (θᵢ − 1)`.
    pub fn degree(&self) -> f64 {
        self.entries.iter().map(|(_, t)| t - 1.0).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeinsReport {
    pub genus: u32,
    pub chi: i64,
    pub slack: f64,
    pub admissible: bool,
}

/// `χ + Σ(θᵢ − 1) < 0` with `χ = 2 − 2g`.
pub fn heins_admissible(genus: u32, divisor: &Divisor) -> HeinsReport {
    let chi = 2 - 2 * genus as i64;
    let slack = chi as f64 + divisor.degree();
    HeinsReport { genus, chi, slack, admissible: slack < 0.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacterObject {
    /// `df/f` (U1, Blaschke) or `df` (L0).
    Omega,
    /// `df` for Blaschke products.
    Differential,
    /// `(dF/F)²` for `F` the half-plane version of the map.
    Quadratic,
    /// `f″/f′`.
    Connection,
}

impl CharacterObject {
    pub fn name(&self) -> &'static str {
        match self {
            CharacterObject::Omega => "omega",
            CharacterObject::Differential => "df",
            CharacterObject::Quadratic => "q",
            CharacterObject::Connection => "h",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectCheck {
    pub object: CharacterObject,
    pub predicted_order: f64,
    /// Log-log slope before rounding.
    pub measured_slope: f64,
    /// Slope rounded to the nearest half-integer.
    pub measured_order: f64,
    pub predicted_residue: Option<Complex64>,
    pub measured_residue: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisorRow {
    pub point: Complex64,
    pub theta: f64,
    pub kind: SingularityKind,
    pub checks: Vec<ObjectCheck>,
}

/// `Σ 2(θᵢ − 1)` against the predicted and measured orders of `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticBalance {
    pub divisor: f64,
    pub predicted: f64,
    pub measured: f64,
}

impl QuadraticBalance {
    pub fn holds(&self) -> bool {
        self.divisor == self.predicted && self.predicted == self.measured
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisorTable {
    pub rows: Vec<DivisorRow>,
    pub quadratic: Option<QuadraticBalance>,
}

impl DivisorTable {
    pub fn pass(&self) -> bool {
        self.quadratic.is_none_or(|b| b.holds())
    }
}

type Coefficient<'a> = Box<dyn Fn(Complex64) -> Result<Complex64> + 'a>;

fn coefficient<'a>(f: &'a DevelopingMap, object: CharacterObject) -> Coefficient<'a> {
    let four = Complex64::new(4.0, 0.0);
    match (f.variant(), object) {
        (Variant::U1(m), CharacterObject::Omega) => Box::new(move |z| m.form.eval(z)),
        (Variant::U1(m), CharacterObject::Quadratic) => Box::new(move |z| {
            let v = f.eval_at(z)?;
            let d = v * m.form.eval(z)?;
            Ok(four * d * d / (1.0 - v * v).powi(2))
        }),
        (Variant::L0(m), CharacterObject::Omega) => Box::new(move |z| Ok(m.scale * m.form.eval(z)?)),
        (Variant::L0(m), CharacterObject::Connection) => Box::new(move |z| Ok(m.form.eval_derivative(z)? / m.form.eval(z)?)),
        (Variant::Blaschke(b), CharacterObject::Omega) => Box::new(move |z| {
            let (v, d) = b.jet(z);
            Ok(d / v)
        }),
        (Variant::Blaschke(b), CharacterObject::Differential) => Box::new(move |z| Ok(b.jet(z).1)),
        (Variant::Blaschke(b), CharacterObject::Quadratic) => Box::new(move |z| {
            let (v, d) = b.jet(z);
            Ok(four * d * d / (1.0 - v * v).powi(2))
        }),
        _ => Box::new(|_| Err(Error::WrongVariant("object not defined for this variant".into()))),
    }
}

const PROBE_SAMPLES: usize = 16;

/// Log-log slope of circle averages of `ln|g|` and the residue on the largest circle.
fn measure(g: &Coefficient<'_>, p: Complex64, first_radius: f64) -> Result<(f64, Complex64)> {
    let radii: Vec<f64> = (0..7).map(|j| first_radius * 2f64.powi(-j)).collect();
    let mut logs = Vec::with_capacity(radii.len());
    let mut means = Vec::with_capacity(radii.len());
    let mut residue = Complex64::zero();
    for (j, &r) in radii.iter().enumerate() {
        let mut mean = 0.0;
        for k in 0..PROBE_SAMPLES {
            let e = Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / PROBE_SAMPLES as f64);
            let v = g(p + e)?;
            mean += v.norm().ln();
            if j == 0 {
                residue += v * e;
            }
        }
        logs.push(r.ln());
        means.push(mean / PROBE_SAMPLES as f64);
    }
    Ok((linear_fit(&logs, &means).0, residue / PROBE_SAMPLES as f64))
}

fn half_round(x: f64) -> f64 {
    (2.0 * x).round() / 2.0
}

fn is_half_integer(x: f64) -> bool {
    (2.0 * x - (2.0 * x).round()).abs() < 1e-12
}

/// Predicted and measured local data of the character objects at each declared singularity.
pub fn divisor_table_audit(f: &DevelopingMap) -> Result<DivisorTable> {
    let quadratic = match f.variant() {
        Variant::U1(m) => m.form.poles().iter().all(|p| is_half_integer(p.residue.re)),
        Variant::L0(_) => false,
        Variant::Blaschke(_) => true,
    };
    let avoid = f.exclusion_points();
    let mut rows = Vec::new();
    for s in f.singularities() {
        let nearest = avoid
            .iter()
            .filter(|q| (*q - s.point).norm() > 1e-12)
            .map(|q| (q - s.point).norm())
            .fold(1.0 - s.point.norm(), f64::min);
        let first_radius = (nearest / 4.0).min(2f64.powi(-8));
        let i = Complex64::new(0.0, 1.0);
        // (object, predicted order, predicted residue)
        let mut predictions: Vec<(CharacterObject, f64, Option<Complex64>)> = Vec::new();
        match (f.variant(), s.source) {
            (Variant::U1(m), SingularitySource::PoleOfForm) => {
                let a = m.form.poles().iter().find(|p| p.location == s.point).map_or(s.theta, |p| p.residue.re);
                predictions.push((CharacterObject::Omega, -1.0, Some(Complex64::new(a, 0.0))));
            }
            (Variant::L0(m), SingularitySource::PoleOfForm) => {
                let r = m.form.poles().iter().find(|p| p.location == s.point).map_or(0.0, |p| -p.residue.im);
                predictions.push((CharacterObject::Omega, -1.0, Some(-i * r * m.scale)));
                predictions.push((CharacterObject::Connection, -1.0, Some(Complex64::new(-1.0, 0.0))));
            }
            (Variant::L0(_), SingularitySource::ZeroOfForm) => {
                predictions.push((CharacterObject::Omega, s.order as f64, None));
                predictions.push((CharacterObject::Connection, -1.0, Some(Complex64::new(s.order as f64, 0.0))));
            }
            (Variant::Blaschke(b), SingularitySource::CriticalPoint) => {
                predictions.push((CharacterObject::Differential, s.order as f64, None));
                let zero_mult = b
                    .zeros
                    .iter()
                    .filter(|(w, _)| (w - s.point).norm() < 1e-8)
                    .map(|(_, m)| *m)
                    .sum::<u32>();
                if zero_mult > 0 {
                    predictions.push((CharacterObject::Omega, -1.0, Some(Complex64::new(zero_mult as f64, 0.0))));
                } else {
                    predictions.push((CharacterObject::Omega, s.order as f64, None));
                }
            }
            (_, SingularitySource::ZeroOfForm) => {
                predictions.push((CharacterObject::Omega, s.order as f64, None));
            }
            _ => {}
        }
        if quadratic {
            predictions.push((CharacterObject::Quadratic, 2.0 * (s.theta - 1.0), None));
        }

        let mut checks = Vec::new();
        for (object, predicted_order, predicted_residue) in predictions {
            let g = coefficient(f, object);
            let (slope, residue) = measure(&g, s.point, first_radius)?;
            if (slope - predicted_order).abs() > ORDER_TOL {
                return Err(Error::OrderMismatch {
                    point: format!("{} ({})", s.point, object.name()),
                    predicted: predicted_order,
                    measured: slope,
                });
            }
            checks.push(ObjectCheck {
                object,
                predicted_order,
                measured_slope: slope,
                measured_order: half_round(slope),
                measured_residue: predicted_residue.map(|_| residue),
                predicted_residue,
            });
        }
        rows.push(DivisorRow { point: s.point, theta: s.theta, kind: s.kind, checks });
    }

    let quadratic = quadratic.then(|| {
        let q_checks = rows.iter().flat_map(|r| r.checks.iter()).filter(|c| c.object == CharacterObject::Quadratic);
        QuadraticBalance {
            divisor: rows.iter().map(|r| 2.0 * (r.theta - 1.0)).sum(),
            predicted: q_checks.clone().map(|c| c.predicted_order).sum(),
            measured: q_checks.map(|c| c.measured_order).sum(),
        }
    });
    Ok(DivisorTable { rows, quadratic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::developing::{blaschke, build_l0_map, build_u1_family};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[i64]) -> RationalMap {
        RationalMap::polynomial(QPoly::from_i64(coeffs)).unwrap()
    }

    #[test]
    fn identity_map() {
        let rep = residue_audit(&poly(&[0, 1])).unwrap();
        assert!(rep.finite_residues.is_empty());
        assert_eq!(rep.infinity_value(), -2);
        assert_eq!(rep.total, -2);
        assert!(rep.pass);
    }

    #[test]
    fn square_map() {
        let rep = residue_audit(&poly(&[0, 0, 1])).unwrap();
        assert_eq!(rep.finite_residues.len(), 1);
        assert_eq!(rep.finite_residues[0].residue, 1);
        assert_eq!(rep.finite_residues[0].point, Point::Finite(c(0.0, 0.0)));
        assert_eq!(rep.infinity_value(), -3);
        assert!(rep.pass);
    }

    #[test]
    fn joukowski_map() {
        let f = RationalMap::new(QPoly::from_i64(&[1, 0, 1]), QPoly::from_i64(&[0, 1])).unwrap();
        let res = affine_connection_of(&f).unwrap();
        let find = |z: Complex64| res.iter().find(|r| r.point.coincides(&Point::Finite(z), 1e-12)).unwrap().residue;
        assert_eq!(find(c(1.0, 0.0)), 1);
        assert_eq!(find(c(-1.0, 0.0)), 1);
        assert_eq!(find(c(0.0, 0.0)), -2);
        assert_eq!(res.iter().find(|r| r.point.is_infinity()).unwrap().residue, -2);
        assert_eq!(res.iter().map(|r| r.residue).sum::<i64>(), -2);
    }

    #[test]
    fn constant_and_common_factor() {
        assert_eq!(RationalMap::polynomial(QPoly::from_i64(&[3])), Err(Error::ConstantMap));
        assert_eq!(
            RationalMap::new(QPoly::from_i64(&[2, 2]), QPoly::from_i64(&[1, 1])),
            Err(Error::NotCoprime)
        );
    }

    #[test]
    fn random_maps_pass() {
        for seed in 0..20 {
            let f = random_rational_map(seed, 6);
            let rep = residue_audit(&f).unwrap();
            assert!(rep.pass, "seed {seed}: {rep:?}");
        }
    }

    #[test]
    fn heins_examples() {
        let cusps = Divisor::new((0..3).map(|k| (format!("p{k}"), 0.0)).collect()).unwrap();
        let r = heins_admissible(0, &cusps);
        assert_eq!((r.slack, r.admissible), (-1.0, true));
        let r = heins_admissible(1, &Divisor::empty());
        assert_eq!((r.slack, r.admissible), (0.0, false));
        let r = heins_admissible(2, &Divisor::empty());
        assert_eq!((r.slack, r.admissible), (-2.0, true));
        assert!(Divisor::new(vec![("p".into(), 1.0)]).is_err());
    }

    #[test]
    fn divisor_table_u1() {
        let f = build_u1_family(&[(c(0.0, 0.0), 0.5)], vec![], c(0.5, 0.0)).unwrap().member(0.3).unwrap();
        let t = divisor_table_audit(&f).unwrap();
        let row = &t.rows[0];
        let omega = row.checks.iter().find(|k| k.object == CharacterObject::Omega).unwrap();
        assert_eq!(omega.measured_order, -1.0);
        assert!((omega.measured_residue.unwrap() - c(0.5, 0.0)).norm() < 1e-9);
        let q = row.checks.iter().find(|k| k.object == CharacterObject::Quadratic).unwrap();
        assert_eq!(q.measured_order, -1.0);
        assert!(t.pass());
    }

    #[test]
    fn divisor_table_l0() {
        let f = build_l0_map(&[(c(0.0, 0.0), 1.0)], 1.0, 1.0, c(0.5, 0.0)).unwrap();
        let t = divisor_table_audit(&f).unwrap();
        let row = &t.rows[0];
        let omega = row.checks.iter().find(|k| k.object == CharacterObject::Omega).unwrap();
        assert!((omega.measured_residue.unwrap() - c(0.0, -1.0)).norm() < 1e-9);
        let h = row.checks.iter().find(|k| k.object == CharacterObject::Connection).unwrap();
        assert!((h.measured_residue.unwrap() - c(-1.0, 0.0)).norm() < 1e-9);
        assert!(t.quadratic.is_none());
    }

    #[test]
    fn divisor_table_blaschke() {
        let f = blaschke(&[(c(0.0, 0.0), 2)], c(1.0, 0.0)).unwrap();
        let t = divisor_table_audit(&f).unwrap();
        let row = &t.rows[0];
        let df = row.checks.iter().find(|k| k.object == CharacterObject::Differential).unwrap();
        assert_eq!(df.measured_order, 1.0);
        let q = row.checks.iter().find(|k| k.object == CharacterObject::Quadratic).unwrap();
        assert_eq!(q.measured_order, 2.0);
        assert_eq!(t.quadratic.unwrap().divisor, 2.0);
        assert!(t.pass());
    }
}
