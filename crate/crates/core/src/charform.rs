//! Meromorphic 1-forms `ω = (Σ rⱼ/(z − zⱼ) + h(z)) dz` on the unit disc, with
//! finitely many simple poles and a polynomial part `h`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{ComplexPoly, ROOT_CLUSTER_TOL};

/// Minimum distance a path must keep from every pole.
pub const PATH_CLEARANCE: f64 = 1e-6;

/// Default absolute tolerance of path integrals.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Bisection depth after which quadrature gives up.
pub const MAX_DEPTH: u32 = 40;

const MIN_POLE_SEPARATION: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A simple pole and its residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub residue: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterForm {
    poles: Vec<Pole>,
    entire_part: ComplexPoly,
}

/// A piecewise-linear path; a closed polyline has an implicit edge from the
/// last vertex back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Complex64>,
    closed: bool,
}

impl Polyline {
    pub fn new(vertices: Vec<Complex64>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidPath("need at least two vertices".into()));
        }
        if vertices.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidPath("non-finite vertex".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPath("consecutive vertices coincide".into()));
        }
        if closed && vertices.first() == vertices.last() {
            return Err(Error::InvalidPath("closed polyline repeats its first vertex".into()));
        }
        Ok(Polyline { vertices, closed })
    }

    pub fn open(vertices: Vec<Complex64>) -> Result<Self> {
        Self::new(vertices, false)
    }

    pub fn closed(vertices: Vec<Complex64>) -> Result<Self> {
        Self::new(vertices, true)
    }

    /// A circle sampled at `n ≥ 3` vertices, starting at `center + radius·e^{i·phase}`,
    /// traversed counterclockwise.
    pub fn circle(center: Complex64, radius: f64, n: usize, phase: f64) -> Result<Self> {
        if n < 3 || !(radius > 0.0) {
            return Err(Error::InvalidPath("circle needs n ≥ 3 and positive radius".into()));
        }
        let vertices = (0..n)
            .map(|k| center + Complex64::from_polar(radius, phase + 2.0 * PI * k as f64 / n as f64))
            .collect();
        Self::closed(vertices)
    }

    /// A closed loop based at `base`: out along a straight spoke, `turns` times
    /// around the circle (negative for clockwise), and back along the spoke.
    pub fn lasso(base: Complex64, center: Complex64, radius: f64, n: usize, turns: i32) -> Result<Self> {
        if n < 3 || turns == 0 {
            return Err(Error::InvalidPath("lasso needs n ≥ 3 and nonzero turns".into()));
        }
        let dir = base - center;
        let phase = if dir.norm() > 0.0 { dir.arg() } else { 0.0 };
        let sign = turns.signum() as f64;
        let attach = center + Complex64::from_polar(radius, phase);
        let mut v = vec![base];
        if (attach - base).norm() > 0.0 {
            v.push(attach);
        }
        let total = n * turns.unsigned_abs() as usize;
        for k in 1..total {
            v.push(center + Complex64::from_polar(radius, phase + sign * 2.0 * PI * k as f64 / n as f64));
        }
        if (attach - base).norm() > 0.0 {
            v.push(attach);
        }
        // Drop the trailing attach point if it would duplicate the base.
        if v.len() >= 2 && v.last() == v.first() {
            v.pop();
        }
        Self::closed(v)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    /// Final point; for closed loops this is the start.
    pub fn end(&self) -> Complex64 {
        if self.closed {
            self.vertices[0]
        } else {
            *self.vertices.last().expect("nonempty")
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.vertices.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        if self.closed {
            v[1..].reverse();
        } else {
            v.reverse();
        }
        Polyline { vertices: v, closed: self.closed }
    }

    /// Concatenation of two paths where `self` ends where `other` starts.
    /// Two loops with a common base point concatenate to a loop.
    pub fn then(&self, other: &Polyline) -> Result<Self> {
        if (self.end() - other.start()).norm() > 1e-14 {
            return Err(Error::InvalidPath("paths do not join".into()));
        }
        let mut v = self.vertices.clone();
        if self.closed {
            v.push(self.vertices[0]);
        }
        v.extend(other.vertices.iter().skip(1).copied());
        if other.closed {
            v.push(other.vertices[0]);
        }
        v.dedup();
        if self.closed && other.closed {
            v.pop();
            return Self::closed(v);
        }
        Self::open(v)
    }

    /// Signed crossing count of the closed polyline around `p`.
    pub fn winding_number(&self, p: Complex64) -> i64 {
        let mut wn = 0i64;
        for (a, b) in self.segments() {
            let side = (b.re - a.re) * (p.im - a.im) - (p.re - a.re) * (b.im - a.im);
            if a.im <= p.im {
                if b.im > p.im && side > 0.0 {
                    wn += 1;
                }
            } else if b.im <= p.im && side < 0.0 {
                wn -= 1;
            }
        }
        wn
    }

    /// Smallest distance from `p` to the path.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.segments().map(|(a, b)| segment_distance(a, b, p)).fold(f64::INFINITY, f64::min)
    }
}

pub fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}

impl CharacterForm {
    pub fn new(poles: Vec<Pole>, entire_part: Vec<Complex64>) -> Result<Self> {
        for (i, p) in poles.iter().enumerate() {
            if !(p.location.norm() < 1.0) {
                return Err(Error::InvalidParameter(format!("pole {} outside the unit disc", p.location)));
            }
            if let Some(q) = poles[i + 1..]
                .iter()
                .find(|q| (q.location - p.location).norm() <= MIN_POLE_SEPARATION)
            {
                return Err(Error::CoincidentPoles(p.location.to_string(), q.location.to_string()));
            }
        }
        Ok(CharacterForm { poles, entire_part: ComplexPoly::new(entire_part) })
    }

    /// Convenience constructor from `(location, residue)` pairs.
    pub fn from_pairs(pairs: &[(Complex64, Complex64)], entire_part: Vec<Complex64>) -> Result<Self> {
        Self::new(
            pairs.iter().map(|&(location, residue)| Pole { location, residue }).collect(),
            entire_part,
        )
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn entire_part(&self) -> &ComplexPoly {
        &self.entire_part
    }

    pub fn pole_locations(&self) -> Vec<Complex64> {
        self.poles.iter().map(|p| p.location).collect()
    }

    /// Coefficient of `dz` at `z`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.entire_part.eval(z);
        for p in &self.poles {
            let dz = z - p.location;
            if dz.norm() == 0.0 {
                return Err(Error::EvaluationAtPole(p.location.to_string()));
            }
            acc += p.residue / dz;
        }
        Ok(acc)
    }

    fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.poles
            .iter()
            .fold(self.entire_part.eval(z), |acc, p| acc + p.residue / (z - p.location))
    }

    /// Derivative of the coefficient function.
    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.entire_part.derivative().eval(z);
        for p in &self.poles {
            let dz = z - p.location;
            if dz.norm() == 0.0 {
                return Err(Error::EvaluationAtPole(p.location.to_string()));
            }
            acc -= p.residue / (dz * dz);
        }
        Ok(acc)
    }

    /// `Σ rⱼ Log(z − zⱼ) + ∫₀ᶻ h`, with principal logarithms.
    pub fn principal_primitive(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.entire_part.integral().eval(z);
        for p in &self.poles {
            let dz = z - p.location;
            if dz.norm() == 0.0 {
                return Err(Error::EvaluationAtPole(p.location.to_string()));
            }
            acc += p.residue * dz.ln();
        }
        Ok(acc)
    }

    /// Rejects paths that come within [`PATH_CLEARANCE`] of a pole.
    pub fn check_clearance(&self, path: &Polyline) -> Result<()> {
        for p in &self.poles {
            let d = path.distance_to(p.location);
            if d < PATH_CLEARANCE {
                return Err(Error::PoleTooClose {
                    pole: p.location.to_string(),
                    distance: d,
                    clearance: PATH_CLEARANCE,
                });
            }
        }
        Ok(())
    }

    /// `∫ ω` along the path by adaptive Gauss–Kronrod quadrature, with the
    /// absolute error budget `tol` shared across segments by length.
    pub fn integrate_along(&self, path: &Polyline, tol: f64) -> Result<Complex64> {
        self.check_clearance(path)?;
        let total = path.length();
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in path.segments() {
            let share = tol * (b - a).norm() / total;
            acc += self.integrate_segment(a, b, share)?;
        }
        Ok(acc)
    }

    /// `∫ ω` along the straight segment `a → b`.
    pub fn integrate_segment(&self, a: Complex64, b: Complex64, tol: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t0, t1) in self.presplit(a, b) {
            let share = tol * (t1 - t0);
            acc += self.adaptive(a, b, t0, t1, share, 0)?;
        }
        Ok(acc)
    }

    /// Splits `[0, 1]` so that no piece is longer than its distance to the nearest pole.
    fn presplit(&self, a: Complex64, b: Complex64) -> Vec<(f64, f64)> {
        let len = (b - a).norm();
        let mut out = Vec::new();
        let mut stack = vec![(0.0f64, 1.0f64)];
        while let Some((t0, t1)) = stack.pop() {
            let za = a + (b - a) * t0;
            let zb = a + (b - a) * t1;
            let dist = self
                .poles
                .iter()
                .map(|p| segment_distance(za, zb, p.location))
                .fold(f64::INFINITY, f64::min);
            if (t1 - t0) * len > dist && t1 - t0 > 1e-12 {
                let mid = 0.5 * (t0 + t1);
                stack.push((mid, t1));
                stack.push((t0, mid));
            } else {
                out.push((t0, t1));
            }
        }
        out
    }

    fn adaptive(&self, a: Complex64, b: Complex64, t0: f64, t1: f64, tol: f64, depth: u32) -> Result<Complex64> {
        let (kronrod, err) = self.gauss_kronrod(a, b, t0, t1);
        let floor = 50.0 * f64::EPSILON * kronrod.norm();
        if err <= tol.max(floor) {
            return Ok(kronrod);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::ToleranceNotMet(tol));
        }
        let mid = 0.5 * (t0 + t1);
        Ok(self.adaptive(a, b, t0, mid, 0.5 * tol, depth + 1)? + self.adaptive(a, b, mid, t1, 0.5 * tol, depth + 1)?)
    }

    /// G7–K15 on the parameter interval `[t0, t1]` of the segment `a → b`.
    fn gauss_kronrod(&self, a: Complex64, b: Complex64, t0: f64, t1: f64) -> (Complex64, f64) {
        let dz = b - a;
        let center = a + dz * (0.5 * (t0 + t1));
        let half = dz * (0.5 * (t1 - t0));
        let f = |x: f64| self.eval_unchecked(center + half * x);
        let fc = f(0.0);
        let mut kronrod = fc * WGK[7];
        let mut gauss = fc * WG[3];
        for k in 0..7 {
            let s = f(XGK[k]) + f(-XGK[k]);
            kronrod += s * WGK[k];
            if k % 2 == 1 {
                gauss += s * WG[k / 2];
            }
        }
        let kronrod = kronrod * half;
        let gauss = gauss * half;
        (kronrod, (kronrod - gauss).norm())
    }

    /// `2πi Σ wind(loop, zⱼ)·rⱼ`, with winding numbers counted combinatorially.
    pub fn loop_residue_sum(&self, path: &Polyline) -> Result<Complex64> {
        if !path.is_closed() {
            return Err(Error::InvalidPath("residue sum needs a closed loop".into()));
        }
        self.check_clearance(path)?;
        let sum: Complex64 = self
            .poles
            .iter()
            .map(|p| p.residue * path.winding_number(p.location) as f64)
            .sum();
        Ok(2.0 * PI * I * sum)
    }

    /// Numerator after clearing denominators:
    /// `Σ rⱼ Πₖ≠ⱼ (z − zₖ) + h(z) Πₖ (z − zₖ)`.
    pub fn numerator(&self) -> ComplexPoly {
        let linear: Vec<ComplexPoly> = self.poles.iter().map(|p| ComplexPoly::linear_root(p.location)).collect();
        let full = linear
            .iter()
            .fold(ComplexPoly::constant(Complex64::new(1.0, 0.0)), |acc, l| acc.mul(l));
        let mut num = self.entire_part.mul(&full);
        for (j, p) in self.poles.iter().enumerate() {
            let others = linear
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .fold(ComplexPoly::constant(p.residue), |acc, (_, l)| acc.mul(l));
            num = num.add(&others);
        }
        num
    }

    /// Zeros of the form inside `|z| ≤ region_radius`, with orders.
    pub fn zeros_of(&self, region_radius: f64) -> Result<Vec<(Complex64, usize)>> {
        let num = self.numerator();
        let scale = self
            .poles
            .iter()
            .map(|p| p.residue.norm())
            .fold(self.entire_part.max_coeff(), f64::max);
        if num.is_zero() || num.max_coeff() <= 1e-14 * scale || scale == 0.0 {
            return Err(Error::DegenerateForm);
        }
        Ok(num
            .roots_with_multiplicity(ROOT_CLUSTER_TOL)
            .into_iter()
            .filter(|(z, _)| z.norm() <= region_radius)
            .collect())
    }
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn form(pairs: &[(f64, f64, f64)], entire: Vec<Complex64>) -> CharacterForm {
        CharacterForm::from_pairs(
            &pairs.iter().map(|&(x, y, r)| (c(x, y), c(r, 0.0))).collect::<Vec<_>>(),
            entire,
        )
        .unwrap()
    }

    #[test]
    fn gauss_kronrod_rules_are_exact_on_polynomials() {
        // K15 integrates degree 22 exactly on the segment 0 → 1, G7 degree 13.
        let w = CharacterForm::new(vec![], {
            let mut v = vec![c(0.0, 0.0); 23];
            v[22] = c(1.0, 0.0);
            v
        })
        .unwrap();
        let (k, _) = w.gauss_kronrod(c(0.0, 0.0), c(1.0, 0.0), 0.0, 1.0);
        assert!((k - c(1.0 / 23.0, 0.0)).norm() < 1e-15);
        let w = CharacterForm::new(vec![], {
            let mut v = vec![c(0.0, 0.0); 14];
            v[13] = c(1.0, 0.0);
            v
        })
        .unwrap();
        let (k, err) = w.gauss_kronrod(c(0.0, 0.0), c(1.0, 0.0), 0.0, 1.0);
        assert!((k - c(1.0 / 14.0, 0.0)).norm() < 1e-15);
        assert!(err < 1e-15);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(form(&[(0.0, 0.0, 1.0)], vec![]).eval(c(0.5, 0.0)).unwrap(), c(2.0, 0.0));
        let sym = form(&[(0.5, 0.0, 0.5), (-0.5, 0.0, 0.5)], vec![]);
        assert!(sym.eval(c(0.0, 0.0)).unwrap().norm() < 1e-15);
        let w = form(&[(0.0, 0.0, 1.0)], vec![c(1.0, 0.0)]);
        assert_eq!(w.eval(c(0.5, 0.0)).unwrap(), c(3.0, 0.0));
        assert!(matches!(w.eval(c(0.0, 0.0)), Err(Error::EvaluationAtPole(_))));
    }

    #[test]
    fn integrate_examples() {
        let circle = Polyline::circle(c(0.0, 0.0), 0.5, 64, 0.0).unwrap();
        let w = form(&[(0.0, 0.0, 1.0)], vec![]);
        assert!((w.integrate_along(&circle, DEFAULT_TOL).unwrap() - c(0.0, 2.0 * PI)).norm() < 1e-10);
        let w = form(&[(0.0, 0.0, 0.5)], vec![]);
        assert!((w.integrate_along(&circle, DEFAULT_TOL).unwrap() - c(0.0, PI)).norm() < 1e-10);
        let w = form(&[], vec![c(0.0, 0.0), c(2.0, 0.0)]);
        let seg = Polyline::open(vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!((w.integrate_along(&seg, DEFAULT_TOL).unwrap() - c(0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn integrate_rejects_close_paths() {
        let w = form(&[(0.0, 0.0, 1.0)], vec![]);
        let seg = Polyline::open(vec![c(-0.5, 1e-8), c(0.5, 1e-8)]).unwrap();
        assert!(matches!(w.integrate_along(&seg, DEFAULT_TOL), Err(Error::PoleTooClose { .. })));
    }

    #[test]
    fn residue_sums() {
        let w = form(&[(0.3, 0.0, 0.5), (-0.3, 0.0, 1.0 / 3.0)], vec![]);
        let away = Polyline::circle(c(0.0, 0.6), 0.1, 16, 0.0).unwrap();
        assert_eq!(w.loop_residue_sum(&away).unwrap(), c(0.0, 0.0));
        let once = Polyline::circle(c(0.3, 0.0), 0.1, 16, 0.0).unwrap();
        assert!((w.loop_residue_sum(&once).unwrap() - c(0.0, PI)).norm() < 1e-15);

        // Figure eight: counterclockwise about 0.3, clockwise about −0.3.
        let mut v = vec![c(0.0, 0.0)];
        for k in 1..32 {
            let t = PI + 2.0 * PI * k as f64 / 32.0;
            v.push(c(0.3, 0.0) + Complex64::from_polar(0.3, t));
        }
        v.push(c(0.0, 0.0));
        for k in 1..32 {
            let t = -2.0 * PI * k as f64 / 32.0;
            v.push(c(-0.3, 0.0) + Complex64::from_polar(0.3, t));
        }
        v.dedup();
        let eight = Polyline::closed(v).unwrap();
        assert_eq!(eight.winding_number(c(0.3, 0.0)), 1);
        assert_eq!(eight.winding_number(c(-0.3, 0.0)), -1);
        let predicted = w.loop_residue_sum(&eight).unwrap();
        assert!((predicted - c(0.0, PI / 3.0)).norm() < 1e-14);
        let integrated = w.integrate_along(&eight, 1e-12).unwrap();
        assert!((integrated - predicted).norm() < 1e-9);
    }

    #[test]
    fn zero_examples() {
        let sym = form(&[(0.5, 0.0, 0.5), (-0.5, 0.0, 0.5)], vec![]);
        let z = sym.zeros_of(1.0).unwrap();
        assert_eq!(z.len(), 1);
        assert!(z[0].0.norm() < 1e-15 && z[0].1 == 1);

        assert!(form(&[(0.0, 0.0, 1.0)], vec![]).zeros_of(1.0).unwrap().is_empty());

        // Numerator 3z² − 1/4.
        let three = form(&[(0.0, 0.0, 1.0), (0.5, 0.0, 1.0), (-0.5, 0.0, 1.0)], vec![]);
        let z = three.zeros_of(1.0).unwrap();
        let s = 1.0 / (2.0 * 3f64.sqrt());
        assert_eq!(z.len(), 2);
        assert!((z[0].0 - c(-s, 0.0)).norm() < 1e-13);
        assert!((z[1].0 - c(s, 0.0)).norm() < 1e-13);

        let zero = form(&[(0.5, 0.0, 0.0)], vec![]);
        assert_eq!(zero.zeros_of(1.0), Err(Error::DegenerateForm));
        assert_eq!(CharacterForm::new(vec![], vec![]).unwrap().zeros_of(1.0), Err(Error::DegenerateForm));
    }

    #[test]
    fn polyline_validation_and_reversal() {
        assert!(Polyline::open(vec![c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        let p = Polyline::open(vec![c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.5)]).unwrap();
        assert_eq!(p.reversed().start(), c(0.5, 0.5));
        let l = Polyline::circle(c(0.0, 0.0), 0.5, 8, 0.0).unwrap();
        assert_eq!(l.winding_number(c(0.0, 0.0)), 1);
        assert_eq!(l.reversed().winding_number(c(0.0, 0.0)), -1);
        assert_eq!(l.reversed().start(), l.start());
    }

    #[test]
    fn lasso_winds_as_requested() {
        let base = c(0.6, 0.0);
        for turns in [-2, -1, 1, 3] {
            let l = Polyline::lasso(base, c(0.0, 0.0), 0.3, 32, turns).unwrap();
            assert_eq!(l.start(), base);
            assert_eq!(l.winding_number(c(0.0, 0.0)), turns as i64);
        }
    }
}
