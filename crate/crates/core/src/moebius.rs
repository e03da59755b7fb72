//! PSL(2,R) acting on the upper half-plane, and its Cayley transfer to
//! PSU(1,1) acting on the unit disc.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Trace tolerance separating parabolic elements from elliptic/hyperbolic ones.
pub const TRACE_TOL: f64 = 1e-9;

/// Determinant tolerance after normalization.
pub const DET_TOL: f64 = 1e-12;

/// Beyond this modulus a computed fixed point is treated as infinity.
const FAR_POINT: f64 = 1e12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point of the Riemann sphere, used for H ∪ R ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn real(x: f64) -> Self {
        Point::Finite(Complex64::new(x, 0.0))
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            Point::Finite(z) => Some(*z),
            Point::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    /// Chordal distance on the Riemann sphere (diameter 2).
    pub fn chordal_distance(&self, other: &Point) -> f64 {
        match (self, other) {
            (Point::Infinity, Point::Infinity) => 0.0,
            (Point::Finite(z), Point::Infinity) | (Point::Infinity, Point::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (Point::Finite(z), Point::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }

    pub fn coincides(&self, other: &Point, tol: f64) -> bool {
        self.chordal_distance(other) <= tol
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        if z.is_finite() && z.norm() < FAR_POINT {
            Point::Finite(z)
        } else {
            Point::Infinity
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

/// Trace trichotomy of a non-identity element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementType {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Fixed points of an element acting on H ∪ R ∪ {∞}.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedSet {
    pub boundary: Vec<Point>,
    pub interior: Option<Complex64>,
    pub whole: bool,
}

/// A normalized real 2×2 matrix of determinant one, taken modulo ±I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Normalizes `[[a, b], [c, d]]` to determinant one and canonical sign.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::NonPositiveDeterminant(det));
        }
        let k = det.sqrt().recip();
        Ok(MoebiusMap { a: a * k, b: b * k, c: c * k, d: d * k }.sign_canonical())
    }

    pub fn from_rows(m: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    /// `z ↦ z + t`
    pub fn translation(t: f64) -> Self {
        MoebiusMap { a: 1.0, b: t, c: 0.0, d: 1.0 }
    }

    /// `diag(a, 1/a)` for `a > 0`, i.e. `z ↦ a² z`.
    pub fn diagonal(a: f64) -> Result<Self> {
        Self::new(a, 0.0, 0.0, a.recip())
    }

    /// The rotation block `(cos t, sin t; −sin t, cos t)` fixing `i`.
    pub fn rotation(t: f64) -> Self {
        let (s, c) = t.sin_cos();
        MoebiusMap { a: c, b: s, c: -s, d: c }.sign_canonical()
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }.sign_canonical()
    }

    /// `h · self · h⁻¹`
    pub fn conjugate_by(&self, h: &MoebiusMap) -> Self {
        *h * *self * h.inverse()
    }

    fn scale(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    fn sign_canonical(self) -> Self {
        let zero = 1e-14 * self.scale();
        let lead = [self.a, self.b, self.c]
            .into_iter()
            .find(|x| x.abs() > zero)
            .unwrap_or(self.d);
        if lead < 0.0 {
            MoebiusMap { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    /// Entrywise distance to the identity, modulo sign.
    pub fn distance_to_identity(&self) -> f64 {
        let plus = (self.a - 1.0).abs().max(self.b.abs()).max(self.c.abs()).max((self.d - 1.0).abs());
        let minus = (self.a + 1.0).abs().max(self.b.abs()).max(self.c.abs()).max((self.d + 1.0).abs());
        plus.min(minus)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance_to_identity() <= tol
    }

    /// Spectral-norm distance between the two matrices, minimized over the sign ambiguity.
    pub fn operator_distance(&self, other: &MoebiusMap) -> f64 {
        let d1 = spectral_norm(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d);
        let d2 = spectral_norm(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d);
        d1.min(d2)
    }

    pub fn classify(&self) -> ElementType {
        self.classify_with(TRACE_TOL)
    }

    pub fn classify_with(&self, trace_tol: f64) -> ElementType {
        if self.is_identity(trace_tol) {
            return ElementType::Identity;
        }
        let t = self.trace().abs();
        if (t - 2.0).abs() <= trace_tol {
            ElementType::Parabolic
        } else if t < 2.0 {
            ElementType::Elliptic
        } else {
            ElementType::Hyperbolic
        }
    }

    /// Solves `cz² + (d−a)z − b = 0` projectively; real roots are boundary points,
    /// the root with positive imaginary part is the interior fixed point.
    pub fn fixed_points(&self) -> Result<FixedSet> {
        self.fixed_points_with(TRACE_TOL)
    }

    pub fn fixed_points_with(&self, trace_tol: f64) -> Result<FixedSet> {
        let MoebiusMap { a, b, c, d } = *self;
        match self.classify_with(trace_tol) {
            ElementType::Identity => Err(Error::IdentityHasAllPoints),
            ElementType::Parabolic => {
                // Double eigenvalue ±1; the eigenvector is the larger of the two
                // candidate columns of g − λI.
                let lam = if self.trace() >= 0.0 { 1.0 } else { -1.0 };
                let p = eigen_point(a, b, c, d, lam);
                Ok(FixedSet { boundary: vec![p], interior: None, whole: false })
            }
            ElementType::Hyperbolic => {
                let tr = self.trace();
                let root = (tr * tr - 4.0).sqrt();
                let l1 = 0.5 * (tr + root);
                let l2 = 0.5 * (tr - root);
                let p1 = eigen_point(a, b, c, d, l1);
                let p2 = eigen_point(a, b, c, d, l2);
                Ok(FixedSet { boundary: vec![p1, p2], interior: None, whole: false })
            }
            ElementType::Elliptic => {
                // c ≠ 0 for elliptic elements.
                let tr = self.trace();
                let im = (4.0 - tr * tr).max(0.0).sqrt() * 0.5;
                let lam = Complex64::new(0.5 * tr, im.copysign(c));
                let z = (lam - d) / c;
                Ok(FixedSet { boundary: vec![], interior: Some(z), whole: false })
            }
        }
    }

    pub fn apply(&self, z: Point) -> Point {
        let MoebiusMap { a, b, c, d } = *self;
        match z {
            Point::Infinity => {
                if c == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite(Complex64::new(a / c, 0.0))
                }
            }
            Point::Finite(z) => {
                let den = c * z + d;
                if den == Complex64::new(0.0, 0.0) {
                    Point::Infinity
                } else {
                    Point::Finite((a * z + b) / den)
                }
            }
        }
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// A map sending `i` to `p` (upper triangular, `p` in H).
    pub fn moving_i_to(p: Complex64) -> Result<Self> {
        if !(p.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane(Point::Finite(p).to_string()));
        }
        let s = p.im.sqrt();
        Self::new(s, p.re / s, 0.0, 1.0 / s)
    }

    /// A rotation sending `∞` to the boundary point `p`. Orthogonal, so it stays
    /// well conditioned and tends to the identity as `p → ∞`.
    pub fn moving_infinity_to(p: Point) -> Self {
        match p {
            Point::Infinity => MoebiusMap::IDENTITY,
            Point::Finite(z) => {
                let n = z.re.hypot(1.0);
                MoebiusMap { a: z.re / n, b: -1.0 / n, c: 1.0 / n, d: z.re / n }.sign_canonical()
            }
        }
    }

    /// A map sending `0` and `∞` to the unordered boundary pair `{p, q}`.
    pub fn moving_zero_infinity_to(p: Point, q: Point) -> Self {
        match (p, q) {
            (Point::Infinity, Point::Infinity) => MoebiusMap::IDENTITY,
            (Point::Finite(x), Point::Infinity) | (Point::Infinity, Point::Finite(x)) => {
                MoebiusMap::translation(x.re)
            }
            (Point::Finite(x), Point::Finite(y)) => {
                let (lo, hi) = if x.re <= y.re { (x.re, y.re) } else { (y.re, x.re) };
                // ∞ ↦ hi by a rotation, then shift so that 0 ↦ lo.
                let r = MoebiusMap::moving_infinity_to(Point::real(hi));
                match r.inverse().apply(Point::real(lo)) {
                    Point::Finite(t) => r * MoebiusMap::translation(t.re),
                    Point::Infinity => MoebiusMap::IDENTITY,
                }
            }
        }
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, r: MoebiusMap) -> MoebiusMap {
        let l = self;
        MoebiusMap {
            a: l.a * r.a + l.b * r.c,
            b: l.a * r.b + l.b * r.d,
            c: l.c * r.a + l.d * r.c,
            d: l.c * r.b + l.d * r.d,
        }
        .sign_canonical()
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

fn spectral_norm(a: f64, b: f64, c: f64, d: f64) -> f64 {
    0.5 * ((a + d).hypot(b - c) + (a - d).hypot(b + c))
}

fn eigen_point(a: f64, b: f64, c: f64, d: f64, lam: f64) -> Point {
    // (g − λI)v = 0 with v = (x, y); candidates (b, λ−a) and (λ−d, c).
    let (x1, y1) = (b, lam - a);
    let (x2, y2) = (lam - d, c);
    let (x, y) = if x1.hypot(y1) >= x2.hypot(y2) { (x1, y1) } else { (x2, y2) };
    if y == 0.0 || (x / y).abs() > FAR_POINT {
        Point::Infinity
    } else {
        Point::real(x / y)
    }
}

/// A complex 2×2 matrix; used for the disc-model (PSU(1,1)) side of the Cayley transfer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl ComplexMat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        ComplexMat2 { a, b, c, d }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Rescales to determinant one.
    pub fn normalized(&self) -> Self {
        let k = self.det().sqrt().inv();
        ComplexMat2 { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `z ↦ e^{iθ} z`
    pub fn disc_rotation(theta: f64) -> Self {
        let h = Complex64::from_polar(1.0, 0.5 * theta);
        ComplexMat2 { a: h, b: Complex64::new(0.0, 0.0), c: Complex64::new(0.0, 0.0), d: h.conj() }
    }

    /// `|α|² − |β|²` for the PSU(1,1) shape `[[α, β], [β̄, ᾱ]]`.
    pub fn su11_form(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// Largest deviation from the shape `[[α, β], [β̄, ᾱ]]`.
    pub fn su11_defect(&self) -> f64 {
        (self.d - self.a.conj()).norm().max((self.c - self.b.conj()).norm())
    }

    /// Distance to `other` modulo sign, in the max-entry norm.
    pub fn distance(&self, other: &ComplexMat2) -> f64 {
        let diff = |s: f64| {
            (self.a - other.a * s)
                .norm()
                .max((self.b - other.b * s).norm())
                .max((self.c - other.c * s).norm())
                .max((self.d - other.d * s).norm())
        };
        diff(1.0).min(diff(-1.0))
    }
}

impl Mul for ComplexMat2 {
    type Output = ComplexMat2;

    fn mul(self, r: ComplexMat2) -> ComplexMat2 {
        let l = self;
        ComplexMat2 {
            a: l.a * r.a + l.b * r.c,
            b: l.a * r.b + l.b * r.d,
            c: l.c * r.a + l.d * r.c,
            d: l.c * r.b + l.d * r.d,
        }
    }
}

/// `C(z) = (z − i)/(z + i)`, from the closed upper half-plane to the closed disc.
pub fn cayley_point(z: Point) -> Result<Complex64> {
    match z {
        Point::Infinity => Ok(Complex64::new(1.0, 0.0)),
        Point::Finite(z) => {
            if z.im < 0.0 {
                return Err(Error::NotInUpperHalfPlane(Point::Finite(z).to_string()));
            }
            Ok((z - I) / (z + I))
        }
    }
}

/// Inverse Cayley transform `w ↦ i(1 + w)/(1 − w)`.
pub fn cayley_point_inverse(w: Complex64) -> Result<Point> {
    if w.norm() > 1.0 + 1e-12 {
        return Err(Error::NotInDisc(Point::Finite(w).to_string()));
    }
    let one = Complex64::new(1.0, 0.0);
    if w == one {
        return Ok(Point::Infinity);
    }
    Ok(Point::Finite(I * (one + w) / (one - w)))
}

fn cayley_matrix() -> ComplexMat2 {
    ComplexMat2::new(Complex64::new(1.0, 0.0), -I, Complex64::new(1.0, 0.0), I)
}

fn cayley_matrix_inverse() -> ComplexMat2 {
    // (1/2i) [[i, i], [−1, 1]]
    let k = (2.0 * I).inv();
    ComplexMat2::new(I * k, I * k, -k, k)
}

/// Conjugates a real map to its disc-model counterpart `C g C⁻¹`.
pub fn cayley_map(g: &MoebiusMap) -> ComplexMat2 {
    let [a, b, c, d] = g.entries();
    let g = ComplexMat2::new(a.into(), b.into(), c.into(), d.into());
    (cayley_matrix() * g * cayley_matrix_inverse()).normalized()
}

/// Transfers a disc automorphism back to PSL(2,R).
pub fn cayley_map_inverse(m: &ComplexMat2) -> Result<MoebiusMap> {
    let r = (cayley_matrix_inverse() * m.normalized() * cayley_matrix()).normalized();
    // Real up to a global phase of ±1 or ±i; rotate so the largest entry is real.
    let lead = [r.a, r.b, r.c, r.d]
        .into_iter()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    let r = ComplexMat2::new(r.a * phase, r.b * phase, r.c * phase, r.d * phase);
    let imag = r.a.im.abs().max(r.b.im.abs()).max(r.c.im.abs()).max(r.d.im.abs());
    let scale = r.a.norm().max(r.b.norm()).max(r.c.norm()).max(r.d.norm());
    if imag > 1e-9 * scale.max(1.0) {
        return Err(Error::NotRealUnderCayley(imag));
    }
    MoebiusMap::new(r.a.re, r.b.re, r.c.re, r.d.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn normalize_scalar_and_minus_identity() {
        assert!(MoebiusMap::new(2.0, 0.0, 0.0, 2.0).unwrap().is_identity(1e-15));
        assert_eq!(MoebiusMap::new(-1.0, 0.0, 0.0, -1.0).unwrap(), MoebiusMap::IDENTITY);
        let g = MoebiusMap::new(4.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(g.entries(), [2.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn normalize_rejects_orientation_reversing() {
        assert!(matches!(MoebiusMap::new(1.0, 0.0, 0.0, -1.0), Err(Error::NonPositiveDeterminant(_))));
        assert!(matches!(MoebiusMap::new(1.0, 1.0, 1.0, 1.0), Err(Error::NonPositiveDeterminant(_))));
    }

    #[test]
    fn sign_canonical_first_nonzero_positive() {
        let g = MoebiusMap::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(g.entries(), [0.0, 1.0, -1.0, 0.0]);
        assert!(close(g.det(), 1.0, DET_TOL));
    }

    #[test]
    fn element_types() {
        assert_eq!(MoebiusMap::translation(1.0).classify(), ElementType::Parabolic);
        assert_eq!(MoebiusMap::rotation(PI / 4.0).classify(), ElementType::Elliptic);
        assert_eq!(MoebiusMap::diagonal(2.0).unwrap().classify(), ElementType::Hyperbolic);
        assert_eq!(MoebiusMap::IDENTITY.classify(), ElementType::Identity);
    }

    #[test]
    fn fixed_point_examples() {
        let fs = MoebiusMap::translation(1.0).fixed_points().unwrap();
        assert_eq!(fs.boundary, vec![Point::Infinity]);

        let fs = MoebiusMap::diagonal(2.0).unwrap().fixed_points().unwrap();
        assert_eq!(fs.boundary.len(), 2);
        assert!(fs.boundary.iter().any(|p| p.is_infinity()));
        assert!(fs.boundary.iter().any(|p| p.coincides(&Point::real(0.0), 1e-15)));

        // −sin t·z² + sin t = 0 ⇒ z = i; check by substitution.
        let g = MoebiusMap::rotation(PI / 3.0);
        let z = g.fixed_points().unwrap().interior.unwrap();
        assert!((z - I).norm() < 1e-14);
        assert!((g.apply_complex(z) - z).norm() < 1e-14);

        assert_eq!(MoebiusMap::IDENTITY.fixed_points(), Err(Error::IdentityHasAllPoints));
    }

    #[test]
    fn apply_examples() {
        let t = MoebiusMap::translation(1.0);
        assert_eq!(t.apply(Point::Finite(I)), Point::Finite(Complex64::new(1.0, 1.0)));
        let s = MoebiusMap::diagonal(2.0).unwrap();
        assert_eq!(s.apply(Point::Finite(I)), Point::Finite(Complex64::new(0.0, 4.0)));
        let j = MoebiusMap::new(0.0, 1.0, -1.0, 0.0).unwrap();
        assert_eq!(j.apply(Point::real(0.0)), Point::Infinity);
        assert_eq!(j.apply(Point::Infinity), Point::real(0.0));
    }

    #[test]
    fn cayley_examples() {
        assert!(cayley_point(Point::Finite(I)).unwrap().norm() < 1e-15);
        assert_eq!(cayley_point(Point::Infinity).unwrap(), Complex64::new(1.0, 0.0));
        assert!(cayley_point(Point::Finite(Complex64::new(0.0, -1.0))).is_err());

        // A rotation about i becomes a disc map fixing 0, with multiplier e^{2it}.
        let t = 0.7;
        let m = cayley_map(&MoebiusMap::rotation(t));
        assert!(m.apply(Complex64::new(0.0, 0.0)).norm() < 1e-14);
        let w = Complex64::new(0.3, 0.0);
        let expected = Complex64::from_polar(1.0, 2.0 * t) * w;
        assert!((m.apply(w) - expected).norm() < 1e-14);
        assert!(close(m.su11_form(), 1.0, 1e-12));
        assert!(m.su11_defect() < 1e-12);
    }

    #[test]
    fn cayley_round_trip() {
        let g = MoebiusMap::new(3.0, 1.0, -0.5, 0.2).unwrap();
        let back = cayley_map_inverse(&cayley_map(&g)).unwrap();
        assert!(back.operator_distance(&g) < 1e-12);

        let z = Complex64::new(-0.4, 2.5);
        let w = cayley_point(Point::Finite(z)).unwrap();
        let zz = cayley_point_inverse(w).unwrap().finite().unwrap();
        assert!((zz - z).norm() < 1e-12);
    }

    #[test]
    fn disc_rotation_transfers_to_rotation_block() {
        let m = cayley_map_inverse(&ComplexMat2::disc_rotation(PI)).unwrap();
        assert!(m.trace().abs() < 1e-12);
        assert!(m.operator_distance(&MoebiusMap::rotation(PI / 2.0)) < 1e-12);
    }
}
