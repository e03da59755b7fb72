//! Developing maps of three explicit families of singular hyperbolic metrics on
//! the disc, continued numerically along polylines.
//!
//! * `U1`: `f_λ = λ·exp(∫ω)` into the disc, where `ω` has positive real
//!   residues; monodromy is a rotation about 0.
//! * `L0`: `f = s·∫ω + iC` into the upper half-plane, where `ω` has residues
//!   `−i·rⱼ`; monodromy is a real translation and the poles are cusps.
//! * `Blaschke`: finite Blaschke products, single-valued, trivial monodromy.

use num_complex::Complex64;

use crate::charform::{segment_distance, CharacterForm, Pole, Polyline, DEFAULT_TOL, PATH_CLEARANCE};
use crate::error::{Error, Result};
use crate::moebius::{cayley_map_inverse, ComplexMat2, MoebiusMap};
use crate::poly::{ComplexPoly, ROOT_CLUSTER_TOL};

/// Resolution of the sampling grids used for sup bounds and positivity checks.
pub const CHECK_GRID: usize = 200;

/// Radius of the closed disc covered by the sampling grids.
pub const CHECK_RADIUS: f64 = 0.999;

/// Monodromy reports are accepted when continuation and residue calculus agree this well.
pub const AGREEMENT_TOL: f64 = 1e-8;

/// Largest relative defect tolerated when matching the end germ to a model automorphism.
pub const GERM_TOL: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Upper half-plane, metric `|dz|²/(Im z)²`.
    HalfPlane,
    /// Unit disc, metric `4|dz|²/(1 − |z|²)²`.
    Disc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    Cone,
    Cusp,
}

/// Where a singularity comes from in the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularitySource {
    PoleOfForm,
    ZeroOfForm,
    CriticalPoint,
}

/// A declared singular point, with cone angle `2πθ` (`θ = 0` for cusps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub point: Complex64,
    pub theta: f64,
    pub kind: SingularityKind,
    pub source: SingularitySource,
    /// Order of the zero for `ZeroOfForm`, critical multiplicity for `CriticalPoint`, 0 otherwise.
    pub order: usize,
}

/// Whether the L0 offset satisfies the closed-form bound or only the grid check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    /// `C > s·Σrⱼ·ln 2`, which bounds `Im f` below on the whole disc.
    Rigorous,
    /// Only the sampled grid was checked; not a proof near the boundary.
    GridOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct U1Map {
    pub form: CharacterForm,
    pub lambda: f64,
    pub upper: f64,
    pub base_point: Complex64,
    pub base_value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct L0Map {
    pub form: CharacterForm,
    pub offset: f64,
    pub scale: f64,
    pub base_point: Complex64,
    pub base_value: Complex64,
    pub positivity: Positivity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeMap {
    pub zeros: Vec<(Complex64, u32)>,
    pub rotation: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    U1(U1Map),
    L0(L0Map),
    Blaschke(BlaschkeMap),
}

/// A developing map together with its declared singularities and the
/// quadrature tolerance used for continuation.
#[derive(Debug, Clone, PartialEq)]
pub struct DevelopingMap {
    variant: Variant,
    singularities: Vec<Singularity>,
    tol: f64,
}

/// Value and first derivative of a germ at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub point: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyReport {
    pub path: Polyline,
    /// Monodromy in the half-plane model.
    pub map: MoebiusMap,
    /// The same map predicted from residues and winding numbers.
    pub residue_prediction: MoebiusMap,
    /// Operator-norm distance between `map` and `residue_prediction`.
    pub agreement: f64,
}

impl MonodromyReport {
    pub fn is_accepted(&self) -> bool {
        self.agreement <= AGREEMENT_TOL
    }
}

/// Sup bound on `|exp ∫ω|` over the disc, as `M = 2^{Σaⱼ} · sup exp(Re ∫h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    /// `2^{Σaⱼ}`, from `|z − zⱼ| < 2`.
    pub pole_factor: f64,
    /// Grid estimate of `sup exp(Re ∫h)` over `|z| ≤ 0.999`; exactly 1 when `h = 0`.
    pub entire_factor: f64,
    pub entire_factor_is_estimate: bool,
}

impl GrowthBound {
    pub fn m(&self) -> f64 {
        self.pole_factor * self.entire_factor
    }
}

/// The one-parameter family `f_λ = λ·exp(∫ω)`, `λ ∈ (0, T)`, `T = 1/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct U1Family {
    form: CharacterForm,
    base_point: Complex64,
    growth: GrowthBound,
}

fn disc_grid() -> impl Iterator<Item = Complex64> {
    let n = CHECK_GRID;
    let step = 2.0 * CHECK_RADIUS / (n - 1) as f64;
    (0..n).flat_map(move |i| {
        (0..n).filter_map(move |j| {
            let z = Complex64::new(-CHECK_RADIUS + i as f64 * step, -CHECK_RADIUS + j as f64 * step);
            (z.norm() <= CHECK_RADIUS).then_some(z)
        })
    })
}

fn ensure_clear_of_poles(form: &CharacterForm, z: Complex64) -> Result<()> {
    if form.poles().iter().any(|p| (p.location - z).norm() < PATH_CLEARANCE) {
        return Err(Error::PoleAtBasePoint);
    }
    Ok(())
}

/// Builds the family for poles `(zⱼ, aⱼ > 0)` and polynomial part `h`.
pub fn build_u1_family(
    poles: &[(Complex64, f64)],
    entire_part: Vec<Complex64>,
    base_point: Complex64,
) -> Result<U1Family> {
    if let Some((z, a)) = poles.iter().find(|(_, a)| !(*a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidParameter(format!("residue {a} at {z} must be positive")));
    }
    if !(base_point.norm() < 1.0) {
        return Err(Error::InvalidParameter("base point must lie in the unit disc".into()));
    }
    let form = CharacterForm::new(
        poles
            .iter()
            .map(|&(location, a)| Pole { location, residue: Complex64::new(a, 0.0) })
            .collect(),
        entire_part,
    )?;
    if form.poles().is_empty() && form.entire_part().is_zero() {
        return Err(Error::DegenerateForm);
    }
    ensure_clear_of_poles(&form, base_point)?;
    let total: f64 = poles.iter().map(|(_, a)| a).sum();
    let primitive = form.entire_part().integral();
    let (entire_factor, estimate) = if form.entire_part().is_zero() {
        (1.0, false)
    } else {
        let sup = disc_grid().map(|z| primitive.eval(z).re).fold(f64::NEG_INFINITY, f64::max);
        (sup.exp(), true)
    };
    Ok(U1Family {
        form,
        base_point,
        growth: GrowthBound { pole_factor: 2f64.powf(total), entire_factor, entire_factor_is_estimate: estimate },
    })
}

impl U1Family {
    pub fn form(&self) -> &CharacterForm {
        &self.form
    }

    pub fn growth(&self) -> GrowthBound {
        self.growth
    }

    /// Upper end `T = 1/M` of the admissible λ range.
    pub fn upper(&self) -> f64 {
        self.growth.m().recip()
    }

    /// `|exp ∫ω|` with the principal-branch normalization, single-valued.
    fn unit_modulus(&self, z: Complex64) -> f64 {
        let logs: f64 = self
            .form
            .poles()
            .iter()
            .map(|p| p.residue.re * (z - p.location).norm().ln())
            .sum();
        (logs + self.form.entire_part().integral().eval(z).re).exp()
    }

    pub fn member(&self, lambda: f64) -> Result<DevelopingMap> {
        let upper = self.upper();
        if !(lambda > 0.0 && lambda < upper) {
            return Err(Error::LambdaOutOfRange { lambda, upper });
        }
        let sup = disc_grid()
            .filter(|z| self.form.poles().iter().all(|p| p.location != *z))
            .map(|z| lambda * self.unit_modulus(z))
            .fold(0.0, f64::max);
        if sup >= 1.0 {
            return Err(Error::ImageOutsideModel(format!("|f| reaches {sup} on the check grid")));
        }
        let base_value = lambda * self.form.principal_primitive(self.base_point)?.exp();
        let map = U1Map { form: self.form.clone(), lambda, upper, base_point: self.base_point, base_value };
        let singularities = u1_singularities(&map.form)?;
        Ok(DevelopingMap { variant: Variant::U1(map), singularities, tol: DEFAULT_TOL })
    }
}

fn form_zero_singularities(form: &CharacterForm) -> Result<Vec<Singularity>> {
    Ok(form
        .zeros_of(CHECK_RADIUS)?
        .into_iter()
        .map(|(point, order)| Singularity {
            point,
            theta: (order + 1) as f64,
            kind: SingularityKind::Cone,
            source: SingularitySource::ZeroOfForm,
            order,
        })
        .collect())
}

fn u1_singularities(form: &CharacterForm) -> Result<Vec<Singularity>> {
    let mut out: Vec<Singularity> = form
        .poles()
        .iter()
        .filter(|p| (p.residue.re - 1.0).abs() > 1e-12)
        .map(|p| Singularity {
            point: p.location,
            theta: p.residue.re,
            kind: SingularityKind::Cone,
            source: SingularitySource::PoleOfForm,
            order: 0,
        })
        .collect();
    out.extend(form_zero_singularities(form)?);
    Ok(out)
}

/// Builds `f = s·∫ω + iC` with cusps `(zⱼ, rⱼ > 0)`.
pub fn build_l0_map(cusps: &[(Complex64, f64)], scale: f64, offset: f64, base_point: Complex64) -> Result<DevelopingMap> {
    if cusps.is_empty() {
        return Err(Error::DegenerateForm);
    }
    if let Some((z, r)) = cusps.iter().find(|(_, r)| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter(format!("cusp weight {r} at {z} must be positive")));
    }
    if !(scale > 0.0) || !scale.is_finite() || !offset.is_finite() {
        return Err(Error::InvalidParameter("scale must be positive and offset finite".into()));
    }
    if !(base_point.norm() < 1.0) {
        return Err(Error::InvalidParameter("base point must lie in the unit disc".into()));
    }
    let form = CharacterForm::new(
        cusps
            .iter()
            .map(|&(location, r)| Pole { location, residue: Complex64::new(0.0, -r) })
            .collect(),
        vec![],
    )?;
    ensure_clear_of_poles(&form, base_point)?;
    let bound = scale * cusps.iter().map(|(_, r)| r).sum::<f64>() * std::f64::consts::LN_2;
    let im_f = |z: Complex64| offset - scale * cusps.iter().map(|(p, r)| r * (z - p).norm().ln()).sum::<f64>();
    let grid_ok = disc_grid()
        .filter(|z| cusps.iter().all(|(p, _)| p != z))
        .all(|z| im_f(z) > 0.0);
    if !grid_ok {
        return Err(Error::OffsetTooSmall { offset, bound });
    }
    let positivity = if offset > bound { Positivity::Rigorous } else { Positivity::GridOnly };
    let base_value = scale * form.principal_primitive(base_point)? + I * offset;
    let mut singularities: Vec<Singularity> = cusps
        .iter()
        .map(|&(point, _)| Singularity {
            point,
            theta: 0.0,
            kind: SingularityKind::Cusp,
            source: SingularitySource::PoleOfForm,
            order: 0,
        })
        .collect();
    singularities.extend(form_zero_singularities(&form)?);
    Ok(DevelopingMap {
        variant: Variant::L0(L0Map { form, offset, scale, base_point, base_value, positivity }),
        singularities,
        tol: DEFAULT_TOL,
    })
}

/// Builds `B(z) = rotation · Π ((z − wₖ)/(1 − w̄ₖ z))^{mₖ}`.
pub fn blaschke(zeros: &[(Complex64, u32)], rotation: Complex64) -> Result<DevelopingMap> {
    if zeros.is_empty() || zeros.iter().any(|(_, m)| *m == 0) {
        return Err(Error::InvalidParameter("need at least one zero of positive multiplicity".into()));
    }
    if let Some((w, _)) = zeros.iter().find(|(w, _)| !(w.norm() < 1.0)) {
        return Err(Error::ZeroOutsideDisc(w.to_string()));
    }
    if (rotation.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("rotation {rotation} is not unimodular")));
    }
    let map = BlaschkeMap { zeros: zeros.to_vec(), rotation };
    let singularities = map
        .critical_points()
        .into_iter()
        .map(|(point, order)| Singularity {
            point,
            theta: (order + 1) as f64,
            kind: SingularityKind::Cone,
            source: SingularitySource::CriticalPoint,
            order,
        })
        .collect();
    Ok(DevelopingMap { variant: Variant::Blaschke(map), singularities, tol: DEFAULT_TOL })
}

impl BlaschkeMap {
    pub fn degree(&self) -> u32 {
        self.zeros.iter().map(|(_, m)| m).sum()
    }

    /// `(B(z), B′(z))` by forward differentiation of the product.
    pub fn jet(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut value = self.rotation;
        let mut deriv = Complex64::new(0.0, 0.0);
        for &(w, m) in &self.zeros {
            let den = Complex64::new(1.0, 0.0) - w.conj() * z;
            let phi = (z - w) / den;
            let dphi = (1.0 - w.norm_sqr()) / (den * den);
            for _ in 0..m {
                deriv = deriv * phi + value * dphi;
                value *= phi;
            }
        }
        (value, deriv)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.jet(z).0
    }

    /// Zeros of `B′` inside the disc with multiplicities; `d − 1` of them counted
    /// with multiplicity for a product of degree `d`.
    pub fn critical_points(&self) -> Vec<(Complex64, usize)> {
        let one = Complex64::new(1.0, 0.0);
        let mut p = ComplexPoly::constant(one);
        let mut q = ComplexPoly::constant(one);
        for &(w, m) in &self.zeros {
            for _ in 0..m {
                p = p.mul(&ComplexPoly::linear_root(w));
                q = q.mul(&ComplexPoly::new(vec![one, -w.conj()]));
            }
        }
        let wronskian = p.derivative().mul(&q).sub(&p.mul(&q.derivative()));
        wronskian
            .roots_with_multiplicity(ROOT_CLUSTER_TOL)
            .into_iter()
            .filter(|(z, _)| z.norm() < 1.0)
            .collect()
    }
}

/// Critical points of a Blaschke product.
pub fn critical_points(b: &DevelopingMap) -> Result<Vec<(Complex64, usize)>> {
    match &b.variant {
        Variant::Blaschke(map) => Ok(map.critical_points()),
        _ => Err(Error::WrongVariant("critical points are defined for Blaschke products".into())),
    }
}

impl DevelopingMap {
    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn variant_name(&self) -> &'static str {
        match self.variant {
            Variant::U1(_) => "u1",
            Variant::L0(_) => "l0",
            Variant::Blaschke(_) => "blaschke",
        }
    }

    pub fn model(&self) -> Model {
        match self.variant {
            Variant::L0(_) => Model::HalfPlane,
            _ => Model::Disc,
        }
    }

    /// Quadrature tolerance used for continuation.
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Base point of the germ; the origin for Blaschke products, which are single-valued.
    pub fn base_point(&self) -> Complex64 {
        match &self.variant {
            Variant::U1(m) => m.base_point,
            Variant::L0(m) => m.base_point,
            Variant::Blaschke(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn base_value(&self) -> Complex64 {
        match &self.variant {
            Variant::U1(m) => m.base_value,
            Variant::L0(m) => m.base_value,
            Variant::Blaschke(b) => b.eval(Complex64::new(0.0, 0.0)),
        }
    }

    /// The character 1-form driving the construction (`df/f` for U1, `df/s` for L0).
    pub fn form(&self) -> Option<&CharacterForm> {
        match &self.variant {
            Variant::U1(m) => Some(&m.form),
            Variant::L0(m) => Some(&m.form),
            Variant::Blaschke(_) => None,
        }
    }

    /// Poles of the character form; continuation paths must avoid them.
    pub fn poles(&self) -> Vec<Complex64> {
        self.form().map(|f| f.pole_locations()).unwrap_or_default()
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    /// Points a numerical stencil should stay away from: singularities and poles.
    pub fn exclusion_points(&self) -> Vec<Complex64> {
        let mut pts: Vec<Complex64> = self.singularities.iter().map(|s| s.point).collect();
        for p in self.poles() {
            if !pts.iter().any(|q| (*q - p).norm() < 1e-12) {
                pts.push(p);
            }
        }
        pts
    }

    pub fn find_singularity(&self, p: Complex64) -> Option<&Singularity> {
        self.singularities.iter().find(|s| (s.point - p).norm() <= 1e-8)
    }

    /// Continues a germ with value `value` at `from` along the segment to `to`.
    pub fn continue_segment(&self, from: Complex64, value: Complex64, to: Complex64) -> Result<Complex64> {
        match &self.variant {
            Variant::U1(m) => {
                let seg = Polyline::open(vec![from, to])?;
                Ok(value * m.form.integrate_along(&seg, self.tol)?.exp())
            }
            Variant::L0(m) => {
                let seg = Polyline::open(vec![from, to])?;
                Ok(value + m.scale * m.form.integrate_along(&seg, self.tol)?)
            }
            Variant::Blaschke(b) => Ok(b.eval(to)),
        }
    }

    /// First derivative of the germ with value `value` at `z`.
    pub fn jet_at(&self, z: Complex64, value: Complex64) -> Result<Jet> {
        let derivative = match &self.variant {
            Variant::U1(m) => value * m.form.eval(z)?,
            Variant::L0(m) => m.scale * m.form.eval(z)?,
            Variant::Blaschke(b) => b.jet(z).1,
        };
        Ok(Jet { point: z, value, derivative })
    }

    /// Second derivative of the germ with value `value` at `z`.
    pub fn second_derivative_at(&self, z: Complex64, value: Complex64) -> Result<Complex64> {
        match &self.variant {
            Variant::U1(m) => {
                let w = m.form.eval(z)?;
                Ok(value * (w * w + m.form.eval_derivative(z)?))
            }
            Variant::L0(m) => Ok(m.scale * m.form.eval_derivative(z)?),
            Variant::Blaschke(_) => Err(Error::WrongVariant("second derivative of a Blaschke product".into())),
        }
    }

    fn check_path_start(&self, path: &Polyline) -> Result<()> {
        if matches!(self.variant, Variant::Blaschke(_)) {
            return Ok(());
        }
        if (path.start() - self.base_point()).norm() > 1e-12 {
            return Err(Error::InvalidPath(format!(
                "path starts at {} but the base point is {}",
                path.start(),
                self.base_point()
            )));
        }
        Ok(())
    }

    /// Analytic continuation of the base germ along `path`, evaluated at its end.
    pub fn eval_along(&self, path: &Polyline) -> Result<Complex64> {
        self.check_path_start(path)?;
        match &self.variant {
            Variant::U1(m) => Ok(m.base_value * m.form.integrate_along(path, self.tol)?.exp()),
            Variant::L0(m) => Ok(m.base_value + m.scale * m.form.integrate_along(path, self.tol)?),
            Variant::Blaschke(b) => Ok(b.eval(path.end())),
        }
    }

    pub fn jet_along(&self, path: &Polyline) -> Result<Jet> {
        let value = self.eval_along(path)?;
        self.jet_at(path.end(), value)
    }

    /// A deterministic path from the base point to `target` that keeps away from poles.
    pub fn route_to(&self, target: Complex64) -> Result<Polyline> {
        route(self.base_point(), target, &self.poles())
    }

    /// Value at `target` continued along [`route_to`](Self::route_to).
    pub fn eval_at(&self, target: Complex64) -> Result<Complex64> {
        if let Variant::Blaschke(b) = &self.variant {
            return Ok(b.eval(target));
        }
        if target == self.base_point() {
            return Ok(self.base_value());
        }
        self.eval_along(&self.route_to(target)?)
    }

    pub fn jet_at_point(&self, target: Complex64) -> Result<Jet> {
        let value = self.eval_at(target)?;
        self.jet_at(target, value)
    }

    /// Continues the base germ around a closed loop at the base point and
    /// solves for the model automorphism relating start and end germs.
    pub fn monodromy_around(&self, path: &Polyline) -> Result<MonodromyReport> {
        if !path.is_closed() {
            return Err(Error::InvalidPath("monodromy needs a closed loop".into()));
        }
        self.check_path_start(path)?;
        let (map, residue_prediction) = match &self.variant {
            Variant::U1(m) => {
                let total = m.form.integrate_along(path, self.tol)?;
                let ratio = total.exp();
                let defect = (ratio.norm() - 1.0).abs();
                if defect > GERM_TOL {
                    return Err(Error::GermMismatch(defect));
                }
                let predicted = m.form.loop_residue_sum(path)?;
                (disc_rotation_in_half_plane(ratio.arg())?, disc_rotation_in_half_plane(predicted.im)?)
            }
            Variant::L0(m) => {
                let shift = m.scale * m.form.integrate_along(path, self.tol)?;
                let defect = shift.im.abs() / shift.norm().max(1.0);
                if defect > GERM_TOL {
                    return Err(Error::GermMismatch(defect));
                }
                let predicted = m.scale * m.form.loop_residue_sum(path)?;
                (MoebiusMap::translation(shift.re), MoebiusMap::translation(predicted.re))
            }
            Variant::Blaschke(b) => {
                let start = b.eval(path.start());
                let end = b.eval(path.end());
                if (end - start).norm() > GERM_TOL {
                    return Err(Error::GermMismatch((end - start).norm()));
                }
                (MoebiusMap::IDENTITY, MoebiusMap::IDENTITY)
            }
        };
        Ok(MonodromyReport {
            path: path.clone(),
            agreement: map.operator_distance(&residue_prediction),
            map,
            residue_prediction,
        })
    }
}

impl DevelopingMap {
    /// One counterclockwise loop per pole, based at the base point: a routed
    /// spoke to a small circle around the pole, once around, and back.
    pub fn generator_loops(&self) -> Result<Vec<Polyline>> {
        let base = self.base_point();
        let poles = self.poles();
        let mut loops = Vec::with_capacity(poles.len());
        for (k, &p) in poles.iter().enumerate() {
            let nearest = poles
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, q)| (q - p).norm())
                .fold((base - p).norm(), f64::min);
            let radius = (nearest / 3.0).min(0.05);
            let dir = base - p;
            let phase = dir.arg();
            let attach = p + Complex64::from_polar(radius, phase);
            let spoke = route(base, attach, &poles)?;
            let mut v: Vec<Complex64> = spoke.vertices().to_vec();
            for j in 1..64 {
                v.push(p + Complex64::from_polar(radius, phase + 2.0 * std::f64::consts::PI * j as f64 / 64.0));
            }
            v.push(attach);
            v.extend(spoke.vertices().iter().rev().skip(1).take(spoke.vertices().len() - 2));
            v.dedup();
            loops.push(Polyline::closed(v)?);
        }
        Ok(loops)
    }

    /// Random closed polygons based at the base point with 2 to 5 further
    /// vertices in `|z| ≤ 0.9`, each staying at least 0.02 from every pole.
    pub fn random_loops(&self, count: usize, seed: u64) -> Vec<Polyline> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let base = self.base_point();
        let poles = self.poles();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let k = rng.gen_range(2..=5);
            let mut v = vec![base];
            while v.len() <= k {
                let z = Complex64::new(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
                if z.norm() <= 0.9 {
                    v.push(z);
                }
            }
            if let Ok(path) = Polyline::closed(v) {
                if poles.iter().all(|p| path.distance_to(*p) >= 0.02) {
                    out.push(path);
                }
            }
        }
        out
    }
}

fn disc_rotation_in_half_plane(theta: f64) -> Result<MoebiusMap> {
    cayley_map_inverse(&ComplexMat2::disc_rotation(theta))
}

/// Straight-line routing with detours around poles.
///
/// Each pole `p` gets a guard radius `ρ = min(0.05, d/3)` with `d` the distance
/// to the nearest other pole or to the path's start. A target inside the guard
/// disc is approached radially from its boundary; segments passing within `ρ/2`
/// of a pole are bent through a waypoint at distance `ρ`.
pub fn route(start: Complex64, target: Complex64, poles: &[Complex64]) -> Result<Polyline> {
    let guard: Vec<f64> = poles
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let nearest = poles
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| (q - p).norm())
                .fold((start - p).norm(), f64::min);
            (nearest / 3.0).min(0.05)
        })
        .collect();

    let mut end = target;
    let mut tail = None;
    if let Some((k, p)) = poles
        .iter()
        .enumerate()
        .filter(|(k, p)| (target - **p).norm() < guard[*k])
        .min_by(|a, b| (target - a.1).norm().total_cmp(&(target - b.1).norm()))
    {
        let dir = target - p;
        let unit = if dir.norm() > 0.0 { dir / dir.norm() } else { Complex64::new(1.0, 0.0) };
        end = p + unit * guard[k];
        tail = Some(target);
    }

    let mut vertices = vec![start];
    bend(start, end, poles, &guard, 0, &mut vertices);
    if let Some(t) = tail {
        if (t - end).norm() > 0.0 {
            vertices.push(t);
        }
    }
    vertices.dedup();
    if vertices.len() < 2 {
        vertices.push(target);
    }
    Polyline::open(vertices)
}

fn bend(a: Complex64, b: Complex64, poles: &[Complex64], guard: &[f64], depth: u32, out: &mut Vec<Complex64>) {
    let worst = poles
        .iter()
        .enumerate()
        .map(|(k, p)| (k, segment_distance(a, b, *p) / guard[k]))
        .filter(|(_, ratio)| *ratio < 0.5)
        .min_by(|x, y| x.1.total_cmp(&y.1));
    match worst {
        Some((k, _)) if depth < 16 => {
            let p = poles[k];
            let ab = b - a;
            let t = (((p - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
            let foot = a + ab * t;
            let normal = if (foot - p).norm() > 1e-14 {
                (foot - p) / (foot - p).norm()
            } else {
                // Pole on the segment: go around on the left.
                I * ab / ab.norm()
            };
            let w = p + normal * guard[k];
            bend(a, w, poles, guard, depth + 1, out);
            bend(w, b, poles, guard, depth + 1, out);
        }
        _ => out.push(b),
    }
}
