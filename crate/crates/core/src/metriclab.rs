//! Numerical checks on the pulled-back metric `e^{2u}|dz|²`: density,
//! curvature by finite differences, cone and cusp asymptotics, and the
//! subharmonic witness functions `|f|` and `−Im f`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::charform::Polyline;
use crate::developing::{DevelopingMap, Model, SingularityKind, Variant};
use crate::error::{Error, Result};

/// Points on each probe circle.
pub const CIRCLE_SAMPLES: usize = 16;

/// Largest cusp spread accepted as evidence of boundedness.
pub const CUSP_SPREAD_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianStencil {
    /// Plain 5-point stencil, error `O(h²)`.
    FivePoint,
    /// 5-point stencils at `h` and `2h` combined as `(4Δ_h − Δ_{2h})/3`, error `O(h⁴)`.
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    pub h_fd: f64,
    pub exclusion_radius: f64,
    pub boundary_margin: f64,
    pub stencil: LaplacianStencil,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { h_fd: 1e-3, exclusion_radius: 0.05, boundary_margin: 0.1, stencil: LaplacianStencil::Richardson }
    }
}

impl MetricConfig {
    fn reach(&self) -> f64 {
        match self.stencil {
            LaplacianStencil::FivePoint => self.h_fd,
            LaplacianStencil::Richardson => 2.0 * self.h_fd,
        }
    }

    /// Whether the stencil centred at `z` stays inside the admissible region of `f`.
    pub fn admits(&self, f: &DevelopingMap, z: Complex64) -> bool {
        let reach = self.reach();
        z.norm() + reach <= 1.0 - self.boundary_margin
            && f.exclusion_points().iter().all(|p| (z - p).norm() - reach >= self.exclusion_radius)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub samples: Vec<(Complex64, f64)>,
    pub max_abs_error: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeAngleEstimate {
    pub point: Complex64,
    pub theta_estimate: f64,
    pub radii: Vec<f64>,
    pub regression_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuspReport {
    pub point: Complex64,
    pub boundedness_spread: f64,
    pub radii: Vec<f64>,
}

impl CuspReport {
    pub fn is_bounded(&self) -> bool {
        self.boundedness_spread <= CUSP_SPREAD_LIMIT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `|f|` for disc-valued maps.
    AbsF,
    /// `−Im f` for half-plane-valued maps.
    NegImF,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub nodes: usize,
    pub min_laplacian: f64,
    pub max_abs_laplacian: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// `1e−6 · max(1, max |witness|)`.
    pub tolerance: f64,
    /// `|f| < 1` or `−Im f < 0` at every node.
    pub range_ok: bool,
}

impl WitnessReport {
    pub fn is_subharmonic(&self) -> bool {
        self.min_laplacian >= -self.tolerance
    }

    pub fn is_harmonic(&self) -> bool {
        self.max_abs_laplacian <= self.tolerance
    }
}

/// `u` from a value and derivative of the developing map.
pub fn density_from_jet(model: Model, value: Complex64, derivative: Complex64) -> Result<f64> {
    match model {
        Model::Disc => {
            let r2 = value.norm_sqr();
            if !(r2 < 1.0) {
                return Err(Error::ImageOutsideModel(format!("|f| = {}", r2.sqrt())));
            }
            Ok((2.0 * derivative.norm()).ln() - (1.0 - r2).ln())
        }
        Model::HalfPlane => {
            if !(value.im > 0.0) {
                return Err(Error::ImageOutsideModel(format!("Im f = {}", value.im)));
            }
            Ok(derivative.norm().ln() - value.im.ln())
        }
    }
}

/// `u` at the end of `path`, continuing the base germ along it.
pub fn density_u(f: &DevelopingMap, path: &Polyline) -> Result<f64> {
    let jet = f.jet_along(path)?;
    density_from_jet(f.model(), jet.value, jet.derivative)
}

/// `u` at `z`, continuing along the default route.
pub fn density_at(f: &DevelopingMap, z: Complex64) -> Result<f64> {
    let jet = f.jet_at_point(z)?;
    density_from_jet(f.model(), jet.value, jet.derivative)
}

fn u_near(f: &DevelopingMap, center: Complex64, value: Complex64, z: Complex64) -> Result<f64> {
    let v = f.continue_segment(center, value, z)?;
    let jet = f.jet_at(z, v)?;
    density_from_jet(f.model(), jet.value, jet.derivative)
}

fn five_point(g: &dyn Fn(Complex64) -> Result<f64>, z: Complex64, g0: f64, h: f64) -> Result<f64> {
    let mut sum = -4.0 * g0;
    for d in [Complex64::new(h, 0.0), Complex64::new(-h, 0.0), Complex64::new(0.0, h), Complex64::new(0.0, -h)] {
        sum += g(z + d)?;
    }
    Ok(sum / (h * h))
}

fn laplacian(g: &dyn Fn(Complex64) -> Result<f64>, z: Complex64, g0: f64, cfg: &MetricConfig) -> Result<f64> {
    let lap_h = five_point(g, z, g0, cfg.h_fd)?;
    match cfg.stencil {
        LaplacianStencil::FivePoint => Ok(lap_h),
        LaplacianStencil::Richardson => {
            let lap_2h = five_point(g, z, g0, 2.0 * cfg.h_fd)?;
            Ok((4.0 * lap_h - lap_2h) / 3.0)
        }
    }
}

fn curvature_from_value(f: &DevelopingMap, z: Complex64, value: Complex64, cfg: &MetricConfig) -> Result<f64> {
    let jet = f.jet_at(z, value)?;
    let u0 = density_from_jet(f.model(), jet.value, jet.derivative)?;
    let lap = laplacian(&|w| u_near(f, z, value, w), z, u0, cfg)?;
    Ok(-(-2.0 * u0).exp() * lap)
}

/// `K = −e^{−2u}Δu` at `z`.
pub fn curvature_at(f: &DevelopingMap, z: Complex64, cfg: &MetricConfig) -> Result<f64> {
    if !cfg.admits(f, z) {
        return Err(Error::StepTooLarge(z.to_string()));
    }
    curvature_from_value(f, z, f.eval_at(z)?, cfg)
}

/// Curvature at every admissible point of `points`, in input order.
pub fn curvature_grid(f: &DevelopingMap, points: &[Complex64], cfg: &MetricConfig) -> Result<CurvatureReport> {
    let admissible: Vec<Complex64> = points.iter().copied().filter(|z| cfg.admits(f, *z)).collect();
    let samples = admissible
        .par_iter()
        .map(|&z| Ok((z, curvature_from_value(f, z, f.eval_at(z)?, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    let max_abs_error = samples.iter().map(|(_, k)| (k + 1.0).abs()).fold(0.0, f64::max);
    Ok(CurvatureReport { samples, max_abs_error, step: cfg.h_fd })
}

/// `n` admissible points drawn uniformly from the disc, reproducible from `seed`.
pub fn random_admissible_points(f: &DevelopingMap, n: usize, seed: u64, cfg: &MetricConfig) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 1.0 - cfg.boundary_margin;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if cfg.admits(f, z) {
            out.push(z);
        }
    }
    out
}

/// Square `n × n` grid over `[−r, r]²`, clipped to the disc of radius `r`.
pub fn disc_grid_points(n: usize, r: f64) -> Vec<Complex64> {
    if n < 2 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let step = 2.0 * r / (n - 1) as f64;
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let z = Complex64::new(-r + i as f64 * step, -r + j as f64 * step);
            if z.norm() <= r {
                out.push(z);
            }
        }
    }
    out
}

fn circle_average(g: &(dyn Fn(Complex64) -> Result<f64> + Sync), p: Complex64, r: f64) -> Result<f64> {
    let total = (0..CIRCLE_SAMPLES)
        .into_par_iter()
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.5) / CIRCLE_SAMPLES as f64;
            g(p + Complex64::from_polar(r, t))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(total.iter().sum::<f64>() / CIRCLE_SAMPLES as f64)
}

fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    if radii.iter().any(|r| !(*r > 1e-6)) || radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::RadiiTooSmall);
    }
    Ok(())
}

/// Dyadic radii `2^{−k}` for `k` in `ks`.
pub fn dyadic_radii(ks: std::ops::RangeInclusive<i32>) -> Vec<f64> {
    ks.map(|k| 2f64.powi(-k)).collect()
}

/// Least-squares fit `y ≈ a + b·x`, returning `(b, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

/// Cone angle at a declared cone point from the log-slope of circle averages of `u`.
pub fn estimate_cone_angle(f: &DevelopingMap, p: Complex64, radii: &[f64]) -> Result<ConeAngleEstimate> {
    let s = f.find_singularity(p).ok_or_else(|| Error::NotASingularPoint(p.to_string()))?;
    if s.kind == SingularityKind::Cusp {
        return Err(Error::WrongSingularityType(format!("{p} is a cusp")));
    }
    validate_radii(radii)?;
    let p = s.point;
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let averages = radii
        .iter()
        .map(|&r| circle_average(&|z| density_at(f, z), p, r))
        .collect::<Result<Vec<_>>>()?;
    let (slope, residual) = linear_fit(&logs, &averages);
    Ok(ConeAngleEstimate { point: p, theta_estimate: slope + 1.0, radii: radii.to_vec(), regression_residual: residual })
}

/// Spread of `u + ln r + ln(−ln r)` over dyadic probe circles around a cusp.
pub fn check_cusp(f: &DevelopingMap, p: Complex64) -> Result<CuspReport> {
    let s = f.find_singularity(p).ok_or_else(|| Error::NotASingularPoint(p.to_string()))?;
    if s.kind != SingularityKind::Cusp {
        return Err(Error::WrongSingularityType(format!("{p} is a cone point")));
    }
    let p = s.point;
    let radii = dyadic_radii(6..=16);
    validate_radii(&radii)?;
    let values = radii
        .iter()
        .map(|&r| Ok(circle_average(&|z| density_at(f, z), p, r)? + r.ln() + (-r.ln()).ln()))
        .collect::<Result<Vec<f64>>>()?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CuspReport { point: p, boundedness_spread: max - min, radii })
}

fn witness_value(kind: WitnessKind, v: Complex64) -> f64 {
    match kind {
        WitnessKind::AbsF => v.norm(),
        WitnessKind::NegImF => -v.im,
    }
}

/// Values of the continued map on the admissible nodes of an `n × n` grid over
/// `|z| ≤ radius`, propagated along a breadth-first spanning tree of grid edges.
pub fn continue_over_grid(
    f: &DevelopingMap,
    n: usize,
    radius: f64,
    exclusion_radius: f64,
) -> Result<Vec<(Complex64, Complex64)>> {
    if n < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points per side".into()));
    }
    let step = 2.0 * radius / (n - 1) as f64;
    let avoid = f.exclusion_points();
    let node = |i: usize, j: usize| Complex64::new(-radius + i as f64 * step, -radius + j as f64 * step);
    let ok = |z: Complex64| z.norm() <= radius && avoid.iter().all(|p| (z - p).norm() >= exclusion_radius);
    let mut value: Vec<Option<Complex64>> = vec![None; n * n];
    let base = f.base_point();
    let mut order: Vec<usize> = (0..n * n).filter(|&k| ok(node(k % n, k / n))).collect();
    // Roots are tried nearest to the base point first.
    order.sort_by(|&a, &b| {
        let da = (node(a % n, a / n) - base).norm();
        let db = (node(b % n, b / n) - base).norm();
        da.total_cmp(&db).then(a.cmp(&b))
    });
    for &root in &order {
        if value[root].is_some() {
            continue;
        }
        value[root] = Some(f.eval_at(node(root % n, root / n))?);
        let mut queue = VecDeque::from([root]);
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % n, k / n);
            let here = node(i, j);
            let v = value[k].expect("queued nodes carry values");
            let mut neighbours = Vec::with_capacity(4);
            if i + 1 < n {
                neighbours.push(k + 1);
            }
            if i > 0 {
                neighbours.push(k - 1);
            }
            if j + 1 < n {
                neighbours.push(k + n);
            }
            if j > 0 {
                neighbours.push(k - n);
            }
            for m in neighbours {
                let there = node(m % n, m / n);
                if value[m].is_none() && ok(there) {
                    value[m] = Some(f.continue_segment(here, v, there)?);
                    queue.push_back(m);
                }
            }
        }
    }
    Ok(order.into_iter().map(|k| (node(k % n, k / n), value[k].expect("all admissible nodes visited"))).collect())
}

/// Discrete Laplacian and range of `|f|` (disc models) or `−Im f` (half-plane
/// model) over an `n × n` grid on `|z| ≤ 0.9`.
pub fn subharmonic_witness(f: &DevelopingMap, kind: WitnessKind, n: usize, cfg: &MetricConfig) -> Result<WitnessReport> {
    match (kind, f.variant()) {
        (WitnessKind::AbsF, Variant::L0(_)) => {
            return Err(Error::WrongVariant("|f| witness needs a disc-valued map".into()))
        }
        (WitnessKind::NegImF, Variant::U1(_) | Variant::Blaschke(_)) => {
            return Err(Error::WrongVariant("−Im f witness needs a half-plane-valued map".into()))
        }
        _ => {}
    }
    let radius = 1.0 - cfg.boundary_margin;
    let mut nodes = continue_over_grid(f, n, radius, cfg.exclusion_radius)?;
    nodes.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let laps = nodes
        .par_iter()
        .map(|&(z, v)| {
            let w0 = witness_value(kind, v);
            laplacian(&|w| Ok(witness_value(kind, f.continue_segment(z, v, w)?)), z, w0, cfg)
        })
        .collect::<Result<Vec<f64>>>()?;
    let values: Vec<f64> = nodes.iter().map(|(_, v)| witness_value(kind, *v)).collect();
    let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let range_ok = match kind {
        WitnessKind::AbsF => values.iter().all(|v| *v < 1.0),
        WitnessKind::NegImF => values.iter().all(|v| *v < 0.0),
    };
    Ok(WitnessReport {
        kind,
        nodes: nodes.len(),
        min_laplacian: laps.iter().copied().fold(f64::INFINITY, f64::min),
        max_abs_laplacian: laps.iter().map(|l| l.abs()).fold(0.0, f64::max),
        min_value,
        max_value,
        tolerance: 1e-6 * scale,
        range_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::developing::{blaschke, build_l0_map, build_u1_family};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn identity() -> DevelopingMap {
        blaschke(&[(c(0.0, 0.0), 1)], c(1.0, 0.0)).unwrap()
    }

    fn sqrt_map() -> DevelopingMap {
        build_u1_family(&[(c(0.0, 0.0), 0.5)], vec![], c(0.5, 0.0)).unwrap().member(0.5).unwrap()
    }

    fn log_map() -> DevelopingMap {
        build_l0_map(&[(c(0.0, 0.0), 1.0)], 1.0, 1.0, c(0.5, 0.0)).unwrap()
    }

    #[test]
    fn density_examples() {
        assert!((density_at(&identity(), c(0.0, 0.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((density_at(&identity(), c(0.5, 0.0)).unwrap() - (8.0f64 / 3.0).ln()).abs() < 1e-15);
        let z: f64 = 0.25;
        let lambda: f64 = 0.5;
        let expected = (2.0 * lambda * 0.5 * z.powf(-0.5)).ln() - (1.0 - lambda * lambda * z).ln();
        assert!((density_at(&sqrt_map(), c(z, 0.0)).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn curvature_examples() {
        let cfg = MetricConfig::default();
        for (f, z) in [(identity(), c(0.3, 0.0)), (sqrt_map(), c(0.4, 0.0)), (log_map(), c(0.5, 0.0))] {
            let k = curvature_at(&f, z, &cfg).unwrap();
            assert!((k + 1.0).abs() < 1e-4, "K = {k}");
        }
    }

    #[test]
    fn stencil_near_singularity_is_rejected() {
        let cfg = MetricConfig::default();
        assert!(matches!(curvature_at(&sqrt_map(), c(0.03, 0.0), &cfg), Err(Error::StepTooLarge(_))));
        assert!(matches!(curvature_at(&identity(), c(0.899, 0.0), &cfg), Err(Error::StepTooLarge(_))));
    }

    #[test]
    fn richardson_beats_plain_stencil_near_cone() {
        let plain = MetricConfig { stencil: LaplacianStencil::FivePoint, ..MetricConfig::default() };
        let rich = MetricConfig::default();
        let z = c(0.053, 0.0);
        let e_plain = (curvature_at(&sqrt_map(), z, &plain).unwrap() + 1.0).abs();
        let e_rich = (curvature_at(&sqrt_map(), z, &rich).unwrap() + 1.0).abs();
        assert!(e_rich < e_plain);
        assert!(e_rich < 1e-4);
    }

    #[test]
    fn cone_angle_examples() {
        let radii = dyadic_radii(4..=10);
        let est = estimate_cone_angle(&sqrt_map(), c(0.0, 0.0), &radii).unwrap();
        assert!((est.theta_estimate - 0.5).abs() < 0.005);
        let sq = blaschke(&[(c(0.0, 0.0), 2)], c(1.0, 0.0)).unwrap();
        let est = estimate_cone_angle(&sq, c(0.0, 0.0), &radii).unwrap();
        assert!((est.theta_estimate - 2.0).abs() < 0.02);
        assert!(matches!(estimate_cone_angle(&sq, c(0.0, 0.0), &[0.1, 0.2]), Err(Error::RadiiTooSmall)));
        assert!(matches!(estimate_cone_angle(&sq, c(0.0, 0.0), &[1e-3, 1e-7]), Err(Error::RadiiTooSmall)));
        assert!(matches!(estimate_cone_angle(&sq, c(0.3, 0.0), &radii), Err(Error::NotASingularPoint(_))));
    }

    #[test]
    fn cusp_examples() {
        assert!(check_cusp(&log_map(), c(0.0, 0.0)).unwrap().is_bounded());
        let sq = blaschke(&[(c(0.0, 0.0), 2)], c(1.0, 0.0)).unwrap();
        assert!(matches!(check_cusp(&sq, c(0.0, 0.0)), Err(Error::WrongSingularityType(_))));
    }

    #[test]
    fn witnesses() {
        let cfg = MetricConfig::default();
        let w = subharmonic_witness(&sqrt_map(), WitnessKind::AbsF, 21, &cfg).unwrap();
        assert!(w.is_subharmonic() && w.range_ok);
        let w = subharmonic_witness(&log_map(), WitnessKind::NegImF, 21, &cfg).unwrap();
        assert!(w.is_harmonic() && w.range_ok, "{w:?}");
        let sq = blaschke(&[(c(0.0, 0.0), 2)], c(1.0, 0.0)).unwrap();
        let w = subharmonic_witness(&sq, WitnessKind::AbsF, 21, &cfg).unwrap();
        // Δ|z|² = 4
        assert!((w.min_laplacian - 4.0).abs() < 1e-6);
        assert!(matches!(
            subharmonic_witness(&sq, WitnessKind::NegImF, 21, &cfg),
            Err(Error::WrongVariant(_))
        ));
    }

    #[test]
    fn grid_continuation_matches_routes() {
        let f = log_map();
        for (z, v) in continue_over_grid(&f, 11, 0.9, 0.05).unwrap() {
            let direct = f.eval_at(z).unwrap();
            assert!((direct.im - v.im).abs() < 1e-9);
        }
    }
}
