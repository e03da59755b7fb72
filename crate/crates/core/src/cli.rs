//! Batch front-end: JSON configs in, canonical JSON reports and CSV grids out.

use std::fmt;
use std::io;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::audits::{
    divisor_table_audit, format_rational, heins_admissible, random_rational_map, residue_audit, CharacterObject,
    ConnectionResidue, Divisor, QPoly, RationalMap, ResidueAuditReport,
};
use crate::developing::{
    blaschke, build_l0_map, build_u1_family, DevelopingMap, Model, Positivity, Singularity, SingularityKind,
    SingularitySource, Variant,
};
use crate::error::{Error, Result};
use crate::metriclab::{
    check_cusp, curvature_grid, density_at, disc_grid_points, estimate_cone_angle,
    random_admissible_points, MetricConfig,
};
use crate::moebius::{MoebiusMap, Point};
use crate::subgroup::{classify_subgroup, is_in_class, random_conjugate, SubgroupClassification};

pub const SCHEMA_VERSION: &str = "hypermono-report/1";

/// Largest accepted `--grid` resolution.
pub const MAX_GRID: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    BuildU1,
    BuildL0,
    Blaschke,
    Curvature,
    Monodromy,
    ResidueAudit,
    Heins,
    DivisorAudit,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Classify,
        Command::BuildU1,
        Command::BuildL0,
        Command::Blaschke,
        Command::Curvature,
        Command::Monodromy,
        Command::ResidueAudit,
        Command::Heins,
        Command::DivisorAudit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::BuildU1 => "build-u1",
            Command::BuildL0 => "build-l0",
            Command::Blaschke => "blaschke",
            Command::Curvature => "curvature",
            Command::Monodromy => "monodromy",
            Command::ResidueAudit => "residue-audit",
            Command::Heins => "heins",
            Command::DivisorAudit => "divisor-audit",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// An audit ran and failed; the report is still written.
    AuditFailed,
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::AuditFailed => 2,
        }
    }
}

/// Exit status for configuration and input errors.
pub const EXIT_CONFIG_ERROR: i32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub status: Status,
    pub report: Value,
    /// `re,im,u,K_est` rows when a grid was requested.
    pub csv: Option<String>,
}

impl RunOutput {
    pub fn report_json(&self) -> String {
        to_canonical_json(&self.report)
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ConfigInvalid(msg.into())
}

fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn point_json(p: &Point) -> Value {
    match p {
        Point::Finite(z) => cx(*z),
        Point::Infinity => json!("infinity"),
    }
}

fn mat(g: &MoebiusMap) -> Value {
    json!(g.entries())
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Construction {
    U1 {
        /// `[re, im, residue]`
        poles: Vec<[f64; 3]>,
        #[serde(default)]
        entire_part: Vec<[f64; 2]>,
        base_point: [f64; 2],
        lambda: Option<f64>,
        /// λ as a fraction of the upper bound `T`; defaults to 1/2.
        lambda_fraction: Option<f64>,
    },
    L0 {
        /// `[re, im, r]`
        cusps: Vec<[f64; 3]>,
        scale: f64,
        offset: f64,
        base_point: [f64; 2],
    },
    Blaschke {
        /// `[re, im, multiplicity]`
        zeros: Vec<[f64; 3]>,
        #[serde(default = "unit_rotation")]
        rotation: [f64; 2],
    },
}

fn unit_rotation() -> [f64; 2] {
    [1.0, 0.0]
}

impl Construction {
    pub fn build(&self, tol: f64) -> Result<DevelopingMap> {
        let map = match self {
            Construction::U1 { poles, entire_part, base_point, lambda, lambda_fraction } => {
                let poles: Vec<(Complex64, f64)> = poles.iter().map(|p| (Complex64::new(p[0], p[1]), p[2])).collect();
                let family = build_u1_family(&poles, entire_part.iter().copied().map(complex).collect(), complex(*base_point))?;
                let lambda = match (lambda, lambda_fraction) {
                    (Some(_), Some(_)) => return Err(bad("give lambda or lambda_fraction, not both")),
                    (Some(l), None) => *l,
                    (None, Some(q)) => q * family.upper(),
                    (None, None) => 0.5 * family.upper(),
                };
                family.member(lambda)?
            }
            Construction::L0 { cusps, scale, offset, base_point } => {
                let cusps: Vec<(Complex64, f64)> = cusps.iter().map(|p| (Complex64::new(p[0], p[1]), p[2])).collect();
                build_l0_map(&cusps, *scale, *offset, complex(*base_point))?
            }
            Construction::Blaschke { zeros, rotation } => {
                let zeros = zeros
                    .iter()
                    .map(|z| {
                        if z[2] >= 1.0 && z[2].fract() == 0.0 && z[2] <= u32::MAX as f64 {
                            Ok((Complex64::new(z[0], z[1]), z[2] as u32))
                        } else {
                            Err(bad(format!("multiplicity {} is not a positive integer", z[2])))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                blaschke(&zeros, complex(*rotation))?
            }
        };
        Ok(map.with_tolerance(tol))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyConfig {
    generators: Vec<[f64; 4]>,
    /// Random conjugations checked for verdict invariance.
    #[serde(default)]
    conjugations: usize,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurvatureConfig {
    construction: Construction,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_h")]
    h_fd: f64,
    #[serde(default = "default_exclusion")]
    exclusion_radius: f64,
    #[serde(default = "default_margin")]
    boundary_margin: f64,
    #[serde(default = "default_threshold")]
    threshold: f64,
    seed: Option<u64>,
}

fn default_samples() -> usize {
    100
}
fn default_h() -> f64 {
    1e-3
}
fn default_exclusion() -> f64 {
    0.05
}
fn default_margin() -> f64 {
    0.1
}
fn default_threshold() -> f64 {
    1e-4
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonodromyConfig {
    construction: Construction,
    #[serde(default = "default_loops")]
    random_loops: usize,
    seed: Option<u64>,
}

fn default_loops() -> usize {
    25
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DivisorAuditConfig {
    construction: Construction,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Int(i64),
    Text(String),
}

impl Coefficient {
    fn text(&self) -> String {
        match self {
            Coefficient::Int(k) => k.to_string(),
            Coefficient::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidueConfig {
    /// Ascending coefficients as integers or `"p/q"` strings.
    numerator: Option<Vec<Coefficient>>,
    denominator: Option<Vec<Coefficient>>,
    /// Additional random maps to audit.
    #[serde(default)]
    random_maps: usize,
    #[serde(default = "default_max_degree")]
    max_degree: usize,
    seed: Option<u64>,
}

fn default_max_degree() -> usize {
    6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DivisorEntry {
    label: String,
    theta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeinsConfig {
    genus: u32,
    #[serde(default)]
    divisor: Vec<DivisorEntry>,
}

fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| bad(e.to_string()))
}

/// A build config is a bare construction; its `kind` is implied by the command.
fn parse_build(mut v: Value, kind: &str) -> Result<Construction> {
    let obj = v.as_object_mut().ok_or_else(|| bad("config must be a JSON object"))?;
    match obj.get("kind") {
        None => {
            obj.insert("kind".into(), json!(kind));
        }
        Some(k) if k == kind => {}
        Some(k) => return Err(bad(format!("kind {k} does not match the command"))),
    }
    parse(v)
}

fn validate_options(opts: &RunOptions) -> Result<()> {
    if let Some(g) = opts.grid {
        if !(2..=MAX_GRID).contains(&g) {
            return Err(bad(format!("grid resolution {g} outside 2..={MAX_GRID}")));
        }
    }
    if let Some(t) = opts.tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(bad("tolerance must be positive"));
        }
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive")))
    }
}

/// Runs one command on a parsed JSON config.
pub fn run(command: Command, config: Value, opts: &RunOptions) -> Result<RunOutput> {
    validate_options(opts)?;
    let tol = opts.tol.unwrap_or(crate::charform::DEFAULT_TOL);
    let (status, result, seed, csv) = match command {
        Command::Classify => {
            let cfg: ClassifyConfig = parse(config)?;
            let seed = opts.seed.or(cfg.seed).unwrap_or(0);
            let (status, result) = run_classify(&cfg, seed)?;
            (status, result, Some(seed), None)
        }
        Command::BuildU1 | Command::BuildL0 | Command::Blaschke => {
            let kind = match command {
                Command::BuildU1 => "u1",
                Command::BuildL0 => "l0",
                _ => "blaschke",
            };
            let f = parse_build(config, kind)?.build(tol)?;
            let csv = opts.grid.map(|n| grid_csv(&f, n, &MetricConfig::default())).transpose()?;
            let (status, result) = run_build(&f)?;
            (status, result, None, csv)
        }
        Command::Curvature => {
            let cfg: CurvatureConfig = parse(config)?;
            for (name, x) in [
                ("h_fd", cfg.h_fd),
                ("exclusion_radius", cfg.exclusion_radius),
                ("boundary_margin", cfg.boundary_margin),
                ("threshold", cfg.threshold),
            ] {
                positive(name, x)?;
            }
            let seed = opts.seed.or(cfg.seed).unwrap_or(0);
            let f = cfg.construction.build(tol)?;
            let metric = MetricConfig {
                h_fd: cfg.h_fd,
                exclusion_radius: cfg.exclusion_radius,
                boundary_margin: cfg.boundary_margin,
                ..MetricConfig::default()
            };
            let csv = opts.grid.map(|n| grid_csv(&f, n, &metric)).transpose()?;
            let points = random_admissible_points(&f, cfg.samples, seed, &metric);
            let report = curvature_grid(&f, &points, &metric)?;
            let pass = report.max_abs_error <= cfg.threshold;
            let result = json!({
                "variant": f.variant_name(),
                "samples": report.samples.len(),
                "step": report.step,
                "stencil": "richardson",
                "max_abs_error": report.max_abs_error,
                "threshold": cfg.threshold,
                "pass": pass,
            });
            (if pass { Status::Pass } else { Status::AuditFailed }, result, Some(seed), csv)
        }
        Command::Monodromy => {
            let cfg: MonodromyConfig = parse(config)?;
            let seed = opts.seed.or(cfg.seed).unwrap_or(0);
            let f = cfg.construction.build(tol)?;
            let (status, result) = run_monodromy(&f, cfg.random_loops, seed)?;
            (status, result, Some(seed), None)
        }
        Command::ResidueAudit => {
            let cfg: ResidueConfig = parse(config)?;
            let seed = opts.seed.or(cfg.seed).unwrap_or(0);
            let (status, result) = run_residue(&cfg, seed)?;
            (status, result, Some(seed), None)
        }
        Command::Heins => {
            let cfg: HeinsConfig = parse(config)?;
            let divisor = Divisor::new(cfg.divisor.into_iter().map(|e| (e.label, e.theta)).collect())?;
            let r = heins_admissible(cfg.genus, &divisor);
            let result = json!({
                "genus": r.genus,
                "chi": r.chi,
                "divisor": divisor.entries().iter().map(|(l, t)| json!({"label": l, "theta": t})).collect::<Vec<_>>(),
                "slack": r.slack,
                "admissible": r.admissible,
            });
            (Status::Pass, result, None, None)
        }
        Command::DivisorAudit => {
            let cfg: DivisorAuditConfig = parse(config)?;
            let f = cfg.construction.build(tol)?;
            let (status, result) = run_divisor(&f)?;
            (status, result, None, None)
        }
    };
    let report = json!({
        "schema": SCHEMA_VERSION,
        "command": command.name(),
        "seed": seed,
        "status": match status { Status::Pass => "pass", Status::AuditFailed => "fail" },
        "result": result,
    });
    Ok(RunOutput { status, report, csv })
}

/// Parses the config text and runs the command.
pub fn run_str(command: Command, config: &str, opts: &RunOptions) -> Result<RunOutput> {
    let value: Value = serde_json::from_str(config).map_err(|e| bad(format!("config is not valid JSON: {e}")))?;
    run(command, value, opts)
}

fn classification_json(c: &SubgroupClassification) -> Value {
    let mut m = Map::new();
    m.insert("verdict".into(), json!(c.verdict.name()));
    if let crate::subgroup::Verdict::H1c(k) = c.verdict {
        m.insert("c".into(), json!(k));
    }
    m.insert("conjugator".into(), mat(&c.conjugator));
    Value::Object(m)
}

fn run_classify(cfg: &ClassifyConfig, seed: u64) -> Result<(Status, Value)> {
    let gens = cfg
        .generators
        .iter()
        .map(|g| MoebiusMap::new(g[0], g[1], g[2], g[3]).map_err(|e| bad(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let c = classify_subgroup(&gens)?;
    let sound = gens.iter().all(|g| is_in_class(g, &c.verdict, &c.conjugator));
    let mut invariant = true;
    for k in 0..cfg.conjugations {
        let conj = random_conjugate(&gens, seed.wrapping_add(k as u64));
        let v = classify_subgroup(&conj)?.verdict;
        invariant &= v.same_class(&c.verdict);
    }
    let mut result = classification_json(&c);
    let obj = result.as_object_mut().expect("object");
    obj.insert("generators".into(), gens.iter().map(mat).collect());
    obj.insert("witness_sound".into(), json!(sound));
    obj.insert("conjugations_checked".into(), json!(cfg.conjugations));
    obj.insert("conjugation_invariant".into(), json!(invariant));
    let status = if sound && invariant { Status::Pass } else { Status::AuditFailed };
    Ok((status, result))
}

fn singularity_json(s: &Singularity) -> Value {
    json!({
        "point": cx(s.point),
        "theta": s.theta,
        "kind": match s.kind { SingularityKind::Cone => "cone", SingularityKind::Cusp => "cusp" },
        "source": match s.source {
            SingularitySource::PoleOfForm => "pole_of_form",
            SingularitySource::ZeroOfForm => "zero_of_form",
            SingularitySource::CriticalPoint => "critical_point",
        },
        "order": s.order,
    })
}

/// Dyadic probe radii for a cone point, shrunk when other special points are close.
fn cone_radii(f: &DevelopingMap, p: Complex64) -> Vec<f64> {
    let nearest = f
        .exclusion_points()
        .iter()
        .filter(|q| (*q - p).norm() > 1e-12)
        .map(|q| (q - p).norm())
        .fold(1.0 - p.norm(), f64::min);
    let first = (nearest / 4.0).min(1.0 / 16.0);
    (0..7).map(|j| first * 2f64.powi(-j)).collect()
}

fn run_build(f: &DevelopingMap) -> Result<(Status, Value)> {
    let mut result = Map::new();
    result.insert("variant".into(), json!(f.variant_name()));
    result.insert(
        "model".into(),
        json!(match f.model() {
            Model::Disc => "disc",
            Model::HalfPlane => "half_plane",
        }),
    );
    match f.variant() {
        Variant::U1(m) => {
            result.insert("lambda".into(), json!(m.lambda));
            result.insert("upper".into(), json!(m.upper));
            result.insert("base_point".into(), cx(m.base_point));
            result.insert("base_value".into(), cx(m.base_value));
        }
        Variant::L0(m) => {
            result.insert("scale".into(), json!(m.scale));
            result.insert("offset".into(), json!(m.offset));
            result.insert(
                "positivity".into(),
                json!(match m.positivity {
                    Positivity::Rigorous => "rigorous",
                    Positivity::GridOnly => "grid_only",
                }),
            );
            result.insert("base_point".into(), cx(m.base_point));
            result.insert("base_value".into(), cx(m.base_value));
        }
        Variant::Blaschke(b) => {
            result.insert("degree".into(), json!(b.degree()));
            result.insert(
                "critical_points".into(),
                b.critical_points().iter().map(|(z, m)| json!({"point": cx(*z), "multiplicity": m})).collect(),
            );
        }
    }
    result.insert("singularities".into(), f.singularities().iter().map(singularity_json).collect());
    let mut all_ok = true;
    let mut cones = Vec::new();
    let mut cusps = Vec::new();
    for s in f.singularities() {
        match s.kind {
            SingularityKind::Cone => {
                let est = estimate_cone_angle(f, s.point, &cone_radii(f, s.point))?;
                let ok = (est.theta_estimate - s.theta).abs() <= 0.01 * s.theta;
                all_ok &= ok;
                cones.push(json!({
                    "point": cx(s.point),
                    "predicted": s.theta,
                    "theta_estimate": est.theta_estimate,
                    "regression_residual": est.regression_residual,
                    "radii": est.radii,
                    "within_1_percent": ok,
                }));
            }
            SingularityKind::Cusp => {
                let r = check_cusp(f, s.point)?;
                all_ok &= r.is_bounded();
                cusps.push(json!({
                    "point": cx(s.point),
                    "boundedness_spread": r.boundedness_spread,
                    "bounded": r.is_bounded(),
                }));
            }
        }
    }
    result.insert("cone_angles".into(), Value::Array(cones));
    result.insert("cusps".into(), Value::Array(cusps));
    Ok((if all_ok { Status::Pass } else { Status::AuditFailed }, Value::Object(result)))
}

fn run_monodromy(f: &DevelopingMap, random: usize, seed: u64) -> Result<(Status, Value)> {
    let mut accepted = true;
    let mut generators = Vec::new();
    let mut maps = Vec::new();
    for (pole, path) in f.poles().into_iter().zip(f.generator_loops()?) {
        let r = f.monodromy_around(&path)?;
        accepted &= r.is_accepted();
        maps.push(r.map);
        generators.push(json!({
            "pole": cx(pole),
            "map": mat(&r.map),
            "residue_prediction": mat(&r.residue_prediction),
            "agreement": r.agreement,
        }));
    }
    let mut loops = Vec::new();
    let mut worst: f64 = 0.0;
    for path in f.random_loops(random, seed) {
        let r = f.monodromy_around(&path)?;
        accepted &= r.is_accepted();
        worst = worst.max(r.agreement);
        loops.push(json!({
            "vertices": path.vertices().iter().map(|z| cx(*z)).collect::<Vec<_>>(),
            "map": mat(&r.map),
            "agreement": r.agreement,
        }));
    }
    if maps.is_empty() {
        maps.push(MoebiusMap::IDENTITY);
    }
    let group = classify_subgroup(&maps)?;
    let result = json!({
        "variant": f.variant_name(),
        "generators": generators,
        "random_loops": loops,
        "max_agreement": worst,
        "group": classification_json(&group),
        "accepted": accepted,
    });
    Ok((if accepted { Status::Pass } else { Status::AuditFailed }, result))
}

fn residue_json(r: &ConnectionResidue) -> Value {
    json!({
        "point": point_json(&r.point),
        "residue": r.residue.to_string(),
        "source": r.source.name(),
        "contour": cx(r.contour),
    })
}

fn audit_json(f: &RationalMap, r: &ResidueAuditReport) -> Value {
    let coeffs = |p: &QPoly| p.coeffs().iter().map(format_rational).collect::<Vec<_>>();
    json!({
        "numerator": coeffs(f.numerator()),
        "denominator": coeffs(f.denominator()),
        "finite_residues": r.finite_residues.iter().map(residue_json).collect::<Vec<_>>(),
        "infinity_residue": r.infinity_residue.as_ref().map(residue_json),
        "total": r.total.to_string(),
        "numeric_total": cx(r.numeric_total),
        "max_contour_error": r.max_contour_error,
        "pass": r.pass,
    })
}

fn run_residue(cfg: &ResidueConfig, seed: u64) -> Result<(Status, Value)> {
    let mut pass = true;
    let mut result = Map::new();
    match (&cfg.numerator, &cfg.denominator) {
        (Some(num), den) => {
            let texts = |c: &[Coefficient]| c.iter().map(Coefficient::text).collect::<Vec<_>>();
            let num = texts(num);
            let den = den.as_deref().map(texts).unwrap_or_else(|| vec!["1".into()]);
            let p = QPoly::parse(&num.iter().map(String::as_str).collect::<Vec<_>>())?;
            let q = QPoly::parse(&den.iter().map(String::as_str).collect::<Vec<_>>())?;
            let f = RationalMap::new(p, q)?;
            let r = residue_audit(&f)?;
            pass &= r.pass;
            result.insert("map".into(), audit_json(&f, &r));
        }
        (None, Some(_)) => return Err(bad("denominator given without numerator")),
        (None, None) if cfg.random_maps == 0 => return Err(bad("nothing to audit")),
        (None, None) => {}
    }
    if cfg.random_maps > 0 {
        if cfg.max_degree == 0 {
            return Err(bad("max_degree must be at least 1"));
        }
        let mut failures = Vec::new();
        for k in 0..cfg.random_maps {
            let f = random_rational_map(seed.wrapping_add(k as u64), cfg.max_degree);
            let r = residue_audit(&f)?;
            if !r.pass {
                failures.push(audit_json(&f, &r));
            }
        }
        pass &= failures.is_empty();
        result.insert(
            "random".into(),
            json!({"count": cfg.random_maps, "max_degree": cfg.max_degree, "failures": failures}),
        );
    }
    result.insert("pass".into(), json!(pass));
    Ok((if pass { Status::Pass } else { Status::AuditFailed }, Value::Object(result)))
}

fn run_divisor(f: &DevelopingMap) -> Result<(Status, Value)> {
    match divisor_table_audit(f) {
        Ok(t) => {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "point": cx(r.point),
                        "theta": r.theta,
                        "objects": r.checks.iter().map(|c| json!({
                            "object": c.object.name(),
                            "predicted_order": c.predicted_order,
                            "measured_slope": c.measured_slope,
                            "measured_order": c.measured_order,
                            "predicted_residue": c.predicted_residue.map(cx),
                            "measured_residue": c.measured_residue.map(cx),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let quadratic = t.quadratic.map(|b| {
                json!({"divisor": b.divisor, "predicted": b.predicted, "measured": b.measured, "holds": b.holds()})
            });
            let pass = t.pass();
            let result = json!({
                "variant": f.variant_name(),
                "rows": rows,
                "quadratic_balance": quadratic,
                "quadratic_object": CharacterObject::Quadratic.name(),
                "pass": pass,
            });
            Ok((if pass { Status::Pass } else { Status::AuditFailed }, result))
        }
        Err(e @ Error::OrderMismatch { .. }) => Ok((
            Status::AuditFailed,
            json!({"variant": f.variant_name(), "error": e.to_string(), "pass": false}),
        )),
        Err(e) => Err(e),
    }
}

/// `re,im,u,K_est` on an `n × n` grid over the admissible part of `|z| ≤ 1 − margin`.
pub fn grid_csv(f: &DevelopingMap, n: usize, cfg: &MetricConfig) -> Result<String> {
    let points = disc_grid_points(n, 1.0 - cfg.boundary_margin);
    let report = curvature_grid(f, &points, cfg)?;
    let mut out = String::from("re,im,u,K_est\n");
    for (z, k) in report.samples {
        let u = density_at(f, z)?;
        out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", z.re, z.im, u, k));
    }
    Ok(out)
}

/// Pretty printing with every float written as `{:.16e}` (17 significant digits).
struct ReportFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Report text: keys sorted, floats at 17 significant digits, trailing newline.
pub fn to_canonical_json(v: &Value) -> String {
    let mut buf = Vec::new();
    let fmt = ReportFormatter { inner: serde_json::ser::PrettyFormatter::with_indent(b"  ") };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    serde::Serialize::serialize(v, &mut ser).expect("serializing a Value cannot fail");
    let mut s = String::from_utf8(buf).expect("JSON is UTF-8");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(cmd: Command, cfg: &str) -> RunOutput {
        run_str(cmd, cfg, &RunOptions::default()).unwrap()
    }

    #[test]
    fn classify_translations() {
        let out = run_json(Command::Classify, r#"{"generators": [[1,1,0,1],[1,1.4142135623730951,0,1]]}"#);
        assert_eq!(out.report["result"]["verdict"], "L0");
        assert_eq!(out.status.exit_code(), 0);
    }

    #[test]
    fn residue_square() {
        let out = run_json(Command::ResidueAudit, r#"{"numerator": [0, 0, 1]}"#);
        assert_eq!(out.report["result"]["map"]["total"], "-2");
        assert_eq!(out.report["result"]["pass"], true);
        assert_eq!(out.status, Status::Pass);
    }

    #[test]
    fn heins_torus_is_informational() {
        let out = run_json(Command::Heins, r#"{"genus": 1}"#);
        assert_eq!(out.report["result"]["admissible"], false);
        assert_eq!(out.status.exit_code(), 0);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(run_str(Command::Heins, "{", &RunOptions::default()), Err(Error::ConfigInvalid(_))));
        assert!(matches!(
            run_str(Command::Heins, r#"{"genus": 1, "extra": 2}"#, &RunOptions::default()),
            Err(Error::ConfigInvalid(_))
        ));
        let opts = RunOptions { grid: Some(4096), ..RunOptions::default() };
        assert!(matches!(run_str(Command::Heins, r#"{"genus": 1}"#, &opts), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_canonical_json(&json!({"b": 0.1, "a": [1.0, -2.5e-7]}));
        assert_eq!(
            s,
            "{\n  \"a\": [\n    1.0000000000000000e0,\n    -2.4999999999999999e-7\n  ],\n  \"b\": 1.0000000000000001e-1\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"], json!(0.1));
    }
}
