//! Test functions on the sphere: plateau functions `f_nu`, the
//! `ln ln` counterexample, and smooth bandlimited probes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DfsError, Result};
use crate::function::SphericalFunction;
use crate::geometry::SpherePoint;
use crate::sh_reference::spherical_harmonic;

/// Orthogonality tolerance for [`Rotation`].
pub const ROTATION_TOLERANCE: f64 = 1e-12;

/// A 3x3 matrix applied as `xi -> R xi`. Must be orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rotation(pub [[f64; 3]; 3]);

impl Default for Rotation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// A rotation whose third row is `p`, so `(R p)_3 = 1`: the north
    /// pole of the rotated frame sits at `p`.
    pub fn to_pole(p: SpherePoint) -> Rotation {
        let p = p.to_array();
        // pick the coordinate axis least aligned with p
        let i = (0..3)
            .min_by(|&a, &b| p[a].abs().total_cmp(&p[b].abs()))
            .unwrap_or(0);
        let mut e = [0.0; 3];
        e[i] = 1.0;
        let d = dot(e, p);
        let mut u = [e[0] - d * p[0], e[1] - d * p[1], e[2] - d * p[2]];
        let nu = dot(u, u).sqrt();
        u.iter_mut().for_each(|x| *x /= nu);
        let v = cross(p, u);
        Rotation([u, v, p])
    }

    pub fn apply(&self, xi: SpherePoint) -> [f64; 3] {
        let x = xi.to_array();
        self.0.map(|row| dot(row, x))
    }

    /// Third coordinate of `R xi`.
    pub fn height(&self, xi: SpherePoint) -> f64 {
        dot(self.0[2], xi.to_array())
    }

    /// `max |R^T R - I|` entrywise.
    pub fn orthogonality_defect(&self) -> f64 {
        let r = &self.0;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - id).abs());
            }
        }
        worst
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kind {
    /// `((xi_3 - a)_+)^(nu + 1)`
    FNu { nu: u32, a: f64 },
    /// `ln(ln(8 / sqrt(1 - xi_3^2)))`, zero at the poles
    Counterexample,
    /// `Re Y_degree^order`
    HarmonicProbe { degree: usize, order: i64 },
    Constant { value: f64 },
    Coordinate { axis: Axis },
}

fn default_weight() -> f64 {
    1.0
}

/// One weighted, rotated test function. All kinds are real valued.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    #[serde(flatten)]
    pub kind: Kind,
    #[serde(default)]
    pub rotation: Rotation,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

impl TestFunctionSpec {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            rotation: Rotation::IDENTITY,
            weight: 1.0,
        }
    }

    pub fn f_nu(nu: u32, a: f64) -> Self {
        Self::new(Kind::FNu { nu, a })
    }

    pub fn rotated(mut self, rotation: Rotation) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn weighted(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.rotation.orthogonality_defect();
        if !(defect <= ROTATION_TOLERANCE) {
            return Err(DfsError::InvalidArgument(format!(
                "rotation is not orthogonal (|R^T R - I| = {defect:e})"
            )));
        }
        if !self.weight.is_finite() {
            return Err(DfsError::InvalidArgument("weight must be finite".into()));
        }
        match self.kind {
            Kind::FNu { a, .. } if !(a > 0.0 && a < 1.0) => Err(DfsError::InvalidArgument(format!(
                "f_nu cut a = {a} must lie in (0, 1)"
            ))),
            Kind::HarmonicProbe { degree, order } if order.unsigned_abs() as usize > degree => Err(
                DfsError::InvalidArgument(format!("harmonic order {order} exceeds degree {degree}")),
            ),
            Kind::Constant { value } if !value.is_finite() => {
                Err(DfsError::InvalidArgument("constant must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval_real(&self, xi: SpherePoint) -> f64 {
        let w = self.weight;
        match self.kind {
            Kind::FNu { nu, a } => eval_f_nu(nu, a, &self.rotation, w, xi),
            Kind::Counterexample => w * counterexample_height(self.rotation.height(xi)),
            Kind::HarmonicProbe { degree, order } => {
                let [x, y, z] = self.rotation.apply(xi);
                let v = spherical_harmonic(degree, order, SpherePoint::new(x, y, z))
                    .map(|v| v.re)
                    .unwrap_or(f64::NAN);
                w * v
            }
            Kind::Constant { value } => w * value,
            Kind::Coordinate { axis } => {
                let r = self.rotation.apply(xi);
                w * match axis {
                    Axis::X => r[0],
                    Axis::Y => r[1],
                    Axis::Z => r[2],
                }
            }
        }
    }
}

impl SphericalFunction for TestFunctionSpec {
    fn eval(&self, xi: SpherePoint) -> Complex64 {
        Complex64::new(self.eval_real(xi), 0.0)
    }
}

/// `weight * ((t - a)_+)^(nu + 1)` with `t` the third coordinate of `R xi`.
pub fn eval_f_nu(nu: u32, a: f64, rotation: &Rotation, weight: f64, xi: SpherePoint) -> f64 {
    let t = rotation.height(xi);
    if t <= a {
        0.0
    } else {
        weight * (t - a).powi(nu as i32 + 1)
    }
}

/// `ln(ln(8 / sqrt(1 - xi_3^2)))` off the poles, `0` on them.
pub fn eval_counterexample(xi: SpherePoint) -> f64 {
    counterexample_height(xi.z)
}

fn counterexample_height(z: f64) -> f64 {
    if z.abs() >= 1.0 {
        return 0.0;
    }
    // (1 - z)(1 + z) keeps digits near the poles
    let s = ((1.0 - z) * (1.0 + z)).sqrt();
    (8.0 / s).ln().ln()
}

/// A finite sum of test functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub terms: Vec<TestFunctionSpec>,
}

impl Combination {
    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(DfsError::InvalidArgument("combination has no terms".into()));
        }
        self.terms.iter().try_for_each(TestFunctionSpec::validate)
    }

    pub fn eval_real(&self, xi: SpherePoint) -> f64 {
        self.terms.iter().map(|t| t.eval_real(xi)).sum()
    }
}

impl From<TestFunctionSpec> for Combination {
    fn from(t: TestFunctionSpec) -> Self {
        Self { terms: vec![t] }
    }
}

impl SphericalFunction for Combination {
    fn eval(&self, xi: SpherePoint) -> Complex64 {
        Complex64::new(self.eval_real(xi), 0.0)
    }
}

/// JSON function config: a single term or `{"terms": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionConfig {
    Combination(Combination),
    Single(TestFunctionSpec),
}

impl FunctionConfig {
    pub fn into_combination(self) -> Result<Combination> {
        let c = match self {
            FunctionConfig::Combination(c) => c,
            FunctionConfig::Single(t) => t.into(),
        };
        c.validate()?;
        Ok(c)
    }
}

/// Named functions used by the CLI and the test suites.
pub mod presets {
    use super::*;

    pub const NAMES: &[&str] = &[
        "constant",
        "coordinate-z",
        "f1",
        "f3",
        "f3-combo",
        "counterexample",
        "harmonic-probe",
    ];

    pub fn constant() -> Combination {
        TestFunctionSpec::new(Kind::Constant { value: 1.0 }).into()
    }

    pub fn coordinate_z() -> Combination {
        TestFunctionSpec::new(Kind::Coordinate { axis: Axis::Z }).into()
    }

    /// `((xi_3 - 1/2)_+)^2`, in `C^{1,alpha}` for every `alpha < 1`.
    pub fn f1() -> Combination {
        TestFunctionSpec::f_nu(1, 0.5).into()
    }

    pub fn f3() -> Combination {
        TestFunctionSpec::f_nu(3, 0.5).into()
    }

    /// Three rotated copies of `f_3` with cut `a = 1/2`, weights
    /// `1.0, 0.6, -0.4`, centered at `(1,0,0)`, `(0,1,0)` and `-(1,1,1)/sqrt 3`.
    pub fn standard_combination() -> Combination {
        let s = -1.0 / 3f64.sqrt();
        let poles = [
            (SpherePoint::new(1.0, 0.0, 0.0), 1.0),
            (SpherePoint::new(0.0, 1.0, 0.0), 0.6),
            (SpherePoint::new(s, s, s), -0.4),
        ];
        Combination {
            terms: poles
                .into_iter()
                .map(|(p, w)| {
                    TestFunctionSpec::f_nu(3, 0.5)
                        .rotated(Rotation::to_pole(p))
                        .weighted(w)
                })
                .collect(),
        }
    }

    pub fn f3_combo() -> Combination {
        standard_combination()
    }

    pub fn counterexample() -> Combination {
        TestFunctionSpec::new(Kind::Counterexample).into()
    }

    /// A real spherical polynomial of degree 7.
    pub fn harmonic_probe() -> Combination {
        let terms = [(0, 0, 0.5), (2, 1, 1.0), (5, -3, 0.5), (7, 4, -0.25)];
        Combination {
            terms: terms
                .into_iter()
                .map(|(degree, order, w)| {
                    TestFunctionSpec::new(Kind::HarmonicProbe { degree, order }).weighted(w)
                })
                .collect(),
        }
    }

    pub fn preset(name: &str) -> Result<Combination> {
        Ok(match name {
            "constant" => constant(),
            "coordinate-z" => coordinate_z(),
            "f1" => f1(),
            "f3" => f3(),
            "f3-combo" => f3_combo(),
            "counterexample" => counterexample(),
            "harmonic-probe" => harmonic_probe(),
            _ => {
                return Err(DfsError::InvalidArgument(format!(
                    "unknown preset '{name}' (known: {})",
                    NAMES.join(", ")
                )))
            }
        })
    }
}
