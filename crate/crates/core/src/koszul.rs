//! The Koszul form and what is built directly on it.
//!
//! `K(X,Y,Z) = ½{X⟨Y,Z⟩ + Y⟨Z,X⟩ − Z⟨X,Y⟩ − ⟨X,[Y,Z]⟩ + ⟨Y,[Z,X]⟩ + ⟨Z,[X,Y]⟩}`
//!
//! is defined without inverting the metric, so it makes sense on degenerate
//! charts. The formula is written once over [`Scalar`] so the same code gives
//! pointwise values (`f64`) and values with gradients (`Jet1`).

use std::fmt;
use std::str::FromStr;

use crate::chart::{
    bracket_values, EvaluableOneForm, FieldAt, FieldLocal, MetricAt, MetricField, MetricLocal,
    OneFormJet, VectorField,
};
use crate::expr::DomainError;
use crate::jet::{Jet1, Scalar};
use crate::linalg::norm;
use crate::radical::{cocontract_slices, ContractionResult, RadicalDecomposition};

/// Six-term Koszul formula on first-order local data.
pub fn kosz_local<T: Scalar>(
    g: &MetricLocal<T>,
    x: &FieldLocal<T>,
    y: &FieldLocal<T>,
    z: &FieldLocal<T>,
) -> T {
    let x_yz = x.apply(&g.pair_gradient(y, z));
    let y_zx = y.apply(&g.pair_gradient(z, x));
    let z_xy = z.apply(&g.pair_gradient(x, y));
    let yz = bracket_values(y, z);
    let zx = bracket_values(z, x);
    let xy = bracket_values(x, y);
    let s = x_yz + y_zx - z_xy - g.pair(&x.val, &yz) + g.pair(&y.val, &zx) + g.pair(&z.val, &xy);
    s.scale(0.5)
}

/// `Γ_ijk = ½(∂_i g_jk + ∂_j g_ik − ∂_k g_ij)` at `(i * n + j) * n + k`.
pub fn christoffel_local<T: Scalar>(g: &MetricLocal<T>) -> Vec<T> {
    let n = g.n;
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push((g.dg(i, j, k) + g.dg(j, i, k) - g.dg(k, i, j)).scale(0.5));
            }
        }
    }
    out
}

/// Christoffel symbols of the first kind at a point, `Γ[i][j][k] = K(∂_i, ∂_j, ∂_k)`,
/// and their coordinate derivatives.
#[derive(Clone, Debug)]
pub struct ChristoffelFirst {
    pub point: Vec<f64>,
    pub n: usize,
    values: Vec<f64>,
    derivatives: Vec<f64>,
}

impl ChristoffelFirst {
    pub fn from_metric(point: &[f64], metric: &MetricAt) -> Self {
        let n = metric.n;
        let lifted = christoffel_local(&metric.lifted);
        let values = lifted.iter().map(|j| j.value).collect();
        let mut derivatives = vec![0.0; n * n * n * n];
        for l in 0..n {
            for (idx, j) in lifted.iter().enumerate() {
                derivatives[l * n * n * n + idx] = j.grad[l];
            }
        }
        ChristoffelFirst {
            point: point.to_vec(),
            n,
            values,
            derivatives,
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    /// `∂_l Γ[i][j][k]`
    pub fn derivative(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.derivatives[l * self.n * self.n * self.n + (i * self.n + j) * self.n + k]
    }

    /// The covector `Γ[i][j][·]`.
    pub fn covector(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.n).map(|k| self.get(i, j, k)).collect()
    }
}

/// Evaluates the Koszul form of a fixed metric.
#[derive(Clone, Debug)]
pub struct KoszulEvaluator {
    pub metric: MetricField,
    pub rank_tol: f64,
}

impl KoszulEvaluator {
    pub fn new(metric: MetricField, rank_tol: f64) -> Self {
        KoszulEvaluator { metric, rank_tol }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// All pointwise data at `p`, sharing one radical decomposition.
    pub fn at(&self, p: &[f64]) -> Result<KoszulPoint, DomainError> {
        let metric = self.metric.at(p)?;
        let decomposition =
            RadicalDecomposition::from_matrix(p.to_vec(), metric.matrix(), self.rank_tol);
        Ok(KoszulPoint {
            point: p.to_vec(),
            metric,
            decomposition,
        })
    }

    pub fn kosz(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        p: &[f64],
    ) -> Result<f64, DomainError> {
        let at = self.at(p)?;
        Ok(at.kosz(&x.at(p)?, &y.at(p)?, &z.at(p)?))
    }

    pub fn kosz_contract(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        t: &VectorField,
        p: &[f64],
    ) -> Result<ContractionResult, DomainError> {
        let at = self.at(p)?;
        Ok(at.kosz_contract(&x.at(p)?, &y.at(p)?, &z.at(p)?, &t.at(p)?))
    }

    pub fn connection_form(&self, x: &VectorField, y: &VectorField) -> ConnectionForm {
        connection_form(&self.metric, x, y)
    }
}

#[derive(Clone, Debug)]
pub struct KoszulPoint {
    pub point: Vec<f64>,
    pub metric: MetricAt,
    pub decomposition: RadicalDecomposition,
}

impl KoszulPoint {
    pub fn dim(&self) -> usize {
        self.metric.n
    }

    pub fn field(&self, x: &VectorField) -> Result<FieldAt, DomainError> {
        x.at(&self.point)
    }

    pub fn coordinate(&self, k: usize) -> FieldAt {
        FieldAt::coordinate(self.dim(), k)
    }

    pub fn inner(&self, x: &FieldAt, y: &FieldAt) -> f64 {
        self.metric.local.pair(x.values(), y.values())
    }

    pub fn kosz(&self, x: &FieldAt, y: &FieldAt, z: &FieldAt) -> f64 {
        kosz_local(&self.metric.local, &x.local, &y.local, &z.local)
    }

    /// `K(X, Y, Z)` where `X` is only known to first order.
    pub fn kosz_first_order(&self, x: &FieldLocal<f64>, y: &FieldAt, z: &FieldAt) -> f64 {
        kosz_local(&self.metric.local, x, &y.local, &z.local)
    }

    /// Value and gradient of the scalar field `q ↦ K(X, Y, Z)(q)` at this point.
    pub fn kosz_jet(&self, x: &FieldAt, y: &FieldAt, z: &FieldAt) -> Jet1 {
        kosz_local(&self.metric.lifted, &x.lifted, &y.lifted, &z.lifted)
    }

    /// The covector `K(X, Y, ∂_·)`.
    pub fn kosz_covector(&self, x: &FieldAt, y: &FieldAt) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.kosz(x, y, &self.coordinate(k)))
            .collect()
    }

    /// `K(X,Y,•)K(Z,T,•)` through the pointwise pseudo-inverse.
    pub fn kosz_contract(
        &self,
        x: &FieldAt,
        y: &FieldAt,
        z: &FieldAt,
        t: &FieldAt,
    ) -> ContractionResult {
        let a = self.kosz_covector(x, y);
        let b = self.kosz_covector(z, t);
        cocontract_slices(&self.decomposition, &a, &b)
    }

    pub fn christoffel(&self) -> ChristoffelFirst {
        ChristoffelFirst::from_metric(&self.point, &self.metric)
    }

    /// `X♭` at this point.
    pub fn flat(&self, x: &FieldAt) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.metric.local.g(i, j) * x.values()[i]).sum())
            .collect()
    }
}

pub fn kosz(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &[f64],
) -> Result<f64, DomainError> {
    KoszulEvaluator::new(g.clone(), crate::radical::DEFAULT_RANK_TOL).kosz(x, y, z, p)
}

pub fn christoffel_first(g: &MetricField, p: &[f64]) -> Result<ChristoffelFirst, DomainError> {
    Ok(ChristoffelFirst::from_metric(p, &g.at(p)?))
}

pub fn kosz_contract(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    t: &VectorField,
    p: &[f64],
    rank_tol: f64,
) -> Result<ContractionResult, DomainError> {
    KoszulEvaluator::new(g.clone(), rank_tol).kosz_contract(x, y, z, t, p)
}

/// The one-form `ω_XY(Z) = K(Z, X, Y)`.
///
/// Components are assembled as `K(∂_k, X, Y) = Y^j (X^i Γ_kij + ∂_k X^i g_ij)`,
/// which differentiates cleanly through the metric Hessian and the field jets.
#[derive(Clone, Debug)]
pub struct ConnectionForm {
    pub metric: MetricField,
    pub x: VectorField,
    pub y: VectorField,
}

pub fn connection_form(g: &MetricField, x: &VectorField, y: &VectorField) -> ConnectionForm {
    ConnectionForm {
        metric: g.clone(),
        x: x.clone(),
        y: y.clone(),
    }
}

impl ConnectionForm {
    pub(crate) fn lifted_components(&self, p: &[f64]) -> Result<Vec<Jet1>, DomainError> {
        let n = self.metric.dim();
        let m = self.metric.at(p)?;
        let xa = self.x.at(p)?;
        let ya = self.y.at(p)?;
        let gamma = christoffel_local(&m.lifted);
        let (xl, yl, gl) = (&xa.lifted, &ya.lifted, &m.lifted);
        Ok((0..n)
            .map(|k| {
                let mut s = Jet1::from_f64(0.0);
                for j in 0..n {
                    let mut inner = Jet1::from_f64(0.0);
                    for i in 0..n {
                        inner = inner
                            + xl.val[i] * gamma[(k * n + i) * n + j]
                            + xl.partial(k, i) * gl.g(i, j);
                    }
                    s = s + yl.val[j] * inner;
                }
                s
            })
            .collect())
    }
}

impl EvaluableOneForm for ConnectionForm {
    fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn jet(&self, p: &[f64]) -> Result<OneFormJet, DomainError> {
        let n = self.dim();
        let comps = self.lifted_components(p)?;
        Ok(OneFormJet {
            values: comps.iter().map(|c| c.value).collect(),
            grads: comps.iter().map(|c| c.grad(n).to_vec()).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    NonDegenerate,
    RadicalStationary,
    NotRadicalStationary,
    SemiRegularProbePassed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NonDegenerate => "non-degenerate",
            Verdict::RadicalStationary => "radical-stationary",
            Verdict::NotRadicalStationary => "not-radical-stationary",
            Verdict::SemiRegularProbePassed => "semi-regular-probe-passed",
        }
    }

    /// Whether an observed verdict satisfies this expectation.
    pub fn satisfied_by(self, observed: Verdict) -> bool {
        self == observed
            || (self == Verdict::RadicalStationary && observed == Verdict::SemiRegularProbePassed)
    }

    pub fn is_radical_stationary(self) -> bool {
        self != Verdict::NotRadicalStationary
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [
            Verdict::NonDegenerate,
            Verdict::RadicalStationary,
            Verdict::NotRadicalStationary,
            Verdict::SemiRegularProbePassed,
        ]
        .into_iter()
        .find(|v| v.as_str() == s.trim())
        .ok_or_else(|| format!("unknown classification '{}'", s.trim()))
    }
}

#[derive(Clone, Debug)]
pub struct PointClassification {
    pub point: Vec<f64>,
    pub rank: usize,
    /// Relative residual `‖(I−P)Γ[i][j][·]‖ / max(1, ‖Γ[i][j][·]‖)` for `i <= j`.
    pub residuals: Vec<((usize, usize), f64)>,
    pub max_residual: f64,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub points: Vec<PointClassification>,
    pub tol: f64,
    pub verdict: Verdict,
    pub probes: Vec<ProbeReport>,
}

/// Why checking coordinate pairs at each sample point is enough.
pub const COORDINATE_REDUCTION_NOTE: &str = "verdict holds at sampled points only; \
coordinate pairs suffice because K(X,Y,.) = X^i Y^j K(d_i,d_j,.) + X(Y^j) g(d_j,.) \
and the second term is always in the image of the metric";

impl ClassificationReport {
    pub fn max_residual(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.max_residual))
    }
}

pub fn classify_point(at: &KoszulPoint) -> PointClassification {
    let gamma = at.christoffel();
    let n = at.dim();
    let mut residuals = Vec::new();
    for i in 0..n {
        for j in i..n {
            let cov = gamma.covector(i, j);
            let r = at.decomposition.image_residual(&cov) / norm(&cov).max(1.0);
            residuals.push(((i, j), r));
        }
    }
    let max_residual = residuals.iter().fold(0.0_f64, |m, (_, r)| m.max(*r));
    PointClassification {
        point: at.point.clone(),
        rank: at.decomposition.rank,
        residuals,
        max_residual,
    }
}

pub fn radical_stationary_check(
    g: &MetricField,
    points: &[Vec<f64>],
    tol: f64,
    rank_tol: f64,
) -> Result<ClassificationReport, DomainError> {
    let ev = KoszulEvaluator::new(g.clone(), rank_tol);
    let per_point = points
        .iter()
        .map(|p| Ok(classify_point(&ev.at(p)?)))
        .collect::<Result<Vec<_>, DomainError>>()?;
    let n = g.dim();
    let verdict = if per_point.iter().any(|p| p.max_residual > tol) {
        Verdict::NotRadicalStationary
    } else if per_point.iter().all(|p| p.rank == n) {
        Verdict::NonDegenerate
    } else {
        Verdict::RadicalStationary
    };
    Ok(ClassificationReport {
        points: per_point,
        tol,
        verdict,
        probes: Vec::new(),
    })
}

/// Straight segment in coordinates; the degeneracy locus is assumed to be
/// crossed at the midpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbePath {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

impl ProbePath {
    pub fn at(&self, s: f64) -> Vec<f64> {
        self.start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| a + s * (b - a))
            .collect()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.at(0.5)
    }
}

#[derive(Clone, Debug)]
pub struct OneSidedLimit {
    /// `(h, value)` with the sample taken at path parameter `0.5 ∓ h`.
    pub samples: Vec<(f64, f64)>,
    /// Successive extrapolations using the first `k + 1` samples.
    pub estimates: Vec<f64>,
    /// `None` when samples are non-finite or the extrapolation does not settle.
    pub limit: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub label: String,
    pub left: OneSidedLimit,
    pub right: OneSidedLimit,
    pub pointwise: Option<ContractionResult>,
    pub limits_agree: bool,
    pub pointwise_matches_limit: bool,
    /// Heuristic: both one-sided limits exist and agree.
    pub passed: bool,
    pub tol: f64,
}

const PROBE_FIRST_STEP: f64 = 0.25;

/// Neville extrapolation of `(h_k, f_k)` to `h = 0` using the first `m`
/// samples, for every `m`.
pub fn richardson_estimates(samples: &[(f64, f64)]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    for m in 1..=samples.len() {
        let hs: Vec<f64> = samples[..m].iter().map(|s| s.0).collect();
        let mut p: Vec<f64> = samples[..m].iter().map(|s| s.1).collect();
        for level in 1..m {
            for i in 0..m - level {
                let (hi, hj) = (hs[i], hs[i + level]);
                p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
            }
        }
        out.push(p[0]);
    }
    out
}

fn one_sided(samples: Vec<(f64, f64)>, tol: f64) -> OneSidedLimit {
    if samples.iter().any(|(_, v)| !v.is_finite()) || samples.len() < 2 {
        return OneSidedLimit {
            samples,
            estimates: Vec::new(),
            limit: None,
        };
    }
    let estimates = richardson_estimates(&samples);
    let k = estimates.len();
    let (last, prev) = (estimates[k - 1], estimates[k - 2]);
    let settled = last.is_finite() && (last - prev).abs() <= tol * last.abs().max(1.0);
    OneSidedLimit {
        samples,
        estimates,
        limit: settled.then_some(last),
    }
}

/// Samples `K(X,Y,•)K(Z,T,•)` along `path` on both sides of its midpoint and
/// extrapolates the one-sided limits.
#[allow(clippy::too_many_arguments)]
pub fn semi_regular_probe(
    g: &MetricField,
    fields: [&VectorField; 4],
    path: &ProbePath,
    samples: usize,
    tol: f64,
    rank_tol: f64,
    label: impl Into<String>,
) -> Result<ProbeReport, DomainError> {
    let ev = KoszulEvaluator::new(g.clone(), rank_tol);
    let value_at = |s: f64| -> Result<ContractionResult, DomainError> {
        let p = path.at(s);
        let [x, y, z, t] = fields;
        ev.kosz_contract(x, y, z, t, &p)
    };
    let mut left = Vec::with_capacity(samples);
    let mut right = Vec::with_capacity(samples);
    for k in 0..samples {
        let h = PROBE_FIRST_STEP * 0.5_f64.powi(k as i32);
        // non-finite values (and domain failures) count as probe failure
        left.push((h, value_at(0.5 - h).map_or(f64::NAN, |r| r.value)));
        right.push((h, value_at(0.5 + h).map_or(f64::NAN, |r| r.value)));
    }
    let left = one_sided(left, tol);
    let right = one_sided(right, tol);
    let pointwise = value_at(0.5).ok();
    let limits_agree = match (left.limit, right.limit) {
        (Some(a), Some(b)) => (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0),
        _ => false,
    };
    let pointwise_matches_limit = match (left.limit, pointwise) {
        (Some(a), Some(pw)) if limits_agree => (a - pw.value).abs() <= tol * a.abs().max(1.0),
        _ => false,
    };
    Ok(ProbeReport {
        label: label.into(),
        left,
        right,
        pointwise,
        limits_agree,
        pointwise_matches_limit,
        passed: limits_agree,
        tol,
    })
}
