//! Residual checks for the identities tying the Koszul form to exterior
//! derivatives, Lie derivatives and Cartan's structural equations.
//!
//! Every check computes its two sides along separate code paths: exterior
//! derivatives come from one-form jets, the Koszul form from the six-term
//! formula, connection forms from the Christoffel expansion, contractions from
//! the pointwise pseudo-inverse. Only the metric jets are shared.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chart::{
    exterior_derivative_oneform, lie_derivative_metric, EvaluableOneForm, FieldAt, FlatField,
    MetricField, VectorField,
};
use crate::curvature::riemann_at;
use crate::error::{Error, Result};
use crate::expr::{DomainError, ExprAst, Func};
use crate::jet::Jet2;
use crate::koszul::{connection_form, KoszulEvaluator, KoszulPoint};
use crate::linalg::{dot, SquareMatrix};
use crate::radical::{in_image_slice, DEFAULT_RANK_TOL};

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
pub const DEFAULT_IMAGE_TOL: f64 = 1e-8;
/// Orthonormality tolerance for user frames.
pub const FRAME_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    /// The metric is degenerate at the point.
    pub on_locus: bool,
    /// A contracted covector lies outside the annihilator space.
    pub out_of_image: bool,
}

impl Flags {
    pub fn any(self) -> bool {
        self.on_locus || self.out_of_image
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.on_locus, self.out_of_image) {
            (false, false) => f.write_str("-"),
            (true, false) => f.write_str("on-locus"),
            (false, true) => f.write_str("out-of-image"),
            (true, true) => f.write_str("on-locus,out-of-image"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub identity: String,
    pub point: Vec<f64>,
    pub fields: Vec<String>,
    pub left: f64,
    pub right: f64,
    pub abs_residual: f64,
    /// `|left − right| / max(1, |left|, |right|)`
    pub rel_residual: f64,
    pub flags: Flags,
    /// Largest `‖(I − P)ω‖` over the covectors that were contracted.
    pub image_residual: f64,
    /// Secondary comparison attached to some identities.
    pub consistency: Option<f64>,
}

impl ResidualReport {
    pub fn new(
        identity: impl Into<String>,
        point: &[f64],
        fields: Vec<String>,
        left: f64,
        right: f64,
    ) -> Self {
        let abs_residual = (left - right).abs();
        let scale = 1.0_f64.max(left.abs()).max(right.abs());
        ResidualReport {
            identity: identity.into(),
            point: point.to_vec(),
            fields,
            left,
            right,
            abs_residual,
            rel_residual: abs_residual / scale,
            flags: Flags::default(),
            image_residual: 0.0,
            consistency: None,
        }
    }

    fn flagged(mut self, flags: Flags, image_residual: f64) -> Self {
        self.flags = flags;
        self.image_residual = image_residual;
        self
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.rel_residual <= tol
    }
}

/// `(α ∧ β)_ij = α_i β_j − α_j β_i`
fn wedge(a: &[f64], b: &[f64], i: usize, j: usize) -> f64 {
    a[i] * b[j] - a[j] * b[i]
}

/// `[X, Y]^k` straight from the component jets.
fn bracket_from_jets(x: &FieldAt, y: &FieldAt) -> Vec<f64> {
    let n = x.dim();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| x.jets[i].value() * y.jets[k].d(i) - y.jets[i].value() * x.jets[k].d(i))
                .sum()
        })
        .collect()
}

/// The scalar field `⟨A, B⟩` as a jet.
fn pair_jet(g: &[Jet2], a: &FieldAt, b: &FieldAt) -> Jet2 {
    let n = a.dim();
    let mut s = Jet2::constant(n, 0.0);
    for i in 0..n {
        for j in 0..n {
            s = s + g[i * n + j] * a.jets[i] * b.jets[j];
        }
    }
    s
}

fn pairing(g: &[Jet2], a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += g[i * n + j].value() * a[i] * b[j];
        }
    }
    s
}

/// Evaluates the identity residuals for one metric.
#[derive(Clone, Debug)]
pub struct IdentityChecker {
    pub koszul: KoszulEvaluator,
    pub image_tol: f64,
}

struct Prepared {
    at: KoszulPoint,
    fields: Vec<FieldAt>,
    descriptions: Vec<String>,
}

impl IdentityChecker {
    pub fn new(metric: MetricField, rank_tol: f64) -> Self {
        IdentityChecker {
            koszul: KoszulEvaluator::new(metric, rank_tol),
            image_tol: DEFAULT_IMAGE_TOL,
        }
    }

    pub fn metric(&self) -> &MetricField {
        &self.koszul.metric
    }

    fn prepare(&self, fields: &[&VectorField], p: &[f64]) -> Result<Prepared> {
        let at = self.koszul.at(p)?;
        let chart = self.metric().chart();
        Ok(Prepared {
            fields: fields.iter().map(|f| f.at(p)).collect::<Result<_, _>>()?,
            descriptions: fields.iter().map(|f| f.describe(chart)).collect(),
            at,
        })
    }

    /// Flags for a set of contracted covector pairs `K(A, B, ·)`.
    fn contraction_flags(&self, at: &KoszulPoint, pairs: &[(&FieldAt, &FieldAt)]) -> (Flags, f64) {
        let mut out = false;
        let mut worst = 0.0_f64;
        for (a, b) in pairs {
            let c = in_image_slice(&at.decomposition, &at.kosz_covector(a, b), self.image_tol);
            out |= !c.inside;
            worst = worst.max(c.residual);
        }
        (
            Flags {
                on_locus: at.decomposition.is_degenerate(),
                out_of_image: out,
            },
            worst,
        )
    }

    fn locus_flags(at: &KoszulPoint) -> Flags {
        Flags {
            on_locus: at.decomposition.is_degenerate(),
            out_of_image: false,
        }
    }

    /// `2K(X,Y,Z)` against `(dY♭)(X,Z) + (L_Y g)(X,Z)`.
    pub fn koszul_decomposition(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        p: &[f64],
    ) -> Result<ResidualReport> {
        let pr = self.prepare(&[x, y, z], p)?;
        let [xa, ya, za] = [&pr.fields[0], &pr.fields[1], &pr.fields[2]];
        let left = 2.0 * pr.at.kosz(xa, ya, za);
        let dflat = exterior_derivative_oneform(
            &FlatField {
                metric: self.metric(),
                field: y,
            },
            p,
        )?;
        let lie = lie_derivative_metric(self.metric(), y, p)?;
        let right = dflat.bilinear(xa.values(), za.values()) + lie.bilinear(xa.values(), za.values());
        Ok(ResidualReport::new("koszul_decomposition", p, pr.descriptions, left, right)
            .flagged(Self::locus_flags(&pr.at), 0.0))
    }

    /// `(dY♭)(X,Z)` against `K(X,Y,Z) − K(Z,Y,X)`.
    pub fn flat_derivative(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        p: &[f64],
    ) -> Result<ResidualReport> {
        let pr = self.prepare(&[x, y, z], p)?;
        let [xa, ya, za] = [&pr.fields[0], &pr.fields[1], &pr.fields[2]];
        let dflat = exterior_derivative_oneform(
            &FlatField {
                metric: self.metric(),
                field: y,
            },
            p,
        )?;
        let left = dflat.bilinear(xa.values(), za.values());
        let right = pr.at.kosz(xa, ya, za) - pr.at.kosz(za, ya, xa);
        Ok(ResidualReport::new("flat_derivative", p, pr.descriptions, left, right)
            .flagged(Self::locus_flags(&pr.at), 0.0))
    }

    /// `(dX♭)(Y,Z)` against the contracted wedge
    /// `K(Y,X,•)⟨•,Z⟩ − K(Z,X,•)⟨•,Y⟩`, computed as `K(Y,X,∂_·) G⁺ Z♭ − K(Z,X,∂_·) G⁺ Y♭`.
    ///
    /// `consistency` holds the relative gap between the contracted right side
    /// and `K(Y,X,Z) − K(Z,X,Y)`; it vanishes whenever nothing is out of image.
    pub fn first_structural(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        p: &[f64],
    ) -> Result<ResidualReport> {
        let pr = self.prepare(&[x, y, z], p)?;
        let [xa, ya, za] = [&pr.fields[0], &pr.fields[1], &pr.fields[2]];
        let at = &pr.at;
        let dflat = exterior_derivative_oneform(
            &FlatField {
                metric: self.metric(),
                field: x,
            },
            p,
        )?;
        let left = dflat.bilinear(ya.values(), za.values());
        let gp = &at.decomposition.pseudo_inverse;
        let kyx = at.kosz_covector(ya, xa);
        let kzx = at.kosz_covector(za, xa);
        let right = gp.bilinear(&kyx, &at.flat(za)) - gp.bilinear(&kzx, &at.flat(ya));
        let direct = at.kosz(ya, xa, za) - at.kosz(za, xa, ya);
        let (flags, worst) = self.contraction_flags(at, &[(ya, xa), (za, xa)]);
        let mut r = ResidualReport::new("first_structural", p, pr.descriptions, left, right)
            .flagged(flags, worst);
        r.consistency = Some((right - direct).abs() / 1.0_f64.max(right.abs()).max(direct.abs()));
        Ok(r)
    }

    /// `R(X,Y,Z,T)` against `dω_XY(Z,T) + K(Z,X,•)K(T,Y,•) − K(T,X,•)K(Z,Y,•)`.
    pub fn second_structural(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        t: &VectorField,
        p: &[f64],
    ) -> Result<ResidualReport> {
        let pr = self.prepare(&[x, y, z, t], p)?;
        let [xa, ya, za, ta] = [&pr.fields[0], &pr.fields[1], &pr.fields[2], &pr.fields[3]];
        let at = &pr.at;
        let left = riemann_at(at, xa, ya, za, ta).value;
        let domega = exterior_derivative_oneform(&connection_form(self.metric(), x, y), p)?;
        let c1 = at.kosz_contract(za, xa, ta, ya);
        let c2 = at.kosz_contract(ta, xa, za, ya);
        let right = domega.bilinear(za.values(), ta.values()) + c1.value - c2.value;
        let (flags, worst) = self.contraction_flags(
            at,
            &[
                (xa, za),
                (ya, ta),
                (ya, za),
                (xa, ta),
                (za, xa),
                (ta, ya),
                (ta, xa),
                (za, ya),
            ],
        );
        Ok(ResidualReport::new("second_structural", p, pr.descriptions, left, right)
            .flagged(flags, worst))
    }

    /// First structural equation in an orthonormal frame,
    /// `dω^a = −ω_s^a ∧ ω^s`, plus the antisymmetry `ω_ab = −ω_ba`.
    ///
    /// The frame may have indefinite signature, `⟨E_a, E_b⟩ = ε_a δ_ab`; then
    /// `ω^a = ε_a E_a♭` and `ω_s^a = ε_a ω_{E_s E_a}`. Each reported value is the
    /// component with the largest discrepancy.
    pub fn frame_structural(&self, frame: &[VectorField], p: &[f64]) -> Result<Vec<ResidualReport>> {
        let n = self.koszul.dim();
        if frame.len() != n {
            return Err(Error::Frame(format!("{} fields for dimension {n}", frame.len())));
        }
        let refs: Vec<&VectorField> = frame.iter().collect();
        let pr = self.prepare(&refs, p)?;
        let at = &pr.at;
        if at.decomposition.is_degenerate() {
            return Err(Error::Frame("metric is degenerate".into()));
        }
        let mut eps = vec![0.0; n];
        for a in 0..n {
            for b in 0..n {
                let v = at.inner(&pr.fields[a], &pr.fields[b]);
                if a == b {
                    eps[a] = v.signum();
                }
                let want = if a == b { eps[a] } else { 0.0 };
                if (v - want).abs() > FRAME_TOL {
                    return Err(Error::Frame(format!("<E_{a}, E_{b}> = {v}")));
                }
            }
        }
        let coframe: Vec<Vec<f64>> = (0..n)
            .map(|s| at.flat(&pr.fields[s]).iter().map(|v| eps[s] * v).collect())
            .collect();
        // conn[s][a] = ω_{E_s E_a}
        let mut conn = vec![vec![Vec::new(); n]; n];
        for s in 0..n {
            for a in 0..n {
                conn[s][a] = connection_form(self.metric(), &frame[s], &frame[a])
                    .components(p)?
                    .components;
            }
        }
        let mut out = Vec::new();
        for a in 0..n {
            let d = exterior_derivative_oneform(
                &FlatField {
                    metric: self.metric(),
                    field: &frame[a],
                },
                p,
            )?;
            let mut best = (0.0, 0.0, (0, 0), -1.0);
            for i in 0..n {
                for j in i + 1..n {
                    let left = eps[a] * d[(i, j)];
                    let right: f64 = -(0..n)
                        .map(|s| eps[a] * wedge(&conn[s][a], &coframe[s], i, j))
                        .sum::<f64>();
                    let gap = (left - right).abs();
                    if gap > best.3 {
                        best = (left, right, (i, j), gap);
                    }
                }
            }
            let (left, right, (i, j), _) = best;
            let fields = vec![format!("a={a}"), pr.descriptions[a].clone(), format!("component ({i},{j})")];
            out.push(
                ResidualReport::new("frame_structural", p, fields, left, right)
                    .flagged(Flags::default(), 0.0),
            );
        }
        for a in 0..n {
            for b in a..n {
                let (k, left, right) = (0..n)
                    .map(|k| (k, conn[a][b][k], -conn[b][a][k]))
                    .max_by(|u, v| (u.1 - u.2).abs().total_cmp(&(v.1 - v.2).abs()))
                    .unwrap_or((0, 0.0, 0.0));
                let fields = vec![format!("a={a} b={b}"), format!("component {k}")];
                out.push(ResidualReport::new("frame_antisymmetry", p, fields, left, right));
            }
        }
        Ok(out)
    }
}

pub fn koszul_decomposition_residual(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &[f64],
) -> Result<ResidualReport> {
    IdentityChecker::new(g.clone(), DEFAULT_RANK_TOL).koszul_decomposition(x, y, z, p)
}

pub fn flat_derivative_residual(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &[f64],
) -> Result<ResidualReport> {
    IdentityChecker::new(g.clone(), DEFAULT_RANK_TOL).flat_derivative(x, y, z, p)
}

pub fn first_structural_residual(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &[f64],
) -> Result<ResidualReport> {
    IdentityChecker::new(g.clone(), DEFAULT_RANK_TOL).first_structural(x, y, z, p)
}

pub fn frame_structural_check(
    g: &MetricField,
    frame: &[VectorField],
    p: &[f64],
) -> Result<Vec<ResidualReport>> {
    IdentityChecker::new(g.clone(), DEFAULT_RANK_TOL).frame_structural(frame, p)
}

pub fn second_structural_residual(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    t: &VectorField,
    p: &[f64],
) -> Result<ResidualReport> {
    IdentityChecker::new(g.clone(), DEFAULT_RANK_TOL).second_structural(x, y, z, t, p)
}

fn fold_mul(a: ExprAst, b: ExprAst) -> ExprAst {
    match (&a, &b) {
        _ if a.is_zero_literal() || b.is_zero_literal() => ExprAst::Num(0.0),
        (ExprAst::Num(x), _) if *x == 1.0 => b,
        (_, ExprAst::Num(y)) if *y == 1.0 => a,
        (ExprAst::Num(x), ExprAst::Num(y)) => ExprAst::Num(x * y),
        _ => ExprAst::mul(a, b),
    }
}

fn fold_add(a: ExprAst, b: ExprAst) -> ExprAst {
    match (&a, &b) {
        _ if a.is_zero_literal() => b,
        _ if b.is_zero_literal() => a,
        (ExprAst::Num(x), ExprAst::Num(y)) => ExprAst::Num(x + y),
        _ => ExprAst::add(a, b),
    }
}

fn symbolic_pair(g: &MetricField, a: &[ExprAst], b: &[ExprAst]) -> ExprAst {
    let n = g.dim();
    let mut s = ExprAst::Num(0.0);
    for i in 0..n {
        for j in 0..n {
            let term = fold_mul(g.entry(i, j).clone(), fold_mul(a[i].clone(), b[j].clone()));
            s = fold_add(s, term);
        }
    }
    s
}

/// Gram–Schmidt on the coordinate fields, carried out on expressions so the
/// frame is orthonormal on a neighbourhood of `p`, not only at `p`. Signs
/// `ε_a` are fixed by the values at `p`.
pub fn gram_schmidt_frame(g: &MetricField, p: &[f64]) -> Result<Vec<VectorField>> {
    let n = g.dim();
    let mut frame: Vec<Vec<ExprAst>> = Vec::with_capacity(n);
    let mut eps: Vec<f64> = Vec::with_capacity(n);
    for a in 0..n {
        let coord: Vec<ExprAst> = (0..n)
            .map(|i| ExprAst::Num(if i == a { 1.0 } else { 0.0 }))
            .collect();
        let mut u = coord.clone();
        for (b, e) in frame.iter().enumerate() {
            let c = fold_mul(ExprAst::Num(-eps[b]), symbolic_pair(g, &coord, e));
            if c.is_zero_literal() {
                continue;
            }
            u = u
                .into_iter()
                .zip(e)
                .map(|(ui, ei)| fold_add(ui, fold_mul(c.clone(), ei.clone())))
                .collect();
        }
        let norm2 = symbolic_pair(g, &u, &u);
        let v = norm2.eval_value(p)?;
        if v.abs() < 1e-12 {
            return Err(Error::Frame(format!("null direction while orthonormalizing E_{a}")));
        }
        let s = v.signum();
        let inv = match fold_mul(ExprAst::Num(s), norm2) {
            ExprAst::Num(c) => ExprAst::Num(1.0 / c.sqrt()),
            e => ExprAst::div(ExprAst::Num(1.0), ExprAst::call(Func::Sqrt, e)),
        };
        frame.push(u.into_iter().map(|c| fold_mul(inv.clone(), c)).collect());
        eps.push(s);
    }
    Ok(frame.into_iter().map(VectorField::new).collect())
}

/// Random polynomial of degree ≤ 2 with coefficients in `[−2, 2]`.
pub fn random_polynomial(rng: &mut impl Rng, n: usize) -> ExprAst {
    let mut e = ExprAst::num(rng.random_range(-2.0..=2.0));
    for i in 0..n {
        let c = rng.random_range(-2.0..=2.0);
        e = ExprAst::add(e, ExprAst::mul(ExprAst::num(c), ExprAst::coord(i)));
    }
    for i in 0..n {
        for j in i..n {
            let c = rng.random_range(-2.0..=2.0);
            let m = ExprAst::mul(ExprAst::coord(i), ExprAst::coord(j));
            e = ExprAst::add(e, ExprAst::mul(ExprAst::num(c), m));
        }
    }
    e
}

pub fn random_field(rng: &mut impl Rng, n: usize) -> VectorField {
    VectorField::new((0..n).map(|_| random_polynomial(rng, n)).collect())
}

/// Per-point RNG seed.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Identity names produced by [`verify_suite`], in record order.
pub const KOSZUL_PROPERTIES: [&str; 10] = [
    "kosz_linear_x",
    "kosz_linear_y",
    "kosz_linear_z",
    "kosz_flinear_x",
    "kosz_leibniz_y",
    "kosz_flinear_z",
    "kosz_metric",
    "kosz_torsionless",
    "kosz_lie_derivative",
    "kosz_cyclic",
];

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub rank_tol: f64,
    pub image_tol: f64,
    /// Also run the orthonormal-frame check at non-degenerate points.
    pub frames: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            rank_tol: DEFAULT_RANK_TOL,
            image_tol: DEFAULT_IMAGE_TOL,
            frames: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointError {
    pub index: usize,
    pub point: Vec<f64>,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteResult {
    /// Records tagged with the index of their point.
    pub records: Vec<(usize, ResidualReport)>,
    pub errors: Vec<PointError>,
}

impl SuiteResult {
    pub fn max_residuals(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for (_, r) in &self.records {
            let e = m.entry(r.identity.clone()).or_insert(0.0_f64);
            *e = e.max(r.rel_residual);
        }
        m
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().fold(0.0, |m, (_, r)| m.max(r.rel_residual))
    }

    pub fn failures(&self, tol: f64) -> impl Iterator<Item = &ResidualReport> {
        self.records.iter().map(|(_, r)| r).filter(move |r| !r.passed(tol))
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.errors.is_empty() && self.failures(tol).next().is_none()
    }

    /// Indices of points where some record carries a flag.
    pub fn flagged_points(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .records
            .iter()
            .filter(|(_, r)| r.flags.any())
            .map(|(i, _)| *i)
            .collect();
        v.dedup();
        v
    }
}

fn koszul_properties(
    at: &KoszulPoint,
    metric: &MetricField,
    lie_y: &SquareMatrix,
    v: [&FieldAt; 4],
    f: &Jet2,
    ab: (f64, f64),
    descr: &[String],
) -> Result<Vec<ResidualReport>, DomainError> {
    let p = &at.point;
    let [x, y, z, w] = v;
    let (a, b) = ab;
    let n = at.dim();
    let k = |x: &FieldAt, y: &FieldAt, z: &FieldAt| at.kosz(x, y, z);
    let comb = FieldAt::from_jets(
        x.jets
            .iter()
            .zip(&w.jets)
            .map(|(&xi, &wi)| Jet2::constant(n, a) * xi + Jet2::constant(n, b) * wi)
            .collect(),
    );
    let scaled = |u: &FieldAt| FieldAt::from_jets(u.jets.iter().map(|&c| *f * c).collect());
    let fv = f.value();
    let gj = metric.eval_jets(p)?;
    let base = k(x, y, z);
    let mut out = Vec::with_capacity(10);
    let mut push = |name: &str, left: f64, right: f64| {
        out.push(ResidualReport::new(name, p, descr.to_vec(), left, right));
    };
    push("kosz_linear_x", k(&comb, y, z), a * base + b * k(w, y, z));
    push("kosz_linear_y", k(x, &comb, z), a * k(x, x, z) + b * k(x, w, z));
    push("kosz_linear_z", k(x, y, &comb), a * k(x, y, x) + b * k(x, y, w));
    push("kosz_flinear_x", k(&scaled(x), y, z), fv * base);
    let xf = dot(x.values(), f.grad());
    push(
        "kosz_leibniz_y",
        k(x, &scaled(y), z),
        fv * base + xf * pairing(&gj, y.values(), z.values()),
    );
    push("kosz_flinear_z", k(x, y, &scaled(z)), fv * base);
    let x_yz = dot(x.values(), pair_jet(&gj, y, z).grad());
    push("kosz_metric", base + k(x, z, y), x_yz);
    let xy = bracket_from_jets(x, y);
    let xy_z = pairing(&gj, &xy, z.values());
    push("kosz_torsionless", base - k(y, x, z), xy_z);
    push("kosz_lie_derivative", base + k(z, y, x), lie_y.bilinear(z.values(), x.values()));
    let y_zx = dot(y.values(), pair_jet(&gj, z, x).grad());
    push("kosz_cyclic", base + k(y, z, x), y_zx + xy_z);
    Ok(out)
}

/// Runs every identity at every point with seeded random polynomial fields
/// (or the given fields, cycled into the slots `X, Y, Z, T`).
///
/// Points run in parallel; the result is ordered by point and does not
/// depend on scheduling.
pub fn verify_suite(
    g: &MetricField,
    points: &[Vec<f64>],
    fields: Option<&[VectorField]>,
    opts: &SuiteOptions,
) -> SuiteResult {
    let mut checker = IdentityChecker::new(g.clone(), opts.rank_tol);
    checker.image_tol = opts.image_tol;
    let per_point: Vec<Result<Vec<ResidualReport>, PointError>> = points
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            suite_point(&checker, p, idx, fields, opts).map_err(|e| PointError {
                index: idx,
                point: p.clone(),
                message: e.to_string(),
            })
        })
        .collect();
    let mut result = SuiteResult::default();
    for (idx, r) in per_point.into_iter().enumerate() {
        match r {
            Ok(recs) => result.records.extend(recs.into_iter().map(|r| (idx, r))),
            Err(e) => result.errors.push(e),
        }
    }
    result
}

fn suite_point(
    checker: &IdentityChecker,
    p: &[f64],
    idx: usize,
    user: Option<&[VectorField]>,
    opts: &SuiteOptions,
) -> Result<Vec<ResidualReport>> {
    let g = checker.metric();
    let n = g.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(opts.seed, idx));
    let random: Vec<VectorField> = (0..5).map(|_| random_field(&mut rng, n)).collect();
    let f = random_polynomial(&mut rng, n);
    let a = rng.random_range(-2.0..=2.0);
    let b = rng.random_range(-2.0..=2.0);
    let slot = |k: usize| -> &VectorField {
        match user {
            Some(u) if !u.is_empty() => &u[k % u.len()],
            _ => &random[k],
        }
    };
    let (x, y, z, t) = (slot(0), slot(1), slot(2), slot(3));
    let w = &random[4];

    let at = checker.koszul.at(p)?;
    let fa = [x.at(p)?, y.at(p)?, z.at(p)?, w.at(p)?];
    let chart = g.chart();
    let mut descr: Vec<String> = [x, y, z, w].iter().map(|v| v.describe(chart)).collect();
    descr.push(format!("f = {}", f.to_text(chart.names())));
    descr.push(format!("a = {a}, b = {b}"));
    let flags = IdentityChecker::locus_flags(&at);
    let lie = lie_derivative_metric(g, y, p)?;
    let fj = f.eval_jet2(p)?;
    let mut out: Vec<ResidualReport> =
        koszul_properties(&at, g, &lie, [&fa[0], &fa[1], &fa[2], &fa[3]], &fj, (a, b), &descr)?
            .into_iter()
            .map(|r| r.flagged(flags, 0.0))
            .collect();
    out.push(checker.koszul_decomposition(x, y, z, p)?);
    out.push(checker.flat_derivative(x, y, z, p)?);
    out.push(checker.first_structural(x, y, z, p)?);
    out.push(checker.second_structural(x, y, z, t, p)?);
    if opts.frames && n <= 4 && !at.decomposition.is_degenerate() {
        let frame = gram_schmidt_frame(g, p)?;
        out.extend(checker.frame_structural(&frame, p)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use std::f64::consts::PI;

    fn d(n: usize, k: usize) -> VectorField {
        VectorField::coordinate(n, k)
    }

    fn sphere() -> MetricField {
        MetricField::diagonal(Chart::new(&["theta", "phi"]).unwrap(), &["1", "sin(theta)^2"]).unwrap()
    }

    fn polar() -> MetricField {
        MetricField::diagonal(Chart::new(&["u", "v"]).unwrap(), &["1", "u^2"]).unwrap()
    }

    fn lightcone() -> MetricField {
        MetricField::diagonal(Chart::new(&["u", "v"]).unwrap(), &["1", "u"]).unwrap()
    }

    fn euclid(n: usize) -> MetricField {
        MetricField::diagonal(Chart::numbered(n).unwrap(), &vec!["1"; n]).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let e = euclid(3);
        let r = koszul_decomposition_residual(&e, &d(3, 0), &d(3, 1), &d(3, 2), &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!((r.left, r.right), (0.0, 0.0));
        let p = [PI / 4.0, 0.3];
        let r = koszul_decomposition_residual(&sphere(), &d(2, 0), &d(2, 1), &d(2, 1), &p).unwrap();
        assert!((r.left - 1.0).abs() < 1e-12);
        assert!(r.rel_residual <= 1e-9);
        let r = koszul_decomposition_residual(&polar(), &d(2, 0), &d(2, 1), &d(2, 1), &[0.0, 0.5]).unwrap();
        assert!(r.flags.on_locus);
        assert!(r.rel_residual <= 1e-9);
    }

    #[test]
    fn flat_derivative_examples() {
        let e = euclid(2);
        let c = VectorField::constant(&[1.0, -2.0]);
        let r = flat_derivative_residual(&e, &d(2, 0), &c, &d(2, 1), &[0.4, 0.1]).unwrap();
        assert_eq!((r.left, r.right), (0.0, 0.0));
        let p = [PI / 4.0, 0.0];
        let r = flat_derivative_residual(&sphere(), &d(2, 0), &d(2, 1), &d(2, 1), &p).unwrap();
        assert!(r.rel_residual <= 1e-9);
        // X = ∂θ, Y♭ = sin²θ dφ: dY♭(∂θ, ∂φ) = 2 sinθ cosθ = 1 at π/4
        assert!((r.left - 1.0).abs() < 1e-12);
        let x = VectorField::parse(sphere().chart(), &["phi", "theta"]).unwrap();
        let r = flat_derivative_residual(&sphere(), &x, &d(2, 1), &x, &[0.7, 0.2]).unwrap();
        assert!(r.left.abs() < 1e-15 && r.right.abs() < 1e-15);
    }

    #[test]
    fn first_structural_examples() {
        let e = euclid(2);
        let c = VectorField::constant(&[0.5, 2.0]);
        let r = first_structural_residual(&e, &c, &c, &d(2, 1), &[0.0, 0.0]).unwrap();
        assert_eq!((r.left, r.right), (0.0, 0.0));
        let r = first_structural_residual(&polar(), &d(2, 1), &d(2, 0), &d(2, 1), &[2.0, 0.5]).unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
        assert!(!r.flags.any());
        assert!(r.consistency.unwrap() <= 1e-10);
        let r = first_structural_residual(&lightcone(), &d(2, 1), &d(2, 0), &d(2, 1), &[0.0, 0.5]).unwrap();
        assert!(r.flags.out_of_image && r.flags.on_locus);
        assert_eq!(r.left, 1.0);
        assert_eq!(r.right, 0.5);
        assert!((r.image_residual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn second_structural_examples() {
        let e = euclid(2);
        let r = second_structural_residual(&e, &d(2, 0), &d(2, 1), &d(2, 0), &d(2, 1), &[1.0, 1.0]).unwrap();
        assert_eq!((r.left, r.right), (0.0, 0.0));
        let th = PI / 4.0;
        let r = second_structural_residual(&sphere(), &d(2, 0), &d(2, 1), &d(2, 0), &d(2, 1), &[th, 0.0])
            .unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
        assert!((r.left.abs() - th.sin().powi(2)).abs() < 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let r = second_structural_residual(&polar(), &d(2, i), &d(2, j), &d(2, k), &d(2, l), &[1.5, 0.2])
                            .unwrap();
                        assert!(r.rel_residual <= 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn frame_examples() {
        let e = euclid(2);
        let reps = frame_structural_check(&e, &[d(2, 0), d(2, 1)], &[0.3, 0.3]).unwrap();
        assert!(reps.iter().all(|r| r.left == 0.0 && r.right == 0.0));
        let (c, s) = (0.6_f64, 0.8_f64);
        let rot = [VectorField::constant(&[c, s]), VectorField::constant(&[-s, c])];
        let reps = frame_structural_check(&e, &rot, &[0.3, -1.0]).unwrap();
        assert!(reps.iter().all(|r| r.abs_residual == 0.0));
        let sph = sphere();
        let frame = [d(2, 0), VectorField::parse(sph.chart(), &["0", "1/sin(theta)"]).unwrap()];
        let reps = frame_structural_check(&sph, &frame, &[PI / 3.0, 0.1]).unwrap();
        assert_eq!(reps.len(), 2 + 3);
        assert!(reps.iter().all(|r| r.rel_residual <= 1e-9), "{reps:?}");
        // dω^1 is not zero on the sphere, so the check is not vacuous
        assert!(reps[1].left.abs() > 0.1);
        let bad = [d(2, 0), d(2, 1)];
        assert!(matches!(
            frame_structural_check(&sph, &bad, &[PI / 3.0, 0.1]),
            Err(Error::Frame(_))
        ));
    }

    #[test]
    fn lorentzian_frame_with_signs() {
        let c = Chart::new(&["t", "x"]).unwrap();
        let g = MetricField::diagonal(c.clone(), &["-1", "t^2"]).unwrap();
        let frame = [d(2, 0), VectorField::parse(&c, &["0", "1/t"]).unwrap()];
        let reps = frame_structural_check(&g, &frame, &[1.3, 0.0]).unwrap();
        assert!(reps.iter().all(|r| r.rel_residual <= 1e-9), "{reps:?}");
    }

    #[test]
    fn gram_schmidt_is_orthonormal_nearby() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let g = MetricField::parse_entries(c, &[(0, 0, "2 + x^2"), (0, 1, "x*y"), (1, 1, "-1 - y^2")]).unwrap();
        let frame = gram_schmidt_frame(&g, &[0.3, 0.4]).unwrap();
        for q in [[0.3, 0.4], [0.35, 0.38]] {
            let m = g.eval(&q).unwrap();
            let e: Vec<Vec<f64>> = frame.iter().map(|f| f.values(&q).unwrap()).collect();
            assert!((m.bilinear(&e[0], &e[0]) - 1.0).abs() < 1e-12);
            assert!(m.bilinear(&e[0], &e[1]).abs() < 1e-12);
            assert!((m.bilinear(&e[1], &e[1]) + 1.0).abs() < 1e-12);
        }
        let reps = frame_structural_check(&g, &frame, &[0.3, 0.4]).unwrap();
        assert!(reps.iter().all(|r| r.rel_residual <= 1e-9), "{reps:?}");
    }

    #[test]
    fn suite_on_sphere_and_polar() {
        let opts = SuiteOptions {
            seed: 7,
            ..SuiteOptions::default()
        };
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![0.4 + 0.3 * i as f64, 0.1 * i as f64]).collect();
        let r = verify_suite(&sphere(), &pts, None, &opts);
        assert!(r.errors.is_empty());
        assert!(r.passed(1e-8), "{:?}", r.max_residuals());
        let names: Vec<String> = r.max_residuals().into_keys().collect();
        for p in KOSZUL_PROPERTIES {
            assert!(names.iter().any(|n| n == p));
        }
        let r = verify_suite(&polar(), &pts, None, &opts);
        assert!(r.passed(1e-8), "{:?}", r.max_residuals());
    }
}
