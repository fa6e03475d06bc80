//! Riemann curvature of a possibly degenerate metric, built from the Koszul
//! form:
//!
//! `R(X,Y,Z,T) = X K(Y,Z,T) − Y K(X,Z,T) − K([X,Y],Z,T)
//!              + K(X,Z,•)K(Y,T,•) − K(Y,Z,•)K(X,T,•)`
//!
//! Derivatives act on `K` only; the contractions use the pointwise
//! pseudo-inverse and are never differentiated.

use crate::chart::{bracket_values, FieldAt, FieldLocal, MetricField, VectorField};
use crate::expr::DomainError;
use crate::koszul::{KoszulEvaluator, KoszulPoint};
use crate::linalg::{dot, gauss_jordan_inverse, SquareMatrix};
use crate::radical::cocontract_slices;

/// A curvature value with its contraction diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannValue {
    pub value: f64,
    /// Largest out-of-image residual among the contracted Koszul covectors.
    pub contraction_residual: f64,
    /// The metric is degenerate at the point, so the contraction terms use
    /// the pointwise pseudo-inverse.
    pub on_locus: bool,
}

#[derive(Clone, Debug)]
pub struct RiemannEvaluator {
    pub koszul: KoszulEvaluator,
}

impl RiemannEvaluator {
    pub fn new(metric: MetricField, rank_tol: f64) -> Self {
        RiemannEvaluator {
            koszul: KoszulEvaluator::new(metric, rank_tol),
        }
    }

    pub fn riemann(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        t: &VectorField,
        p: &[f64],
    ) -> Result<RiemannValue, DomainError> {
        let at = self.koszul.at(p)?;
        Ok(riemann_at(&at, &x.at(p)?, &y.at(p)?, &z.at(p)?, &t.at(p)?))
    }

    pub fn table(&self, p: &[f64]) -> Result<RiemannTable, DomainError> {
        Ok(table_at(&self.koszul.at(p)?))
    }

    pub fn curvature_form(&self, x: &VectorField, y: &VectorField) -> CurvatureForm {
        CurvatureForm {
            evaluator: self.clone(),
            x: x.clone(),
            y: y.clone(),
        }
    }
}

/// First-order data of `[X, Y]`.
pub fn bracket_local(x: &FieldAt, y: &FieldAt) -> FieldLocal<f64> {
    let lifted = bracket_values(&x.lifted, &y.lifted);
    let n = x.dim();
    FieldLocal {
        n,
        val: lifted.iter().map(|j| j.value).collect(),
        d: (0..n)
            .flat_map(|k| lifted.iter().map(move |j| j.grad[k]))
            .collect(),
    }
}

/// Directional derivative `X (K(A, B, C))` at the point.
pub(crate) fn derivative_of_kosz(
    at: &KoszulPoint,
    x: &FieldAt,
    a: &FieldAt,
    b: &FieldAt,
    c: &FieldAt,
) -> f64 {
    let k = at.kosz_jet(a, b, c);
    dot(x.values(), k.grad(at.dim()))
}

pub fn riemann_at(at: &KoszulPoint, x: &FieldAt, y: &FieldAt, z: &FieldAt, t: &FieldAt) -> RiemannValue {
    let xk = derivative_of_kosz(at, x, y, z, t);
    let yk = derivative_of_kosz(at, y, x, z, t);
    let br = bracket_local(x, y);
    let kb = at.kosz_first_order(&br, z, t);
    let c1 = at.kosz_contract(x, z, y, t);
    let c2 = at.kosz_contract(y, z, x, t);
    RiemannValue {
        value: xk - yk - kb + c1.value - c2.value,
        contraction_residual: c1.max_residual().max(c2.max_residual()),
        on_locus: at.decomposition.is_degenerate(),
    }
}

pub fn riemann(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    t: &VectorField,
    p: &[f64],
    rank_tol: f64,
) -> Result<RiemannValue, DomainError> {
    RiemannEvaluator::new(g.clone(), rank_tol).riemann(x, y, z, t, p)
}

/// `R[i][j][k][l]` on coordinate fields at one point.
#[derive(Clone, Debug)]
pub struct RiemannTable {
    pub point: Vec<f64>,
    pub n: usize,
    pub rank: usize,
    values: Vec<f64>,
    residuals: Vec<f64>,
}

impl RiemannTable {
    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.values[self.index(i, j, k, l)]
    }

    /// Largest out-of-image residual among the covectors contracted for
    /// this entry.
    pub fn residual(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.residuals[self.index(i, j, k, l)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entries were computed with the pointwise contraction on a degenerate
    /// point and may differ from the off-locus limit.
    pub fn pointwise_contraction(&self) -> bool {
        self.rank < self.n
    }

    /// `max(1, max |R|)`
    pub fn scale(&self) -> f64 {
        self.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn indices(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |i| {
            (0..n).flat_map(move |j| (0..n).flat_map(move |k| (0..n).map(move |l| (i, j, k, l))))
        })
    }
}

/// `R_ijkl = ∂_i Γ_jkl − ∂_j Γ_ikl + Γ_ik•Γ_jl• − Γ_jk•Γ_il•`
pub fn table_at(at: &KoszulPoint) -> RiemannTable {
    let n = at.dim();
    let gamma = at.christoffel();
    let d = &at.decomposition;
    let covs: Vec<Vec<f64>> = (0..n * n).map(|ij| gamma.covector(ij / n, ij % n)).collect();
    let cov = |i: usize, j: usize| &covs[i * n + j];
    let mut values = Vec::with_capacity(n * n * n * n);
    let mut residuals = Vec::with_capacity(n * n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let c1 = cocontract_slices(d, cov(i, k), cov(j, l));
                    let c2 = cocontract_slices(d, cov(j, k), cov(i, l));
                    values.push(
                        gamma.derivative(i, j, k, l) - gamma.derivative(j, i, k, l) + c1.value
                            - c2.value,
                    );
                    residuals.push(c1.max_residual().max(c2.max_residual()));
                }
            }
        }
    }
    RiemannTable {
        point: at.point.clone(),
        n,
        rank: d.rank,
        values,
        residuals,
    }
}

pub fn riemann_table(g: &MetricField, p: &[f64], rank_tol: f64) -> Result<RiemannTable, DomainError> {
    RiemannEvaluator::new(g.clone(), rank_tol).table(p)
}

/// Textbook curvature from Christoffel symbols of the second kind, with the
/// same index convention `R(X,Y,Z,T) = g(R(X,Y)Z, T)`. Only defined where the
/// metric is invertible.
pub struct ClassicalOracle;

impl ClassicalOracle {
    /// Returns `None` at points where the metric cannot be inverted.
    pub fn table(g: &MetricField, p: &[f64]) -> Result<Option<Vec<f64>>, DomainError> {
        let n = g.dim();
        let jets = g.eval_jets(p)?;
        let gv = SquareMatrix::from_fn(n, |i, j| jets[i * n + j].value());
        let Some(inv) = gauss_jordan_inverse(&gv, 1e-12) else {
            return Ok(None);
        };
        let dg = |m: usize, i: usize, j: usize| jets[i * n + j].d(m);
        let ddg = |m: usize, q: usize, i: usize, j: usize| jets[i * n + j].hess(m, q);
        let idx3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;

        // first kind and its derivatives
        let mut g1 = vec![0.0; n * n * n];
        let mut dg1 = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    g1[idx3(i, j, l)] = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                    for m in 0..n {
                        dg1[m * n * n * n + idx3(i, j, l)] =
                            0.5 * (ddg(m, i, j, l) + ddg(m, j, i, l) - ddg(m, l, i, j));
                    }
                }
            }
        }
        // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
        let mut dinv = vec![SquareMatrix::zeros(n); n];
        for (m, dm) in dinv.iter_mut().enumerate() {
            let dgm = SquareMatrix::from_fn(n, |a, b| dg(m, a, b));
            *dm = (&(&inv * &dgm) * &inv).scaled(-1.0);
        }
        // second kind Γ^k_ij at idx3(k, i, j) and ∂_m Γ^k_ij
        let mut g2 = vec![0.0; n * n * n];
        let mut dg2 = vec![0.0; n * n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += inv[(k, l)] * g1[idx3(i, j, l)];
                    }
                    g2[idx3(k, i, j)] = s;
                    for m in 0..n {
                        let mut ds = 0.0;
                        for l in 0..n {
                            ds += dinv[m][(k, l)] * g1[idx3(i, j, l)]
                                + inv[(k, l)] * dg1[m * n * n * n + idx3(i, j, l)];
                        }
                        dg2[m * n * n * n + idx3(k, i, j)] = ds;
                    }
                }
            }
        }
        let gam = |k: usize, i: usize, j: usize| g2[idx3(k, i, j)];
        let dgam = |m: usize, k: usize, i: usize, j: usize| dg2[m * n * n * n + idx3(k, i, j)];
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut r = 0.0;
                        for m in 0..n {
                            // (R(∂_i, ∂_j) ∂_k)^m
                            let mut rm = dgam(i, m, j, k) - dgam(j, m, i, k);
                            for s in 0..n {
                                rm += gam(s, j, k) * gam(m, i, s) - gam(s, i, k) * gam(m, j, s);
                            }
                            r += gv[(l, m)] * rm;
                        }
                        out[((i * n + j) * n + k) * n + l] = r;
                    }
                }
            }
        }
        Ok(Some(out))
    }
}

/// The two-form `Ω_XY(Z, T) = R(X, Y, Z, T)`.
#[derive(Clone, Debug)]
pub struct CurvatureForm {
    pub evaluator: RiemannEvaluator,
    pub x: VectorField,
    pub y: VectorField,
}

pub fn curvature_form(g: &MetricField, x: &VectorField, y: &VectorField, rank_tol: f64) -> CurvatureForm {
    RiemannEvaluator::new(g.clone(), rank_tol).curvature_form(x, y)
}

impl CurvatureForm {
    pub fn eval(&self, z: &VectorField, t: &VectorField, p: &[f64]) -> Result<RiemannValue, DomainError> {
        self.evaluator.riemann(&self.x, &self.y, z, t, p)
    }

    /// Components `Ω(∂_k, ∂_l)` at `p`.
    pub fn components(&self, p: &[f64]) -> Result<SquareMatrix, DomainError> {
        let at = self.evaluator.koszul.at(p)?;
        let x = self.x.at(p)?;
        let y = self.y.at(p)?;
        let n = at.dim();
        let coords: Vec<FieldAt> = (0..n).map(|k| at.coordinate(k)).collect();
        Ok(SquareMatrix::from_fn(n, |k, l| {
            riemann_at(&at, &x, &y, &coords[k], &coords[l]).value
        }))
    }
}

/// Largest absolute violations of the algebraic curvature symmetries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryReport {
    pub antisym_first_pair: f64,
    pub antisym_second_pair: f64,
    pub pair_symmetry: f64,
    pub first_bianchi: f64,
    /// `max(1, max |R|)`
    pub scale: f64,
}

impl SymmetryReport {
    pub fn max_residual(&self) -> f64 {
        self.antisym_first_pair
            .max(self.antisym_second_pair)
            .max(self.pair_symmetry)
            .max(self.first_bianchi)
    }

    pub fn within(&self, rel_tol: f64) -> bool {
        self.max_residual() <= rel_tol * self.scale
    }

    pub fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("antisym_ij", self.antisym_first_pair),
            ("antisym_kl", self.antisym_second_pair),
            ("pair_symmetry", self.pair_symmetry),
            ("first_bianchi", self.first_bianchi),
        ]
    }
}

pub fn symmetry_check(t: &RiemannTable) -> SymmetryReport {
    let mut r = SymmetryReport {
        antisym_first_pair: 0.0,
        antisym_second_pair: 0.0,
        pair_symmetry: 0.0,
        first_bianchi: 0.0,
        scale: t.scale(),
    };
    for (i, j, k, l) in t.indices() {
        let v = t.get(i, j, k, l);
        r.antisym_first_pair = r.antisym_first_pair.max((v + t.get(j, i, k, l)).abs());
        r.antisym_second_pair = r.antisym_second_pair.max((v + t.get(i, j, l, k)).abs());
        r.pair_symmetry = r.pair_symmetry.max((v - t.get(k, l, i, j)).abs());
        r.first_bianchi = r
            .first_bianchi
            .max((v + t.get(j, k, i, l) + t.get(k, i, j, l)).abs());
    }
    r
}
