//! Points, fields and the metric on a single coordinate chart.
//!
//! Every tensor is expressed in the coordinate basis. Frames are plain lists
//! of [`VectorField`]s.

use crate::error::Error;
use crate::expr::{parse, DomainError, ExprAst};
use crate::jet::{Jet1, Jet2, Scalar, MAX_DIM};
use crate::linalg::SquareMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, Error> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().trim().to_string()).collect();
        if names.is_empty() || names.len() > MAX_DIM {
            return Err(Error::Chart(format!(
                "chart dimension {} outside 1..={MAX_DIM}",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::Chart(format!("'{n}' is not a valid coordinate name")));
            }
            if crate::expr::Func::from_name(n).is_some() {
                return Err(Error::Chart(format!("coordinate '{n}' shadows a function name")));
            }
            if names[..i].contains(n) {
                return Err(Error::Chart(format!("duplicate coordinate name '{n}'")));
            }
        }
        Ok(Chart { names })
    }

    /// Chart with coordinates `x0, x1, ...`.
    pub fn numbered(n: usize) -> Result<Self, Error> {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        Chart::new(&names)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parse(&self, text: &str) -> Result<ExprAst, Error> {
        Ok(parse(text, &self.names)?)
    }

    fn check_expr(&self, e: &ExprAst) -> Result<(), Error> {
        match e.max_coord() {
            Some(m) if m >= self.dim() => Err(Error::Chart(format!(
                "expression references coordinate {m} on a chart of dimension {}",
                self.dim()
            ))),
            _ => Ok(()),
        }
    }
}

/// Symmetric metric whose entries are expressions; the upper triangle is
/// stored so `(i, j)` and `(j, i)` are the same expression.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    chart: Chart,
    upper: Vec<ExprAst>,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

impl MetricField {
    /// Entries default to zero; `entries` holds `(i, j, expr)` with `i <= j`.
    pub fn from_entries(
        chart: Chart,
        entries: impl IntoIterator<Item = (usize, usize, ExprAst)>,
    ) -> Result<Self, Error> {
        let n = chart.dim();
        let mut upper = vec![ExprAst::Num(0.0); n * (n + 1) / 2];
        for (i, j, e) in entries {
            if i > j || j >= n {
                return Err(Error::Chart(format!(
                    "metric entry g[{i}][{j}] is not in the upper triangle of a {n}x{n} metric"
                )));
            }
            chart.check_expr(&e)?;
            upper[upper_index(n, i, j)] = e;
        }
        Ok(MetricField { chart, upper })
    }

    /// Parses upper-triangle entries given as text.
    pub fn parse_entries(chart: Chart, entries: &[(usize, usize, &str)]) -> Result<Self, Error> {
        let parsed = entries
            .iter()
            .map(|&(i, j, s)| Ok((i, j, chart.parse(s)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        MetricField::from_entries(chart, parsed)
    }

    pub fn diagonal(chart: Chart, diag: &[&str]) -> Result<Self, Error> {
        if diag.len() != chart.dim() {
            return Err(Error::Chart(format!(
                "{} diagonal entries for a chart of dimension {}",
                diag.len(),
                chart.dim()
            )));
        }
        let entries: Vec<(usize, usize, &str)> =
            diag.iter().enumerate().map(|(i, s)| (i, i, *s)).collect();
        MetricField::parse_entries(chart, &entries)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> &ExprAst {
        &self.upper[upper_index(self.dim(), i, j)]
    }

    /// `g_ij(p)`, exactly symmetric.
    pub fn eval(&self, p: &[f64]) -> Result<SquareMatrix, DomainError> {
        check_point(p, self.dim())?;
        let n = self.dim();
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = self.entry(i, j).eval_value(p)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Second-order jets of every entry, as a dense `n × n` table.
    pub fn eval_jets(&self, p: &[f64]) -> Result<Vec<Jet2>, DomainError> {
        check_point(p, self.dim())?;
        let n = self.dim();
        let mut out = vec![Jet2::constant(n, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let jet = self.entry(i, j).eval_jet2(p)?;
                out[i * n + j] = jet;
                out[j * n + i] = jet;
            }
        }
        Ok(out)
    }

    /// The metric evaluated at `p` together with derivative data.
    pub fn at(&self, p: &[f64]) -> Result<MetricAt, DomainError> {
        let jets = self.eval_jets(p)?;
        Ok(MetricAt::from_jets(self.dim(), &jets))
    }
}

pub(crate) fn check_point(p: &[f64], n: usize) -> Result<(), DomainError> {
    if p.len() != n {
        return Err(DomainError::new(format!(
            "point has {} coordinates, chart has {n}",
            p.len()
        )));
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(DomainError::new("point has non-finite coordinates"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    components: Vec<ExprAst>,
}

impl VectorField {
    pub fn new(components: Vec<ExprAst>) -> Self {
        VectorField { components }
    }

    pub fn parse(chart: &Chart, comps: &[&str]) -> Result<Self, Error> {
        if comps.len() != chart.dim() {
            return Err(Error::Chart(format!(
                "vector field has {} components, chart has dimension {}",
                comps.len(),
                chart.dim()
            )));
        }
        Ok(VectorField {
            components: comps
                .iter()
                .map(|s| chart.parse(s))
                .collect::<Result<_, _>>()?,
        })
    }

    /// The coordinate field `∂_k`.
    pub fn coordinate(n: usize, k: usize) -> Self {
        VectorField {
            components: (0..n)
                .map(|i| ExprAst::Num(if i == k { 1.0 } else { 0.0 }))
                .collect(),
        }
    }

    pub fn constant(c: &[f64]) -> Self {
        VectorField {
            components: c.iter().map(|&v| ExprAst::Num(v)).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(&vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ExprAst] {
        &self.components
    }

    /// `f · X`
    pub fn scaled_by(&self, f: &ExprAst) -> Self {
        VectorField {
            components: self
                .components
                .iter()
                .map(|c| ExprAst::mul(f.clone(), c.clone()))
                .collect(),
        }
    }

    /// `a·X + b·Y`
    pub fn linear_combination(a: f64, x: &VectorField, b: f64, y: &VectorField) -> Self {
        VectorField {
            components: x
                .components
                .iter()
                .zip(&y.components)
                .map(|(cx, cy)| {
                    ExprAst::add(
                        ExprAst::mul(ExprAst::Num(a), cx.clone()),
                        ExprAst::mul(ExprAst::Num(b), cy.clone()),
                    )
                })
                .collect(),
        }
    }

    pub fn values(&self, p: &[f64]) -> Result<Vec<f64>, DomainError> {
        self.components.iter().map(|c| c.eval_value(p)).collect()
    }

    pub fn at(&self, p: &[f64]) -> Result<FieldAt, DomainError> {
        check_point(p, self.dim())?;
        let jets = self
            .components
            .iter()
            .map(|c| c.eval_jet2(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FieldAt::from_jets(jets))
    }

    pub fn describe(&self, chart: &Chart) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| c.to_text(chart.names()))
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// First-order local data of a scalar quantity: its value and its
/// coordinate partials, over a scalar ring `T`.
///
/// With `T = f64` this is the jet of the quantity itself. With `T = Jet1`
/// every entry additionally carries its own gradient, which lets formulas
/// written in terms of first derivatives be differentiated once more.
#[derive(Clone, Debug)]
pub struct FieldLocal<T> {
    pub n: usize,
    /// `X^i`
    pub val: Vec<T>,
    /// `∂_k X^i` at `k * n + i`
    pub d: Vec<T>,
}

impl<T: Scalar> FieldLocal<T> {
    pub fn partial(&self, k: usize, i: usize) -> T {
        self.d[k * self.n + i]
    }

    /// Directional derivative `X^a ∂_a` of a quantity with partials `grad`.
    pub fn apply(&self, grad: &[T]) -> T {
        let mut s = T::from_f64(0.0);
        for a in 0..self.n {
            s = s + self.val[a] * grad[a];
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct MetricLocal<T> {
    pub n: usize,
    /// `g_ij` at `i * n + j`
    pub g: Vec<T>,
    /// `∂_k g_ij` at `(k * n + i) * n + j`
    pub dg: Vec<T>,
}

impl<T: Scalar> MetricLocal<T> {
    pub fn g(&self, i: usize, j: usize) -> T {
        self.g[i * self.n + j]
    }

    pub fn dg(&self, k: usize, i: usize, j: usize) -> T {
        self.dg[(k * self.n + i) * self.n + j]
    }

    /// `g(a, b)` for component vectors.
    pub fn pair(&self, a: &[T], b: &[T]) -> T {
        let mut s = T::from_f64(0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                s = s + self.g(i, j) * a[i] * b[j];
            }
        }
        s
    }

    /// Partials of the scalar `⟨Y, Z⟩`.
    pub fn pair_gradient(&self, y: &FieldLocal<T>, z: &FieldLocal<T>) -> Vec<T> {
        let n = self.n;
        (0..n)
            .map(|a| {
                let mut s = T::from_f64(0.0);
                for i in 0..n {
                    for j in 0..n {
                        s = s + self.dg(a, i, j) * y.val[i] * z.val[j]
                            + self.g(i, j) * (y.partial(a, i) * z.val[j] + y.val[i] * z.partial(a, j));
                    }
                }
                s
            })
            .collect()
    }
}

/// Components `Y^i ∂_i Z^k − Z^i ∂_i Y^k`.
pub fn bracket_values<T: Scalar>(y: &FieldLocal<T>, z: &FieldLocal<T>) -> Vec<T> {
    let n = y.n;
    (0..n)
        .map(|k| {
            let mut s = T::from_f64(0.0);
            for i in 0..n {
                s = s + y.val[i] * z.partial(i, k) - z.val[i] * y.partial(i, k);
            }
            s
        })
        .collect()
}

/// A vector field evaluated to second order at a point.
#[derive(Clone, Debug)]
pub struct FieldAt {
    pub jets: Vec<Jet2>,
    pub local: FieldLocal<f64>,
    pub lifted: FieldLocal<Jet1>,
}

impl FieldAt {
    pub fn from_jets(jets: Vec<Jet2>) -> Self {
        let n = jets.len();
        let local = FieldLocal {
            n,
            val: jets.iter().map(|j| j.value()).collect(),
            d: (0..n)
                .flat_map(|k| jets.iter().map(move |j| j.d(k)))
                .collect(),
        };
        let lifted = FieldLocal {
            n,
            val: jets.iter().map(|j| j.to_jet1()).collect(),
            d: (0..n)
                .flat_map(|k| jets.iter().map(move |j| j.partial_jet1(k)))
                .collect(),
        };
        FieldAt {
            jets,
            local,
            lifted,
        }
    }

    pub fn coordinate(n: usize, k: usize) -> Self {
        FieldAt::from_jets(
            (0..n)
                .map(|i| Jet2::constant(n, if i == k { 1.0 } else { 0.0 }))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.local.n
    }

    pub fn values(&self) -> &[f64] {
        &self.local.val
    }
}

/// The metric at a point with first- and (lifted) second-order data.
#[derive(Clone, Debug)]
pub struct MetricAt {
    pub n: usize,
    pub jets: Vec<Jet2>,
    pub local: MetricLocal<f64>,
    pub lifted: MetricLocal<Jet1>,
}

impl MetricAt {
    pub fn from_jets(n: usize, jets: &[Jet2]) -> Self {
        let local = MetricLocal {
            n,
            g: jets.iter().map(|j| j.value()).collect(),
            dg: (0..n)
                .flat_map(|k| jets.iter().map(move |j| j.d(k)))
                .collect(),
        };
        let lifted = MetricLocal {
            n,
            g: jets.iter().map(|j| j.to_jet1()).collect(),
            dg: (0..n)
                .flat_map(|k| jets.iter().map(move |j| j.partial_jet1(k)))
                .collect(),
        };
        MetricAt {
            n,
            jets: jets.to_vec(),
            local,
            lifted,
        }
    }

    pub fn matrix(&self) -> SquareMatrix {
        SquareMatrix::from_fn(self.n, |i, j| self.local.g(i, j))
    }
}

/// A covector at a point, in coordinate components.
#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseCovector {
    pub point: Vec<f64>,
    pub components: Vec<f64>,
}

impl PointwiseCovector {
    pub fn new(point: Vec<f64>, components: Vec<f64>) -> Self {
        PointwiseCovector { point, components }
    }

    pub fn apply(&self, v: &[f64]) -> f64 {
        crate::linalg::dot(&self.components, v)
    }
}

/// Components `ω_j` of a one-form at a point and their partials.
#[derive(Clone, Debug, PartialEq)]
pub struct OneFormJet {
    pub values: Vec<f64>,
    /// `grads[j][i] = ∂_i ω_j`
    pub grads: Vec<Vec<f64>>,
}

/// A one-form that can be evaluated, with first derivatives, at any point.
pub trait EvaluableOneForm {
    fn dim(&self) -> usize;

    fn jet(&self, p: &[f64]) -> Result<OneFormJet, DomainError>;

    fn components(&self, p: &[f64]) -> Result<PointwiseCovector, DomainError> {
        Ok(PointwiseCovector::new(p.to_vec(), self.jet(p)?.values))
    }
}

/// One-form with expression components.
#[derive(Clone, Debug)]
pub struct ExprOneForm {
    pub components: Vec<ExprAst>,
}

impl ExprOneForm {
    pub fn parse(chart: &Chart, comps: &[&str]) -> Result<Self, Error> {
        Ok(ExprOneForm {
            components: VectorField::parse(chart, comps)?.components,
        })
    }
}

impl EvaluableOneForm for ExprOneForm {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn jet(&self, p: &[f64]) -> Result<OneFormJet, DomainError> {
        check_point(p, self.dim())?;
        let jets = self
            .components
            .iter()
            .map(|c| c.eval_jet2(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OneFormJet {
            values: jets.iter().map(|j| j.value()).collect(),
            grads: jets.iter().map(|j| j.grad().to_vec()).collect(),
        })
    }
}

/// The one-form field `X♭ = g(X, ·)`.
#[derive(Clone, Debug)]
pub struct FlatField<'a> {
    pub metric: &'a MetricField,
    pub field: &'a VectorField,
}

impl EvaluableOneForm for FlatField<'_> {
    fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn jet(&self, p: &[f64]) -> Result<OneFormJet, DomainError> {
        let n = self.dim();
        let g = self.metric.eval_jets(p)?;
        let x = self.field.at(p)?;
        let comps: Vec<Jet2> = (0..n)
            .map(|j| {
                (0..n).fold(Jet2::constant(n, 0.0), |acc, i| acc + g[i * n + j] * x.jets[i])
            })
            .collect();
        Ok(OneFormJet {
            values: comps.iter().map(|c| c.value()).collect(),
            grads: comps.iter().map(|c| c.grad().to_vec()).collect(),
        })
    }
}

pub fn metric_eval(g: &MetricField, p: &[f64]) -> Result<SquareMatrix, DomainError> {
    g.eval(p)
}

/// `[X, Y]^k(p) = X^i ∂_i Y^k − Y^i ∂_i X^k`
pub fn lie_bracket(x: &VectorField, y: &VectorField, p: &[f64]) -> Result<Vec<f64>, DomainError> {
    let xa = x.at(p)?;
    let ya = y.at(p)?;
    Ok(bracket_values(&xa.local, &ya.local))
}

/// `(X♭)_j = g_ij X^i`
pub fn flat(g: &MetricField, x: &VectorField, p: &[f64]) -> Result<PointwiseCovector, DomainError> {
    let m = g.eval(p)?;
    let xv = x.values(p)?;
    let n = g.dim();
    let comps = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)] * xv[i]).sum())
        .collect();
    Ok(PointwiseCovector::new(p.to_vec(), comps))
}

/// `(L_Y g)_ij = Y^k ∂_k g_ij + g_kj ∂_i Y^k + g_ik ∂_j Y^k`
pub fn lie_derivative_metric(
    g: &MetricField,
    y: &VectorField,
    p: &[f64],
) -> Result<SquareMatrix, DomainError> {
    let m = g.at(p)?;
    let ya = y.at(p)?;
    let (gl, yl) = (&m.local, &ya.local);
    let n = g.dim();
    let mut out = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in 0..n {
                s += yl.val[k] * gl.dg(k, i, j)
                    + gl.g(k, j) * yl.partial(i, k)
                    + gl.g(i, k) * yl.partial(j, k);
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    Ok(out)
}

/// `(dω)_ij = ∂_i ω_j − ∂_j ω_i`; applied to `(Y, Z)` it is `(dω)_ij Y^i Z^j`.
pub fn exterior_derivative_oneform(
    omega: &dyn EvaluableOneForm,
    p: &[f64],
) -> Result<SquareMatrix, DomainError> {
    let jet = omega.jet(p)?;
    let n = omega.dim();
    let mut out = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = jet.grads[j][i] - jet.grads[i][j];
            out[(i, j)] = v;
            out[(j, i)] = -v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv() -> Chart {
        Chart::new(&["u", "v"]).unwrap()
    }

    #[test]
    fn chart_validation() {
        assert!(Chart::new(&["u", "u"]).is_err());
        assert!(Chart::new::<&str>(&[]).is_err());
        assert!(Chart::new(&["1x"]).is_err());
        assert!(Chart::new(&["sin"]).is_err());
        assert!(Chart::numbered(9).is_err());
        assert_eq!(Chart::numbered(8).unwrap().dim(), 8);
    }

    #[test]
    fn metric_evaluation() {
        let polar = MetricField::diagonal(uv(), &["1", "u^2"]).unwrap();
        assert_eq!(polar.eval(&[2.0, 0.5]).unwrap(), SquareMatrix::diagonal(&[1.0, 4.0]));
        let e = MetricField::diagonal(uv(), &["1", "1"]).unwrap();
        assert_eq!(e.eval(&[7.0, -3.0]).unwrap(), SquareMatrix::identity(2));
        let c = Chart::new(&["x", "y", "z"]).unwrap();
        let d = MetricField::diagonal(c, &["1", "1", "0"]).unwrap();
        assert_eq!(d.eval(&[0.1, 0.2, 0.3]).unwrap(), SquareMatrix::diagonal(&[1.0, 1.0, 0.0]));
        let off = MetricField::parse_entries(uv(), &[(0, 0, "1"), (0, 1, "u*v"), (1, 1, "2")])
            .unwrap();
        let m = off.eval(&[2.0, 3.0]).unwrap();
        assert_eq!(m[(0, 1)], 6.0);
        assert_eq!(m[(1, 0)], 6.0);
        assert!(MetricField::parse_entries(uv(), &[(1, 0, "1")]).is_err());
        assert!(polar.eval(&[1.0]).is_err());
    }

    #[test]
    fn brackets() {
        let c = uv();
        let d0 = VectorField::coordinate(2, 0);
        let d1 = VectorField::coordinate(2, 1);
        assert_eq!(lie_bracket(&d0, &d1, &[0.3, 0.4]).unwrap(), vec![0.0, 0.0]);
        let x = VectorField::parse(&c, &["0", "u"]).unwrap();
        let y = VectorField::parse(&c, &["1", "0"]).unwrap();
        assert_eq!(lie_bracket(&x, &y, &[0.3, 0.4]).unwrap(), vec![0.0, -1.0]);
        let z = VectorField::parse(&c, &["u*v", "sin(u)"]).unwrap();
        assert_eq!(lie_bracket(&z, &z, &[0.3, 0.4]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn flats() {
        let c = uv();
        let e = MetricField::diagonal(c.clone(), &["1", "1"]).unwrap();
        let x = VectorField::constant(&[3.0, 4.0]);
        assert_eq!(flat(&e, &x, &[0.0, 0.0]).unwrap().components, vec![3.0, 4.0]);
        let d = MetricField::diagonal(c.clone(), &["1", "0"]).unwrap();
        assert_eq!(flat(&d, &x, &[0.0, 0.0]).unwrap().components, vec![3.0, 0.0]);
        let polar = MetricField::diagonal(c, &["1", "u^2"]).unwrap();
        let one = VectorField::constant(&[1.0, 1.0]);
        assert_eq!(flat(&polar, &one, &[2.0, 0.0]).unwrap().components, vec![1.0, 4.0]);
    }

    #[test]
    fn lie_derivatives() {
        let c = uv();
        let e = MetricField::diagonal(c.clone(), &["1", "1"]).unwrap();
        let d0 = VectorField::coordinate(2, 0);
        assert_eq!(lie_derivative_metric(&e, &d0, &[0.5, 0.5]).unwrap(), SquareMatrix::zeros(2));
        let radial = VectorField::parse(&c, &["u", "v"]).unwrap();
        assert_eq!(
            lie_derivative_metric(&e, &radial, &[0.5, -1.5]).unwrap(),
            SquareMatrix::diagonal(&[2.0, 2.0])
        );
        let polar = MetricField::diagonal(c, &["1", "u^2"]).unwrap();
        assert_eq!(
            lie_derivative_metric(&polar, &VectorField::zero(2), &[0.5, -1.5]).unwrap(),
            SquareMatrix::zeros(2)
        );
    }

    #[test]
    fn exterior_derivatives() {
        let c = uv();
        let constant = ExprOneForm::parse(&c, &["2", "-3"]).unwrap();
        assert_eq!(
            exterior_derivative_oneform(&constant, &[0.2, 0.7]).unwrap(),
            SquareMatrix::zeros(2)
        );
        let rot = ExprOneForm::parse(&c, &["-v/2", "u/2"]).unwrap();
        assert_eq!(
            exterior_derivative_oneform(&rot, &[0.2, 0.7]).unwrap(),
            SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]])
        );
        let e = MetricField::diagonal(c, &["1", "1"]).unwrap();
        let d0 = VectorField::coordinate(2, 0);
        let fl = FlatField {
            metric: &e,
            field: &d0,
        };
        assert_eq!(exterior_derivative_oneform(&fl, &[0.2, 0.7]).unwrap(), SquareMatrix::zeros(2));
    }
}
