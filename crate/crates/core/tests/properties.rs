use proptest::prelude::*;

use semireg::chart::{flat, lie_bracket};
use semireg::expr::{BinOp, Func};
use semireg::linalg::SquareMatrix;
use semireg::radical::{cocontract, RadicalDecomposition};
use semireg::{parse, Chart, ExprAst, MetricField, PointwiseCovector, VectorField};

const COORDS: [&str; 3] = ["x", "y", "z"];

fn coords() -> Vec<String> {
    COORDS.iter().map(|s| s.to_string()).collect()
}

/// Expressions that are smooth everywhere on the sample box.
fn smooth_expr() -> impl Strategy<Value = ExprAst> {
    let leaf = prop_oneof![
        (0.0..4.0_f64).prop_map(ExprAst::num),
        (0..3_usize).prop_map(ExprAst::coord),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::mul(a, b)),
            (inner.clone(), 1..4_i32).prop_map(|(a, k)| ExprAst::pow(a, ExprAst::num(k as f64))),
            inner.clone().prop_map(ExprAst::neg),
            (inner, prop::sample::select(vec![Func::Sin, Func::Cos, Func::Tanh]))
                .prop_map(|(a, f)| ExprAst::call(f, a)),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0_f64, 3)
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs())
}

fn eval_at(e: &ExprAst, p: &[f64]) -> f64 {
    e.eval_value(p).unwrap()
}

fn field(comps: [&str; 3]) -> VectorField {
    VectorField::parse(&Chart::new(&COORDS).unwrap(), &comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jets_match_central_differences(e in smooth_expr(), p in point()) {
        let jet = e.eval_jet2(&p).unwrap();
        let at = |moves: &[(usize, f64)]| {
            let mut q = p.clone();
            for &(i, h) in moves {
                q[i] += h;
            }
            eval_at(&e, &q)
        };
        prop_assert!(rel_gap(jet.value(), eval_at(&e, &p)) <= 1e-12);
        let (h1, h2) = (1e-5, 1e-4);
        // loose enough for finite-difference error on deep compositions
        let scale = 1.0 + jet.grad().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..3 {
            let fd = (at(&[(i, h1)]) - at(&[(i, -h1)])) / (2.0 * h1);
            prop_assert!((jet.d(i) - fd).abs() <= 1e-6 * scale.max(fd.abs()), "d{i}: {} vs {fd}", jet.d(i));
            for j in 0..3 {
                let fd = (at(&[(i, h2), (j, h2)]) - at(&[(i, h2), (j, -h2)]) - at(&[(i, -h2), (j, h2)])
                    + at(&[(i, -h2), (j, -h2)]))
                    / (4.0 * h2 * h2);
                let hs = 1.0 + jet.hess(i, j).abs().max(fd.abs());
                prop_assert!((jet.hess(i, j) - fd).abs() <= 1e-4 * hs.max(scale), "d{i}d{j}: {} vs {fd}", jet.hess(i, j));
            }
        }
    }

    #[test]
    fn printed_expressions_parse_back(e in smooth_expr(), p in point()) {
        let text = e.to_text(&COORDS);
        let back = parse(&text, &coords()).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.to_text(&COORDS), text);
        prop_assert_eq!(eval_at(&back, &p), eval_at(&e, &p));
    }

    #[test]
    fn bracket_is_bilinear(a in -2.0..2.0_f64, b in -2.0..2.0_f64, p in point()) {
        let x = field(["y^2", "sin(x)", "x*z"]);
        let y = field(["z", "x^2 - y", "cos(y)"]);
        let w = field(["x*y", "1", "z^3"]);
        let comb = VectorField::linear_combination(a, &y, b, &w);
        let left = lie_bracket(&x, &comb, &p).unwrap();
        let xy = lie_bracket(&x, &y, &p).unwrap();
        let xw = lie_bracket(&x, &w, &p).unwrap();
        let yx = lie_bracket(&y, &x, &p).unwrap();
        for k in 0..3 {
            prop_assert!(rel_gap(left[k], a * xy[k] + b * xw[k]) <= 1e-12);
            prop_assert!(rel_gap(xy[k], -yx[k]) <= 1e-14);
        }
    }

    #[test]
    fn flat_is_linear(a in -2.0..2.0_f64, b in -2.0..2.0_f64, p in point()) {
        let chart = Chart::new(&COORDS).unwrap();
        let g = MetricField::parse_entries(
            chart,
            &[(0, 0, "1 + x^2"), (0, 1, "y"), (1, 1, "-1"), (2, 2, "exp(z)"), (1, 2, "x*z")],
        )
        .unwrap();
        let y = field(["z", "x^2 - y", "cos(y)"]);
        let w = field(["x*y", "1", "z^3"]);
        let comb = VectorField::linear_combination(a, &y, b, &w);
        let left = flat(&g, &comb, &p).unwrap();
        let (fy, fw) = (flat(&g, &y, &p).unwrap(), flat(&g, &w, &p).unwrap());
        for k in 0..3 {
            prop_assert!(rel_gap(left.components[k], a * fy.components[k] + b * fw.components[k]) <= 1e-12);
        }
    }

    /// `(Ga)ᵀ G⁻ (Gb) = aᵀ G b` for every generalized inverse `G⁻`, so the
    /// contraction of image covectors cannot depend on the choice.
    #[test]
    fn contraction_ignores_generalized_inverse_choice(
        vs in prop::collection::vec(prop::collection::vec(-1.0..1.0_f64, 4), 1..4),
        lambdas in prop::collection::vec(prop_oneof![0.5..3.0_f64, -3.0..-0.5_f64], 3),
        a in prop::collection::vec(-1.0..1.0_f64, 4),
        b in prop::collection::vec(-1.0..1.0_f64, 4),
        junk in prop::collection::vec(-5.0..5.0_f64, 16),
    ) {
        // G = Σ λ_k v_k v_kᵀ with fewer terms than the dimension
        let g = SquareMatrix::from_fn(4, |i, j| vs.iter().zip(&lambdas).map(|(v, l)| l * v[i] * v[j]).sum());
        let d = RadicalDecomposition::from_matrix(vec![0.0; 4], g.clone(), 1e-9);
        prop_assume!(d.eigenvalues.iter().filter(|v| v.abs() > 1e-6).count() == d.rank);
        let ga = g.mul_vec(&a);
        let gb = g.mul_vec(&b);
        let want = g.bilinear(&a, &b);
        let got = cocontract(
            &d,
            &PointwiseCovector::new(vec![0.0; 4], ga.clone()),
            &PointwiseCovector::new(vec![0.0; 4], gb.clone()),
        );
        let scale = 1.0 + g.max_abs() * 16.0;
        prop_assert!((got.value - want).abs() <= 1e-8 * scale, "{} vs {want}", got.value);
        prop_assert!(got.max_residual() <= 1e-9 * scale);

        // another generalized inverse: G⁺ + (I − P) M (I − P)
        let m = SquareMatrix::from_fn(4, |i, j| junk[4 * i + j]);
        let q = SquareMatrix::identity(4).sub(&d.projector);
        let other = d.pseudo_inverse.add(&(&(&q * &m) * &q));
        let via_other = other.bilinear(&ga, &gb);
        prop_assert!((via_other - want).abs() <= 1e-8 * scale, "{via_other} vs {want}");
    }

    #[test]
    fn nondegenerate_contraction_matches_direct_solve(
        entries in prop::collection::vec(-1.0..1.0_f64, 6),
        diag in prop::collection::vec(prop_oneof![2.0..4.0_f64, -4.0..-2.0_f64], 3),
        w in prop::collection::vec(-1.0..1.0_f64, 3),
        t in prop::collection::vec(-1.0..1.0_f64, 3),
    ) {
        // diagonally dominant, so well conditioned
        let mut g = SquareMatrix::diagonal(&diag);
        let mut k = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                g[(i, j)] = 0.5 * entries[k];
                g[(j, i)] = 0.5 * entries[k];
                k += 1;
            }
        }
        let d = RadicalDecomposition::from_matrix(vec![0.0; 3], g.clone(), 1e-9);
        prop_assert_eq!(d.rank, 3);
        let got = cocontract(
            &d,
            &PointwiseCovector::new(vec![0.0; 3], w.clone()),
            &PointwiseCovector::new(vec![0.0; 3], t.clone()),
        );
        // solve G s = t by Cramer's rule
        let det3 = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let base: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| g[(i, j)]));
        let det = det3(&base);
        let s: Vec<f64> = (0..3)
            .map(|c| {
                let mut m = base;
                for (r, row) in m.iter_mut().enumerate() {
                    row[c] = t[r];
                }
                det3(&m) / det
            })
            .collect();
        let want: f64 = w.iter().zip(&s).map(|(a, b)| a * b).sum();
        prop_assert!(rel_gap(got.value, want) <= 1e-12, "{} vs {want}", got.value);
        prop_assert!(got.max_residual() <= 1e-12);
    }
}

#[test]
fn binary_operator_precedence_round_trips() {
    let e = ExprAst::binary(
        BinOp::Pow,
        ExprAst::sub(ExprAst::coord(0), ExprAst::num(1.0)),
        ExprAst::neg(ExprAst::coord(1)),
    );
    let text = e.to_text(&COORDS);
    assert_eq!(parse(&text, &coords()).unwrap(), e, "{text}");
}
