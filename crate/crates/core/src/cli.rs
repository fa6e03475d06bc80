//! The `check`, `curvature`, `verify` and `catalog` commands.
//!
//! Each command returns a [`RunReport`] and a process exit code:
//! 0 pass, 1 check failed, 2 usage or input error.

use crate::cartan::{verify_suite, SuiteOptions, DEFAULT_IMAGE_TOL, DEFAULT_RESIDUAL_TOL};
use crate::catalog::{catalog, MetricSpec};
use crate::chart::VectorField;
use crate::curvature::{riemann_at, symmetry_check, table_at, ClassicalOracle};
use crate::error::{Error, Result};
use crate::koszul::{
    radical_stationary_check, semi_regular_probe, KoszulEvaluator, ProbePath, ProbeReport, Verdict,
    COORDINATE_REDUCTION_NOTE,
};
use crate::radical::DEFAULT_RANK_TOL;
use crate::report::{num, CheckRecord, RunReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Tolerance for agreement of one-sided probe limits.
pub const PROBE_TOL: f64 = 1e-6;
pub const PROBE_SAMPLES: usize = 8;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub tol: f64,
    pub rank_tol: f64,
    pub seed: u64,
    /// Replace the spec's points by this many random points in its box.
    pub points: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tol: DEFAULT_RESIDUAL_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            seed: 0,
            points: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
}

impl Outcome {
    fn new(mut report: RunReport) -> Self {
        report.sort();
        let exit_code = if report.passed { EXIT_PASS } else { EXIT_FAIL };
        Outcome { report, exit_code }
    }
}

pub fn exit_code_for_error(_: &Error) -> i32 {
    EXIT_INPUT
}

pub fn sample_points(spec: &MetricSpec, opts: &RunOptions) -> Result<Vec<Vec<f64>>> {
    let pts = match opts.points {
        Some(n) => spec.random_points(n, opts.seed),
        None => spec.points.clone(),
    };
    if pts.is_empty() {
        return Err(Error::Chart(format!(
            "'{}' declares no points; add 'point = ...' lines or pass --points N",
            spec.name
        )));
    }
    Ok(pts)
}

fn base_report(command: &str, spec: &MetricSpec, opts: &RunOptions) -> RunReport {
    RunReport::new(command, &spec.name, &spec.digest(), opts.tol, opts.rank_tol)
}

fn probe_record(index: usize, quad: [usize; 4], mid: &[f64], probe: &ProbeReport) -> CheckRecord {
    let left = probe.left.limit.unwrap_or(f64::NAN);
    let right = probe.right.limit.unwrap_or(f64::NAN);
    let mut flags = Vec::new();
    match probe.pointwise {
        Some(pw) => flags.push(format!("pointwise={}", num(pw.value))),
        None => flags.push("pointwise=undefined".to_string()),
    }
    if probe.left.limit.is_none() || probe.right.limit.is_none() {
        flags.push("divergent".to_string());
    } else if probe.limits_agree && !probe.pointwise_matches_limit {
        flags.push("pointwise-differs".to_string());
    }
    CheckRecord {
        name: format!("probe[{},{},{},{}]", quad[0], quad[1], quad[2], quad[3]),
        point_index: index,
        point: mid.to_vec(),
        left,
        right,
        resid: (left - right).abs(),
        flags,
        pass: probe.passed,
    }
}

type LabeledProbe = ([usize; 4], ProbeReport);

/// Probes every contraction `K(∂_i,∂_j,•)K(∂_k,∂_l,•)` across the hinted locus.
fn run_probes(
    spec: &MetricSpec,
    base: &[f64],
    opts: &RunOptions,
) -> Result<(Vec<f64>, Vec<LabeledProbe>)> {
    let Some((axis, value)) = spec.locus_coordinate() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let n = spec.dim();
    let mut start = base.to_vec();
    let mut end = base.to_vec();
    start[axis] = value - 1.0;
    end[axis] = value + 1.0;
    let path = ProbePath { start, end };
    let mid = path.midpoint();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let d: Vec<VectorField> = (0..n).map(|k| VectorField::coordinate(n, k)).collect();
    let mut out = Vec::new();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[a..] {
            let label = format!("{i},{j},{k},{l}");
            let r = semi_regular_probe(
                &spec.metric,
                [&d[i], &d[j], &d[k], &d[l]],
                &path,
                PROBE_SAMPLES,
                PROBE_TOL,
                opts.rank_tol,
                label,
            )?;
            out.push(([i, j, k, l], r));
        }
    }
    Ok((mid, out))
}

/// Classification at the sample points, plus the semi-regular probe when the
/// spec names a locus.
pub fn cmd_check(spec: &MetricSpec, opts: &RunOptions) -> Result<Outcome> {
    let points = sample_points(spec, opts)?;
    let n = spec.dim();
    let cls = radical_stationary_check(&spec.metric, &points, opts.tol, opts.rank_tol)?;
    let mut rep = base_report("check", spec, opts);
    rep.note(COORDINATE_REDUCTION_NOTE);
    for (idx, pc) in cls.points.iter().enumerate() {
        let on_locus = pc.rank < n;
        let locus_flag = if on_locus { vec!["on-locus".to_string()] } else { Vec::new() };
        rep.records.push(CheckRecord {
            name: "rank".into(),
            point_index: idx,
            point: pc.point.clone(),
            left: pc.rank as f64,
            right: n as f64,
            resid: (n - pc.rank) as f64,
            flags: locus_flag.clone(),
            pass: true,
        });
        for &((i, j), r) in &pc.residuals {
            let mut flags = locus_flag.clone();
            if r > opts.tol {
                flags.push("out-of-image".into());
            }
            rep.records.push(CheckRecord {
                name: format!("radical_stationary[{i},{j}]"),
                point_index: idx,
                point: pc.point.clone(),
                left: r,
                right: 0.0,
                resid: r,
                flags,
                pass: r <= opts.tol,
            });
        }
    }
    let (mid, probes) = run_probes(spec, &points[0], opts)?;
    for (k, (quad, p)) in probes.iter().enumerate() {
        rep.records.push(probe_record(points.len() + k, *quad, &mid, p));
    }
    let mut verdict = cls.verdict;
    if verdict == Verdict::RadicalStationary && !probes.is_empty() && probes.iter().all(|(_, p)| p.passed) {
        verdict = Verdict::SemiRegularProbePassed;
    }
    if !probes.is_empty() {
        rep.note(
            "probes sample K(d_i,d_j,.)K(d_k,d_l,.) on both sides of the locus and \
             extrapolate one-sided limits; a passed probe is numerical evidence, not a proof",
        );
    }
    rep.passed = match spec.expect {
        Some(e) => e.satisfied_by(verdict),
        None => verdict.is_radical_stationary(),
    };
    rep.summarize("verdict", verdict);
    rep.summarize("expect", spec.expect.map_or("none".to_string(), |e| e.to_string()));
    rep.summarize("max_residual", num(cls.max_residual()));
    let passed_probes = probes.iter().filter(|(_, p)| p.passed).count();
    rep.summarize("probes", format!("{passed_probes}/{}", probes.len()));
    Ok(Outcome::new(rep))
}

/// Curvature tables and their symmetries. Each entry is compared against the
/// classical Christoffel-second-kind curvature where the metric is invertible
/// and against the six-term Koszul evaluation elsewhere.
pub fn cmd_curvature(spec: &MetricSpec, opts: &RunOptions) -> Result<Outcome> {
    let points = sample_points(spec, opts)?;
    let n = spec.dim();
    let ev = KoszulEvaluator::new(spec.metric.clone(), opts.rank_tol);
    let mut rep = base_report("curvature", spec, opts);
    rep.note("R(X,Y,Z,T) = g(R(X,Y)Z, T); on the unit sphere R[0][1][0][1] = -sin^2(theta)");
    rep.note("RIGHT is the classical curvature at non-degenerate points, the six-term Koszul evaluation at degenerate points");
    for (idx, p) in points.iter().enumerate() {
        let at = ev.at(p)?;
        let table = table_at(&at);
        let classical = if at.decomposition.is_degenerate() {
            None
        } else {
            ClassicalOracle::table(&spec.metric, p)?
        };
        let d: Vec<_> = (0..n).map(|k| at.coordinate(k)).collect();
        let on_locus = at.decomposition.is_degenerate();
        for (i, j, k, l) in table.indices() {
            let left = table.get(i, j, k, l);
            let right = match &classical {
                Some(c) => c[((i * n + j) * n + k) * n + l],
                None => riemann_at(&at, &d[i], &d[j], &d[k], &d[l]).value,
            };
            let resid = (left - right).abs() / 1.0_f64.max(left.abs()).max(right.abs());
            let mut flags = Vec::new();
            if on_locus {
                flags.push("on-locus".to_string());
            }
            if table.residual(i, j, k, l) > DEFAULT_IMAGE_TOL {
                flags.push("out-of-image".to_string());
            }
            rep.records.push(CheckRecord {
                name: format!("R[{i}][{j}][{k}][{l}]"),
                point_index: idx,
                point: p.clone(),
                left,
                right,
                resid,
                flags,
                pass: resid <= opts.tol,
            });
        }
        let sym = symmetry_check(&table);
        for (name, r) in sym.named() {
            let rel = r / sym.scale;
            rep.records.push(CheckRecord {
                name: format!("symmetry_{name}"),
                point_index: idx,
                point: p.clone(),
                left: r,
                right: 0.0,
                resid: rel,
                flags: if on_locus { vec!["on-locus".into()] } else { Vec::new() },
                pass: rel <= opts.tol,
            });
        }
    }
    rep.passed = rep.records.iter().all(|r| r.pass);
    Ok(Outcome::new(rep))
}

/// The full identity suite with seeded random fields.
pub fn cmd_verify(spec: &MetricSpec, opts: &RunOptions) -> Result<Outcome> {
    let points = sample_points(spec, opts)?;
    let suite = verify_suite(
        &spec.metric,
        &points,
        None,
        &SuiteOptions {
            seed: opts.seed,
            rank_tol: opts.rank_tol,
            image_tol: DEFAULT_IMAGE_TOL,
            frames: true,
        },
    );
    let mut rep = base_report("verify", spec, opts);
    rep.seed = Some(opts.seed);
    rep.note("fields are seeded random polynomials of degree <= 2 with coefficients in [-2,2]");
    for e in &suite.errors {
        rep.note(format!("ERROR point {} {}: {}", e.index, crate::report::format_point(&e.point), e.message));
    }
    for (idx, r) in &suite.records {
        rep.records.push(CheckRecord::from_residual(*idx, r, opts.tol));
    }
    rep.passed = suite.passed(opts.tol);
    let flagged = suite.flagged_points();
    let unflagged_failures = rep.records.iter().filter(|r| !r.pass && !r.flagged()).count();
    rep.summarize("points", points.len());
    rep.summarize("errors", suite.errors.len());
    rep.summarize("failed_unflagged", unflagged_failures);
    rep.summarize(
        "flagged_points",
        if flagged.is_empty() {
            "-".to_string()
        } else {
            flagged
                .iter()
                .map(|&i| crate::report::format_point(&points[i]))
                .collect::<Vec<_>>()
                .join(";")
        },
    );
    for (name, m) in suite.max_residuals() {
        rep.summarize(&format!("max.{name}"), num(m));
    }
    Ok(Outcome::new(rep))
}

/// Lists the catalog and re-derives every expected classification at the
/// entry's own points.
pub fn cmd_catalog(opts: &RunOptions) -> Result<(String, i32)> {
    let mut out = String::new();
    let mut ok = true;
    for spec in catalog() {
        let cls = radical_stationary_check(&spec.metric, &spec.points, opts.tol, opts.rank_tol)?;
        let expect = spec.expect.map_or("none".to_string(), |e| e.to_string());
        let pass = spec.expect.is_none_or(|e| e.satisfied_by(cls.verdict));
        ok &= pass;
        out.push_str(&format!(
            "ENTRY {} DIM {} COORDS {} EXPECT {} OBSERVED {} VERDICT {}\n",
            spec.name,
            spec.dim(),
            spec.chart().names().join(","),
            expect,
            cls.verdict,
            if pass { "pass" } else { "fail" }
        ));
    }
    out.push_str(&format!("SUMMARY status={}\n", if ok { "pass" } else { "fail" }));
    Ok((out, if ok { EXIT_PASS } else { EXIT_FAIL }))
}
