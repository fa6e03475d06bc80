//! Metric specifications and the built-in catalog.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::chart::{Chart, MetricField};
use crate::error::{Error, Result};
use crate::koszul::Verdict;

/// A metric on one chart together with sampling data.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub name: String,
    pub metric: MetricField,
    /// Upper-triangle entries `(i, j, text)` as written.
    pub entries: Vec<(usize, usize, String)>,
    pub points: Vec<Vec<f64>>,
    /// Free text such as `u = 0`.
    pub locus_hint: Option<String>,
    pub expect: Option<Verdict>,
    /// Sampling box for random points, one `(lo, hi)` per coordinate.
    pub sample_box: Option<Vec<(f64, f64)>>,
}

impl MetricSpec {
    pub fn new(
        name: &str,
        coords: &[&str],
        entries: &[(usize, usize, &str)],
        points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let chart = Chart::new(coords)?;
        let metric = MetricField::parse_entries(chart, entries)?;
        let n = metric.dim();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::Chart(format!(
                "sample point has {} coordinates, expected {n}",
                p.len()
            )));
        }
        Ok(MetricSpec {
            name: name.to_string(),
            metric,
            entries: entries
                .iter()
                .map(|&(i, j, s)| (i, j, s.trim().to_string()))
                .collect(),
            points,
            locus_hint: None,
            expect: None,
            sample_box: None,
        })
    }

    pub fn diagonal(name: &str, coords: &[&str], diag: &[&str], points: Vec<Vec<f64>>) -> Result<Self> {
        let entries: Vec<(usize, usize, &str)> =
            diag.iter().enumerate().map(|(i, s)| (i, i, *s)).collect();
        MetricSpec::new(name, coords, &entries, points)
    }

    pub fn with_locus(mut self, hint: &str) -> Self {
        self.locus_hint = Some(hint.to_string());
        self
    }

    pub fn with_expect(mut self, v: Verdict) -> Self {
        self.expect = Some(v);
        self
    }

    pub fn with_box(mut self, b: Vec<(f64, f64)>) -> Self {
        self.sample_box = Some(b);
        self
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    /// Canonical config-file text; parsing it gives back an equal spec.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("name = {}\n", self.name));
        s.push_str(&format!("dim = {}\n", self.dim()));
        s.push_str(&format!("coords = {}\n", self.chart().names().join(", ")));
        let mut entries = self.entries.clone();
        entries.sort_by_key(|e| (e.0, e.1));
        for (i, j, e) in &entries {
            s.push_str(&format!("g[{i}][{j}] = {e}\n"));
        }
        for p in &self.points {
            s.push_str(&format!("point = {}\n", join(p)));
        }
        if let Some(b) = &self.sample_box {
            let parts: Vec<String> = b.iter().map(|(lo, hi)| format!("{lo}:{hi}")).collect();
            s.push_str(&format!("box = {}\n", parts.join(", ")));
        }
        if let Some(h) = &self.locus_hint {
            s.push_str(&format!("locus_hint = {h}\n"));
        }
        if let Some(v) = self.expect {
            s.push_str(&format!("expect = {v}\n"));
        }
        s
    }

    /// SHA-256 of the canonical config text.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_config_text().as_bytes()))
    }

    /// The locus hint read as `coordinate = value`, if it has that shape.
    pub fn locus_coordinate(&self) -> Option<(usize, f64)> {
        let hint = self.locus_hint.as_deref()?;
        let (name, value) = hint.split_once('=')?;
        let idx = self.chart().names().iter().position(|c| c == name.trim())?;
        let v: f64 = value.trim().parse().ok()?;
        v.is_finite().then_some((idx, v))
    }

    /// Whether `p` lies on the hinted coordinate locus.
    pub fn on_hinted_locus(&self, p: &[f64]) -> bool {
        self.locus_coordinate().is_some_and(|(i, v)| p[i] == v)
    }

    /// `count` uniform points in the sampling box (default `[-1, 1]^n`).
    pub fn random_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let n = self.dim();
        let b = self.sample_box.clone().unwrap_or_else(|| vec![(-1.0, 1.0); n]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                b.iter()
                    .map(|&(lo, hi)| if lo == hi { lo } else { rng.random_range(lo..hi) })
                    .collect()
            })
            .collect()
    }
}

fn join(p: &[f64]) -> String {
    p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

const COORD_NAMES: [&str; 4] = ["x", "y", "z", "w"];

pub fn euclidean(n: usize) -> Result<MetricSpec> {
    check_small(n)?;
    let coords = &COORD_NAMES[..n];
    let pts = vec![(0..n).map(|i| 0.5 - 0.25 * i as f64).collect(), vec![1.0; n]];
    Ok(MetricSpec::diagonal(&format!("euclidean{n}"), coords, &vec!["1"; n], pts)?
        .with_box(vec![(-2.0, 2.0); n])
        .with_expect(Verdict::NonDegenerate))
}

pub fn minkowski(n: usize) -> Result<MetricSpec> {
    check_small(n)?;
    let coords: Vec<&str> = ["t", "x", "y", "z"][..n].to_vec();
    let mut diag = vec!["1"; n];
    diag[0] = "-1";
    let pts = vec![(0..n).map(|i| 0.3 * i as f64 - 0.2).collect(), vec![1.0; n]];
    Ok(MetricSpec::diagonal(&format!("minkowski{n}"), &coords, &diag, pts)?
        .with_box(vec![(-2.0, 2.0); n])
        .with_expect(Verdict::NonDegenerate))
}

fn check_small(n: usize) -> Result<()> {
    if !(1..=4).contains(&n) {
        return Err(Error::Chart(format!("catalog dimension {n} not in 1..=4")));
    }
    Ok(())
}

/// `diag(+1 × p, −1 × q, 0 × r)` on coordinates `x0, x1, ...`.
pub fn degenerate_const(p: usize, q: usize, r: usize) -> Result<MetricSpec> {
    let n = p + q + r;
    if !(1..=8).contains(&n) {
        return Err(Error::Chart(format!("dimension {n} not in 1..=8")));
    }
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let coords: Vec<&str> = names.iter().map(String::as_str).collect();
    let diag: Vec<&str> = std::iter::repeat_n("1", p)
        .chain(std::iter::repeat_n("-1", q))
        .chain(std::iter::repeat_n("0", r))
        .collect();
    let pts = vec![vec![0.5; n], (0..n).map(|i| 0.1 * i as f64).collect()];
    let expect = if r == 0 {
        Verdict::NonDegenerate
    } else {
        Verdict::RadicalStationary
    };
    Ok(
        MetricSpec::diagonal(&format!("degenerate_const_{p}_{q}_{r}"), &coords, &diag, pts)?
            .with_box(vec![(-2.0, 2.0); n])
            .with_expect(expect),
    )
}

/// Every built-in metric.
pub fn catalog() -> Vec<MetricSpec> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(euclidean(n).expect("catalog entry"));
    }
    for n in 2..=4 {
        out.push(minkowski(n).expect("catalog entry"));
    }
    let third = std::f64::consts::FRAC_PI_3;
    out.push(
        MetricSpec::diagonal(
            "sphere2",
            &["theta", "phi"],
            &["1", "sin(theta)^2"],
            vec![vec![third, 0.2], vec![std::f64::consts::FRAC_PI_4, -1.0]],
        )
        .expect("catalog entry")
        .with_box(vec![(0.3, 2.8), (-3.0, 3.0)])
        .with_expect(Verdict::NonDegenerate),
    );
    out.push(
        MetricSpec::diagonal("polar2", &["u", "v"], &["1", "u^2"], vec![vec![2.0, 0.5], vec![0.0, 0.5]])
            .expect("catalog entry")
            .with_box(vec![(0.1, 2.0), (-2.0, 2.0)])
            .with_locus("u = 0")
            .with_expect(Verdict::RadicalStationary),
    );
    out.push(
        MetricSpec::diagonal("lightcone2", &["u", "v"], &["1", "u"], vec![vec![1.0, 0.5], vec![0.0, 0.5]])
            .expect("catalog entry")
            .with_box(vec![(0.1, 2.0), (-2.0, 2.0)])
            .with_locus("u = 0")
            .with_expect(Verdict::NotRadicalStationary),
    );
    let mut d = degenerate_const(2, 0, 1).expect("catalog entry");
    d.name = "degenerate_const".into();
    out.push(d);
    out.push(degenerate_const(1, 1, 1).expect("catalog entry"));
    out.push(
        MetricSpec::diagonal(
            "friedmann_like",
            &["t", "x", "y"],
            &["-1", "t^2", "t^2"],
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
        )
        .expect("catalog entry")
        .with_box(vec![(0.2, 2.0), (-2.0, 2.0), (-2.0, 2.0)])
        .with_locus("t = 0")
        .with_expect(Verdict::RadicalStationary),
    );
    out
}

pub fn lookup(name: &str) -> Option<MetricSpec> {
    catalog().into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let c = catalog();
        let mut names: Vec<&str> = c.iter().map(|s| s.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), c.len());
        for want in ["euclidean3", "polar2", "lightcone2", "sphere2", "friedmann_like", "minkowski4"] {
            assert!(lookup(want).is_some(), "{want}");
        }
    }

    #[test]
    fn degenerate_const_signature() {
        let d = degenerate_const(1, 1, 1).unwrap();
        let m = d.metric.eval(&[0.0; 3]).unwrap();
        assert_eq!((m[(0, 0)], m[(1, 1)], m[(2, 2)]), (1.0, -1.0, 0.0));
    }

    #[test]
    fn locus_hint_and_random_points() {
        let p = lookup("polar2").unwrap();
        assert_eq!(p.locus_coordinate(), Some((0, 0.0)));
        assert!(p.on_hinted_locus(&[0.0, 3.0]));
        let a = p.random_points(20, 3);
        assert_eq!(a, p.random_points(20, 3));
        assert!(a.iter().all(|q| (0.1..2.0).contains(&q[0]) && (-2.0..2.0).contains(&q[1])));
        assert_ne!(a, p.random_points(20, 4));
    }

    #[test]
    fn digest_is_stable() {
        let p = lookup("polar2").unwrap();
        assert_eq!(p.digest(), lookup("polar2").unwrap().digest());
        assert_ne!(p.digest(), lookup("lightcone2").unwrap().digest());
        assert_eq!(p.digest().len(), 64);
    }
}
