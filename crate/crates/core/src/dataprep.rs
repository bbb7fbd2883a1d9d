//! Datasets and preprocessing: the two-class Iris subset, the WDBC loader,
//! standardisation, PCA and the affine map onto `[0, 2π)`.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Svd;

const IRIS_CSV: &str = include_str!("../data/iris.csv");

/// Largest double below 2π; the upper end of [`RangeMap`]'s output.
pub const TWO_PI_BELOW: f64 = TAU.next_down();

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    /// Class labels in `{0, 1}`.
    pub y: Vec<u8>,
    pub feature_names: Vec<String>,
    pub provenance: String,
}

impl Dataset {
    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.y.len() {
            return Err(Error::Dimension {
                expected: self.x.len(),
                got: self.y.len(),
            });
        }
        let width = self.feature_names.len();
        for (i, row) in self.x.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Dimension {
                    expected: width,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!("row {i} has a non-finite value")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// `0 → -1`, `1 → +1`.
    pub fn signed_labels(&self) -> Vec<f64> {
        self.y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect()
    }
}

fn parse_field(source: &str, line: usize, field: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::Parse {
        source_name: source.to_string(),
        line,
        message: format!("bad number {field:?}: {e}"),
    })
}

/// Setosa (0) and versicolor (1), sepal length and width: 100 rows.
pub fn load_iris_2c2f() -> Result<Dataset> {
    let source = "iris.csv (embedded)";
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (idx, line) in IRIS_CSV.lines().enumerate().skip(1) {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                source_name: source.into(),
                line: line_no,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let label = match fields[4].trim() {
            "setosa" => 0,
            "versicolor" => 1,
            "virginica" => continue,
            other => {
                return Err(Error::Parse {
                    source_name: source.into(),
                    line: line_no,
                    message: format!("unknown species {other:?}"),
                })
            }
        };
        x.push(vec![
            parse_field(source, line_no, fields[0])?,
            parse_field(source, line_no, fields[1])?,
        ]);
        y.push(label);
    }
    let ds = Dataset {
        x,
        y,
        feature_names: vec!["sepal_length".into(), "sepal_width".into()],
        provenance: "Fisher's Iris data (UCI), classes setosa/versicolor, sepal features".into(),
    };
    ds.validate()?;
    Ok(ds)
}

pub const WDBC_FEATURES: usize = 30;

/// UCI `wdbc.data`: `id,diagnosis,30 reals` per line; `M → 1`, `B → 0`.
pub fn load_wdbc(path: &Path) -> Result<Dataset> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: name.clone(),
        message: e.to_string(),
    })?;
    parse_wdbc(&text, &name)
}

pub fn parse_wdbc(text: &str, source: &str) -> Result<Dataset> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != WDBC_FEATURES + 2 {
            return Err(Error::Parse {
                source_name: source.into(),
                line: line_no,
                message: format!("expected {} fields, found {}", WDBC_FEATURES + 2, fields.len()),
            });
        }
        y.push(match fields[1].trim() {
            "M" => 1,
            "B" => 0,
            other => {
                return Err(Error::Parse {
                    source_name: source.into(),
                    line: line_no,
                    message: format!("diagnosis must be M or B, found {other:?}"),
                })
            }
        });
        x.push(
            fields[2..]
                .iter()
                .map(|f| parse_field(source, line_no, f))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    let ds = Dataset {
        x,
        y,
        feature_names: (1..=WDBC_FEATURES).map(|i| format!("feature_{i}")).collect(),
        provenance: format!("Breast Cancer Wisconsin (Diagnostic), {source}"),
    };
    ds.validate()?;
    Ok(ds)
}

fn check_matrix(x: &[Vec<f64>]) -> Result<usize> {
    let p = x.first().map(|r| r.len()).ok_or(Error::EmptySamples)?;
    if let Some(r) = x.iter().find(|r| r.len() != p) {
        return Err(Error::Dimension {
            expected: p,
            got: r.len(),
        });
    }
    Ok(p)
}

fn column_means(x: &[Vec<f64>], p: usize) -> Vec<f64> {
    let n = x.len() as f64;
    (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceEstimator {
    /// Divide by `N`.
    #[default]
    Population,
    /// Divide by `N − 1`.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub estimator: VarianceEstimator,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>], estimator: VarianceEstimator) -> Result<Self> {
        let p = check_matrix(x)?;
        let mean = column_means(x, p);
        let denom = match estimator {
            VarianceEstimator::Population => x.len() as f64,
            VarianceEstimator::Sample => (x.len() as f64 - 1.0).max(1.0),
        };
        let std: Vec<f64> = (0..p)
            .map(|j| (x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / denom).sqrt())
            .collect();
        if let Some(column) = std.iter().position(|&s| !(s > 0.0)) {
            return Err(Error::DegenerateColumn {
                column,
                what: "variance",
            });
        }
        Ok(Standardizer { mean, std, estimator })
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        x.iter()
            .map(|r| {
                if r.len() != self.mean.len() {
                    return Err(Error::Dimension {
                        expected: self.mean.len(),
                        got: r.len(),
                    });
                }
                Ok(r.iter()
                    .zip(self.mean.iter().zip(&self.std))
                    .map(|(v, (m, s))| (v - m) / s)
                    .collect())
            })
            .collect()
    }

    pub fn fit_transform(x: &[Vec<f64>], estimator: VarianceEstimator) -> Result<(Self, Vec<Vec<f64>>)> {
        let s = Standardizer::fit(x, estimator)?;
        let t = s.transform(x)?;
        Ok((s, t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `d` orthonormal rows of length `p`.
    pub components: Vec<Vec<f64>>,
    /// Sample variance (`N − 1`) along each retained component.
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    /// Principal axes from the SVD of the centred data. Each component is
    /// signed so its largest-magnitude entry is positive.
    pub fn fit(x: &[Vec<f64>], d: usize) -> Result<Self> {
        let p = check_matrix(x)?;
        let n = x.len();
        let max = p.min(n.saturating_sub(1));
        if d == 0 || d > max {
            return Err(Error::ComponentCount { requested: d, max });
        }
        let mean = column_means(x, p);
        let centered = DMatrix::from_fn(n, p, |i, j| x[i][j] - mean[j]);
        let svd = Svd::new(&centered);
        let total: f64 = svd.singular.iter().map(|s| s * s).sum();
        let mut components = Vec::with_capacity(d);
        let mut explained_variance = Vec::with_capacity(d);
        let mut explained_variance_ratio = Vec::with_capacity(d);
        for k in 0..d {
            let mut axis: Vec<f64> = svd.v.column(k).iter().cloned().collect();
            let pivot = axis
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .unwrap_or(0);
            if axis[pivot] < 0.0 {
                axis.iter_mut().for_each(|v| *v = -*v);
            }
            components.push(axis);
            let s2 = svd.singular[k] * svd.singular[k];
            explained_variance.push(s2 / (n as f64 - 1.0));
            explained_variance_ratio.push(if total > 0.0 { s2 / total } else { 0.0 });
        }
        Ok(PcaModel {
            mean,
            components,
            explained_variance,
            explained_variance_ratio,
        })
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        x.iter()
            .map(|r| {
                if r.len() != self.mean.len() {
                    return Err(Error::Dimension {
                        expected: self.mean.len(),
                        got: r.len(),
                    });
                }
                Ok(self
                    .components
                    .iter()
                    .map(|c| c.iter().zip(r.iter().zip(&self.mean)).map(|(w, (v, m))| w * (v - m)).sum())
                    .collect())
            })
            .collect()
    }

    pub fn inverse_transform(&self, scores: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        scores
            .iter()
            .map(|s| {
                if s.len() != self.components.len() {
                    return Err(Error::Dimension {
                        expected: self.components.len(),
                        got: s.len(),
                    });
                }
                let mut row = self.mean.clone();
                for (c, &w) in self.components.iter().zip(s) {
                    for (r, v) in row.iter_mut().zip(c) {
                        *r += w * v;
                    }
                }
                Ok(row)
            })
            .collect()
    }

    pub fn fit_transform(x: &[Vec<f64>], d: usize) -> Result<(Self, Vec<Vec<f64>>)> {
        let m = PcaModel::fit(x, d)?;
        let s = m.transform(x)?;
        Ok((m, s))
    }
}

/// Per-column affine map sending the fitted minimum to 0 and the maximum to
/// the largest double below 2π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeMap {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl RangeMap {
    pub fn fit(x: &[Vec<f64>]) -> Result<Self> {
        let p = check_matrix(x)?;
        let min: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).collect();
        let max: Vec<f64> = (0..p)
            .map(|j| x.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        if let Some(column) = (0..p).position(|j| !(max[j] > min[j])) {
            return Err(Error::DegenerateColumn { column, what: "range" });
        }
        Ok(RangeMap { min, max })
    }

    /// Points outside the fitted range map outside `[0, 2π)`.
    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        x.iter()
            .map(|r| {
                if r.len() != self.min.len() {
                    return Err(Error::Dimension {
                        expected: self.min.len(),
                        got: r.len(),
                    });
                }
                Ok(r.iter()
                    .enumerate()
                    .map(|(j, v)| (v - self.min[j]) / (self.max[j] - self.min[j]) * TWO_PI_BELOW)
                    .collect())
            })
            .collect()
    }
}

pub fn map_to_0_2pi(x: &[Vec<f64>]) -> Result<(RangeMap, Vec<Vec<f64>>)> {
    let m = RangeMap::fit(x)?;
    let t = m.transform(x)?;
    Ok((m, t))
}

/// PCA, then standardisation of the scores, then the `[0, 2π)` map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaPipeline {
    pub pca: PcaModel,
    pub standardizer: Standardizer,
    pub range: RangeMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// Standardised principal-component scores.
    pub standardized: Vec<Vec<f64>>,
    /// The same points mapped onto `[0, 2π)`.
    pub angles: Vec<Vec<f64>>,
}

impl PcaPipeline {
    pub fn fit_transform(
        x: &[Vec<f64>],
        components: usize,
        estimator: VarianceEstimator,
    ) -> Result<(Self, PipelineOutput)> {
        let (pca, scores) = PcaModel::fit_transform(x, components)?;
        let (standardizer, standardized) = Standardizer::fit_transform(&scores, estimator)?;
        let (range, angles) = map_to_0_2pi(&standardized)?;
        Ok((
            PcaPipeline {
                pca,
                standardizer,
                range,
            },
            PipelineOutput { standardized, angles },
        ))
    }
}

pub fn write_matrix_csv<W: Write>(mut out: W, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn iris_subset_shape() {
        let ds = load_iris_2c2f().unwrap();
        assert_eq!(ds.len(), 100);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.y.iter().filter(|&&l| l == 1).count(), 50);
        assert_eq!(ds.x[0], vec![5.1, 3.5]);
    }

    #[test]
    fn iris_standardized_range() {
        let ds = load_iris_2c2f().unwrap();
        for est in [VarianceEstimator::Population, VarianceEstimator::Sample] {
            let (_, z) = Standardizer::fit_transform(&ds.x, est).unwrap();
            let max = z.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(max < 2.75, "{max}");
        }
    }

    #[test]
    fn standardizer_examples() {
        let (s, z) = Standardizer::fit_transform(&[vec![0.0], vec![2.0]], VarianceEstimator::Population).unwrap();
        assert_eq!(s.mean, vec![1.0]);
        assert_eq!(z, vec![vec![-1.0], vec![1.0]]);
        assert_eq!(
            Standardizer::fit(&[vec![1.0, 3.0], vec![2.0, 3.0]], VarianceEstimator::Population),
            Err(Error::DegenerateColumn { column: 1, what: "variance" })
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x: Vec<Vec<f64>> = (0..50).map(|_| vec![rng.random_range(-3.0..9.0), rng.random::<f64>()]).collect();
        let (_, z) = Standardizer::fit_transform(&x, VarianceEstimator::Population).unwrap();
        for j in 0..2 {
            let mean = z.iter().map(|r| r[j]).sum::<f64>() / 50.0;
            let var = z.iter().map(|r| r[j] * r[j]).sum::<f64>() / 50.0;
            assert!(mean.abs() < 1e-10 && (var - 1.0).abs() < 1e-10);
        }
        let (_, zz) = Standardizer::fit_transform(&z, VarianceEstimator::Population).unwrap();
        for (a, b) in z.iter().flatten().zip(zz.iter().flatten()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn pca_finds_dominant_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![0.1 * rng.random_range(-1.0..1.0), 10.0 * rng.random_range(-1.0..1.0), 0.2 * rng.random_range(-1.0..1.0)])
            .collect();
        let pca = PcaModel::fit(&x, 2).unwrap();
        assert!((pca.components[0][1] - 1.0).abs() < 1e-3);
        for i in 0..2 {
            for j in 0..2 {
                let dot: f64 = pca.components[i].iter().zip(&pca.components[j]).map(|(a, b)| a * b).sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
        assert!(pca.explained_variance_ratio[0] >= pca.explained_variance_ratio[1]);
    }

    #[test]
    fn pca_full_rank_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<Vec<f64>> = (0..30).map(|_| (0..5).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let (pca, scores) = PcaModel::fit_transform(&x, 5).unwrap();
        assert!((pca.explained_variance_ratio.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let back = pca.inverse_transform(&scores).unwrap();
        for (a, b) in x.iter().flatten().zip(back.iter().flatten()) {
            assert!((a - b).abs() < 1e-8);
        }
        for c in &pca.components {
            let pivot = c.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            assert!(pivot > 0.0);
        }
        assert_eq!(PcaModel::fit(&x, 6).unwrap_err(), Error::ComponentCount { requested: 6, max: 5 });
    }

    #[test]
    fn range_map_examples() {
        let (_, t) = map_to_0_2pi(&[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(t[0][0], 0.0);
        assert!(t[1][0] < TAU && (t[1][0] - TAU).abs() < 1e-15);
        assert_eq!(
            map_to_0_2pi(&[vec![1.0], vec![1.0]]).unwrap_err(),
            Error::DegenerateColumn { column: 0, what: "range" }
        );
    }

    #[test]
    fn wdbc_parse_errors() {
        let mut row = String::from("1,M");
        for i in 0..30 {
            row.push_str(&format!(",{}", i as f64 * 0.5));
        }
        let ok = parse_wdbc(&format!("{row}\n{}\n", row.replace(",M,", ",B,")), "t").unwrap();
        assert_eq!(ok.len(), 2);
        assert_eq!(ok.y, vec![1, 0]);
        assert_eq!(ok.signed_labels(), vec![1.0, -1.0]);

        let short = format!("{row}\n1,B,0.5\n");
        match parse_wdbc(&short, "t") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        let extra = format!("{row},7.0\n");
        assert!(matches!(parse_wdbc(&extra, "t"), Err(Error::Parse { line: 1, .. })));
        let bad = row.replace(",1.5,", ",x,");
        assert!(matches!(parse_wdbc(&bad, "t"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load_wdbc(Path::new("/nonexistent/wdbc.data")), Err(Error::Io { .. })));
    }

    #[test]
    fn matrix_csv() {
        let mut out = Vec::new();
        write_matrix_csv(&mut out, &["a", "b"], &[vec![1.0, 2.5]]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a,b\n1,2.5\n");
    }

    proptest! {
        #[test]
        fn range_map_stays_in_bounds(x in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..30)) {
            if let Ok((_, t)) = map_to_0_2pi(&x) {
                prop_assert!(t.iter().flatten().all(|v| (0.0..TAU).contains(v)));
            }
        }
    }
}
