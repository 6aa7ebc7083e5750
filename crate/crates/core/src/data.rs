//! Datasets: seeded synthetic generation, LIBSVM and CSV I/O, column
//! normalization, train/test splitting and held-out evaluation.
//!
//! Random draws use ChaCha20 seeded through `seed_from_u64`, with normal
//! variates from the ziggurat sampler in `rand_distr::StandardNormal`.
//! Bitwise reproduction is guaranteed for a given seed within this crate.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::linalg::{check_len, DenseMatrix, DenseVector};

/// Tolerance on unit column norms after normalization.
pub const UNIT_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub a: DenseMatrix,
    pub b: DenseVector,
    pub feature_names: Option<Vec<String>>,
    pub normalized: bool,
}

impl Dataset {
    pub fn new(a: DenseMatrix, b: DenseVector) -> Result<Self> {
        check_len(a.rows(), b.len())?;
        Ok(Self {
            a,
            b,
            feature_names: None,
            normalized: false,
        })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn p(&self) -> usize {
        self.a.cols()
    }

    /// Scale every column to unit ℓ₂ norm. Returns the dataset and the
    /// original column norms.
    pub fn normalized(mut self) -> Result<(Self, Vec<f64>)> {
        let norms = self.a.column_norms();
        if let Some(j) = norms.iter().position(|&c| c == 0.0) {
            return Err(Error::ZeroColumn(j));
        }
        self.a.scale_columns(&norms)?;
        self.normalized = true;
        Ok((self, norms))
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        let b = rows.iter().map(|&i| self.b[i]).collect();
        Self {
            a: self.a.select_rows(rows),
            b: DenseVector::from_vec_unchecked(b),
            feature_names: self.feature_names.clone(),
            normalized: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub p: usize,
    /// Variance (not standard deviation) of the true coefficients.
    pub coef_variance: f64,
    /// Variance of the additive noise.
    pub noise_variance: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(n: usize, p: usize, seed: u64) -> Self {
        Self {
            n,
            p,
            coef_variance: 0.02,
            noise_variance: 1e-3,
            seed,
        }
    }
}

/// `A` with i.i.d. N(0,1) entries scaled to unit column norms,
/// `x⁰ ~ N(0, coef_variance)`, `b = A·x⁰ + v` with `v ~ N(0, noise_variance)`.
///
/// Draw order: `A` row by row, then `x⁰`, then `v`.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<(Dataset, DenseVector)> {
    if spec.n == 0 || spec.p == 0 {
        return Err(Error::InvalidParameter(format!(
            "synthetic dimensions must be positive, got n = {}, p = {}",
            spec.n, spec.p
        )));
    }
    if !(spec.coef_variance >= 0.0) || !(spec.noise_variance >= 0.0) {
        return Err(Error::InvalidParameter(
            "variances must be non-negative".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut draw = |len: usize, scale: f64| -> Vec<f64> {
        (0..len)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect()
    };
    let entries = draw(spec.n * spec.p, 1.0);
    let x0 = draw(spec.p, spec.coef_variance.sqrt());
    let noise = draw(spec.n, spec.noise_variance.sqrt());

    let a = DenseMatrix::new(spec.n, spec.p, entries)?;
    let raw = Dataset::new(a, DenseVector::zeros(spec.n))?;
    let (mut data, _) = raw.normalized()?;
    let ax = data.a.matvec(&x0)?;
    let b = ax.iter().zip(&noise).map(|(s, e)| s + e).collect();
    data.b = DenseVector::new(b)?;
    Ok((data, DenseVector::new(x0)?))
}

/// LIBSVM rows with the label token kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmRows {
    pub labels: Vec<String>,
    pub a: DenseMatrix,
}

/// Parse `label idx:val …` lines with 1-based, strictly ascending indices.
/// Blank lines and `#` comments are skipped. The feature count is the
/// largest index seen unless `n_features` is given.
pub fn read_libsvm<R: Read>(reader: R, n_features: Option<usize>) -> Result<LibsvmRows> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0;
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line has a token");
        let mut entries = Vec::new();
        let mut last = 0;
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("expected `index:value`, found `{tok}`"),
            })?;
            let idx: usize = idx.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad feature index `{idx}`"),
            })?;
            let val: f64 = val.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad feature value `{val}`"),
            })?;
            if !val.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("non-finite feature value `{val}`"),
                });
            }
            if idx == 0 {
                return Err(Error::Index {
                    line: lineno,
                    message: "feature indices are 1-based".into(),
                });
            }
            if idx <= last {
                return Err(Error::Index {
                    line: lineno,
                    message: format!("index {idx} does not follow {last}"),
                });
            }
            last = idx;
            entries.push((idx, val));
        }
        max_index = max_index.max(last);
        labels.push(label.to_string());
        rows.push(entries);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    let p = match n_features {
        Some(p) if p < max_index => {
            return Err(Error::Index {
                line: 0,
                message: format!("feature index {max_index} exceeds declared count {p}"),
            })
        }
        Some(p) => p,
        None => max_index,
    };
    if p == 0 {
        return Err(Error::Parse {
            line: 0,
            message: "no features present".into(),
        });
    }
    let mut data = vec![0.0; rows.len() * p];
    for (i, entries) in rows.iter().enumerate() {
        for &(idx, val) in entries {
            data[i * p + idx - 1] = val;
        }
    }
    Ok(LibsvmRows {
        labels,
        a: DenseMatrix::new(rows.len(), p, data)?,
    })
}

fn parse_labels(labels: &[String]) -> Result<DenseVector> {
    let b = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("non-numeric label `{l}`"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DenseVector::new(b)
}

impl LibsvmRows {
    /// Dataset with labels parsed as numbers.
    pub fn into_dataset(self) -> Result<Dataset> {
        let b = parse_labels(&self.labels)?;
        Dataset::new(self.a, b)
    }
}

/// Load a LIBSVM file as a dense dataset with numeric labels.
pub fn load_libsvm(path: impl AsRef<Path>, n_features: Option<usize>) -> Result<Dataset> {
    read_libsvm(File::open(path)?, n_features)?.into_dataset()
}

/// Write `d` in LIBSVM format, omitting zero entries.
pub fn write_libsvm<W: Write>(mut w: W, d: &Dataset) -> Result<()> {
    for i in 0..d.n() {
        write!(w, "{}", fmt_f64(d.b[i]))?;
        for (j, &v) in d.a.row(i).iter().enumerate() {
            if v != 0.0 {
                write!(w, " {}:{}", j + 1, fmt_f64(v))?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Map two class labels to −1 / +1.
pub fn map_labels_binary<S: AsRef<str>>(
    raw: &[S],
    negative_class: &str,
    positive_class: &str,
) -> Result<DenseVector> {
    let b = raw
        .iter()
        .map(|l| match l.as_ref() {
            x if x == negative_class => Ok(-1.0),
            x if x == positive_class => Ok(1.0),
            other => Err(Error::UnknownLabel(other.to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    DenseVector::new(b)
}

/// Write `b,a_1..a_p` CSV.
pub fn write_dataset_csv<W: Write>(w: W, d: &Dataset) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["b".to_string()];
    header.extend((1..=d.p()).map(|j| format!("a_{j}")));
    out.write_record(&header)?;
    for i in 0..d.n() {
        let mut rec = vec![fmt_f64(d.b[i])];
        rec.extend(d.a.row(i).iter().map(|&v| fmt_f64(v)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Read the CSV layout produced by [`write_dataset_csv`].
pub fn read_dataset_csv<R: Read>(r: R) -> Result<Dataset> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("b") || header.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `b,a_1,...,a_p`".into(),
        });
    }
    let p = header.len() - 1;
    let mut b = Vec::new();
    let mut data = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: i + 2,
                message: format!("bad number `{field}`"),
            })?;
            if j == 0 {
                b.push(v);
            } else {
                data.push(v);
            }
        }
    }
    let n = b.len();
    Dataset::new(DenseMatrix::new(n, p, data)?, DenseVector::new(b)?)
}

pub fn load_dataset_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    read_dataset_csv(File::open(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_n: usize,
    pub seed: u64,
    /// Keep each label's share of rows in the training set.
    pub stratified: bool,
    /// Rescale training columns to unit norm and apply the same scaling to
    /// the test rows.
    pub normalize: bool,
}

impl SplitSpec {
    pub fn new(train_n: usize, seed: u64) -> Self {
        Self {
            train_n,
            seed,
            stratified: false,
            normalize: true,
        }
    }
}

/// Row indices of the training and test parts.
pub fn split_indices(labels: &[f64], spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = labels.len();
    if spec.train_n == 0 || spec.train_n >= n {
        return Err(Error::InvalidParameter(format!(
            "train size must lie in (0, {n}), got {}",
            spec.train_n
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    if !spec.stratified {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let test = idx.split_off(spec.train_n);
        return Ok((idx, test));
    }

    // Per-class quotas by largest remainder, classes in ascending label order.
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(ordered_key(l)).or_default().push(i);
    }
    let exact: Vec<f64> = classes
        .values()
        .map(|m| m.len() as f64 * spec.train_n as f64 / n as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..quota.len()).collect();
    order.sort_by(|&i, &j| (exact[j] - exact[j].floor()).total_cmp(&(exact[i] - exact[i].floor())));
    let mut missing = spec.train_n - quota.iter().sum::<usize>();
    for &c in order.iter().cycle() {
        if missing == 0 {
            break;
        }
        quota[c] += 1;
        missing -= 1;
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (members, q) in classes.into_values().zip(quota) {
        let mut members = members;
        members.shuffle(&mut rng);
        let rest = members.split_off(q.min(members.len()));
        train.extend(members);
        test.extend(rest);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

fn ordered_key(x: f64) -> u64 {
    // Monotone map from f64 to u64 for grouping exact label values.
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

/// Seeded split. With `normalize`, test columns reuse the training norms.
pub fn split_train_test(d: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train_idx, test_idx) = split_indices(&d.b, spec)?;
    let train = d.subset(&train_idx);
    let mut test = d.subset(&test_idx);
    if !spec.normalize {
        return Ok((train, test));
    }
    let (train, norms) = train.normalized()?;
    test.a.scale_columns(&norms)?;
    test.normalized = true;
    Ok((train, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse: f64,
    pub misclassified: usize,
}

/// Held-out mean squared error and sign disagreements (`sign(0) = +1`).
pub fn evaluate(coefficients: &[f64], test: &Dataset) -> Result<Metrics> {
    let pred = test.a.matvec(coefficients)?;
    let n = test.n() as f64;
    let mse = pred
        .iter()
        .zip(test.b.iter())
        .map(|(p, y)| (p - y) * (p - y))
        .sum::<f64>()
        / n;
    let misclassified = pred
        .iter()
        .zip(test.b.iter())
        .filter(|(p, y)| {
            let s = if **p >= 0.0 { 1.0 } else { -1.0 };
            s != y.signum()
        })
        .count();
    Ok(Metrics { mse, misclassified })
}
