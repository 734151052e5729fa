use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Minimum instance count accepted for a train/test split.
pub const MIN_SPLIT_INSTANCES: usize = 10;

/// Feature matrix with contiguous integer class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    /// Row-major, `n_instances × n_features`.
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    /// Raw label text for every class id.
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(invalid("dataset needs at least one feature"));
        }
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if features.len() != labels.len() * n_features {
            return Err(invalid(format!(
                "{} feature values do not fill {} rows of {} features",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if feature_names.len() != n_features {
            return Err(invalid("feature name count does not match feature count"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(invalid(format!("label id {bad} has no class name")));
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(invalid("feature values must be finite"));
        }
        Ok(Self {
            features,
            n_features,
            labels,
            feature_names,
            class_names,
        })
    }

    /// Dataset with generated feature names `f0, f1, ...` and class names `0..K`.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(invalid("rows have differing lengths"));
        }
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(
            rows.concat(),
            n_features,
            labels,
            (0..n_features).map(|j| format!("f{j}")).collect(),
            (0..n_classes).map(|c| c.to_string()).collect(),
        )
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Instance count per class id.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in that order, sharing this dataset's class ids.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self {
            features,
            n_features: self.n_features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    fn map_features(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        let n = self.n_features;
        Self {
            features: self
                .features
                .iter()
                .enumerate()
                .map(|(k, &x)| f(k % n, x))
                .collect(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CsvOptions {
    pub header: bool,
    /// 0-based label column; `None` means the last column.
    pub label_column: Option<usize>,
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, options)
}

/// Parses comma-separated numeric features plus one label column.
///
/// Labels are arbitrary text mapped to ids in sorted lexical order. Row and
/// column numbers in errors are 1-based and count the header line.
pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let mut header: Option<Vec<String>> = None;
    if options.header {
        match records.next() {
            Some(r) => header = Some(r?.iter().map(str::to_owned).collect()),
            None => return Err(Error::EmptyDataset),
        }
    }

    let mut width: Option<usize> = header.as_ref().map(Vec::len);
    let mut label_col = 0;
    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    let first_row = if options.header { 2 } else { 1 };

    for (offset, record) in records.enumerate() {
        let record = record?;
        let row = first_row + offset;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::RaggedRow {
                row,
                expected: w,
                found: record.len(),
            });
        }
        label_col = options.label_column.unwrap_or(w.saturating_sub(1));
        if label_col >= w {
            return Err(Error::LabelColumn {
                column: label_col,
                width: w,
            });
        }
        for (col, cell) in record.iter().enumerate() {
            if col == label_col {
                raw_labels.push(cell.to_owned());
                continue;
            }
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::ParseCell {
                    row,
                    column: col + 1,
                    value: cell.to_owned(),
                })?;
            features.push(value);
        }
    }

    let width = width.ok_or(Error::EmptyDataset)?;
    if raw_labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if width < 2 {
        return Err(invalid(
            "csv needs at least one feature column besides the label",
        ));
    }
    let ids: BTreeMap<&str, usize> = {
        let mut names: Vec<&str> = raw_labels.iter().map(String::as_str).collect();
        names.sort_unstable();
        names.dedup();
        names.into_iter().enumerate().map(|(i, n)| (n, i)).collect()
    };
    if ids.len() < 2 {
        return Err(Error::SingleClass);
    }
    let labels = raw_labels.iter().map(|l| ids[l.as_str()]).collect();
    let class_names = ids.keys().map(|s| s.to_string()).collect();
    let feature_names = (0..width)
        .filter(|&c| c != label_col)
        .map(|c| match &header {
            Some(h) => h[c].clone(),
            None => format!("f{c}"),
        })
        .collect();
    Dataset::new(features, width - 1, labels, feature_names, class_names)
}

/// Disjoint train and test partitions of one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitDataset {
    pub train: Dataset,
    pub test: Dataset,
    pub train_fraction: f64,
    pub stratified: bool,
}

/// Random train/test split, stratified by class whenever every class has at
/// least two instances.
///
/// The train side receives `round(n · train_fraction)` rows (at least one row
/// stays on each side). Per-class quotas use largest-remainder rounding, so
/// each class is within one instance of its exact share.
pub fn split<R: Rng + ?Sized>(
    ds: &Dataset,
    train_fraction: f64,
    rng: &mut R,
) -> Result<SplitDataset> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(invalid(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = ds.n_instances();
    if n < MIN_SPLIT_INSTANCES {
        return Err(invalid(format!(
            "dataset has {n} instances; a split needs at least {MIN_SPLIT_INSTANCES}"
        )));
    }
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let counts = ds.class_counts();
    let stratified = counts.iter().all(|&c| c >= 2);

    let mut train_idx = Vec::with_capacity(n_train);
    let mut test_idx = Vec::with_capacity(n - n_train);
    if stratified {
        let quotas = class_quotas(&counts, n_train, n);
        for (class, &quota) in quotas.iter().enumerate() {
            let mut members: Vec<usize> = (0..n).filter(|&i| ds.label(i) == class).collect();
            members.shuffle(rng);
            train_idx.extend_from_slice(&members[..quota]);
            test_idx.extend_from_slice(&members[quota..]);
        }
    } else {
        log::warn!("a class has fewer than 2 instances; falling back to an unstratified split");
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(rng);
        train_idx.extend_from_slice(&all[..n_train]);
        test_idx.extend_from_slice(&all[n_train..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok(SplitDataset {
        train: ds.subset(&train_idx),
        test: ds.subset(&test_idx),
        train_fraction,
        stratified,
    })
}

fn class_quotas(counts: &[usize], n_train: usize, n: usize) -> Vec<usize> {
    let exact: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 * n_train as f64 / n as f64)
        .collect();
    let mut quotas: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut remaining = n_train - quotas.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &c in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        if quotas[c] < counts[c] {
            quotas[c] += 1;
            remaining -= 1;
        }
    }
    quotas
}

/// Per-column affine map to `[0, 1]` fitted on one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct MinMaxScaler {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(ds: &Dataset) -> Self {
        let d = ds.n_features();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for i in 0..ds.n_instances() {
            for (j, &x) in ds.row(i).iter().enumerate() {
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        Self { min, max }
    }

    /// Constant columns map to 0; values outside the fitted range clamp to `[0, 1]`.
    pub fn scale(&self, column: usize, x: f64) -> f64 {
        let range = self.max[column] - self.min[column];
        if range > 0.0 {
            ((x - self.min[column]) / range).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn transform(&self, ds: &Dataset) -> Dataset {
        ds.map_features(|j, x| self.scale(j, x))
    }
}

/// Scales both partitions with min/max statistics of the training rows only.
pub fn normalize_min_max(split: SplitDataset) -> SplitDataset {
    let scaler = MinMaxScaler::fit(&split.train);
    SplitDataset {
        train: scaler.transform(&split.train),
        test: scaler.transform(&split.test),
        ..split
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parse(text: &str, header: bool) -> Result<Dataset> {
        read_csv(
            text.as_bytes(),
            &CsvOptions {
                header,
                label_column: None,
            },
        )
    }

    #[test]
    fn parses_small_file() {
        let ds = parse("1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n", false).unwrap();
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.n_instances(), 3);
        assert_eq!(ds.labels(), &[0, 1, 0]);
        assert_eq!(ds.row(1), &[3.0, 4.0]);
        assert_eq!(ds.feature_names(), &["f0", "f1"]);
    }

    #[test]
    fn labels_map_in_sorted_order() {
        let ds = parse("x,y,diag\n1,2,M\n3,4,B\n5,6,M\n", true).unwrap();
        assert_eq!(ds.class_names(), &["B", "M"]);
        assert_eq!(ds.labels(), &[1, 0, 1]);
        assert_eq!(ds.feature_names(), &["x", "y"]);
    }

    #[test]
    fn label_column_override() {
        let opts = CsvOptions {
            header: false,
            label_column: Some(0),
        };
        let ds = read_csv("b,1,2\na,3,4\n".as_bytes(), &opts).unwrap();
        assert_eq!(ds.labels(), &[1, 0]);
        assert_eq!(ds.row(0), &[1.0, 2.0]);
        let bad = CsvOptions {
            header: false,
            label_column: Some(5),
        };
        assert!(matches!(
            read_csv("b,1,2\n".as_bytes(), &bad),
            Err(Error::LabelColumn { .. })
        ));
    }

    #[test]
    fn parse_failure_names_row_and_column() {
        let err = parse("1.0,2.0,0\n1.0,abc,0\n3,3,1\n", false).unwrap_err();
        match err {
            Error::ParseCell {
                row,
                column,
                ref value,
            } => {
                assert_eq!((row, column, value.as_str()), (2, 2, "abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn rejects_ragged_empty_and_single_class() {
        assert!(matches!(
            parse("1,2,0\n1,0\n", false),
            Err(Error::RaggedRow { row: 2, .. })
        ));
        assert!(matches!(parse("", false), Err(Error::EmptyDataset)));
        assert!(matches!(parse("a,b,c\n", true), Err(Error::EmptyDataset)));
        assert!(matches!(
            parse("1,2,0\n3,4,0\n", false),
            Err(Error::SingleClass)
        ));
    }

    fn balanced(n: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        Dataset::from_rows(&rows, (0..n).map(|i| i % 2).collect()).unwrap()
    }

    #[test]
    fn split_sizes_and_balance() {
        let ds = balanced(100);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = split(&ds, 0.7, &mut rng).unwrap();
        assert_eq!(s.train.n_instances(), 70);
        assert_eq!(s.test.n_instances(), 30);
        assert!(s.stratified);
        let tc = s.train.class_counts();
        assert!(tc[0].abs_diff(35) <= 1 && tc[1].abs_diff(35) <= 1);

        let mut seen: Vec<f64> = (0..70).map(|i| s.train.row(i)[0]).collect();
        seen.extend((0..30).map(|i| s.test.row(i)[0]));
        seen.sort_by(f64::total_cmp);
        assert_eq!(seen, (0..100).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn split_is_seeded() {
        let ds = balanced(40);
        let a = split(&ds, 0.7, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = split(&ds, 0.7, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_falls_back_when_a_class_is_singleton() {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
        let mut labels = vec![0; 12];
        labels[3] = 1;
        let ds = Dataset::from_rows(&rows, labels).unwrap();
        let s = split(&ds, 0.7, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(!s.stratified);
        assert_eq!(s.train.n_instances() + s.test.n_instances(), 12);
    }

    #[test]
    fn split_rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(split(&balanced(100), 1.0, &mut rng).is_err());
        assert!(split(&balanced(100), 0.0, &mut rng).is_err());
        assert!(split(&balanced(9), 0.7, &mut rng).is_err());
    }

    #[test]
    fn quotas_respect_largest_remainder() {
        assert_eq!(class_quotas(&[5, 5, 5], 10, 15), vec![4, 3, 3]);
        assert_eq!(class_quotas(&[2, 98], 70, 100), vec![1, 69]);
    }

    #[test]
    fn min_max_uses_train_statistics() {
        let train = Dataset::from_rows(
            &[vec![2.0, 5.0], vec![4.0, 5.0], vec![6.0, 5.0]],
            vec![0, 1, 0],
        )
        .unwrap();
        let test = Dataset::from_rows(&[vec![8.0, 1.0], vec![0.0, 5.0]], vec![0, 1]).unwrap();
        let s = normalize_min_max(SplitDataset {
            train,
            test,
            train_fraction: 0.6,
            stratified: true,
        });
        assert_eq!(
            (0..3).map(|i| s.train.row(i)[0]).collect::<Vec<_>>(),
            vec![0.0, 0.5, 1.0]
        );
        assert!((0..3).all(|i| s.train.row(i)[1] == 0.0));
        assert_eq!(s.test.row(0), &[1.0, 0.0]);
        assert_eq!(s.test.row(1), &[0.0, 0.0]);
    }
}
