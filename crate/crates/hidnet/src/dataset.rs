//! Dataset bundles: labels, train/val/test splits, on-disk text formats, and
//! the stochastic-block-model generator used for desk-scale fixtures.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{build_graph, read_edge_list, write_edge_list, Graph};
use crate::matrix::DenseMatrix;

/// Integer class per node, classes in [0, C).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    y: Vec<usize>,
    num_classes: usize,
}

impl LabelVector {
    pub fn new(y: Vec<usize>, num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        for (node, &label) in y.iter().enumerate() {
            if label >= num_classes {
                return Err(Error::LabelOutOfRange {
                    node,
                    label,
                    classes: num_classes,
                });
            }
        }
        Ok(LabelVector { y, num_classes })
    }

    /// Infer the class count as max label + 1.
    pub fn from_raw(y: Vec<usize>) -> Result<Self> {
        let classes = y.iter().max().map_or(0, |&m| m + 1);
        LabelVector::new(y, classes.max(2))
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn get(&self, node: usize) -> usize {
        self.y[node]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.y
    }
}

/// Disjoint boolean masks over nodes; train must be nonempty.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSplit {
    pub labels: LabelVector,
    pub train: Vec<bool>,
    pub val: Vec<bool>,
    pub test: Vec<bool>,
}

impl LabeledSplit {
    pub fn new(
        labels: LabelVector,
        train: Vec<bool>,
        val: Vec<bool>,
        test: Vec<bool>,
    ) -> Result<Self> {
        let n = labels.len();
        if train.len() != n || val.len() != n || test.len() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n} mask entries"),
                got: format!("{}/{}/{}", train.len(), val.len(), test.len()),
                context: "LabeledSplit",
            });
        }
        for i in 0..n {
            let count = train[i] as u8 + val[i] as u8 + test[i] as u8;
            if count > 1 {
                return Err(Error::OverlappingMasks { node: i });
            }
        }
        if !train.iter().any(|&t| t) {
            return Err(Error::InvalidConfig("train mask is empty".into()));
        }
        Ok(LabeledSplit {
            labels,
            train,
            val,
            test,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn count(mask: &[bool]) -> usize {
        mask.iter().filter(|&&b| b).count()
    }
}

/// A graph with features and a labeled split, ready for experiments.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub graph: Graph,
    pub features: DenseMatrix,
    pub split: LabeledSplit,
    pub name: String,
}

/// Load a bundle from `edges.tsv`, `features.txt`, `labels.txt`, `split.txt`.
pub fn load_dataset(dir: &Path) -> Result<DatasetBundle> {
    let features = DenseMatrix::read_text(&dir.join("features.txt"))?;
    let n = features.rows();

    let edges = read_edge_list(&dir.join("edges.tsv"))?;
    let graph = build_graph(&edges, n)?;

    let labels_path = dir.join("labels.txt");
    let show = labels_path.display().to_string();
    let file = std::fs::File::open(&labels_path).map_err(|e| Error::io(&show, e))?;
    let mut y = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&show, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: usize = t
            .parse()
            .map_err(|_| Error::parse(&show, format!("line {}: bad label `{t}`", lineno + 1)))?;
        y.push(v);
    }
    if y.len() != n {
        return Err(Error::parse(
            &show,
            format!("{} labels but features have {} rows", y.len(), n),
        ));
    }
    let labels = LabelVector::from_raw(y)?;

    let split_path = dir.join("split.txt");
    let show = split_path.display().to_string();
    let file = std::fs::File::open(&split_path).map_err(|e| Error::io(&show, e))?;
    let (mut train, mut val, mut test) = (vec![false; n], vec![false; n], vec![false; n]);
    let mut count = 0;
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&show, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if count >= n {
            return Err(Error::parse(
                &show,
                format!("more split entries than {n} nodes"),
            ));
        }
        match t {
            "train" => train[count] = true,
            "val" => val[count] = true,
            "test" => test[count] = true,
            "none" => {}
            other => {
                return Err(Error::parse(
                    &show,
                    format!(
                        "line {}: expected train/val/test/none, got `{other}`",
                        lineno + 1
                    ),
                ))
            }
        }
        count += 1;
    }
    if count != n {
        return Err(Error::parse(
            &show,
            format!("{count} split entries but features have {n} rows"),
        ));
    }
    let split = LabeledSplit::new(labels, train, val, test)?;
    Ok(DatasetBundle {
        graph,
        features,
        split,
        name: dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into()),
    })
}

/// Write a bundle back in the standard text formats.
pub fn save_dataset(bundle: &DatasetBundle, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    write_edge_list(bundle.graph.edges(), &dir.join("edges.tsv"))?;
    bundle.features.write_text(&dir.join("features.txt"))?;

    let labels_path = dir.join("labels.txt");
    let show = labels_path.display().to_string();
    let mut f = std::io::BufWriter::new(
        std::fs::File::create(&labels_path).map_err(|e| Error::io(&show, e))?,
    );
    for &y in bundle.split.labels.as_slice() {
        writeln!(f, "{y}").map_err(|e| Error::io(&show, e))?;
    }

    let split_path = dir.join("split.txt");
    let show = split_path.display().to_string();
    let mut f = std::io::BufWriter::new(
        std::fs::File::create(&split_path).map_err(|e| Error::io(&show, e))?,
    );
    for i in 0..bundle.split.n() {
        let tag = if bundle.split.train[i] {
            "train"
        } else if bundle.split.val[i] {
            "val"
        } else if bundle.split.test[i] {
            "test"
        } else {
            "none"
        };
        writeln!(f, "{tag}").map_err(|e| Error::io(&show, e))?;
    }
    Ok(())
}

/// Stochastic-block-model spec. `p_in > p_out` yields homophily fixtures,
/// `p_in < p_out` heterophily fixtures. Features are class-conditional
/// Gaussians with mean separation `signal`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub classes: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub feature_dim: usize,
    pub signal: f64,
    pub seed: u64,
}

/// Per-class split sizes used by the generator: up to 20 train and 30
/// validation nodes per class, remainder test.
const TRAIN_PER_CLASS: usize = 20;
const VAL_PER_CLASS: usize = 30;

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<DatasetBundle> {
    if spec.classes < 2 {
        return Err(Error::InvalidConfig("need at least 2 classes".into()));
    }
    if spec.n < spec.classes {
        return Err(Error::InvalidConfig(format!(
            "degenerate spec: n = {} < classes = {}",
            spec.n, spec.classes
        )));
    }
    if spec.feature_dim == 0 {
        return Err(Error::InvalidConfig("feature_dim must be >= 1".into()));
    }
    for (name, p) in [("p_in", spec.p_in), ("p_out", spec.p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidConfig(format!("{name} = {p} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let y: Vec<usize> = (0..spec.n).map(|i| i % spec.classes).collect();

    let mut edges = Vec::new();
    for i in 0..spec.n {
        for j in (i + 1)..spec.n {
            let p = if y[i] == y[j] { spec.p_in } else { spec.p_out };
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let graph = build_graph(&edges, spec.n)?;

    let mut features = DenseMatrix::zeros(spec.n, spec.feature_dim);
    for i in 0..spec.n {
        let mean_dim = y[i] % spec.feature_dim;
        let row = features.row_mut(i);
        for (k, v) in row.iter_mut().enumerate() {
            let noise: f64 = rng.sample(StandardNormal);
            *v = noise + if k == mean_dim { spec.signal } else { 0.0 };
        }
    }

    let (mut train, mut val, mut test) = (
        vec![false; spec.n],
        vec![false; spec.n],
        vec![false; spec.n],
    );
    for c in 0..spec.classes {
        let mut members: Vec<usize> = (0..spec.n).filter(|&i| y[i] == c).collect();
        members.shuffle(&mut rng);
        let n_train = TRAIN_PER_CLASS.min(members.len().div_ceil(5)).max(1);
        let n_val = VAL_PER_CLASS.min(members.len().saturating_sub(n_train) / 2);
        for (rank, &i) in members.iter().enumerate() {
            if rank < n_train {
                train[i] = true;
            } else if rank < n_train + n_val {
                val[i] = true;
            } else {
                test[i] = true;
            }
        }
    }
    let labels = LabelVector::new(y, spec.classes)?;
    let split = LabeledSplit::new(labels, train, val, test)?;
    Ok(DatasetBundle {
        graph,
        features,
        split,
        name: format!(
            "sbm-n{}c{}pin{}pout{}s{}",
            spec.n, spec.classes, spec.p_in, spec.p_out, spec.seed
        ),
    })
}
