use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::CovarianceModel;
use crate::error::{Error, Result};
use crate::tabular::PreparedDataset;
use crate::Label;

/// Rows scanned exactly; larger inputs are subsampled.
pub const DEFAULT_PAIR_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanOptions {
    pub kappa_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    /// Maximum number of rows entering the all-pairs scan.
    pub pair_cap: usize,
    /// Seed for subsampling above the cap.
    pub seed: u64,
}

impl ScanOptions {
    pub fn new(kappa_grid: Vec<f64>, delta_grid: Vec<f64>) -> Self {
        ScanOptions {
            kappa_grid,
            delta_grid,
            pair_cap: DEFAULT_PAIR_CAP,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, grid) in [("κ", &self.kappa_grid), ("δ", &self.delta_grid)] {
            if grid.is_empty() {
                return Err(Error::InvalidArgument(format!("{name} grid is empty")));
            }
            if let Some(v) = grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidArgument(format!(
                    "{name} grid values must be finite and nonnegative, got {v}"
                )));
            }
        }
        if self.pair_cap < 2 {
            return Err(Error::InvalidArgument("pair cap must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCell {
    pub kappa: f64,
    pub delta: f64,
    /// Pairs with input distance `<= kappa` and output distance `> delta`.
    pub violations: u64,
    pub satisfied: bool,
    /// Lexicographically smallest violating pair of original row indices.
    pub witness: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IFScanResult {
    pub rows_total: usize,
    pub rows_scanned: usize,
    pub pairs: u64,
    pub max_input_distance: f64,
    pub max_output_distance: f64,
    /// Cells in κ-major order, each grid in the order given.
    pub cells: Vec<ScanCell>,
}

impl IFScanResult {
    pub fn cell(&self, kappa: f64, delta: f64) -> Option<&ScanCell> {
        self.cells.iter().find(|c| c.kappa == kappa && c.delta == delta)
    }

    pub fn any_satisfied(&self) -> bool {
        self.cells.iter().any(|c| c.satisfied)
    }

    /// Long-form grid: `kappa,delta,violations,satisfied`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kappa,delta,violations,satisfied\n");
        for c in &self.cells {
            out.push_str(&format!("{},{},{},{}\n", c.kappa, c.delta, c.violations, c.satisfied));
        }
        out
    }
}

/// Histogram over (κ bucket, δ bucket) with the smallest pair in each bucket.
#[derive(Clone)]
struct Acc {
    counts: Vec<u64>,
    witness: Vec<Option<(usize, usize)>>,
    max_d_in: f64,
    max_d_out: f64,
}

impl Acc {
    fn new(cells: usize) -> Self {
        Acc {
            counts: vec![0; cells],
            witness: vec![None; cells],
            max_d_in: 0.0,
            max_d_out: 0.0,
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for k in 0..self.counts.len() {
            self.counts[k] += other.counts[k];
            self.witness[k] = min_pair(self.witness[k], other.witness[k]);
        }
        self.max_d_in = self.max_d_in.max(other.max_d_in);
        self.max_d_out = self.max_d_out.max(other.max_d_out);
        self
    }
}

fn min_pair(a: Option<(usize, usize)>, b: Option<(usize, usize)>) -> Option<(usize, usize)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn sorted(grid: &[f64]) -> Vec<f64> {
    let mut v = grid.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Counts individual-fairness violations for every (κ, δ) cell.
///
/// `features` and `outputs` are row-aligned. Input distance is Mahalanobis
/// under `model`, output distance the absolute label difference.
pub fn pairwise_if_scan(
    features: &[Vec<f64>],
    outputs: &[Label],
    model: &CovarianceModel,
    opts: &ScanOptions,
) -> Result<IFScanResult> {
    opts.validate()?;
    if features.len() != outputs.len() {
        return Err(Error::LengthMismatch {
            left: features.len(),
            right: outputs.len(),
        });
    }
    let n_total = features.len();
    let rows: Vec<usize> = if n_total > opts.pair_cap {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut idx = index::sample(&mut rng, n_total, opts.pair_cap).into_vec();
        idx.sort_unstable();
        idx
    } else {
        (0..n_total).collect()
    };
    let points: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| model.whiten(&features[r]))
        .collect::<Result<_>>()?;
    let outs: Vec<Label> = rows.iter().map(|&r| outputs[r]).collect();

    let kappas = sorted(&opts.kappa_grid);
    let deltas = sorted(&opts.delta_grid);
    // Bucket ki: smallest κ covering the pair (nk = none). Bucket di: number of
    // δ values strictly below the output distance.
    let (nk, nd) = (kappas.len(), deltas.len());
    let width = nd + 1;
    let n = rows.len();

    let acc = (0..n)
        .into_par_iter()
        .fold(
            || Acc::new((nk + 1) * width),
            |mut acc, i| {
                let (pi, oi) = (&points[i], outs[i]);
                for j in i + 1..n {
                    let d_in = pi
                        .iter()
                        .zip(&points[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    let d_out = (oi - outs[j]).abs() as f64;
                    acc.max_d_in = acc.max_d_in.max(d_in);
                    acc.max_d_out = acc.max_d_out.max(d_out);
                    let di = deltas.partition_point(|&d| d < d_out);
                    if di == 0 {
                        continue;
                    }
                    let ki = kappas.partition_point(|&k| k < d_in);
                    if ki == nk {
                        continue;
                    }
                    let cell = ki * width + di;
                    acc.counts[cell] += 1;
                    let pair = (rows[i], rows[j]);
                    acc.witness[cell] = min_pair(acc.witness[cell], Some(pair));
                }
                acc
            },
        )
        .reduce(|| Acc::new((nk + 1) * width), Acc::merge);

    // Cumulate: over ki ascending (D <= κ holds for all larger κ) and over di
    // descending (d > δ holds for all smaller δ).
    let mut counts = vec![0u64; nk * nd];
    let mut wit = vec![None; nk * nd];
    for a in 0..nk {
        for b in (0..nd).rev() {
            let bucket = a * width + b + 1;
            let mut c = acc.counts[bucket];
            let mut w = acc.witness[bucket];
            if b + 1 < nd {
                c += counts[a * nd + b + 1];
                w = min_pair(w, wit[a * nd + b + 1]);
            }
            if a > 0 {
                c += counts[(a - 1) * nd + b];
                w = min_pair(w, wit[(a - 1) * nd + b]);
                if b + 1 < nd {
                    c -= counts[(a - 1) * nd + b + 1];
                }
            }
            counts[a * nd + b] = c;
            wit[a * nd + b] = w;
        }
    }

    let cells = opts
        .kappa_grid
        .iter()
        .flat_map(|&k| opts.delta_grid.iter().map(move |&d| (k, d)))
        .map(|(kappa, delta)| {
            let a = kappas.partition_point(|&x| x < kappa);
            let b = deltas.partition_point(|&x| x < delta);
            let violations = counts[a * nd + b];
            ScanCell {
                kappa,
                delta,
                violations,
                satisfied: violations == 0,
                witness: wit[a * nd + b],
            }
        })
        .collect();

    Ok(IFScanResult {
        rows_total: n_total,
        rows_scanned: n,
        pairs: (n as u64) * (n.saturating_sub(1) as u64) / 2,
        max_input_distance: acc.max_d_in,
        max_output_distance: acc.max_d_out,
        cells,
    })
}

/// Scan a prepared dataset with the Mahalanobis model of its own features.
pub fn if_scan(ds: &PreparedDataset, outputs: &[Label], opts: &ScanOptions) -> Result<IFScanResult> {
    let (_, features) = ds.feature_matrix()?;
    let model = if features.len() >= 2 {
        CovarianceModel::from_dataset(ds)?
    } else {
        CovarianceModel::identity(features.first().map_or(0, Vec::len))
    };
    pairwise_if_scan(&features, outputs, &model, opts)
}
