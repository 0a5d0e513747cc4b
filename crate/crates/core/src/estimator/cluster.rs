//! One-dimensional clustering: Gaussian mixtures chosen by BIC, with a
//! largest-gap fallback.

/// Cluster labels `0..k`, ordered by increasing cluster mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl Clustering {
    pub fn members(&self, label: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == label).collect()
    }
}

#[derive(Debug, Clone)]
struct Mixture {
    weight: Vec<f64>,
    mean: Vec<f64>,
    var: Vec<f64>,
    loglik: f64,
}

const MAX_ITER: usize = 300;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn log_density(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln() + (x - mean) * (x - mean) / var)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// EM from quantile starting points. `None` if a component collapses or the
/// fit stops being finite.
fn fit(sorted: &[f64], k: usize, var_floor: f64) -> Option<Mixture> {
    let n = sorted.len();
    let mut mean: Vec<f64> = (0..k)
        .map(|j| sorted[((2 * j + 1) * n / (2 * k)).min(n - 1)])
        .collect();
    let total_var = {
        let m = sorted.iter().sum::<f64>() / n as f64;
        sorted.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64
    };
    let mut var = vec![(total_var / (k * k) as f64).max(var_floor); k];
    let mut weight = vec![1.0 / k as f64; k];
    let mut resp = vec![0.0; n * k];
    let mut prev = f64::NEG_INFINITY;
    let mut lp = vec![0.0; k];
    let mut loglik = prev;
    for _ in 0..MAX_ITER {
        loglik = 0.0;
        for (i, &x) in sorted.iter().enumerate() {
            for j in 0..k {
                lp[j] = weight[j].ln() + log_density(x, mean[j], var[j]);
            }
            let z = log_sum_exp(&lp);
            loglik += z;
            for j in 0..k {
                resp[i * k + j] = (lp[j] - z).exp();
            }
        }
        if !loglik.is_finite() {
            return None;
        }
        for j in 0..k {
            let nk: f64 = (0..n).map(|i| resp[i * k + j]).sum();
            if nk < 1e-6 * n as f64 {
                return None;
            }
            let m = (0..n).map(|i| resp[i * k + j] * sorted[i]).sum::<f64>() / nk;
            let v = (0..n)
                .map(|i| resp[i * k + j] * (sorted[i] - m) * (sorted[i] - m))
                .sum::<f64>()
                / nk;
            mean[j] = m;
            var[j] = v.max(var_floor);
            weight[j] = nk / n as f64;
        }
        if (loglik - prev).abs() <= 1e-9 * loglik.abs().max(1.0) {
            break;
        }
        prev = loglik;
    }
    Some(Mixture {
        weight,
        mean,
        var,
        loglik,
    })
}

fn assign(values: &[f64], mix: &Mixture) -> Clustering {
    let k = mix.mean.len();
    let raw: Vec<usize> = values
        .iter()
        .map(|&x| {
            (0..k)
                .max_by(|&a, &b| {
                    let la = mix.weight[a].ln() + log_density(x, mix.mean[a], mix.var[a]);
                    let lb = mix.weight[b].ln() + log_density(x, mix.mean[b], mix.var[b]);
                    la.total_cmp(&lb)
                })
                .expect("k >= 1")
        })
        .collect();
    relabel(values, &raw)
}

/// Drop empty labels and renumber by increasing mean.
fn relabel(values: &[f64], raw: &[usize]) -> Clustering {
    let max = raw.iter().copied().max().map_or(0, |m| m + 1);
    let mut sums = vec![(0.0, 0usize); max];
    for (&x, &l) in values.iter().zip(raw) {
        sums[l].0 += x;
        sums[l].1 += 1;
    }
    let mut used: Vec<(f64, usize)> = sums
        .iter()
        .enumerate()
        .filter(|(_, s)| s.1 > 0)
        .map(|(l, s)| (s.0 / s.1 as f64, l))
        .collect();
    used.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut map = vec![usize::MAX; max];
    for (new, &(_, old)) in used.iter().enumerate() {
        map[old] = new;
    }
    Clustering {
        labels: raw.iter().map(|&l| map[l]).collect(),
        k: used.len(),
    }
}

/// Split wherever consecutive sorted values are more than `gap` apart.
pub fn split_by_gaps(values: &[f64], gap: f64) -> Clustering {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut raw = vec![0; values.len()];
    let mut label = 0;
    for w in 0..idx.len() {
        if w > 0 && values[idx[w]] - values[idx[w - 1]] > gap {
            label += 1;
        }
        raw[idx[w]] = label;
    }
    relabel(values, &raw)
}

/// Cluster `values` with a Gaussian mixture of 1 to `max_k` components,
/// keeping the fit with the lowest BIC.
///
/// `resolution` is the measurement granularity of the values; component
/// standard deviations never drop below it, so values on a sampling lattice
/// are not split into one cluster per lattice point.
pub fn cluster_1d(values: &[f64], resolution: f64, max_k: usize) -> Clustering {
    let n = values.len();
    if n == 0 {
        return Clustering {
            labels: Vec::new(),
            k: 0,
        };
    }
    if n == 1 {
        return Clustering {
            labels: vec![0],
            k: 1,
        };
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let var_floor = (resolution * resolution).max(1e-12);
    let mut best: Option<(f64, Mixture)> = None;
    for k in 1..=max_k.max(1).min(n) {
        let Some(m) = fit(&sorted, k, var_floor) else {
            continue;
        };
        let bic = -2.0 * m.loglik + (3 * k - 1) as f64 * (n as f64).ln();
        if best.as_ref().is_none_or(|(b, _)| bic < *b) {
            best = Some((bic, m));
        }
    }
    match best {
        Some((_, m)) => assign(values, &m),
        None => split_by_gaps(values, 4.0 * resolution.max(1e-12)),
    }
}
