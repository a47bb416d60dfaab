use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::MetricsError;

/// Largest sample the exact permutation test will enumerate (10! orderings).
const EXACT_MAX_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum PValueMethod {
    /// Two-sided Student-t approximation with n - 2 degrees of freedom.
    #[default]
    TDistribution,
    /// Full permutation distribution; n <= 10 only.
    Exact,
    /// Random permutations from a seeded generator.
    MonteCarlo { samples: usize, seed: u64 },
}

impl fmt::Display for PValueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValueMethod::TDistribution => f.write_str("t-distribution"),
            PValueMethod::Exact => f.write_str("exact"),
            PValueMethod::MonteCarlo { samples, seed } => {
                write!(f, "monte-carlo({samples}, seed {seed})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

impl Correlation {
    pub fn stars(&self) -> &'static str {
        stars(self.p_value)
    }
}

/// Significance marker: `***` p < 0.001, `**` p < 0.01, `*` p < 0.05.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Correlation, MetricsError> {
    spearman_with(xs, ys, PValueMethod::TDistribution)
}

pub fn spearman_with(
    xs: &[f64],
    ys: &[f64],
    method: PValueMethod,
) -> Result<Correlation, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(MetricsError::DegenerateInput(format!(
            "need at least 3 pairs, got {n}"
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(MetricsError::DegenerateInput("non-finite value".into()));
    }
    if is_constant(xs) || is_constant(ys) {
        return Err(MetricsError::DegenerateInput("constant input".into()));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let rho = pearson(&rx, &ry);
    let p_value = match method {
        PValueMethod::TDistribution => t_p_value(rho, n),
        PValueMethod::Exact => {
            if n > EXACT_MAX_N {
                return Err(MetricsError::ExactTooLarge {
                    n,
                    max: EXACT_MAX_N,
                });
            }
            exact_p_value(&rx, &ry, rho)
        }
        PValueMethod::MonteCarlo { samples, seed } => {
            monte_carlo_p_value(&rx, &ry, rho, samples, seed)
        }
    };
    Ok(Correlation { rho, p_value, n })
}

fn is_constant(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x == xs[0])
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn t_p_value(rho: f64, n: usize) -> f64 {
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

// Ties in |rho| are resolved in favour of "at least as extreme".
const PERMUTATION_SLACK: f64 = 1e-12;

fn exact_p_value(rx: &[f64], ry: &[f64], rho: f64) -> f64 {
    let mut perm = ry.to_vec();
    let mut extreme = 0u64;
    let mut total = 0u64;
    heap_permutations(&mut perm, &mut |p| {
        total += 1;
        if pearson(rx, p).abs() >= rho.abs() - PERMUTATION_SLACK {
            extreme += 1;
        }
    });
    extreme as f64 / total as f64
}

fn heap_permutations(items: &mut [f64], visit: &mut impl FnMut(&[f64])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn monte_carlo_p_value(rx: &[f64], ry: &[f64], rho: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm = ry.to_vec();
    let mut extreme = 0usize;
    for _ in 0..samples {
        perm.shuffle(&mut rng);
        if pearson(rx, &perm).abs() >= rho.abs() - PERMUTATION_SLACK {
            extreme += 1;
        }
    }
    (extreme + 1) as f64 / (samples + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn monotone_and_reversed() {
        assert_eq!(
            spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap().rho,
            1.0
        );
        let r = spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.rho, -1.0);
        assert_eq!(r.p_value, 0.0);
    }

    #[test]
    fn textbook_case() {
        let r = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 3.0, 2.0, 5.0, 4.0]).unwrap();
        assert_eq!(r.rho, 0.8);
        // scipy.stats.spearmanr gives p = 0.10408803866182788 here.
        assert!(
            (r.p_value - 0.104088038661828).abs() < 1e-9,
            "{}",
            r.p_value
        );
    }

    #[test]
    fn exact_permutation_p_value() {
        // Of the 120 orderings of five ranks, 16 reach |rho| >= 0.8.
        let r = spearman_with(
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            &[1.0, 3.0, 2.0, 5.0, 4.0],
            PValueMethod::Exact,
        )
        .unwrap();
        assert!((r.p_value - 16.0 / 120.0).abs() < 1e-15, "{}", r.p_value);
        let big: Vec<f64> = (0..11).map(f64::from).collect();
        assert_eq!(
            spearman_with(&big, &big, PValueMethod::Exact),
            Err(MetricsError::ExactTooLarge { n: 11, max: 10 })
        );
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let ys = [2.0, 1.0, 4.0, 3.0, 7.0, 5.0, 6.0];
        let m = PValueMethod::MonteCarlo {
            samples: 2000,
            seed: 7,
        };
        let a = spearman_with(&xs, &ys, m).unwrap();
        let b = spearman_with(&xs, &ys, m).unwrap();
        assert_eq!(a, b);
        let exact = spearman_with(&xs, &ys, PValueMethod::Exact).unwrap();
        assert!((a.p_value - exact.p_value).abs() < 0.03);
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 10.0, 30.0]),
            vec![1.5, 3.0, 1.5, 4.0]
        );
    }

    #[test]
    fn errors() {
        assert_eq!(
            spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(MetricsError::LengthMismatch { left: 2, right: 3 })
        );
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(MetricsError::DegenerateInput(_))
        ));
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0]),
            Err(MetricsError::DegenerateInput(_))
        ));
        assert!(matches!(
            spearman(&[1.0, f64::NAN, 2.0], &[1.0, 2.0, 3.0]),
            Err(MetricsError::DegenerateInput(_))
        ));
    }

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.0005), "***");
        assert_eq!(stars(0.005), "**");
        assert_eq!(stars(0.03), "*");
        assert_eq!(stars(0.05), "");
    }

    fn arb_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (3usize..30).prop_flat_map(|n| {
            (
                proptest::collection::vec(0i32..8, n)
                    .prop_map(|v| v.into_iter().map(f64::from).collect()),
                proptest::collection::vec(-50.0f64..50.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn symmetric((xs, ys) in arb_pair()) {
            if let (Ok(a), Ok(b)) = (spearman(&xs, &ys), spearman(&ys, &xs)) {
                prop_assert!((a.rho - b.rho).abs() < 1e-12);
                prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
            }
        }

        #[test]
        fn monotone_transform_invariant((xs, ys) in arb_pair()) {
            if let Ok(a) = spearman(&xs, &ys) {
                let tx: Vec<f64> = xs.iter().map(|x| (x / 3.0).exp() + 5.0).collect();
                let b = spearman(&tx, &ys).unwrap();
                prop_assert!((a.rho - b.rho).abs() < 1e-12);
            }
        }

        #[test]
        fn bounded((xs, ys) in arb_pair()) {
            if let Ok(r) = spearman(&xs, &ys) {
                prop_assert!((-1.0..=1.0).contains(&r.rho));
                prop_assert!((0.0..=1.0).contains(&r.p_value));
            }
        }
    }
}
