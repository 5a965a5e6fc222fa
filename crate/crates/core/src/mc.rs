//! Seeded Monte Carlo estimation of ergodic quantities.
//!
//! Samples are partitioned into fixed-size blocks; block `i` always draws
//! from substream `i` of the seed, and block statistics are merged in block
//! order. The estimate is therefore bit-identical across runs and across
//! worker counts, while rayon is free to schedule blocks however it likes.
//! Within a block, moments accumulate in Welford form so the variance stays
//! accurate at large sample counts.

use rayon::prelude::*;

use crate::channel::{sample_pair, ChannelPair, RandomStream, SystemParams};
use crate::noma::{fair_region, noma_capacities, oma_capacity, PowerAllocation};

/// Samples per substream block. Fixed: changing it changes the sample-to-
/// substream assignment and therefore the reproducible stream of results.
const BLOCK_SIZE: u64 = 1 << 16;

/// How the power allocation is chosen for each sampled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AllocationPolicy {
    /// One fixed allocation for every pair.
    Fixed(PowerAllocation),
    /// The pair's own lower fair bound (strong user at OMA parity).
    AtInf,
    /// The pair's own upper fair bound (weak user at OMA parity).
    AtSup,
    /// The midpoint of the pair's fair region.
    Midpoint,
}

impl AllocationPolicy {
    /// Resolve to a concrete allocation for one pair.
    fn resolve(&self, params: &SystemParams, pair: &ChannelPair) -> f64 {
        match self {
            AllocationPolicy::Fixed(a) => a.value(),
            _ => {
                let region =
                    fair_region(params, pair).expect("sampled gains are positive and finite");
                match self {
                    AllocationPolicy::AtInf => region.a_inf(),
                    AllocationPolicy::AtSup => region.a_sup(),
                    AllocationPolicy::Midpoint => 0.5 * (region.a_inf() + region.a_sup()),
                    AllocationPolicy::Fixed(_) => unreachable!(),
                }
            }
        }
    }
}

/// Which per-sample capacity is averaged. OMA quantities ignore the policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    C1Oma,
    C2Oma,
    SumOma,
    C1Noma,
    C2Noma,
    SumNoma,
}

/// Mean, normal-approximation standard error, and the provenance needed to
/// reproduce them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Running moments of one block (Welford form).
#[derive(Debug, Clone, Copy)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn empty() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Exact pooled combination of two disjoint sample sets.
    fn merge(self, other: Self) -> Self {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64) * (other.count as f64) / count as f64;
        Self { count, mean, m2 }
    }
}

/// Average `per_sample` over `n_samples` ordered pairs drawn from the seed.
fn estimate_with<F>(params: &SystemParams, per_sample: F, n_samples: u64, seed: u64) -> McResult
where
    F: Fn(&ChannelPair) -> f64 + Sync,
{
    assert!(n_samples >= 1, "n_samples must be at least 1");

    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let block_stats: Vec<Moments> = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let mut stream = RandomStream::new(seed, block);
            let in_block = BLOCK_SIZE.min(n_samples - block * BLOCK_SIZE);
            let mut moments = Moments::empty();
            for _ in 0..in_block {
                let pair = sample_pair(params, &mut stream);
                moments.push(per_sample(&pair));
            }
            moments
        })
        .collect();

    // Merge in block-index order: worker-count invariant by construction.
    let total = block_stats
        .into_iter()
        .fold(Moments::empty(), Moments::merge);

    let std_error = if total.count > 1 {
        (total.m2 / (total.count - 1) as f64).sqrt() / (total.count as f64).sqrt()
    } else {
        0.0
    };
    McResult {
        mean: total.mean,
        std_error,
        n_samples: total.count,
        seed,
    }
}

/// Monte Carlo estimate of one ergodic quantity.
pub fn estimate(
    params: &SystemParams,
    policy: AllocationPolicy,
    quantity: Quantity,
    n_samples: u64,
    seed: u64,
) -> McResult {
    let per_sample = move |pair: &ChannelPair| -> f64 {
        match quantity {
            Quantity::C1Oma => oma_capacity(params, pair.g_weak()).expect("gain is valid"),
            Quantity::C2Oma => oma_capacity(params, pair.g_strong()).expect("gain is valid"),
            Quantity::SumOma => {
                oma_capacity(params, pair.g_weak()).expect("gain is valid")
                    + oma_capacity(params, pair.g_strong()).expect("gain is valid")
            }
            Quantity::C1Noma | Quantity::C2Noma | Quantity::SumNoma => {
                let a = PowerAllocation::new(policy.resolve(params, pair))
                    .expect("resolved allocation lies in (0, 1)");
                let (c1, c2) = noma_capacities(params, pair, a);
                match quantity {
                    Quantity::C1Noma => c1,
                    Quantity::C2Noma => c2,
                    _ => c1 + c2,
                }
            }
        }
    };
    estimate_with(params, per_sample, n_samples, seed)
}

/// Monte Carlo estimate of the sum-capacity gap `S_N(a) - S_O`, evaluated
/// with common random numbers: both terms see the same pair, so the
/// difference estimate carries far less variance than two independent runs.
pub fn paired_gap(
    params: &SystemParams,
    policy: AllocationPolicy,
    n_samples: u64,
    seed: u64,
) -> McResult {
    let per_sample = move |pair: &ChannelPair| -> f64 {
        let a = PowerAllocation::new(policy.resolve(params, pair))
            .expect("resolved allocation lies in (0, 1)");
        let (c1, c2) = noma_capacities(params, pair, a);
        let sum_oma = oma_capacity(params, pair.g_weak()).expect("gain is valid")
            + oma_capacity(params, pair.g_strong()).expect("gain is valid");
        (c1 + c2) - sum_oma
    };
    estimate_with(params, per_sample, n_samples, seed)
}

/// Monte Carlo means of the per-pair fair-region endpoints, used as the
/// vertical reference markers in allocation sweeps.
pub fn region_bounds_means(
    params: &SystemParams,
    n_samples: u64,
    seed: u64,
) -> (McResult, McResult) {
    let lower = estimate_with(
        params,
        |pair| fair_region(params, pair).expect("valid pair").a_inf(),
        n_samples,
        seed,
    );
    let upper = estimate_with(
        params,
        |pair| fair_region(params, pair).expect("valid pair").a_sup(),
        n_samples,
        seed,
    );
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelPair;
    use crate::noma::capacity_report;

    fn ten_db() -> SystemParams {
        SystemParams::from_snr_db(10.0, 1.0).unwrap()
    }

    #[test]
    fn deterministic_across_runs() {
        let p = ten_db();
        let a = estimate(
            &p,
            AllocationPolicy::Midpoint,
            Quantity::SumNoma,
            300_000,
            9,
        );
        let b = estimate(
            &p,
            AllocationPolicy::Midpoint,
            Quantity::SumNoma,
            300_000,
            9,
        );
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let p = ten_db();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| estimate(&p, AllocationPolicy::AtInf, Quantity::C1Noma, 250_000, 77))
        };
        let single = run(1);
        let several = run(4);
        assert_eq!(single.mean.to_bits(), several.mean.to_bits());
        assert_eq!(single.std_error.to_bits(), several.std_error.to_bits());
    }

    #[test]
    fn sum_oma_matches_closed_form() {
        let p = SystemParams::new(1.0, 1.0).unwrap();
        let r = estimate(
            &p,
            AllocationPolicy::Midpoint,
            Quantity::SumOma,
            1_000_000,
            4242,
        );
        let reference = crate::ergodic::ergodic_sum_oma(&p).unwrap().value;
        assert!(
            (r.mean - reference).abs() <= 3.0 * r.std_error,
            "mean {} vs reference {reference} (3se = {})",
            r.mean,
            3.0 * r.std_error
        );
    }

    #[test]
    fn at_sup_reproduces_weak_user_oma_per_sample() {
        // C1^N(a_sup) = C1^O holds pairwise, so the means agree to rounding.
        let p = ten_db();
        let noma = estimate(&p, AllocationPolicy::AtSup, Quantity::C1Noma, 200_000, 5);
        let oma = estimate(&p, AllocationPolicy::AtSup, Quantity::C1Oma, 200_000, 5);
        assert!(
            (noma.mean - oma.mean).abs() <= 1e-12 * oma.mean,
            "{} vs {}",
            noma.mean,
            oma.mean
        );
    }

    #[test]
    fn midpoint_sum_beats_oma_on_same_seed() {
        let p = SystemParams::from_snr_db(30.0, 1.0).unwrap();
        let noma = estimate(
            &p,
            AllocationPolicy::Midpoint,
            Quantity::SumNoma,
            200_000,
            8,
        );
        let oma = estimate(&p, AllocationPolicy::Midpoint, Quantity::SumOma, 200_000, 8);
        assert!(noma.mean > oma.mean);
    }

    #[test]
    fn quadrupling_samples_halves_standard_error() {
        let p = ten_db();
        let small = estimate(
            &p,
            AllocationPolicy::Midpoint,
            Quantity::SumNoma,
            250_000,
            123,
        );
        let large = estimate(
            &p,
            AllocationPolicy::Midpoint,
            Quantity::SumNoma,
            1_000_000,
            123,
        );
        let ratio = small.std_error / large.std_error;
        assert!((ratio - 2.0).abs() < 0.4, "se ratio {ratio}");
    }

    #[test]
    fn paired_gap_positive_and_growing() {
        for policy in [
            AllocationPolicy::AtInf,
            AllocationPolicy::Midpoint,
            AllocationPolicy::AtSup,
        ] {
            let low = paired_gap(
                &SystemParams::from_snr_db(10.0, 1.0).unwrap(),
                policy,
                200_000,
                6,
            );
            let high = paired_gap(
                &SystemParams::from_snr_db(40.0, 1.0).unwrap(),
                policy,
                200_000,
                6,
            );
            assert!(low.mean > 0.0, "{policy:?} gap not positive at 10 dB");
            assert!(high.mean > low.mean, "{policy:?} gap not growing with SNR");
        }
    }

    #[test]
    fn degenerate_pairs_have_zero_gap_at_inf() {
        // Forcing g_weak = g_strong collapses the region; at a_inf both users
        // sit exactly at their OMA capacity, so the paired gap vanishes.
        let p = ten_db();
        let r = estimate_with(
            &p,
            |pair| {
                let equal = ChannelPair::new(pair.g_weak(), pair.g_weak()).unwrap();
                let region = fair_region(&p, &equal).unwrap();
                let a = PowerAllocation::new(region.a_inf()).unwrap();
                let report = capacity_report(&p, &equal, a).unwrap();
                report.sum_noma - report.sum_oma
            },
            50_000,
            21,
        );
        assert!(r.mean.abs() < 1e-12, "degenerate gap {}", r.mean);
    }

    #[test]
    fn region_bound_means_are_ordered() {
        let p = ten_db();
        let (lower, upper) = region_bounds_means(&p, 100_000, 3);
        assert!(lower.mean > 0.0 && lower.mean < upper.mean && upper.mean < 0.5);
    }

    #[test]
    #[should_panic(expected = "n_samples")]
    fn zero_samples_is_a_contract_violation() {
        estimate(
            &ten_db(),
            AllocationPolicy::Midpoint,
            Quantity::SumOma,
            0,
            1,
        );
    }
}
