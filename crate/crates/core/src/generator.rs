//! Random benchmark instances in three threshold classes.
//!
//! Conventions:
//!
//! * `p_f` uniform in `[1, 10]`
//! * `s_f` uniform in `[1, min p]`
//! * `n_f` splits `N` as evenly as possible, larger shares first
//! * each family is qualified on a uniform non-empty machine subset; a
//!   machine left uncovered is then given one uniformly chosen family
//! * `gamma_f` is drawn relative to `P = max p`: small in `[P, 2P]`, medium
//!   in `(2P, 3P]`, large in `(3P, 4P]`

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Family, Instance, Time};

pub const MAX_PROCESSING: Time = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdClass {
    Small,
    Medium,
    Large,
}

impl ThresholdClass {
    pub const ALL: [ThresholdClass; 3] = [ThresholdClass::Small, ThresholdClass::Medium, ThresholdClass::Large];

    /// Inclusive range of thresholds for `max_p`.
    pub fn range(self, max_p: Time) -> (Time, Time) {
        match self {
            ThresholdClass::Small => (max_p, 2 * max_p),
            ThresholdClass::Medium => (2 * max_p + 1, 3 * max_p),
            ThresholdClass::Large => (3 * max_p + 1, 4 * max_p),
        }
    }

    /// Class a threshold belongs to, if any.
    pub fn classify(threshold: Time, max_p: Time) -> Option<Self> {
        Self::ALL.into_iter().find(|c| {
            let (lo, hi) = c.range(max_p);
            (lo..=hi).contains(&threshold)
        })
    }
}

impl fmt::Display for ThresholdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdClass::Small => "small",
            ThresholdClass::Medium => "medium",
            ThresholdClass::Large => "large",
        })
    }
}

impl FromStr for ThresholdClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "small" => Ok(ThresholdClass::Small),
            "medium" => Ok(ThresholdClass::Medium),
            "large" => Ok(ThresholdClass::Large),
            _ => Err(format!("unknown threshold class `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorConfig {
    pub jobs: usize,
    pub machines: usize,
    pub families: usize,
    pub class: ThresholdClass,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// `(N, M, F)` of the standard benchmark sets.
pub const PRESETS: [(usize, usize, usize); 19] = [
    (20, 3, 4),
    (20, 3, 5),
    (20, 4, 2),
    (20, 4, 3),
    (20, 4, 4),
    (20, 4, 5),
    (30, 3, 2),
    (30, 3, 3),
    (30, 3, 4),
    (30, 3, 5),
    (30, 4, 4),
    (30, 5, 5),
    (40, 3, 3),
    (50, 3, 3),
    (60, 3, 4),
    (60, 3, 5),
    (70, 3, 5),
    (70, 4, 4),
    (70, 4, 5),
];

/// Instances per threshold class in a benchmark set.
pub const PER_CLASS: usize = 10;

fn validate(cfg: &GeneratorConfig) -> Result<(), GeneratorError> {
    let bad = |msg: String| Err(GeneratorError::Config(msg));
    if cfg.machines == 0 {
        return bad("at least one machine is required".into());
    }
    if cfg.families == 0 {
        return bad("at least one family is required".into());
    }
    if cfg.families > cfg.jobs {
        return bad(format!("{} families cannot share {} jobs", cfg.families, cfg.jobs));
    }
    if cfg.machines > 64 {
        return bad(format!("{} machines exceed the supported 64", cfg.machines));
    }
    Ok(())
}

/// Draws one instance; identical configurations give identical instances.
pub fn generate(cfg: &GeneratorConfig) -> Result<Instance, GeneratorError> {
    validate(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (f_count, m_count) = (cfg.families, cfg.machines);
    let processing: Vec<Time> = (0..f_count).map(|_| rng.gen_range(1..=MAX_PROCESSING)).collect();
    let min_p = *processing.iter().min().expect("non-empty");
    let max_p = *processing.iter().max().expect("non-empty");
    let setup: Vec<Time> = (0..f_count).map(|_| rng.gen_range(1..=min_p)).collect();
    let (lo, hi) = cfg.class.range(max_p);
    let threshold: Vec<Time> = (0..f_count).map(|_| rng.gen_range(lo..=hi)).collect();
    let mut qualified: Vec<Vec<usize>> = (0..f_count)
        .map(|_| {
            // Uniform over the 2^M - 1 non-empty subsets.
            let mask: u64 = rng.gen_range(1..=(u64::MAX >> (64 - m_count)));
            (0..m_count).filter(|m| mask >> m & 1 == 1).collect()
        })
        .collect();
    for m in 0..m_count {
        if !qualified.iter().any(|q| q.contains(&m)) {
            let f = rng.gen_range(0..f_count);
            qualified[f].push(m);
            qualified[f].sort_unstable();
        }
    }
    let (base, extra) = (cfg.jobs / f_count, cfg.jobs % f_count);
    let families = (0..f_count)
        .map(|f| Family {
            jobs: (base + usize::from(f < extra)) as u32,
            processing: processing[f],
            setup: setup[f],
            threshold: threshold[f],
            qualified: std::mem::take(&mut qualified[f]),
        })
        .collect();
    Ok(Instance::new(m_count, families).expect("generated instances are valid"))
}

/// One generated instance of a benchmark set.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub file_name: String,
    pub config: GeneratorConfig,
    pub instance: Instance,
}

/// Seed of instance `k` of class `class`, derived from the set seed.
pub fn derive_seed(seed: u64, class: ThresholdClass, k: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(class as u64 * 1_000_003 + k as u64);
    rng.gen()
}

pub fn file_name(cfg: &GeneratorConfig, k: usize) -> String {
    format!("ptc_N{}_M{}_F{}_{}_{}.json", cfg.jobs, cfg.machines, cfg.families, cfg.class, k)
}

/// `per_class` instances of every threshold class for one `(N, M, F)`.
pub fn generate_set(
    jobs: usize,
    machines: usize,
    families: usize,
    seed: u64,
    per_class: usize,
) -> Result<Vec<GeneratedInstance>, GeneratorError> {
    let mut out = Vec::with_capacity(3 * per_class);
    for class in ThresholdClass::ALL {
        for k in 1..=per_class {
            let config = GeneratorConfig { jobs, machines, families, class, seed: derive_seed(seed, class, k) };
            out.push(GeneratedInstance { file_name: file_name(&config, k), config, instance: generate(&config)? });
        }
    }
    Ok(out)
}

/// Size limits for [`generate_tiny`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyLimits {
    pub jobs: usize,
    pub machines: usize,
    pub families: usize,
    pub horizon: Time,
}

impl Default for TinyLimits {
    fn default() -> Self {
        Self { jobs: 5, machines: 2, families: 3, horizon: 30 }
    }
}

/// Small unstructured instance for cross-checking exact methods. Unlike
/// [`generate`] it also produces zero setups and thresholds shorter than
/// processing times.
pub fn generate_tiny(seed: u64, limits: &TinyLimits) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let machines = rng.gen_range(1..=limits.machines);
        let families = rng.gen_range(1..=limits.families.min(limits.jobs));
        let jobs = rng.gen_range(families..=limits.jobs);
        let mut counts = vec![1u32; families];
        for _ in families..jobs {
            counts[rng.gen_range(0..families)] += 1;
        }
        let mut qualified: Vec<Vec<usize>> = (0..families)
            .map(|_| {
                let mask: u64 = rng.gen_range(1..(1u64 << machines));
                (0..machines).filter(|m| mask >> m & 1 == 1).collect()
            })
            .collect();
        for m in 0..machines {
            if !qualified.iter().any(|q| q.contains(&m)) {
                let f = rng.gen_range(0..families);
                qualified[f].push(m);
                qualified[f].sort_unstable();
            }
        }
        let fams = counts
            .into_iter()
            .zip(qualified)
            .map(|(jobs, qualified)| Family {
                jobs,
                processing: rng.gen_range(1..=5),
                setup: rng.gen_range(0..=2),
                threshold: rng.gen_range(1..=12),
                qualified,
            })
            .collect();
        let inst = Instance::new(machines, fams).expect("valid by construction");
        if inst.horizon() <= limits.horizon {
            return inst;
        }
    }
}

/// Structural guarantees of generated instances; returns the first one
/// that fails.
pub fn check_structure(inst: &Instance) -> Result<(), String> {
    let fams = inst.families();
    if let Some(f) = fams.iter().position(|f| f.qualified.is_empty()) {
        return Err(format!("family {} has no qualified machine", f + 1));
    }
    if let Some(m) = (0..inst.machine_count()).find(|&m| !fams.iter().any(|f| f.is_qualified(m))) {
        return Err(format!("machine {} is qualified for no family", m + 1));
    }
    let max_p = fams.iter().map(|f| f.processing).max().unwrap_or(0);
    let min_p = fams.iter().map(|f| f.processing).min().unwrap_or(0);
    let min_gamma = fams.iter().map(|f| f.threshold).min().unwrap_or(0);
    let max_s = fams.iter().map(|f| f.setup).max().unwrap_or(0);
    if max_p > min_gamma {
        return Err(format!("max processing {max_p} exceeds min threshold {min_gamma}"));
    }
    if max_s > min_p {
        return Err(format!("max setup {max_s} exceeds min processing {min_p}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(jobs: usize, machines: usize, families: usize, class: ThresholdClass, seed: u64) -> GeneratorConfig {
        GeneratorConfig { jobs, machines, families, class, seed }
    }

    #[test]
    fn small_example_passes_checks() {
        let inst = generate(&cfg(20, 3, 4, ThresholdClass::Small, 1)).unwrap();
        assert_eq!(inst.job_count(), 20);
        assert_eq!((inst.machine_count(), inst.family_count()), (3, 4));
        check_structure(&inst).unwrap();
        let jobs: Vec<u32> = inst.families().iter().map(|f| f.jobs).collect();
        assert_eq!(jobs, vec![5, 5, 5, 5]);
    }

    #[test]
    fn single_job() {
        for class in ThresholdClass::ALL {
            let inst = generate(&cfg(1, 1, 1, class, 3)).unwrap();
            let f = inst.family(0);
            assert_eq!(f.jobs, 1);
            assert!(f.setup <= f.processing && f.processing <= f.threshold);
        }
    }

    #[test]
    fn deterministic() {
        let c = cfg(30, 4, 4, ThresholdClass::Medium, 99);
        assert_eq!(generate(&c).unwrap().to_json(), generate(&c).unwrap().to_json());
        let other = cfg(30, 4, 4, ThresholdClass::Medium, 100);
        assert_ne!(generate(&c).unwrap().to_json(), generate(&other).unwrap().to_json());
    }

    #[test]
    fn rejects_contradictions() {
        assert!(generate(&cfg(2, 3, 4, ThresholdClass::Small, 0)).is_err());
        assert!(generate(&cfg(4, 0, 1, ThresholdClass::Small, 0)).is_err());
        assert!(generate(&cfg(4, 1, 0, ThresholdClass::Small, 0)).is_err());
    }

    #[test]
    fn uneven_split_gives_larger_shares_first() {
        let inst = generate(&cfg(22, 3, 4, ThresholdClass::Large, 5)).unwrap();
        let jobs: Vec<u32> = inst.families().iter().map(|f| f.jobs).collect();
        assert_eq!(jobs, vec![6, 6, 5, 5]);
    }

    #[test]
    fn set_has_ten_per_class() {
        let set = generate_set(20, 3, 4, 7, PER_CLASS).unwrap();
        assert_eq!(set.len(), 30);
        for class in ThresholdClass::ALL {
            assert_eq!(set.iter().filter(|g| g.config.class == class).count(), 10);
        }
        assert_eq!(set[0].file_name, "ptc_N20_M3_F4_small_1.json");
        assert_eq!(set[29].file_name, "ptc_N20_M3_F4_large_10.json");
        let again = generate_set(20, 3, 4, 7, PER_CLASS).unwrap();
        assert!(set.iter().zip(&again).all(|(a, b)| a.instance.to_json() == b.instance.to_json()));
    }

    #[test]
    fn tiny_instances_respect_limits() {
        let limits = TinyLimits::default();
        for seed in 0..200 {
            let inst = generate_tiny(seed, &limits);
            assert!(inst.job_count() <= 5 && inst.machine_count() <= 2 && inst.family_count() <= 3);
            assert!(inst.horizon() <= 30);
        }
        assert_eq!(generate_tiny(4, &limits).to_json(), generate_tiny(4, &limits).to_json());
    }

    #[test]
    fn class_boundaries() {
        assert_eq!(ThresholdClass::Small.range(10), (10, 20));
        assert_eq!(ThresholdClass::Medium.range(10), (21, 30));
        assert_eq!(ThresholdClass::Large.range(10), (31, 40));
        assert_eq!(ThresholdClass::classify(20, 10), Some(ThresholdClass::Small));
        assert_eq!(ThresholdClass::classify(21, 10), Some(ThresholdClass::Medium));
        assert_eq!(ThresholdClass::classify(41, 10), None);
        let mut hist = std::collections::HashMap::new();
        for seed in 0..1000u64 {
            let class = ThresholdClass::ALL[seed as usize % 3];
            let inst = generate(&cfg(10, 3, 3, class, seed)).unwrap();
            let max_p = inst.families().iter().map(|f| f.processing).max().unwrap();
            for f in inst.families() {
                assert_eq!(ThresholdClass::classify(f.threshold, max_p), Some(class));
                *hist.entry(class).or_insert(0) += 1;
            }
        }
        assert_eq!(hist.len(), 3);
    }
}
