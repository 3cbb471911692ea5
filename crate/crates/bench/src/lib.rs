//! Fixtures shared by the criterion benches.

use ptc_core::{generate, generate_tiny, GeneratorConfig, Instance, Schedule, ThresholdClass, TinyLimits};

pub const EXAMPLE_ONE: &str = include_str!("../../../data/example1.json");
pub const EXAMPLE_ONE_A: &str = include_str!("../../../data/example1_a.json");

pub fn example_one() -> Instance {
    Instance::from_json(EXAMPLE_ONE).expect("valid fixture")
}

pub fn example_one_a(inst: &Instance) -> Schedule {
    Schedule::from_json(inst, EXAMPLE_ONE_A).expect("valid fixture")
}

/// One generated instance of the given size.
pub fn sized(jobs: usize, machines: usize, families: usize, class: ThresholdClass) -> Instance {
    generate(&GeneratorConfig { jobs, machines, families, class, seed: 1 }).expect("valid size")
}

pub fn tiny_corpus(count: u64) -> Vec<Instance> {
    (0..count).map(|s| generate_tiny(s, &TinyLimits::default())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        let inst = example_one();
        assert_eq!(inst.job_count(), 10);
        assert_eq!(example_one_a(&inst).assignments().len(), 10);
        assert_eq!(sized(70, 4, 5, ThresholdClass::Large).job_count(), 70);
        assert_eq!(tiny_corpus(3).len(), 3);
    }
}
