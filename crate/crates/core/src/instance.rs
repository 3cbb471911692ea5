//! Instance data model: machines, job families and the derived job indexing.
//!
//! Families and machines are 1-based in files and reports and 0-based in
//! memory. Jobs are indexed canonically: the jobs of family 0 come first,
//! then the jobs of family 1, and so on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integral time unit used for every start, duration and threshold.
pub type Time = u32;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed instance file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Semantic { path: String, message: String },
    #[error("job {job} out of range (instance has {count} jobs)")]
    JobOutOfRange { job: usize, count: usize },
}

fn semantic(path: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Semantic {
        path: path.into(),
        message: message.into(),
    }
}

/// A family of identical jobs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub jobs: u32,
    pub processing: Time,
    pub setup: Time,
    pub threshold: Time,
    /// 0-based machine indices, sorted and unique.
    pub qualified: Vec<usize>,
}

impl Family {
    pub fn is_qualified(&self, machine: usize) -> bool {
        self.qualified.binary_search(&machine).is_ok()
    }
}

/// A validated problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    machines: usize,
    families: Vec<Family>,
    /// `first_job[f]` is the 0-based index of the first job of family `f`;
    /// the last entry is the total job count.
    first_job: Vec<usize>,
}

impl Instance {
    /// Builds an instance, checking every structural invariant.
    pub fn new(machines: usize, families: Vec<Family>) -> Result<Self, InstanceError> {
        if machines == 0 {
            return Err(semantic("machines", "must be at least 1"));
        }
        if families.is_empty() {
            return Err(semantic("families", "at least one family is required"));
        }
        let mut covered = vec![false; machines];
        for (f, family) in families.iter().enumerate() {
            let path = |field: &str| format!("families[{f}].{field}");
            if family.jobs == 0 {
                return Err(semantic(path("jobs"), "must be at least 1"));
            }
            if family.processing == 0 {
                return Err(semantic(path("processing"), "must be at least 1"));
            }
            if family.threshold == 0 {
                return Err(semantic(path("threshold"), "must be at least 1"));
            }
            if family.qualified.is_empty() {
                return Err(semantic(path("qualified"), "at least one machine is required"));
            }
            for pair in family.qualified.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(semantic(
                        path("qualified"),
                        "machines must be unique and sorted",
                    ));
                }
            }
            for &m in &family.qualified {
                if m >= machines {
                    return Err(semantic(
                        path("qualified"),
                        format!("machine {} outside 1..={machines}", m + 1),
                    ));
                }
                covered[m] = true;
            }
        }
        if let Some(m) = covered.iter().position(|c| !c) {
            return Err(semantic(
                "machines",
                format!("machine {} is not qualified for any family", m + 1),
            ));
        }
        let mut first_job = Vec::with_capacity(families.len() + 1);
        let mut acc = 0usize;
        for family in &families {
            first_job.push(acc);
            acc += family.jobs as usize;
        }
        first_job.push(acc);
        Ok(Self {
            machines,
            families,
            first_job,
        })
    }

    pub fn machine_count(&self) -> usize {
        self.machines
    }

    pub fn family_count(&self) -> usize {
        self.families.len()
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn family(&self, f: usize) -> &Family {
        &self.families[f]
    }

    /// Total number of jobs N.
    pub fn job_count(&self) -> usize {
        self.first_job[self.families.len()]
    }

    /// Number of (family, qualified machine) pairs.
    pub fn pair_count(&self) -> usize {
        self.families.iter().map(|f| f.qualified.len()).sum()
    }

    /// Range of 0-based job indices belonging to family `f`.
    pub fn jobs_of(&self, f: usize) -> std::ops::Range<usize> {
        self.first_job[f]..self.first_job[f + 1]
    }

    /// Family of a 0-based job index.
    pub fn family_of(&self, job: usize) -> Result<usize, InstanceError> {
        if job >= self.job_count() {
            return Err(InstanceError::JobOutOfRange {
                job: job + 1,
                count: self.job_count(),
            });
        }
        // first_job is sorted; the family is the last start <= job.
        Ok(self.first_job.partition_point(|&s| s <= job) - 1)
    }

    /// Horizon T: the sum over families of `n_f * (p_f + s_f)`.
    pub fn makespan_upper_bound(&self) -> Time {
        self.families
            .iter()
            .map(|f| f.jobs * (f.processing + f.setup))
            .sum()
    }

    /// Alias for [`Instance::makespan_upper_bound`].
    pub fn horizon(&self) -> Time {
        self.makespan_upper_bound()
    }

    /// `ceil(sum n_f * p_f / M)`.
    pub fn makespan_lower_bound(&self) -> Time {
        let work: u64 = self
            .families
            .iter()
            .map(|f| u64::from(f.jobs) * u64::from(f.processing))
            .sum();
        work.div_ceil(self.machines as u64) as Time
    }

    /// Parses and validates the JSON instance format.
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.into_instance()
    }

    /// Renders the instance in the JSON file format.
    pub fn to_json(&self) -> String {
        let file = InstanceFile::from(self);
        serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
    }
}

/// Wire representation of an instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub machines: usize,
    pub families: Vec<FamilyFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub id: usize,
    pub jobs: u32,
    pub processing: Time,
    pub setup: Time,
    pub threshold: Time,
    pub qualified: Vec<usize>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, InstanceError> {
        let count = self.families.len();
        let mut slots: Vec<Option<Family>> = vec![None; count];
        for (i, ff) in self.families.into_iter().enumerate() {
            let path = |field: &str| format!("families[{i}].{field}");
            if ff.id == 0 || ff.id > count {
                return Err(semantic(path("id"), format!("must lie in 1..={count}")));
            }
            if slots[ff.id - 1].is_some() {
                return Err(semantic(path("id"), format!("duplicate family id {}", ff.id)));
            }
            let mut qualified = Vec::with_capacity(ff.qualified.len());
            for &m in &ff.qualified {
                if m == 0 || m > self.machines {
                    return Err(semantic(
                        path("qualified"),
                        format!("machine {m} outside 1..={}", self.machines),
                    ));
                }
                qualified.push(m - 1);
            }
            qualified.sort_unstable();
            if qualified.windows(2).any(|w| w[0] == w[1]) {
                return Err(semantic(path("qualified"), "duplicate machine"));
            }
            slots[ff.id - 1] = Some(Family {
                jobs: ff.jobs,
                processing: ff.processing,
                setup: ff.setup,
                threshold: ff.threshold,
                qualified,
            });
        }
        let families = slots.into_iter().map(|f| f.expect("ids are a permutation")).collect();
        Instance::new(self.machines, families)
    }
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        Self {
            machines: inst.machines,
            families: inst
                .families
                .iter()
                .enumerate()
                .map(|(f, fam)| FamilyFile {
                    id: f + 1,
                    jobs: fam.jobs,
                    processing: fam.processing,
                    setup: fam.setup,
                    threshold: fam.threshold,
                    qualified: fam.qualified.iter().map(|m| m + 1).collect(),
                })
                .collect(),
        }
    }
}
