//! Deterministic instance generation from a 64-bit seed.
//!
//! The draw sequence is part of the file contract: reach entries slot-major,
//! then time limits, then resilience values. Identical seeds therefore yield
//! byte-identical scenario files on every platform.

use std::collections::HashSet;

use crate::model::{Car, CarId, GateId, ReachMatrix, Scenario};

/// SplitMix64 pseudo-random generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `lo..=hi` by modulo reduction.
    pub fn next_in_range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        match (hi - lo).checked_add(1) {
            Some(width) => lo + self.next_u64() % width,
            None => self.next_u64(), // the full u64 range
        }
    }

    /// Uniform value in `[0, 1)` with full 64-bit input resolution.
    pub fn next_unit(&mut self) -> f64 {
        self.next_u64() as f64 / 2f64.powi(64)
    }
}

/// Shape, ranges, and seed of a generated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub cars: usize,
    pub slots: usize,
    pub gates: usize,
    /// Inclusive reach range in whole minutes.
    pub reach_range: (u64, u64),
    /// Inclusive time-limit range in whole minutes.
    pub time_range: (u64, u64),
    pub seed: u64,
}

impl GenSpec {
    /// Spec with the default ranges: reach 1..=10, time limits 1..=12.
    pub fn new(cars: usize, slots: usize, gates: usize, seed: u64) -> Self {
        Self {
            cars,
            slots,
            gates,
            reach_range: (1, 10),
            time_range: (1, 12),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GenSpecError> {
        for (which, range) in [("reach", self.reach_range), ("time", self.time_range)] {
            if range.0 > range.1 {
                return Err(GenSpecError::InvalidRange {
                    which,
                    lo: range.0,
                    hi: range.1,
                });
            }
        }
        if self.cars > 0 && self.gates == 0 {
            return Err(GenSpecError::MissingGates { cars: self.cars });
        }
        Ok(())
    }
}

/// Why a generation spec cannot produce a valid instance.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenSpecError {
    #[error("InvalidRange: {which} range {lo}..={hi} is empty")]
    InvalidRange { which: &'static str, lo: u64, hi: u64 },
    #[error("MissingGates: {cars} cars need at least one gate")]
    MissingGates { cars: usize },
}

/// Generates a valid instance from the spec.
///
/// Draw order: all reach entries slot-major, then all time limits, then all
/// resilience values. Integer draws map through `lo + x mod (hi - lo + 1)`;
/// resilience draws map through `x / 2^64`, rounded to 12 decimal digits and
/// redrawn on collision so all values are pairwise distinct. Gates rotate
/// round-robin over the cars; labels are `c1..`, `s1..`, `g1..`.
pub fn generate(spec: &GenSpec) -> Result<Scenario, GenSpecError> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);

    let mut entries = Vec::with_capacity(spec.slots * spec.gates);
    for _ in 0..spec.slots * spec.gates {
        entries.push(rng.next_in_range(spec.reach_range.0, spec.reach_range.1) as f64);
    }

    let mut time_limits = Vec::with_capacity(spec.cars);
    for _ in 0..spec.cars {
        time_limits.push(rng.next_in_range(spec.time_range.0, spec.time_range.1) as f64);
    }

    let mut resilience = Vec::with_capacity(spec.cars);
    let mut seen: HashSet<u64> = HashSet::with_capacity(spec.cars);
    while resilience.len() < spec.cars {
        let value = round_to_12_decimals(rng.next_unit());
        if seen.insert(value.to_bits()) {
            resilience.push(value);
        }
    }

    let cars = (0..spec.cars)
        .map(|i| Car {
            id: CarId::from_index(i),
            label: format!("c{}", i + 1),
            gate: GateId::from_index(i % spec.gates),
            time_limit: time_limits[i],
            resilience: resilience[i],
        })
        .collect();
    let scenario = Scenario {
        cars,
        slot_names: (1..=spec.slots).map(|j| format!("s{j}")).collect(),
        gate_names: (1..=spec.gates).map(|h| format!("g{h}")).collect(),
        reach: ReachMatrix::from_slot_major(spec.slots, spec.gates, entries),
    };
    debug_assert_eq!(scenario.validate(), Ok(()));
    Ok(scenario)
}

fn round_to_12_decimals(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}
