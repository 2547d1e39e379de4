//! Instance model: cars, gates, slots, and the gate-to-slot reaching times.
//!
//! A [`Scenario`] describes one parking instance. Cars enter through a gate,
//! carry a parking time limit in minutes, and a resilience weight in `[0, 1]`
//! that doubles as their priority: a lower value means the car is less able
//! to wait and wins contested slots.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

/// Dense 1-based car identifier, numbered in input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CarId(u32);

/// Dense 1-based slot identifier, numbered in input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotId(u32);

/// Dense 1-based gate identifier, numbered in input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateId(u32);

macro_rules! impl_id {
    ($name:ident) => {
        impl $name {
            /// Creates an id from its 1-based number.
            pub fn new(id: u32) -> Self {
                assert!(id >= 1, concat!(stringify!($name), " is 1-based"));
                Self(id)
            }

            /// Returns the 1-based number.
            pub fn get(self) -> u32 {
                self.0
            }

            /// Returns the 0-based position in storage order.
            pub fn index(self) -> usize {
                self.0 as usize - 1
            }

            /// Creates an id from a 0-based position.
            pub fn from_index(index: usize) -> Self {
                Self(index as u32 + 1)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

impl_id!(CarId);
impl_id!(SlotId);
impl_id!(GateId);

/// A car: entry gate, parking time limit in minutes, and resilience weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Car {
    pub id: CarId,
    /// External identifier used in files and reports.
    pub label: String,
    pub gate: GateId,
    pub time_limit: f64,
    pub resilience: f64,
}

/// Orders cars by ascending resilience, falling back to the car id on ties.
///
/// With the default validation (pairwise distinct resilience) this is the
/// plain resilience order; the id fallback only matters when ties are
/// explicitly permitted via [`ValidateOptions::allow_resilience_ties`].
pub fn priority_cmp(a: &Car, b: &Car) -> Ordering {
    a.resilience.total_cmp(&b.resilience).then(a.id.cmp(&b.id))
}

/// Reaching times in minutes from every gate to every slot, stored slot-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachMatrix {
    slots: usize,
    gates: usize,
    entries: Vec<f64>,
}

impl ReachMatrix {
    /// Builds a matrix from slot-major entries (`entries.len() == slots * gates`).
    pub fn from_slot_major(slots: usize, gates: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), slots * gates, "reach matrix shape mismatch");
        Self {
            slots,
            gates,
            entries,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots
    }

    pub fn gate_count(&self) -> usize {
        self.gates
    }

    /// Reaching time of `slot` from `gate`.
    pub fn get(&self, slot: SlotId, gate: GateId) -> f64 {
        assert!(slot.index() < self.slots && gate.index() < self.gates);
        self.entries[slot.index() * self.gates + gate.index()]
    }
}

/// A full parking instance: labeled gates, slots, cars, and reaching times.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cars: Vec<Car>,
    pub slot_names: Vec<String>,
    pub gate_names: Vec<String>,
    pub reach: ReachMatrix,
}

impl Scenario {
    /// Builds a one-gate instance with generated labels (`c1..`, `s1..`, `g1`).
    ///
    /// `cars` lists `(time_limit, resilience)` pairs in input order and
    /// `reach[j]` is the reaching time of slot `j + 1` from the single gate.
    pub fn single_gate(cars: &[(f64, f64)], reach: &[f64]) -> Scenario {
        let cars = cars
            .iter()
            .enumerate()
            .map(|(i, &(time_limit, resilience))| Car {
                id: CarId::from_index(i),
                label: format!("c{}", i + 1),
                gate: GateId::new(1),
                time_limit,
                resilience,
            })
            .collect();
        let slot_names = (1..=reach.len()).map(|j| format!("s{j}")).collect();
        Scenario {
            cars,
            slot_names,
            gate_names: vec!["g1".to_string()],
            reach: ReachMatrix::from_slot_major(reach.len(), 1, reach.to_vec()),
        }
    }

    pub fn car_count(&self) -> usize {
        self.cars.len()
    }

    pub fn slot_count(&self) -> usize {
        self.slot_names.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gate_names.len()
    }

    pub fn car(&self, id: CarId) -> &Car {
        &self.cars[id.index()]
    }

    pub fn slot_name(&self, slot: SlotId) -> &str {
        &self.slot_names[slot.index()]
    }

    pub fn slot_ids(&self) -> impl Iterator<Item = SlotId> {
        (0..self.slot_count()).map(SlotId::from_index)
    }

    /// Checks every instance invariant, reporting the first violation.
    ///
    /// Checks run in a fixed order: matrix shape, then each car in input order
    /// (gate, time limit, resilience range), then resilience distinctness,
    /// then reach entries slot-major.
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.validate_with(ValidateOptions::default())
    }

    /// Like [`Scenario::validate`], with explicit options.
    pub fn validate_with(&self, options: ValidateOptions) -> Result<(), ValidationError> {
        if self.reach.slot_count() != self.slot_count() || self.reach.gate_count() != self.gate_count() {
            let name = |names: &[String], i: usize| {
                names.get(i).cloned().unwrap_or_else(|| "?".to_string())
            };
            return Err(ValidationError::MissingReachEntry {
                slot: name(&self.slot_names, self.reach.slot_count()),
                gate: name(&self.gate_names, self.reach.gate_count()),
            });
        }
        for car in &self.cars {
            if car.gate.index() >= self.gate_count() {
                return Err(ValidationError::UnknownGate {
                    car: car.label.clone(),
                    gate: car.gate.to_string(),
                });
            }
            // NaN counts as invalid here, same as a negative limit
            if car.time_limit < 0.0 || car.time_limit.is_nan() {
                return Err(ValidationError::NegativeTime {
                    subject: TimeSubject::CarLimit {
                        car: car.label.clone(),
                    },
                    value: car.time_limit,
                });
            }
            if !(0.0..=1.0).contains(&car.resilience) {
                return Err(ValidationError::ResilienceOutOfRange {
                    car: car.label.clone(),
                    value: car.resilience,
                });
            }
        }
        if !options.allow_resilience_ties {
            let mut seen: HashMap<u64, CarId> = HashMap::new();
            for car in &self.cars {
                // normalize -0.0 so numerically equal values collide
                let key = (car.resilience + 0.0).to_bits();
                if let Some(&first) = seen.get(&key) {
                    return Err(ValidationError::DuplicateResilience {
                        first: self.car(first).label.clone(),
                        second: car.label.clone(),
                        value: car.resilience,
                    });
                }
                seen.insert(key, car.id);
            }
        }
        for slot in self.slot_ids() {
            for gate in (0..self.gate_count()).map(GateId::from_index) {
                let value = self.reach.get(slot, gate);
                if value < 0.0 || value.is_nan() {
                    return Err(ValidationError::NegativeTime {
                        subject: TimeSubject::Reach {
                            slot: self.slot_name(slot).to_string(),
                            gate: self.gate_names[gate.index()].clone(),
                        },
                        value,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Validation toggles for [`Scenario::validate_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Accept duplicate resilience values; every ordering decision then breaks
    /// ties by car id, so earlier cars win contested slots.
    pub allow_resilience_ties: bool,
}

/// Subject of a negative-time violation.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeSubject {
    /// A car's parking time limit.
    CarLimit { car: String },
    /// A reach entry for a slot from a gate.
    Reach { slot: String, gate: String },
}

impl fmt::Display for TimeSubject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSubject::CarLimit { car } => write!(f, "time limit of car {car}"),
            TimeSubject::Reach { slot, gate } => write!(f, "reach of slot {slot} from gate {gate}"),
        }
    }
}

/// First instance invariant violated by a scenario, with the offending ids.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error("UnknownGate: car {car} enters through unknown gate {gate}")]
    UnknownGate { car: String, gate: String },
    #[error("NegativeTime: {subject} is {value}")]
    NegativeTime { subject: TimeSubject, value: f64 },
    #[error("ResilienceOutOfRange: car {car} has resilience {value}, expected a value in [0, 1]")]
    ResilienceOutOfRange { car: String, value: f64 },
    #[error("DuplicateResilience: cars {first} and {second} both have resilience {value}")]
    DuplicateResilience {
        first: String,
        second: String,
        value: f64,
    },
    #[error("MissingReachEntry: no reaching time for slot {slot} from gate {gate}")]
    MissingReachEntry { slot: String, gate: String },
}

/// A total strategy choice: one slot per car, indexed by car order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    choices: Vec<SlotId>,
}

impl StrategyProfile {
    pub fn new(choices: Vec<SlotId>) -> Self {
        Self { choices }
    }

    pub fn choice(&self, car: CarId) -> SlotId {
        self.choices[car.index()]
    }

    pub fn choices(&self) -> &[SlotId] {
        &self.choices
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}
