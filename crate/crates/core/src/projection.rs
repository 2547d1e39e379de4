//! Gate projection: collapse the reach matrix to one reach vector per car.
//!
//! After projection every car carries the reaching times from its own entry
//! gate, which is all the allocators and oracles ever need.

use crate::model::{Car, CarId, Scenario, SlotId, ValidateOptions, ValidationError};

/// A validated instance with per-car reaching times.
///
/// Construction goes through [`ProjectedScenario::project`], which validates
/// the source scenario first; holding a value of this type is evidence that
/// the instance invariants held.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedScenario {
    cars: Vec<Car>,
    slot_names: Vec<String>,
    /// Car-major reach values: `reach[car * slots + slot]`.
    reach: Vec<f64>,
}

impl ProjectedScenario {
    /// Validates `scenario` and projects reaching times onto each car's gate.
    pub fn project(scenario: &Scenario) -> Result<Self, ValidationError> {
        Self::project_with(scenario, ValidateOptions::default())
    }

    /// Like [`ProjectedScenario::project`], with explicit validation options.
    pub fn project_with(
        scenario: &Scenario,
        options: ValidateOptions,
    ) -> Result<Self, ValidationError> {
        scenario.validate_with(options)?;
        let slots = scenario.slot_count();
        let mut reach = Vec::with_capacity(scenario.car_count() * slots);
        for car in &scenario.cars {
            for slot in scenario.slot_ids() {
                reach.push(scenario.reach.get(slot, car.gate));
            }
        }
        Ok(Self {
            cars: scenario.cars.clone(),
            slot_names: scenario.slot_names.clone(),
            reach,
        })
    }

    pub fn car_count(&self) -> usize {
        self.cars.len()
    }

    pub fn slot_count(&self) -> usize {
        self.slot_names.len()
    }

    pub fn cars(&self) -> &[Car] {
        &self.cars
    }

    pub fn car(&self, id: CarId) -> &Car {
        &self.cars[id.index()]
    }

    pub fn slot_ids(&self) -> impl Iterator<Item = SlotId> {
        (0..self.slot_count()).map(SlotId::from_index)
    }

    pub fn slot_name(&self, slot: SlotId) -> &str {
        &self.slot_names[slot.index()]
    }

    pub fn slot_names(&self) -> &[String] {
        &self.slot_names
    }

    /// Reaching time for `car` to `slot` through the car's own gate.
    pub fn reach(&self, car: CarId, slot: SlotId) -> f64 {
        self.reach[car.index() * self.slot_count() + slot.index()]
    }
}
