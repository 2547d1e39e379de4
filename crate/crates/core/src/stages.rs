//! Staged arrivals: allocate cars in batches against a shared slot inventory.
//!
//! Each stage runs the priority allocator over its own batch; later stages
//! only see the slots earlier stages left behind.

use crate::allocation::{assign_in_order, Allocation, AllocationConfig};
use crate::model::{priority_cmp, CarId};
use crate::projection::ProjectedScenario;

/// Ordered batches of cars; every car appears in exactly one batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagePlan {
    batches: Vec<Vec<CarId>>,
}

/// Why a batch list does not form a valid plan.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StagePlanError {
    #[error("batch size must be at least 1")]
    ZeroBatchSize,
    #[error("car {car} appears in more than one batch")]
    DuplicateCar { car: CarId },
    #[error("car {car} is missing from the plan")]
    MissingCar { car: CarId },
    #[error("plan references car {car}, but the instance has {cars} cars")]
    UnknownCar { car: CarId, cars: usize },
}

impl StagePlan {
    /// Splits `car_count` cars into consecutive input-order batches of
    /// `batch_size`; the last batch may be smaller.
    pub fn by_batch_size(car_count: usize, batch_size: usize) -> Result<Self, StagePlanError> {
        if batch_size == 0 {
            return Err(StagePlanError::ZeroBatchSize);
        }
        let batches = (0..car_count)
            .map(CarId::from_index)
            .collect::<Vec<_>>()
            .chunks(batch_size)
            .map(<[CarId]>::to_vec)
            .collect();
        Ok(Self { batches })
    }

    /// Builds a plan from explicit batches, checking that every car of the
    /// instance appears exactly once.
    pub fn from_batches(
        batches: Vec<Vec<CarId>>,
        car_count: usize,
    ) -> Result<Self, StagePlanError> {
        let mut seen = vec![false; car_count];
        for car in batches.iter().flatten() {
            if car.index() >= car_count {
                return Err(StagePlanError::UnknownCar {
                    car: *car,
                    cars: car_count,
                });
            }
            if seen[car.index()] {
                return Err(StagePlanError::DuplicateCar { car: *car });
            }
            seen[car.index()] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(StagePlanError::MissingCar {
                car: CarId::from_index(missing),
            });
        }
        Ok(Self { batches })
    }

    pub fn stage_count(&self) -> usize {
        self.batches.len()
    }

    pub fn batches(&self) -> &[Vec<CarId>] {
        &self.batches
    }
}

/// Outcome of a staged run: the plan's batches plus the combined allocation.
///
/// Stages are independent per car — a car's slot and cost are decided in its
/// own stage — so the combined allocation also serves as the per-stage view
/// when filtered by batch.
#[derive(Debug, Clone, PartialEq)]
pub struct StagedAllocation {
    batches: Vec<Vec<CarId>>,
    combined: Allocation,
}

impl StagedAllocation {
    pub fn stage_count(&self) -> usize {
        self.batches.len()
    }

    pub fn batch(&self, stage: usize) -> &[CarId] {
        &self.batches[stage]
    }

    pub fn batches(&self) -> &[Vec<CarId>] {
        &self.batches
    }

    pub fn combined(&self) -> &Allocation {
        &self.combined
    }
}

/// Runs the priority allocator batch by batch over a shared slot inventory.
pub fn run_stages(
    projected: &ProjectedScenario,
    plan: &StagePlan,
    config: &AllocationConfig,
) -> StagedAllocation {
    let covered: usize = plan.batches.iter().map(Vec::len).sum();
    assert_eq!(covered, projected.car_count(), "plan must cover every car");
    let mut allocation = Allocation::new_unparked(projected.car_count());
    let mut available = vec![true; projected.slot_count()];
    for batch in &plan.batches {
        let mut order = batch.clone();
        order.sort_by(|&a, &b| priority_cmp(projected.car(a), projected.car(b)));
        assign_in_order(projected, config.objective, &order, &mut available, &mut allocation);
    }
    StagedAllocation {
        batches: plan.batches.clone(),
        combined: allocation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::nash_allocate;
    use crate::cost::Cost;
    use crate::fixtures::{arb_projected, toy_projected};
    use crate::model::SlotId;
    use proptest::prelude::*;

    #[test]
    fn batch_size_splits_in_input_order() {
        let plan = StagePlan::by_batch_size(5, 2).unwrap();
        assert_eq!(
            plan.batches(),
            &[
                vec![CarId::new(1), CarId::new(2)],
                vec![CarId::new(3), CarId::new(4)],
                vec![CarId::new(5)],
            ]
        );
        assert_eq!(StagePlan::by_batch_size(0, 3).unwrap().stage_count(), 0);
        assert_eq!(
            StagePlan::by_batch_size(3, 0),
            Err(StagePlanError::ZeroBatchSize)
        );
    }

    #[test]
    fn explicit_batches_must_cover_each_car_once() {
        let ids = |v: &[u32]| v.iter().map(|&i| CarId::new(i)).collect::<Vec<_>>();
        assert!(StagePlan::from_batches(vec![ids(&[2]), ids(&[1, 3])], 3).is_ok());
        assert_eq!(
            StagePlan::from_batches(vec![ids(&[1, 2]), ids(&[2, 3])], 3),
            Err(StagePlanError::DuplicateCar { car: CarId::new(2) })
        );
        assert_eq!(
            StagePlan::from_batches(vec![ids(&[1, 3])], 3),
            Err(StagePlanError::MissingCar { car: CarId::new(2) })
        );
        assert_eq!(
            StagePlan::from_batches(vec![ids(&[1, 4])], 3),
            Err(StagePlanError::UnknownCar {
                car: CarId::new(4),
                cars: 3
            })
        );
    }

    #[test]
    fn one_batch_equals_the_plain_priority_run() {
        let toy = toy_projected();
        let plan = StagePlan::by_batch_size(3, 3).unwrap();
        let staged = run_stages(&toy, &plan, &AllocationConfig::default());
        assert_eq!(staged.stage_count(), 1);
        assert_eq!(
            staged.combined(),
            &nash_allocate(&toy, &AllocationConfig::default())
        );
    }

    #[test]
    fn singleton_batches_park_all_toy_cars() {
        // one car per stage: c1 settles for the tightest slot s3, leaving
        // room for both later arrivals
        let toy = toy_projected();
        let plan = StagePlan::by_batch_size(3, 1).unwrap();
        let staged = run_stages(&toy, &plan, &AllocationConfig::default());
        let combined = staged.combined();
        assert_eq!(combined.slot_of(CarId::new(1)), Some(SlotId::new(3)));
        assert_eq!(combined.slot_of(CarId::new(2)), Some(SlotId::new(1)));
        assert_eq!(combined.slot_of(CarId::new(3)), Some(SlotId::new(2)));
        assert_eq!(combined.parked_count(), 3);
        assert_eq!(combined.cost_of(CarId::new(1)), Cost::Finite(0.5));
        assert_eq!(combined.cost_of(CarId::new(2)), Cost::Finite(0.0));
        assert_eq!(combined.cost_of(CarId::new(3)), Cost::Finite(0.009));
    }

    #[test]
    fn pair_then_single_batch_on_the_toy() {
        let toy = toy_projected();
        let plan = StagePlan::by_batch_size(3, 2).unwrap();
        let staged = run_stages(&toy, &plan, &AllocationConfig::default());
        let combined = staged.combined();
        // stage 1 processes c2 before c1 (priority), stage 2 gets s2 only
        assert_eq!(combined.slot_of(CarId::new(1)), Some(SlotId::new(3)));
        assert_eq!(combined.slot_of(CarId::new(2)), Some(SlotId::new(1)));
        assert_eq!(combined.slot_of(CarId::new(3)), Some(SlotId::new(2)));
    }

    proptest! {
        #[test]
        fn stages_share_one_inventory(projected in arb_projected(), batch_size in 1usize..=3) {
            let plan = StagePlan::by_batch_size(projected.car_count(), batch_size).unwrap();
            let staged = run_stages(&projected, &plan, &AllocationConfig::default());
            let mut seen = vec![false; projected.slot_count()];
            for (car, slot) in staged.combined().assigned_pairs() {
                prop_assert!(!seen[slot.index()], "slot assigned in two stages");
                seen[slot.index()] = true;
                let slack = projected.car(car).time_limit - projected.reach(car, slot);
                prop_assert!(slack >= 0.0);
            }
        }

        #[test]
        fn one_batch_matches_plain_allocation(projected in arb_projected()) {
            let plan = StagePlan::by_batch_size(projected.car_count(), projected.car_count().max(1))
                .unwrap();
            let staged = run_stages(&projected, &plan, &AllocationConfig::default());
            prop_assert_eq!(
                staged.combined(),
                &nash_allocate(&projected, &AllocationConfig::default())
            );
        }
    }
}
