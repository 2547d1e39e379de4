//! Slot assignment: the priority allocator and a greedy baseline.
//!
//! The priority allocator processes cars by ascending resilience and gives
//! each its best remaining slot by residual cost; under the default
//! minimizing objective the outcome is deviation-stable — no car can lower
//! its cost by unilaterally switching to any other slot. The greedy baseline
//! assigns each car the nearest remaining slot it can reach in time.

use crate::cost::{residual_cost, Cost, CostVector};
use crate::model::{priority_cmp, CarId, SlotId, StrategyProfile};
use crate::projection::ProjectedScenario;

/// Which residual cost the priority allocator prefers among the finite options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Take the slot with the smallest finite residual cost (the default).
    #[default]
    MinResidual,
    /// Take the slot with the largest finite residual cost.
    MaxResidual,
}

/// Processing order of the greedy baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyOrder {
    /// Input order (the default).
    #[default]
    Arrival,
    /// Ascending resilience.
    Resilience,
}

/// Allocator options; the defaults give the documented behavior of both
/// algorithms. Slot ties always resolve to the lowest slot id.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllocationConfig {
    pub objective: Objective,
    pub greedy_order: GreedyOrder,
}

/// Result of an assignment: at most one slot per car, with each car's cost.
///
/// Cars without a slot are unparked and carry an infinite cost; assigned
/// slots are pairwise distinct and reachable within each car's limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    assigned: Vec<Option<SlotId>>,
    costs: Vec<Cost>,
}

impl Allocation {
    pub(crate) fn new_unparked(cars: usize) -> Self {
        Self {
            assigned: vec![None; cars],
            costs: vec![Cost::Infinite; cars],
        }
    }

    /// Builds an allocation from an explicit partial assignment, recomputing
    /// every cost from the instance. Panics if two cars share a slot.
    pub fn from_assignment(projected: &ProjectedScenario, assigned: Vec<Option<SlotId>>) -> Self {
        assert_eq!(assigned.len(), projected.car_count());
        let mut taken = vec![false; projected.slot_count()];
        let costs = assigned
            .iter()
            .enumerate()
            .map(|(i, slot)| match slot {
                Some(slot) => {
                    assert!(!taken[slot.index()], "slot assigned twice");
                    taken[slot.index()] = true;
                    residual_cost(projected, CarId::from_index(i), *slot)
                }
                None => Cost::Infinite,
            })
            .collect();
        Self { assigned, costs }
    }

    pub fn car_count(&self) -> usize {
        self.assigned.len()
    }

    pub fn slot_of(&self, car: CarId) -> Option<SlotId> {
        self.assigned[car.index()]
    }

    pub fn cost_of(&self, car: CarId) -> Cost {
        self.costs[car.index()]
    }

    /// `(car, slot)` pairs for assigned cars, in car order.
    pub fn assigned_pairs(&self) -> impl Iterator<Item = (CarId, SlotId)> + '_ {
        self.assigned
            .iter()
            .enumerate()
            .filter_map(|(i, slot)| slot.map(|s| (CarId::from_index(i), s)))
    }

    /// Unparked cars in car order.
    pub fn unparked(&self) -> impl Iterator<Item = CarId> + '_ {
        self.assigned
            .iter()
            .enumerate()
            .filter(|(_, slot)| slot.is_none())
            .map(|(i, _)| CarId::from_index(i))
    }

    pub fn parked_count(&self) -> usize {
        self.assigned.iter().filter(|s| s.is_some()).count()
    }

    pub fn finite_cost_sum(&self) -> f64 {
        self.costs.iter().filter_map(|c| c.finite()).sum()
    }

    pub fn is_fully_parked(&self) -> bool {
        self.assigned.iter().all(Option::is_some)
    }

    /// Costs in car order.
    pub fn cost_vector(&self) -> CostVector {
        CostVector::new(self.costs.clone())
    }

    /// Total profile in which every unparked car falls back to `fallback`.
    pub fn to_profile(&self, fallback: SlotId) -> StrategyProfile {
        StrategyProfile::new(
            self.assigned
                .iter()
                .map(|slot| slot.unwrap_or(fallback))
                .collect(),
        )
    }
}

/// Assigns cars one at a time in `order`; each takes the best available slot
/// by residual cost under `objective`, ties preferring the lowest slot id.
/// Cars with no finite option stay unparked. `available` is updated in place.
pub(crate) fn assign_in_order(
    projected: &ProjectedScenario,
    objective: Objective,
    order: &[CarId],
    available: &mut [bool],
    allocation: &mut Allocation,
) {
    for &car in order {
        let mut best: Option<(SlotId, f64)> = None;
        for slot in projected.slot_ids() {
            if !available[slot.index()] {
                continue;
            }
            let Cost::Finite(value) = residual_cost(projected, car, slot) else {
                continue;
            };
            let better = match best {
                None => true,
                Some((_, current)) => match objective {
                    Objective::MinResidual => value < current,
                    Objective::MaxResidual => value > current,
                },
            };
            if better {
                best = Some((slot, value));
            }
        }
        if let Some((slot, value)) = best {
            available[slot.index()] = false;
            allocation.assigned[car.index()] = Some(slot);
            allocation.costs[car.index()] = Cost::Finite(value);
        }
    }
}

/// Priority assignment: cars in ascending resilience order each take their
/// best remaining slot by residual cost.
///
/// Under [`Objective::MinResidual`] the result is deviation-stable: every slot
/// a car might prefer was still available at its own (earlier-priority) turn,
/// and slots taken before its turn belong to cars that would win the contest.
pub fn nash_allocate(projected: &ProjectedScenario, config: &AllocationConfig) -> Allocation {
    let mut order: Vec<CarId> = projected.cars().iter().map(|c| c.id).collect();
    order.sort_by(|&a, &b| priority_cmp(projected.car(a), projected.car(b)));
    let mut allocation = Allocation::new_unparked(projected.car_count());
    let mut available = vec![true; projected.slot_count()];
    assign_in_order(projected, config.objective, &order, &mut available, &mut allocation);
    allocation
}

/// Greedy baseline: cars in the configured order each take the nearest
/// remaining slot they can reach within their limit, ties preferring the
/// lowest slot id; costs follow the same semantics as the priority allocator.
pub fn greedy_allocate(projected: &ProjectedScenario, config: &AllocationConfig) -> Allocation {
    let mut order: Vec<CarId> = projected.cars().iter().map(|c| c.id).collect();
    if config.greedy_order == GreedyOrder::Resilience {
        order.sort_by(|&a, &b| priority_cmp(projected.car(a), projected.car(b)));
    }
    let mut allocation = Allocation::new_unparked(projected.car_count());
    let mut available = vec![true; projected.slot_count()];
    for &car in &order {
        let limit = projected.car(car).time_limit;
        let mut best: Option<(SlotId, f64)> = None;
        for slot in projected.slot_ids() {
            if !available[slot.index()] {
                continue;
            }
            let reach = projected.reach(car, slot);
            if limit - reach < 0.0 {
                continue;
            }
            if best.is_none_or(|(_, current)| reach < current) {
                best = Some((slot, reach));
            }
        }
        if let Some((slot, reach)) = best {
            available[slot.index()] = false;
            allocation.assigned[car.index()] = Some(slot);
            allocation.costs[car.index()] =
                Cost::Finite(projected.car(car).resilience * (limit - reach));
        }
    }
    allocation
}
