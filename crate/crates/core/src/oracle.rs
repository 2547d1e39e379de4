//! Exhaustive verification: deviation scans, stable-profile enumeration, and
//! the social-optimum search.
//!
//! These routines are deliberately brute force — small, independent, and easy
//! to audit — so they can vouch for the allocators on desk-sized instances.

use std::cmp::Ordering;

use crate::allocation::Allocation;
use crate::cost::{profile_costs, Cost, CostVector};
use crate::model::{Car, CarId, SlotId, StrategyProfile};
use crate::projection::ProjectedScenario;

/// A strictly improving unilateral move found by a deviation scan.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationWitness {
    pub car: CarId,
    pub better_slot: SlotId,
    pub current_cost: Cost,
    pub deviated_cost: Cost,
}

/// Per-slot priority key of the best reaching chooser, used to price
/// deviations without recomputing whole profiles.
fn slot_winner_keys(
    projected: &ProjectedScenario,
    choice: impl Fn(CarId) -> Option<SlotId>,
) -> Vec<Option<(f64, CarId)>> {
    let mut keys: Vec<Option<(f64, CarId)>> = vec![None; projected.slot_count()];
    for car in projected.cars() {
        let Some(slot) = choice(car.id) else { continue };
        if car.time_limit - projected.reach(car.id, slot) < 0.0 {
            continue;
        }
        let key = (car.resilience, car.id);
        let cell = &mut keys[slot.index()];
        if cell.is_none_or(|current| key < current) {
            *cell = Some(key);
        }
    }
    keys
}

/// Cost `car` would pay on `slot`, given the other cars' fixed choices
/// summarized by `winner_keys`. `car` must not currently occupy `slot`.
fn deviated_cost(
    projected: &ProjectedScenario,
    winner_keys: &[Option<(f64, CarId)>],
    car: &Car,
    slot: SlotId,
) -> Cost {
    let slack = car.time_limit - projected.reach(car.id, slot);
    if slack < 0.0 {
        return Cost::Infinite;
    }
    if let Some(winner) = winner_keys[slot.index()] {
        if winner < (car.resilience, car.id) {
            return Cost::Infinite;
        }
    }
    Cost::Finite(car.resilience * slack)
}

/// Scans every car and every alternative slot for a strictly improving
/// unilateral move; returns the first witness in (car, slot) order, or
/// `None` when the profile is deviation-stable.
pub fn find_improving_deviation(
    projected: &ProjectedScenario,
    profile: &StrategyProfile,
) -> Option<DeviationWitness> {
    let costs = profile_costs(projected, profile);
    let keys = slot_winner_keys(projected, |car| Some(profile.choice(car)));
    for car in projected.cars() {
        let current_slot = profile.choice(car.id);
        let current_cost = costs.get(car.id);
        for slot in projected.slot_ids() {
            if slot == current_slot {
                continue;
            }
            let deviated = deviated_cost(projected, &keys, car, slot);
            if deviated.total_cmp(&current_cost) == Ordering::Less {
                return Some(DeviationWitness {
                    car: car.id,
                    better_slot: slot,
                    current_cost,
                    deviated_cost: deviated,
                });
            }
        }
    }
    None
}

/// True when no car has a strictly improving unilateral deviation.
pub fn is_nash(projected: &ProjectedScenario, profile: &StrategyProfile) -> bool {
    find_improving_deviation(projected, profile).is_none()
}

/// Deviation scan over a (possibly partial) assignment: unparked cars pay an
/// infinite cost and may move to any slot, displacing only lower-priority
/// occupants. For fully parked allocations this agrees with
/// [`find_improving_deviation`] on the induced profile.
pub fn find_allocation_deviation(
    projected: &ProjectedScenario,
    allocation: &Allocation,
) -> Option<DeviationWitness> {
    assert_eq!(allocation.car_count(), projected.car_count());
    let keys = slot_winner_keys(projected, |car| allocation.slot_of(car));
    for car in projected.cars() {
        let current_cost = allocation.cost_of(car.id);
        for slot in projected.slot_ids() {
            if allocation.slot_of(car.id) == Some(slot) {
                continue;
            }
            let deviated = deviated_cost(projected, &keys, car, slot);
            if deviated.total_cmp(&current_cost) == Ordering::Less {
                return Some(DeviationWitness {
                    car: car.id,
                    better_slot: slot,
                    current_cost,
                    deviated_cost: deviated,
                });
            }
        }
    }
    None
}

/// Exhaustive search refused: the profile space is larger than the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("BudgetExceeded: search would evaluate {required} candidates, budget is {budget}")]
pub struct BudgetExceeded {
    pub required: u128,
    pub budget: u64,
}

/// Default evaluation budget for the exhaustive searches.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Enumerates every deviation-stable total profile in lexicographic order
/// (car 1's slot most significant), stopping after `limit` results.
///
/// Fails upfront with [`BudgetExceeded`] when `slots^cars` exceeds `budget`.
pub fn enumerate_nash(
    projected: &ProjectedScenario,
    limit: usize,
    budget: u64,
) -> Result<Vec<(StrategyProfile, CostVector)>, BudgetExceeded> {
    let n = projected.car_count();
    let m = projected.slot_count();
    let required = (m as u128).saturating_pow(n as u32);
    if required > u128::from(budget) {
        return Err(BudgetExceeded {
            required,
            budget,
        });
    }
    let mut found = Vec::new();
    if limit == 0 {
        return Ok(found);
    }
    if n == 0 {
        let empty = StrategyProfile::new(vec![]);
        let costs = profile_costs(projected, &empty);
        found.push((empty, costs));
        return Ok(found);
    }
    if m == 0 {
        return Ok(found);
    }
    let mut digits = vec![0usize; n];
    'profiles: loop {
        let profile = StrategyProfile::new(digits.iter().map(|&d| SlotId::from_index(d)).collect());
        if is_nash(projected, &profile) {
            let costs = profile_costs(projected, &profile);
            found.push((profile, costs));
            if found.len() >= limit {
                break;
            }
        }
        // next profile: increment the least significant digit (the last car)
        let mut i = n;
        loop {
            if i == 0 {
                break 'profiles;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < m {
                break;
            }
            digits[i] = 0;
        }
    }
    Ok(found)
}

/// Best injective partial assignment found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialOptimum {
    /// Chosen slot per car, in car order; only in-time placements are used.
    pub assignment: Vec<Option<SlotId>>,
    pub parked_count: usize,
    pub finite_sum: f64,
}

/// Searches every injective partial assignment of reachable slots for the one
/// that parks the most cars and, among those, has the smallest finite cost
/// sum. Ties resolve to the lexicographically smallest assignment (comparing
/// car by car in input order, unassigned after every slot id).
///
/// Fails upfront with [`BudgetExceeded`] when `(slots + 1)^cars` exceeds
/// `budget`.
pub fn social_optimum(
    projected: &ProjectedScenario,
    budget: u64,
) -> Result<SocialOptimum, BudgetExceeded> {
    let n = projected.car_count();
    let m = projected.slot_count();
    let required = (m as u128 + 1).saturating_pow(n as u32);
    if required > u128::from(budget) {
        return Err(BudgetExceeded {
            required,
            budget,
        });
    }

    struct Search<'a> {
        projected: &'a ProjectedScenario,
        used: Vec<bool>,
        current: Vec<Option<SlotId>>,
        best: Option<(usize, f64, Vec<Option<SlotId>>)>,
    }

    impl Search<'_> {
        fn run(&mut self, car_index: usize, parked: usize, sum: f64) {
            if car_index == self.current.len() {
                let better = match &self.best {
                    None => true,
                    Some((best_parked, best_sum, _)) => {
                        parked > *best_parked || (parked == *best_parked && sum < *best_sum)
                    }
                };
                if better {
                    self.best = Some((parked, sum, self.current.clone()));
                }
                return;
            }
            let car = CarId::from_index(car_index);
            let limit = self.projected.car(car).time_limit;
            let resilience = self.projected.car(car).resilience;
            // slots in ascending id order, then the unassigned branch: with
            // strict improvement above, the first best is lexicographically
            // smallest
            for slot in self.projected.slot_ids() {
                if self.used[slot.index()] {
                    continue;
                }
                let slack = limit - self.projected.reach(car, slot);
                if slack < 0.0 {
                    continue;
                }
                self.used[slot.index()] = true;
                self.current[car_index] = Some(slot);
                self.run(car_index + 1, parked + 1, sum + resilience * slack);
                self.current[car_index] = None;
                self.used[slot.index()] = false;
            }
            self.run(car_index + 1, parked, sum);
        }
    }

    let mut search = Search {
        projected,
        used: vec![false; m],
        current: vec![None; n],
        best: None,
    };
    search.run(0, 0, 0.0);
    let (parked_count, finite_sum, assignment) = search.best.expect("search visits at least one leaf");
    Ok(SocialOptimum {
        assignment,
        parked_count,
        finite_sum,
    })
}
