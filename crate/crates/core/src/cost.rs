//! Parking costs: finite residual-time costs and the infinite overstay or
//! pre-emption case.
//!
//! A parked car pays `resilience * (time_limit - reach)` — the weighted slack
//! it leaves on the table. A car that cannot reach its slot within its limit,
//! or that contends for a slot also chosen by a higher-priority car able to
//! reach it in time, pays [`Cost::Infinite`].

use std::cmp::Ordering;
use std::fmt;

use crate::model::{priority_cmp, CarId, SlotId, StrategyProfile};
use crate::projection::ProjectedScenario;

/// A car's parking cost: finite weighted slack, or infinite when the car
/// overstays or is pre-empted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cost {
    Finite(f64),
    Infinite,
}

impl Cost {
    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }

    /// Total order with `Infinite` above every finite cost.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.total_cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

/// Cost of `car` on `slot` ignoring competition: finite weighted slack when
/// the slot is reachable within the car's limit, otherwise infinite.
pub fn residual_cost(projected: &ProjectedScenario, car: CarId, slot: SlotId) -> Cost {
    let c = projected.car(car);
    let slack = c.time_limit - projected.reach(car, slot);
    if slack >= 0.0 {
        Cost::Finite(c.resilience * slack)
    } else {
        Cost::Infinite
    }
}

/// Costs of every car under a total strategy profile.
///
/// Exactly the cars that win their chosen slot pay a finite cost: the winner
/// of a slot is the highest-priority chooser that reaches it in time, so at
/// most one car per slot parks, and a car that overstays never parks.
pub fn profile_costs(projected: &ProjectedScenario, profile: &StrategyProfile) -> CostVector {
    assert_eq!(
        profile.len(),
        projected.car_count(),
        "profile must choose a slot for every car"
    );
    let mut winner: Vec<Option<CarId>> = vec![None; projected.slot_count()];
    for car in projected.cars() {
        let slot = profile.choice(car.id);
        if car.time_limit - projected.reach(car.id, slot) < 0.0 {
            continue;
        }
        let cell = &mut winner[slot.index()];
        match *cell {
            None => *cell = Some(car.id),
            Some(current) => {
                if priority_cmp(car, projected.car(current)) == Ordering::Less {
                    *cell = Some(car.id);
                }
            }
        }
    }
    let costs = projected
        .cars()
        .iter()
        .map(|car| {
            let slot = profile.choice(car.id);
            if winner[slot.index()] == Some(car.id) {
                Cost::Finite(car.resilience * (car.time_limit - projected.reach(car.id, slot)))
            } else {
                Cost::Infinite
            }
        })
        .collect();
    CostVector::new(costs)
}

/// Per-car costs in car order.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    costs: Vec<Cost>,
}

impl CostVector {
    pub fn new(costs: Vec<Cost>) -> Self {
        Self { costs }
    }

    pub fn get(&self, car: CarId) -> Cost {
        self.costs[car.index()]
    }

    pub fn costs(&self) -> &[Cost] {
        &self.costs
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// Aggregates the vector: cars parked at finite cost, their cost sum, and
    /// whether any car ended up with an infinite cost.
    pub fn payoff(&self) -> PayoffSummary {
        let mut parked_count = 0;
        let mut finite_sum = 0.0;
        let mut has_infinite = false;
        for cost in &self.costs {
            match cost {
                Cost::Finite(v) => {
                    parked_count += 1;
                    finite_sum += v;
                }
                Cost::Infinite => has_infinite = true,
            }
        }
        PayoffSummary {
            parked_count,
            finite_sum,
            has_infinite,
        }
    }
}

/// Aggregate view of a [`CostVector`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffSummary {
    pub parked_count: usize,
    pub finite_sum: f64,
    pub has_infinite: bool,
}
