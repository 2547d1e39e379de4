//! Shared unit-test fixtures and proptest strategies.

use proptest::prelude::*;

use crate::model::{Car, CarId, GateId, ReachMatrix, Scenario, SlotId, StrategyProfile};
use crate::projection::ProjectedScenario;

/// Three cars, one gate, three slots; the walkthrough instance used across
/// the test suite. Unique stable outcome: (s2, s1, s3) with costs (1, 0, 0).
pub(crate) fn toy() -> Scenario {
    Scenario::single_gate(&[(5.0, 0.5), (2.0, 0.1), (4.0, 0.009)], &[2.0, 3.0, 4.0])
}

pub(crate) fn toy_projected() -> ProjectedScenario {
    ProjectedScenario::project(&toy()).unwrap()
}

/// The three-car motivating instance: greedy arrival order parks 2 of 3,
/// the priority allocator parks all 3.
pub(crate) fn intro() -> Scenario {
    Scenario::single_gate(&[(7.0, 0.1), (5.0, 0.2), (3.0, 0.3)], &[2.0, 3.0, 5.0])
}

pub(crate) fn intro_projected() -> ProjectedScenario {
    ProjectedScenario::project(&intro()).unwrap()
}

/// Builds an instance where car `i` has its own gate and `reach_rows[i]` is
/// that car's reach vector; this reaches every projected configuration.
pub(crate) fn per_car_scenario(times: &[f64], resilience: &[f64], reach_rows: &[Vec<f64>]) -> Scenario {
    assert_eq!(times.len(), resilience.len());
    assert_eq!(times.len(), reach_rows.len());
    let n = times.len();
    let m = reach_rows.first().map_or(0, Vec::len);
    let cars = (0..n)
        .map(|i| Car {
            id: CarId::from_index(i),
            label: format!("c{}", i + 1),
            gate: GateId::from_index(i),
            time_limit: times[i],
            resilience: resilience[i],
        })
        .collect();
    let mut entries = Vec::with_capacity(n * m);
    for slot in 0..m {
        for row in reach_rows {
            assert_eq!(row.len(), m);
            entries.push(row[slot]);
        }
    }
    Scenario {
        cars,
        slot_names: (1..=m).map(|j| format!("s{j}")).collect(),
        gate_names: (1..=n.max(1)).map(|h| format!("g{h}")).collect(),
        reach: ReachMatrix::from_slot_major(m, n.max(1), if n == 0 { vec![0.0; m] } else { entries }),
    }
}

pub(crate) fn per_car_projected(
    times: &[f64],
    resilience: &[f64],
    reach_rows: &[Vec<f64>],
) -> ProjectedScenario {
    ProjectedScenario::project(&per_car_scenario(times, resilience, reach_rows)).unwrap()
}

/// Strategy for small valid projected instances with per-car reach vectors.
pub(crate) fn arb_projected() -> impl Strategy<Value = ProjectedScenario> {
    (1usize..=5, 1usize..=4).prop_flat_map(|(n, m)| {
        let times = prop::collection::vec(0u32..=12u32, n);
        let rows = prop::collection::vec(prop::collection::vec(0u32..=10u32, m), n);
        let res = prop::collection::vec(1u32..=1_000_000u32, n).prop_filter(
            "resilience values must be pairwise distinct",
            |v| {
                let mut sorted = v.clone();
                sorted.sort_unstable();
                sorted.dedup();
                sorted.len() == v.len()
            },
        );
        (times, rows, res).prop_map(|(times, rows, res)| {
            let times: Vec<f64> = times.into_iter().map(f64::from).collect();
            let res: Vec<f64> = res.into_iter().map(|r| f64::from(r) / 1e6).collect();
            let rows: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|row| row.into_iter().map(f64::from).collect())
                .collect();
            per_car_projected(&times, &res, &rows)
        })
    })
}

/// Strategy pairing an instance with a total strategy profile over it.
pub(crate) fn arb_projected_and_profile() -> impl Strategy<Value = (ProjectedScenario, StrategyProfile)>
{
    arb_projected().prop_flat_map(|projected| {
        let n = projected.car_count();
        let m = projected.slot_count();
        prop::collection::vec(0usize..m, n)
            .prop_map(move |choices| {
                let profile =
                    StrategyProfile::new(choices.into_iter().map(SlotId::from_index).collect());
                (projected.clone(), profile)
            })
    })
}
