//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with its measured evidence. Run with `--nocapture` to see the lines.

use std::time::Instant;

use parkgame::experiments::{bench, doubling_schedule, loglog_slope, measure_point};
use parkgame::json::{
    allocation_to_string, compare_summary_value, scenario_from_str, scenario_to_string,
    to_canonical_string,
};
use parkgame::{
    enumerate_nash, find_allocation_deviation, find_improving_deviation, generate,
    greedy_allocate, is_nash, nash_allocate, Allocation, AllocationConfig, CarId, Cost, GenSpec,
    ProjectedScenario, Scenario, SlotId, SplitMix64, StrategyProfile, DEFAULT_BUDGET,
};

const TOL: f64 = 1e-12;

/// Three cars, one gate, three slots: limits 5/2/4, resilience .5/.1/.009,
/// reaching times 2/3/4.
fn three_car_example() -> ProjectedScenario {
    let scenario = Scenario::single_gate(
        &[(5.0, 0.5), (2.0, 0.1), (4.0, 0.009)],
        &[2.0, 3.0, 4.0],
    );
    ProjectedScenario::project(&scenario).unwrap()
}

/// Three cars, one gate, three slots: limits 7/5/3, resilience .1/.2/.3,
/// reaching times 2/3/5. Greedy strands the last car here.
fn motivating_example() -> ProjectedScenario {
    let scenario = Scenario::single_gate(
        &[(7.0, 0.1), (5.0, 0.2), (3.0, 0.3)],
        &[2.0, 3.0, 5.0],
    );
    ProjectedScenario::project(&scenario).unwrap()
}

fn slots(allocation: &Allocation) -> Vec<Option<u32>> {
    (0..allocation.car_count())
        .map(|i| allocation.slot_of(CarId::from_index(i)).map(SlotId::get))
        .collect()
}

fn assert_cost(actual: Cost, expected: f64) {
    match actual {
        Cost::Finite(value) => {
            assert!(
                expected.is_finite() && (value - expected).abs() <= TOL,
                "cost {value} differs from expected {expected}"
            );
        }
        Cost::Infinite => assert!(
            expected.is_infinite(),
            "cost is infinite, expected {expected}"
        ),
    }
}

/// Meta-seeded stream of small generated instances.
fn random_instances(
    meta_seed: u64,
    count: usize,
    max_cars: usize,
    max_slots: usize,
) -> impl Iterator<Item = (GenSpec, ProjectedScenario)> {
    let mut meta = SplitMix64::new(meta_seed);
    (0..count).map(move |_| {
        let spec = GenSpec::new(
            (meta.next_u64() % (max_cars as u64 + 1)) as usize,
            (meta.next_u64() % (max_slots as u64 + 1)) as usize,
            1 + (meta.next_u64() % 3) as usize,
            meta.next_u64(),
        );
        let scenario = generate(&spec).unwrap();
        let projected = ProjectedScenario::project(&scenario).unwrap();
        (spec, projected)
    })
}

#[test]
fn c1_three_car_example_reaches_the_known_stable_outcome() {
    let projected = three_car_example();
    let start = Instant::now();
    let allocation = nash_allocate(&projected, &AllocationConfig::default());
    let elapsed = start.elapsed();
    assert_eq!(slots(&allocation), vec![Some(2), Some(1), Some(3)]);
    assert_cost(allocation.cost_of(CarId::new(1)), 1.0);
    assert_cost(allocation.cost_of(CarId::new(2)), 0.0);
    assert_cost(allocation.cost_of(CarId::new(3)), 0.0);
    assert!(allocation.is_fully_parked());
    assert!(
        elapsed.as_secs_f64() < 0.001,
        "allocation took {elapsed:?}, expected under 1ms"
    );
    println!(
        "PASS c1 three-car example: slots (s2, s1, s3), costs (1, 0, 0), solved in {:.1?}",
        elapsed
    );
}

#[test]
fn c2_full_cost_table_of_the_three_car_example() {
    const INF: f64 = f64::INFINITY;
    // expected[c1][c3][c2] = (car1, car2, car3) costs, slots indexed s1..s3
    #[rustfmt::skip]
    const EXPECTED: [[[(f64, f64, f64); 3]; 3]; 3] = [
        [ // car1 on s1
            [(INF, INF, 0.018), (INF, INF, 0.018), (INF, INF, 0.018)], // car3 on s1
            [(INF, 0.0, 0.009), (1.5, INF, 0.009), (1.5, INF, 0.009)], // car3 on s2
            [(INF, 0.0, 0.0),   (1.5, INF, 0.0),   (1.5, INF, 0.0)],   // car3 on s3
        ],
        [ // car1 on s2
            [(1.0, INF, 0.018), (1.0, INF, 0.018), (1.0, INF, 0.018)],
            [(INF, 0.0, 0.009), (INF, INF, 0.009), (INF, INF, 0.009)],
            [(1.0, 0.0, 0.0),   (1.0, INF, 0.0),   (1.0, INF, 0.0)],
        ],
        [ // car1 on s3
            [(0.5, INF, 0.018), (0.5, INF, 0.018), (0.5, INF, 0.018)],
            [(0.5, 0.0, 0.009), (0.5, INF, 0.009), (0.5, INF, 0.009)],
            [(INF, 0.0, 0.0),   (INF, INF, 0.0),   (INF, INF, 0.0)],
        ],
    ];
    let projected = three_car_example();
    for (c1, by_car3) in EXPECTED.iter().enumerate() {
        for (c3, by_car2) in by_car3.iter().enumerate() {
            for (c2, &(e1, e2, e3)) in by_car2.iter().enumerate() {
                let profile = StrategyProfile::new(vec![
                    SlotId::from_index(c1),
                    SlotId::from_index(c2),
                    SlotId::from_index(c3),
                ]);
                let costs = parkgame::profile_costs(&projected, &profile);
                assert_cost(costs.get(CarId::new(1)), e1);
                assert_cost(costs.get(CarId::new(2)), e2);
                assert_cost(costs.get(CarId::new(3)), e3);
            }
        }
    }
    println!("PASS c2 cost table: all 27 slot triples match the hand-computed costs");
}

#[test]
fn c3_three_car_example_has_a_unique_stable_profile() {
    let projected = three_car_example();
    let found = enumerate_nash(&projected, usize::MAX, DEFAULT_BUDGET).unwrap();
    assert_eq!(found.len(), 1, "expected exactly one stable profile");
    let (profile, costs) = &found[0];
    assert_eq!(
        profile.choices(),
        &[SlotId::new(2), SlotId::new(1), SlotId::new(3)]
    );
    assert_cost(costs.get(CarId::new(1)), 1.0);
    assert_cost(costs.get(CarId::new(2)), 0.0);
    assert_cost(costs.get(CarId::new(3)), 0.0);
    assert!(is_nash(&projected, profile));
    println!("PASS c3 enumeration: (s2, s1, s3) is the unique stable profile of 27 candidates");
}

#[test]
fn c4_priority_beats_greedy_on_the_motivating_example() {
    let projected = motivating_example();
    let nash = nash_allocate(&projected, &AllocationConfig::default());
    assert_eq!(slots(&nash), vec![Some(3), Some(2), Some(1)]);
    assert_eq!(nash.parked_count(), 3);
    let greedy = greedy_allocate(&projected, &AllocationConfig::default());
    assert_eq!(slots(&greedy), vec![Some(1), Some(2), None]);
    assert_eq!(greedy.parked_count(), 2);
    println!("PASS c4 motivating example: priority parks 3/3 where greedy parks 2/3");
}

#[test]
fn c5_random_instances_admit_no_improving_deviation() {
    let start = Instant::now();
    let count = 1200;
    let mut fully_parked = 0;
    for (_, projected) in random_instances(0xA5, count, 6, 6) {
        let allocation = nash_allocate(&projected, &AllocationConfig::default());
        assert_eq!(
            find_allocation_deviation(&projected, &allocation),
            None,
            "deviation found on a generated instance"
        );
        if allocation.is_fully_parked() && projected.slot_count() > 0 {
            let profile = allocation.to_profile(SlotId::new(1));
            assert_eq!(find_improving_deviation(&projected, &profile), None);
            fully_parked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "scan took {elapsed:?}");
    println!(
        "PASS c5 deviation scan: {count} generated instances stable \
         ({fully_parked} fully parked), checked in {elapsed:.1?}"
    );
}

#[test]
fn c6_allocator_invariants_hold_on_random_instances() {
    let count = 1200;
    for (spec, projected) in random_instances(0xBEEF, count, 6, 6) {
        let config = AllocationConfig::default();
        let nash = nash_allocate(&projected, &config);
        let greedy = greedy_allocate(&projected, &config);

        for allocation in [&nash, &greedy] {
            // slots are pairwise distinct, in reach, and priced consistently
            let mut used = vec![false; projected.slot_count()];
            for (car, slot) in allocation.assigned_pairs() {
                assert!(!used[slot.index()], "slot reused");
                used[slot.index()] = true;
                let slack = projected.car(car).time_limit - projected.reach(car, slot);
                assert!(slack >= 0.0, "assigned slot out of reach");
                assert_cost(
                    allocation.cost_of(car),
                    projected.car(car).resilience * slack,
                );
            }
            for car in allocation.unparked() {
                assert_eq!(allocation.cost_of(car), Cost::Infinite);
            }
        }

        // reruns are bit-identical
        assert_eq!(nash, nash_allocate(&projected, &config));
        assert_eq!(greedy, greedy_allocate(&projected, &config));

        // greedy really takes the nearest remaining reachable slot
        let mut available = vec![true; projected.slot_count()];
        for car in projected.cars() {
            let nearest = projected
                .slot_ids()
                .filter(|s| available[s.index()])
                .filter(|&s| projected.car(car.id).time_limit - projected.reach(car.id, s) >= 0.0)
                .min_by(|&a, &b| {
                    projected
                        .reach(car.id, a)
                        .total_cmp(&projected.reach(car.id, b))
                        .then(a.cmp(&b))
                });
            assert_eq!(greedy.slot_of(car.id), nearest);
            if let Some(slot) = nearest {
                available[slot.index()] = false;
            }
        }

        // only resilience ranks matter: remapping values preserves assignments
        let scenario = generate(&spec).unwrap();
        let mut order: Vec<usize> = (0..scenario.cars.len()).collect();
        order.sort_by(|&a, &b| {
            scenario.cars[a]
                .resilience
                .total_cmp(&scenario.cars[b].resilience)
        });
        let mut remapped = scenario.clone();
        for (rank, &i) in order.iter().enumerate() {
            remapped.cars[i].resilience = (rank + 1) as f64 / (scenario.cars.len() + 1) as f64;
        }
        let reprojected = ProjectedScenario::project(&remapped).unwrap();
        assert_eq!(slots(&nash), slots(&nash_allocate(&reprojected, &config)));
        assert_eq!(slots(&greedy), slots(&greedy_allocate(&reprojected, &config)));
    }
    println!("PASS c6 invariants: {count} generated instances satisfy every allocator invariant");
}

#[test]
fn c7_priority_parks_at_least_as_many_cars() {
    let runs = 100;
    let mut meta = SplitMix64::new(0xC0FFEE);
    let mut nash_total = 0usize;
    let mut greedy_total = 0usize;
    let mut nash_at_least = 0usize;
    let mut histogram = std::collections::BTreeMap::<i64, usize>::new();
    for _ in 0..runs {
        let size = 3 + (meta.next_u64() % 10) as usize; // n = m in 3..=12
        let spec = GenSpec::new(size, size, 1, meta.next_u64());
        let projected =
            ProjectedScenario::project(&generate(&spec).unwrap()).unwrap();
        let config = AllocationConfig::default();
        let nash = nash_allocate(&projected, &config).parked_count();
        let greedy = greedy_allocate(&projected, &config).parked_count();
        nash_total += nash;
        greedy_total += greedy;
        if nash >= greedy {
            nash_at_least += 1;
        }
        *histogram.entry(nash as i64 - greedy as i64).or_insert(0) += 1;
    }
    let mean_nash = nash_total as f64 / runs as f64;
    let mean_greedy = greedy_total as f64 / runs as f64;
    assert!(
        mean_nash >= mean_greedy,
        "mean parked: priority {mean_nash} vs greedy {mean_greedy}"
    );
    assert!(
        nash_at_least >= 80,
        "priority parked at least as many in only {nash_at_least}/{runs} runs"
    );
    let histogram_line: Vec<String> = histogram
        .iter()
        .map(|(diff, count)| format!("{diff:+}:{count}"))
        .collect();
    println!(
        "PASS c7 parked advantage: mean {mean_nash:.2} vs {mean_greedy:.2}, \
         at-least-as-many in {nash_at_least}/{runs} runs, diff histogram {}",
        histogram_line.join(" ")
    );
}

#[test]
fn c8_allocation_scales_near_quadratically() {
    // fixed 4600 slots, car counts doubling 200 -> 51200
    let schedule = doubling_schedule(200, 8);
    assert_eq!(*schedule.last().unwrap(), 51200);
    let report = bench(4600, &schedule, 0x5CA1E, 1).unwrap();
    assert_eq!(report.points.len(), 9);
    let mut sweep = String::new();
    for point in &report.points {
        assert!(point.seconds.is_finite());
        sweep.push_str(&format!(" {}:{:.3}s", point.cars, point.seconds));
    }
    let largest = report.points.last().unwrap();
    assert!(
        largest.seconds < 120.0,
        "51200 cars took {:.1}s, expected under 120s",
        largest.seconds
    );

    // growth exponent measured on square instances (cars = slots)
    let mut square_points = Vec::new();
    for (i, &size) in [500usize, 1000, 2000, 4000].iter().enumerate() {
        let point = measure_point(size, size, 0x4242 + i as u64, 3).unwrap();
        square_points.push((size as f64, point.seconds));
    }
    let slope = loglog_slope(&square_points).expect("slope defined");
    assert!(slope <= 2.5, "log-log slope {slope:.2} exceeds 2.5");
    println!(
        "PASS c8 scaling: 4600 slots swept{sweep}; square-instance slope {slope:.2} <= 2.5"
    );
}

#[test]
fn c9_output_bytes_are_deterministic() {
    // the generated instance file is byte-stable and survives a round trip
    let spec = GenSpec::new(8, 6, 2, 42);
    let text = scenario_to_string(&generate(&spec).unwrap());
    assert_eq!(text, scenario_to_string(&generate(&spec).unwrap()));
    let reparsed = scenario_from_str(&text).unwrap();
    assert_eq!(scenario_to_string(&reparsed), text);

    // allocation documents are byte-stable too
    let projected = ProjectedScenario::project(&reparsed).unwrap();
    let allocation = nash_allocate(&projected, &AllocationConfig::default());
    let doc = allocation_to_string(&projected, &allocation);
    let again = allocation_to_string(
        &projected,
        &nash_allocate(&projected, &AllocationConfig::default()),
    );
    assert_eq!(doc, again);

    // comparison outputs (CSV and summary) are byte-stable across reruns
    let template = GenSpec::new(6, 5, 1, 0);
    let report = parkgame::experiments::compare(20, &template, 77).unwrap();
    let rerun = parkgame::experiments::compare(20, &template, 77).unwrap();
    assert_eq!(
        parkgame::experiments::compare_csv(&report),
        parkgame::experiments::compare_csv(&rerun)
    );
    assert_eq!(
        to_canonical_string(&compare_summary_value(&report)),
        to_canonical_string(&compare_summary_value(&rerun))
    );
    println!("PASS c9 determinism: instance, allocation, and comparison outputs are byte-identical across reruns");
}
