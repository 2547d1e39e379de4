//! Canonical JSON for instances, allocations, and experiment reports.
//!
//! Output is byte-deterministic: object keys are sorted, floats are rounded
//! to 12 significant digits before serialization, and every document ends
//! with a newline. Infinite costs serialize as the string `"inf"`.

use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;
use serde_json::{json, Map, Number, Value};

use crate::allocation::Allocation;
use crate::cost::{Cost, CostVector};
use crate::experiments::{BenchReport, ComparisonReport};
use crate::model::{
    Car, CarId, GateId, ReachMatrix, Scenario, SlotId, StrategyProfile, ValidationError,
};
use crate::projection::ProjectedScenario;
use crate::stages::StagedAllocation;

/// Why a document could not be read or mapped onto an instance.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("Json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("DuplicateId: {kind} {id} appears more than once")]
    DuplicateId { kind: &'static str, id: String },
    #[error("UnknownId: {kind} {id} is not declared")]
    UnknownId { kind: &'static str, id: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("DuplicateCarEntry: car {car} is listed more than once")]
    DuplicateCarEntry { car: String },
    #[error("MissingCarEntry: car {car} is missing from the allocation")]
    MissingCarEntry { car: String },
    #[error("SlotReused: slot {slot} is assigned to more than one car")]
    SlotReused { slot: String },
}

/// Rounds to 12 significant decimal digits; zero and non-finite pass through.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("scientific notation round-trips")
}

/// Renders a value canonically: sorted keys, floats rounded to 12 significant
/// digits, two-space pretty printing, and a trailing newline.
pub fn to_canonical_string(value: &Value) -> String {
    let rounded = round_floats(value.clone());
    let mut text = serde_json::to_string_pretty(&rounded).expect("value serializes");
    text.push('\n');
    text
}

fn round_floats(value: Value) -> Value {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let x = round_sig12(n.as_f64().expect("f64 number"));
                Value::Number(Number::from_f64(x).expect("finite float"))
            } else {
                Value::Number(n)
            }
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

fn cost_value(cost: Cost) -> Value {
    match cost {
        Cost::Finite(value) => json!(value),
        Cost::Infinite => json!("inf"),
    }
}

/// Builds the instance document: gate labels, slots with per-gate reaching
/// times, and cars in input order.
pub fn scenario_to_value(scenario: &Scenario) -> Value {
    let slots: Vec<Value> = scenario
        .slot_ids()
        .map(|slot| {
            let reach: Map<String, Value> = scenario
                .gate_names
                .iter()
                .enumerate()
                .map(|(g, name)| {
                    let value = scenario.reach.get(slot, GateId::from_index(g));
                    (name.clone(), json!(value))
                })
                .collect();
            json!({ "id": scenario.slot_name(slot), "reach": reach })
        })
        .collect();
    let cars: Vec<Value> = scenario
        .cars
        .iter()
        .map(|car| {
            json!({
                "id": car.label,
                "gate": scenario.gate_names[car.gate.index()],
                "time_limit": car.time_limit,
                "resilience": car.resilience,
            })
        })
        .collect();
    json!({ "gates": scenario.gate_names, "slots": slots, "cars": cars })
}

pub fn scenario_to_string(scenario: &Scenario) -> String {
    to_canonical_string(&scenario_to_value(scenario))
}

#[derive(Deserialize)]
struct ScenarioDoc {
    gates: Vec<String>,
    slots: Vec<SlotDoc>,
    cars: Vec<CarDoc>,
}

#[derive(Deserialize)]
struct SlotDoc {
    id: String,
    reach: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct CarDoc {
    id: String,
    gate: String,
    time_limit: f64,
    resilience: f64,
}

fn index_labels<'a>(
    kind: &'static str,
    labels: impl Iterator<Item = &'a str>,
) -> Result<HashMap<&'a str, usize>, FormatError> {
    let mut index = HashMap::new();
    for (i, label) in labels.enumerate() {
        if index.insert(label, i).is_some() {
            return Err(FormatError::DuplicateId {
                kind,
                id: label.to_string(),
            });
        }
    }
    Ok(index)
}

/// Parses an instance document.
///
/// Enforces unique labels and complete reach rows; numeric invariants (time
/// signs, resilience range and distinctness) are checked later when the
/// scenario is projected.
pub fn scenario_from_str(text: &str) -> Result<Scenario, FormatError> {
    let doc: ScenarioDoc = serde_json::from_str(text)?;
    let gate_index = index_labels("gate", doc.gates.iter().map(String::as_str))?;
    index_labels("slot", doc.slots.iter().map(|s| s.id.as_str()))?;
    index_labels("car", doc.cars.iter().map(|c| c.id.as_str()))?;

    let mut entries = Vec::with_capacity(doc.slots.len() * doc.gates.len());
    for slot in &doc.slots {
        for key in slot.reach.keys() {
            if !gate_index.contains_key(key.as_str()) {
                return Err(FormatError::UnknownId {
                    kind: "gate",
                    id: key.clone(),
                });
            }
        }
        for gate in &doc.gates {
            match slot.reach.get(gate) {
                Some(&value) => entries.push(value),
                None => {
                    return Err(ValidationError::MissingReachEntry {
                        slot: slot.id.clone(),
                        gate: gate.clone(),
                    }
                    .into())
                }
            }
        }
    }

    let cars = doc
        .cars
        .iter()
        .enumerate()
        .map(|(i, car)| {
            let gate = *gate_index
                .get(car.gate.as_str())
                .ok_or_else(|| FormatError::UnknownId {
                    kind: "gate",
                    id: car.gate.clone(),
                })?;
            Ok(Car {
                id: CarId::from_index(i),
                label: car.id.clone(),
                gate: GateId::from_index(gate),
                time_limit: car.time_limit,
                resilience: car.resilience,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;

    let reach = ReachMatrix::from_slot_major(doc.slots.len(), doc.gates.len(), entries);
    Ok(Scenario {
        cars,
        slot_names: doc.slots.into_iter().map(|s| s.id).collect(),
        gate_names: doc.gates,
        reach,
    })
}

/// Builds the allocation document: per-car assignments with costs, unparked
/// cars, and the two summary totals.
pub fn allocation_to_value(projected: &ProjectedScenario, allocation: &Allocation) -> Value {
    let assignments: Vec<Value> = allocation
        .assigned_pairs()
        .map(|(car, slot)| {
            json!({
                "car": projected.car(car).label,
                "slot": projected.slot_name(slot),
                "cost": cost_value(allocation.cost_of(car)),
            })
        })
        .collect();
    let unparked: Vec<&str> = allocation
        .unparked()
        .map(|car| projected.car(car).label.as_str())
        .collect();
    json!({
        "assignments": assignments,
        "unparked": unparked,
        "parked_count": allocation.parked_count(),
        "finite_cost_sum": allocation.finite_cost_sum(),
    })
}

pub fn allocation_to_string(projected: &ProjectedScenario, allocation: &Allocation) -> String {
    to_canonical_string(&allocation_to_value(projected, allocation))
}

#[derive(Deserialize)]
struct AllocationDoc {
    assignments: Vec<AssignmentDoc>,
    unparked: Vec<String>,
}

#[derive(Deserialize)]
struct AssignmentDoc {
    car: String,
    slot: String,
}

/// Parses an allocation document against its instance.
///
/// Every car must appear exactly once across assignments and the unparked
/// list, and no slot may be assigned twice. Costs and totals in the document
/// are ignored; they are recomputed from the instance.
pub fn allocation_from_str(
    text: &str,
    projected: &ProjectedScenario,
) -> Result<Allocation, FormatError> {
    let doc: AllocationDoc = serde_json::from_str(text)?;
    let car_index: HashMap<&str, CarId> = projected
        .cars()
        .iter()
        .map(|car| (car.label.as_str(), car.id))
        .collect();
    let slot_index: HashMap<&str, SlotId> = projected
        .slot_names()
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), SlotId::from_index(i)))
        .collect();

    let mut assigned: Vec<Option<SlotId>> = vec![None; projected.car_count()];
    let mut seen = vec![false; projected.car_count()];
    let mut taken = vec![false; projected.slot_count()];
    let mark = |label: &str, seen: &mut Vec<bool>| -> Result<CarId, FormatError> {
        let car = *car_index.get(label).ok_or_else(|| FormatError::UnknownId {
            kind: "car",
            id: label.to_string(),
        })?;
        if seen[car.index()] {
            return Err(FormatError::DuplicateCarEntry {
                car: label.to_string(),
            });
        }
        seen[car.index()] = true;
        Ok(car)
    };

    for entry in &doc.assignments {
        let car = mark(&entry.car, &mut seen)?;
        let slot = *slot_index
            .get(entry.slot.as_str())
            .ok_or_else(|| FormatError::UnknownId {
                kind: "slot",
                id: entry.slot.clone(),
            })?;
        if taken[slot.index()] {
            return Err(FormatError::SlotReused {
                slot: entry.slot.clone(),
            });
        }
        taken[slot.index()] = true;
        assigned[car.index()] = Some(slot);
    }
    for label in &doc.unparked {
        mark(label, &mut seen)?;
    }
    if let Some(i) = seen.iter().position(|&s| !s) {
        return Err(FormatError::MissingCarEntry {
            car: projected.car(CarId::from_index(i)).label.clone(),
        });
    }
    Ok(Allocation::from_assignment(projected, assigned))
}

/// Builds the staged document: one entry per batch plus the combined result.
pub fn staged_to_value(projected: &ProjectedScenario, staged: &StagedAllocation) -> Value {
    let stages: Vec<Value> = staged
        .batches()
        .iter()
        .map(|batch| {
            let cars: Vec<&str> = batch
                .iter()
                .map(|&car| projected.car(car).label.as_str())
                .collect();
            let assignments: Vec<Value> = batch
                .iter()
                .filter_map(|&car| {
                    staged.combined().slot_of(car).map(|slot| {
                        json!({
                            "car": projected.car(car).label,
                            "slot": projected.slot_name(slot),
                            "cost": cost_value(staged.combined().cost_of(car)),
                        })
                    })
                })
                .collect();
            let unparked: Vec<&str> = batch
                .iter()
                .filter(|&&car| staged.combined().slot_of(car).is_none())
                .map(|&car| projected.car(car).label.as_str())
                .collect();
            json!({ "cars": cars, "assignments": assignments, "unparked": unparked })
        })
        .collect();
    json!({
        "stages": stages,
        "combined": allocation_to_value(projected, staged.combined()),
    })
}

/// Builds the equilibria document: each profile lists one slot label per car
/// in car order, with the matching cost vector.
pub fn equilibria_to_value(
    projected: &ProjectedScenario,
    equilibria: &[(StrategyProfile, CostVector)],
) -> Value {
    let items: Vec<Value> = equilibria
        .iter()
        .map(|(profile, costs)| {
            let slots: Vec<&str> = profile
                .choices()
                .iter()
                .map(|&slot| projected.slot_name(slot))
                .collect();
            let costs: Vec<Value> = costs.costs().iter().map(|&cost| cost_value(cost)).collect();
            json!({ "profile": slots, "costs": costs })
        })
        .collect();
    json!({ "count": equilibria.len(), "equilibria": items })
}

/// Builds the comparison summary: means, win counts, share, and the
/// parked-difference histogram keyed by the signed difference.
pub fn compare_summary_value(report: &ComparisonReport) -> Value {
    let histogram: Map<String, Value> = report
        .parked_diff_histogram()
        .into_iter()
        .map(|(diff, count)| (diff.to_string(), json!(count)))
        .collect();
    json!({
        "runs": report.run_count(),
        "mean_parked": {
            "pssg": report.mean_nash_parked(),
            "gpg": report.mean_greedy_parked(),
        },
        "wins": {
            "pssg": report.nash_better(),
            "tie": report.tied(),
            "gpg": report.greedy_better(),
        },
        "pssg_at_least_share": report.nash_at_least_share(),
        "diff_histogram": histogram,
    })
}

/// Builds the benchmark summary: every timed point and the fitted slope.
pub fn bench_summary_value(report: &BenchReport) -> Value {
    let points: Vec<Value> = report
        .points
        .iter()
        .map(|p| {
            json!({
                "slots": p.slots,
                "cars": p.cars,
                "seconds": p.seconds,
                "parked": p.parked,
            })
        })
        .collect();
    json!({ "points": points, "slope": report.slope })
}
