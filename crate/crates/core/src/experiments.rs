//! Repeatable experiments: parked-count comparison and scaling benchmarks.
//!
//! Both experiments generate their instances from seeds, so a report is fully
//! reproducible from its parameters. Benchmarks time the priority allocator
//! alone — generation and validation are excluded from the measurement.

use std::collections::BTreeMap;
use std::hint::black_box;
use std::time::Instant;

use crate::allocation::{greedy_allocate, nash_allocate, AllocationConfig};
use crate::gen::{generate, GenSpec, GenSpecError};
use crate::projection::ProjectedScenario;

/// One generated instance solved by both allocators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompareRun {
    pub seed: u64,
    pub nash_parked: usize,
    pub greedy_parked: usize,
    pub cars: usize,
}

/// Parked-count comparison across a batch of generated instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub runs: Vec<CompareRun>,
}

impl ComparisonReport {
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn mean_nash_parked(&self) -> f64 {
        self.mean(|r| r.nash_parked)
    }

    pub fn mean_greedy_parked(&self) -> f64 {
        self.mean(|r| r.greedy_parked)
    }

    fn mean(&self, value: impl Fn(&CompareRun) -> usize) -> f64 {
        if self.runs.is_empty() {
            return 0.0;
        }
        self.runs.iter().map(|r| value(r) as f64).sum::<f64>() / self.runs.len() as f64
    }

    /// Runs where the priority allocator parked strictly more cars.
    pub fn nash_better(&self) -> usize {
        self.runs.iter().filter(|r| r.nash_parked > r.greedy_parked).count()
    }

    pub fn tied(&self) -> usize {
        self.runs.iter().filter(|r| r.nash_parked == r.greedy_parked).count()
    }

    pub fn greedy_better(&self) -> usize {
        self.runs.iter().filter(|r| r.nash_parked < r.greedy_parked).count()
    }

    /// Share of runs where the priority allocator parked at least as many cars.
    pub fn nash_at_least_share(&self) -> f64 {
        if self.runs.is_empty() {
            return 0.0;
        }
        (self.nash_better() + self.tied()) as f64 / self.runs.len() as f64
    }

    /// Histogram of `nash_parked - greedy_parked` over the runs.
    pub fn parked_diff_histogram(&self) -> BTreeMap<i64, usize> {
        let mut histogram = BTreeMap::new();
        for run in &self.runs {
            let diff = run.nash_parked as i64 - run.greedy_parked as i64;
            *histogram.entry(diff).or_insert(0) += 1;
        }
        histogram
    }
}

/// Runs both allocators on `runs` generated instances.
///
/// Run `r` regenerates the template with seed `base_seed + r`; the template's
/// own seed is ignored. The greedy side uses the arrival order.
pub fn compare(
    runs: usize,
    template: &GenSpec,
    base_seed: u64,
) -> Result<ComparisonReport, GenSpecError> {
    let config = AllocationConfig::default();
    let mut report = ComparisonReport {
        runs: Vec::with_capacity(runs),
    };
    for r in 0..runs {
        let mut spec = template.clone();
        spec.seed = base_seed.wrapping_add(r as u64);
        let scenario = generate(&spec)?;
        let projected = ProjectedScenario::project(&scenario).expect("generated instances validate");
        report.runs.push(CompareRun {
            seed: spec.seed,
            nash_parked: nash_allocate(&projected, &config).parked_count(),
            greedy_parked: greedy_allocate(&projected, &config).parked_count(),
            cars: spec.cars,
        });
    }
    Ok(report)
}

/// Renders a comparison as CSV with a fixed header, one line per run.
pub fn compare_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("run,seed,pssg_parked,gpg_parked,total_cars\n");
    for (i, run) in report.runs.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i, run.seed, run.nash_parked, run.greedy_parked, run.cars
        ));
    }
    out
}

/// One timed problem size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchPoint {
    pub slots: usize,
    pub cars: usize,
    /// Best-of-reps wall time of one priority allocation, in seconds.
    pub seconds: f64,
    pub parked: usize,
}

/// Timed points plus the fitted log-log growth exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub points: Vec<BenchPoint>,
    /// Least-squares slope of `ln seconds` against `ln cars`, when defined.
    pub slope: Option<f64>,
}

/// Car counts `start, 2*start, ..., start * 2^doublings`.
pub fn doubling_schedule(start: usize, doublings: u32) -> Vec<usize> {
    let mut schedule = Vec::with_capacity(doublings as usize + 1);
    let mut cars = start;
    for step in 0..=doublings {
        schedule.push(cars);
        if step < doublings {
            cars = cars.checked_mul(2).expect("schedule overflows usize");
        }
    }
    schedule
}

/// Times the priority allocator on one generated single-gate instance.
///
/// The clock covers only the allocation call; the reported time is the
/// minimum over `reps` repetitions of the same instance.
pub fn measure_point(
    cars: usize,
    slots: usize,
    seed: u64,
    reps: usize,
) -> Result<BenchPoint, GenSpecError> {
    assert!(reps >= 1, "at least one repetition required");
    let scenario = generate(&GenSpec::new(cars, slots, 1, seed))?;
    let projected = ProjectedScenario::project(&scenario).expect("generated instances validate");
    let config = AllocationConfig::default();
    let mut seconds = f64::INFINITY;
    let mut parked = 0;
    for _ in 0..reps {
        let start = Instant::now();
        let allocation = nash_allocate(black_box(&projected), black_box(&config));
        let elapsed = start.elapsed().as_secs_f64();
        parked = black_box(allocation).parked_count();
        seconds = seconds.min(elapsed);
    }
    Ok(BenchPoint {
        slots,
        cars,
        seconds,
        parked,
    })
}

/// Times every car count in `schedule` against a fixed slot count.
///
/// Point `i` uses seed `seed + i`, so the whole report is reproducible.
pub fn bench(
    slots: usize,
    schedule: &[usize],
    seed: u64,
    reps: usize,
) -> Result<BenchReport, GenSpecError> {
    let mut points = Vec::with_capacity(schedule.len());
    for (i, &cars) in schedule.iter().enumerate() {
        points.push(measure_point(cars, slots, seed.wrapping_add(i as u64), reps)?);
    }
    let slope = loglog_slope(
        &points
            .iter()
            .map(|p| (p.cars as f64, p.seconds))
            .collect::<Vec<_>>(),
    );
    Ok(BenchReport { points, slope })
}

/// Least-squares slope of `ln y` against `ln x`.
///
/// Points with a non-positive coordinate are dropped; returns `None` with
/// fewer than two usable points or no spread in `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs
        .iter()
        .map(|&(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    Some(sxy / sxx)
}

/// Renders a benchmark as CSV with a fixed header, one line per point.
pub fn bench_csv(report: &BenchReport) -> String {
    let mut out = String::from("slots,cars,seconds\n");
    for point in &report.points {
        out.push_str(&format!("{},{},{:.9}\n", point.slots, point.cars, point.seconds));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template() -> GenSpec {
        GenSpec::new(6, 5, 1, 0)
    }

    #[test]
    fn comparison_is_deterministic_and_counts_add_up() {
        let report = compare(12, &template(), 1000).unwrap();
        assert_eq!(report, compare(12, &template(), 1000).unwrap());
        assert_eq!(report.run_count(), 12);
        assert_eq!(
            report.nash_better() + report.tied() + report.greedy_better(),
            12
        );
        assert!(report.runs.iter().all(|r| r.cars == 6));
        assert!(report
            .runs
            .iter()
            .all(|r| r.nash_parked <= 6 && r.greedy_parked <= 6));
        let share = report.nash_at_least_share();
        assert!((0.0..=1.0).contains(&share));
    }

    #[test]
    fn comparison_seeds_advance_from_the_base() {
        let report = compare(5, &template(), 42).unwrap();
        let seeds: Vec<u64> = report.runs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![42, 43, 44, 45, 46]);
    }

    #[test]
    fn comparison_histogram_covers_every_run() {
        let report = compare(30, &template(), 7).unwrap();
        let histogram = report.parked_diff_histogram();
        assert_eq!(histogram.values().sum::<usize>(), 30);
        for run in &report.runs {
            let diff = run.nash_parked as i64 - run.greedy_parked as i64;
            assert!(histogram[&diff] >= 1);
        }
    }

    #[test]
    fn comparison_csv_has_the_fixed_header_and_rows() {
        let report = compare(3, &template(), 9).unwrap();
        let csv = compare_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "run,seed,pssg_parked,gpg_parked,total_cars");
        assert!(lines[1].starts_with("0,9,"));
        assert!(lines[3].starts_with("2,11,"));
        assert!(lines.iter().skip(1).all(|l| l.ends_with(",6")));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn empty_comparison_reports_zero_means() {
        let report = compare(0, &template(), 0).unwrap();
        assert_eq!(report.mean_nash_parked(), 0.0);
        assert_eq!(report.nash_at_least_share(), 0.0);
        assert!(report.parked_diff_histogram().is_empty());
    }

    #[test]
    fn doubling_schedule_doubles_from_the_start() {
        assert_eq!(doubling_schedule(200, 3), vec![200, 400, 800, 1600]);
        assert_eq!(doubling_schedule(5, 0), vec![5]);
    }

    #[test]
    fn bench_points_follow_the_schedule() {
        let report = bench(16, &[4, 8, 16], 3, 2).unwrap();
        assert_eq!(report.points.len(), 3);
        for (point, &cars) in report.points.iter().zip(&[4usize, 8, 16]) {
            assert_eq!(point.cars, cars);
            assert_eq!(point.slots, 16);
            assert!(point.seconds.is_finite() && point.seconds >= 0.0);
            assert!(point.parked <= point.cars);
        }
        let again = bench(16, &[4, 8, 16], 3, 2).unwrap();
        let parked: Vec<usize> = report.points.iter().map(|p| p.parked).collect();
        let parked_again: Vec<usize> = again.points.iter().map(|p| p.parked).collect();
        assert_eq!(parked, parked_again);
    }

    #[test]
    fn synthetic_quadratic_growth_fits_slope_two() {
        let points = [(100.0, 10.0), (200.0, 40.0), (400.0, 160.0), (800.0, 640.0)];
        let slope = loglog_slope(&points).unwrap();
        assert!((slope - 2.0).abs() < 1e-9, "slope {slope}");
    }

    #[test]
    fn slope_requires_two_positive_points_with_spread() {
        assert_eq!(loglog_slope(&[]), None);
        assert_eq!(loglog_slope(&[(100.0, 1.0)]), None);
        assert_eq!(loglog_slope(&[(100.0, 0.0), (200.0, 1.0)]), None);
        assert_eq!(loglog_slope(&[(100.0, 1.0), (100.0, 2.0)]), None);
    }

    #[test]
    fn bench_csv_uses_nanosecond_precision() {
        let report = BenchReport {
            points: vec![BenchPoint {
                slots: 10,
                cars: 4,
                seconds: 0.001234567891,
                parked: 4,
            }],
            slope: None,
        };
        assert_eq!(bench_csv(&report), "slots,cars,seconds\n10,4,0.001234568\n");
    }
}
