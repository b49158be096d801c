//! Phase-transition and distance-to-optimal sweeps, with their CSV forms.

use std::io::{Read, Write};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::{extract_features, order_parameter, OrderParameter};
use crate::solver::{SolveOptions, Solver};

use super::config::EnsembleConfig;

pub const SWEEP_CSV_HEADER: [&str; 9] = [
    "z",
    "bin_low",
    "bin_high",
    "n",
    "n_unknown",
    "cost_p25",
    "cost_p50",
    "cost_p90",
    "p_solvable",
];
pub const DISTANCE_CSV_HEADER: [&str; 3] = ["d", "n", "mean_cost"];

/// Where an instance lands on the `log2 π` axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bin {
    /// `π = 0`; sorts before every finite bin.
    Underflow,
    /// `[k · width, (k + 1) · width)`.
    Index(i64),
}

impl Bin {
    pub fn of(pi: &OrderParameter, width: f64) -> Self {
        if pi.is_zero() {
            Bin::Underflow
        } else {
            Bin::Index((pi.pi_log2 / width).floor() as i64)
        }
    }

    pub fn bounds(self, width: f64) -> (f64, f64) {
        match self {
            Bin::Underflow => (f64::NEG_INFINITY, f64::NEG_INFINITY),
            Bin::Index(k) => (k as f64 * width, (k + 1) as f64 * width),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Solvable,
    Unsolvable,
    /// The budget ran out first.
    Unknown,
}

/// Per-instance data kept alongside the aggregate rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub v_count: usize,
    pub z_max: usize,
    pub pi_log2: f64,
    pub bin: Bin,
    /// `(z, cost, status)` in `z_values` order.
    pub runs: Vec<(usize, u64, RunStatus)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub z: usize,
    pub bin_low: f64,
    pub bin_high: f64,
    pub underflow: bool,
    pub n: usize,
    pub n_unknown: usize,
    pub cost_p25: u64,
    pub cost_p50: u64,
    pub cost_p90: u64,
    /// Solvable runs over all runs in the bin, unknown ones included in the
    /// denominator only.
    pub p_solvable: Ratio<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub instances: Vec<InstanceRecord>,
}

/// Nearest-rank percentile of an ascending slice.
pub fn nearest_rank(sorted: &[u64], p: usize) -> u64 {
    assert!(!sorted.is_empty() && (1..=100).contains(&p));
    let rank = (p * sorted.len()).div_ceil(100).max(1);
    sorted[rank - 1]
}

fn solve_options(config: &EnsembleConfig, guarantee_check: bool) -> SolveOptions {
    SolveOptions {
        pruning: config.pruning,
        guarantee_check,
    }
}

/// Generates every instance, bins it by `log2 π` and runs a weight-maximal
/// search of each requested size. Results do not depend on `exec`.
pub fn run_sweep(config: &EnsembleConfig, exec: Exec) -> Result<SweepResult> {
    config.validate()?;
    let options = solve_options(config, config.guarantee_check);
    let records = exec.map_range(config.instance_count, |i| -> Result<InstanceRecord> {
        let inst = config.instance(i)?;
        let fv = extract_features(&inst.graph, Some(inst.w))?;
        let pi = order_parameter(&fv);
        let solver = Solver::with_options(&inst.graph, options);
        let runs = config
            .z_values
            .iter()
            .map(|&z| {
                let report = solver.find_max_weight_of_size(z, config.budget)?;
                let status = if report.outcome.is_found() {
                    RunStatus::Solvable
                } else if report.budget_exhausted {
                    RunStatus::Unknown
                } else {
                    RunStatus::Unsolvable
                };
                Ok((z, report.combinations_explored, status))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InstanceRecord {
            index: i,
            v_count: inst.graph.v_count(),
            z_max: fv.size_max as usize,
            pi_log2: pi.pi_log2,
            bin: Bin::of(&pi, config.bin_width),
            runs,
        })
    });
    let instances = records.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        rows: aggregate(config, &instances),
        instances,
    })
}

fn aggregate(config: &EnsembleConfig, instances: &[InstanceRecord]) -> Vec<SweepRow> {
    let mut zs = config.z_values.clone();
    zs.sort_unstable();
    zs.dedup();
    let mut bins: Vec<Bin> = instances.iter().map(|r| r.bin).collect();
    bins.sort_unstable();
    bins.dedup();
    let mut rows = Vec::new();
    for &z in &zs {
        let slot = config
            .z_values
            .iter()
            .position(|&x| x == z)
            .expect("z present");
        for &bin in &bins {
            let mut costs = Vec::new();
            let (mut solvable, mut unknown) = (0u64, 0usize);
            for r in instances.iter().filter(|r| r.bin == bin) {
                let (_, cost, status) = r.runs[slot];
                costs.push(cost);
                match status {
                    RunStatus::Solvable => solvable += 1,
                    RunStatus::Unknown => unknown += 1,
                    RunStatus::Unsolvable => {}
                }
            }
            costs.sort_unstable();
            let (bin_low, bin_high) = bin.bounds(config.bin_width);
            rows.push(SweepRow {
                z,
                bin_low,
                bin_high,
                underflow: bin == Bin::Underflow,
                n: costs.len(),
                n_unknown: unknown,
                cost_p25: nearest_rank(&costs, 25),
                cost_p50: nearest_rank(&costs, 50),
                cost_p90: nearest_rank(&costs, 90),
                p_solvable: Ratio::new(solvable, costs.len() as u64),
            });
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub d: i64,
    pub n: usize,
    /// `None` when no instance admits this distance.
    pub mean_cost: Option<Ratio<u64>>,
    /// `d >= 0`: a biclique of the requested size is guaranteed to exist.
    pub solvable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceInstance {
    pub index: usize,
    pub z_max: usize,
    pub v_count: usize,
    /// `(d, cost)` for each requested distance this instance admits.
    pub costs: Vec<(i64, u64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistanceSweepResult {
    pub rows: Vec<DistanceRow>,
    pub instances: Vec<DistanceInstance>,
    /// Instances with `z_max < 2`, which admit no distance at all.
    pub skipped: usize,
}

impl DistanceSweepResult {
    /// Mean over instances of the cost at each instance's own largest
    /// requested distance. `None` if no instance ran.
    pub fn mean_cost_at_largest_d(&self) -> Option<f64> {
        let costs: Vec<u64> = self
            .instances
            .iter()
            .filter_map(|inst| inst.costs.iter().max_by_key(|(d, _)| *d).map(|&(_, c)| c))
            .collect();
        (!costs.is_empty()).then(|| costs.iter().sum::<u64>() as f64 / costs.len() as f64)
    }
}

/// For each instance and each `d`, searches at `z = z_max - d` when
/// `2 <= z <= |V|`, with the gram guarantee check on.
pub fn run_distance_sweep(
    config: &EnsembleConfig,
    d_values: &[i64],
    exec: Exec,
) -> Result<DistanceSweepResult> {
    config.validate()?;
    let mut ds = d_values.to_vec();
    ds.sort_unstable();
    ds.dedup();
    let options = solve_options(config, true);
    let records = exec.map_range(
        config.instance_count,
        |i| -> Result<Option<DistanceInstance>> {
            let inst = config.instance(i)?;
            let solver = Solver::with_options(&inst.graph, options);
            let z_max = solver.z_max();
            if z_max < 2 {
                return Ok(None);
            }
            let v_count = inst.graph.v_count();
            let mut costs = Vec::new();
            for &d in &ds {
                let z = z_max as i64 - d;
                if z < 2 || z > v_count as i64 {
                    continue;
                }
                let report = solver.find_max_weight_of_size(z as usize, config.budget)?;
                costs.push((d, report.combinations_explored));
            }
            Ok(Some(DistanceInstance {
                index: i,
                z_max,
                v_count,
                costs,
            }))
        },
    );
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    let skipped = records.iter().filter(|r| r.is_none()).count();
    let instances: Vec<DistanceInstance> = records.into_iter().flatten().collect();
    let rows = ds
        .iter()
        .map(|&d| {
            let costs: Vec<u64> = instances
                .iter()
                .flat_map(|inst| inst.costs.iter().filter(|c| c.0 == d).map(|c| c.1))
                .collect();
            let n = costs.len();
            DistanceRow {
                d,
                n,
                mean_cost: (n > 0).then(|| Ratio::new(costs.iter().sum(), n as u64)),
                solvable: d >= 0,
            }
        })
        .collect();
    Ok(DistanceSweepResult {
        rows,
        instances,
        skipped,
    })
}

fn bound(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn parse_bound(s: &str) -> Option<f64> {
    match s.trim() {
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Csv(e.to_string())
}

fn check_header<R: Read>(r: &mut csv::Reader<R>, want: &[&str]) -> Result<()> {
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.iter().map(str::trim).ne(want.iter().copied()) {
        return Err(Error::Csv(format!(
            "unexpected header `{}`, want `{}`",
            headers.iter().collect::<Vec<_>>().join(","),
            want.join(",")
        )));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    name: &str,
    row: usize,
) -> Result<T> {
    rec[i]
        .trim()
        .parse()
        .map_err(|_| Error::Csv(format!("row {row}: bad `{name}` value `{}`", &rec[i])))
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.z.to_string(),
            bound(r.bin_low),
            bound(r.bin_high),
            r.n.to_string(),
            r.n_unknown.to_string(),
            r.cost_p25.to_string(),
            r.cost_p50.to_string(),
            r.cost_p90.to_string(),
            decimal::render(&r.p_solvable, 6),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)?;
    Ok(())
}

/// Reads rows back; `p_solvable` is recovered at the written precision.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &SWEEP_CSV_HEADER)?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(csv_err)?;
            let row = i + 2;
            if rec.len() != SWEEP_CSV_HEADER.len() {
                return Err(Error::Csv(format!(
                    "row {row}: expected 9 fields, found {}",
                    rec.len()
                )));
            }
            let b = |k: usize| {
                parse_bound(&rec[k]).ok_or_else(|| {
                    Error::Csv(format!(
                        "row {row}: bad `{}` value `{}`",
                        SWEEP_CSV_HEADER[k], &rec[k]
                    ))
                })
            };
            let bin_low = b(1)?;
            Ok(SweepRow {
                z: field(&rec, 0, "z", row)?,
                bin_low,
                bin_high: b(2)?,
                underflow: bin_low == f64::NEG_INFINITY,
                n: field(&rec, 3, "n", row)?,
                n_unknown: field(&rec, 4, "n_unknown", row)?,
                cost_p25: field(&rec, 5, "cost_p25", row)?,
                cost_p50: field(&rec, 6, "cost_p50", row)?,
                cost_p90: field(&rec, 7, "cost_p90", row)?,
                p_solvable: decimal::parse(&rec[8]).ok_or_else(|| {
                    Error::Csv(format!("row {row}: bad `p_solvable` value `{}`", &rec[8]))
                })?,
            })
        })
        .collect()
}

/// An empty `mean_cost` field marks a distance no instance admits.
pub fn write_distance_csv<W: Write>(out: W, rows: &[DistanceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DISTANCE_CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        let mean = r
            .mean_cost
            .as_ref()
            .map(|m| decimal::render(m, 6))
            .unwrap_or_default();
        w.write_record([r.d.to_string(), r.n.to_string(), mean])
            .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)?;
    Ok(())
}

pub fn read_distance_csv<R: Read>(input: R) -> Result<Vec<DistanceRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &DISTANCE_CSV_HEADER)?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(csv_err)?;
            let row = i + 2;
            if rec.len() != DISTANCE_CSV_HEADER.len() {
                return Err(Error::Csv(format!(
                    "row {row}: expected 3 fields, found {}",
                    rec.len()
                )));
            }
            let d: i64 = field(&rec, 0, "d", row)?;
            let mean_cost = match rec[2].trim() {
                "" => None,
                s => Some(decimal::parse(s).ok_or_else(|| {
                    Error::Csv(format!("row {row}: bad `mean_cost` value `{s}`"))
                })?),
            };
            Ok(DistanceRow {
                d,
                n: field(&rec, 1, "n", row)?,
                mean_cost,
                solvable: d >= 0,
            })
        })
        .collect()
}

fn create(path: &std::path::Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn with_path(path: &std::path::Path, e: Error) -> Error {
    match e {
        Error::Csv(msg) => Error::Csv(format!("{}: {msg}", path.display())),
        other => other,
    }
}

pub fn write_sweep_csv_file(path: impl AsRef<std::path::Path>, rows: &[SweepRow]) -> Result<()> {
    let path = path.as_ref();
    write_sweep_csv(create(path)?, rows).map_err(|e| with_path(path, e))
}

pub fn write_distance_csv_file(
    path: impl AsRef<std::path::Path>,
    rows: &[DistanceRow],
) -> Result<()> {
    let path = path.as_ref();
    write_distance_csv(create(path)?, rows).map_err(|e| with_path(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phaselab::Generator;
    use crate::solver::SearchBudget;

    fn uniform(u_n: usize, v_n: usize, p: f64, count: usize) -> EnsembleConfig {
        EnsembleConfig::new(
            Generator::Uniform {
                u_n,
                v_n,
                edge_prob: p,
            },
            count,
            17,
        )
    }

    #[test]
    fn nearest_rank_percentiles() {
        let xs = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
        assert_eq!(nearest_rank(&xs, 25), 3);
        assert_eq!(nearest_rank(&xs, 50), 5);
        assert_eq!(nearest_rank(&xs, 90), 9);
        assert_eq!(nearest_rank(&[7], 25), 7);
        assert_eq!(nearest_rank(&[1, 9], 50), 1);
    }

    #[test]
    fn bins_and_bounds() {
        let w = 0.25;
        assert_eq!(Bin::of(&OrderParameter::new(3, 8), w), Bin::Index(-6));
        assert_eq!(Bin::Index(-6).bounds(w), (-1.5, -1.25));
        assert_eq!(Bin::of(&OrderParameter::new(4, 4), w), Bin::Index(0));
        assert_eq!(Bin::of(&OrderParameter::new(0, 4), w), Bin::Underflow);
        assert!(Bin::Underflow < Bin::Index(-1000));
    }

    #[test]
    fn dense_ensemble_sits_in_top_bin() {
        let mut cfg = uniform(6, 6, 0.999, 10);
        cfg.z_values = vec![4];
        let res = run_sweep(&cfg, Exec::Sequential).unwrap();
        let full: Vec<_> = res.rows.iter().filter(|r| r.bin_low == 0.0).collect();
        assert_eq!(full.len(), 1);
        assert!(full[0].n >= 9);
        assert_eq!(full[0].p_solvable, Ratio::from_integer(1));
        let n: usize = res.rows.iter().map(|r| r.n).sum();
        assert_eq!(n, 10);
    }

    #[test]
    fn sparse_ensemble_is_never_solvable() {
        // Two u vertices cap every common neighbourhood search at z_max <= 3.
        let mut cfg = uniform(2, 3, 0.5, 20);
        cfg.z_values = vec![4];
        let res = run_sweep(&cfg, Exec::Sequential).unwrap();
        assert!(res.rows.iter().all(|r| *r.p_solvable.numer() == 0));
    }

    #[test]
    fn rows_are_ordered_and_counted() {
        let mut cfg = uniform(8, 8, 0.3, 40);
        cfg.z_values = vec![3, 2];
        let res = run_sweep(&cfg, Exec::Sequential).unwrap();
        for z in [2, 3] {
            let rows: Vec<_> = res.rows.iter().filter(|r| r.z == z).collect();
            assert_eq!(rows.iter().map(|r| r.n).sum::<usize>(), 40);
            assert!(rows.windows(2).all(|w| w[0].bin_low < w[1].bin_low));
            assert!(rows
                .iter()
                .all(|r| r.cost_p25 <= r.cost_p50 && r.cost_p50 <= r.cost_p90));
        }
        assert!(res.rows.first().unwrap().z == 2);
    }

    #[test]
    fn budget_exhaustion_is_reported_as_unknown() {
        let mut cfg = uniform(10, 10, 0.6, 5);
        cfg.z_values = vec![5];
        cfg.budget = SearchBudget::bounded(3).unwrap();
        let res = run_sweep(&cfg, Exec::Sequential).unwrap();
        let unknown: usize = res.rows.iter().map(|r| r.n_unknown).sum();
        assert!(unknown > 0);
        for r in &res.rows {
            assert!(*r.p_solvable.numer() as usize <= r.n - r.n_unknown);
        }
    }

    #[test]
    fn distance_sweep_negative_d_is_free() {
        let cfg = uniform(8, 8, 0.4, 20);
        let res = run_distance_sweep(&cfg, &[-1, 0, 1, 2], Exec::Sequential).unwrap();
        let neg = &res.rows[0];
        assert_eq!(neg.d, -1);
        assert!(!neg.solvable);
        if neg.n > 0 {
            assert_eq!(neg.mean_cost, Some(Ratio::from_integer(0)));
        }
        for inst in &res.instances {
            for &(d, c) in &inst.costs {
                let z = inst.z_max as i64 - d;
                assert!(z >= 2 && z <= inst.v_count as i64);
                if d < 0 {
                    assert_eq!(c, 0);
                }
            }
        }
        assert_eq!(res.instances.len() + res.skipped, 20);
    }

    #[test]
    fn sweep_csv_round_trip() {
        let mut cfg = uniform(6, 7, 0.35, 30);
        cfg.z_values = vec![2, 3];
        let res = run_sweep(&cfg, Exec::Sequential).unwrap();
        let mut a = Vec::new();
        write_sweep_csv(&mut a, &res.rows).unwrap();
        let back = read_sweep_csv(a.as_slice()).unwrap();
        assert_eq!(back.len(), res.rows.len());
        let mut b = Vec::new();
        write_sweep_csv(&mut b, &back).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_results_write_header_only() {
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{}\n", SWEEP_CSV_HEADER.join(","))
        );
        let mut buf = Vec::new();
        write_distance_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "d,n,mean_cost\n");
    }

    #[test]
    fn distance_csv_round_trip() {
        let rows = vec![
            DistanceRow {
                d: -1,
                n: 3,
                mean_cost: Some(Ratio::from_integer(0)),
                solvable: false,
            },
            DistanceRow {
                d: 0,
                n: 3,
                mean_cost: Some(Ratio::new(10, 3)),
                solvable: true,
            },
            DistanceRow {
                d: 7,
                n: 0,
                mean_cost: None,
                solvable: true,
            },
        ];
        let mut buf = Vec::new();
        write_distance_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "d,n,mean_cost\n-1,3,0.000000\n0,3,3.333333\n7,0,\n");
        let back = read_distance_csv(buf.as_slice()).unwrap();
        assert_eq!(back[1].mean_cost, Some(Ratio::new(3333333, 1000000)));
        assert_eq!(back[2].mean_cost, None);
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(read_sweep_csv("z,bin\n".as_bytes()).is_err());
        assert!(read_distance_csv("d,n\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn write_failure_names_the_path() {
        let err = write_sweep_csv_file("/nonexistent-dir/x.csv", &[]).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"), "{err}");
    }
}
