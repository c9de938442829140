use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{generate_scenario, run_seed, HarnessError, ScenarioConfig};
use crate::assessment::{
    build_references, nis_confidence_interval, observe_step, Aspect, AspectBinning, AssessmentTrack, NisStat,
    NisWindow, SAOutput,
};
use crate::tracker::{associate_nn, predict, reference_coeffs, transformed_likelihood_value, update, TrackState};

/// Reported quantities, declared in the order their names sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    DcAssoc,
    DcClutter,
    DcMeas,
    DcOverall,
    ErrM,
    NisAvg,
    NisHi,
    NisLo,
    ThrAssoc,
    ThrClutter,
    ThrMeas,
    ThrOverall,
    UAssoc,
    UClutter,
    UMeas,
    UOverall,
}

impl Metric {
    pub const ALL: [Metric; 16] = [
        Metric::DcAssoc,
        Metric::DcClutter,
        Metric::DcMeas,
        Metric::DcOverall,
        Metric::ErrM,
        Metric::NisAvg,
        Metric::NisHi,
        Metric::NisLo,
        Metric::ThrAssoc,
        Metric::ThrClutter,
        Metric::ThrMeas,
        Metric::ThrOverall,
        Metric::UAssoc,
        Metric::UClutter,
        Metric::UMeas,
        Metric::UOverall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::DcAssoc => "dc_assoc",
            Metric::DcClutter => "dc_clutter",
            Metric::DcMeas => "dc_meas",
            Metric::DcOverall => "dc_overall",
            Metric::ErrM => "err_m",
            Metric::NisAvg => "nis_avg",
            Metric::NisHi => "nis_hi",
            Metric::NisLo => "nis_lo",
            Metric::ThrAssoc => "thr_assoc",
            Metric::ThrClutter => "thr_clutter",
            Metric::ThrMeas => "thr_meas",
            Metric::ThrOverall => "thr_overall",
            Metric::UAssoc => "u_assoc",
            Metric::UClutter => "u_clutter",
            Metric::UMeas => "u_meas",
            Metric::UOverall => "u_overall",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn dc(aspect: Aspect) -> Self {
        [Metric::DcOverall, Metric::DcAssoc, Metric::DcMeas, Metric::DcClutter][aspect.index()]
    }

    pub fn thr(aspect: Aspect) -> Self {
        [Metric::ThrOverall, Metric::ThrAssoc, Metric::ThrMeas, Metric::ThrClutter][aspect.index()]
    }

    pub fn u(aspect: Aspect) -> Self {
        [Metric::UOverall, Metric::UAssoc, Metric::UMeas, Metric::UClutter][aspect.index()]
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Everything reported for one (step, sensor) of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub step: u64,
    /// 1-based.
    pub sensor: usize,
    /// Indexed by [`Aspect::index`].
    pub sa: [SAOutput; 4],
    /// `None` until the first association inside the NIS window.
    pub nis: Option<NisStat>,
    /// 1-based associated measurement, 0 for a missed detection.
    pub assoc_index: usize,
    /// Position error of the track after this sensor's update, metres.
    pub err_m: f64,
}

impl RunRecord {
    pub fn value(&self, metric: Metric) -> Option<f64> {
        let sa = |a: Aspect| &self.sa[a.index()];
        let v = match metric {
            Metric::DcOverall => sa(Aspect::Overall).dc_score,
            Metric::DcAssoc => sa(Aspect::Association).dc_score,
            Metric::DcMeas => sa(Aspect::Measurement).dc_score,
            Metric::DcClutter => sa(Aspect::Clutter).dc_score,
            Metric::ThrOverall => sa(Aspect::Overall).threshold,
            Metric::ThrAssoc => sa(Aspect::Association).threshold,
            Metric::ThrMeas => sa(Aspect::Measurement).threshold,
            Metric::ThrClutter => sa(Aspect::Clutter).threshold,
            Metric::UOverall => sa(Aspect::Overall).long_term_uncertainty,
            Metric::UAssoc => sa(Aspect::Association).long_term_uncertainty,
            Metric::UMeas => sa(Aspect::Measurement).long_term_uncertainty,
            Metric::UClutter => sa(Aspect::Clutter).long_term_uncertainty,
            Metric::NisAvg => return self.nis.map(|n| n.mean),
            Metric::NisLo => return self.nis.map(|n| n.lower),
            Metric::NisHi => return self.nis.map(|n| n.upper),
            Metric::ErrM => self.err_m,
        };
        Some(v)
    }
}

/// Non-fatal events of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunWarning {
    /// The object was outside the field of view.
    LeftFov { step: u64 },
    /// No sensor associated for more than the configured number of steps.
    Diverged { step: u64 },
    /// The position variance exceeded the configured bound.
    CovarianceBlowUp { step: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub seed: u64,
    /// Sorted by (step, sensor).
    pub records: Vec<RunRecord>,
    pub warnings: Vec<RunWarning>,
}

fn initial_state(cfg: &ScenarioConfig, scenario: &super::Scenario) -> Result<TrackState, HarnessError> {
    // first sensor that saw the object at step 0; the truth otherwise
    let first = scenario.scans[0]
        .iter()
        .enumerate()
        .find_map(|(s, sc)| sc.object_index.map(|i| (s + 1, sc.scan.points[i].clone())));
    let (pos, std) = match first {
        Some((s, z)) => (z, cfg.assumed_params(s).noise_std),
        None => {
            let t = &scenario.truth[0];
            (DVector::from_vec(vec![t[0], t[1]]), cfg.sensor.noise_std)
        }
    };
    let v_var = cfg.init_velocity_std.max(1e-3).powi(2);
    let [vx, vy] = cfg.init_velocity;
    let mean = DVector::from_vec(vec![pos[0], pos[1], vx, vy]);
    let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![std * std, std * std, v_var, v_var]));
    Ok(TrackState::new(mean, cov, 0)?)
}

struct SensorPipeline {
    model: crate::tracker::SensorModel,
    binning: AspectBinning,
    tracks: Vec<AssessmentTrack>,
    nis: NisWindow,
}

fn build_pipeline(cfg: &ScenarioConfig, sensor: usize) -> Result<SensorPipeline, HarnessError> {
    let model = cfg.assumed_sensor_model(sensor);
    let ref_model = reference_coeffs(&model)?;
    let binning = AspectBinning::new(cfg.sa.bins, model.meas_dim(), cfg.sa.gate_prob, model.clutter_mean)?;
    let refs = build_references(&model, &ref_model, &binning, cfg.reference_weighting)?;
    let tracks = Aspect::ALL
        .iter()
        .map(|&a| AssessmentTrack::new(a, sensor, refs.get(a).clone(), &cfg.sa))
        .collect::<Result<Vec<_>, _>>()?;
    let nis = NisWindow::new(cfg.sa.nis_window, model.meas_dim(), cfg.sa.nis_conf)?;
    Ok(SensorPipeline { model, binning, tracks, nis })
}

/// One simulated run: tracking plus self-assessment for every sensor.
pub fn run_once(cfg: &ScenarioConfig, run_seed: u64) -> Result<RunOutput, HarnessError> {
    let scenario = generate_scenario(cfg, run_seed)?;
    let motion = cfg.motion_model();
    let mut pipelines = (1..=cfg.num_sensors).map(|s| build_pipeline(cfg, s)).collect::<Result<Vec<_>, _>>()?;

    let mut warnings: Vec<RunWarning> = scenario.outside_fov.iter().map(|&step| RunWarning::LeftFov { step }).collect();
    let mut state = initial_state(cfg, &scenario)?;
    let mut records = Vec::with_capacity(scenario.scans.len() * cfg.num_sensors);
    let mut missed_streak = 0u64;
    let mut blown_up = false;

    for (k, step_scans) in scenario.scans.iter().enumerate() {
        let step = k as u64;
        if k > 0 {
            state = predict(&state, &motion)?;
        }
        let truth = &scenario.truth[k];
        let mut any_assoc = false;
        for (pipe, sensor_scan) in pipelines.iter_mut().zip(step_scans) {
            let scan = &sensor_scan.scan;
            let innov = associate_nn(&state, scan, &pipe.model, cfg.sa.gate_prob)?;
            state = update(&state, &innov, &pipe.model)?;
            any_assoc |= !innov.is_missed();

            let mut sa = Vec::with_capacity(4);
            for track in pipe.tracks.iter_mut() {
                let op = observe_step(track.aspect(), &innov, scan, &pipe.binning, track.base_rate())?;
                sa.push(track.track_step(&op)?);
            }
            let nis = pipe.nis.push(transformed_likelihood_value(&innov))?;
            let err_m = ((state.mean[0] - truth[0]).powi(2) + (state.mean[1] - truth[1]).powi(2)).sqrt();
            records.push(RunRecord {
                step,
                sensor: scan.sensor_id,
                sa: [sa[0], sa[1], sa[2], sa[3]],
                nis,
                assoc_index: innov.assoc_index,
                err_m,
            });
        }

        missed_streak = if any_assoc { 0 } else { missed_streak + 1 };
        if missed_streak == cfg.divergence_steps + 1 {
            warnings.push(RunWarning::Diverged { step });
        }
        let pos_var = state.covariance[(0, 0)] + state.covariance[(1, 1)];
        if pos_var > cfg.divergence_variance && !blown_up {
            warnings.push(RunWarning::CovarianceBlowUp { step });
        }
        blown_up = pos_var > cfg.divergence_variance;
    }
    warnings.sort_by_key(|w| match w {
        RunWarning::LeftFov { step } | RunWarning::Diverged { step } | RunWarning::CovarianceBlowUp { step } => *step,
    });
    Ok(RunOutput { seed: run_seed, records, warnings })
}

/// Dense (step, sensor, metric) table; missing values are absent rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    num_steps: u64,
    num_sensors: usize,
    values: Vec<Option<f64>>,
}

impl ScoreTable {
    pub fn new(num_steps: u64, num_sensors: usize) -> Self {
        Self { num_steps, num_sensors, values: vec![None; num_steps as usize * num_sensors * Metric::ALL.len()] }
    }

    fn index(&self, step: u64, sensor: usize, metric: Metric) -> usize {
        assert!(step < self.num_steps && (1..=self.num_sensors).contains(&sensor), "({step}, {sensor}) out of range");
        (step as usize * self.num_sensors + sensor - 1) * Metric::ALL.len() + metric.slot()
    }

    pub fn num_steps(&self) -> u64 {
        self.num_steps
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    pub fn get(&self, step: u64, sensor: usize, metric: Metric) -> Option<f64> {
        self.values[self.index(step, sensor, metric)]
    }

    pub fn set(&mut self, step: u64, sensor: usize, metric: Metric, value: Option<f64>) {
        let i = self.index(step, sensor, metric);
        self.values[i] = value;
    }

    /// Present values in (step, sensor, metric name) order.
    pub fn rows(&self) -> impl Iterator<Item = (u64, usize, Metric, f64)> + '_ {
        let (n_s, n_m) = (self.num_sensors, Metric::ALL.len());
        self.values.iter().enumerate().filter_map(move |(i, v)| {
            let v = (*v)?;
            let metric = Metric::ALL[i % n_m];
            let cell = i / n_m;
            Some(((cell / n_s) as u64, cell % n_s + 1, metric, v))
        })
    }

    /// One series over all steps; missing values are `None`.
    pub fn series(&self, sensor: usize, metric: Metric) -> Vec<Option<f64>> {
        (0..self.num_steps).map(|k| self.get(k, sensor, metric)).collect()
    }

    pub fn from_records(num_steps: u64, num_sensors: usize, records: &[RunRecord]) -> Self {
        let mut t = Self::new(num_steps, num_sensors);
        for r in records {
            for m in Metric::ALL {
                t.set(r.step, r.sensor, m, r.value(m));
            }
        }
        t
    }
}

/// Per-run bookkeeping kept by [`run_monte_carlo`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run: u64,
    pub seed: u64,
    pub warnings: Vec<RunWarning>,
    /// Fraction of (step, sensor) pairs with a missed association.
    pub missed_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloOutput {
    pub averaged: ScoreTable,
    pub runs: Vec<RunSummary>,
}

/// Running sums over runs; added to strictly in run order.
struct Accumulator {
    sums: Vec<f64>,
    counts: Vec<u32>,
    nis_sum: Vec<f64>,
    nis_k: Vec<usize>,
    num_sensors: usize,
}

impl Accumulator {
    fn new(num_steps: u64, num_sensors: usize) -> Self {
        let cells = num_steps as usize * num_sensors;
        Self {
            sums: vec![0.0; cells * Metric::ALL.len()],
            counts: vec![0; cells * Metric::ALL.len()],
            nis_sum: vec![0.0; cells],
            nis_k: vec![0; cells],
            num_sensors,
        }
    }

    fn add(&mut self, records: &[RunRecord]) {
        for r in records {
            let cell = r.step as usize * self.num_sensors + r.sensor - 1;
            for m in Metric::ALL {
                if matches!(m, Metric::NisAvg | Metric::NisLo | Metric::NisHi) {
                    continue;
                }
                if let Some(v) = r.value(m) {
                    let i = cell * Metric::ALL.len() + m.slot();
                    self.sums[i] += v;
                    self.counts[i] += 1;
                }
            }
            if let Some(n) = r.nis {
                self.nis_sum[cell] += n.mean * n.samples as f64;
                self.nis_k[cell] += n.samples;
            }
        }
    }

    fn finish(self, num_steps: u64, meas_dim: usize, conf: f64) -> Result<ScoreTable, HarnessError> {
        let mut t = ScoreTable::new(num_steps, self.num_sensors);
        let n_m = Metric::ALL.len();
        for (i, (s, c)) in self.sums.iter().zip(&self.counts).enumerate() {
            if *c > 0 {
                t.values[i] = Some(s / f64::from(*c));
            }
        }
        let mut ci_cache: HashMap<usize, (f64, f64)> = HashMap::new();
        for (cell, (&sum, &k)) in self.nis_sum.iter().zip(&self.nis_k).enumerate() {
            if k == 0 {
                continue;
            }
            let (lo, hi) = match ci_cache.get(&k) {
                Some(ci) => *ci,
                None => {
                    let ci = nis_confidence_interval(k, meas_dim, conf)?;
                    ci_cache.insert(k, ci);
                    ci
                }
            };
            t.values[cell * n_m + Metric::NisAvg.slot()] = Some(sum / k as f64);
            t.values[cell * n_m + Metric::NisLo.slot()] = Some(lo);
            t.values[cell * n_m + Metric::NisHi.slot()] = Some(hi);
        }
        Ok(t)
    }
}

/// Runs per parallel batch; bounds memory while keeping the reduction order
/// fixed.
const BATCH: usize = 32;

/// `cfg.mc_runs` independent runs averaged per (step, sensor, metric).
///
/// The time-average NIS is pooled: the averaged value is the mean of all
/// NIS samples of all runs in the window, and its interval uses their total
/// count.
pub fn run_monte_carlo(cfg: &ScenarioConfig) -> Result<MonteCarloOutput, HarnessError> {
    cfg.validate()?;
    let mut acc = Accumulator::new(cfg.num_steps, cfg.num_sensors);
    let mut runs = Vec::with_capacity(cfg.mc_runs);
    let all: Vec<u64> = (0..cfg.mc_runs as u64).collect();
    for batch in all.chunks(BATCH) {
        let outputs: Vec<Result<RunOutput, HarnessError>> =
            batch.par_iter().map(|&run| run_once(cfg, run_seed(cfg.seed, run))).collect();
        for (&run, out) in batch.iter().zip(outputs) {
            let out = out?;
            acc.add(&out.records);
            let missed = out.records.iter().filter(|r| r.assoc_index == 0).count();
            runs.push(RunSummary {
                run,
                seed: out.seed,
                missed_fraction: missed as f64 / out.records.len().max(1) as f64,
                warnings: out.warnings,
            });
        }
    }
    let averaged = acc.finish(cfg.num_steps, 2, cfg.sa.nis_conf)?;
    Ok(MonteCarloOutput { averaged, runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::parse_config_str;

    fn small() -> ScenarioConfig {
        parse_config_str("num_steps = 120\nmc_runs = 3\n[sa]\nwindow_len = 20\nnis_window = 20\n").unwrap()
    }

    #[test]
    fn metric_names_sorted_and_unique() {
        let names: Vec<&str> = Metric::ALL.iter().map(|m| m.name()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
        assert_eq!(Metric::from_name("nis_lo"), Some(Metric::NisLo));
        for a in Aspect::ALL {
            assert!(Metric::dc(a).name().ends_with(a.short_name()));
            assert!(Metric::thr(a).name().ends_with(a.short_name()));
            assert!(Metric::u(a).name().ends_with(a.short_name()));
        }
    }

    #[test]
    fn run_is_deterministic() {
        let cfg = small();
        let a = run_once(&cfg, 9).unwrap();
        let b = run_once(&cfg, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 120 * 3);
        for r in &a.records {
            for s in &r.sa {
                assert!((0.0..=1.0).contains(&s.dc_score) && s.threshold >= 0.0);
                assert_eq!(s.flag, s.dc_score > s.threshold);
            }
        }
    }

    #[test]
    fn single_run_average_is_the_run() {
        let cfg = ScenarioConfig { mc_runs: 1, ..small() };
        let mc = run_monte_carlo(&cfg).unwrap();
        let single = run_once(&cfg, run_seed(cfg.seed, 0)).unwrap();
        let t = ScoreTable::from_records(cfg.num_steps, cfg.num_sensors, &single.records);
        for ((a, b), (c, d)) in mc
            .averaged
            .rows()
            .map(|r| (r.0, r.2))
            .zip(t.rows().map(|r| (r.0, r.2)))
            .zip(mc.averaged.rows().map(|r| r.3).zip(t.rows().map(|r| r.3)))
        {
            assert_eq!(a, b);
            assert!((c - d).abs() <= 1e-12 * d.abs().max(1.0), "{c} vs {d}");
        }
        assert_eq!(mc.averaged.rows().count(), t.rows().count());
    }

    #[test]
    fn identical_seeds_average_to_the_run() {
        let cfg = small();
        let out = run_once(&cfg, 4).unwrap();
        let mut acc = Accumulator::new(cfg.num_steps, cfg.num_sensors);
        for _ in 0..5 {
            acc.add(&out.records);
        }
        let avg = acc.finish(cfg.num_steps, 2, cfg.sa.nis_conf).unwrap();
        let single = ScoreTable::from_records(cfg.num_steps, cfg.num_sensors, &out.records);
        for (r, s) in avg.rows().zip(single.rows()) {
            assert_eq!((r.0, r.1, r.2), (s.0, s.1, s.2));
            if !matches!(r.2, Metric::NisLo | Metric::NisHi) {
                assert!((r.3 - s.3).abs() <= 1e-12 * s.3.abs().max(1.0));
            }
        }
    }

    #[test]
    fn rows_are_sorted() {
        let cfg = small();
        let out = run_once(&cfg, 1).unwrap();
        let t = ScoreTable::from_records(cfg.num_steps, cfg.num_sensors, &out.records);
        let keys: Vec<(u64, usize, &str)> = t.rows().map(|(k, s, m, _)| (k, s, m.name())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
