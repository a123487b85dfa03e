//! Microscopic N-neuron theta network with Poisson-clocked subsystem resets.
//!
//! Phases are stored unwrapped so that per-neuron firing rates follow from the
//! accumulated phase displacement. Reset jumps are not counted as rotation.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::firing_rate;
use crate::model::{
    lorentzian_quantile, ComplexMeanField, ModelParams, PulseCoefficients, ResetRate,
};

/// How the per-neuron excitabilities are drawn from the Lorentzian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExcitabilitySampling {
    /// Deterministic quantile midpoints `u_j = (j − 1/2) / N`.
    #[default]
    Stratified,
    /// Independent uniform draws pushed through the quantile function.
    Iid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub n_neurons: usize,
    pub total_time: f64,
    pub dt: f64,
    pub seed: u64,
    /// Steps between recorded samples.
    pub record_stride: usize,
    /// Fraction of `total_time` discarded before time averages.
    pub transient_fraction: f64,
    pub sampling: ExcitabilitySampling,
    /// Draw fresh excitabilities for every realization (only meaningful for `Iid`).
    pub redraw_excitabilities: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_neurons: 10_000,
            total_time: 100.0,
            dt: 0.01,
            seed: 0,
            record_stride: 10,
            transient_fraction: 0.5,
            sampling: ExcitabilitySampling::Stratified,
            redraw_excitabilities: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_neurons == 0 {
            return Err(Error::InvalidParameter("n_neurons must be positive".into()));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.total_time > 0.0) || !self.total_time.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "total_time must be positive, got {}",
                self.total_time
            )));
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return Err(Error::InvalidParameter(format!(
                "transient_fraction must lie in [0, 1), got {}",
                self.transient_fraction
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record_stride must be >= 1".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.total_time / self.dt).round() as usize).max(1)
    }
}

/// Size `b` of the reset subsystem: `γ N` rounded to the nearest integer.
pub fn reset_count(gamma: f64, n_neurons: usize) -> usize {
    ((gamma * n_neurons as f64).round() as usize).min(n_neurons)
}

/// Microscopic state. Neurons `0..reset_count` form the reset subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub phases: Vec<f64>,
    pub excitabilities: Vec<f64>,
    pub reset_count: usize,
    pub time: f64,
}

impl NetworkState {
    /// All phases start at `π`, which is also the reset target.
    pub fn new(excitabilities: Vec<f64>, reset_count: usize) -> Result<Self> {
        if reset_count > excitabilities.len() {
            return Err(Error::InvalidParameter(format!(
                "reset count {reset_count} exceeds network size {}",
                excitabilities.len()
            )));
        }
        Ok(Self {
            phases: vec![PI; excitabilities.len()],
            excitabilities,
            reset_count,
            time: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn reset_range(&self) -> Range<usize> {
        0..self.reset_count
    }

    pub fn nonreset_range(&self) -> Range<usize> {
        self.reset_count..self.phases.len()
    }
}

/// Draws `n` excitabilities; `rng` is only consumed for [`ExcitabilitySampling::Iid`].
pub fn sample_excitabilities<R: Rng>(
    n: usize,
    eta0: f64,
    delta: f64,
    sampling: ExcitabilitySampling,
    rng: &mut R,
) -> Vec<f64> {
    match sampling {
        ExcitabilitySampling::Stratified => (0..n)
            .map(|j| lorentzian_quantile((j as f64 + 0.5) / n as f64, eta0, delta).unwrap())
            .collect(),
        ExcitabilitySampling::Iid => (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                lorentzian_quantile(u, eta0, delta).unwrap()
            })
            .collect(),
    }
}

/// `I_syn = (K/N) Σ_i P_n(θ_i)`.
pub fn synaptic_current(
    state: &NetworkState,
    params: &ModelParams,
    coeffs: &PulseCoefficients,
) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    let sum: f64 = state.phases.iter().map(|&t| coeffs.pulse(t)).sum();
    params.coupling_k * sum / state.len() as f64
}

/// Right-hand side of the phase equations for every neuron.
pub fn phase_derivatives(
    state: &NetworkState,
    params: &ModelParams,
    coeffs: &PulseCoefficients,
) -> Vec<f64> {
    let mut cos = vec![0.0; state.len()];
    let mut out = vec![0.0; state.len()];
    network_field(
        &state.phases,
        &state.excitabilities,
        params.coupling_k,
        coeffs,
        &mut cos,
        &mut out,
    );
    out
}

/// Evaluates all phase velocities, returning the synaptic current used.
fn network_field(
    phases: &[f64],
    eta: &[f64],
    coupling_k: f64,
    coeffs: &PulseCoefficients,
    cos: &mut [f64],
    out: &mut [f64],
) -> f64 {
    let mut pulse_sum = 0.0;
    for (c, &t) in cos.iter_mut().zip(phases) {
        *c = t.cos();
        pulse_sum += coeffs.pulse_from_cos(*c);
    }
    let current = if phases.is_empty() {
        0.0
    } else {
        coupling_k * pulse_sum / phases.len() as f64
    };
    for ((o, &c), &e) in out.iter_mut().zip(cos.iter()).zip(eta) {
        *o = (1.0 - c) + (1.0 + c) * (e + current);
    }
    current
}

/// RK4 buffers sized for one network.
struct NetworkStepper {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
    cos: Vec<f64>,
}

impl NetworkStepper {
    fn new(n: usize) -> Self {
        Self {
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            tmp: vec![0.0; n],
            cos: vec![0.0; n],
        }
    }

    /// Advances `phases` by `dt`; the per-neuron increments are left in `tmp`.
    fn step(
        &mut self,
        phases: &mut [f64],
        eta: &[f64],
        coupling_k: f64,
        coeffs: &PulseCoefficients,
        dt: f64,
    ) -> Result<()> {
        let n = phases.len();
        let weights = [0.5 * dt, 0.5 * dt, dt];
        for stage in 0..4 {
            let current = if stage == 0 {
                let (k, rest) = self.k.split_first_mut().unwrap();
                let _ = rest;
                network_field(phases, eta, coupling_k, coeffs, &mut self.cos, k)
            } else {
                let (before, after) = self.k.split_at_mut(stage);
                let prev = &before[stage - 1];
                let w = weights[stage - 1];
                for i in 0..n {
                    self.tmp[i] = phases[i] + w * prev[i];
                }
                network_field(
                    &self.tmp,
                    eta,
                    coupling_k,
                    coeffs,
                    &mut self.cos,
                    &mut after[0],
                )
            };
            if !current.is_finite() {
                return Err(Error::NonFinite(format!(
                    "synaptic current became {current} in RK4 stage {}",
                    stage + 1
                )));
            }
        }
        let [k1, k2, k3, k4] = &self.k;
        for i in 0..n {
            let inc = dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            self.tmp[i] = inc;
            phases[i] += inc;
        }
        Ok(())
    }
}

/// One classical RK4 step of the whole network; time advances by `dt`.
pub fn rk4_network_step(
    state: &NetworkState,
    params: &ModelParams,
    coeffs: &PulseCoefficients,
    dt: f64,
) -> Result<NetworkState> {
    let mut next = state.clone();
    NetworkStepper::new(state.len()).step(
        &mut next.phases,
        &state.excitabilities,
        params.coupling_k,
        coeffs,
        dt,
    )?;
    next.time += dt;
    Ok(next)
}

/// Exponential waiting time `−ln(u)/λ` for a given uniform `u ∈ (0, 1]`.
pub fn interval_from_uniform(u: f64, lambda: f64) -> f64 {
    -u.ln() / lambda
}

/// Waiting time to the next reset event of a Poisson clock with rate `lambda`.
pub fn sample_reset_interval<R: Rng>(lambda: f64, rng: &mut R) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "reset interval needs a finite positive rate, got {lambda}"
        )));
    }
    let u: f64 = rng.sample(Open01);
    Ok(interval_from_uniform(u, lambda))
}

/// Returns a copy with every reset-subsystem phase set to exactly `π`.
pub fn apply_reset(state: &NetworkState) -> NetworkState {
    let mut next = state.clone();
    pin_reset_phases(&mut next.phases, next.reset_count);
    next
}

fn pin_reset_phases(phases: &mut [f64], b: usize) {
    phases[..b].iter_mut().for_each(|t| *t = PI);
}

/// Mean of `e^{iθ}` over `range`.
pub fn order_parameter(phases: &[f64], range: Range<usize>) -> Result<ComplexMeanField> {
    if range.is_empty() || range.end > phases.len() {
        return Err(Error::InvalidParameter(format!(
            "order parameter needs a non-empty range within 0..{}, got {range:?}",
            phases.len()
        )));
    }
    let len = range.len() as f64;
    let (re, im) = phases[range].iter().fold((0.0, 0.0), |(re, im), &t| {
        let (s, c) = t.sin_cos();
        (re + c, im + s)
    });
    Ok(Complex64::new(re / len, im / len))
}

/// Recorded observables of one realization (or an ensemble mean).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub times: Vec<f64>,
    /// NaN when the reset subsystem is empty.
    pub z_r_series: Vec<ComplexMeanField>,
    /// NaN when the non-reset subsystem is empty.
    pub z_nr_series: Vec<ComplexMeanField>,
    /// Instantaneous non-reset rate from the measured `z_nr`; NaN where singular.
    pub f_nr_series: Vec<f64>,
    /// Time-averaged rate of every neuron over the post-transient window.
    pub per_neuron_rates: Vec<f64>,
    pub reset_count: usize,
    /// Start of the averaging window.
    pub averaging_start: f64,
    /// Number of realizations folded into this record.
    pub realizations: usize,
}

impl SimRecord {
    /// Time average of the instantaneous non-reset rate over the averaging window.
    pub fn steady_f_nr(&self) -> f64 {
        let vals: Vec<f64> = self
            .times
            .iter()
            .zip(&self.f_nr_series)
            .filter(|(t, f)| **t >= self.averaging_start && f.is_finite())
            .map(|(_, f)| *f)
            .collect();
        if vals.is_empty() {
            f64::NAN
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    }

    /// Mean per-neuron firing rate over the non-reset subsystem.
    pub fn nonreset_population_rate(&self) -> f64 {
        let rates = &self.per_neuron_rates[self.reset_count..];
        if rates.is_empty() {
            return f64::NAN;
        }
        rates.iter().sum::<f64>() / rates.len() as f64
    }
}

/// Random stream for realization `index` under `master_seed`.
pub fn realization_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Excitabilities for both blocks. Stratified draws are stratified within each
/// block so that the reset and non-reset neurons sample the same distribution.
pub fn block_excitabilities<R: Rng>(
    config: &SimConfig,
    params: &ModelParams,
    rng: &mut R,
) -> Vec<f64> {
    let n = config.n_neurons;
    let draw = |m: usize, rng: &mut R| {
        sample_excitabilities(m, params.eta0, params.delta, config.sampling, rng)
    };
    match config.sampling {
        ExcitabilitySampling::Iid => draw(n, rng),
        ExcitabilitySampling::Stratified => {
            let b = reset_count(params.gamma, n);
            let mut eta = draw(b, rng);
            eta.extend(draw(n - b, rng));
            eta
        }
    }
}

fn shared_excitabilities(config: &SimConfig, params: &ModelParams) -> Vec<f64> {
    // separate stream so that redraw = false shares draws across realizations
    block_excitabilities(config, params, &mut realization_rng(config.seed, u64::MAX))
}

/// Runs a single realization starting from all phases at `π`.
pub fn run_realization(config: &SimConfig, params: &ModelParams) -> Result<SimRecord> {
    config.validate()?;
    params.validate()?;
    let eta = shared_excitabilities(config, params);
    simulate(config, params, eta, 0)
}

fn simulate(
    config: &SimConfig,
    params: &ModelParams,
    excitabilities: Vec<f64>,
    index: u64,
) -> Result<SimRecord> {
    let mut rng = realization_rng(config.seed, index);
    let excitabilities =
        if config.redraw_excitabilities && config.sampling == ExcitabilitySampling::Iid {
            block_excitabilities(config, params, &mut rng)
        } else {
            excitabilities
        };
    let coeffs = PulseCoefficients::new(params.sharpness_n);
    let b = reset_count(params.gamma, config.n_neurons);
    let mut state = NetworkState::new(excitabilities, b)?;
    let n = state.len();
    let steps = config.steps();
    let dt = config.dt;
    let window_start = ((config.transient_fraction * steps as f64).ceil() as usize).min(steps - 1);

    // None: never reset; Some(inf): every step.
    let mut next_reset = match params.lambda {
        ResetRate::Finite(l) if l > 0.0 && b > 0 => Some(sample_reset_interval(l, &mut rng)?),
        ResetRate::Finite(_) => None,
        ResetRate::Infinite => Some(0.0),
    };

    let capacity = steps / config.record_stride + 1;
    let mut record = SimRecord {
        times: Vec::with_capacity(capacity),
        z_r_series: Vec::with_capacity(capacity),
        z_nr_series: Vec::with_capacity(capacity),
        f_nr_series: Vec::with_capacity(capacity),
        per_neuron_rates: vec![0.0; n],
        reset_count: b,
        averaging_start: window_start as f64 * dt,
        realizations: 1,
    };
    let mut displacement = vec![0.0; n];
    push_sample(&mut record, &state);

    let mut stepper = NetworkStepper::new(n);
    for k in 1..=steps {
        stepper
            .step(
                &mut state.phases,
                &state.excitabilities,
                params.coupling_k,
                &coeffs,
                dt,
            )
            .map_err(|e| Error::NonFinite(format!("step {k} (t = {:.4}): {e}", k as f64 * dt)))?;
        state.time = k as f64 * dt;
        if k > window_start {
            for (d, inc) in displacement.iter_mut().zip(&stepper.tmp) {
                *d += inc;
            }
        }
        match params.lambda {
            ResetRate::Infinite => pin_reset_phases(&mut state.phases, b),
            ResetRate::Finite(l) => {
                if let Some(t_next) = next_reset.as_mut() {
                    if *t_next <= state.time {
                        pin_reset_phases(&mut state.phases, b);
                        while *t_next <= state.time {
                            *t_next += sample_reset_interval(l, &mut rng)?;
                        }
                    }
                }
            }
        }
        if k % config.record_stride == 0 {
            push_sample(&mut record, &state);
        }
    }

    let window = (steps - window_start) as f64 * dt;
    for (r, d) in record.per_neuron_rates.iter_mut().zip(&displacement) {
        *r = d / (2.0 * PI * window);
    }
    Ok(record)
}

fn push_sample(record: &mut SimRecord, state: &NetworkState) {
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let zr = order_parameter(&state.phases, state.reset_range()).unwrap_or(nan);
    let znr = order_parameter(&state.phases, state.nonreset_range()).unwrap_or(nan);
    let f = if znr.re.is_nan() {
        f64::NAN
    } else {
        firing_rate(znr).unwrap_or(f64::NAN)
    };
    record.times.push(state.time);
    record.z_r_series.push(zr);
    record.z_nr_series.push(znr);
    record.f_nr_series.push(f);
}

/// Runs `n_realizations` independent realizations (in parallel) and averages
/// the recorded series pointwise. Realization `r` uses stream `r` of the
/// master seed, so the result does not depend on scheduling.
pub fn ensemble_average(
    config: &SimConfig,
    params: &ModelParams,
    n_realizations: usize,
) -> Result<SimRecord> {
    if n_realizations == 0 {
        return Err(Error::InvalidParameter(
            "n_realizations must be >= 1".into(),
        ));
    }
    config.validate()?;
    params.validate()?;
    let eta = shared_excitabilities(config, params);
    let results: Vec<Result<SimRecord>> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|r| simulate(config, params, eta.clone(), r))
        .collect();

    let failed: Vec<String> = results
        .iter()
        .enumerate()
        .filter_map(|(r, res)| res.as_ref().err().map(|e| format!("realization {r}: {e}")))
        .collect();
    if failed.len() * 10 > n_realizations || failed.len() == n_realizations {
        return Err(Error::Ensemble {
            failed: failed.len(),
            total: n_realizations,
            first: failed[0].clone(),
        });
    }
    let ok: Vec<SimRecord> = results.into_iter().filter_map(|r| r.ok()).collect();
    let count = ok.len() as f64;
    let mut mean = ok[0].clone();
    mean.realizations = ok.len();
    for rec in &ok[1..] {
        for (a, b) in mean.z_r_series.iter_mut().zip(&rec.z_r_series) {
            *a += b;
        }
        for (a, b) in mean.z_nr_series.iter_mut().zip(&rec.z_nr_series) {
            *a += b;
        }
        for (a, b) in mean.f_nr_series.iter_mut().zip(&rec.f_nr_series) {
            *a += b;
        }
        for (a, b) in mean.per_neuron_rates.iter_mut().zip(&rec.per_neuron_rates) {
            *a += b;
        }
    }
    if ok.len() > 1 {
        mean.z_r_series.iter_mut().for_each(|z| *z /= count);
        mean.z_nr_series.iter_mut().for_each(|z| *z /= count);
        mean.f_nr_series.iter_mut().for_each(|f| *f /= count);
        mean.per_neuron_rates.iter_mut().for_each(|f| *f /= count);
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(phases: Vec<f64>, eta: Vec<f64>, b: usize) -> NetworkState {
        NetworkState {
            phases,
            excitabilities: eta,
            reset_count: b,
            time: 0.0,
        }
    }

    #[test]
    fn synaptic_current_examples() {
        let c = PulseCoefficients::new(2);
        let p = ModelParams::new(0.0, 1.0, 0.0);
        let s = state(vec![0.0; 10], vec![0.0; 10], 0);
        assert_eq!(synaptic_current(&s, &p, &c), 0.0);
        let s = state(vec![PI; 10], vec![0.0; 10], 0);
        assert!((synaptic_current(&s, &p, &c) - 8.0 / 3.0).abs() < 1e-14);
        let mut phases = vec![0.0; 10];
        phases[..3].iter_mut().for_each(|t| *t = PI);
        let s = state(phases, vec![0.0; 10], 3);
        assert!((synaptic_current(&s, &p, &c) - 0.3 * 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn phase_derivative_examples() {
        let c = PulseCoefficients::new(2);
        let p = ModelParams::new(0.0, 0.0, 0.0);
        let d = phase_derivatives(
            &state(vec![PI, 0.0, PI / 2.0], vec![5.0, -0.5, 0.0], 0),
            &p,
            &c,
        );
        assert!((d[0] - 2.0).abs() < 1e-15);
        assert!((d[1] + 1.0).abs() < 1e-15);
        assert!((d[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rk4_step_examples() {
        let c = PulseCoefficients::new(2);
        let p = ModelParams::new(0.0, 0.0, 0.0);
        // equilibrium at θ = π/2 for η = −1
        let s = state(vec![PI / 2.0], vec![-1.0], 0);
        let next = rk4_network_step(&s, &p, &c, 0.1).unwrap();
        assert!((next.phases[0] - PI / 2.0).abs() < 1e-15);
        assert!((next.time - 0.1).abs() < 1e-15);
        let same = rk4_network_step(&s, &p, &c, 0.0).unwrap();
        assert_eq!(same.phases, s.phases);
    }

    #[test]
    fn rk4_step_has_fifth_order_local_error() {
        let c = PulseCoefficients::new(2);
        let p = ModelParams::new(0.0, 0.0, 0.0);
        let s = state(vec![PI], vec![0.0], 0);
        // θ' = 1 − cos θ from π solves to θ = π + 2 atan(t)
        let err =
            |dt: f64| rk4_network_step(&s, &p, &c, dt).unwrap().phases[0] - PI - 2.0 * dt.atan();
        assert!(err(0.01).abs() < 5e-12);
        let ratio = err(0.04) / err(0.02);
        assert!((28.0..=36.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn reset_examples() {
        let s = state(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0.0; 5], 3);
        assert_eq!(apply_reset(&s).phases, vec![PI, PI, PI, 3.0, 4.0]);
        let s0 = state(vec![0.0, 1.0], vec![0.0; 2], 0);
        assert_eq!(apply_reset(&s0), s0);
        let all = state(vec![0.3, 1.0], vec![0.0; 2], 2);
        assert_eq!(apply_reset(&all).phases, vec![PI, PI]);
    }

    #[test]
    fn interval_examples() {
        let t = interval_from_uniform((-1.0f64).exp(), 1.0);
        assert!((t - 1.0).abs() < 1e-15);
        let mut rng = realization_rng(7, 0);
        assert!(sample_reset_interval(0.0, &mut rng).is_err());
        assert!(sample_reset_interval(-1.0, &mut rng).is_err());
    }

    #[test]
    fn order_parameter_examples() {
        let z = order_parameter(&[PI, PI, PI], 0..3).unwrap();
        assert_eq!(z, Complex64::new(-1.0, 0.0) + Complex64::new(0.0, z.im));
        assert!(z.im.abs() < 1e-15);
        let z = order_parameter(&[0.0, PI], 0..2).unwrap();
        assert!(z.norm() < 1e-15);
        let z = order_parameter(&[0.0, PI / 2.0], 0..2).unwrap();
        assert!((z - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        assert!(order_parameter(&[0.0], 0..0).is_err());
    }

    #[test]
    fn reset_count_rounds() {
        assert_eq!(reset_count(0.5, 5), 3);
        assert_eq!(reset_count(0.2, 10_000), 2000);
        assert_eq!(reset_count(1.0, 7), 7);
    }

    #[test]
    fn config_validation_messages() {
        let cfg = SimConfig {
            n_neurons: 0,
            ..SimConfig::default()
        };
        assert_eq!(
            cfg.validate().unwrap_err().to_string(),
            "invalid parameter: n_neurons must be positive"
        );
    }

    #[test]
    fn stratified_sampling_is_symmetric() {
        let mut rng = realization_rng(0, 0);
        let eta =
            sample_excitabilities(1001, -2.0, 0.1, ExcitabilitySampling::Stratified, &mut rng);
        assert_eq!(eta[500], -2.0);
        assert!((eta[0] + eta[1000] + 4.0).abs() < 1e-9);
    }

    #[test]
    fn stratified_blocks_share_the_distribution() {
        let cfg = SimConfig {
            n_neurons: 12,
            ..SimConfig::default()
        };
        let p = ModelParams::new(-2.0, 2.0, 5.0 / 12.0);
        let eta = block_excitabilities(&cfg, &p, &mut realization_rng(0, 0));
        assert_eq!(eta.len(), 12);
        assert_eq!(eta[2], -2.0);
        assert_eq!(eta[5 + 3], -2.0);
        assert!((eta[0] + eta[4] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_rate_keeps_reset_block_pinned() {
        let cfg = SimConfig {
            n_neurons: 50,
            total_time: 2.0,
            dt: 0.01,
            record_stride: 1,
            ..SimConfig::default()
        };
        let rec = run_realization(&cfg, &ModelParams::new(1.0, 2.0, 0.4)).unwrap();
        assert!(rec.z_r_series.iter().all(|z| z.re == -1.0));
        assert_eq!(rec.reset_count, 20);
        assert!(rec.per_neuron_rates[..20].iter().all(|&f| f > 0.0));
    }
}
