//! State-vector integration of `i dψ/dt = H(s(t)) ψ` from the ground state
//! of `H_init`.
//!
//! Each step of length `dt` uses the symmetric splitting
//! `e^{−i s E dt/2} · Π_i e^{i (1−s) Δ_i dt σ^x_i} · e^{−i s E dt/2}` with
//! `s` at the step midpoint. Every factor is applied exactly, so the
//! propagator is unitary up to rounding.

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::{ground_space, lowest_eigs, EigenOptions, SystemSpec};

const PAR_MIN_LEN: usize = 1 << 12;

/// Step-size rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DtRule {
    /// `min(0.01, 0.1 / spectral scale)`.
    Default,
    Fixed(f64),
}

impl DtRule {
    pub fn resolve(self, spectral_scale: f64) -> f64 {
        match self {
            DtRule::Default => (0.1 / spectral_scale).min(0.01),
            DtRule::Fixed(dt) => dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolveOptions {
    pub dt: DtRule,
    /// Largest accepted `dt · spectral scale`.
    pub max_phase_per_step: f64,
    pub norm_bound: f64,
    /// Number of overlap samples; 0 disables the trace.
    pub trace_samples: usize,
    pub eigen: EigenOptions,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: DtRule::Default,
            max_phase_per_step: 1.0,
            norm_bound: 1e-8,
            trace_samples: 100,
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub s: f64,
    /// `|⟨ground(s)|ψ(t)⟩|²`.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionResult {
    pub total_time: f64,
    /// Step actually used: `T / steps`.
    pub dt: f64,
    pub steps: usize,
    /// Weight of the final state on the ground space of the problem
    /// Hamiltonian.
    pub success_probability: f64,
    pub overlap_trace: Vec<TracePoint>,
    /// `max_t |‖ψ(t)‖ − 1|`.
    pub norm_drift: f64,
}

/// Runs the sweep for total time `total_time`.
pub fn evolve<F: Real>(spec: &SystemSpec<F>, total_time: f64, opts: &EvolveOptions) -> Result<EvolutionResult> {
    if !(total_time >= 0.0 && total_time.is_finite()) {
        return Err(Error::InvalidArgument(format!("total time {total_time} must be finite and non-negative")));
    }
    let scale = to_f64(spec.spectral_scale());
    let requested = opts.dt.resolve(scale);
    let max_dt = opts.max_phase_per_step / scale;
    if !(requested > 0.0) || requested > max_dt {
        return Err(Error::StepTooLarge { dt: requested, max: max_dt });
    }
    let steps = (total_time / requested).ceil() as usize;
    let dt = if steps == 0 { 0.0 } else { total_time / steps as f64 };

    let dim = spec.dim();
    let amp: F = lit(1.0 / (dim as f64).sqrt());
    let mut psi = vec![Complex::new(amp, F::zero()); dim];

    let samples = opts.trace_samples;
    let sample_steps: Vec<usize> = match samples {
        0 => vec![],
        1 => vec![steps],
        _ => (0..samples).map(|j| ((j * steps) as f64 / (samples - 1) as f64).round() as usize).collect(),
    };
    let (_, ground) = ground_space(spec);
    let mut trace = Vec::with_capacity(samples);
    let mut next_sample = 0;
    let mut drift = 0f64;

    for step in 0..=steps {
        while next_sample < sample_steps.len() && sample_steps[next_sample] == step {
            let s = if steps == 0 { 1.0 } else { step as f64 / steps as f64 };
            trace.push(TracePoint {
                t: step as f64 * dt,
                s,
                overlap: instantaneous_overlap(spec, s, &psi, &ground, &opts.eigen)?,
            });
            next_sample += 1;
        }
        if step == steps {
            break;
        }
        let s: F = lit((step as f64 + 0.5) / steps as f64);
        split_step(spec, s, lit(dt), &mut psi);
        let nrm = to_f64(norm_sqr(&psi)).sqrt();
        drift = drift.max((nrm - 1.0).abs());
        if drift > opts.norm_bound {
            return Err(Error::NormDrift { drift, bound: opts.norm_bound, step: step + 1 });
        }
    }
    let success: f64 = ground.iter().map(|&b| to_f64(psi[b].norm_sqr())).sum();
    Ok(EvolutionResult {
        total_time,
        dt,
        steps,
        success_probability: success.clamp(0.0, 1.0),
        overlap_trace: trace,
        norm_drift: drift,
    })
}

fn norm_sqr<F: Real>(psi: &[Complex<F>]) -> F {
    psi.par_iter().with_min_len(PAR_MIN_LEN).map(|z| z.norm_sqr()).reduce(F::zero, |a, b| a + b)
}

fn diagonal_phase<F: Real>(spec: &SystemSpec<F>, s: F, tau: F, psi: &mut [Complex<F>]) {
    psi.par_iter_mut().with_min_len(PAR_MIN_LEN).zip(spec.diagonal().par_iter()).for_each(|(z, &e)| {
        let phi = -(s * e * tau);
        *z *= Complex::new(phi.cos(), phi.sin());
    });
}

fn split_step<F: Real>(spec: &SystemSpec<F>, s: F, dt: F, psi: &mut [Complex<F>]) {
    let half = dt * lit(0.5);
    diagonal_phase(spec, s, half, psi);
    for (i, &delta) in spec.transverse().iter().enumerate() {
        // e^{iθσx} = cos θ + i sin θ σx
        let theta = (F::one() - s) * delta * dt;
        let (c, sn) = (theta.cos(), theta.sin());
        let mask = 1usize << i;
        let block = mask << 1;
        psi.par_chunks_mut(block).with_min_len((PAR_MIN_LEN / block).max(1)).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(mask);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x * c + Complex::new(-(y.im * sn), y.re * sn);
                *b = y * c + Complex::new(-(x.im * sn), x.re * sn);
            }
        });
    }
    diagonal_phase(spec, s, half, psi);
}

fn instantaneous_overlap<F: Real>(
    spec: &SystemSpec<F>,
    s: f64,
    psi: &[Complex<F>],
    ground_at_end: &[usize],
    eigen: &EigenOptions,
) -> Result<f64> {
    if s >= 1.0 {
        return Ok(ground_at_end.iter().map(|&b| to_f64(psi[b].norm_sqr())).sum());
    }
    let e = lowest_eigs(spec, lit(s), 1, true, eigen)?;
    let g = &e.vectors.expect("requested")[0];
    let amp = g.iter().zip(psi).fold(Complex::new(F::zero(), F::zero()), |acc, (&gi, &z)| acc + z * gi);
    Ok(to_f64(amp.norm_sqr()))
}

/// One [`evolve`] per entry of a strictly increasing list of total times,
/// run in parallel and returned in input order.
pub fn success_curve<F: Real>(
    spec: &SystemSpec<F>,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<EvolutionResult>> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty list of total times".into()));
    }
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("total times must be strictly increasing".into()));
    }
    times.par_iter().map(|&t| evolve(spec, t, opts)).collect()
}

/// CSV with columns `T,success_probability,norm_drift`.
pub fn write_curve_csv<W: Write>(results: &[EvolutionResult], mut w: W) -> std::io::Result<()> {
    writeln!(w, "T,success_probability,norm_drift")?;
    for r in results {
        writeln!(w, "{},{},{}", r.total_time, r.success_probability, r.norm_drift)?;
    }
    Ok(())
}

/// CSV with columns `t,s,overlap`.
pub fn write_trace_csv<W: Write>(result: &EvolutionResult, mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,s,overlap")?;
    for p in &result.overlap_trace {
        writeln!(w, "{},{},{}", p.t, p.s, p.overlap)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::IsingModel;

    fn one_qubit() -> SystemSpec<f64> {
        SystemSpec::with_uniform_field(IsingModel::new(vec![1.0], [], 0.0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn sudden_limit_keeps_uniform_state() {
        let r = evolve(&one_qubit(), 0.0, &EvolveOptions::default()).unwrap();
        assert_eq!(r.steps, 0);
        assert!((r.success_probability - 0.5).abs() < 1e-15);
    }

    #[test]
    fn slow_sweep_succeeds() {
        let r = evolve(&one_qubit(), 50.0, &EvolveOptions::default()).unwrap();
        assert!(r.success_probability > 0.99, "{}", r.success_probability);
        assert!(r.norm_drift < 1e-8);
        assert_eq!(r.overlap_trace.len(), 100);
        assert_eq!(r.overlap_trace[0].overlap.min(1.0), r.overlap_trace[0].overlap);
    }

    #[test]
    fn oversized_step_rejected() {
        let opts = EvolveOptions { dt: DtRule::Fixed(5.0), ..Default::default() };
        assert!(matches!(evolve(&one_qubit(), 10.0, &opts), Err(Error::StepTooLarge { .. })));
    }
}
