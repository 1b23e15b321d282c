//! Real-coded genetic algorithm over pulse-sequence parameters.
//!
//! Parameter vectors use the layout `[τ₀, t₁, φ₁, τ₁, …, t_n, φ_n, τ_n]`
//! (length `3n + 1`): durations in μs, phases in degrees.
//!
//! The algorithm is a generational, elitist GA: tournament selection, uniform
//! crossover, per-gene Gaussian mutation (clipped to the bounds for durations,
//! wrapped modulo 360° for phases). When the population stops improving for
//! [`GaConfig::restart_after`] generations it is reseeded at random; the best
//! individual found so far is kept in the result. All random draws come from a single
//! ChaCha generator seeded from [`GaConfig::seed`]; fitness evaluations run in
//! parallel but never touch the generator, so a run is reproducible bit for
//! bit regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pulse::{
    gate_fidelity, robust_gate_fidelity, sequence_unitary, wrap_phase, ControlSystem,
    PulseSequence, RabiRange, Segment,
};
use crate::spinsys::{CarbonCoupling, NVParams, Operator};
use crate::targets::TargetSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterBounds {
    pub n_pulses: usize,
    /// `[lo, hi]` per pulse duration.
    pub pulse_us: Vec<[f64; 2]>,
    /// `[lo, hi]` per delay, `τ₀…τ_n`.
    pub delay_us: Vec<[f64; 2]>,
}

impl ParameterBounds {
    /// Same bounds for every pulse and every delay.
    pub fn uniform(n_pulses: usize, pulse_us: [f64; 2], delay_us: [f64; 2]) -> Self {
        Self {
            n_pulses,
            pulse_us: vec![pulse_us; n_pulses],
            delay_us: vec![delay_us; n_pulses + 1],
        }
    }

    /// Pulses in `[0, 4]` μs and delays in `[0, 6]` μs, which cover every published table.
    pub fn default_for(n_pulses: usize) -> Self {
        Self::uniform(n_pulses, [0.0, 4.0], [0.0, 6.0])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pulses == 0 {
            return Err(Error::InvalidConfig("need at least one pulse".into()));
        }
        if self.pulse_us.len() != self.n_pulses || self.delay_us.len() != self.n_pulses + 1 {
            return Err(Error::InvalidConfig(format!(
                "bounds for {} pulses need {} pulse and {} delay ranges",
                self.n_pulses,
                self.n_pulses,
                self.n_pulses + 1
            )));
        }
        for &[lo, hi] in self.pulse_us.iter().chain(&self.delay_us) {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(Error::InvalidConfig(format!("bad range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn n_genes(&self) -> usize {
        3 * self.n_pulses + 1
    }

    pub fn genes(&self) -> Vec<Gene> {
        let mut g = Vec::with_capacity(self.n_genes());
        g.push(Gene::Linear(self.delay_us[0]));
        for k in 0..self.n_pulses {
            g.push(Gene::Linear(self.pulse_us[k]));
            g.push(Gene::Phase);
            g.push(Gene::Linear(self.delay_us[k + 1]));
        }
        g
    }

    pub fn contains(&self, params: &[f64]) -> bool {
        params.len() == self.n_genes()
            && self.genes().iter().zip(params).all(|(g, &x)| g.contains(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gene {
    Linear([f64; 2]),
    /// Degrees on the circle `[0, 360)`.
    Phase,
}

impl Gene {
    fn span(&self) -> f64 {
        match self {
            Gene::Linear([lo, hi]) => hi - lo,
            Gene::Phase => 360.0,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Gene::Linear([lo, hi]) => lo + (hi - lo) * rng.random::<f64>(),
            Gene::Phase => wrap_phase(360.0 * rng.random::<f64>()),
        }
    }

    fn project(&self, x: f64) -> f64 {
        match *self {
            Gene::Linear([lo, hi]) => x.clamp(lo, hi),
            Gene::Phase => wrap_phase(x),
        }
    }

    fn contains(&self, x: f64) -> bool {
        match *self {
            Gene::Linear([lo, hi]) => (lo..=hi).contains(&x),
            Gene::Phase => (0.0..360.0).contains(&x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each gene's range.
    pub mutation_sigma: f64,
    pub elite_count: usize,
    pub tournament_size: usize,
    /// Stop as soon as the best fitness reaches this value.
    pub target_fitness: f64,
    /// Reinitialize the population after this many generations without the
    /// population best improving by more than 1e-6. `0` disables restarts.
    pub restart_after: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            max_generations: 1000,
            crossover_rate: 0.9,
            mutation_rate: 0.3,
            mutation_sigma: 0.05,
            elite_count: 2,
            tournament_size: 3,
            target_fitness: 0.99,
            restart_after: 15,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.population_size < 2 {
            return bad(format!("population_size must be >= 2, got {}", self.population_size));
        }
        if self.elite_count > self.population_size {
            return bad("elite_count exceeds population_size".into());
        }
        if self.tournament_size < 2 {
            return bad("tournament_size must be >= 2".into());
        }
        for (name, v) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.mutation_sigma.is_finite() && self.mutation_sigma > 0.0) {
            return bad("mutation_sigma must be > 0".into());
        }
        if !self.target_fitness.is_finite() {
            return bad("target_fitness must be finite".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_params: Vec<f64>,
    pub best_fitness: f64,
    /// Best fitness found so far after each generation; entry 0 is the initial population.
    pub trace: Vec<f64>,
    pub generations_run: usize,
    pub evaluations: usize,
}

impl OptimizationResult {
    /// First generation whose best fitness reaches `threshold`.
    pub fn generations_to(&self, threshold: f64) -> Option<usize> {
        self.trace.iter().position(|&f| f >= threshold)
    }

    /// `generation,best_fitness` rows with a header.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("generation,best_fitness\n");
        for (g, f) in self.trace.iter().enumerate() {
            out.push_str(&format!("{g},{}\n", crate::report::fmt_num(*f)));
        }
        out
    }
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::NEG_INFINITY
    } else {
        f
    }
}

fn evaluate<F>(objective: &F, pop: &[Vec<f64>]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pop.par_iter().map(|ind| sanitize(objective(ind))).collect()
}

fn tournament<R: Rng>(rng: &mut R, fitness: &[f64], size: usize) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Maximizes `objective` over the box `bounds`.
pub fn optimize<F>(objective: F, bounds: &ParameterBounds, config: &GaConfig) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    bounds.validate()?;
    config.validate()?;
    let genes = bounds.genes();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let random_population = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..config.population_size)
            .map(|_| genes.iter().map(|g| g.sample(rng)).collect())
            .collect()
    };
    let mut pop = random_population(&mut rng);
    let mut fitness = evaluate(&objective, &pop);
    let mut evaluations = pop.len();

    let mut best_idx = argmax(&fitness);
    let mut best_params = pop[best_idx].clone();
    let mut best_fitness = fitness[best_idx];
    let mut trace = vec![best_fitness];
    // Best of the current population since the last restart.
    let mut epoch_best = best_fitness;
    let mut stale = 0;

    let mut generation = 0;
    while generation < config.max_generations && best_fitness < config.target_fitness {
        generation += 1;

        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));

        let mut next: Vec<Vec<f64>> = Vec::with_capacity(pop.len());
        let mut next_fit: Vec<f64> = Vec::with_capacity(pop.len());
        for &i in order.iter().take(config.elite_count) {
            next.push(pop[i].clone());
            next_fit.push(fitness[i]);
        }
        let n_elite = next.len();

        while next.len() < pop.len() {
            let a = tournament(&mut rng, &fitness, config.tournament_size);
            let b = tournament(&mut rng, &fitness, config.tournament_size);
            let mut child = if rng.random::<f64>() < config.crossover_rate {
                pop[a]
                    .iter()
                    .zip(&pop[b])
                    .map(|(&x, &y)| if rng.random::<bool>() { x } else { y })
                    .collect()
            } else {
                pop[a].clone()
            };
            for (x, g) in child.iter_mut().zip(&genes) {
                if rng.random::<f64>() < config.mutation_rate {
                    let z: f64 = rng.sample(StandardNormal);
                    *x = g.project(*x + z * config.mutation_sigma * g.span());
                }
            }
            next.push(child);
        }

        next_fit.extend(evaluate(&objective, &next[n_elite..]));
        evaluations += next.len() - n_elite;
        pop = next;
        fitness = next_fit;

        best_idx = argmax(&fitness);
        if fitness[best_idx] > epoch_best + 1e-6 {
            epoch_best = fitness[best_idx];
            stale = 0;
        } else {
            stale += 1;
        }
        if config.restart_after > 0 && stale >= config.restart_after {
            pop = random_population(&mut rng);
            fitness = evaluate(&objective, &pop);
            evaluations += pop.len();
            best_idx = argmax(&fitness);
            epoch_best = fitness[best_idx];
            stale = 0;
        }
        if fitness[best_idx] > best_fitness {
            best_fitness = fitness[best_idx];
            best_params = pop[best_idx].clone();
        }
        trace.push(best_fitness);
    }

    Ok(OptimizationResult {
        best_params,
        best_fitness,
        trace,
        generations_run: generation,
        evaluations,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

pub fn encode_params(seq: &PulseSequence) -> Vec<f64> {
    let mut v = Vec::with_capacity(3 * seq.n_pulses() + 1);
    v.push(seq.lead_delay_us);
    for s in &seq.segments {
        v.extend_from_slice(&[s.pulse_us, s.phase_deg, s.post_delay_us]);
    }
    v
}

pub fn decode_params(params: &[f64], n_pulses: usize, rabi_mhz: f64) -> Result<PulseSequence> {
    if params.len() != 3 * n_pulses + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} pulses need {} parameters, got {}",
            n_pulses,
            3 * n_pulses + 1,
            params.len()
        )));
    }
    let segments = params[1..]
        .chunks_exact(3)
        .map(|c| Segment {
            pulse_us: c[0],
            phase_deg: c[1],
            post_delay_us: c[2],
        })
        .collect();
    PulseSequence::new(rabi_mhz, params[0], segments)
}

/// Fidelity of decoded parameter vectors against a fixed target.
#[derive(Debug, Clone)]
pub struct SequenceObjective {
    system: ControlSystem,
    target: Operator,
    n_pulses: usize,
    rabi_mhz: f64,
    robust: Option<RabiRange>,
}

impl SequenceObjective {
    pub fn new(
        system: ControlSystem,
        target: Operator,
        n_pulses: usize,
        rabi_mhz: f64,
        robust: Option<RabiRange>,
    ) -> Result<Self> {
        if target.nrows() != system.dim() || target.ncols() != system.dim() {
            return Err(Error::InvalidTarget(format!(
                "target dimension {} does not match system dimension {}",
                target.nrows(),
                system.dim()
            )));
        }
        Ok(Self {
            system,
            target,
            n_pulses,
            rabi_mhz,
            robust,
        })
    }

    pub fn n_pulses(&self) -> usize {
        self.n_pulses
    }

    pub fn rabi_mhz(&self) -> f64 {
        self.rabi_mhz
    }

    pub fn system(&self) -> &ControlSystem {
        &self.system
    }

    pub fn target(&self) -> &Operator {
        &self.target
    }

    pub fn try_fidelity(&self, params: &[f64]) -> Result<f64> {
        let seq = decode_params(params, self.n_pulses, self.rabi_mhz)?;
        match self.robust {
            None => gate_fidelity(&sequence_unitary(&seq, &self.system, None)?, &self.target),
            Some(r) => robust_gate_fidelity(&seq, &self.target, &self.system, r.lo, r.hi, r.samples),
        }
    }

    /// Invalid vectors score 0.
    pub fn fidelity(&self, params: &[f64]) -> f64 {
        self.try_fidelity(params).unwrap_or(0.0)
    }
}

pub fn make_sequence_objective(
    target: &TargetSpec,
    n_pulses: usize,
    params: &NVParams,
    couplings: &[CarbonCoupling],
    rabi_mhz: f64,
    robust: Option<RabiRange>,
) -> Result<SequenceObjective> {
    let system = ControlSystem::multi_carbon(params, couplings)?;
    SequenceObjective::new(system, target.unitary()?, n_pulses, rabi_mhz, robust)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinsys::{trace, PAPER_COUPLINGS};

    #[test]
    fn encode_decode_layout() {
        let v = vec![1.0, 0.5, 90.0, 2.0, 0.25, 180.0, 3.0];
        let seq = decode_params(&v, 2, 0.5).unwrap();
        assert_eq!(seq.lead_delay_us, 1.0);
        assert_eq!(seq.segments[1].phase_deg, 180.0);
        assert_eq!(encode_params(&seq), v);
        assert!(decode_params(&v, 3, 0.5).is_err());
        let zero = decode_params(&[0.0; 4], 1, 0.5).unwrap();
        assert_eq!(crate::pulse::sequence_duration(&zero), 0.0);
    }

    #[test]
    fn config_json_uses_exact_field_names() {
        let cfg = GaConfig::from_json(r#"{"population_size": 20, "seed": 7}"#).unwrap();
        assert_eq!(cfg.population_size, 20);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tournament_size, 3);
        assert!(GaConfig::from_json(r#"{"population": 20}"#).is_err());
        assert!(GaConfig::from_json(r#"{"tournament_size": 1}"#).is_err());
        assert!(GaConfig::from_json(r#"{"mutation_rate": 1.5}"#).is_err());
        let round = serde_json::to_string(&GaConfig::default()).unwrap();
        assert_eq!(GaConfig::from_json(&round).unwrap(), GaConfig::default());
    }

    #[test]
    fn bounds_validation() {
        assert!(ParameterBounds::default_for(0).validate().is_err());
        let mut b = ParameterBounds::default_for(2);
        assert!(b.validate().is_ok());
        assert_eq!(b.n_genes(), 7);
        b.pulse_us[0] = [2.0, 1.0];
        assert!(b.validate().is_err());
    }

    /// Separable quadratic bowl with its optimum inside the box.
    fn bowl(bounds: &ParameterBounds) -> (Vec<f64>, impl Fn(&[f64]) -> f64 + Sync) {
        let genes = bounds.genes();
        let center: Vec<f64> = genes
            .iter()
            .enumerate()
            .map(|(i, g)| match g {
                Gene::Linear([lo, hi]) => lo + (hi - lo) * (0.2 + 0.07 * i as f64),
                Gene::Phase => 123.0,
            })
            .collect();
        let c = center.clone();
        let f = move |x: &[f64]| {
            let d: f64 = x
                .iter()
                .zip(&c)
                .zip(&genes)
                .map(|((a, b), g)| ((a - b) / g.span()).powi(2))
                .sum();
            1.0 - d / x.len() as f64
        };
        (center, f)
    }

    #[test]
    fn solves_separable_quadratic() {
        let bounds = ParameterBounds::default_for(2);
        let (_, f) = bowl(&bounds);
        let cfg = GaConfig {
            population_size: 50,
            max_generations: 200,
            target_fitness: 2.0,
            seed: 11,
            ..GaConfig::default()
        };
        let res = optimize(&f, &bounds, &cfg).unwrap();
        assert!(res.best_fitness > 0.999, "{}", res.best_fitness);
        assert!(res.trace.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(res.best_fitness, *res.trace.last().unwrap());
        assert_eq!(res.generations_run, 200);
        assert_eq!(res.trace.len(), 201);
        assert!(bounds.contains(&res.best_params));
    }

    #[test]
    fn stops_at_target_and_is_deterministic() {
        let bounds = ParameterBounds::default_for(1);
        let (_, f) = bowl(&bounds);
        let cfg = GaConfig {
            population_size: 30,
            max_generations: 500,
            target_fitness: 0.99,
            seed: 3,
            ..GaConfig::default()
        };
        let a = optimize(&f, &bounds, &cfg).unwrap();
        let b = optimize(&f, &bounds, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.generations_run < 500);
        assert_eq!(a.generations_to(0.99), Some(a.generations_run));
        let other = optimize(&f, &bounds, &GaConfig { seed: 4, ..cfg }).unwrap();
        assert_ne!(a.best_params, other.best_params);
    }

    #[test]
    fn zero_durations_give_identity_overlap() {
        let target = TargetSpec::grover2(3);
        let obj = make_sequence_objective(
            &target,
            4,
            &NVParams::default(),
            &PAPER_COUPLINGS[..1],
            0.5,
            None,
        )
        .unwrap();
        let u_t = target.unitary().unwrap();
        let expect = trace(&u_t).norm() / 4.0;
        let zero = vec![0.0; 13];
        assert!((obj.fidelity(&zero) - expect).abs() < 1e-12);
        assert_eq!(obj.fidelity(&[0.0; 5]), 0.0);

        let wrong = make_sequence_objective(
            &TargetSpec::controlled_rx(2, 1),
            3,
            &NVParams::default(),
            &PAPER_COUPLINGS[..1],
            0.5,
            None,
        );
        assert!(wrong.is_err());
    }
}
