//! The estimator operations behind each survey figure.

use crate::gates::Gate;
use crate::measures::entanglement_of_formation;
use crate::sampling::{
    sample_conditioned, sample_state, Band, Ensemble, RngStream, SampleError,
};
use crate::stats::Moments;

use super::hist::{BinSpec, ConditionalCurve, Histogram};
use super::run::{map_shards, stream_id, try_map_shards, ExecMode};

/// Seed, task index and execution mode shared by one estimator invocation.
///
/// Tasks running under the same seed must use distinct task indices so their
/// shards draw from disjoint RNG streams.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorCtx {
    pub seed: u64,
    pub task: u32,
    pub mode: ExecMode,
}

impl EstimatorCtx {
    pub fn new(seed: u64, task: u32, mode: ExecMode) -> Self {
        Self { seed, task, mode }
    }

    fn stream(&self, shard: u32) -> RngStream {
        RngStream::new(self.seed, stream_id(self.task, shard))
    }
}

/// Empirical P(E) over one ensemble, with the running moments of E.
pub fn entanglement_histogram(
    ctx: &EstimatorCtx,
    ensemble: Ensemble,
    samples: u64,
    spec: BinSpec,
) -> (Histogram, Moments) {
    let partials = map_shards(samples, ctx.mode, |shard| {
        let mut rng = ctx.stream(shard.index);
        let mut hist = Histogram::new(spec);
        let mut moments = Moments::new();
        for _ in 0..shard.samples {
            let rho = sample_state(&mut rng, ensemble);
            let e = entanglement_of_formation(&rho).value();
            hist.record(e);
            moments.push(e);
        }
        (hist, moments)
    });

    let mut hist = Histogram::new(spec);
    let mut moments = Moments::new();
    for (h, m) in &partials {
        hist.merge(h);
        moments.merge(m);
    }
    (hist, moments)
}

/// P(E_F) for a gate acting on exactly separable initial states.
pub fn gate_from_separable(
    ctx: &EstimatorCtx,
    gate: &Gate,
    accepted: u64,
    spec: BinSpec,
    budget: u64,
) -> Result<(Histogram, Moments), SampleError> {
    let partials = try_map_shards(accepted, ctx.mode, |shard| {
        let mut rng = ctx.stream(shard.index);
        let mut hist = Histogram::new(spec);
        let mut moments = Moments::new();
        for _ in 0..shard.samples {
            let rho =
                sample_conditioned(&mut rng, Ensemble::All, &Band::EntanglementZero, budget)?;
            let e_final = entanglement_of_formation(&gate.apply(&rho)).value();
            hist.record(e_final);
            moments.push(e_final);
        }
        Ok((hist, moments))
    })?;

    let mut hist = Histogram::new(spec);
    let mut moments = Moments::new();
    for (h, m) in &partials {
        hist.merge(h);
        moments.merge(m);
    }
    Ok((hist, moments))
}

/// ⟨E_F⟩ binned over E₀, one curve per gate, from a shared sample stream.
pub fn mean_final_vs_initial(
    ctx: &EstimatorCtx,
    gates: &[Gate],
    ensemble: Ensemble,
    samples: u64,
    spec: BinSpec,
) -> Vec<ConditionalCurve> {
    let partials = map_shards(samples, ctx.mode, |shard| {
        let mut rng = ctx.stream(shard.index);
        let mut curves: Vec<ConditionalCurve> =
            gates.iter().map(|_| ConditionalCurve::new(spec)).collect();
        for _ in 0..shard.samples {
            let rho = sample_state(&mut rng, ensemble);
            let e_initial = entanglement_of_formation(&rho).value();
            for (gate, curve) in gates.iter().zip(curves.iter_mut()) {
                let e_final = entanglement_of_formation(&gate.apply(&rho)).value();
                curve.record(e_initial, e_final);
            }
        }
        curves
    });

    let mut curves: Vec<ConditionalCurve> =
        gates.iter().map(|_| ConditionalCurve::new(spec)).collect();
    for partial in &partials {
        for (curve, p) in curves.iter_mut().zip(partial.iter()) {
            curve.merge(p);
        }
    }
    curves
}

/// P(ΔE) per gate plus the random-pair reference distribution.
#[derive(Debug, Clone)]
pub struct DeltaEDistribution {
    /// Parallel to the gate list passed in.
    pub histograms: Vec<Histogram>,
    /// Moments of ΔE, parallel to the gate list.
    pub delta_moments: Vec<Moments>,
    /// ΔE between two independently drawn states.
    pub reference: Histogram,
    pub reference_moments: Moments,
}

/// Distribution of the entanglement change per gate.
///
/// The reference pairs the sample's E₀ with the entanglement of one extra
/// independent draw per sample, giving the change between two randomly chosen
/// states on the same budget.
pub fn delta_e_distribution(
    ctx: &EstimatorCtx,
    gates: &[Gate],
    ensemble: Ensemble,
    samples: u64,
    spec: BinSpec,
) -> DeltaEDistribution {
    struct Partial {
        histograms: Vec<Histogram>,
        delta_moments: Vec<Moments>,
        reference: Histogram,
        reference_moments: Moments,
    }

    let partials = map_shards(samples, ctx.mode, |shard| {
        let mut rng = ctx.stream(shard.index);
        let mut partial = Partial {
            histograms: gates.iter().map(|_| Histogram::new(spec)).collect(),
            delta_moments: vec![Moments::new(); gates.len()],
            reference: Histogram::new(spec),
            reference_moments: Moments::new(),
        };
        for _ in 0..shard.samples {
            let rho = sample_state(&mut rng, ensemble);
            let e_initial = entanglement_of_formation(&rho).value();
            for (k, gate) in gates.iter().enumerate() {
                let de = entanglement_of_formation(&gate.apply(&rho)).value() - e_initial;
                partial.histograms[k].record(de);
                partial.delta_moments[k].push(de);
            }
            let other = sample_state(&mut rng, ensemble);
            let de = entanglement_of_formation(&other).value() - e_initial;
            partial.reference.record(de);
            partial.reference_moments.push(de);
        }
        partial
    });

    let mut out = DeltaEDistribution {
        histograms: gates.iter().map(|_| Histogram::new(spec)).collect(),
        delta_moments: vec![Moments::new(); gates.len()],
        reference: Histogram::new(spec),
        reference_moments: Moments::new(),
    };
    for p in &partials {
        for k in 0..gates.len() {
            out.histograms[k].merge(&p.histograms[k]);
            out.delta_moments[k].merge(&p.delta_moments[k]);
        }
        out.reference.merge(&p.reference);
        out.reference_moments.merge(&p.reference_moments);
    }
    out
}

/// Mean and variance of E₀ binned over ΔE, one curve per gate.
pub fn initial_stats_vs_delta(
    ctx: &EstimatorCtx,
    gates: &[Gate],
    ensemble: Ensemble,
    samples: u64,
    spec: BinSpec,
) -> Vec<ConditionalCurve> {
    let partials = map_shards(samples, ctx.mode, |shard| {
        let mut rng = ctx.stream(shard.index);
        let mut curves: Vec<ConditionalCurve> =
            gates.iter().map(|_| ConditionalCurve::new(spec)).collect();
        for _ in 0..shard.samples {
            let rho = sample_state(&mut rng, ensemble);
            let e_initial = entanglement_of_formation(&rho).value();
            for (gate, curve) in gates.iter().zip(curves.iter_mut()) {
                let de = entanglement_of_formation(&gate.apply(&rho)).value() - e_initial;
                curve.record(de, e_initial);
            }
        }
        curves
    });

    let mut curves: Vec<ConditionalCurve> =
        gates.iter().map(|_| ConditionalCurve::new(spec)).collect();
    for partial in &partials {
        for (curve, p) in curves.iter_mut().zip(partial.iter()) {
            curve.merge(p);
        }
    }
    curves
}

/// P(E_F) per gate for initial states held in one conditioning band.
pub fn final_dist_fixed_initial(
    ctx: &EstimatorCtx,
    gates: &[Gate],
    ensemble: Ensemble,
    band: &Band,
    accepted: u64,
    spec: BinSpec,
    budget: u64,
) -> Result<Vec<(Histogram, Moments)>, SampleError> {
    let partials = try_map_shards(accepted, ctx.mode, |shard| {
        let mut rng = ctx.stream(shard.index);
        let mut locals: Vec<(Histogram, Moments)> = gates
            .iter()
            .map(|_| (Histogram::new(spec), Moments::new()))
            .collect();
        for _ in 0..shard.samples {
            let rho = sample_conditioned(&mut rng, ensemble, band, budget)?;
            for (gate, (hist, moments)) in gates.iter().zip(locals.iter_mut()) {
                let e_final = entanglement_of_formation(&gate.apply(&rho)).value();
                hist.record(e_final);
                moments.push(e_final);
            }
        }
        Ok(locals)
    })?;

    let mut out: Vec<(Histogram, Moments)> = gates
        .iter()
        .map(|_| (Histogram::new(spec), Moments::new()))
        .collect();
    for partial in &partials {
        for ((hist, moments), (ph, pm)) in out.iter_mut().zip(partial.iter()) {
            hist.merge(ph);
            moments.merge(pm);
        }
    }
    Ok(out)
}

/// E₀ statistics over ΔE for initial states held in one conditioning band.
pub fn initial_stats_vs_delta_conditioned(
    ctx: &EstimatorCtx,
    gate: &Gate,
    ensemble: Ensemble,
    band: &Band,
    accepted: u64,
    spec: BinSpec,
    budget: u64,
) -> Result<ConditionalCurve, SampleError> {
    let partials = try_map_shards(accepted, ctx.mode, |shard| {
        let mut rng = ctx.stream(shard.index);
        let mut curve = ConditionalCurve::new(spec);
        for _ in 0..shard.samples {
            let rho = sample_conditioned(&mut rng, ensemble, band, budget)?;
            let de = gate.delta_e(&rho);
            curve.record(de.delta, de.e_initial.value());
        }
        Ok(curve)
    })?;

    let mut curve = ConditionalCurve::new(spec);
    for p in &partials {
        curve.merge(p);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::Gate;

    fn ctx(task: u32, mode: ExecMode) -> EstimatorCtx {
        EstimatorCtx::new(12345, task, mode)
    }

    #[test]
    fn sequential_and_parallel_agree_exactly() {
        let spec = BinSpec::unit(50);
        let (h_seq, m_seq) =
            entanglement_histogram(&ctx(0, ExecMode::Sequential), Ensemble::All, 20_000, spec);
        let (h_par, m_par) =
            entanglement_histogram(&ctx(0, ExecMode::Parallel), Ensemble::All, 20_000, spec);
        assert_eq!(h_seq, h_par);
        assert_eq!(m_seq, m_par);
        assert_eq!(h_seq.total(), 20_000);
    }

    #[test]
    fn empty_run_yields_empty_histogram() {
        let (hist, moments) = entanglement_histogram(
            &ctx(1, ExecMode::Sequential),
            Ensemble::All,
            0,
            BinSpec::unit(10),
        );
        assert_eq!(hist.total(), 0);
        assert_eq!(moments.count(), 0);
        assert_eq!(hist.density(3), 0.0);
    }

    #[test]
    fn identity_gate_curve_sits_on_the_diagonal() {
        let spec = BinSpec::unit(20);
        let curves = mean_final_vs_initial(
            &ctx(2, ExecMode::default()),
            &[Gate::u_theta(0.0)],
            Ensemble::All,
            5_000,
            spec,
        );
        let curve = &curves[0];
        for bin in 0..curve.bins() {
            if let (Some(mean), Some(var)) = (curve.mean(bin), curve.variance(bin)) {
                let (lo, hi) = spec.edges(bin);
                assert!(mean >= lo && mean <= hi, "bin {bin} mean {mean}");
                // E_F equals E0 sample by sample, so the variance is the
                // within-bin spread of E0 itself, bounded by the bin width.
                assert!(var.sqrt() <= spec.width());
            }
        }
    }

    #[test]
    fn identity_gate_delta_mass_is_all_at_zero() {
        let dist = delta_e_distribution(
            &ctx(3, ExecMode::default()),
            &[Gate::u_theta(0.0)],
            Ensemble::All,
            5_000,
            BinSpec::symmetric_unit(100),
        );
        let hist = &dist.histograms[0];
        assert_eq!(hist.total(), 5_000);
        let zero_mass = hist.mass_in_bin_containing(0.0);
        assert_eq!(zero_mass, 1.0);
        assert_eq!(dist.delta_moments[0].mean(), 0.0);
    }

    #[test]
    fn conditioned_estimators_respect_bands() {
        let band = Band::Entanglement { lo: 0.295, hi: 0.305 };
        let hists = final_dist_fixed_initial(
            &ctx(4, ExecMode::default()),
            &[Gate::identity()],
            Ensemble::All,
            &band,
            200,
            BinSpec::unit(100),
            crate::sampling::DEFAULT_REJECTION_BUDGET,
        )
        .unwrap();
        let (hist, _) = &hists[0];
        assert_eq!(hist.total(), 200);
        // Identity keeps E_F inside the initial band.
        for (bin, &count) in hist.counts().iter().enumerate() {
            if count > 0 {
                let (lo, hi) = hist.spec().edges(bin);
                assert!(hi >= 0.295 && lo <= 0.305, "mass outside band at bin {bin}");
            }
        }
    }

    #[test]
    fn budget_errors_propagate() {
        let band = Band::Entanglement { lo: 0.99999, hi: 1.0 };
        let err = final_dist_fixed_initial(
            &ctx(5, ExecMode::default()),
            &[Gate::cnot()],
            Ensemble::All,
            &band,
            10,
            BinSpec::unit(10),
            200,
        )
        .unwrap_err();
        assert!(matches!(err, SampleError::RejectionBudgetExceeded { .. }));
    }
}
