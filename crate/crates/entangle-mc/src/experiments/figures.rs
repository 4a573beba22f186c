//! Figure-level orchestration: configuration, defaults and output assembly.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gates::{Gate, GateLabel};
use crate::sampling::{Band, Ensemble, SampleError, DEFAULT_REJECTION_BUDGET};

use super::estimators::{
    delta_e_distribution, entanglement_histogram, final_dist_fixed_initial, gate_from_separable,
    initial_stats_vs_delta, initial_stats_vs_delta_conditioned, mean_final_vs_initial,
    EstimatorCtx,
};
use super::hist::{BinSpec, ConditionalCurve, Histogram, ScalarStat};
use super::run::ExecMode;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Sampling(#[from] SampleError),
}

/// The eight reproducible survey figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig2,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        };
        write!(f, "{s}")
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1a" => Ok(FigureId::Fig1a),
            "fig1b" => Ok(FigureId::Fig1b),
            "fig2" => Ok(FigureId::Fig2),
            "fig3a" => Ok(FigureId::Fig3a),
            "fig3b" => Ok(FigureId::Fig3b),
            "fig4" => Ok(FigureId::Fig4),
            "fig5" => Ok(FigureId::Fig5),
            "fig6" => Ok(FigureId::Fig6),
            other => Err(format!(
                "unknown figure {other:?}; expected one of fig1a, fig1b, fig2, fig3a, fig3b, fig4, fig5, fig6"
            )),
        }
    }
}

/// Full description of one figure run. `None` fields fall back to the
/// figure's defaults; identical configs produce bit-identical outputs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub figure: FigureId,
    pub seed: u64,
    pub samples: Option<u64>,
    pub gates: Option<Vec<Gate>>,
    pub ensemble: Option<Ensemble>,
    pub e_bins: usize,
    pub delta_bins: usize,
    pub bands: Option<Vec<Band>>,
    pub e_band_half_width: f64,
    pub r_band_half_width: f64,
    pub budget: u64,
    pub mode: ExecMode,
}

impl ExperimentConfig {
    pub fn new(figure: FigureId) -> Self {
        Self {
            figure,
            seed: 1,
            samples: None,
            gates: None,
            ensemble: None,
            e_bins: 100,
            delta_bins: 100,
            bands: None,
            e_band_half_width: 0.005,
            r_band_half_width: 0.01,
            budget: DEFAULT_REJECTION_BUDGET,
            mode: ExecMode::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.samples == Some(0) {
            return Err(ExperimentError::Config(
                "samples must be at least 1".into(),
            ));
        }
        if self.e_bins == 0 || self.delta_bins == 0 {
            return Err(ExperimentError::Config("bins must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(ExperimentError::Config("budget must be at least 1".into()));
        }
        if let Some(gates) = &self.gates {
            if gates.is_empty() && self.figure != FigureId::Fig1a {
                return Err(ExperimentError::Config(
                    "gates must name at least one gate".into(),
                ));
            }
        }
        if let Some(bands) = &self.bands {
            if bands.is_empty() {
                return Err(ExperimentError::Config(
                    "bands must name at least one band".into(),
                ));
            }
            match self.figure {
                FigureId::Fig5 => {
                    if bands
                        .iter()
                        .any(|b| !matches!(b, Band::Entanglement { .. }))
                    {
                        return Err(ExperimentError::Config(
                            "bands for fig5 must be E bands like \"E in [0.095,0.105]\"".into(),
                        ));
                    }
                }
                FigureId::Fig6 => {
                    if bands
                        .iter()
                        .any(|b| !matches!(b, Band::Participation { .. }))
                    {
                        return Err(ExperimentError::Config(
                            "bands for fig6 must be R bands like \"R in [1.39,1.41]\"".into(),
                        ));
                    }
                }
                _ => {
                    return Err(ExperimentError::Config(
                        "bands only apply to fig5 and fig6".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Default sample budget: conditioned figures accept fewer states.
    pub fn effective_samples(&self) -> u64 {
        self.samples.unwrap_or(match self.figure {
            FigureId::Fig1b | FigureId::Fig5 | FigureId::Fig6 => 100_000,
            _ => 1_000_000,
        })
    }

    pub fn effective_gates(&self) -> Vec<Gate> {
        if let Some(gates) = &self.gates {
            return gates.clone();
        }
        match self.figure {
            FigureId::Fig1a => vec![],
            FigureId::Fig2 => vec![
                Gate::cnot(),
                Gate::u_theta(PI / 3.0),
                Gate::u_theta(PI / 4.0),
                Gate::u_theta(PI / 6.0),
                Gate::u_theta(0.0),
            ],
            FigureId::Fig6 => vec![Gate::cnot()],
            _ => vec![Gate::cnot(), Gate::u_theta(PI / 4.0)],
        }
    }

    /// Ensembles to run: explicit override, otherwise the figure's panels.
    pub fn effective_ensembles(&self) -> Vec<Ensemble> {
        if let Some(e) = self.ensemble {
            return vec![e];
        }
        match self.figure {
            FigureId::Fig1a | FigureId::Fig2 | FigureId::Fig4 => {
                vec![Ensemble::All, Ensemble::Pure]
            }
            FigureId::Fig3a => vec![Ensemble::Pure],
            _ => vec![Ensemble::All],
        }
    }

    pub fn effective_bands(&self) -> Vec<Band> {
        if let Some(bands) = &self.bands {
            return bands.clone();
        }
        match self.figure {
            FigureId::Fig5 => [0.1, 0.2, 0.3, 0.4]
                .iter()
                .map(|&c| Band::entanglement_window(c, self.e_band_half_width))
                .collect(),
            FigureId::Fig6 => [1.4, 2.2]
                .iter()
                .map(|&c| Band::participation_window(c, self.r_band_half_width))
                .collect(),
            _ => vec![],
        }
    }
}

/// One output file of a figure run, without the `.csv` suffix.
#[derive(Debug, Clone)]
pub struct NamedOutput {
    pub name: String,
    pub kind: OutputKind,
}

#[derive(Debug, Clone)]
pub enum OutputKind {
    Histogram(Histogram),
    Curve(ConditionalCurve),
}

impl NamedOutput {
    pub fn to_csv(&self) -> String {
        match &self.kind {
            OutputKind::Histogram(h) => h.to_csv(),
            OutputKind::Curve(c) => c.to_csv(),
        }
    }
}

/// In-memory result of a figure run; serialization is the caller's business.
#[derive(Debug, Clone)]
pub struct FigureRun {
    pub figure: FigureId,
    pub outputs: Vec<NamedOutput>,
    pub summary: Vec<ScalarStat>,
}

/// First sign change of (mean_a - mean_b), linearly interpolated between the
/// adjacent bin centers. Empty bins on either curve are skipped.
pub fn crossing_point(a: &ConditionalCurve, b: &ConditionalCurve) -> Option<f64> {
    assert_eq!(a.spec(), b.spec());
    let mut prev: Option<(f64, f64)> = None;
    for bin in 0..a.bins() {
        let (Some(ma), Some(mb)) = (a.mean(bin), b.mean(bin)) else {
            continue;
        };
        let center = a.bin_center(bin);
        let diff = ma - mb;
        if let Some((prev_center, prev_diff)) = prev {
            if prev_diff == 0.0 {
                return Some(prev_center);
            }
            if prev_diff * diff < 0.0 {
                let t = prev_diff / (prev_diff - diff);
                return Some(prev_center + t * (center - prev_center));
            }
        }
        prev = Some((center, diff));
    }
    None
}

fn is_theta(gate: &Gate, theta: f64) -> bool {
    matches!(gate.label(), GateLabel::Theta(t) if (t - theta).abs() < 1e-12)
}

/// Runs every estimator behind `cfg.figure` and assembles the named outputs.
///
/// Sub-estimators are assigned task indices in a fixed order, so a given
/// config always consumes the same RNG streams.
pub fn run_figure(cfg: &ExperimentConfig) -> Result<FigureRun, ExperimentError> {
    cfg.validate()?;
    let samples = cfg.effective_samples();
    let gates = cfg.effective_gates();
    let e_spec = BinSpec::unit(cfg.e_bins);
    let d_spec = BinSpec::symmetric_unit(cfg.delta_bins);

    let mut outputs = Vec::new();
    let mut summary = Vec::new();
    let mut next_task = 0u32;
    let ctx = |task: &mut u32| {
        let c = EstimatorCtx::new(cfg.seed, *task, cfg.mode);
        *task += 1;
        c
    };

    match cfg.figure {
        FigureId::Fig1a => {
            for ensemble in cfg.effective_ensembles() {
                let (hist, moments) =
                    entanglement_histogram(&ctx(&mut next_task), ensemble, samples, e_spec);
                outputs.push(NamedOutput {
                    name: format!("hist_e_{ensemble}"),
                    kind: OutputKind::Histogram(hist),
                });
                summary.push(ScalarStat::from_moments(
                    format!("mean_E_{ensemble}"),
                    &moments,
                ));
            }
        }
        FigureId::Fig1b => {
            for gate in &gates {
                let (hist, moments) = gate_from_separable(
                    &ctx(&mut next_task),
                    gate,
                    samples,
                    e_spec,
                    cfg.budget,
                )?;
                outputs.push(NamedOutput {
                    name: format!("hist_ef_from_e0_zero_{}", gate.slug()),
                    kind: OutputKind::Histogram(hist),
                });
                summary.push(ScalarStat::from_moments(
                    format!("mean_EF_from_E0_zero_{}", gate.slug()),
                    &moments,
                ));
            }
            // Reference curve: P(E) of randomly selected states.
            let (hist, moments) =
                entanglement_histogram(&ctx(&mut next_task), Ensemble::All, samples, e_spec);
            outputs.push(NamedOutput {
                name: "hist_e_all_reference".into(),
                kind: OutputKind::Histogram(hist),
            });
            summary.push(ScalarStat::from_moments("mean_E_all", &moments));
        }
        FigureId::Fig2 => {
            for ensemble in cfg.effective_ensembles() {
                let curves = mean_final_vs_initial(
                    &ctx(&mut next_task),
                    &gates,
                    ensemble,
                    samples,
                    e_spec,
                );
                let top = e_spec.bins - 1;
                for (gate, curve) in gates.iter().zip(curves.iter()) {
                    if let Some(mean) = curve.mean(top) {
                        summary.push(ScalarStat {
                            name: format!("mean_EF_top_bin_{ensemble}_{}", gate.slug()),
                            value: mean,
                            stderr: f64::NAN,
                            n: curve.count(top),
                        });
                    }
                }
                let cnot = gates
                    .iter()
                    .position(|g| g.label() == GateLabel::Cnot);
                let quarter = gates.iter().position(|g| is_theta(g, PI / 4.0));
                if let (Some(ci), Some(qi)) = (cnot, quarter) {
                    if let Some(x) = crossing_point(&curves[ci], &curves[qi]) {
                        summary.push(ScalarStat::plain(
                            format!("crossing_E0_{ensemble}_cnot_vs_pi4"),
                            x,
                            samples,
                        ));
                    }
                }
                for (gate, curve) in gates.iter().zip(curves.into_iter()) {
                    outputs.push(NamedOutput {
                        name: format!("curve_ef_vs_e0_{ensemble}_{}", gate.slug()),
                        kind: OutputKind::Curve(curve),
                    });
                }
            }
        }
        FigureId::Fig3a | FigureId::Fig3b => {
            for ensemble in cfg.effective_ensembles() {
                let dist = delta_e_distribution(
                    &ctx(&mut next_task),
                    &gates,
                    ensemble,
                    samples,
                    d_spec,
                );
                for (gate, (hist, moments)) in gates
                    .iter()
                    .zip(dist.histograms.into_iter().zip(dist.delta_moments.iter()))
                {
                    summary.push(ScalarStat::from_moments(
                        format!("mean_dE_{ensemble}_{}", gate.slug()),
                        moments,
                    ));
                    summary.push(ScalarStat::plain(
                        format!("zero_bin_mass_{ensemble}_{}", gate.slug()),
                        hist.mass_in_bin_containing(0.0),
                        hist.total(),
                    ));
                    outputs.push(NamedOutput {
                        name: format!("hist_delta_{ensemble}_{}", gate.slug()),
                        kind: OutputKind::Histogram(hist),
                    });
                }
                summary.push(ScalarStat::from_moments(
                    format!("mean_dE_{ensemble}_reference"),
                    &dist.reference_moments,
                ));
                outputs.push(NamedOutput {
                    name: format!("hist_delta_{ensemble}_reference"),
                    kind: OutputKind::Histogram(dist.reference),
                });
            }
        }
        FigureId::Fig4 => {
            for ensemble in cfg.effective_ensembles() {
                let curves = initial_stats_vs_delta(
                    &ctx(&mut next_task),
                    &gates,
                    ensemble,
                    samples,
                    d_spec,
                );
                for (gate, curve) in gates.iter().zip(curves.into_iter()) {
                    outputs.push(NamedOutput {
                        name: format!("curve_e0_vs_delta_{ensemble}_{}", gate.slug()),
                        kind: OutputKind::Curve(curve),
                    });
                }
            }
        }
        FigureId::Fig5 => {
            let ensemble = cfg.ensemble.unwrap_or(Ensemble::All);
            for band in cfg.effective_bands() {
                let per_gate = final_dist_fixed_initial(
                    &ctx(&mut next_task),
                    &gates,
                    ensemble,
                    &band,
                    samples,
                    e_spec,
                    cfg.budget,
                )?;
                for (gate, (hist, moments)) in gates.iter().zip(per_gate.into_iter()) {
                    summary.push(ScalarStat::from_moments(
                        format!("mean_EF_{}_{}", gate.slug(), band.slug()),
                        &moments,
                    ));
                    outputs.push(NamedOutput {
                        name: format!("hist_ef_{}_band_{}", gate.slug(), band.slug()),
                        kind: OutputKind::Histogram(hist),
                    });
                }
            }
        }
        FigureId::Fig6 => {
            let ensemble = cfg.ensemble.unwrap_or(Ensemble::All);
            let gate = gates
                .first()
                .ok_or_else(|| ExperimentError::Config("gates must name a gate".into()))?;
            for band in cfg.effective_bands() {
                let curve = initial_stats_vs_delta_conditioned(
                    &ctx(&mut next_task),
                    gate,
                    ensemble,
                    &band,
                    samples,
                    d_spec,
                    cfg.budget,
                )?;
                if let Some((at, max_mean)) = curve.max_mean() {
                    summary.push(ScalarStat::plain(
                        format!("max_mean_E0_{}", band.slug()),
                        max_mean,
                        samples,
                    ));
                    summary.push(ScalarStat::plain(
                        format!("argmax_mean_E0_{}", band.slug()),
                        at,
                        samples,
                    ));
                }
                if let Some(v) = curve.variance(d_spec.index(0.0)) {
                    summary.push(ScalarStat::plain(
                        format!("var_E0_at_zero_{}", band.slug()),
                        v,
                        samples,
                    ));
                }
                outputs.push(NamedOutput {
                    name: format!(
                        "curve_e0_vs_delta_{ensemble}_{}_{}",
                        gate.slug(),
                        band.slug()
                    ),
                    kind: OutputKind::Curve(curve),
                });
            }
        }
    }

    Ok(FigureRun {
        figure: cfg.figure,
        outputs,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.to_string().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig7".parse::<FigureId>().is_err());
    }

    #[test]
    fn validation_names_the_offending_key() {
        let mut cfg = ExperimentConfig::new(FigureId::Fig2);
        cfg.samples = Some(0);
        let err = run_figure(&cfg).unwrap_err();
        assert!(err.to_string().contains("samples"), "{err}");

        let mut cfg = ExperimentConfig::new(FigureId::Fig5);
        cfg.bands = Some(vec![Band::Participation { lo: 1.3, hi: 1.5 }]);
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("bands"), "{err}");

        let mut cfg = ExperimentConfig::new(FigureId::Fig2);
        cfg.bands = Some(vec![Band::EntanglementZero]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn crossing_point_interpolates() {
        let spec = BinSpec::unit(10);
        let mut a = ConditionalCurve::new(spec);
        let mut b = ConditionalCurve::new(spec);
        // a runs 0.8 -> 0.0 linearly, b stays at 0.35; they cross once.
        for bin in 0..10 {
            let x = spec.center(bin);
            a.record(x, 0.8 * (1.0 - x));
            b.record(x, 0.35);
        }
        let x = crossing_point(&a, &b).unwrap();
        // 0.8 (1 - x) = 0.35 at x = 0.5625.
        assert!((x - 0.5625).abs() < 0.05, "crossing at {x}");
        assert!(crossing_point(&b, &a).is_some());
    }

    #[test]
    fn small_fig1a_run_produces_outputs() {
        let mut cfg = ExperimentConfig::new(FigureId::Fig1a);
        cfg.samples = Some(2000);
        cfg.seed = 9;
        let run = run_figure(&cfg).unwrap();
        assert_eq!(run.outputs.len(), 2);
        assert_eq!(run.summary.len(), 2);
        assert!(run.outputs.iter().any(|o| o.name == "hist_e_all"));
        assert!(run.outputs.iter().any(|o| o.name == "hist_e_pure"));

        // Repeatability at the run level.
        let again = run_figure(&cfg).unwrap();
        for (x, y) in run.outputs.iter().zip(again.outputs.iter()) {
            assert_eq!(x.to_csv(), y.to_csv());
        }
    }
}
