//! Gnuplot script emission. Scripts reference the CSV files by name and
//! never embed data.

use entangle_mc::experiments::FigureId;

// Histogram CSVs: bin_lo,bin_hi,count,density -> density vs bin center.
const HIST_USING: &str = "(($1+$2)/2):($4)";
// Curve CSVs: bin_center,count,mean,second_moment,variance.
const MEAN_USING: &str = "($1):($3)";
const VARIANCE_USING: &str = "($1):($5)";

fn pretty(name: &str) -> String {
    name.replace('_', " ")
}

fn plot_block(files: &[&String], using: &str) -> String {
    let mut lines = Vec::new();
    for (k, f) in files.iter().enumerate() {
        let lead = if k == 0 { "plot" } else { "    " };
        let sep = if k + 1 == files.len() { "" } else { ", \\" };
        lines.push(format!(
            "{lead} '{f}.csv' skip 1 using {using} with lines title '{}'{sep}",
            pretty(f)
        ));
    }
    lines.join("\n") + "\n"
}

/// Builds the figure's gnuplot script from the run's output names
/// (`summary` excluded, names without the `.csv` suffix).
pub fn plot_script(figure: FigureId, outputs: &[String]) -> String {
    let hists: Vec<&String> = outputs.iter().filter(|n| n.starts_with("hist_")).collect();
    let curves: Vec<&String> = outputs.iter().filter(|n| n.starts_with("curve_")).collect();

    let mut s = String::new();
    s.push_str("# gnuplot script; render with: gnuplot -persist plot.gp\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile missing 'NaN'\n");
    s.push_str(&format!("set title '{figure}'\n"));
    s.push_str("set key top right\n");

    match figure {
        FigureId::Fig1a | FigureId::Fig1b | FigureId::Fig5 => {
            s.push_str("set xlabel 'E'\n");
            s.push_str("set ylabel 'P(E)'\n");
            if figure == FigureId::Fig5 {
                s.push_str("set xrange [0:0.8]\n");
            }
            s.push_str(&plot_block(&hists, HIST_USING));
        }
        FigureId::Fig2 => {
            s.push_str("set xlabel 'E_0'\n");
            s.push_str("set ylabel '<E_F>'\n");
            s.push_str(&plot_block(&curves, MEAN_USING));
        }
        FigureId::Fig3a | FigureId::Fig3b => {
            s.push_str("set xlabel 'dE'\n");
            s.push_str("set ylabel 'P(dE)'\n");
            s.push_str(&plot_block(&hists, HIST_USING));
        }
        FigureId::Fig4 | FigureId::Fig6 => {
            s.push_str("set xlabel 'dE'\n");
            s.push_str("set multiplot layout 2,1\n");
            s.push_str("set ylabel '<E_0>'\n");
            s.push_str(&plot_block(&curves, MEAN_USING));
            s.push_str("set ylabel '<E_0^2> - <E_0>^2'\n");
            s.push_str(&plot_block(&curves, VARIANCE_USING));
            s.push_str("unset multiplot\n");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1a_script_references_both_ensembles() {
        let outputs = vec!["hist_e_all".to_string(), "hist_e_pure".to_string()];
        let script = plot_script(FigureId::Fig1a, &outputs);
        assert!(script.contains("'hist_e_all.csv'"));
        assert!(script.contains("'hist_e_pure.csv'"));
        assert!(script.contains("set datafile missing 'NaN'"));
        assert!(!script.contains("0.5,0.5"), "script must not embed data");
    }

    #[test]
    fn fig3a_script_has_three_sources() {
        let outputs = vec![
            "hist_delta_pure_cnot".to_string(),
            "hist_delta_pure_theta_0p7854".to_string(),
            "hist_delta_pure_reference".to_string(),
        ];
        let script = plot_script(FigureId::Fig3a, &outputs);
        assert_eq!(script.matches(".csv").count(), 3);
    }

    #[test]
    fn fig6_script_plots_mean_and_variance_panels() {
        let outputs = vec!["curve_e0_vs_delta_all_cnot_r_1p390_1p410".to_string()];
        let script = plot_script(FigureId::Fig6, &outputs);
        assert!(script.contains("multiplot"));
        assert!(script.contains(VARIANCE_USING));
    }
}
