//! SVG plots of BER against SIR, one file per path-length regime.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::csv::SweepRow;
use crate::{Error, Result};

const PALETTE: [RGBColor; 6] = [RED, BLUE, GREEN, MAGENTA, CYAN, BLACK];

fn key(x: f64) -> u64 {
    x.to_bits()
}

/// Writes one `ber_l<L/Lc>.svg` per distinct `l_over_lc` in `rows` and
/// returns the paths. Rows with different symbol counts are plotted as
/// separate series.
pub fn emit_plots(rows: &[SweepRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut regimes: BTreeMap<u64, Vec<&SweepRow>> = BTreeMap::new();
    for row in rows {
        regimes.entry(key(row.l_over_lc)).or_default().push(row);
    }
    let mut paths = Vec::new();
    for (l, rows) in regimes {
        let l = f64::from_bits(l);
        let path = out_dir.join(format!("ber_l{l}.svg"));
        plot_regime(&rows, l, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn plot_regime(rows: &[&SweepRow], l_over_lc: f64, path: &Path) -> Result<()> {
    let plot_err = |e: &dyn std::fmt::Display| Error::Plot {
        path: path.to_path_buf(),
        message: e.to_string(),
    };

    let mut series: BTreeMap<(u64, u64), Vec<&SweepRow>> = BTreeMap::new();
    for &row in rows {
        series
            .entry((row.num_symbols, key(row.phi_over_pi)))
            .or_default()
            .push(row);
    }
    let multi_size = series
        .keys()
        .map(|k| k.0)
        .collect::<std::collections::BTreeSet<_>>()
        .len()
        > 1;

    let (x_min, x_max) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.sir_db), hi.max(r.sir_db))
        });
    let (x_min, x_max) = if x_min < x_max {
        (x_min - 1.0, x_max + 1.0)
    } else {
        (x_min - 1.0, x_min + 1.0)
    };
    let floor = rows
        .iter()
        .map(|r| if r.ci_low > 0.0 { r.ci_low } else { r.ci_high })
        .filter(|&v| v > 0.0)
        .fold(1.0f64, f64::min);
    let y_min = 10f64.powf(floor.log10().floor());
    let y_max = rows.iter().map(|r| r.ci_high).fold(y_min * 10.0, f64::max);
    let y_max = 10f64.powf(y_max.log10().ceil()).min(1.0).max(y_min * 10.0);

    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(
            format!("BER vs SIR, L = {l_over_lc} Lc"),
            ("sans-serif", 22),
        )
        .margin(12)
        .x_label_area_size(45)
        .y_label_area_size(70)
        .build_cartesian_2d(x_min..x_max, (y_min..y_max).log_scale())
        .map_err(|e| plot_err(&e))?;
    chart
        .configure_mesh()
        .x_desc("SIR (dB)")
        .y_desc("BER")
        .y_label_formatter(&|v| format!("{v:.0e}"))
        .draw()
        .map_err(|e| plot_err(&e))?;

    for (i, ((size, phi), mut points)) in series.into_iter().enumerate() {
        points.sort_by(|a, b| a.sir_db.total_cmp(&b.sir_db));
        let color = PALETTE[i % PALETTE.len()];
        let phi = f64::from_bits(phi);
        let label = if multi_size {
            format!("Φ = {phi}π, N = {size}")
        } else {
            format!("Φ = {phi}π")
        };
        let visible: Vec<(f64, f64)> = points
            .iter()
            .filter(|r| r.ber > 0.0)
            .map(|r| (r.sir_db, r.ber))
            .collect();
        chart
            .draw_series(LineSeries::new(
                visible.iter().copied(),
                color.stroke_width(2),
            ))
            .map_err(|e| plot_err(&e))?
            .label(label)
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
            });
        chart
            .draw_series(visible.iter().map(|&p| Circle::new(p, 3, color.filled())))
            .map_err(|e| plot_err(&e))?;
        chart
            .draw_series(points.iter().filter(|r| r.ci_high > 0.0).map(|r| {
                ErrorBar::new_vertical(
                    r.sir_db,
                    r.ci_low.max(y_min),
                    r.ber.max(y_min),
                    r.ci_high,
                    color,
                    6,
                )
            }))
            .map_err(|e| plot_err(&e))?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| plot_err(&e))?;
    root.present().map_err(|e| plot_err(&e))?;
    Ok(())
}
