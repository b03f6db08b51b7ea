use std::io::Write;
use std::path::PathBuf;

use thiserror::Error;

use super::args::{Command, OutputFormat, RunConfig};
use super::figures::{FigurePreset, PatternSeries, StatePanel};
use super::output::{Column, Dataset, PlotKind, PlotSpec};
use super::svg;
use super::{EXIT_IO, EXIT_NUMERICAL};
use crate::emission::{
    angle_averaged_factor_checked, sample_pattern, tight_axis_factor_real, EmissionProblem, PatternVariant,
};
use crate::error::Error;
use crate::quadrature::AngularAverage;
use crate::recoil::{PhotonDirection, RecoilCoupling};
use crate::trap::{FermiSea, Shape, TrapGeometry};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot write `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("cannot draw the result: {0}")]
    Render(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io { .. } => EXIT_IO,
            RunError::Numerical(_) | RunError::Render(_) => EXIT_NUMERICAL,
        }
    }
}

/// Executes `config`, writing to `--out` or stdout.
pub fn run(config: &RunConfig) -> Result<(), RunError> {
    let text = render(config)?;
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| RunError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

/// The bytes `run` would write.
pub fn render(config: &RunConfig) -> Result<String, RunError> {
    let ds = dataset(&config.command)?;
    Ok(match config.format {
        OutputFormat::Csv => ds.to_csv(),
        OutputFormat::Json => ds.to_json(config),
        OutputFormat::Svg => svg::render(&ds).map_err(RunError::Render)?,
    })
}

fn dataset(command: &Command) -> Result<Dataset, Error> {
    match *command {
        Command::Pattern {
            shape,
            lambda,
            eta2,
            n_f,
            theta_samples,
            variant,
        } => {
            let problem = EmissionProblem::new(TrapGeometry::new(shape, lambda)?, FermiSea::new(n_f)?, eta2)?;
            let pattern = sample_pattern(&problem, theta_samples, variant)?;
            let title = format!("M_f(theta): {shape} lambda={lambda} eta2={eta2} nF={n_f}{}", variant_suffix(variant));
            Ok(Dataset::new(
                title,
                vec![
                    Column::real("theta_deg", pattern.theta_degrees().collect()),
                    Column::real("m_f", pattern.values().to_vec()),
                ],
            )
            .with_plot(PlotSpec::new(PlotKind::Polar, "theta_deg", "m_f").labels("theta (deg)", "M_f")))
        }
        Command::Shells {
            shape,
            lambda,
            eta2,
            theta_deg,
            phi_deg,
            n_max,
            weight,
            nodes,
        } => {
            let coupling = RecoilCoupling::new(TrapGeometry::new(shape, lambda)?, eta2)?;
            let n_max = n_max.unwrap_or_else(|| coupling.shell_range());
            let (spectrum, how) = match theta_deg {
                Some(t) => {
                    let p = phi_deg.unwrap_or(0.0);
                    let dir = PhotonDirection::from_degrees(t, p)?;
                    (coupling.shell_spectrum_at(dir, n_max), format!("theta={t} phi={p}"))
                }
                None => (
                    coupling.shell_spectrum(n_max, &AngularAverage::new(nodes, weight)),
                    format!("{weight:?} average").to_lowercase(),
                ),
            };
            let (n, p): (Vec<i64>, Vec<f64>) = spectrum.iter().map(|(n, p)| (n as i64, p)).unzip();
            Ok(Dataset::new(
                format!("P_e(n): {shape} lambda={lambda} eta2={eta2}, {how}"),
                vec![Column::int("n", n), Column::real("p_e", p)],
            )
            .with_plot(PlotSpec::new(PlotKind::Line, "n", "p_e").labels("shell n", "P_e")))
        }
        Command::Degeneracy { shape, lambda, n_max } => {
            let geom = TrapGeometry::new(shape, lambda)?;
            let mut g = Vec::new();
            let mut total = Vec::new();
            for n in 0..=n_max {
                g.push(as_i64(geom.degeneracy(n), "degeneracy")?);
                total.push(as_i64(geom.cumulative_states(FermiSea::new(n as i64)?)?, "cumulative states")?);
            }
            Ok(Dataset::new(
                format!("shell degeneracy: {shape} lambda={lambda}"),
                vec![
                    Column::int("n", (0..=n_max as i64).collect()),
                    Column::int("degeneracy", g),
                    Column::int("cumulative", total),
                ],
            )
            .with_plot(PlotSpec::new(PlotKind::Line, "n", "degeneracy").labels("shell n", "degeneracy")))
        }
        Command::Count { shape, lambda, n_f } => {
            let geom = TrapGeometry::new(shape, lambda)?;
            let states = geom.cumulative_states(FermiSea::new(n_f)?)?;
            Ok(Dataset::new(
                format!("state count: {shape} lambda={lambda}"),
                vec![Column::int("n_f", vec![n_f]), Column::int("states", vec![as_i64(states, "states")?])],
            ))
        }
        Command::TightSweep {
            shape,
            eta2,
            n_f,
            lambda_min,
            lambda_max,
            samples,
        } => {
            let (lambda, m_f) = tight_sweep(eta2, n_f, lambda_min, lambda_max, samples)?;
            Ok(sweep_dataset(
                format!("M_f on the tight axis: {shape} eta2={eta2} nF={n_f}"),
                lambda,
                m_f,
            ))
        }
        Command::FermiShell { shape, lambda, atoms } => {
            let filling = TrapGeometry::new(shape, lambda)?.fermi_shell_for_atoms(atoms);
            Ok(Dataset::new(
                format!("Fermi shell: {shape} lambda={lambda}"),
                vec![
                    Column::int("atoms", vec![as_i64(atoms, "atoms")?]),
                    Column::int("n_f", vec![filling.sea.n_f()]),
                    Column::int("occupancy", vec![as_i64(filling.occupancy, "occupancy")?]),
                    Column::int("degeneracy", vec![as_i64(filling.degeneracy, "degeneracy")?]),
                    Column::text("closed", vec![filling.is_closed().to_string()]),
                ],
            ))
        }
        Command::Figure { id, theta_samples } => {
            let title = format!("figure {id}");
            match id.preset() {
                FigurePreset::ShellPanels {
                    shape,
                    eta2,
                    lambdas,
                    n_max,
                } => shell_panels(title, shape, eta2, &lambdas, n_max),
                FigurePreset::ShellStates { panels } => shell_states(title, &panels),
                FigurePreset::TightSweep {
                    eta2,
                    n_f,
                    lambda_min,
                    lambda_max,
                    samples,
                } => {
                    let (lambda, m_f) = tight_sweep(eta2, n_f, lambda_min, lambda_max, samples)?;
                    Ok(sweep_dataset(format!("{title}: M_f on the tight axis, eta2={eta2} nF={n_f}"), lambda, m_f))
                }
                FigurePreset::Patterns { series } => patterns(title, &series, theta_samples),
            }
        }
    }
}

/// Tight-axis factor on `samples` evenly spaced real aspect ratios.
pub fn tight_sweep(
    eta2: f64,
    n_f: i64,
    lambda_min: f64,
    lambda_max: f64,
    samples: usize,
) -> Result<(Vec<f64>, Vec<f64>), Error> {
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("need at least 2, got {samples}"),
        });
    }
    let sea = FermiSea::new(n_f)?;
    let step = (lambda_max - lambda_min) / (samples - 1) as f64;
    let lambda: Vec<f64> = (0..samples)
        .map(|i| if i + 1 == samples { lambda_max } else { lambda_min + step * i as f64 })
        .collect();
    let m_f = lambda
        .iter()
        .map(|&l| tight_axis_factor_real(eta2, sea, l))
        .collect::<Result<_, _>>()?;
    Ok((lambda, m_f))
}

fn sweep_dataset(title: String, lambda: Vec<f64>, m_f: Vec<f64>) -> Dataset {
    Dataset::new(title, vec![Column::real("lambda", lambda), Column::real("m_f", m_f)])
        .with_plot(PlotSpec::new(PlotKind::Line, "lambda", "m_f").labels("aspect ratio lambda", "M_f (tight axis)"))
}

fn variant_suffix(variant: PatternVariant) -> String {
    match variant {
        PatternVariant::Full => String::new(),
        PatternVariant::Limit => " (lambda -> inf)".into(),
        PatternVariant::PartialWave { tight_quanta, .. } => format!(" (n_tight = {tight_quanta})"),
        PatternVariant::PartialWaveTail { from, .. } => format!(" (n_tight >= {from})"),
    }
}

fn shell_panels(title: String, shape: Shape, eta2: f64, lambdas: &[u32], n_max: u64) -> Result<Dataset, Error> {
    let avg = AngularAverage::default();
    let mut panel = Vec::new();
    let mut lambda_col = Vec::new();
    let mut n_col = Vec::new();
    let mut value = Vec::new();
    for &lambda in lambdas {
        let coupling = RecoilCoupling::new(TrapGeometry::new(shape, lambda)?, eta2)?;
        for (n, p) in coupling.shell_spectrum(n_max, &avg).iter() {
            panel.push("P_e".to_string());
            lambda_col.push(i64::from(lambda));
            n_col.push(n as i64);
            value.push(p);
        }
    }
    for &lambda in lambdas {
        let base = EmissionProblem::new(TrapGeometry::new(shape, lambda)?, FermiSea::EMPTY, eta2)?;
        for n_f in -1..=n_max as i64 {
            let m = angle_averaged_factor_checked(&base.with_sea(FermiSea::new(n_f)?), &avg)?;
            panel.push("M_f".to_string());
            lambda_col.push(i64::from(lambda));
            n_col.push(n_f);
            value.push(m);
        }
    }
    Ok(Dataset::new(
        format!("{title}: {shape}, eta2={eta2}, angle-averaged"),
        vec![
            Column::text("panel", panel),
            Column::int("lambda", lambda_col),
            Column::int("n", n_col),
            Column::real("value", value),
        ],
    )
    .with_plot(
        PlotSpec::new(PlotKind::Line, "n", "value")
            .series("lambda")
            .facet("panel")
            .labels("shell n (P_e) / Fermi shell n_F (M_f)", "value"),
    ))
}

fn shell_states(title: String, panels: &[StatePanel]) -> Result<Dataset, Error> {
    let avg = AngularAverage::default();
    let mut lambda_col = Vec::new();
    let mut state_col = Vec::new();
    let mut prob = Vec::new();
    for p in panels {
        let geom = TrapGeometry::new(p.shape, p.lambda)?;
        let coupling = RecoilCoupling::new(geom, p.eta2)?;
        for state in geom.shell_states(p.shell) {
            lambda_col.push(i64::from(p.lambda));
            state_col.push(state.to_string());
            prob.push(coupling.state_emission_probability_averaged(state, &avg));
        }
    }
    let first = panels.first().copied();
    Ok(Dataset::new(
        format!(
            "{title}: states of shell {}, eta2={}, angle-averaged",
            first.map_or(0, |p| p.shell),
            first.map_or(0.0, |p| p.eta2)
        ),
        vec![
            Column::int("lambda", lambda_col),
            Column::text("state", state_col),
            Column::real("probability", prob),
        ],
    )
    .with_plot(
        PlotSpec::new(PlotKind::Bar, "state", "probability")
            .facet("lambda")
            .labels("state (nx,ny,nz)", "emission probability"),
    ))
}

fn patterns(title: String, series: &[PatternSeries], theta_samples: usize) -> Result<Dataset, Error> {
    let mut panel = Vec::new();
    let mut label = Vec::new();
    let mut theta = Vec::new();
    let mut m_f = Vec::new();
    for s in series {
        let (lambda, variant) = match s.lambda {
            Some(l) => (l, PatternVariant::Full),
            None => (1, PatternVariant::Limit),
        };
        let problem = EmissionProblem::new(TrapGeometry::new(s.shape, lambda)?, FermiSea::new(s.n_f)?, s.eta2)?;
        let pattern = sample_pattern(&problem, theta_samples, variant)?;
        panel.extend(std::iter::repeat_n(s.panel.to_string(), pattern.len()));
        label.extend(std::iter::repeat_n(s.label(), pattern.len()));
        theta.extend(pattern.theta_degrees());
        m_f.extend_from_slice(pattern.values());
    }
    let mut plot = PlotSpec::new(PlotKind::Polar, "theta_deg", "m_f")
        .series("series")
        .labels("theta (deg)", "M_f");
    let mut columns = vec![
        Column::text("series", label),
        Column::real("theta_deg", theta),
        Column::real("m_f", m_f),
    ];
    if series.iter().any(|s| s.panel != series[0].panel) {
        columns.insert(0, Column::text("panel", panel));
        plot = plot.facet("panel");
    }
    Ok(Dataset::new(format!("{title}: M_f(theta)"), columns).with_plot(plot))
}

fn as_i64(v: u64, what: &'static str) -> Result<i64, Error> {
    i64::try_from(v).map_err(|_| Error::Bounds {
        what,
        value: v,
        limit: i64::MAX as u64,
    })
}
