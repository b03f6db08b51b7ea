//! Parameter bundles for regenerating each published figure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::trap::Shape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    /// Pancake shell spectra and inhibition.
    Fig1,
    /// Cigar shell spectra and inhibition.
    Fig2,
    /// Both panels of the per-state bar chart.
    Fig3,
    Fig3a,
    Fig3b,
    /// Tight-axis factor against a continuous aspect ratio.
    Fig4,
    /// Both panels of the pancake polar patterns.
    Fig5,
    Fig5a,
    Fig5b,
    /// Directed emission from a cigar.
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig5a,
        FigureId::Fig5b,
        FigureId::Fig6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig1 => "1",
            FigureId::Fig2 => "2",
            FigureId::Fig3 => "3",
            FigureId::Fig3a => "3a",
            FigureId::Fig3b => "3b",
            FigureId::Fig4 => "4",
            FigureId::Fig5 => "5",
            FigureId::Fig5a => "5a",
            FigureId::Fig5b => "5b",
            FigureId::Fig6 => "6",
        }
    }

    pub fn preset(self) -> FigurePreset {
        match self {
            FigureId::Fig1 => shell_panels(Shape::Pancake),
            FigureId::Fig2 => shell_panels(Shape::Cigar),
            FigureId::Fig3 => FigurePreset::ShellStates {
                panels: vec![ISOTROPIC_STATES, PANCAKE_STATES],
            },
            FigureId::Fig3a => FigurePreset::ShellStates {
                panels: vec![ISOTROPIC_STATES],
            },
            FigureId::Fig3b => FigurePreset::ShellStates {
                panels: vec![PANCAKE_STATES],
            },
            FigureId::Fig4 => FigurePreset::TightSweep {
                eta2: 49.0,
                n_f: 60,
                lambda_min: 1.0,
                lambda_max: 70.0,
                samples: 6901,
            },
            FigureId::Fig5 => FigurePreset::Patterns {
                series: [fig5a_series(), fig5b_series()].concat(),
            },
            FigureId::Fig5a => FigurePreset::Patterns {
                series: fig5a_series(),
            },
            FigureId::Fig5b => FigurePreset::Patterns {
                series: fig5b_series(),
            },
            FigureId::Fig6 => FigurePreset::Patterns {
                series: [Some(46), Some(96), None]
                    .into_iter()
                    .map(|lambda| PatternSeries {
                        panel: "a",
                        shape: Shape::Cigar,
                        lambda,
                        eta2: 49.0,
                        n_f: 45,
                    })
                    .collect(),
            },
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownFigure;

impl FromStr for FigureId {
    type Err = UnknownFigure;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let id = s.trim().to_ascii_lowercase();
        // "6a" names the same data as "6"; its second panel is a sketch.
        let id = if id == "6a" { "6" } else { id.as_str() };
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str() == id)
            .ok_or(UnknownFigure)
    }
}

impl Serialize for FigureId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for FigureId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse()
            .map_err(|_| serde::de::Error::custom(format!("unknown figure `{s}`")))
    }
}

/// One curve of a polar figure; `lambda: None` is the infinite-aspect limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSeries {
    /// Sub-panel name for figures with several polar plots.
    pub panel: &'static str,
    pub shape: Shape,
    pub lambda: Option<u32>,
    pub eta2: f64,
    pub n_f: i64,
}

impl PatternSeries {
    pub fn label(&self) -> String {
        match self.lambda {
            Some(l) => format!("{} lambda={l} eta2={} nF={}", self.shape, self.eta2, self.n_f),
            None => format!("{} lambda=inf eta2={} nF={}", self.shape, self.eta2, self.n_f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePanel {
    pub shape: Shape,
    pub lambda: u32,
    pub eta2: f64,
    pub shell: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FigurePreset {
    /// Angle-averaged shell spectrum (shells `0..=n_max`) and angle-averaged
    /// inhibition (Fermi shells `-1..=n_max`) for each aspect ratio.
    ShellPanels {
        shape: Shape,
        eta2: f64,
        lambdas: Vec<u32>,
        n_max: u64,
    },
    ShellStates {
        panels: Vec<StatePanel>,
    },
    TightSweep {
        eta2: f64,
        n_f: i64,
        lambda_min: f64,
        lambda_max: f64,
        samples: usize,
    },
    Patterns {
        series: Vec<PatternSeries>,
    },
}

const ISOTROPIC_STATES: StatePanel = StatePanel {
    shape: Shape::Pancake,
    lambda: 1,
    eta2: 25.0,
    shell: 5,
};

const PANCAKE_STATES: StatePanel = StatePanel {
    shape: Shape::Pancake,
    lambda: 5,
    eta2: 25.0,
    shell: 5,
};

fn shell_panels(shape: Shape) -> FigurePreset {
    FigurePreset::ShellPanels {
        shape,
        eta2: 36.0,
        lambdas: vec![10, 23, 46],
        n_max: 100,
    }
}

fn fig5a_series() -> Vec<PatternSeries> {
    (31..=36)
        .map(|n_f| PatternSeries {
            panel: "a",
            shape: Shape::Pancake,
            lambda: Some(4),
            eta2: 25.0,
            n_f,
        })
        .collect()
}

fn fig5b_series() -> Vec<PatternSeries> {
    vec![PatternSeries {
        panel: "b",
        shape: Shape::Pancake,
        lambda: Some(11),
        eta2: 25.0,
        n_f: 23,
    }]
}
