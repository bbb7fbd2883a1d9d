//! Local windows over data space and the sweeps that grow them.
//!
//! Boundary conventions: intervals are half-open `[start, start + width)`,
//! balls and hypercubes are open (`‖x‖ < r`, `|x_i| < R`), grid squares are
//! inclusive on grid indices counted from 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::targets::SampleGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Interval1d {
        start: f64,
        width: f64,
    },
    GridSquare {
        anchor_row: usize,
        anchor_col: usize,
        edge: usize,
        grid: SampleGrid,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    HyperCube {
        half_width: f64,
        dim: usize,
    },
}

/// Axis-aligned box used for node placement.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// True when the lower face belongs to the region, so the canonical
    /// lattice can start exactly on it.
    pub lower_closed: bool,
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidRegion(format!("{what} must be positive, got {v}")))
            }
        };
        match self {
            Region::Interval1d { width, start } => {
                positive(*width, "width")?;
                if !start.is_finite() {
                    return Err(Error::InvalidRegion("start must be finite".into()));
                }
                Ok(())
            }
            Region::GridSquare {
                anchor_row,
                anchor_col,
                edge,
                grid,
            } => {
                if grid.dim() != 2 {
                    return Err(Error::InvalidRegion("grid square needs a 2D grid".into()));
                }
                if *edge == 0 {
                    return Err(Error::InvalidRegion("edge must be positive".into()));
                }
                for (axis, anchor) in [*anchor_row, *anchor_col].into_iter().enumerate() {
                    if anchor + edge > grid.axes[axis].count {
                        return Err(Error::InvalidRegion(format!(
                            "square of edge {edge} at {anchor} overruns axis {axis} of length {}",
                            grid.axes[axis].count
                        )));
                    }
                }
                Ok(())
            }
            Region::Ball { radius, center } => {
                positive(*radius, "radius")?;
                if center.is_empty() {
                    return Err(Error::InvalidRegion("ball center is empty".into()));
                }
                Ok(())
            }
            Region::HyperCube { half_width, dim } => {
                positive(*half_width, "half-width")?;
                if *dim == 0 {
                    return Err(Error::InvalidRegion("hypercube dimension is zero".into()));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Interval1d { .. } => 1,
            Region::GridSquare { .. } => 2,
            Region::Ball { center, .. } => center.len(),
            Region::HyperCube { dim, .. } => *dim,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            Region::Interval1d { .. } => "interval",
            Region::GridSquare { .. } => "grid_square",
            Region::Ball { .. } => "ball",
            Region::HyperCube { .. } => "hypercube",
        }
    }

    /// Width, edge (in grid cells), radius or half-width.
    pub fn size(&self) -> f64 {
        match self {
            Region::Interval1d { width, .. } => *width,
            Region::GridSquare { edge, .. } => *edge as f64,
            Region::Ball { radius, .. } => *radius,
            Region::HyperCube { half_width, .. } => *half_width,
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(match self {
            Region::Interval1d { start, width } => x[0] >= *start && x[0] < start + width,
            Region::GridSquare { .. } => {
                let b = self.node_box();
                x.iter().zip(b.lo.iter().zip(&b.hi)).all(|(v, (lo, hi))| v >= lo && v <= hi)
            }
            Region::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                r2.sqrt() < *radius
            }
            Region::HyperCube { half_width, .. } => x.iter().all(|v| v.abs() < *half_width),
        })
    }

    /// Box in which surrogate query nodes are placed. For a ball this is the
    /// inscribed cube.
    pub fn node_box(&self) -> NodeBox {
        match self {
            Region::Interval1d { start, width } => NodeBox {
                lo: vec![*start],
                hi: vec![start + width],
                lower_closed: true,
            },
            Region::GridSquare {
                anchor_row,
                anchor_col,
                edge,
                grid,
            } => {
                let last = edge - 1;
                NodeBox {
                    lo: vec![grid.coord(0, *anchor_row), grid.coord(1, *anchor_col)],
                    hi: vec![grid.coord(0, anchor_row + last), grid.coord(1, anchor_col + last)],
                    lower_closed: true,
                }
            }
            Region::Ball { center, radius } => {
                let h = radius / (center.len() as f64).sqrt();
                NodeBox {
                    lo: center.iter().map(|c| c - h).collect(),
                    hi: center.iter().map(|c| c + h).collect(),
                    lower_closed: false,
                }
            }
            Region::HyperCube { half_width, dim } => NodeBox {
                lo: vec![-half_width; *dim],
                hi: vec![*half_width; *dim],
                lower_closed: false,
            },
        }
    }
}

/// Ascending indices of the rows of `xs` inside `region`.
pub fn select(xs: &[Vec<f64>], region: &Region) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        if region.contains(x)? {
            out.push(i);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepSpec {
    /// Windows anchored at `start`, widened by `increment` until the last one
    /// is clamped to `max_width`.
    Intervals {
        start: f64,
        initial_width: f64,
        increment: f64,
        max_width: f64,
    },
    GridSquares {
        grid: SampleGrid,
        anchor_row: usize,
        anchor_col: usize,
        min_edge: usize,
        max_edge: usize,
    },
    Balls {
        center: Vec<f64>,
        start: f64,
        step: f64,
        end: f64,
    },
    HyperCubes {
        dim: usize,
        start: f64,
        step: f64,
        end: f64,
    },
}

/// Rounds to 13 significant digits so `0.3 + 3·0.2` reads back as `0.9`.
fn snap(v: f64) -> f64 {
    format!("{v:.12e}").parse().unwrap_or(v)
}

/// `start, start + step, …` while strictly below `end`, then `end` itself.
pub fn progression(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "progression needs step > 0 and end >= start (start {start}, step {step}, end {end})"
        )));
    }
    // tolerance absorbs rounding of start + k·step landing on end
    let tol = 1e-9 * step;
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let v = snap(start + k as f64 * step);
        if v >= end - tol {
            break;
        }
        out.push(v);
        k += 1;
    }
    out.push(end);
    Ok(out)
}

pub fn sweep(spec: &SweepSpec) -> Result<Vec<Region>> {
    let regions: Vec<Region> = match spec {
        SweepSpec::Intervals {
            start,
            initial_width,
            increment,
            max_width,
        } => progression(*initial_width, *increment, *max_width)?
            .into_iter()
            .map(|width| Region::Interval1d {
                start: *start,
                width,
            })
            .collect(),
        SweepSpec::GridSquares {
            grid,
            anchor_row,
            anchor_col,
            min_edge,
            max_edge,
        } => {
            if min_edge > max_edge {
                return Err(Error::InvalidConfig("min_edge exceeds max_edge".into()));
            }
            (*min_edge..=*max_edge)
                .map(|edge| Region::GridSquare {
                    anchor_row: *anchor_row,
                    anchor_col: *anchor_col,
                    edge,
                    grid: grid.clone(),
                })
                .collect()
        }
        SweepSpec::Balls {
            center,
            start,
            step,
            end,
        } => progression(*start, *step, *end)?
            .into_iter()
            .map(|radius| Region::Ball {
                center: center.clone(),
                radius,
            })
            .collect(),
        SweepSpec::HyperCubes {
            dim,
            start,
            step,
            end,
        } => progression(*start, *step, *end)?
            .into_iter()
            .map(|half_width| Region::HyperCube {
                half_width,
                dim: *dim,
            })
            .collect(),
    };
    for r in &regions {
        r.validate()?;
    }
    Ok(regions)
}
