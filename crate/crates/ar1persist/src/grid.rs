//! Uniform cell partitions of `(0, cap]` used by the operator
//! pipelines.
//!
//! A grid carries `n` equal cells with nodes at cell midpoints, plus a
//! split point `r` on a cell edge that divides the nodes into a lower
//! block `A` (nodes below `r`) and an upper block `B`. The split is the
//! interface between the excursion algebra's "core" and "tail" regions,
//! so it must land exactly on a cell edge.
//!
//! `select_cap` implements the truncation policy: the cap grows
//! geometrically from the split point until the one-step mass that can
//! escape past the cap, maximized over start points inside the domain,
//! falls below a tolerance. Light-tailed innovations satisfy it after a
//! handful of doublings; regularly varying tails may exhaust the
//! doubling budget, and that failure is reported, not papered over --
//! for such models no moderate truncation is faithful.

use crate::innovations::InnovationModel;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("invalid grid: {message}")]
    Invalid { message: String },
    #[error(
        "split point {r} does not lie on a cell edge of [0, {cap}] with {n} cells; \
         nearest edges are {below} and {above}"
    )]
    SplitNotAligned {
        r: f64,
        cap: f64,
        n: usize,
        below: f64,
        above: f64,
    },
    #[error(
        "cap search failed: overflow mass still {overflow:.3e} at cap {cap:.3e} \
         after {doublings} doublings (tolerance {tol:.1e}); the right tail is too \
         heavy for a moderate truncation"
    )]
    CapSearchFailed {
        cap: f64,
        overflow: f64,
        doublings: u32,
        tol: f64,
    },
}

/// A uniform partition of `(0, cap]` into `n` cells with a block split
/// after `split` cells (the split point is `cap * split / n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    cap: f64,
    n: usize,
    split: usize,
}

impl Grid {
    /// Builds a uniform grid; `r` must sit on a cell edge strictly
    /// inside `(0, cap)`.
    pub fn uniform(cap: f64, n: usize, r: f64) -> Result<Self, GridError> {
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(GridError::Invalid {
                message: format!("cap must be positive and finite, got {cap}"),
            });
        }
        if n < 2 {
            return Err(GridError::Invalid {
                message: format!("need at least 2 cells, got {n}"),
            });
        }
        if !(r > 0.0 && r < cap) {
            return Err(GridError::Invalid {
                message: format!("split point must satisfy 0 < r < cap, got r={r}, cap={cap}"),
            });
        }
        let k = (r / cap * n as f64).round();
        let edge = cap * k / n as f64;
        if (edge - r).abs() > 1e-9 * cap || k < 1.0 || k as usize >= n {
            let below = cap * (r / cap * n as f64).floor() / n as f64;
            let above = cap * (r / cap * n as f64).ceil() / n as f64;
            return Err(GridError::SplitNotAligned { r, cap, n, below, above });
        }
        Ok(Self { cap, n, split: k as usize })
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of cells in the lower block `A`.
    pub fn split(&self) -> usize {
        self.split
    }

    /// The split point as a coordinate.
    pub fn r(&self) -> f64 {
        self.cap * self.split as f64 / self.n as f64
    }

    /// Uniform cell width.
    pub fn width(&self) -> f64 {
        self.cap / self.n as f64
    }

    /// Cell edge `i`, for `i` in `0..=n`.
    pub fn edge(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        self.cap * i as f64 / self.n as f64
    }

    /// Node `i` (midpoint of cell `i`), for `i` in `0..n`.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        self.cap * (i as f64 + 0.5) / self.n as f64
    }

    /// All nodes in order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the cell containing `x`, if `0 < x <= cap`.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if x <= 0.0 || x > self.cap {
            return None;
        }
        let i = (x / self.width()).ceil() as usize - 1;
        Some(i.min(self.n - 1))
    }
}

/// Worst-case one-step escape mass past `cap`: the start point that
/// maximizes `P(a x + xi > cap)` over `x` in `(0, cap]` is `x = cap`.
pub fn overflow_mass(model: &InnovationModel, a: f64, cap: f64) -> f64 {
    model.sf((1.0 - a) * cap)
}

/// Smallest cap of the form `r * 2^k` whose worst-case escape mass is
/// below `tol`. Fails after `max_doublings` attempts.
pub fn select_cap(
    model: &InnovationModel,
    a: f64,
    r: f64,
    tol: f64,
    max_doublings: u32,
) -> Result<f64, GridError> {
    assert!(r > 0.0 && a > 0.0 && a < 1.0 && tol > 0.0);
    let mut cap = r;
    for k in 0..=max_doublings {
        let overflow = overflow_mass(model, a, cap);
        if overflow < tol {
            return Ok(cap);
        }
        if k == max_doublings {
            return Err(GridError::CapSearchFailed {
                cap,
                overflow,
                doublings: max_doublings,
                tol,
            });
        }
        cap *= 2.0;
    }
    unreachable!()
}
