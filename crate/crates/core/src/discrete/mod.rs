//! Exact event-driven dynamical Gibbs on dequantized discrete targets.
//!
//! State `(i_1..i_n)` owns the unit cube `i + [0,1)^n` with constant density
//! `p(i)`. Inside a cell the velocity `v_j = c_j S_j / p` (with `S_j` the sum
//! of `p` along axis `j`) is constant, so the particle moves in a straight
//! line and the flow reduces to a sequence of boundary crossings. Each visited
//! cell is emitted with the time spent in it; dwell-weighted averages converge
//! to expectations under `p`.

mod estimate;
mod sampler;
mod target;

pub use estimate::{weighted_expectation, weighted_histogram, Summation};
pub use sampler::EventSampler;
pub use target::{flat_index, log_sum_exp, state_count, unflatten, DiscreteTarget};

use crate::error::{Error, Result};
use crate::field::Coefficients;

/// Position of the particle: integer cell, offset inside it, elapsed time.
#[derive(Clone, Debug, PartialEq)]
pub struct CellState {
    pub cell: Vec<usize>,
    pub offset: Vec<f64>,
    pub time: f64,
}

impl CellState {
    /// Cell all zeros, offsets all one half.
    pub fn centered(n: usize) -> Self {
        Self {
            cell: vec![0; n],
            offset: vec![0.5; n],
            time: 0.0,
        }
    }

    pub fn new(cell: Vec<usize>, offset: Vec<f64>) -> Self {
        Self {
            cell,
            offset,
            time: 0.0,
        }
    }

    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        if self.cell.len() != dims.len() || self.offset.len() != dims.len() {
            return Err(Error::Argument(format!(
                "state has {} cells and {} offsets for {} axes",
                self.cell.len(),
                self.offset.len(),
                dims.len()
            )));
        }
        for (j, ((&c, &o), &d)) in self.cell.iter().zip(&self.offset).zip(dims).enumerate() {
            if c >= d {
                return Err(Error::Argument(format!("cell {c} out of range on axis {j} (size {d})")));
            }
            if !(0.0..1.0).contains(&o) {
                return Err(Error::Argument(format!("offset {o} on axis {j} is outside [0, 1)")));
            }
        }
        if !(self.time >= 0.0) {
            return Err(Error::Argument(format!("time must be non-negative, got {}", self.time)));
        }
        Ok(())
    }
}

/// A discrete state with the time the flow spent in its cell.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample {
    pub state: Vec<usize>,
    pub dwell: f64,
}

/// One boundary crossing: the axis the particle left through and the dwell
/// time of the cell it left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub axis: usize,
    pub dwell: f64,
}

/// A run of events, stored as the start cell plus the crossing sequence.
#[derive(Clone, Debug)]
pub struct EventTrace {
    dims: Vec<usize>,
    start: Vec<usize>,
    events: Vec<Event>,
    total_time: f64,
    zero_mass_events: usize,
    end: CellState,
}

impl EventTrace {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// Events emitted from zero-probability cells (zero dwell).
    pub fn zero_mass_events(&self) -> usize {
        self.zero_mass_events
    }

    /// State after the last event.
    pub fn end_state(&self) -> &CellState {
        &self.end
    }

    /// Calls `f(state, dwell)` for every sample in order without allocating.
    pub fn for_each_sample(&self, mut f: impl FnMut(&[usize], f64)) {
        let mut state = self.start.clone();
        for e in &self.events {
            f(&state, e.dwell);
            state[e.axis] = (state[e.axis] + 1) % self.dims[e.axis];
        }
    }

    pub fn samples(&self) -> Vec<WeightedSample> {
        let mut out = Vec::with_capacity(self.events.len());
        self.for_each_sample(|s, dwell| {
            out.push(WeightedSample {
                state: s.to_vec(),
                dwell,
            })
        });
        out
    }

    /// Flat row-major index of every visited cell, in order.
    pub fn cell_sequence(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.events.len());
        self.for_each_sample(|s, _| out.push(flat_index(&self.dims, s)));
        out
    }
}

fn check_shapes<T: DiscreteTarget + ?Sized>(target: &T, c: &Coefficients, s: &CellState) -> Result<()> {
    if c.len() != target.dims().len() {
        return Err(Error::Argument(format!(
            "{} coefficients for {} axes",
            c.len(),
            target.dims().len()
        )));
    }
    s.validate(target.dims())
}

/// Time until the particle reaches the far face of its cell along each axis:
/// `tau_j = (1 - offset_j) p / (c_j S_j)`. All zero exactly when `p = 0`.
pub fn boundary_times<T: DiscreteTarget + ?Sized>(target: &T, c: &Coefficients, s: &CellState) -> Result<Vec<f64>> {
    check_shapes(target, c, s)?;
    let mut cond = vec![0.0; c.len()];
    target.conditionals_into(&s.cell, &mut cond);
    sampler::check_conditionals(&cond)?;
    Ok((0..c.len())
        .map(|j| sampler::boundary_time(s.offset[j], cond[j], c[j]))
        .collect())
}

/// Moves the particle to the next cell boundary. Returns the new state and the
/// sample for the cell just left.
pub fn advance_event<T: DiscreteTarget + ?Sized>(
    target: &T,
    c: &Coefficients,
    s: &CellState,
) -> Result<(CellState, WeightedSample)> {
    let mut sampler = EventSampler::new(target, c.clone(), s.clone())?;
    let state = s.cell.clone();
    let event = sampler.step()?;
    Ok((
        sampler.into_state(),
        WeightedSample {
            state,
            dwell: event.dwell,
        },
    ))
}

/// `n_events` successive crossings from `s0`.
pub fn run_events<T: DiscreteTarget + ?Sized>(
    target: &T,
    c: &Coefficients,
    s0: &CellState,
    n_events: usize,
) -> Result<EventTrace> {
    if n_events == 0 {
        return Err(Error::Argument("need at least one event".into()));
    }
    let mut sampler = EventSampler::new(target, c.clone(), s0.clone())?;
    let mut events = Vec::with_capacity(n_events);
    let mut total_time = 0.0;
    let mut zero_mass_events = 0;
    for _ in 0..n_events {
        let e = sampler.step()?;
        if sampler.last_was_zero_mass() {
            zero_mass_events += 1;
        }
        total_time += e.dwell;
        events.push(e);
    }
    Ok(EventTrace {
        dims: target.dims().to_vec(),
        start: s0.cell.clone(),
        events,
        total_time,
        zero_mass_events,
        end: sampler.into_state(),
    })
}
