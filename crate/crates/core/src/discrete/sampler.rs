use super::{check_shapes, CellState, DiscreteTarget, Event};
use crate::error::{Error, Result};
use crate::field::Coefficients;

/// Largest double below one. Offsets that reach a face at exactly the same
/// time as the exit axis are parked here and leave on the next event.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

pub(crate) fn boundary_time(offset: f64, conditional: f64, c: f64) -> f64 {
    (1.0 - offset) * conditional / c
}

pub(crate) fn check_conditionals(cond: &[f64]) -> Result<()> {
    match cond.iter().position(|&q| !(0.0..=1.0 + 1e-9).contains(&q)) {
        Some(j) => Err(Error::Consistency(format!(
            "conditional {} on axis {j} is not a probability; axis sum and mass disagree",
            cond[j]
        ))),
        None => Ok(()),
    }
}

/// Stateful event-driven integrator. Keeps the per-axis conditionals cached
/// and refreshes only the axes a crossing can affect.
pub struct EventSampler<'a, T: ?Sized> {
    target: &'a T,
    c: Coefficients,
    state: CellState,
    cond: Vec<f64>,
    tau: Vec<f64>,
    last_zero_mass: bool,
}

impl<'a, T: DiscreteTarget + ?Sized> EventSampler<'a, T> {
    pub fn new(target: &'a T, c: Coefficients, state: CellState) -> Result<Self> {
        check_shapes(target, &c, &state)?;
        let n = c.len();
        let mut cond = vec![0.0; n];
        target.conditionals_into(&state.cell, &mut cond);
        check_conditionals(&cond)?;
        Ok(Self {
            target,
            c,
            state,
            cond,
            tau: vec![0.0; n],
            last_zero_mass: false,
        })
    }

    pub fn state(&self) -> &CellState {
        &self.state
    }

    pub fn into_state(self) -> CellState {
        self.state
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.c
    }

    /// Whether the last event left a zero-probability cell.
    pub fn last_was_zero_mass(&self) -> bool {
        self.last_zero_mass
    }

    /// Advances to the next face crossing and returns it. The dwell belongs to
    /// the cell occupied before the call.
    pub fn step(&mut self) -> Result<Event> {
        let n = self.c.len();
        let mut exit = 0;
        let mut dwell = f64::INFINITY;
        for j in 0..n {
            let t = boundary_time(self.state.offset[j], self.cond[j], self.c[j]);
            self.tau[j] = t;
            // strict comparison: ties go to the lowest axis
            if t < dwell {
                dwell = t;
                exit = j;
            }
        }

        let all_zero = self.tau.iter().all(|&t| t == 0.0);
        self.last_zero_mass = all_zero;
        if all_zero {
            // No time passes in a massless cell; leave along the fastest axis.
            exit = self.fastest_axis();
            dwell = 0.0;
        } else {
            for k in 0..n {
                if k == exit {
                    continue;
                }
                let ratio = if self.tau[k] > 0.0 { dwell / self.tau[k] } else { 0.0 };
                let o = &mut self.state.offset[k];
                *o = (*o + (1.0 - *o) * ratio).min(BELOW_ONE);
            }
        }

        let d = self.target.dims()[exit];
        self.state.offset[exit] = 0.0;
        self.state.cell[exit] = (self.state.cell[exit] + 1) % d;
        self.state.time += dwell;
        self.refresh(exit)?;
        Ok(Event { axis: exit, dwell })
    }

    /// Axis maximizing `c_j S_j`, lowest index on ties.
    fn fastest_axis(&self) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for j in 0..self.c.len() {
            let score = self.c[j].ln() + self.target.log_axis_sum(j, &self.state.cell);
            if score > best_score {
                best_score = score;
                best = j;
            }
        }
        best
    }

    fn refresh(&mut self, changed: usize) -> Result<()> {
        match self.target.dependents(changed) {
            Some(axes) => {
                for &k in axes {
                    self.cond[k] = self.target.conditional(k, &self.state.cell);
                }
            }
            None => self.target.conditionals_into(&self.state.cell, &mut self.cond),
        }
        check_conditionals(&self.cond)
    }
}
