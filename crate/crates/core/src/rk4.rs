//! Fixed-step classical Runge-Kutta integration of complex state vectors.
//!
//! Fixed step (rather than adaptive) keeps runs bit-reproducible across
//! identical configs, which the regression suite relies on.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Scratch buffers for one RK4 stepper; reused across steps to avoid
/// per-step allocation on large continuum states.
pub struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        let zeros = vec![C64::new(0.0, 0.0); dim];
        Self {
            k1: zeros.clone(),
            k2: zeros.clone(),
            k3: zeros.clone(),
            k4: zeros.clone(),
            tmp: zeros,
        }
    }

    /// Advance `state` from `t` to `t + dt` with derivative `rhs(t, y, dy)`.
    pub fn step<F>(&mut self, rhs: &mut F, t: f64, dt: f64, state: &mut [C64])
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = state.len();
        rhs(t, state, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = state[i] + 0.5 * dt * self.k1[i];
        }
        rhs(t + 0.5 * dt, &self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = state[i] + 0.5 * dt * self.k2[i];
        }
        rhs(t + 0.5 * dt, &self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = state[i] + dt * self.k3[i];
        }
        rhs(t + dt, &self.tmp, &mut self.k4);
        for i in 0..n {
            state[i] +=
                dt / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Integrate from `t0` over `steps` fixed steps, invoking `observe` at `t0`
/// and after every `record_every`-th step (and always at the final step).
/// Aborts with the timestamp if the state stops being finite.
pub fn integrate<F, O>(
    mut rhs: F,
    state: &mut Vec<C64>,
    t0: f64,
    dt: f64,
    steps: usize,
    record_every: usize,
    mut observe: O,
) -> Result<()>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(f64, &[C64]),
{
    let mut stepper = Rk4::new(state.len());
    let every = record_every.max(1);
    observe(t0, state);
    for step in 0..steps {
        let t = t0 + step as f64 * dt;
        stepper.step(&mut rhs, t, dt, state);
        let t_next = t0 + (step + 1) as f64 * dt;
        if !state.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite(t_next));
        }
        if (step + 1) % every == 0 || step + 1 == steps {
            observe(t_next, state);
        }
    }
    Ok(())
}
