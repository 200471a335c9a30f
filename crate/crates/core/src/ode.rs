//! Autonomous ODE integration: adaptive Dormand-Prince 5(4) and fixed-step RK4.

use crate::error::{Error, Result};

pub const DEFAULT_ATOL: f64 = 1e-10;
pub const DEFAULT_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            atol: DEFAULT_ATOL,
            rtol: DEFAULT_RTOL,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: 0.5,
            max_steps: 2_000_000,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive stepper for y' = f(y). Direction of time is the sign of `dir`.
pub struct Stepper {
    pub opts: OdeOptions,
    h: f64,
    dir: f64,
    n: usize,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    fsal_valid: bool,
}

impl Stepper {
    pub fn new(n: usize, dir: f64, opts: OdeOptions) -> Self {
        Stepper {
            opts,
            h: opts.h_init,
            dir: if dir < 0.0 { -1.0 } else { 1.0 },
            n,
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            fsal_valid: false,
        }
    }

    /// Forget the cached derivative; needed after `y` is modified between steps.
    pub fn invalidate(&mut self) {
        self.fsal_valid = false;
    }

    pub fn set_h(&mut self, h: f64) {
        self.h = h.abs().max(self.opts.h_min);
    }

    /// Take one accepted step of length at most `max_dt` (absolute). Returns the time advanced
    /// (signed). `y` is updated in place.
    pub fn step<F: FnMut(&[f64], &mut [f64])>(
        &mut self,
        f: &mut F,
        y: &mut [f64],
        max_dt: f64,
    ) -> Result<f64> {
        let n = self.n;
        if !self.fsal_valid {
            f(y, &mut self.k[0]);
            if self.k[0].iter().any(|v| !v.is_finite()) {
                return Err(Error::Integration("NaN encountered in field evaluation".into()));
            }
        }
        loop {
            let mut h = self.h.min(self.opts.h_max).min(max_dt.abs());
            if h <= 0.0 {
                return Ok(0.0);
            }
            let last = h >= max_dt.abs();
            h *= self.dir;
            let (k, tmp) = (&mut self.k, &mut self.tmp);
            for i in 0..n {
                tmp[i] = y[i] + h * A21 * k[0][i];
            }
            let (k0, rest) = k.split_at_mut(1);
            f(tmp, &mut rest[0]);
            for i in 0..n {
                tmp[i] = y[i] + h * (A31 * k0[0][i] + A32 * rest[0][i]);
            }
            f(tmp, &mut rest[1]);
            for i in 0..n {
                tmp[i] = y[i] + h * (A41 * k0[0][i] + A42 * rest[0][i] + A43 * rest[1][i]);
            }
            f(tmp, &mut rest[2]);
            for i in 0..n {
                tmp[i] = y[i]
                    + h * (A51 * k0[0][i] + A52 * rest[0][i] + A53 * rest[1][i] + A54 * rest[2][i]);
            }
            f(tmp, &mut rest[3]);
            for i in 0..n {
                tmp[i] = y[i]
                    + h * (A61 * k0[0][i]
                        + A62 * rest[0][i]
                        + A63 * rest[1][i]
                        + A64 * rest[2][i]
                        + A65 * rest[3][i]);
            }
            f(tmp, &mut rest[4]);
            let mut ynew = vec![0.0; n];
            for i in 0..n {
                ynew[i] = y[i]
                    + h * (B1 * k0[0][i] + B3 * rest[1][i] + B4 * rest[2][i] + B5 * rest[3][i]
                        + B6 * rest[4][i]);
            }
            f(&ynew, &mut rest[5]);
            let mut err = 0.0f64;
            for i in 0..n {
                let e = h
                    * (E1 * k0[0][i] + E3 * rest[1][i] + E4 * rest[2][i] + E5 * rest[3][i]
                        + E6 * rest[4][i]
                        + E7 * rest[5][i]);
                let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(ynew[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() || ynew.iter().any(|v| !v.is_finite()) {
                self.h = h.abs() * 0.1;
                if self.h < self.opts.h_min {
                    return Err(Error::Integration("NaN encountered".into()));
                }
                continue;
            }
            if err <= 1.0 {
                y.copy_from_slice(&ynew);
                k.swap(0, 6);
                self.fsal_valid = true;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    self.h = h.abs() * fac;
                } else {
                    self.h = self.h.max(h.abs() * fac.min(1.0));
                }
                return Ok(h);
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            self.h = h.abs() * fac;
            if self.h < self.opts.h_min {
                return Err(Error::Integration(format!(
                    "step size underflow (h = {:.3e}); possible blow-up",
                    self.h
                )));
            }
        }
    }
}

/// Integrate y' = f(y) from y0 over signed time `t`.
pub fn integrate<F: FnMut(&[f64], &mut [f64])>(
    mut f: F,
    y0: &[f64],
    t: f64,
    opts: &OdeOptions,
) -> Result<Vec<f64>> {
    let mut y = y0.to_vec();
    if t == 0.0 {
        return Ok(y);
    }
    let mut st = Stepper::new(y.len(), t, *opts);
    let mut remaining = t.abs();
    let mut steps = 0;
    while remaining > 1e-15 * t.abs().max(1.0) {
        let dt = st.step(&mut f, &mut y, remaining)?;
        remaining -= dt.abs();
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration("step budget exhausted".into()));
        }
    }
    Ok(y)
}

/// Classical RK4 with `n` equal steps over signed time `t`.
pub fn rk4<F: FnMut(&[f64], &mut [f64])>(mut f: F, y0: &[f64], t: f64, n: usize) -> Vec<f64> {
    let dim = y0.len();
    let h = t / n as f64;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    for _ in 0..n {
        f(&y, &mut k1);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + h * k3[i];
        }
        f(&tmp, &mut k4);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let y = integrate(|y, dy| dy[0] = y[0], &[1.0], 1.0, &OdeOptions::default()).unwrap();
        assert!((y[0] - std::f64::consts::E).abs() < 1e-7);
        let y = integrate(|y, dy| dy[0] = y[0], &[1.0], -2.0, &OdeOptions::default()).unwrap();
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let y = integrate(
            |y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            &[1.0, 0.0],
            2.0 * std::f64::consts::PI,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-7 && y[1].abs() < 1e-7);
    }

    #[test]
    fn blow_up_detected() {
        let r = integrate(|y, dy| dy[0] = y[0] * y[0], &[1.0], 2.0, &OdeOptions::default());
        assert!(r.is_err());
    }

    #[test]
    fn rk4_accuracy() {
        let y = rk4(|y, dy| dy[0] = -y[0], &[1.0], 1.0, 100);
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-9);
    }
}
