use num_complex::Complex64 as C64;

/// Where inside a step the right-hand side is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Start,
    Mid,
    End,
}

/// Classical fixed-step fourth-order Runge–Kutta on a complex state vector.
/// Scratch buffers are reused across steps.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim];
        Rk4 {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    /// Advance `y` by one step of size `dt`. `f(stage, y, dy)` writes the
    /// derivative; the stage tells it whether to use `t`, `t + dt/2`, or
    /// `t + dt`.
    pub fn step<F>(&mut self, dt: f64, y: &mut [C64], mut f: F)
    where
        F: FnMut(Stage, &[C64], &mut [C64]),
    {
        let h2 = 0.5 * dt;
        f(Stage::Start, y, &mut self.k1);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *t = y + k * h2;
        }
        f(Stage::Mid, &self.tmp, &mut self.k2);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *t = y + k * h2;
        }
        f(Stage::Mid, &self.tmp, &mut self.k3);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *t = y + k * dt;
        }
        f(Stage::End, &self.tmp, &mut self.k4);
        let h6 = dt / 6.0;
        for (i, y) in y.iter_mut().enumerate() {
            *y += (self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]) * h6;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// dy/dt = (a + ib) y has the exact solution y0 exp((a+ib)t).
    #[test]
    fn fourth_order_on_complex_exponential() {
        let rate = C64::new(-0.3, 2.0);
        let run = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut rk = Rk4::new(1);
            let mut y = vec![C64::new(1.0, 0.0)];
            for _ in 0..n {
                rk.step(dt, &mut y, |_, y, dy| dy[0] = rate * y[0]);
            }
            (y[0] - rate.exp()).norm()
        };
        let (e1, e2) = (run(50), run(100));
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.1, "observed order {order}");
    }
}
