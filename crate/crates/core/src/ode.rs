//! Adaptive Dormand-Prince 5(4) transport for complex linear systems.
//!
//! Integrates `Y'(tau) = M(tau) Y(tau)`, `Y(0) = I`, over `tau` in `[0, 1]`,
//! together with the scalar `J'(tau) = tr M(tau)`, so that Liouville's
//! identity `det Y(1) = exp(J(1))` is available as an independent residual.
//! The right-hand side is supplied by the caller as a matrix-valued function
//! of the path parameter; transport along paths in the complex plane feeds
//! the pulled-back coefficient through here.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::C64;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h_init: 1e-3, h_min: 1e-13, max_steps: 2_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Transport {
    pub matrix: Mat<C64>,
    /// Accumulated `int_0^1 tr M(tau) dtau`.
    pub log_det: C64,
    /// Sum of accepted local truncation error estimates, absolute.
    pub error_estimate: f64,
    pub steps: usize,
}

impl Transport {
    /// `|det(matrix) - exp(log_det)|`, the Liouville residual.
    pub fn det_residual(&self) -> f64 {
        (self.matrix.det() - self.log_det.exp()).norm()
    }
}

/// One state of the augmented system: the fundamental matrix and the running
/// trace integral.
#[derive(Clone)]
struct State {
    y: Mat<C64>,
    j: C64,
}

impl State {
    fn axpy(&self, c: f64, k: &Slope) -> State {
        let cc = C64::new(c, 0.0);
        State { y: self.y.add(&k.dy.scale(&cc)), j: self.j + cc * k.dj }
    }

    fn is_finite(&self) -> bool {
        self.j.re.is_finite()
            && self.j.im.is_finite()
            && (0..self.y.rows()).all(|i| {
                (0..self.y.cols()).all(|l| {
                    let v = &self.y[(i, l)];
                    v.re.is_finite() && v.im.is_finite()
                })
            })
    }
}

struct Slope {
    dy: Mat<C64>,
    dj: C64,
}

fn slope<F: Fn(f64) -> Mat<C64>>(rhs: &F, tau: f64, s: &State) -> Slope {
    let m = rhs(tau);
    Slope { dj: m.trace(), dy: m.matmul(&s.y) }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// Fifth-order minus fourth-order weights; the dot product with the stages is
/// the local error per unit step.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Transport the fundamental matrix of `Y' = M(tau) Y` across `[0, 1]`.
pub fn transport_linear<F: Fn(f64) -> Mat<C64>>(
    dim: usize,
    rhs: F,
    opts: &OdeOptions,
) -> Result<Transport> {
    let mut state = State { y: Mat::identity(dim), j: C64::new(0.0, 0.0) };
    let mut tau = 0.0f64;
    let mut h = opts.h_init.min(1.0);
    let mut error_estimate = 0.0f64;
    let mut steps = 0usize;
    let mut k1 = slope(&rhs, tau, &state);
    while tau < 1.0 {
        if steps >= opts.max_steps {
            return Err(Error::Unsupported(format!(
                "transport exceeded {} steps at tau = {tau:.6}",
                opts.max_steps
            )));
        }
        if h < opts.h_min {
            if 1.0 - tau < opts.h_min {
                break;
            }
            return Err(Error::StepUnderflow(h));
        }
        if tau + h > 1.0 {
            h = 1.0 - tau;
        }
        let mut ks: Vec<Slope> = Vec::with_capacity(7);
        ks.push(Slope { dy: k1.dy.clone(), dj: k1.dj });
        for stage in 0..6 {
            let mut arg = state.clone();
            for (l, k) in ks.iter().enumerate() {
                let w = A[stage][l];
                if w != 0.0 {
                    arg = arg.axpy(h * w, k);
                }
            }
            ks.push(slope(&rhs, tau + C[stage] * h, &arg));
        }
        // The last stage row of A is the fifth-order solution (FSAL).
        let mut next = state.clone();
        for (l, k) in ks.iter().take(6).enumerate() {
            let w = A[5][l];
            if w != 0.0 {
                next = next.axpy(h * w, k);
            }
        }
        if !next.is_finite() {
            return Err(Error::NonFiniteState);
        }
        let mut err_abs = 0.0f64;
        let mut err_scaled = 0.0f64;
        for i in 0..dim {
            for l in 0..dim {
                let mut d = C64::new(0.0, 0.0);
                for (s, k) in ks.iter().enumerate() {
                    if E[s] != 0.0 {
                        d += C64::new(E[s], 0.0) * k.dy[(i, l)];
                    }
                }
                let e = d.norm() * h;
                let scale = opts.atol
                    + opts.rtol * state.y[(i, l)].norm().max(next.y[(i, l)].norm());
                err_abs = err_abs.max(e);
                err_scaled = err_scaled.max(e / scale);
            }
        }
        if !err_scaled.is_finite() {
            return Err(Error::NonFiniteState);
        }
        if err_scaled <= 1.0 {
            tau += h;
            state = next;
            error_estimate += err_abs;
            // FSAL: the seventh stage is the slope at the accepted point.
            k1 = Slope { dy: ks[6].dy.clone(), dj: ks[6].dj };
            steps += 1;
        }
        let factor = if err_scaled > 0.0 {
            0.9 * err_scaled.powf(-0.2)
        } else {
            5.0
        };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok(Transport { matrix: state.y, log_det: state.j, error_estimate, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_exponential_is_exact_to_tolerance() {
        let c = C64::new(0.3, -1.7);
        let out = transport_linear(1, |_| Mat::scalar(1, &c), &OdeOptions::default()).unwrap();
        assert!((out.matrix[(0, 0)] - c.exp()).norm() < 1e-9);
        assert!((out.log_det - c).norm() < 1e-9);
        assert!(out.det_residual() < 1e-9);
    }

    #[test]
    fn rotation_block_stays_on_the_circle() {
        let omega = 3.5f64;
        let mut m = Mat::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(-omega, 0.0);
        m[(1, 0)] = C64::new(omega, 0.0);
        let out = transport_linear(2, |_| m.clone(), &OdeOptions::default()).unwrap();
        assert!((out.matrix[(0, 0)].re - omega.cos()).abs() < 1e-10);
        assert!((out.matrix[(1, 0)].re - omega.sin()).abs() < 1e-10);
        assert!(out.det_residual() < 1e-10);
    }

    #[test]
    fn time_dependent_coefficient_integrates_the_primitive() {
        // y' = 2 tau y has the solution exp(tau^2).
        let out = transport_linear(
            1,
            |tau| Mat::scalar(1, &C64::new(2.0 * tau, 0.0)),
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((out.matrix[(0, 0)].re - 1.0f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn pole_on_the_path_underflows_instead_of_lying() {
        // Coefficient -1/(tau - 1/2) has the genuinely singular solution
        // 1/(tau - 1/2); a +1 coefficient would be an apparent singularity
        // with a smooth linear solution and must not be used here.
        let err = transport_linear(
            1,
            |tau| Mat::scalar(1, &C64::new(-1.0 / (tau - 0.5), 0.0)),
            &OdeOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::StepUnderflow(_) | Error::NonFiniteState));
    }
}
