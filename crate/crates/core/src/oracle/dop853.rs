//! Dormand–Prince 8(5) explicit Runge–Kutta pair (Hairer's DOP853
//! coefficients) for small complex systems.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

use crate::error::{Error, Result};

const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510,
    0.281649658092772603273242802490,
    0.333333333333333333333333333333,
    0.25,
    0.307692307692307692307692307692,
    0.651282051282051282051282051282,
    0.6,
    0.857142857142857142857142857142,
    1.0,
];

#[rustfmt::skip]
const A: [[f64; 11]; 12] = [
    [0.0; 11],
    [5.26001519587677318785587544488e-02, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.97250569845378994544595329183e-02, 5.91751709536136983633785987549e-02, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.95875854768068491816892993775e-02, 0.0, 8.87627564304205475450678981324e-02, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.41365134159266685502369798665e-01, 0.0, -8.84549479328286085344864962717e-01, 9.24834003261792003115737966543e-01, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.70370370370370370370370370370e-02, 0.0, 0.0, 1.70828608729473871279604482173e-01, 1.25467687566822425016691814123e-01, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.71093750000000000000000000000e-02, 0.0, 0.0, 1.70252211019544039314978060272e-01, 6.02165389804559606850219397283e-02, -1.75781250000000000000000000000e-02, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.70920001185047927108779319836e-02, 0.0, 0.0, 1.70383925712239993810214054705e-01, 1.07262030446373284651809199168e-01, -1.53194377486244017527936158236e-02, 8.27378916381402288758473766002e-03, 0.0, 0.0, 0.0, 0.0],
    [6.24110958716075717114429577812e-01, 0.0, 0.0, -3.36089262944694129406857109825e+00, -8.68219346841726006818189891453e-01, 2.75920996994467083049415600797e+01, 2.01540675504778934086186788979e+01, -4.34898841810699588477366255144e+01, 0.0, 0.0, 0.0],
    [4.77662536438264365890433908527e-01, 0.0, 0.0, -2.48811461997166764192642586468e+00, -5.90290826836842996371446475743e-01, 2.12300514481811942347288949897e+01, 1.52792336328824235832596922938e+01, -3.32882109689848629194453265587e+01, -2.03312017085086261358222928593e-02, 0.0, 0.0],
    [-9.37142430085987325717040528057e-01, 0.0, 0.0, 5.18637242884406370830023853209e+00, 1.09143734899672957818500254654e+00, -8.14978701074692612513997267357e+00, -1.85200656599969598641566180701e+01, 2.27394870993505042818970056734e+01, 2.49360555267965238987089396762e+00, -3.04676447189821950038236690220e+00, 0.0],
    [2.27331014751653820792359768449e+00, 0.0, 0.0, -1.05344954667372501984066689879e+01, -2.00087205822486249909675718444e+00, -1.79589318631187989172765950534e+01, 2.79488845294199600508499808837e+01, -2.85899827713502369474065508674e+00, -8.87285693353062954433549289258e+00, 1.23605671757943030647266201528e+01, 6.43392746015763530355970484046e-01],
];

const B: [f64; 12] = [
    5.42937341165687622380535766363e-02,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566e+00,
    1.89151789931450038304281599044e+00,
    -5.80120396001058478146721142270e+00,
    3.11164366957819894408916062370e-01,
    -1.52160949662516078556178806805e-01,
    2.01365400804030348374776537501e-01,
    4.47106157277725905176885569043e-02,
];

// difference between the 8th-order weights and the embedded 5th-order ones
const E5: [f64; 12] = [
    0.1312004499419488073250102996e-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753e+01,
    -0.4957589496572501915214079952e+00,
    0.1664377182454986536961530415e+01,
    -0.3503288487499736816886487290e+00,
    0.3341791187130174790297318841e+00,
    0.8192320648511571246570742613e-01,
    -0.2235530786388629525884427845e-01,
];

pub type State = [Complex64; 2];

fn axpy(y: &State, h: f64, ks: &[State], w: &[f64]) -> State {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(w) {
        if c != 0.0 {
            out[0] += k[0] * (h * c);
            out[1] += k[1] * (h * c);
        }
    }
    out
}

/// One step; returns the 8th-order update and the error estimate.
pub fn step<F>(rhs: &F, x: f64, y: &State, h: f64) -> Result<(State, State)>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let mut k: Vec<State> = Vec::with_capacity(12);
    for s in 0..12 {
        let ys = axpy(y, h, &k, &A[s][..s]);
        k.push(rhs(x + C[s] * h, &ys)?);
    }
    let y8 = axpy(y, h, &k, &B);
    let zero = [Complex64::new(0.0, 0.0); 2];
    let err = axpy(&zero, h, &k, &E5);
    Ok((y8, err))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

const MAX_STEPS: usize = 200_000;

/// Adaptive integration from `x0` to `x1` (either direction).
pub fn integrate_to<F>(rhs: &F, x0: f64, y0: State, x1: f64, tol: Tolerance, stats: &mut Stats) -> Result<State>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = dir * (span.abs() / 16.0).min(0.05);
    let h_min = 1e-12 * (1.0 + x0.abs().max(x1.abs()));
    for _ in 0..MAX_STEPS {
        if (x1 - x) * dir <= 0.0 {
            return Ok(y);
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let (y8, e) = step(rhs, x, &y, h)?;
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let sc = tol.atol + tol.rtol * y[i].norm().max(y8[i].norm());
            err = err.max(e[i].norm() / sc);
        }
        if err <= 1.0 {
            x += h;
            y = y8;
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let fac = if err == 0.0 {
            6.0
        } else {
            (0.9 * err.powf(-1.0 / 8.0)).clamp(0.333, 6.0)
        };
        h *= fac;
        if h.abs() < h_min {
            return Err(Error::Integration {
                at: x,
                detail: format!("step size collapsed to {h:e}"),
            });
        }
    }
    Err(Error::Integration {
        at: x,
        detail: format!("more than {MAX_STEPS} steps"),
    })
}

/// Fixed-step integration with `n` equal steps (for order verification).
pub fn integrate_fixed<F>(rhs: &F, x0: f64, y0: State, x1: f64, n: usize) -> Result<State>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let h = (x1 - x0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = step(rhs, x0 + i as f64 * h, &y, h)?.0;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_: f64, y: &State) -> Result<State> {
        Ok([y[1], -y[0]])
    }

    fn one() -> State {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    }

    #[test]
    fn weights_are_consistent() {
        assert!((B.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(E5.iter().sum::<f64>().abs() < 1e-14);
        for s in 1..12 {
            assert!((A[s].iter().sum::<f64>() - C[s]).abs() < 1e-13, "row {s}");
        }
    }

    #[test]
    fn fixed_step_order_is_eight() {
        let exact = 2.0f64.cos();
        let e1 = (integrate_fixed(&oscillator, 0.0, one(), 2.0, 8).unwrap()[0].re - exact).abs();
        let e2 = (integrate_fixed(&oscillator, 0.0, one(), 2.0, 16).unwrap()[0].re - exact).abs();
        let order = (e1 / e2).log2();
        assert!((7.0..9.5).contains(&order), "observed order {order}");
    }

    #[test]
    fn adaptive_meets_tolerance_in_both_directions() {
        let tol = Tolerance {
            rtol: 1e-12,
            atol: 1e-14,
        };
        let mut st = Stats::default();
        let y = integrate_to(&oscillator, 0.0, one(), 10.0, tol, &mut st).unwrap();
        assert!((y[0].re - 10.0f64.cos()).abs() < 1e-10);
        let y = integrate_to(&oscillator, 0.0, one(), -3.0, tol, &mut st).unwrap();
        assert!((y[0].re - 3.0f64.cos()).abs() < 1e-11);
    }

    #[test]
    fn zero_data_stays_zero() {
        let tol = Tolerance {
            rtol: 1e-12,
            atol: 1e-14,
        };
        let z = [Complex64::new(0.0, 0.0); 2];
        let y = integrate_to(&oscillator, 0.0, z, 5.0, tol, &mut Stats::default()).unwrap();
        assert_eq!(y, z);
    }
}
