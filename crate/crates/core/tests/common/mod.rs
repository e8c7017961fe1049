//! Finite-difference oracle shared by the integration tests.

#![allow(dead_code)]

use minsurf::fields::ScalarField;

fn richardson(coarse: Vec<f64>, fine: Vec<f64>) -> Vec<f64> {
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

/// Richardson-extrapolated central-difference gradient, error `O(h⁴)`.
pub fn fd_gradient(f: &ScalarField, x: &[f64], h: f64) -> Option<Vec<f64>> {
    Some(richardson(fd_gradient_step(f, x, h)?, fd_gradient_step(f, x, h / 2.0)?))
}

/// Richardson-extrapolated second differences of the values.
pub fn fd_hessian(f: &ScalarField, x: &[f64], h: f64) -> Option<Vec<f64>> {
    Some(richardson(fd_hessian_step(f, x, h)?, fd_hessian_step(f, x, h / 2.0)?))
}

fn fd_gradient_step(f: &ScalarField, x: &[f64], h: f64) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(x.len());
    let mut y = x.to_vec();
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let plus = f.value(&y).ok()?;
        y[i] = x[i] - h;
        let minus = f.value(&y).ok()?;
        y[i] = x[i];
        out.push((plus - minus) / (2.0 * h));
    }
    Some(out)
}

fn fd_hessian_step(f: &ScalarField, x: &[f64], h: f64) -> Option<Vec<f64>> {
    let n = x.len();
    let f0 = f.value(x).ok()?;
    let mut out = vec![0.0; n * n];
    let mut y = x.to_vec();
    let at = |y: &mut Vec<f64>, di: (usize, f64), dj: (usize, f64)| -> Option<f64> {
        y[di.0] += di.1;
        y[dj.0] += dj.1;
        let v = f.value(y).ok();
        y[di.0] -= di.1;
        y[dj.0] -= dj.1;
        v
    };
    for i in 0..n {
        let pp = at(&mut y, (i, h), (i, h))?;
        let mm = at(&mut y, (i, -h), (i, -h))?;
        out[i * n + i] = (pp - 2.0 * f0 + mm) / (4.0 * h * h);
        for j in i + 1..n {
            let pp = at(&mut y, (i, h), (j, h))?;
            let pm = at(&mut y, (i, h), (j, -h))?;
            let mp = at(&mut y, (i, -h), (j, h))?;
            let mm = at(&mut y, (i, -h), (j, -h))?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    Some(out)
}

/// Central-difference Hessian from the columns of an exact gradient, for
/// fields too wide for value-only second differences.
pub fn fd_hessian_of_gradient(grad: impl Fn(&[f64]) -> Option<Vec<f64>>, x: &[f64], h: f64) -> Option<Vec<f64>> {
    let n = x.len();
    let mut out = vec![0.0; n * n];
    let mut y = x.to_vec();
    for j in 0..n {
        y[j] = x[j] + h;
        let plus = grad(&y)?;
        y[j] = x[j] - h;
        let minus = grad(&y)?;
        y[j] = x[j];
        for i in 0..n {
            out[i * n + j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (out[i * n + j] + out[j * n + i]);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    Some(out)
}

/// `max |a − b| / max(1, max |a|)`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale
}
