//! Dilogarithm and trilogarithm continuation along paths.
//!
//! The values feed the multiple-cover comparisons, and the branch jumps
//! around q = 1 certify which sheet a continued series lands on. Rather
//! than case analysis on logarithm branches, the functions are transported
//! jointly as the solution of
//!
//! ```text
//! Li1' = 1/(1 - q),   Li2' = Li1/q,   Li3' = Li2/q,
//! ```
//!
//! integrated with a classical Runge-Kutta scheme along polyline paths.
//! Paths that pass within 1e-3 of the branch point at 1 (or the transport
//! singularity at 0) are rejected instead of silently losing accuracy.

use super::MbError;
use num_complex::Complex64;

const NEAR: f64 = 1e-3;
const SERIES_RADIUS: f64 = 0.5;

type State = [Complex64; 3];

/// Distance from point p to the segment [a, b].
fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn guard_segment(a: Complex64, b: Complex64) -> Result<(), MbError> {
    let one = Complex64::new(1.0, 0.0);
    if segment_distance(one, a, b) < NEAR {
        return Err(MbError::BranchPoint(format!(
            "path segment {a} -> {b} passes within {NEAR} of the branch point 1"
        )));
    }
    if segment_distance(Complex64::new(0.0, 0.0), a, b) < NEAR {
        return Err(MbError::BranchPoint(format!(
            "path segment {a} -> {b} passes within {NEAR} of the transport singularity 0"
        )));
    }
    Ok(())
}

fn derivative(t: Complex64, y: &State) -> State {
    let one = Complex64::new(1.0, 0.0);
    [one / (one - t), y[0] / t, y[1] / t]
}

fn rk4_step(t: Complex64, dt: Complex64, y: &State) -> State {
    let half = dt * 0.5;
    let k1 = derivative(t, y);
    let y2 = [y[0] + half * k1[0], y[1] + half * k1[1], y[2] + half * k1[2]];
    let k2 = derivative(t + half, &y2);
    let y3 = [y[0] + half * k2[0], y[1] + half * k2[1], y[2] + half * k2[2]];
    let k3 = derivative(t + half, &y3);
    let y4 = [y[0] + dt * k3[0], y[1] + dt * k3[1], y[2] + dt * k3[2]];
    let k4 = derivative(t + dt, &y4);
    let sixth = dt / 6.0;
    [
        y[0] + sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
        y[1] + sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
        y[2] + sixth * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]),
    ]
}

fn run_segment(y: &State, a: Complex64, b: Complex64, steps: u32) -> State {
    let dt = (b - a) / steps as f64;
    let mut y = *y;
    let mut t = a;
    for _ in 0..steps {
        y = rk4_step(t, dt, &y);
        t += dt;
    }
    y
}

/// Transport the joint state along one segment, doubling the step count
/// until two consecutive refinements agree to near machine precision.
fn transport_segment(y: &State, a: Complex64, b: Complex64) -> Result<State, MbError> {
    guard_segment(a, b)?;
    let mut steps = 8u32;
    let mut coarse = run_segment(y, a, b, steps);
    loop {
        steps *= 2;
        let fine = run_segment(y, a, b, steps);
        let scale = fine.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
        let diff = coarse
            .iter()
            .zip(fine.iter())
            .map(|(c, f)| (c - f).norm())
            .fold(0.0f64, f64::max);
        if diff <= 5e-14 * scale {
            return Ok(fine);
        }
        if steps >= 1 << 14 {
            return Err(MbError::Contour(format!(
                "polylog transport along {a} -> {b} failed to converge (residual {diff:.3e})"
            )));
        }
        coarse = fine;
    }
}

/// Direct series for [Li1, Li2, Li3] inside the convergence-safe disk.
fn series_state(q: Complex64) -> State {
    debug_assert!(q.norm() <= SERIES_RADIUS + 1e-12);
    let one = Complex64::new(1.0, 0.0);
    let li1 = -(one - q).ln();
    let mut li2 = Complex64::new(0.0, 0.0);
    let mut li3 = Complex64::new(0.0, 0.0);
    let mut pow = one;
    for n in 1..=80u32 {
        pow *= q;
        let n2 = (n as f64) * (n as f64);
        li2 += pow / n2;
        li3 += pow / (n2 * n as f64);
    }
    [li1, li2, li3]
}

/// Principal-branch state at q: series in the small disk, otherwise
/// series at the half-radius point followed by straight-line transport.
fn principal_state(q: Complex64) -> Result<State, MbError> {
    let r = q.norm();
    if r == 0.0 {
        return Ok([Complex64::new(0.0, 0.0); 3]);
    }
    if r <= SERIES_RADIUS {
        return Ok(series_state(q));
    }
    let base = q * (SERIES_RADIUS / r);
    transport_segment(&series_state(base), base, q)
}

fn check_order(s: u32) -> Result<usize, MbError> {
    match s {
        2 => Ok(1),
        3 => Ok(2),
        _ => Err(MbError::Shape(format!(
            "polylog order {s} not supported; only 2 and 3 are"
        ))),
    }
}

/// Principal branch of Li_s(q) for s in {2, 3}.
pub fn polylog(s: u32, q: Complex64) -> Result<Complex64, MbError> {
    let idx = check_order(s)?;
    Ok(principal_state(q)?[idx])
}

/// Continue Li_s from the principal branch at `path[0]` along the polyline
/// and return the value at the last point.
pub fn polylog_on_path(s: u32, path: &[Complex64]) -> Result<Complex64, MbError> {
    let idx = check_order(s)?;
    let first = *path
        .first()
        .ok_or_else(|| MbError::Shape("empty polylog path".to_string()))?;
    let mut state = principal_state(first)?;
    for pair in path.windows(2) {
        state = transport_segment(&state, pair[0], pair[1])?;
    }
    Ok(state[idx])
}

/// Branch jump of Li_s at q: the value after one clockwise loop around
/// the branch point 1, minus the principal value. The loop is the circle
/// through q centered at 1, walked as a fine polygon.
pub fn polylog_monodromy_jump(s: u32, q: Complex64) -> Result<Complex64, MbError> {
    let idx = check_order(s)?;
    let one = Complex64::new(1.0, 0.0);
    let rho = q - one;
    if rho.norm() < 2.0 * NEAR {
        return Err(MbError::BranchPoint(format!(
            "basepoint {q} too close to the branch point 1 for a monodromy loop"
        )));
    }
    let mut state = principal_state(q)?;
    let start = state[idx];
    let chords = 48u32;
    let mut prev = q;
    for k in 1..=chords {
        let theta = -2.0 * std::f64::consts::PI * (k as f64) / (chords as f64);
        let next = one + rho * Complex64::new(0.0, theta).exp();
        state = transport_segment(&state, prev, next)?;
        prev = next;
    }
    Ok(state[idx] - start)
}
