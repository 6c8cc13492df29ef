use std::f64::consts::PI;

use crate::activation::ActivationKind;
use crate::domain::{DomainBox, Interval};
use crate::elm::WeightRange;
use crate::solver::Operand;
use crate::tfc::ConstraintSpec;

use super::calc::{const_d, exp_d, lin_d, poly_d, pow_d, sin_d, sin_kxy, sin_x2y};
use super::{Defaults, ProblemDefinition, ProblemId};

/// Length of the pde5 plate along `x`.
pub const PDE5_LENGTH: f64 = 2.0;
/// Height of the pde5 plate along `y`.
pub const PDE5_HEIGHT: f64 = 1.0;
/// Diffusivity shared by the heat equations.
pub const PDE5_DIFFUSIVITY: f64 = 1.0;
const PDE4_DIFFUSIVITY: f64 = 1.0;

const TWO_PI: f64 = 2.0 * PI;

fn unit_box(dim: usize) -> DomainBox {
    DomainBox::unit(dim)
}

fn interval_box(bounds: &[(f64, f64)]) -> DomainBox {
    DomainBox::new(bounds.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect()).expect("catalog domains are valid")
}

fn range(lo: f64, hi: f64) -> WeightRange {
    WeightRange::new(lo, hi).expect("catalog weight ranges are valid")
}

fn ode_defaults(neurons: usize, points: usize, tol: f64) -> Defaults {
    Defaults {
        neurons,
        points: vec![points],
        activation: ActivationKind::Logistic,
        weight_range: range(-10.0, 10.0),
        tol,
        max_iter: 50,
    }
}

fn pde_defaults(neurons: usize, points: &[usize]) -> Defaults {
    Defaults {
        neurons,
        points: points.to_vec(),
        activation: ActivationKind::Tanh,
        weight_range: range(-1.0, 1.0),
        tol: 1e-12,
        max_iter: 50,
    }
}

fn ops(list: &[(usize, &[u32])]) -> Vec<Operand> {
    list.iter().map(|(o, d)| Operand::new(*o, d)).collect()
}

fn zero_data(_: &[f64], _: &[u32]) -> Option<f64> {
    Some(0.0)
}

fn expect_spec(spec: crate::error::Result<ConstraintSpec>) -> ConstraintSpec {
    spec.expect("catalog constraints are well formed")
}

pub(super) fn definition(id: ProblemId) -> ProblemDefinition {
    match id {
        ProblemId::Ode1 => ode1(),
        ProblemId::Sode2 => sode2(),
        ProblemId::Pde1 => pde1(),
        ProblemId::Pde2 => pde2(),
        ProblemId::Pde3 => pde3(),
        ProblemId::Pde4 => pde4(),
        ProblemId::Pde5 => pde5(),
        ProblemId::Pde6 => pde6(),
        ProblemId::Pde7 => pde7(),
    }
}

// ode1: y'' = (y³ - 2y²) / (2t²) on [1, 2]

fn ode1() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Ode1,
        title: "nonlinear second-order ODE",
        domain: interval_box(&[(1.0, 2.0)]),
        axis_names: &["t"],
        outputs: 1,
        linear: false,
        defaults: ode_defaults(51, 51, 1e-14),
        table_points: (0..=10).map(|i| 1.0 + 0.1 * i as f64).collect(),
        operands: ops(&[(0, &[0]), (0, &[2])]),
        residual_fn: ode1_residual,
        partials_fn: ode1_partials,
        exact_fn: ode1_exact,
        constraints_fn: ode1_constraints,
    }
}

fn ode1_residual(x: &[f64], v: &[f64], out: &mut [f64]) {
    let (t, y) = (x[0], v[0]);
    out[0] = v[1] - (y * y * y - 2.0 * y * y) / (2.0 * t * t);
}

fn ode1_partials(x: &[f64], v: &[f64], out: &mut [f64]) {
    let (t, y) = (x[0], v[0]);
    out[0] = -(3.0 * y * y - 4.0 * y) / (2.0 * t * t);
    out[1] = 1.0;
}

fn ode1_exact(_: usize, x: &[f64], d: &[u32]) -> Option<f64> {
    // 2t/(t+1) = 2 - 2/(t+1)
    let s = x[0] + 1.0;
    let n = d[0];
    if n == 0 {
        return Some(2.0 - 2.0 / s);
    }
    let fact: f64 = (1..=n).map(f64::from).product();
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    Some(sign * 2.0 * fact / s.powi(n as i32 + 1))
}

fn ode1_constraints(_: usize) -> ConstraintSpec {
    expect_spec(
        ConstraintSpec::new(1)
            .with(0, 1.0, 0, |_, _| Some(1.0))
            .and_then(|s| s.with(0, 2.0, 0, |_, _| Some(4.0 / 3.0))),
    )
}

// sode2: coupled first-order system on [0, 3]

fn sode2() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Sode2,
        title: "coupled nonlinear first-order ODE system",
        domain: interval_box(&[(0.0, 3.0)]),
        axis_names: &["t"],
        outputs: 2,
        linear: false,
        defaults: ode_defaults(100, 100, 1e-5),
        table_points: (0..=10).map(|i| 0.3 * i as f64).collect(),
        operands: ops(&[(0, &[0]), (0, &[1]), (1, &[0]), (1, &[1])]),
        residual_fn: sode2_residual,
        partials_fn: sode2_partials,
        exact_fn: sode2_exact,
        constraints_fn: sode2_constraints,
    }
}

fn sode2_residual(x: &[f64], v: &[f64], out: &mut [f64]) {
    let t = x[0];
    let (y1, dy1, y2, dy2) = (v[0], v[1], v[2], v[3]);
    let s = t.sin();
    out[0] = dy1 - t.cos() - y1 * y1 - y2 + (1.0 + t * t + s * s);
    out[1] = dy2 - 2.0 * t + (1.0 + t * t) * s - y1 * y2;
}

fn sode2_partials(_: &[f64], v: &[f64], out: &mut [f64]) {
    let (y1, y2) = (v[0], v[2]);
    out[..4].copy_from_slice(&[-2.0 * y1, 1.0, -1.0, 0.0]);
    out[4..8].copy_from_slice(&[-y2, 0.0, -y1, 1.0]);
}

fn sode2_exact(output: usize, x: &[f64], d: &[u32]) -> Option<f64> {
    let t = x[0];
    Some(match output {
        0 => sin_d(1.0, t, d[0]),
        _ => poly_d(&[1.0, 0.0, 1.0], t, d[0]),
    })
}

fn sode2_constraints(output: usize) -> ConstraintSpec {
    let value = if output == 0 { 0.0 } else { 1.0 };
    expect_spec(ConstraintSpec::new(1).with(0, 0.0, 0, move |_, _| Some(value)))
}

// pde1: f_xx + f_yy = e^{-x}(x - 2 + y³ + 6y), Dirichlet on the unit square

fn pde1() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Pde1,
        title: "Poisson equation with Dirichlet data",
        domain: unit_box(2),
        axis_names: &["x", "y"],
        outputs: 1,
        linear: true,
        defaults: pde_defaults(170, &[30, 30]),
        table_points: Vec::new(),
        operands: ops(&[(0, &[2, 0]), (0, &[0, 2])]),
        residual_fn: pde1_residual,
        partials_fn: laplacian_partials,
        exact_fn: pde1_exact,
        constraints_fn: pde1_constraints,
    }
}

fn pde1_residual(x: &[f64], v: &[f64], out: &mut [f64]) {
    let (px, py) = (x[0], x[1]);
    out[0] = v[0] + v[1] - (-px).exp() * (px - 2.0 + py.powi(3) + 6.0 * py);
}

fn laplacian_partials(_: &[f64], _: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    out[1] = 1.0;
}

fn pde1_exact(_: usize, x: &[f64], d: &[u32]) -> Option<f64> {
    // e^{-x} (x + y³)
    let (px, py) = (x[0], x[1]);
    let (a, b) = (d[0], d[1]);
    let ex = exp_d(-1.0, px, a);
    let cube = [0.0, 0.0, 0.0, 1.0];
    Some(if b == 0 {
        // ∂x^a [x e^{-x}] = (-1)^a e^{-x} (x - a)
        ex * (px - f64::from(a) + py.powi(3))
    } else {
        ex * poly_d(&cube, py, b)
    })
}

fn pde1_constraints(_: usize) -> ConstraintSpec {
    let cube = [0.0, 0.0, 0.0, 1.0];
    expect_spec(
        ConstraintSpec::new(2)
            .with(0, 0.0, 0, move |x, d| Some(poly_d(&cube, x[1], d[1])))
            .and_then(|s| {
                s.with(0, 1.0, 0, move |x, d| {
                    Some(((-1.0f64).exp()) * (const_d(1.0, d[1]) + poly_d(&cube, x[1], d[1])))
                })
            })
            .and_then(|s| {
                // x e^{-x}
                s.with(1, 0.0, 0, |x, d| {
                    Some(exp_d(-1.0, x[0], d[0]) * (x[0] - f64::from(d[0])))
                })
            })
            .and_then(|s| {
                // e^{-x} (x + 1)
                s.with(1, 1.0, 0, |x, d| {
                    Some(exp_d(-1.0, x[0], d[0]) * (x[0] + 1.0 - f64::from(d[0])))
                })
            }),
    )
}

// pde2 / pde3 share the solution y² sin(πx) and the mixed constraints

fn mixed_square_constraints(_: usize) -> ConstraintSpec {
    expect_spec(
        ConstraintSpec::new(2)
            .with(0, 0.0, 0, zero_data)
            .and_then(|s| s.with(0, 1.0, 0, zero_data))
            .and_then(|s| s.with(1, 0.0, 0, zero_data))
            .and_then(|s| s.with(1, 1.0, 1, |x, d| Some(2.0 * sin_d(PI, x[0], d[0])))),
    )
}

fn y2_sin_exact(_: usize, x: &[f64], d: &[u32]) -> Option<f64> {
    Some(sin_d(PI, x[0], d[0]) * poly_d(&[0.0, 0.0, 1.0], x[1], d[1]))
}

fn pde2() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Pde2,
        title: "Poisson equation with a Neumann edge",
        domain: unit_box(2),
        axis_names: &["x", "y"],
        outputs: 1,
        linear: true,
        defaults: pde_defaults(170, &[30, 30]),
        table_points: Vec::new(),
        operands: ops(&[(0, &[2, 0]), (0, &[0, 2])]),
        residual_fn: pde2_residual,
        partials_fn: laplacian_partials,
        exact_fn: y2_sin_exact,
        constraints_fn: mixed_square_constraints,
    }
}

fn pde2_residual(x: &[f64], v: &[f64], out: &mut [f64]) {
    let (px, py) = (x[0], x[1]);
    out[0] = v[0] + v[1] - (2.0 - PI * PI * py * py) * (PI * px).sin();
}

fn pde3() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Pde3,
        title: "nonlinear Poisson equation with a Neumann edge",
        domain: unit_box(2),
        axis_names: &["x", "y"],
        outputs: 1,
        linear: false,
        defaults: pde_defaults(150, &[20, 20]),
        table_points: Vec::new(),
        operands: ops(&[(0, &[0, 0]), (0, &[0, 1]), (0, &[2, 0]), (0, &[0, 2])]),
        residual_fn: pde3_residual,
        partials_fn: pde3_partials,
        exact_fn: y2_sin_exact,
        constraints_fn: mixed_square_constraints,
    }
}

fn pde3_residual(x: &[f64], v: &[f64], out: &mut [f64]) {
    let (px, py) = (x[0], x[1]);
    let s = (PI * px).sin();
    let forcing = s * (2.0 - PI * PI * py * py + 2.0 * py.powi(3) * s);
    out[0] = v[2] + v[3] + v[0] * v[1] - forcing;
}

fn pde3_partials(_: &[f64], v: &[f64], out: &mut [f64]) {
    out[..4].copy_from_slice(&[v[1], v[0], 1.0, 1.0]);
}

// pde4: f_xx = κ f_t on the unit square in (x, t)

fn pde4() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Pde4,
        title: "one-dimensional heat equation",
        domain: unit_box(2),
        axis_names: &["x", "t"],
        outputs: 1,
        linear: true,
        defaults: pde_defaults(196, &[30, 30]),
        table_points: Vec::new(),
        operands: ops(&[(0, &[2, 0]), (0, &[0, 1])]),
        residual_fn: pde4_residual,
        partials_fn: pde4_partials,
        exact_fn: pde4_exact,
        constraints_fn: pde4_constraints,
    }
}

fn pde4_residual(_: &[f64], v: &[f64], out: &mut [f64]) {
    out[0] = v[0] - PDE4_DIFFUSIVITY * v[1];
}

fn pde4_partials(_: &[f64], _: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    out[1] = -PDE4_DIFFUSIVITY;
}

fn pde4_exact(_: usize, x: &[f64], d: &[u32]) -> Option<f64> {
    Some(sin_d(PI, x[0], d[0]) * exp_d(-PI * PI / PDE4_DIFFUSIVITY, x[1], d[1]))
}

fn pde4_constraints(_: usize) -> ConstraintSpec {
    expect_spec(
        ConstraintSpec::new(2)
            .with(0, 0.0, 0, zero_data)
            .and_then(|s| s.with(0, 1.0, 0, zero_data))
            .and_then(|s| s.with(1, 0.0, 0, |x, d| Some(sin_d(PI, x[0], d[0])))),
    )
}

// pde5: f_xx + f_yy = κ f_t on [0, L] × [0, H] × [0, 1]

fn pde5() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Pde5,
        title: "two-dimensional heat equation",
        domain: interval_box(&[(0.0, PDE5_LENGTH), (0.0, PDE5_HEIGHT), (0.0, 1.0)]),
        axis_names: &["x", "y", "t"],
        outputs: 1,
        linear: true,
        defaults: pde_defaults(400, &[13, 13, 13]),
        table_points: Vec::new(),
        operands: ops(&[(0, &[2, 0, 0]), (0, &[0, 2, 0]), (0, &[0, 0, 1])]),
        residual_fn: pde5_residual,
        partials_fn: pde5_partials,
        exact_fn: pde5_exact,
        constraints_fn: pde5_constraints,
    }
}

fn pde5_residual(_: &[f64], v: &[f64], out: &mut [f64]) {
    out[0] = v[0] + v[1] - PDE5_DIFFUSIVITY * v[2];
}

fn pde5_partials(_: &[f64], _: &[f64], out: &mut [f64]) {
    out[..3].copy_from_slice(&[1.0, 1.0, -PDE5_DIFFUSIVITY]);
}

fn pde5_exact(_: usize, x: &[f64], d: &[u32]) -> Option<f64> {
    let kx = PI / PDE5_LENGTH;
    let ky = PI / PDE5_HEIGHT;
    let rate = -(kx * kx + ky * ky) / PDE5_DIFFUSIVITY;
    Some(sin_d(kx, x[0], d[0]) * sin_d(ky, x[1], d[1]) * exp_d(rate, x[2], d[2]))
}

fn pde5_constraints(_: usize) -> ConstraintSpec {
    expect_spec(
        ConstraintSpec::new(3)
            .with(0, 0.0, 0, zero_data)
            .and_then(|s| s.with(0, PDE5_LENGTH, 0, zero_data))
            .and_then(|s| s.with(1, 0.0, 0, zero_data))
            .and_then(|s| s.with(1, PDE5_HEIGHT, 0, zero_data))
            .and_then(|s| {
                s.with(2, 0.0, 0, |x, d| {
                    Some(sin_d(PI / PDE5_LENGTH, x[0], d[0]) * sin_d(PI / PDE5_HEIGHT, x[1], d[1]))
                })
            }),
    )
}

// pde6: z_t z_x + z_y = forcing on the unit cube in (x, y, t)

fn pde6() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Pde6,
        title: "nonlinear time-dependent PDE in two space dimensions",
        domain: unit_box(3),
        axis_names: &["x", "y", "t"],
        outputs: 1,
        linear: false,
        defaults: pde_defaults(255, &[8, 8, 8]),
        table_points: Vec::new(),
        operands: ops(&[(0, &[1, 0, 0]), (0, &[0, 1, 0]), (0, &[0, 0, 1])]),
        residual_fn: pde6_residual,
        partials_fn: pde6_partials,
        exact_fn: pde6_exact,
        constraints_fn: pde6_constraints,
    }
}

fn pde6_residual(x: &[f64], v: &[f64], out: &mut [f64]) {
    let (px, py, t) = (x[0], x[1], x[2]);
    let c = (TWO_PI * px * py).cos();
    let forcing =
        t * t + (t - 1.0) * px + TWO_PI * px * c + (2.0 * t * py + px * py) * ((t - 1.0) * py + TWO_PI * py * c);
    out[0] = v[2] * v[0] + v[1] - forcing;
}

fn pde6_partials(_: &[f64], v: &[f64], out: &mut [f64]) {
    out[..3].copy_from_slice(&[v[2], 1.0, v[0]]);
}

fn pde6_exact(_: usize, x: &[f64], d: &[u32]) -> Option<f64> {
    // sin(2πxy) + t² y + (t - 1) x y
    let (px, py, t) = (x[0], x[1], x[2]);
    let (a, b, c) = (d[0], d[1], d[2]);
    let wave = sin_kxy(TWO_PI, px, py, a, b) * const_d(1.0, c);
    let ramp = const_d(1.0, a) * lin_d(py, b) * poly_d(&[0.0, 0.0, 1.0], t, c);
    let shear = lin_d(px, a) * lin_d(py, b) * poly_d(&[-1.0, 1.0], t, c);
    Some(wave + ramp + shear)
}

fn pde6_constraints(_: usize) -> ConstraintSpec {
    expect_spec(
        ConstraintSpec::new(3)
            // z(0, y, t) = t² y
            .with(0, 0.0, 0, |x, d| {
                Some(lin_d(x[1], d[1]) * poly_d(&[0.0, 0.0, 1.0], x[2], d[2]))
            })
            .and_then(|s| s.with(1, 0.0, 0, zero_data))
            // z(x, y, 1) = y + sin(2πxy)
            .and_then(|s| {
                s.with(2, 1.0, 0, |x, d| {
                    Some(const_d(1.0, d[0]) * lin_d(x[1], d[1]) + sin_kxy(TWO_PI, x[0], x[1], d[0], d[1]))
                })
            }),
    )
}

// pde7: f_x f_y f_z + f_tt = forcing on the unit hypercube in (x, y, z, t)

fn pde7() -> ProblemDefinition {
    ProblemDefinition {
        id: ProblemId::Pde7,
        title: "nonlinear time-dependent PDE in three space dimensions",
        domain: unit_box(4),
        axis_names: &["x", "y", "z", "t"],
        outputs: 1,
        linear: false,
        defaults: pde_defaults(340, &[5, 5, 5, 5]),
        table_points: Vec::new(),
        operands: ops(&[
            (0, &[1, 0, 0, 0]),
            (0, &[0, 1, 0, 0]),
            (0, &[0, 0, 1, 0]),
            (0, &[0, 0, 0, 2]),
        ]),
        residual_fn: pde7_residual,
        partials_fn: pde7_partials,
        exact_fn: pde7_exact,
        constraints_fn: pde7_constraints,
    }
}

fn pde7_residual(x: &[f64], v: &[f64], out: &mut [f64]) {
    let (px, py, pz, t) = (x[0], x[1], x[2], x[3]);
    let c = (px * px * py).cos();
    let tt = (t - 1.0) * t;
    let fy = tt * px * (pz - 1.0) + px * px * c + 1.5 * px * py.sqrt() * pz;
    let fx = tt * py * (pz - 1.0) + 2.0 * px * py * c + py.powf(1.5) * pz;
    let fz = TWO_PI * t * t * (TWO_PI * pz).cos() + tt * px * py + px * py.powf(1.5);
    let forcing = fy * fx * fz + 2.0 * px * py * (pz - 1.0) + 2.0 * (TWO_PI * pz).sin();
    out[0] = v[0] * v[1] * v[2] + v[3] - forcing;
}

fn pde7_partials(_: &[f64], v: &[f64], out: &mut [f64]) {
    out[..4].copy_from_slice(&[v[1] * v[2], v[0] * v[2], v[0] * v[1], 1.0]);
}

/// `∂ [t² sin(2πz)]` in the `(z, t)` orders.
fn pde7_wave(z: f64, t: f64, c: u32, e: u32) -> f64 {
    sin_d(TWO_PI, z, c) * poly_d(&[0.0, 0.0, 1.0], t, e)
}

/// `∂ [sin(x² y) + x y^{3/2} z]` in the `(x, y, z)` orders; with `with_z` unset
/// the trailing `z` factor is dropped.
fn pde7_surface(x: f64, y: f64, z: f64, a: u32, b: u32, c: u32, with_z: bool) -> Option<f64> {
    let sx = if c == 0 { sin_x2y(x, y, a, b)? } else { 0.0 };
    let zf = if with_z { lin_d(z, c) } else { const_d(1.0, c) };
    Some(sx + lin_d(x, a) * pow_d(1.5, y, b) * zf)
}

fn pde7_exact(_: usize, x: &[f64], d: &[u32]) -> Option<f64> {
    let (px, py, pz, t) = (x[0], x[1], x[2], x[3]);
    let (a, b, c, e) = (d[0], d[1], d[2], d[3]);
    let wave = if a == 0 && b == 0 { pde7_wave(pz, t, c, e) } else { 0.0 };
    let surface = if e == 0 {
        pde7_surface(px, py, pz, a, b, c, true)?
    } else {
        0.0
    };
    let bubble = lin_d(px, a) * lin_d(py, b) * poly_d(&[-1.0, 1.0], pz, c) * poly_d(&[0.0, -1.0, 1.0], t, e);
    Some(wave + surface + bubble)
}

fn pde7_constraints(_: usize) -> ConstraintSpec {
    // x = 0 and y = 0: t² sin(2πz)
    let edge = |x: &[f64], d: &[u32]| -> Option<f64> {
        if d[0] != 0 || d[1] != 0 {
            return Some(0.0);
        }
        Some(pde7_wave(x[2], x[3], d[2], d[3]))
    };
    expect_spec(
        ConstraintSpec::new(4)
            .with(0, 0.0, 0, edge)
            .and_then(|s| s.with(1, 0.0, 0, edge))
            // z = 1: sin(x² y) + x y^{3/2}
            .and_then(|s| {
                s.with(2, 1.0, 0, |x, d| {
                    if d[3] != 0 {
                        return Some(0.0);
                    }
                    pde7_surface(x[0], x[1], 1.0, d[0], d[1], 0, false)
                })
            })
            // t = 0: sin(x² y) + x y^{3/2} z
            .and_then(|s| s.with(3, 0.0, 0, |x, d| pde7_surface(x[0], x[1], x[2], d[0], d[1], d[2], true)))
            // t = 1: sin(x² y) + x y^{3/2} z + sin(2πz)
            .and_then(|s| {
                s.with(3, 1.0, 0, |x, d| {
                    let wave = if d[0] == 0 && d[1] == 0 {
                        sin_d(TWO_PI, x[2], d[2])
                    } else {
                        0.0
                    };
                    Some(pde7_surface(x[0], x[1], x[2], d[0], d[1], d[2], true)? + wave)
                })
            }),
    )
}
