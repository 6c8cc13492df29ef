use faer::Mat;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xtfc::bench::{build_expressions, RunConfig};
use xtfc::solver::{gauss_newton, lstsq_svd, solve, CollocationSystem, GridKind, SolveConfig};
use xtfc::{catalog, DerivMultiIndex, ProblemId};

fn small_config(id: ProblemId) -> (RunConfig, Vec<usize>) {
    let def = id.definition();
    let mut cfg = RunConfig::defaults(id, 2);
    cfg.neurons = 12;
    let counts = vec![if def.dim() == 1 { 15 } else { 4 }; def.dim()];
    (cfg, counts)
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for def in catalog() {
        let (cfg, counts) = small_config(def.id);
        let ces = build_expressions(&def, &cfg).unwrap();
        let grid = def.make_grid(Some(&counts), GridKind::Uniform).unwrap();
        let sys = CollocationSystem::new(&def, &ces, &grid).unwrap();
        let beta: Vec<f64> = (0..sys.unknowns()).map(|_| rng.random_range(-0.5..0.5)).collect();
        let jac = sys.jacobian(&beta);
        assert_eq!(jac.nrows(), sys.residual_len());
        let h = 1e-6;
        for j in 0..sys.unknowns() {
            let mut up = beta.clone();
            up[j] += h;
            let mut down = beta.clone();
            down[j] -= h;
            let (ru, rd) = (sys.residual(&up), sys.residual(&down));
            for i in 0..sys.residual_len() {
                let fd = (ru[i] - rd[i]) / (2.0 * h);
                let scale = 1.0 + fd.abs().max(jac[(i, j)].abs());
                assert!(
                    (fd - jac[(i, j)]).abs() / scale < 1e-5,
                    "{} row {i} col {j}: {fd} vs {}",
                    def.id,
                    jac[(i, j)]
                );
            }
        }
    }
}

#[test]
fn linear_problems_take_one_least_squares_step() {
    for def in catalog().into_iter().filter(|d| d.linear) {
        let (cfg, counts) = small_config(def.id);
        let ces = build_expressions(&def, &cfg).unwrap();
        let grid = def.make_grid(Some(&counts), GridKind::Uniform).unwrap();
        let out = solve(&def, &ces, &grid, &cfg.solve).unwrap();
        assert_eq!(out.iterations, 1, "{}", def.id);
        assert!(out.converged);

        let sys = CollocationSystem::new(&def, &ces, &grid).unwrap();
        let jac = sys.jacobian(&vec![0.0; sys.unknowns()]);
        let r0 = sys.residual(&vec![0.0; sys.unknowns()]);
        let rhs: Vec<f64> = r0.iter().map(|v| -v).collect();
        let direct = lstsq_svd(jac.as_ref(), &rhs, cfg.solve.rcond_for(jac.nrows(), jac.ncols())).unwrap();
        let flat: Vec<f64> = out.betas.concat();
        for (a, b) in flat.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{}: {a} vs {b}", def.id);
        }
    }
}

#[test]
fn affine_residual_converges_in_one_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (m, n) = (30, 8);
    let a = Mat::<f64>::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
    let b: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let residual = |x: &[f64]| -> xtfc::Result<Vec<f64>> {
        Ok((0..m)
            .map(|i| (0..n).map(|j| a[(i, j)] * x[j]).sum::<f64>() - b[i])
            .collect())
    };
    let out = gauss_newton(residual, |_| Ok(a.clone()), vec![0.0; n], &SolveConfig::default()).unwrap();
    assert_eq!(out.iterations, 1);
    assert!(out.converged);
    let want = lstsq_svd(a.as_ref(), &b, 1e-14).unwrap();
    for (x, y) in out.beta.iter().zip(&want) {
        assert!((x - y).abs() < 1e-12);
    }
}

fn fd_check(id: ProblemId, u: &[f64], seed: u64) {
    let def = id.definition();
    let mut cfg = RunConfig::defaults(id, seed);
    cfg.neurons = 20;
    let ces = build_expressions(&def, &cfg).unwrap();
    let x = def.domain.from_unit(u);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
    let dim = def.dim();
    let h = 1e-5;
    for axis in 0..dim {
        for order in 1..=2u32 {
            let lower = DerivMultiIndex::along(dim, axis, order - 1);
            let exact = ces[0]
                .value(&beta, &x, &DerivMultiIndex::along(dim, axis, order))
                .unwrap();
            let mut xp = x.clone();
            xp[axis] += h;
            let mut xm = x.clone();
            xm[axis] -= h;
            let fd =
                (ces[0].value(&beta, &xp, &lower).unwrap() - ces[0].value(&beta, &xm, &lower).unwrap()) / (2.0 * h);
            let rel = (fd - exact).abs() / exact.abs().max(1.0);
            assert!(rel < 1e-5, "{id} axis {axis} order {order}: {fd} vs {exact}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ce_derivatives_match_differences(
        which in 0usize..9,
        u in proptest::collection::vec(0.05f64..0.95, 4),
        seed in 0u64..500,
    ) {
        let id = ProblemId::ALL[which];
        let dim = id.definition().dim();
        fd_check(id, &u[..dim], seed);
    }

    #[test]
    fn least_squares_residual_is_orthogonal(
        seed in 0u64..10_000,
        rows in 5usize..40,
        cols in 1usize..12,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::<f64>::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
        let b: Vec<f64> = (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = lstsq_svd(a.as_ref(), &b, 1e-12).unwrap();
        let r: Vec<f64> = (0..rows)
            .map(|i| b[i] - (0..cols).map(|j| a[(i, j)] * x[j]).sum::<f64>())
            .collect();
        let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
        let a_norm = (0..rows * cols).map(|k| a[(k / cols, k % cols)].powi(2)).sum::<f64>().sqrt();
        for j in 0..cols {
            let dot: f64 = (0..rows).map(|i| a[(i, j)] * r[i]).sum();
            prop_assert!(dot.abs() <= 1e-10 * a_norm * norm(&b).max(1e-300));
        }
    }
}
