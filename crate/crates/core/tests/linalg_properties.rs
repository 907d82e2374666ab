use ifred::linalg::{assemble_from_triplets, norm2, solve_spd, SparseSymMatrix, SpdSolver};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weighted grid Laplacian on `side × side` nodes with a random positive shift.
fn random_grid_spd(side: usize, seed: u64) -> SparseSymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = side * side;
    let mut t = Vec::new();
    for j in 0..side {
        for i in 0..side {
            let p = j * side + i;
            t.push((p, p, rng.gen_range(0.05..1.0)));
            let mut link = |q: usize, w: f64| {
                t.push((p, p, w));
                t.push((q, q, w));
                t.push((p, q, -w));
                t.push((q, p, -w));
            };
            if i + 1 < side {
                link(p + 1, rng.gen_range(0.5..2.0));
            }
            if j + 1 < side {
                link(p + side, rng.gen_range(0.5..2.0));
            }
        }
    }
    assemble_from_triplets(dim, &t).unwrap()
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d) / norm2(b)
}

#[test]
fn recovers_known_solution_up_to_ten_thousand_unknowns() {
    for (side, seed) in [(10, 1), (40, 2), (100, 3)] {
        let a = random_grid_spd(side, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let x: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = a.mul_vec(&x);
        let solved = solve_spd(&a, &b).unwrap();
        let err = relative_error(&solved, &x);
        assert!(err <= 1e-12, "dim {} error {err:e}", a.dim());
    }
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let a = random_grid_spd(30, 9);
    let solver = SpdSolver::new(a.clone()).unwrap();
    let b: Vec<f64> = (0..a.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
    let first = solver.solve(&b).unwrap();
    for _ in 0..3 {
        let again = solver.solve(&b).unwrap();
        assert!(first.iter().zip(&again).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
    let fresh = SpdSolver::new(a).unwrap().solve(&b).unwrap();
    assert!(first.iter().zip(&fresh).all(|(x, y)| x.to_bits() == y.to_bits()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_contract_on_random_spd(dim in 1usize..60, seed in any::<u64>()) {
        // B Bᵀ + dim·I with a sparse random B
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dense = vec![vec![0.0; dim]; dim];
        let cols: Vec<Vec<(usize, f64)>> = (0..dim)
            .map(|_| (0..3).map(|_| (rng.gen_range(0..dim), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        for col in &cols {
            for &(i, vi) in col {
                for &(j, vj) in col {
                    dense[i][j] += vi * vj;
                }
            }
        }
        let mut t = Vec::new();
        for (i, row) in dense.iter().enumerate() {
            t.push((i, i, dim as f64 * 0.1 + 0.5));
            for (j, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    t.push((i, j, *v));
                }
            }
        }
        let a = assemble_from_triplets(dim, &t).unwrap();
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_spd(&a, &b).unwrap();
        let r: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        prop_assert!(norm2(&r) <= 1e-13 * norm2(&b));
    }
}
