//! The embedded simplex against brute-force vertex enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use usc_lab_core::lp::{check_kkt, solve, LpProblem, Sense, Status, VarId};

/// Solves the square system `m x = rhs` by Gaussian elimination with partial
/// pivoting; `None` if (numerically) singular.
fn dense_solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))?;
        if m[piv][k].abs() < 1e-10 {
            return None;
        }
        m.swap(k, piv);
        rhs.swap(k, piv);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f != 0.0 {
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                rhs[i] -= f * rhs[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (rhs[k] - s) / m[k][k];
    }
    Some(x)
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if idx[i] == i + n - k {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum of `c·x` over basic feasible solutions of `A x = b, x >= 0`.
fn enumerate_standard_form(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<f64> {
    let (m, n) = (a.len(), c.len());
    let mut best: Option<f64> = None;
    for_each_subset(n, m, |cols| {
        let sub: Vec<Vec<f64>> = a.iter().map(|r| cols.iter().map(|&j| r[j]).collect()).collect();
        if let Some(xb) = dense_solve(sub, b.to_vec()) {
            if xb.iter().all(|&v| v >= -1e-9) {
                let obj: f64 = cols.iter().zip(&xb).map(|(&j, v)| c[j] * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
    });
    best
}

#[test]
fn random_standard_form_matches_vertex_enumeration() {
    let (m, n) = (12, 20);
    for seed in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| if rng.random::<f64>() < 0.6 { rng.random_range(-5.0..5.0) } else { 0.0 }).collect())
            .collect();
        let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
        let b: Vec<f64> = a.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();

        let mut lp = LpProblem::new();
        let vars: Vec<VarId> = (0..n).map(|j| lp.add_var(format!("x{j}"), c[j])).collect();
        for (i, row) in a.iter().enumerate() {
            lp.add_row(format!("r{i}"), vars.iter().zip(row).map(|(&v, &q)| (v, q)), Sense::Eq, b[i]);
        }
        let sol = solve(&lp, 1e-7, 1e-8).unwrap();
        let oracle = enumerate_standard_form(&a, &b, &c).expect("feasible by construction");
        assert_eq!(sol.status, Status::Optimal);
        let rel = (sol.objective - oracle).abs() / (1.0 + oracle.abs());
        assert!(rel <= 1e-8, "seed {seed}: simplex {} vs oracle {oracle}", sol.objective);
        let rep = check_kkt(&lp, &sol, 1e-6);
        assert!(rep.pass && rep.gap_ok(1e-8), "seed {seed}: {rep:?}");
    }
}

struct Mixed {
    lp: LpProblem,
    rows: Vec<(Vec<f64>, Sense, f64)>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    c: Vec<f64>,
}

fn random_mixed(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Mixed {
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..1.0f64).round()).collect();
    let upper: Vec<f64> = lower.iter().map(|l| l + rng.random_range(0.5..6.0)).collect();
    let mut lp = LpProblem::new();
    let vars: Vec<VarId> = (0..n)
        .map(|j| lp.add_bounded_var(format!("x{j}"), c[j], lower[j], upper[j]))
        .collect();
    let mut rows = Vec::new();
    for i in 0..m {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-3i32..=3) as f64).collect();
        let sense = match rng.random_range(0..3) {
            0 => Sense::Le,
            1 => Sense::Ge,
            _ => Sense::Eq,
        };
        let rhs = rng.random_range(-4i32..=4) as f64;
        lp.add_row(format!("r{i}"), vars.iter().zip(&a).map(|(&v, &q)| (v, q)), sense, rhs);
        rows.push((a, sense, rhs));
    }
    Mixed { lp, rows, lower, upper, c }
}

/// Vertex enumeration over the bounded polyhedron: every choice of `n`
/// active constraints among rows and bounds.
fn enumerate_mixed(p: &Mixed) -> Option<f64> {
    let n = p.c.len();
    let mut cons: Vec<(Vec<f64>, f64)> = p.rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cons.push((e.clone(), p.lower[j]));
        cons.push((e, p.upper[j]));
    }
    let feasible = |x: &[f64]| {
        let tol = 1e-7;
        x.iter().enumerate().all(|(j, &v)| v >= p.lower[j] - tol && v <= p.upper[j] + tol)
            && p.rows.iter().all(|(a, s, b)| {
                let act: f64 = a.iter().zip(x).map(|(q, v)| q * v).sum();
                match s {
                    Sense::Le => act <= b + tol,
                    Sense::Ge => act >= b - tol,
                    Sense::Eq => (act - b).abs() <= tol,
                }
            })
    };
    let mut best: Option<f64> = None;
    for_each_subset(cons.len(), n, |idx| {
        let mat: Vec<Vec<f64>> = idx.iter().map(|&k| cons[k].0.clone()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&k| cons[k].1).collect();
        if let Some(x) = dense_solve(mat, rhs) {
            if feasible(&x) {
                let obj: f64 = p.c.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
    });
    best
}

#[test]
fn mixed_sense_boxed_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut optimal, mut infeasible) = (0, 0);
    for case in 0..300 {
        let n = rng.random_range(2..=5);
        let m = rng.random_range(1..=5);
        let p = random_mixed(&mut rng, n, m);
        let sol = solve(&p.lp, 1e-7, 1e-8).unwrap();
        match enumerate_mixed(&p) {
            Some(oracle) => {
                optimal += 1;
                assert_eq!(sol.status, Status::Optimal, "case {case}");
                let rel = (sol.objective - oracle).abs() / (1.0 + oracle.abs());
                assert!(rel <= 1e-8, "case {case}: simplex {} vs oracle {oracle}", sol.objective);
                let rep = check_kkt(&p.lp, &sol, 1e-6);
                assert!(rep.pass && rep.gap_ok(1e-8), "case {case}: {rep:?}");
                for (i, row) in p.lp.rows().iter().enumerate() {
                    match row.sense {
                        Sense::Ge => assert!(sol.dual[i] >= -1e-9, "case {case}"),
                        Sense::Le => assert!(sol.dual[i] <= 1e-9, "case {case}"),
                        Sense::Eq => {}
                    }
                }
            }
            None => {
                infeasible += 1;
                assert_eq!(sol.status, Status::Infeasible, "case {case}");
            }
        }
    }
    assert!(optimal > 50 && infeasible > 10, "{optimal} optimal, {infeasible} infeasible");
}

#[test]
fn identical_problems_give_identical_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut optimal = 0;
    for _ in 0..20 {
        let p = random_mixed(&mut rng, 5, 4);
        let a = solve(&p.lp, 1e-7, 1e-8).unwrap();
        let b = solve(&p.lp.clone(), 1e-7, 1e-8).unwrap();
        assert_eq!(a, b);
        optimal += a.is_optimal() as usize;
    }
    assert!(optimal > 0);
}
