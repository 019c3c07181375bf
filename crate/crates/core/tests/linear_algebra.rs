use ctmc_core::quantum::{pauli_to_dense, schatten_norm, singular_values, state_metrics, trace_norm, PauliTerm, SchattenP};
use ctmc_core::rng::stream;
use ctmc_core::{Hamiltonian, Matrix, State};
use num_complex::Complex;
use proptest::prelude::*;
use rand::Rng;

/// Cyclic Jacobi eigenvalues of a real symmetric matrix, rotations applied
/// from both sides until the off-diagonal mass vanishes.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

fn real_singular_values_oracle(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let ata: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| m[k][i] * m[k][j]).sum()).collect()).collect();
    let mut s: Vec<f64> = jacobi_eigenvalues(ata).into_iter().map(|l| l.max(0.0).sqrt()).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

#[test]
fn singular_values_match_jacobi_oracle_on_real_matrices() {
    let mut rng = stream(11, 0);
    for n in [2usize, 3, 4, 6, 8] {
        for _ in 0..10 {
            let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
            let cm = Matrix::from_fn(n, |i, j| Complex::new(m[i][j], 0.0));
            let got = singular_values(&cm);
            let want = real_singular_values_oracle(&m);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10 * want[0].max(1.0), "n={n}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn rank_deficient_matrix_has_zero_singular_value() {
    let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.5, -1.0, 2.0]];
    let cm = Matrix::from_fn(3, |i, j| Complex::new(rows[i][j], 0.0));
    let s = singular_values(&cm);
    assert!(s[2].abs() < 1e-12);
    let want = real_singular_values_oracle(&rows);
    assert!((s[0] - want[0]).abs() < 1e-10);
}

fn random_matrix(d: usize, entries: &[f64]) -> Matrix {
    Matrix::from_fn(d, |i, j| Complex::new(entries[2 * (i * d + j)], entries[2 * (i * d + j) + 1]))
}

fn random_hermitian(d: usize, entries: &[f64]) -> Hamiltonian {
    Hamiltonian::new(random_matrix(d, entries).hermitian_part()).unwrap()
}

fn random_state(psi: &[f64]) -> State {
    let v: Vec<Complex<f64>> = psi.chunks(2).map(|c| Complex::new(c[0], c[1])).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    State::pure(&v.iter().map(|z| z / n).collect::<Vec<_>>()).unwrap()
}

fn entries(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * d * d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_is_unitary(e in entries(4), t in -5.0f64..5.0) {
        let u = random_hermitian(4, &e).exp(t);
        prop_assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn holder_inequality(a in entries(4), b in entries(4)) {
        let a = random_matrix(4, &a);
        let b = random_matrix(4, &b);
        let ab = trace_norm(&a.matmul(&b)).unwrap();
        for (p, q) in [(SchattenP::One, SchattenP::Inf), (SchattenP::Two, SchattenP::Two), (SchattenP::Inf, SchattenP::One)] {
            let rhs = schatten_norm(&a, p).unwrap() * schatten_norm(&b, q).unwrap();
            prop_assert!(ab <= rhs * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn pauli_sums_are_hermitian(coeffs in prop::collection::vec(-2.0f64..2.0, 4), idx in prop::collection::vec(0usize..16, 4)) {
        let letters = ['I', 'X', 'Y', 'Z'];
        let terms: Vec<PauliTerm<f64>> = coeffs
            .iter()
            .zip(&idx)
            .map(|(&c, &k)| PauliTerm::new(c, format!("{}{}", letters[k / 4], letters[k % 4])))
            .collect();
        let h = pauli_to_dense(&terms, 2).unwrap();
        prop_assert!(h.matrix().hermiticity_defect() < 1e-14);
    }

    #[test]
    fn conjugation_preserves_trace_norm(e in entries(4), psi in prop::collection::vec(-1.0f64..1.0, 8), t in -3.0f64..3.0) {
        let rho = random_state(&psi);
        let u = random_hermitian(4, &e).exp(t);
        let out = rho.evolve(&u);
        prop_assert!((trace_norm(out.matrix()).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!(out.matrix().hermiticity_defect() < 1e-12);
    }
}

#[test]
fn trace_distance_triangle_inequality() {
    let mut rng = stream(12, 0);
    for _ in 0..100 {
        let s: Vec<State> = (0..3).map(|_| random_state(&(0..8).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>())).collect();
        let d = |a: &State, b: &State| state_metrics(a, b).unwrap().trace_distance;
        assert!(d(&s[0], &s[2]) <= d(&s[0], &s[1]) + d(&s[1], &s[2]) + 1e-10);
    }
}
