use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use su2_hadron::circuit::{ansatz_n2_vacuum, ansatz_n4_baryon_general, Circuit, Gate, Param, Spin};
use su2_hadron::exact::{eigensolve_sector, SectorSpec};
use su2_hadron::model::{build_hamiltonian, parse_spins, LatticeParams};
use su2_hadron::par::ExecMode;
use su2_hadron::pauli::{group_for_measurement, PauliSum};
use su2_hadron::sim::{
    apply_circuit_trajectory, apply_confusion, estimate_expectations, gate_dense, linear_extrapolate,
    mixed_expectation, noisy_expectation_exact, overlap_probability, readout_invert, readout_mitigate, rng_stream,
    run, sample_groups, sample_groups_circuit, symmetric_confusion, zne_cnot_folding, NoiseModel, Purpose,
    StateVector,
};

type C = DMatrix<Complex64>;

fn r(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn embed(q: usize, n: usize, m: &C) -> C {
    let mut out = C::identity(1, 1);
    for k in (0..n).rev() {
        out = out.kronecker(&if k == q { m.clone() } else { C::identity(2, 2) });
    }
    out
}

fn projector(spin: Spin) -> C {
    match spin {
        Spin::Up => C::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), r(0.0)]),
        Spin::Down => C::from_row_slice(2, 2, &[r(0.0), r(0.0), r(0.0), r(1.0)]),
    }
}

/// Gate unitaries written from their textbook definitions.
fn oracle(kind: usize, q: &[usize], spins: &[Spin], theta: f64, n: usize) -> C {
    let x = C::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let ry = C::from_row_slice(2, 2, &[r(c), r(-s), r(s), r(c)]);
    let id = C::identity(1 << n, 1 << n);
    let controlled = |ctrls: &[(usize, Spin)], target_op: C| {
        let mut p = id.clone();
        for &(cq, sp) in ctrls {
            p = p * embed(cq, n, &projector(sp));
        }
        &id + &p * (target_op - &id)
    };
    match kind {
        0 => embed(q[0], n, &x),
        1 => embed(q[0], n, &ry),
        2 => controlled(&[(q[0], spins[0])], embed(q[1], n, &ry)),
        3 => controlled(&[(q[0], spins[0])], embed(q[1], n, &x)),
        4 => controlled(&[(q[0], spins[0]), (q[1], spins[1])], embed(q[2], n, &x)),
        5 => {
            let mut m = C::zeros(1 << n, 1 << n);
            for b in 0..1usize << n {
                let (ba, bb) = (b >> q[0] & 1, b >> q[1] & 1);
                let out = b & !(1 << q[0]) & !(1 << q[1]) | bb << q[0] | ba << q[1];
                m[(out, b)] = r(1.0);
            }
            m
        }
        _ => {
            // identity on parallel pairs, rotation by theta on (up down, down up)
            let (c, s) = (theta.cos(), theta.sin());
            let mut m = C::zeros(1 << n, 1 << n);
            for b in 0..1usize << n {
                let (ba, bb) = (b >> q[0] & 1, b >> q[1] & 1);
                let flipped = b ^ (1 << q[0]) ^ (1 << q[1]);
                if ba == bb {
                    m[(b, b)] = r(1.0);
                } else if ba == 0 {
                    m[(b, b)] = r(c);
                    m[(flipped, b)] = r(s);
                } else {
                    m[(b, b)] = r(c);
                    m[(flipped, b)] = r(-s);
                }
            }
            m
        }
    }
}

fn library_gate(kind: usize, q: &[usize], spins: &[Spin], theta: f64) -> Gate {
    let t = Param::Fixed(theta);
    match kind {
        0 => Gate::x(q[0]),
        1 => Gate::ry(q[0], t),
        2 => Gate::cry(&[(q[0], spins[0])], q[1], t),
        3 => Gate::cnot_on(q[0], spins[0], q[1]),
        4 => Gate::toffoli(&[(q[0], spins[0]), (q[1], spins[1])], q[2]),
        5 => Gate::swap(q[0], q[1]),
        _ => Gate::pswap(q[0], q[1], t),
    }
}

fn random_state(n: usize, seed: u64) -> StateVector {
    use rand::Rng;
    let mut rng = rng_stream(seed, Purpose::Shots, 99, 0, 0);
    let mut amps: Vec<Complex64> = (0..1 << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(n, amps).unwrap()
}

fn bell() -> Circuit {
    let mut c = Circuit::new(2);
    c.push(Gate::ry(0, Param::Fixed(FRAC_PI_2)));
    c.push(Gate::cnot(0, 1));
    c
}

#[test]
fn trivial_circuits() {
    let s = run(&Circuit::new(3), &[], 0b101).unwrap();
    assert_eq!(s.probability(0b101), 1.0);
    let mut c = Circuit::new(1);
    c.push(Gate::x(0));
    let s = run(&c, &[], parse_spins("↓").unwrap()).unwrap();
    assert_eq!(s.probability(parse_spins("↑").unwrap()), 1.0);
}

#[test]
fn expectation_examples() {
    let p = LatticeParams::new(2, 1.0, 1.0).unwrap();
    let h = build_hamiltonian(&p).unwrap();
    let vac = StateVector::basis(4, parse_spins("↑↑↓↓").unwrap()).unwrap();
    assert_eq!(vac.expectation(&h).unwrap(), 0.0);
    let z = PauliSum::from_words(&[(1.0, "Z")]).unwrap();
    assert_eq!(StateVector::basis(1, 0).unwrap().expectation(&z).unwrap(), 1.0);
    let ed = eigensolve_sector(&p, &SectorSpec::singlet(0), 1).unwrap();
    let g = ed.state_vector(0).unwrap();
    assert!((g.expectation(&h).unwrap() - ed.energies[0]).abs() < 1e-10);
}

#[test]
fn n4_general_amplitudes_follow_weights() {
    let a = ansatz_n4_baryon_general().unwrap();
    let theta = [0.3, 1.2, -0.7, 2.2, 0.1, -1.9, 0.8, 2.9, -0.4];
    let s = a.state(&theta).unwrap();
    let w = su2_hadron::circuit::hyperspherical_amplitudes(&theta).unwrap();
    for (e, wn) in a.elements.iter().zip(w) {
        for &(b, c) in e {
            assert!((s.amplitude(b).re - wn * c).abs() < 1e-12);
        }
    }
}

#[test]
fn norm_survives_many_gates() {
    let mut s = random_state(4, 3);
    let mut c = Circuit::new(4);
    for k in 0..1000usize {
        let q = k % 4;
        let t = (q + 1 + k / 4 % 3) % 4;
        c.push(match k % 4 {
            0 => Gate::ry(q, Param::Fixed(0.1 * k as f64)),
            1 => Gate::cry(&[(q, Spin::Up)], t, Param::Fixed(-0.37 * k as f64)),
            2 => Gate::pswap(q, t, Param::Fixed(0.013 * k as f64)),
            _ => Gate::cnot(q, t),
        });
    }
    s.apply_circuit(&c, &[]).unwrap();
    assert!((s.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn sampled_energy_is_consistent() {
    let a = ansatz_n2_vacuum().unwrap();
    let h = build_hamiltonian(&LatticeParams::new(2, 1.0, 1.0).unwrap()).unwrap();
    let groups = group_for_measurement(&h);
    for (k, theta) in [[0.4, -0.9], [2.1, 0.3], [-1.3, 2.6]].iter().enumerate() {
        let s = a.state(theta).unwrap();
        let recs = sample_groups(&s, &groups, 1_000_000, Some(&NoiseModel::noiseless(k as u64)), ExecMode::best()).unwrap();
        for rec in &recs {
            assert_eq!(rec.counts.values().sum::<u64>() as usize, rec.shots);
        }
        let est = estimate_expectations(&recs, &groups, &h, None).unwrap();
        let exact = s.expectation(&h).unwrap();
        assert!((est.energy - exact).abs() <= 5.0 * est.standard_error, "{} vs {exact}", est.energy);
        for (p, v) in &est.values {
            assert!((v - s.expectation_string(p)).abs() < 5e-3);
        }
    }
}

#[test]
fn diagonal_observable_uses_one_group() {
    let h = PauliSum::from_words(&[(0.5, "ZZII"), (-1.0, "IZIZ"), (0.25, "ZIII"), (2.0, "IIII")]).unwrap();
    let groups = group_for_measurement(&h);
    assert_eq!(groups.len(), 1);
    let basis = StateVector::basis(4, 0b0110).unwrap();
    let recs = sample_groups(&basis, &groups, 1000, None, ExecMode::Sequential).unwrap();
    let est = estimate_expectations(&recs, &groups, &h, None).unwrap();
    assert_eq!(est.energy, basis.expectation(&h).unwrap());
    assert_eq!(est.standard_error, 0.0);
}

#[test]
fn fixed_seed_golden() {
    let golden: serde_json::Value = serde_json::from_str(include_str!("golden/sim_n2.json")).unwrap();
    let a = ansatz_n2_vacuum().unwrap();
    let h = build_hamiltonian(&LatticeParams::new(2, 1.0, 1.0).unwrap()).unwrap();
    let g = group_for_measurement(&h);
    assert_eq!(g.len() as u64, golden["groups"].as_u64().unwrap());
    for mode in [ExecMode::Sequential, ExecMode::best()] {
        let recs = sample_groups_circuit(&a.circuit, &[0.4, -0.9], a.input, &g, 8024, &NoiseModel::noiseless(1), 1, mode).unwrap();
        let e = estimate_expectations(&recs, &g, &h, None).unwrap().energy;
        assert_eq!(e, golden["energy"].as_f64().unwrap());
    }
}

#[test]
fn records_are_reproducible() {
    let a = ansatz_n4_baryon_general().unwrap();
    let h = build_hamiltonian(&LatticeParams::new(4, 1.0, 1.0).unwrap()).unwrap();
    let g = group_for_measurement(&h);
    let theta = [0.2; 9];
    let noise = NoiseModel { two_qubit_depolarizing_p: 0.005, readout_confusion: Some(vec![symmetric_confusion(0.02); 8]), seed: 4 };
    let go = |n: &NoiseModel, mode| sample_groups_circuit(&a.circuit, &theta, a.input, &g, 600, n, 3, mode).unwrap();
    let first = go(&noise, ExecMode::Sequential);
    assert_eq!(first, go(&noise, ExecMode::best()));
    let other = NoiseModel { seed: 5, ..noise.clone() };
    assert_ne!(first, go(&other, ExecMode::Sequential));
}

#[test]
fn overlap_examples() {
    let a = ansatz_n4_baryon_general().unwrap();
    let t: Vec<f64> = (0..9).map(|i| 0.4 * i as f64).collect();
    assert!((overlap_probability(&a.circuit, &t, &t, a.input, None, None).unwrap() - 1.0).abs() < 1e-12);
    // first element against the second
    let mut t2 = vec![0.0; 9];
    t2[0] = FRAC_PI_2;
    assert!(overlap_probability(&a.circuit, &[0.0; 9], &t2, a.input, None, None).unwrap() < 1e-12);
    let pairs = [(vec![0.3; 9], vec![0.5; 9]), (t.clone(), vec![0.1; 9]), (vec![1.0; 9], vec![0.9; 9])];
    for (k, (x, y)) in pairs.iter().enumerate() {
        let exact = overlap_probability(&a.circuit, x, y, a.input, None, None).unwrap();
        let shots = 20_000;
        let noise = NoiseModel::noiseless(k as u64);
        let est = overlap_probability(&a.circuit, x, y, a.input, Some(shots), Some(&noise)).unwrap();
        let sd = (exact * (1.0 - exact) / shots as f64).sqrt();
        assert!((est - exact).abs() <= 3.0 * sd.max(1.0 / shots as f64), "{est} vs {exact}");
    }
}

#[test]
fn readout_examples() {
    let p = vec![0.1, 0.2, 0.3, 0.4];
    let id = [[1.0, 0.0], [0.0, 1.0]];
    assert_eq!(readout_mitigate(&p, &[id, id]).unwrap(), p);
    let conf = vec![symmetric_confusion(0.1); 3];
    let truth = vec![0.05, 0.1, 0.2, 0.0, 0.15, 0.3, 0.1, 0.1];
    let observed = apply_confusion(&truth, &conf).unwrap();
    let back = readout_invert(&observed, &conf).unwrap();
    for (a, b) in back.iter().zip(&truth) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(readout_mitigate(&observed, &[[[0.5, 0.5], [0.5, 0.5]]; 3]).is_err());
}

#[test]
fn mitigated_sampling_recovers_distribution() {
    let s = random_state(3, 8);
    let h = PauliSum::from_words(&[(1.0, "ZZZ")]).unwrap();
    let groups = group_for_measurement(&h);
    let conf = vec![symmetric_confusion(0.1), symmetric_confusion(0.05), [[0.9, 0.2], [0.1, 0.8]]];
    let noise = NoiseModel { two_qubit_depolarizing_p: 0.0, readout_confusion: Some(conf.clone()), seed: 21 };
    let shots = 100_000;
    let rec = &sample_groups(&s, &groups, shots, Some(&noise), ExecMode::Sequential).unwrap()[0];
    let freq = rec.frequencies(3);
    let est = readout_invert(&freq, &conf).unwrap();
    // covariance of the inverted multinomial, diagonal only
    let q = apply_confusion(&s.probabilities(), &conf).unwrap();
    let mut a_inv = DMatrix::<f64>::zeros(8, 8);
    for j in 0..8 {
        let mut e = vec![0.0; 8];
        e[j] = 1.0;
        let col = readout_invert(&e, &conf).unwrap();
        for i in 0..8 {
            a_inv[(i, j)] = col[i];
        }
    }
    let cov_q = DMatrix::from_fn(8, 8, |i, j| if i == j { q[i] - q[i] * q[j] } else { -q[i] * q[j] }) / shots as f64;
    let cov = &a_inv * cov_q * a_inv.transpose();
    for (b, truth) in s.probabilities().iter().enumerate() {
        assert!((est[b] - truth).abs() <= 5.0 * cov[(b, b)].sqrt(), "outcome {b}");
    }
}

#[test]
fn bell_correlator_damping() {
    let c = bell();
    let xx = PauliSum::from_words(&[(1.0, "XX")]).unwrap();
    for p in [0.0, 0.01, 0.1] {
        let v = noisy_expectation_exact(&c, &[], 0, &xx, p, 1).unwrap();
        assert!((v - (1.0 - 16.0 * p / 15.0)).abs() < 1e-12);
    }
    // trajectory average agrees with the channel
    let p = 0.1;
    let n = 4000;
    let mut sum = 0.0;
    let mut sq = 0.0;
    for t in 0..n {
        let mut s = StateVector::basis(2, 0).unwrap();
        let mut rng = rng_stream(17, Purpose::Trajectory, 0, 1, t);
        apply_circuit_trajectory(&mut s, &c, &[], p, 1, &mut rng).unwrap();
        let v = s.expectation(&xx).unwrap();
        sum += v;
        sq += v * v;
    }
    let mean = sum / n as f64;
    let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - (1.0 - 16.0 * p / 15.0)).abs() <= 5.0 * se, "{mean}");
}

#[test]
fn zne_examples() {
    let a = ansatz_n2_vacuum().unwrap();
    let h = build_hamiltonian(&LatticeParams::new(2, 1.0, 1.0).unwrap()).unwrap();
    let theta = [0.4, -0.9];
    let ideal = a.state(&theta).unwrap().expectation(&h).unwrap();
    let clean = zne_cnot_folding(&a.circuit, &theta, a.input, &h, &NoiseModel::noiseless(0), &[1, 3, 5], None, ExecMode::Sequential).unwrap();
    for v in &clean.values {
        assert!((v - ideal).abs() < 1e-12);
    }
    assert!((clean.extrapolated - ideal).abs() < 1e-12);

    let noisy = zne_cnot_folding(&a.circuit, &theta, a.input, &h, &NoiseModel::depolarizing(0.01, 0), &[1, 3, 5], None, ExecMode::Sequential).unwrap();
    let err: Vec<f64> = noisy.values.iter().map(|v| (v - ideal).abs()).collect();
    assert!((noisy.extrapolated - ideal).abs() < err[0]);
    assert!(err[2] >= err[1] && err[1] >= err[0]);
    assert!(zne_cnot_folding(&a.circuit, &theta, a.input, &h, &NoiseModel::noiseless(0), &[1], None, ExecMode::Sequential).is_err());
    assert!(zne_cnot_folding(&a.circuit, &theta, a.input, &h, &NoiseModel::noiseless(0), &[1, 2], None, ExecMode::Sequential).is_err());
}

#[test]
fn extrapolation_is_least_squares() {
    // y = 2 - 0.1 x plus a residual orthogonal to [1, x]
    let xs = [1.0, 3.0, 5.0];
    let ys = [1.9 + 0.01, 1.7 - 0.02, 1.5 + 0.01];
    assert!((linear_extrapolate(&xs, &ys).unwrap() - 2.0).abs() < 1e-14);
    assert!(linear_extrapolate(&[2.0, 2.0], &[1.0, 3.0]).is_err());
}

#[test]
fn fixed_error_state_cancels_in_differences() {
    let h = build_hamiltonian(&LatticeParams::new(2, 1.0, 1.0).unwrap()).unwrap();
    let a = ansatz_n2_vacuum().unwrap();
    let vac = a.state(&[0.3, 0.8]).unwrap();
    let bar = StateVector::basis(4, parse_spins("↑↑↑↑").unwrap()).unwrap();
    let err = random_state(4, 5);
    let ideal = bar.expectation(&h).unwrap() - vac.expectation(&h).unwrap();
    for pe in [0.0, 0.1, 0.35] {
        let d = mixed_expectation(&bar, &err, pe, &h).unwrap() - mixed_expectation(&vac, &err, pe, &h).unwrap();
        assert!((d - (1.0 - pe) * ideal).abs() < 1e-10);
    }
    assert!(mixed_expectation(&bar, &err, 1.5, &h).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn gates_match_definitions(kind in 0usize..7, perm in 0usize..6, s1 in any::<bool>(), s2 in any::<bool>(), theta in -4.0f64..4.0, seed in 0u64..50) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let q = perms[perm];
        let spins = [Spin::from_bit(s1), Spin::from_bit(s2)];
        let g = library_gate(kind, &q, &spins, theta);
        let want = oracle(kind, &q, &spins, theta, 3);
        let got = gate_dense(&g, 3).unwrap();
        prop_assert!((&got - &want).iter().all(|z| z.norm() < 1e-13));
        let s = random_state(3, seed);
        let mut applied = s.clone();
        applied.apply_gate(&g).unwrap();
        let direct = &want * DMatrix::from_column_slice(8, 1, s.amplitudes());
        for b in 0..8 {
            prop_assert!((applied.amplitudes()[b] - direct[b]).norm() < 1e-13);
        }
    }
}
