use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use su2_hadron::exact::{sector_basis, sector_matrix, SectorSpec};
use su2_hadron::model::{build_hamiltonian, LatticeParams};
use su2_hadron::pauli::PauliString;
use su2_hadron::sim::StateVector;
use su2_hadron::ExecMode;

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn bench_sector_matrix(c: &mut Criterion) {
    let mut g = c.benchmark_group("sector_matrix");
    g.sample_size(10);
    for n in [4, 6] {
        let h = build_hamiltonian(&LatticeParams::new(n, 1.0, 1.0).unwrap()).unwrap();
        let basis = sector_basis(n, &SectorSpec::new(0)).unwrap();
        for (name, mode) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| sector_matrix(black_box(&h), &basis, mode).unwrap())
            });
        }
    }
    g.finish();
}

fn bench_string_expectations(c: &mut Criterion) {
    let mut g = c.benchmark_group("string_expectations");
    g.sample_size(10);
    let n = 6;
    let h = build_hamiltonian(&LatticeParams::new(n, 1.0, 1.0).unwrap()).unwrap();
    let strings: Vec<PauliString> = h.strings().cloned().collect();
    let amps: Vec<f64> = (0..1usize << (2 * n)).map(|i| ((i * 7919) % 1013) as f64 - 506.0).collect();
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    let amps: Vec<f64> = amps.iter().map(|a| a / norm).collect();
    let psi = StateVector::from_real(2 * n, &amps).unwrap();
    for (name, mode) in MODES {
        g.bench_function(name, |b| b.iter(|| psi.string_expectations(black_box(&strings), mode)));
    }
    g.finish();
}

criterion_group!(benches, bench_sector_matrix, bench_string_expectations);
criterion_main!(benches);
