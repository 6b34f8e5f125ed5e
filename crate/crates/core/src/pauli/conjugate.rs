//! Conjugation of Pauli strings and sums by gates, and projection of fixed
//! qubits.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::string::{Pauli, PauliString, Phase};
use super::sum::{ComplexPauliSum, PauliSum, PauliTerm, DROP_TOLERANCE};
use crate::circuit::{Gate, GateKind, Param, Spin};
use crate::error::{Error, Result};

/// Default cap on the number of strings produced by [`conjugate_general`].
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// `(image, sign)` of a single-qubit Pauli under `g^dagger P g`.
type Image = (PauliString, Phase);

fn quarter_turns(g: &Gate) -> Result<Option<u32>> {
    let theta = match g.param {
        Some(Param::Fixed(v)) => v,
        Some(Param::Slot { .. }) => return Err(Error::SymbolicParameter(g.kind.to_string())),
        None => return Ok(None),
    };
    let k = theta / FRAC_PI_2;
    let r = k.round();
    if (k - r).abs() > 1e-12 {
        return Ok(None);
    }
    Ok(Some(r.rem_euclid(4.0) as u32))
}

/// Images of `X_q` and `Z_q` under conjugation by a Clifford gate, or `None`
/// when the gate does not act on `q`.
fn generator_images(g: &Gate, n: usize, q: usize) -> Result<Option<(Image, Image)>> {
    if !g.qubits.contains(&q) {
        return Ok(None);
    }
    let s = |p: Pauli, at: usize| PauliString::single(n, at, p);
    let plus = Phase::ONE;
    let minus = Phase::MINUS_ONE;
    let img = match g.kind {
        GateKind::X => ((s(Pauli::X, q), plus), (s(Pauli::Z, q), minus)),
        GateKind::RY => {
            let turns = quarter_turns(g)?.ok_or_else(|| Error::UnsupportedGate(g.to_string()))?;
            // RY(t)^dag X RY(t) = cos t X + sin t Z ; RY(t)^dag Z RY(t) = cos t Z - sin t X
            match turns {
                0 => ((s(Pauli::X, q), plus), (s(Pauli::Z, q), plus)),
                1 => ((s(Pauli::Z, q), plus), (s(Pauli::X, q), minus)),
                2 => ((s(Pauli::X, q), minus), (s(Pauli::Z, q), minus)),
                _ => ((s(Pauli::Z, q), minus), (s(Pauli::X, q), plus)),
            }
        }
        GateKind::CNOT => {
            let (c, t) = (g.qubits[0], g.qubits[1]);
            let zsign = if g.polarity[0] == Spin::Down { plus } else { minus };
            if q == c {
                let xx = PauliString::from_factors(n, &[(c, Pauli::X), (t, Pauli::X)]);
                ((xx, plus), (s(Pauli::Z, c), plus))
            } else {
                let zz = PauliString::from_factors(n, &[(c, Pauli::Z), (t, Pauli::Z)]);
                ((s(Pauli::X, t), plus), (zz, zsign))
            }
        }
        GateKind::SWAP => {
            let other = if q == g.qubits[0] { g.qubits[1] } else { g.qubits[0] };
            ((s(Pauli::X, other), plus), (s(Pauli::Z, other), plus))
        }
        _ => return Err(Error::UnsupportedGate(g.to_string())),
    };
    Ok(Some(img))
}

/// True when [`conjugate_clifford`] accepts the gate.
pub fn is_supported_clifford(g: &Gate) -> bool {
    match g.kind {
        GateKind::X | GateKind::CNOT | GateKind::SWAP => true,
        GateKind::RY => matches!(quarter_turns(g), Ok(Some(_))),
        _ => false,
    }
}

/// `g^dagger t g` for a Clifford gate, as a single signed term.
pub fn conjugate_clifford(t: &PauliTerm, g: &Gate) -> Result<PauliTerm> {
    let n = t.string.n_qubits();
    g.validate(n)?;
    if !is_supported_clifford(g) {
        return Err(Error::UnsupportedGate(g.to_string()));
    }
    let mut acc = PauliString::identity(n);
    let mut phase = Phase::ONE;
    for q in 0..n {
        let p = t.string.get(q);
        if p == Pauli::I {
            continue;
        }
        let Some(((xs, xp), (zs, zp))) = generator_images(g, n, q)? else {
            let (r, ph) = acc.mul_unchecked(&PauliString::single(n, q, p));
            acc = r;
            phase = phase.mul(ph);
            continue;
        };
        // X, Z, or Y = i X Z
        let factors: &[(PauliString, Phase)] = match p {
            Pauli::X => &[(xs, xp)],
            Pauli::Z => &[(zs, zp)],
            _ => &[(xs, xp), (zs, zp)],
        };
        if p == Pauli::Y {
            phase = phase.mul(Phase::I);
        }
        for (s, ph) in factors {
            let (r, m) = acc.mul_unchecked(s);
            acc = r;
            phase = phase.mul(*ph).mul(m);
        }
    }
    let sign = phase
        .real_sign()
        .ok_or_else(|| Error::NonHermitian(1.0, acc.to_word()))?;
    Ok(PauliTerm::new(acc, sign * t.coefficient))
}

/// Pauli decomposition of a dense matrix on `s` qubits: `M = sum_Q c_Q Q`.
pub(crate) fn decompose_dense(m: &DMatrix<Complex64>, s: usize) -> Vec<(PauliString, Complex64)> {
    let dim = 1u64 << s;
    let mut out = Vec::new();
    for z in 0..dim {
        for x in 0..dim {
            let q = PauliString::from_masks(s, x, z).expect("local masks in range");
            // Tr(Q M) = sum_b <b^x| ... Q[b^x, b] M[b, b^x]
            let mut tr = Complex64::new(0.0, 0.0);
            for b in 0..dim {
                let (b2, ph) = q.apply_to_basis(b);
                tr += ph.to_complex() * m[(b as usize, b2 as usize)];
            }
            let c = tr / dim as f64;
            if c.norm() > 1e-14 {
                out.push((q, c));
            }
        }
    }
    out
}

fn local_dense(p: &PauliString) -> DMatrix<Complex64> {
    let n = p.n_qubits();
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for b in 0..dim as u64 {
        let (b2, ph) = p.apply_to_basis(b);
        m[(b2 as usize, b as usize)] = ph.to_complex();
    }
    m
}

/// `g^dagger h g`, expanded exactly in Pauli strings on the gate support.
pub fn conjugate_general(h: &PauliSum, g: &Gate) -> Result<PauliSum> {
    conjugate_general_capped(h, g, DEFAULT_TERM_CAP)
}

pub fn conjugate_general_capped(h: &PauliSum, g: &Gate, cap: usize) -> Result<PauliSum> {
    let n = h.n_qubits();
    g.validate(n)?;
    if let Some(Param::Slot { .. }) = g.param {
        return Err(Error::SymbolicParameter(g.to_string()));
    }
    let u = g.local_matrix()?;
    let ud = u.adjoint();
    let support = &g.qubits;
    let s = support.len();
    let gate_mask = support.iter().fold(0u64, |m, &q| m | 1 << q);
    let mut memo: HashMap<PauliString, Vec<(PauliString, Complex64)>> = HashMap::new();
    let mut out = ComplexPauliSum::zero(n);
    for (p, c) in h.iter() {
        if p.support() & gate_mask == 0 {
            out.add_term(*p, c.into());
            continue;
        }
        let local = PauliString::from_factors(
            s,
            &support.iter().enumerate().map(|(i, &q)| (i, p.get(q))).collect::<Vec<_>>(),
        );
        let images = memo
            .entry(local)
            .or_insert_with(|| decompose_dense(&(&ud * local_dense(&local) * &u), s));
        let mut rest = *p;
        for &q in support {
            rest.set(q, Pauli::I);
        }
        for (img, w) in images.iter() {
            let mut full = rest;
            for (i, &q) in support.iter().enumerate() {
                full.set(q, img.get(i));
            }
            out.add_term(full, w * c);
        }
        if out.len() > cap {
            return Err(Error::TermCap { count: out.len(), cap });
        }
    }
    let mut real = out.into_real(1e-10)?;
    real.prune(DROP_TOLERANCE);
    if real.len() > cap {
        return Err(Error::TermCap { count: real.len(), cap });
    }
    Ok(real)
}

/// `g^dagger h g`, using the exact Clifford rule when possible.
pub fn conjugate_gate(h: &PauliSum, g: &Gate, cap: usize) -> Result<PauliSum> {
    if is_supported_clifford(g) {
        let mut out = PauliSum::zero(h.n_qubits());
        for t in h.terms() {
            let r = conjugate_clifford(&t, g)?;
            out.add_term(r.string, r.coefficient);
        }
        Ok(out)
    } else {
        conjugate_general_capped(h, g, cap)
    }
}

/// Replaces qubits with fixed basis values by `<b|sigma|b>` and re-indexes the
/// remaining qubits in ascending order.
///
/// `fixed` lists `(qubit, spin)`; the output acts on the other qubits.
pub fn project_fixed_qubits(h: &PauliSum, fixed: &[(usize, Spin)]) -> Result<PauliSum> {
    let n = h.n_qubits();
    let mut fixed_mask = 0u64;
    let mut down_mask = 0u64;
    for &(q, spin) in fixed {
        if q >= n {
            return Err(Error::Parameter(format!("fixed qubit {q} outside register of {n}")));
        }
        if fixed_mask >> q & 1 == 1 {
            return Err(Error::Parameter(format!("qubit {q} fixed twice")));
        }
        fixed_mask |= 1 << q;
        down_mask |= spin.bit() << q;
    }
    let keep: Vec<usize> = (0..n).filter(|q| fixed_mask >> q & 1 == 0).collect();
    let mut out = PauliSum::zero(keep.len());
    for (p, c) in h.iter() {
        if p.x_mask() & fixed_mask != 0 {
            continue;
        }
        let sign = if (p.z_mask() & down_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out.add_term(p.compress(&keep), sign * c);
    }
    Ok(out)
}
