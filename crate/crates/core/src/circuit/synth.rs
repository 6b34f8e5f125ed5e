//! Two-level (Givens) rotations between computational basis states.

use std::collections::BTreeSet;

use super::gate::{Gate, Param, Spin};
use super::Circuit;
use crate::error::{Error, Result};

/// Builds circuits out of real rotations acting on `span{|b>, |b'>}`.
///
/// A rotation by `phi` sends `|b> -> cos(phi)|b> + sin(phi)|b'>` and
/// `|b'> -> cos(phi)|b'> - sin(phi)|b>`. It is realized as a CNOT ladder
/// that makes `b` and `b'` differ on one pivot qubit, a controlled RY on
/// the pivot, and the ladder again.
///
/// The builder tracks the set of basis states that can carry amplitude. With
/// `minimal_controls` the RY only gets the controls needed to leave those
/// other states alone, so the circuit is exact on the reachable subspace
/// rather than as a full unitary.
#[derive(Clone, Debug)]
pub struct TwoLevelBuilder {
    circuit: Circuit,
    support: BTreeSet<u64>,
    minimal_controls: bool,
}

/// Angle of a two-level rotation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Fixed(f64),
    /// `phi = theta[slot]`.
    Slot(usize),
}

impl TwoLevelBuilder {
    /// Starts from `|input>` with an empty circuit.
    pub fn new(n_qubits: usize, input: u64, minimal_controls: bool) -> Self {
        TwoLevelBuilder {
            circuit: Circuit::new(n_qubits),
            support: BTreeSet::from([input]),
            minimal_controls,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits
    }

    pub fn support(&self) -> &BTreeSet<u64> {
        &self.support
    }

    /// Flips bits so that the single populated state becomes `target`.
    pub fn prepare(&mut self, target: u64) -> Result<()> {
        if self.support.len() != 1 {
            return Err(Error::Contract("prepare needs a single populated basis state".into()));
        }
        let from = *self.support.iter().next().unwrap();
        let flips = from ^ target;
        for q in 0..self.n_qubits() {
            if flips >> q & 1 == 1 {
                self.circuit.push(Gate::x(q));
            }
        }
        self.support = BTreeSet::from([target]);
        Ok(())
    }

    /// Reserves slots up to `n` even if some are unused.
    pub fn reserve_params(&mut self, n: usize) {
        self.circuit.n_params = self.circuit.n_params.max(n);
    }

    /// Appends the rotation by `angle` between `b` and `b2`.
    pub fn givens(&mut self, b: u64, b2: u64, angle: Angle) -> Result<()> {
        let n = self.n_qubits();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if b == b2 || (b | b2) & !full != 0 {
            return Err(Error::Parameter(format!("bad two-level pair {b:#b}, {b2:#b}")));
        }
        if let Angle::Fixed(v) = angle {
            if v == 0.0 {
                return Ok(());
            }
        }
        let diff = b ^ b2;
        let t = diff.trailing_zeros() as usize;
        let pivot_on = Spin::from_bit(b2 >> t & 1 == 1);
        let ladder: Vec<Gate> = (0..n)
            .filter(|&q| q != t && diff >> q & 1 == 1)
            .map(|q| Gate::cnot_on(t, pivot_on, q))
            .collect();
        let apply_ladder = |s: u64| {
            if Spin::from_bit(s >> t & 1 == 1) == pivot_on {
                s ^ (diff & !(1 << t))
            } else {
                s
            }
        };
        let controls = self.choose_controls(b, b2, t, apply_ladder);
        let param = match angle {
            Angle::Fixed(v) => Param::Fixed(2.0 * v),
            Angle::Slot(s) => Param::scaled_slot(s, 2.0),
        };
        let param = if b >> t & 1 == 1 { param.negate() } else { param };
        for g in &ladder {
            self.circuit.push(g.clone());
        }
        self.circuit.push(Gate::controlled_ry(&controls, t, param));
        for g in ladder.into_iter().rev() {
            self.circuit.push(g);
        }
        self.support.insert(b);
        self.support.insert(b2);
        Ok(())
    }

    fn choose_controls(&self, b: u64, b2: u64, t: usize, ladder: impl Fn(u64) -> u64) -> Vec<(usize, Spin)> {
        let n = self.n_qubits();
        let candidates: Vec<usize> = (0..n).filter(|&q| q != t).collect();
        let spin = |q: usize| Spin::from_bit(b >> q & 1 == 1);
        if !self.minimal_controls {
            return candidates.into_iter().map(|q| (q, spin(q))).collect();
        }
        // states that must not see the rotation, in the ladder frame
        let mut others: Vec<u64> = self
            .support
            .iter()
            .filter(|&&s| s != b && s != b2)
            .map(|&s| ladder(s))
            .collect();
        let mut chosen: Vec<usize> = Vec::new();
        while !others.is_empty() {
            let best = candidates
                .iter()
                .filter(|q| !chosen.contains(q))
                .max_by_key(|&&q| {
                    let hits = others.iter().filter(|&&u| (u ^ b) >> q & 1 == 1).count();
                    // prefer the lowest index on ties
                    (hits, std::cmp::Reverse(q))
                })
                .copied()
                .expect("states differ from b outside the pivot");
            chosen.push(best);
            others.retain(|&u| (u ^ b) >> best & 1 == 0);
        }
        chosen.sort_unstable();
        chosen.into_iter().map(|q| (q, spin(q))).collect()
    }

    /// Applies a real orthogonal map on `span{|states_i>}`:
    /// `|states_j> -> sum_i q[i][j] |states_i>`. `q` must have determinant +1.
    pub fn orthogonal(&mut self, states: &[u64], q: &[Vec<f64>]) -> Result<()> {
        let d = states.len();
        if q.len() != d || q.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension { expected: d, actual: q.len() });
        }
        let mut m: Vec<Vec<f64>> = q.to_vec();
        let mut rots: Vec<(usize, usize, f64)> = Vec::new();
        for j in 0..d {
            for i in (j + 1..d).rev() {
                let (a, b) = (m[i - 1][j], m[i][j]);
                if b.abs() < 1e-15 {
                    continue;
                }
                let r = a.hypot(b);
                let (c, s) = (a / r, b / r);
                for col in 0..d {
                    let (x, y) = (m[i - 1][col], m[i][col]);
                    m[i - 1][col] = c * x + s * y;
                    m[i][col] = -s * x + c * y;
                }
                rots.push((i - 1, i, s.atan2(c)));
            }
            if m[j][j] < 0.0 && j + 1 < d {
                // half turn: negates rows j and j+1
                for col in 0..d {
                    m[j][col] = -m[j][col];
                    m[j + 1][col] = -m[j + 1][col];
                }
                rots.push((j, j + 1, std::f64::consts::PI));
            }
        }
        for (i, row) in m.iter().enumerate() {
            if (row[i] - 1.0).abs() > 1e-9 {
                return Err(Error::Contract(format!(
                    "map is not a rotation (diagonal {} at {i})",
                    row[i]
                )));
            }
        }
        for &(r1, r2, phi) in rots.iter().rev() {
            if phi.abs() > 1e-15 {
                self.givens(states[r1], states[r2], Angle::Fixed(phi))?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Circuit {
        self.circuit
    }
}
