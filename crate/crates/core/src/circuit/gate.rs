use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spin value of a qubit. Up is the Z = +1 eigenstate and is stored as bit 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Spin::Down
        } else {
            Spin::Up
        }
    }

    pub fn bit(self) -> u64 {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    X,
    RY,
    CRY,
    CNOT,
    SWAP,
    TOFFOLI,
    PSWAP,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::X => "X",
            GateKind::RY => "RY",
            GateKind::CRY => "CRY",
            GateKind::CNOT => "CNOT",
            GateKind::SWAP => "SWAP",
            GateKind::TOFFOLI => "TOFFOLI",
            GateKind::PSWAP => "PSWAP",
        };
        f.write_str(s)
    }
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

/// Rotation angle of a parameterized gate.
///
/// A slot reference evaluates to `scale * theta[slot]`, negated when
/// `negated` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Fixed(f64),
    Slot {
        slot: usize,
        negated: bool,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
}

impl Param {
    pub fn slot(slot: usize) -> Self {
        Param::Slot { slot, negated: false, scale: 1.0 }
    }

    pub fn scaled_slot(slot: usize, scale: f64) -> Self {
        Param::Slot { slot, negated: false, scale }
    }

    pub fn negate(self) -> Self {
        match self {
            Param::Fixed(v) => Param::Fixed(-v),
            Param::Slot { slot, negated, scale } => Param::Slot { slot, negated: !negated, scale },
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Param::Slot { .. })
    }

    pub fn resolve(&self, theta: &[f64]) -> f64 {
        match *self {
            Param::Fixed(v) => v,
            Param::Slot { slot, negated, scale } => {
                let v = scale * theta[slot];
                if negated {
                    -v
                } else {
                    v
                }
            }
        }
    }
}

/// One gate of a circuit.
///
/// `qubits` lists the controls first (matching `polarity`) followed by the
/// target(s). Controls fire when the qubit holds the spin named in
/// `polarity`; `Spin::Down` (bit value 1) is the textbook filled control.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub polarity: Vec<Spin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<Param>,
}

impl Gate {
    pub fn x(q: usize) -> Self {
        Gate { kind: GateKind::X, qubits: vec![q], polarity: vec![], param: None }
    }

    pub fn ry(q: usize, param: Param) -> Self {
        Gate { kind: GateKind::RY, qubits: vec![q], polarity: vec![], param: Some(param) }
    }

    pub fn cry(controls: &[(usize, Spin)], target: usize, param: Param) -> Self {
        let mut qubits: Vec<usize> = controls.iter().map(|c| c.0).collect();
        qubits.push(target);
        Gate {
            kind: GateKind::CRY,
            qubits,
            polarity: controls.iter().map(|c| c.1).collect(),
            param: Some(param),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::cnot_on(control, Spin::Down, target)
    }

    pub fn cnot_on(control: usize, on: Spin, target: usize) -> Self {
        Gate { kind: GateKind::CNOT, qubits: vec![control, target], polarity: vec![on], param: None }
    }

    pub fn toffoli(controls: &[(usize, Spin)], target: usize) -> Self {
        let mut qubits: Vec<usize> = controls.iter().map(|c| c.0).collect();
        qubits.push(target);
        Gate {
            kind: GateKind::TOFFOLI,
            qubits,
            polarity: controls.iter().map(|c| c.1).collect(),
            param: None,
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate { kind: GateKind::SWAP, qubits: vec![a, b], polarity: vec![], param: None }
    }

    pub fn pswap(a: usize, b: usize, param: Param) -> Self {
        Gate { kind: GateKind::PSWAP, qubits: vec![a, b], polarity: vec![], param: Some(param) }
    }

    /// X gate with any number of controls, picking the narrowest kind.
    pub fn controlled_x(controls: &[(usize, Spin)], target: usize) -> Self {
        match controls {
            [] => Gate::x(target),
            [(c, on)] => Gate::cnot_on(*c, *on, target),
            _ => Gate::toffoli(controls, target),
        }
    }

    /// RY with any number of controls.
    pub fn controlled_ry(controls: &[(usize, Spin)], target: usize, param: Param) -> Self {
        if controls.is_empty() {
            Gate::ry(target, param)
        } else {
            Gate::cry(controls, target, param)
        }
    }

    pub fn n_controls(&self) -> usize {
        self.polarity.len()
    }

    pub fn controls(&self) -> impl Iterator<Item = (usize, Spin)> + '_ {
        self.qubits.iter().copied().zip(self.polarity.iter().copied())
    }

    /// Qubits acted on, excluding controls.
    pub fn targets(&self) -> &[usize] {
        &self.qubits[self.polarity.len()..]
    }

    pub fn is_parameterized(&self) -> bool {
        self.param.map(|p| p.is_symbolic()).unwrap_or(false)
    }

    /// Validates arity, distinctness and range.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let nc = self.polarity.len();
        let nq = self.qubits.len();
        let ok_shape = match self.kind {
            GateKind::X => nq == 1 && nc == 0,
            GateKind::RY => nq == 1 && nc == 0,
            GateKind::CRY => nq >= 2 && nc == nq - 1,
            GateKind::CNOT => nq == 2 && nc == 1,
            GateKind::TOFFOLI => nq >= 3 && nc == nq - 1,
            GateKind::SWAP | GateKind::PSWAP => nq == 2 && nc == 0,
        };
        if !ok_shape {
            return Err(Error::Parameter(format!(
                "{} with {nq} qubits and {nc} controls",
                self.kind
            )));
        }
        let wants_param = matches!(self.kind, GateKind::RY | GateKind::CRY | GateKind::PSWAP);
        if wants_param != self.param.is_some() {
            return Err(Error::Parameter(format!("{} parameter arity", self.kind)));
        }
        if let Some(Param::Fixed(v)) = self.param {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{} angle not finite", self.kind)));
            }
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::Parameter(format!("qubit {q} outside register of {n_qubits}")));
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::Parameter(format!("{} repeats qubit {q}", self.kind)));
            }
        }
        Ok(())
    }

    /// Same gate with its parameter resolved to a fixed angle.
    pub fn bind(&self, theta: &[f64]) -> Gate {
        let mut g = self.clone();
        if let Some(p) = g.param {
            g.param = Some(Param::Fixed(p.resolve(theta)));
        }
        g
    }

    /// Adjoint gate: rotations negated, self-inverse gates unchanged.
    pub fn inverse(&self) -> Gate {
        let mut g = self.clone();
        g.param = g.param.map(Param::negate);
        g
    }

    fn fixed_angle(&self) -> Result<f64> {
        match self.param {
            Some(Param::Fixed(v)) => Ok(v),
            Some(Param::Slot { .. }) => Err(Error::SymbolicParameter(self.kind.to_string())),
            None => Err(Error::Parameter(format!("{} has no angle", self.kind))),
        }
    }

    /// The fixed angle for rotation gates, if bound.
    pub fn angle(&self) -> Option<f64> {
        match self.param {
            Some(Param::Fixed(v)) => Some(v),
            _ => None,
        }
    }

    /// Unitary on the gate's own qubits; local bit `i` is `qubits[i]`.
    pub fn local_matrix(&self) -> Result<DMatrix<Complex64>> {
        let s = self.qubits.len();
        let dim = 1usize << s;
        let nc = self.polarity.len();
        let ctrl_ok = |b: usize| {
            self.polarity
                .iter()
                .enumerate()
                .all(|(i, on)| (b >> i & 1) as u64 == on.bit())
        };
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            GateKind::X | GateKind::CNOT | GateKind::TOFFOLI => {
                let t = 1usize << nc;
                for b in 0..dim {
                    let out = if ctrl_ok(b) { b ^ t } else { b };
                    m[(out, b)] = one;
                }
            }
            GateKind::RY | GateKind::CRY => {
                let th = self.fixed_angle()?;
                let (c, sn) = ((th / 2.0).cos(), (th / 2.0).sin());
                let t = 1usize << nc;
                for b in 0..dim {
                    if !ctrl_ok(b) {
                        m[(b, b)] = one;
                        continue;
                    }
                    if b & t == 0 {
                        // |0> -> c|0> + s|1>
                        m[(b, b)] = c.into();
                        m[(b | t, b)] = sn.into();
                    } else {
                        // |1> -> -s|0> + c|1>
                        m[(b & !t, b)] = (-sn).into();
                        m[(b, b)] = c.into();
                    }
                }
            }
            GateKind::SWAP => {
                for b in 0..dim {
                    let out = ((b & 1) << 1) | (b >> 1);
                    m[(out, b)] = one;
                }
            }
            GateKind::PSWAP => {
                let th = self.fixed_angle()?;
                let (c, sn) = (th.cos(), th.sin());
                m[(0, 0)] = one;
                m[(3, 3)] = one;
                // |up down>: first qubit bit 0, second qubit bit 1
                let ud = 0b10;
                let du = 0b01;
                m[(ud, ud)] = c.into();
                m[(du, ud)] = sn.into();
                m[(ud, du)] = (-sn).into();
                m[(du, du)] = c.into();
            }
        }
        Ok(m)
    }

    /// Number of CNOT-equivalent two-qubit interactions in a standard
    /// decomposition; each one receives a noise channel.
    pub fn cnot_cost(&self) -> usize {
        match self.kind {
            GateKind::X | GateKind::RY => 0,
            GateKind::CNOT => 1,
            GateKind::SWAP => 3,
            GateKind::PSWAP => 2,
            GateKind::CRY => match self.n_controls() {
                1 => 2,
                k => 2 * (2 * k - 1) + 2,
            },
            GateKind::TOFFOLI => match self.n_controls() {
                2 => 6,
                k => 6 * (2 * k - 3),
            },
        }
    }

    /// Qubit pairs receiving the noise channels counted by [`Gate::cnot_cost`].
    pub fn noise_pairs(&self) -> Vec<(usize, usize)> {
        let cost = self.cnot_cost();
        if cost == 0 {
            return Vec::new();
        }
        let q = &self.qubits;
        match self.kind {
            GateKind::CNOT | GateKind::SWAP | GateKind::PSWAP => vec![(q[0], q[1]); cost],
            _ => {
                let t = *q.last().unwrap();
                let controls = &q[..q.len() - 1];
                (0..cost).map(|i| (controls[i % controls.len()], t)).collect()
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.kind, self.qubits)?;
        if let Some(p) = self.param {
            match p {
                Param::Fixed(v) => write!(f, "({v})")?,
                Param::Slot { slot, negated, scale } => {
                    let sign = if negated { "-" } else { "" };
                    write!(f, "({sign}{scale}*t{slot})")?
                }
            }
        }
        Ok(())
    }
}
