use serde::{Deserialize, Serialize};

use super::string::{Pauli, PauliString};
use super::sum::PauliSum;

/// Per-qubit measurement axis of a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
    Free,
}

impl Axis {
    fn from_pauli(p: Pauli) -> Axis {
        match p {
            Pauli::I => Axis::Free,
            Pauli::X => Axis::X,
            Pauli::Y => Axis::Y,
            Pauli::Z => Axis::Z,
        }
    }
}

/// Qubit-wise compatible strings measured with one setting.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementGroup {
    pub members: Vec<PauliString>,
    pub basis: Vec<Axis>,
    pub representative: PauliString,
}

impl MeasurementGroup {
    fn seed(p: PauliString) -> Self {
        let mut g = MeasurementGroup {
            members: vec![p],
            basis: vec![Axis::Free; p.n_qubits()],
            representative: p,
        };
        g.absorb_basis(&p);
        g
    }

    fn absorb_basis(&mut self, p: &PauliString) {
        for (q, axis) in self.basis.iter_mut().enumerate() {
            let a = Axis::from_pauli(p.get(q));
            if a != Axis::Free {
                *axis = a;
            }
        }
    }

    fn accepts(&self, p: &PauliString) -> bool {
        (0..p.n_qubits()).all(|q| {
            let a = Axis::from_pauli(p.get(q));
            a == Axis::Free || self.basis[q] == Axis::Free || self.basis[q] == a
        })
    }

    /// Single-qubit factor string with the group's basis (free qubits as `I`).
    pub fn basis_string(&self) -> PauliString {
        let mut s = PauliString::identity(self.basis.len());
        for (q, a) in self.basis.iter().enumerate() {
            let p = match a {
                Axis::X => Pauli::X,
                Axis::Y => Pauli::Y,
                Axis::Z => Pauli::Z,
                Axis::Free => Pauli::I,
            };
            s.set(q, p);
        }
        s
    }
}

/// Greedy qubit-wise grouping of the non-identity strings of `h`.
///
/// Strings are visited by descending weight (canonical order breaks ties) and
/// join the first group whose basis they are compatible with.
pub fn group_for_measurement(h: &PauliSum) -> Vec<MeasurementGroup> {
    let mut strings: Vec<PauliString> = h.strings().filter(|p| !p.is_identity()).copied().collect();
    strings.sort_by(|a, b| b.weight().cmp(&a.weight()).then(a.cmp(b)));
    let mut groups: Vec<MeasurementGroup> = Vec::new();
    for p in strings {
        match groups.iter_mut().find(|g| g.accepts(&p)) {
            Some(g) => {
                g.members.push(p);
                g.absorb_basis(&p);
            }
            None => groups.push(MeasurementGroup::seed(p)),
        }
    }
    for g in &mut groups {
        // visited order is descending weight, so the first member has the fewest identities
        g.representative = g.members[0];
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_strings_share_a_group() {
        let h = PauliSum::from_words(&[(1.0, "ZI"), (1.0, "IZ"), (1.0, "ZZ"), (2.0, "II")]).unwrap();
        let g = group_for_measurement(&h);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].representative.to_word(), "ZZ");
        assert_eq!(g[0].members.len(), 3);
    }

    #[test]
    fn incompatible_split() {
        let h = PauliSum::from_words(&[(1.0, "X"), (1.0, "Z")]).unwrap();
        assert_eq!(group_for_measurement(&h).len(), 2);
    }

    #[test]
    fn partition_and_compatibility() {
        let h = PauliSum::from_words(&[
            (1.0, "XZI"),
            (1.0, "XII"),
            (1.0, "IZY"),
            (1.0, "YYY"),
            (1.0, "ZZZ"),
            (1.0, "IIZ"),
        ])
        .unwrap();
        let groups = group_for_measurement(&h);
        let total: usize = groups.iter().map(|g| g.members.len()).sum();
        assert_eq!(total, 6);
        for g in &groups {
            for a in &g.members {
                for b in &g.members {
                    assert!(a.qubitwise_compatible(b).unwrap());
                }
                assert!(a.qubitwise_compatible(&g.basis_string()).unwrap());
            }
        }
    }
}
