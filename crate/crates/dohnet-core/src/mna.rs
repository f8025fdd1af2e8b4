//! Modified nodal analysis of element netlists.
//!
//! Builds and solves the full nodal system (node voltages plus inductor,
//! winding, and source branch currents) to extract a two-port chain matrix at
//! a single frequency. No per-element chain matrices are composed along the
//! way, so results from this path serve as an independent cross-check for
//! networks assembled by cascading.
//!
//! Node `0` is ground. Every node must have a galvanic or magnetic path to
//! ground once the port fixtures are attached; windings left without any
//! voltage reference make the system singular and surface as
//! [`MnaError::Degenerate`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
use num_traits::Float;

use crate::linalg::solve_complex;
use crate::twoport::{AbcdMatrix, Frequency};

/// One circuit element; node `0` is ground.
#[derive(Debug, Clone, PartialEq)]
pub enum Branch {
    Resistor {
        nodes: (usize, usize),
        ohms: f64,
    },
    Inductor {
        nodes: (usize, usize),
        henries: f64,
    },
    Capacitor {
        nodes: (usize, usize),
        farads: f64,
    },
    /// Two magnetically coupled windings, each `(node+, node-, henries)`,
    /// with coupling factor `0 < k <= 1`.
    MutualInductors {
        primary: (usize, usize, f64),
        secondary: (usize, usize, f64),
        k: f64,
    },
}

/// Errors from netlist validation or the nodal solve.
#[derive(Debug, Clone, PartialEq)]
pub enum MnaError {
    InvalidValue(&'static str),
    /// `node` has no path to ground even with the port fixtures attached.
    Disconnected { node: usize },
    /// The nodal system is singular (or produced non-finite results) at the
    /// requested frequency.
    Degenerate,
}

impl fmt::Display for MnaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MnaError::InvalidValue(what) => write!(f, "invalid netlist: {what}"),
            MnaError::Disconnected { node } => {
                write!(f, "node {node} has no path to ground")
            }
            MnaError::Degenerate => {
                write!(f, "nodal system is singular at the requested frequency")
            }
        }
    }
}

impl core::error::Error for MnaError {}

/// A validated element netlist with two designated ports.
///
/// Each port is a `(positive, negative)` node pair. Port 1 is the input in
/// the chain-matrix convention; port-2 current is taken flowing out of the
/// positive terminal into the termination.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    branches: Vec<Branch>,
    port1: (usize, usize),
    port2: (usize, usize),
}

fn positive(value: f64, what: &'static str) -> Result<(), MnaError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(MnaError::InvalidValue(what))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

impl Netlist {
    pub fn new(
        branches: Vec<Branch>,
        port1: (usize, usize),
        port2: (usize, usize),
    ) -> Result<Self, MnaError> {
        if port1.0 == port1.1 || port2.0 == port2.1 {
            return Err(MnaError::InvalidValue("port nodes must differ"));
        }
        for branch in &branches {
            match branch {
                Branch::Resistor { nodes, ohms } => {
                    if nodes.0 == nodes.1 {
                        return Err(MnaError::InvalidValue("branch nodes must differ"));
                    }
                    positive(*ohms, "resistance must be finite and > 0")?;
                }
                Branch::Inductor { nodes, henries } => {
                    if nodes.0 == nodes.1 {
                        return Err(MnaError::InvalidValue("branch nodes must differ"));
                    }
                    positive(*henries, "inductance must be finite and > 0")?;
                }
                Branch::Capacitor { nodes, farads } => {
                    if nodes.0 == nodes.1 {
                        return Err(MnaError::InvalidValue("branch nodes must differ"));
                    }
                    positive(*farads, "capacitance must be finite and > 0")?;
                }
                Branch::MutualInductors {
                    primary,
                    secondary,
                    k,
                } => {
                    if primary.0 == primary.1 || secondary.0 == secondary.1 {
                        return Err(MnaError::InvalidValue("winding nodes must differ"));
                    }
                    positive(primary.2, "winding inductance must be finite and > 0")?;
                    positive(secondary.2, "winding inductance must be finite and > 0")?;
                    if !(k.is_finite() && *k > 0.0 && *k <= 1.0) {
                        return Err(MnaError::InvalidValue("coupling must satisfy 0 < k <= 1"));
                    }
                }
            }
        }
        let net = Self {
            branches,
            port1,
            port2,
        };
        net.check_connectivity()?;
        Ok(net)
    }

    #[must_use]
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    #[must_use]
    pub fn port1(&self) -> (usize, usize) {
        self.port1
    }

    #[must_use]
    pub fn port2(&self) -> (usize, usize) {
        self.port2
    }

    /// All node ids mentioned by branches or ports, plus ground, sorted.
    fn node_ids(&self) -> Vec<usize> {
        let mut ids = vec![0, self.port1.0, self.port1.1, self.port2.0, self.port2.1];
        for branch in &self.branches {
            match branch {
                Branch::Resistor { nodes, .. }
                | Branch::Inductor { nodes, .. }
                | Branch::Capacitor { nodes, .. } => {
                    ids.push(nodes.0);
                    ids.push(nodes.1);
                }
                Branch::MutualInductors {
                    primary, secondary, ..
                } => {
                    ids.push(primary.0);
                    ids.push(primary.1);
                    ids.push(secondary.0);
                    ids.push(secondary.1);
                }
            }
        }
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    fn check_connectivity(&self) -> Result<(), MnaError> {
        let ids = self.node_ids();
        let pos = |node: usize| ids.binary_search(&node).expect("node collected above");
        let mut uf = UnionFind::new(ids.len());
        for branch in &self.branches {
            match branch {
                Branch::Resistor { nodes, .. }
                | Branch::Inductor { nodes, .. }
                | Branch::Capacitor { nodes, .. } => uf.union(pos(nodes.0), pos(nodes.1)),
                Branch::MutualInductors {
                    primary, secondary, ..
                } => {
                    uf.union(pos(primary.0), pos(primary.1));
                    uf.union(pos(secondary.0), pos(secondary.1));
                    // Magnetic coupling ties the winding pair together.
                    uf.union(pos(primary.0), pos(secondary.0));
                }
            }
        }
        // The measurement fixtures connect each port pair.
        uf.union(pos(self.port1.0), pos(self.port1.1));
        uf.union(pos(self.port2.0), pos(self.port2.1));
        let ground = uf.find(pos(0));
        for &node in &ids {
            if uf.find(pos(node)) != ground {
                return Err(MnaError::Disconnected { node });
            }
        }
        Ok(())
    }

    /// Chain matrix at `f`, extracted from two nodal solves: port 2 left open
    /// under a unit voltage drive (yields `a` and `c`), then port 2 shorted
    /// under a unit current drive (yields `b` and `d`).
    pub fn abcd(&self, f: Frequency) -> Result<AbcdMatrix, MnaError> {
        let open = self.solve_case(f, Case::OpenOutput)?;
        let short = self.solve_case(f, Case::ShortedOutput)?;

        let (v1o, v2o, i1o) = open;
        if v2o.norm() < 1e-18 {
            return Err(MnaError::Degenerate);
        }
        let a = v1o / v2o;
        let c = i1o / v2o;

        let (v1s, i2s, i1s) = short;
        if i2s.norm() < 1e-18 {
            return Err(MnaError::Degenerate);
        }
        let b = v1s / i2s;
        let d = i1s / i2s;

        let m = AbcdMatrix::new(a, b, c, d);
        for entry in [m.a, m.b, m.c, m.d] {
            if !(entry.re.is_finite() && entry.im.is_finite()) {
                return Err(MnaError::Degenerate);
            }
        }
        Ok(m)
    }

    /// Assembles and solves one excitation case.
    ///
    /// Returns `(v1, v2, i1)` for the open case and `(v1, i2, i1)` for the
    /// shorted case.
    fn solve_case(
        &self,
        f: Frequency,
        case: Case,
    ) -> Result<(Complex64, Complex64, Complex64), MnaError> {
        let omega = f.omega();
        let jw = Complex64::new(0.0, omega);
        let ids = self.node_ids();
        // Matrix slot for a node's voltage; ground has none.
        let slot = |node: usize| -> Option<usize> {
            if node == 0 {
                None
            } else {
                Some(ids.binary_search(&node).expect("node collected above") - 1)
            }
        };
        let n_nodes = ids.len() - 1;

        let mut current_slots = Vec::new();
        let mut next = n_nodes;
        for branch in &self.branches {
            match branch {
                Branch::Inductor { .. } => {
                    current_slots.push(next);
                    next += 1;
                }
                Branch::MutualInductors { .. } => {
                    current_slots.push(next);
                    next += 2;
                }
                _ => current_slots.push(usize::MAX),
            }
        }
        let src_slot = next;
        let n = next + 1;

        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut a = vec![vec![zero; n]; n];
        let mut rhs = vec![zero; n];

        let stamp_admittance = |m: &mut Vec<Vec<Complex64>>, p: usize, q: usize, y: Complex64| {
            let (ip, iq) = (slot(p), slot(q));
            if let Some(i) = ip {
                m[i][i] += y;
            }
            if let Some(j) = iq {
                m[j][j] += y;
            }
            if let (Some(i), Some(j)) = (ip, iq) {
                m[i][j] -= y;
                m[j][i] -= y;
            }
        };
        // A branch current `i` in slot `s` flows from `p` to `q`; it leaves
        // node `p` and enters node `q`.
        let stamp_branch_current = |m: &mut Vec<Vec<Complex64>>, p: usize, q: usize, s: usize| {
            if let Some(i) = slot(p) {
                m[i][s] += one;
                m[s][i] += one;
            }
            if let Some(j) = slot(q) {
                m[j][s] -= one;
                m[s][j] -= one;
            }
        };

        for (branch, &cslot) in self.branches.iter().zip(&current_slots) {
            match branch {
                Branch::Resistor { nodes, ohms } => {
                    stamp_admittance(&mut a, nodes.0, nodes.1, one / ohms);
                }
                Branch::Capacitor { nodes, farads } => {
                    stamp_admittance(&mut a, nodes.0, nodes.1, jw * farads);
                }
                Branch::Inductor { nodes, henries } => {
                    stamp_branch_current(&mut a, nodes.0, nodes.1, cslot);
                    a[cslot][cslot] -= jw * henries;
                }
                Branch::MutualInductors {
                    primary,
                    secondary,
                    k,
                } => {
                    let (s1, s2) = (cslot, cslot + 1);
                    let m_mutual = k * (primary.2 * secondary.2).sqrt();
                    stamp_branch_current(&mut a, primary.0, primary.1, s1);
                    stamp_branch_current(&mut a, secondary.0, secondary.1, s2);
                    a[s1][s1] -= jw * primary.2;
                    a[s1][s2] -= jw * m_mutual;
                    a[s2][s1] -= jw * m_mutual;
                    a[s2][s2] -= jw * secondary.2;
                }
            }
        }

        // The source branch current flows from the positive node through the
        // source to the negative node.
        match case {
            Case::OpenOutput => {
                // Unit voltage source: constraint row V(p) - V(m) = 1 with no
                // current term on the diagonal.
                stamp_branch_current(&mut a, self.port1.0, self.port1.1, src_slot);
                rhs[src_slot] = one;
            }
            Case::ShortedOutput => {
                stamp_branch_current(&mut a, self.port2.0, self.port2.1, src_slot);
                if let Some(i) = slot(self.port1.0) {
                    rhs[i] += one;
                }
                if let Some(j) = slot(self.port1.1) {
                    rhs[j] -= one;
                }
            }
        }

        let x = solve_complex(a, rhs).ok_or(MnaError::Degenerate)?;
        let v = |node: usize| slot(node).map_or(zero, |i| x[i]);
        let v1 = v(self.port1.0) - v(self.port1.1);
        let v2 = v(self.port2.0) - v(self.port2.1);
        match case {
            // The source current leaves the positive port node, so the
            // current into the network is its negation.
            Case::OpenOutput => Ok((v1, v2, -x[src_slot])),
            // The shorting branch carries exactly the port-2 output current;
            // the drive injects exactly one ampere into port 1.
            Case::ShortedOutput => Ok((v1, x[src_slot], one)),
        }
    }
}

#[derive(Clone, Copy)]
enum Case {
    OpenOutput,
    ShortedOutput,
}
