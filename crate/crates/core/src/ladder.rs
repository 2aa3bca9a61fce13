//! The full homogeneous system behind the finite-nucleus recursion, and its
//! singular-value audit.
//!
//! Unknowns are ordered `b_0..b_{n_r}, d_0..d_{n_r}`. Rows come in pairs, the
//! two recursion lines at ν = 0..n_r followed by the two tail lines at
//! ν = n_r + 1, giving a `(2n_r + 4) × (2n_r + 2)` matrix.

use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, Result};
use crate::exact::{rows_at, BoundKinematics, BoundaryRadius};
use crate::levels::{EnergyLevel, QuantumNumbers};

/// Default relative singular-value threshold for counting the nullity.
pub const DEFAULT_SINGULAR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LadderSystem {
    pub qn: QuantumNumbers,
    pub energy: EnergyLevel,
    pub delta: BoundaryRadius,
    /// Raw entries in natural units.
    pub matrix: DMatrix<f64>,
}

pub fn assemble_ladder(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    energy: &EnergyLevel,
    delta: BoundaryRadius,
) -> Result<LadderSystem> {
    if qn.n_r == 0 {
        return domain("ladder needs n_r >= 1");
    }
    assemble_ladder_unchecked(constants, qn, energy, delta)
}

/// As [`assemble_ladder`] but also accepts n_r = 0, where the system is the
/// ν = 0 pair plus the tail pair acting on `(b_0, d_0)`.
pub fn assemble_ladder_unchecked(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    energy: &EnergyLevel,
    delta: BoundaryRadius,
) -> Result<LadderSystem> {
    let kin = BoundKinematics::from_level(energy)?;
    let n = qn.n_r as usize;
    let cols = 2 * (n + 1);
    let mut matrix = DMatrix::zeros(2 * (n + 2), cols);
    let b_col = |nu: isize| (nu >= 0 && nu <= n as isize).then_some(nu as usize);
    let d_col = |nu: isize| b_col(nu).map(|c| c + n + 1);
    for nu in 0..=n + 1 {
        let rows = rows_at(&kin, qn.z_alpha(constants), qn.k as f64, delta.value(), nu);
        for (offset, row) in rows.iter().enumerate() {
            let r = 2 * nu + offset;
            let v = nu as isize;
            let entries = [
                (b_col(v - 1), row.prev_b),
                (d_col(v - 1), row.prev_d),
                (b_col(v), row.b),
                (d_col(v), row.d),
                (b_col(v + 1), row.next_b),
                (d_col(v + 1), row.next_d),
            ];
            for (col, value) in entries {
                if let Some(c) = col {
                    matrix[(r, c)] += value;
                }
            }
        }
    }
    Ok(LadderSystem { qn: *qn, energy: *energy, delta, matrix })
}

fn sorted_svd(m: &DMatrix<f64>) -> (Vec<f64>, Option<DMatrix<f64>>) {
    let svd = SVD::new(m.clone(), false, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v_t = svd.v_t.map(|vt| {
        let rows: Vec<_> = order.iter().map(|&i| vt.row(i).clone_owned()).collect();
        DMatrix::from_rows(&rows)
    });
    (values, v_t)
}

impl LadderSystem {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Each row scaled to unit max-norm, with the applied factors.
    pub fn equilibrated(&self) -> (DMatrix<f64>, Vec<f64>) {
        let mut m = self.matrix.clone();
        let mut scales = Vec::with_capacity(m.nrows());
        for mut row in m.row_iter_mut() {
            let max = row.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let s = if max > 0.0 { 1.0 / max } else { 1.0 };
            row *= s;
            scales.push(s);
        }
        (m, scales)
    }

    /// The 2×2 block of the two tail lines on the columns b_{n_r}, d_{n_r}.
    pub fn tail_block(&self) -> DMatrix<f64> {
        let n = self.qn.n_r as usize;
        let r = self.rows() - 2;
        DMatrix::from_fn(2, 2, |i, j| self.matrix[(r + i, if j == 0 { n } else { 2 * n + 1 })])
    }

    /// Smallest over largest singular value of the tail block.
    pub fn tail_singular_ratio(&self) -> f64 {
        let (s, _) = sorted_svd(&self.tail_block());
        s[1] / s[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceReport {
    pub qn: QuantumNumbers,
    pub epsilon: f64,
    pub binding: f64,
    pub delta: f64,
    pub rows: usize,
    pub cols: usize,
    pub tolerance: f64,
    pub rank: usize,
    pub nullity: usize,
    /// All singular values of the equilibrated matrix, descending.
    pub singular_values: Vec<f64>,
    /// Up to the three smallest, ascending.
    pub smallest_singular_values: Vec<f64>,
    pub nontrivial_solution_exists: bool,
    /// ‖A v‖ for the unit right singular vector of the smallest singular value.
    pub best_residual: f64,
    pub best_vector: Vec<f64>,
    pub row_scales: Vec<f64>,
}

/// Rank and null-space audit: singular values below `tolerance` times the
/// largest one count toward the nullity.
pub fn nullspace_report(system: &LadderSystem, tolerance: f64) -> NullspaceReport {
    let (m, row_scales) = system.equilibrated();
    let (values, v_t) = sorted_svd(&m);
    let cols = system.cols();
    let largest = values.first().copied().unwrap_or(0.0);
    let rank = values.iter().filter(|s| **s > tolerance * largest).count();
    let nullity = cols - rank;
    let v_t = v_t.expect("right singular vectors requested");
    let best = DVector::from_iterator(cols, v_t.row(cols - 1).iter().copied());
    let best_residual = (&m * &best).norm();
    let smallest_singular_values = values.iter().rev().take(3).copied().collect();
    NullspaceReport {
        qn: system.qn,
        epsilon: system.energy.epsilon(),
        binding: system.energy.binding.re,
        delta: system.delta.value(),
        rows: system.rows(),
        cols,
        tolerance,
        rank,
        nullity,
        singular_values: values,
        smallest_singular_values,
        nontrivial_solution_exists: nullity > 0,
        best_residual,
        best_vector: best.iter().copied().collect(),
        row_scales,
    }
}

fn relative_smallest(system: &LadderSystem) -> f64 {
    let (values, _) = sorted_svd(&system.equilibrated().0);
    values[values.len() - 1] / values[0]
}

/// Smallest-to-largest singular value ratio of the equilibrated ladder at
/// each energy, as `(ε, ratio)`.
pub fn residual_scan(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    delta: BoundaryRadius,
    energies: &[EnergyLevel],
) -> Result<Vec<(f64, f64)>> {
    energies
        .iter()
        .map(|e| Ok((e.epsilon(), relative_smallest(&assemble_ladder(constants, qn, e, delta)?))))
        .collect()
}

/// Smallest relative singular value of the n_r = 0 system over `energies`,
/// with the energy where it occurs. A value far from zero means no bound
/// level terminates at degree zero.
pub fn probe_zero_radial(
    constants: &PhysicalConstants,
    z: u32,
    k: i32,
    delta: BoundaryRadius,
    energies: &[EnergyLevel],
) -> Result<Option<(f64, f64)>> {
    let qn = QuantumNumbers::new(z, k, 0)?;
    let mut best: Option<(f64, f64)> = None;
    for e in energies {
        let r = relative_smallest(&assemble_ladder_unchecked(constants, &qn, e, delta)?);
        if best.is_none_or(|(_, b)| r < b) {
            best = Some((e.epsilon(), r));
        }
    }
    Ok(best)
}
