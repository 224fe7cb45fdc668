//! Classical joint diagonalizer: cyclic sweeps of plane rotations, each
//! angle the closed-form minimizer of the summed off-diagonal mass of the
//! whole matrix set.

use crate::error::{Error, Result};
use crate::linalg::{rotate_rows, rotate_symmetric};
use crate::matrix::RealMatrix;
use crate::whitening::LaggedCovarianceSet;

use super::{canonicalize_unmixer, off_unchecked};

pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Scale-free default rotation threshold.
pub fn default_tol(n: usize) -> f64 {
    1e-8 / (n as f64).sqrt()
}

/// Outcome of the sweep solver.
#[derive(Debug, Clone)]
pub struct JadeResult {
    /// Orthogonal unmixer; columns ordered by descending diagonal of
    /// `U^T M(tau_1) U`, each column's largest entry positive.
    pub u: RealMatrix,
    /// Sweeps performed, including the final sweep that applied no
    /// rotation.
    pub sweeps: usize,
    /// Rotations actually applied (angle above threshold).
    pub rotations_applied: usize,
    /// Total off-diagonal mass before any sweep and after each sweep;
    /// non-increasing.
    pub off_history: Vec<f64>,
    /// Final total off-diagonal mass.
    pub final_off: f64,
    /// Smallest gap between adjacent ordered diagonal values of
    /// `U^T M(tau_1) U`; below ~1e-6 the output ordering is arbitrary.
    pub min_diag_gap: f64,
}

/// Jointly diagonalize the set by Givens sweeps.
///
/// For each pair (p, q) the rotation angle comes from the principal axis
/// of the 2x2 accumulation matrix built from `[M_pp - M_qq, 2 M_pq]`
/// across the set; rotations with `|sin theta| < tol` are skipped. Stops
/// after a sweep applies no rotation or after `max_sweeps`.
pub fn joint_diagonalize(
    set: &LaggedCovarianceSet,
    tol: f64,
    max_sweeps: usize,
) -> Result<JadeResult> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "rotation threshold {tol} must be positive"
        )));
    }
    if max_sweeps == 0 {
        return Err(Error::InvalidConfig("max_sweeps must be at least 1".into()));
    }

    let n = set.order();
    let mut mats: Vec<RealMatrix> = set.matrices().to_vec();
    // Accumulated transposed unmixer: row k holds column k of U.
    let mut ut = RealMatrix::identity(n);

    let total_off = |ms: &[RealMatrix]| ms.iter().map(off_unchecked).sum::<f64>();
    let mut off_history = vec![total_off(&mats)];
    let mut rotations_applied = 0usize;
    let mut sweeps = 0usize;

    for _ in 0..max_sweeps {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (mut g11, mut g22, mut g12) = (0.0_f64, 0.0_f64, 0.0_f64);
                for m in &mats {
                    let x = m.get(p, p) - m.get(q, q);
                    let y = 2.0 * m.get(p, q);
                    g11 += x * x;
                    g22 += y * y;
                    g12 += x * y;
                }
                let theta = 0.25 * (2.0 * g12).atan2(g11 - g22);
                let (s, c) = theta.sin_cos();
                if s.abs() < tol {
                    continue;
                }
                rotated = true;
                rotations_applied += 1;
                for m in &mut mats {
                    rotate_symmetric(m, p, q, c, s);
                }
                rotate_rows(&mut ut, p, q, c, s);

                #[cfg(debug_assertions)]
                {
                    // The optimal angle cannot grow the off-diagonal mass
                    // in the rotated plane.
                    let old_pair = g22 / 4.0;
                    let new_pair: f64 = mats.iter().map(|m| m.get(p, q) * m.get(p, q)).sum();
                    debug_assert!(
                        new_pair <= old_pair + 1e-14 * (g11 + g22).max(1e-300),
                        "rotation increased off mass: {new_pair:e} > {old_pair:e}"
                    );
                }
            }
        }
        off_history.push(total_off(&mats));
        if !rotated {
            break;
        }
    }

    let mut u = ut.transpose();
    let min_diag_gap = canonicalize_unmixer(&mut u, &set.matrices()[0]);
    let final_off = *off_history.last().unwrap();
    Ok(JadeResult {
        u,
        sweeps,
        rotations_applied,
        off_history,
        final_off,
        min_diag_gap,
    })
}
