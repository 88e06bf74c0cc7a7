//! Singular values per frequency block, kernel and cokernel counts.

use super::grid::{DomainKind, GridSection};
use super::operator::{constrain, DiscreteDiracOperator, Scheme};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

/// Default relative kernel threshold.
pub const KERNEL_TOLERANCE: f64 = 1e-8;
/// Minimum ratio between the smallest uncounted and largest counted singular value.
pub const MIN_GAP: f64 = 1e4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub scheme: Scheme,
    pub resolution: Vec<usize>,
    pub tolerance: f64,
    /// Ascending.
    pub singular_values: Vec<f64>,
    pub dim_ker: usize,
    pub dim_coker: usize,
    pub index: i64,
    /// Smallest of the kernel and cokernel gaps.
    pub gap_ratio: f64,
    /// False if a gap is below [`MIN_GAP`].
    pub converged: bool,
    pub residuals: BTreeMap<String, f64>,
    pub wall_time_ms: u64,
}

struct Count {
    values: Vec<f64>,
    dim: usize,
    gap: f64,
}

fn svd_values(m: DMatrix<Complex64>, block: usize) -> Result<Vec<f64>> {
    let svd = m.try_svd(false, false, f64::EPSILON, 0).ok_or(Error::SolverFailure { block })?;
    Ok(svd.singular_values.iter().copied().collect())
}

fn count(values: Vec<f64>, tolerance: f64) -> Count {
    let mut values = values;
    values.sort_by(|a, b| a.partial_cmp(b).expect("singular values are finite"));
    let smax = values.last().copied().unwrap_or(0.0);
    let cut = tolerance * smax;
    let dim = values.iter().take_while(|&&s| s < cut).count();
    // Values below roundoff are floored so the gap stays finite.
    let floor = f64::EPSILON * smax;
    let below = if dim == 0 { cut } else { values[dim - 1].max(floor) };
    let gap = match values.get(dim) {
        Some(&above) if below > 0.0 => above / below,
        _ => 0.0,
    };
    Count { values, dim, gap }
}

fn block_values(op: &DiscreteDiracOperator, adjoint: bool) -> Result<Vec<f64>> {
    let ks = op.domain().block_frequencies();
    let per: Vec<Vec<f64>> = ks
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let b = op.constrained_block(*k);
            svd_values(if adjoint { b.adjoint() } else { b }, i)
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Singular values, `dim ker`, `dim coker` and index.
///
/// On the strip with a boundary line `L`, the cokernel is counted as
/// `ker(D, L⊥)`; otherwise as the kernel of the adjoint blocks.
pub fn kernel_dims(op: &DiscreteDiracOperator, tolerance: f64) -> Result<SpectralReport> {
    let start = Instant::now();
    let ker = count(block_values(op, false)?, tolerance);
    let coker = match (op.domain().kind(), op.boundary()) {
        (DomainKind::Strip, Some(bc)) => {
            let dual = constrain(op, &bc.complement())?;
            count(block_values(&dual, false)?, tolerance)
        }
        _ => count(block_values(op, true)?, tolerance),
    };
    let gap_ratio = ker.gap.min(coker.gap);
    Ok(SpectralReport {
        scheme: op.scheme(),
        resolution: op.domain().resolution().to_vec(),
        tolerance,
        dim_ker: ker.dim,
        dim_coker: coker.dim,
        index: ker.dim as i64 - coker.dim as i64,
        gap_ratio,
        converged: gap_ratio >= MIN_GAP,
        singular_values: ker.values,
        residuals: BTreeMap::new(),
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Orthonormal basis of the discrete kernel as physical grid sections,
/// using the same relative threshold as [`kernel_dims`].
pub fn kernel_sections(op: &DiscreteDiracOperator, tolerance: f64) -> Result<Vec<GridSection>> {
    let smax = block_values(op, false)?.into_iter().fold(0.0, f64::max);
    let cut = tolerance * smax;
    let domain = *op.domain();
    let ks = domain.block_frequencies();
    let embedding = op.boundary().map(|bc| op.boundary_embedding(bc).map(|c| Complex64::new(c, 0.0)));
    let mut out = Vec::new();
    for (i, k) in ks.iter().enumerate() {
        let b = op.constrained_block(*k);
        let svd = b.try_svd(false, true, f64::EPSILON, 0).ok_or(Error::SolverFailure { block: i })?;
        let v_t = svd.v_t.expect("requested right singular vectors");
        for (r, s) in svd.singular_values.iter().enumerate() {
            if *s >= cut {
                continue;
            }
            let reduced = v_t.row(r).adjoint();
            let full = match &embedding {
                Some(e) => e * reduced,
                None => reduced.into_owned(),
            };
            let fiber = op.fiber_dim();
            let mut sec = GridSection::zeros(domain, fiber);
            for node in 0..domain.len() {
                let x = domain.point(node);
                let idx = domain.unravel(node);
                let phase: f64 = (0..3).filter(|&a| domain.is_periodic(a)).map(|a| k[a] as f64 * x[a]).sum();
                let wave = Complex64::from_polar(1.0, 2.0 * PI * phase);
                let offset = if domain.kind() == DomainKind::Strip { idx[0] * fiber } else { 0 };
                for (c, z) in sec.at_mut(node).iter_mut().enumerate() {
                    *z = full[offset + c] * wave;
                }
            }
            let n = sec.norm();
            out.push(sec.scale(1.0 / n));
        }
    }
    Ok(out)
}
