//! Objective-space geometry behind reference selection: an orthonormal
//! basis whose first axis spans the archive's objective range, projection
//! onto the hyperplane orthogonal to that axis, and a crowding density
//! measured on the projected points with a decreasing influence function.
//!
//! The solver picks the archive point of lowest density as the next
//! reference, which steers effort toward sparsely covered front regions.

use thiserror::Error;

use crate::core::{Archive, ObjectiveVector};

/// Tolerance below which a Gram-Schmidt residual counts as degenerate.
const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("objective range is degenerate: anti-utopia equals utopia")]
    DegenerateRange,
    #[error("archive is empty")]
    EmptyArchive,
    #[error("distance must be nonnegative, got {0}")]
    NegativeDistance(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("influence parameter out of range: {0}")]
    InvalidParameter(String),
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal frame in objective space anchored at the utopia point.
///
/// `axes[0]` points from utopia towards anti-utopia; the remaining `p - 1`
/// axes span the projection hyperplane.
#[derive(Debug, Clone)]
pub struct ProjectionBasis {
    utopia: Vec<f64>,
    axes: Vec<Vec<f64>>,
}

impl ProjectionBasis {
    pub fn utopia(&self) -> &[f64] {
        &self.utopia
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    /// Coordinates of `f` on the projection hyperplane: the components of
    /// `f - utopia` along `axes[1..]`.
    pub fn project(&self, f: &ObjectiveVector) -> Result<Vec<f64>, GeometryError> {
        let p = self.utopia.len();
        if f.len() != p {
            return Err(GeometryError::DimensionMismatch {
                expected: p,
                actual: f.len(),
            });
        }
        let shifted: Vec<f64> = f
            .as_slice()
            .iter()
            .zip(&self.utopia)
            .map(|(v, g)| v - g)
            .collect();
        Ok(self.axes[1..].iter().map(|j| dot(&shifted, j)).collect())
    }
}

/// Builds the projection frame from the utopia point `g` (componentwise
/// minimum) and anti-utopia point `b` (componentwise maximum).
///
/// The first axis is the normalized range direction `b - g`. The rest come
/// from Gram-Schmidt over Cartesian unit vectors; a candidate whose residual
/// falls below `1e-12` is skipped in favor of the next untried unit vector,
/// and any remaining gap is filled with an orthonormal completion.
pub fn build_basis(g: &ObjectiveVector, b: &ObjectiveVector) -> Result<ProjectionBasis, GeometryError> {
    let p = g.len();
    if b.len() != p {
        return Err(GeometryError::DimensionMismatch {
            expected: p,
            actual: b.len(),
        });
    }
    let mut j1: Vec<f64> = b
        .as_slice()
        .iter()
        .zip(g.as_slice())
        .map(|(bi, gi)| bi - gi)
        .collect();
    let range_norm = norm(&j1);
    if range_norm < DEGENERACY_TOL {
        return Err(GeometryError::DegenerateRange);
    }
    j1.iter_mut().for_each(|c| *c /= range_norm);

    let mut axes = vec![j1];
    // Unit-vector pool starting from the second coordinate axis, wrapping
    // around to the first; once a candidate degenerates it stays discarded.
    let pool: Vec<usize> = (1..p).chain(std::iter::once(0)).collect();
    let mut tried = vec![false; p];
    while axes.len() < p {
        let mut appended = false;
        for &axis_idx in &pool {
            if tried[axis_idx] {
                continue;
            }
            let mut v = vec![0.0; p];
            v[axis_idx] = 1.0;
            for j in &axes {
                let c = dot(&v, j);
                v.iter_mut().zip(j).for_each(|(vi, ji)| *vi -= c * ji);
            }
            let r = norm(&v);
            tried[axis_idx] = true;
            if r >= DEGENERACY_TOL {
                v.iter_mut().for_each(|c| *c /= r);
                axes.push(v);
                appended = true;
                break;
            }
        }
        if !appended {
            complete_orthonormal(&mut axes, p);
            break;
        }
    }
    Ok(ProjectionBasis {
        utopia: g.as_slice().to_vec(),
        axes,
    })
}

/// Extends `axes` to a full orthonormal set with a fresh Gram-Schmidt scan
/// over all coordinate axes. While fewer than `p` axes exist, some unit
/// vector keeps a residual of at least `1/sqrt(p)`, so the scan always
/// finds the next axis.
fn complete_orthonormal(axes: &mut Vec<Vec<f64>>, p: usize) {
    while axes.len() < p {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for axis_idx in 0..p {
            let mut v = vec![0.0; p];
            v[axis_idx] = 1.0;
            for j in axes.iter() {
                let c = dot(&v, j);
                v.iter_mut().zip(j).for_each(|(vi, ji)| *vi -= c * ji);
            }
            let r = norm(&v);
            if best.as_ref().is_none_or(|(br, _)| r > *br) {
                best = Some((r, v));
            }
        }
        let (r, mut v) = best.expect("p >= 1");
        v.iter_mut().for_each(|c| *c /= r);
        axes.push(v);
    }
}

/// A projected archive member: hyperplane coordinates plus the index of the
/// archive entry it came from.
#[derive(Debug, Clone)]
pub struct ProjectedPoint {
    pub y: Vec<f64>,
    pub source_index: usize,
}

/// Decreasing influence of a neighbor at distance `d` on local density.
#[derive(Debug, Clone, PartialEq)]
pub enum DecreasingFunction {
    /// `1 - (d / sigma)^alpha` inside the radius `sigma`, zero beyond it.
    Sharing { sigma: f64, alpha: u32 },
    /// `exp(-d^2 / (2 sigma^2))`; never reaches zero.
    Gaussian { sigma: f64 },
}

impl Default for DecreasingFunction {
    fn default() -> Self {
        DecreasingFunction::Gaussian { sigma: 0.05 }
    }
}

impl DecreasingFunction {
    pub fn sharing(sigma: f64, alpha: u32) -> Result<Self, GeometryError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "sharing sigma must be positive, got {sigma}"
            )));
        }
        if alpha == 0 {
            return Err(GeometryError::InvalidParameter(
                "sharing alpha must be at least 1".to_string(),
            ));
        }
        Ok(DecreasingFunction::Sharing { sigma, alpha })
    }

    pub fn gaussian(sigma: f64) -> Result<Self, GeometryError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "gaussian sigma must be positive, got {sigma}"
            )));
        }
        Ok(DecreasingFunction::Gaussian { sigma })
    }

    /// Influence value at distance `d >= 0`; equals 1 at distance zero and
    /// decreases monotonically.
    pub fn phi(&self, d: f64) -> Result<f64, GeometryError> {
        if d.is_nan() || d < 0.0 {
            return Err(GeometryError::NegativeDistance(d));
        }
        Ok(match self {
            DecreasingFunction::Sharing { sigma, alpha } => {
                if d >= *sigma {
                    0.0
                } else {
                    1.0 - (d / sigma).powi(*alpha as i32)
                }
            }
            DecreasingFunction::Gaussian { sigma } => (-d * d / (2.0 * sigma * sigma)).exp(),
        })
    }
}

/// Crowding density at hyperplane point `y`: the summed influence of every
/// projected archive point. A point always contributes 1 at its own
/// projection.
pub fn density_at(
    projections: &[ProjectedPoint],
    fun: &DecreasingFunction,
    y: &[f64],
) -> Result<f64, GeometryError> {
    if projections.is_empty() {
        return Err(GeometryError::EmptyArchive);
    }
    let mut total = 0.0;
    for pt in projections {
        if pt.y.len() != y.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: y.len(),
                actual: pt.y.len(),
            });
        }
        let d = pt
            .y
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        total += fun.phi(d)?;
    }
    Ok(total)
}

fn objective_extremes(archive: &Archive) -> (Vec<f64>, Vec<f64>) {
    let p = archive.entry(0).f.len();
    let mut lo = vec![f64::INFINITY; p];
    let mut hi = vec![f64::NEG_INFINITY; p];
    for e in archive.iter() {
        for (i, v) in e.f.as_slice().iter().enumerate() {
            lo[i] = lo[i].min(*v);
            hi[i] = hi[i].max(*v);
        }
    }
    (lo, hi)
}

fn normalized_objectives(archive: &Archive, lo: &[f64], hi: &[f64]) -> Vec<ObjectiveVector> {
    archive
        .iter()
        .map(|e| {
            let vals: Vec<f64> = e
                .f
                .as_slice()
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (&l, &h))| {
                    let span = h - l;
                    if span > DEGENERACY_TOL {
                        (v - l) / span
                    } else {
                        0.0
                    }
                })
                .collect();
            ObjectiveVector::new(vals).expect("normalized objectives are finite")
        })
        .collect()
}

/// Projects every archive entry onto the hyperplane of `basis`.
pub fn project_archive(
    archive: &Archive,
    basis: &ProjectionBasis,
) -> Result<Vec<ProjectedPoint>, GeometryError> {
    archive
        .iter()
        .enumerate()
        .map(|(source_index, e)| {
            Ok(ProjectedPoint {
                y: basis.project(&e.f)?,
                source_index,
            })
        })
        .collect()
}

fn archive_projections(
    archive: &Archive,
    normalize: bool,
) -> Result<Option<(ProjectionBasis, Vec<ProjectedPoint>)>, GeometryError> {
    let (lo, hi) = objective_extremes(archive);
    let objectives: Vec<ObjectiveVector> = if normalize {
        normalized_objectives(archive, &lo, &hi)
    } else {
        archive.iter().map(|e| e.f.clone()).collect()
    };
    let mut g = vec![f64::INFINITY; lo.len()];
    let mut b = vec![f64::NEG_INFINITY; lo.len()];
    for f in &objectives {
        for (i, v) in f.as_slice().iter().enumerate() {
            g[i] = g[i].min(*v);
            b[i] = b[i].max(*v);
        }
    }
    let g = ObjectiveVector::new(g).expect("extremes are finite");
    let b = ObjectiveVector::new(b).expect("extremes are finite");
    let basis = match build_basis(&g, &b) {
        Ok(basis) => basis,
        Err(GeometryError::DegenerateRange) => return Ok(None),
        Err(e) => return Err(e),
    };
    let projections = objectives
        .iter()
        .enumerate()
        .map(|(source_index, f)| {
            Ok(ProjectedPoint {
                y: basis.project(f)?,
                source_index,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some((basis, projections)))
}

/// Picks the archive index with the lowest crowding density; ties resolve
/// to the lowest insertion index. With `normalize` set, objectives are
/// min-max scaled over the archive before projection.
///
/// A degenerate objective range (all entries coincide) falls back to the
/// first entry, which matches the tie-break.
pub fn select_reference(
    archive: &Archive,
    fun: &DecreasingFunction,
    normalize: bool,
) -> Result<usize, GeometryError> {
    let all: Vec<usize> = (0..archive.len()).collect();
    select_reference_among(archive, fun, normalize, &all)
}

/// [`select_reference`] restricted to the entries listed in `candidates`.
///
/// Density is still computed over the whole archive, so crowding by
/// non-candidate neighbors counts; only the argmin is restricted. Used by
/// the driver to skip references whose radius already converged.
pub fn select_reference_among(
    archive: &Archive,
    fun: &DecreasingFunction,
    normalize: bool,
    candidates: &[usize],
) -> Result<usize, GeometryError> {
    if archive.is_empty() || candidates.is_empty() {
        return Err(GeometryError::EmptyArchive);
    }
    debug_assert!(candidates.iter().all(|&i| i < archive.len()));
    if archive.len() == 1 {
        return Ok(0);
    }
    let Some((_, projections)) = archive_projections(archive, normalize)? else {
        return Ok(candidates[0]);
    };
    let mut best = None;
    let mut best_density = f64::INFINITY;
    for &index in candidates {
        let d = density_at(&projections, fun, &projections[index].y)?;
        if d < best_density {
            best_density = d;
            best = Some(index);
        }
    }
    Ok(best.expect("candidates is nonempty"))
}

/// Tabulated density over the projection hyperplane, for plotting.
///
/// One dimension is sampled on a 201-point line, two dimensions on a 61x61
/// grid; higher dimensions tabulate only at the projected archive points.
#[derive(Debug, Clone)]
pub struct DensitySurface {
    /// Hyperplane dimension (`p - 1`).
    pub dim: usize,
    /// Rows of `dim` hyperplane coordinates followed by the density value.
    pub rows: Vec<Vec<f64>>,
}

impl DensitySurface {
    /// CSV with header `y_1,..,y_dim,density`.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("y_{j}")).collect();
        header.push("density".to_string());
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

fn axis_range(projections: &[ProjectedPoint], axis: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for pt in projections {
        lo = lo.min(pt.y[axis]);
        hi = hi.max(pt.y[axis]);
    }
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.05 * span, hi + 0.05 * span)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Samples the density function over the projection hyperplane of the
/// archive, using the same influence function and normalization switch as
/// reference selection.
pub fn density_surface(
    archive: &Archive,
    fun: &DecreasingFunction,
    normalize: bool,
) -> Result<DensitySurface, GeometryError> {
    if archive.is_empty() {
        return Err(GeometryError::EmptyArchive);
    }
    let dim = archive.entry(0).f.len() - 1;
    let Some((_, projections)) = archive_projections(archive, normalize)? else {
        return Ok(DensitySurface {
            dim,
            rows: vec![vec![0.0; dim + 1]],
        });
    };
    let mut rows = Vec::new();
    match dim {
        1 => {
            let (lo, hi) = axis_range(&projections, 0);
            let steps = 200usize;
            for i in 0..=steps {
                let y = lo + (hi - lo) * (i as f64) / (steps as f64);
                let d = density_at(&projections, fun, &[y])?;
                rows.push(vec![y, d]);
            }
        }
        2 => {
            let (lo0, hi0) = axis_range(&projections, 0);
            let (lo1, hi1) = axis_range(&projections, 1);
            let steps = 60usize;
            for i in 0..=steps {
                let y0 = lo0 + (hi0 - lo0) * (i as f64) / (steps as f64);
                for j in 0..=steps {
                    let y1 = lo1 + (hi1 - lo1) * (j as f64) / (steps as f64);
                    let d = density_at(&projections, fun, &[y0, y1])?;
                    rows.push(vec![y0, y1, d]);
                }
            }
        }
        _ => {
            for pt in &projections {
                let d = density_at(&projections, fun, &pt.y)?;
                let mut row = pt.y.clone();
                row.push(d);
                rows.push(row);
            }
        }
    }
    Ok(DensitySurface { dim, rows })
}
