use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ExtractionParams, GeometryError, Plane, SurfaceMesh, Vec3};

/// Rounds of least-squares refinement applied to each accepted candidate.
const REFINE_ROUNDS: usize = 3;

/// An extracted plane together with the scan triangles it claimed.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSegment {
    pub plane: Plane,
    pub inliers: Vec<usize>,
}

struct TriInfo {
    normal: Vec3,
    area: f64,
    centroid: Vec3,
}

struct Ransac<'a> {
    mesh: &'a SurfaceMesh,
    tris: Vec<TriInfo>,
    dist_tol: f64,
    cos_tol: f64,
}

impl Ransac<'_> {
    fn is_inlier(&self, t: usize, normal: &Vec3, offset: f64) -> bool {
        let info = &self.tris[t];
        if info.normal.dot(normal).abs() < self.cos_tol {
            return false;
        }
        let v = self.mesh.vertices();
        self.mesh.triangles()[t]
            .iter()
            .all(|&i| (normal.dot(&v[i]) - offset).abs() <= self.dist_tol)
    }

    fn inliers(&self, active: &[usize], normal: &Vec3, offset: f64) -> Vec<usize> {
        active
            .iter()
            .copied()
            .filter(|&t| self.is_inlier(t, normal, offset))
            .collect()
    }

    fn score(&self, active: &[usize], normal: &Vec3, offset: f64) -> f64 {
        active
            .iter()
            .filter(|&&t| self.is_inlier(t, normal, offset))
            .map(|&t| self.tris[t].area)
            .sum()
    }

    /// Area-weighted total least squares over the inlier vertices. Each triangle
    /// spreads its area equally over its three corners. The normal is oriented
    /// along the mean inlier triangle normal.
    fn fit(&self, inliers: &[usize]) -> Option<(Vec3, f64, Vec3)> {
        let v = self.mesh.vertices();
        let mut weight = 0.0;
        let mut centroid = Vec3::zeros();
        let mut mean_normal = Vec3::zeros();
        for &t in inliers {
            let info = &self.tris[t];
            weight += info.area;
            centroid += info.centroid * info.area;
            mean_normal += info.normal * info.area;
        }
        if weight <= 0.0 {
            return None;
        }
        centroid /= weight;
        let mut cov = Matrix3::zeros();
        for &t in inliers {
            let w = self.tris[t].area / 3.0;
            for &i in &self.mesh.triangles()[t] {
                let d = v[i] - centroid;
                cov += d * d.transpose() * w;
            }
        }
        let eig = SymmetricEigen::new(cov);
        let k = eig.eigenvalues.imin();
        let mut normal: Vec3 = eig.eigenvectors.column(k).into_owned().normalize();
        if normal.dot(&mean_normal) < 0.0 {
            normal = -normal;
        }
        Some((normal, normal.dot(&centroid), centroid))
    }
}

/// Extracts dominant planes, sorted by inlier area (largest first).
pub fn extract_planes(mesh: &SurfaceMesh, params: &ExtractionParams) -> Result<Vec<Plane>, GeometryError> {
    Ok(extract_plane_segments(mesh, params)?
        .into_iter()
        .map(|s| s.plane)
        .collect())
}

/// Same as [`extract_planes`] but keeps the inlier triangle indices of each plane.
pub fn extract_plane_segments(
    mesh: &SurfaceMesh,
    params: &ExtractionParams,
) -> Result<Vec<PlaneSegment>, GeometryError> {
    if mesh.is_empty() {
        return Err(GeometryError::EmptyScan);
    }
    validate(params)?;

    let v = mesh.vertices();
    let tris = mesh
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            let cross = (v[b] - v[a]).cross(&(v[c] - v[a]));
            let norm = cross.norm();
            TriInfo {
                normal: cross / norm,
                area: 0.5 * norm,
                centroid: (v[a] + v[b] + v[c]) / 3.0,
            }
        })
        .collect();
    let ransac = Ransac {
        mesh,
        tris,
        dist_tol: params.dist_tol,
        cos_tol: params.angle_tol.to_radians().cos(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut active: Vec<usize> = (0..mesh.triangles().len()).collect();
    let mut segments = Vec::new();

    while segments.len() < params.max_planes && !active.is_empty() {
        let mut best: Option<(f64, usize)> = None;
        for _ in 0..params.candidates {
            let t = active[rng.random_range(0..active.len())];
            let info = &ransac.tris[t];
            let score = ransac.score(&active, &info.normal, info.normal.dot(&info.centroid));
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, t));
            }
        }
        let Some((_, seed_tri)) = best else { break };

        let seed_info = &ransac.tris[seed_tri];
        let mut normal = seed_info.normal;
        let mut offset = normal.dot(&seed_info.centroid);
        let mut centroid = seed_info.centroid;
        let mut inliers = ransac.inliers(&active, &normal, offset);
        for _ in 0..REFINE_ROUNDS {
            let Some((n, d, c)) = ransac.fit(&inliers) else { break };
            let refit = ransac.inliers(&active, &n, d);
            if refit.is_empty() {
                break;
            }
            (normal, offset, centroid) = (n, d, c);
            inliers = refit;
        }

        let area: f64 = inliers.iter().map(|&t| ransac.tris[t].area).sum();
        if area < params.min_area {
            break;
        }
        active.retain(|t| inliers.binary_search(t).is_err());
        segments.push(PlaneSegment {
            plane: Plane {
                normal,
                offset,
                inlier_area: area,
                inlier_count: inliers.len(),
                centroid,
            },
            inliers,
        });
    }

    if segments.is_empty() {
        return Err(GeometryError::NoPlanesFound {
            min_area: params.min_area,
        });
    }
    segments.sort_by(|a, b| b.plane.inlier_area.total_cmp(&a.plane.inlier_area));
    Ok(segments)
}

fn validate(p: &ExtractionParams) -> Result<(), GeometryError> {
    let bad = |msg: &str| Err(GeometryError::InvalidParameter(msg.into()));
    if !(p.dist_tol > 0.0 && p.dist_tol.is_finite()) {
        return bad("dist_tol must be positive");
    }
    if !(p.angle_tol > 0.0 && p.angle_tol < 90.0) {
        return bad("angle_tol must lie in (0, 90) degrees");
    }
    if !(p.min_area >= 0.0 && p.min_area.is_finite()) {
        return bad("min_area must be non-negative");
    }
    if p.max_planes == 0 {
        return bad("max_planes must be at least 1");
    }
    if p.candidates == 0 {
        return bad("candidates must be at least 1");
    }
    Ok(())
}
