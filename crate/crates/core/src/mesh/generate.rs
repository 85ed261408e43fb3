//! Latitude–longitude spheres and open cylinders on regular chart grids.

use crate::scalar::Real;

use super::{Chart, MeshError, TriangleMesh};

/// Number of steps of size `step` in `range`, if it divides exactly.
fn divisions(range: f64, step: f64, what: &str) -> Result<usize, MeshError> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(MeshError::InvalidInput(format!("{what} must be positive, got {step}")));
    }
    let k = (range / step).round();
    if k < 1.0 || ((k * step - range).abs() > 1e-9 * range) {
        return Err(MeshError::InvalidInput(format!("{what} {step} does not divide {range}")));
    }
    Ok(k as usize)
}

/// Sphere whose nodes sit on the `lat_step × lon_step` degree grid; the poles
/// are single vertices joined by triangle fans.
///
/// Chart coordinates are `(θ, φ)` = (colatitude, longitude) in radians, with
/// the poles at `φ = 0`. Triangles are oriented with outward normals, which
/// makes `(θ, φ)` a right-handed chart.
pub fn generate_sphere_mesh<T: Real>(lat_step: f64, lon_step: f64, radius: f64) -> Result<TriangleMesh<T>, MeshError> {
    if !(lat_step <= 90.0) || !(lon_step <= 180.0) {
        return Err(MeshError::InvalidInput("latitude step must be ≤ 90 and longitude step ≤ 180".into()));
    }
    if !(radius > 0.0) {
        return Err(MeshError::InvalidInput("radius must be positive".into()));
    }
    let nlat = divisions(180.0, lat_step, "latitude step")?;
    let nlon = divisions(360.0, lon_step, "longitude step")?;
    let rings = nlat - 1;
    let pi = std::f64::consts::PI;

    let mut vertices = Vec::with_capacity(2 + rings * nlon);
    let mut coords = Vec::with_capacity(vertices.capacity());
    vertices.push([0.0, 0.0, radius]);
    coords.push([0.0, 0.0]);
    for i in 1..=rings {
        let theta = (i as f64) * lat_step.to_radians();
        for j in 0..nlon {
            let phi = (j as f64) * lon_step.to_radians();
            vertices.push([
                radius * theta.sin() * phi.cos(),
                radius * theta.sin() * phi.sin(),
                radius * theta.cos(),
            ]);
            coords.push([theta, phi]);
        }
    }
    let south = vertices.len();
    vertices.push([0.0, 0.0, -radius]);
    coords.push([pi, 0.0]);

    let ring = |i: usize, j: usize| 1 + (i - 1) * nlon + (j % nlon);
    let mut triangles = Vec::with_capacity(2 * nlon * (nlat - 1));
    for j in 0..nlon {
        triangles.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..rings {
        for j in 0..nlon {
            let (a, b, c, d) = (ring(i, j), ring(i + 1, j), ring(i, j + 1), ring(i + 1, j + 1));
            triangles.push([a, b, c]);
            triangles.push([b, d, c]);
        }
    }
    for j in 0..nlon {
        triangles.push([ring(rings, j), south, ring(rings, j + 1)]);
    }

    let chart = Chart {
        coords: coords.into_iter().map(|c| c.map(T::lit)).collect(),
        bounds: [[T::zero(), T::lit(pi)], [T::zero(), T::lit(2.0 * pi)]],
        periodic: [false, true],
    };
    TriangleMesh::new(vertices.into_iter().map(|v| v.map(T::lit)).collect(), triangles)?.with_chart(chart)
}

/// Open cylinder of the given radius and height (no caps), nodes on the
/// `theta_step` (degrees) × `z_step` grid.
///
/// Chart coordinates are `(θ, z)`; triangles are oriented with outward normals.
pub fn generate_cylinder_mesh<T: Real>(
    theta_step: f64,
    z_step: f64,
    radius: f64,
    height: f64,
) -> Result<TriangleMesh<T>, MeshError> {
    if !(radius > 0.0) || !(height > 0.0) {
        return Err(MeshError::InvalidInput("radius and height must be positive".into()));
    }
    let nt = divisions(360.0, theta_step, "theta step")?;
    if nt < 3 {
        return Err(MeshError::InvalidInput("theta step must give at least 3 nodes per ring".into()));
    }
    let nz = divisions(height, z_step, "z step")?;
    let mut vertices = Vec::with_capacity(nt * (nz + 1));
    let mut coords = Vec::with_capacity(vertices.capacity());
    for k in 0..=nz {
        let z = (k as f64) * z_step;
        for j in 0..nt {
            let theta = (j as f64) * theta_step.to_radians();
            vertices.push([radius * theta.cos(), radius * theta.sin(), z]);
            coords.push([theta, z]);
        }
    }
    let idx = |j: usize, k: usize| k * nt + (j % nt);
    let mut triangles = Vec::with_capacity(2 * nt * nz);
    for k in 0..nz {
        for j in 0..nt {
            let (a, b, c, d) = (idx(j, k), idx(j + 1, k), idx(j, k + 1), idx(j + 1, k + 1));
            triangles.push([a, b, c]);
            triangles.push([b, d, c]);
        }
    }
    let chart = Chart {
        coords: coords.into_iter().map(|c| c.map(T::lit)).collect(),
        bounds: [[T::zero(), T::lit(2.0 * std::f64::consts::PI)], [T::zero(), T::lit(height)]],
        periodic: [true, false],
    };
    TriangleMesh::new(vertices.into_iter().map(|v| v.map(T::lit)).collect(), triangles)?.with_chart(chart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::dot3;

    #[test]
    fn coarse_sphere_is_octahedron() {
        let m = generate_sphere_mesh::<f64>(90.0, 90.0, 1.0).unwrap();
        assert_eq!(m.num_vertices(), 6);
        assert_eq!(m.num_triangles(), 8);
        assert!(m.is_closed());
        let area = m.total_area();
        assert!((area - 4.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sphere_vertex_counts() {
        assert_eq!(generate_sphere_mesh::<f64>(1.5, 1.5, 1.0).unwrap().num_vertices(), 28_562);
        assert_eq!(generate_sphere_mesh::<f64>(15.0, 15.0, 1.0).unwrap().num_vertices(), 266);
    }

    #[test]
    fn sphere_normals_point_outward() {
        let m = generate_sphere_mesh::<f64>(30.0, 45.0, 2.0).unwrap();
        for (t, tri) in m.triangles().iter().enumerate() {
            let c = tri.iter().fold([0.0; 3], |acc, &i| {
                let v = m.vertices()[i];
                [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]]
            });
            assert!(dot3(m.triangle_normal(t), c) > 0.0);
        }
    }

    #[test]
    fn rejects_non_dividing_steps() {
        assert!(generate_sphere_mesh::<f64>(7.0, 10.0, 1.0).is_err());
        assert!(generate_cylinder_mesh::<f64>(7.0, 0.5, 1.0, 20.0).is_err());
        assert!(generate_cylinder_mesh::<f64>(5.0, 0.3, 1.0, 20.0).is_err());
    }

    #[test]
    fn small_cylinder_enumeration() {
        let m = generate_cylinder_mesh::<f64>(120.0, 10.0, 1.0, 20.0).unwrap();
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_triangles(), 12);
        assert_eq!(m.boundary_loops(), 2);
        for (a, b) in m.boundary_edges() {
            let (za, zb) = (m.vertices()[a][2], m.vertices()[b][2]);
            assert_eq!(za, zb);
            assert!(za == 0.0 || za == 20.0);
        }
    }

    #[test]
    fn cylinder_count_and_area() {
        let m = generate_cylinder_mesh::<f64>(5.0, 0.5, 1.0, 20.0).unwrap();
        assert_eq!(m.num_vertices(), 2952);
        let exact = 2.0 * std::f64::consts::PI * 20.0;
        let deficit = (std::f64::consts::PI * 5.0 / 360.0).cos();
        let area = m.total_area();
        assert!(area <= exact && area >= exact * deficit * (1.0 - 1e-12));
    }
}
