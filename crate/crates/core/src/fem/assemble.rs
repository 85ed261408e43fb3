//! Element-by-element assembly with mass lumping.

use rayon::prelude::*;

use crate::mesh::{cross3, dot3, norm3, sub3, TriangleMesh};
use crate::scalar::Real;
use crate::solver::CsrMatrix;

use super::{AnisotropyParams, FemError, FemOperators};

/// Orthonormal tangent frame `(e1, e2)` of triangle `t`.
///
/// With a chart, `e1` is the normalized in-plane gradient of the first chart
/// coordinate (periodic coordinates unwrapped across the seam) and
/// `e2 = n̂ × e1`, `n̂` the unit normal from the vertex order. Without a chart,
/// `e1` follows the first edge.
pub fn triangle_frame<T: Real>(mesh: &TriangleMesh<T>, t: usize) -> Result<([T; 3], [T; 3]), FemError> {
    let tri = mesh.triangles()[t];
    let [p0, p1, p2] = tri.map(|i| mesh.vertices()[i]);
    let (a, b) = (sub3(p1, p0), sub3(p2, p0));
    let n = cross3(a, b);
    let nn = norm3(n);
    let n = n.map(|x| x / nn);
    let e1 = match mesh.chart() {
        Some(chart) => {
            let f0 = chart.coords[tri[0]][0];
            let f1 = f0 + chart.wrapped_delta(0, f0, chart.coords[tri[1]][0]);
            let f2 = f0 + chart.wrapped_delta(0, f0, chart.coords[tri[2]][0]);
            // Gradient of the linear interpolant: solve the 2×2 Gram system.
            let (aa, ab, bb) = (dot3(a, a), dot3(a, b), dot3(b, b));
            let det = aa * bb - ab * ab;
            let (g1, g2) = (f1 - f0, f2 - f0);
            let ca = (bb * g1 - ab * g2) / det;
            let cb = (aa * g2 - ab * g1) / det;
            [0, 1, 2].map(|d| ca * a[d] + cb * b[d])
        }
        None => a,
    };
    let len = norm3(e1);
    if !(len > T::zero()) || !len.is_finite() {
        return Err(FemError::ChartFrame { triangle: t });
    }
    let e1 = e1.map(|x| x / len);
    let e2 = cross3(n, e1);
    Ok((e1, e2))
}

/// Area and stiffness of the flat triangle with planar vertices `x`.
pub fn element_stiffness<T: Real>(x: [[T; 2]; 3]) -> (T, [[T; 3]; 3]) {
    let b = [x[1][1] - x[2][1], x[2][1] - x[0][1], x[0][1] - x[1][1]];
    let c = [x[2][0] - x[1][0], x[0][0] - x[2][0], x[1][0] - x[0][0]];
    let area = ((x[1][0] - x[0][0]) * (x[2][1] - x[0][1]) - (x[2][0] - x[0][0]) * (x[1][1] - x[0][1])).abs()
        * T::lit(0.5);
    let mut k = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (T::lit(4.0) * area);
        }
    }
    (area, k)
}

/// Assembles `M`, `F`, `S`, `Q`, `φ0`; triangles are mapped by `T = D⁻¹Rᵀ`
/// in their chart-induced frame when `aniso` is given.
pub fn assemble<T: Real>(mesh: &TriangleMesh<T>, aniso: Option<&AnisotropyParams<T>>) -> Result<FemOperators<T>, FemError> {
    if aniso.is_some() && mesh.chart().is_none() {
        return Err(FemError::MissingChart);
    }
    let m = mesh.num_vertices();
    let nt = mesh.num_triangles();
    let mean_area = mesh.total_area() / T::from_count(nt);
    let transform = aniso.map(AnisotropyParams::transform);

    let elements: Vec<(T, [[T; 3]; 3])> = (0..nt)
        .into_par_iter()
        .map(|t| {
            let tri = mesh.triangles()[t];
            let (e1, e2) = if aniso.is_some() {
                triangle_frame(mesh, t)?
            } else {
                frame_without_chart(mesh, t)?
            };
            let p0 = mesh.vertices()[tri[0]];
            let mut x = [[T::zero(); 2]; 3];
            for k in 0..3 {
                let d = sub3(mesh.vertices()[tri[k]], p0);
                let xi = [dot3(d, e1), dot3(d, e2)];
                x[k] = match &transform {
                    Some(tm) => [tm[0][0] * xi[0] + tm[0][1] * xi[1], tm[1][0] * xi[0] + tm[1][1] * xi[1]],
                    None => xi,
                };
            }
            let (area, k) = element_stiffness(x);
            if !(area >= T::lit(1e-14) * mean_area) {
                return Err(FemError::DegenerateElement { triangle: t, area: area.as_f64() });
            }
            Ok((area, k))
        })
        .collect::<Result<_, _>>()?;

    let mut mass = vec![T::zero(); m];
    let mut trip = Vec::with_capacity(9 * nt);
    for (tri, (area, k)) in mesh.triangles().iter().zip(&elements) {
        let third = *area / T::lit(3.0);
        for i in 0..3 {
            mass[tri[i]] += third;
            for j in 0..3 {
                trip.push((tri[i], tri[j], k[i][j]));
            }
        }
    }
    let stiffness = CsrMatrix::from_triplets(m, m, &trip);
    Ok(FemOperators::from_parts(mass, stiffness))
}

fn frame_without_chart<T: Real>(mesh: &TriangleMesh<T>, t: usize) -> Result<([T; 3], [T; 3]), FemError> {
    let tri = mesh.triangles()[t];
    let [p0, p1, p2] = tri.map(|i| mesh.vertices()[i]);
    let (a, b) = (sub3(p1, p0), sub3(p2, p0));
    let n = cross3(a, b);
    let (na, nn) = (norm3(a), norm3(n));
    if !(na > T::zero()) || !(nn > T::zero()) {
        return Err(FemError::DegenerateElement { triangle: t, area: (nn * T::lit(0.5)).as_f64() });
    }
    let e1 = a.map(|x| x / na);
    let e2 = cross3(n.map(|x| x / nn), e1);
    Ok((e1, e2))
}
