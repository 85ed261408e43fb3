//! Triangulated surfaces, generators, OFF input/output, observation binding
//! and maximin node designs.

mod design;
mod generate;
mod observations;
mod off;

pub use design::{maximin_lhs, maximin_node_design, min_pairwise_chart_distance, DesignOptions};
pub use generate::{generate_cylinder_mesh, generate_sphere_mesh};
pub use observations::{
    bind_observations, bind_observations_with_tolerance, closest_point_on_triangle, BoundObservations, Locations,
    ObservationSet, Scenario,
};
pub use off::{load_mesh, parse_off, read_off, save_mesh, write_off};

use std::collections::HashMap;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed OFF header: {0}")]
    MalformedHeader(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("triangle {triangle} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange { triangle: usize, index: usize, count: usize },
    #[error("degenerate triangle {triangle}: repeated vertex")]
    DegenerateTriangle { triangle: usize },
    #[error("triangle {triangle} has zero area")]
    ZeroArea { triangle: usize },
    #[error("vertex {vertex} belongs to no triangle")]
    IsolatedVertex { vertex: usize },
    #[error("edge ({a}, {b}) is shared by {count} triangles")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("mesh is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("chart has {found} entries for {expected} vertices")]
    ChartSize { expected: usize, found: usize },
    #[error("mesh has no chart coordinates")]
    MissingChart,
    #[error("observation error: {0}")]
    Observation(String),
    #[error("observation {index} lies {distance:e} from the surface (tolerance {tolerance:e})")]
    Binding { index: usize, distance: f64, tolerance: f64 },
    #[error("design error: {0}")]
    Design(String),
}

/// 2-D parametrization attached to the vertices of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart<T> {
    pub coords: Vec<[T; 2]>,
    /// Closed rectangle `[lo, hi]` per coordinate; periodic coordinates wrap
    /// with period `hi − lo`.
    pub bounds: [[T; 2]; 2],
    pub periodic: [bool; 2],
}

impl<T: Real> Chart<T> {
    pub fn period(&self, d: usize) -> Option<T> {
        self.periodic[d].then(|| self.bounds[d][1] - self.bounds[d][0])
    }

    /// Shortest-arc difference `b − a` along coordinate `d`.
    pub fn wrapped_delta(&self, d: usize, a: T, b: T) -> T {
        let mut delta = b - a;
        if let Some(p) = self.period(d) {
            let half = p * T::lit(0.5);
            while delta > half {
                delta -= p;
            }
            while delta < -half {
                delta += p;
            }
        }
        delta
    }

    pub fn distance(&self, a: [T; 2], b: [T; 2]) -> T {
        let dx = self.wrapped_delta(0, a[0], b[0]);
        let dy = self.wrapped_delta(1, a[1], b[1]);
        (dx * dx + dy * dy).sqrt()
    }
}

/// Triangulated surface embedded in 3-D.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh<T> {
    vertices: Vec<[T; 3]>,
    triangles: Vec<[usize; 3]>,
    chart: Option<Chart<T>>,
}

pub(crate) fn sub3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm3<T: Real>(a: [T; 3]) -> T {
    dot3(a, a).sqrt()
}

impl<T: Real> TriangleMesh<T> {
    /// Builds and validates a mesh.
    pub fn new(vertices: Vec<[T; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let mesh = Self { vertices, triangles, chart: None };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn with_chart(mut self, chart: Chart<T>) -> Result<Self, MeshError> {
        if chart.coords.len() != self.vertices.len() {
            return Err(MeshError::ChartSize { expected: self.vertices.len(), found: chart.coords.len() });
        }
        self.chart = Some(chart);
        Ok(self)
    }

    pub fn vertices(&self) -> &[[T; 3]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn chart(&self) -> Option<&Chart<T>> {
        self.chart.as_ref()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Unnormalized normal `(b − a) × (c − a)`; its length is twice the area.
    pub fn triangle_normal(&self, t: usize) -> [T; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        cross3(sub3(b, a), sub3(c, a))
    }

    pub fn triangle_area(&self, t: usize) -> T {
        norm3(self.triangle_normal(t)) * T::lit(0.5)
    }

    pub fn total_area(&self) -> T {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn bounding_box_diagonal(&self) -> T {
        let mut lo = [T::max_value().unwrap(); 3];
        let mut hi = [T::min_value().unwrap(); 3];
        for v in &self.vertices {
            for d in 0..3 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        norm3(sub3(hi, lo))
    }

    /// Undirected edges with the number of incident triangles.
    pub fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.edge_counts().into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
        out.sort_unstable();
        out
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_edges().is_empty()
    }

    /// Number of connected components of the boundary edge graph.
    pub fn boundary_loops(&self) -> usize {
        let edges = self.boundary_edges();
        let mut uf = UnionFind::new(self.vertices.len());
        let mut touched = vec![false; self.vertices.len()];
        for &(a, b) in &edges {
            uf.union(a, b);
            touched[a] = true;
            touched[b] = true;
        }
        let mut roots: Vec<usize> = (0..self.vertices.len()).filter(|&v| touched[v]).map(|v| uf.find(v)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Same surface with vertex coordinates multiplied by `c` (chart untouched).
    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        out.vertices.iter_mut().for_each(|v| v.iter_mut().for_each(|x| *x *= c));
        out
    }

    /// Relabels vertices: new vertex `k` is old vertex `order[k]`.
    pub fn relabeled(&self, order: &[usize]) -> Result<Self, MeshError> {
        let m = self.vertices.len();
        let mut inv = vec![usize::MAX; m];
        for (k, &old) in order.iter().enumerate() {
            if old >= m || inv[old] != usize::MAX {
                return Err(MeshError::InvalidInput("relabeling is not a permutation".into()));
            }
            inv[old] = k;
        }
        if order.len() != m {
            return Err(MeshError::InvalidInput("relabeling is not a permutation".into()));
        }
        let vertices = order.iter().map(|&i| self.vertices[i]).collect();
        let triangles = self.triangles.iter().map(|t| t.map(|i| inv[i])).collect();
        let chart = self.chart.as_ref().map(|c| Chart {
            coords: order.iter().map(|&i| c.coords[i]).collect(),
            bounds: c.bounds,
            periodic: c.periodic,
        });
        Ok(Self { vertices, triangles, chart })
    }

    /// Checks index ranges, degeneracy, manifold edges and connectivity.
    pub fn validate(&self) -> Result<(), MeshError> {
        let m = self.vertices.len();
        if m == 0 || self.triangles.is_empty() {
            return Err(MeshError::InvalidInput("mesh needs at least one triangle".into()));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            for &i in tri {
                if i >= m {
                    return Err(MeshError::IndexOutOfRange { triangle: t, index: i, count: m });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
            if !(self.triangle_area(t) > T::zero()) {
                return Err(MeshError::ZeroArea { triangle: t });
            }
        }
        let mut used = vec![false; m];
        self.triangles.iter().flatten().for_each(|&i| used[i] = true);
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(MeshError::IsolatedVertex { vertex: v });
        }
        let edges = self.edge_counts();
        let mut bad: Vec<_> = edges.iter().filter(|&(_, &c)| c > 2).collect();
        bad.sort_unstable();
        if let Some((&(a, b), &count)) = bad.first() {
            return Err(MeshError::NonManifoldEdge { a, b, count });
        }
        let components = self.triangle_components();
        if components != 1 {
            return Err(MeshError::Disconnected { components });
        }
        Ok(())
    }

    /// Connected components of the triangle graph (triangles adjacent through an edge).
    fn triangle_components(&self) -> usize {
        let nt = self.triangles.len();
        let mut uf = UnionFind::new(nt);
        let mut first: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                match first.entry((a.min(b), a.max(b))) {
                    std::collections::hash_map::Entry::Occupied(e) => uf.union(*e.get(), t),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(t);
                    }
                }
            }
        }
        let mut roots: Vec<usize> = (0..nt).map(|t| uf.find(t)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
