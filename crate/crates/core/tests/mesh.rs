mod common;

use common::{barycentric_points, tetrahedron};
use manifold_splines::mesh::{
    bind_observations, generate_cylinder_mesh, generate_sphere_mesh, load_mesh, maximin_lhs, maximin_node_design,
    min_pairwise_chart_distance, parse_off, save_mesh, DesignOptions, MeshError, ObservationSet, Scenario, TriangleMesh,
};
use proptest::prelude::*;

fn euler_characteristic(mesh: &TriangleMesh<f64>) -> i64 {
    mesh.num_vertices() as i64 - mesh.edge_counts().len() as i64 + mesh.num_triangles() as i64
}

#[test]
fn sphere_mesh_topology() {
    let mesh = generate_sphere_mesh::<f64>(15.0, 20.0, 2.0).unwrap();
    assert_eq!(mesh.num_vertices(), 2 + 11 * 18);
    assert_eq!(mesh.num_triangles(), 2 * 18 * 11);
    assert!(mesh.is_closed());
    assert_eq!(euler_characteristic(&mesh), 2);
    for v in mesh.vertices() {
        assert!(((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - 2.0).abs() < 1e-12);
    }
    // Outward normals.
    for t in 0..mesh.num_triangles() {
        let tri = mesh.triangles()[t];
        let c: Vec<f64> = (0..3).map(|d| tri.iter().map(|&i| mesh.vertices()[i][d]).sum::<f64>()).collect();
        let n = mesh.triangle_normal(t);
        assert!(n[0] * c[0] + n[1] * c[1] + n[2] * c[2] > 0.0, "triangle {t}");
    }
    // Inscribed polyhedron: area below the sphere's.
    let a = mesh.total_area();
    assert!(a < 16.0 * std::f64::consts::PI && a > 0.95 * 16.0 * std::f64::consts::PI);
}

#[test]
fn cylinder_mesh_topology() {
    let mesh = generate_cylinder_mesh::<f64>(30.0, 0.5, 1.5, 4.0).unwrap();
    assert_eq!(mesh.num_vertices(), 12 * 9);
    assert_eq!(mesh.boundary_loops(), 2);
    assert_eq!(euler_characteristic(&mesh), 0);
    let chart = mesh.chart().unwrap();
    assert_eq!(chart.period(0), Some(2.0 * std::f64::consts::PI));
    assert_eq!(chart.period(1), None);
    for (v, c) in mesh.vertices().iter().zip(&chart.coords) {
        assert!((v[0] - 1.5 * c[0].cos()).abs() < 1e-12 && (v[1] - 1.5 * c[0].sin()).abs() < 1e-12);
        assert!((v[2] - c[1]).abs() < 1e-12);
    }
}

#[test]
fn steps_must_divide_the_range() {
    assert!(generate_sphere_mesh::<f64>(7.0, 10.0, 1.0).is_err());
    assert!(generate_cylinder_mesh::<f64>(10.0, 0.3, 1.0, 1.0).is_err());
    assert!(generate_sphere_mesh::<f64>(10.0, 10.0, -1.0).is_err());
}

#[test]
fn off_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.off");
    let mesh = generate_sphere_mesh::<f64>(30.0, 30.0, 1.0).unwrap();
    save_mesh(&mesh, &path).unwrap();
    let back = load_mesh::<f64>(&path).unwrap();
    assert_eq!(back.triangles(), mesh.triangles());
    for (a, b) in back.vertices().iter().zip(mesh.vertices()) {
        for d in 0..3 {
            assert!((a[d] - b[d]).abs() <= 1e-15 * (1.0 + b[d].abs()));
        }
    }
}

#[test]
fn off_errors_are_located() {
    let bad_count = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n";
    assert!(parse_off::<f64>(bad_count).is_err());
    let bad_number = "OFF\n3 1 0\n0 0 0\n1 x 0\n0 1 0\n3 0 1 2\n";
    match parse_off::<f64>(bad_number) {
        Err(MeshError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    let out_of_range = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n";
    assert!(matches!(parse_off::<f64>(out_of_range), Err(MeshError::IndexOutOfRange { .. })));
    assert!(matches!(parse_off::<f64>("PLY\n"), Err(MeshError::MalformedHeader(_))));
}

#[test]
fn invalid_meshes_are_rejected() {
    let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [5.0, 5.0, 5.0]];
    assert!(matches!(
        TriangleMesh::new(v.clone(), vec![[0, 1, 2]]),
        Err(MeshError::IsolatedVertex { vertex: 3 })
    ));
    assert!(matches!(TriangleMesh::new(v[..3].to_vec(), vec![[0, 1, 1]]), Err(MeshError::DegenerateTriangle { .. })));
    let collinear = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
    assert!(matches!(TriangleMesh::new(collinear, vec![[0, 1, 2]]), Err(MeshError::ZeroArea { .. })));
    let fan = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
    assert!(matches!(
        TriangleMesh::new(fan, vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]]),
        Err(MeshError::NonManifoldEdge { .. })
    ));
}

#[test]
fn point_binding_reproduces_linear_functions() {
    let mesh = generate_sphere_mesh::<f64>(20.0, 30.0, 1.0).unwrap();
    let pts = barycentric_points(&mesh, 25, 3);
    let obs = ObservationSet::at_points(pts.clone(), vec![0.0; 25], 0.2).unwrap();
    let bound = bind_observations(&mesh, &obs).unwrap();
    assert_eq!(bound.scenario(), Scenario::Smoothing);
    for d in 0..3 {
        let coord: Vec<f64> = mesh.vertices().iter().map(|v| v[d]).collect();
        let got = bound.project(&coord);
        for (g, p) in got.iter().zip(&pts) {
            assert!((g - p[d]).abs() < 1e-12);
        }
    }
    let rows = bound.project(&vec![1.0; mesh.num_vertices()]);
    assert!(rows.iter().all(|r| (r - 1.0).abs() < 1e-14));
}

#[test]
fn off_surface_points_are_rejected() {
    let mesh = tetrahedron();
    let obs = ObservationSet::at_points(vec![[0.0, 0.0, 0.0]], vec![1.0], 0.1).unwrap();
    assert!(matches!(bind_observations(&mesh, &obs), Err(MeshError::Binding { index: 0, .. })));
}

#[test]
fn node_binding_and_complement() {
    let mesh = generate_sphere_mesh::<f64>(30.0, 60.0, 1.0).unwrap();
    let obs = ObservationSet::at_nodes(vec![3, 0, 9], vec![1.0, 2.0, 3.0], 0.0).unwrap();
    let bound = bind_observations(&mesh, &obs).unwrap();
    assert_eq!(bound.scenario(), Scenario::Interpolation);
    assert_eq!(bound.nodes(), Some(&[3, 0, 9][..]));
    assert_eq!(bound.complement().len(), mesh.num_vertices() - 3);
    assert!(!bound.complement().contains(&9));
    let z: Vec<f64> = (0..mesh.num_vertices()).map(|j| j as f64).collect();
    assert_eq!(bound.project(&z), vec![3.0, 0.0, 9.0]);
    assert!(ObservationSet::at_nodes(vec![1, 1], vec![0.0, 0.0], 0.0).and_then(|o| bind_observations(&mesh, &o)).is_err());
    assert!(ObservationSet::at_points(vec![[1.0, 0.0, 0.0]], vec![0.0], 0.0).is_err());
}

#[test]
fn lhs_is_a_latin_hypercube() {
    let mesh = generate_cylinder_mesh::<f64>(10.0, 0.5, 1.0, 10.0).unwrap();
    let chart = mesh.chart().unwrap();
    let n = 12;
    let pts = maximin_lhs(chart, n, 4, &DesignOptions::default());
    for d in 0..2 {
        let [lo, hi] = chart.bounds[d];
        let mut cells: Vec<usize> = pts.iter().map(|p| ((p[d] - lo) / (hi - lo) * n as f64).floor() as usize).collect();
        cells.sort();
        assert_eq!(cells, (0..n).collect::<Vec<_>>(), "axis {d}");
    }
}

#[test]
fn node_design_properties() {
    let mesh = generate_cylinder_mesh::<f64>(10.0, 0.5, 1.0, 10.0).unwrap();
    let m = mesh.num_vertices();
    let a = maximin_node_design(&mesh, 15, 8, &DesignOptions::default()).unwrap();
    let b = maximin_node_design(&mesh, 15, 8, &DesignOptions::default()).unwrap();
    assert_eq!(a, b);
    let mut s = a.clone();
    s.sort();
    s.dedup();
    assert_eq!(s.len(), 15);
    // Better spread than a naive run of consecutive nodes.
    let chart = mesh.chart().unwrap();
    let naive: Vec<usize> = (0..15).collect();
    assert!(min_pairwise_chart_distance(chart, &a) > 3.0 * min_pairwise_chart_distance(chart, &naive));
    let mask: Vec<bool> = (0..m).map(|j| j % 3 == 0).collect();
    let c = maximin_node_design(&mesh, 15, 8, &DesignOptions { candidates: Some(mask), ..Default::default() }).unwrap();
    assert!(c.iter().all(|j| j % 3 == 0));
    assert!(maximin_node_design(&mesh, m + 1, 0, &DesignOptions::default()).is_err());
    assert!(maximin_node_design(&tetrahedron(), 2, 0, &DesignOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn off_text_round_trips(seed in 0u64..10_000, scale in 0.1f64..100.0) {
        let mesh = generate_sphere_mesh::<f64>(30.0, 45.0, scale).unwrap();
        let mut h = seed | 1;
        let jittered: Vec<[f64; 3]> = mesh.vertices().iter().map(|v| {
            h ^= h << 13; h ^= h >> 7; h ^= h << 17;
            let e = (h % 1000) as f64 * 1e-5 * scale;
            [v[0] + e, v[1] - e, v[2] + 0.5 * e]
        }).collect();
        let mesh = TriangleMesh::new(jittered, mesh.triangles().to_vec()).unwrap();
        let mut buf = Vec::new();
        manifold_splines::mesh::write_off(&mesh, &mut buf).unwrap();
        let back = parse_off::<f64>(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.vertices(), mesh.vertices());
        prop_assert_eq!(back.triangles(), mesh.triangles());
    }

    #[test]
    fn design_nodes_are_distinct(n in 1usize..40, seed in 0u64..500) {
        let mesh = generate_cylinder_mesh::<f64>(30.0, 1.0, 1.0, 6.0).unwrap();
        let nodes = maximin_node_design(&mesh, n, seed, &DesignOptions { restarts: 1, ..Default::default() }).unwrap();
        let mut s = nodes.clone();
        s.sort();
        s.dedup();
        prop_assert_eq!(s.len(), n);
        prop_assert!(nodes.iter().all(|&j| j < mesh.num_vertices()));
    }
}
