use std::f64::consts::{FRAC_1_SQRT_2, PI};

use bonnet_core::fixtures::{MercatorSphere, PlaneWave, PlaneWaveProfile};
use bonnet_core::hypersurface::{shape_spectrum, BiUmbilical, SpectrumOptions};
use bonnet_core::mesh::{obj_from_nodes, project_point, Projection};
use bonnet_core::surface::{invariants, InvariantOptions, SurfaceS3};
use bonnet_core::{Grid2D, MaskedField};
use proptest::prelude::*;

#[test]
fn clifford_torus_hand_values() {
    let s = SurfaceS3::from_fn(Grid2D::square(0.0, 1.0, 41).unwrap(), |u, v| {
        [u.cos(), u.sin(), v.cos(), v.sin()].map(|x| x * FRAC_1_SQRT_2)
    })
    .unwrap();
    let inv = invariants(&s, &InvariantOptions::default()).unwrap();
    let g = *s.grid();
    for j in 1..g.nv() - 1 {
        for i in 1..g.nu() - 1 {
            // E = G = 1/2, F = 0; principal normal curvatures ±1; flat
            assert!((inv.forms.e_first.at(i, j) - 0.5).abs() < 1e-3);
            assert!((inv.forms.g_first.at(i, j) - 0.5).abs() < 1e-3);
            assert!(inv.forms.f_first.at(i, j).abs() < 1e-12);
            assert!((inv.nu1.at(i, j) * inv.nu2.at(i, j) + 1.0).abs() < 1e-3);
            assert!((inv.nu1.at(i, j) + inv.nu2.at(i, j)).abs() < 1e-9);
        }
    }
    assert!(MaskedField::with_margin(inv.gauss_curvature, 2).max_abs() < 1e-3);
}

#[test]
fn stereographic_hand_values() {
    let p = |x: [f64; 4], pr| project_point(&x, pr).unwrap();
    assert_eq!(p([1.0, 0.0, 0.0, 0.0], Projection::Stereographic), [1.0, 0.0, 0.0]);
    assert_eq!(p([0.0, 0.0, 0.0, 1.0], Projection::Stereographic), [0.0, 0.0, 0.0]);
    let s = FRAC_1_SQRT_2;
    let q = p([0.0, s, 0.0, s], Projection::Stereographic);
    assert!((q[1] - s / (1.0 + s)).abs() < 1e-15);
    assert_eq!(p([0.0, 0.0, 0.6, 0.8], Projection::DropCoordinate), [0.0, 0.0, 0.6]);
    let q = p([0.0, 0.0, 0.6, -0.8], Projection::StereographicNorth);
    assert!((q[2] - 0.6 / 1.8).abs() < 1e-15);
    assert!(project_point(&[0.0, 0.0, 0.0, -1.0], Projection::Stereographic).is_err());
    assert!(project_point(&[0.0, 0.0, 0.0, 1.0], Projection::StereographicNorth).is_err());
}

#[test]
fn two_by_two_mesh_bytes() {
    let nodes: [&[f64]; 4] = [&[0.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]];
    let obj = obj_from_nodes(2, 2, &nodes, Projection::Stereographic).unwrap();
    assert_eq!(obj, "# 2 x 2 grid, projection stereographic\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 4 3\n");
}

#[test]
fn profile_matches_its_taylor_expansion() {
    // φ(0) = 0, φ'(0) = 1, φ''(0) = 0, φ'''(0) = -4
    let p = PlaneWaveProfile::new(0.0, 1.0, -0.1, 0.1).unwrap();
    for s in [-0.01, 0.003, 0.01] {
        let (phi, dphi, ddphi) = p.eval(s);
        assert!((phi - (s - 2.0 * s * s * s / 3.0)).abs() < 1e-9);
        assert!((dphi - (1.0 - 2.0 * s * s)).abs() < 1e-7);
        assert!((ddphi + 4.0 * phi.sinh()).abs() < 1e-12);
    }
}

#[test]
fn biumbilical_principal_curvature_on_the_base_sphere() {
    for (n, alpha) in [(3, 0.0), (4, 0.6), (5, 1.0)] {
        let map = BiUmbilical::new(Box::new(MercatorSphere { radius: 2.0 }), 2.0, alpha, n).unwrap();
        let mut p = vec![0.0; n];
        p[0] = 0.3;
        p[1] = -0.2;
        let s = shape_spectrum(&map, &p, &SpectrumOptions::default()).unwrap();
        let (a, b) = s.principal_pair();
        let expected = f64::cos(alpha) / 2.0;
        assert!((s.eigenvalues[a].abs() - expected).abs() < 1e-6, "n={n}: {:?}", s.eigenvalues);
        assert!((s.eigenvalues[b].abs() - expected).abs() < 1e-6, "n={n}: {:?}", s.eigenvalues);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_conserves_energy(phi0 in -0.5..0.5f64, dphi0 in -1.5..1.5f64, s in -1.0..1.0f64) {
        // φ'²/2 + 4 cosh φ is a first integral of φ'' = -4 sinh φ
        let p = PlaneWaveProfile::new(phi0, dphi0, -1.0, 1.0).unwrap();
        let (phi, dphi, _) = p.eval(s);
        let energy = 0.5 * dphi * dphi + 4.0 * phi.cosh();
        let initial = 0.5 * dphi0 * dphi0 + 4.0 * phi0.cosh();
        prop_assert!((energy - initial).abs() < 1e-10);
    }

    #[test]
    fn rotated_wave_is_the_rotated_argument(t in -PI..PI, u in -0.3..0.3f64, v in -0.3..0.3f64) {
        let w = PlaneWave::standard();
        let (c, s) = (t.cos(), t.sin());
        prop_assert!((w.rotated(t).nu(u, v) - w.nu(c * u - s * v, s * u + c * v)).abs() < 1e-12);
    }

    #[test]
    fn projection_lands_back_on_the_sphere(a in -PI..PI, b in -1.4..1.4f64, c in -PI..PI) {
        let x = [b.cos() * a.cos(), b.cos() * a.sin(), b.sin() * c.cos(), b.sin() * c.sin()];
        prop_assume!((x[3] + 1.0).abs() > 1e-3);
        let y = project_point(&x, Projection::Stereographic).unwrap();
        let r2: f64 = y.iter().map(|q| q * q).sum();
        // inverse stereographic map from the pole (0, 0, 0, -1)
        let back = [2.0 * y[0] / (1.0 + r2), 2.0 * y[1] / (1.0 + r2), 2.0 * y[2] / (1.0 + r2), (1.0 - r2) / (1.0 + r2)];
        for k in 0..4 {
            prop_assert!((back[k] - x[k]).abs() < 1e-9);
        }
    }
}
