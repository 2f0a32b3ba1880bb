use bonnet_core::fixtures::PlaneWave;
use bonnet_core::frame::{build_matrices_canonical, integrate_frame, orthonormality_drift, reconstruct_surface, IntegrateOptions, Mat4, ReconstructOptions};
use bonnet_core::io::SurfaceFile;
use bonnet_core::surface::{invariants, InvariantOptions};
use bonnet_core::Grid2D;
use proptest::prelude::*;

fn rotation(w: &[f64; 6]) -> Mat4 {
    let mut k = Mat4::zeros();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for (c, &(i, j)) in w.iter().zip(&pairs) {
        k[(i, j)] = *c;
        k[(j, i)] = -*c;
    }
    k.exp()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn right_rotating_the_initial_frame_rotates_every_frame(w in prop::array::uniform6(-3.0..3.0f64)) {
        let nu = PlaneWave::standard().nu_field(Grid2D::square(-0.5, 0.5, 31).unwrap()).unwrap();
        let m = build_matrices_canonical(&nu).unwrap();
        let r = rotation(&w);
        let origin = nu.grid().center();
        let base = integrate_frame(&m, &Mat4::identity(), origin, &IntegrateOptions::default()).unwrap();
        let turned = integrate_frame(&m, &r, origin, &IntegrateOptions::default()).unwrap();
        for (f, g) in base.frames().iter().zip(turned.frames()) {
            prop_assert!((f * r - g).abs().max() < 1e-12);
            prop_assert!(orthonormality_drift(g) < 1e-12);
        }
    }

    #[test]
    fn invariants_are_unchanged_by_rigid_motions(w in prop::array::uniform6(-3.0..3.0f64)) {
        let nu = PlaneWave::standard().nu_field(Grid2D::square(-0.5, 0.5, 41).unwrap()).unwrap();
        let rec = reconstruct_surface(&nu, &Mat4::identity(), None, &ReconstructOptions::default()).unwrap();
        let moved = rec.surface.transformed(&rotation(&w)).unwrap();
        // a 41-node chart is principal only to O(h²)
        let opts = InvariantOptions { principal_tol: 1e-2, ..InvariantOptions::default() };
        let (a, b) = (invariants(&rec.surface, &opts).unwrap(), invariants(&moved, &opts).unwrap());
        prop_assert!(max_diff(a.nu1.values(), b.nu1.values()) < 1e-9);
        prop_assert!(max_diff(a.nu2.values(), b.nu2.values()) < 1e-9);
        prop_assert!(max_diff(a.gamma1.values(), b.gamma1.values()) < 1e-9);
        prop_assert!(max_diff(a.gamma2.values(), b.gamma2.values()) < 1e-9);
        prop_assert!(max_diff(a.forms.e_first.values(), b.forms.e_first.values()) < 1e-12);
    }
}

#[test]
fn reconstruction_is_deterministic() {
    let nu = PlaneWave::standard().nu_field(Grid2D::square(-0.5, 0.5, 51).unwrap()).unwrap();
    let run = || {
        let rec = reconstruct_surface(&nu, &Mat4::identity(), None, &ReconstructOptions::default()).unwrap();
        serde_json::to_string(&SurfaceFile::new(&rec.surface, Some(&rec.frames))).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn canonical_chart_has_conformal_first_form() {
    let w = PlaneWave::standard();
    let nu = w.nu_field(Grid2D::square(-0.5, 0.5, 101).unwrap()).unwrap();
    let rec = reconstruct_surface(&nu, &Mat4::identity(), None, &ReconstructOptions::default()).unwrap();
    let inv = invariants(&rec.surface, &InvariantOptions::default()).unwrap();
    let g = *rec.surface.grid();
    for (i, j) in rec.window.nodes().filter(|&(i, j)| g.is_interior(i, j)) {
        let (u, v) = g.coords(i, j);
        let e = 1.0 / w.nu(u, v);
        assert!((inv.forms.e_first.at(i, j) - e).abs() < 1e-3);
        assert!((inv.forms.g_first.at(i, j) - e).abs() < 1e-3);
        assert!(inv.forms.f_first.at(i, j).abs() < 1e-3);
    }
}
