//! Property tests for the equidistribution and estimator invariants.

use proptest::collection::vec;
use proptest::prelude::*;

use equimesh::estimator;
use equimesh::mesh::{self, CellField, Mesh};

fn arb_mesh() -> impl Strategy<Value = Mesh> {
    vec(0.001f64..0.999, 1..40).prop_filter_map("degenerate mesh", |mut interior| {
        interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
        interior.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let mut nodes = vec![0.0];
        nodes.append(&mut interior);
        nodes.push(1.0);
        Mesh::new(nodes).ok()
    })
}

fn arb_mesh_with_density() -> impl Strategy<Value = (Mesh, CellField)> {
    arb_mesh().prop_flat_map(|mesh| {
        let n = mesh.n_elements();
        (
            Just(mesh),
            vec(0.01f64..100.0, n..=n).prop_map(CellField::new),
        )
    })
}

proptest! {
    #[test]
    fn equidistribute_balances_mass((mesh, rho) in arb_mesh_with_density()) {
        let n = mesh.n_elements();
        let new_mesh = mesh::equidistribute(&mesh, &rho).unwrap();
        prop_assert_eq!(new_mesh.n_elements(), n);

        // exact piecewise-constant integration over each new cell
        let sigma: f64 = (0..n).map(|j| rho[j] * mesh.h(j)).sum();
        let target = sigma / n as f64;
        for i in 0..n {
            let (a, b) = new_mesh.cell(i);
            let mut mass = 0.0;
            for j in 0..n {
                let (xl, xr) = mesh.cell(j);
                let lo = xl.max(a);
                let hi = xr.min(b);
                if hi > lo {
                    mass += rho[j] * (hi - lo);
                }
            }
            // 1e-14 * sigma covers the rounding of this overlap summation
            // itself; the update is exact to the last few ulps
            prop_assert!((mass - target).abs() <= 1e-12 * target + 1e-14 * sigma,
                "cell {} mass {} vs {}", i, mass, target);
        }
    }

    #[test]
    fn equidistribute_is_monotone_and_idempotent((mesh, rho) in arb_mesh_with_density()) {
        let n = mesh.n_elements();
        let new_mesh = mesh::equidistribute(&mesh, &rho).unwrap();
        for w in new_mesh.nodes().windows(2) {
            prop_assert!(w[1] > w[0]);
        }

        // reinterpreting the equidistributed mass as a density on the new
        // mesh fixes the cumulative integral, so a second pass is identity
        let sigma: f64 = (0..n).map(|j| rho[j] * mesh.h(j)).sum();
        let induced = CellField::new((0..n).map(|i| (sigma / n as f64) / new_mesh.h(i)).collect());
        let again = mesh::equidistribute(&new_mesh, &induced).unwrap();
        prop_assert!(mesh::mesh_distance(&new_mesh, &again).unwrap() <= 1e-12);

        // and its quality is exactly equidistributed
        let q = mesh::quality_measure(&new_mesh, &induced).unwrap();
        prop_assert!((q.max() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn quality_measure_sums_to_n((mesh, rho) in arb_mesh_with_density()) {
        let n = mesh.n_elements();
        let q = mesh::quality_measure(&mesh, &rho).unwrap();
        let sum: f64 = q.values().iter().sum();
        prop_assert!((sum - n as f64).abs() <= 1e-12 * n as f64);
        prop_assert!(q.max() >= 1.0 - 1e-12);
    }

    #[test]
    fn mesh_distance_is_symmetric((mesh, _) in arb_mesh_with_density(), shift in 0.0f64..1.0) {
        // second mesh: same size, interior nodes blended toward uniform
        let n = mesh.n_elements();
        let uniform = Mesh::uniform(n).unwrap();
        let blended: Vec<f64> = mesh
            .nodes()
            .iter()
            .zip(uniform.nodes())
            .map(|(a, b)| a + shift * (b - a))
            .collect();
        let mut blended = blended;
        blended[0] = 0.0;
        blended[n] = 1.0;
        if let Ok(other) = Mesh::new(blended) {
            let d1 = mesh::mesh_distance(&mesh, &other).unwrap();
            let d2 = mesh::mesh_distance(&other, &mesh).unwrap();
            prop_assert_eq!(d1, d2);
            prop_assert!(d1 >= 0.0);
            prop_assert_eq!(mesh::mesh_distance(&mesh, &mesh).unwrap(), 0.0);
        }
    }

    #[test]
    fn regularized_estimator_dominates(
        (mesh, field) in arb_mesh_with_density()
    ) {
        // treat the density values as residual averages
        let averages = field;
        let alpha = estimator::intensity(&mesh, &averages).unwrap();
        let rho = estimator::adaptation_function(&averages, alpha);
        for &r in rho.values() {
            prop_assert!(r >= 1.0);
        }
        let (eta, eta_tilde) = estimator::estimators(&mesh, &averages, alpha, &rho).unwrap();
        prop_assert!(eta_tilde >= eta - 1e-12 * eta.max(1.0));

        // sigma >= 1 because rho >= 1 and the cell widths sum to 1
        let sigma: f64 = (0..mesh.n_elements()).map(|i| rho[i] * mesh.h(i)).sum();
        prop_assert!(sigma >= 1.0 - 1e-12);
    }
}
