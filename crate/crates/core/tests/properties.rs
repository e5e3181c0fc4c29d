//! Randomized invariants of the grid transforms, potentials, and norms.

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use fracbound::norms;
use fracbound::numgrid::{apply_multiplier, Dft, SpaceGrid};
use fracbound::potentials::{Potential, Shape};

fn grid1(n: usize) -> SpaceGrid {
    SpaceGrid::new(1, 10.0, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dft_round_trip_is_identity(values in prop::collection::vec(-1e3f64..1e3, 64)) {
        let g = grid1(64);
        let dft = Dft::new(&g);
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        dft.forward(&mut buf);
        dft.inverse(&mut buf);
        let scale = values.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (z, &x) in buf.iter().zip(&values) {
            prop_assert!((z.re - x).abs() <= 1e-12 * scale);
            prop_assert!(z.im.abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn multiplier_composition(values in prop::collection::vec(-10f64..10.0, 64),
                              a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let g = grid1(64);
        let m1: Vec<f64> = g.sample_symbol(|r| (-(a * r).powi(2)).exp());
        let m2: Vec<f64> = g.sample_symbol(|r| 1.0 / (1.0 + b * r * r));
        let m12: Vec<f64> = m1.iter().zip(&m2).map(|(x, y)| x * y).collect();
        let u: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let one = apply_multiplier(&g, &m2, &u).unwrap();
        let two = apply_multiplier(&g, &m1, &one).unwrap();
        let direct = apply_multiplier(&g, &m12, &u).unwrap();
        let scale = values.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (p, q) in two.iter().zip(&direct) {
            prop_assert!((p - q).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn rearrangement_equimeasurable(values in prop::collection::vec(-5f64..5.0, 128)) {
        let g = grid1(128);
        let re = norms::decreasing_rearrangement(&g, &values);
        // same L1 mass
        let direct: f64 = g.cell_weight() * values.iter().map(|x| x.abs()).sum::<f64>();
        prop_assert!((re.integral() - direct).abs() <= 1e-12 * direct.max(1.0));
        // identical distribution function at random levels
        for &t in &[0.1, 1.0, 2.5] {
            let mu_direct = g.cell_weight()
                * values.iter().filter(|x| x.abs() > t).count() as f64;
            let mu_re = g.cell_weight()
                * re.values().iter().filter(|x| **x > t).count() as f64;
            prop_assert_eq!(mu_direct, mu_re);
        }
    }

    #[test]
    fn weak_lp_dominated_by_strong(values in prop::collection::vec(0f64..10.0, 128),
                                   p in 1f64..3.0) {
        let g = grid1(128);
        let strong = (g.cell_weight()
            * values.iter().map(|x| x.powf(p)).sum::<f64>())
        .powf(1.0 / p);
        prop_assert!(norms::weak_lp(&g, &values, p) <= strong + 1e-12);
    }

    #[test]
    fn coupling_composition_up_to_rounding(lam1 in 0.1f64..8.0, lam2 in 0.1f64..8.0) {
        let g = Arc::new(grid1(64));
        let p = Potential::build(Shape::Gaussian { v0: 2.0, w: 1.3 }, g).unwrap();
        let a = p.scale_coupling(lam1).unwrap().scale_coupling(lam2).unwrap();
        let b = p.scale_coupling(lam1 * lam2).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-13 * y.max(1e-300));
        }
    }

    #[test]
    fn rescale_composition(r1 in 0.5f64..2.0, r2 in 0.5f64..2.0) {
        let g = Arc::new(grid1(128));
        let target = Arc::new(SpaceGrid::new(1, 40.0, 512).unwrap());
        let p = Potential::build(Shape::Gaussian { v0: 3.0, w: 0.8 }, g).unwrap();
        let (step1, _) = p.rescale_r(r1, 1.0, target.clone()).unwrap();
        let (two_step, _) = step1.rescale_r(r2, 1.0, target.clone()).unwrap();
        let (direct, _) = p.rescale_r(r1 * r2, 1.0, target).unwrap();
        let scale = direct.values().iter().cloned().fold(1e-300, f64::max);
        for (x, y) in two_step.values().iter().zip(direct.values()) {
            prop_assert!((x - y).abs() <= 1e-8 * scale);
        }
    }
}
