use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use vortex_gyro::condensate::{ChemicalPotential, CondensateProfile, TrapConfig};
use vortex_gyro::interference::{
    density, density_at, pattern_rotation_angle, sagnac_phase, Grid, RenderMode,
    VortexSuperposition,
};

fn profile(l: u32) -> CondensateProfile {
    CondensateProfile::new(&TrapConfig::default(), l as i32, ChemicalPotential::Common).unwrap()
}

#[test]
fn sagnac_examples() {
    assert!((sagnac_phase(100, 5e-8, 1.0) - 1e-5).abs() <= 1e-17);
    assert_eq!(sagnac_phase(4, 0.0, 3.0), 0.0);
    assert!((sagnac_phase(2, 0.05, 10.0) - 2.0).abs() <= 1e-15);
}

#[test]
fn static_pattern_has_charge_periodicity() {
    for l in [1u32, 2, 3, 7] {
        let p = profile(l);
        let sup = VortexSuperposition::equal(l).unwrap();
        let grid = Grid::for_trap(p.trap());
        let field = density(&sup, &p, &grid, RenderMode::Slice).unwrap();
        let turn = PI / f64::from(l);
        let peak = field.max();
        for (k, v) in field.values.iter().enumerate().step_by(7) {
            let (x, y) = grid.position(k);
            let (xr, yr) = (x * turn.cos() - y * turn.sin(), x * turn.sin() + y * turn.cos());
            let turned = density_at(&sup, &p, RenderMode::Slice, xr, yr);
            assert!((v - turned).abs() <= 1e-3 * peak);
        }
    }
}

#[test]
fn relative_phase_shifts_the_fringes() {
    let l = 3;
    let p = profile(l);
    let theta = 0.9;
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let shifted = VortexSuperposition::new(Complex64::from_polar(a, theta), Complex64::new(a, 0.0), l).unwrap();
    let plain = VortexSuperposition::equal(l).unwrap();
    let rho = 0.5 * (p.support().0 + p.support().1);
    let turn = theta / (2.0 * f64::from(l));
    let scale = density_at(&plain, &p, RenderMode::Slice, rho, 0.0);
    for k in 0..64 {
        let phi = 2.0 * PI * k as f64 / 64.0;
        let lhs = density_at(&shifted, &p, RenderMode::Slice, rho * (phi + turn).cos(), rho * (phi + turn).sin());
        let rhs = density_at(&plain, &p, RenderMode::Slice, rho * phi.cos(), rho * phi.sin());
        assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_angle_identity(l in 1u32..200, omega in -10.0f64..10.0, t in 0.0f64..100.0) {
        let angle = pattern_rotation_angle(sagnac_phase(l, omega, t), l);
        prop_assert!((angle - omega * t).abs() <= 1e-12 * (1.0 + (omega * t).abs()));
    }

    #[test]
    fn rendered_pattern_is_the_static_one_turned(l in 1u32..6, phase in -20.0f64..20.0) {
        let p = profile(l);
        let grid = Grid::square(48, 1.5 * p.trap().lx, p.trap().lx);
        let base = VortexSuperposition::equal(l).unwrap();
        let field = density(&base.with_sagnac_phase(phase), &p, &grid, RenderMode::Slice).unwrap();
        let chi = phase / (2.0 * f64::from(l));
        let peak = field.max();
        for (k, v) in field.values.iter().enumerate() {
            let (x, y) = grid.position(k);
            let (xr, yr) = (x * chi.cos() + y * chi.sin(), -x * chi.sin() + y * chi.cos());
            let expected = density_at(&base, &p, RenderMode::Slice, xr, yr);
            prop_assert!((v - expected).abs() <= 1e-3 * peak);
        }
    }

    #[test]
    fn charge_conjugate_is_the_mirror_image(
        l in 1u32..5,
        bp in 0.1f64..1.0,
        theta in -PI..PI,
        phase in -10.0f64..10.0,
        fx in -1.0f64..1.0,
        fy in -1.0f64..1.0,
    ) {
        let p = profile(l);
        let b_plus = Complex64::from_polar(bp, theta);
        let b_minus = Complex64::new((1.0 - bp * bp).max(0.0).sqrt(), 0.3);
        let sup = VortexSuperposition::normalized(b_plus, b_minus, l).unwrap().with_sagnac_phase(phase);
        let swapped = VortexSuperposition::normalized(b_minus, b_plus, l).unwrap().with_sagnac_phase(-phase);
        let r = p.support().1;
        let (x, y) = (fx * r, fy * r);
        let a = density_at(&sup, &p, RenderMode::Slice, x, y);
        let b = density_at(&swapped, &p, RenderMode::Slice, x, -y);
        let single = VortexSuperposition::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), l).unwrap();
        let envelope = density_at(&single, &p, RenderMode::Slice, x, y);
        prop_assert!((a - b).abs() <= 1e-12 * envelope);
    }

    #[test]
    fn atoms_and_sign_survive_any_phase(phase in -50.0f64..50.0, column in any::<bool>()) {
        let p = profile(2);
        let grid = Grid::square(96, 1.5 * p.trap().lx, p.trap().lx);
        let mode = if column { RenderMode::Column } else { RenderMode::Slice };
        let sup = VortexSuperposition::equal(2).unwrap().with_sagnac_phase(phase);
        let field = density(&sup, &p, &grid, mode).unwrap();
        prop_assert!(field.values.iter().all(|&v| v >= 0.0));
        let n = p.trap().atom_count as f64;
        prop_assert!((field.total_atoms() - n).abs() <= 1e-3 * n);
    }
}
