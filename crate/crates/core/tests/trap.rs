mod common;

use fermisea::trap::{floored_tilde, FermiSea, OscillatorState, Shape, TrapGeometry};
use fermisea::Error;
use proptest::prelude::*;

fn geom(shape: Shape, lambda: u32) -> TrapGeometry {
    TrapGeometry::new(shape, lambda).unwrap()
}

#[test]
fn worked_examples() {
    assert_eq!(floored_tilde(19, 10), 1);
    assert_eq!(floored_tilde(23, 11), 2);

    let p10 = geom(Shape::Pancake, 10);
    assert_eq!(p10.shell_index(OscillatorState::new(10, 0, 1)), 20);
    assert_eq!(p10.shell_index(OscillatorState::new(0, 0, 2)), 20);
    assert_eq!(p10.shell_energy(0), 6.0);
    assert_eq!(geom(Shape::Cigar, 10).shell_energy(0), 10.5);

    assert_eq!(geom(Shape::Pancake, 2).degeneracy(2), 4);
    assert_eq!(geom(Shape::Cigar, 2).degeneracy(2), 3);
    for shape in [Shape::Pancake, Shape::Cigar] {
        let g = geom(shape, 5);
        assert_eq!(g.degeneracy_bruteforce(5).unwrap(), g.degeneracy(5));
    }

    let sea = FermiSea::new(2).unwrap();
    assert_eq!(geom(Shape::Pancake, 2).cumulative_states(sea).unwrap(), 7);
    assert_eq!(geom(Shape::Cigar, 2).cumulative_states(sea).unwrap(), 5);

    let filling = geom(Shape::Pancake, 2).fermi_shell_for_atoms(7);
    assert_eq!((filling.sea.n_f(), filling.occupancy), (2, 4));
}

#[test]
fn degeneracy_matches_enumeration() {
    for lambda in 1..=6u32 {
        for (shape, pancake) in [(Shape::Pancake, true), (Shape::Cigar, false)] {
            let g = geom(shape, lambda);
            for n in 0..=60 {
                let want = common::degeneracy_enumerated(pancake, u64::from(lambda), n);
                assert_eq!(g.degeneracy(n), want, "{shape} λ={lambda} n={n}");
                assert_eq!(g.degeneracy_bruteforce(n).unwrap(), want);
            }
        }
    }
}

#[test]
fn cumulative_counts_match_running_sums() {
    for lambda in 1..=6u32 {
        for shape in [Shape::Pancake, Shape::Cigar] {
            let g = geom(shape, lambda);
            let mut total = 0;
            assert_eq!(g.cumulative_states(FermiSea::EMPTY).unwrap(), 0);
            for n_f in 0..=60 {
                total += g.degeneracy(n_f as u64);
                assert_eq!(g.cumulative_states(FermiSea::new(n_f).unwrap()).unwrap(), total);
            }
        }
    }
}

#[test]
fn isotropic_shapes_coincide() {
    let (p, c) = (geom(Shape::Pancake, 1), geom(Shape::Cigar, 1));
    for n in 0..=200u64 {
        assert_eq!(p.degeneracy(n), (n + 1) * (n + 2) / 2);
        assert_eq!(c.degeneracy(n), p.degeneracy(n));
    }
}

#[test]
fn degeneracy_is_nondecreasing() {
    for lambda in 1..=6 {
        for shape in [Shape::Pancake, Shape::Cigar] {
            let g = geom(shape, lambda);
            for n in 0..200 {
                assert!(g.degeneracy(n + 1) >= g.degeneracy(n), "{shape} λ={lambda} n={n}");
            }
        }
    }
}

#[test]
fn atoms_to_fermi_shell_inverts_the_count() {
    for lambda in 1..=6 {
        for shape in [Shape::Pancake, Shape::Cigar] {
            let g = geom(shape, lambda);
            for n_f in 0..=40i64 {
                let atoms = g.cumulative_states(FermiSea::new(n_f).unwrap()).unwrap();
                let filling = g.fermi_shell_for_atoms(atoms);
                assert_eq!(filling.sea.n_f(), n_f);
                assert_eq!(filling.occupancy, g.degeneracy(n_f as u64));
                assert!(filling.is_closed());
                assert_eq!(FermiSea::from_atoms(&g, atoms).unwrap().n_f(), n_f);
            }
        }
    }
}

#[test]
fn partial_shells_are_reported_but_not_accepted() {
    let g = geom(Shape::Pancake, 2);
    let filling = g.fermi_shell_for_atoms(5);
    assert_eq!((filling.sea.n_f(), filling.occupancy, filling.degeneracy), (2, 2, 4));
    assert!(!filling.is_closed());
    assert!(matches!(
        FermiSea::from_atoms(&g, 5),
        Err(Error::PartiallyFilledShell {
            occupied: 2,
            degeneracy: 4
        })
    ));
    assert!(FermiSea::from_atoms(&g, 0).unwrap().is_empty());
}

#[test]
fn invalid_geometry_is_rejected() {
    assert!(TrapGeometry::new(Shape::Pancake, 0).is_err());
    assert!(TrapGeometry::from_real(Shape::Cigar, 2.5).is_err());
    assert!(TrapGeometry::from_real(Shape::Cigar, -3.0).is_err());
    assert!(TrapGeometry::from_real(Shape::Cigar, f64::NAN).is_err());
    assert_eq!(TrapGeometry::from_real(Shape::Cigar, 7.0).unwrap().lambda(), 7);
    assert!(FermiSea::new(-2).is_err());
}

#[test]
fn shell_states_enumerate_the_shell() {
    for shape in [Shape::Pancake, Shape::Cigar] {
        let g = geom(shape, 3);
        for n in 0..25 {
            let states: Vec<_> = g.shell_states(n).collect();
            assert_eq!(states.len() as u64, g.degeneracy(n));
            assert!(states.iter().all(|&s| g.shell_index(s) == n));
            let mut sorted = states.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), states.len());
        }
    }
}

proptest! {
    #[test]
    fn closed_form_count_is_integral_for_larger_shells(lambda in 1u32..40, n_f in 0i64..400) {
        for shape in [Shape::Pancake, Shape::Cigar] {
            let g = geom(shape, lambda);
            let direct: u64 = (0..=n_f as u64).map(|n| g.degeneracy(n)).sum();
            prop_assert_eq!(g.cumulative_states(FermiSea::new(n_f).unwrap()).unwrap(), direct);
        }
    }

    #[test]
    fn shell_index_is_consistent_with_energy(lambda in 1u32..20, nx in 0u64..30, ny in 0u64..30, nz in 0u64..30) {
        for shape in [Shape::Pancake, Shape::Cigar] {
            let g = geom(shape, lambda);
            let s = OscillatorState::new(nx, ny, nz);
            let n = g.shell_index(s);
            let l = f64::from(lambda);
            let energy = match shape {
                Shape::Pancake => nx as f64 + ny as f64 + l * nz as f64 + 1.0 + l / 2.0,
                Shape::Cigar => l * (nx + ny) as f64 + nz as f64 + l + 0.5,
            };
            prop_assert!((g.shell_energy(n) - energy).abs() < 1e-9);
        }
    }
}
