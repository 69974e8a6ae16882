mod common;

use common::*;
use mdgi_core::dem::{scan_lines, Dem, Direction};
use mdgi_core::fixtures::same_runs_pair;
use mdgi_core::morphology::NamedSe;
use mdgi_core::oracle::*;
use mdgi_core::spectrum::{pattern_spectrum_named, segment_spectrum, Family};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn runs_reproduce_both_families(dem in arb_dem(12, 8), d in 0usize..4) {
        let direction = Direction::ALL[d];
        let rt = run_table(&dem, direction);
        prop_assert_eq!(
            spectrum_from_runs(&rt, Family::Scaled, direction).unwrap(),
            pattern_spectrum_named(&dem, NamedSe::for_direction(direction)).unwrap()
        );
        prop_assert_eq!(
            spectrum_from_runs(&rt, Family::Segments, direction).unwrap(),
            segment_spectrum(&dem, direction).unwrap()
        );
    }

    #[test]
    fn runs_account_for_every_cell_above_each_threshold(dem in arb_dem(10, 6), d in 0usize..4) {
        let direction = Direction::ALL[d];
        let rt = run_table(&dem, direction);
        for line in scan_lines(&dem, direction) {
            for h in 1..=dem.max_elevation() {
                let above = line.segments.iter().flat_map(|s| &s.values).filter(|&&v| v >= h).count();
                let from_runs: u64 = rt
                    .entries()
                    .filter(|e| e.0 == line.index && e.1 == h)
                    .map(|e| e.2 as u64 * e.3)
                    .sum();
                prop_assert_eq!(from_runs, above as u64);
            }
        }
    }

    #[test]
    fn equal_run_profiles_give_equal_spectra(seed in any::<u64>(), d in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_dem(&mut rng, 5, 5, 3, 0.2);
        let b = random_dem(&mut rng, 5, 5, 3, 0.2);
        let direction = Direction::ALL[d];
        if run_profile_equal(&a, &b, direction) {
            let se = NamedSe::for_direction(direction);
            prop_assert_eq!(
                pattern_spectrum_named(&a, se).unwrap().probs(),
                pattern_spectrum_named(&b, se).unwrap().probs()
            );
        }
    }

    #[test]
    fn generated_unipeak_rows(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let row = random_unipeak_row(&mut rng, 20, 30);
        let dem = Dem::from_grid(&[row]).unwrap();
        prop_assert!(is_unipeak(&dem));
        let eq = unipeak_entropy_equivalence(&dem).unwrap();
        prop_assert_eq!(&eq.derivative, &eq.spectrum);
        prop_assert!((eq.derivative_entropy - eq.spectrum_entropy).abs() < 1e-12);
    }

    #[test]
    fn reflection_families_share_row_runs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dem = random_interval_dem(&mut rng, 6, 4, 5);
        let family = reflection_family(&dem, 16).unwrap();
        prop_assert_eq!(family.len(), 16);
        let p = pattern_spectrum_named(&dem, NamedSe::B4).unwrap().probs();
        for m in &family {
            prop_assert!(run_profile_equal(&dem, m, Direction::Row));
            prop_assert_eq!(&pattern_spectrum_named(m, NamedSe::B4).unwrap().probs(), &p);
        }
    }
}

#[test]
fn same_runs_pair_shares_the_row_index() {
    let (a, b) = same_runs_pair();
    assert!(run_profile_equal(&a, &b, Direction::Row));
    let ga = pattern_spectrum_named(&a, NamedSe::B4).unwrap().entropy();
    let gb = pattern_spectrum_named(&b, NamedSe::B4).unwrap().entropy();
    assert_eq!(ga, gb);
}

#[test]
fn segment_probabilities_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let dem = random_dem(&mut rng, 9, 9, 6, 0.3);
        for d in Direction::ALL {
            let ps = spectrum_from_runs(&run_table(&dem, d), Family::Segments, d).unwrap();
            assert_eq!(ps.probs().iter().sum::<Ratio<u64>>(), Ratio::new(1, 1));
        }
    }
}

#[test]
fn run_table_csv_has_one_line_per_entry() {
    let dem = Dem::from_grid(&[vec![2, 5, 5, 2, 2]]).unwrap();
    let rt = run_table(&dem, Direction::Row);
    let csv = rt.to_csv();
    assert_eq!(csv.lines().count(), 1 + rt.counts.len());
    assert_eq!(rt.marginal(3, 2), 1);
}
